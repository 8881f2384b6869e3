"""Pipeline stages: extract -> embed -> reconstruct -> semantic -> report.

Every stage reads files written by the previous one and writes files of its
own, so a 5000-center batch can resume or re-run any stage. Cells are
(center, hop, algorithm) units; each gets a seed derived by stable hash of
(run seed, center, hop, algorithm), so results do not depend on worker
scheduling. A failing cell is recorded in the stage's error ledger and never
aborts its siblings.
"""
from __future__ import annotations

import hashlib
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .dot import render_dot
from .emb_io import read_embedding, write_embedding
from .factorization import AsymEmbedding, clamp_dim, hope_embed, lap_embed, lle_embed
from .graph import DiGraph, NodeId, graph_from_labeled_edges, khop_ego_subgraph
from .ingest import (
    ALGORITHMS,
    Manifest,
    graph_from_records,
    load_manifest,
    parse_edge_list,
    resolve_centers,
    write_edge_list,
)
from .randomwalk import Node2VecConfig, node2vec_embed
from .reconstruct import DEFAULT_FRACTIONS, reconstruction_report
from .sdne import SdneParams, sdne_train
from .semantic import (
    analogy_distance,
    analogy_vocab,
    load_analogy_dataset,
    load_similarity_dataset,
    similarity_mean_distance,
    similarity_vocab,
)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

DEFAULT_DIM_SCHEDULE = {1: 2, 2: 64, 3: 128}
DEFAULT_SCORERS = {
    "node2vec": "dot",
    "sdne": "dot",
    "hope": "asym_dot",
    "lap": "neg_distance",
    "lle": "neg_distance",
}


class PipelineError(RuntimeError):
    """Total pipeline failure: nothing usable was produced."""


@dataclass
class PipelineConfig:
    manifest: Manifest
    output_dir: Path
    dim_schedule: dict[int, int] = field(default_factory=lambda: dict(DEFAULT_DIM_SCHEDULE))
    epochs: int = 50
    threshold: float = 0.5
    prec_fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    scorers: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_SCORERS))
    node2vec: Node2VecConfig = field(default_factory=Node2VecConfig)
    sdne: SdneParams = field(default_factory=SdneParams)
    hope_beta: float = 0.01
    analogy_mode: str = "pairwise"
    emb_format: str = "binary"
    label_prefix: str = "/c/en/"
    seed: int = 0
    workers: int = 1
    dot: bool = False

    def label_mapper(self) -> Callable[[str], str]:
        prefix = self.label_prefix
        return lambda word: prefix + word.strip().lower().replace(" ", "_")

    def effective_dict(self) -> dict:
        """Every effective hyperparameter, serialized for the run report."""
        return {
            "dim_schedule": {str(k): v for k, v in sorted(self.dim_schedule.items())},
            "epochs": self.epochs,
            "threshold": self.threshold,
            "prec_fractions": list(self.prec_fractions),
            "scorers": dict(sorted(self.scorers.items())),
            "node2vec": {
                "walk_length": self.node2vec.walk_length,
                "walks_per_node": self.node2vec.walks_per_node,
                "context_size": self.node2vec.context_size,
                "p": self.node2vec.p,
                "q": self.node2vec.q,
                "negatives_per_positive": self.node2vec.negatives_per_positive,
                "learning_rate": self.node2vec.learning_rate,
                "epochs": self.node2vec.epochs,
            },
            "sdne": {
                "alpha": self.sdne.alpha,
                "beta_penalty": self.sdne.beta_penalty,
                "l1_reg": self.sdne.l1_reg,
                "l2_reg": self.sdne.l2_reg,
                "rho": self.sdne.rho,
                "xeta": self.sdne.xeta,
                "batch_size": self.sdne.batch_size,
                "epochs": self.sdne.epochs,
            },
            "hope_beta": self.hope_beta,
            "analogy_mode": self.analogy_mode,
            "emb_format": self.emb_format,
            "label_prefix": self.label_prefix,
            "seed": self.seed,
        }


def config_from_manifest(
    manifest: Manifest,
    output_dir: str | Path,
    seed: int | None = None,
    threshold: float | None = None,
    workers: int = 1,
    dot: bool = False,
    graph_format: str | None = None,
) -> PipelineConfig:
    """Apply manifest options and CLI overrides on top of the defaults."""
    opts = manifest.options
    cfg = PipelineConfig(manifest=manifest, output_dir=Path(output_dir))
    if graph_format:
        manifest.graph_format = graph_format
    if "dim_schedule" in opts:
        schedule = {}
        for chunk in opts["dim_schedule"].split(","):
            hop, _, dim = chunk.partition(":")
            schedule[int(hop)] = int(dim)
        cfg.dim_schedule = schedule
    if "epochs" in opts:
        cfg.epochs = int(opts["epochs"])
    cfg.threshold = float(opts.get("threshold", cfg.threshold))
    if threshold is not None:
        cfg.threshold = threshold
    cfg.hope_beta = float(opts.get("hope_beta", cfg.hope_beta))
    cfg.analogy_mode = opts.get("analogy_mode", cfg.analogy_mode)
    cfg.emb_format = opts.get("emb_format", cfg.emb_format)
    cfg.label_prefix = opts.get("label_prefix", cfg.label_prefix)
    for algo in ALGORITHMS:
        key = f"scorer.{algo}"
        if key in opts:
            cfg.scorers[algo] = opts[key]
    n2v = {}
    for name, cast in (
        ("walk_length", int), ("walks_per_node", int), ("context_size", int),
        ("p", float), ("q", float), ("negatives_per_positive", int),
        ("learning_rate", float),
    ):
        key = f"node2vec.{name}"
        if key in opts:
            n2v[name] = cast(opts[key])
    cfg.node2vec = replace(cfg.node2vec, epochs=cfg.epochs, **n2v)
    sdne_kwargs = {}
    for name, cast in (
        ("alpha", float), ("beta_penalty", float), ("l1_reg", float), ("l2_reg", float),
        ("rho", float), ("xeta", float), ("batch_size", int),
    ):
        key = f"sdne.{name}"
        if key in opts:
            sdne_kwargs[name] = cast(opts[key])
    cfg.sdne = replace(cfg.sdne, epochs=cfg.epochs, **sdne_kwargs)
    cfg.seed = manifest.seed if seed is None else seed
    cfg.workers = max(1, workers)
    cfg.dot = dot
    return cfg


# -- deterministic naming and seeding ------------------------------------


def cell_seed(run_seed: int, center: str, hop: int, algorithm: str) -> int:
    digest = hashlib.blake2b(
        f"{run_seed}|{center}|{hop}|{algorithm}".encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little") >> 1  # keep it positive


def center_slug(label: str) -> str:
    safe = "".join(ch if ch.isalnum() else "_" for ch in label).strip("_")[:40]
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=4).hexdigest()
    return f"{safe}_{digest}" if safe else digest


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(obj) + "\n", encoding="utf-8")


def _read_json(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))


# -- shared loading -------------------------------------------------------


def load_graph(cfg: PipelineConfig) -> DiGraph:
    parsed = parse_edge_list(cfg.manifest.graph_path, cfg.manifest.graph_format)
    if not parsed.records and not parsed.isolated_nodes:
        raise PipelineError(f"graph file {cfg.manifest.graph_path} holds no edges")
    return graph_from_records(parsed)


def load_datasets(cfg: PipelineConfig) -> dict[str, dict]:
    """name -> {kind, records, vocab, diagnostics}"""
    out = {}
    for name, (kind, path) in sorted(cfg.manifest.dataset_paths.items()):
        if kind == "similarity":
            fmt = "csv" if path.endswith(".csv") else "tsv"
            records, diags = load_similarity_dataset(path, fmt)
            vocab = similarity_vocab(records)
        else:
            records, diags = load_analogy_dataset(path)
            vocab = analogy_vocab(records)
        out[name] = {"kind": kind, "records": records, "vocab": vocab, "diagnostics": diags}
    return out


def _resolved_cells(cfg: PipelineConfig) -> list[dict]:
    return _read_json(cfg.output_dir / "cells.json")["cells"]


def _run_cells(cfg: PipelineConfig, tasks, worker) -> tuple[dict, list[dict]]:
    """Run `worker` over tasks on a bounded pool; collect results and errors."""
    results: dict[str, object] = {}
    errors: list[dict] = []

    def run_one(task):
        key = task["key"]
        try:
            return key, worker(task), None
        except Exception as exc:  # cell isolation: record, keep siblings running
            return key, None, {"cell": key, "stage": task["stage"], "error": str(exc)}

    if cfg.workers == 1:
        outcomes = [run_one(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(run_one, tasks))
    for key, value, err in outcomes:
        if err is not None:
            errors.append(err)
        else:
            results[key] = value
    errors.sort(key=lambda e: e["cell"])
    return results, errors


def _write_stage_errors(cfg: PipelineConfig, stage: str, errors: list[dict]) -> None:
    _write_json(cfg.output_dir / f"errors_{stage}.json", errors)


def _timing_path(cfg: PipelineConfig, stage: str) -> Path:
    return cfg.output_dir / "timings" / f"{stage}.json"


# -- stage: extract --------------------------------------------------------


def run_extract(cfg: PipelineConfig) -> list[dict]:
    started = time.perf_counter()
    graph = load_graph(cfg)
    datasets = load_datasets(cfg)
    vocab = {name: info["vocab"] for name, info in datasets.items()}

    out = cfg.output_dir
    (out / "subgraphs").mkdir(parents=True, exist_ok=True)
    cells = []
    errors: list[dict] = []

    manifest = cfg.manifest
    if manifest.center_mode == "explicit" or manifest.center_labels:
        # unresolved explicit centers become error entries, the rest proceed
        centers = []
        for label in dict.fromkeys(manifest.center_labels):
            if graph.has_label(label):
                centers.append(NodeId(label, graph.index_of(label)))
            else:
                errors.append({
                    "cell": label, "stage": "extract",
                    "error": f"center label not present in graph: {label!r}",
                })
        if not centers:
            raise PipelineError("no explicit centers resolved against the graph")
    else:
        centers = resolve_centers(manifest, vocab, graph, cfg.label_mapper())
    timings: dict[str, float] = {}
    stats: dict[str, dict] = {}
    for center in centers:
        for hop in cfg.manifest.hops:
            key = f"{center.label}|h{hop}"
            slug = center_slug(center.label)
            path = out / "subgraphs" / f"{slug}_h{hop}.tsv"
            t0 = time.perf_counter()
            try:
                sub = khop_ego_subgraph(graph, center.label, hop)
                if not path.exists():
                    write_edge_list(sub, path)
                stats[key] = {"nodes": sub.node_count, "edges": sub.edge_count, "hop": hop}
                cells.append({"center": center.label, "slug": slug, "hop": hop})
            except Exception as exc:
                errors.append({"cell": key, "stage": "extract", "error": str(exc)})
            timings[key] = time.perf_counter() - t0

    per_hop = {}
    for hop in cfg.manifest.hops:
        sizes = [(s["nodes"], s["edges"]) for s in stats.values() if s["hop"] == hop]
        if not sizes:
            continue
        vs = [v for v, _ in sizes]
        es = [e for _, e in sizes]
        per_hop[str(hop)] = {
            "min_v": min(vs), "avg_v": sum(vs) / len(vs), "max_v": max(vs),
            "min_e": min(es), "avg_e": sum(es) / len(es), "max_e": max(es),
        }
    _write_json(out / "cells.json", {
        "centers": [{"label": c.label, "slug": center_slug(c.label)} for c in centers],
        "hops": list(cfg.manifest.hops),
        "algorithms": list(cfg.manifest.algorithms),
        "cells": cells,
    })
    _write_json(out / "stats.json", {
        "graph": {"nodes": graph.node_count, "edges": graph.edge_count},
        "per_hop": per_hop,
        "cells": {k: {"nodes": v["nodes"], "edges": v["edges"]} for k, v in sorted(stats.items())},
    })
    _write_stage_errors(cfg, "extract", errors)
    timings["_stage_total"] = time.perf_counter() - started
    _write_json(_timing_path(cfg, "extract"), timings)
    return errors


# -- stage: embed -----------------------------------------------------------


def _embed_one(cfg: PipelineConfig, sub: DiGraph, algorithm: str, dim: int, seed: int):
    if algorithm == "hope":
        return hope_embed(sub, dim, beta=cfg.hope_beta)
    if algorithm == "lle":
        return lle_embed(sub, dim)
    if algorithm == "lap":
        return lap_embed(sub, dim)
    if algorithm == "node2vec":
        return node2vec_embed(sub, dim, replace(cfg.node2vec, seed=seed))
    if algorithm == "sdne":
        return sdne_train(sub, dim, cfg.sdne, seed=seed)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def run_embed(cfg: PipelineConfig) -> list[dict]:
    started = time.perf_counter()
    out = cfg.output_dir
    if not (out / "cells.json").exists():
        raise PipelineError("embed stage requires extract outputs (cells.json missing)")
    (out / "embeddings").mkdir(parents=True, exist_ok=True)
    tasks = []
    for cell in _resolved_cells(cfg):
        for algo in cfg.manifest.algorithms:
            key = f"{cell['center']}|h{cell['hop']}|{algo}"
            tasks.append({
                "key": key,
                "stage": "embed",
                "center": cell["center"],
                "slug": cell["slug"],
                "hop": cell["hop"],
                "algorithm": algo,
            })
    timings: dict[str, float] = {}

    def worker(task):
        t0 = time.perf_counter()
        sub_path = out / "subgraphs" / f"{task['slug']}_h{task['hop']}.tsv"
        sub = graph_from_records(parse_edge_list(sub_path, "tsv3"))
        requested = cfg.dim_schedule.get(task["hop"], 2)
        effective = clamp_dim(requested, sub.node_count)
        if effective != requested:
            log.info("cell %s: requested %d, effective %d", task["key"], requested, effective)
        seed = cell_seed(cfg.seed, task["center"], task["hop"], task["algorithm"])
        emb_path = out / "embeddings" / f"{task['slug']}_h{task['hop']}_{task['algorithm']}.emb"
        if not emb_path.exists():
            emb = _embed_one(cfg, sub, task["algorithm"], requested, seed)
            write_embedding(emb, emb_path, cfg.emb_format)
        timings[task["key"]] = time.perf_counter() - t0
        return {
            "requested_dim": requested,
            "effective_dim": effective,
            "cell_seed": seed,
            "nodes": sub.node_count,
        }

    results, errors = _run_cells(cfg, tasks, worker)
    _write_json(out / "embeddings" / "embed_log.json", dict(sorted(results.items())))
    _write_stage_errors(cfg, "embed", errors)
    timings["_stage_total"] = time.perf_counter() - started
    _write_json(_timing_path(cfg, "embed"), timings)
    return errors


# -- stage: reconstruct ------------------------------------------------------


def run_reconstruct(cfg: PipelineConfig) -> list[dict]:
    started = time.perf_counter()
    out = cfg.output_dir
    if not (out / "embeddings" / "embed_log.json").exists():
        raise PipelineError("reconstruct stage requires embed outputs")
    (out / "recon").mkdir(parents=True, exist_ok=True)
    if cfg.dot:
        (out / "dot").mkdir(parents=True, exist_ok=True)
    embed_log = _read_json(out / "embeddings" / "embed_log.json")
    tasks = []
    for cell in _resolved_cells(cfg):
        for algo in cfg.manifest.algorithms:
            key = f"{cell['center']}|h{cell['hop']}|{algo}"
            if key not in embed_log:
                continue  # embedding failed upstream; its error is already recorded
            tasks.append({
                "key": key, "stage": "reconstruct", "center": cell["center"],
                "slug": cell["slug"], "hop": cell["hop"], "algorithm": algo,
            })
    timings: dict[str, float] = {}

    def worker(task):
        t0 = time.perf_counter()
        stem = f"{task['slug']}_h{task['hop']}"
        sub = graph_from_records(parse_edge_list(out / "subgraphs" / f"{stem}.tsv", "tsv3"))
        emb = read_embedding(out / "embeddings" / f"{stem}_{task['algorithm']}.emb")
        scorer = cfg.scorers[task["algorithm"]]
        report = reconstruction_report(emb, sub, scorer, cfg.threshold, cfg.prec_fractions)
        payload = {
            "center": task["center"],
            "hop": task["hop"],
            "algorithm": task["algorithm"],
            "scorer": scorer,
            "threshold": cfg.threshold,
            "map": report.map_score,
            "prec_at": {str(f): v for f, v in report.prec_at.items()},
            "prediction_count": report.prediction_count,
            "nodes": sub.node_count,
            "edges": sub.edge_count,
            "cell_seed": cell_seed(cfg.seed, task["center"], task["hop"], task["algorithm"]),
            "diff": {
                "added_nodes": report.diff.added_nodes,
                "missing_nodes": report.diff.missing_nodes,
                "added_edges": report.diff.added_edges,
                "missing_edges": report.diff.missing_edges,
                "added_edge_list": report.diff.added_edge_list[:200],
                "missing_edge_list": report.diff.missing_edge_list[:200],
                "edge_lists_truncated": max(report.diff.added_edges, report.diff.missing_edges) > 200,
            },
        }
        _write_json(out / "recon" / f"{stem}_{task['algorithm']}.json", payload)
        if cfg.dot:
            # the predicted edge set is recoverable from the diff lists
            recon_edges = (
                set(sub.edge_label_pairs()) - set(report.diff.missing_edge_list)
            ) | set(report.diff.added_edge_list)
            recon_graph = graph_from_labeled_edges(sorted(recon_edges))
            dot_src = render_dot(sub, recon_graph, report.diff)
            if dot_src is not None:
                (out / "dot" / f"{stem}_{task['algorithm']}.dot").write_text(dot_src)
        timings[task["key"]] = time.perf_counter() - t0
        return payload["map"]

    _, errors = _run_cells(cfg, tasks, worker)
    _write_stage_errors(cfg, "reconstruct", errors)
    timings["_stage_total"] = time.perf_counter() - started
    _write_json(_timing_path(cfg, "reconstruct"), timings)
    return errors


# -- stage: semantic ----------------------------------------------------------


def _center_vector_lookup(cfg: PipelineConfig, hop: int, algorithm: str) -> dict[str, np.ndarray]:
    """Each center's own vector, read from its ego-subgraph embedding."""
    out = cfg.output_dir
    lookup: dict[str, np.ndarray] = {}
    for cell in _resolved_cells(cfg):
        if cell["hop"] != hop:
            continue
        path = out / "embeddings" / f"{cell['slug']}_h{hop}_{algorithm}.emb"
        if not path.exists():
            continue
        emb = read_embedding(path)
        if isinstance(emb, AsymEmbedding):
            emb = emb.concatenated()
        try:
            lookup[cell["center"]] = emb.vector_for(cell["center"])
        except ValueError:
            continue
    return lookup


def run_semantic(cfg: PipelineConfig) -> list[dict]:
    started = time.perf_counter()
    out = cfg.output_dir
    if not (out / "embeddings" / "embed_log.json").exists():
        raise PipelineError("semantic stage requires embed outputs")
    (out / "semantic").mkdir(parents=True, exist_ok=True)
    datasets = load_datasets(cfg)
    mapper = cfg.label_mapper()
    tasks = []
    for name, info in sorted(datasets.items()):
        for hop in cfg.manifest.hops:
            for algo in cfg.manifest.algorithms:
                tasks.append({
                    "key": f"{name}|h{hop}|{algo}", "stage": "semantic",
                    "dataset": name, "hop": hop, "algorithm": algo, "info": info,
                })
    timings: dict[str, float] = {}

    def worker(task):
        t0 = time.perf_counter()
        lookup = _center_vector_lookup(cfg, task["hop"], task["algorithm"])
        info = task["info"]
        if info["kind"] == "similarity":
            rep = similarity_mean_distance(
                info["records"], lookup, mapper, dataset_name=task["dataset"]
            )
        else:
            rep = analogy_distance(
                info["records"], lookup, cfg.analogy_mode, mapper, dataset_name=task["dataset"]
            )
        payload = {
            "dataset": task["dataset"],
            "kind": info["kind"],
            "hop": task["hop"],
            "algorithm": task["algorithm"],
            "mean_distance": rep.mean_distance,
            "pairs_evaluated": rep.pairs_evaluated,
            "pairs_skipped": rep.pairs_skipped,
            "mode": rep.mode,
        }
        _write_json(
            out / "semantic" / f"{task['dataset']}_h{task['hop']}_{task['algorithm']}.json",
            payload,
        )
        timings[task["key"]] = time.perf_counter() - t0
        return payload

    _, errors = _run_cells(cfg, tasks, worker)
    _write_stage_errors(cfg, "semantic", errors)
    timings["_stage_total"] = time.perf_counter() - started
    _write_json(_timing_path(cfg, "semantic"), timings)
    return errors


# -- stage: report --------------------------------------------------------------


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def run_report(cfg: PipelineConfig) -> list[dict]:
    out = cfg.output_dir
    missing = [
        str(p) for p in (out / "cells.json", out / "embeddings" / "embed_log.json")
        if not p.exists()
    ]
    if missing:
        raise PipelineError(f"report stage requires prior outputs; missing: {missing}")

    recon_cells = {}
    for path in sorted((out / "recon").glob("*.json")) if (out / "recon").exists() else []:
        payload = _read_json(path)
        key = f"{payload['center']}|h{payload['hop']}|{payload['algorithm']}"
        recon_cells[key] = payload
    semantic_cells = {}
    if (out / "semantic").exists():
        for path in sorted((out / "semantic").glob("*.json")):
            payload = _read_json(path)
            key = f"{payload['dataset']}|h{payload['hop']}|{payload['algorithm']}"
            semantic_cells[key] = payload

    errors: list[dict] = []
    for stage in ("extract", "embed", "reconstruct", "semantic"):
        path = out / f"errors_{stage}.json"
        if path.exists():
            errors.extend(_read_json(path))

    recon_rows = []
    for algo in cfg.manifest.algorithms:
        for hop in cfg.manifest.hops:
            cells = [c for c in recon_cells.values() if c["algorithm"] == algo and c["hop"] == hop]
            if not cells:
                continue
            row = {
                "algorithm": algo,
                "hop": hop,
                "cells": len(cells),
                "map": _mean([c["map"] for c in cells]),
                "prec_at": {
                    str(f): _mean([c["prec_at"][str(f)] for c in cells])
                    for f in cfg.prec_fractions
                },
            }
            recon_rows.append(row)
    diff_rows = []
    for algo in cfg.manifest.algorithms:
        for hop in cfg.manifest.hops:
            cells = [c for c in recon_cells.values() if c["algorithm"] == algo and c["hop"] == hop]
            if not cells:
                continue
            diff_rows.append({
                "algorithm": algo,
                "hop": hop,
                "avg_nodes": _mean([c["nodes"] for c in cells]),
                "avg_added_nodes": _mean([c["diff"]["added_nodes"] for c in cells]),
                "avg_missing_nodes": _mean([c["diff"]["missing_nodes"] for c in cells]),
                "avg_edges": _mean([c["edges"] for c in cells]),
                "avg_added_edges": _mean([c["diff"]["added_edges"] for c in cells]),
                "avg_missing_edges": _mean([c["diff"]["missing_edges"] for c in cells]),
            })
    semantic_rows = [semantic_cells[k] for k in sorted(semantic_cells)]
    semantic_averages = []
    datasets = sorted({c["dataset"] for c in semantic_cells.values()})
    for algo in cfg.manifest.algorithms:
        for hop in cfg.manifest.hops:
            cells = [
                c for c in semantic_cells.values()
                if c["algorithm"] == algo and c["hop"] == hop
            ]
            if not cells:
                continue
            semantic_averages.append({
                "algorithm": algo,
                "hop": hop,
                "datasets": len(cells),
                "average_distance": _mean([c["mean_distance"] for c in cells]),
            })

    report = {
        "schema_version": SCHEMA_VERSION,
        "seed": cfg.seed,
        "config": cfg.effective_dict(),
        "graph_path": cfg.manifest.graph_path,
        "stats": _read_json(out / "stats.json") if (out / "stats.json").exists() else {},
        "reconstruction": {"cells": recon_cells, "aggregate": recon_rows, "diff": diff_rows},
        "semantic": {"cells": semantic_cells, "aggregate": semantic_averages, "datasets": datasets},
        "errors": errors,
    }
    validate_run_result(report)
    _write_json(out / "report.json", report)

    _write_recon_csv(out / "report_recon.csv", recon_rows, cfg.prec_fractions)
    _write_diff_csv(out / "report_diff.csv", diff_rows)
    _write_semantic_csv(out / "report_semantic.csv", semantic_rows, semantic_averages)

    merged: dict[str, dict] = {}
    for stage in ("extract", "embed", "reconstruct", "semantic"):
        path = _timing_path(cfg, stage)
        if path.exists():
            merged[stage] = _read_json(path)
    (out / "timings.json").write_text(json.dumps(merged, indent=2), encoding="utf-8")
    return errors


def _write_recon_csv(path: Path, rows: list[dict], fractions) -> None:
    header = "algorithm,hop,map," + ",".join(f"prec@{f}" for f in fractions)
    lines = [header]
    for row in rows:
        precs = ",".join(repr(row["prec_at"][str(f)]) for f in fractions)
        lines.append(f"{row['algorithm']},{row['hop']},{row['map']!r},{precs}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_diff_csv(path: Path, rows: list[dict]) -> None:
    header = ("algorithm,hop,avg_nodes,avg_added_nodes,avg_missing_nodes,"
              "avg_edges,avg_added_edges,avg_missing_edges")
    lines = [header]
    for r in rows:
        lines.append(
            f"{r['algorithm']},{r['hop']},{r['avg_nodes']!r},{r['avg_added_nodes']!r},"
            f"{r['avg_missing_nodes']!r},{r['avg_edges']!r},{r['avg_added_edges']!r},"
            f"{r['avg_missing_edges']!r}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_semantic_csv(path: Path, rows: list[dict], averages: list[dict]) -> None:
    lines = ["dataset,algorithm,hop,mean_distance,pairs_evaluated,pairs_skipped"]
    for r in rows:
        lines.append(
            f"{r['dataset']},{r['algorithm']},{r['hop']},{r['mean_distance']!r},"
            f"{r['pairs_evaluated']},{r['pairs_skipped']}"
        )
    for r in averages:
        lines.append(f"average,{r['algorithm']},{r['hop']},{r['average_distance']!r},,")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def validate_run_result(report: dict) -> None:
    """Structural schema check; raises ValueError on any violation."""
    def need(cond: bool, msg: str) -> None:
        if not cond:
            raise ValueError(f"run result schema violation: {msg}")

    need(report.get("schema_version") == SCHEMA_VERSION, "bad schema_version")
    need(isinstance(report.get("seed"), int), "seed must be an int")
    need(isinstance(report.get("config"), dict), "config must be a mapping")
    for section in ("reconstruction", "semantic"):
        need(isinstance(report.get(section), dict), f"{section} must be a mapping")
        need(isinstance(report[section].get("cells"), dict), f"{section}.cells must be a mapping")
        need(isinstance(report[section].get("aggregate"), list), f"{section}.aggregate must be a list")
    for key, cell in report["reconstruction"]["cells"].items():
        need(0.0 <= cell["map"] <= 1.0, f"map out of range in {key}")
        for f, v in cell["prec_at"].items():
            need(0.0 <= v <= 1.0, f"prec@{f} out of range in {key}")
        diff = cell["diff"]
        for field_name in ("added_nodes", "missing_nodes", "added_edges", "missing_edges"):
            need(isinstance(diff[field_name], int) and diff[field_name] >= 0,
                 f"diff.{field_name} invalid in {key}")
    for key, cell in report["semantic"]["cells"].items():
        need(cell["mean_distance"] >= 0.0, f"mean_distance negative in {key}")
        need(cell["pairs_evaluated"] >= 1, f"pairs_evaluated invalid in {key}")
    need(isinstance(report.get("errors"), list), "errors must be a list")


# -- run-all -----------------------------------------------------------------


def run_all(cfg: PipelineConfig) -> list[dict]:
    run_extract(cfg)
    run_embed(cfg)
    run_reconstruct(cfg)
    if cfg.manifest.dataset_paths:
        run_semantic(cfg)
    # the report stage merges every stage's error ledger
    return run_report(cfg)
