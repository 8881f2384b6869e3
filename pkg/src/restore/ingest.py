"""Edge-list and manifest parsing: the boundary between files and DiGraph.

Two edge-list formats are read: plain three-column TSV (src, relation, dst)
and headered KGTK-style TSV where the node1/relation/node2 columns are picked
by name. The relation column is parsed and then dropped. Lines starting with
'#' are comments; '# node: <label>' records an isolated node so single-node
subgraphs round-trip.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .graph import DiGraph, NodeId, graph_from_labeled_edges
from .semantic import default_label_mapper

EDGE_FORMATS = ("tsv3", "tsv_kgtk")
ALGORITHMS = ("node2vec", "hope", "sdne", "lap", "lle")

_MALFORMED_LIMIT = 0.01
_NODE_COMMENT = "# node: "


@dataclass
class EdgeRecord:
    src: str
    relation: str
    dst: str
    source_line: int


@dataclass
class ParsedEdgeList:
    records: list[EdgeRecord]
    isolated_nodes: list[str]
    diagnostics: list[str]


def parse_edge_list(path: str | Path, fmt: str = "tsv3") -> ParsedEdgeList:
    """Read an edge list, collecting malformed lines as diagnostics.

    More than 1% malformed lines is treated as file corruption and raises,
    with the first few diagnostics in the message.
    """
    if fmt not in EDGE_FORMATS:
        raise ValueError(f"unknown edge-list format {fmt!r}; expected one of {EDGE_FORMATS}")
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    records: list[EdgeRecord] = []
    isolated: list[str] = []
    diagnostics: list[str] = []
    data_lines = 0

    col_src, col_rel, col_dst = 0, 1, 2
    header_seen = False
    for line_no, line in enumerate(lines, start=1):
        if line.startswith(_NODE_COMMENT):
            isolated.append(line[len(_NODE_COMMENT):].strip())
            continue
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        if fmt == "tsv_kgtk" and not header_seen:
            header_seen = True
            cols = [c.strip() for c in parts]
            try:
                col_src = cols.index("node1")
                col_rel = cols.index("relation")
                col_dst = cols.index("node2")
            except ValueError:
                raise ValueError(
                    f"{path}: kgtk header must name node1/relation/node2 columns, got {cols}"
                ) from None
            continue
        data_lines += 1
        needed = max(col_src, col_rel, col_dst) + 1
        if len(parts) < needed or not parts[col_src].strip() or not parts[col_dst].strip():
            diagnostics.append(f"line {line_no}: expected {needed} tab-separated columns")
            continue
        records.append(
            EdgeRecord(
                src=parts[col_src].strip(),
                relation=parts[col_rel].strip(),
                dst=parts[col_dst].strip(),
                source_line=line_no,
            )
        )
    if data_lines and len(diagnostics) / data_lines > _MALFORMED_LIMIT:
        sample = "; ".join(diagnostics[:5])
        raise ValueError(
            f"{path}: {len(diagnostics)} of {data_lines} lines malformed "
            f"(over the {_MALFORMED_LIMIT:.0%} tolerance): {sample}"
        )
    return ParsedEdgeList(records=records, isolated_nodes=isolated, diagnostics=diagnostics)


def graph_from_records(parsed: ParsedEdgeList) -> DiGraph:
    return graph_from_labeled_edges(
        ((r.src, r.dst) for r in parsed.records), extra_nodes=parsed.isolated_nodes
    )


def write_edge_list(g: DiGraph, path: str | Path, relation: str = "-") -> None:
    """TSV3 emitter; isolated nodes are kept via '# node:' comment lines."""
    lines = []
    incident: set[int] = set()
    for i, j in g.edges():
        incident.add(i)
        incident.add(j)
        lines.append(f"{g.label_of(i)}\t{relation}\t{g.label_of(j)}")
    for i in range(g.node_count):
        if i not in incident:
            lines.append(f"{_NODE_COMMENT}{g.label_of(i)}")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


@dataclass
class Manifest:
    """Flat key-value run description; see README for the file schema."""

    graph_path: str = ""
    graph_format: str = "tsv3"
    dataset_paths: dict[str, tuple[str, str]] = field(default_factory=dict)  # name -> (kind, path)
    center_mode: str = "from-datasets"          # or "explicit"
    center_labels: list[str] = field(default_factory=list)
    hops: list[int] = field(default_factory=lambda: [1, 2, 3])
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    seed: int = 0
    options: dict[str, str] = field(default_factory=dict)  # remaining key/value pairs

    def __post_init__(self):
        bad_hops = [h for h in self.hops if h not in (1, 2, 3)]
        if bad_hops:
            raise ValueError(f"hops must be within {{1,2,3}}, got {bad_hops}")
        bad_algos = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad_algos:
            raise ValueError(f"unknown algorithms {bad_algos}; expected subset of {ALGORITHMS}")


def load_manifest(path: str | Path) -> Manifest:
    """Parse the line-oriented "key = value" manifest; repeated keys make lists."""
    base = Path(path).parent
    graph_path = ""
    graph_format = "tsv3"
    datasets: dict[str, tuple[str, str]] = {}
    center_mode = "from-datasets"
    centers: list[str] = []
    hops: list[int] = []
    algorithms: list[str] = []
    seed = 0
    options: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "graph_path":
            graph_path = str((base / value).resolve()) if not Path(value).is_absolute() else value
        elif key == "graph_format":
            graph_format = value
        elif key == "dataset":
            fields = value.split()
            if len(fields) != 3 or fields[1] not in ("similarity", "analogy"):
                raise ValueError(
                    f"{path}:{line_no}: dataset lines are '<name> <similarity|analogy> <path>'"
                )
            name, kind, dpath = fields
            if not Path(dpath).is_absolute():
                dpath = str((base / dpath).resolve())
            datasets[name] = (kind, dpath)
        elif key == "centers":
            center_mode = value
        elif key == "center":
            centers.append(value)
        elif key == "hop":
            hops.append(int(value))
        elif key == "algorithm":
            algorithms.append(value)
        elif key == "seed":
            seed = int(value)
        else:
            options[key] = value
    if center_mode not in ("from-datasets", "explicit"):
        raise ValueError(f"centers must be 'from-datasets' or 'explicit', got {center_mode!r}")
    if not graph_path:
        raise ValueError(f"{path}: manifest is missing graph_path")
    return Manifest(
        graph_path=graph_path,
        graph_format=graph_format,
        dataset_paths=datasets,
        center_mode=center_mode,
        center_labels=centers,
        hops=hops or [1, 2, 3],
        algorithms=algorithms or list(ALGORITHMS),
        seed=seed,
        options=options,
    )


def resolve_centers(
    manifest: Manifest,
    dataset_vocab: Mapping[str, set[str]],
    graph: DiGraph,
    label_mapper: Callable[[str], str] = default_label_mapper,
) -> list[NodeId]:
    """Centers as NodeIds: either validated explicit labels, or the mapped
    dataset vocabulary intersected with the graph, deduplicated and sorted."""
    if manifest.center_mode == "explicit" or manifest.center_labels:
        missing = [lab for lab in manifest.center_labels if not graph.has_label(lab)]
        if missing:
            raise ValueError(f"center labels not present in graph: {missing}")
        labels = list(dict.fromkeys(manifest.center_labels))
    else:
        mapped = {
            label_mapper(word)
            for vocab in dataset_vocab.values()
            for word in vocab
        }
        labels = sorted(lab for lab in mapped if graph.has_label(lab))
    if not labels:
        raise ValueError("no centers resolved: dataset vocabulary does not overlap the graph")
    return [NodeId(lab, graph.index_of(lab)) for lab in labels]
