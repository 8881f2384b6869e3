"""Node2Vec: second-order biased random walks feeding SGNS.

Walks follow out-edges only; a dead end truncates the walk. All randomness is
drawn from numpy generators seeded per (node, walk) so corpora are identical
whether the stepping kernel runs compiled or on the numpy fallback, and so
walk generation can be sharded without changing results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import _accel
from .factorization import EmbeddingMatrix, clamp_dim
from .graph import DiGraph


@dataclass
class WalkCorpus:
    walks: list[np.ndarray]
    walk_length: int
    walks_per_node: int


@dataclass
class SgnsParams:
    context_size: int = 10
    negatives_per_positive: int = 5
    learning_rate: float = 0.025
    epochs: int = 50
    seed: int = 0

    def __post_init__(self):
        if min(self.context_size, self.negatives_per_positive, self.epochs) < 1:
            raise ValueError("context_size, negatives and epochs must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass
class Node2VecConfig:
    """Effective Node2Vec settings; the defaults are the pipeline's fixed choices."""

    walk_length: int = 80
    walks_per_node: int = 10
    context_size: int = 10
    p: float = 1.0
    q: float = 1.0
    negatives_per_positive: int = 5
    learning_rate: float = 0.025
    epochs: int = 50
    seed: int = 0


# -- walk generation ----------------------------------------------------


def _bias_weight_loop(out_indptr, out_indices, in_indptr, in_indices, prev, x, p, q):
    if x == prev:
        return 1.0 / p
    # distance-1 check: prev and x adjacent in either direction
    lo = out_indptr[prev]
    hi = out_indptr[prev + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        if out_indices[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    if lo < out_indptr[prev + 1] and out_indices[lo] == x:
        return 1.0
    lo = in_indptr[prev]
    hi = in_indptr[prev + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        if in_indices[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    if lo < in_indptr[prev + 1] and in_indices[lo] == x:
        return 1.0
    return 1.0 / q


if _accel.NUMBA_ENABLED:
    _bias_weight_loop = _accel.compile_loop(_bias_weight_loop)


def _walk_steps_loop(out_indptr, out_indices, in_indptr, in_indices, start, p, q, uniforms, buf):
    cur = start
    prev = -1
    buf[0] = cur
    length = 1
    for step in range(buf.shape[0] - 1):
        lo = out_indptr[cur]
        hi = out_indptr[cur + 1]
        deg = hi - lo
        if deg == 0:
            break
        u = uniforms[step]
        if prev < 0 or (p == 1.0 and q == 1.0):
            idx = int(u * deg)
            if idx >= deg:
                idx = deg - 1
        else:
            total = 0.0
            for ii in range(lo, hi):
                total += _bias_weight_loop(
                    out_indptr, out_indices, in_indptr, in_indices, prev, out_indices[ii], p, q
                )
            pick = u * total
            acc = 0.0
            idx = deg - 1
            for ii in range(lo, hi):
                acc += _bias_weight_loop(
                    out_indptr, out_indices, in_indptr, in_indices, prev, out_indices[ii], p, q
                )
                if acc > pick:
                    idx = ii - lo
                    break
        prev = cur
        cur = out_indices[lo + idx]
        buf[length] = cur
        length += 1
    return length


def _walk_steps_numpy(out_indptr, out_indices, in_indptr, in_indices, start, p, q, uniforms, buf):
    cur = int(start)
    prev = -1
    buf[0] = cur
    length = 1
    for step in range(buf.shape[0] - 1):
        lo, hi = int(out_indptr[cur]), int(out_indptr[cur + 1])
        deg = hi - lo
        if deg == 0:
            break
        u = uniforms[step]
        nbrs = out_indices[lo:hi]
        if prev < 0 or (p == 1.0 and q == 1.0):
            idx = min(int(u * deg), deg - 1)
        else:
            prev_out = out_indices[out_indptr[prev]:out_indptr[prev + 1]]
            prev_in = in_indices[in_indptr[prev]:in_indptr[prev + 1]]
            adjacent = np.isin(nbrs, prev_out) | np.isin(nbrs, prev_in)
            wgt = np.where(adjacent, 1.0, 1.0 / q)
            wgt = np.where(nbrs == prev, 1.0 / p, wgt)
            cum = np.cumsum(wgt)
            pick = u * cum[-1]
            idx = min(int(np.searchsorted(cum, pick, side="right")), deg - 1)
        prev = cur
        cur = int(nbrs[idx])
        buf[length] = cur
        length += 1
    return length


_walk_steps = _accel.jit_or(_walk_steps_loop, _walk_steps_numpy)


def generate_walks(
    g: DiGraph,
    walk_length: int,
    walks_per_node: int,
    p: float,
    q: float,
    seed: int,
) -> WalkCorpus:
    """walks_per_node biased walks from every node, deterministic for a seed.

    Transitions from (prev, cur) to x are weighted 1/p when x == prev, 1 when
    x is adjacent to prev in either direction, 1/q otherwise, normalized over
    cur's out-neighbors; with p = q = 1 this is a uniform out-edge walk.
    """
    if walk_length < 1:
        raise ValueError("walk_length must be >= 1")
    if p <= 0 or q <= 0:
        raise ValueError("p and q must be positive")
    walks: list[np.ndarray] = []
    buf = np.zeros(walk_length, dtype=np.int64)
    for node in range(g.node_count):
        for w in range(walks_per_node):
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, node, w))))
            uniforms = rng.random(max(walk_length - 1, 1))
            length = _walk_steps(
                g.out_indptr, g.out_indices, g.in_indptr, g.in_indices,
                node, float(p), float(q), uniforms, buf,
            )
            walks.append(buf[:length].copy())
    return WalkCorpus(walks=walks, walk_length=walk_length, walks_per_node=walks_per_node)


# -- skip-gram with negative sampling ------------------------------------


def _sigmoid(x: float) -> float:
    if x > 50.0:
        x = 50.0
    elif x < -50.0:
        x = -50.0
    return 1.0 / (1.0 + math.exp(-x))


def _sgns_epoch_loop(vin, vout, centers, contexts, order, negs, lr0, lr_floor, step0, total_steps):
    d = vin.shape[1]
    k = negs.shape[1]
    acc = np.zeros(d)
    for t in range(order.shape[0]):
        idx = order[t]
        lr = lr0 * (1.0 - (step0 + t) / total_steps)
        if lr < lr_floor:
            lr = lr_floor
        c = centers[idx]
        o = contexts[idx]
        for j in range(d):
            acc[j] = 0.0
        f = 0.0
        for j in range(d):
            f += vout[o, j] * vin[c, j]
        if f > 50.0:
            f = 50.0
        elif f < -50.0:
            f = -50.0
        gpos = (1.0 - 1.0 / (1.0 + math.exp(-f))) * lr
        for j in range(d):
            acc[j] += gpos * vout[o, j]
            vout[o, j] += gpos * vin[c, j]
        for ni in range(k):
            nn = negs[t, ni]
            f = 0.0
            for j in range(d):
                f += vout[nn, j] * vin[c, j]
            if f > 50.0:
                f = 50.0
            elif f < -50.0:
                f = -50.0
            gneg = -(1.0 / (1.0 + math.exp(-f))) * lr
            for j in range(d):
                acc[j] += gneg * vout[nn, j]
                vout[nn, j] += gneg * vin[c, j]
        for j in range(d):
            vin[c, j] += acc[j]


def _sgns_epoch_numpy(vin, vout, centers, contexts, order, negs, lr0, lr_floor, step0, total_steps):
    k = negs.shape[1]
    for t in range(order.shape[0]):
        idx = int(order[t])
        lr = max(lr0 * (1.0 - (step0 + t) / total_steps), lr_floor)
        c = int(centers[idx])
        o = int(contexts[idx])
        v = vin[c]
        acc = np.zeros(vin.shape[1])
        gpos = (1.0 - _sigmoid(float(vout[o] @ v))) * lr
        acc += gpos * vout[o]
        vout[o] += gpos * v
        for ni in range(k):
            nn = int(negs[t, ni])
            gneg = -_sigmoid(float(vout[nn] @ v)) * lr
            acc += gneg * vout[nn]
            vout[nn] += gneg * v
        vin[c] += acc


_sgns_epoch = _accel.jit_or(_sgns_epoch_loop, _sgns_epoch_numpy)


def corpus_pairs(corpus: WalkCorpus, context_size: int) -> tuple[np.ndarray, np.ndarray]:
    """(center, context) index arrays for every pair within the window."""
    centers: list[np.ndarray] = []
    contexts: list[np.ndarray] = []
    for walk in corpus.walks:
        n = walk.shape[0]
        for off in range(1, min(context_size, n - 1) + 1):
            a, b = walk[:-off], walk[off:]
            centers.append(a)
            contexts.append(b)
            centers.append(b)
            contexts.append(a)
    if not centers:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    return np.concatenate(centers), np.concatenate(contexts)


def _noise_distribution(corpus: WalkCorpus, node_count: int) -> np.ndarray:
    """Unigram corpus frequency raised to 3/4, the standard SGNS noise."""
    counts = np.zeros(node_count, dtype=np.float64)
    for walk in corpus.walks:
        counts += np.bincount(walk, minlength=node_count)
    powered = counts ** 0.75
    total = powered.sum()
    if total == 0.0:
        return np.full(node_count, 1.0 / node_count)
    return powered / total


def sgns_pair_gradients(
    v_center: np.ndarray, u_context: np.ndarray, u_negatives: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Loss and analytic gradients of one (center, context, negatives) sample.

    loss = -log sigmoid(u_ctx . v) - sum_n log sigmoid(-u_n . v); gradients
    returned for v, u_ctx and each negative row.
    """
    f_pos = float(u_context @ v_center)
    loss = float(np.logaddexp(0.0, -f_pos))
    s_pos = 1.0 / (1.0 + np.exp(-f_pos))
    grad_v = -(1.0 - s_pos) * u_context
    grad_ctx = -(1.0 - s_pos) * v_center
    grad_negs = np.zeros_like(u_negatives)
    for i in range(u_negatives.shape[0]):
        f_neg = float(u_negatives[i] @ v_center)
        loss += float(np.logaddexp(0.0, f_neg))
        s_neg = 1.0 / (1.0 + np.exp(-f_neg))
        grad_v = grad_v + s_neg * u_negatives[i]
        grad_negs[i] = s_neg * v_center
    return loss, grad_v, grad_ctx, grad_negs


def sgns_corpus_loss(
    vin: np.ndarray,
    vout: np.ndarray,
    centers: np.ndarray,
    contexts: np.ndarray,
    noise_probs: np.ndarray,
    negatives_per_positive: int,
) -> float:
    """Full-pair-set loss with the negative term taken in expectation.

    Replacing sampled negatives by k * E_noise[log sigmoid(-u_n . v)] makes
    the value deterministic, which the monotonicity checks need.
    """
    if centers.shape[0] == 0:
        return 0.0
    pos_scores = np.einsum("ij,ij->i", vout[contexts], vin[centers])
    loss = float(np.logaddexp(0.0, -pos_scores).sum())
    all_scores = vin[centers] @ vout.T  # (pairs, vocab)
    neg_term = np.logaddexp(0.0, all_scores) @ noise_probs
    loss += negatives_per_positive * float(neg_term.sum())
    return loss


def train_sgns(
    corpus: WalkCorpus,
    d: int,
    params: SgnsParams,
    node_count: int,
    labels: Sequence[str] | None = None,
    on_epoch: Callable[[int, np.ndarray, np.ndarray], None] | None = None,
) -> EmbeddingMatrix:
    """SGD ascent on the SGNS objective; returns the input-vector matrix.

    The learning rate decays linearly over epochs * pairs updates down to a
    floor of 1e-4 of the initial rate. Deterministic for a fixed seed.
    """
    if not corpus.walks:
        raise ValueError("empty corpus")
    d_eff = clamp_dim(d, node_count)
    rng = np.random.default_rng(params.seed)
    vin = (rng.random((node_count, d_eff)) - 0.5) / d_eff
    vout = np.zeros((node_count, d_eff))

    centers, contexts = corpus_pairs(corpus, params.context_size)
    n_pairs = centers.shape[0]
    if labels is None:
        labels = tuple(str(i) for i in range(node_count))
    if n_pairs == 0:
        return EmbeddingMatrix(labels=tuple(labels), vectors=vin, algorithm_tag="node2vec")

    noise = _noise_distribution(corpus, node_count)
    noise_cum = np.cumsum(noise)
    k = params.negatives_per_positive
    total_steps = params.epochs * n_pairs
    lr0 = params.learning_rate
    lr_floor = lr0 * 1e-4
    if on_epoch is not None:
        on_epoch(0, vin, vout)
    for epoch in range(params.epochs):
        order = rng.permutation(n_pairs)
        draws = rng.random((n_pairs, k))
        negs = np.minimum(
            np.searchsorted(noise_cum, draws.ravel(), side="right"), node_count - 1
        ).reshape(n_pairs, k).astype(np.int64)
        _sgns_epoch(
            vin, vout, centers, contexts, order, negs,
            lr0, lr_floor, epoch * n_pairs, total_steps,
        )
        if on_epoch is not None:
            on_epoch(epoch + 1, vin, vout)
    return EmbeddingMatrix(labels=tuple(labels), vectors=vin, algorithm_tag="node2vec")


def node2vec_embed(g: DiGraph, d: int, config: Node2VecConfig | None = None) -> EmbeddingMatrix:
    """Walk generation composed with SGNS training under the fixed defaults."""
    cfg = config or Node2VecConfig()
    corpus = generate_walks(
        g, cfg.walk_length, cfg.walks_per_node, cfg.p, cfg.q, cfg.seed
    )
    params = SgnsParams(
        context_size=cfg.context_size,
        negatives_per_positive=cfg.negatives_per_positive,
        learning_rate=cfg.learning_rate,
        epochs=cfg.epochs,
        seed=cfg.seed,
    )
    emb = train_sgns(corpus, d, params, g.node_count, labels=g.labels)
    return replace(emb, algorithm_tag="node2vec")
