"""Sequence correction with the task graph.

Two decoders:

  - path search: keep anchored frames, and for every run of low-confidence
    frames between two anchors find the minimum negative-log-cost path
    between the anchor keysteps, then spread the path's keysteps uniformly
    over the span. The anchor keysteps are prepended/appended to the path
    so self-loop regions fill correctly.
  - belief filtering: a causal recursion that multiplies per-frame
    measurement rows into a belief vector propagated through the
    transition matrix, with an additive term weighting measurements
    against the propagated belief.

Path search runs one dense Dijkstra per distinct target keystep and is
O(K^2) per call; PathFinder memoizes by target so decoding a corpus against
one graph reuses the sweep.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels, metrics
from .errors import DimensionError
from .graph import CostGraph, TaskGraph, row_entropy, to_cost
from .ingest import LabelSequence, ScoreMatrix


@dataclass(frozen=True)
class DecodeConfig:
    """Knobs for path-search decoding."""

    gamma_text: float = 0.5
    gamma_video: float = 0.3
    adaptive_threshold: bool = False
    smoothing: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.gamma_text) and np.isfinite(self.gamma_video)):
            raise ValueError("gamma thresholds must be finite")

    def gamma_for(self, modality: str) -> float:
        return self.gamma_video if modality == "video" else self.gamma_text


@dataclass(frozen=True)
class BrfConfig:
    """Knobs for belief-filter decoding."""

    epsilon: float = 0.1
    normalize_belief: bool = True

    def __post_init__(self):
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise ValueError("epsilon must be finite and >= 0")


class PathFinder:
    """Memoized min-cost path queries against one cost graph.

    One backward Dijkstra per distinct target serves every source, so a
    corpus decode touches each target keystep's sweep once. `relaxations`
    accumulates the edge relaxations of every sweep run so far.
    """

    def __init__(self, cost: CostGraph):
        self._cost = cost.matrix
        self._rev = np.ascontiguousarray(cost.matrix.T)
        self._to_target = {}
        self.relaxations = 0

    @property
    def K(self) -> int:
        return self._cost.shape[0]

    def _sweep(self, target: int):
        hit = self._to_target.get(target)
        if hit is None:
            dist, hops, relax = kernels.dijkstra_dense(self._rev, target)
            self.relaxations += relax
            hit = (dist, hops)
            self._to_target[target] = hit
        return hit

    def query(self, k_minus: int, k_plus: int):
        """Interior of the cheapest path k_minus -> k_plus, or None.

        Excludes both endpoints; [] means the direct edge (or staying put)
        is optimal. Ties resolve to fewer hops, then to the
        lexicographically smallest id sequence, by greedily walking the
        edges that keep both the remaining cost and the remaining hop
        count tight.
        """
        K = self.K
        for k in (k_minus, k_plus):
            if not 0 <= k < K:
                raise IndexError(f"keystep id {k} out of range for K={K}")
        if k_minus == k_plus:
            return []
        dist, hops = self._sweep(k_plus)
        if not np.isfinite(dist[k_minus]):
            return None
        interior = []
        u = k_minus
        while u != k_plus:
            tight = (self._cost[u] + dist == dist[u]) & (hops + 1 == hops[u])
            nxt = np.flatnonzero(tight)
            if len(nxt) == 0:  # unreachable by construction
                raise AssertionError("no tight successor on an optimal path")
            u = int(nxt[0])
            if u != k_plus:
                interior.append(u)
        return interior


def path_search(cost: CostGraph, k_minus: int, k_plus: int):
    """One-shot wrapper around PathFinder.query."""
    return PathFinder(cost).query(k_minus, k_plus)


def path_search_with_stats(cost: CostGraph, k_minus: int, k_plus: int):
    """Like path_search, but also reports the edge relaxations performed."""
    finder = PathFinder(cost)
    interior = finder.query(k_minus, k_plus)
    return interior, finder.relaxations


def uniform_fill(anchors, interior, t_minus: int, t_plus: int) -> np.ndarray:
    """Spread a path's keysteps over the frame span [t_minus, t_plus].

    The full path is anchor + interior + anchor. The span of
    N = t_plus - t_minus + 1 frames splits into len(path) contiguous
    blocks with boundaries floor(m * N / len(path)), assigned in path
    order. If the path is longer than the span, interior nodes are
    dropped from the tail until it fits, preserving both anchors.
    """
    k_minus, k_plus = anchors
    if t_minus >= t_plus:
        raise ValueError("need t_minus < t_plus")
    N = t_plus - t_minus + 1
    path = [k_minus, *interior, k_plus]
    if len(path) > N:
        path = [k_minus, *interior[: N - 2], k_plus]
    P = len(path)
    out = np.empty(N, dtype=np.int64)
    for m, label in enumerate(path):
        out[m * N // P : (m + 1) * N // P] = label
    return out


def correct_sequence(
    prelim: LabelSequence,
    conf,
    mask: np.ndarray,
    graph: TaskGraph,
    cfg: DecodeConfig,
    path_finder: PathFinder | None = None,
) -> LabelSequence:
    """Replace low-confidence runs with graph-mined paths.

    Anchored frames always keep their preliminary label. Runs before the
    first anchor or after the last keep preliminary labels, as does any
    run whose anchor pair has no finite-cost path. A video with no
    anchors is returned unchanged.
    """
    T = len(prelim)
    if len(conf) != T or len(mask) != T:
        raise DimensionError(
            f"{prelim.video_id}: labels/conf/mask lengths differ "
            f"({T}/{len(conf)}/{len(mask)})"
        )
    anchors = np.flatnonzero(mask)
    if len(anchors) == 0:
        return LabelSequence(prelim.video_id, prelim.labels.copy())
    if path_finder is None:
        path_finder = PathFinder(to_cost(graph, cfg.smoothing))
    out = prelim.labels.copy()
    for a, b in zip(anchors[:-1], anchors[1:]):
        if b - a < 2:
            continue  # no frames between these anchors
        k_minus = int(prelim.labels[a])
        k_plus = int(prelim.labels[b])
        interior = path_finder.query(k_minus, k_plus)
        if interior is None:
            continue
        out[a : b + 1] = uniform_fill((k_minus, k_plus), interior, int(a), int(b))
    return LabelSequence(prelim.video_id, out)


def brf_decode(
    scores: ScoreMatrix,
    graph: TaskGraph,
    cfg: BrfConfig | None = None,
    return_beliefs: bool = False,
):
    """Causal belief-filter decoding.

    The measurement at t is the score row shifted by +1 (cosine range)
    so beliefs stay non-negative without reordering any argmax. The
    belief starts at the first measurement and is then recursively the
    elementwise product of the measurement with the transition-propagated
    previous belief, plus epsilon times the measurement. Each frame's
    label is the belief argmax (ties to the lowest id); the label at t
    only depends on frames <= t.
    """
    if cfg is None:
        cfg = BrfConfig()
    A_t = graph.weights.T
    s = np.clip(scores.values + 1.0, 0.0, None)
    T = scores.T
    labels = np.empty(T, dtype=np.int64)
    beliefs = np.empty_like(s) if return_beliefs else None
    belief = s[0].copy()
    for t in range(T):
        if t > 0:
            belief = s[t] * (A_t @ belief) + cfg.epsilon * s[t]
        if cfg.normalize_belief:
            total = belief.sum()
            if total > 0:
                belief = belief / total
        labels[t] = np.argmax(belief)
        if return_beliefs:
            beliefs[t] = belief
    seq = LabelSequence(scores.video_id, labels)
    return (seq, beliefs) if return_beliefs else seq


@dataclass(frozen=True, eq=False)
class PredictabilitySplit:
    """Corpus halves by start-keystep entropy, with per-half reports."""

    high_predictability: list  # video ids whose start row has low entropy
    low_predictability: list
    report_high: "metrics.EvalReport"
    report_low: "metrics.EvalReport"
    entropies: dict = field(repr=False)


def predictability_split(graph: TaskGraph, corpus, decode_results) -> PredictabilitySplit:
    """Split decoded videos at the median start-keystep entropy.

    Predictability is the Shannon entropy of the graph row of each
    video's first decoded keystep: low entropy means the graph pins the
    next keystep down. Videos sort by (entropy, video id) and split into
    halves differing by at most one element; each half is evaluated
    against its ground truth.
    """
    gt_by_id = {seq.video_id: seq for seq in corpus}
    scored = []
    for pred in decode_results:
        ent = row_entropy(graph, int(pred.labels[0]))
        scored.append((ent, pred.video_id, pred))
    scored.sort(key=lambda item: (item[0], item[1]))
    half = len(scored) // 2
    low_ent, high_ent = scored[:half], scored[half:]

    def build(part):
        preds = [p for _, _, p in part]
        gts = [gt_by_id[p.video_id] for p in preds]
        return [p.video_id for p in preds], metrics.evaluate(preds, gts)

    high_ids, report_high = build(low_ent)  # low entropy = high predictability
    low_ids, report_low = build(high_ent)
    return PredictabilitySplit(
        high_predictability=high_ids,
        low_predictability=low_ids,
        report_high=report_high,
        report_low=report_low,
        entropies={vid: ent for ent, vid, _ in scored},
    )
