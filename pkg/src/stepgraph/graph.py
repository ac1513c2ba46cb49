"""Mining and handling of the probabilistic task graph.

The graph is a K x K transition structure tallied over consecutive frame
pairs of every sequence in a corpus. Each supported row is normalized to
a probability distribution; its negative-log form feeds the path search.
"""

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import FormatError
from .ingest import BACKGROUND, Vocabulary


@dataclass(frozen=True, eq=False)
class TaskGraph:
    """Row-stochastic transition structure over K keysteps.

    `counts` is the source of truth: mined graphs hold integral tallies,
    synthetic graphs hold fractional transition mass. Weights are the
    row-normalized counts; rows that never transition stay all-zero
    rather than being faked as uniform.
    """

    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.float64)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise FormatError("transition counts must be a square matrix")
        if (c < 0).any() or not np.isfinite(c).all():
            raise FormatError("transition counts must be finite and non-negative")
        object.__setattr__(self, "counts", c)

    @property
    def K(self) -> int:
        return self.counts.shape[0]

    @cached_property
    def row_support(self) -> np.ndarray:
        return self.counts.sum(axis=1) > 0

    @cached_property
    def weights(self) -> np.ndarray:
        sums = self.counts.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore"):
            w = np.where(sums > 0, self.counts / np.where(sums > 0, sums, 1.0), 0.0)
        return w


@dataclass(frozen=True, eq=False)
class CostGraph:
    """Negative-log transition costs; np.inf marks a missing edge."""

    matrix: np.ndarray = field(repr=False)

    @property
    def K(self) -> int:
        return self.matrix.shape[0]


def mine_graph(corpus, K: int) -> TaskGraph:
    """Tally consecutive within-video transitions over the corpus.

    Self-loops count. Background frames are dropped and their neighbors
    treated as consecutive, so ground-truth corpora can be mined for
    analysis. An empty corpus yields a graph with no supported rows.
    """
    counts = np.zeros((K, K), dtype=np.float64)
    for seq in corpus:
        labs = seq.labels[seq.labels != BACKGROUND]
        if (labs >= K).any():
            bad = int(labs[np.argmax(labs >= K)])
            raise FormatError(
                f"{seq.video_id}: label {bad} out of range for K={K}"
            )
        if len(labs) >= 2:
            np.add.at(counts, (labs[:-1], labs[1:]), 1.0)
    return TaskGraph(counts)


def to_cost(graph: TaskGraph, smoothing: float = 0.0) -> CostGraph:
    """Convert transition probabilities to negative-log edge costs.

    With smoothing > 0 the weights are recomputed as
    (counts + s) / (row_sum + K * s) first, which makes every edge finite.
    """
    if smoothing < 0:
        raise ValueError("smoothing must be >= 0")
    if smoothing > 0:
        sums = graph.counts.sum(axis=1, keepdims=True)
        w = (graph.counts + smoothing) / (sums + graph.K * smoothing)
    else:
        w = graph.weights
    with np.errstate(divide="ignore"):
        cost = np.where(w > 0, -np.log(np.where(w > 0, w, 1.0)) + 0.0, np.inf)
    return CostGraph(cost)


def embed_graph(graph: TaskGraph, K: int) -> TaskGraph:
    """Re-home the graph in a larger id space; new ids get no edges.

    Used when a vocabulary grows (e.g. injected distractor keysteps) but
    the mined prior should stay fixed: paths never route through ids the
    corpus has never shown.
    """
    if K < graph.K:
        raise ValueError(f"cannot shrink graph from K={graph.K} to K={K}")
    if K == graph.K:
        return graph
    counts = np.zeros((K, K), dtype=np.float64)
    counts[: graph.K, : graph.K] = graph.counts
    return TaskGraph(counts)


def binarize(graph: TaskGraph) -> TaskGraph:
    """Forget the probabilities: every observed transition weighs equally.

    Supported rows become uniform over their observed successors, which
    keeps them row-stochastic; unsupported rows stay all-zero.
    """
    return TaskGraph((graph.counts > 0).astype(np.float64))


def top_transitions(graph: TaskGraph, source: int, n: int):
    """The n highest-weight successors of `source`, ties to the lowest id."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= source < graph.K:
        raise IndexError(f"keystep id {source} out of range for K={graph.K}")
    row = graph.weights[source]
    succ = np.flatnonzero(row > 0)
    ranked = sorted(succ, key=lambda j: (-row[j], j))
    return [(int(j), float(row[j])) for j in ranked[:n]]


def start_counts(corpus, K: int) -> np.ndarray:
    """Count which keystep each video starts with (first non-background)."""
    counts = np.zeros(K, dtype=np.int64)
    for seq in corpus:
        labs = seq.labels[seq.labels != BACKGROUND]
        if len(labs) and labs[0] < K:
            counts[labs[0]] += 1
    return counts


def start_entropy(graph: TaskGraph, prelim_start_counts) -> dict:
    """Shannon entropy (nats) of the outgoing row of each observed start.

    Higher entropy means the next keystep is harder to predict from the
    graph. Unsupported rows get 0. Keys are the keysteps with a non-zero
    start count.
    """
    counts = np.asarray(prelim_start_counts)
    out = {}
    for k in np.flatnonzero(counts > 0):
        row = graph.weights[int(k)]
        nz = row[row > 0]
        out[int(k)] = float(-(nz * np.log(nz)).sum()) if len(nz) else 0.0
    return out


def row_entropy(graph: TaskGraph, k: int) -> float:
    """Shannon entropy (nats) of one outgoing distribution; 0 if unsupported."""
    row = graph.weights[k]
    nz = row[row > 0]
    return float(-(nz * np.log(nz)).sum()) if len(nz) else 0.0


# ---------------------------------------------------------------------------
# serialization

def save_graph(path, graph: TaskGraph, provenance: dict | None = None) -> None:
    """Write the graph as JSON; counts are the source of truth."""
    edges = []
    for i, j in zip(*np.nonzero(graph.counts)):
        c = graph.counts[i, j]
        edges.append([int(i), int(j), int(c) if c == int(c) else float(c)])
    obj = {"K": graph.K, "edges": edges}
    if provenance is not None:
        obj["provenance"] = provenance
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh)
        fh.write("\n")


def load_graph(path) -> TaskGraph:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON") from exc
    if "K" not in obj or "edges" not in obj:
        raise FormatError(f"{path}: graph file missing K/edges")
    K = int(obj["K"])
    if K < 1:
        raise FormatError(f"{path}: K must be >= 1")
    counts = np.zeros((K, K), dtype=np.float64)
    for entry in obj["edges"]:
        if len(entry) != 3:
            raise FormatError(f"{path}: malformed edge entry {entry!r}")
        i, j, c = int(entry[0]), int(entry[1]), float(entry[2])
        if not (0 <= i < K and 0 <= j < K):
            raise FormatError(f"{path}: edge ({i}, {j}) out of range for K={K}")
        if c < 0 or not math.isfinite(c):
            raise FormatError(f"{path}: edge ({i}, {j}) has bad count {c!r}")
        counts[i, j] = c
    return TaskGraph(counts)


def to_dot(graph: TaskGraph, vocab: Vocabulary | None = None, top_n: int = 4,
           provenance: dict | None = None) -> str:
    """Render the top-n transitions per keystep as a DOT digraph."""
    def name(k: int) -> str:
        label = vocab.names[k] if vocab is not None else str(k)
        return '"' + label.replace('"', r"\"") + '"'

    lines = []
    if provenance is not None:
        lines.append("// " + json.dumps(provenance, sort_keys=True))
    lines.append("digraph taskgraph {")
    for i in range(graph.K):
        for j, w in top_transitions(graph, i, top_n) if graph.row_support[i] else []:
            lines.append(f"  {name(i)} -> {name(j)} [label=\"{w:.3f}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"
