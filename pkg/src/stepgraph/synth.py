"""Seeded synthetic corpora with a planted transition graph.

Walks are sampled from a randomly generated strongly connected graph and
turned into score matrices: the true keystep scores high, the rest score
low. Corruption suppresses the true keystep's score on a fraction of
frames, leaving only low-scoring columns there, so corrupted frames are
exactly the low-confidence frames the correction step targets. All
generators are pure functions of their seeds.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import StepgraphError
from .graph import TaskGraph
from .ingest import LabelSequence, ScoreMatrix, Vocabulary


@dataclass(frozen=True)
class SynthConfig:
    """Corpus shape plus the score model.

    mu_true/mu_false/sigma are the means and shared std of the true and
    false keystep similarity scores (clamped to [-1, 1]). rho is the
    fraction of frames whose true-keystep score is corrupted down to the
    false model.
    """

    K: int = 50
    n_videos: int = 200
    t_min: int = 50
    t_max: int = 50
    branching: int = 4
    mu_true: float = 0.7
    mu_false: float = 0.0
    sigma: float = 0.15
    rho: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must be in [0, 1]")
        if self.mu_true <= self.mu_false:
            raise ValueError("mu_true must exceed mu_false")
        if not 1 <= self.branching <= self.K:
            raise ValueError("branching must be in [1, K]")
        if not 1 <= self.t_min <= self.t_max:
            raise ValueError("need 1 <= t_min <= t_max")


@dataclass(frozen=True)
class NoiseConfig:
    """Vocabulary-noise injection: ceil(alpha * N) distractors."""

    alpha: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")


@dataclass(frozen=True, eq=False)
class SynthCorpus:
    """Everything one seeded generation produces."""

    config: SynthConfig
    vocab: Vocabulary
    planted: TaskGraph
    labels: list
    scores: list


def _strongly_connected(support: np.ndarray) -> bool:
    """Both-direction reachability from node 0 on the support digraph."""
    K = support.shape[0]

    def reach(adj):
        seen = np.zeros(K, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            u = stack.pop()
            for v in np.flatnonzero(adj[u] & ~seen):
                seen[v] = True
                stack.append(int(v))
        return seen.all()

    return reach(support) and reach(support.T)


def gen_graph(K: int, b: int, seed: int) -> TaskGraph:
    """Random row-stochastic graph: b successors per row, Dirichlet weights.

    Retries up to 10 times for strong connectivity, then gives up.
    """
    if not 1 <= b <= K:
        raise ValueError("need 1 <= b <= K")
    rng = np.random.default_rng(seed)
    for _ in range(10):
        counts = np.zeros((K, K), dtype=np.float64)
        for i in range(K):
            succ = rng.choice(K, size=b, replace=False)
            counts[i, succ] = rng.dirichlet(np.ones(b))
        if _strongly_connected(counts > 0):
            return TaskGraph(counts)
    raise StepgraphError(
        f"could not generate a strongly connected graph (K={K}, b={b}, seed={seed})"
    )


def sample_walk(graph: TaskGraph, T: int, seed, video_id: str | None = None) -> LabelSequence:
    """Markov walk of length T from a uniform-random start node."""
    rng = np.random.default_rng(seed)
    if not graph.row_support.all():
        raise StepgraphError("walks need a graph with every row supported")
    cum = np.cumsum(graph.weights, axis=1)
    labels = np.empty(T, dtype=np.int64)
    cur = int(rng.integers(graph.K))
    labels[0] = cur
    for t in range(1, T):
        cur = int(np.searchsorted(cum[cur], rng.random(), side="right"))
        cur = min(cur, graph.K - 1)  # guard cumulative rounding at 1.0
        labels[t] = cur
    if video_id is None:
        video_id = f"walk_{seed}"
    return LabelSequence(video_id, labels)


def emit_scores(labels: LabelSequence, cfg: SynthConfig, seed) -> ScoreMatrix:
    """Score matrix for a walk under the true/false score model.

    Every entry starts as a false-model draw; uncorrupted frames then get
    a true-model draw in the true keystep's column. Corrupted frames keep
    the false draw there, so their row maximum is just noise and the
    preliminary argmax is wrong with high probability.
    """
    rng = np.random.default_rng(seed)
    T = len(labels)
    values = rng.normal(cfg.mu_false, cfg.sigma, size=(T, cfg.K))
    true_draws = rng.normal(cfg.mu_true, cfg.sigma, size=T)
    corrupted = rng.random(T) < cfg.rho
    rows = np.flatnonzero(~corrupted)
    values[rows, labels.labels[rows]] = true_draws[rows]
    np.clip(values, -1.0, 1.0, out=values)
    return ScoreMatrix(labels.video_id, "video", values)


def gen_corpus(cfg: SynthConfig) -> SynthCorpus:
    """Planted graph, walks and score matrices, all from cfg.seed."""
    ss = np.random.SeedSequence(cfg.seed)
    graph_seed, length_seed, *video_seeds = ss.spawn(2 + cfg.n_videos)
    planted = gen_graph(cfg.K, cfg.branching, graph_seed)
    vocab = Vocabulary(tuple(f"step_{i:04d}" for i in range(cfg.K)))
    rng_t = np.random.default_rng(length_seed)
    lengths = rng_t.integers(cfg.t_min, cfg.t_max + 1, size=cfg.n_videos)
    labels = []
    scores = []
    for v, child in enumerate(video_seeds):
        walk_seed, score_seed = child.spawn(2)
        seq = sample_walk(planted, int(lengths[v]), walk_seed, video_id=f"v{v:04d}")
        labels.append(seq)
        scores.append(emit_scores(seq, cfg, score_seed))
    return SynthCorpus(cfg, vocab, planted, labels, scores)


def make_distractor_pool(n: int, prefix: str = "distractor") -> Vocabulary:
    """Placeholder distractor names, disjoint from synthetic step names."""
    return Vocabulary(tuple(f"{prefix}_{i:04d}" for i in range(n)))


def _distractor_columns(T: int, m: int, seed: int, video_index: int,
                        mu_false: float, sigma: float) -> np.ndarray:
    """Score columns for m distractors, one rng stream per column.

    Column j only depends on (seed, video_index, j), so growing m keeps
    the earlier columns bit-identical; alpha sweeps with a shared seed are
    nested and degrade monotonically.
    """
    cols = np.empty((T, m), dtype=np.float64)
    for j in range(m):
        rng = np.random.default_rng(np.random.SeedSequence([seed, video_index, j]))
        cols[:, j] = rng.normal(mu_false, sigma, size=T)
    return np.clip(cols, -1.0, 1.0)


def _pick_distractors(vocab: Vocabulary, pool: Vocabulary, m: int, seed: int):
    known = set(vocab.names)
    candidates = [name for name in pool.names if name not in known]
    if len(candidates) < m:
        raise StepgraphError(
            f"distractor pool has {len(candidates)} usable names, need {m}"
        )
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    order = rng.permutation(len(candidates))
    return [candidates[i] for i in order[:m]]


def inject_vocab_noise(vocab: Vocabulary, distractor_pool: Vocabulary,
                       scores: ScoreMatrix, alpha: float, seed: int,
                       mu_false: float = 0.0, sigma: float = 0.15):
    """Append ceil(alpha * N) distractor keysteps and score columns.

    Original columns and ground-truth ids are untouched; distractor
    columns draw from the false-keystep model. alpha = 0 is the identity.
    """
    vocab2, (scores2,) = inject_vocab_noise_many(
        vocab, distractor_pool, [scores], alpha, seed, mu_false, sigma
    )
    return vocab2, scores2


def inject_vocab_noise_many(vocab: Vocabulary, distractor_pool: Vocabulary,
                            matrices, alpha: float, seed: int,
                            mu_false: float = 0.0, sigma: float = 0.15):
    """Corpus variant: one distractor draw shared by every matrix."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    N = len(vocab)
    m = math.ceil(alpha * N)
    if m == 0:
        return vocab, list(matrices)
    chosen = _pick_distractors(vocab, distractor_pool, m, seed)
    vocab2 = Vocabulary(vocab.names + tuple(chosen))
    out = []
    for v_idx, mat in enumerate(matrices):
        cols = _distractor_columns(mat.T, m, seed, v_idx, mu_false, sigma)
        out.append(
            ScoreMatrix(mat.video_id, mat.modality, np.hstack([mat.values, cols]))
        )
    return vocab2, out


def linear_chain_graph(ordered_steps, K: int | None = None) -> TaskGraph:
    """Degenerate chain prior: each step transitions only to the next."""
    steps = [int(s) for s in ordered_steps]
    if len(steps) != len(set(steps)):
        raise ValueError("chain steps must be distinct")
    if K is None:
        K = max(steps) + 1
    counts = np.zeros((K, K), dtype=np.float64)
    for a, b in zip(steps[:-1], steps[1:]):
        counts[a, b] = 1.0
    return TaskGraph(counts)
