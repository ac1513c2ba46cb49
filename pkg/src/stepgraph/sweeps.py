"""End-to-end pipeline helpers and the sensitivity sweeps.

The pipeline mirrors production use: preliminary argmax over the scores,
graph mined from those (noisy) preliminary labels, then per-video
correction against the mined graph. The sweeps rerun it across the
confidence-threshold grid and the vocabulary-noise grid and report
per-keystep mean accuracy for the baseline and the corrected labels.
"""

from dataclasses import dataclass

from . import metrics
from .assign import adaptive_gamma, anchor_mask, preliminary_assign
from .decode import DecodeConfig, PathFinder, correct_sequence
from .graph import embed_graph, mine_graph, to_cost
from .synth import SynthCorpus, inject_vocab_noise_many

GAMMA_GRID = (0.30, 0.35, 0.40, 0.45, 0.50)
ALPHA_GRID = (0.0, 0.5, 1.0, 4.0, 5.0, 10.0)


@dataclass(frozen=True)
class SweepRow:
    """One sweep setting with baseline/corrected mean accuracy."""

    setting: str
    baseline_acc: float
    corrected_acc: float

    @property
    def relative_gain(self) -> float:
        if self.baseline_acc == 0:
            return 0.0
        return (self.corrected_acc - self.baseline_acc) / self.baseline_acc


def assign_corpus(score_matrices):
    """Preliminary labels and confidences for every matrix."""
    prelims, confs = [], []
    for m in score_matrices:
        labels, conf = preliminary_assign(m)
        prelims.append(labels)
        confs.append(conf)
    return prelims, confs


def pathsearch_decode_corpus(score_matrices, graph, gamma, cfg: DecodeConfig | None = None):
    """Correct every video against one shared graph.

    `gamma` overrides the per-modality default; with cfg.adaptive_threshold
    the threshold is recomputed per video instead.
    """
    if cfg is None:
        cfg = DecodeConfig()
    finder = PathFinder(to_cost(graph, cfg.smoothing))
    out = []
    for m in score_matrices:
        prelim, conf = preliminary_assign(m)
        g = adaptive_gamma(conf) if cfg.adaptive_threshold else gamma
        mask = anchor_mask(conf, g)
        out.append(correct_sequence(prelim, conf, mask, graph, cfg, path_finder=finder))
    return out


def run_pipeline(score_matrices, K, gamma, cfg: DecodeConfig | None = None):
    """prelim -> mined graph -> corrected labels; returns all three."""
    prelims, _ = assign_corpus(score_matrices)
    graph = mine_graph(prelims, K)
    corrected = pathsearch_decode_corpus(score_matrices, graph, gamma, cfg)
    return prelims, graph, corrected


def _mean_acc(preds, gts) -> float:
    acc = metrics.evaluate(preds, gts).mean_acc
    return acc if acc is not None else 0.0


def gamma_sweep(corpus: SynthCorpus, gammas=GAMMA_GRID, cfg: DecodeConfig | None = None):
    """Baseline vs corrected accuracy across the threshold grid."""
    prelims, _ = assign_corpus(corpus.scores)
    graph = mine_graph(prelims, corpus.config.K)
    baseline = _mean_acc(prelims, corpus.labels)
    rows = []
    for gamma in gammas:
        corrected = pathsearch_decode_corpus(corpus.scores, graph, gamma, cfg)
        rows.append(
            SweepRow(f"gamma={gamma:.2f}", baseline, _mean_acc(corrected, corpus.labels))
        )
    return rows


def alpha_sweep(corpus: SynthCorpus, pool, alphas=ALPHA_GRID, gamma: float = 0.45,
                noise_seed: int = 0, cfg: DecodeConfig | None = None):
    """Baseline vs corrected accuracy as distractor keysteps are injected.

    The graph is mined once from the clean-vocabulary preliminary labels
    and embedded unchanged into each enlarged id space: the prior stays
    fixed while test-time vocabulary noise grows, so paths never route
    through distractors. (Re-mining per alpha would let the synthetic
    distractors soak up corrupted-frame argmaxes and spuriously clean the
    real subgraph, reversing the expected degradation.) The same
    noise_seed across alphas makes the injections nested, so each setting
    sees a superset of the previous setting's distractors.
    """
    sc = corpus.config
    prelims0, _ = assign_corpus(corpus.scores)
    graph0 = mine_graph(prelims0, sc.K)
    rows = []
    for alpha in alphas:
        vocab2, mats = inject_vocab_noise_many(
            corpus.vocab, pool, corpus.scores, alpha, noise_seed,
            mu_false=sc.mu_false, sigma=sc.sigma,
        )
        prelims, _ = assign_corpus(mats)
        corrected = pathsearch_decode_corpus(
            mats, embed_graph(graph0, len(vocab2)), gamma, cfg
        )
        rows.append(
            SweepRow(
                f"alpha={alpha:g}",
                _mean_acc(prelims, corpus.labels),
                _mean_acc(corrected, corpus.labels),
            )
        )
    return rows
