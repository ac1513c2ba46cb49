"""stepgraph: mine a probabilistic keystep transition graph from noisy
per-frame label sequences and use it as a prior to correct them.

Pipeline: per-frame argmax over similarity scores gives preliminary
labels and confidences; transitions tallied over a corpus give the
graph; low-confidence runs between confident anchor frames are replaced
by the minimum negative-log-cost path between the anchor keysteps,
spread uniformly over the span. A causal belief-filter decoder and
segmentation metrics (accuracy, IoU, F1, edit distance) round it out.
"""

from .assign import (
    AnchorMask,
    ConfidenceSequence,
    adaptive_gamma,
    anchor_mask,
    fuse_modalities,
    preliminary_assign,
    weighted_fusion,
)
from .decode import (
    BrfConfig,
    DecodeConfig,
    PathFinder,
    brf_decode,
    correct_sequence,
    path_search,
    path_search_with_stats,
    predictability_split,
    uniform_fill,
)
from .errors import DimensionError, FormatError, StepgraphError
from .graph import (
    CostGraph,
    TaskGraph,
    binarize,
    load_graph,
    mine_graph,
    save_graph,
    start_counts,
    start_entropy,
    to_cost,
    to_dot,
    top_transitions,
)
from .ingest import (
    BACKGROUND,
    LabelSequence,
    ScoreMatrix,
    Vocabulary,
    load_labels,
    load_report,
    load_score_corpus,
    load_scores,
    load_vocabulary,
    write_labels,
    write_report,
    write_scores,
    write_vocabulary,
)
from .kernels import BACKEND
from .metrics import EvalReport, edit_distance, evaluate, f1, framewise_accuracy, iou
from .synth import (
    NoiseConfig,
    SynthConfig,
    SynthCorpus,
    emit_scores,
    gen_corpus,
    gen_graph,
    inject_vocab_noise,
    inject_vocab_noise_many,
    linear_chain_graph,
    make_distractor_pool,
    sample_walk,
)

__version__ = "0.1.0"

__all__ = [
    "AnchorMask", "BACKEND", "BACKGROUND", "BrfConfig", "ConfidenceSequence",
    "CostGraph", "DecodeConfig", "DimensionError", "EvalReport", "FormatError",
    "LabelSequence", "NoiseConfig", "PathFinder", "ScoreMatrix", "StepgraphError",
    "SynthConfig", "SynthCorpus", "TaskGraph", "Vocabulary", "adaptive_gamma",
    "anchor_mask", "binarize", "brf_decode", "correct_sequence", "edit_distance",
    "emit_scores", "evaluate", "f1", "framewise_accuracy", "fuse_modalities",
    "gen_corpus", "gen_graph", "inject_vocab_noise", "inject_vocab_noise_many",
    "iou", "linear_chain_graph", "load_graph", "load_labels", "load_report",
    "load_score_corpus", "load_scores", "load_vocabulary", "make_distractor_pool",
    "mine_graph", "path_search", "path_search_with_stats", "preliminary_assign",
    "predictability_split", "sample_walk", "save_graph", "start_counts",
    "start_entropy", "to_cost", "to_dot", "top_transitions", "uniform_fill",
    "weighted_fusion", "write_labels", "write_report", "write_scores",
    "write_vocabulary",
]
