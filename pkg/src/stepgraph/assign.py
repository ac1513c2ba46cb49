"""Preliminary per-frame keystep assignment and modality fusion.

The preliminary label at each frame is the argmax over keystep similarity
scores; its confidence is that maximum. Frames whose confidence clears a
threshold become anchors and are kept fixed by the downstream correction.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, FormatError
from .ingest import LabelSequence, ScoreMatrix

# An anchor mask is a plain boolean array of length T.
AnchorMask = np.ndarray


@dataclass(frozen=True, eq=False)
class ConfidenceSequence:
    """Per-frame confidence: the score of the chosen keystep."""

    video_id: str
    conf: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "conf", np.asarray(self.conf, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.conf)


def preliminary_assign(scores: ScoreMatrix):
    """Argmax each row of the score matrix.

    Ties break to the lowest id. Returns (labels, confidences); the
    confidence at t is the row maximum. Never emits BACKGROUND.
    """
    labels = np.argmax(scores.values, axis=1).astype(np.int64)
    conf = scores.values[np.arange(scores.T), labels]
    return (
        LabelSequence(scores.video_id, labels),
        ConfidenceSequence(scores.video_id, conf),
    )


def anchor_mask(conf: ConfidenceSequence, gamma: float) -> AnchorMask:
    """True where confidence >= gamma (inclusive)."""
    if not np.isfinite(gamma):
        raise ValueError("gamma must be finite")
    return conf.conf >= gamma


def adaptive_gamma(conf: ConfidenceSequence) -> float:
    """Per-video threshold keeping the most confident half of the frames.

    Returns the upper median of the confidences, so ceil(T/2) frames
    satisfy conf >= gamma (more when values tie at the threshold).
    """
    c = conf.conf
    keep = (len(c) + 1) // 2
    order = np.sort(c)[::-1]
    return float(order[keep - 1])


def fuse_modalities(video, text):
    """Combine per-modality labels and anchors, video taking priority.

    `video` and `text` are (LabelSequence, AnchorMask) pairs for the same
    video. Per frame: if both or only video are anchored, the video label
    wins; if only text is anchored, the text label wins; if neither, the
    video preliminary label is kept without an anchor.
    """
    v_labels, v_mask = video
    t_labels, t_mask = text
    if v_labels.video_id != t_labels.video_id:
        raise FormatError(
            f"modalities disagree on video id: {v_labels.video_id!r} vs "
            f"{t_labels.video_id!r}"
        )
    if not (len(v_labels) == len(v_mask) == len(t_labels) == len(t_mask)):
        raise DimensionError(
            f"{v_labels.video_id}: modality lengths differ "
            f"({len(v_labels)}/{len(v_mask)} vs {len(t_labels)}/{len(t_mask)})"
        )
    fused = np.where(v_mask | ~t_mask, v_labels.labels, t_labels.labels)
    return LabelSequence(v_labels.video_id, fused), (v_mask | t_mask)


def weighted_fusion(video: ScoreMatrix, text: ScoreMatrix, beta: float = 0.5) -> ScoreMatrix:
    """Blend the raw score matrices: beta * video + (1 - beta) * text.

    Ablation-only alternative to priority fusion; the result flows through
    the video pathway and keeps the video modality tag.
    """
    if video.video_id != text.video_id:
        raise FormatError(
            f"modalities disagree on video id: {video.video_id!r} vs {text.video_id!r}"
        )
    if video.values.shape != text.values.shape:
        raise DimensionError(
            f"{video.video_id}: score shapes differ "
            f"{video.values.shape} vs {text.values.shape}"
        )
    blended = beta * video.values + (1.0 - beta) * text.values
    return ScoreMatrix(video.video_id, "video", blended)
