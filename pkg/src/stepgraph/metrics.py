"""Evaluation of predicted label sequences against ground truth.

Four metrics: frame-wise accuracy (per keystep, then unweighted mean),
intersection-over-union, macro F1, and normalized edit distance.
Background frames never count: frame-aligned metrics drop frames whose
ground truth is BACKGROUND, and edit distance strips BACKGROUND from each
sequence independently before comparing.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DimensionError
from .ingest import BACKGROUND


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Per-keystep rates plus corpus aggregates for one decode run.

    Aggregates are unweighted means; accuracy and F1 average over
    keysteps present in ground truth, IoU over keysteps present in either
    side. All are None when no frames were evaluated.
    """

    per_keystep: dict = field(repr=False)
    mean_acc: float | None
    mean_iou: float | None
    macro_f1: float | None
    mean_ed: float | None
    frames_evaluated: int

    def to_dict(self) -> dict:
        return {
            "per_keystep": {
                str(k): dict(v) for k, v in sorted(self.per_keystep.items())
            },
            "mean_acc": self.mean_acc,
            "mean_iou": self.mean_iou,
            "macro_f1": self.macro_f1,
            "mean_ed": self.mean_ed,
            "frames_evaluated": self.frames_evaluated,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "EvalReport":
        return cls(
            per_keystep={int(k): dict(v) for k, v in obj["per_keystep"].items()},
            mean_acc=obj["mean_acc"],
            mean_iou=obj["mean_iou"],
            macro_f1=obj["macro_f1"],
            mean_ed=obj["mean_ed"],
            frames_evaluated=int(obj["frames_evaluated"]),
        )


def _as_labels(x) -> np.ndarray:
    arr = getattr(x, "labels", x)
    return np.asarray(arr, dtype=np.int64)


def _aligned(pred, gt):
    """Drop frames whose ground truth is background; lengths must match."""
    p, g = _as_labels(pred), _as_labels(gt)
    if p.shape != g.shape:
        raise DimensionError(
            f"prediction length {p.shape[0]} != ground truth length {g.shape[0]}"
        )
    keep = g != BACKGROUND
    return p[keep], g[keep]


def _pooled_counts(pairs):
    """Per-keystep (true positives, predicted frames, gt frames) over pairs."""
    tp, pred_n, gt_n = {}, {}, {}
    frames = 0
    for pred, gt in pairs:
        p, g = _aligned(pred, gt)
        frames += len(g)
        for k in np.unique(g):
            k = int(k)
            gt_n[k] = gt_n.get(k, 0) + int((g == k).sum())
            tp[k] = tp.get(k, 0) + int(((g == k) & (p == k)).sum())
        for k in np.unique(p[p != BACKGROUND]):
            k = int(k)
            pred_n[k] = pred_n.get(k, 0) + int((p == k).sum())
    return tp, pred_n, gt_n, frames


def _mean(values):
    return float(np.mean(values)) if values else None


def framewise_accuracy(pred, gt):
    """Fraction of correctly labeled frames per ground-truth keystep.

    Returns (per-keystep dict, unweighted mean over keysteps present in
    the ground truth); mean is None when everything is background.
    """
    tp, _, gt_n, _ = _pooled_counts([(pred, gt)])
    per = {k: tp.get(k, 0) / gt_n[k] for k in gt_n}
    return per, _mean(list(per.values()))


def iou(pred, gt):
    """Intersection over union per keystep, over gt-or-pred presence."""
    tp, pred_n, gt_n, _ = _pooled_counts([(pred, gt)])
    per = {}
    for k in set(gt_n) | set(pred_n):
        inter = tp.get(k, 0)
        union = gt_n.get(k, 0) + pred_n.get(k, 0) - inter
        per[k] = inter / union if union else 0.0
    return per, _mean(list(per.values()))


def f1(pred, gt):
    """Per-keystep F1 (harmonic precision/recall) and macro mean over gt."""
    tp, pred_n, gt_n, _ = _pooled_counts([(pred, gt)])
    per = {}
    for k in gt_n:
        denom = pred_n.get(k, 0) + gt_n[k]
        per[k] = 2.0 * tp.get(k, 0) / denom if denom else 0.0
    return per, _mean(list(per.values()))


def _strip_background(labels: np.ndarray) -> np.ndarray:
    return labels[labels != BACKGROUND]


def _collapse_runs(labels: np.ndarray) -> np.ndarray:
    if len(labels) == 0:
        return labels
    keep = np.concatenate([[True], labels[1:] != labels[:-1]])
    return labels[keep]


def edit_distance(pred, gt, collapse: bool = False) -> float:
    """Normalized Levenshtein distance between the two label sequences.

    Background frames are stripped from each sequence independently;
    with collapse=True consecutive repeats collapse to one symbol first.
    Normalized by the longer length; both-empty compares as 0.
    """
    p = _strip_background(_as_labels(pred))
    g = _strip_background(_as_labels(gt))
    if collapse:
        p, g = _collapse_runs(p), _collapse_runs(g)
    longest = max(len(p), len(g))
    if longest == 0:
        return 0.0
    return kernels.levenshtein(p, g) / longest


def evaluate(preds, gts, collapse: bool = False) -> EvalReport:
    """Corpus-level report: keystep counts pool across all videos.

    `preds` and `gts` pair up by position and must agree on video ids
    when they carry them. Edit distance is computed per video and
    averaged.
    """
    if len(preds) != len(gts):
        raise DimensionError(
            f"{len(preds)} predictions vs {len(gts)} ground-truth sequences"
        )
    for p, g in zip(preds, gts):
        pid, gid = getattr(p, "video_id", None), getattr(g, "video_id", None)
        if pid is not None and gid is not None and pid != gid:
            raise DimensionError(f"sequence mismatch: {pid!r} paired with {gid!r}")
    pairs = list(zip(preds, gts))
    tp, pred_n, gt_n, frames = _pooled_counts(pairs)

    per_keystep = {}
    for k in sorted(set(gt_n) | set(pred_n)):
        inter = tp.get(k, 0)
        union = gt_n.get(k, 0) + pred_n.get(k, 0) - inter
        entry = {
            "acc": (inter / gt_n[k]) if k in gt_n else None,
            "iou": inter / union if union else 0.0,
            "f1": (
                2.0 * inter / (pred_n.get(k, 0) + gt_n[k]) if k in gt_n else None
            ),
        }
        per_keystep[k] = entry

    accs = [v["acc"] for v in per_keystep.values() if v["acc"] is not None]
    f1s = [v["f1"] for v in per_keystep.values() if v["f1"] is not None]
    ious = [v["iou"] for v in per_keystep.values()]
    eds = [edit_distance(p, g, collapse=collapse) for p, g in pairs]
    return EvalReport(
        per_keystep=per_keystep,
        mean_acc=_mean(accs),
        mean_iou=_mean(ious),
        macro_f1=_mean(f1s),
        mean_ed=_mean(eds),
        frames_evaluated=frames,
    )
