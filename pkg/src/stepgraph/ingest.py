"""Domain types and their file formats.

Formats, all plain text:
  - vocabulary: UTF-8, one keystep name per line; line order defines the
    integer ids. Lines starting with '# ' are comments.
  - scores: CSV blocks. Each block starts with a metadata line
    ``video_id,modality,T,K`` followed by T rows of K decimals (6
    significant digits). A file may hold several blocks back to back.
  - labels: JSON lines, one ``{"video_id": ..., "labels": [...]}`` object
    per video. A ``{"provenance": ...}`` line is skipped on load.
  - report: a single JSON object (see stepgraph.metrics for the schema).

Loaders validate invariants and raise instead of constructing bad values;
load(write(x)) == x up to the declared 1e-6 score precision.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, FormatError

BACKGROUND = -1

MODALITIES = ("text", "video")

_COMMENT = "# "


@dataclass(frozen=True)
class Vocabulary:
    """Ordered keystep names; a name's position is its id."""

    names: tuple

    def __post_init__(self):
        if len(self.names) == 0:
            raise FormatError("vocabulary is empty")
        seen = set()
        for name in self.names:
            if not name:
                raise FormatError("vocabulary contains an empty name")
            if name in seen:
                raise FormatError(f"duplicate keystep name: {name!r}")
            seen.add(name)

    def __len__(self) -> int:
        return len(self.names)

    @property
    def size(self) -> int:
        return len(self.names)

    def id_of(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """Per-video (T, K) similarity scores for one modality.

    Values follow the cosine convention in [-1, 1]; out-of-range values
    are tolerated with a warning so unnormalized dot products still load.
    """

    video_id: str
    modality: str
    values: np.ndarray

    def __post_init__(self):
        if self.modality not in MODALITIES:
            raise FormatError(
                f"{self.video_id}: modality must be one of {MODALITIES}, "
                f"got {self.modality!r}"
            )
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise FormatError(f"{self.video_id}: scores must be a (T, K) matrix")
        bad = ~np.isfinite(v)
        if bad.any():
            t = int(np.argwhere(bad)[0][0])
            raise FormatError(
                f"{self.video_id}: non-finite score at row {t}"
            )
        if (np.abs(v) > 1.0).any():
            warnings.warn(
                f"{self.video_id}: {int((np.abs(v) > 1.0).sum())} score(s) "
                "outside [-1, 1]; thresholds assume the cosine convention",
                stacklevel=2,
            )
        object.__setattr__(self, "values", v)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def K(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class LabelSequence:
    """Per-frame keystep ids; BACKGROUND (-1) only appears in ground truth."""

    video_id: str
    labels: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.labels, dtype=np.int64)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise FormatError(f"{self.video_id}: labels must be a non-empty 1-d list")
        if (arr < BACKGROUND).any():
            t = int(np.argmax(arr < BACKGROUND))
            raise FormatError(
                f"{self.video_id}: label {int(arr[t])} at frame {t} is invalid"
            )
        object.__setattr__(self, "labels", arr)

    def __len__(self) -> int:
        return len(self.labels)


def check_labels_in_vocab(seq: LabelSequence, K: int) -> None:
    """Raise FormatError if any id in `seq` is >= K."""
    labs = seq.labels
    if (labs >= K).any():
        t = int(np.argmax(labs >= K))
        raise FormatError(
            f"{seq.video_id}: label {int(labs[t])} at frame {t} out of range "
            f"for vocabulary of size {K}"
        )


# ---------------------------------------------------------------------------
# vocabulary files

def load_vocabulary(path) -> Vocabulary:
    names = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if line.startswith(_COMMENT):
                continue
            if not line:
                raise FormatError(f"{path}: empty keystep name")
            if line in seen:
                raise FormatError(f"{path}: duplicate keystep name: {line!r}")
            seen.add(line)
            names.append(line)
    if not names:
        raise FormatError(f"{path}: vocabulary file is empty")
    return Vocabulary(tuple(names))


def write_vocabulary(path, vocab: Vocabulary, provenance: dict | None = None) -> None:
    for name in vocab.names:
        if "\n" in name or name.startswith(_COMMENT):
            raise FormatError(f"keystep name not representable in file: {name!r}")
    with open(path, "w", encoding="utf-8") as fh:
        if provenance is not None:
            fh.write(_COMMENT + json.dumps(provenance, sort_keys=True) + "\n")
        for name in vocab.names:
            fh.write(name + "\n")


# ---------------------------------------------------------------------------
# score files

def load_score_corpus(path, vocab: Vocabulary | None = None) -> list:
    """Load every score block in the file, in order."""
    matrices = []
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    i = 0
    n = len(lines)
    while i < n:
        line = lines[i]
        if not line or line.startswith(_COMMENT):
            i += 1
            continue
        head = line.split(",")
        if len(head) != 4:
            raise FormatError(f"{path}: bad score header at line {i + 1}: {line!r}")
        video_id, modality = head[0], head[1]
        try:
            T, K = int(head[2]), int(head[3])
        except ValueError as exc:
            raise FormatError(f"{path}: bad score header at line {i + 1}") from exc
        if T < 1 or K < 1:
            raise FormatError(f"{path}: non-positive T or K at line {i + 1}")
        if vocab is not None and K != len(vocab):
            raise DimensionError(
                f"{path}: {video_id} has {K} columns, vocabulary has {len(vocab)}"
            )
        if i + T >= n:
            raise FormatError(f"{path}: truncated score block for {video_id}")
        values = np.empty((T, K), dtype=np.float64)
        for t in range(T):
            row = lines[i + 1 + t].split(",")
            if len(row) != K:
                raise FormatError(
                    f"{path}: {video_id} row {t} has {len(row)} columns, expected {K}"
                )
            try:
                values[t] = [float(x) for x in row]
            except ValueError as exc:
                raise FormatError(f"{path}: {video_id} row {t} unparseable") from exc
            if not np.isfinite(values[t]).all():
                raise FormatError(f"{path}: {video_id} non-finite score at row {t}")
        matrices.append(ScoreMatrix(video_id, modality, values))
        i += 1 + T
    return matrices


def load_scores(path, vocab: Vocabulary | None = None) -> ScoreMatrix:
    """Load a file holding exactly one score block."""
    matrices = load_score_corpus(path, vocab)
    if len(matrices) != 1:
        raise FormatError(
            f"{path}: expected exactly one score block, found {len(matrices)}"
        )
    return matrices[0]


def write_scores(path, matrices, provenance: dict | None = None) -> None:
    """Write score matrices as concatenated CSV blocks (6 significant digits)."""
    if isinstance(matrices, ScoreMatrix):
        matrices = [matrices]
    with open(path, "w", encoding="utf-8") as fh:
        if provenance is not None:
            fh.write(_COMMENT + json.dumps(provenance, sort_keys=True) + "\n")
        for m in matrices:
            if "," in m.video_id:
                raise FormatError(f"video id not representable in CSV: {m.video_id!r}")
            fh.write(f"{m.video_id},{m.modality},{m.T},{m.K}\n")
            for row in m.values:
                fh.write(",".join(f"{x:.6g}" for x in row) + "\n")


# ---------------------------------------------------------------------------
# label files

def load_labels(path, vocab: Vocabulary | None = None) -> list:
    """Load label sequences from a JSON-lines file."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: line {ln} is not valid JSON") from exc
            if "provenance" in obj:
                continue
            if "video_id" not in obj or "labels" not in obj:
                raise FormatError(f"{path}: line {ln} missing video_id/labels")
            seq = LabelSequence(str(obj["video_id"]), obj["labels"])
            if vocab is not None:
                check_labels_in_vocab(seq, len(vocab))
            out.append(seq)
    return out


def write_labels(path, sequences, provenance: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if provenance is not None:
            fh.write(json.dumps({"provenance": provenance}, sort_keys=True) + "\n")
        for seq in sequences:
            fh.write(
                json.dumps(
                    {"video_id": seq.video_id, "labels": [int(x) for x in seq.labels]}
                )
                + "\n"
            )


# ---------------------------------------------------------------------------
# report files

def load_report(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON") from exc
    if not isinstance(obj, dict):
        raise FormatError(f"{path}: report must be a JSON object")
    return obj


def write_report(path, report: dict, provenance: dict | None = None) -> None:
    obj = dict(report)
    if provenance is not None:
        obj["provenance"] = provenance
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
