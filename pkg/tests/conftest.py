import numpy as np
import pytest

from stepgraph import LabelSequence, ScoreMatrix, TaskGraph


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_scores(values, video_id="v1", modality="video") -> ScoreMatrix:
    return ScoreMatrix(video_id, modality, np.asarray(values, dtype=np.float64))


def make_labels(labels, video_id="v1") -> LabelSequence:
    return LabelSequence(video_id, np.asarray(labels, dtype=np.int64))


def random_graph(K: int, rng, density: float = 0.5) -> TaskGraph:
    """Random transition graph; some rows may be unsupported."""
    counts = rng.integers(0, 10, size=(K, K)).astype(np.float64)
    counts[rng.random((K, K)) > density] = 0.0
    return TaskGraph(counts)
