"""Acceptance suite: one test per criterion, each printing a pass/fail
line and enforcing its time budget. Run with `pytest -s tests/test_acceptance.py`
to see the lines as they pass.

The shared benchmark: K=50, branching 4, 200 videos of T=50, corruption
rate 0.4, score model defaults (true 0.7 / false 0.0 / sigma 0.15),
seed 17. "Accuracy" below is the per-keystep mean frame accuracy; the
method-gain criterion also checks the plain fraction of correct frames.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from stepgraph import (
    SynthConfig,
    TaskGraph,
    brf_decode,
    gen_corpus,
    gen_graph,
    linear_chain_graph,
    make_distractor_pool,
    mine_graph,
    path_search,
    path_search_with_stats,
    sample_walk,
    to_cost,
    uniform_fill,
)
from stepgraph.cli import main as cli_main
from stepgraph.decode import BrfConfig
from stepgraph.metrics import edit_distance, evaluate, f1, framewise_accuracy, iou
from stepgraph.sweeps import (
    ALPHA_GRID,
    GAMMA_GRID,
    alpha_sweep,
    assign_corpus,
    gamma_sweep,
    pathsearch_decode_corpus,
)

from conftest import make_labels, make_scores, random_graph
from test_decode import cost_of, enumerate_best_path
from test_metrics import levenshtein_oracle

BENCH_GAMMA = 0.40  # between the false (0.0) and true (0.7) score means


@contextmanager
def criterion(number, budget_s, description):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number:>2} FAIL                    {description}")
        raise
    elapsed = time.perf_counter() - start
    assert elapsed < budget_s, (
        f"criterion {number} blew its budget: {elapsed:.3f}s >= {budget_s}s"
    )
    print(
        f"ACCEPTANCE {number:>2} PASS {elapsed:8.3f}s/{budget_s:<6g}s {description}"
    )


@pytest.fixture(scope="module")
def benchmark():
    cfg = SynthConfig(rho=0.4, seed=17)  # all other fields are the defaults
    corpus = gen_corpus(cfg)
    prelims, _ = assign_corpus(corpus.scores)
    graph = mine_graph(prelims, cfg.K)
    return corpus, prelims, graph


def mean_acc(preds, gts):
    return evaluate(preds, gts).mean_acc


def frame_fraction(preds, gts):
    hit = total = 0
    for p, g in zip(preds, gts):
        hit += int((p.labels == g.labels).sum())
        total += len(g.labels)
    return hit / total


def test_c01_golden_uniform_fill():
    with criterion(1, 0.001, "golden uniform fill reproduces the worked example"):
        out = uniform_fill((10, 11), [7, 8, 9], 1, 10)
        assert out.tolist() == [10, 10, 7, 7, 8, 8, 9, 9, 11, 11]


def test_c02_path_search_matches_enumeration():
    with criterion(2, 5.0, "path cost equals simple-path enumeration, 100 graphs"):
        rng = np.random.default_rng(90210)
        reachable = 0
        for _ in range(120):
            K = int(rng.integers(2, 8))
            g = random_graph(K, rng, density=float(rng.uniform(0.2, 0.9)))
            matrix = to_cost(g).matrix
            a, b = int(rng.integers(K)), int(rng.integers(K))
            want = enumerate_best_path(matrix, a, b)
            got = path_search(to_cost(g), a, b)
            if want is None:
                assert got is None
                continue
            full = [a, *got, b] if a != b else [a]
            assert abs(cost_of(matrix, full) - want[0]) <= 1e-9
            reachable += 1
        assert reachable >= 60


def test_c03_graph_invariants(benchmark, rng):
    _, prelims, bench_graph = benchmark
    with criterion(3, 2.0, "mined rows sum to 1; permutation equivariance"):
        mined = [bench_graph]
        for i in range(30):
            corpus = [
                make_labels(rng.integers(0, 9, size=rng.integers(2, 40)), f"v{j}")
                for j in range(int(rng.integers(1, 8)))
            ]
            mined.append(mine_graph(corpus, 9))
        for g in mined:
            sums = g.weights.sum(axis=1)
            assert np.abs(sums[g.row_support] - 1.0).max() < 1e-9
            assert (sums[~g.row_support] == 0).all()
        for trial in range(20):
            corpus = [
                make_labels(rng.integers(0, 6, size=20), f"v{j}") for j in range(4)
            ]
            perm = rng.permutation(6)
            relabeled = [make_labels(perm[s.labels], s.video_id) for s in corpus]
            g, gp = mine_graph(corpus, 6), mine_graph(relabeled, 6)
            assert (gp.counts[np.ix_(perm, perm)] == g.counts).all()
            assert (gp.weights[np.ix_(perm, perm)] == g.weights).all()


def test_c04_statistical_recovery():
    with criterion(4, 5.0, "mined graph within TV 0.1 of planted (200 walks)"):
        planted = gen_graph(K=10, b=4, seed=17)
        walks = [
            sample_walk(planted, T=50, seed=1000 + i, video_id=f"w{i:03d}")
            for i in range(200)
        ]
        mined = mine_graph(walks, 10)
        tv = 0.5 * np.abs(mined.weights - planted.weights).sum(axis=1)
        assert tv.max() < 0.1


def test_c05_method_gain(benchmark):
    corpus, prelims, graph = benchmark
    with criterion(5, 30.0, "correction gains >= 5 accuracy points over argmax"):
        corrected = pathsearch_decode_corpus(corpus.scores, graph, BENCH_GAMMA)
        gain_macro = mean_acc(corrected, corpus.labels) - mean_acc(prelims, corpus.labels)
        gain_frames = frame_fraction(corrected, corpus.labels) - frame_fraction(
            prelims, corpus.labels
        )
        assert gain_macro >= 0.05
        assert gain_frames >= 0.05


def test_c06_gamma_sensitivity(benchmark):
    corpus, _, _ = benchmark
    with criterion(6, 120.0, "corrected beats baseline at every gamma in the grid"):
        rows = gamma_sweep(corpus, GAMMA_GRID)
        assert [r.setting for r in rows] == [
            "gamma=0.30", "gamma=0.35", "gamma=0.40", "gamma=0.45", "gamma=0.50",
        ]
        for row in rows:
            assert row.corrected_acc > row.baseline_acc, row.setting


def test_c07_vocab_noise_sweep(benchmark):
    corpus, _, _ = benchmark
    with criterion(7, 300.0, "accuracy non-increasing in alpha; corrected >= baseline"):
        pool = make_distractor_pool(int(max(ALPHA_GRID) * corpus.config.K) + 1)
        rows = alpha_sweep(corpus, pool, ALPHA_GRID, gamma=0.45, noise_seed=0)
        assert len(rows) == 6
        for earlier, later in zip(rows[:-1], rows[1:]):
            assert later.baseline_acc <= earlier.baseline_acc, later.setting
            assert later.corrected_acc <= earlier.corrected_acc, later.setting
        for row in rows:
            assert row.corrected_acc >= row.baseline_acc, row.setting


def test_c08_brf_identities(rng):
    with criterion(8, 10.0, "belief filter identities: uniform prior, t=0, causality"):
        for trial in range(20):
            K = int(rng.integers(2, 9))
            scores = make_scores(rng.uniform(-1, 1, size=(int(rng.integers(2, 30)), K)))
            uniform = TaskGraph(np.ones((K, K)))
            out = brf_decode(scores, uniform, BrfConfig(epsilon=0.1))
            assert (out.labels == np.argmax(scores.values, axis=1)).all()

            g = random_graph(K, rng, density=0.7)
            decoded = brf_decode(scores, g, BrfConfig())
            assert decoded.labels[0] == int(np.argmax(scores.values[0]))

            t = int(rng.integers(1, scores.T + 1))
            prefix = brf_decode(make_scores(scores.values[:t]), g, BrfConfig())
            assert (prefix.labels == decoded.labels[:t]).all()


def test_c09_metric_oracles(rng):
    with criterion(9, 10.0, "metric hand counts and edit-distance oracle"):
        per, mean = framewise_accuracy([0, 1, 1, 1], [0, 0, 1, 1])
        assert per[0] == 0.5 and per[1] == 1.0 and mean == 0.75
        per, mean = iou([0, 1, 1, 1], [0, 0, 1, 1])
        assert per[0] == 0.5 and abs(per[1] - 2 / 3) < 1e-12
        assert abs(mean - (0.5 + 2 / 3) / 2) < 1e-12
        per, macro = f1([0, 1, 1, 1], [0, 0, 1, 1])
        assert abs(per[0] - 2 / 3) < 1e-12 and abs(per[1] - 0.8) < 1e-12
        assert abs(macro - (2 / 3 + 0.8) / 2) < 1e-12
        _, mean = framewise_accuracy([1, 1, 0], [-1, -1, 0])
        assert mean == 1.0
        for _ in range(200):
            a = rng.integers(0, 5, size=int(rng.integers(0, 13)))
            b = rng.integers(0, 5, size=int(rng.integers(0, 13)))
            want = levenshtein_oracle(a, b)
            longest = max(len(a), len(b))
            assert edit_distance(a, b) == (want / longest if longest else 0.0)


def test_c10_linear_chain_baseline(benchmark):
    corpus, _, graph = benchmark
    with criterion(10, 60.0, "full mined graph >= linear-chain prior"):
        chain = linear_chain_graph(list(range(corpus.config.K)))
        full = pathsearch_decode_corpus(corpus.scores, graph, BENCH_GAMMA)
        chained = pathsearch_decode_corpus(corpus.scores, chain, BENCH_GAMMA)
        assert mean_acc(full, corpus.labels) >= mean_acc(chained, corpus.labels)


def test_c11_cli_determinism(tmp_path):
    with criterion(11, 60.0, "CLI pipeline reruns are byte-identical"):
        snapshots = []
        for name in ("first", "second"):
            d = tmp_path / name
            assert cli_main([
                "synth", "--out-dir", str(d), "--k", "10", "--videos", "8",
                "--t-min", "15", "--t-max", "20", "--rho", "0.3", "--seed", "9",
            ]) == 0
            assert cli_main([
                "mine", "--labels", str(d / "labels.jsonl"),
                "--vocab", str(d / "vocab.txt"), "--out", str(d / "mined.json"),
            ]) == 0
            assert cli_main([
                "decode", "--graph", str(d / "mined.json"),
                "--vocab", str(d / "vocab.txt"),
                "--scores", str(d / "scores.csv"),
                "--gamma-video", "0.45", "--out", str(d / "decoded.jsonl"),
            ]) == 0
            assert cli_main([
                "eval", "--pred", str(d / "decoded.jsonl"),
                "--gt", str(d / "labels.jsonl"), "--out", str(d / "report.json"),
            ]) == 0
            assert cli_main([
                "sweep", "--k", "8", "--videos", "6", "--t-min", "12",
                "--t-max", "12", "--branching", "3", "--rho", "0.3",
                "--seed", "4", "--alphas", "0,1", "--gammas", "0.4",
                "--out", str(d / "sweep.csv"),
            ]) == 0
            files = ("vocab.txt", "scores.csv", "labels.jsonl", "graph.json",
                     "mined.json", "decoded.jsonl", "report.json", "sweep.csv")
            snapshots.append(tuple((d / f).read_bytes() for f in files))
        assert snapshots[0] == snapshots[1]


def test_c12_quadratic_relaxation_growth():
    with criterion(12, 60.0, "edge relaxations grow at most quadratically in K"):
        sizes = (50, 100, 200, 400)
        counts = []
        for K in sizes:
            g = gen_graph(K, b=6, seed=5)
            cost = to_cost(g)
            _, relax = path_search_with_stats(cost, 0, K - 1)
            counts.append(relax)
        slope = np.polyfit(np.log(sizes), np.log(counts), 1)[0]
        assert slope <= 2.2, f"fit exponent {slope:.3f}"
