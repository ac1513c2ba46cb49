import math

import numpy as np
import pytest

from stepgraph import (
    FormatError,
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

from conftest import make_labels, random_graph

LN4 = 1.386294  # -ln(0.25), by independent calculator


class TestMineGraph:
    def test_single_transition(self):
        g = mine_graph([make_labels([0, 1])], K=2)
        assert g.weights[0, 1] == 1.0
        assert not g.row_support[1]
        assert (g.weights[1] == 0).all()

    def test_two_videos_manual_count(self):
        # transitions: 0->1, 1->2, 0->2 so row 0 splits evenly
        g = mine_graph([make_labels([0, 1, 2]), make_labels([0, 2], "v2")], K=3)
        assert g.weights[0, 1] == pytest.approx(0.5)
        assert g.weights[0, 2] == pytest.approx(0.5)
        assert g.weights[1, 2] == pytest.approx(1.0)
        assert g.counts[0, 1] == 1 and g.counts[0, 2] == 1

    def test_self_loop_counted(self):
        g = mine_graph([make_labels([0, 0, 1])], K=2)
        assert g.weights[0, 0] == pytest.approx(0.5)
        assert g.weights[0, 1] == pytest.approx(0.5)

    def test_no_cross_video_pairs(self):
        g = mine_graph([make_labels([0, 0]), make_labels([1, 1], "v2")], K=2)
        assert g.counts[0, 1] == 0 and g.counts[1, 0] == 0

    def test_background_skipped_neighbors_joined(self):
        g = mine_graph([make_labels([0, -1, -1, 1])], K=2)
        assert g.counts[0, 1] == 1
        assert g.counts.sum() == 1

    def test_empty_corpus(self):
        g = mine_graph([], K=3)
        assert not g.row_support.any()
        assert (g.weights == 0).all()

    def test_label_out_of_range(self):
        with pytest.raises(FormatError):
            mine_graph([make_labels([0, 5])], K=2)

    def test_row_stochastic_on_random_corpora(self, rng):
        for _ in range(20):
            corpus = [
                make_labels(rng.integers(0, 6, size=rng.integers(2, 40)), f"v{i}")
                for i in range(rng.integers(1, 10))
            ]
            g = mine_graph(corpus, K=6)
            sums = g.weights.sum(axis=1)
            assert np.abs(sums[g.row_support] - 1.0).max() < 1e-9
            assert (sums[~g.row_support] == 0).all()

    def test_order_independence(self, rng):
        corpus = [
            make_labels(rng.integers(0, 5, size=20), f"v{i}") for i in range(8)
        ]
        direct = mine_graph(corpus, K=5)
        shuffled = mine_graph(corpus[::-1], K=5)
        assert (direct.counts == shuffled.counts).all()

    def test_permutation_equivariance(self, rng):
        for trial in range(20):
            corpus = [
                make_labels(rng.integers(0, 7, size=rng.integers(2, 30)), f"v{i}")
                for i in range(5)
            ]
            perm = rng.permutation(7)
            relabeled = [
                make_labels(perm[seq.labels], seq.video_id) for seq in corpus
            ]
            g = mine_graph(corpus, K=7)
            gp = mine_graph(relabeled, K=7)
            for i in range(7):
                for j in range(7):
                    assert gp.weights[perm[i], perm[j]] == g.weights[i, j]


class TestCost:
    def test_weight_one_costs_zero(self):
        g = mine_graph([make_labels([0, 1])], K=2)
        cost = to_cost(g)
        assert cost.matrix[0, 1] == 0.0

    def test_missing_edge_is_infinite(self):
        g = mine_graph([make_labels([0, 1])], K=2)
        assert np.isinf(to_cost(g).matrix[1, 0])

    def test_quarter_weight(self):
        g = TaskGraph(np.array([[1.0, 3.0], [0.0, 0.0]]))
        assert to_cost(g).matrix[0, 0] == pytest.approx(LN4, abs=1e-6)

    def test_smoothing_fills_every_edge(self):
        g = mine_graph([make_labels([0, 1])], K=2)
        cost = to_cost(g, smoothing=0.5)
        assert np.isfinite(cost.matrix).all()
        # smoothed row 0: (counts + 0.5) / (1 + 2*0.5) = [0.25, 0.75]
        assert cost.matrix[0, 0] == pytest.approx(-math.log(0.25))
        assert cost.matrix[0, 1] == pytest.approx(-math.log(0.75))

    def test_costs_nonnegative(self, rng):
        g = random_graph(8, rng)
        m = to_cost(g).matrix
        assert (m[np.isfinite(m)] >= 0).all()

    def test_negative_smoothing_rejected(self, rng):
        with pytest.raises(ValueError):
            to_cost(random_graph(3, rng), smoothing=-1)


class TestBinarize:
    def test_uniform_over_support(self):
        g = TaskGraph(np.array([[9.0, 1.0, 0.0], [0.0] * 3, [0.0] * 3]))
        b = binarize(g)
        assert b.weights[0].tolist() == [0.5, 0.5, 0.0]

    def test_unsupported_row_unchanged(self):
        g = TaskGraph(np.zeros((2, 2)))
        assert (binarize(g).weights == 0).all()

    def test_rows_still_stochastic(self, rng):
        for _ in range(10):
            g = random_graph(6, rng)
            b = binarize(g)
            sums = b.weights.sum(axis=1)
            assert np.abs(sums[b.row_support] - 1.0).max() < 1e-9


class TestTopTransitions:
    def test_simple_ranking(self):
        g = TaskGraph(np.array([[0.1, 0.7, 0.2], [0.0] * 3, [0.0] * 3]))
        assert top_transitions(g, 0, 2) == [(1, pytest.approx(0.7)),
                                            (2, pytest.approx(0.2))]

    def test_unsupported_row_empty(self):
        g = TaskGraph(np.zeros((3, 3)))
        assert top_transitions(g, 1, 4) == []

    def test_matches_full_sort_oracle(self, rng):
        g = random_graph(10, rng, density=0.8)
        for src in range(10):
            row = g.weights[src]
            oracle = sorted(
                ((int(j), float(row[j])) for j in range(10) if row[j] > 0),
                key=lambda jw: (-jw[1], jw[0]),
            )
            assert top_transitions(g, src, 10) == oracle


class TestStartEntropy:
    def test_deterministic_row_zero_entropy(self):
        g = TaskGraph(np.array([[0.0, 1.0], [0.0, 0.0]]))
        ent = start_entropy(g, [1, 0])
        assert ent == {0: 0.0}

    def test_uniform_row_ln4(self):
        g = TaskGraph(np.array([[0, 1, 1, 1, 1]] + [[0] * 5] * 4, dtype=float))
        ent = start_entropy(g, [3, 0, 0, 0, 0])
        assert ent[0] == pytest.approx(LN4, abs=1e-6)

    def test_bounded_by_ln_k(self, rng):
        g = random_graph(9, rng, density=0.9)
        ent = start_entropy(g, np.ones(9, dtype=int))
        for value in ent.values():
            assert value <= math.log(9) + 1e-12

    def test_start_counts_skip_background(self):
        counts = start_counts([make_labels([-1, 2, 0])], K=3)
        assert counts.tolist() == [0, 0, 1]


class TestSerialization:
    def test_round_trip_mined(self, tmp_path, rng):
        corpus = [make_labels(rng.integers(0, 5, size=30), f"v{i}") for i in range(4)]
        g = mine_graph(corpus, K=5)
        path = tmp_path / "graph.json"
        save_graph(path, g, provenance={"config_hash": "abc", "seed": 0})
        back = load_graph(path)
        assert (back.counts == g.counts).all()
        assert (back.weights == g.weights).all()

    def test_round_trip_fractional_counts(self, tmp_path):
        g = TaskGraph(np.array([[0.0, 0.625], [0.375, 0.0]]))
        path = tmp_path / "graph.json"
        save_graph(path, g)
        assert (load_graph(path).counts == g.counts).all()

    def test_bad_edges_rejected(self, tmp_path):
        path = tmp_path / "graph.json"
        path.write_text('{"K": 2, "edges": [[0, 5, 1]]}')
        with pytest.raises(FormatError):
            load_graph(path)

    def test_dot_export_lists_top_edges(self):
        g = TaskGraph(np.array([[0.0, 3.0, 1.0], [0.0] * 3, [0.0] * 3]))
        dot = to_dot(g, top_n=1)
        assert dot.startswith("digraph")
        assert '"0" -> "1"' in dot
        assert '"0" -> "2"' not in dot
