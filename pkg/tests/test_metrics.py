import io

import numpy as np
import pytest

from gnnperf.graph import EmptyGraphError, Graph
from gnnperf.metrics import (DensityUndefinedError, GraphMetrics,
                             clustering_approx, clustering_exact,
                             compute_metrics, degree_stats, density,
                             read_metrics_csv, write_metrics_csv)
from helpers import brute_force_metrics, random_graph

STAR5 = Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
CYCLE5 = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
PATH3 = Graph(3, [(0, 1), (1, 2)])
PATH5 = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
K4 = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
TRIANGLE = Graph(3, [(0, 1), (0, 2), (1, 2)])


class TestDegreeStats:
    def test_star(self):
        assert degree_stats(STAR5) == (4, 1, 1.6)

    def test_cycle(self):
        assert degree_stats(CYCLE5) == (2, 2, 2.0)

    def test_path(self):
        mx, mn, mean = degree_stats(PATH3)
        assert (mx, mn) == (2, 1)
        assert mean == pytest.approx(4 / 3)

    def test_empty_errors(self):
        with pytest.raises(EmptyGraphError):
            degree_stats(Graph(0, []))


class TestDensity:
    def test_complete(self):
        assert density(K4) == 1.0

    def test_path5(self):
        assert density(PATH5) == pytest.approx(0.4)

    def test_single_edge(self):
        assert density(Graph(2, [(0, 1)])) == 1.0

    def test_undefined_below_two_nodes(self):
        with pytest.raises(DensityUndefinedError):
            density(Graph(1, []))


class TestClusteringExact:
    def test_triangle(self):
        assert clustering_exact(TRIANGLE) == 1.0

    def test_star(self):
        assert clustering_exact(STAR5) == 0.0

    def test_k4_minus_edge(self):
        g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
        # nodes 2,3 see a closed pair; nodes 0,1 close 2 of 3 pairs
        assert clustering_exact(g) == pytest.approx(5 / 6)

    def test_degree_below_two_counts_zero(self):
        assert clustering_exact(PATH3) == pytest.approx(0.0)


class TestClusteringApprox:
    def test_triangle_any_seed(self):
        for seed in range(5):
            assert clustering_approx(TRIANGLE, trials=50, seed=seed) == 1.0

    def test_path3_open_wedge(self):
        assert clustering_approx(PATH3, trials=100, seed=0) == 0.0

    def test_no_degree_two_node_returns_zero(self):
        assert clustering_approx(Graph(2, [(0, 1)]), trials=10, seed=0) == 0.0

    def test_deterministic_per_seed(self):
        g = random_graph(80, 0.1, seed=3)
        a = clustering_approx(g, trials=500, seed=42)
        b = clustering_approx(g, trials=500, seed=42)
        assert a == b
        assert 0.0 <= a <= 1.0

    def test_close_to_exact(self):
        for seed in range(5):
            g = random_graph(100, 0.15, seed=seed)
            exact = clustering_exact(g)
            approx = clustering_approx(g, trials=20_000, seed=seed + 100)
            assert abs(approx - exact) < 0.03

    def test_trials_validation(self):
        with pytest.raises(ValueError):
            clustering_approx(TRIANGLE, trials=0, seed=0)


class TestBruteForceEquivalence:
    def test_small_random_graphs(self):
        for seed in range(30):
            n = int(np.random.default_rng(seed).integers(3, 60))
            g = random_graph(n, 0.2, seed=seed)
            ref = brute_force_metrics(g.node_count, g.edge_pairs())
            mx, mn, mean = degree_stats(g)
            assert (mx, mn) == (ref["max_degree"], ref["min_degree"])
            assert mean == ref["mean_degree"]
            assert density(g) == ref["density"]
            assert clustering_exact(g) == pytest.approx(ref["clustering"],
                                                        abs=1e-12)


class TestComputeMetrics:
    def test_k4(self):
        met = compute_metrics(K4, mode="exact")
        assert met == GraphMetrics(n=4, m=6, density=1.0, max_degree=3,
                                   min_degree=3, mean_degree=3.0,
                                   clustering=1.0, clustering_mode="exact")

    def test_p5(self):
        met = compute_metrics(PATH5, mode="exact")
        assert (met.n, met.m, met.density) == (5, 4, pytest.approx(0.4))
        assert (met.max_degree, met.min_degree, met.mean_degree) == (2, 1, 1.6)
        assert met.clustering == 0.0

    def test_records_approx_mode(self):
        met = compute_metrics(TRIANGLE, mode="approx", trials=64, seed=9)
        assert met.clustering_mode == "approx(trials=64,seed=9)"

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            compute_metrics(K4, mode="fancy")

    def test_pure(self):
        g = random_graph(50, 0.2, seed=1)
        assert compute_metrics(g, trials=200, seed=5) == \
            compute_metrics(g, trials=200, seed=5)


class TestMetricsCsv:
    def test_round_trip(self):
        rows = [("g0", compute_metrics(K4, mode="exact")),
                ("g1", compute_metrics(PATH5, mode="approx", trials=10, seed=1))]
        buf = io.StringIO()
        write_metrics_csv(rows, buf)
        text = buf.getvalue()
        assert text.splitlines()[0] == ("graph_id,n,m,density,max_degree,"
                                        "min_degree,mean_degree,clustering,"
                                        "clustering_mode")
        back = read_metrics_csv(io.StringIO(text))
        assert back == rows

    def test_header_check(self):
        with pytest.raises(ValueError):
            read_metrics_csv(io.StringIO("a,b,c\n1,2,3\n"))
