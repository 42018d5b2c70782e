import io

import numpy as np
import pytest

from gnnperf.dataset import GridSpec, build_balanced_dataset
from gnnperf.measurement import (GnnModelKind, OracleParams, Representation,
                                 TimingFormatError, TimingRecord,
                                 emit_timings, ingest_timings,
                                 measure_manifest, oracle_time)
from gnnperf.metrics import GraphMetrics
from gnnperf.rmat import ParamDistribution

NOISELESS = OracleParams(sigma=0.0)


def met(n, m, h):
    return GraphMetrics(n=n, m=m, density=0.1, max_degree=h, min_degree=1,
                        mean_degree=2 * m / n, clustering=0.2,
                        clustering_mode="exact")


class TestOracle:
    def test_edge_list_wins_on_low_hub_degree(self):
        r = met(10**5, 10**6, 10**3)
        assert oracle_time(r, GnnModelKind.GCN, Representation.SPARSE,
                           NOISELESS, 0) == pytest.approx(42.0)
        assert oracle_time(r, GnnModelKind.GCN, Representation.EDGE_LIST,
                           NOISELESS, 0) == pytest.approx(28.0)

    def test_sparse_wins_on_high_hub_degree(self):
        r = met(10**5, 10**6, 10**4)
        assert oracle_time(r, GnnModelKind.GCN, Representation.SPARSE,
                           NOISELESS, 0) == pytest.approx(43.8)
        assert oracle_time(r, GnnModelKind.GCN, Representation.EDGE_LIST,
                           NOISELESS, 0) == pytest.approx(46.0)

    def test_floor_for_small_graphs(self):
        r = met(100, 300, 10)
        assert oracle_time(r, GnnModelKind.GCN, Representation.SPARSE,
                           NOISELESS, 0) == pytest.approx(2.0)

    def test_model_multiplier_applied_after_floor(self):
        r = met(100, 300, 10)
        assert oracle_time(r, GnnModelKind.GAT, Representation.SPARSE,
                           NOISELESS, 0) == pytest.approx(3.0)

    def test_deterministic_with_noise(self):
        p = OracleParams(sigma=0.05)
        a = oracle_time(met(500, 2000, 30), GnnModelKind.GIN,
                        Representation.SPARSE, p, seed=7, graph_id="g1")
        b = oracle_time(met(500, 2000, 30), GnnModelKind.GIN,
                        Representation.SPARSE, p, seed=7, graph_id="g1")
        assert a == b
        c = oracle_time(met(500, 2000, 30), GnnModelKind.GIN,
                        Representation.SPARSE, p, seed=8, graph_id="g1")
        assert c != a

    def test_noise_varies_by_key(self):
        p = OracleParams(sigma=0.05)
        vals = {oracle_time(met(500, 2000, 30), k, r, p, 1, graph_id=g)
                for k in GnnModelKind for r in Representation
                for g in ("a", "b")}
        assert len(vals) == 16

    def test_monotone_in_each_metric(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n, m, h = (int(rng.integers(10, 10**5)),
                       int(rng.integers(10, 10**6)), int(rng.integers(2, 10**4)))
            for kind in GnnModelKind:
                for rep in Representation:
                    base = oracle_time(met(n, m, h), kind, rep, NOISELESS, 0)
                    assert oracle_time(met(n + 1000, m, h), kind, rep,
                                       NOISELESS, 0) >= base
                    assert oracle_time(met(n, m + 1000, h), kind, rep,
                                       NOISELESS, 0) >= base
                    assert oracle_time(met(n, m, h + 100), kind, rep,
                                       NOISELESS, 0) >= base
                    assert base >= NOISELESS.t_min

    def test_param_validation(self):
        with pytest.raises(ValueError):
            OracleParams(t_min=0.0)
        with pytest.raises(ValueError):
            OracleParams(sigma=-1.0)


@pytest.fixture(scope="module")
def manifest(tmp_path_factory):
    d = tmp_path_factory.mktemp("ds")
    dist = ParamDistribution(edge_range=(60.0, 300.0),
                             ratio_range=(1.0, 4.0), skew_range=(0.0, 0.5))
    return build_balanced_dataset(10, dist,
                                  GridSpec.for_distribution(dist, 2, 2),
                                  seed=5, balance=False, out_dir=d,
                                  clustering_trials=100)


class TestMeasureManifest:

    def test_record_count_one_model(self, manifest):
        recs = measure_manifest(manifest, {GnnModelKind.GCN}, NOISELESS, 0)
        assert len(recs) == 20

    def test_record_count_all_models(self, manifest):
        recs = measure_manifest(manifest, set(GnnModelKind), NOISELESS, 0)
        assert len(recs) == 10 * 4 * 2

    def test_ids_bijective_per_design(self, manifest):
        recs = measure_manifest(manifest, set(GnnModelKind), NOISELESS, 0)
        ids = {e.graph_id for e in manifest.entries}
        for kind in GnnModelKind:
            for rep in Representation:
                got = [r.graph_id for r in recs
                       if r.model is kind and r.repr is rep]
                assert sorted(got) == sorted(ids)
                assert len(set(got)) == len(got)


class TestTimingCsv:
    def test_round_trip_bit_exact(self):
        recs = [TimingRecord("g1", GnnModelKind.GCN, Representation.SPARSE,
                             12.5),
                TimingRecord("g1", GnnModelKind.GAT, Representation.EDGE_LIST,
                             0.123456789)]
        buf = io.StringIO()
        emit_timings(recs, buf)
        text = buf.getvalue()
        back = ingest_timings(io.StringIO(text))
        buf2 = io.StringIO()
        emit_timings(back, buf2)
        assert buf2.getvalue() == text

    def test_single_row(self):
        rows = ingest_timings(io.StringIO(
            "graph_id,model,representation,epoch_time_ms\ng1,GCN,SPARSE,12.5\n"))
        assert rows == [TimingRecord("g1", GnnModelKind.GCN,
                                     Representation.SPARSE, 12.5)]

    def test_case_insensitive_names(self):
        rows = ingest_timings(io.StringIO(
            "graph_id,model,representation,epoch_time_ms\n"
            "g1,gcn,sparse,1.0\ng2,Sage,Edge_List,2.0\n"))
        assert rows[0].model is GnnModelKind.GCN
        assert rows[1].repr is Representation.EDGE_LIST

    def test_unknown_model_reports_line(self):
        with pytest.raises(TimingFormatError) as ei:
            ingest_timings(io.StringIO(
                "graph_id,model,representation,epoch_time_ms\n"
                "g1,XYZ,SPARSE,12.5\n"))
        assert ei.value.line == 2

    def test_unknown_representation(self):
        with pytest.raises(TimingFormatError):
            ingest_timings(io.StringIO(
                "graph_id,model,representation,epoch_time_ms\n"
                "g1,GCN,DENSE,12.5\n"))

    def test_negative_time(self):
        with pytest.raises(TimingFormatError) as ei:
            ingest_timings(io.StringIO(
                "graph_id,model,representation,epoch_time_ms\n"
                "g1,GCN,SPARSE,-3\n"))
        assert ei.value.line == 2

    def test_non_finite_time(self):
        with pytest.raises(TimingFormatError):
            ingest_timings(io.StringIO(
                "graph_id,model,representation,epoch_time_ms\n"
                "g1,GCN,SPARSE,nan\n"))

    def test_duplicate_key(self):
        with pytest.raises(TimingFormatError) as ei:
            ingest_timings(io.StringIO(
                "graph_id,model,representation,epoch_time_ms\n"
                "g1,GCN,SPARSE,1.0\ng1,GCN,SPARSE,2.0\n"))
        assert ei.value.line == 3

    def test_bad_header(self):
        with pytest.raises(TimingFormatError):
            ingest_timings(io.StringIO("a,b\n"))

    def test_record_validation(self):
        with pytest.raises(ValueError):
            TimingRecord("g", GnnModelKind.GCN, Representation.SPARSE, 0.0)
