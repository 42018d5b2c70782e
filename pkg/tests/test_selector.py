import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnnperf.measurement import GnnModelKind, Representation, TimingRecord
from gnnperf.selector import (Decision, IncompletePairError, choose_repr,
                              evaluate_selection)

GCN = GnnModelKind.GCN
SP, EL = Representation.SPARSE, Representation.EDGE_LIST


def records(pairs):
    """pairs: {graph_id: (sparse_ms, edge_ms)} under GCN."""
    out = []
    for gid, (ts, te) in pairs.items():
        out.append(TimingRecord(gid, GCN, SP, ts))
        out.append(TimingRecord(gid, GCN, EL, te))
    return out


def ideal_decisions(pairs):
    return [Decision(gid, GCN, choose_repr(ts, te), ts, te)
            for gid, (ts, te) in pairs.items()]


class TestChooseRepr:
    def test_argmin(self):
        assert choose_repr(10.0, 12.0) is SP
        assert choose_repr(12.0, 10.0) is EL

    def test_tie_breaks_sparse(self):
        assert choose_repr(10.0, 10.0) is SP

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            choose_repr(float("nan"), 1.0)


class TestEvaluate:
    def test_hand_computed_speedup(self):
        pairs = {"a": (10.0, 30.0), "b": (30.0, 10.0)}
        rep = evaluate_selection(records(pairs), ideal_decisions(pairs))
        r = rep.per_model[GCN]
        assert r.accuracy == 1.0
        assert r.speedup_vs_random == pytest.approx(2.0)
        assert r.speedup_vs_worst == pytest.approx(3.0)
        assert r.regret_vs_best == pytest.approx(1.0)
        assert r.strategy_totals_ms["selected"] == pytest.approx(20.0)
        assert r.strategy_totals_ms["best"] == pytest.approx(20.0)
        assert r.strategy_totals_ms["random"] == pytest.approx(40.0)

    def test_equal_times_all_correct(self):
        pairs = {f"g{i}": (5.0, 5.0) for i in range(4)}
        rep = evaluate_selection(records(pairs), ideal_decisions(pairs))
        r = rep.per_model[GCN]
        assert r.accuracy == 1.0
        assert r.speedup_vs_random == 1.0
        assert r.speedup_vs_worst == 1.0
        assert r.regret_vs_best == 1.0

    def test_perfect_regressor_bound(self):
        rng = np.random.default_rng(0)
        pairs = {f"g{i}": tuple(rng.uniform(1, 50, 2)) for i in range(40)}
        rep = evaluate_selection(records(pairs), ideal_decisions(pairs))
        r = rep.per_model[GCN]
        assert r.accuracy == 1.0
        assert r.regret_vs_best == pytest.approx(1.0)

    def test_ideal_speedup_at_least_one_any_corpus(self):
        for seed in range(25):
            rng = np.random.default_rng(seed)
            pairs = {f"g{i}": tuple(rng.lognormal(1, 1, 2) + 0.1)
                     for i in range(30)}
            rep = evaluate_selection(records(pairs), ideal_decisions(pairs))
            assert rep.per_model[GCN].speedup_vs_random >= 1.0

    def test_incomplete_pair_names_graph(self):
        recs = records({"a": (1.0, 2.0)})
        recs = [r for r in recs if r.repr is SP]
        with pytest.raises(IncompletePairError) as ei:
            evaluate_selection(recs, ideal_decisions({"a": (1.0, 2.0)}))
        assert ei.value.graph_id == "a"

    def test_wrong_choices_counted(self):
        pairs = {"a": (10.0, 20.0), "b": (10.0, 20.0)}
        bad = [Decision("a", GCN, EL, 5.0, 4.0),
               Decision("b", GCN, SP, 4.0, 5.0)]
        r = evaluate_selection(records(pairs), bad).per_model[GCN]
        assert r.accuracy == 0.5
        assert r.median_rel_loss_misclassified == pytest.approx(1.0)
        assert r.median_rel_gap_correct == pytest.approx(1.0)

    def test_near_diagonal_misses_cost_less(self):
        # miss on a near-tie pair, hit the decisive ones: the median relative
        # loss of misses must stay under the median gap of the hits
        pairs = {"near": (10.0, 10.5), "far1": (10.0, 30.0),
                 "far2": (40.0, 10.0)}
        decs = [Decision("near", GCN, EL, 1.0, 0.9),
                Decision("far1", GCN, SP, 1.0, 2.0),
                Decision("far2", GCN, EL, 2.0, 1.0)]
        r = evaluate_selection(records(pairs), decs).per_model[GCN]
        assert r.median_rel_loss_misclassified < r.median_rel_gap_correct

    def test_mean_ratio_variant_reported(self):
        pairs = {"a": (10.0, 30.0), "b": (30.0, 10.0)}
        r = evaluate_selection(records(pairs),
                               ideal_decisions(pairs)).per_model[GCN]
        assert r.speedup_vs_random_mean_ratio == pytest.approx(2.0)

    def test_per_model_separation(self):
        recs = records({"a": (1.0, 2.0)})
        recs += [TimingRecord("a", GnnModelKind.GAT, SP, 5.0),
                 TimingRecord("a", GnnModelKind.GAT, EL, 3.0)]
        decs = [Decision("a", GCN, SP, 1.0, 2.0),
                Decision("a", GnnModelKind.GAT, EL, 3.0, 2.0)]
        rep = evaluate_selection(recs, decs)
        assert rep.per_model[GCN].accuracy == 1.0
        assert rep.per_model[GnnModelKind.GAT].accuracy == 1.0

    def test_report_serializes(self, tmp_path):
        pairs = {"a": (10.0, 30.0)}
        rep = evaluate_selection(records(pairs), ideal_decisions(pairs))
        rep.save(tmp_path / "report.json")
        text = (tmp_path / "report.json").read_text()
        assert '"GCN"' in text and '"speedup_vs_random"' in text


@given(st.floats(min_value=1e-3, max_value=1e6),
       st.integers(min_value=0, max_value=2**31))
@settings(max_examples=40, deadline=None)
def test_scale_invariance(scale, seed):
    rng = np.random.default_rng(seed)
    pairs = {f"g{i}": tuple(rng.uniform(1, 20, 2)) for i in range(10)}
    scaled = {gid: (ts * scale, te * scale) for gid, (ts, te) in pairs.items()}
    base = evaluate_selection(records(pairs),
                              ideal_decisions(pairs)).per_model[GCN]
    big = evaluate_selection(records(scaled),
                             ideal_decisions(scaled)).per_model[GCN]
    assert base.accuracy == big.accuracy
    assert base.speedup_vs_random == pytest.approx(big.speedup_vs_random)
    assert base.speedup_vs_worst == pytest.approx(big.speedup_vs_worst)
    assert base.regret_vs_best == pytest.approx(big.regret_vs_best)
