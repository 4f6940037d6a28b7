"""Monte-Carlo sampling over coset patterns and its statistical reports."""
import json

import pytest

from newton_strata.isocrystal import SlopeSeq, slope_leq, slope_sequence
from newton_strata.affine_weyl import AffineWeylElt, coset_pattern
from newton_strata.strata import poset_of
from newton_strata.empirics import (
    CodimEstimate,
    SampleConfig,
    StratumHistogram,
    ZeroCount,
    empirical_poset,
    estimate_codim,
    kappa_check,
    make_config,
    mazur_bound,
    predicate_campaign,
    sample_ixi,
    sample_pattern,
)

from conftest import P

X = AffineWeylElt.parse
HEADLINE = X("mu=-2,0,2;w=s121")


def lam(text):
    return SlopeSeq.parse(text)


class TestSampleConfig:
    def test_rejects_composite_modulus(self):
        with pytest.raises(ValueError):
            make_config(HEADLINE, p=15)

    def test_rejects_zero_workers_and_negative_trials(self):
        with pytest.raises(ValueError):
            make_config(HEADLINE, workers=0)
        with pytest.raises(ValueError):
            make_config(HEADLINE, trials=-1)

    def test_rejects_precision_below_floor(self):
        pat = coset_pattern(HEADLINE, "xI")
        floor = 4 * pat.max_abs_k() + 8
        with pytest.raises(ValueError):
            make_config(HEADLINE, prec=floor - 1)
        assert make_config(HEADLINE).prec == floor


class TestSampling:
    def test_samples_lie_in_pattern(self):
        cfg = make_config(HEADLINE, trials=1, seed=2)
        pat = coset_pattern(HEADLINE, "xI")
        for k in range(25):
            assert pat.contains(sample_pattern(cfg, k))

    def test_samples_deterministic_in_seed_and_index(self):
        cfg = make_config(HEADLINE, trials=1, seed=2)
        A = sample_pattern(cfg, 7)
        B = sample_pattern(make_config(HEADLINE, trials=1, seed=2), 7)
        C = sample_pattern(make_config(HEADLINE, trials=1, seed=3), 7)
        assert all(A[i, j] == B[i, j] for i in range(3) for j in range(3))
        assert any(A[i, j] != C[i, j] for i in range(3) for j in range(3))

    def test_refining_precision_extends_not_redraws(self):
        lo = make_config(HEADLINE, trials=1, seed=4)
        hi = make_config(HEADLINE, trials=1, seed=4, prec=lo.prec * 2)
        A, B = sample_pattern(lo, 3), sample_pattern(hi, 3)
        for i in range(3):
            for j in range(3):
                assert A[i, j] == B[i, j].truncate(A[i, j].prec)

    def test_ixi_product_mode(self):
        cfg = make_config(HEADLINE, trials=1, seed=6)
        u, m, um = sample_ixi(cfg, 0)
        ipat = coset_pattern(AffineWeylElt.identity(), "I")
        assert ipat.contains(u)
        assert coset_pattern(HEADLINE, "xI").contains(m)
        assert slope_sequence(um) in poset_of(HEADLINE)


class TestHistograms:
    def test_support_contained_in_poset(self):
        hist = empirical_poset(HEADLINE, make_config(HEADLINE, trials=2000, seed=1))
        pos = poset_of(HEADLINE)
        assert set(hist.counts) <= set(pos.elements)
        assert hist.trials == 2000
        assert sum(hist.counts.values()) + hist.unresolved == 2000

    def test_mode_is_the_generic_point(self):
        hist = empirical_poset(HEADLINE, make_config(HEADLINE, trials=2000, seed=1))
        assert hist.mode() == poset_of(HEADLINE).nu_x

    def test_frequency_of_generic_cap_is_one(self):
        hist = empirical_poset(HEADLINE, make_config(HEADLINE, trials=1000, seed=1))
        assert hist.frequency(poset_of(HEADLINE).nu_x) == 1.0

    def test_identical_seed_and_workers_reproduce(self):
        a = empirical_poset(HEADLINE, make_config(HEADLINE, trials=1500, seed=11))
        b = empirical_poset(HEADLINE, make_config(HEADLINE, trials=1500, seed=11))
        assert a.counts == b.counts and a.unresolved == b.unresolved

    def test_worker_count_does_not_change_counts(self):
        a = empirical_poset(HEADLINE, make_config(HEADLINE, trials=1500, seed=12, workers=1))
        b = empirical_poset(HEADLINE, make_config(HEADLINE, trials=1500, seed=12, workers=3))
        assert a.counts == b.counts and a.unresolved == b.unresolved

    def test_unresolved_rate_is_negligible_at_default_precision(self):
        hist = empirical_poset(HEADLINE, make_config(HEADLINE, trials=5000, seed=13))
        assert hist.unresolved_rate < 0.001

    def test_empty_histogram_mode_raises(self):
        empty = StratumHistogram(x="x", p=P, trials=0, counts={})
        with pytest.raises(ZeroCount):
            empty.mode()

    def test_json_and_csv_exports(self):
        hist = empirical_poset(HEADLINE, make_config(HEADLINE, trials=500, seed=14))
        doc = hist.to_json()
        assert doc["trials"] == 500 and "histogram" in doc
        json.dumps(doc)
        csv = hist.to_csv()
        assert csv.splitlines()[0] == "lam1,lam2,lam3,count"
        assert len(csv.strip().splitlines()) == 1 + len(hist.counts)

    def test_mazur_bound_dominates_support(self):
        for text in ("mu=-2,0,2;w=s121", "mu=1,-3,2;w=s2", "mu=2,-1,-1"):
            x = X(text)
            hist = empirical_poset(x, make_config(x, trials=800, seed=15))
            bound = mazur_bound(x)
            assert all(slope_leq(z, bound) for z in hist.counts)

    def test_translation_histogram_is_singleton(self):
        x = X("mu=3,-1,-2")
        hist = empirical_poset(x, make_config(x, trials=800, seed=16))
        assert set(hist.counts) == {mazur_bound(x)}


class TestEstimators:
    def test_codim_estimate_structure_and_rough_value(self):
        est = estimate_codim(HEADLINE, lam("0,0,0"), trials=40_000, seed=3)
        assert set(est.counts) == {11, 31}
        assert est.ci95[0] < est.estimate < est.ci95[1]
        assert 0.25 < est.estimate < 1.75  # exact value is 1
        json.dumps(est.to_json())

    def test_codim_estimate_rejects_foreign_slopes(self):
        with pytest.raises(ValueError):
            estimate_codim(HEADLINE, lam("2,0,-2"), trials=100)

    def test_kappa_parametrization_k1(self):
        rep = kappa_check(X("mu=-2,0,2;w=s121"), "K1", trials=40, seed=4)
        assert rep.ok
        assert rep.passes == rep.trials - rep.unresolved
        assert rep.inverse_trials > 0 and rep.inverse_passes == rep.inverse_trials

    def test_kappa_parametrization_k2_k3(self):
        assert kappa_check(X("mu=-2,0,2;w=s1"), "K2", trials=30, seed=5).ok
        assert kappa_check(X("mu=-2,0,2;w=s2"), "K3", trials=30, seed=6).ok

    def test_campaign_on_translation_case_only(self):
        rep = predicate_campaign(bound=1, trials_per_case=40, seed=7, cases={"VIA"})
        assert rep.ok
        assert set(rep.cases) == {"VIA"}
        assert not rep.mismatches
        json.dumps(rep.to_json())
