"""Affine Weyl combinatorics, chambers, symmetries, and coset patterns."""
from fractions import Fraction

import pytest

from newton_strata.series import INF, TruncatedSeries
from newton_strata.isocrystal import SlopeSeq, slope_sequence
from newton_strata.affine_weyl import (
    AffineWeylElt,
    PatternUndefined,
    chamber_of,
    compose,
    coset_pattern,
    enumerate_grid,
    eta_matrix,
    length,
    matrix_rep,
    phi,
    phi_matrix,
    psi,
    psi_matrix,
    psi_slopes,
    tau_matrix,
    two_rho_pairing,
)
from newton_strata.empirics import SampleConfig, sample_pattern

from conftest import P, rand_iwahori

X = AffineWeylElt.parse


class TestGroupStructure:
    def test_parse_str_roundtrip(self):
        for text in ("mu=-2,0,2;w=s121", "mu=0,0,0;w=1", "mu=3,-1,-2;w=s2"):
            assert str(X(text)) == text

    def test_parse_rejects_malformed(self):
        for bad in ("mu=1,1;w=s1", "mu=1,0,0;w=s1", "w=s1", "mu=0,0,0;w=s3"):
            with pytest.raises(ValueError):
                X(bad)

    def test_translation_part_must_sum_to_zero(self):
        with pytest.raises(ValueError):
            AffineWeylElt.from_parts((1, 0, 0), "1")

    def test_compose_with_inverse_is_identity(self):
        for x in enumerate_grid(2):
            assert compose(x, x.inverse()) == AffineWeylElt.identity()
            assert compose(x.inverse(), x) == AffineWeylElt.identity()

    def test_compose_translation_product_adds_exponents(self):
        a = X("mu=1,0,-1")
        b = X("mu=0,2,-2")
        assert compose(a, b) == X("mu=1,2,-3")

    def test_compose_semidirect_twist(self):
        # (pi^0 s1)(pi^nu 1)(pi^0 s1) = pi^(s1 nu)
        s1 = AffineWeylElt.from_parts((0, 0, 0), "s1")
        t = X("mu=2,-1,-1")
        assert compose(compose(s1, t), s1) == X("mu=-1,2,-1")

    def test_length_basics(self):
        assert length(AffineWeylElt.identity()) == 0
        assert length(AffineWeylElt.from_parts((0, 0, 0), "s1")) == 1
        assert length(AffineWeylElt.from_parts((0, 0, 0), "s121")) == 3

    def test_length_of_dominant_translation(self):
        # l(pi^mu) = <2 rho, mu_dom> for a dominant mu
        assert length(X("mu=2,0,-2")) == 2 * (2 - (-2))

    def test_length_symmetric_under_inverse(self):
        for x in enumerate_grid(2):
            assert length(x) == length(x.inverse())

    def test_act_point_is_group_action(self):
        v = (Fraction(1, 5), Fraction(-2, 5), Fraction(1, 5))
        for x in enumerate_grid(1):
            for y in list(enumerate_grid(1))[:12]:
                assert compose(x, y).act_point(v) == x.act_point(y.act_point(v))


class TestChambers:
    def test_identity_alcove_is_antidominant(self):
        assert chamber_of(AffineWeylElt.identity()).name == "C0"

    def test_known_chambers(self):
        # far translations land where mu points
        assert chamber_of(X("mu=-4,0,4")).name == "C0"
        assert chamber_of(X("mu=4,0,-4")).name == "s121(C0)"

    def test_all_six_chambers_realized_on_grid(self):
        names = {chamber_of(x).name for x in enumerate_grid(3)}
        assert names == {"C0", "s1(C0)", "s2(C0)", "s12(C0)", "s21(C0)", "s121(C0)"}

    def test_psi_transports_chambers(self):
        for x in enumerate_grid(2):
            assert chamber_of(psi(x)).name == chamber_of(x).apply_psi().name


class TestSymmetries:
    def test_phi_has_order_three(self):
        for x in enumerate_grid(2):
            assert phi(phi(phi(x))) == x

    def test_psi_is_an_involution(self):
        for x in enumerate_grid(2):
            assert psi(psi(x)) == x

    def test_psi_slopes_is_order_reversing_involution(self):
        lam = SlopeSeq(1, 0, -1)
        assert psi_slopes(lam) == lam
        half = SlopeSeq(Fraction(1, 2), Fraction(1, 2), -1)
        assert psi_slopes(half) == SlopeSeq(1, Fraction(-1, 2), Fraction(-1, 2))
        assert psi_slopes(psi_slopes(half)) == half

    def test_tau_rotation_and_eta_determinants(self):
        # tau is the length-zero rotation, det pi^-1; conjugation cancels it
        assert tau_matrix(P).det().valuation() == -1
        assert eta_matrix(P).det().valuation() == 0

    def test_phi_matrix_preserves_slopes(self, rng):
        for k in range(25):
            A = rand_iwahori(rng, index=100 + k)
            assert slope_sequence(phi_matrix(A)) == slope_sequence(A)

    def test_psi_matrix_transforms_slopes(self, rng):
        for k in range(25):
            A = rand_iwahori(rng, index=200 + k)
            assert slope_sequence(psi_matrix(A)) == psi_slopes(slope_sequence(A))

    def test_phi_matrix_lands_in_transported_coset(self):
        x = X("mu=-2,0,2;w=s121")
        cfg = SampleConfig(pattern=coset_pattern(x, "xI"), p=P, trials=1, seed=3)
        A = sample_pattern(cfg, 0)
        assert coset_pattern(phi(x), "xI").contains(phi_matrix(A))

    def test_psi_matrix_lands_in_transported_coset(self):
        x = X("mu=-2,0,2;w=s121")
        cfg = SampleConfig(pattern=coset_pattern(x, "xI"), p=P, trials=1, seed=3)
        A = sample_pattern(cfg, 1)
        assert coset_pattern(psi(x), "xI").contains(psi_matrix(A))

    def test_two_rho_pairing(self):
        assert two_rho_pairing(SlopeSeq(1, 0, -1)) == 4
        assert two_rho_pairing(SlopeSeq(0, 0, 0)) == 0


class TestPatterns:
    def test_matrix_rep_lies_in_own_coset_pattern(self):
        for x in enumerate_grid(2):
            A = matrix_rep(x, P, prec=24)
            assert coset_pattern(x, "xI").contains(A)

    def test_matrix_rep_has_unit_determinant(self):
        for x in list(enumerate_grid(2))[:30]:
            assert matrix_rep(x, P).det().valuation() == 0

    def test_identity_coset_is_the_iwahori_pattern(self):
        pat = coset_pattern(AffineWeylElt.identity(), "xI")
        for i in range(3):
            for j in range(3):
                e = pat.entries[i][j]
                if i == j:
                    assert e.kind == "exact" and e.k == 0
                elif i < j:
                    assert e.kind == "min" and e.k == 0
                else:
                    assert e.kind == "min" and e.k == 1

    def test_translation_coset_shifts_rows(self):
        pat = coset_pattern(X("mu=1,0,-1"), "xI")
        for i, m in enumerate((1, 0, -1)):
            assert pat.entries[i][i].kind == "exact" and pat.entries[i][i].k == m

    def test_sampled_matrices_lie_in_pattern(self, rng):
        x = X("mu=-1,2,-1;w=s21")
        pat = coset_pattern(x, "xI")
        cfg = SampleConfig(pattern=pat, p=P, trials=1, seed=9)
        for k in range(20):
            assert pat.contains(sample_pattern(cfg, k))

    def test_pattern_json_roundtrip(self):
        from newton_strata.affine_weyl import ValuationPattern

        pat = coset_pattern(X("mu=-2,0,2;w=s12"), "xI")
        again = ValuationPattern.from_json(pat.to_json())
        assert again == pat or again.to_json() == pat.to_json()

    def test_grid_sizes(self):
        assert len(list(enumerate_grid(1))) == 7 * 6
        assert len(list(enumerate_grid(4))) == 61 * 6

    def test_grid_empty_below_zero_bound(self):
        assert list(enumerate_grid(-1)) == []
