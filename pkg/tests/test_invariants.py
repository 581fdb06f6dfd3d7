import math

import pytest

from splitjac import gl2, invariants, nt
from splitjac.errors import BadPrime, ConstraintViolation


def gamma0_preimage(n):
    amb = gl2.ambient(n)
    return gl2.subgroup_from_elements(
        [g for g in amb.elements if g[2] % n == 0], n
    )


def legendre(a, p):
    if a % p == 0:
        return 0
    return 1 if pow(a % p, (p - 1) // 2, p) == 1 else -1


def classical_gamma0(n):
    """Index, nu2, nu3, cusps of Gamma_0(n) by the textbook formulas."""
    index = n
    for p in nt.prime_factors(n):
        index = index // p * (p + 1)
    if n % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for p in nt.prime_factors(n):
            nu2 *= 1 if p == 2 else (2 if p % 4 == 1 else 0)
    if n % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for p in nt.prime_factors(n):
            nu3 *= 1 if p == 3 else (2 if p % 3 == 1 else 0)
    cusps = sum(nt.euler_phi(math.gcd(d, n // d)) for d in nt.divisors(n))
    return index, nu2, nu3, cusps


class TestGamma0Family:
    @pytest.mark.parametrize("n", list(range(2, 31)))
    def test_matches_classical_formulas(self, n):
        H = gamma0_preimage(n)
        inv = invariants.curve_invariants(H)
        index, nu2, nu3, cusps = classical_gamma0(n)
        assert (inv.index, inv.nu2, inv.nu3, inv.cusps) == (index, nu2, nu3, cusps)
        # exact genus identity
        assert 12 * (inv.genus - 1) == inv.index - 3 * inv.nu2 - 4 * inv.nu3 - 6 * inv.cusps

    def test_gamma0_11(self):
        inv = invariants.curve_invariants(gamma0_preimage(11))
        assert (inv.level, inv.index, inv.nu2, inv.nu3, inv.cusps, inv.genus) == \
            (11, 12, 0, 0, 2, 1)

    def test_gamma0_13(self):
        inv = invariants.curve_invariants(gamma0_preimage(13))
        assert (inv.nu2, inv.nu3) == (2, 2)

    def test_gamma0_12(self):
        inv = invariants.curve_invariants(gamma0_preimage(12))
        assert inv.cusps == 6
        assert inv.genus == 0

    def test_gamma0_6_index(self):
        inv = invariants.curve_invariants(gamma0_preimage(6))
        assert inv.index == 12


class TestBasics:
    def test_full_group(self):
        for n in (2, 5, 9):
            inv = invariants.curve_invariants(gl2.full_group(n))
            assert (inv.level, inv.index, inv.nu2, inv.nu3, inv.cusps,
                    inv.genus) == (1, 1, 1, 1, 1, 0)

    def test_level_one_hardcoded(self):
        inv = invariants.curve_invariants(gl2.full_group(1))
        assert inv == invariants.CurveInvariants(1, 1, 1, 1, 1, 0)

    def test_genus3_level7_index168(self):
        # scalars extended by diag(1,-1): the minimal level-7 genus-3 class
        gens = [(3, 0, 0, 3), (1, 0, 0, 6)]
        H = gl2.generate_subgroup(gens, 7)
        assert H.order == 12
        inv = invariants.curve_invariants(H)
        assert (inv.level, inv.index, inv.genus) == (7, 168, 3)

    def test_constraint_violations(self):
        U = gl2.generate_subgroup([(1, 1, 0, 1)], 5)
        with pytest.raises(ConstraintViolation):
            invariants.curve_invariants(U)

    def test_bounds(self):
        for n in (6, 8, 10):
            H = gamma0_preimage(n)
            inv = invariants.curve_invariants(H)
            assert inv.nu2 <= inv.index
            assert inv.nu3 <= inv.index
            assert inv.cusps <= inv.index


class TestConjugationAndLift:
    def test_invariants_conjugation_invariant(self):
        import random

        rng = random.Random(11)
        amb = gl2.ambient(10)
        H = gamma0_preimage(10)
        inv = invariants.curve_invariants(H)
        for _ in range(3):
            g = rng.choice(amb.elements)
            gi = gl2.mat_inv(g, 10)
            conj = gl2.subgroup_from_elements(
                [gl2.mat_mul(gl2.mat_mul(g, x, 10), gi, 10) for x in H.elements],
                10,
            )
            assert invariants.curve_invariants(conj) == inv

    @pytest.mark.parametrize("m,n", [(3, 6), (4, 8), (5, 10), (6, 12)])
    def test_invariants_lift_invariant(self, m, n):
        H = gamma0_preimage(m)
        lifted = gl2.lift_subgroup(H, n)
        assert invariants.curve_invariants(lifted) == invariants.curve_invariants(H)


class TestRationalCusps:
    def test_full_group(self):
        for p in (5, 7, 13):
            assert invariants.rational_cusp_count(gl2.full_group(6), p) == 1

    def test_p_equiv_one(self):
        H = gamma0_preimage(8)
        assert invariants.rational_cusp_count(H, 17) == invariants.cusp_count(H)

    def test_gamma0_11_p7(self):
        H = gamma0_preimage(11)
        assert invariants.rational_cusp_count(H, 7) == 2

    def test_bad_prime(self):
        with pytest.raises(BadPrime):
            invariants.rational_cusp_count(gamma0_preimage(10), 5)

    def test_bounded_by_cusps(self):
        H = gamma0_preimage(9)
        for p in (2, 5, 7, 11, 13):
            assert invariants.rational_cusp_count(H, p) <= invariants.cusp_count(H)
