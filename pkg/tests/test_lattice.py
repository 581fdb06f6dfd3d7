import pytest

from splitjac import gl2, lattice, nt
from splitjac.errors import UnsupportedModulus


def class_keys(subgroups):
    return sorted(gl2.canonical_class_key(S) for S in subgroups)


class TestAllSubgroups:
    def test_gl2_mod2_four_classes(self):
        classes = lattice.all_subgroups(gl2.full_group(2))
        assert sorted(S.order for S in classes) == [1, 2, 3, 6]

    def test_filter_full_order(self):
        G = gl2.full_group(3)
        out = lattice.all_subgroups(G, predicate=lambda S: S.order == G.order)
        assert len(out) == 1

    def test_classes_pairwise_nonconjugate_mod4(self):
        classes = lattice.all_subgroups(gl2.full_group(4))
        keys = class_keys(classes)
        assert len(keys) == len(set(keys))
        # exhaustive pairwise check: distinct classes are never conjugate
        for i, A in enumerate(classes):
            for B in classes[i + 1 :]:
                if A.order != B.order:
                    continue
                assert gl2.are_conjugate(A, B) is None

    def test_lagrange_and_orbit_counts_mod3(self):
        view = lattice.matrix_view(gl2.full_group(3))
        classes = lattice.all_subgroup_classes(view)
        total = gl2.group_order(3)
        for rec in classes:
            assert total % rec.order == 0
        # cyclic subgroups found by the engine match direct enumeration
        amb = gl2.ambient(3)
        cyclic_sets = set()
        for g in amb.elements:
            H = gl2.generate_subgroup([g], 3)
            cyclic_sets.add(H.elements)
        engine_sets = set()
        for rec in classes:
            for s in rec.orbit:
                sub = gl2.subgroup_from_elements(s, 3)
                # cyclic iff some element generates
                if any(
                    gl2.element_order(x, 3) == sub.order for x in s
                ):
                    engine_sets.add(s)
        assert cyclic_sets <= engine_sets


class TestMaximalSubgroups:
    def test_gl2_mod2(self):
        out = lattice.maximal_subgroups(gl2.full_group(2))
        keys = set(class_keys(out))
        assert len(keys) == 2
        assert sorted({S.order for S in out}) == [2, 3]

    def test_trivial_group(self):
        assert lattice.maximal_subgroups(gl2.trivial_group(5)) == []

    def test_cyclic_order6(self):
        # cyclic of order 6 inside GL2(Z/7): diag(3, 1) has order 6
        H = gl2.generate_subgroup([(3, 0, 0, 1)], 7)
        assert H.order == 6
        out = lattice.maximal_subgroups(H)
        assert sorted(S.order for S in out) == [2, 3]

    @pytest.mark.parametrize("p,cap", [(3, 30), (5, 200), (7, 400)])
    def test_central_reduction_matches_exhaustive(self, p, cap, monkeypatch):
        G = gl2.full_group(p)
        monkeypatch.setattr(lattice, "REDUCTION_THRESHOLD", 10**9)
        exhaustive = lattice._maximal_sets(lattice.matrix_view(G), 10**9)
        monkeypatch.setattr(lattice, "REDUCTION_THRESHOLD", 10)
        reduced = lattice._maximal_sets(lattice.matrix_view(G), cap)
        exh_keys = set(
            gl2.canonical_class_key(gl2.subgroup_from_elements(s, p))
            for s in exhaustive
        )
        red_keys = set(
            gl2.canonical_class_key(gl2.subgroup_from_elements(s, p))
            for s in reduced
        )
        assert exh_keys == red_keys

    def test_product_rule_matches_exhaustive_mod6(self):
        G = gl2.full_group(6)
        via_product = lattice.maximal_subgroups(G)
        direct = lattice._maximal_sets(lattice.matrix_view(G), 10**9)
        assert set(class_keys(via_product)) == set(
            gl2.canonical_class_key(gl2.subgroup_from_elements(s, 6))
            for s in direct
        )

    def test_dickson_families_mod11(self):
        """Cross-check against the classical classification of maximal
        subgroups of GL2(F_p) for p = 11: Borel, normalizers of the two
        Cartans, determinant-index subgroups for ell | p-1, and the
        projectively-S4 subgroup (present since 11 = +-3 mod 8)."""
        out = lattice.maximal_subgroups(gl2.full_group(11))
        keys = {}
        for S in out:
            keys[gl2.canonical_class_key(S)] = S.order
        orders = sorted(keys.values())
        assert orders == [200, 240, 240, 1100, 2640, 6600]

    def test_completeness_small(self):
        # every subgroup class of GL2(4) lies under some maximal class
        G = gl2.full_group(4)
        classes = lattice.all_subgroups(G)
        maximals = lattice.maximal_subgroups(G)
        max_orbits = []
        for M in maximals:
            max_orbits.extend(gl2.conjugation_orbit(M))
        for S in classes:
            if S.order == G.order:
                continue
            assert any(S.elements <= s for s in max_orbits) or any(
                frozenset(c) <= s
                for c in [S.elements]
                for s in max_orbits
            )


class TestSeeds:
    def test_sl2_seed_mod5(self):
        seeds = lattice.ambient_seed_orbit_sets(5)
        assert any(len(s) == 120 for s in seeds)

    def test_binary_icosahedral_mod11(self):
        subs = lattice._binary_icosahedral_seeds(11, 11)
        assert subs
        for H in subs:
            assert H.order == 120
            assert gl2.contains_minus_identity(H)

    def test_no_seeds_for_solvable_moduli(self):
        for n in (2, 3, 4, 8, 9, 12):
            assert lattice.ambient_seed_orbit_sets(n) == []

    def test_unsupported_modulus(self):
        with pytest.raises(UnsupportedModulus):
            lattice.ambient_seed_orbit_sets(17 * 2)


class TestWalk:
    def test_max_index_one(self):
        nodes = list(lattice.pruned_walk(6, lambda H: True,
                                         lattice.WalkConfig(max_index=1)))
        assert len(nodes) == 1
        assert nodes[0].status == "passed"
        assert nodes[0].index == 1

    def test_mod2_constant_true_matches_exhaustive(self):
        nodes = list(lattice.pruned_walk(2, lambda H: True))
        walk_keys = sorted(n.class_key for n in nodes)
        allsubs = lattice.all_subgroups(gl2.full_group(2))
        exp = sorted(
            gl2.canonical_class_key(S)
            for S in allsubs
            if gl2.is_det_surjective(S) and gl2.contains_minus_identity(S)
        )
        assert walk_keys == exp
        # mod 2 the det and -I constraints are vacuous: all 4 classes emitted
        assert len(nodes) == 4

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_constant_true_matches_exhaustive(self, n):
        summary = lattice.WalkSummary()
        nodes = list(lattice.pruned_walk(n, lambda H: True, summary=summary))
        walk_keys = sorted(x.class_key for x in nodes)
        exp = sorted(
            gl2.canonical_class_key(S)
            for S in lattice.all_subgroups(gl2.full_group(n))
            if gl2.is_det_surjective(S) and gl2.contains_minus_identity(S)
        )
        assert walk_keys == exp
        assert summary.passed == len(nodes)

    def test_no_duplicate_keys(self):
        nodes = list(lattice.pruned_walk(6, lambda H: True))
        keys = [x.class_key for x in nodes]
        assert len(keys) == len(set(keys))

    def test_emitted_satisfy_constraints(self):
        for node in lattice.pruned_walk(5, lambda H: True,
                                        lattice.WalkConfig(max_index=30)):
            H = node.subgroup
            assert gl2.is_det_surjective(H)
            assert gl2.contains_minus_identity(H)
            assert node.index <= 30
