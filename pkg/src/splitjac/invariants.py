"""Geometric invariants of the curve attached to a subgroup: index,
elliptic point counts, cusps, genus, and the count of cusps fixed by
Frobenius.

All coset computations run in the SL2 coset space of H ∩ SL2; for
subgroups with full determinant image the GL2 and SL2 index computations
agree, which is asserted rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Tuple

from . import gl2
from .errors import BadPrime, ConstraintViolation, InternalInconsistency
from .gl2 import Subgroup

# order-4 and order-6 elliptic elements of SL2(Z); T generates the cusp action
_S = (0, -1, 1, 0)
_M = (0, -1, 1, 1)  # cube is -I
_T = (1, 1, 0, 1)


@dataclass(frozen=True)
class CurveInvariants:
    level: int
    index: int
    nu2: int
    nu3: int
    cusps: int
    genus: int

    def as_line(self) -> str:
        return (f"{self.level} {self.index} {self.nu2} {self.nu3} "
                f"{self.cusps} {self.genus}")


def _require_constraints(H: Subgroup) -> None:
    if not gl2.is_det_surjective(H):
        raise ConstraintViolation("subgroup does not have full determinant image")
    if not gl2.contains_minus_identity(H):
        raise ConstraintViolation("subgroup does not contain -I")


_sl2_table_cache: Dict[Tuple[int, frozenset], gl2.CosetTable] = {}
_gl2_table_cache: Dict[Tuple[int, frozenset], gl2.CosetTable] = {}


def sl2_coset_table(H: Subgroup) -> gl2.CosetTable:
    key = (H.n, H.elements)
    t = _sl2_table_cache.get(key)
    if t is None:
        t = gl2.CosetTable(H, "sl2")
        _sl2_table_cache[key] = t
    return t


def gl2_coset_table(H: Subgroup) -> gl2.CosetTable:
    key = (H.n, H.elements)
    t = _gl2_table_cache.get(key)
    if t is None:
        t = gl2.CosetTable(H, "gl2")
        _gl2_table_cache[key] = t
    return t


def psl2_index(H: Subgroup) -> int:
    _require_constraints(H)
    if H.n == 1:
        return 1
    gl2_index = gl2.group_order(H.n) // H.order
    sl2_index = sl2_coset_table(H).count
    if gl2_index != sl2_index:
        raise InternalInconsistency(
            f"GL2 index {gl2_index} != SL2 index {sl2_index}"
        )
    return gl2_index


def elliptic_point_counts(H: Subgroup) -> Tuple[int, int]:
    _require_constraints(H)
    if H.n == 1:
        return (1, 1)
    n = H.n
    table = sl2_coset_table(H)
    nu2 = table.fixed_conjugation_count(tuple(x % n for x in _S))
    nu3 = table.fixed_conjugation_count(tuple(x % n for x in _M))
    return (nu2, nu3)


def cusp_count(H: Subgroup) -> int:
    _require_constraints(H)
    if H.n == 1:
        return 1
    table = sl2_coset_table(H)
    return len(table.orbits((1, 1 % H.n, 0, 1)))


def genus(H: Subgroup) -> int:
    inv = curve_invariants(H)
    return inv.genus


@lru_cache(maxsize=None)
def _cached_invariants(n: int, elements: frozenset, gens: tuple) -> CurveInvariants:
    H = Subgroup(n, gens, elements)
    level = gl2.level_of(H)
    if level == 1:
        return CurveInvariants(1, 1, 1, 1, 1, 0)
    index = psl2_index(H)
    nu2, nu3 = elliptic_point_counts(H)
    cusps = cusp_count(H)
    g = Fraction(1) + Fraction(index, 12) - Fraction(nu2, 4) \
        - Fraction(nu3, 3) - Fraction(cusps, 2)
    if g.denominator != 1 or g < 0:
        raise InternalInconsistency(
            f"genus formula gave {g} for index={index} nu2={nu2} "
            f"nu3={nu3} cusps={cusps}"
        )
    return CurveInvariants(level, index, nu2, nu3, cusps, int(g))


def curve_invariants(H: Subgroup) -> CurveInvariants:
    _require_constraints(H)
    return _cached_invariants(H.n, H.elements, H.gens)


def rational_cusp_count(H: Subgroup, p: int) -> int:
    """Number of cusps fixed by Frobenius at a good prime p.

    The Galois action is right multiplication by diag(1, p) on the coset
    space, taken modulo the cusp (T-orbit) equivalence.  This convention
    is validated by the point-count oracles, not assumed.
    """
    _require_constraints(H)
    n = H.n
    if n == 1:
        return 1
    if p % n == 1:
        return cusp_count(H)
    if n % p == 0:
        raise BadPrime(f"prime {p} divides the level modulus {n}")
    table = gl2_coset_table(H)
    t_orbits = table.orbits((1, 1 % n, 0, 1))
    orbit_of: Dict[int, int] = {}
    for oi, orb in enumerate(t_orbits):
        for c in orb:
            orbit_of[c] = oi
    frob = table.permutation((1, 0, 0, p % n))
    fixed = 0
    for orb in t_orbits:
        oi = orbit_of[orb[0]]
        if all(orbit_of[frob[c]] == oi for c in orb):
            fixed += 1
    return fixed
