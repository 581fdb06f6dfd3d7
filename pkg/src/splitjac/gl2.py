"""Exact arithmetic in GL2(Z/NZ) and the subgroup representation.

Matrices are row-major 4-tuples (a, b, c, d) with entries reduced into
[0, N).  Element tuples are interned per modulus so that subgroup sets
share storage.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from . import nt
from .errors import (
    NonUnitDeterminant,
    NotADivisor,
    NotAMultiple,
    OrderCapExceeded,
)

Mat = Tuple[int, int, int, int]

#: subgroups larger than this are never materialized as element sets
ELEMENT_STORE_CAP = 2**20

#: are_conjugate brute-scans ambients up to this order
CONJUGACY_SCAN_CAP = 250_000


def identity(n: int) -> Mat:
    return (1 % n, 0, 0, 1 % n)


def minus_identity(n: int) -> Mat:
    return ((-1) % n, 0, 0, (-1) % n)


def mat_mul(A: Mat, B: Mat, n: int) -> Mat:
    a, b, c, d = A
    e, f, g, h = B
    return ((a * e + b * g) % n, (a * f + b * h) % n,
            (c * e + d * g) % n, (c * f + d * h) % n)


def mat_det(A: Mat, n: int) -> int:
    return (A[0] * A[3] - A[1] * A[2]) % n


def mat_trace(A: Mat, n: int) -> int:
    return (A[0] + A[3]) % n


def mat_inv(A: Mat, n: int) -> Mat:
    det = mat_det(A, n)
    if math.gcd(det, n) != 1:
        raise NonUnitDeterminant(f"det {det} not a unit mod {n}")
    di = nt.inv_mod(det, n)
    a, b, c, d = A
    return ((d * di) % n, (-b * di) % n, (-c * di) % n, (a * di) % n)


def mat_pow(A: Mat, k: int, n: int) -> Mat:
    if k < 0:
        return mat_pow(mat_inv(A, n), -k, n)
    out = identity(n)
    base = A
    while k:
        if k & 1:
            out = mat_mul(out, base, n)
        base = mat_mul(base, base, n)
        k >>= 1
    return out


def element_order(A: Mat, n: int) -> int:
    if math.gcd(mat_det(A, n), n) != 1:
        raise NonUnitDeterminant(f"matrix {A} not invertible mod {n}")
    e = identity(n)
    x = A
    k = 1
    while x != e:
        x = mat_mul(x, A, n)
        k += 1
    return k


def mat_conj(g: Mat, A: Mat, g_inv: Mat, n: int) -> Mat:
    return mat_mul(mat_mul(g, A, n), g_inv, n)


def group_order(n: int) -> int:
    """|GL2(Z/nZ)| = n^4 * prod_{p|n} (1 - 1/p)(1 - 1/p^2)."""
    out = n**4
    for p in nt.prime_factors(n):
        out = out // p**3 * ((p * p - 1) * (p - 1))
    return out


def sl2_order(n: int) -> int:
    return group_order(n) // nt.euler_phi(n) if n > 1 else 1


# --------------------------------------------------------------------------
# ambient worlds (interned element tables, cached per modulus)


class Ambient:
    """Materialized GL2(Z/nZ) with interned element tuples."""

    def __init__(self, n: int):
        self.n = n
        units = set(nt.unit_group_elements(n)) if n > 1 else {0}
        elems: List[Mat] = []
        if n == 1:
            elems = [(0, 0, 0, 0)]
        else:
            rng = range(n)
            for a in rng:
                for b in rng:
                    for c in rng:
                        bc = b * c
                        for d in rng:
                            if (a * d - bc) % n in units:
                                elems.append((a, b, c, d))
        elems.sort()
        self.elements: List[Mat] = elems
        self.element_set: FrozenSet[Mat] = frozenset(elems)
        self.canon: Dict[Mat, Mat] = {e: e for e in elems}
        self._inv: Dict[Mat, Mat] = {}

    def mul(self, A: Mat, B: Mat) -> Mat:
        n = self.n
        a, b, c, d = A
        e, f, g, h = B
        return self.canon[
            ((a * e + b * g) % n, (a * f + b * h) % n,
             (c * e + d * g) % n, (c * f + d * h) % n)
        ]

    def inv(self, A: Mat) -> Mat:
        out = self._inv.get(A)
        if out is None:
            out = self.canon[mat_inv(A, self.n)]
            self._inv[A] = out
            self._inv[out] = A
        return out

    def intern(self, A: Mat) -> Mat:
        return self.canon[A]

    @property
    def order(self) -> int:
        return len(self.elements)

    def sl2_elements(self) -> List[Mat]:
        n = self.n
        if n == 1:
            return list(self.elements)
        return [e for e in self.elements if mat_det(e, n) == 1]

    def std_gens(self) -> Tuple[Mat, ...]:
        n = self.n
        if n == 1:
            return ()
        gens = [self.intern((1, 1 % n, 0, 1)), self.intern((0, (-1) % n, 1 % n, 0))]
        for u in nt.unit_group_gens(n):
            gens.append(self.intern((1, 0, 0, u)))
        out: List[Mat] = []
        for g in gens:
            if g not in out and g != identity(n):
                out.append(g)
        return tuple(out) or (identity(n),)


@lru_cache(maxsize=None)
def ambient(n: int) -> Ambient:
    if n < 1:
        raise ValueError("modulus must be positive")
    if n > 1 and group_order(n) > ELEMENT_STORE_CAP:
        raise OrderCapExceeded(
            f"|GL2(Z/{n})| = {group_order(n)} exceeds element store cap"
        )
    return Ambient(n)


# --------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of GL2(Z/nZ), materialized as an element set.

    Immutable after construction; safe to share across threads.
    """

    n: int
    gens: Tuple[Mat, ...]
    elements: FrozenSet[Mat]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, A: Mat) -> bool:
        return A in self.elements

    def sorted_elements(self) -> Tuple[Mat, ...]:
        return tuple(sorted(self.elements))

    def encode(self) -> str:
        """Text encoding: ``N;a,b,c,d;...`` (one block per generator)."""
        parts = [str(self.n)]
        parts.extend(",".join(str(x) for x in g) for g in self.gens)
        return ";".join(parts)


def decode_subgroup(text: str) -> Subgroup:
    parts = [p for p in text.strip().split(";") if p != ""]
    if not parts:
        raise ValueError("empty subgroup encoding")
    n = int(parts[0])
    if n < 1:
        raise ValueError("modulus must be positive")
    gens = []
    for block in parts[1:]:
        entries = [int(x) for x in block.split(",")]
        if len(entries) != 4:
            raise ValueError(f"generator needs 4 entries, got {block!r}")
        gens.append(tuple(x % n for x in entries))
    return generate_subgroup(gens, n)


def generate_subgroup(gens: Iterable[Mat], n: int,
                      cap: int = ELEMENT_STORE_CAP) -> Subgroup:
    """Closure of ``gens`` under multiplication, as an explicit set."""
    amb = ambient(n)
    e = identity(n)
    norm: List[Mat] = []
    for g in gens:
        g = tuple(x % n for x in g)  # type: ignore[assignment]
        if math.gcd(mat_det(g, n), n) != 1:
            raise NonUnitDeterminant(f"generator {g} not invertible mod {n}")
        g = amb.intern(g)
        if g != e and g not in norm:
            norm.append(g)
    step = list(norm)
    for g in norm:
        gi = amb.inv(g)
        if gi not in step:
            step.append(gi)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in step:
                y = amb.mul(x, g)
                if y not in seen:
                    if len(seen) >= cap:
                        raise OrderCapExceeded(
                            f"subgroup closure exceeded cap {cap} at modulus {n}"
                        )
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return Subgroup(n, tuple(norm), frozenset(seen))


def subgroup_from_elements(elements: Iterable[Mat], n: int) -> Subgroup:
    """Wrap an already-closed element set, deriving a small generator list."""
    amb = ambient(n)
    elems = frozenset(amb.intern(x) for x in elements)
    gens = _greedy_gens(elems, n)
    return Subgroup(n, gens, elems)


def _greedy_gens(elems: FrozenSet[Mat], n: int) -> Tuple[Mat, ...]:
    amb = ambient(n)
    e = identity(n)
    if len(elems) == 1:
        return ()
    gens: List[Mat] = []
    have = {e}
    for x in sorted(elems):
        if x in have:
            continue
        gens.append(x)
        # close what we have so far
        step = []
        for g in gens:
            step.append(g)
            step.append(amb.inv(g))
        have = {e}
        frontier = [e]
        while frontier:
            nxt = []
            for y in frontier:
                for g in step:
                    z = amb.mul(y, g)
                    if z not in have:
                        have.add(z)
                        nxt.append(z)
            frontier = nxt
        if len(have) == len(elems):
            break
    return tuple(gens)


def full_group(n: int) -> Subgroup:
    amb = ambient(n)
    return Subgroup(n, amb.std_gens(), amb.element_set)


def trivial_group(n: int) -> Subgroup:
    return Subgroup(n, (), frozenset({identity(n)}))


# --------------------------------------------------------------------------
# predicates and level


def det_image(H: Subgroup) -> FrozenSet[int]:
    n = H.n
    if n == 1:
        return frozenset({0})
    return frozenset(mat_det(g, n) for g in H.elements)


def is_det_surjective(H: Subgroup) -> bool:
    if H.n == 1:
        return True
    return len(det_image(H)) == nt.euler_phi(H.n)


def contains_minus_identity(H: Subgroup) -> bool:
    return minus_identity(H.n) in H.elements


def reduce_subgroup(H: Subgroup, m: int) -> Subgroup:
    if H.n % m != 0:
        raise NotADivisor(f"{m} does not divide {H.n}")
    if m == H.n:
        return H
    amb = ambient(m)
    elems = frozenset(amb.intern(tuple(x % m for x in g)) for g in H.elements)
    gens = tuple(
        dict.fromkeys(
            amb.intern(tuple(x % m for x in g))
            for g in H.gens
            if tuple(x % m for x in g) != identity(m)
        )
    )
    if not gens and len(elems) > 1:
        gens = _greedy_gens(elems, m)
    return Subgroup(m, gens, elems)


def reduction_kernel_order(n: int, m: int) -> int:
    """#ker(GL2(Z/n) -> GL2(Z/m)) for m | n."""
    if n % m != 0:
        raise NotADivisor(f"{m} does not divide {n}")
    out = 1
    for p, e in nt.factorize(n).items():
        k = 0
        mm = m
        while mm % p == 0:
            mm //= p
            k += 1
        out *= _gl2_pk_order(p, e) // _gl2_pk_order(p, k)
    return out


def _gl2_pk_order(p: int, k: int) -> int:
    if k == 0:
        return 1
    return p ** (4 * (k - 1)) * (p * p - 1) * (p * p - p)


def lift_matrix(A: Mat, m: int, n: int) -> Mat:
    """An invertible lift of A in GL2(Z/n) congruent to A mod m."""
    if n % m != 0:
        raise NotAMultiple(f"{m} does not divide {n}")
    res = [0, 0, 0, 0]
    mod = 1
    for p, e in nt.factorize(n).items():
        q = p**e
        if m % p == 0:
            loc = tuple(x % q for x in A)  # entry lift keeps det a unit mod p
        else:
            loc = identity(q)
        for i in range(4):
            res[i] = nt.crt_pair(res[i], mod, loc[i], q) if mod > 1 else loc[i]
        mod *= q
    return tuple(x % n for x in res)  # type: ignore[return-value]


def reduction_kernel_gens(n: int, m: int) -> List[Mat]:
    """Generators of ker(GL2(Z/n) -> GL2(Z/m)) for m | n."""
    if n % m != 0:
        raise NotADivisor(f"{m} does not divide {n}")
    gens: List[Mat] = []
    for p, e in nt.factorize(n).items():
        q = p**e
        rest = n // q
        k = 0
        mm = m
        while mm % p == 0:
            mm //= p
            k += 1

        def emb(loc: Mat) -> Mat:
            if rest == 1:
                return tuple(x % n for x in loc)  # type: ignore[return-value]
            return tuple(
                nt.crt_pair(loc[i], q, identity(rest)[i], rest) for i in range(4)
            )  # type: ignore[return-value]

        if k == 0:
            # whole local factor: SL2 gens plus diagonal units
            gens.append(emb((1, 1, 0, 1)))
            gens.append(emb((0, q - 1, 1, 0)))
            for u in nt.unit_group_gens(q):
                gens.append(emb((1, 0, 0, u)))
        elif k < e:
            pk = p**k
            gens.append(emb((1, pk, 0, 1)))
            gens.append(emb((1, 0, pk, 1)))
            # units congruent to 1 mod p^k
            if p == 2 and k == 1:
                kgens = [q - 1, 5 % q]
            else:
                kgens = [(1 + pk) % q]
            for u in kgens:
                if u % q != 1:
                    gens.append(emb((u, 0, 0, 1)))
                    gens.append(emb((1, 0, 0, u)))
    e_n = identity(n)
    return [g for g in dict.fromkeys(gens) if g != e_n]


def lift_subgroup(H: Subgroup, n: int) -> Subgroup:
    """Full preimage of H under GL2(Z/n) -> GL2(Z/m), m = H.n."""
    m = H.n
    if n % m != 0:
        raise NotAMultiple(f"{m} does not divide {n}")
    if n == m:
        return H
    gens = [lift_matrix(g, m, n) for g in H.gens]
    gens.extend(reduction_kernel_gens(n, m))
    out = generate_subgroup(gens, n)
    expected = H.order * reduction_kernel_order(n, m)
    if out.order != expected:
        raise AssertionError(
            f"lift order {out.order} != expected {expected} ({m} -> {n})"
        )
    return out


def embed_subgroup(H: Subgroup, n: int) -> Subgroup:
    """CRT-embed H (at modulus m | n, identity at the other primes of n)."""
    m = H.n
    if n % m != 0:
        raise NotAMultiple(f"{m} does not divide {n}")
    rest = n // m
    if math.gcd(m, rest) != 1:
        raise NotAMultiple(f"{n} is not m * coprime-rest for m = {m}")
    if rest == 1:
        return H
    amb = ambient(n)
    e = identity(rest)

    def emb(g: Mat) -> Mat:
        return amb.intern(
            tuple(nt.crt_pair(g[i], m, e[i], rest) for i in range(4))
        )

    elems = frozenset(emb(g) for g in H.elements)
    gens = tuple(dict.fromkeys(emb(g) for g in H.gens))
    return Subgroup(n, gens, elems)


def level_of(H: Subgroup) -> int:
    """Least divisor M | N with H the full preimage of its reduction mod M."""
    n = H.n
    level = n
    changed = True
    while changed:
        changed = False
        for p in nt.prime_factors(level):
            m = level // p
            red = reduce_subgroup(H, m)
            if red.order * reduction_kernel_order(n, m) == H.order:
                level = m
                changed = True
                break
    return level


# --------------------------------------------------------------------------
# coset tables


class CosetTable:
    """Right cosets Hg in an ambient (full GL2 or its SL2 part).

    Supports per-actor permutations (right multiplication) and the
    conjugation-membership count used for elliptic points and Frobenius
    fixed points.
    """

    def __init__(self, H: Subgroup, ambient_kind: str = "gl2",
                 cap: int = ELEMENT_STORE_CAP):
        n = H.n
        amb = ambient(n)
        if ambient_kind == "gl2":
            space = amb.elements
        elif ambient_kind == "sl2":
            space = amb.sl2_elements()
        else:
            raise ValueError(f"unknown ambient kind {ambient_kind!r}")
        base = H.elements
        if ambient_kind == "sl2":
            base = frozenset(g for g in base if mat_det(g, n) == 1)
        if len(space) % max(len(base), 1) != 0:
            raise ValueError("subgroup not contained in ambient")
        count = len(space) // len(base)
        if count > cap:
            raise OrderCapExceeded(f"coset count {count} exceeds cap {cap}")
        self.n = n
        self.subgroup_elements = base
        self.reps: List[Mat] = []
        self.coset_of: Dict[Mat, int] = {}
        for g in space:
            if g in self.coset_of:
                continue
            idx = len(self.reps)
            self.reps.append(g)
            for h in base:
                self.coset_of[mat_mul(h, g, n)] = idx
        self._perm_cache: Dict[Mat, List[int]] = {}

    @property
    def count(self) -> int:
        return len(self.reps)

    def permutation(self, A: Mat) -> List[int]:
        """Permutation i -> coset index of rep_i * A."""
        key = tuple(x % self.n for x in A)
        perm = self._perm_cache.get(key)
        if perm is None:
            n = self.n
            perm = [self.coset_of[mat_mul(r, key, n)] for r in self.reps]
            self._perm_cache[key] = perm
        return perm

    def fixed_conjugation_count(self, A: Mat) -> int:
        """#{cosets Hg : g A g^-1 in H}."""
        n = self.n
        sub = self.subgroup_elements
        out = 0
        for r in self.reps:
            if mat_mul(mat_mul(r, A, n), mat_inv(r, n), n) in sub:
                out += 1
        return out

    def orbits(self, A: Mat) -> List[List[int]]:
        perm = self.permutation(A)
        seen = [False] * len(perm)
        orbits = []
        for i in range(len(perm)):
            if seen[i]:
                continue
            orb = []
            j = i
            while not seen[j]:
                seen[j] = True
                orb.append(j)
                j = perm[j]
            orbits.append(orb)
        return orbits


def right_coset_action(H: Subgroup, ambient_kind: str,
                       actors: Sequence[Mat]) -> CosetTable:
    table = CosetTable(H, ambient_kind)
    for A in actors:
        table.permutation(A)
    return table


# --------------------------------------------------------------------------
# conjugacy and canonical class keys


def _invariant_tuple(H: Subgroup) -> Tuple:
    n = H.n
    counter: Dict[Tuple[int, int], int] = {}
    for g in H.elements:
        k = (mat_trace(g, n), mat_det(g, n))
        counter[k] = counter.get(k, 0) + 1
    return (
        H.order,
        tuple(sorted(det_image(H))),
        contains_minus_identity(H),
        tuple(sorted(counter.items())),
    )


def conjugation_orbit(H: Subgroup) -> List[FrozenSet[Mat]]:
    """All GL2(Z/n)-conjugates of H's element set."""
    amb = ambient(H.n)
    n = H.n
    gens = amb.std_gens()
    pairs = [(g, amb.inv(g)) for g in gens]
    start = H.elements
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for s in frontier:
            for g, gi in pairs:
                t = frozenset(amb.mul(amb.mul(g, x), gi) for x in s)
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return list(seen)


def canonical_class_key(H: Subgroup) -> str:
    """Equal keys iff conjugate in GL2(Z/n); stable across runs."""
    best: Optional[Tuple[Mat, ...]] = None
    for s in conjugation_orbit(H):
        cand = tuple(sorted(s))
        if best is None or cand < best:
            best = cand
    payload = (str(H.n) + "|" + ";".join(",".join(map(str, m)) for m in best or ())).encode()
    return f"{H.n}.{H.order}.{hashlib.sha256(payload).hexdigest()[:16]}"


def are_conjugate(H1: Subgroup, H2: Subgroup) -> Optional[Mat]:
    """A witness g with g H1 g^-1 = H2, or None."""
    if H1.n != H2.n:
        raise ValueError("subgroups live at different moduli")
    n = H1.n
    if H1.elements == H2.elements:
        return identity(n)
    if _invariant_tuple(H1) != _invariant_tuple(H2):
        return None
    amb = ambient(n)
    if amb.order > CONJUGACY_SCAN_CAP:
        raise OrderCapExceeded(f"conjugator scan over {amb.order} elements")
    gens = H1.gens or tuple(H1.elements)
    target = H2.elements
    for g in amb.elements:
        gi = amb.inv(g)
        if all(amb.mul(amb.mul(g, x), gi) in target for x in gens):
            return g
    return None
