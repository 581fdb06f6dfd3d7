"""Subgroup lattices of GL2(Z/NZ): exhaustive enumeration, maximal
subgroups, and the monotone pruned walk.

The enumeration engine is a cyclic-extension algorithm over a generic
``GroupView`` (any finite group on hashable, comparable elements).  It is
complete provided every conjugacy class of perfect subgroups is supplied
as a seed; for the moduli this package supports those classes are known
and constructed explicitly (see ``perfect_seed_sets``).

Maximal subgroups of a group too large to enumerate exhaustively are
obtained by peeling off a central element of prime order: every maximal
subgroup either contains it (and is the preimage of a maximal subgroup of
the quotient) or is a complement (and is the kernel of a linear character
not vanishing on it).  Walked subgroups always contain -I, so the
recursion is well founded until the exhaustive base case applies.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from . import gl2, nt
from .errors import OrderCapExceeded, UnsupportedModulus
from .gl2 import Mat, Subgroup

#: groups up to this order get exhaustive lattice enumeration
EXHAUSTIVE_CAP = 2400

#: hard sanity bound on the number of subgroup classes per lattice
MAX_CLASSES = 200_000


# --------------------------------------------------------------------------
# generic group views


class GroupView:
    """A finite group presented as an element set with operation closures."""

    def __init__(self, elements: FrozenSet, gens: Tuple, mult: Callable,
                 inv: Callable, identity, seed_sets: Callable[[], List[FrozenSet]]):
        self.elements = elements
        self.gens = tuple(g for g in gens if g != identity) or ()
        self.mult = mult
        self.inv = inv
        self.identity = identity
        self._seed_sets = seed_sets

    @property
    def order(self) -> int:
        return len(self.elements)

    def seed_sets(self) -> List[FrozenSet]:
        return self._seed_sets()

    def conj(self, g, x):
        return self.mult(self.mult(g, x), self.inv(g))

    def element_order(self, x) -> int:
        e = self.identity
        k = 1
        y = x
        while y != e:
            y = self.mult(y, x)
            k += 1
        return k


def matrix_view(H: Subgroup) -> GroupView:
    amb = gl2.ambient(H.n)
    n = H.n

    def seeds() -> List[FrozenSet]:
        out = []
        for s in ambient_seed_orbit_sets(n):
            if s <= H.elements:
                out.append(s)
        return out

    gens = H.gens if H.gens else ()
    return GroupView(H.elements, gens, amb.mul, amb.inv, gl2.identity(n), seeds)


class QuotientView(GroupView):
    """Quotient of a view by a central subgroup of prime order."""

    def __init__(self, parent: GroupView, z):
        q = parent.element_order(z)
        zpow = [parent.identity]
        for _ in range(q - 1):
            zpow.append(parent.mult(zpow[-1], z))
        canon: Dict = {}
        for g in parent.elements:
            if g in canon:
                continue
            coset = sorted(parent.mult(g, zp) for zp in zpow)
            rep = coset[0]
            for x in coset:
                canon[x] = rep
        elements = frozenset(canon[g] for g in parent.elements)
        self._canon = canon
        self._zpow = zpow
        self.parent = parent

        def mult(a, b):
            return canon[parent.mult(a, b)]

        def inv(a):
            return canon[parent.inv(a)]

        def seeds() -> List[FrozenSet]:
            out = []
            seen = set()
            for s in parent.seed_sets():
                img = frozenset(canon[x] for x in s)
                if len(img) > 1 and img not in seen:
                    seen.add(img)
                    out.append(img)
            return out

        ident = canon[parent.identity]
        gens = tuple(dict.fromkeys(canon[g] for g in parent.gens))
        super().__init__(elements, gens, mult, inv, ident, seeds)

    def lift_set(self, s: Iterable) -> FrozenSet:
        par = self.parent
        return frozenset(par.mult(x, zp) for x in s for zp in self._zpow)


# --------------------------------------------------------------------------
# perfect-subgroup seeds

_SOLVABLE_LOCAL = {2, 3}


def _check_supported_modulus(n: int) -> None:
    special = []
    for p, e in nt.factorize(n).items():
        if p in _SOLVABLE_LOCAL:
            continue
        if p > 13:
            raise UnsupportedModulus(
                f"modulus {n}: no perfect-subgroup classification for prime {p}"
            )
        if e > 1:
            raise UnsupportedModulus(
                f"modulus {n}: prime power {p}^{e} not supported"
            )
        special.append(p)
    if len(special) > 1:
        raise UnsupportedModulus(
            f"modulus {n}: several nonsolvable local factors {special}"
        )


def _sl2_seed(n: int, p: int) -> Subgroup:
    t = gl2.lift_matrix((1, 1, 0, 1), p, n) if n != p else (1, 1, 0, 1)
    s = gl2.lift_matrix((0, p - 1, 1, 0), p, n) if n != p else (0, p - 1, 1, 0)
    # identity away from p: lift_matrix embeds exactly that way
    H = gl2.generate_subgroup([t, s], n)
    assert H.order == p * (p * p - 1)
    return H


def _binary_icosahedral_seeds(n: int, p: int) -> List[Subgroup]:
    """Subgroups isomorphic to 2.A5 inside the SL2(p) part, up to conjugacy."""
    amb = gl2.ambient(p)
    x0 = (0, p - 1, 1, 0)
    classes: List[Subgroup] = []
    seen_sets: Set[FrozenSet[Mat]] = set()
    for y in amb.sl2_elements():
        if gl2.element_order(y, p) != 5:
            continue
        try:
            H = gl2.generate_subgroup([x0, y], p, cap=200)
        except OrderCapExceeded:
            continue
        if H.order != 120:
            continue
        if H.elements in seen_sets:
            continue
        for s in gl2.conjugation_orbit(H):
            seen_sets.add(s)
        classes.append(H)
    if n != p:
        classes = [gl2.embed_subgroup(H, n) for H in classes]
    return classes


_seed_cache: Dict[int, List[FrozenSet[Mat]]] = {}


def ambient_seed_orbit_sets(n: int) -> List[FrozenSet[Mat]]:
    """Every GL2(Z/n)-conjugate of every nontrivial perfect subgroup."""
    if n in _seed_cache:
        return _seed_cache[n]
    _check_supported_modulus(n)
    out: List[FrozenSet[Mat]] = []
    for p in nt.prime_factors(n):
        if p in _SOLVABLE_LOCAL or p > 13:
            continue
        reps: List[Subgroup] = [_sl2_seed(n, p)]
        if p == 11:
            reps.extend(_binary_icosahedral_seeds(n, p))
        for H in reps:
            for s in gl2.conjugation_orbit(H):
                if s not in out:
                    out.append(s)
    # dedup while preserving deterministic order
    uniq: List[FrozenSet[Mat]] = []
    seen: Set[FrozenSet[Mat]] = set()
    for s in out:
        if s not in seen:
            seen.add(s)
            uniq.append(s)
    _seed_cache[n] = uniq
    return uniq


# --------------------------------------------------------------------------
# exhaustive lattice enumeration (cyclic extension with seeds)


@dataclass
class ClassRec:
    """One conjugacy class of subgroups inside an enumerated lattice."""

    elements: FrozenSet
    gens: Tuple
    order: int
    orbit: Tuple[FrozenSet, ...]

    @property
    def rep_sorted(self) -> Tuple:
        return tuple(sorted(self.elements))


def all_subgroup_classes(view: GroupView,
                         max_classes: int = MAX_CLASSES) -> List[ClassRec]:
    """All subgroups of the view group, one representative per conjugacy
    class (conjugacy inside the view group itself)."""
    mult = view.mult
    inv = view.inv
    ident = view.identity
    gen_pairs = [(g, inv(g)) for g in view.gens]

    classes: List[ClassRec] = []
    seen_sets: Dict[FrozenSet, int] = {}
    work: List[Tuple[int, Tuple, int]] = []

    def conj_orbit(s: FrozenSet) -> List[FrozenSet]:
        seen = {s}
        frontier = [s]
        while frontier:
            nxt = []
            for cur in frontier:
                for g, gi in gen_pairs:
                    t = frozenset(mult(mult(g, x), gi) for x in cur)
                    if t not in seen:
                        seen.add(t)
                        nxt.append(t)
            frontier = nxt
        return list(seen)

    def add_class(elem_set: FrozenSet, gens: Tuple) -> None:
        if elem_set in seen_sets:
            return
        if len(classes) >= max_classes:
            raise OrderCapExceeded(f"more than {max_classes} subgroup classes")
        orbit = conj_orbit(elem_set)
        idx = len(classes)
        rec = ClassRec(elem_set, tuple(gens), len(elem_set), tuple(orbit))
        classes.append(rec)
        for s in orbit:
            seen_sets[s] = idx
        heapq.heappush(work, (rec.order, rec.rep_sorted, idx))

    add_class(frozenset({ident}), ())
    for s in view.seed_sets():
        if s <= view.elements:
            sub_gens = _greedy_view_gens(view, s)
            add_class(s, sub_gens)

    total = view.order
    elements_local = view.elements
    while work:
        _, _, idx = heapq.heappop(work)
        rec = classes[idx]
        uset = rec.elements
        ugens = rec.gens or (ident,)
        if rec.order == total:
            continue
        # normalizer of U in the view group
        normalizer = []
        for g in elements_local:
            gi = inv(g)
            ok = True
            for u in ugens:
                if mult(mult(g, u), gi) not in uset:
                    ok = False
                    break
            if ok:
                normalizer.append(g)
        normalizer.sort()
        quotient_index = total // rec.order
        ext_primes = set(nt.prime_factors(quotient_index))
        covered: Set = set(uset)
        for h in normalizer:
            if h in covered:
                continue
            # coset order of h over U
            x = h
            k = 1
            while x not in uset:
                x = mult(x, h)
                k += 1
            if k not in ext_primes:
                continue
            new_set = set(uset)
            cos = h
            for _ in range(k - 1):
                new_set.update(mult(u, cos) for u in uset)
                cos = mult(cos, h)
            fz = frozenset(new_set)
            covered |= fz
            add_class(fz, tuple(rec.gens) + (h,))
    classes.sort(key=lambda r: (r.order, r.rep_sorted))
    return classes


def _greedy_view_gens(view: GroupView, s: FrozenSet) -> Tuple:
    mult = view.mult
    inv = view.inv
    ident = view.identity
    gens: List = []
    have = {ident}
    for x in sorted(s):
        if x in have:
            continue
        gens.append(x)
        step = []
        for g in gens:
            step.append(g)
            step.append(inv(g))
        have = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for y in frontier:
                for g in step:
                    z = mult(y, g)
                    if z not in have:
                        have.add(z)
                        nxt.append(z)
            frontier = nxt
        if len(have) == len(s):
            break
    return tuple(gens)


def maximal_sets_from_classes(classes: List[ClassRec],
                              top_order: int) -> List[ClassRec]:
    """Maximal proper classes: no intermediate class contains them."""
    proper = [r for r in classes if r.order < top_order]
    out = []
    for m in proper:
        dominated = False
        for c in proper:
            if c.order <= m.order or c.order % m.order or top_order % c.order:
                continue
            if any(m.elements <= s for s in c.orbit):
                dominated = True
                break
        if not dominated:
            out.append(m)
    return out


# --------------------------------------------------------------------------
# abelian quotient machinery (linear characters)


def derived_subgroup_set(view: GroupView) -> FrozenSet:
    mult = view.mult
    inv = view.inv
    gens = view.gens or (view.identity,)
    comms = set()
    for a in gens:
        for b in gens:
            comms.add(mult(mult(mult(a, b), inv(a)), inv(b)))
    comms.discard(view.identity)
    dgens = list(comms)
    cur = _closure(view, dgens)
    changed = True
    while changed:
        changed = False
        for g in gens:
            gi = inv(g)
            for x in list(dgens):
                y = mult(mult(g, x), gi)
                if y not in cur:
                    dgens.append(y)
                    cur = _closure(view, dgens)
                    changed = True
    return cur


def _closure(view: GroupView, gens: Sequence) -> FrozenSet:
    mult = view.mult
    inv = view.inv
    step = []
    for g in gens:
        step.append(g)
        step.append(inv(g))
    seen = {view.identity}
    frontier = [view.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in step:
                y = mult(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def _coset_rep_map(view: GroupView, sub: FrozenSet) -> Dict:
    """Map g -> canonical representative of the coset sub*g."""
    rep_of: Dict = {}
    for g in sorted(view.elements):
        if g in rep_of:
            continue
        coset = sorted(view.mult(x, g) for x in sub)
        r = coset[0]
        for x in coset:
            rep_of[x] = r
    return rep_of


def _mod_ell_coordinates(view: GroupView, ell: int):
    """Coordinates of view/(derived * ell-th powers) as an F_ell space.

    Returns (rep_map, coords, r) where rep_map sends an element to its
    coset representative and coords maps representatives to F_ell^r
    vectors, or None when the quotient is trivial.
    """
    derived = derived_subgroup_set(view)
    drep = _coset_rep_map(view, derived)

    def qmul(a, b):
        return drep[view.mult(a, b)]

    power_reps = set()
    for a in set(drep.values()):
        x = a
        for _ in range(ell - 1):
            x = qmul(x, a)
        power_reps.add(x)
    # ell-th powers form a subgroup of the abelian quotient
    phi_elems = frozenset(g for g in view.elements if drep[g] in power_reps)
    prep = _coset_rep_map(view, phi_elems)
    quot = sorted(set(prep.values()))
    if len(quot) == 1:
        return None

    def pmul(a, b):
        return prep[view.mult(a, b)]

    ident = prep[view.identity]
    coords: Dict = {ident: ()}
    dim = 0
    for g in quot:
        if g in coords:
            continue
        dim += 1
        updated = {elt: vec + (0,) for elt, vec in coords.items()}
        for elt, vec in coords.items():
            x = elt
            for k in range(1, ell):
                x = pmul(x, g)
                updated[x] = vec + (k,)
        coords = updated
    assert len(coords) == ell**dim
    return prep, coords, dim


def linear_characters(view: GroupView, ell: int) -> List[Dict]:
    """Surjections view -> Z/ell up to scalar, as value maps."""
    data = _mod_ell_coordinates(view, ell)
    if data is None:
        return []
    prep, coords, r = data
    out = []
    for phi in _projective_functionals(r, ell):
        vals = {
            g: sum(a * b for a, b in zip(phi, coords[prep[g]])) % ell
            for g in view.elements
        }
        out.append(vals)
    return out


def linear_character_kernels(view: GroupView, ell: int,
                             avoid=None) -> List[FrozenSet]:
    """Kernels of surjections view -> C_ell, optionally only those not
    containing ``avoid``."""
    kernels = []
    for vals in linear_characters(view, ell):
        if avoid is not None and vals[avoid] == 0:
            continue
        kernels.append(frozenset(g for g, v in vals.items() if v == 0))
    return kernels


def _projective_functionals(r: int, ell: int) -> Iterator[Tuple[int, ...]]:
    """Nonzero functionals on F_ell^r up to scalar (first nonzero entry 1)."""
    def rec(prefix: List[int], started: bool, i: int):
        if i == r:
            if started:
                yield tuple(prefix)
            return
        if not started:
            yield from rec(prefix + [0], False, i + 1)
            yield from rec(prefix + [1], True, i + 1)
        else:
            for v in range(ell):
                yield from rec(prefix + [v], True, i + 1)

    yield from rec([], False, 0)


# --------------------------------------------------------------------------
# maximal subgroups


_maximal_cache: Dict[Tuple[int, FrozenSet[Mat]], Tuple[Subgroup, ...]] = {}


def maximal_subgroups(H: Subgroup,
                      exhaustive_cap: int = EXHAUSTIVE_CAP) -> List[Subgroup]:
    """A complete list of maximal subgroups of H up to H-conjugacy.

    Duplicate classes may occur; completeness is guaranteed for supported
    moduli.
    """
    key = (H.n, H.elements)
    cached = _maximal_cache.get(key)
    if cached is not None:
        return list(cached)
    out = _maximal_subgroups_uncached(H, exhaustive_cap)
    out.sort(key=lambda S: (-S.order, S.sorted_elements()))
    _maximal_cache[key] = tuple(out)
    return list(out)


def _maximal_subgroups_uncached(H: Subgroup, exhaustive_cap: int) -> List[Subgroup]:
    n = H.n
    if H.order == 1:
        return []
    # CRT product split when H decomposes across coprime parts of n
    primes = nt.prime_factors(n)
    if len(primes) > 1:
        for p in primes:
            m = p ** nt.factorize(n)[p]
            k = n // m
            A = gl2.reduce_subgroup(H, m)
            B = gl2.reduce_subgroup(H, k)
            if A.order * B.order == H.order:
                return _product_maximals(H, A, B, m, k)
    view = matrix_view(H)
    sets = _maximal_sets(view, exhaustive_cap)
    return [gl2.subgroup_from_elements(s, n) for s in sets]


#: prefer central reduction above this order even when exhaustive would work
REDUCTION_THRESHOLD = 256


def _maximal_sets(view: GroupView, exhaustive_cap: int) -> List[FrozenSet]:
    z = None
    if view.order > REDUCTION_THRESHOLD:
        z = _central_prime_element(view)
    if z is None:
        if view.order <= exhaustive_cap:
            classes = all_subgroup_classes(view)
            return [
                r.elements for r in maximal_sets_from_classes(classes, view.order)
            ]
        raise OrderCapExceeded(
            f"group of order {view.order} has no central prime element and "
            f"exceeds the exhaustive cap {exhaustive_cap}"
        )
    q = view.element_order(z)
    quo = QuotientView(view, z)
    out = [quo.lift_set(s) for s in _maximal_sets(quo, exhaustive_cap)]
    out.extend(linear_character_kernels(view, q, avoid=z))
    return out


def _central_prime_element(view: GroupView):
    mult = view.mult
    gens = view.gens or (view.identity,)
    best = None
    for g in sorted(view.elements):
        if g == view.identity:
            continue
        if all(mult(g, h) == mult(h, g) for h in gens):
            k = view.element_order(g)
            if nt.is_prime(k):
                cand = (k, g)
                if best is None or cand < best:
                    best = cand
    return best[1] if best else None


def _crt_mat(x: Mat, m: int, y: Mat, k: int, n: int) -> Mat:
    return tuple(nt.crt_pair(x[i], m, y[i], k) for i in range(4))  # type: ignore


def _product_subgroup(X: Subgroup, Y: Subgroup, m: int, k: int, n: int) -> Subgroup:
    amb = gl2.ambient(n)
    e_m = gl2.identity(m)
    e_k = gl2.identity(k)
    elems = frozenset(
        amb.intern(_crt_mat(x, m, y, k, n)) for x in X.elements for y in Y.elements
    )
    gens = [_crt_mat(g, m, e_k, k, n) for g in X.gens]
    gens += [_crt_mat(e_m, m, g, k, n) for g in Y.gens]
    gens = [amb.intern(g) for g in gens]
    return Subgroup(n, tuple(dict.fromkeys(gens)), elems)


def _product_maximals(H: Subgroup, A: Subgroup, B: Subgroup,
                      m: int, k: int) -> List[Subgroup]:
    n = H.n
    out: List[Subgroup] = []
    for MA in maximal_subgroups(A):
        out.append(_product_subgroup(MA, B, m, k, n))
    for MB in maximal_subgroups(B):
        out.append(_product_subgroup(A, MB, m, k, n))
    # fiber products over common cyclic quotients C_ell.  The local factors
    # GL2(Z/p^e) have only cyclic simple quotients, so these are the only
    # mixed maximal subgroups of a product.
    viewA = matrix_view(A)
    viewB = matrix_view(B)
    ells = set(nt.prime_factors(A.order)) & set(nt.prime_factors(B.order))
    amb = gl2.ambient(n)
    seen: Set[FrozenSet[Mat]] = set()
    for ell in sorted(ells):
        charsA = linear_characters(viewA, ell)
        charsB = linear_characters(viewB, ell)
        for chiA in charsA:
            for chiB in charsB:
                for j in range(1, ell):
                    elems = frozenset(
                        amb.intern(_crt_mat(x, m, y, k, n))
                        for x in A.elements
                        for y in B.elements
                        if (chiA[x] - j * chiB[y]) % ell == 0
                    )
                    if len(elems) != H.order // ell or elems in seen:
                        continue
                    seen.add(elems)
                    out.append(gl2.subgroup_from_elements(elems, n))
    return out


# --------------------------------------------------------------------------
# public enumeration API


def all_subgroups(G: Subgroup, predicate: Optional[Callable[[Subgroup], bool]] = None,
                  max_classes: int = MAX_CLASSES) -> List[Subgroup]:
    """Every conjugacy class of subgroups of G, each exactly once."""
    classes = all_subgroup_classes(matrix_view(G), max_classes)
    out = []
    for r in classes:
        S = gl2.subgroup_from_elements(r.elements, G.n)
        if predicate is None or predicate(S):
            out.append(S)
    return out


# --------------------------------------------------------------------------
# the pruned walk


@dataclass
class WalkConfig:
    max_index: Optional[int] = None
    exhaustive_cap: int = EXHAUSTIVE_CAP
    spot_check_monotonicity: bool = False


@dataclass
class LatticeNode:
    subgroup: Subgroup
    class_key: str
    parent_keys: FrozenSet[str]
    status: str  # "passed" | "refuted" | "filtered-out"
    index: int


@dataclass
class WalkSummary:
    passed: int = 0
    refuted: int = 0
    filtered: int = 0
    diagnostics: List[str] = field(default_factory=list)


def pruned_walk(n: int, predicate: Callable[[Subgroup], bool],
                config: Optional[WalkConfig] = None,
                summary: Optional[WalkSummary] = None) -> Iterator[LatticeNode]:
    """Walk the subgroup lattice of GL2(Z/n) top-down.

    Emits one node per conjugacy class of subgroups satisfying the
    upward-closed constraints (full determinant image, -I, index bound),
    with status "passed" or "refuted" according to the predicate.  Classes
    failing the constraints are pruned silently and counted in the summary.
    Descent continues only below passed nodes; the predicate must be
    monotone under inclusion for the walk to be exhaustive.
    """
    if config is None:
        config = WalkConfig()
    if summary is None:
        summary = WalkSummary()
    total = gl2.group_order(n)
    root = gl2.full_group(n)
    root_key = gl2.canonical_class_key(root)
    heap: List[Tuple[int, str, Subgroup]] = [(1, root_key, root)]
    pushed: Dict[str, Set[str]] = {root_key: set()}
    processed: Set[str] = set()
    filtered_sets: Set[FrozenSet[Mat]] = set()
    while heap:
        index, key, H = heapq.heappop(heap)
        if key in processed:
            continue
        processed.add(key)
        parents = frozenset(pushed.get(key, set()))
        ok = predicate(H)
        if not ok:
            summary.refuted += 1
            yield LatticeNode(H, key, parents, "refuted", index)
            if config.spot_check_monotonicity:
                _spot_check(H, predicate, config, summary)
            continue
        summary.passed += 1
        yield LatticeNode(H, key, parents, "passed", index)
        for M in maximal_subgroups(H, config.exhaustive_cap):
            midx = total // M.order
            # the det, -I, and index constraints are upward closed: prune
            # failing children before the (expensive) conjugacy keying
            if (
                (config.max_index is not None and midx > config.max_index)
                or not gl2.contains_minus_identity(M)
                or not gl2.is_det_surjective(M)
            ):
                if M.elements not in filtered_sets:
                    filtered_sets.add(M.elements)
                    summary.filtered += 1
                continue
            mkey = gl2.canonical_class_key(M)
            if mkey in processed:
                continue
            if mkey not in pushed:
                pushed[mkey] = set()
                heapq.heappush(heap, (midx, mkey, M))
            pushed[mkey].add(key)


def _spot_check(H: Subgroup, predicate, config: WalkConfig,
                summary: WalkSummary) -> None:
    # sample one maximal subgroup; predicate true below a refuted node
    # indicates a monotonicity violation of the supplied predicate
    try:
        subs = maximal_subgroups(H, config.exhaustive_cap)
    except OrderCapExceeded:
        return
    for M in subs[:1]:
        if gl2.is_det_surjective(M) and gl2.contains_minus_identity(M):
            if predicate(M):
                summary.diagnostics.append(
                    f"monotonicity violation below refuted class "
                    f"{gl2.canonical_class_key(H)}"
                )
