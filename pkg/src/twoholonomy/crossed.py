"""Crossed modules and 2-group composition.

A crossed module ``(H, G, tau, alpha)`` is realized either by finite index
tables (exact, exhaustively checkable) or by a covering homomorphism of matrix
Lie groups, where ``alpha_g`` is conjugation in the cover by any lift of ``g``.

2-cells are :class:`TwoMorphism` pairs ``(h, g)`` with source ``g``; the target
``tau(h) g`` is always recomputed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from math import gcd

import numpy as np

from .errors import NotFinite, SourceTargetMismatch
from .liegroups import GROUP_TOL, CoveringPair, GroupElement, frobenius


@dataclass(frozen=True, eq=False)
class FiniteGroupTable:
    """A finite group as a multiplication table on indices ``0..order-1``."""

    product: np.ndarray
    identity: int
    inverse: np.ndarray
    labels: tuple = ()

    @property
    def order(self):
        return len(self.product)

    def mul(self, a, b):
        return int(self.product[a, b])

    def inv(self, a):
        return int(self.inverse[a])

    def label(self, a):
        return self.labels[a] if self.labels else a

    def index(self, label):
        return self.labels.index(label)

    def elements(self):
        return range(self.order)

    def is_abelian(self):
        return bool(np.array_equal(self.product, self.product.T))

    def check_axioms(self):
        n = self.order
        p = self.product
        e = self.identity
        r = np.arange(n)
        if not (np.array_equal(p[e], r) and np.array_equal(p[:, e], r)):
            raise ValueError("identity law fails")
        if not (np.all(p[r, self.inverse] == e) and np.all(p[self.inverse, r] == e)):
            raise ValueError("inverse law fails")
        # (ab)c == a(bc) for all triples
        left = p[p[:, :, None], r[None, None, :]]
        right = p[r[:, None, None], p[None, :, :]]
        if not np.array_equal(left, right):
            raise ValueError("associativity fails")

    @classmethod
    def from_elements(cls, elements, op):
        elements = list(elements)
        pos = {x: i for i, x in enumerate(elements)}
        n = len(elements)
        table = np.array([[pos[op(a, b)] for b in elements] for a in elements], dtype=np.int64)
        ident = next(i for i in range(n) if np.array_equal(table[i], np.arange(n)))
        inverse = np.array([int(np.nonzero(table[i] == ident)[0][0]) for i in range(n)], dtype=np.int64)
        return cls(table, ident, inverse, tuple(elements))


def cyclic_group(n):
    return FiniteGroupTable.from_elements(range(n), lambda a, b: (a + b) % n)


def trivial_group():
    return cyclic_group(1)


def units_mod(p):
    """The automorphism group of Z_p: multiplication by each unit ``k``."""
    units = [k for k in range(1, p) if gcd(k, p) == 1]
    return FiniteGroupTable.from_elements(units, lambda a, b: (a * b) % p)


def symmetric_group(n):
    perms = list(permutations(range(n)))
    # (a * b)(i) = a(b(i))
    return FiniteGroupTable.from_elements(perms, lambda a, b: tuple(a[b[i]] for i in range(n)))


class CrossedModule:
    """Interface shared by finite and matrix-covering crossed modules."""

    finite = False

    def h_mul(self, a, b):
        raise NotImplementedError

    def h_inv(self, a):
        raise NotImplementedError

    def h_identity(self):
        raise NotImplementedError

    def g_mul(self, a, b):
        raise NotImplementedError

    def g_inv(self, a):
        raise NotImplementedError

    def g_identity(self):
        raise NotImplementedError

    def tau(self, h):
        raise NotImplementedError

    def alpha(self, g, h):
        raise NotImplementedError

    def g_distance(self, a, b):
        raise NotImplementedError

    def h_distance(self, a, b):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class FiniteCrossedModule(CrossedModule):
    H: FiniteGroupTable
    G: FiniteGroupTable
    tau_table: np.ndarray
    alpha_table: np.ndarray  # alpha_table[g, h]
    name: str = ""
    finite = True

    def __post_init__(self):
        self.check_identities()

    def h_mul(self, a, b):
        return self.H.mul(a, b)

    def h_inv(self, a):
        return self.H.inv(a)

    def h_identity(self):
        return self.H.identity

    def g_mul(self, a, b):
        return self.G.mul(a, b)

    def g_inv(self, a):
        return self.G.inv(a)

    def g_identity(self):
        return self.G.identity

    def tau(self, h):
        return int(self.tau_table[h])

    def alpha(self, g, h):
        return int(self.alpha_table[g, h])

    def g_distance(self, a, b):
        return 0.0 if a == b else np.inf

    h_distance = g_distance

    def check_identities(self):
        """Exhaustively verify the crossed-module axioms; raise ``ValueError`` on failure."""
        H, G, t, a = self.H, self.G, self.tau_table, self.alpha_table
        hs, gs = np.arange(H.order), np.arange(G.order)
        # tau is a homomorphism
        if not np.array_equal(t[H.product], G.product[t[:, None], t[None, :]]):
            raise ValueError("tau is not a homomorphism")
        # each alpha_g is a homomorphism of H
        if not np.array_equal(a[:, H.product], H.product[a[:, :, None], a[:, None, :]]):
            raise ValueError("alpha_g is not a homomorphism")
        # left action: alpha_{g'g} = alpha_{g'} o alpha_g
        if not np.array_equal(a[G.product], a[gs[:, None, None], a[None, :, :]]):
            raise ValueError("alpha is not a left action")
        if not np.array_equal(a[G.identity], hs):
            raise ValueError("alpha_e is not the identity")
        # equivariance: tau(alpha_g(h)) = g tau(h) g^-1
        lhs = t[a]
        rhs = G.product[G.product[gs[:, None], t[None, :]], G.inverse[gs][:, None]]
        if not np.array_equal(lhs, rhs):
            raise ValueError("equivariance tau(alpha_g(h)) = g tau(h) g^-1 fails")
        # Peiffer: alpha_{tau(h)}(h') = h h' h^-1
        lhs = a[t[:, None], hs[None, :]]
        rhs = H.product[H.product[hs[:, None], hs[None, :]], H.inverse[hs][:, None]]
        if not np.array_equal(lhs, rhs):
            raise ValueError("Peiffer identity fails")


def cyclic_automorphism_module(p):
    """``(Z_p, Aut(Z_p), trivial tau, natural action)``."""
    H = cyclic_group(p)
    G = units_mod(p)
    tau = np.full(p, G.identity, dtype=np.int64)
    alpha = np.array([[(G.label(g) * h) % p for h in range(p)] for g in range(G.order)], dtype=np.int64)
    return FiniteCrossedModule(H, G, tau, alpha, name=f"(Z{p}, Aut(Z{p}))")


def conjugation_module(G):
    """``(G, G, id, conjugation)``."""
    gs = np.arange(G.order)
    alpha = G.product[G.product[gs[:, None], gs[None, :]], G.inverse[gs][:, None]]
    return FiniteCrossedModule(G, G, gs.copy(), alpha, name="(G, G, id, conj)")


def trivial_action_module(H, G=None):
    """``H`` acted on trivially by ``G`` with trivial ``tau``.  ``H`` must be abelian."""
    G = G if G is not None else trivial_group()
    tau = np.full(H.order, G.identity, dtype=np.int64)
    alpha = np.tile(np.arange(H.order), (G.order, 1))
    return FiniteCrossedModule(H, G, tau, alpha, name="(H, G, triv, triv)")


class CoveringCrossedModule(CrossedModule):
    """``(cover, base, tau, alpha)`` built from a :class:`CoveringPair`."""

    def __init__(self, cp: CoveringPair):
        self.cp = cp

    def __repr__(self):
        return f"CoveringCrossedModule({self.cp!r})"

    def h_mul(self, a, b):
        return a @ b

    def h_inv(self, a):
        return a.inverse()

    def h_identity(self):
        return GroupElement(self.cp.cover, self.cp.cover.identity())

    def g_mul(self, a, b):
        return a @ b

    def g_inv(self, a):
        return a.inverse()

    def g_identity(self):
        return GroupElement(self.cp.base, self.cp.base.identity())

    def tau(self, h):
        return GroupElement(self.cp.base, np.asarray(self.cp.tau(h.matrix), dtype=self.cp.base.dtype))

    def alpha(self, g, h):
        return GroupElement(self.cp.cover, self.cp.alpha(g.matrix, h.matrix))

    def g_distance(self, a, b):
        return a.distance(b)

    def h_distance(self, a, b):
        return a.distance(b)

    def identity_errors(self, rng, samples=100):
        """Largest Peiffer and equivariance defects over random samples."""
        cp = self.cp
        peiffer = equiv = 0.0
        for _ in range(samples):
            h = cp.cover.random_element(rng)
            h2 = cp.cover.random_element(rng)
            g = cp.base.random_element(rng)
            lhs = cp.alpha(cp.tau(h), h2)
            rhs = cp.cover.mul(cp.cover.mul(h, h2), cp.cover.inv(h))
            peiffer = max(peiffer, float(cp.cover.dist(lhs, rhs)))
            lhs = cp.tau(cp.alpha(g, h))
            rhs = cp.base.mul(cp.base.mul(g, cp.tau(h)), cp.base.inv(g))
            equiv = max(equiv, float(cp.base.dist(lhs, rhs)))
        return peiffer, equiv


@dataclass(frozen=True, eq=False)
class TwoMorphism:
    """The 2-cell ``(h, g): g => tau(h) g``."""

    cm: CrossedModule = field(repr=False)
    h: object
    g: object

    @property
    def source(self):
        return self.g

    @property
    def target(self):
        return self.cm.g_mul(self.cm.tau(self.h), self.g)


def identity_cell(cm, g):
    return TwoMorphism(cm, cm.h_identity(), g)


def vertical_compose(top: TwoMorphism, bottom: TwoMorphism, tol=GROUP_TOL) -> TwoMorphism:
    """``bottom o top``; the h-part is ``bottom.h * top.h``.

    Raises :class:`SourceTargetMismatch` when ``bottom`` does not start where
    ``top`` ends (to within ``tol`` for matrix realizations).
    """
    cm = top.cm
    gap = cm.g_distance(bottom.g, top.target)
    if gap > tol:
        raise SourceTargetMismatch(f"bottom source is {gap:.3g} away from top target")
    return TwoMorphism(cm, cm.h_mul(bottom.h, top.h), top.g)


def horizontal_compose(left: TwoMorphism, right: TwoMorphism) -> TwoMorphism:
    cm = left.cm
    return TwoMorphism(cm, cm.h_mul(left.h, cm.alpha(left.g, right.h)), cm.g_mul(left.g, right.g))


def _require_finite(cm):
    if not getattr(cm, "finite", False):
        raise NotFinite(f"{cm!r} is not a finite crossed module")


def alpha_conjugacy_classes(cm):
    """Orbits of ``G`` acting on ``H``, as a sorted list of frozensets."""
    _require_finite(cm)
    seen = set()
    classes = []
    for h in cm.H.elements():
        if h in seen:
            continue
        orbit = frozenset(int(cm.alpha_table[g, h]) for g in cm.G.elements())
        seen |= orbit
        classes.append(orbit)
    return sorted(classes, key=min)


def _generated_subgroup(H, gens):
    sub = {H.identity}
    frontier = list(sub)
    gens = set(gens)
    while frontier:
        new = []
        for a in frontier:
            for b in gens:
                c = H.mul(a, b)
                if c not in sub:
                    sub.add(c)
                    new.append(c)
        frontier = new
    return frozenset(sub)


@dataclass(frozen=True, eq=False)
class ReducedGroup:
    """``H/[G,H]`` with the projection from ``H``."""

    table: FiniteGroupTable
    subgroup: frozenset
    cosets: tuple
    projection: tuple  # projection[h] = coset index

    @property
    def order(self):
        return self.table.order


def reduced_group(cm) -> ReducedGroup:
    _require_finite(cm)
    H = cm.H
    gens = {H.mul(H.inv(h), cm.alpha(g, h)) for g in cm.G.elements() for h in H.elements()}
    sub = _generated_subgroup(H, gens)
    for h in H.elements():
        if {H.mul(H.mul(h, k), H.inv(h)) for k in sub} != set(sub):
            raise ValueError("[G,H] is not normal in H")
    cosets = []
    proj = [None] * H.order
    for h in H.elements():
        if proj[h] is None:
            coset = frozenset(H.mul(h, k) for k in sub)
            for x in coset:
                proj[x] = len(cosets)
            cosets.append(coset)
    reps = [min(c) for c in cosets]
    product = np.array([[proj[H.mul(a, b)] for b in reps] for a in reps], dtype=np.int64)
    inverse = np.array([proj[H.inv(a)] for a in reps], dtype=np.int64)
    table = FiniteGroupTable(product, proj[H.identity], inverse, tuple(tuple(sorted(H.label(x) for x in c)) for c in cosets))
    table.check_axioms()
    return ReducedGroup(table, sub, tuple(cosets), tuple(proj))


def class_map(cm):
    """The canonical map from alpha-classes to the reduced group.

    Returns ``(mapping, well_defined, surjective, injective)`` where ``mapping``
    sends each class to the coset index of its elements.
    """
    classes = alpha_conjugacy_classes(cm)
    red = reduced_group(cm)
    mapping = {}
    well_defined = True
    for c in classes:
        images = {red.projection[h] for h in c}
        well_defined &= len(images) == 1
        mapping[c] = min(images)
    surjective = set(mapping.values()) == set(range(red.order))
    injective = len(set(mapping.values())) == len(classes)
    return mapping, well_defined, surjective, injective


def inv_alpha(cm):
    """Elements of ``H`` fixed by every ``alpha_g``; checked to be a central subgroup."""
    _require_finite(cm)
    H = cm.H
    fixed = frozenset(h for h in H.elements() if all(cm.alpha(g, h) == h for g in cm.G.elements()))
    if H.identity not in fixed:
        raise ValueError("identity is not alpha-invariant")
    if any(H.mul(a, b) not in fixed for a in fixed for b in fixed):
        raise ValueError("Inv(alpha) is not closed")
    if any(H.mul(a, h) != H.mul(h, a) for a in fixed for h in H.elements()):
        raise ValueError("Inv(alpha) is not central")
    return fixed


@dataclass(frozen=True)
class KernelReport:
    elements: object  # frozenset for finite modules, liegroups.Kernel for coverings
    central: bool
    max_commutator: float


def ker_tau(cm, rng=None, samples=100) -> KernelReport:
    """Kernel of ``tau`` with a centrality check.

    Finite modules are checked exhaustively; coverings report their symbolic
    kernel and test commutators against ``samples`` random cover elements.
    """
    if getattr(cm, "finite", False):
        H = cm.H
        ker = frozenset(h for h in H.elements() if cm.tau(h) == cm.G.identity)
        central = all(H.mul(k, h) == H.mul(h, k) for k in ker for h in H.elements())
        return KernelReport(ker, central, 0.0 if central else np.inf)
    cp = cm.cp
    rng = rng if rng is not None else np.random.default_rng(0)
    worst = 0.0
    for k, z in cp.kernel.elements(radius=2):
        if cp.base.dist(cp.tau(z), cp.base.identity()) > GROUP_TOL:
            raise ValueError(f"kernel element {k} does not map to the identity")
        for _ in range(samples):
            h = cp.cover.random_element(rng)
            c = cp.cover.mul(cp.cover.mul(z, h), cp.cover.mul(cp.cover.inv(z), cp.cover.inv(h)))
            worst = max(worst, float(frobenius(c - cp.cover.identity())))
    return KernelReport(cp.kernel, worst <= 1e-10, worst)


def interchange_violations(cm):
    """Count compatible quadruples of 2-cells violating the interchange law.

    For finite modules every quadruple is enumerated:
    ``(b o_v a) o_h (b' o_v a') == (b o_h b') o_v (a o_h a')``.
    """
    _require_finite(cm)
    H, G = cm.H, cm.G
    columns = []
    for g in G.elements():
        for h1 in H.elements():
            a = TwoMorphism(cm, h1, g)
            t = a.target
            for h2 in H.elements():
                columns.append((a, TwoMorphism(cm, h2, t)))
    bad = 0
    for a, b in columns:
        ba = vertical_compose(a, b)
        for a2, b2 in columns:
            lhs = horizontal_compose(ba, vertical_compose(a2, b2))
            rhs = vertical_compose(horizontal_compose(a, a2), horizontal_compose(b, b2))
            if lhs.h != rhs.h or lhs.g != rhs.g:
                bad += 1
    return bad
