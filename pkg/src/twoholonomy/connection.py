"""Local connection data ``(A, B, g)`` on the two-chart sphere.

``A[patch](theta, phi)`` returns the ``d theta`` and ``d phi`` coefficients of
the base-algebra valued 1-form, ``B[patch](theta, phi)`` the ``d theta ^ d phi``
coefficient of the cover-algebra valued 2-form, and ``transition(theta, phi)``
the transition function ``g_NS`` on the overlap.  All callables are batched
over the shapes of their arguments.

Conventions: curvature is ``R = dA + 1/2 [A, A]`` and the charts are related by
``A_N = Ad_g(A_S) - (dg) g^-1`` with ``g = g_NS``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import OutOfPatch
from .geometry import PATCHES, SphereCover, embed
from .liegroups import CoveringPair, frobenius

FD_STEP = 1e-4
CHECK_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class LocalConnection:
    covering: CoveringPair
    A: dict
    B: dict | None
    transition: object
    cover: SphereCover = field(default_factory=SphereCover)
    name: str = ""
    # A and B take values in one abelian subalgebra, so adjoint actions among them are trivial
    commuting: bool = False

    @property
    def abelian(self):
        return self.commuting or (self.base.size == 1 and not self.base.real)

    @property
    def base(self):
        return self.covering.base

    @property
    def lie(self):
        return self.covering.cover

    def a(self, patch, theta, phi):
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        at, ap = self.A[patch](theta, phi)
        shape = theta.shape + (self.base.size, self.base.size)
        return np.broadcast_to(at, shape), np.broadcast_to(ap, shape)

    def b(self, patch, theta, phi):
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        shape = theta.shape + (self.lie.size, self.lie.size)
        if self.B is None:
            return np.zeros(shape, dtype=self.lie.dtype)
        return np.broadcast_to(self.B[patch](theta, phi), shape)

    def g(self, theta, phi):
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        shape = theta.shape + (self.base.size, self.base.size)
        return np.broadcast_to(self.transition(theta, phi), shape)

    def basepoint_jump(self):
        """``g_NS`` at the basepoint."""
        bp = self.cover.basepoint
        return self.g(bp.theta, bp.phi)


def _require_interior(conn, patch, theta, h):
    lo, hi = conn.cover.bounds(patch)
    theta = np.asarray(theta)
    # stencils may touch the pole of their own chart but not the open overlap edge
    if patch == "N":
        ok = (theta - h >= lo) & (theta + h < hi)
    else:
        ok = (theta - h > lo) & (theta + h <= hi)
    if not np.all(ok):
        raise OutOfPatch(f"finite differences at theta={float(theta[~ok].flat[0]):.6g} leave patch {patch}")


def curvature(conn: LocalConnection, patch, theta, phi, h=FD_STEP):
    """``d theta ^ d phi`` coefficient of ``dA + 1/2 [A, A]`` by central differences.

    ``d_theta A_phi - d_phi A_theta + [A_theta, A_phi]``.
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    _require_interior(conn, patch, theta, h)
    _, ap_plus = conn.a(patch, theta + h, phi)
    _, ap_minus = conn.a(patch, theta - h, phi)
    at_plus, _ = conn.a(patch, theta, phi + h)
    at_minus, _ = conn.a(patch, theta, phi - h)
    at, ap = conn.a(patch, theta, phi)
    return (ap_plus - ap_minus) / (2 * h) - (at_plus - at_minus) / (2 * h) + conn.base.bracket(at, ap)


def b_from_curvature(conn: LocalConnection, h=FD_STEP) -> LocalConnection:
    """Fill ``B`` with ``dtau^-1`` of the finite-difference curvature."""
    cp = conn.covering

    def make(patch):
        return lambda theta, phi: cp.dtau_inv(curvature(conn, patch, theta, phi, h))

    return replace(conn, B={p: make(p) for p in PATCHES})


def check_grid(conn, patch, n=32, h=FD_STEP):
    """Cell-centred ``n x n`` grid strictly inside ``patch`` (clear of the poles)."""
    lo, hi = conn.cover.bounds(patch)
    lo, hi = lo + 2 * h, hi - 2 * h
    theta = lo + (np.arange(n) + 0.5) * (hi - lo) / n
    phi = 2 * np.pi * (np.arange(n) + 0.5) / n
    return np.meshgrid(theta, phi, indexing="ij")


def structural_error(conn: LocalConnection, patch=None, n=32, h=FD_STEP):
    """Largest ``|dtau(B) - (dA + 1/2 [A, A])|`` over check grids."""
    worst = 0.0
    for p in PATCHES if patch is None else (patch,):
        theta, phi = check_grid(conn, p, n, h)
        r = curvature(conn, p, theta, phi, h)
        tb = conn.covering.dtau(conn.b(p, theta, phi))
        worst = max(worst, float(np.max(frobenius(tb - r))))
    return worst


def overlap_points(cover: SphereCover, n=64):
    """``n`` points spread over the overlap band, away from its edges."""
    k = np.arange(n)
    theta = np.pi / 2 + 0.8 * cover.delta * np.cos(np.pi * (k + 0.5) / n * 7)
    phi = 2 * np.pi * (k + 0.5) / n
    return theta, phi


def maurer_cartan(fn, group, theta, phi, h=FD_STEP):
    """``(d_theta f) f^-1`` and ``(d_phi f) f^-1`` by central differences."""
    f = fn(theta, phi)
    finv = group.inv(f)
    dt = (fn(theta + h, phi) - fn(theta - h, phi)) / (2 * h)
    dp = (fn(theta, phi + h) - fn(theta, phi - h)) / (2 * h)
    return dt @ finv, dp @ finv


def transition_error(conn: LocalConnection, n=64, h=FD_STEP):
    """Largest componentwise defect of ``A_N = Ad_g(A_S) - (dg) g^-1`` on the overlap."""
    theta, phi = overlap_points(conn.cover, n)
    g = conn.g(theta, phi)
    mt, mp = maurer_cartan(conn.g, conn.base, theta, phi, h)
    nt, np_ = conn.a("N", theta, phi)
    st, sp = conn.a("S", theta, phi)
    et = frobenius(nt - (conn.base.adjoint(g, st) - mt))
    ep = frobenius(np_ - (conn.base.adjoint(g, sp) - mp))
    return float(max(np.max(et), np.max(ep)))


def check_connection(conn: LocalConnection, n_grid=32, n_overlap=64, tol=CHECK_TOL):
    """``(structural, transition)`` defects; raises ``ValueError`` above ``tol``."""
    s = structural_error(conn, n=n_grid)
    t = transition_error(conn, n=n_overlap)
    if s > tol or t > tol:
        raise ValueError(f"connection {conn.name!r} fails checks: structural {s:.3g}, transition {t:.3g}")
    return s, t


def gauge_transform(conn: LocalConnection, h: dict, step=FD_STEP) -> LocalConnection:
    """Transform by ``h[patch](theta, phi)`` with values in the base group.

    ``A' = Ad_h(A) - (dh) h^-1``, ``B' = alpha_h(B)`` (the adjoint action of a
    lift of ``h``), and ``g' = h_N g h_S^-1``.
    """
    base, cp = conn.base, conn.covering

    def new_a(patch):
        def fn(theta, phi):
            hv = h[patch](theta, phi)
            at, ap = conn.a(patch, theta, phi)
            mt, mp = maurer_cartan(h[patch], base, theta, phi, step)
            return base.adjoint(hv, at) - mt, base.adjoint(hv, ap) - mp

        return fn

    def new_b(patch):
        def fn(theta, phi):
            return cp.alpha_alg(h[patch](theta, phi), conn.b(patch, theta, phi))

        return fn

    def new_g(theta, phi):
        return base.mul(base.mul(h["N"](theta, phi), conn.g(theta, phi)), base.inv(h["S"](theta, phi)))

    return LocalConnection(
        cp,
        {p: new_a(p) for p in PATCHES},
        {p: new_b(p) for p in PATCHES},
        new_g,
        conn.cover,
        f"{conn.name} gauged" if conn.name else "gauged",
    )


def identity_gauge(group):
    return lambda theta, phi: group.identity(np.broadcast_shapes(np.shape(theta), np.shape(phi)))


def _monomials(xyz, degree):
    x, y, z = np.moveaxis(xyz, -1, 0)
    out = [np.ones_like(x)]
    for d in range(1, degree + 1):
        for i in range(d + 1):
            for j in range(d + 1 - i):
                out.append(x**i * y**j * z ** (d - i - j))
    return np.stack(out, axis=-1)


def random_gauge(group, rng, degree=2, scale=0.6):
    """Smooth random gauge function ``p -> exp(sum_a c_a(p) T_a)``.

    The ``c_a`` are random polynomials in the Cartesian coordinates of ``p``, so
    the function is smooth on the whole sphere, poles included.
    """
    basis = group.basis()
    n_mono = _monomials(np.zeros((1, 3)), degree).shape[-1]
    coeffs = rng.normal(scale=scale / np.sqrt(n_mono), size=(n_mono, len(basis)))

    def fn(theta, phi):
        mono = _monomials(embed(theta, phi), degree)
        c = mono @ coeffs
        return group.exp(np.tensordot(c, basis, axes=1))

    return fn


def random_gauge_pair(group, rng, **kw):
    return {p: random_gauge(group, rng, **kw) for p in PATCHES}
