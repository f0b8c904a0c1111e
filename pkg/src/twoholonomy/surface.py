"""Surface holonomy of a bigon, by two independent methods.

Integral method.  For a bigon ``(t, s) -> Sigma(t, s)`` in one chart let
``K_s(t -> 1)`` be transport along the remainder of the path ``Sigma(., s)``
and ``R_st`` the pulled-back curvature ``R(d_s, d_t)``.  Varying ``s`` gives

    dK_s/ds = K_s tau'(V(s)),   V(s) = tau'^-1 int_0^1 Ad_{K_s(t -> 1)^-1} R_st dt,

so with ``H = Pexp(int_0^1 V ds)`` (later ``s`` on the right) the element
``k = alpha_{K_0}(H)`` of the cover satisfies ``tau(k) K_0 = K_1``.  The
one-form ``A_Sigma = -V ds`` is what :func:`a_sigma` returns.

Lift method.  The loop holonomies ``s -> hol(gamma_theta(s))`` trace a closed
path in the base group starting and ending at ``e``.  Lifting it continuously
into the cover from the identity ends at an element of ``ker tau``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .crossed import CoveringCrossedModule, TwoMorphism, vertical_compose
from .errors import AmbiguousLift, MethodDisagreement, NotConverged, StepTooLarge
from .geometry import Bigon, monopole_bigons, sphere_family
from .liegroups import GroupElement, _nearest_preimage
from .transport import (
    CHUNK_CELLS,
    TransportConfig,
    bigon_transports,
    ordered_product,
    partition,
    path_transport,
    refine,
    to_north_frame,
)

SNAP_TOL = 1e-4
COMPOSE_TOL = 1e-6
MAX_LIFT_GAP = 0.5


@dataclass(frozen=True, eq=False)
class SurfaceTransportResult:
    """A cover element with the data that certifies it.

    ``steps`` is the resolution reached (cells per direction for the integral,
    loop samples for the lift).  ``kernel_index`` and ``snap_distance`` are set
    for results that should lie in ``ker tau``.
    """

    h: GroupElement
    method: str
    source_holonomy: GroupElement
    target_holonomy: GroupElement | None = None
    steps: int = 0
    error_estimate: float = 0.0
    kernel_index: int | None = None
    snap_distance: float | None = None
    covering: object = field(default=None, repr=False)

    @property
    def matching_error(self):
        """Distance between ``tau(h) source`` and ``target``."""
        if self.target_holonomy is None or self.covering is None:
            return None
        base = self.source_holonomy.group
        lhs = base.mul(self.covering.tau(self.h.matrix), self.source_holonomy.matrix)
        return float(base.dist(lhs, self.target_holonomy.matrix))


def snap(cp, h):
    """Nearest kernel element: ``(index, distance)``."""
    k, d = cp.kernel.nearest(np.asarray(h))
    return int(k), float(d)


def _inner_integrals(conn, patch, bigon: Bigon, s, m):
    """``V(s_i)`` in the cover algebra for each ``s_i``, with ``m`` cells in ``t``."""
    base, cp = conn.base, conn.covering
    nodes = partition(bigon.t_breaks, m)
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    quarter = 0.5 * (mids + nodes[1:])
    s = np.atleast_1d(np.asarray(s, float))
    out = []
    chunk = max(1, CHUNK_CELLS // m)
    for i in range(0, len(s), chunk):
        sc = s[i : i + chunk, None]
        th_n, ph_n = bigon.eval(nodes[None, :], sc)
        th_m, ph_m = bigon.eval(mids[None, :], sc)
        th_q, ph_q = bigon.eval(quarter[None, :], sc)
        conn.cover.require(patch, th_n, "bigon")
        conn.cover.require(patch, th_m, "bigon")
        # full cells and the half cells from each midpoint to the next node
        # curvature 2-form on (d_s, d_t) integrated over each cell
        dth_s, dph_s = bigon.partial_s(mids[None, :], sc)
        area = dth_s * np.diff(ph_n, axis=-1) - dph_s * np.diff(th_n, axis=-1)
        b = conn.b(patch, th_m, ph_m)
        if conn.abelian:
            # every adjoint action below is the identity, so tau' and its inverse cancel
            flat = b.reshape(b.shape[:2] + (-1,))
            out.append((area.astype(flat.dtype)[:, None, :] @ flat)[:, 0].reshape(b.shape[:1] + b.shape[2:]))
            continue
        r = cp.dtau(b) * area[..., None, None]
        at_m, ap_m = conn.a(patch, th_m, ph_m)
        at_q, ap_q = conn.a(patch, th_q, ph_q)
        full = base.exp(at_m * np.diff(th_n, axis=-1)[..., None, None] + ap_m * np.diff(ph_n, axis=-1)[..., None, None])
        half = base.exp(at_q * (th_n[:, 1:] - th_m)[..., None, None] + ap_q * (ph_n[:, 1:] - ph_m)[..., None, None])
        suffix = base.identity((len(sc),))
        acc = np.zeros_like(r[:, 0])
        for j in range(m - 1, -1, -1):
            k = base.mul(half[:, j], suffix)
            acc = acc + base.mul(base.mul(base.inv(k), r[:, j]), k)
            suffix = base.mul(full[:, j], suffix)
        out.append(cp.dtau_inv(acc))
    return np.concatenate(out, axis=0)


def a_sigma(conn, patch, bigon: Bigon, s, t_samples=512):
    """The ``ds`` coefficient of ``A_Sigma`` at ``s``, a cover algebra element."""
    v = _inner_integrals(conn, patch, bigon, [s], t_samples)[0]
    return conn.lie.algebra_element(-v)


def _surface_fixed(conn, patch, bigon, m):
    s = (np.arange(m) + 0.5) / m
    v = _inner_integrals(conn, patch, bigon, s, m)
    return ordered_product(conn.lie, conn.lie.exp(v / m))


def surface_transport_integral(conn, patch, bigon: Bigon, cfg=TransportConfig()) -> SurfaceTransportResult:
    """``k = alpha_{K_0}(Pexp int V ds)`` for a bigon inside chart ``patch``."""
    cp = conn.covering
    res = refine(lambda m: _surface_fixed(conn, patch, bigon, m), conn.lie, cfg, "surface integral")
    src = path_transport(conn, patch, bigon.source, cfg)
    tgt = path_transport(conn, patch, bigon.target, cfg)
    k = cp.alpha(src.matrix, res.value)
    return SurfaceTransportResult(
        covering=cp,
        h=GroupElement(conn.lie, k),
        method="integral",
        source_holonomy=src,
        target_holonomy=tgt,
        steps=res.steps,
        error_estimate=res.error_estimate,
    )


def glued_sphere_integral(conn, cfg=TransportConfig()) -> SurfaceTransportResult:
    """Vertical composite of the two hemisphere integrals, in the N frame at the basepoint.

    ``Sigma_N`` is the top 2-cell ``e => hol(equator)``; ``Sigma_S``, computed in
    the S chart and moved to the N frame by ``alpha_{g_NS(basepoint)}``, is the
    bottom cell ``hol(equator) => e``.  The two must meet within
    ``max(COMPOSE_TOL, 100 * cfg.tolerance)``.
    """
    cp = conn.covering
    base = conn.base
    sigma_n, sigma_s, _ = monopole_bigons(conn.cover)
    top_r = surface_transport_integral(conn, "N", sigma_n, cfg)
    bot_r = surface_transport_integral(conn, "S", sigma_s, cfg)
    g0 = conn.basepoint_jump()
    cm = CoveringCrossedModule(cp)
    top = TwoMorphism(cm, top_r.h, top_r.source_holonomy)
    bottom_h = GroupElement(conn.lie, cp.alpha(g0, bot_r.h.matrix))
    bottom_g = GroupElement(base, to_north_frame(conn, bot_r.source_holonomy.matrix))
    tol = max(COMPOSE_TOL, 100 * cfg.tolerance)
    cell = vertical_compose(top, TwoMorphism(cm, bottom_h, bottom_g), tol=tol)
    index, dist = snap(cp, cell.h.matrix)
    target = GroupElement(base, to_north_frame(conn, bot_r.target_holonomy.matrix))
    return SurfaceTransportResult(
        covering=cp,
        h=cell.h,
        method="integral",
        source_holonomy=top_r.source_holonomy,
        target_holonomy=target,
        steps=min(top_r.steps, bot_r.steps),
        error_estimate=top_r.error_estimate + bot_r.error_estimate,
        kernel_index=index,
        snap_distance=dist,
    )


@dataclass(frozen=True, eq=False)
class LoopPath:
    """Sampled loop holonomies ``g_0 = e, ..., g_K`` in the N frame."""

    s: np.ndarray
    theta: np.ndarray
    values: np.ndarray
    max_gap: float


def holonomy_loop_path(conn, s_samples, cfg=TransportConfig(), theta_of=None) -> LoopPath:
    """Loop holonomies along the sweep ``theta = theta_of(s)`` (default ``pi s``).

    Raises :class:`StepTooLarge` if consecutive samples are farther apart than
    ``MAX_LIFT_GAP``.
    """
    if s_samples < 16:
        raise ValueError("need at least 16 samples")
    base = conn.base
    s = np.linspace(0.0, 1.0, s_samples + 1)
    theta = np.pi * s if theta_of is None else np.asarray(theta_of(s), float)
    bigon = sphere_family(conn.cover)
    srcs = theta / np.pi
    north = theta <= np.pi / 2
    values = np.empty((len(s), base.size, base.size), dtype=base.dtype)
    if north.any():
        values[north] = bigon_transports(conn, "N", bigon, srcs[north], cfg.steps)
    if (~north).any():
        values[~north] = to_north_frame(conn, bigon_transports(conn, "S", bigon, srcs[~north], cfg.steps))
    values = base.mul(values, base.inv(values[0]))
    gaps = np.atleast_1d(base.dist(values[1:], values[:-1]))
    worst = float(gaps.max())
    if worst > MAX_LIFT_GAP:
        i = int(np.argmax(gaps))
        raise StepTooLarge(f"holonomy jumps by {worst:.3g} between s={s[i]:.4g} and s={s[i + 1]:.4g}")
    return LoopPath(s, theta, values, worst)


def lift_path(cp, values):
    """Continuous lift of a sampled base path, starting at the cover identity."""
    h = cp.cover.identity()
    for g in values:
        h, _ = _nearest_preimage(cp, g, h)
    return h


def surface_holonomy_lift(conn, cfg=TransportConfig(), s_samples=None, theta_of=None) -> SurfaceTransportResult:
    """Terminal point of the lifted loop-of-holonomies path.

    The sampling doubles until the lift from every sample and the lift from
    every other sample land on the same kernel element.
    """
    cp = conn.covering
    k_samples = s_samples or cfg.steps
    problems = []
    for _ in range(cfg.max_doublings + 1):
        try:
            path = holonomy_loop_path(conn, k_samples, cfg, theta_of)
            fine = lift_path(cp, path.values)
            coarse = lift_path(cp, path.values[::2])
            i_f, d_f = snap(cp, fine)
            i_c, _ = snap(cp, coarse)
            if i_f == i_c:
                ident = GroupElement(conn.base, conn.base.identity())
                return SurfaceTransportResult(
                    covering=cp,
                    h=GroupElement(conn.lie, fine),
                    method="lift",
                    source_holonomy=ident,
                    target_holonomy=ident,
                    steps=k_samples,
                    error_estimate=d_f,
                    kernel_index=i_f,
                    snap_distance=d_f,
                )
            problems.append(f"{k_samples} samples: lifts end at kernel elements {i_f} and {i_c}")
        except (StepTooLarge, AmbiguousLift) as exc:
            problems.append(f"{k_samples} samples: {exc}")
        k_samples *= 2
    raise NotConverged("lift did not stabilise; " + "; ".join(problems))


@dataclass(frozen=True, eq=False)
class MethodComparison:
    integral: SurfaceTransportResult
    lift: SurfaceTransportResult
    kernel_index: int
    snap_distance: float

    @property
    def flux(self):
        return self.lift.h


def compare_methods(conn, cfg=TransportConfig(), lift_samples=None) -> MethodComparison:
    """Both methods; raises :class:`MethodDisagreement` unless they give one kernel element."""
    integral = glued_sphere_integral(conn, cfg)
    lift = surface_holonomy_lift(conn, cfg, lift_samples)
    if integral.snap_distance >= SNAP_TOL or integral.kernel_index != lift.kernel_index:
        raise MethodDisagreement(
            f"integral gives kernel element {integral.kernel_index} (snap distance "
            f"{integral.snap_distance:.3g}), lift gives {lift.kernel_index}",
            lift=lift,
            integral=integral,
            snap_distance=integral.snap_distance,
        )
    return MethodComparison(integral, lift, lift.kernel_index, integral.snap_distance)
