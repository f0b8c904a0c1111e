"""The two-chart sphere, paths and bigons in spherical coordinates.

Points are ``(theta, phi)`` with polar angle ``theta`` in ``[0, pi]`` and an
unwrapped azimuth ``phi``.  Paths and bigons are vectorized callables; they
carry the parameter values where they fail to be smooth (``breaks``) so that
quadrature nodes can be placed on them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EndpointMismatch, OutOfPatch

PATCHES = ("N", "S")
ENDPOINT_TOL = 1e-9


@dataclass(frozen=True)
class ChartPoint:
    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi):
            raise ValueError(f"theta={self.theta} outside [0, pi]")

    def xyz(self):
        return embed(self.theta, self.phi)

    def same_point(self, other, tol=ENDPOINT_TOL):
        return bool(np.linalg.norm(np.subtract(self.xyz(), other.xyz())) <= tol)


def embed(theta, phi):
    """Cartesian coordinates on the unit sphere, stacked on the last axis."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def _smooth_plateau(t, eps):
    """Monotone map of [0,1] onto itself, constant on [0,eps] and [1-eps,1]."""
    if eps <= 0:
        return t
    u = np.clip((t - eps) / (1 - 2 * eps), 0.0, 1.0)
    return u * u * u * (u * (6 * u - 15) + 10)


@dataclass(frozen=True, eq=False)
class Path:
    """A path ``[0,1] -> S^2``.

    ``fn(t)`` returns ``(theta, phi)`` arrays shaped like ``t``.  ``breaks`` is a
    sorted tuple starting at 0 and ending at 1; the path is smooth between
    consecutive breaks.  ``patch`` names the chart the path lives in, or is
    ``None`` when unspecified.
    """

    fn: object
    breaks: tuple = (0.0, 1.0)
    patch: str | None = None
    epsilon: float = 0.0

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        if np.any((t < 0) | (t > 1)):
            raise ValueError("path parameter outside [0, 1]")
        theta, phi = self.fn(_smooth_plateau(t, self.epsilon))
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        return theta, phi

    def __call__(self, t):
        theta, phi = self.eval(float(t))
        return ChartPoint(float(theta), float(phi))

    @property
    def start(self):
        return self(0.0)

    @property
    def end(self):
        return self(1.0)

    def pieces(self):
        return list(zip(self.breaks[:-1], self.breaks[1:]))

    def with_sitting_instants(self, eps):
        """The same path reparametrized to sit still on ``[0,eps]`` and ``[1-eps,1]``."""
        if not 0 <= eps < 0.5:
            raise ValueError("sitting-instant margin must lie in [0, 1/2)")
        mapped = [_invert_monotone(lambda t: _smooth_plateau(t, eps), b) for b in self.breaks[1:-1]]
        breaks = tuple(sorted(set([0.0, 1.0] + ([eps, 1 - eps] if eps > 0 else []) + mapped)))
        return Path(self.fn, breaks, self.patch, eps)

    def reparametrize(self, f, f_inv=None):
        """``t -> path(f(t))`` for a monotone bijection ``f`` of ``[0,1]``."""
        mapped = [f_inv(b) if f_inv else _invert_monotone(f, b) for b in self.breaks[1:-1]]
        breaks = (0.0,) + tuple(float(b) for b in mapped) + (1.0,)
        return Path(lambda t: self.eval(f(np.asarray(t, float))), breaks, self.patch)


def _invert_monotone(f, y, iters=80):
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def constant_path(point: ChartPoint, patch=None):
    return Path(lambda t: (np.full(np.shape(t), point.theta), np.full(np.shape(t), point.phi)), patch=patch)


def arc(theta0, phi0, theta1, phi1, patch=None):
    """Straight segment in chart coordinates."""

    def fn(t):
        t = np.asarray(t, float)
        return theta0 + (theta1 - theta0) * t, phi0 + (phi1 - phi0) * t

    return Path(fn, patch=patch)


def reverse(p: Path) -> Path:
    breaks = tuple(sorted(1.0 - b for b in p.breaks))
    return Path(lambda t: p.eval(1.0 - np.asarray(t, float)), breaks, p.patch)


def concat(p: Path, q: Path) -> Path:
    """Traverse ``p`` then ``q`` at double speed; ``p`` must end where ``q`` starts."""
    if not p.end.same_point(q.start):
        raise EndpointMismatch(f"path ends at {p.end} but the next starts at {q.start}")
    patch = p.patch if p.patch == q.patch else None

    def fn(t):
        t = np.asarray(t, float)
        first = t <= 0.5
        th1, ph1 = p.eval(np.where(first, 2 * t, 0.0))
        th2, ph2 = q.eval(np.where(first, 0.0, 2 * t - 1))
        return np.where(first, th1, th2), np.where(first, ph1, ph2)

    breaks = tuple(sorted(set([b / 2 for b in p.breaks] + [0.5 + b / 2 for b in q.breaks])))
    return Path(fn, breaks, patch)


@dataclass(frozen=True, eq=False)
class Bigon:
    """A map ``(t, s) -> S^2`` between the paths ``t -> (t, 0)`` and ``t -> (t, 1)``.

    ``t_breaks`` lists the ``t`` values where the map is not smooth in ``t``;
    ``ds`` optionally gives ``(d theta/ds, d phi/ds)`` in closed form.
    """

    fn: object
    t_breaks: tuple = (0.0, 1.0)
    patch: str | None = None
    ds: object = None
    fd_step: float = field(default=1e-6, repr=False)

    def eval(self, t, s):
        t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
        theta, phi = self.fn(t, s)
        return np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))

    def partial_s(self, t, s):
        t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
        if self.ds is not None:
            d = self.ds(t, s)
            return np.broadcast_arrays(np.asarray(d[0], float), np.asarray(d[1], float))
        h = self.fd_step
        lo = np.clip(s - h, 0.0, 1.0)
        hi = np.clip(s + h, 0.0, 1.0)
        a, b = self.eval(t, hi), self.eval(t, lo)
        return (a[0] - b[0]) / (hi - lo), (a[1] - b[1]) / (hi - lo)

    def path_at(self, s) -> Path:
        s = float(s)
        return Path(lambda t: self.eval(t, s), self.t_breaks, self.patch)

    @property
    def source(self):
        return self.path_at(0.0)

    @property
    def target(self):
        return self.path_at(1.0)


@dataclass(frozen=True)
class SphereCover:
    """Northern and southern charts overlapping in ``|theta - pi/2| < delta``."""

    delta: float = 0.2
    basepoint_phi: float = 0.0

    def __post_init__(self):
        if not 0 < self.delta < np.pi / 2:
            raise ValueError("overlap half-width must lie in (0, pi/2)")

    @property
    def basepoint(self):
        return ChartPoint(np.pi / 2, self.basepoint_phi)

    def bounds(self, patch):
        if patch == "N":
            return 0.0, np.pi / 2 + self.delta
        if patch == "S":
            return np.pi / 2 - self.delta, np.pi
        raise ValueError(f"unknown patch {patch!r}")

    def contains(self, patch, theta):
        lo, hi = self.bounds(patch)
        theta = np.asarray(theta)
        # the pole belongs to its own chart; the far edge is open
        if patch == "N":
            return (theta >= lo) & (theta < hi)
        return (theta > lo) & (theta <= hi)

    def in_overlap(self, theta):
        return np.abs(np.asarray(theta) - np.pi / 2) < self.delta

    def require(self, patch, theta, what="point"):
        if not np.all(self.contains(patch, theta)):
            bad = np.asarray(theta)[~self.contains(patch, theta)]
            raise OutOfPatch(f"{what} leaves patch {patch}: theta={float(bad.flat[0]):.6g}")

    def patch_for(self, theta):
        return "N" if theta <= np.pi / 2 else "S"


# loops based at the basepoint: down the meridian, once around the latitude, back up
LOOP_BREAKS = (0.0, 0.25, 0.75, 1.0)


def _loop_eval(theta_of, phi0, t, s):
    """Chart coordinates of the based latitude loop at polar angle ``theta_of(s)``."""
    theta = theta_of(s)
    down = np.clip(4 * t, 0.0, 1.0)
    around = np.clip(2 * (t - 0.25), 0.0, 1.0)
    up = np.clip(4 * (t - 0.75), 0.0, 1.0)
    th = np.pi / 2 + (theta - np.pi / 2) * (down - up)
    ph = phi0 + 2 * np.pi * around
    return th, ph


def _loop_ds(dtheta_ds, t):
    down = np.clip(4 * t, 0.0, 1.0)
    up = np.clip(4 * (t - 0.75), 0.0, 1.0)
    return dtheta_ds * (down - up), np.zeros_like(t)


def latitude_loop(cover: SphereCover, theta) -> Path:
    """The loop at the basepoint going once counterclockwise around latitude ``theta``."""
    theta = float(theta)
    phi0 = cover.basepoint_phi
    return Path(
        lambda t: _loop_eval(lambda s: theta, phi0, np.asarray(t, float), 0.0),
        LOOP_BREAKS,
        cover.patch_for(theta),
    )


def loop_family(cover: SphereCover, theta_of, dtheta_of, patch) -> Bigon:
    """Bigon ``(t, s) -> latitude_loop(theta_of(s))(t)``."""
    phi0 = cover.basepoint_phi
    return Bigon(
        lambda t, s: _loop_eval(theta_of, phi0, t, s),
        LOOP_BREAKS,
        patch,
        ds=lambda t, s: _loop_ds(dtheta_of(s), t),
    )


def monopole_bigons(cover: SphereCover):
    """``(sigma_N, sigma_S, equator)``.

    ``sigma_N`` sweeps the northern hemisphere from the trivial loop at the
    basepoint to the equator loop; ``sigma_S`` continues from the equator to
    the trivial loop at the south pole.
    """
    half = np.pi / 2
    sigma_n = loop_family(cover, lambda s: half * s, lambda s: np.full_like(s, half), "N")
    sigma_s = loop_family(cover, lambda s: half + half * s, lambda s: np.full_like(s, half), "S")
    return sigma_n, sigma_s, latitude_loop(cover, half)


def sphere_family(cover: SphereCover) -> Bigon:
    """The whole sweep ``theta = pi s``, without a chart."""
    return loop_family(cover, lambda s: np.pi * s, lambda s: np.full_like(s, np.pi), None)


def bigon_area(bigon: Bigon, nodes=256):
    """Signed area ``int sin(theta) d theta ^ d phi`` pulled back along ``bigon``.

    Gauss-Legendre nodes in ``s`` and on every smooth ``t`` piece.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    s = 0.5 * (x + 1)
    ws = 0.5 * w
    total = 0.0
    for a, b in zip(bigon.t_breaks[:-1], bigon.t_breaks[1:]):
        t = a + (b - a) * s
        wt = (b - a) * ws
        tt, ss = np.meshgrid(t, s, indexing="ij")
        theta, phi = bigon.eval(tt, ss)
        dth_s, dph_s = bigon.partial_s(tt, ss)
        h = 1e-6 * (b - a)
        th_p, ph_p = bigon.eval(np.clip(tt + h, a, b), ss)
        th_m, ph_m = bigon.eval(np.clip(tt - h, a, b), ss)
        span = np.clip(tt + h, a, b) - np.clip(tt - h, a, b)
        dth_t, dph_t = (th_p - th_m) / span, (ph_p - ph_m) / span
        jac = dth_s * dph_t - dph_s * dth_t
        total += float(np.einsum("i,j,ij->", wt, ws, np.sin(theta) * jac))
    return total
