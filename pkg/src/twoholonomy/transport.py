"""Path-ordered exponentials by midpoint product integration.

Transport along a path solves ``dK/dt = K A(gamma'(t))`` with ``K(0) = e``, so
the factor for a later stretch of the path multiplies on the right.  With this
ordering a gauge transformation ``A -> Ad_h A - (dh) h^-1`` changes transport
from ``x`` to ``y`` into ``h(x) K h(y)^-1``, and concatenation is
``K(p then q) = K(p) K(q)``.

Each cell ``[t_j, t_{j+1}]`` contributes ``exp(A_theta(mid) d theta + A_phi(mid) d phi)``
with the chord increments ``d theta``, ``d phi`` of the cell, which is a
second-order scheme.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotConverged
from .geometry import Path, latitude_loop
from .liegroups import GroupElement, frobenius

CHUNK_CELLS = 1 << 14


@dataclass(frozen=True)
class TransportConfig:
    """Resolution and accuracy of product integration.

    ``steps`` is the partition count of the returned value; coarser levels
    certify it (see :func:`refine`), and if they disagree by more than
    ``tolerance`` the count doubles up to ``max_doublings`` times.
    """

    steps: int = 512
    tolerance: float = 1e-8
    richardson: bool = True
    max_doublings: int = 4

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 8:
            raise ValueError(f"steps must be an integer >= 8, got {self.steps!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


def partition(breaks, m):
    """``m + 1`` nodes on ``[0, 1]`` containing every break, steps split by piece length."""
    breaks = np.asarray(breaks, float)
    lengths = np.diff(breaks)
    if m < len(lengths):
        raise ValueError(f"{m} steps cannot cover {len(lengths)} pieces")
    raw = lengths * m
    counts = np.maximum(np.floor(raw).astype(int), 1)
    while counts.sum() < m:
        counts[np.argmax(raw - counts)] += 1
    while counts.sum() > m:
        i = np.argmax(np.where(counts > 1, counts - raw, -np.inf))
        counts[i] -= 1
    nodes = [np.linspace(a, b, c, endpoint=False) for a, b, c in zip(breaks[:-1], breaks[1:], counts)]
    return np.concatenate(nodes + [[1.0]])


def ordered_product(group, factors):
    """``f_0 f_1 ... f_{m-1}`` along axis ``-3``, by pairwise tree reduction."""
    f = np.asarray(factors)
    while f.shape[-3] > 1:
        if f.shape[-3] % 2:
            pad = group.identity(f.shape[:-3] + (1,))
            f = np.concatenate([f, pad.astype(f.dtype)], axis=-3)
        f = group.mul(f[..., 0::2, :, :], f[..., 1::2, :, :])
    return f[..., 0, :, :]


def cell_generators(conn, patch, theta, phi):
    """Cell exponents from node/midpoint samples.

    ``theta``, ``phi`` have ``2m + 1`` entries on the last axis, alternating
    nodes and cell midpoints.
    """
    conn.cover.require(patch, theta, "path")
    at, ap = conn.a(patch, theta[..., 1::2], phi[..., 1::2])
    dth = np.diff(theta[..., 0::2], axis=-1)[..., None, None]
    dph = np.diff(phi[..., 0::2], axis=-1)[..., None, None]
    return at * dth + ap * dph


def refined_nodes(nodes):
    """Interleave nodes with midpoints: ``2m + 1`` parameter values."""
    out = np.empty(2 * len(nodes) - 1)
    out[0::2] = nodes
    out[1::2] = 0.5 * (nodes[:-1] + nodes[1:])
    return out


def product_integral(conn, gens):
    """Ordered product of ``exp(gens)`` along axis ``-3``.

    For connections with commuting values this is the exponential of the sum.
    """
    if conn.abelian:
        return conn.base.exp(gens.sum(axis=-3))
    return ordered_product(conn.base, conn.base.exp(gens))


def transport_fixed(conn, patch, path: Path, m):
    """Transport matrix at exactly ``m`` cells (no refinement)."""
    t = refined_nodes(partition(path.breaks, m))
    theta, phi = path.eval(t)
    return product_integral(conn, cell_generators(conn, patch, theta, phi))


def bigon_transports(conn, patch, bigon, s, m):
    """Transport matrices along ``t -> bigon(t, s_i)`` for every ``s_i``, at ``m`` cells."""
    s = np.atleast_1d(np.asarray(s, float))
    t = refined_nodes(partition(bigon.t_breaks, m))
    size = conn.base.size
    out = np.empty((len(s), size, size), dtype=conn.base.dtype)
    chunk = max(1, CHUNK_CELLS // m)
    for i in range(0, len(s), chunk):
        theta, phi = bigon.eval(t[None, :], s[i : i + chunk, None])
        gens = cell_generators(conn, patch, theta, phi)
        out[i : i + chunk] = product_integral(conn, gens)
    return out


@dataclass(frozen=True)
class Refinement:
    value: np.ndarray
    steps: int
    error_estimate: float


def refine(compute, group, cfg: TransportConfig, what="transport"):
    """Value at ``cfg.steps`` cells, certified against coarser levels.

    ``compute(m)`` returns a storage array.  Plain mode compares ``X_m`` with
    ``X_{m/2}``; Richardson mode compares the extrapolants ``R_m`` and
    ``R_{m/2}`` with ``R_m = (4 X_m - X_{m/2}) / 3``, projected onto ``group``,
    and also accepts the plain criterion.  Failing both, ``m`` doubles up to
    ``cfg.max_doublings`` times.
    """
    target = cfg.steps
    lowest = target // (4 if cfg.richardson else 2)
    while lowest < 4:
        lowest *= 2
    levels = {}
    m = lowest
    history = []
    while m <= target << cfg.max_doublings:
        levels[m] = compute(m)
        if m >= target and m // 2 in levels:
            cur, prev = levels[m], levels[m // 2]
            plain = float(np.max(frobenius(cur - prev)))
            best = (cur, plain)
            if cfg.richardson and m // 4 in levels:
                r = group.project((4 * cur - prev) / 3)
                r_prev = group.project((4 * prev - levels[m // 4]) / 3)
                gap = float(np.max(frobenius(r - r_prev)))
                if gap <= cfg.tolerance or plain > cfg.tolerance:
                    best = (r, gap)
            history.append(best[1])
            if best[1] <= cfg.tolerance:
                return Refinement(best[0], m, best[1])
        m *= 2
    raise NotConverged(
        f"{what} did not reach tolerance {cfg.tolerance:g} by {m // 2} steps; "
        f"successive differences {', '.join(f'{h:.3g}' for h in history)}"
    )


def path_transport(conn, patch, path: Path, cfg: TransportConfig = TransportConfig()) -> GroupElement:
    """Converged transport along ``path`` inside chart ``patch``."""
    res = refine(lambda m: transport_fixed(conn, patch, path, m), conn.base, cfg, "path transport")
    return GroupElement(conn.base, res.value)


def to_north_frame(conn, k_south):
    """Conjugate a loop holonomy at the basepoint from the S chart to the N chart."""
    g = conn.basepoint_jump()
    base = conn.base
    return base.mul(base.mul(g, k_south), base.inv(g))


def loop_holonomy(conn, theta, cfg: TransportConfig = TransportConfig()) -> GroupElement:
    """Holonomy of the based latitude loop at ``theta``, in the N-chart frame at the basepoint.

    Loops with ``theta <= pi/2`` are computed in N; the others in S and then
    conjugated by ``g_NS`` at the basepoint.
    """
    theta = float(theta)
    if not 0.0 <= theta <= np.pi:
        raise ValueError(f"theta={theta} outside [0, pi]")
    loop = latitude_loop(conn.cover, theta)
    k = path_transport(conn, loop.patch, loop, cfg).matrix
    if loop.patch == "S":
        k = to_north_frame(conn, k)
    return GroupElement(conn.base, k)
