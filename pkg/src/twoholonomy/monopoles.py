"""Catalog of monopole configurations on the sphere.

Every family has the same shape: for a base-algebra generator ``c``

    A_N = (c/2)(1 - cos theta) d phi,   A_S = -(c/2)(1 + cos theta) d phi,
    g_NS = exp(-c phi),                 B = dtau^-1((c/2) sin theta).

``c`` is ``-i n`` for U(1), ``J_3`` for SO(3), ``k X`` with
``X = (i/n) diag(1, ..., 1, 1 - n)`` for SU(n)/Z(n), and ``-i k I`` for U(n).
Fluxes follow the counterclockwise orientation of ``phi``.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .connection import LocalConnection, check_connection
from .errors import UnsupportedFamily
from .geometry import SphereCover
from .liegroups import J, RealToU1, SU2ToSO3, SUnToPSUn, SUnxRToUn
from .surface import compare_methods, glued_sphere_integral, surface_holonomy_lift
from .transport import TransportConfig

FAMILIES = ("U1", "SO3", "SUnZn", "Un")


def x_generator(n):
    """``(i/n) diag(1, ..., 1, 1 - n)``."""
    d = np.ones(n)
    d[-1] = 1 - n
    return np.diag(1j * d / n)


@dataclass(frozen=True, eq=False)
class MonopoleConfig:
    family: str
    n: int
    charge: int
    connection: LocalConnection = field(repr=False)
    covering: object = field(repr=False)
    generator: np.ndarray = field(repr=False)
    expected_index: int = 0
    notes: tuple = ()

    @property
    def expected_flux(self):
        """Kernel element predicted in closed form."""
        return self.covering.kernel.element(self.expected_index)


def monopole_connection(covering, c, cover=None, name=""):
    """The connection with generator ``c`` in the base algebra."""
    cover = cover if cover is not None else SphereCover()
    base = covering.base
    c = np.asarray(c, dtype=base.dtype)
    zero = np.zeros_like(c)
    b0 = covering.dtau_inv(c / 2)

    def shape(theta, phi):
        return np.broadcast_shapes(np.shape(theta), np.shape(phi))

    def a_north(theta, phi):
        f = 0.5 * (1 - np.cos(theta))
        return np.broadcast_to(zero, shape(theta, phi) + c.shape), f[..., None, None] * c

    def a_south(theta, phi):
        f = -0.5 * (1 + np.cos(theta))
        return np.broadcast_to(zero, shape(theta, phi) + c.shape), f[..., None, None] * c

    def b(theta, phi):
        f = np.broadcast_to(np.sin(theta), shape(theta, phi))
        return f[..., None, None] * b0

    def transition(theta, phi):
        ph = np.broadcast_to(np.asarray(phi, float), shape(theta, phi))
        return base.exp(-ph[..., None, None] * c)

    return LocalConnection(
        covering, {"N": a_north, "S": a_south}, {"N": b, "S": b}, transition, cover, name, commuting=True
    )


def make_config(family, n=None, charge=1, cover=None, check=True) -> MonopoleConfig:
    """Build a catalog configuration.

    ``n`` is the matrix size for ``SUnZn`` (2, 3, 4) and ``Un`` (1, 2, 3) and is
    ignored otherwise.  ``SUnZn`` charges are reduced mod ``n``.
    """
    key = str(family).upper().replace("(", "").replace(")", "")
    aliases = {"U1": "U1", "SO3": "SO3", "SUNZN": "SUnZn", "UN": "Un"}
    if key not in aliases:
        raise UnsupportedFamily(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    family = aliases[key]
    if int(charge) != charge:
        raise UnsupportedFamily(f"charge must be an integer, got {charge!r}")
    charge = int(charge)
    notes = []
    if family == "U1":
        cp, size, c = RealToU1(), 1, np.array([[-1j * charge]])
        expected = -charge
    elif family == "SO3":
        if charge != 1:
            raise UnsupportedFamily("the SO3 monopole has a single configuration (charge 1)")
        cp, size, c = SU2ToSO3(), 3, J[2]
        expected = 1
    elif family == "SUnZn":
        size = 3 if n is None else int(n)
        if size not in (2, 3, 4):
            raise UnsupportedFamily(f"SUnZn needs n in {{2, 3, 4}}, got {n}")
        if not 0 <= charge < size:
            notes.append(f"charge {charge} reduced mod {size} to {charge % size}")
            charge %= size
        cp, c = SUnToPSUn(size), charge * x_generator(size)
        expected = charge
    else:
        size = 2 if n is None else int(n)
        if size not in (1, 2, 3):
            raise UnsupportedFamily(f"Un needs n in {{1, 2, 3}}, got {n}")
        cp, c = SUnxRToUn(size), -1j * charge * np.eye(size)
        expected = -charge * size
    name = family if family in ("U1", "SO3") else f"{family}({size})"
    conn = monopole_connection(cp, c, cover, f"{name} charge {charge}")
    if check:
        check_connection(conn)
    return MonopoleConfig(family, size, charge, conn, cp, np.asarray(c), expected, tuple(notes))


def catalog():
    """Every configuration named in the acceptance table."""
    out = [make_config("U1", charge=k) for k in range(-3, 4)]
    out.append(make_config("SO3"))
    out += [make_config("SUnZn", n, k) for n in (2, 3, 4) for k in range(n)]
    out += [make_config("Un", n, k) for n in (1, 2, 3) for k in range(-2, 3)]
    return out


def _clean(x, digits=12):
    return float(np.round(x, digits)) + 0.0


def matrix_rows(m):
    """Row-major ``[re, im]`` pairs."""
    m = np.asarray(m)
    return [[[_clean(z.real), _clean(z.imag)] for z in row] for row in m]


def flux_label(cp, index):
    """Short human-readable name of a kernel element."""
    if isinstance(cp, RealToU1):
        return str(index)
    if isinstance(cp, SU2ToSO3):
        return "-I2" if index % 2 else "I2"
    if isinstance(cp, SUnToPSUn):
        k = index % cp.n
        return f"I{cp.n}" if k == 0 else f"exp(2 pi i {k}/{cp.n}) I{cp.n}"
    n = cp.n
    if index % n == 0:
        return f"(I{n}, {index // n})"
    return f"(exp(-2 pi i {index}/{n}) I{n}, {index}/{n})"


def flux_payload(cp, index):
    """``{kind, value, label}`` for the kernel element with the given index."""
    z = cp.kernel.element(index)
    if isinstance(cp, RealToU1):
        return {"kind": "integer", "value": int(index), "label": flux_label(cp, index)}
    if isinstance(cp, SUnxRToUn):
        a, t = cp.cover.split(z)
        t = int(round(float(t))) if index % cp.n == 0 else _clean(t)
        return {"kind": "pair", "value": {"matrix": matrix_rows(a), "real": t}, "label": flux_label(cp, index)}
    return {"kind": "matrix", "value": matrix_rows(z), "label": flux_label(cp, index)}


@dataclass(frozen=True, eq=False)
class FluxReport:
    family: str
    n: int
    charge: int
    method: str
    kernel_index: int
    flux: dict
    snap_distance: float
    samples: int
    tolerance: float
    agree: bool | None
    elapsed_ms: float
    notes: tuple = ()
    expected_index: int | None = None

    @property
    def matches_expected(self):
        return self.expected_index is None or self.kernel_index == self.expected_index

    def to_dict(self):
        return {
            "family": self.family,
            "n": self.n,
            "charge": self.charge,
            "method": self.method,
            "flux": self.flux,
            "snap_distance": self.snap_distance,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "agree": self.agree,
            "elapsed_ms": self.elapsed_ms,
            "notes": list(self.notes),
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def magnetic_flux(config: MonopoleConfig, method="both", cfg=None, connection=None) -> FluxReport:
    """Surface holonomy around the monopole, as a kernel element.

    ``method`` is ``"lift"``, ``"integral"`` or ``"both"``; with ``"both"`` a
    disagreement raises :class:`MethodDisagreement`.  ``connection`` overrides
    the configuration's own (for gauge-transformed data).
    """
    cfg = cfg if cfg is not None else TransportConfig()
    conn = connection if connection is not None else config.connection
    start = time.perf_counter()
    agree = None
    if method == "both":
        cmp = compare_methods(conn, cfg)
        index, dist, agree = cmp.kernel_index, cmp.snap_distance, True
    elif method == "integral":
        r = glued_sphere_integral(conn, cfg)
        index, dist = r.kernel_index, r.snap_distance
    elif method == "lift":
        r = surface_holonomy_lift(conn, cfg)
        index, dist = r.kernel_index, r.snap_distance
    else:
        raise ValueError(f"unknown method {method!r}")
    elapsed = (time.perf_counter() - start) * 1e3
    return FluxReport(
        config.family,
        config.n,
        config.charge,
        method,
        index,
        flux_payload(config.covering, index),
        float(f"{dist:.3e}"),
        cfg.steps,
        cfg.tolerance,
        agree,
        round(elapsed, 1),
        config.notes,
        config.expected_index,
    )


def invariance_defect(config: MonopoleConfig, index, rng, samples=20):
    """Largest ``|alpha_g(flux) - flux|`` over random base elements ``g``."""
    cp = config.covering
    z = cp.kernel.element(index)
    worst = 0.0
    for _ in range(samples):
        g = cp.base.random_element(rng)
        worst = max(worst, float(cp.cover.dist(cp.alpha(g, z), z)))
    return worst
