"""Matrix Lie groups, their Lie algebras and covering homomorphisms.

Every group works on *storage arrays*: complex (or real, for SO(3)) arrays of
shape ``(..., m, m)`` whose leading axes are batch axes.  Matrix groups store
their matrices directly.  The additive group of reals is a ``1 x 1`` array and
``SU(n) x R`` is stored block diagonally as ``diag(A, t)`` so that batched code
never has to special-case pairs; the group classes know how to multiply them.

:class:`GroupElement` and :class:`AlgebraElement` wrap a single storage array
together with its group for the public API.  The transport engines work on the
raw batched arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import AmbiguousLift, NumericalFailure, TagMismatch

GROUP_TOL = 1e-9
MEMBERSHIP_TOL = 1e-8
ALGEBRA_TOL = 1e-12
AMBIGUITY_MARGIN = 1e-6

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

# so(3) generators; J_i generates counterclockwise rotation about axis i
J = np.array(
    [
        [[0, 0, 0], [0, 0, -1], [0, 1, 0]],
        [[0, 0, 1], [0, 0, 0], [-1, 0, 0]],
        [[0, -1, 0], [1, 0, 0], [0, 0, 0]],
    ],
    dtype=float,
)


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def frobenius(a):
    """Frobenius norm over the last two axes."""
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=(-1, -2)))


def _expm_2x2(x):
    # exp(cI + y) = e^c (cosh(r) I + sinh(r)/r y) with y traceless, y^2 = r^2 I
    c = 0.5 * (x[..., 0, 0] + x[..., 1, 1])
    y = x - c[..., None, None] * np.eye(2)
    r2 = y[..., 0, 0] ** 2 + y[..., 0, 1] * y[..., 1, 0]
    r = np.sqrt(r2.astype(complex))
    small = np.abs(r) < 1e-4
    rs = np.where(small, 1.0, r)
    shc = np.where(small, 1 + r2 / 6 + r2**2 / 120, np.sinh(rs) / rs)
    ch = np.where(small, 1 + r2 / 2 + r2**2 / 24, np.cosh(rs))
    out = ch[..., None, None] * np.eye(2) + shc[..., None, None] * y
    return np.exp(c)[..., None, None] * out


def _expm_so3(x):
    # Rodrigues formula for real antisymmetric 3x3 matrices
    w = np.stack([x[..., 2, 1], x[..., 0, 2], x[..., 1, 0]], axis=-1)
    th2 = np.sum(w * w, axis=-1)
    th = np.sqrt(th2)
    small = th < 1e-4
    ths = np.where(small, 1.0, th)
    a = np.where(small, 1 - th2 / 6 + th2**2 / 120, np.sin(ths) / ths)
    b = np.where(small, 0.5 - th2 / 24 + th2**2 / 720, (1 - np.cos(ths)) / ths**2)
    x2 = x @ x
    return np.eye(3) + a[..., None, None] * x + b[..., None, None] * x2


def expm(x):
    """Batched matrix exponential over the last two axes.

    Closed forms are used for 1x1, diagonal, 2x2 and real antisymmetric 3x3
    input, and a Hermitian eigendecomposition for anti-Hermitian input; anything else goes through :func:`scipy.linalg.expm`.
    """
    x = np.asarray(x)
    m = x.shape[-1]
    if m == 1:
        return np.exp(x)
    d = np.diagonal(x, axis1=-2, axis2=-1)
    if np.count_nonzero(x) == np.count_nonzero(d):
        return np.exp(d)[..., None] * np.eye(m)
    if m == 2:
        return _expm_2x2(x)
    if m == 3 and not np.iscomplexobj(x):
        if np.allclose(x, -np.swapaxes(x, -1, -2), atol=1e-14, rtol=0):
            return _expm_so3(x)
    if np.allclose(x, -dagger(x), atol=1e-14, rtol=0):
        # anti-Hermitian: x = -i h with h Hermitian
        w, v = np.linalg.eigh(1j * x)
        return (v * np.exp(-1j * w)[..., None, :]) @ dagger(v)
    if x.ndim == 2:
        return scipy.linalg.expm(x)
    flat = x.reshape((-1, m, m))
    return scipy.linalg.expm(flat).reshape(x.shape)


# --------------------------------------------------------------------------
# groups


class LieGroup:
    """A matrix Lie group acting on batched storage arrays."""

    tag = "G"
    n = 1
    size = 1
    real = False

    @property
    def key(self):
        return (self.tag, self.n)

    def __eq__(self, other):
        return isinstance(other, LieGroup) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"{self.tag}({self.n})" if self.tag in ("SUn", "PSUn", "Un", "SUnxR") else self.tag

    @property
    def dtype(self):
        return float if self.real else complex

    def identity(self, shape=()):
        return np.broadcast_to(np.eye(self.size, dtype=self.dtype), tuple(shape) + (self.size, self.size)).copy()

    def zero(self, shape=()):
        return np.zeros(tuple(shape) + (self.size, self.size), dtype=self.dtype)

    def mul(self, a, b):
        return a @ b

    def inv(self, g):
        return dagger(g)

    def exp(self, x):
        return expm(x)

    def adjoint(self, g, x):
        return g @ x @ self.inv(g)

    def bracket(self, x, y):
        return x @ y - y @ x

    def dist(self, a, b):
        return frobenius(a - b)

    def project(self, g):
        """Nearest group element to a storage array that is slightly off the group."""
        u, _, vh = np.linalg.svd(g)
        return u @ vh

    def membership_error(self, g):
        raise NotImplementedError

    def algebra_error(self, x):
        raise NotImplementedError

    def basis(self):
        raise NotImplementedError

    def random_algebra(self, rng, scale=1.0):
        coeffs = rng.normal(scale=scale, size=len(self.basis()))
        return np.tensordot(coeffs, self.basis(), axes=1)

    def random_element(self, rng, scale=1.0):
        return self.exp(self.random_algebra(rng, scale))

    def element(self, matrix):
        return GroupElement(self, np.asarray(matrix, dtype=self.dtype))

    def algebra_element(self, matrix):
        return AlgebraElement(self, np.asarray(matrix, dtype=self.dtype))


def _unitary_basis(n, special):
    out = []
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[j, k], e[k, j] = 1, -1
            out.append(e)
            e = np.zeros((n, n), dtype=complex)
            e[j, k], e[k, j] = 1j, 1j
            out.append(e)
    for j in range(n - 1 if special else n):
        e = np.zeros((n, n), dtype=complex)
        e[j, j] = 1j
        if special:
            e[n - 1, n - 1] = -1j
        out.append(e)
    return np.array(out).reshape((-1, n, n))


class UnitaryGroup(LieGroup):
    """U(n), or SU(n) when ``special`` is set.  U(1) is ``UnitaryGroup(1)``."""

    def __init__(self, n, special=False):
        self.n = n
        self.size = n
        self.special = special
        if special:
            self.tag = "SU2" if n == 2 else "SUn"
        else:
            self.tag = "U1" if n == 1 else "Un"

    def project(self, g):
        g = LieGroup.project(self, g)
        if self.special:
            det = np.linalg.det(g)
            g = g * (det ** (-1.0 / self.n))[..., None, None]
        return g

    def membership_error(self, g):
        err = frobenius(dagger(g) @ g - np.eye(self.n))
        if self.special:
            err = err + np.abs(np.linalg.det(g) - 1)
        return err

    def algebra_error(self, x):
        err = frobenius(x + dagger(x))
        if self.special:
            err = err + np.abs(np.trace(x, axis1=-2, axis2=-1))
        return err

    def basis(self):
        return _unitary_basis(self.n, self.special)


class ProjectiveUnitaryGroup(UnitaryGroup):
    """SU(n)/Z(n), stored as SU(n) representatives.

    Two representatives name the same element when they differ by a central
    phase ``exp(2 pi i k / n)``; :meth:`dist` is the distance between classes.
    """

    def __init__(self, n):
        super().__init__(n, special=True)
        self.tag = "PSUn"

    def center(self):
        return np.exp(2j * np.pi * np.arange(self.n) / self.n)

    def dist(self, a, b):
        d = [frobenius(a - w * b) for w in self.center()]
        return np.min(np.stack(d, axis=0), axis=0)


class SO3(LieGroup):
    tag = "SO3"
    n = 3
    size = 3
    real = True

    def inv(self, g):
        return np.swapaxes(g, -1, -2)

    def project(self, g):
        u, _, vh = np.linalg.svd(np.asarray(g).real)
        d = np.sign(np.linalg.det(u @ vh))
        u = u.copy()
        u[..., :, -1] *= d[..., None]
        return u @ vh

    def membership_error(self, g):
        g = np.asarray(g)
        err = frobenius(np.swapaxes(g, -1, -2) @ g - np.eye(3)) + np.abs(np.linalg.det(g) - 1)
        if np.iscomplexobj(g):
            err = err + frobenius(g.imag)
        return err

    def algebra_error(self, x):
        x = np.asarray(x)
        err = frobenius(x + np.swapaxes(x, -1, -2))
        if np.iscomplexobj(x):
            err = err + frobenius(x.imag)
        return err

    def basis(self):
        return J.copy()


class RealLine(LieGroup):
    """The additive group of real numbers, stored as ``1 x 1`` arrays."""

    tag = "Real"
    n = 1
    size = 1
    real = True

    def identity(self, shape=()):
        return self.zero(shape)

    def mul(self, a, b):
        return a + b

    def inv(self, g):
        return -g

    def exp(self, x):
        return np.array(x, copy=True)

    def adjoint(self, g, x):
        return np.broadcast_to(x, np.broadcast_shapes(np.shape(g), np.shape(x))).copy()

    def bracket(self, x, y):
        return np.zeros(np.broadcast_shapes(np.shape(x), np.shape(y)))

    def project(self, g):
        return np.asarray(g).real.copy()

    def membership_error(self, g):
        g = np.asarray(g)
        return frobenius(g.imag) if np.iscomplexobj(g) else np.zeros(g.shape[:-2])

    algebra_error = membership_error

    def basis(self):
        return np.ones((1, 1, 1))


class SUnTimesR(LieGroup):
    """SU(n) x R with pairs ``(A, t)`` stored as ``diag(A, t)``."""

    tag = "SUnxR"

    def __init__(self, n):
        self.n = n
        self.size = n + 1
        self._su = UnitaryGroup(n, special=True)

    def split(self, g):
        return g[..., : self.n, : self.n], g[..., self.n, self.n].real

    def join(self, a, t):
        a = np.asarray(a)
        t = np.asarray(t, dtype=float)
        shape = np.broadcast_shapes(a.shape[:-2], t.shape)
        out = np.zeros(shape + (self.size, self.size), dtype=complex)
        out[..., : self.n, : self.n] = a
        out[..., self.n, self.n] = t
        return out

    def identity(self, shape=()):
        return self.join(np.broadcast_to(np.eye(self.n), tuple(shape) + (self.n, self.n)), np.zeros(shape))

    def mul(self, a, b):
        (a1, t1), (a2, t2) = self.split(a), self.split(b)
        return self.join(a1 @ a2, t1 + t2)

    def inv(self, g):
        a, t = self.split(g)
        return self.join(dagger(a), -t)

    def exp(self, x):
        a, t = self.split(x)
        return self.join(expm(a), t)

    def adjoint(self, g, x):
        a, _ = self.split(g)
        b, t = self.split(x)
        return self.join(a @ b @ dagger(a), t)

    def bracket(self, x, y):
        a, _ = self.split(x)
        b, _ = self.split(y)
        return self.join(a @ b - b @ a, np.zeros(np.broadcast_shapes(a.shape[:-2], b.shape[:-2])))

    def project(self, g):
        a, t = self.split(g)
        return self.join(self._su.project(a), t)

    def _off_block(self, g):
        g = np.asarray(g)
        return frobenius(g[..., : self.n, self.n :]) + frobenius(g[..., self.n :, : self.n])

    def membership_error(self, g):
        a, _ = self.split(g)
        return self._su.membership_error(a) + self._off_block(g) + np.abs(np.asarray(g)[..., self.n, self.n].imag)

    def algebra_error(self, x):
        a, _ = self.split(x)
        return self._su.algebra_error(a) + self._off_block(x) + np.abs(np.asarray(x)[..., self.n, self.n].imag)

    def basis(self):
        out = [self.join(b, 0.0) for b in self._su.basis()]
        out.append(self.join(np.zeros((self.n, self.n)), 1.0))
        return np.array(out)


def group_from_tag(tag, n=None):
    if tag == "U1":
        return UnitaryGroup(1)
    if tag == "SU2":
        return UnitaryGroup(2, special=True)
    if tag == "SO3":
        return SO3()
    if tag == "Real":
        return RealLine()
    if tag == "SUn":
        return UnitaryGroup(n, special=True)
    if tag == "PSUn":
        return ProjectiveUnitaryGroup(n)
    if tag == "Un":
        return UnitaryGroup(n)
    if tag == "SUnxR":
        return SUnTimesR(n)
    raise ValueError(f"unknown group tag {tag!r}")


# --------------------------------------------------------------------------
# element wrappers


@dataclass(frozen=True, eq=False)
class GroupElement:
    group: LieGroup
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (self.group.size, self.group.size):
            raise ValueError(f"{self.group!r} element must be {self.group.size}x{self.group.size}, got {m.shape}")
        err = float(self.group.membership_error(m))
        if err > 1e-6:
            raise ValueError(f"matrix is not in {self.group!r} (membership error {err:.3g})")

    def __matmul__(self, other):
        _check_same(self.group, other.group)
        return GroupElement(self.group, self.group.mul(self.matrix, other.matrix))

    def inverse(self):
        return GroupElement(self.group, self.group.inv(self.matrix))

    def distance(self, other):
        _check_same(self.group, other.group)
        return float(self.group.dist(self.matrix, other.matrix))

    def close(self, other, tol=GROUP_TOL):
        return self.distance(other) <= tol

    @property
    def pair(self):
        """``(A, t)`` for ``SU(n) x R`` elements."""
        a, t = self.group.split(self.matrix)
        return a, float(t)

    def __repr__(self):
        return f"GroupElement({self.group!r}, {np.array2string(self.matrix, precision=6)})"


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    group: LieGroup
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (self.group.size, self.group.size):
            raise ValueError(f"{self.group!r} algebra element must be {self.group.size}x{self.group.size}")
        err = float(self.group.algebra_error(m))
        if err > ALGEBRA_TOL * max(1.0, float(frobenius(m))):
            raise ValueError(f"matrix is not in the Lie algebra of {self.group!r} (error {err:.3g})")

    def __add__(self, other):
        _check_same(self.group, other.group)
        return AlgebraElement(self.group, self.matrix + other.matrix)

    def __sub__(self, other):
        _check_same(self.group, other.group)
        return AlgebraElement(self.group, self.matrix - other.matrix)

    def __mul__(self, c):
        return AlgebraElement(self.group, self.matrix * c)

    __rmul__ = __mul__

    def __neg__(self):
        return AlgebraElement(self.group, -self.matrix)

    def norm(self):
        return float(frobenius(self.matrix))

    def __repr__(self):
        return f"AlgebraElement({self.group!r}, {np.array2string(self.matrix, precision=6)})"


def _check_same(a, b):
    if a != b:
        raise TagMismatch(f"{a!r} vs {b!r}")


def exp(x: AlgebraElement) -> GroupElement:
    """Group exponential; raises :class:`NumericalFailure` on membership drift."""
    g = x.group.exp(x.matrix)
    err = float(x.group.membership_error(g))
    if err > MEMBERSHIP_TOL:
        raise NumericalFailure(f"exp left {x.group!r} by {err:.3g}")
    return GroupElement(x.group, g)


def adjoint(g: GroupElement, x: AlgebraElement) -> AlgebraElement:
    _check_same(g.group, x.group)
    return AlgebraElement(x.group, g.group.adjoint(g.matrix, x.matrix))


# --------------------------------------------------------------------------
# kernels and coverings


class Kernel:
    """The discrete kernel of a covering map, indexed by integers.

    ``order`` is the size of a finite cyclic kernel, or ``None`` when the
    kernel is infinite cyclic (isomorphic to the integers).
    """

    def __init__(self, group, element, order=None, description=""):
        self.group = group
        self._element = element
        self.order = order
        self.description = description

    def element(self, k):
        return self._element(k)

    def elements(self, radius=3):
        ks = range(self.order) if self.order is not None else range(-radius, radius + 1)
        return [(k, self.element(k)) for k in ks]

    def nearest(self, h, radius=None):
        """Index of, and distance to, the kernel element closest to ``h``."""
        if self.order is not None:
            cands = [(k, float(self.group.dist(h, self.element(k)))) for k in range(self.order)]
        else:
            k0 = self._guess(h)
            cands = [(k, float(self.group.dist(h, self.element(k)))) for k in range(k0 - 2, k0 + 3)]
        return min(cands, key=lambda kd: kd[1])

    def _guess(self, h):
        raise NotImplementedError

    def __repr__(self):
        return f"Kernel({self.description})"


class _IntegerKernel(Kernel):
    def __init__(self, group, element, scale, description):
        super().__init__(group, element, None, description)
        self.scale = scale

    def _guess(self, h):
        return int(np.round(np.asarray(h)[..., -1, -1].real * self.scale))


class CoveringPair:
    """A covering homomorphism ``tau: cover -> base`` with its Lie-algebra data.

    Subclasses provide ``tau``, ``dtau``, ``dtau_inv``, ``any_lift`` and
    ``preimages`` on batched storage arrays plus a :class:`Kernel`.
    """

    cover: LieGroup
    base: LieGroup
    kernel: Kernel

    def __repr__(self):
        return f"{type(self).__name__}({self.cover!r} -> {self.base!r})"

    def tau(self, h):
        raise NotImplementedError

    def dtau(self, x):
        raise NotImplementedError

    def dtau_inv(self, y):
        raise NotImplementedError

    def any_lift(self, g):
        """Some preimage of each ``g`` (batched)."""
        raise NotImplementedError

    def preimages(self, g, near):
        """Candidate preimages of a single ``g``, shape ``(k, m, m)``; must include the nearest to ``near``."""
        raise NotImplementedError

    def alpha(self, g, h):
        """Action of the base on the cover: conjugation by any lift of ``g``."""
        return self.cover.adjoint(self.any_lift(g), h)

    def alpha_alg(self, g, x):
        """Differentiated action on the cover Lie algebra."""
        return self.cover.adjoint(self.any_lift(g), x)


class RealToU1(CoveringPair):
    """``t -> exp(2 pi i t)``."""

    def __init__(self):
        self.cover = RealLine()
        self.base = UnitaryGroup(1)
        self.kernel = _IntegerKernel(self.cover, lambda k: np.array([[float(k)]]), 1.0, "Z in R")

    def tau(self, h):
        return np.exp(2j * np.pi * np.asarray(h).real)

    def dtau(self, x):
        return 2j * np.pi * np.asarray(x).real

    def dtau_inv(self, y):
        return (np.asarray(y) / (2j * np.pi)).real

    def any_lift(self, g):
        return np.angle(g) / (2 * np.pi)

    def preimages(self, g, near):
        t0 = float(np.angle(g[0, 0]) / (2 * np.pi))
        m0 = np.round(float(near[0, 0]) - t0)
        return np.array([[[t0 + m0 + dm]] for dm in (-1.0, 0.0, 1.0)])


def _quaternion_from_rotation(r):
    """Unit quaternions ``(w, x, y, z)`` for batched rotation matrices (sign arbitrary)."""
    r = np.asarray(r).real
    tr = np.trace(r, axis1=-2, axis2=-1)
    cand = np.stack(
        [
            1 + tr,
            1 + 2 * r[..., 0, 0] - tr,
            1 + 2 * r[..., 1, 1] - tr,
            1 + 2 * r[..., 2, 2] - tr,
        ],
        axis=-1,
    )
    idx = np.argmax(cand, axis=-1)
    s = np.sqrt(np.maximum(np.take_along_axis(cand, idx[..., None], -1)[..., 0], 1e-300))
    # 4 q_i q_j combinations from symmetric/antisymmetric parts
    qw = np.stack([s**2, r[..., 2, 1] - r[..., 1, 2], r[..., 0, 2] - r[..., 2, 0], r[..., 1, 0] - r[..., 0, 1]], -1)
    qx = np.stack([r[..., 2, 1] - r[..., 1, 2], s**2, r[..., 0, 1] + r[..., 1, 0], r[..., 0, 2] + r[..., 2, 0]], -1)
    qy = np.stack([r[..., 0, 2] - r[..., 2, 0], r[..., 0, 1] + r[..., 1, 0], s**2, r[..., 1, 2] + r[..., 2, 1]], -1)
    qz = np.stack([r[..., 1, 0] - r[..., 0, 1], r[..., 0, 2] + r[..., 2, 0], r[..., 1, 2] + r[..., 2, 1], s**2], -1)
    rows = np.stack([qw, qx, qy, qz], axis=-2)
    q = np.take_along_axis(rows, idx[..., None, None], axis=-2)[..., 0, :] / (2 * s[..., None])
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


class SU2ToSO3(CoveringPair):
    """The double cover ``SU(2) -> SO(3)``, ``tau(U)_kj = tr(s_k U s_j U^+)/2``.

    On Lie algebras ``dtau(s_i / 2i) = J_i``.
    """

    def __init__(self):
        self.cover = UnitaryGroup(2, special=True)
        self.base = SO3()
        self.kernel = Kernel(self.cover, lambda k: (-1.0) ** (k % 2) * np.eye(2, dtype=complex), 2, "{I2, -I2}")
        self._e = PAULI / 2j

    def tau(self, h):
        h = np.asarray(h)
        hs = np.einsum("...ab,jbc,...dc->...jad", h, PAULI, np.conj(h))
        return 0.5 * np.einsum("kda,...jad->...kj", PAULI, hs).real

    def dtau(self, x):
        c = (1j * np.einsum("kab,...ba->...k", PAULI, np.asarray(x))).real
        return np.tensordot(c, J, axes=([-1], [0]))

    def dtau_inv(self, y):
        y = np.asarray(y).real
        c = np.stack([y[..., 2, 1], y[..., 0, 2], y[..., 1, 0]], axis=-1)
        return np.tensordot(c, self._e, axes=([-1], [0]))

    def any_lift(self, g):
        q = _quaternion_from_rotation(g)
        return q[..., 0, None, None] * np.eye(2) - 1j * np.tensordot(q[..., 1:], PAULI, axes=([-1], [0]))

    def preimages(self, g, near):
        u = self.any_lift(g)
        return np.array([u, -u])


class SUnToPSUn(CoveringPair):
    """The quotient ``SU(n) -> SU(n)/Z(n)``; representatives pass through unchanged."""

    def __init__(self, n):
        self.cover = UnitaryGroup(n, special=True)
        self.base = ProjectiveUnitaryGroup(n)
        self.n = n
        self.kernel = Kernel(
            self.cover,
            lambda k: np.exp(2j * np.pi * (k % n) / n) * np.eye(n),
            n,
            f"Z({n}) = {{exp(2 pi i k/{n}) I}}",
        )

    def tau(self, h):
        return np.array(h, copy=True)

    def dtau(self, x):
        return np.array(x, copy=True)

    def dtau_inv(self, y):
        return np.array(y, copy=True)

    def any_lift(self, g):
        return np.asarray(g)

    def preimages(self, g, near):
        return np.array([w * g for w in self.base.center()])


class SUnxRToUn(CoveringPair):
    """``(A, t) -> A exp(2 pi i t)`` from ``SU(n) x R`` onto ``U(n)``.

    The kernel is ``{(exp(-2 pi i m/n) I, m/n)}``, infinite cyclic in ``m``.
    """

    def __init__(self, n):
        self.n = n
        self.cover = SUnTimesR(n)
        self.base = UnitaryGroup(n)
        cov = self.cover
        self.kernel = _IntegerKernel(
            cov,
            lambda m: cov.join(np.exp(-2j * np.pi * m / n) * np.eye(n), m / n),
            float(n),
            f"{{(exp(-2 pi i m/{n}) I, m/{n})}} = Z",
        )

    def tau(self, h):
        a, t = self.cover.split(np.asarray(h))
        return a * np.exp(2j * np.pi * t)[..., None, None]

    def dtau(self, x):
        a, t = self.cover.split(np.asarray(x))
        return a + (2j * np.pi * t)[..., None, None] * np.eye(self.n)

    def dtau_inv(self, y):
        y = np.asarray(y)
        tr = np.trace(y, axis1=-2, axis2=-1)
        a = y - (tr / self.n)[..., None, None] * np.eye(self.n)
        return self.cover.join(a, (tr / (2j * np.pi * self.n)).real)

    def any_lift(self, g):
        g = np.asarray(g)
        t0 = np.angle(np.linalg.det(g)) / (2 * np.pi * self.n)
        return self.cover.join(g * np.exp(-2j * np.pi * t0)[..., None, None], t0)

    def alpha_alg(self, g, x):
        # the central phase of a lift cancels under conjugation
        return self.cover.adjoint(self.cover.join(np.asarray(g), 0.0), x)

    def alpha(self, g, h):
        return self.cover.adjoint(self.cover.join(np.asarray(g), 0.0), h)

    def preimages(self, g, near):
        n = self.n
        t0 = float(np.angle(np.linalg.det(g)) / (2 * np.pi * n))
        t_near = float(np.asarray(near)[n, n].real)
        m0 = int(np.round((t_near - t0) * n))
        ts = t0 + np.arange(m0 - n, m0 + n + 1) / n
        return self.cover.join(g * np.exp(-2j * np.pi * ts)[:, None, None], ts)


class IdentityCovering(CoveringPair):
    """``id: G -> G``; trivial kernel."""

    def __init__(self, group):
        self.cover = group
        self.base = group
        self.kernel = Kernel(group, lambda k: group.identity(), 1, "{e}")

    def tau(self, h):
        return np.array(h, copy=True)

    def dtau(self, x):
        return np.array(x, copy=True)

    def dtau_inv(self, y):
        return np.array(y, copy=True)

    def any_lift(self, g):
        return np.asarray(g)

    def preimages(self, g, near):
        return np.asarray(g)[None]


def lift_element(cp: CoveringPair, g: GroupElement, near: GroupElement) -> GroupElement:
    """The preimage of ``g`` closest to ``near``.

    Raises :class:`AmbiguousLift` when the two closest preimages are within
    ``AMBIGUITY_MARGIN`` of each other, which means the caller stepped too far.
    """
    if g.group != cp.base:
        raise TagMismatch(f"{g.group!r} is not the base of {cp!r}")
    if near.group != cp.cover:
        raise TagMismatch(f"{near.group!r} is not the cover of {cp!r}")
    h, _ = _nearest_preimage(cp, g.matrix, near.matrix)
    return GroupElement(cp.cover, h)


def _nearest_preimage(cp, g, near):
    cands = cp.preimages(g, near)
    d = np.atleast_1d(cp.cover.dist(cands, near))
    order = np.argsort(d)
    if len(d) > 1 and d[order[1]] - d[order[0]] < AMBIGUITY_MARGIN:
        raise AmbiguousLift(f"preimages at distances {d[order[0]]:.3g} and {d[order[1]]:.3g}")
    return cands[order[0]], float(d[order[0]])


def dtau_inverse_map(cp: CoveringPair, x: AlgebraElement) -> AlgebraElement:
    if x.group != cp.base:
        raise TagMismatch(f"{x.group!r} is not the base of {cp!r}")
    return AlgebraElement(cp.cover, np.asarray(cp.dtau_inv(x.matrix), dtype=cp.cover.dtype))


def dtau_map(cp: CoveringPair, x: AlgebraElement) -> AlgebraElement:
    if x.group != cp.cover:
        raise TagMismatch(f"{x.group!r} is not the cover of {cp!r}")
    return AlgebraElement(cp.base, np.asarray(cp.dtau(x.matrix), dtype=cp.base.dtype))


def tau_map(cp: CoveringPair, h: GroupElement) -> GroupElement:
    if h.group != cp.cover:
        raise TagMismatch(f"{h.group!r} is not the cover of {cp!r}")
    return GroupElement(cp.base, np.asarray(cp.tau(h.matrix), dtype=cp.base.dtype))


def psu_equivalent(a, b, n, tol=GROUP_TOL):
    """Whether ``a b^-1`` is within ``tol`` of some ``exp(2 pi i k/n) I``."""
    c = a @ dagger(b)
    return any(frobenius(c - w * np.eye(n)) <= tol for w in np.exp(2j * np.pi * np.arange(n) / n))


def all_coverings():
    """One instance of every covering family used by the monopole catalog."""
    out = [RealToU1(), SU2ToSO3()]
    out += [SUnToPSUn(n) for n in (2, 3, 4)]
    out += [SUnxRToUn(n) for n in (1, 2, 3)]
    return out


__all__ = [
    "AlgebraElement",
    "CoveringPair",
    "GroupElement",
    "IdentityCovering",
    "J",
    "Kernel",
    "LieGroup",
    "PAULI",
    "ProjectiveUnitaryGroup",
    "RealLine",
    "RealToU1",
    "SO3",
    "SU2ToSO3",
    "SUnTimesR",
    "SUnToPSUn",
    "SUnxRToUn",
    "UnitaryGroup",
    "adjoint",
    "all_coverings",
    "dtau_inverse_map",
    "dtau_map",
    "exp",
    "expm",
    "group_from_tag",
    "lift_element",
    "psu_equivalent",
    "tau_map",
]

