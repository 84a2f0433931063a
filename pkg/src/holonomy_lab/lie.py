"""Matrix Lie groups U(1), SU(2) and SO(n) with the Frobenius bi-invariant metric.

Elements are stored as square numpy arrays tagged with their ``GroupKind``.
U(1) uses 1x1 complex arrays so that every kind shares the same matrix
machinery; ``GroupElement.scalar`` exposes the unit complex number.

The ``*_batch`` functions work on stacks of shape (..., d, d) and are what the
integrators call; the element-level wrappers are the public surface.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CutLocus, SingularInput

GROUP_TOL = 1e-10
ALGEBRA_TOL = 1e-12
# log is refused when the rotation angle is this close to pi
CUT_LOCUS_MARGIN = 1e-7


@dataclass(frozen=True)
class GroupKind:
    tag: str
    n: int = 0

    def __post_init__(self):
        if self.tag not in ("U1", "SU2", "SOn"):
            raise ValueError(f"unknown group tag {self.tag!r}")
        if self.tag == "SOn" and self.n < 2:
            raise ValueError("SO(n) needs n >= 2")

    @property
    def dim(self) -> int:
        return {"U1": 1, "SU2": 2}.get(self.tag, self.n)

    @property
    def dtype(self):
        return float if self.tag == "SOn" else complex

    @property
    def is_abelian(self) -> bool:
        return self.tag == "U1" or (self.tag == "SOn" and self.n == 2)

    @property
    def name(self) -> str:
        return f"SO{self.n}" if self.tag == "SOn" else self.tag

    @classmethod
    def parse(cls, name: str) -> "GroupKind":
        key = name.strip().upper().replace("(", "").replace(")", "")
        if key in ("U1", "SU2"):
            return cls(key)
        if key.startswith("SO") and key[2:].isdigit():
            return cls("SOn", int(key[2:]))
        raise ValueError(f"unknown group {name!r}")

    def __str__(self):
        return self.name


U1 = GroupKind("U1")
SU2 = GroupKind("SU2")


def SO(n: int) -> GroupKind:
    return GroupKind("SOn", n)


def identity_matrix(kind: GroupKind) -> np.ndarray:
    return np.eye(kind.dim, dtype=kind.dtype)


def algebra_basis(kind: GroupKind) -> np.ndarray:
    """Basis of the Lie algebra as an array of shape (k, d, d).

    U(1): i.  SU(2): i*sigma_1, i*sigma_2, i*sigma_3.  SO(n): E_ij - E_ji, i < j.
    """
    if kind.tag == "U1":
        return np.array([[[1j]]])
    if kind.tag == "SU2":
        return 1j * np.array(
            [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
        )
    n = kind.n
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n))
            e[i, j], e[j, i] = -1.0, 1.0
            out.append(e)
    return np.array(out)


def from_coords(kind: GroupKind, coords) -> np.ndarray:
    """Algebra matrix (or stack of them) from coordinates in ``algebra_basis``."""
    coords = np.asarray(coords, dtype=float)
    return np.tensordot(coords, algebra_basis(kind), axes=([-1], [0]))


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def frobenius(m: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(m) ** 2, axis=(-2, -1)))


def group_deviation(m: np.ndarray) -> np.ndarray:
    """Frobenius distance of M*M from the identity, per matrix."""
    d = m.shape[-1]
    return frobenius(dagger(m) @ m - np.eye(d))


def skew_part(kind: GroupKind, m: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the Lie algebra (skew part, traceless for SU(2))."""
    s = 0.5 * (m - dagger(m))
    if kind.tag == "SU2":
        tr = np.trace(s, axis1=-2, axis2=-1)[..., None, None]
        s = s - 0.5 * tr * np.eye(2)
    if kind.tag == "SOn":
        s = np.real(s)
    return s


# --- batched exponential and logarithm --------------------------------------


def exp_batch(kind: GroupKind, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if kind.tag == "U1":
        return np.exp(x)
    if kind.tag == "SU2":
        # X^2 = -a^2 I with a = |X|_F / sqrt(2)
        a = frobenius(x) / np.sqrt(2.0)
        c = np.cos(a)[..., None, None]
        s = np.sinc(a / np.pi)[..., None, None]
        return c * np.eye(2) + s * x
    n = kind.n
    x = np.real(x)
    if n == 2:
        th = x[..., 1, 0]
        c, s = np.cos(th), np.sin(th)
        return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
    if n == 3:
        th = frobenius(x) / np.sqrt(2.0)
        a = np.sinc(th / np.pi)[..., None, None]
        # (1 - cos th) / th^2 written to stay accurate near 0
        b = (0.5 * np.sinc(th / (2 * np.pi)) ** 2)[..., None, None]
        return np.eye(3) + a * x + b * (x @ x)
    return scipy.linalg.expm(x)


def log_batch(kind: GroupKind, g: np.ndarray) -> np.ndarray:
    g = np.asarray(g)
    if kind.tag == "U1":
        ang = np.angle(g)
        ang = np.where(ang <= -np.pi, np.pi, ang)
        return 1j * ang
    if kind.tag == "SU2":
        k = 0.5 * (g - dagger(g))
        k = k - 0.5 * np.trace(k, axis1=-2, axis2=-1)[..., None, None] * np.eye(2)
        cos_a = 0.5 * np.real(np.trace(g, axis1=-2, axis2=-1))
        sin_a = frobenius(k) / np.sqrt(2.0)
        a = np.arctan2(sin_a, cos_a)
        if np.any(np.pi - a < CUT_LOCUS_MARGIN):
            raise CutLocus("SU(2) element at the antipode -id", value=np.pi * np.sqrt(2.0))
        return (1.0 / np.sinc(a / np.pi))[..., None, None] * k
    n = kind.n
    g = np.real(g)
    if n == 2:
        th = np.arctan2(g[..., 1, 0], g[..., 0, 0])
        if np.any(np.pi - np.abs(th) < CUT_LOCUS_MARGIN):
            raise CutLocus("SO(2) half turn", value=np.pi * np.sqrt(2.0))
        z = np.zeros_like(th)
        return np.stack([np.stack([z, -th], -1), np.stack([th, z], -1)], -2)
    if n == 3:
        k = 0.5 * (g - np.swapaxes(g, -1, -2))
        sin_t = frobenius(k) / np.sqrt(2.0)
        cos_t = 0.5 * (np.trace(g, axis1=-2, axis2=-1) - 1.0)
        th = np.arctan2(sin_t, cos_t)
        if np.any(np.pi - th < CUT_LOCUS_MARGIN):
            raise CutLocus("SO(3) half turn", value=np.pi * np.sqrt(2.0))
        return (1.0 / np.sinc(th / np.pi))[..., None, None] * k
    flat = g.reshape(-1, n, n)
    out = np.empty_like(flat)
    for i, m in enumerate(flat):
        ev = np.linalg.eigvals(m)
        if np.any(np.abs(ev + 1.0) < np.sqrt(CUT_LOCUS_MARGIN)):
            raise CutLocus("SO(n) element with eigenvalue -1")
        lg = scipy.linalg.logm(m)
        out[i] = np.real(0.5 * (lg - lg.T))
    return out.reshape(g.shape)


# --- element types ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    kind: GroupKind
    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=self.kind.dtype)
        if mat.ndim == 0:
            mat = mat.reshape(1, 1)
        if mat.shape != (self.kind.dim, self.kind.dim):
            raise ValueError(f"{self.kind} algebra element needs shape {(self.kind.dim,) * 2}")
        object.__setattr__(self, "mat", mat)

    def is_valid(self, tol: float = ALGEBRA_TOL) -> bool:
        ok = frobenius(self.mat + dagger(self.mat)) <= tol
        if self.kind.tag == "SU2":
            ok = ok and abs(np.trace(self.mat)) <= tol
        return bool(ok)

    def __add__(self, other):
        return AlgebraElement(self.kind, self.mat + other.mat)

    def __sub__(self, other):
        return AlgebraElement(self.kind, self.mat - other.mat)

    def __neg__(self):
        return AlgebraElement(self.kind, -self.mat)

    def __mul__(self, c):
        return AlgebraElement(self.kind, c * self.mat)

    __rmul__ = __mul__

    @classmethod
    def zero(cls, kind: GroupKind) -> "AlgebraElement":
        return cls(kind, np.zeros((kind.dim, kind.dim), dtype=kind.dtype))

    @classmethod
    def from_coords(cls, kind: GroupKind, coords) -> "AlgebraElement":
        return cls(kind, from_coords(kind, coords))


@dataclass(frozen=True, eq=False)
class GroupElement:
    kind: GroupKind
    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=self.kind.dtype)
        if mat.ndim == 0:
            mat = mat.reshape(1, 1)
        if mat.shape != (self.kind.dim, self.kind.dim):
            raise ValueError(f"{self.kind} group element needs shape {(self.kind.dim,) * 2}")
        object.__setattr__(self, "mat", mat)

    @classmethod
    def identity(cls, kind: GroupKind) -> "GroupElement":
        return cls(kind, identity_matrix(kind))

    @property
    def scalar(self) -> complex:
        if self.kind.tag != "U1":
            raise AttributeError("scalar view only exists for U(1)")
        return complex(self.mat[0, 0])

    @property
    def deviation(self) -> float:
        return float(group_deviation(self.mat))

    def is_valid(self, tol: float = GROUP_TOL) -> bool:
        if self.deviation > tol:
            return False
        if self.kind.tag == "U1":
            return True
        return bool(abs(np.linalg.det(self.mat) - 1.0) <= tol)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.kind, self.mat @ other.mat)

    def inv(self) -> "GroupElement":
        return GroupElement(self.kind, dagger(self.mat))


# --- public operations --------------------------------------------------------


def exp_map(x: AlgebraElement) -> GroupElement:
    return GroupElement(x.kind, exp_batch(x.kind, x.mat))


def log_map(g: GroupElement) -> AlgebraElement:
    """Principal logarithm; raises ``CutLocus`` where it is not unique."""
    return AlgebraElement(g.kind, log_batch(g.kind, g.mat))


def algebra_norm(x) -> float:
    m = x.mat if isinstance(x, AlgebraElement) else np.asarray(x)
    return float(frobenius(m))


def geodesic_distance(g: GroupElement, h: GroupElement) -> float:
    if g.kind != h.kind:
        raise ValueError("elements of different groups")
    return algebra_norm(log_map(g.inv() @ h))


def polar_batch(kind: GroupKind, m: np.ndarray) -> np.ndarray:
    """Nearest group element by polar decomposition, per matrix in the stack."""
    m = np.asarray(m, dtype=kind.dtype)
    if kind.tag == "U1":
        a = np.abs(m)
        if np.any(a < 1e-14):
            raise SingularInput("cannot project 0 onto U(1)")
        return m / a
    u, s, vh = np.linalg.svd(m)
    if np.any(s[..., -1] <= 1e-14 * s[..., 0]):
        raise SingularInput("rank-deficient matrix")
    q = u @ vh
    det = np.linalg.det(q)
    if kind.tag == "SOn":
        flip = det < 0
        if np.any(flip):
            u = u.copy()
            u[flip, ..., -1] *= -1
            q = u @ vh
        return q
    # SU(2): divide out a square root of det, choosing the root closer to m
    root = np.sqrt(det)[..., None, None]
    q1, q2 = q / root, -q / root
    closer = frobenius(q1 - m) <= frobenius(q2 - m)
    return np.where(closer[..., None, None], q1, q2)


def project_to_group(m, kind: GroupKind) -> GroupElement:
    m = np.asarray(m, dtype=kind.dtype).reshape(kind.dim, kind.dim)
    q = polar_batch(kind, m)
    if frobenius(q - m) > 0.5:
        warnings.warn("projecting a matrix far from the group", RuntimeWarning, stacklevel=2)
    return GroupElement(kind, q)


def random_algebra(kind: GroupKind, rng: np.random.Generator, scale: float = 1.0) -> AlgebraElement:
    """Algebra element with Gaussian coordinates, rescaled to Frobenius norm ``scale``."""
    x = from_coords(kind, rng.standard_normal(len(algebra_basis(kind))))
    return AlgebraElement(kind, scale * x / frobenius(x))


def random_group(kind: GroupKind, rng: np.random.Generator) -> GroupElement:
    if kind.tag == "U1":
        return GroupElement(kind, np.exp(1j * rng.uniform(-np.pi, np.pi)))
    if kind.tag == "SU2":
        q = rng.standard_normal(4)
        q /= np.linalg.norm(q)
        a, b = q[0] + 1j * q[1], q[2] + 1j * q[3]
        return GroupElement(kind, np.array([[a, -np.conj(b)], [b, np.conj(a)]]))
    return GroupElement(kind, polar_batch(kind, rng.standard_normal((kind.n, kind.n))))
