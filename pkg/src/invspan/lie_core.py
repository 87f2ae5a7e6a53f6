"""Real antisymmetric matrices, permutation conjugation, and span ranking.

The algebra so(n) is represented by exactly antisymmetric float arrays.
Exact means entries[j, i] == -entries[i, j] bitwise: every constructor
here guarantees it, and the recipe (m - m.T) / 2 produces it for free
because IEEE rounding is sign-symmetric.

Subspaces of so(n) are handled through a flattening of the strict upper
triangle (row-major pair order, scaled by sqrt(2)) chosen so that the
Euclidean dot product of two flattened vectors equals the real part of
the trace form tr(a conj(b).T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import DimensionError

DEFAULT_RANK_TOL = 1e-8

__all__ = [
    "DEFAULT_RANK_TOL",
    "Permutation",
    "SubspaceBasis",
    "bracket",
    "conjugate_by_permutation",
    "flatten_antisym",
    "hermitian_product",
    "matrix_exponential",
    "numerical_rank",
    "permutation_matrix",
    "plane_rotation",
    "so_basis",
    "so_dim",
    "unflatten_antisym",
    "upper_triangle_indices",
]


def so_dim(n: int) -> int:
    """Dimension n(n-1)/2 of so(n)."""
    return n * (n - 1) // 2


@lru_cache(maxsize=None)
def upper_triangle_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column indices of the strict upper triangle, row-major."""
    rows, cols = np.triu_indices(n, k=1)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


def _check_antisym(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    if not np.array_equal(a, -a.T):
        raise ValueError(f"{name} is not exactly antisymmetric")
    return a


def so_basis(n: int) -> list[np.ndarray]:
    """Canonical basis of so(n): E_ij - E_ji for i < j, row-major order.

    Raises DimensionError for n < 2.
    """
    if n < 2:
        raise DimensionError(f"so(n) basis needs n >= 2, got {n}")
    rows, cols = upper_triangle_indices(n)
    out = []
    for i, j in zip(rows, cols):
        b = np.zeros((n, n))
        b[i, j] = 1.0
        b[j, i] = -1.0
        out.append(b)
    return out


def bracket(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Commutator [a, b] = ab - ba of two antisymmetric matrices.

    For antisymmetric inputs ba equals (ab).T, so the result is computed
    as m - m.T with a single product, which makes it exactly antisymmetric.
    """
    a = _check_antisym(a, "a")
    b = _check_antisym(b, "b")
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    m = a @ b
    return m - m.T


@dataclass(frozen=True)
class Permutation:
    """Permutation of {0, ..., n-1} stored as the image tuple.

    images[i] is where i is sent.  Composition is (p @ q)(i) = p(q(i)).
    """

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(n)):
            raise ValueError(f"not a permutation of 0..{n - 1}: {self.images}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Permutation":
        if not (0 <= i < n and 0 <= j < n and i != j):
            raise ValueError(f"invalid transposition ({i} {j}) on {n} points")
        images = list(range(n))
        images[i], images[j] = j, i
        return cls(tuple(images))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        return cls(tuple(int(k) for k in rng.permutation(n)))

    @property
    def n(self) -> int:
        return len(self.images)

    @property
    def sign(self) -> int:
        """+1 for even permutations, -1 for odd, from the cycle structure."""
        seen = [False] * self.n
        sign = 1
        for start in range(self.n):
            if seen[start]:
                continue
            length = 0
            k = start
            while not seen[k]:
                seen[k] = True
                k = self.images[k]
                length += 1
            if length % 2 == 0:
                sign = -sign
        return sign

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, image in enumerate(self.images):
            inv[image] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self.compose(other))(i) = self(other(i))."""
        if self.n != other.n:
            raise DimensionError("permutations act on different sets")
        return Permutation(tuple(self.images[k] for k in other.images))

    def __call__(self, i: int) -> int:
        return self.images[i]


def permutation_matrix(perm: Permutation) -> np.ndarray:
    """Matrix e with e[perm(i), i] = 1, so that e @ x permutes coordinates."""
    n = perm.n
    mat = np.zeros((n, n))
    mat[list(perm.images), range(n)] = 1.0
    return mat


def conjugate_by_permutation(perm: Permutation, a: np.ndarray) -> np.ndarray:
    """Relabel indices of a by perm: result[perm(i), perm(j)] = a[i, j].

    Equals e a e^-1 with e = permutation_matrix(perm), computed by exact
    index gathering so antisymmetry survives bitwise.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix must be square, got shape {a.shape}")
    if a.shape[0] != perm.n:
        raise DimensionError(f"permutation on {perm.n} points vs matrix of size {a.shape[0]}")
    inv = perm.inverse().images
    return a[np.ix_(inv, inv)].copy()


def matrix_exponential(a: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(t a) for antisymmetric a; the result is special orthogonal.

    Raises ValueError on non-finite input and checks the orthogonality
    defect of the output against a 1e-10 tolerance.
    """
    a = _check_antisym(a, "a")
    if not np.isfinite(t) or not np.all(np.isfinite(a)):
        raise ValueError("non-finite input to matrix exponential")
    q = expm(t * a)
    defect = np.max(np.abs(q.T @ q - np.eye(a.shape[0])))
    if defect > 1e-10:
        raise ArithmeticError(f"exponential lost orthogonality, defect {defect:.3e}")
    return q


def hermitian_product(a: np.ndarray, b: np.ndarray):
    """Trace form tr(a conj(b).T), the invariant product on so(n, C)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return np.sum(a * np.conj(b))


def plane_rotation(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Generator u v^T - v u^T of the rotation in the plane spanned by u, v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1 or u.shape != v.shape:
        raise DimensionError("u and v must be vectors of the same length")
    m = np.outer(u, v)
    return m - m.T


def flatten_antisym(a: np.ndarray) -> np.ndarray:
    """Strict upper triangle of a, row-major, scaled by sqrt(2).

    The scaling makes flat(a) . flat(b) equal hermitian_product(a, b)
    for real antisymmetric a, b.
    """
    a = _check_antisym(a, "a")
    rows, cols = upper_triangle_indices(a.shape[0])
    return math.sqrt(2.0) * a[rows, cols]


def _side_from_flat(length: int) -> int:
    n = (1 + math.isqrt(1 + 8 * length)) // 2
    if n * (n - 1) // 2 != length:
        raise DimensionError(f"length {length} is not n(n-1)/2 for any integer n")
    return n


def unflatten_antisym(v: np.ndarray, n: int | None = None) -> np.ndarray:
    """Inverse of flatten_antisym."""
    v = np.asarray(v)
    if v.ndim != 1:
        raise DimensionError("flattened vector must be one dimensional")
    if n is None:
        n = _side_from_flat(v.shape[0])
    elif so_dim(n) != v.shape[0]:
        raise DimensionError(f"vector of length {v.shape[0]} does not fit so({n})")
    rows, cols = upper_triangle_indices(n)
    a = np.zeros((n, n), dtype=v.dtype)
    a[rows, cols] = v / math.sqrt(2.0)
    a[cols, rows] = -a[rows, cols]
    return a


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace of so(n) in flattened coordinates.

    vectors has shape (rank, n(n-1)/2) with orthonormal rows; tol is the
    absolute singular-value threshold that produced the rank.
    """

    n: int
    vectors: np.ndarray
    rank: int
    tol: float

    def __post_init__(self):
        if self.vectors.shape != (self.rank, so_dim(self.n)):
            raise DimensionError(
                f"basis shape {self.vectors.shape} does not match rank {self.rank} in so({self.n})"
            )

    def matrices(self) -> list[np.ndarray]:
        return [unflatten_antisym(row, self.n) for row in self.vectors]

    def residual(self, flat: np.ndarray) -> float:
        """Distance from flat to its projection onto the subspace."""
        flat = np.asarray(flat, dtype=float)
        coords = self.vectors @ flat
        return float(np.linalg.norm(flat - self.vectors.T @ coords))


def svd_row_basis(rows: np.ndarray, tol_factor: float = DEFAULT_RANK_TOL):
    """Rank and orthonormal row-space basis of a stacked-vector matrix.

    Returns (rank, threshold, basis) where basis holds the right singular
    vectors with singular value > threshold = tol_factor * s_max.  Basis
    row signs are fixed (largest-magnitude entry positive) so repeated
    runs give identical output.
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise ValueError("need a non-empty 2-d stack of vectors")
    if not np.all(np.isfinite(rows)):
        raise ValueError("non-finite entries in span vectors")
    _, s, vt = np.linalg.svd(rows, full_matrices=False)
    smax = s[0] if s.size else 0.0
    threshold = tol_factor * smax
    rank = int(np.sum(s > threshold))
    basis = vt[:rank].copy()
    for row in basis:
        lead = row[np.argmax(np.abs(row))]
        if lead < 0:
            row *= -1.0
    return rank, float(threshold), basis


def numerical_rank(vectors, tol_factor: float = DEFAULT_RANK_TOL) -> SubspaceBasis:
    """Numerical rank of a family of flattened so(n) elements.

    vectors is an iterable of flattened antisymmetric matrices (or a 2-d
    array of them stacked as rows).  Singular values above
    tol_factor * s_max count toward the rank.
    """
    rows = np.atleast_2d(np.asarray(list(vectors) if not isinstance(vectors, np.ndarray) else vectors, dtype=float))
    if rows.size == 0:
        raise ValueError("empty list of vectors")
    n = _side_from_flat(rows.shape[1])
    rank, threshold, basis = svd_row_basis(rows, tol_factor)
    return SubspaceBasis(n=n, vectors=basis, rank=rank, tol=threshold)
