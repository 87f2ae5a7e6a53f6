"""Real orthogonal irreducible representations of the rotation group SO(3).

For weight ell >= 1 the representation acts on a (2 ell + 1)-dimensional
real space indexed by m = -ell..ell, the index convention of real-valued
spherical harmonics (m > 0 cosine-type, m < 0 sine-type).  Generators are
built from the complex ladder operators and conjugated to the real basis;
signs are fixed so that exp(alpha gen_z) and exp(beta gen_y) match the
action T(x) -> T(g^-1 x) of the corresponding point rotations on harmonic
expansions, which pins down

    [gen_x, gen_y] = gen_z,  [gen_y, gen_z] = gen_x,  [gen_z, gen_x] = gen_y

and the Casimir sum gen_x^2 + gen_y^2 + gen_z^2 = -ell(ell+1) I.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionError
from .lie_core import DEFAULT_RANK_TOL, svd_row_basis

__all__ = [
    "IrrepGenerators",
    "RotationSpec",
    "build_generators",
    "cartesian_rotation",
    "commutant_dimension",
    "common_fixed_subspace_dim",
    "euler_zyz_from_matrix",
    "random_rotation",
    "rep_matrix",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RotationSpec:
    """Euler angles (alpha, beta, gamma) in Z-Y-Z order.

    Stored in the canonical ranges alpha, gamma in [0, 2 pi) and
    beta in [0, pi]; values outside are folded to an equivalent triple
    on construction.
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        a, b, g = float(self.alpha), float(self.beta), float(self.gamma)
        if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(g)):
            raise ValueError("Euler angles must be finite")
        if not (0.0 <= b <= math.pi and 0.0 <= a < _TWO_PI and 0.0 <= g < _TWO_PI):
            b = b % _TWO_PI
            if b > math.pi:
                # R_y(-b) = R_z(pi) R_y(b) R_z(pi)
                b = _TWO_PI - b
                a += math.pi
                g += math.pi
            a %= _TWO_PI
            g %= _TWO_PI
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "gamma", g)

    def angles(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


def random_rotation(rng: np.random.Generator) -> RotationSpec:
    """Haar-distributed rotation: uniform alpha, gamma and uniform cos(beta)."""
    alpha = rng.uniform(0.0, _TWO_PI)
    gamma = rng.uniform(0.0, _TWO_PI)
    beta = math.acos(rng.uniform(-1.0, 1.0))
    return RotationSpec(alpha, beta, gamma)


@dataclass(eq=False)
class IrrepGenerators:
    """The three real antisymmetric generators of the weight-ell irrep."""

    ell: int
    gen_x: np.ndarray
    gen_y: np.ndarray
    gen_z: np.ndarray
    _eig: dict = field(default_factory=dict, repr=False)

    @property
    def dimension(self) -> int:
        return 2 * self.ell + 1

    @property
    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.gen_x, self.gen_y, self.gen_z)


def _angular_momentum(ell: int):
    """Complex J_x, J_y, J_z in the eigenbasis of J_z (m ascending)."""
    ms = np.arange(-ell, ell + 1, dtype=float)
    jz = np.diag(ms.astype(complex))
    raise_coeff = np.sqrt(ell * (ell + 1) - ms[:-1] * (ms[:-1] + 1))
    jp = np.zeros((2 * ell + 1, 2 * ell + 1), dtype=complex)
    jp[np.arange(1, 2 * ell + 1), np.arange(0, 2 * ell)] = raise_coeff
    jm = jp.conj().T
    jx = (jp + jm) / 2.0
    jy = (jp - jm) / 2.0j
    return jx, jy, jz


def _complex_to_real_unitary(ell: int) -> np.ndarray:
    """Unitary mapping complex harmonics to the real cosine/sine basis."""
    d = 2 * ell + 1
    u = np.zeros((d, d), dtype=complex)
    u[ell, ell] = 1.0
    rt = 1.0 / math.sqrt(2.0)
    for m in range(1, ell + 1):
        cs = (-1.0) ** m
        u[ell + m, ell - m] = rt
        u[ell + m, ell + m] = cs * rt
        u[ell - m, ell - m] = 1j * rt
        u[ell - m, ell + m] = -1j * cs * rt
    return u


def _to_real_antisym(m: np.ndarray) -> np.ndarray:
    imag = np.max(np.abs(m.imag))
    if imag > 1e-12:
        raise ArithmeticError(f"generator has imaginary residue {imag:.3e}")
    r = m.real
    return (r - r.T) / 2.0


@lru_cache(maxsize=None)
def build_generators(ell: int) -> IrrepGenerators:
    """Generators of the real weight-ell irrep of SO(3); requires ell >= 1."""
    if ell < 1:
        raise DimensionError(f"irreducible weight must be >= 1, got {ell}")
    jx, jy, jz = _angular_momentum(ell)
    u = _complex_to_real_unitary(ell)
    uh = u.conj().T
    gen_x = _to_real_antisym(u @ (1j * jx) @ uh)
    gen_y = _to_real_antisym(u @ (-1j * jy) @ uh)
    gen_z = _to_real_antisym(u @ (1j * jz) @ uh)
    gens = IrrepGenerators(ell=ell, gen_x=gen_x, gen_y=gen_y, gen_z=gen_z)
    _validate_generators(gens)
    for g in gens.matrices:
        g.setflags(write=False)
    return gens


def _validate_generators(gens: IrrepGenerators) -> None:
    gx, gy, gz = gens.matrices
    def comm(a, b):
        m = a @ b
        return m - m.T
    worst = max(
        np.max(np.abs(comm(gx, gy) - gz)),
        np.max(np.abs(comm(gy, gz) - gx)),
        np.max(np.abs(comm(gz, gx) - gy)),
    )
    if worst > 1e-10:
        raise ArithmeticError(f"so(3) bracket relations violated by {worst:.3e}")
    ell = gens.ell
    casimir = gx @ gx + gy @ gy + gz @ gz
    defect = np.max(np.abs(casimir + ell * (ell + 1) * np.eye(gens.dimension)))
    if defect > 1e-8:
        raise ArithmeticError(f"Casimir defect {defect:.3e} at weight {ell}")


def _axis_eig(gens: IrrepGenerators, axis: str):
    """Eigendecomposition of i * gen_axis (Hermitian), cached per instance."""
    if axis not in gens._eig:
        g = {"x": gens.gen_x, "y": gens.gen_y, "z": gens.gen_z}[axis]
        w, vecs = np.linalg.eigh(1j * g)
        gens._eig[axis] = (w, vecs)
    return gens._eig[axis]


def _axis_exp(gens: IrrepGenerators, axis: str, angle: float) -> np.ndarray:
    """exp(angle * gen_axis) through the cached unitary diagonalization."""
    w, vecs = _axis_eig(gens, axis)
    phases = np.exp(-1j * angle * w)
    return ((vecs * phases) @ vecs.conj().T).real


def _axis_exp_batch(gens: IrrepGenerators, axis: str, angles: np.ndarray) -> np.ndarray:
    w, vecs = _axis_eig(gens, axis)
    phases = np.exp(-1j * np.multiply.outer(np.asarray(angles, dtype=float), w))
    return np.einsum("aj,tj,bj->tab", vecs, phases, vecs.conj()).real


def rep_matrix(gens: IrrepGenerators, rot: RotationSpec) -> np.ndarray:
    """Representation matrix exp(a gen_z) exp(b gen_y) exp(g gen_z)."""
    a, b, g = rot.angles()
    q = _axis_exp(gens, "z", a) @ _axis_exp(gens, "y", b) @ _axis_exp(gens, "z", g)
    defect = np.max(np.abs(q.T @ q - np.eye(q.shape[0])))
    if defect > 1e-10:
        raise ArithmeticError(f"representation matrix not orthogonal, defect {defect:.3e}")
    return q


def rep_matrix_batch(gens: IrrepGenerators, alphas, betas, gammas) -> np.ndarray:
    """Stack of representation matrices for arrays of Euler angles."""
    ez_a = _axis_exp_batch(gens, "z", alphas)
    ey_b = _axis_exp_batch(gens, "y", betas)
    ez_g = _axis_exp_batch(gens, "z", gammas)
    return ez_a @ ey_b @ ez_g


def _generator_triple(gens) -> list[np.ndarray]:
    if isinstance(gens, IrrepGenerators):
        return list(gens.matrices)
    mats = [np.asarray(g, dtype=float) for g in gens]
    if not mats:
        raise ValueError("no generators given")
    d = mats[0].shape[0]
    for g in mats:
        if g.ndim != 2 or g.shape != (d, d):
            raise DimensionError("generators must be square matrices of equal size")
    return mats


def commutant_dimension(gens, tol_factor: float = DEFAULT_RANK_TOL) -> int:
    """Dimension of the space of matrices commuting with every generator.

    Equals 1 exactly when the generators act irreducibly with real
    commutant field (the case for the harmonic representations here);
    a direct sum of two copies of the same irrep gives 4.
    """
    mats = _generator_triple(gens)
    d = mats[0].shape[0]
    eye = np.eye(d)
    blocks = [np.kron(eye, g.T) - np.kron(g, eye) for g in mats]
    stacked = np.vstack(blocks)
    rank, _, _ = svd_row_basis(stacked, tol_factor)
    return d * d - rank


def common_fixed_subspace_dim(gens, tol_factor: float = DEFAULT_RANK_TOL) -> int:
    """Dimension of the joint kernel of the generators.

    Zero means no vector is fixed by every one-parameter rotation, which
    for connected groups rules out one dimensional invariant subspaces.
    """
    mats = _generator_triple(gens)
    stacked = np.vstack(mats)
    if np.max(np.abs(stacked)) == 0.0:
        return mats[0].shape[0]
    rank, _, _ = svd_row_basis(stacked, tol_factor)
    return mats[0].shape[0] - rank


def _rot_z(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rot_y(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def cartesian_rotation(rot: RotationSpec) -> np.ndarray:
    """The 3x3 point rotation R_z(alpha) R_y(beta) R_z(gamma)."""
    return _rot_z(rot.alpha) @ _rot_y(rot.beta) @ _rot_z(rot.gamma)


def euler_zyz_from_matrix(r: np.ndarray) -> RotationSpec:
    """Euler angles of a 3x3 special orthogonal matrix (Z-Y-Z order)."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        raise DimensionError("need a 3x3 rotation matrix")
    beta = math.acos(min(1.0, max(-1.0, r[2, 2])))
    if math.sin(beta) > 1e-9:
        alpha = math.atan2(r[1, 2], r[0, 2])
        gamma = math.atan2(r[2, 1], -r[2, 0])
    elif r[2, 2] > 0.0:
        # beta ~ 0: only alpha + gamma is determined
        alpha = math.atan2(r[1, 0], r[0, 0])
        gamma = 0.0
    else:
        # beta ~ pi: only alpha - gamma is determined
        alpha = math.atan2(-r[0, 1], r[1, 1])
        gamma = 0.0
    return RotationSpec(alpha, beta, gamma)
