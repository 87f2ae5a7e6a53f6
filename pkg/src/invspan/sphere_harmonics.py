"""Real spherical harmonics, random coefficient models, and field synthesis.

Harmonics Y_lm are real valued and normalized so that the integral of
Y_lm^2 over the sphere (surface measure, total mass 4 pi) is one:

    m = 0:  Y_l0(theta)
    m > 0:  sqrt(2) L_lm(cos theta) cos(m phi)
    m < 0:  sqrt(2) L_l|m|(cos theta) sin(|m| phi)

with L_lm the fully normalized associated Legendre functions computed by
the standard stable upward recursion (no Condon-Shortley sign; the sign
convention matches the complex-to-real unitary used for the generators in
so3_irreps, which the rotation equivariance tests pin down).

Random fields follow the decomposition of an exchangeable-and-invariant
coefficient block into a radius times an independent uniform direction:
a_l. = eta * u with u uniform on the unit sphere of R^(2l+1) and
E[eta^2] = (2l+1) C_l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DimensionError
from .so3_irreps import RotationSpec, build_generators, rep_matrix

__all__ = [
    "CoefficientArray",
    "PowerSpectrum",
    "RADIAL_LAWS",
    "SphereGrid",
    "dump_coefficients",
    "empirical_power_spectrum",
    "eval_ylm",
    "gauss_legendre_grid",
    "grid_mean_square",
    "laplacian_eigen_check",
    "lm_index",
    "load_coefficients",
    "read_power_spectrum",
    "rotate_coefficient_array",
    "rotate_coefficients",
    "sample_coefficient_arrays",
    "sample_coefficients",
    "sample_degree_block",
    "synthesize",
    "synthesize_batch",
    "write_power_spectrum",
    "ylm_matrix",
]

RADIAL_LAWS = ("chi", "lognormal", "constant")

MAX_LMAX = 64


def lm_index(ell: int, m: int) -> int:
    """Position of (ell, m) in the flat coefficient layout, m ascending."""
    if abs(m) > ell:
        raise DimensionError(f"|m| = {abs(m)} exceeds ell = {ell}")
    return ell * ell + ell + m


def _check_lmax(lmax: int) -> None:
    if lmax < 0 or lmax > MAX_LMAX:
        raise DimensionError(f"lmax must lie in 0..{MAX_LMAX}, got {lmax}")


def _legendre_normalized(lmax: int, x: np.ndarray, s: np.ndarray) -> np.ndarray:
    """L_lm(x) for 0 <= m <= l <= lmax, shape (lmax+1, lmax+1, npts).

    x = cos(theta), s = sin(theta) >= 0.  Entry [l, m] is zero for m > l.
    """
    npts = x.shape[0]
    out = np.zeros((lmax + 1, lmax + 1, npts))
    out[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for m in range(1, lmax + 1):
        out[m, m] = out[m - 1, m - 1] * s * math.sqrt((2 * m + 1) / (2.0 * m))
    for m in range(0, lmax):
        out[m + 1, m] = x * math.sqrt(2 * m + 3.0) * out[m, m]
    for m in range(0, lmax + 1):
        for ell in range(m + 2, lmax + 1):
            a = math.sqrt((4.0 * ell * ell - 1.0) / (ell * ell - m * m))
            b = math.sqrt(((ell - 1.0) ** 2 - m * m) / (4.0 * (ell - 1.0) ** 2 - 1.0))
            out[ell, m] = a * (x * out[ell - 1, m] - b * out[ell - 2, m])
    return out


def _as_points(theta, phi):
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if theta.shape != phi.shape or theta.ndim != 1:
        raise DimensionError("theta and phi must be 1-d arrays of equal length")
    if np.any(theta < -1e-9) or np.any(theta > math.pi + 1e-9):
        raise ValueError("theta must lie in [0, pi]")
    return theta, phi


def ylm_matrix(lmax: int, theta, phi) -> np.ndarray:
    """All harmonics up to lmax at the given points, shape ((lmax+1)^2, npts)."""
    _check_lmax(lmax)
    theta, phi = _as_points(theta, phi)
    x = np.cos(theta)
    s = np.sin(theta)
    leg = _legendre_normalized(lmax, x, s)
    out = np.zeros(((lmax + 1) ** 2, theta.shape[0]))
    rt2 = math.sqrt(2.0)
    for ell in range(lmax + 1):
        out[lm_index(ell, 0)] = leg[ell, 0]
        for m in range(1, ell + 1):
            cos_m = np.cos(m * phi)
            sin_m = np.sin(m * phi)
            out[lm_index(ell, m)] = rt2 * leg[ell, m] * cos_m
            out[lm_index(ell, -m)] = rt2 * leg[ell, m] * sin_m
    return out


def eval_ylm(ell: int, m: int, theta, phi):
    """Real spherical harmonic of degree ell and order m.

    Accepts scalars or matching 1-d arrays; returns the same shape.
    """
    if ell < 0 or ell > MAX_LMAX:
        raise DimensionError(f"degree must lie in 0..{MAX_LMAX}, got {ell}")
    if abs(m) > ell:
        raise DimensionError(f"|m| = {abs(m)} exceeds ell = {ell}")
    scalar = np.isscalar(theta) and np.isscalar(phi)
    theta, phi = _as_points(theta, phi)
    x = np.cos(theta)
    s = np.sin(theta)
    am = abs(m)
    # climb the diagonal to L_mm, then upward in degree to L_lm
    cur = np.full(theta.shape, 1.0 / math.sqrt(4.0 * math.pi))
    for k in range(1, am + 1):
        cur = cur * s * math.sqrt((2 * k + 1) / (2.0 * k))
    if ell > am:
        prev = cur
        cur = x * math.sqrt(2 * am + 3.0) * cur
        for k in range(am + 2, ell + 1):
            a = math.sqrt((4.0 * k * k - 1.0) / (k * k - am * am))
            b = math.sqrt(((k - 1.0) ** 2 - am * am) / (4.0 * (k - 1.0) ** 2 - 1.0))
            cur, prev = a * (x * cur - b * prev), cur
    if m > 0:
        vals = math.sqrt(2.0) * cur * np.cos(m * phi)
    elif m < 0:
        vals = math.sqrt(2.0) * cur * np.sin(am * phi)
    else:
        vals = cur
    return float(vals[0]) if scalar else vals


def laplacian_eigen_check(ell: int, h: float, n_theta: int = 7, n_phi: int = 9) -> float:
    """Max |Delta Y_lm + l(l+1) Y_lm| over a fixed interior point set.

    Delta is the coordinate Laplace-Beltrami operator
    (1/sin t) d/dt (sin t dY/dt) + (1/sin^2 t) d^2 Y/dp^2, discretized
    with second-order central differences of step h.
    """
    if not (0.0 < h < 0.1):
        raise ValueError(f"step must lie in (0, 0.1), got {h}")
    thetas = np.linspace(0.2, math.pi - 0.2, n_theta)
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    tt, pp = [a.ravel() for a in np.meshgrid(thetas, phis, indexing="ij")]
    sin_t = np.sin(tt)
    sin_p = np.sin(tt + h / 2.0)
    sin_m = np.sin(tt - h / 2.0)
    worst = 0.0
    for m in range(-ell, ell + 1):
        y0 = eval_ylm(ell, m, tt, pp)
        y_tp = eval_ylm(ell, m, tt + h, pp)
        y_tm = eval_ylm(ell, m, tt - h, pp)
        y_pp = eval_ylm(ell, m, tt, pp + h)
        y_pm = eval_ylm(ell, m, tt, pp - h)
        theta_part = (sin_p * (y_tp - y0) - sin_m * (y0 - y_tm)) / (h * h * sin_t)
        phi_part = (y_pp - 2.0 * y0 + y_pm) / (h * h * sin_t * sin_t)
        residual = np.max(np.abs(theta_part + phi_part + ell * (ell + 1) * y0))
        worst = max(worst, float(residual))
    return worst


@dataclass(frozen=True)
class SphereGrid:
    """Quadrature points (theta, phi) with weights summing to 4 pi."""

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if not (self.theta.shape == self.phi.shape == self.weights.shape):
            raise DimensionError("grid arrays must share one shape")
        if np.any(self.weights <= 0.0):
            raise ValueError("grid weights must be positive")
        total = float(np.sum(self.weights))
        if abs(total - 4.0 * math.pi) > 1e-8:
            raise ValueError(f"grid weights sum to {total}, expected 4 pi")

    @property
    def npoints(self) -> int:
        return self.theta.shape[0]


def gauss_legendre_grid(lmax: int, n_theta: int | None = None, n_phi: int | None = None) -> SphereGrid:
    """Gauss-Legendre x uniform-azimuth grid, exact through degree 2 lmax."""
    _check_lmax(lmax)
    if n_theta is None:
        n_theta = lmax + 1
    if n_phi is None:
        n_phi = 2 * lmax + 1
    x, w = leggauss(n_theta)
    theta_nodes = np.arccos(x)
    phi_nodes = 2.0 * math.pi * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(theta_nodes, phi_nodes, indexing="ij")
    ww = np.repeat(w * (2.0 * math.pi / n_phi), n_phi)
    return SphereGrid(theta=tt.ravel(), phi=pp.ravel(), weights=ww)


@dataclass(frozen=True)
class PowerSpectrum:
    """Angular power values C_0..C_lmax, all finite and nonnegative."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise DimensionError("power spectrum must be a non-empty 1-d array")
        if not np.all(np.isfinite(v)) or np.any(v < 0.0):
            raise ValueError("power values must be finite and nonnegative")
        _check_lmax(v.size - 1)
        object.__setattr__(self, "values", v)

    @property
    def lmax(self) -> int:
        return self.values.size - 1

    @classmethod
    def constant(cls, lmax: int, value: float = 1.0) -> "PowerSpectrum":
        return cls(np.full(lmax + 1, float(value)))


def read_power_spectrum(path) -> PowerSpectrum:
    """Parse 'ell value' lines; blank lines and # comments are skipped."""
    entries: dict[int, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'ell value', got {raw!r}")
            ell = int(parts[0])
            if ell in entries:
                raise ValueError(f"{path}:{lineno}: duplicate degree {ell}")
            entries[ell] = float(parts[1])
    if not entries:
        raise ValueError(f"{path}: no spectrum entries found")
    lmax = max(entries)
    if sorted(entries) != list(range(lmax + 1)):
        raise ValueError(f"{path}: degrees must cover 0..{lmax} without gaps")
    return PowerSpectrum(np.array([entries[ell] for ell in range(lmax + 1)]))


def write_power_spectrum(spectrum: PowerSpectrum, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# angular power spectrum: ell C_ell\n")
        for ell, value in enumerate(spectrum.values):
            fh.write(f"{ell} {float(value)!r}\n")


@dataclass(frozen=True)
class CoefficientArray:
    """Flat coefficient vector of length (lmax+1)^2 in lm_index order."""

    lmax: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != ((self.lmax + 1) ** 2,):
            raise DimensionError(
                f"coefficient vector of shape {v.shape} does not match lmax {self.lmax}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "values", v)

    def block(self, ell: int) -> np.ndarray:
        if ell < 0 or ell > self.lmax:
            raise DimensionError(f"degree {ell} outside 0..{self.lmax}")
        return self.values[ell * ell : (ell + 1) ** 2]


def dump_coefficients(coeffs: CoefficientArray, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("ell,m,value\n")
        for ell in range(coeffs.lmax + 1):
            for m in range(-ell, ell + 1):
                fh.write(f"{ell},{m},{float(coeffs.values[lm_index(ell, m)])!r}\n")


def load_coefficients(path) -> CoefficientArray:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "ell,m,value":
            raise ValueError(f"{path}: expected header 'ell,m,value', got {header!r}")
        rows = {}
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'ell,m,value'")
            ell, m = int(parts[0]), int(parts[1])
            rows[(ell, m)] = float(parts[2])
    if not rows:
        raise ValueError(f"{path}: no coefficients found")
    lmax = max(ell for ell, _ in rows)
    values = np.zeros((lmax + 1) ** 2)
    for ell in range(lmax + 1):
        for m in range(-ell, ell + 1):
            if (ell, m) not in rows:
                raise ValueError(f"{path}: missing coefficient ({ell}, {m})")
            values[lm_index(ell, m)] = rows[(ell, m)]
    return CoefficientArray(lmax=lmax, values=values)


def _unit_rows(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((n, dim))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms < 1e-300):
        bad = norms < 1e-300
        g[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


def _radial_draw(rng: np.random.Generator, law: str, c: float, dim: int, n: int) -> np.ndarray:
    """Radial factors with E[eta^2] = dim * c for each supported law."""
    target = dim * c
    if law == "chi":
        return math.sqrt(c) * np.linalg.norm(rng.standard_normal((n, dim)), axis=1)
    if law == "lognormal":
        return math.sqrt(target) / math.e * np.exp(rng.standard_normal(n))
    if law == "constant":
        return np.full(n, math.sqrt(target))
    raise ValueError(f"unknown radial law {law!r}; expected one of {RADIAL_LAWS}")


def _sample_blocks(rng: np.random.Generator, ell: int, c: float, law: str, n: int) -> np.ndarray:
    dim = 2 * ell + 1
    u = _unit_rows(rng, n, dim)
    eta = _radial_draw(rng, law, c, dim, n)
    return eta[:, None] * u


def sample_degree_block(ell: int, c: float, radial_law: str, n: int, seed) -> np.ndarray:
    """n independent draws of one degree block, shape (n, 2 ell + 1).

    Each row is eta * u with u uniform on the unit sphere of R^(2 ell + 1)
    and eta drawn by the radial law, scaled to E[eta^2] = (2 ell + 1) c.
    """
    if ell < 0 or n < 1 or c < 0.0:
        raise ValueError("need ell >= 0, n >= 1 and c >= 0")
    return _sample_blocks(np.random.default_rng(seed), ell, c, radial_law, n)


def sample_coefficient_arrays(spectrum: PowerSpectrum, radial_law: str, n: int, seed) -> np.ndarray:
    """n coefficient vectors stacked as rows, shape (n, (lmax+1)^2)."""
    if radial_law not in RADIAL_LAWS:
        raise ValueError(f"unknown radial law {radial_law!r}; expected one of {RADIAL_LAWS}")
    if n < 1:
        raise ValueError("need n >= 1")
    rng = np.random.default_rng(seed)
    cols = np.zeros((n, (spectrum.lmax + 1) ** 2))
    for ell, c in enumerate(spectrum.values):
        cols[:, ell * ell : (ell + 1) ** 2] = _sample_blocks(rng, ell, float(c), radial_law, n)
    return cols


def sample_coefficients(spectrum: PowerSpectrum, radial_law: str, seed) -> CoefficientArray:
    """One random coefficient array for the given spectrum and radial law."""
    values = sample_coefficient_arrays(spectrum, radial_law, 1, seed)[0]
    return CoefficientArray(lmax=spectrum.lmax, values=values)


def synthesize(coeffs: CoefficientArray, grid: SphereGrid) -> np.ndarray:
    """Field values sum_lm a_lm Y_lm at the grid points."""
    basis = ylm_matrix(coeffs.lmax, grid.theta, grid.phi)
    return basis.T @ coeffs.values


def synthesize_batch(rows: np.ndarray, lmax: int, grid: SphereGrid) -> np.ndarray:
    """Fields for many stacked coefficient vectors, shape (n, npoints)."""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != (lmax + 1) ** 2:
        raise DimensionError(f"rows of shape {rows.shape} do not match lmax {lmax}")
    basis = ylm_matrix(lmax, grid.theta, grid.phi)
    return rows @ basis


def grid_mean_square(values: np.ndarray, grid: SphereGrid) -> float:
    """Average of values^2 against the normalized surface measure."""
    values = np.asarray(values, dtype=float)
    return float(values**2 @ grid.weights / (4.0 * math.pi))


def rotate_coefficients(ell: int, rot: RotationSpec, block: np.ndarray) -> np.ndarray:
    """Apply the weight-ell representation of a rotation to one block."""
    block = np.asarray(block, dtype=float)
    if block.shape != (2 * ell + 1,):
        raise DimensionError(f"block of shape {block.shape} does not match degree {ell}")
    return rep_matrix(build_generators(ell), rot) @ block


def rotate_coefficient_array(coeffs: CoefficientArray, rot: RotationSpec) -> CoefficientArray:
    """Rotate every degree block; degree zero is untouched."""
    values = coeffs.values.copy()
    for ell in range(1, coeffs.lmax + 1):
        values[ell * ell : (ell + 1) ** 2] = rotate_coefficients(ell, rot, coeffs.block(ell))
    return CoefficientArray(lmax=coeffs.lmax, values=values)


def empirical_power_spectrum(samples) -> tuple[PowerSpectrum, list[np.ndarray]]:
    """Estimated spectrum and per-degree second-moment matrices.

    samples is a list of CoefficientArray or a 2-d stack of coefficient
    rows.  C_l is estimated as the mean of a_lm^2 over samples and m; the
    returned matrices hold the mean of a_lm a_lm' for the off-diagonal
    decorrelation checks.
    """
    if isinstance(samples, np.ndarray):
        rows = np.asarray(samples, dtype=float)
        if rows.ndim != 2:
            raise DimensionError("need a 2-d stack of coefficient rows")
    else:
        arrays = list(samples)
        if not arrays:
            raise ValueError("no samples given")
        lmax = arrays[0].lmax
        if any(a.lmax != lmax for a in arrays):
            raise DimensionError("samples disagree on lmax")
        rows = np.vstack([a.values for a in arrays])
    side = math.isqrt(rows.shape[1])
    if side * side != rows.shape[1]:
        raise DimensionError(f"row length {rows.shape[1]} is not a perfect square")
    lmax = side - 1
    n = rows.shape[0]
    c_hat = np.zeros(lmax + 1)
    moments = []
    for ell in range(lmax + 1):
        block = rows[:, ell * ell : (ell + 1) ** 2]
        second = block.T @ block / n
        moments.append(second)
        c_hat[ell] = float(np.trace(second)) / (2 * ell + 1)
    if np.any(c_hat < 0.0):
        c_hat = np.maximum(c_hat, 0.0)
    return PowerSpectrum(c_hat), moments
