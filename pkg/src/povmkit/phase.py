"""Phase-space analysis on the truncated Fock space.

Covers the covariant observable built from a seed vector state: Husimi
Q-functions, displacement-operator characteristic functions, the planar
Fourier transform in the convention

    fhat(w) = (1/pi) * integral f(z) exp(-i (z conj(w) + conj(z) w)) d^2 z,

zero-set scans of the characteristic function (whose strict positivity is
the extremality criterion for the induced covariant observable), the
explicit split of the first-excited-state observable into two distinct
halves, and a grid discretization of the covariant POVM itself.

For a state exactly supported below its cutoff, Q values and characteristic
values computed from the closed-form matrix elements are exact at any z;
truncated displacement matrices used as operators are reliable only inside
a guard disk that shrinks with |z|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import DEFAULT_TOL, DiscretePovm, ToleranceConfig
from .errors import CutoffError, GridError, ValidationError
from .fock import FockVector

__all__ = [
    "PhaseGrid",
    "ScanVerdict",
    "H1DecompositionReport",
    "IcReport",
    "DiscretizationInfo",
    "guard_radius",
    "laguerre",
    "displacement_matrix",
    "q_function",
    "char_function",
    "q_fourier_number_analytic",
    "q_fourier",
    "extremality_scan",
    "verify_h1_decomposition",
    "ic_indicator",
    "discretize_covariant_povm",
]


@dataclass(frozen=True)
class PhaseGrid:
    """Square sampling lattice covering [-extent, extent]^2, symmetric about 0."""

    extent: float
    step: float

    def __post_init__(self):
        if self.extent <= 0 or self.step <= 0:
            raise GridError("extent and step must be positive")
        ratio = self.extent / self.step
        if abs(ratio - round(ratio)) > 1e-9:
            raise GridError(f"extent/step must be an integer, got {ratio!r}")

    @property
    def half_count(self) -> int:
        return int(round(self.extent / self.step))

    @property
    def axis(self) -> np.ndarray:
        m = self.half_count
        return np.arange(-m, m + 1) * self.step

    def mesh(self):
        """(X, Y) with X varying along the first index."""
        ax = self.axis
        return np.meshgrid(ax, ax, indexing="ij")

    def cell_centers(self) -> np.ndarray:
        """Complex centers of the (2m)^2 cells tiling the square, x-major."""
        m = self.half_count
        c = (np.arange(2 * m) - m + 0.5) * self.step
        cx, cy = np.meshgrid(c, c, indexing="ij")
        return (cx + 1j * cy).ravel()

    def trapezoid_weights(self) -> np.ndarray:
        w = np.ones(2 * self.half_count + 1)
        w[0] = w[-1] = 0.5
        return w


def guard_radius(cutoff: int) -> float:
    """Largest |z| at which the truncated displacement keeps a nonempty
    guard block (cutoff - ceil(4 |z| sqrt(cutoff)) >= 1)."""
    return (cutoff - 1) / (4.0 * math.sqrt(cutoff))


def laguerre(n: int, t):
    """Laguerre polynomial L_n(t), elementwise over arrays."""
    out = _kernels.laguerre_values(n, t)
    return float(out) if np.ndim(t) == 0 else np.asarray(out)


def displacement_matrix(z: complex, cutoff: int) -> np.ndarray:
    """Truncated displacement operator D(z) from the closed-form matrix elements.

    Refuses when the guard block is empty, i.e. when no leading principal
    block of the truncation can be trusted as a unitary.
    """
    z = complex(z)
    guard = cutoff - math.ceil(4 * abs(z) * math.sqrt(cutoff))
    if guard < 1:
        raise GridError(
            f"|z|={abs(z):.3f} too large for cutoff {cutoff} (guard radius {guard_radius(cutoff):.3f})"
        )
    return _kernels.displacement_matrix(z, cutoff)


def q_function(psi: FockVector, z):
    """Husimi density Q_psi(z) = |<psi|eta_z>|^2 (exact for the stored coefficients)."""
    overlaps = _kernels.coherent_overlaps(psi.coeffs, np.asarray(z, dtype=np.complex128))
    out = np.abs(overlaps) ** 2
    return float(out) if np.ndim(z) == 0 else out


def char_function(psi: FockVector, z):
    """Characteristic function <psi|D(z)|psi> on the truncated space."""
    out = _kernels.char_values(psi.coeffs, np.asarray(z, dtype=np.complex128))
    return complex(out) if np.ndim(z) == 0 else np.asarray(out)


def q_fourier_number_analytic(n: int, w):
    """Closed form L_n(|w|^2) e^{-|w|^2} for the transformed number-state Q-function."""
    t = np.abs(np.asarray(w, dtype=np.complex128)) ** 2
    out = _kernels.laguerre_values(n, t) * np.exp(-t)
    return float(out) if np.ndim(w) == 0 else np.asarray(out)


def q_fourier(psi: FockVector, w, grid: PhaseGrid):
    """Planar Fourier transform of Q_psi by trapezoid quadrature on the grid.

    Refuses when the state's Husimi mass outside the grid exceeds 1e-10
    (Gaussian decay makes the trapezoid rule spectrally accurate otherwise).
    """
    mass = psi.mass_outside_disk(grid.extent)
    if mass >= 1e-10:
        raise GridError(
            f"grid extent {grid.extent} leaves Husimi mass {mass:.3e} outside; enlarge the grid"
        )
    ax = grid.axis
    x, y = grid.mesh()
    q = q_function(psi, x + 1j * y)
    wts = grid.trapezoid_weights()
    f = q * np.outer(wts, wts) * (grid.step**2 / np.pi)
    ws = np.atleast_1d(np.asarray(w, dtype=np.complex128))
    ex = np.exp(-2j * np.outer(ws.real, ax))
    ey = np.exp(-2j * np.outer(ws.imag, ax))
    vals = np.einsum("wx,xy,wy->w", ex, f, ey)
    return complex(vals[0]) if np.ndim(w) == 0 else vals.reshape(np.shape(w))


@dataclass(frozen=True)
class ScanVerdict:
    """Outcome of a zero-set scan of |char_function| over a clipped grid.

    The scan is numerical evidence at one cutoff and resolution, not a
    proof: consistent_with_extremal only states that no zero was found.
    """

    min_abs: float
    argmin: complex
    zero_loci: tuple
    consistent_with_extremal: bool
    scan_radius: float
    cutoff: int

    def as_dict(self) -> dict:
        return {
            "min_abs": self.min_abs,
            "argmin": [self.argmin.real, self.argmin.imag],
            "zero_loci": [[z.real, z.imag] for z in self.zero_loci],
            "consistent_with_extremal": self.consistent_with_extremal,
            "scan_radius": self.scan_radius,
            "cutoff": self.cutoff,
        }


_INVPHI = (math.sqrt(5.0) - 1) / 2


def _golden_min(f, lo: float, hi: float, xtol: float) -> float:
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (a + b) / 2


def _coordinate_descent(chi, x: float, y: float, h: float, radius: float) -> tuple:
    """Minimize |chi| by alternating line searches, constrained to the disk."""
    xtol = h / 512
    for _ in range(40):
        x0, y0 = x, y
        half = math.sqrt(max(radius * radius - y * y, 0.0))
        lo, hi = max(x - h, -half), min(x + h, half)
        if lo < hi:
            x = _golden_min(lambda t: abs(chi(t + 1j * y)), lo, hi, xtol)
        half = math.sqrt(max(radius * radius - x * x, 0.0))
        lo, hi = max(y - h, -half), min(y + h, half)
        if lo < hi:
            y = _golden_min(lambda t: abs(chi(x + 1j * t)), lo, hi, xtol)
        if abs(x - x0) < h / 64 and abs(y - y0) < h / 64:
            break
    return x, y


def _gauss_newton_polish(chi, x: float, y: float, h: float, radius: float) -> tuple:
    """Least-squares Newton steps on (Re chi, Im chi); quadratic convergence
    onto zero curves where plain Newton is singular."""
    delta = h / 1024
    for _ in range(12):
        v = chi(x + 1j * y)
        if abs(v) < 1e-15:
            break
        dx = (chi(x + delta + 1j * y) - chi(x - delta + 1j * y)) / (2 * delta)
        dy = (chi(x + 1j * (y + delta)) - chi(x + 1j * (y - delta))) / (2 * delta)
        jac = np.array([[dx.real, dy.real], [dx.imag, dy.imag]])
        rhs = np.array([v.real, v.imag])
        step = np.linalg.lstsq(jac, rhs, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            break
        nx, ny = x - step[0], y - step[1]
        if nx * nx + ny * ny > radius * radius or abs(v) <= abs(chi(nx + 1j * ny)):
            break
        x, y = nx, ny
    return x, y


def _local_minima_mask(values: np.ndarray) -> np.ndarray:
    """Points not larger than any finite 4-neighbor (edges padded with +inf)."""
    padded = np.pad(values, 1, constant_values=np.inf)
    center = padded[1:-1, 1:-1]
    ok = np.ones_like(center, dtype=bool)
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        ok &= center <= padded[1 + dx: padded.shape[0] - 1 + dx, 1 + dy: padded.shape[1] - 1 + dy]
    return ok


def extremality_scan(psi: FockVector, grid: PhaseGrid, zero_tol: float = 1e-6,
                     refine_below: float | None = None) -> ScanVerdict:
    """Scan |char_function| for zeros inside the reliable disk.

    Grid points outside the guard radius of the cutoff are excluded.  Local
    minima below ``refine_below`` (default: max(10 * zero_tol, 1e-3), the
    floor catches zero curves threading between grid points) are refined by
    coordinate descent plus a Gauss-Newton polish; refined points count as
    zeros only if |char| stays below zero_tol after doubling the cutoff,
    which filters minima manufactured by truncation.
    """
    radius = guard_radius(psi.cutoff)
    x, y = grid.mesh()
    mask = x * x + y * y <= radius * radius
    if not mask.any():
        raise GridError(
            f"no grid point inside guard radius {radius:.3f}; reduce step or raise cutoff"
        )
    zs = (x + 1j * y)[mask]
    vals_flat = np.abs(_kernels.char_values(psi.coeffs, zs))
    values = np.full(x.shape, np.inf)
    values[mask] = vals_flat

    if refine_below is None:
        refine_below = max(10 * zero_tol, 1e-3)
    minima = _local_minima_mask(values) & mask & (values < refine_below)

    chi = lambda z: complex(_kernels.char_values(psi.coeffs, np.asarray(z)))
    doubled = psi.padded(2 * psi.cutoff)
    chi2 = lambda z: complex(_kernels.char_values(doubled.coeffs, np.asarray(z)))

    refined = []
    for i, j in zip(*np.nonzero(minima)):
        px, py = _coordinate_descent(chi, x[i, j], y[i, j], grid.step, radius)
        px, py = _gauss_newton_polish(chi, px, py, grid.step, radius)
        refined.append((px, py, abs(chi(px + 1j * py))))

    zero_loci = []
    for px, py, val in sorted(refined, key=lambda t: (round(t[0], 9), round(t[1], 9))):
        if val >= zero_tol or abs(chi2(px + 1j * py)) >= zero_tol:
            continue
        z = px + 1j * py
        if all(abs(z - seen) >= grid.step / 2 for seen in zero_loci):
            zero_loci.append(z)

    min_abs = float(vals_flat.min())
    flat_idx = int(np.argmin(values))
    argmin = complex(x.ravel()[flat_idx] + 1j * y.ravel()[flat_idx])
    for px, py, val in refined:
        if val < min_abs:
            min_abs, argmin = val, px + 1j * py
    return ScanVerdict(
        min_abs=min_abs,
        argmin=argmin,
        zero_loci=tuple(zero_loci),
        consistent_with_extremal=not zero_loci,
        scan_radius=radius,
        cutoff=psi.cutoff,
    )


@dataclass(frozen=True)
class H1DecompositionReport:
    """Quadrature check of the cancellation integral behind the explicit
    two-way split of the first-excited-state covariant observable."""

    points: tuple
    residuals: tuple
    max_residual: float
    density_min: float
    density_max: float
    density_mean_residual: float

    @property
    def ok(self) -> bool:
        return self.density_min >= 0.0 and self.density_max <= 2.0

    def as_dict(self) -> dict:
        return {
            "points": [[z.real, z.imag] for z in self.points],
            "residuals": list(self.residuals),
            "max_residual": self.max_residual,
            "density_min": self.density_min,
            "density_max": self.density_max,
            "density_mean_residual": self.density_mean_residual,
            "ok": self.ok,
        }


def verify_h1_decomposition(grid: PhaseGrid, test_points) -> H1DecompositionReport:
    """Check the ingredients of the h_1 split at the given test points.

    (a) the integral of cos(w + conj w) e^{-|z-w|^2} |z-w|^2 over the plane
        vanishes for each test z (quadrature residual reported);
    (b) the densities 1 +/- cos(z + conj z) stay within [0, 2];
    (c) the two densities average to 1 identically.
    """
    points = tuple(complex(z) for z in test_points)
    max_abs = max((abs(z) for z in points), default=0.0)
    if grid.extent < max_abs + 8:
        raise GridError(
            f"grid extent {grid.extent} must be >= max|z| + 8 = {max_abs + 8:.1f}"
        )
    x, y = grid.mesh()
    wts = grid.trapezoid_weights()
    w2 = np.outer(wts, wts) * grid.step**2
    cosines = np.cos(2 * x)
    residuals = []
    for z in points:
        d2 = (x - z.real) ** 2 + (y - z.imag) ** 2
        integrand = cosines * np.exp(-d2) * d2
        residuals.append(abs(float(np.sum(integrand * w2))))
    density_plus = 1.0 + cosines
    mean_resid = float(np.abs((density_plus + (1.0 - cosines)) / 2 - 1.0).max())
    return H1DecompositionReport(
        points=points,
        residuals=tuple(residuals),
        max_residual=max(residuals),
        density_min=float(min(density_plus.min(), (1.0 - cosines).min())),
        density_max=float(max(density_plus.max(), (1.0 - cosines).max())),
        density_mean_residual=mean_resid,
    )


@dataclass(frozen=True)
class IcReport:
    """Area statistics of the near-zero set of the characteristic function.

    A zero set of measure zero (isolated points or curves) is what the
    informational-completeness criterion tolerates; positive-area zero sets
    are reported as inconsistent rather than guessed around.
    """

    tol: float
    n_total: int
    n_below: int
    fraction: float
    zero_measure: bool
    ic_consistent: bool

    def as_dict(self) -> dict:
        return {
            "tol": self.tol,
            "n_total": self.n_total,
            "n_below": self.n_below,
            "fraction": self.fraction,
            "zero_measure": self.zero_measure,
            "ic_consistent": self.ic_consistent,
        }


def ic_indicator(psi: FockVector, grid: PhaseGrid, tol: float = 1e-3) -> IcReport:
    """Fraction of scanned cells where |char_function| < tol."""
    radius = guard_radius(psi.cutoff)
    x, y = grid.mesh()
    mask = x * x + y * y <= radius * radius
    if not mask.any():
        raise GridError("no grid point inside the guard radius")
    vals = np.abs(_kernels.char_values(psi.coeffs, (x + 1j * y)[mask]))
    n_below = int(np.count_nonzero(vals < tol))
    fraction = n_below / vals.size
    zero_measure = fraction <= 0.01
    return IcReport(tol, int(vals.size), n_below, fraction, zero_measure, zero_measure)


@dataclass(frozen=True)
class DiscretizationInfo:
    n_cells: int
    scale: float
    remainder_trace: float
    remainder_min_eigenvalue: float

    def as_dict(self) -> dict:
        return {
            "n_cells": self.n_cells,
            "scale": self.scale,
            "remainder_trace": self.remainder_trace,
            "remainder_min_eigenvalue": self.remainder_min_eigenvalue,
        }


def discretize_covariant_povm(psi: FockVector, grid: PhaseGrid, cutoff: int,
                              cfg: ToleranceConfig = DEFAULT_TOL):
    """Cell discretization of the covariant observable seeded by |psi><psi|.

    One rank-1 effect per grid cell, sampled at the cell center with weight
    h^2/pi, plus a remainder effect restoring exact normalization.  If the
    cell sum exceeds the identity (possible through quadrature error), all
    cell weights are shrunk by the factor that caps its largest eigenvalue
    at 1, keeping the remainder PSD.

    Returns (povm, info); the remainder is the last effect.
    """
    if psi.cutoff > cutoff:
        raise CutoffError(
            f"state cutoff {psi.cutoff} exceeds requested effect dimension {cutoff}"
        )
    coeffs = psi.padded(cutoff).coeffs if psi.cutoff < cutoff else psi.coeffs
    centers = grid.cell_centers()
    vecs = _kernels.displaced_vectors(coeffs, centers) * (grid.step / math.sqrt(math.pi))
    cell_sum = vecs.T @ vecs.conj()
    cell_sum = (cell_sum + cell_sum.conj().T) / 2
    lam_max = float(np.linalg.eigvalsh(cell_sum)[-1])
    scale = 1.0 if lam_max <= 1.0 else 1.0 / lam_max
    remainder = np.eye(cutoff, dtype=np.complex128) - scale * cell_sum
    remainder = (remainder + remainder.conj().T) / 2
    min_eig = float(np.linalg.eigvalsh(remainder)[0])
    if min_eig < -cfg.psd_tol:
        raise ValidationError(
            f"remainder effect not PSD (min eigenvalue {min_eig:.3e}); "
            "shrink the grid step or lower the extent"
        )
    effects = [scale * np.outer(v, v.conj()) for v in vecs]
    effects.append(remainder)
    labels = [f"cell({z.real:.6g},{z.imag:.6g})" for z in centers] + ["remainder"]
    povm = DiscretePovm.from_effects(effects, labels, cfg)
    info = DiscretizationInfo(
        n_cells=len(centers),
        scale=scale,
        remainder_trace=float(np.trace(remainder).real),
        remainder_min_eigenvalue=min_eig,
    )
    return povm, info
