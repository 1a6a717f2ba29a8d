"""Truncated Fock-space state vectors: number, coherent, and squeezed states.

A FockVector stores the first N coefficients of a state in the number basis
h_0 ... h_{N-1} together with an estimate of the l2 mass lost to truncation.
Constructors refuse when that loss exceeds MAX_TAIL, since every downstream
quantity would silently degrade.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.special import gammainc, gammaincc, gammaln

from . import _kernels
from .core import DensityState
from .errors import CutoffError

__all__ = [
    "FockVector",
    "number_state",
    "coherent_state",
    "squeezed_state",
    "annihilation_matrix",
    "MAX_TAIL",
]

MAX_TAIL = 1e-6


@dataclass(frozen=True)
class FockVector:
    """Unit vector in the truncated number basis.

    tail_bound estimates the squared-norm mass the ideal state carries above
    the cutoff; coefficients are renormalized after truncation.
    """

    cutoff: int
    coeffs: np.ndarray
    tail_bound: float

    def __post_init__(self):
        self.coeffs.flags.writeable = False

    def padded(self, new_cutoff: int) -> "FockVector":
        """Same state embedded at a larger cutoff (zero-padded)."""
        if new_cutoff < self.cutoff:
            raise CutoffError("padding target below current cutoff")
        c = np.zeros(new_cutoff, dtype=np.complex128)
        c[: self.cutoff] = self.coeffs
        return FockVector(new_cutoff, c, self.tail_bound)

    def density(self) -> DensityState:
        return DensityState.pure(self.coeffs)

    def mass_outside_disk(self, radius: float) -> float:
        """Upper bound for (1/pi) * integral of the Husimi density over |z| > radius."""
        n = np.arange(self.cutoff)
        tails = gammaincc(n + 1, radius**2)
        return float(np.sum(np.abs(self.coeffs) ** 2 * tails))


def _finalize(coeffs: np.ndarray, cutoff: int, tail: float) -> FockVector:
    if tail > MAX_TAIL:
        raise CutoffError(
            f"cutoff {cutoff} too small: truncated mass {tail:.3e} exceeds {MAX_TAIL:.0e}"
        )
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    return FockVector(cutoff, coeffs / np.linalg.norm(coeffs), tail)


def number_state(n: int, cutoff: int) -> FockVector:
    """Basis state h_n at the given cutoff."""
    if not 0 <= n < cutoff:
        raise CutoffError(f"number state index {n} requires cutoff > {n}")
    c = np.zeros(cutoff, dtype=np.complex128)
    c[n] = 1.0
    return FockVector(cutoff, c, 0.0)


def coherent_state(z: complex, cutoff: int) -> FockVector:
    """Displaced vacuum eta_z with coefficients e^{-|z|^2/2} z^n / sqrt(n!).

    The truncated Poisson weight mass above the cutoff is the exact tail.
    """
    z = complex(z)
    x = abs(z) ** 2
    n = np.arange(cutoff)
    if z == 0:
        return number_state(0, cutoff)
    mag = np.exp(-x / 2 + n * np.log(abs(z)) - 0.5 * gammaln(n + 1))
    coeffs = mag * np.exp(1j * np.angle(z) * n)
    tail = float(gammainc(cutoff, x))  # P(Poisson(x) >= cutoff)
    return _finalize(coeffs, cutoff, tail)


def annihilation_matrix(dim: int) -> np.ndarray:
    """Truncated annihilation operator, a[n-1, n] = sqrt(n)."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=np.float64)), 1).astype(np.complex128)


def squeezed_state(r: float, theta: float = 0.0, z0: complex = 0.0, cutoff: int = 32) -> FockVector:
    """Displaced squeezed vacuum D(z0) S(r, theta) h_0.

    Uses S = exp[(conj(xi) a^2 - xi a^dagger^2)/2] with xi = r e^{i theta},
    evaluated by a truncated matrix exponential at double the requested
    cutoff so the retained coefficients are accurate; the measured mass
    above the cutoff becomes the tail bound.
    """
    work = max(2 * cutoff, cutoff + 16)
    a = annihilation_matrix(work)
    xi = r * np.exp(1j * theta)
    gen = 0.5 * (np.conj(xi) * (a @ a) - xi * (a.conj().T @ a.conj().T))
    vec = expm(gen)[:, 0]
    z0 = complex(z0)
    if z0 != 0:
        vec = _kernels.displacement_matrix(z0, work) @ vec
    tail = float(np.sum(np.abs(vec[cutoff:]) ** 2))
    return _finalize(vec[:cutoff], cutoff, tail)
