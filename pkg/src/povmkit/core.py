"""Finite-dimensional POVMs and states: data model, validation, statistics.

A POVM with finitely many outcomes is a list of PSD "effect" matrices that
sum to the identity; measurement statistics on a density operator rho follow
the trace pairing p_i = tr(rho M_i).  Everything here is a pure function on
immutable values; sampling takes an explicit seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, ValidationError

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "ValidationReport",
    "DiscretePovm",
    "DensityState",
    "validate_povm",
    "born_probabilities",
    "mix",
    "sample_outcomes",
    "hermiticity_defect",
    "is_hermitian",
    "min_eigenvalue",
    "is_psd",
    "isometry_defect",
    "is_isometry",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances used by validation and rank decisions.

    psd_tol: slack for Hermiticity/positivity checks (eigenvalues >= -psd_tol).
    norm_tol: slack for normalization, reconstruction, and isometry residuals.
    rank_rel_tol: relative threshold (vs. the largest singular/eigen value)
        below which spectral content counts as zero.
    """

    psd_tol: float = 1e-9
    norm_tol: float = 1e-9
    rank_rel_tol: float = 1e-10

    def __post_init__(self):
        for name in ("psd_tol", "norm_tol", "rank_rel_tol"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


DEFAULT_TOL = ToleranceConfig()


def _as_square(matrix, what: str = "matrix") -> np.ndarray:
    a = np.asarray(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"{what} must be square, got shape {a.shape}")
    return a


def hermiticity_defect(matrix) -> float:
    """Spectral norm of the anti-Hermitian part residue, ||A - A^dagger||."""
    a = _as_square(matrix)
    return float(np.linalg.norm(a - a.conj().T, 2))


def is_hermitian(matrix, tol: float = DEFAULT_TOL.psd_tol) -> bool:
    return hermiticity_defect(matrix) <= tol


def min_eigenvalue(matrix) -> float:
    """Smallest eigenvalue of the Hermitian part of the matrix."""
    a = _as_square(matrix)
    h = (a + a.conj().T) / 2
    return float(np.linalg.eigvalsh(h)[0])


def is_psd(matrix, tol: float = DEFAULT_TOL.psd_tol) -> bool:
    """All eigenvalues >= -tol (after symmetrization)."""
    return min_eigenvalue(matrix) >= -tol


def isometry_defect(matrix) -> float:
    """||Y^dagger Y - I|| for a tall (or square) matrix Y."""
    y = np.asarray(matrix, dtype=np.complex128)
    if y.ndim != 2:
        raise DimensionMismatchError(f"isometry candidate must be 2-d, got {y.ndim}-d")
    g = y.conj().T @ y
    return float(np.linalg.norm(g - np.eye(g.shape[0]), 2))


def is_isometry(matrix, tol: float = DEFAULT_TOL.norm_tol) -> bool:
    return isometry_defect(matrix) <= tol


def symmetrize(matrix, tol: float = DEFAULT_TOL.psd_tol) -> np.ndarray:
    """Return the Hermitian part; hard error if the asymmetry exceeds tol.

    File round-trips introduce rounding at the last digit, so small
    asymmetries are repaired silently; anything larger is treated as a
    corrupted operator rather than noise.
    """
    a = _as_square(matrix)
    defect = float(np.linalg.norm(a - a.conj().T, 2))
    if defect > tol:
        raise ValidationError(f"matrix asymmetry {defect:.3e} exceeds tolerance {tol:.3e}")
    return (a + a.conj().T) / 2


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate_povm: max residual per check plus the verdict."""

    ok: bool
    hermiticity: float
    psd: float
    normalization: float
    dim: int
    n_outcomes: int

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "residuals": {
                "hermiticity": self.hermiticity,
                "psd": self.psd,
                "normalization": self.normalization,
            },
            "dim": self.dim,
            "n_outcomes": self.n_outcomes,
        }


def validate_povm(effects: Sequence, cfg: ToleranceConfig = DEFAULT_TOL) -> ValidationReport:
    """Check Hermiticity, positivity, and normalization of an effect list.

    Structural problems (non-square effects, mismatched dimensions, empty
    list) raise DimensionMismatchError; numerical violations are reported in
    the returned ValidationReport, not raised.
    """
    if len(effects) == 0:
        raise DimensionMismatchError("a POVM needs at least one effect")
    mats = [_as_square(e, f"effect {i}") for i, e in enumerate(effects)]
    dim = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape[0] != dim:
            raise DimensionMismatchError(
                f"effect {i} has dimension {m.shape[0]}, expected {dim}"
            )
    herm = max(float(np.linalg.norm(m - m.conj().T, 2)) for m in mats)
    sym = [(m + m.conj().T) / 2 for m in mats]
    psd = max(0.0, max(-float(np.linalg.eigvalsh(m)[0]) for m in sym))
    total = sum(sym)
    normalization = float(np.linalg.norm(total - np.eye(dim), 2))
    ok = herm <= cfg.psd_tol and psd <= cfg.psd_tol and normalization <= cfg.norm_tol
    return ValidationReport(ok, herm, psd, normalization, dim, len(mats))


@dataclass(frozen=True)
class DiscretePovm:
    """A finite-outcome POVM on a dim-dimensional space.

    Effects are stored symmetrized and read-only.  Use ``from_effects`` to
    construct with validation; the raw constructor is for internal callers
    that already guarantee the invariants.
    """

    dim: int
    effects: tuple
    labels: tuple | None = None

    def __post_init__(self):
        for e in self.effects:
            e.flags.writeable = False
        if self.labels is not None and len(self.labels) != len(self.effects):
            raise DimensionMismatchError("label count must match effect count")

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)

    @staticmethod
    def from_effects(effects: Sequence, labels=None, cfg: ToleranceConfig = DEFAULT_TOL) -> "DiscretePovm":
        report = validate_povm(effects, cfg)
        if not report.ok:
            raise ValidationError(
                "invalid POVM: residuals hermiticity={:.3e} psd={:.3e} normalization={:.3e}".format(
                    report.hermiticity, report.psd, report.normalization
                )
            )
        sym = tuple(symmetrize(e, cfg.psd_tol).copy() for e in effects)
        return DiscretePovm(report.dim, sym, tuple(labels) if labels is not None else None)


@dataclass(frozen=True)
class DensityState:
    """Density operator: Hermitian, PSD, unit trace (all within tolerance)."""

    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.matrix.flags.writeable = False

    @staticmethod
    def from_matrix(matrix, cfg: ToleranceConfig = DEFAULT_TOL) -> "DensityState":
        m = symmetrize(matrix, cfg.psd_tol)
        low = float(np.linalg.eigvalsh(m)[0])
        if low < -cfg.psd_tol:
            raise ValidationError(f"state not PSD: min eigenvalue {low:.3e}")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > cfg.norm_tol:
            raise ValidationError(f"state trace {tr!r} deviates from 1 beyond tolerance")
        return DensityState(m.shape[0], m.copy())

    @staticmethod
    def pure(vector) -> "DensityState":
        v = np.asarray(vector, dtype=np.complex128).ravel()
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValidationError("cannot build a pure state from the zero vector")
        v = v / norm
        return DensityState(v.size, np.outer(v, v.conj()))

    @staticmethod
    def maximally_mixed(dim: int) -> "DensityState":
        return DensityState(dim, np.eye(dim, dtype=np.complex128) / dim)


def born_probabilities(rho: DensityState, povm: DiscretePovm, cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Outcome probabilities p_i = tr(rho M_i), clamped onto [0, 1].

    The residual checks (reality, nonnegativity, unit sum) must pass within
    tolerance before clamping; a violation means the inputs were not a valid
    state/POVM pair.
    """
    if rho.dim != povm.dim:
        raise DimensionMismatchError(f"state dim {rho.dim} != POVM dim {povm.dim}")
    raw = np.array([np.trace(rho.matrix @ e) for e in povm.effects])
    if np.abs(raw.imag).max() > cfg.norm_tol:
        raise ValidationError("born probabilities have non-real parts beyond tolerance")
    p = raw.real
    if p.min() < -cfg.psd_tol:
        raise ValidationError(f"born probability {p.min():.3e} below zero beyond tolerance")
    if abs(p.sum() - 1.0) > cfg.norm_tol:
        raise ValidationError(f"born probabilities sum to {p.sum()!r}")
    return np.clip(p, 0.0, 1.0)


def _pad_effects(povm: DiscretePovm, n: int) -> list:
    zero = np.zeros((povm.dim, povm.dim), dtype=np.complex128)
    return list(povm.effects) + [zero] * (n - povm.n_outcomes)


def mix(m1: DiscretePovm, m2: DiscretePovm, t: float, cfg: ToleranceConfig = DEFAULT_TOL) -> DiscretePovm:
    """Convex combination t*M1 + (1-t)*M2, 0 < t < 1.

    Outcome lists of different lengths are aligned by padding the shorter
    POVM with zero effects.
    """
    if not 0.0 < t < 1.0:
        raise ValueError("mixing weight must lie strictly between 0 and 1")
    if m1.dim != m2.dim:
        raise DimensionMismatchError(f"cannot mix POVMs of dims {m1.dim} and {m2.dim}")
    n = max(m1.n_outcomes, m2.n_outcomes)
    e1, e2 = _pad_effects(m1, n), _pad_effects(m2, n)
    mixed = [t * a + (1.0 - t) * b for a, b in zip(e1, e2)]
    labels = m1.labels if (m1.labels is not None and m1.labels == m2.labels) else None
    return DiscretePovm.from_effects(mixed, labels, cfg)


def sample_outcomes(rho: DensityState, povm: DiscretePovm, n: int, seed: int,
                    cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Draw n outcome counts from the Born distribution, deterministically per seed."""
    if n < 1:
        raise ValueError("sample count must be >= 1")
    p = born_probabilities(rho, povm, cfg)
    p = p / p.sum()  # exact simplex membership for the multinomial draw
    rng = np.random.default_rng(seed)
    return rng.multinomial(n, p)
