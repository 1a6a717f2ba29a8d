"""Minimal Naimark dilations and outcome-wise diagonalizations.

Every finite POVM M admits an isometry Y into a direct sum of per-outcome
fibers with a coordinate projection P_i such that Y^dagger P_i Y = M_i; the
dilation is minimal when fiber i has dimension rank(M_i).  The conjugated
fiber rows of Y are the coherent vectors d_k(i) that diagonalize the
effects, M_i = sum_k |d_k(i)><d_k(i)|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, DiscretePovm, ToleranceConfig
from .errors import DimensionMismatchError

__all__ = [
    "NaimarkDilation",
    "CoherentFamily",
    "minimal_dilation",
    "coherent_family",
    "is_spectral_measure",
    "multiplicity",
    "constant_rank",
    "sorted_eigh",
    "psd_factor",
]


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate a vector's global phase so its first significant entry is real positive."""
    idx = np.flatnonzero(np.abs(vec) > 1e-12 * np.abs(vec).max())
    pivot = vec[idx[0]]
    return vec * (abs(pivot) / pivot)

def _lex_key(vec: np.ndarray):
    return tuple(x for c in np.round(vec, 12) for x in (c.real, c.imag))


def sorted_eigh(matrix: np.ndarray, tie_tol: float = 1e-12):
    """Eigendecomposition with a deterministic ordering convention.

    Eigenvalues descend; within groups that are equal up to ``tie_tol``
    (relative to the largest magnitude), eigenvectors are phase-fixed and
    ordered lexicographically so repeated runs produce identical output.
    """
    w, v = np.linalg.eigh(matrix)
    w, v = w[::-1], v[:, ::-1]
    cols = [_fix_phase(v[:, j]) if np.abs(v[:, j]).max() > 0 else v[:, j] for j in range(v.shape[1])]
    scale = max(np.abs(w).max(), 1.0)
    order = []
    j = 0
    while j < len(w):
        k = j
        while k + 1 < len(w) and abs(w[k + 1] - w[j]) <= tie_tol * scale:
            k += 1
        group = sorted(range(j, k + 1), key=lambda idx: _lex_key(cols[idx]))
        order.extend(group)
        j = k + 1
    w = w[order]
    v = np.column_stack([cols[idx] for idx in order])
    return w, v


def psd_factor(matrix: np.ndarray, threshold: float) -> np.ndarray:
    """Factor a PSD matrix as A^dagger A with A of shape (rank, dim).

    Eigenvalues at or below ``threshold`` count as zero (negatives from
    rounding are clamped); rows are ordered by descending eigenvalue with
    the deterministic conventions of ``sorted_eigh``.
    """
    w, v = sorted_eigh(matrix)
    keep = w > threshold
    w = w[keep]
    v = v[:, keep]
    return (np.sqrt(w)[:, None]) * v.conj().T


@dataclass(frozen=True)
class NaimarkDilation:
    """Isometry Y into the fibered dilation space of a finite POVM.

    fiber_dims[i] is the multiplicity of outcome i; offsets are the prefix
    sums locating fiber i's rows inside Y.
    """

    source_dim: int
    fiber_dims: tuple
    total_dim: int
    isometry: np.ndarray
    offsets: tuple

    def __post_init__(self):
        self.isometry.flags.writeable = False

    def fiber_block(self, i: int) -> np.ndarray:
        """Rows of Y belonging to outcome i (shape fiber_dims[i] x source_dim)."""
        return self.isometry[self.offsets[i]: self.offsets[i + 1]]

    def reconstruct_effect(self, i: int) -> np.ndarray:
        """Y^dagger P_i Y for the coordinate projection P_i onto fiber i."""
        block = self.fiber_block(i)
        return block.conj().T @ block


@dataclass(frozen=True)
class CoherentFamily:
    """Per-outcome diagonalizing vectors d_k(i) with sum_k |d_k><d_k| = M_i.

    Outcomes of rank zero carry an empty vector list.  ``rank`` is the
    common multiplicity when all supported outcomes share one, else None.
    """

    source_dim: int
    vectors: tuple  # tuple over outcomes of tuples of 1-d arrays
    rank: int | None

    def outcome_operators(self, i: int):
        return [np.outer(d, d.conj()) for d in self.vectors[i]]


def _rank_threshold(povm: DiscretePovm, cfg: ToleranceConfig) -> float:
    # One global scale so fiber dimensions are consistent across outcomes.
    top = max(float(np.linalg.eigvalsh(e)[-1]) for e in povm.effects)
    return cfg.rank_rel_tol * max(top, 0.0)


def minimal_dilation(povm: DiscretePovm, cfg: ToleranceConfig = DEFAULT_TOL) -> NaimarkDilation:
    """Minimal Naimark dilation via per-effect spectral factorization."""
    threshold = _rank_threshold(povm, cfg)
    blocks = [psd_factor(e, threshold) for e in povm.effects]
    fiber_dims = tuple(b.shape[0] for b in blocks)
    offsets = (0, *np.cumsum(fiber_dims).tolist())
    total = offsets[-1]
    if total == 0:
        raise DimensionMismatchError("POVM has no spectral content to dilate")
    isometry = np.vstack([b for b in blocks if b.shape[0] > 0])
    return NaimarkDilation(povm.dim, fiber_dims, total, isometry, offsets)


def coherent_family(dil: NaimarkDilation) -> CoherentFamily:
    """Coherent vectors of a dilation: d_k(i) = conj(k-th row of fiber i)."""
    vectors = []
    for i in range(len(dil.fiber_dims)):
        block = dil.fiber_block(i)
        vectors.append(tuple(block[k].conj() for k in range(block.shape[0])))
    nonzero = [m for m in dil.fiber_dims if m > 0]
    rank = nonzero[0] if nonzero and all(m == nonzero[0] for m in nonzero) else None
    return CoherentFamily(dil.source_dim, tuple(vectors), rank)


def is_spectral_measure(povm: DiscretePovm, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff every effect is idempotent within tolerance (a PVM)."""
    return all(
        float(np.linalg.norm(e @ e - e, 2)) <= cfg.norm_tol for e in povm.effects
    )


def multiplicity(povm: DiscretePovm, outcome: int, cfg: ToleranceConfig = DEFAULT_TOL) -> int:
    """Rank of the effect at ``outcome`` under the global rank threshold."""
    if not 0 <= outcome < povm.n_outcomes:
        raise IndexError(f"outcome {outcome} out of range for {povm.n_outcomes} outcomes")
    threshold = _rank_threshold(povm, cfg)
    w = np.linalg.eigvalsh(povm.effects[outcome])
    return int(np.count_nonzero(w > threshold))


def constant_rank(povm: DiscretePovm, cfg: ToleranceConfig = DEFAULT_TOL) -> int | None:
    """Common multiplicity of the supported outcomes, or None if they differ.

    Outcomes with zero effect are ignored (they lie outside the support).
    """
    threshold = _rank_threshold(povm, cfg)
    ranks = [
        int(np.count_nonzero(np.linalg.eigvalsh(e) > threshold)) for e in povm.effects
    ]
    nonzero = [r for r in ranks if r > 0]
    if nonzero and all(r == nonzero[0] for r in nonzero):
        return nonzero[0]
    return None
