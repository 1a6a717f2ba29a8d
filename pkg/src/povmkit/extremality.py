"""Extremality of finite POVMs and explicit convex-decomposition witnesses.

A POVM is extremal in the convex set of all POVMs iff the only block
operator D = (D_1, ..., D_n), with block i acting on the fiber of outcome i,
satisfying sum_{i,k,l} (D_i)_{kl} |d_k(i)><d_l(i)| = 0 is D = 0, where the
d_k(i) diagonalize the effects.  The test below materializes that linear map
and inspects its null space; a kernel element doubles as a perturbation that
splits the POVM into two distinct valid POVMs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, DiscretePovm, ToleranceConfig
from .dilation import CoherentFamily, coherent_family, minimal_dilation
from .errors import DecompositionError

__all__ = [
    "ExtremalityVerdict",
    "ConvexDecomposition",
    "extremality_test",
    "kernel_analysis",
    "quick_reject",
    "convex_decompose",
    "informational_completeness",
]


@dataclass(frozen=True)
class ExtremalityVerdict:
    """Result of the kernel test.

    witness, when present, is a tuple of Hermitian blocks (one m_i x m_i
    matrix per outcome, empty outcomes get 0x0 blocks) spanning a direction
    in which the POVM can be perturbed both ways.  The coherent vectors the
    blocks refer to are carried along so downstream constructions use the
    same gauge.
    """

    extremal: bool
    kernel_dim: int
    min_singular_value: float
    witness: tuple | None
    family: CoherentFamily


@dataclass(frozen=True)
class ConvexDecomposition:
    """M = (M_plus + M_minus)/2 with M_plus != M_minus, both valid POVMs."""

    m_plus: DiscretePovm
    m_minus: DiscretePovm
    weight: float
    epsilon: float


def _perturbation_columns(family: CoherentFamily):
    """Columns vec(|d_k(i)><d_l(i)|) of the block-to-operator map, plus index map."""
    d = family.source_dim
    cols = []
    index = []  # (outcome, k, l) per column
    for i, vecs in enumerate(family.vectors):
        for k, dk in enumerate(vecs):
            for l, dl in enumerate(vecs):
                cols.append(np.outer(dk, dl.conj()).reshape(d * d))
                index.append((i, k, l))
    if not cols:
        return np.zeros((d * d, 0), dtype=np.complex128), index
    return np.column_stack(cols), index


def kernel_analysis(family: CoherentFamily, cfg: ToleranceConfig = DEFAULT_TOL) -> ExtremalityVerdict:
    """Kernel test of the block-to-operator map for a given coherent family."""
    mat, index = _perturbation_columns(family)
    n_cols = mat.shape[1]
    svals = np.linalg.svd(mat, compute_uv=False)
    smax = svals[0] if svals.size else 0.0
    # Singular values beyond min(rows, cols) are identically zero.
    padded = np.concatenate([svals, np.zeros(n_cols - svals.size)])
    threshold = cfg.rank_rel_tol * smax
    kernel_dim = int(np.count_nonzero(padded <= threshold))
    min_sv = float(padded.min()) if padded.size else 0.0
    witness = None
    if kernel_dim > 0:
        _, _, vh = np.linalg.svd(mat, full_matrices=True)
        witness = _hermitian_witness(vh[-1].conj(), family, index)
    return ExtremalityVerdict(kernel_dim == 0, kernel_dim, min_sv, witness, family)


def _blocks_from_vector(vec: np.ndarray, family: CoherentFamily, index) -> list:
    blocks = [
        np.zeros((len(vs), len(vs)), dtype=np.complex128) for vs in family.vectors
    ]
    for value, (i, k, l) in zip(vec, index):
        blocks[i][k, l] = value
    return blocks


def _hermitian_witness(vec: np.ndarray, family: CoherentFamily, index) -> tuple:
    """Hermitize a kernel element blockwise.

    The kernel is closed under the block adjoint (Y^dagger D^dagger Y is the
    adjoint of Y^dagger D Y), so the Hermitian part and i times the
    anti-Hermitian part are both kernel elements; at least one has at least
    1/sqrt(2) of the original norm, and picking the larger keeps the
    renormalization from amplifying SVD rounding noise.
    """
    blocks = _blocks_from_vector(vec, family, index)
    herm = [(b + b.conj().T) / 2 for b in blocks]
    anti = [(b - b.conj().T) / 2j for b in blocks]
    hnorm = np.sqrt(sum(float(np.linalg.norm(b) ** 2) for b in herm))
    anorm = np.sqrt(sum(float(np.linalg.norm(b) ** 2) for b in anti))
    if anorm > hnorm:
        herm, hnorm = anti, anorm
    return tuple(b / hnorm for b in herm)


def extremality_test(povm: DiscretePovm, cfg: ToleranceConfig = DEFAULT_TOL) -> ExtremalityVerdict:
    """Decide extremality of a finite POVM."""
    family = coherent_family(minimal_dilation(povm, cfg))
    return kernel_analysis(family, cfg)


def quick_reject(povm: DiscretePovm, cfg: ToleranceConfig = DEFAULT_TOL) -> str | None:
    """Dimension-count shortcut: sum of squared multiplicities above dim^2
    forces a kernel; returns "non-extremal" then, otherwise None (no verdict)."""
    threshold_src = minimal_dilation(povm, cfg)
    if sum(m * m for m in threshold_src.fiber_dims) > povm.dim**2:
        return "non-extremal"
    return None


def _perturbations(witness, family: CoherentFamily) -> list:
    deltas = []
    for blocks, vecs in zip(witness, family.vectors):
        d = family.source_dim
        delta = np.zeros((d, d), dtype=np.complex128)
        for k, dk in enumerate(vecs):
            for l, dl in enumerate(vecs):
                delta += blocks[k, l] * np.outer(dk, dl.conj())
        deltas.append((delta + delta.conj().T) / 2)
    return deltas


def convex_decompose(povm: DiscretePovm, verdict: ExtremalityVerdict,
                     cfg: ToleranceConfig = DEFAULT_TOL) -> ConvexDecomposition:
    """Split a non-extremal POVM as (M_+ + M_-)/2 along the witness direction.

    The step size takes half the PSD-preserving bound: each perturbation is
    supported on the range of its effect, so effects stay PSD as long as
    epsilon * ||Delta_i|| is below the smallest nonzero eigenvalue of M_i.
    """
    if verdict.extremal or verdict.witness is None:
        raise DecompositionError("cannot decompose: verdict is extremal or carries no witness")
    family = verdict.family
    deltas = _perturbations(verdict.witness, family)
    total = sum(deltas)
    if float(np.linalg.norm(total, 2)) > cfg.norm_tol:
        raise DecompositionError("witness perturbations do not cancel; kernel element invalid")
    bounds = []
    for effect, delta in zip(povm.effects, deltas):
        dnorm = float(np.linalg.norm(delta, 2))
        if dnorm < 1e-14:
            continue
        w = np.linalg.eigvalsh(effect)
        positive = w[w > cfg.rank_rel_tol * max(w[-1], 0.0)]
        if positive.size == 0:
            raise DecompositionError("witness touches an empty outcome")
        bounds.append(float(positive[0]) / dnorm)
    if not bounds:
        raise DecompositionError("witness is numerically zero")
    epsilon = 0.5 * min(bounds)
    if epsilon < 1e-14:
        raise DecompositionError(f"step size underflow (epsilon={epsilon:.3e})")
    plus = [e + epsilon * d for e, d in zip(povm.effects, deltas)]
    minus = [e - epsilon * d for e, d in zip(povm.effects, deltas)]
    m_plus = DiscretePovm.from_effects(plus, povm.labels, cfg)
    m_minus = DiscretePovm.from_effects(minus, povm.labels, cfg)
    return ConvexDecomposition(m_plus, m_minus, 0.5, epsilon)


def informational_completeness(povm: DiscretePovm, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff the effects span the full dim^2-dimensional Hermitian space.

    Spanning is what lets the trace pairing separate arbitrary states, i.e.
    distinct states give distinct outcome distributions.
    """
    d = povm.dim
    rows = []
    iu = np.triu_indices(d, k=1)
    for e in povm.effects:
        rows.append(np.concatenate([np.diag(e).real, e[iu].real, e[iu].imag]))
    mat = np.vstack(rows)
    svals = np.linalg.svd(mat, compute_uv=False)
    rank = int(np.count_nonzero(svals > cfg.rank_rel_tol * svals[0])) if svals.size else 0
    return rank == d * d
