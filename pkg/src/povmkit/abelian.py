"""Covariant POVMs for the cyclic group Z_N.

The group acts through a diagonal unitary representation V(g) whose fibers
are labeled by characters lambda in {0, ..., N-1}; a covariant POVM is
generated from a single seed effect K by M_g = V(g) K V(g)^dagger.  Because
the character sum annihilates every matrix entry whose two fiber labels
differ, normalization constrains only the character-diagonal blocks of the
seed: each must equal I / N.

All effects are unitarily conjugate to the seed, so covariant POVMs have
constant rank, and extremality reduces to linear independence of the
translated rank-1 operators built from the seed's spectral vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, DiscretePovm, ToleranceConfig, symmetrize
from .dilation import CoherentFamily, coherent_family, minimal_dilation, psd_factor
from .errors import DimensionMismatchError, ValidationError
from .extremality import ExtremalityVerdict, kernel_analysis

__all__ = [
    "CyclicRep",
    "CovariantPovm",
    "build_covariant",
    "covariance_check",
    "covariant_coherent_family",
    "canonical_position",
    "covariant_extremality",
]


@dataclass(frozen=True)
class CyclicRep:
    """Diagonal unitary representation of Z_N with one character per basis fiber."""

    group_order: int
    char_labels: tuple

    def __post_init__(self):
        if self.group_order < 1:
            raise ValueError("group order must be >= 1")
        if not self.char_labels:
            raise ValueError("need at least one character label")
        if any(not 0 <= c < self.group_order for c in self.char_labels):
            raise ValueError(
                f"character labels must lie in 0..{self.group_order - 1}"
            )

    @property
    def dim(self) -> int:
        return len(self.char_labels)

    def phases(self, g: int) -> np.ndarray:
        labels = np.asarray(self.char_labels, dtype=np.float64)
        return np.exp(2j * np.pi * labels * (g % self.group_order) / self.group_order)

    def unitary(self, g: int) -> np.ndarray:
        return np.diag(self.phases(g))


@dataclass(frozen=True)
class CovariantPovm:
    """Seed effect plus the derived orbit effects M_g = V(g) K V(g)^dagger."""

    rep: CyclicRep
    seed: np.ndarray
    effects: tuple

    def __post_init__(self):
        self.seed.flags.writeable = False
        for e in self.effects:
            e.flags.writeable = False

    def povm(self, cfg: ToleranceConfig = DEFAULT_TOL) -> DiscretePovm:
        labels = tuple(f"g={g}" for g in range(self.rep.group_order))
        return DiscretePovm.from_effects(self.effects, labels, cfg)


def _diagonal_block_violations(rep: CyclicRep, seed: np.ndarray, cfg: ToleranceConfig):
    """Character blocks whose N * K_block deviates from the identity."""
    n = rep.group_order
    bad = []
    for label in sorted(set(rep.char_labels)):
        idx = [j for j, c in enumerate(rep.char_labels) if c == label]
        block = seed[np.ix_(idx, idx)]
        resid = float(np.linalg.norm(n * block - np.eye(len(idx)), 2))
        if resid > cfg.norm_tol:
            bad.append((label, resid))
    return bad


def build_covariant(rep: CyclicRep, seed, cfg: ToleranceConfig = DEFAULT_TOL) -> CovariantPovm:
    """Generate the covariant POVM from a seed effect.

    The seed must be PSD and satisfy the block normalization; the error
    message names the offending character blocks, since the constraint
    structure (off-character entries are free) is easy to get wrong.
    """
    seed = symmetrize(seed, cfg.psd_tol)
    if seed.shape[0] != rep.dim:
        raise DimensionMismatchError(
            f"seed dimension {seed.shape[0]} does not match representation dimension {rep.dim}"
        )
    low = float(np.linalg.eigvalsh(seed)[0])
    if low < -cfg.psd_tol:
        raise ValidationError(f"seed not PSD: min eigenvalue {low:.3e}")
    bad = _diagonal_block_violations(rep, seed, cfg)
    if bad:
        detail = ", ".join(f"character {c} (residual {r:.3e})" for c, r in bad)
        raise ValidationError(
            "seed violates normalization: the diagonal block of each character "
            f"must equal I/{rep.group_order}; offending blocks: {detail}"
        )
    effects = []
    for g in range(rep.group_order):
        ph = rep.phases(g)
        effects.append(ph[:, None] * seed * ph.conj()[None, :])
    return CovariantPovm(rep, seed.copy(), tuple(effects))


def covariance_check(cov: CovariantPovm) -> float:
    """Max over g, h of || V(g) M_h V(g)^dagger - M_{g+h mod N} ||."""
    n = cov.rep.group_order
    worst = 0.0
    for g in range(n):
        ph = cov.rep.phases(g)
        for h in range(n):
            moved = ph[:, None] * cov.effects[h] * ph.conj()[None, :]
            resid = float(np.linalg.norm(moved - cov.effects[(g + h) % n], 2))
            worst = max(worst, resid)
    return worst


def covariant_coherent_family(cov: CovariantPovm, cfg: ToleranceConfig = DEFAULT_TOL):
    """Coherent vectors of a covariant POVM via the seed's spectral factorization.

    Returns (family, base_vectors): base_vectors are the d_k at the group
    unit, and the family translates them as d_k(g) = V(g) d_k.  The Gram
    matrices per outcome are checked against the generic dilation route
    (they agree up to fiberwise unitary gauge, which Gram matrices erase).
    """
    threshold = cfg.rank_rel_tol * max(float(np.linalg.eigvalsh(cov.seed)[-1]), 0.0)
    base = [row.conj() for row in psd_factor(cov.seed, threshold)]
    vectors = []
    for g in range(cov.rep.group_order):
        ph = cov.rep.phases(g)
        vectors.append(tuple(ph * d for d in base))
    family = CoherentFamily(cov.rep.dim, tuple(vectors), rank=len(base))

    generic = coherent_family(minimal_dilation(cov.povm(cfg), cfg))
    for i in range(cov.rep.group_order):
        ga = _gram(family.vectors[i])
        gb = _gram(generic.vectors[i])
        if ga.shape != gb.shape or float(np.linalg.norm(ga - gb, 2)) > 1e-10:
            raise ValidationError(
                f"covariant and generic coherent families disagree at outcome {i}"
            )
    return family, base


def _gram(vectors) -> np.ndarray:
    if not vectors:
        return np.zeros((0, 0), dtype=np.complex128)
    v = np.vstack(vectors)
    return v.conj() @ v.T


def canonical_position(group_order: int, multiplicity: int) -> CovariantPovm:
    """Sharp position observable on Z_N with the given outcome multiplicity.

    Every character appears ``multiplicity`` times; the seed projects onto
    the uniform superposition across character fibers (tensored with the
    identity on the multiplicity block), so the orbit effects are the
    rank-``multiplicity`` projections onto the discrete Fourier vectors.
    """
    if group_order < 2:
        raise ValueError("group order must be >= 2")
    if multiplicity < 1:
        raise ValueError("multiplicity must be >= 1")
    labels = tuple(c for c in range(group_order) for _ in range(multiplicity))
    rep = CyclicRep(group_order, labels)
    uniform = np.full((group_order, group_order), 1.0 / group_order, dtype=np.complex128)
    seed = np.kron(uniform, np.eye(multiplicity, dtype=np.complex128))
    return build_covariant(rep, seed)


def covariant_extremality(cov: CovariantPovm, cfg: ToleranceConfig = DEFAULT_TOL) -> ExtremalityVerdict:
    """Extremality via the translated seed vectors V(g) d_k.

    The POVM is extremal iff the N * r^2 operators V(g)|d_k><d_l|V(g)^dagger
    are linearly independent; this is the generic kernel test run on the
    covariant coherent family, so it agrees with ``extremality_test`` on the
    plain effect list.
    """
    family, _ = covariant_coherent_family(cov, cfg)
    return kernel_analysis(family, cfg)
