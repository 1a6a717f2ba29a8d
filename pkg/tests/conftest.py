"""Shared constructors for the test suite."""

import numpy as np

from povmkit import DiscretePovm

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def pvm_z() -> DiscretePovm:
    return DiscretePovm.from_effects(
        [np.diag([1.0, 0.0]).astype(np.complex128), np.diag([0.0, 1.0]).astype(np.complex128)]
    )


def pvm_x() -> DiscretePovm:
    plus = np.full((2, 2), 0.5, dtype=np.complex128)
    return DiscretePovm.from_effects([plus, I2 - plus])


def trine() -> DiscretePovm:
    effects = []
    for k in range(3):
        v = np.array([np.cos(2 * np.pi * k / 3), np.sin(2 * np.pi * k / 3)], dtype=np.complex128)
        effects.append((2.0 / 3.0) * np.outer(v, v.conj()))
    return DiscretePovm.from_effects(effects)


def tetrahedral() -> DiscretePovm:
    ns = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3)
    effects = [(I2 + n[0] * SX + n[1] * SY + n[2] * SZ) / 4 for n in ns]
    return DiscretePovm.from_effects(effects)


def random_unitary(dim: int, rng) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pvm(dim: int, rng, parts=None) -> DiscretePovm:
    """PVM from a Haar-ish random basis, optionally grouped into degenerate blocks."""
    u = random_unitary(dim, rng)
    if parts is None:
        parts = [[j] for j in range(dim)]
    effects = []
    for block in parts:
        cols = u[:, block]
        effects.append(cols @ cols.conj().T)
    return DiscretePovm.from_effects(effects)


def random_povm(dim: int, n_outcomes: int, rng, ranks=None):
    """Random POVM with prescribed effect ranks.

    Draws Wishart-like blocks G_i and normalizes by the inverse square root
    of their sum, which preserves each block's rank.  Returns (povm, ranks).
    """
    if ranks is None:
        ranks = [int(rng.integers(1, dim + 1)) for _ in range(n_outcomes)]
        while sum(ranks) < dim:  # the effect sum must be invertible
            ranks[int(rng.integers(0, n_outcomes))] = dim
    blocks = []
    for r in ranks:
        if r == 0:
            blocks.append(np.zeros((dim, dim), dtype=np.complex128))
            continue
        b = rng.normal(size=(dim, r)) + 1j * rng.normal(size=(dim, r))
        blocks.append(b @ b.conj().T)
    total = sum(blocks)
    w, v = np.linalg.eigh(total)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    effects = [inv_sqrt @ g @ inv_sqrt for g in blocks]
    return DiscretePovm.from_effects(effects), ranks


def random_density(dim: int, rng) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real
