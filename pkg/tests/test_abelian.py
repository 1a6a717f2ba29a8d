import numpy as np
import pytest

from conftest import I2, SX
from povmkit import (
    CyclicRep,
    DensityState,
    DimensionMismatchError,
    ValidationError,
    born_probabilities,
    build_covariant,
    canonical_position,
    constant_rank,
    covariance_check,
    covariant_coherent_family,
    covariant_extremality,
    extremality_test,
    is_spectral_measure,
    quick_reject,
    validate_povm,
)


def random_seed_matrix(rep: CyclicRep, rank: int, rng) -> np.ndarray:
    """Random valid seed of the given rank: PSD with each character-diagonal
    block equal to I/N (whitened Wishart blocks)."""
    labels = np.asarray(rep.char_labels)
    b = rng.normal(size=(rep.dim, rank)) + 1j * rng.normal(size=(rep.dim, rank))
    for lam in sorted(set(rep.char_labels)):
        idx = np.flatnonzero(labels == lam)
        block = b[idx]
        g = block @ block.conj().T
        w, v = np.linalg.eigh(g)
        whiten = (v / np.sqrt(w)) @ v.conj().T
        b[idx] = whiten @ block / np.sqrt(rep.group_order)
    return b @ b.conj().T


class TestRep:
    def test_group_law(self):
        rep = CyclicRep(4, (0, 1, 2, 3))
        assert np.array_equal(rep.unitary(0), np.eye(4))
        for g in range(4):
            for h in range(4):
                prod = rep.unitary(g) @ rep.unitary(h)
                assert np.abs(prod - rep.unitary((g + h) % 4)).max() < 1e-14

    def test_label_range_checked(self):
        with pytest.raises(ValueError):
            CyclicRep(3, (0, 3))


class TestBuild:
    def test_two_outcome_example(self):
        cov = build_covariant(CyclicRep(2, (0, 1)), 0.5 * (I2 + SX))
        assert np.abs(cov.effects[0] - 0.5 * (I2 + SX)).max() < 1e-14
        sz = np.diag([1.0, -1.0]).astype(complex)
        assert np.abs(cov.effects[1] - sz @ (0.5 * (I2 + SX)) @ sz).max() < 1e-14
        assert validate_povm(list(cov.effects)).ok

    def test_uniform_seed(self):
        rep = CyclicRep(3, (0, 1, 2))
        cov = build_covariant(rep, np.eye(3, dtype=complex) / 3)
        for e in cov.effects:
            assert np.abs(e - np.eye(3) / 3).max() < 1e-14

    def test_bad_diagonal_rejected_with_block_names(self):
        with pytest.raises(ValidationError, match="character 1"):
            build_covariant(CyclicRep(2, (0, 1)), np.diag([0.5, 0.4]).astype(complex))

    def test_non_psd_seed_rejected(self):
        seed = np.array([[0.5, 0.9], [0.9, 0.5]], dtype=complex)
        with pytest.raises(ValidationError, match="PSD"):
            build_covariant(CyclicRep(2, (0, 1)), seed)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            build_covariant(CyclicRep(2, (0, 1)), np.eye(3, dtype=complex) / 2)


class TestCovariance:
    def test_built_povms_covariant(self):
        rng = np.random.default_rng(0)
        for trial in range(5):
            rep = CyclicRep(4, (0, 1, 2, 3))
            cov = build_covariant(rep, random_seed_matrix(rep, 2, rng))
            assert covariance_check(cov) < 1e-12

    def test_perturbation_detected(self):
        cov = build_covariant(CyclicRep(2, (0, 1)), 0.5 * (I2 + SX))
        effects = list(cov.effects)
        bumped = effects[1].copy()
        bumped[0, 0] += 1e-3
        from povmkit.abelian import CovariantPovm

        broken = CovariantPovm(cov.rep, cov.seed.copy(), (effects[0], bumped))
        assert covariance_check(broken) == pytest.approx(1e-3, rel=1e-6)


class TestCoherentFamily:
    def test_rank_one_seed(self):
        cov = build_covariant(CyclicRep(2, (0, 1)), 0.5 * (I2 + SX))
        family, base = covariant_coherent_family(cov)
        assert family.rank == 1
        (d1,) = base
        assert np.abs(np.outer(d1, d1.conj()) - cov.seed).max() < 1e-12
        v1 = cov.rep.unitary(1) @ d1
        assert np.abs(family.vectors[1][0] - v1).max() < 1e-12

    def test_uniform_seed_scaled_basis(self):
        rep = CyclicRep(2, (0, 1))
        family, base = covariant_coherent_family(build_covariant(rep, I2 / 2))
        got = sorted(np.abs(np.vstack(base)).sum(axis=1))
        assert np.allclose(got, [1 / np.sqrt(2)] * 2)

    def test_translation_identity(self):
        rng = np.random.default_rng(5)
        rep = CyclicRep(3, (0, 1, 2))
        cov = build_covariant(rep, random_seed_matrix(rep, 2, rng))
        family, base = covariant_coherent_family(cov)
        for g in range(3):
            vg = cov.rep.unitary(g)
            for k, dk in enumerate(base):
                for trial in range(3):
                    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
                    lhs = np.vdot(family.vectors[g][k], psi)
                    rhs = np.vdot(dk, vg.conj().T @ psi)
                    assert abs(lhs - rhs) < 1e-12

    @pytest.mark.parametrize("seed", range(8))
    def test_gram_agreement_with_generic_dilation(self, seed):
        # covariant_coherent_family itself raises if the Gram matrices differ
        rng = np.random.default_rng(seed)
        order = int(rng.integers(2, 5))
        mult = int(rng.integers(1, 3))
        labels = tuple(c for c in range(order) for _ in range(mult))
        rep = CyclicRep(order, labels)
        rank = int(rng.integers(mult, rep.dim + 1))
        cov = build_covariant(rep, random_seed_matrix(rep, rank, rng))
        family, _ = covariant_coherent_family(cov)
        assert family.rank == rank


class TestConstantRank:
    @pytest.mark.parametrize("seed", range(10))
    def test_all_effects_share_seed_rank(self, seed):
        rng = np.random.default_rng(100 + seed)
        order = int(rng.integers(2, 5))
        mult = int(rng.integers(1, 3))
        labels = tuple(c for c in range(order) for _ in range(mult))
        rep = CyclicRep(order, labels)
        rank = int(rng.integers(mult, rep.dim + 1))
        cov = build_covariant(rep, random_seed_matrix(rep, rank, rng))
        assert constant_rank(cov.povm()) == rank


class TestCanonicalPosition:
    def test_n4_rank_one_is_fourier_pvm(self):
        cov = canonical_position(4, 1)
        povm = cov.povm()
        assert is_spectral_measure(povm)
        assert extremality_test(povm).extremal
        lam = np.arange(4)
        for g in range(4):
            f = np.exp(2j * np.pi * lam * g / 4) / 2
            assert np.abs(cov.effects[g] - np.outer(f, f.conj())).max() < 1e-12

    def test_multiplicity_two(self):
        cov = canonical_position(3, 2)
        povm = cov.povm()
        assert constant_rank(povm) == 2
        assert is_spectral_measure(povm)
        assert covariant_extremality(cov).extremal

    def test_position_state_localizes(self):
        cov = canonical_position(5, 1)
        lam = np.arange(5)
        for g0 in range(5):
            chi = np.exp(2j * np.pi * lam * g0 / 5) / np.sqrt(5)
            p = born_probabilities(DensityState.pure(chi), cov.povm())
            assert p[g0] == pytest.approx(1.0, abs=1e-12)


class TestCovariantExtremality:
    def test_rank_one_orbit_extremal(self):
        cov = build_covariant(CyclicRep(2, (0, 1)), 0.5 * (I2 + SX))
        assert covariant_extremality(cov).extremal

    def test_uniform_seed_not_extremal(self):
        cov = build_covariant(CyclicRep(2, (0, 1)), I2 / 2)
        verdict = covariant_extremality(cov)
        assert not verdict.extremal
        assert verdict.kernel_dim >= 1
        assert quick_reject(cov.povm()) == "non-extremal"

    @pytest.mark.parametrize("seed", range(10))
    def test_agreement_with_generic_test(self, seed):
        rng = np.random.default_rng(200 + seed)
        order = int(rng.integers(2, 5))
        mult = int(rng.integers(1, 3))
        labels = tuple(c for c in range(order) for _ in range(mult))
        rep = CyclicRep(order, labels)
        rank = int(rng.integers(mult, rep.dim + 1))
        cov = build_covariant(rep, random_seed_matrix(rep, rank, rng))
        structured = covariant_extremality(cov)
        generic = extremality_test(cov.povm())
        assert structured.extremal == generic.extremal
        assert structured.kernel_dim == generic.kernel_dim
