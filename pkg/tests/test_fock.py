import numpy as np
import pytest
from scipy.linalg import expm

from povmkit import CutoffError, coherent_state, number_state, squeezed_state
from povmkit.fock import annihilation_matrix


def test_number_state_basis_vector():
    h2 = number_state(2, 8)
    assert h2.coeffs[2] == 1.0
    assert h2.tail_bound == 0.0
    with pytest.raises(CutoffError):
        number_state(8, 8)


def test_vacuum_is_coherent_zero():
    assert np.array_equal(coherent_state(0, 8).coeffs, number_state(0, 8).coeffs)


def test_coherent_closed_form_against_expm_oracle():
    z = 1.0 + 0.0j
    eta = coherent_state(z, 16)
    assert abs(eta.coeffs[0] - np.exp(-0.5)) < 1e-12
    # independent oracle: exponentiate the truncated generator at a higher cutoff
    work = 48
    a = annihilation_matrix(work)
    oracle = expm(z * a.conj().T - np.conj(z) * a)[:, 0]
    assert np.abs(eta.coeffs - oracle[:16]).max() < 1e-12


def test_coherent_tail_refusal():
    with pytest.raises(CutoffError):
        coherent_state(6.0, 16)


def test_coherent_normalized():
    eta = coherent_state(2.0 + 1.0j, 48)
    assert abs(np.linalg.norm(eta.coeffs) - 1.0) < 1e-12
    assert eta.tail_bound < 1e-6


def test_squeezed_zero_is_vacuum():
    sq = squeezed_state(0.0, 0.0, 0.0, 8)
    assert np.abs(sq.coeffs - number_state(0, 8).coeffs).max() < 1e-14


def test_squeezed_structure():
    sq = squeezed_state(0.5, 0.0, 0.0, 32)
    # squeezed vacuum populates even levels only
    assert np.abs(sq.coeffs[1::2]).max() < 1e-14
    assert abs(np.linalg.norm(sq.coeffs) - 1.0) < 1e-12
    # closed form for the first coefficient: 1/sqrt(cosh r)
    assert abs(abs(sq.coeffs[0]) - 1 / np.sqrt(np.cosh(0.5))) < 1e-10


def test_squeezed_against_direct_expm():
    r, theta = 0.4, 0.7
    work = 64
    a = annihilation_matrix(work)
    xi = r * np.exp(1j * theta)
    gen = 0.5 * (np.conj(xi) * a @ a - xi * a.conj().T @ a.conj().T)
    oracle = expm(gen)[:, 0][:24]
    sq = squeezed_state(r, theta, 0.0, 24)
    assert np.abs(sq.coeffs - oracle / np.linalg.norm(oracle)).max() < 1e-10


def test_displaced_squeezed_state():
    sq = squeezed_state(0.3, 0.0, 0.5 + 0.2j, 32)
    assert abs(np.linalg.norm(sq.coeffs) - 1.0) < 1e-12
    assert sq.tail_bound < 1e-8
    # displacement moves population off the even ladder
    assert np.abs(sq.coeffs[1]) > 1e-3


def test_squeezed_cutoff_refusal():
    with pytest.raises(CutoffError):
        squeezed_state(2.5, 0.0, 0.0, 8)


def test_padded_preserves_state():
    eta = coherent_state(1.0, 16)
    wide = eta.padded(32)
    assert wide.cutoff == 32
    assert np.array_equal(wide.coeffs[:16], eta.coeffs)
    assert np.abs(wide.coeffs[16:]).max() == 0.0


def test_mass_outside_disk_monotone():
    eta = coherent_state(1.0, 32)
    masses = [eta.mass_outside_disk(r) for r in (2.0, 4.0, 8.0)]
    assert masses[0] > masses[1] > masses[2]
    assert masses[2] < 1e-10
