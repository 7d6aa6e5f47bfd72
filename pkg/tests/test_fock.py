import math

import numpy as np
import pytest

from cohstates.constants import BASIS_FULL_HO, BASIS_TRUNC, LOWER, RAISE
from cohstates.errors import BasisMismatch, ConfigError, IndexOutOfRange
from cohstates.fock import (
    FockVector, LadderSpec, commutator_check, eigenfunction,
    eigenfunction_derivatives, energy, harmonic_oscillator_spec, ho_functions,
    ladder_apply, truncated_oscillator, truncated_oscillator_spec,
)
from cohstates.numerics import integrate_plain


def _ket(n, size=6, basis=BASIS_TRUNC):
    v = np.zeros(size)
    v[n] = 1.0
    return FockVector(basis, v)


# --------- Espectro y autofunciones ----------
@pytest.mark.parametrize("k, esperado", [(0, 1.5), (1, 3.5), (10, 21.5)])
def test_energy(k, esperado):
    assert energy(k) == esperado


def test_energy_negative_index():
    with pytest.raises(IndexOutOfRange):
        energy(-1)


def test_eigenfunction_values():
    assert eigenfunction(0, 1.0) == pytest.approx(2.0 * math.exp(-0.5) * math.pi ** -0.25, rel=1e-13)
    assert abs(eigenfunction(3, 1e-9)) < 1e-8


def test_eigenfunction_normalized_and_orthogonal(rule):
    for k in range(4):
        for m in range(4):
            valor = integrate_plain(lambda x: eigenfunction(k, x) * eigenfunction(m, x), rule)
            assert valor == pytest.approx(1.0 if k == m else 0.0, abs=1e-12)


def test_eigenfunction_orthonormal_to_twenty(rule):
    Phi = np.array([eigenfunction(k, rule.nodes) for k in range(21)])
    G = (Phi * rule.plain_weights) @ Phi.T
    np.testing.assert_allclose(G, np.eye(21), atol=1e-11)


def test_eigenfunction_derivatives_solve_schrodinger():
    x = np.linspace(0.1, 5.0, 50)
    for k in range(5):
        psi = eigenfunction_derivatives(k, x, 2)
        residuo = -0.5 * psi[2] + 0.5 * x ** 2 * psi[0] - energy(k) * psi[0]
        assert np.max(np.abs(residuo)) < 1e-10


def test_eigenfunction_derivative_against_finite_difference():
    x = np.linspace(0.5, 3.0, 11)
    h = 1e-6
    d = eigenfunction_derivatives(2, x, 1)[1]
    fd = (eigenfunction(2, x + h) - eigenfunction(2, x - h)) / (2 * h)
    np.testing.assert_allclose(d, fd, rtol=1e-6, atol=1e-8)


def test_ho_functions_relate_to_truncated_states():
    # psi_k = sqrt(2) psi^HO_{2k+1} sobre la semirrecta
    x = np.linspace(0.1, 4.0, 20)
    ho = ho_functions(7, x)
    for k in range(4):
        np.testing.assert_allclose(eigenfunction(k, x), math.sqrt(2.0) * ho[2 * k + 1], rtol=1e-12)


def test_truncated_normalization_constants():
    osc = truncated_oscillator()
    assert osc.log_a(0) - osc.log_b(0) == pytest.approx(0.5 * math.log(2.0))
    assert math.exp(osc.log_b(0)) == pytest.approx((math.sqrt(math.pi) * 1.0 * 1.0) ** -0.5)


# --------- Escaleras ----------
def test_ladder_apply_truncated():
    spec = truncated_oscillator_spec()
    bajado = ladder_apply(spec, LOWER, _ket(1))
    np.testing.assert_allclose(bajado.amplitudes, np.sqrt(6.0) * _ket(0).amplitudes)
    assert ladder_apply(spec, LOWER, _ket(0)).norm() == 0.0
    subido = ladder_apply(spec, RAISE, _ket(0))
    np.testing.assert_allclose(subido.amplitudes, np.sqrt(6.0) * _ket(1).amplitudes)


def test_ladder_apply_basis_mismatch():
    with pytest.raises(BasisMismatch):
        ladder_apply(truncated_oscillator_spec(), LOWER, _ket(1, basis=BASIS_FULL_HO))


def test_ladder_apply_unknown_direction():
    with pytest.raises(ValueError):
        ladder_apply(truncated_oscillator_spec(), "sideways", _ket(1))


def test_commutator_truncated_oscillator():
    assert commutator_check(truncated_oscillator_spec(), 20) < 1e-10


def test_commutator_harmonic_oscillator():
    assert commutator_check(harmonic_oscillator_spec(), 20, target=lambda k: 1.0) < 1e-12


def test_commutator_negative_control():
    spec = LadderSpec(f=lambda k: float(k * k), g=lambda k: float(k * k),
                      xi=lambda k: k + 0.5, name="k^2")
    assert commutator_check(spec, 5, target=lambda k: 1.0) > 0.5


def test_ladder_spec_validation():
    with pytest.raises(ConfigError):
        LadderSpec(f=lambda k: 1.0, g=float, xi=float)
    with pytest.raises(ConfigError):
        LadderSpec(f=float, g=lambda k: 1.0, xi=float, dim=3)
    with pytest.raises(ConfigError):
        LadderSpec(f=float, g=float, xi=lambda k: -k)


def test_commutator_finite_dimension_guard():
    spec = LadderSpec(f=float, g=lambda k: 0.0 if k >= 4 else float(k), xi=float, dim=4)
    with pytest.raises(IndexOutOfRange):
        commutator_check(spec, 3)


def test_fock_vector_overlap():
    a = FockVector(BASIS_TRUNC, [1.0, 1j])
    b = FockVector(BASIS_TRUNC, [1.0, 1.0, 5.0])
    assert a.overlap(b) == pytest.approx(1.0 - 1j)
    assert a.normalized().norm() == pytest.approx(1.0)
