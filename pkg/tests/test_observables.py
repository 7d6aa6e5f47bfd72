import math

import numpy as np
import pytest
from scipy import integrate

from cohstates.coherent import build_cs, energy_expectation
from cohstates.constants import (
    BASIS_SUSY_ISO, FAMILY_L_MINUS, FAMILY_LIN_L_MINUS, KIND_P, KIND_P2, KIND_X,
    KIND_X2, SOURCE_QUADRATURE,
)
from cohstates.errors import BasisMismatch, UnsupportedBasis
from cohstates.fock import energy, truncated_oscillator_spec
from cohstates.observables import (
    MatrixElementTable, build_table, closed_table, energy_table, expectation,
    matrix_element_closed, matrix_element_quadrature, position_density,
    reconcile_tables, trunc_rows, trunc_tables, uncertainty_scan,
    write_discrepancy_csv,
)
from cohstates.utils import read_csv


@pytest.fixture(scope="module")
def tablas():
    return trunc_tables(29)


@pytest.fixture
def spec():
    return truncated_oscillator_spec()


# --------- Elementos de matriz ----------
def test_spot_values_closed_form():
    assert matrix_element_closed(KIND_X, 0, 0).real == pytest.approx(2.0 / math.sqrt(math.pi))
    assert matrix_element_closed(KIND_X2, 0, 0).real == pytest.approx(1.5)


def test_spot_values_quadrature(tablas):
    assert tablas[KIND_X].entries[0, 0].real == pytest.approx(2.0 / math.sqrt(math.pi), abs=1e-10)
    assert tablas[KIND_X2].entries[0, 0].real == pytest.approx(1.5, abs=1e-10)
    assert tablas[KIND_P2].entries[0, 0].real == pytest.approx(1.5, abs=1e-10)
    assert tablas[KIND_X].source == SOURCE_QUADRATURE


def test_x_closed_form_agrees_with_quadrature():
    assert matrix_element_quadrature(KIND_X, 1, 0) == pytest.approx(
        matrix_element_closed(KIND_X, 1, 0), abs=1e-8)


@pytest.mark.parametrize("kind", [KIND_X, KIND_P])
def test_first_order_closed_forms(kind):
    cerrada = closed_table(kind, 8).entries
    cuad = build_table(kind, 8).entries
    np.testing.assert_allclose(cerrada, cuad, atol=1e-8)


def test_p_table_passes_reference_check():
    tabla = build_table(KIND_P, 29, check=True)
    assert tabla.size == 30
    np.testing.assert_allclose(tabla.entries, build_table(KIND_P, 29, check=False).entries)


def test_x2_selection_rule(tablas):
    X2 = tablas[KIND_X2].entries
    n = np.arange(X2.shape[0])
    lejos = np.abs(n[:, None] - n[None, :]) >= 2
    assert np.max(np.abs(X2[lejos])) < 1e-10


def test_p_is_hermitian_and_imaginary(tablas):
    P = tablas[KIND_P].entries
    assert np.max(np.abs(P.real)) < 1e-12
    assert np.max(np.abs(np.diag(P))) < 1e-12
    np.testing.assert_allclose(P, P.conj().T, atol=1e-12)


def test_p2_from_hamiltonian(tablas):
    # H = (P^2 + X^2) / 2 es diagonal en la base propia
    n = tablas[KIND_X2].size
    esperado = np.diag([2.0 * energy(k) for k in range(n)]) - tablas[KIND_X2].entries
    np.testing.assert_allclose(tablas[KIND_P2].entries, esperado, atol=1e-9)


def test_closed_forms_unsupported_basis():
    with pytest.raises(UnsupportedBasis):
        matrix_element_closed(KIND_X, 0, 0, basis=BASIS_SUSY_ISO)


def test_reconcile_reports_only_second_order(tmp_path):
    tablas, filas = reconcile_tables()
    assert set(tablas) == {KIND_X, KIND_X2, KIND_P, KIND_P2}
    assert all(f[0] in (KIND_X2, KIND_P2) for f in filas)
    ruta = write_discrepancy_csv(tmp_path / "discrepancias.csv", filas)
    comentario, cabecera, filas_csv = read_csv(ruta)
    assert comentario.startswith("# config=")
    assert cabecera == ["kind", "n", "m", "closed_form", "quadrature", "abs_diff"]
    assert len(filas_csv) == len(filas)


# --------- Valores esperados ----------
def test_expectation_energy_table(spec):
    cs = build_cs(FAMILY_L_MINUS, spec, 1.0, truncation=60)
    H = energy_table(spec, 59)
    assert expectation(H, cs) == pytest.approx(0.5 + 1.0 / math.tanh(1.0), abs=1e-5)
    assert expectation(H, cs) == pytest.approx(energy_expectation(cs), rel=1e-12)


def test_expectation_vacuum_position(spec, tablas):
    cs = build_cs(FAMILY_L_MINUS, spec, 0.0)
    assert expectation(tablas[KIND_X], cs) == pytest.approx(2.0 / math.sqrt(math.pi), abs=1e-10)


def test_expectation_basis_mismatch(spec):
    cs = build_cs(FAMILY_L_MINUS, spec, 0.5)
    otra = MatrixElementTable(KIND_X, np.eye(4), SOURCE_QUADRATURE, BASIS_SUSY_ISO)
    with pytest.raises(BasisMismatch):
        expectation(otra, cs)


# --------- Incertidumbres ----------
def test_uncertainty_bound_and_tail(spec, tablas):
    registros = uncertainty_scan(FAMILY_L_MINUS, spec, np.linspace(0.25, 5.0, 20), tables=tablas)
    assert min(r.product for r in registros) >= 0.5 - 5e-3
    assert abs(registros[-1].product - 0.5) < 0.05


def test_l_minus_squeezes_position(spec, tablas):
    registros = uncertainty_scan(FAMILY_L_MINUS, spec, np.linspace(0.25, 3.0, 12), tables=tablas)
    assert all(r.sigma_x < r.sigma_p for r in registros)


def test_linear_family_crossing(spec, tablas):
    bajo, uno, alto = uncertainty_scan(FAMILY_LIN_L_MINUS, spec, [0.5, 1.0, 2.0], tables=tablas)
    assert abs(uno.sigma_x - uno.sigma_p) < 0.02
    assert bajo.sigma_p > bajo.sigma_x
    assert alto.sigma_x > alto.sigma_p


# --------- Densidad ----------
def test_position_density_normalized(spec):
    x = np.linspace(1e-3, 12.0, 2400)
    cs = build_cs(FAMILY_L_MINUS, spec, 1.2)
    P = position_density(cs, trunc_rows(cs.truncation - 1, x))
    assert integrate.trapezoid(P, x) == pytest.approx(1.0, abs=1e-4)
