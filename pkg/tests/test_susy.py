import math

import numpy as np
import pytest

from cohstates.coherent import energy_expectation
from cohstates.constants import ISO, LOWER, NEW, RAISE
from cohstates.errors import (
    ConfigError, IndexOutOfRange, SingularWronskian, UnsupportedModel,
)
from cohstates.fock import eigenfunction_derivatives, energy
from cohstates.susy import (
    OP_FULL, OP_LINEAR, check_grid, closed_form_potential, compare_new_closed_forms,
    custom_model, darboux_states, eigen_residual, export_model_csv, hat_c,
    iso_eigenfunction, iso_eigenfunction_derivatives, new_amplitudes,
    new_eigenfunction, new_eigenfunction_derivatives, new_measure_check,
    new_probability_closed_form, potential_from_denominator, recover_nu,
    seed_solution, susy_cs, susy_ladder, susy_ladder_action,
    susy_uncertainty_scan, wronskian_potential,
)
from cohstates.utils import read_csv


# --------- Semillas ----------
def test_seed_at_ground_energy_is_ground_state():
    x = np.linspace(0.5, 3.0, 26)
    u = seed_solution(1.5, math.inf)(x)[0]
    psi = eigenfunction_derivatives(0, x, 0)[0]
    razon = u / psi
    assert np.ptp(razon) < 1e-10 * abs(razon[0])


@pytest.mark.parametrize("nu", [0.0, 0.7, math.inf])
def test_seed_solves_schrodinger(nu):
    x = np.linspace(0.1, 4.0, 40)
    u = seed_solution(-2.5, nu)(x, 2)
    residuo = -0.5 * u[2] + (0.5 * x ** 2 + 2.5) * u[0]
    assert np.max(np.abs(residuo) / np.abs(u[0])) < 1e-8


def test_even_seed_parity():
    x = np.linspace(0.1, 2.0, 10)
    seed = seed_solution(-3.5, 0.0)
    np.testing.assert_allclose(seed(x)[0], seed(-x)[0], rtol=1e-14)


# --------- Potencial ----------
def test_empty_seed_list_keeps_oscillator():
    x = np.linspace(0.1, 3.0, 7)
    np.testing.assert_allclose(wronskian_potential([], x), x ** 2 / 2.0)


def test_q4_potential_matches_closed_form(model):
    xs = check_grid()
    assert np.max(np.abs(wronskian_potential(model.seeds, xs) - closed_form_potential(xs))) < 1e-6


def test_chain_and_determinant_agree(model):
    xs = np.linspace(0.2, 3.0, 30)
    np.testing.assert_allclose(wronskian_potential(model.seeds, xs, method="determinant"),
                               wronskian_potential(model.seeds, xs), atol=1e-6)


def test_potential_identity():
    xs = check_grid()
    np.testing.assert_allclose(potential_from_denominator(xs), closed_form_potential(xs),
                               atol=1e-9)


def test_singular_seed_pair():
    seeds = [seed_solution(-4.5, 0.0), seed_solution(-3.5, math.inf)]
    with pytest.raises(SingularWronskian) as info:
        wronskian_potential(seeds, check_grid())
    assert 0.1 <= info.value.x <= 6.0


def test_unknown_method(model):
    with pytest.raises(ValueError):
        wronskian_potential(model.seeds, [1.0], method="magia")


def test_second_order_chain_states():
    seeds = [seed_solution(-4.5, math.inf), seed_solution(-3.5, 0.0)]
    h = 1e-3
    x = np.arange(0.5, 4.0, h)
    V = wronskian_potential(seeds, x)
    for k in range(3):
        psi = eigenfunction_derivatives(k, x, 1)
        g, dg = darboux_states(seeds, energy(k), psi[0], psi[1], x)
        segunda = np.gradient(dg, h)
        residuo = -0.5 * segunda + (V - energy(k)) * g
        assert np.max(np.abs(residuo[5:-5])) < 1e-4


@pytest.mark.slow
def test_recover_nu():
    ajuste = recover_nu()
    assert ajuste.nus == (math.inf, 0.0, math.inf, 0.0)
    assert ajuste.residual < 1e-6


# --------- Autofunciones ----------
def test_eigen_residuals(model):
    xs = check_grid()
    for j in range(2):
        d = new_eigenfunction_derivatives(model, j, xs)
        assert eigen_residual(model, d[0], d[2], model.new_energy(j), xs) < 1e-6
    for n in range(6):
        d = iso_eigenfunction_derivatives(model, n, xs)
        assert eigen_residual(model, d[0], d[2], 1.5 + 2.0 * n, xs) < 1e-6


def test_orthonormality(model, rule):
    funcs = [new_eigenfunction(model, j) for j in range(2)]
    funcs += [iso_eigenfunction(model, n) for n in range(6)]
    phi = np.array([f(rule.nodes) for f in funcs])
    G = (phi * rule.plain_weights) @ phi.T
    np.testing.assert_allclose(G, np.eye(8), atol=1e-8)


def test_chain_reproduces_intertwiner(model):
    x = np.linspace(0.5, 4.0, 15)
    for n in range(3):
        psi = eigenfunction_derivatives(n, x, 1)
        g, _ = darboux_states(model.seeds, energy(n), psi[0], psi[1], x)
        np.testing.assert_allclose(np.abs(g), np.abs(iso_eigenfunction(model, n)(x)),
                                   rtol=1e-7, atol=1e-9)


def test_new_eigenfunction_index(model):
    with pytest.raises(IndexOutOfRange):
        new_eigenfunction(model, 2)
    with pytest.raises(IndexOutOfRange):
        model.new_energy(2)


# --------- Escaleras ----------
def test_linear_ladder_actions(model):
    ladder = susy_ladder(model)
    c, destino = susy_ladder_action(ladder, ISO, LOWER, 1)
    assert c == pytest.approx(math.sqrt(2.0)) and destino == 0
    assert susy_ladder_action(ladder, NEW, LOWER, 0) == (0j, None)
    assert susy_ladder_action(ladder, NEW, RAISE, 1) == (0j, None)
    c, destino = susy_ladder_action(ladder, NEW, LOWER, 1, OP_LINEAR)
    assert c == pytest.approx(2j) and destino == 0


def test_full_ladder_coefficients(model):
    ladder = susy_ladder(model)
    c, _ = susy_ladder_action(ladder, ISO, LOWER, 1, OP_FULL)
    assert c == pytest.approx(math.sqrt(8640.0))
    c, _ = susy_ladder_action(ladder, NEW, LOWER, 1, OP_FULL)
    assert c == pytest.approx(12.0)


def test_linear_commutator_is_two(model):
    ladder = susy_ladder(model)
    for n in range(21):
        arriba, _ = susy_ladder_action(ladder, ISO, LOWER, n + 1)
        abajo = susy_ladder_action(ladder, ISO, RAISE, n - 1)[0] if n else 0.0
        assert abs(arriba) ** 2 - abs(abajo) ** 2 == pytest.approx(2.0, abs=1e-12)


def test_ladder_index_checks(model):
    ladder = susy_ladder(model)
    with pytest.raises(IndexOutOfRange):
        susy_ladder_action(ladder, NEW, LOWER, 2)
    with pytest.raises(IndexOutOfRange):
        susy_ladder_action(ladder, ISO, RAISE, -1)
    with pytest.raises(ValueError):
        susy_ladder_action(ladder, ISO, LOWER, 1, operator="otro")


# --------- Estados coherentes ----------
def test_iso_vacuum(model):
    cs = susy_cs(model, ISO, 0.0)
    assert abs(cs.amplitudes[0]) == pytest.approx(1.0)
    assert np.sum(np.abs(cs.amplitudes[1:])) == 0.0


def test_iso_energy(model):
    r = 1.3
    assert energy_expectation(susy_cs(model, ISO, r)) == pytest.approx(1.5 + 4.0 * r * r, abs=1e-8)


def test_new_state_norm(model):
    r = 0.4
    amps = new_amplitudes(model, r)
    assert amps[1] == pytest.approx(1j * math.sqrt(6.0) * r)
    cs = susy_cs(model, NEW, r)
    assert 1.0 / cs.norm_constant ** 2 == pytest.approx(1.0 + 6.0 * r * r)
    assert hat_c(model, r) == pytest.approx(1.0 - 6.0 * r * r)


def test_new_closed_forms_are_reported(model):
    filas = compare_new_closed_forms(model, 0.5)
    assert [f[0] for f in filas] == ["H", "P_1"]
    with pytest.raises(IndexOutOfRange):
        new_probability_closed_form(model, 0.5, 0)


def test_measures(model):
    assert new_measure_check(model, subspace=ISO) < 1e-6
    assert new_measure_check(model) == math.inf


def test_iso_uncertainty_bound(model):
    registros = susy_uncertainty_scan(model, ISO, [0.3, 1.0, 1.5])
    assert all(r.product >= 0.5 - 5e-3 for r in registros)


def test_iso_squeezing_switches(model):
    bajo = susy_uncertainty_scan(model, ISO, [0.3, 0.6])
    alto = susy_uncertainty_scan(model, ISO, [1.5, 2.0])
    assert all(r.sigma_x < r.sigma_p for r in bajo)
    assert all(r.sigma_x > r.sigma_p for r in alto)


def test_new_squeezes_position(model):
    registros = susy_uncertainty_scan(model, NEW, np.linspace(0.25, 3.0, 12))
    assert all(r.sigma_p > r.sigma_x for r in registros)


def test_new_uncertainty_scan(model):
    registros = susy_uncertainty_scan(model, NEW, [0.5, 2.0], n_terms=30)
    assert all(r.truncation == 2 for r in registros)
    assert all(r.product > 0 for r in registros)


# --------- Modelos ----------
def test_custom_model_from_pairs():
    m = custom_model([(-3.5, 0.0), (-4.5, math.inf)])
    assert m.q == 2 and m.kappa == 1
    assert m.new_energies == (-3.5,)
    assert m.delta1 == pytest.approx(5.0)
    with pytest.raises(UnsupportedModel):
        iso_eigenfunction(m, 0)


def test_custom_model_gamma_pole():
    with pytest.raises(ConfigError):
        custom_model([(1.5, 1.0)])


def test_custom_model_rejects_high_energy():
    with pytest.raises(ConfigError):
        custom_model([(-1.0, 0.0), (0.7, 0.0)])


def test_export_model_csv(model, tmp_path):
    ruta = export_model_csv(model, tmp_path / "q4.csv")
    _, cabecera, filas = read_csv(ruta)
    assert cabecera == ["x", "V", "phi_E0", "phi_E1"] + [f"phi_{n}" for n in range(6)]
    assert len(filas) == 200
    m = custom_model([(-4.5, math.inf), (-3.5, 0.0)])
    _, cabecera, _ = read_csv(export_model_csv(m, tmp_path / "q2.csv"))
    assert cabecera == ["x", "V"]
