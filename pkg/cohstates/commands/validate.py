# =========================
# validate: batería completa de comprobaciones numéricas
# =========================
import math
from functools import lru_cache

import numpy as np

from . import csv_config
from ..coherent import (
    build_cs, closed_form_norm, displacement_partial_sums, eigen_residual as cs_residual,
    energy_closed_form, energy_expectation, identity_resolution_check,
    measure_trunc_corrected, measure_trunc_published,
)
from ..constants import (
    BASIS_TRUNCATION, BCH_TOL, CLOSED_FORM_TOL, EIGEN_TOL, ENTROPY_CONVERGENCE_TOL,
    EXIT_OK, EXIT_VALIDATION, FAMILY_DISPLACEMENT, FAMILY_L_MINUS,
    FAMILY_LIN_L_MINUS, FLATNESS_BAND, HOM_TOL, ISO, ISO_GROUND, KIND_P,
    KIND_P2, KIND_X, KIND_X2, LOWER, NEW, NEW_ENTROPY_BAND, ORTHO_TOL,
    OVERLAP_TOL, R_MAX_TRUNC, RAISE, RESIDUAL_TOL, STATUS_EXPECTED,
    STATUS_FAIL, STATUS_PASS, STATUS_SKIPPED, UNCERTAINTY_SLACK,
    UNCERTAINTY_TERMS,
)
from ..entangle import (
    METHOD_BCH, METHOD_EXPM, BeamSplitterSetting, entropy_of, entropy_scan,
    halfline_overlap, halfline_overlap_quadrature, splitter_block, truncated_cs,
)
from ..errors import CohStatesError
from ..fock import commutator_check, truncated_oscillator_spec
from ..numerics import check_rule_convergence, gauss_halfline_rule, hyp2f1_terminating
from ..observables import reconcile_tables, uncertainty_scan
from ..susy import (
    OP_FULL, OP_LINEAR, check_grid, closed_form_potential, eigen_residual,
    hat_c, iso_eigenfunction_derivatives, iso_spec, new_eigenfunction_derivatives,
    new_measure_check, potential_from_denominator, q4_model, recover_nu,
    susy_cs, susy_ladder, susy_ladder_action, wronskian_potential,
)
from ..utils import aviso, error, info, write_csv


# --------- Resultados ----------
def _ok(cond, detail):
    return (STATUS_PASS if cond else STATUS_FAIL), detail


@lru_cache(maxsize=1)
def _reconcile():
    return reconcile_tables()


# --------- Funciones especiales ----------
def check_hyp2f1(ctx):
    v = hyp2f1_terminating(-2, -0.5, 3, 2)
    return _ok(abs(v - 19.0 / 12.0) < 1e-14, f"2F1(-2,-1/2;3;2) = {v:.15g}")


def check_gauss_rule(ctx):
    desvio = check_rule_convergence(lambda x: x ** 4 * np.cos(x))
    return _ok(True, f"la regla compuesta difiere en {desvio:.2e}")


# --------- Oscilador truncado ----------
def check_norm_lminus(ctx):
    spec = truncated_oscillator_spec()
    peor = 0.0
    for r in (0.1, 1.0, 2.0):
        c = closed_form_norm(FAMILY_L_MINUS, r)
        directo = build_cs(FAMILY_L_MINUS, spec, r, truncation=ctx["basis"]).norm_constant
        peor = max(peor, abs(directo - c) / c)
    return _ok(peor < 1e-10, f"desvío relativo {peor:.2e}")


def check_norm_displacement(ctx):
    spec = truncated_oscillator_spec()
    peor = 0.0
    for r in (0.1, 0.3, 0.45):
        c = closed_form_norm(FAMILY_DISPLACEMENT, r)
        directo = build_cs(FAMILY_DISPLACEMENT, spec, r, truncation=400).norm_constant
        peor = max(peor, abs(directo - c) / c)
    parcial = float(displacement_partial_sums(spec, 0.6, 100)[-1])
    return _ok(peor < 1e-8 and parcial > 1e6,
               f"desvío relativo {peor:.2e}; suma parcial en |z| = 0.6: {parcial:.3e}")


def check_energy_trunc(ctx):
    spec = truncated_oscillator_spec()
    peor = 0.0
    for r in (0.5, 1.0, 1.5, 2.0, 3.0):
        directo = energy_expectation(build_cs(FAMILY_L_MINUS, spec, r, truncation=60))
        c = energy_closed_form(r)
        peor = max(peor, abs(directo - c) / c)
    return _ok(peor < 1e-8, f"desvío relativo {peor:.2e}")


def check_eigenrelation(ctx):
    spec = truncated_oscillator_spec()
    peor = max(cs_residual(build_cs(FAMILY_L_MINUS, spec, r, truncation=ctx["basis"]))
               for r in (0.5, 1.0, 2.0))
    return _ok(peor < EIGEN_TOL, f"residuo máximo {peor:.2e}")


def check_mu_iso(ctx):
    desvio = new_measure_check(ctx["model"], subspace=ISO)
    return _ok(desvio < 1e-6, f"desvío {desvio:.2e}")


def check_mu_trunc_published(ctx):
    try:
        desvio = identity_resolution_check(FAMILY_L_MINUS, truncated_oscillator_spec(),
                                           measure_trunc_published(), 10, R_MAX_TRUNC)
    except CohStatesError as exc:
        return STATUS_EXPECTED, f"{type(exc).__name__}: {exc}"
    return STATUS_EXPECTED, f"desvío {desvio:.4g}"


def check_mu_trunc_corrected(ctx):
    desvio = identity_resolution_check(FAMILY_L_MINUS, truncated_oscillator_spec(),
                                       measure_trunc_corrected(), 10, R_MAX_TRUNC)
    return _ok(desvio < 1e-6, f"desvío {desvio:.2e}")


def check_tables_xp(ctx):
    _, filas = _reconcile()
    malas = [f for f in filas if f[0] in (KIND_X, KIND_P)]
    return _ok(not malas, f"{len(malas)} entradas X/P fuera de {CLOSED_FORM_TOL:g}")


def check_tables_second(ctx):
    _, filas = _reconcile()
    malas = [f for f in filas if f[0] in (KIND_X2, KIND_P2)]
    if malas:
        return STATUS_EXPECTED, f"{len(malas)} entradas X2/P2 difieren de la forma cerrada"
    return STATUS_PASS, "X2/P2 coinciden"


def check_spot_values(ctx):
    tablas, _ = _reconcile()
    x00 = tablas[KIND_X].entries[0, 0].real
    x2 = tablas[KIND_X2].entries[0, 0].real
    p2 = tablas[KIND_P2].entries[0, 0].real
    pnn = float(np.max(np.abs(np.diag(tablas[KIND_P].entries))))
    cond = (abs(x00 - 2.0 / math.sqrt(math.pi)) < 1e-10 and abs(x2 - 1.5) < 1e-10
            and abs(p2 - 1.5) < 1e-10 and pnn < 1e-12)
    return _ok(cond, f"x00 = {x00:.12g}, x2_00 = {x2:.12g}, p2_00 = {p2:.12g}, max|p_nn| = {pnn:.1e}")


def check_uncertainty(ctx):
    registros = uncertainty_scan(FAMILY_L_MINUS, truncated_oscillator_spec(),
                                 np.linspace(0.25, 5.0, 20), n_terms=UNCERTAINTY_TERMS,
                                 truncation=ctx["basis"])
    minimo = min(r.product for r in registros)
    cola = registros[-1].product
    return _ok(minimo >= 0.5 - UNCERTAINTY_SLACK and abs(cola - 0.5) < 0.05,
               f"mínimo {minimo:.5f}, producto en |z| = 5: {cola:.5f}")


def check_lin_crossing(ctx):
    r = uncertainty_scan(FAMILY_LIN_L_MINUS, truncated_oscillator_spec(), [1.0],
                         truncation=ctx["basis"])[0]
    return _ok(abs(r.sigma_x - r.sigma_p) < 0.02,
               f"sigma_x = {r.sigma_x:.5f}, sigma_p = {r.sigma_p:.5f}")


# --------- Modelo SUSY ----------
def check_wronskian(ctx):
    xs = check_grid()
    desvio = float(np.max(np.abs(wronskian_potential(ctx["model"].seeds, xs)
                                 - closed_form_potential(xs))))
    return _ok(desvio < RESIDUAL_TOL, f"desvío máximo {desvio:.2e}")


def check_nu_recovery(ctx):
    ajuste = recover_nu()
    esperados = tuple(s.nu for s in ctx["model"].seeds)
    return _ok(ajuste.nus == esperados, f"nu recuperados {ajuste.nus}, modelo {esperados}")


def check_potential_identity(ctx):
    xs = check_grid()
    desvio = float(np.max(np.abs(potential_from_denominator(xs) - closed_form_potential(xs))))
    return _ok(desvio < 1e-8, f"desvío máximo {desvio:.2e}")


def _susy_functions(model, xs, order):
    filas = [new_eigenfunction_derivatives(model, j, xs, order) for j in range(model.kappa)]
    filas += [iso_eigenfunction_derivatives(model, n, xs, order) for n in range(6)]
    energias = list(model.new_energies) + [ISO_GROUND + 2.0 * n for n in range(6)]
    return filas, energias


def check_susy_eigen(ctx):
    model = ctx["model"]
    xs = check_grid()
    filas, energias = _susy_functions(model, xs, 2)
    peor = max(eigen_residual(model, f[0], f[2], e, xs) for f, e in zip(filas, energias))
    return _ok(peor < RESIDUAL_TOL, f"residuo máximo {peor:.2e}")


def check_susy_orthonormal(ctx):
    model = ctx["model"]
    rule = gauss_halfline_rule()
    filas, _ = _susy_functions(model, rule.nodes, 0)
    phi = np.array([f[0] for f in filas])
    G = (phi * rule.plain_weights) @ phi.T
    desvio = float(np.max(np.abs(G - np.eye(len(filas)))))
    return _ok(desvio < ORTHO_TOL, f"desvío de la identidad {desvio:.2e}")


def check_ladder_algebra(ctx):
    ladder = susy_ladder(ctx["model"])
    peor = commutator_check(iso_spec(), 20, target=lambda k: 2.0)
    for n in range(21):
        arriba, _ = susy_ladder_action(ladder, ISO, LOWER, n + 1, OP_LINEAR)
        abajo, _ = susy_ladder_action(ladder, ISO, RAISE, n - 1, OP_LINEAR) if n else (0j, None)
        peor = max(peor, abs(abs(arriba) ** 2 - abs(abajo) ** 2 - 2.0))
    c, _ = susy_ladder_action(ladder, ISO, LOWER, 1, OP_FULL)
    d = abs(c - math.sqrt(8640.0))
    return _ok(peor < 1e-12 and d < 1e-9, f"conmutador {peor:.1e}, L^- en E_1: {c.real:.10g}")


def check_energy_iso(ctx):
    r = 1.3
    directo = energy_expectation(susy_cs(ctx["model"], ISO, r, ctx["basis"]))
    c = ISO_GROUND + 4.0 * r * r
    return _ok(abs(directo - c) < 1e-8, f"<H>_iso = {directo:.12g} frente a {c:.12g}")


def check_mu_new(ctx):
    desvio = new_measure_check(ctx["model"])
    return STATUS_EXPECTED, f"desvío {desvio:.4g}"


def check_hat_c(ctx):
    model = ctx["model"]
    r = 0.5
    publicado = hat_c(model, r)
    directo = 1.0 / susy_cs(model, NEW, r).norm_constant ** 2
    return STATUS_EXPECTED, f"|z| = {r}: C^_z publicado {publicado:.8g}, norma directa {directo:.8g}"


# --------- Divisor de haz y entropía ----------
def check_bch(ctx):
    setting = BeamSplitterSetting(math.pi / 3.0, 0.7)
    peor = max(float(np.max(np.abs(splitter_block(N, setting, METHOD_BCH)
                                   - splitter_block(N, setting, METHOD_EXPM))))
               for N in range(11))
    return _ok(peor < BCH_TOL, f"error máximo {peor:.2e}")


def check_hom(ctx):
    salida = splitter_block(2, BeamSplitterSetting()) @ np.array([0.0, 1.0, 0.0])
    return _ok(abs(salida[1]) < HOM_TOL, f"|<1,1|B|1,1>| = {abs(salida[1]):.1e}")


def check_overlaps(ctx):
    peor = 0.0
    for a in range(21):
        for b in range(21 - a):
            s = a + b
            if s % 2 == 0 and s > 0:
                continue
            q = halfline_overlap_quadrature(a, b)
            peor = max(peor, abs(halfline_overlap(a, b) - q) / max(1.0, abs(q)))
    spots = (abs(halfline_overlap(0, 1) - 1.0), abs(halfline_overlap(1, 1) - math.sqrt(math.pi)),
             abs(halfline_overlap(0, 0) - math.sqrt(math.pi) / 2.0))
    return _ok(peor < OVERLAP_TOL and max(spots) < 1e-12,
               f"desvío relativo {peor:.2e}, valores puntuales {max(spots):.1e}")


def check_entropy_identity(ctx):
    s = entropy_of(truncated_cs(FAMILY_L_MINUS, 1.0), BeamSplitterSetting(0.0, 0.0))
    return _ok(abs(s) < 1e-8, f"S(theta = 0) = {s:.2e}")


def _entropy_valid(puntos):
    S = [p.S for p in puntos]
    dentro = all(0.0 <= s < 1.0 for s in S) and all(p.converged for p in puntos)
    return dentro, S


def check_entropy_flat(ctx):
    puntos = entropy_scan(FAMILY_L_MINUS, np.linspace(0.0, 2.0, 5))
    dentro, S = _entropy_valid(puntos)
    ancho = max(S) - min(S)
    return _ok(dentro and ancho < FLATNESS_BAND,
               f"max - min = {ancho:.4f} (tolerancia de convergencia {ENTROPY_CONVERGENCE_TOL:g})")


def check_entropy_new(ctx):
    puntos = entropy_scan(NEW, np.linspace(0.0, 2.0, 5), model=ctx["model"])
    dentro, S = _entropy_valid(puntos)
    lejos = max(abs(s - 0.5) for s in S)
    return _ok(dentro and lejos < NEW_ENTROPY_BAND, f"max |S - 0.5| = {lejos:.4f}")


# nombre -> (comprobación, sensible a la truncación)
CHECKS = {
    "hyp2f1_terminating": (check_hyp2f1, False),
    "gauss_rule": (check_gauss_rule, False),
    "norm_l_minus": (check_norm_lminus, True),
    "norm_displacement": (check_norm_displacement, False),
    "energy_trunc": (check_energy_trunc, False),
    "eigenrelation": (check_eigenrelation, True),
    "mu_iso": (check_mu_iso, False),
    "mu_trunc_published": (check_mu_trunc_published, False),
    "mu_trunc_corrected": (check_mu_trunc_corrected, False),
    "tables_x_p": (check_tables_xp, False),
    "tables_x2_p2": (check_tables_second, False),
    "spot_values": (check_spot_values, False),
    "uncertainty_bound": (check_uncertainty, True),
    "linear_crossing": (check_lin_crossing, True),
    "wronskian_potential": (check_wronskian, False),
    "nu_recovery": (check_nu_recovery, False),
    "potential_identity": (check_potential_identity, False),
    "susy_eigen_residuals": (check_susy_eigen, False),
    "susy_orthonormality": (check_susy_orthonormal, False),
    "ladder_algebra": (check_ladder_algebra, False),
    "energy_iso": (check_energy_iso, True),
    "mu_new_published": (check_mu_new, False),
    "c_hat_published": (check_hat_c, False),
    "beamsplitter_bch": (check_bch, False),
    "hong_ou_mandel": (check_hom, False),
    "halfline_overlaps": (check_overlaps, False),
    "entropy_theta_zero": (check_entropy_identity, False),
    "entropy_flat_trunc": (check_entropy_flat, False),
    "entropy_new_band": (check_entropy_new, False),
}


def run_checks(config, names=None):
    """Ejecuta las comprobaciones y devuelve filas (nombre, estado, detalle)."""
    ctx = {"basis": config.basis_size, "model": None}
    filas = []
    for nombre, (check, sensible) in CHECKS.items():
        if names is not None and nombre not in names:
            continue
        if sensible and config.basis_size < BASIS_TRUNCATION:
            aviso(f"{nombre}: omitida con basis_size {config.basis_size} < {BASIS_TRUNCATION}")
            filas.append((nombre, STATUS_SKIPPED, f"basis_size {config.basis_size}"))
            continue
        try:
            if ctx["model"] is None:
                ctx["model"] = q4_model()
            estado, detalle = check(ctx)
        except (CohStatesError, ValueError) as exc:
            estado, detalle = STATUS_FAIL, f"{type(exc).__name__}: {exc}"
        if estado == STATUS_FAIL:
            error(f"{nombre}: {detalle}")
        else:
            info(f"{nombre}: {estado} ({detalle})")
        filas.append((nombre, estado, detalle))
    return filas


def run(config):
    filas = run_checks(config)
    write_csv(config.output_path, ["check", "status", "detail"], filas,
              config=csv_config(config), basis_size=config.basis_size)
    fallas = [f[0] for f in filas if f[1] == STATUS_FAIL]
    if fallas:
        error(f"{len(fallas)} comprobaciones fallaron: {', '.join(fallas)}")
        return EXIT_VALIDATION
    info(f"{len(filas)} comprobaciones sin fallas")
    return EXIT_OK
