# =========================
# Elementos de matriz, valores esperados e incertidumbres
# =========================
import math
from dataclasses import dataclass

import numpy as np

from .coherent import build_cs
from .constants import (
    BASIS_TRUNC, BASIS_TRUNCATION, CLOSED_FORM_CHECK_MAX, CLOSED_FORM_TOL,
    GAUSS_DEGREE, KIND_P, KIND_P2, KIND_X, KIND_X2, KINDS, LIN_ALPHA,
    SOURCE_CLOSED_FORM, SOURCE_QUADRATURE, UNCERTAINTY_TERMS,
)
from .errors import BasisMismatch, NonConvergence, UnsupportedBasis
from .fock import eigenfunction_derivatives
from .numerics import (
    composite_halfline_rule, gauss_halfline_rule, hyp2f1_terminating, log_factorial,
    log_gamma_signed,
)
from .utils import aviso, info, write_csv


@dataclass
class MatrixElementTable:
    kind: str
    entries: np.ndarray
    source: str
    basis: str

    @property
    def size(self):
        return self.entries.shape[0]


@dataclass(frozen=True)
class UncertaintyRecord:
    z_modulus: float
    sigma_x: float
    sigma_p: float
    product: float
    truncation: int


def _lf(n):
    return float(log_factorial(n))


# --------- Formas cerradas (base TRUNC) ----------
def _x_closed(n, m):
    d = n - m
    lg, sg = log_gamma_signed(d - 0.5)
    log_mag = (0.5 * (_lf(2 * n + 1) - _lf(2 * m + 1)) + (d - 1) * math.log(2.0)
               + lg - math.log(math.pi) - _lf(2 * d))
    signo = sg * (-1) ** ((d - 1) % 2)
    return signo * math.exp(log_mag) * hyp2f1_terminating(-2 * m - 1, d - 0.5, 2 * d + 1, 2.0)


def _p_closed(n, m):
    d = n - m
    lg, sg = log_gamma_signed(d - 0.5)
    log_mag = (0.5 * (_lf(2 * n + 1) - _lf(2 * m + 1)) + d * math.log(2.0)
               + lg - _lf(2 * d + 1))
    signo = sg * (-1) ** (d % 2)
    segundo = ((2 * m + 1) / math.pi * signo * math.exp(log_mag) * (2 * d - 1)
               * hyp2f1_terminating(-2 * m, d + 0.5, 2 * (d + 1), 2.0))
    return 1j * _x_closed(n, m) - 1j * segundo


def _pair_factor(n, m):
    return math.exp(0.5 * (_lf(2 * n + 1) + _lf(2 * m + 1)) - _lf(n + m))


def _x2_closed(n, m):
    delta = 1.0 if n == m else 0.0
    banda = (0.5 * (n == m - 1) + 1.0 * (n == m) + 0.5 * (n == m + 1))
    return 0.5 * delta + (_pair_factor(n, m) * banda if banda else 0.0)


def _p2_closed(n, m):
    delta = 1.0 if n == m else 0.0
    valor = 0.5 * delta
    if m - 1 == n:
        valor -= 2.0 * math.sqrt(2 * m * (2 * m + 1))
    banda = (1.5 * (n == m - 1) + 1.0 * (n == m) - 0.5 * (n == m + 1))
    if banda:
        valor += 2.0 * _pair_factor(n, m) * banda
    return valor


_CLOSED = {KIND_X: _x_closed, KIND_P: _p_closed, KIND_X2: _x2_closed, KIND_P2: _p2_closed}


def matrix_element_closed(kind, n, m, basis=BASIS_TRUNC):
    """Fórmulas cerradas publicadas; para n < m se usa la (anti)simetría."""
    if basis != BASIS_TRUNC:
        raise UnsupportedBasis(f"no hay formas cerradas en la base {basis}")
    if n < m:
        valor = matrix_element_closed(kind, m, n, basis)
        return complex(np.conj(valor)) if kind == KIND_P else valor
    return complex(_CLOSED[kind](n, m))


# --------- Cuadratura ----------
def trunc_samples(n_max, x):
    """(psi_n, psi_n') de la base TRUNC en x, n = 0..n_max."""
    vals = np.empty((n_max + 1, np.size(x)))
    ders = np.empty_like(vals)
    for k in range(n_max + 1):
        d = eigenfunction_derivatives(k, x, 1)
        vals[k], ders[k] = d[0], d[1]
    return vals, ders


def _table_from_samples(kind, phi, dphi, x, w):
    if kind == KIND_X:
        return (phi * (w * x)) @ phi.T
    if kind == KIND_X2:
        return (phi * (w * x * x)) @ phi.T
    if kind == KIND_P:
        return -1j * (phi * w) @ dphi.T
    if kind == KIND_P2:
        return (dphi * w) @ dphi.T
    raise ValueError(f"tipo de tabla desconocido: {kind}")


def build_table(kind, n_max, basis=BASIS_TRUNC, samples=None, degree=GAUSS_DEGREE, check=True):
    """Tabla por cuadratura de Gauss en (0, inf), contrastada con la regla compuesta."""
    samples = samples or trunc_samples

    def _con(rule):
        phi, dphi = samples(n_max, rule.nodes)
        return _table_from_samples(kind, phi, dphi, rule.nodes, rule.plain_weights)

    entries = _con(gauss_halfline_rule(degree)).astype(complex)
    if check:
        ref = _con(composite_halfline_rule())
        desvio = float(np.max(np.abs(entries - ref)))
        if desvio > 1e-8 * max(1.0, float(np.max(np.abs(ref)))):
            raise NonConvergence(f"tabla {kind} ({basis}): desvío {desvio:.2e} frente a la regla compuesta")
    return MatrixElementTable(kind, entries, SOURCE_QUADRATURE, basis)


def matrix_element_quadrature(kind, n, m, basis=BASIS_TRUNC, samples=None):
    return complex(build_table(kind, max(n, m), basis, samples).entries[n, m])


def closed_table(kind, n_max):
    entries = np.array([[matrix_element_closed(kind, n, m) for m in range(n_max + 1)]
                        for n in range(n_max + 1)], dtype=complex)
    return MatrixElementTable(kind, entries, SOURCE_CLOSED_FORM, BASIS_TRUNC)


def reconcile_tables(n_max=CLOSED_FORM_CHECK_MAX, kinds=KINDS, tol=CLOSED_FORM_TOL):
    """Compara formas cerradas y cuadratura; la cuadratura manda.

    Devuelve (tablas por cuadratura, filas de discrepancia).
    """
    tablas, filas = {}, []
    for kind in kinds:
        quad = build_table(kind, n_max)
        cerr = closed_table(kind, n_max)
        tablas[kind] = quad
        malas = 0
        for n in range(n_max + 1):
            for m in range(n_max + 1):
                a, b = cerr.entries[n, m], quad.entries[n, m]
                if abs(a - b) > tol:
                    malas += 1
                    filas.append((kind, n, m, a, b, abs(a - b)))
        if malas:
            aviso(f"forma cerrada {kind}: {malas} entradas difieren de la cuadratura")
        else:
            info(f"forma cerrada {kind}: coincide con la cuadratura (n, m <= {n_max})")
    return tablas, filas


def write_discrepancy_csv(ruta, filas, config=None):
    # P es imaginaria pura: se reporta su parte imaginaria
    def _real(kind, v):
        return v.imag if kind == KIND_P else v.real
    rows = [(k, n, m, _real(k, a), _real(k, b), d) for k, n, m, a, b, d in filas]
    return write_csv(ruta, ["kind", "n", "m", "closed_form", "quadrature", "abs_diff"],
                     rows, config=config)


def energy_table(spec, n_max):
    diag = np.array([spec.xi(k) for k in range(n_max + 1)], dtype=complex)
    return MatrixElementTable("H", np.diag(diag), SOURCE_CLOSED_FORM, spec.basis)


# --------- Valores esperados ----------
def expectation(table, cs, n_terms=None):
    """<z|O|z> = sum Lambda_mn O_nm en la forma diagonal + 2 Re(triángulo inferior)."""
    if table.basis != cs.basis:
        raise BasisMismatch(f"tabla en {table.basis}, estado en {cs.basis}")
    n = n_terms or min(table.size, cs.truncation)
    if n > table.size:
        raise ValueError(f"n_terms = {n} supera la tabla ({table.size})")
    c = cs.amplitudes[:n]
    T = np.conj(c)[:, None] * table.entries[:n, :n] * c[None, :]
    plegado = float(np.real(np.trace(T)) + 2.0 * np.real(np.tril(T, -1).sum()))
    residuo = abs(T.sum().imag)
    if residuo > 1e-10 * max(1.0, abs(plegado)):
        aviso(f"valor esperado de {table.kind} con residuo imaginario {residuo:.2e}")
    return plegado


def trunc_tables(n_max):
    return {kind: build_table(kind, n_max) for kind in KINDS}


def sigmas(tables, cs, n_terms=None):
    x = expectation(tables[KIND_X], cs, n_terms)
    x2 = expectation(tables[KIND_X2], cs, n_terms)
    p = expectation(tables[KIND_P], cs, n_terms)
    p2 = expectation(tables[KIND_P2], cs, n_terms)
    return math.sqrt(max(x2 - x * x, 0.0)), math.sqrt(max(p2 - p * p, 0.0))


def uncertainty_scan(family, spec, z_moduli, n_terms=UNCERTAINTY_TERMS,
                     truncation=BASIS_TRUNCATION, alpha=LIN_ALPHA,
                     cs_builder=None, tables=None):
    if n_terms < UNCERTAINTY_TERMS:
        aviso(f"n_terms = {n_terms} por debajo de {UNCERTAINTY_TERMS}")
    builder = cs_builder or (lambda r: build_cs(family, spec, r, alpha, truncation))
    tables = tables or trunc_tables(n_terms - 1)
    registros = []
    for r in z_moduli:
        cs = builder(float(r))
        n = min(n_terms, cs.truncation, tables[KIND_X].size)
        sx, sp = sigmas(tables, cs, n)
        registros.append(UncertaintyRecord(float(r), sx, sp, sx * sp, cs.truncation))
    return registros


# --------- Densidad de probabilidad ----------
def position_density(cs, rows):
    """P(x) = |sum_n c_n phi_n(x)|^2 con filas phi_n ya evaluadas en la malla."""
    n = min(cs.truncation, rows.shape[0])
    return np.abs(cs.amplitudes[:n] @ rows[:n]) ** 2


def trunc_rows(n_max, x):
    return trunc_samples(n_max, x)[0]
