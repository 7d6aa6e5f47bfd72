# =========================
# Funciones especiales y cuadratura en (0, inf)
# =========================
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import integrate, linalg, special

from .constants import (
    ADAPTIVE_EPSREL, ADAPTIVE_LIMIT, GAUSS_DEGREE, GAUSS_PANEL_NODES,
    GAUSS_PANEL_WIDTH, GAUSS_SUPPORT, MAX_TERMS, MELLIN_HALF_RANGE,
    MELLIN_NODES, MELLIN_TAIL_TOL, REFERENCE_PANEL_NODES, REFERENCE_PANEL_WIDTH,
    RULE_ADAPTIVE, RULE_COMPOSITE, RULE_GAUSS, RULE_SELF_CHECK_TOL, SERIES_TOLERANCE,
)
from .errors import (
    ConfigError, ContourError, DivergenceError, NonConvergence, PoleError,
)


@dataclass(frozen=True)
class SpecialFunctionConfig:
    series_tolerance: float = SERIES_TOLERANCE
    max_terms: int = MAX_TERMS
    # None: contorno automático (ver meijer_g_2012)
    mellin_contour_offset: Optional[float] = None
    mellin_nodes: int = MELLIN_NODES
    mellin_half_range: float = MELLIN_HALF_RANGE

    def __post_init__(self):
        if not (0.0 < self.series_tolerance <= 1e-6):
            raise ConfigError(f"series_tolerance fuera de (0, 1e-6]: {self.series_tolerance}")
        if self.max_terms < 64:
            raise ConfigError(f"max_terms debe ser >= 64 (recibido {self.max_terms})")


DEFAULT_CONFIG = SpecialFunctionConfig()


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _ret(arr, scalar):
    return float(arr) if scalar else arr


def _is_nonpositive_int(v):
    return v <= 0 and float(v).is_integer()


# --------- Hermite / factoriales ----------
def hermite_phys(n, x):
    """H_n(x) (convención de físicos) por la recurrencia de tres términos."""
    if n < 0:
        raise ValueError("n debe ser >= 0")
    xa, scalar = _as_array(x)
    h_prev = np.ones_like(xa)
    if n == 0:
        return _ret(h_prev, scalar)
    h = 2.0 * xa
    for k in range(1, n):
        h_prev, h = h, 2.0 * xa * h - 2.0 * k * h_prev
    return _ret(h, scalar)


def hermite_table(n_max, x):
    """Tabla H_0..H_{n_max} en los puntos x, forma (n_max + 1, len(x))."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    tabla = np.empty((n_max + 1, xa.size))
    tabla[0] = 1.0
    if n_max >= 1:
        tabla[1] = 2.0 * xa
    for k in range(1, n_max):
        tabla[k + 1] = 2.0 * xa * tabla[k] - 2.0 * k * tabla[k - 1]
    return tabla


def log_factorial(n):
    return special.gammaln(np.asarray(n, dtype=float) + 1.0)


# --------- Series hipergeométricas ----------
def hyp1f1(a, b, x, config=None):
    """Kummer 1F1(a; b; x) por serie directa con cociente de términos.

    Termina exactamente si a es un entero no positivo.
    """
    cfg = config or DEFAULT_CONFIG
    xa, scalar = _as_array(x)
    term = np.ones_like(xa)
    total = np.ones_like(xa)
    for k in range(cfg.max_terms):
        if a + k == 0:
            return _ret(total, scalar)
        if _is_nonpositive_int(b + k):
            raise PoleError(f"1F1: b + {k} = 0 con a = {a}")
        term = term * ((a + k) / (b + k)) * xa / (k + 1)
        total = total + term
        if np.all(np.abs(term) <= cfg.series_tolerance * np.maximum(np.abs(total), 1e-300)):
            return _ret(total, scalar)
    raise DivergenceError(f"1F1({a}; {b}; x) sin converger en {cfg.max_terms} términos")


def hyp2f1_terminating(a, b, c, x):
    """2F1(a, b; c; x) con a entero no positivo: suma finita de |a| + 1 términos."""
    if not _is_nonpositive_int(a):
        raise ValueError(f"2F1 terminante requiere a entero <= 0 (a = {a})")
    term = 1.0
    total = 1.0
    for k in range(int(-a)):
        num = (a + k) * (b + k)
        if num == 0:
            break
        if c + k == 0:
            raise PoleError(f"2F1: c + {k} = 0 antes de terminar")
        term *= num / ((c + k) * (k + 1)) * x
        total += term
    return total


def hyp2f2(a1, a2, b1, b2, x, config=None):
    cfg = config or DEFAULT_CONFIG
    xa, scalar = _as_array(x)
    term = np.ones_like(xa)
    total = np.ones_like(xa)
    for k in range(cfg.max_terms):
        if a1 + k == 0 or a2 + k == 0:
            return _ret(total, scalar)
        if _is_nonpositive_int(b1 + k) or _is_nonpositive_int(b2 + k):
            raise PoleError(f"2F2: parámetro inferior en polo (k = {k})")
        term = term * ((a1 + k) * (a2 + k) / ((b1 + k) * (b2 + k))) * xa / (k + 1)
        total = total + term
        if np.all(np.abs(term) <= cfg.series_tolerance * np.maximum(np.abs(total), 1e-300)):
            return _ret(total, scalar)
    raise DivergenceError(f"2F2 sin converger en {cfg.max_terms} términos")


# --------- Gamma / Pochhammer ----------
def log_gamma_signed(x):
    """(log|Γ(x)|, signo) con reflexión para x < 1/2."""
    x = float(x)
    if _is_nonpositive_int(x):
        raise PoleError(f"Γ tiene un polo en x = {x}")
    if x >= 0.5:
        return float(special.gammaln(x)), 1
    s = math.sin(math.pi * x)
    log_mag = math.log(math.pi) - math.log(abs(s)) - float(special.gammaln(1.0 - x))
    return log_mag, (1 if s > 0 else -1)


def pochhammer_ratio(a, j):
    """Símbolo ascendente (a)_j como producto explícito; válido en polos de Γ."""
    return math.prod(a + i for i in range(int(j))) if j > 0 else 1.0


# --------- Meijer G^{2,0}_{1,2} ----------
def _mellin_offset(a1, x, cfg):
    if cfg.mellin_contour_offset is not None:
        return np.full_like(x, cfg.mellin_contour_offset)
    # 1/Γ(a1 + s) es entera: cualquier c > 0 sirve; para x < 1 un contorno
    # cercano al eje imaginario evita la cancelación de x^{-c}
    alto = max(1.0, 1.0 - a1) + 0.5
    return np.where(x >= 1.0, alto, 0.5)


def meijer_g_2012(a1, x, config=None):
    """G^{2,0}_{1,2}(x | a1; 0, 0) por Mellin–Barnes sobre una recta vertical."""
    cfg = config or DEFAULT_CONFIG
    xa, scalar = _as_array(x)
    if np.any(xa <= 0):
        raise ValueError("meijer_g_2012 requiere x > 0")
    xs = np.atleast_1d(xa)
    t = np.linspace(-cfg.mellin_half_range, cfg.mellin_half_range, cfg.mellin_nodes)
    c = _mellin_offset(a1, xs, cfg)[:, None]
    s = c + 1j * t[None, :]
    log_core = 2.0 * special.loggamma(s) - special.loggamma(a1 + s)
    mag = np.exp(log_core.real)
    extremos = np.maximum(mag[:, 0], mag[:, -1])
    if np.any(extremos > MELLIN_TAIL_TOL * mag.max(axis=1)):
        raise ContourError("el integrando de Mellin–Barnes no decae en el rango de nodos")
    integrando = np.exp(log_core - s * np.log(xs)[:, None])
    valores = integrate.trapezoid(integrando, t, axis=1).real / (2.0 * math.pi)
    return _ret(valores.reshape(xa.shape), scalar)


# --------- Reglas de cuadratura ----------
@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    degree: int
    # pesos sin el factor e^{-x^2}: para integrandos que ya lo llevan
    plain_weights: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind == RULE_GAUSS:
            if np.any(self.nodes <= 0) or np.any(np.diff(self.nodes) <= 0):
                raise ValueError("nodos no positivos o no crecientes")
            if np.any(self.weights <= 0):
                raise ValueError("pesos no positivos")


def _panels(width, count):
    # Gauss–Legendre compuesto sobre [0, GAUSS_SUPPORT], sin el peso
    t, w = special.roots_legendre(count)
    bordes = np.arange(0.0, GAUSS_SUPPORT, width)
    h = width / 2.0
    xs = (bordes[:, None] + h * (t[None, :] + 1.0)).ravel()
    hs = (h * np.broadcast_to(w, (bordes.size, w.size))).ravel()
    return xs, hs


def _discrete_measure():
    # raíz de los pesos con e^{-x^2}: e^{-x^2/2} no se anula antes de x ~ 38
    xs, hs = _panels(GAUSS_PANEL_WIDTH, GAUSS_PANEL_NODES)
    rs = np.sqrt(hs) * np.exp(-xs ** 2 / 2.0)
    keep = rs > 0
    return xs[keep], rs[keep]


def _stieltjes(degree):
    """Coeficientes de recurrencia (a_k, b_k) del peso e^{-x^2} en (0, inf).

    Lanczos sobre la medida discretizada, con reortogonalización completa.
    """
    xs, rs = _discrete_measure()
    mu0 = float(np.dot(rs, rs))
    q = rs / math.sqrt(mu0)
    Q = np.zeros((degree, xs.size))
    a = np.zeros(degree)
    b = np.zeros(degree)
    q_prev = np.zeros_like(q)
    for k in range(degree):
        Q[k] = q
        a[k] = np.dot(xs * q, q)
        r = (xs - a[k]) * q - b[k] * q_prev
        r -= Q[:k + 1].T @ (Q[:k + 1] @ r)
        if k + 1 < degree:
            b[k + 1] = np.linalg.norm(r)
            q_prev, q = q, r / b[k + 1]
    return a, b, mu0


@lru_cache(maxsize=8)
def gauss_halfline_rule(degree=GAUSS_DEGREE):
    """Regla de Gauss para el peso e^{-x^2} sobre (0, inf)."""
    a, b, mu0 = _stieltjes(degree)
    nodos = linalg.eigh_tridiagonal(a, b[1:], eigvals_only=True)
    nodos = np.sort(nodos)
    # pesos de Christoffel con polinomios ortonormales escalados por e^{-x^2/2}
    q_prev = np.zeros_like(nodos)
    q = np.exp(-nodos ** 2 / 2.0) / math.sqrt(mu0)
    suma = q ** 2
    for k in range(degree - 1):
        q_next = ((nodos - a[k]) * q - b[k] * q_prev) / b[k + 1]
        q_prev, q = q, q_next
        suma += q ** 2
    planos = 1.0 / suma
    pesos = planos * np.exp(-nodos ** 2)
    keep = (pesos > 0) & (nodos > 0)
    return QuadratureRule(
        nodes=nodos[keep], weights=pesos[keep], kind=RULE_GAUSS,
        degree=int(keep.sum()), plain_weights=planos[keep],
    )


@lru_cache(maxsize=1)
def composite_halfline_rule():
    """Gauss–Legendre compuesto fino sobre (0, GAUSS_SUPPORT); referencia de los autochequeos."""
    xs, hs = _panels(REFERENCE_PANEL_WIDTH, REFERENCE_PANEL_NODES)
    pesos = hs * np.exp(-xs ** 2)
    keep = pesos > 0
    return QuadratureRule(
        nodes=xs[keep], weights=pesos[keep], kind=RULE_COMPOSITE,
        degree=int(keep.sum()), plain_weights=hs[keep],
    )


def adaptive_rule():
    vacio = np.empty(0)
    return QuadratureRule(nodes=vacio, weights=vacio, kind=RULE_ADAPTIVE, degree=0)


def _quad(g):
    res = integrate.quad(
        g, 0.0, np.inf, epsabs=1e-12, epsrel=ADAPTIVE_EPSREL,
        limit=ADAPTIVE_LIMIT, full_output=1,
    )
    if len(res) > 3:
        # quad añade un mensaje cuando el refinamiento se estanca
        raise NonConvergence(f"el refinamiento adaptativo se agotó: {res[3]}")
    return float(res[0])


def integrate_halfline(f, rule=None):
    """∫_0^inf e^{-x^2} f(x) dx con la regla indicada (Gauss por defecto)."""
    rule = rule or gauss_halfline_rule()
    if rule.kind != RULE_ADAPTIVE:
        vals = np.broadcast_to(np.asarray(f(rule.nodes), dtype=float), rule.nodes.shape)
        return float(np.dot(rule.weights, vals))
    return _quad(lambda x: math.exp(-x * x) * float(f(x)))


def integrate_plain(g, rule=None):
    """∫_0^inf g(x) dx para integrandos que ya decaen como gaussiana."""
    rule = rule or gauss_halfline_rule()
    if rule.kind != RULE_ADAPTIVE:
        vals = np.broadcast_to(np.asarray(g(rule.nodes)), rule.nodes.shape)
        return np.dot(rule.plain_weights, vals)
    return _quad(lambda x: float(g(x)))


def check_rule_convergence(f, degree=GAUSS_DEGREE, tol=RULE_SELF_CHECK_TOL):
    """Compara la regla de Gauss con la compuesta de referencia; devuelve el desvío."""
    base = integrate_halfline(f, gauss_halfline_rule(degree))
    ref = integrate_halfline(f, composite_halfline_rule())
    desvio = abs(base - ref)
    if desvio > tol * max(1.0, abs(ref)):
        raise NonConvergence(f"la regla de grado {degree} no converge (desvío {desvio:.3e})")
    return desvio
