# =========================
# Divisor de haz, matriz densidad reducida y entropía lineal
# =========================
import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg

from .coherent import coherent_from_amplitudes, log_amplitudes
from .constants import (
    BASIS_SUSY_ISO, BASIS_SUSY_NEW, BASIS_TRUNC, BCH_MAX_BLOCK, DEFAULT_PHI,
    DEFAULT_THETA, ENTROPY_CONVERGENCE_TOL, ENTROPY_CUTOFF,
    ENTROPY_CUTOFF_FACTOR, ENTROPY_CUTOFF_MAX, ENTROPY_CUTOFF_STEP, ENTROPY_TERMS,
    EXPANSION_TOL, FAMILY_DL_ISO, FAMILY_DL_NEW, GRAM_PSD_TOL, ISO, LIN_ALPHA, NEW,
    TRUNC_FAMILIES,
)
from .errors import (
    CutoffExceeded, ExpansionResidualTooLarge, FamilyMismatch, GramNotPSD,
    PoleError, UnsupportedBasis,
)
from .fock import ho_functions, truncated_oscillator_spec
from .numerics import (
    composite_halfline_rule, gauss_halfline_rule, hermite_phys, hyp2f1_terminating,
    integrate_halfline, log_gamma_signed,
)
from .susy import (
    iso_eigenfunction, iso_spec, new_amplitudes, new_eigenfunction, new_spec,
)
from .utils import aviso, info, write_csv

METHOD_BCH = "bch"
METHOD_EXPM = "expm"


@dataclass
class TwoModeState:
    """Amplitudes A[alpha, beta] sobre niveles del oscilador en toda la recta."""
    amplitudes: np.ndarray
    cutoff: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)

    @property
    def size(self):
        return self.amplitudes.shape[0]

    def full_norm(self):
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray

    @property
    def size(self):
        return self.entries.shape[0]


@dataclass(frozen=True)
class BeamSplitterSetting:
    theta: float = DEFAULT_THETA
    phi: float = DEFAULT_PHI

    @property
    def r(self):
        return -cmath.exp(-1j * self.phi) * math.sin(self.theta / 2.0)

    @property
    def t(self):
        return math.cos(self.theta / 2.0)

    @property
    def tau(self):
        return (self.theta / 2.0) * cmath.exp(1j * self.phi)


@dataclass(frozen=True)
class EntropyPoint:
    z_abs: float
    theta: float
    phi: float
    S: float
    converged: bool
    cutoff: int


def two_mode_size(cutoff):
    """Tamaño del arreglo: cabe el bloque de fotones totales 2 (cutoff - 1)."""
    return 2 * cutoff - 1


# --------- Solapamientos en la semirrecta ----------
def halfline_overlap(alpha, beta):
    """int_0^inf e^{-x^2} H_alpha H_beta dx (forma cerrada o cuadratura)."""
    if alpha < 0 or beta < 0:
        raise ValueError("alpha y beta deben ser >= 0")
    c = 1.0 - (alpha + beta) / 2.0
    if not (c <= 0 and c.is_integer()):
        try:
            lg, sg = log_gamma_signed(c)
            serie = hyp2f1_terminating(-alpha, -beta, c, 0.5)
            return math.sqrt(math.pi) * serie * sg * math.exp(
                -lg - (1.0 - alpha - beta) * math.log(2.0))
        except PoleError:
            pass
    return halfline_overlap_quadrature(alpha, beta)


def halfline_overlap_quadrature(alpha, beta):
    # H_a H_b es polinomio de grado a + b: Gauss de grado 200 es exacta
    return integrate_halfline(lambda x: hermite_phys(alpha, x) * hermite_phys(beta, x))


@lru_cache(maxsize=8)
def _gram_entries(size):
    rule = composite_halfline_rule()
    phi = ho_functions(size - 1, rule.nodes)
    return (phi * rule.plain_weights) @ phi.T


def gram_matrix(size):
    """G[a, b] = int_0^inf psi_a psi_b con psi normalizadas en toda la recta."""
    return GramMatrix(_gram_entries(int(size)))


# --------- Divisor de haz ----------
def _bch_block(N, s, c, t_conj):
    # e^{s K+} e^{c K0} e^{-t* K-} en la base |k, N - k>, k = 0..N
    f = math.factorial
    sube = np.zeros((N + 1, N + 1), dtype=complex)
    baja = np.zeros((N + 1, N + 1), dtype=complex)
    for k in range(N + 1):
        for j in range(N - k + 1):
            sube[k + j, k] = s ** j / f(j) * math.sqrt(f(k + j) * f(N - k) / (f(k) * f(N - k - j)))
        for j in range(k + 1):
            baja[k - j, k] = (-t_conj) ** j / f(j) * math.sqrt(
                f(k) * f(N - k + j) / (f(k - j) * f(N - k)))
    diag = np.exp(c * (np.arange(N + 1) - N / 2.0))
    return sube @ (diag[:, None] * baja)


def _generator(N, tau):
    k = np.arange(N)
    kp = np.zeros((N + 1, N + 1))
    kp[k + 1, k] = np.sqrt((k + 1.0) * (N - k))
    return tau * kp - np.conj(tau) * kp.T


@lru_cache(maxsize=4096)
def _block(N, theta, phi, method):
    setting = BeamSplitterSetting(theta, phi)
    tau = setting.tau
    coseno = math.cos(abs(tau))
    if method == METHOD_BCH and abs(coseno) > 1e-8:
        t = cmath.exp(1j * phi) * math.tan(abs(tau))
        c = -2.0 * math.log(abs(coseno))
        return _bch_block(N, t, c, np.conj(t))
    return linalg.expm(_generator(N, tau))


def splitter_block(N, setting, method=None):
    """Bloque unitario de N fotones totales; por defecto BCH hasta BCH_MAX_BLOCK."""
    if method is None:
        method = METHOD_BCH if N <= BCH_MAX_BLOCK else METHOD_EXPM
    if method not in (METHOD_BCH, METHOD_EXPM):
        raise ValueError(f"método desconocido: {method}")
    return _block(int(N), float(setting.theta), float(setting.phi), method)


def beamsplitter_apply(in_state, setting, method=None):
    A = in_state.amplitudes
    M = A.shape[0]
    alpha, beta = np.nonzero(A)
    if alpha.size and int((alpha + beta).max()) > M - 1:
        raise CutoffExceeded(
            f"hay fotones totales {int((alpha + beta).max())} > {M - 1} para el arreglo {M}x{M}")
    out = np.zeros_like(A)
    n_max = int((alpha + beta).max()) if alpha.size else -1
    for N in range(n_max + 1):
        k = np.arange(N + 1)
        v = A[k, N - k]
        if not np.any(v):
            continue
        out[k, N - k] = splitter_block(N, setting, method) @ v
    return TwoModeState(out, in_state.cutoff)


def published_out_expansion(n, setting):
    """Coeficientes publicados de B|1, 2n+1>_HO como dict {(a, b): amplitud}."""
    th, ph = setting.theta, setting.phi
    tg = math.tan(th / 2.0)
    co = math.cos(th / 2.0)
    f = math.factorial
    out = {}
    for k in range(2 * n + 3):
        pref = (cmath.exp(1j * ph) * tg) ** k / f(k)
        if k <= 2 * n + 1:
            q1 = co ** (2 * n) * math.sqrt(f(k + 1) * f(2 * n + 1) / f(2 * n + 1 - k))
            clave = (k + 1, 2 * n + 1 - k)
            out[clave] = out.get(clave, 0j) + pref * q1
        q2 = (tg * cmath.exp(-1j * ph) * math.sqrt(2 * n + 2) * co ** (2 * n + 2)
              * math.sqrt(f(k) * f(2 * n + 2) / f(2 * n + 2 - k)))
        clave = (k, 2 * n + 2 - k)
        out[clave] = out.get(clave, 0j) - pref * q2
    return out


# --------- Estados de entrada ----------
def expand_halfline(fn, cutoff, rule=None):
    """Coeficientes sobre niveles impares: c_a = 2 int_0^inf psi_a fn.

    Devuelve (coeficientes de largo cutoff, norma recuperada).
    """
    rule = rule or gauss_halfline_rule()
    x = rule.nodes
    psi = ho_functions(cutoff - 1, x)
    coef = np.zeros(cutoff)
    impares = np.arange(1, cutoff, 2)
    coef[impares] = 2.0 * (psi[impares] * rule.plain_weights) @ np.asarray(fn(x), dtype=float)
    return coef, float(np.sum(coef ** 2) / 2.0)


def _mode_vector(cs, cutoff, model):
    T = cs.truncation
    if cs.basis == BASIS_TRUNC:
        if cutoff < 2 * T + 3:
            raise CutoffExceeded(f"cutoff {cutoff} < 2 * {T} + 3 para la base truncada")
        v = np.zeros(cutoff, dtype=complex)
        # |n> = sqrt(2) |2n+1>_HO restringido
        v[2 * np.arange(T) + 1] = math.sqrt(2.0) * cs.amplitudes
        extremal = np.zeros(cutoff, dtype=complex)
        extremal[1] = math.sqrt(2.0)
        return extremal, v
    if cs.basis not in (BASIS_SUSY_ISO, BASIS_SUSY_NEW):
        raise UnsupportedBasis(f"no hay inmersión para la base {cs.basis}")
    if model is None:
        raise FamilyMismatch("los estados SUSY requieren el modelo")
    extremal, norma = expand_halfline(new_eigenfunction(model, 0), cutoff)
    if norma < 1.0 - EXPANSION_TOL:
        raise ExpansionResidualTooLarge(
            f"phi_E0 recupera {norma:.8f} de la norma con cutoff {cutoff}")
    funcs = ([iso_eigenfunction(model, n) for n in range(T)] if cs.basis == BASIS_SUSY_ISO
             else [new_eigenfunction(model, j) for j in range(T)])
    v = np.zeros(cutoff, dtype=complex)
    for c, fn in zip(cs.amplitudes, funcs):
        if c != 0:
            v += c * expand_halfline(fn, cutoff)[0]
    recuperada = float(np.sum(np.abs(v) ** 2) / 2.0) / max(float(np.sum(np.abs(cs.amplitudes) ** 2)), 1e-300)
    if recuperada < 1.0 - EXPANSION_TOL:
        raise ExpansionResidualTooLarge(
            f"el estado coherente recupera {recuperada:.8f} de la norma con cutoff {cutoff}")
    return extremal.astype(complex), v


def resolve_cutoff(cs, cutoff=ENTROPY_CUTOFF, model=None):
    """Primer corte, desde `cutoff`, con el que la expansión SUSY recupera la norma.

    La base truncada no depende del corte y se devuelve tal cual.
    """
    if cs.basis == BASIS_TRUNC:
        return cutoff
    actual = cutoff
    while True:
        try:
            _mode_vector(cs, actual, model)
        except ExpansionResidualTooLarge:
            if actual >= ENTROPY_CUTOFF_MAX:
                raise
            actual = min(actual + ENTROPY_CUTOFF_STEP, ENTROPY_CUTOFF_MAX)
            continue
        if actual != cutoff:
            aviso(f"cutoff elevado de {cutoff} a {actual} para la base {cs.basis}")
        return actual


def embed_cs_in_two_modes(cs, cutoff=ENTROPY_CUTOFF, model=None):
    """|in> = |extremal> (x) |z> en niveles de toda la recta."""
    a, b = _mode_vector(cs, cutoff, model)
    M = two_mode_size(cutoff)
    A = np.zeros((M, M), dtype=complex)
    A[:cutoff, :cutoff] = np.outer(a, b)
    return TwoModeState(A, cutoff)


# --------- Traza parcial ----------
def _sqrt_psd(G):
    vals, vecs = linalg.eigh(G)
    tope = float(np.max(vals))
    if vals.min() < -GRAM_PSD_TOL * tope:
        raise GramNotPSD(f"autovalor mínimo {vals.min():.3e} (máximo {tope:.3e})")
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


@lru_cache(maxsize=8)
def _gram_sqrt(size):
    return _sqrt_psd(_gram_entries(size))


def reduced_density(out_state, gram=None):
    """rho_A en una base ortonormal de la semirrecta, traza 1."""
    M = out_state.size
    if gram is None:
        S = _gram_sqrt(M)
    else:
        if gram.size != M:
            raise ValueError(f"Gram de tamaño {gram.size} para un estado {M}x{M}")
        S = _sqrt_psd(gram.entries)
    C = S @ out_state.amplitudes @ S
    rho = C @ np.conj(C.T)
    traza = float(np.real(np.trace(rho)))
    if traza <= 0:
        raise GramNotPSD("el estado tiene norma nula en la métrica de la semirrecta")
    return rho / traza


def linear_entropy(rho):
    """S = 1 - Tr(rho^2) con la suma hermítica plegada."""
    rho = np.asarray(rho)
    diag = np.real(np.diag(rho))
    fuera = np.abs(np.triu(rho, 1)) ** 2
    return float(1.0 - (np.sum(diag ** 2) + 2.0 * np.sum(fuera)))


# --------- Barrido de entropía ----------
def truncated_cs(source, modulus, terms=ENTROPY_TERMS, model=None):
    """Estado coherente cortado en `terms` términos y renormalizado."""
    r = float(modulus)
    if source in TRUNC_FAMILIES:
        spec = truncated_oscillator_spec()
        amps = np.exp(log_amplitudes(source, spec, r, terms, LIN_ALPHA))
        return coherent_from_amplitudes(source, spec, r, LIN_ALPHA, amps)
    if source == ISO:
        amps = np.exp(log_amplitudes(FAMILY_DL_ISO, iso_spec(), r, terms, LIN_ALPHA))
        return coherent_from_amplitudes(FAMILY_DL_ISO, iso_spec(), r, LIN_ALPHA, amps)
    if source == NEW:
        return coherent_from_amplitudes(FAMILY_DL_NEW, new_spec(model), r, LIN_ALPHA,
                                        new_amplitudes(model, r))
    raise FamilyMismatch(f"fuente desconocida para la entropía: {source}")


def entropy_of(cs, setting, cutoff=ENTROPY_CUTOFF, model=None):
    salida = beamsplitter_apply(embed_cs_in_two_modes(cs, cutoff, model), setting)
    return linear_entropy(reduced_density(salida))


def entropy_scan(source, z_moduli, setting=None, cutoff=ENTROPY_CUTOFF,
                 terms=ENTROPY_TERMS, model=None):
    setting = setting or BeamSplitterSetting()
    puntos = []
    for r in z_moduli:
        cs = truncated_cs(source, r, terms, model)
        corte = resolve_cutoff(cs, cutoff, model)
        mayor = int(math.ceil(corte * ENTROPY_CUTOFF_FACTOR))
        s = entropy_of(cs, setting, corte, model)
        s_mayor = entropy_of(cs, setting, mayor, model)
        ok = abs(s - s_mayor) < ENTROPY_CONVERGENCE_TOL
        if not ok:
            aviso(f"|z| = {r}: S no converge ({s:.6f} frente a {s_mayor:.6f} con cutoff {mayor})")
        puntos.append(EntropyPoint(float(r), setting.theta, setting.phi, s, ok, corte))
    info(f"entropía de {source}: {len(puntos)} puntos, theta = {setting.theta:.4g}")
    return puntos


def write_entropy_csv(ruta, puntos, config=None):
    # base por modo: el mayor corte usado en el barrido
    base = max((p.cutoff for p in puntos), default=ENTROPY_CUTOFF)
    rows = [(p.z_abs, p.theta, p.phi, p.S, p.converged, p.cutoff) for p in puntos]
    return write_csv(ruta, ["z_abs", "theta", "phi", "S", "S_converged", "cutoff"], rows,
                     config=config, basis_size=base)
