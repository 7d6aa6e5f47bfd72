# =========================
# Estados coherentes: familias, medidas, probabilidades y evolución
# =========================
import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from .constants import (
    BASIS_TRUNCATION, EIGEN_FAMILIES, FAMILY_DISPLACEMENT, FAMILY_DL_ISO,
    FAMILY_L_MINUS, FAMILY_LIN_DISPLACEMENT, FAMILY_LIN_L_MINUS, LIN_ALPHA,
    LOWER, AMPLITUDE_TAIL_TOL, MIN_TRUNCATION, MOMENT_LOG_CUTOFF, MU_ISO,
    MU_TRUNC, MU_TRUNC_CORRECTED, R_MAX, TAIL_TOL, TRUNC_FAMILIES,
)
from .errors import (
    ConfigError, FamilyMismatch, IndexOutOfRange, NonConvergence,
    NotNormalizable, TailTooFat, TruncationTooSmall,
)
from .fock import FockVector, LadderSpec, ladder_apply
from .numerics import log_factorial
from .utils import aviso, info


@dataclass
class CoherentState:
    family: str
    z: complex
    alpha: float
    vector: FockVector
    norm_constant: float
    spec: LadderSpec

    @property
    def amplitudes(self):
        return self.vector.amplitudes

    @property
    def truncation(self):
        return self.vector.truncation

    @property
    def basis(self):
        return self.vector.basis


@dataclass(frozen=True)
class Measure:
    family: str
    radial_density: Callable[[float], float]
    closed_form_id: str
    label: str = ""


# --------- Amplitudes ----------
def _log_gen_factorial(step, n):
    """log|[step(k)]!| para k < n, acumulado término a término."""
    out = np.zeros(n)
    acc = 0.0
    for k in range(1, n):
        v = step(k)
        acc = acc + math.log(abs(v)) if v != 0 else -math.inf
        out[k] = acc
    return out


def _k_log_r(r, n):
    k = np.arange(n, dtype=float)
    if r == 0:
        return np.where(k == 0, 0.0, -np.inf)
    return k * math.log(r)


def log_amplitudes(family, spec, modulus, n_terms, alpha=LIN_ALPHA):
    """log|c_k| sin normalizar para k < n_terms (fase e^{ik arg z} aparte)."""
    n = n_terms if spec.infinite else min(n_terms, spec.dim)
    k = np.arange(n, dtype=float)
    if family == FAMILY_L_MINUS:
        out = _k_log_r(modulus, n) - 0.5 * _log_gen_factorial(spec.f, n)
    elif family == FAMILY_DISPLACEMENT:
        out = 0.5 * _log_gen_factorial(spec.g, n) - log_factorial(k) + _k_log_r(modulus, n)
    elif family == FAMILY_LIN_L_MINUS:
        out = _k_log_r(modulus / math.sqrt(alpha), n) - 0.5 * log_factorial(k)
    elif family in (FAMILY_LIN_DISPLACEMENT, FAMILY_DL_ISO):
        out = _k_log_r(modulus * math.sqrt(alpha), n) - 0.5 * log_factorial(k)
    else:
        raise FamilyMismatch(f"familia sin serie de amplitudes: {family}")
    if n < n_terms:
        out = np.concatenate([out, np.full(n_terms - n, -np.inf)])
    return out


def coherent_from_amplitudes(family, spec, z, alpha, amplitudes, basis=None):
    """Normaliza por suma directa y arma el CoherentState."""
    amps = np.asarray(amplitudes, dtype=complex)
    norm = float(np.linalg.norm(amps))
    if not np.isfinite(norm) or norm == 0:
        raise NotNormalizable(f"norma no finita para {family} en |z| = {abs(z):.4g}")
    vec = FockVector(basis or spec.basis, amps / norm)
    return CoherentState(family, complex(z), alpha, vec, 1.0 / norm, spec)


def build_cs(family, spec, z, alpha=LIN_ALPHA, truncation=BASIS_TRUNCATION):
    if family not in TRUNC_FAMILIES and family != FAMILY_DL_ISO:
        raise FamilyMismatch(f"familia no soportada por build_cs: {family}")
    if truncation < MIN_TRUNCATION:
        raise ConfigError(f"truncación {truncation} < {MIN_TRUNCATION}")
    z = complex(z)
    r = abs(z)
    if (family == FAMILY_DISPLACEMENT and spec.displacement_radius is not None
            and r >= spec.displacement_radius):
        raise NotNormalizable(
            f"D_l(z)-CS sólo es normalizable para |z| < {spec.displacement_radius} (|z| = {r})")
    log_a = log_amplitudes(family, spec, r, truncation, alpha)
    log_norm = 0.5 * special.logsumexp(2.0 * log_a)
    modulos = np.exp(log_a - log_norm)
    cola = spec.infinite or truncation < spec.dim
    if cola and modulos[-1] > AMPLITUDE_TAIL_TOL:
        raise TruncationTooSmall(
            f"{family}: última amplitud {modulos[-1]:.2e} con truncación {truncation} (|z| = {r})")
    fase = np.exp(1j * cmath.phase(z) * np.arange(truncation)) if r > 0 else 1.0
    vec = FockVector(spec.basis, modulos * fase)
    return CoherentState(family, z, alpha, vec, float(math.exp(-log_norm)), spec)


# --------- Cierres analíticos (sólo comprobaciones) ----------
def closed_form_norm(family, modulus):
    """C_z o C~_z del oscilador truncado."""
    r = float(modulus)
    if family == FAMILY_L_MINUS:
        return 1.0 if r == 0 else (math.sinh(r) / r) ** -0.5
    if family == FAMILY_DISPLACEMENT:
        if r >= 0.5:
            raise NotNormalizable("C~_z sólo existe para |z| < 1/2")
        return (1.0 - 4.0 * r * r) ** 0.75
    raise FamilyMismatch(f"sin forma cerrada de normalización para {family}")


def energy_closed_form(modulus):
    r = float(modulus)
    return 1.5 if r == 0 else 0.5 + r / math.tanh(r)


def displacement_partial_sums(spec, modulus, n_terms):
    """Sumas parciales de la norma^2 sin normalizar de la familia D_l(z)."""
    log_a = log_amplitudes(FAMILY_DISPLACEMENT, spec, modulus, n_terms)
    return np.cumsum(np.exp(2.0 * log_a))


# --------- Operaciones ----------
def eigen_residual(cs):
    if cs.family not in EIGEN_FAMILIES:
        raise FamilyMismatch(f"{cs.family} no es autoestado del operador de bajada")
    v = cs.vector
    if cs.family == FAMILY_L_MINUS:
        bajado = ladder_apply(cs.spec, LOWER, v).amplitudes
    else:
        k = np.arange(1, v.truncation)
        bajado = np.zeros_like(v.amplitudes)
        bajado[:-1] = np.sqrt(cs.alpha * k) * v.amplitudes[1:]
    return float(np.linalg.norm(bajado - cs.z * v.amplitudes))


def state_probability(cs, n):
    if n < 0 or n >= cs.truncation:
        raise IndexOutOfRange(f"n = {n} fuera de [0, {cs.truncation})")
    return float(abs(cs.amplitudes[n]) ** 2)


def energy_expectation(cs):
    p = np.abs(cs.amplitudes) ** 2
    xi = np.array([cs.spec.xi(k) for k in range(cs.truncation)], dtype=float)
    return float(np.dot(p, xi))


def evolve(cs, t):
    xi = np.array([cs.spec.xi(k) for k in range(cs.truncation)], dtype=float)
    return FockVector(cs.basis, cs.amplitudes * np.exp(-1j * xi * t))


# --------- Medidas ----------
def measure_trunc_published():
    # mu(z) = |z|^2 e^{-|z|} / (8 pi C_z^2), con C_z^2 = r / sinh r
    return Measure(FAMILY_L_MINUS,
                   lambda r: r * (1.0 - math.exp(-2.0 * r)) / (16.0 * math.pi),
                   MU_TRUNC, "medida publicada")


def measure_trunc_corrected():
    """Densidad que resuelve int r^{2k+1} h(r) dr = (2k+1)!/(2 pi) con C_z^2.

    h(r) = e^{-r}/(2 pi), de modo que mu~(r) = e^{-r} sinh(r) / (2 pi r).
    """
    return Measure(FAMILY_L_MINUS,
                   lambda r: (1.0 - math.exp(-2.0 * r)) / (4.0 * math.pi * r) if r > 0
                   else 1.0 / (2.0 * math.pi),
                   MU_TRUNC_CORRECTED, "medida corregida (momentos)")


def measure_iso():
    return Measure(FAMILY_LIN_DISPLACEMENT, lambda r: 2.0 / math.pi, MU_ISO, "mu_iso = 2/pi")


class _RadialProbabilities:
    """p_n(r) normalizadas con número de términos adaptativo."""

    def __init__(self, family, spec, alpha):
        self.family, self.spec, self.alpha = family, spec, alpha

    def __call__(self, r, n_max):
        if (self.family == FAMILY_DISPLACEMENT and self.spec.displacement_radius is not None
                and r >= self.spec.displacement_radius):
            raise NotNormalizable(f"familia D_l sin normalización en r = {r}")
        K = max(n_max + 1, 64)
        while True:
            lw = 2.0 * log_amplitudes(self.family, self.spec, r, K, self.alpha)
            if self.spec.dim is not None and K >= self.spec.dim:
                break
            tope = np.max(lw)
            if lw[-1] < tope - MOMENT_LOG_CUTOFF and lw[-1] <= lw[-2]:
                break
            K *= 2
            if K > 100000:
                raise NonConvergence(f"la serie de p_n(r) no se corta en r = {r}")
        return np.exp(lw[:n_max + 1] - special.logsumexp(lw))


def resolution_moments(family, spec, measure, n_max, r_max=R_MAX, alpha=LIN_ALPHA):
    """M_nn = int_0^{r_max} 2 pi r mu(r) p_n(r) dr (la fase anula m != n)."""
    probs = _RadialProbabilities(family, spec, alpha)

    def integrando(r, n):
        return 2.0 * math.pi * r * measure.radial_density(r) * probs(r, n_max)[n]

    cola = np.array([integrando(r_max, n) for n in range(n_max + 1)])
    if np.any(cola > TAIL_TOL):
        raise TailTooFat(
            f"{measure.label}: integrando en r_max = {r_max} vale {cola.max():.2e}")
    momentos = np.empty(n_max + 1)
    for n in range(n_max + 1):
        momentos[n] = integrate.quad(integrando, 0.0, r_max, args=(n,),
                                     epsabs=1e-13, epsrel=1e-11, limit=400)[0]
    return momentos


def identity_resolution_check(family, spec, measure, n_max, r_max=R_MAX, alpha=LIN_ALPHA):
    """max |M_mn - delta_mn|; sólo la diagonal sobrevive a la integral de fase."""
    momentos = resolution_moments(family, spec, measure, n_max, r_max, alpha)
    desvio = float(np.max(np.abs(momentos - 1.0)))
    if measure.closed_form_id == MU_TRUNC:
        aviso(f"medida publicada del l^-CS: momentos diagonales {np.round(momentos, 6).tolist()} "
              f"(desvío {desvio:.4g})")
    else:
        info(f"resolución de la identidad con {measure.label}: desvío {desvio:.3e}")
    return desvio
