# =========================
# Oscilador truncado: autofunciones, espectro y álgebra de escalera
# =========================
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .constants import (
    BASIS_FULL_HO, BASIS_TRUNC, LOWER, RAISE, TRUNC_DISPLACEMENT_RADIUS,
)
from .errors import BasisMismatch, ConfigError, IndexOutOfRange
from .numerics import hermite_table, log_factorial

_LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class LadderSpec:
    """Álgebra de escalera abstracta: pasos f(k), g(k) y energías xi(k).

    l^-|k> = sqrt(f(k)) |k-1>,  l^+|k-1> = sqrt(g(k)) |k>.
    dim = None indica dimensión infinita.
    """
    f: Callable[[int], float]
    g: Callable[[int], float]
    xi: Callable[[int], float]
    dim: Optional[int] = None
    basis: str = BASIS_TRUNC
    name: str = ""
    displacement_radius: Optional[float] = None

    def __post_init__(self):
        if self.f(0) != 0:
            raise ConfigError(f"LadderSpec '{self.name}': f(0) debe ser 0")
        if self.dim is not None and self.g(self.dim) != 0:
            raise ConfigError(f"LadderSpec '{self.name}': g(dim) debe ser 0")
        n = min(self.dim if self.dim is not None else 16, 16)
        energias = [self.xi(k) for k in range(n)]
        if any(b <= a for a, b in zip(energias, energias[1:])):
            raise ConfigError(f"LadderSpec '{self.name}': xi no es creciente")

    @property
    def infinite(self):
        return self.dim is None


@dataclass
class FockVector:
    basis: str
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)

    @property
    def truncation(self):
        return self.amplitudes.size

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        return FockVector(self.basis, self.amplitudes / self.norm())

    def overlap(self, other):
        """<self|other>."""
        if other.basis != self.basis:
            raise BasisMismatch(f"{self.basis} frente a {other.basis}")
        n = min(self.truncation, other.truncation)
        return complex(np.vdot(self.amplitudes[:n], other.amplitudes[:n]))


# --------- Especificaciones ----------
def _trunc_step(k):
    return 2.0 * k * (2.0 * k + 1.0)


def _trunc_energy(k):
    return 2.0 * k + 1.5


def truncated_oscillator_spec():
    return LadderSpec(
        f=_trunc_step, g=_trunc_step, xi=_trunc_energy, dim=None,
        basis=BASIS_TRUNC, name="oscilador truncado",
        displacement_radius=TRUNC_DISPLACEMENT_RADIUS,
    )


def harmonic_oscillator_spec():
    return LadderSpec(
        f=float, g=float, xi=lambda k: k + 0.5, dim=None,
        basis=BASIS_FULL_HO, name="oscilador armónico",
    )


@dataclass(frozen=True)
class TruncOscillator:
    ladder: LadderSpec

    @staticmethod
    def log_b(k):
        """log B_k con B_k = [sqrt(pi) 4^k (2k+1)!]^{-1/2}."""
        return -0.5 * (0.5 * _LOG_PI + k * math.log(4.0) + float(log_factorial(2 * k + 1)))

    @staticmethod
    def log_a(k):
        # A_k = sqrt(2) B_k: normalización sobre la recta completa
        return TruncOscillator.log_b(k) + 0.5 * math.log(2.0)


def truncated_oscillator():
    return TruncOscillator(ladder=truncated_oscillator_spec())


# --------- Autofunciones ----------
def energy(k):
    if k < 0:
        raise IndexOutOfRange(f"k = {k} < 0")
    return 2.0 * k + 1.5


def eigenfunction(k, x):
    """psi_k(x) = B_k e^{-x^2/2} H_{2k+1}(x) sobre (0, inf)."""
    vals = eigenfunction_derivatives(k, x, 0)[0]
    return float(vals[0]) if np.ndim(x) == 0 else vals


def _derivative_coefficients(m, order):
    # d/dx [e^{-x^2/2} H_n] = e^{-x^2/2} (n H_{n-1} - H_{n+1}/2)
    coef = np.zeros(m + order + 1)
    coef[m] = 1.0
    filas = [coef.copy()]
    for _ in range(order):
        nuevo = np.zeros_like(coef)
        for n in np.nonzero(coef)[0]:
            if n >= 1:
                nuevo[n - 1] += n * coef[n]
            nuevo[n + 1] -= 0.5 * coef[n]
        coef = nuevo
        filas.append(coef.copy())
    return np.array(filas)


def eigenfunction_derivatives(k, x, order=2):
    """Derivadas analíticas de psi_k hasta el orden pedido.

    Devuelve un arreglo (order + 1, len(x)) con psi, psi', psi'', ...
    """
    m = 2 * k + 1
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    H = hermite_table(m + order, xs)
    pref = np.exp(TruncOscillator.log_b(k) - xs ** 2 / 2.0)
    return (_derivative_coefficients(m, order) @ H) * pref


def ho_functions(n_max, x):
    """Funciones normalizadas del oscilador en toda la recta, niveles 0..n_max."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((n_max + 1, xs.size))
    out[0] = math.pi ** -0.25 * np.exp(-xs ** 2 / 2.0)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * xs * out[0]
    for n in range(1, n_max):
        out[n + 1] = (math.sqrt(2.0 / (n + 1)) * xs * out[n]
                      - math.sqrt(n / (n + 1.0)) * out[n - 1])
    return out


# --------- Álgebra de escalera ----------
def ladder_apply(spec, direction, v):
    if v.basis != spec.basis:
        raise BasisMismatch(f"vector en base {v.basis}, especificación en {spec.basis}")
    amp = v.amplitudes
    out = np.zeros_like(amp)
    n = amp.size
    if direction == LOWER:
        pasos = np.emath.sqrt([spec.f(k) for k in range(1, n)])
        out[:-1] = pasos * amp[1:]
    elif direction == RAISE:
        pasos = np.emath.sqrt([spec.g(k) for k in range(1, n)])
        out[1:] = pasos * amp[:-1]
    else:
        raise ValueError(f"dirección desconocida: {direction}")
    return FockVector(v.basis, out)


def commutator_check(spec, n_max, target=None):
    """max_k |<k|[l^-, l^+]|k> - objetivo(k)|, por defecto objetivo 4 xi(k)."""
    if spec.dim is not None and n_max > spec.dim - 2:
        raise IndexOutOfRange(f"n_max = {n_max} demasiado cerca de dim = {spec.dim}")
    objetivo = target or (lambda k: 4.0 * spec.xi(k))
    peor = 0.0
    for k in range(n_max + 1):
        arriba = np.emath.sqrt(spec.f(k + 1)) * np.emath.sqrt(spec.g(k + 1))
        abajo = np.emath.sqrt(spec.f(k)) * np.emath.sqrt(spec.g(k))
        peor = max(peor, abs((arriba - abajo) - objetivo(k)))
    return float(peor)
