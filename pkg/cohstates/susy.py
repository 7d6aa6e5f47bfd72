# =========================
# Compañeros supersimétricos del oscilador truncado
# =========================
import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate, optimize, special

from .coherent import (
    build_cs, coherent_from_amplitudes, energy_expectation,
    identity_resolution_check, measure_iso,
)
from .constants import (
    BASIS_SUSY_ISO, BASIS_SUSY_NEW, BASIS_TRUNCATION, FAMILY_DL_ISO,
    FAMILY_DL_NEW, FIT_TOL, ISO, ISO_GROUND, KINDS, LIN_ALPHA, LOWER, MU_NEW,
    NEW, Q4_EPSILONS, Q4_NEW_ENERGIES, Q4_NUS, R_MAX, RAISE, RESIDUAL_TOL,
    TAIL_TOL, UNCERTAINTY_TERMS, WRONSKIAN_CHECK_GRID,
)
from .errors import (
    ConfigError, GammaPole, IndexOutOfRange, NonConvergence, NumericalError,
    PoleError, SingularWronskian, TailTooFat, UnsupportedModel,
)
from .fock import LadderSpec, eigenfunction_derivatives, energy
from .numerics import (
    hyp1f1, hyp2f2, log_gamma_signed, meijer_g_2012, pochhammer_ratio,
)
from .observables import build_table, uncertainty_scan
from .utils import aviso, info, write_csv

OP_LINEAR = "linear"
OP_FULL = "full"


# --------- Soluciones semilla ----------
@dataclass(frozen=True)
class SeedSolution:
    """u(x, eps) = e^{-x^2/2} [c_par 1F1(a; 1/2; x^2) + c_impar x 1F1(a + 1/2; 3/2; x^2)]."""
    epsilon: float
    nu: float
    evaluator: Callable = field(repr=False, compare=False)

    def __call__(self, x, order=0):
        """Filas u, u', ..., u^(order) en los puntos x."""
        return self.evaluator(x, order)


def _kummer_chain(a, b, y, n_max, cfg):
    # F^{(j)}(y) = (a)_j / (b)_j 1F1(a + j; b + j; y)
    out = []
    coef = 1.0
    for j in range(n_max + 1):
        out.append(coef * hyp1f1(a + j, b + j, y, cfg) if coef != 0 else np.zeros_like(y))
        coef *= (a + j) / (b + j)
    return out


def _compose_square(F, x, n):
    """d^n/dx^n F(x^2) a partir de las derivadas F^{(j)} evaluadas en x^2."""
    total = np.zeros_like(x)
    for k in range(n // 2 + 1):
        c = math.factorial(n) / (math.factorial(k) * math.factorial(n - 2 * k))
        total = total + c * (2.0 * x) ** (n - 2 * k) * F[n - k]
    return total


def _seed_evaluator(epsilon, c_even, c_odd, config=None):
    a = (1.0 - 2.0 * epsilon) / 4.0

    def evaluator(x, order=0):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        y = xs * xs
        S = np.zeros((order + 1, xs.size))
        if c_even:
            E = _kummer_chain(a, 0.5, y, order, config)
            for n in range(order + 1):
                S[n] += c_even * _compose_square(E, xs, n)
        if c_odd:
            K = _kummer_chain(a + 0.5, 1.5, y, order, config)
            Kd = [_compose_square(K, xs, n) for n in range(order + 1)]
            for n in range(order + 1):
                # (x K)^{(n)} = x K^{(n)} + n K^{(n-1)}
                S[n] += c_odd * (xs * Kd[n] + (n * Kd[n - 1] if n else 0.0))
        # Leibniz con (e^{-x^2/2})^{(m)} = (-1)^m He_m(x) e^{-x^2/2}
        He = [special.eval_hermitenorm(m, xs) for m in range(order + 1)]
        out = np.zeros_like(S)
        for n in range(order + 1):
            for j in range(n + 1):
                out[n] += math.comb(n, j) * (-1) ** (n - j) * He[n - j] * S[j]
        return out * np.exp(-y / 2.0)

    return evaluator


def _gamma_ratio(epsilon):
    """Γ((3 - 2 eps)/4) / Γ((1 - 2 eps)/4)."""
    try:
        ln, sn = log_gamma_signed((3.0 - 2.0 * epsilon) / 4.0)
        ld, sd = log_gamma_signed((1.0 - 2.0 * epsilon) / 4.0)
    except PoleError as exc:
        raise GammaPole(f"semilla con eps = {epsilon}: {exc}") from exc
    return sn * sd * math.exp(ln - ld)


def seed_from_angle(epsilon, theta, config=None):
    """Semilla con nu = tan(theta); theta en [0, pi/2] recorre de par a impar."""
    c_even = math.cos(theta)
    s = math.sin(theta)
    c_odd = 0.0 if s == 0 else s * 2.0 * _gamma_ratio(epsilon)
    nu = math.tan(theta) if theta < math.pi / 2 else math.inf
    return SeedSolution(epsilon, nu, _seed_evaluator(epsilon, c_even, c_odd, config))


def seed_solution(epsilon, nu, config=None):
    if nu == 0:
        return SeedSolution(epsilon, 0.0, _seed_evaluator(epsilon, 1.0, 0.0, config))
    if math.isinf(nu):
        # rama impar pura: no hace falta el cociente de Γ
        signo = math.copysign(1.0, nu)
        return SeedSolution(epsilon, nu, _seed_evaluator(epsilon, 0.0, signo, config))
    seed = seed_from_angle(epsilon, math.atan(nu), config)
    return SeedSolution(epsilon, nu, seed.evaluator)


# --------- Potencial de Wronski ----------
def _check_sign(valores, xs, detalle):
    malos = ~np.isfinite(valores)
    if np.any(malos):
        raise SingularWronskian(float(xs[np.argmax(malos)]), detalle + " (valor no finito)")
    signos = np.sign(valores)
    malos = (signos == 0) | (signos != signos[0])
    if np.any(malos):
        raise SingularWronskian(float(xs[np.argmax(malos)]), detalle)


def _chain(seeds, xs):
    """Cadena de Darboux de primer orden; devuelve (V, [(eps_k, w_k)])."""
    orden = sorted(seeds, key=lambda s: -s.epsilon)
    eps = [s.epsilon for s in orden]
    w = []
    for s in orden:
        d = s(xs, 1)
        _check_sign(d[0], xs, f"la semilla eps = {s.epsilon} se anula")
        w.append(d[1] / d[0])
    V = xs ** 2 / 2.0
    pasos = []
    for k in range(len(orden)):
        wk = w[k]
        V = -V + 2.0 * eps[k] + wk ** 2
        pasos.append((eps[k], wk))
        for j in range(k + 1, len(orden)):
            dif = w[j] - wk
            _check_sign(dif, xs, f"paso {k + 1}: la semilla eps = {eps[j]} se anula")
            w[j] = -wk + 2.0 * (eps[k] - eps[j]) / dif
    return V, pasos


def _wronskian_rows(D, rows):
    # D: (q, orden + 1, nx) -> det por punto de la matriz M[r, i] = u_i^{(rows[r])}
    M = D[:, list(rows), :]
    return np.linalg.det(np.transpose(M, (2, 1, 0)))


def _determinant_potential(seeds, xs):
    q = len(seeds)
    D = np.stack([s(xs, q + 1) for s in seeds])
    base = list(range(q))
    W = _wronskian_rows(D, base)
    _check_sign(W, xs, "el wronskiano se anula")
    W1 = _wronskian_rows(D, base[:-1] + [q])
    if q == 1:
        W2 = D[0, 2]
    else:
        W2 = (_wronskian_rows(D, base[:-2] + [q - 1, q])
              + _wronskian_rows(D, base[:-1] + [q + 1]))
    return xs ** 2 / 2.0 - (W2 * W - W1 ** 2) / W ** 2


def wronskian_potential(seeds, grid, method="chain"):
    """V = x^2/2 - (ln W)'' sobre la malla, con derivadas analíticas.

    method="chain" encadena transformaciones de primer orden (estable);
    method="determinant" arma el wronskiano q x q y sirve de contraste.
    """
    xs = np.atleast_1d(np.asarray(grid, dtype=float))
    if not seeds:
        return xs ** 2 / 2.0
    if method == "determinant":
        return _determinant_potential(list(seeds), xs)
    if method != "chain":
        raise ValueError(f"método desconocido: {method}")
    return _chain(seeds, xs)[0]


def darboux_states(seeds, E, g, dg, x):
    """Transforma (g, g') de energía E por la cadena; resultado normalizado.

    Cada paso g -> g' - w g multiplica la norma al cuadrado por 2 (E - eps).
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    _, pasos = _chain(seeds, xs)
    g = np.asarray(g, dtype=float)
    dg = np.asarray(dg, dtype=float)
    norma = 1.0
    for eps_k, wk in pasos:
        g, dg = dg - wk * g, (2.0 * (eps_k - E) + wk ** 2) * g - wk * dg
        norma *= 2.0 * (E - eps_k)
    return g / math.sqrt(norma), dg / math.sqrt(norma)


# --------- Funciones racionales del modelo q = 4 ----------
@dataclass(frozen=True)
class RationalFunction:
    num: Polynomial
    den: Polynomial

    def derivatives(self, x, order=2):
        """[r, r', r''] hasta el orden pedido (máximo 2)."""
        N, D = self.num(x), self.den(x)
        out = [N / D]
        if order >= 1:
            N1, D1 = self.num.deriv()(x), self.den.deriv()(x)
            out.append(N1 / D - N * D1 / D ** 2)
        if order >= 2:
            N2, D2 = self.num.deriv(2)(x), self.den.deriv(2)(x)
            out.append(N2 / D - 2.0 * N1 * D1 / D ** 2 - N * D2 / D ** 2
                       + 2.0 * N * D1 ** 2 / D ** 3)
        return out

    def __call__(self, x):
        return self.num(x) / self.den(x)


_X = Polynomial([0.0, 1.0])
_DEN = 16 * _X ** 8 - 64 * _X ** 6 + 120 * _X ** 4 + 45
_POT_NUM = (256 * _X ** 16 - 2560 * _X ** 14 + 10496 * _X ** 12 - 19584 * _X ** 10
            + 27360 * _X ** 8 - 10080 * _X ** 6 - 10800 * _X ** 4 + 16200 * _X ** 2 + 2025)
# eta_0 .. eta_3 de Q = (1/4)(d^4 + eta_3 d^3 + eta_2 d^2 + eta_1 d + eta_0)
_ETA_NUM = (
    16 * _X ** 12 - 32 * _X ** 10 + 360 * _X ** 8 + 240 * _X ** 6 - 795 * _X ** 4
    - 7110 * _X ** 2 + 1935,
    4 * _X * (-16 * _X ** 10 + 16 * _X ** 8 - 216 * _X ** 6 + 48 * _X ** 4 + 915 * _X ** 2 + 315),
    6 * (16 * _X ** 10 - 16 * _X ** 8 + 88 * _X ** 6 - 120 * _X ** 4 + 165 * _X ** 2 - 105),
    -4 * _X * (16 * _X ** 8 - 32 * _X ** 6 + 24 * _X ** 4 + 120 * _X ** 2 + 45),
)
_NEW_NUM = (
    4.0 * math.sqrt(3.0) * math.pi ** -0.25 * _X * (8 * _X ** 6 - 4 * _X ** 4 + 10 * _X ** 2 + 15),
    2.0 / (math.sqrt(3.0) * math.pi ** 0.25) * _X * (16 * _X ** 8 + 72 * _X ** 4 - 135),
)
Q4_ETAS = tuple(RationalFunction(n, _DEN) for n in _ETA_NUM)


def closed_form_potential(x):
    xs = np.asarray(x, dtype=float)
    return xs ** 2 / 2.0 - 4.0 * _POT_NUM(xs) / _DEN(xs) ** 2


def potential_from_denominator(x):
    """Misma V escrita como x^2/2 - 4 - (ln D)''."""
    xs = np.asarray(x, dtype=float)
    D, D1, D2 = _DEN(xs), _DEN.deriv()(xs), _DEN.deriv(2)(xs)
    return xs ** 2 / 2.0 - 4.0 - (D2 / D - (D1 / D) ** 2)


# --------- Modelo ----------
@dataclass(frozen=True)
class SusyModel:
    q: int
    seeds: Tuple[SeedSolution, ...]
    kappa: int
    new_energies: Tuple[float, ...]
    delta1: float
    potential: Callable = field(repr=False, compare=False)
    intertwiner_coeffs: Optional[Tuple[RationalFunction, ...]] = field(default=None, repr=False)
    name: str = ""

    def __post_init__(self):
        eps = self.epsilons
        if len(eps) != self.q:
            raise ConfigError(f"{self.name}: q = {self.q} con {len(eps)} semillas")
        if any(b <= a for a, b in zip(eps, eps[1:])):
            raise ConfigError(f"{self.name}: las energías de factorización deben crecer: {eps}")
        if eps and eps[-1] >= 0.5:
            raise ConfigError(f"{self.name}: eps_q = {eps[-1]} debe ser < 1/2")
        if self.kappa != self.q // 2 or len(self.new_energies) != self.kappa:
            raise ConfigError(f"{self.name}: kappa = {self.kappa} no es q/2 entero")
        for j, e in enumerate(self.new_energies):
            if abs(e - (self.new_energies[0] + 2.0 * j)) > 1e-12:
                raise ConfigError(f"{self.name}: los niveles nuevos no están espaciados en 2")
        if self.kappa and abs(self.delta1 - (ISO_GROUND - self.new_energies[0])) > 1e-12:
            raise ConfigError(f"{self.name}: Delta_1 inconsistente con E_0 nuevo")

    @property
    def epsilons(self):
        return tuple(s.epsilon for s in self.seeds)

    def new_energy(self, j):
        if not 0 <= j < self.kappa:
            raise IndexOutOfRange(f"j = {j} fuera de [0, {self.kappa})")
        return self.new_energies[j]


def q4_model(nus=None, config=None):
    """Modelo explícito de cuarto orden con eps = (-11/2, -9/2, -7/2, -5/2)."""
    nus = Q4_NUS if nus is None else nus
    seeds = tuple(seed_solution(e, nu, config) for e, nu in zip(Q4_EPSILONS, nus))
    e0 = Q4_NEW_ENERGIES[0]
    return SusyModel(
        q=4, seeds=seeds, kappa=2, new_energies=Q4_NEW_ENERGIES,
        delta1=ISO_GROUND - e0, potential=closed_form_potential,
        intertwiner_coeffs=Q4_ETAS, name="SUSY q=4",
    )


def custom_model(pairs, config=None):
    """Modelo a partir de pares (eps, nu); E_j nuevos = cada segunda eps ascendente."""
    if not pairs:
        raise ConfigError("el archivo de semillas no contiene pares (eps, nu)")
    pares = sorted(pairs, key=lambda p: p[0])
    try:
        seeds = tuple(seed_solution(float(e), float(nu), config) for e, nu in pares)
    except GammaPole as exc:
        raise ConfigError(str(exc)) from exc
    eps = [p[0] for p in pares]
    nuevas = tuple(float(e) for e in eps[1::2])
    delta1 = ISO_GROUND - nuevas[0] if nuevas else 0.0
    return SusyModel(
        q=len(seeds), seeds=seeds, kappa=len(seeds) // 2, new_energies=nuevas,
        delta1=delta1, potential=lambda x: wronskian_potential(seeds, x),
        name=f"SUSY q={len(seeds)} (semillas)",
    )


def _require_q4(model):
    if model.q != 4 or model.intertwiner_coeffs is None:
        raise UnsupportedModel(f"{model.name}: sólo el modelo q = 4 explícito tiene Q")


def check_grid():
    a, b, n = WRONSKIAN_CHECK_GRID
    return np.linspace(a, b, n)


# --------- Ajuste de nu ----------
@dataclass(frozen=True)
class NuFit:
    nus: Tuple[float, ...]
    thetas: Tuple[float, ...]
    residual: float


def _theta_of(nu):
    return math.pi / 2 if math.isinf(nu) else math.atan(nu)


def recover_nu(epsilons=Q4_EPSILONS, guess=Q4_NUS, grid=None, target=closed_form_potential):
    """Ajusta theta = arctan(nu) en [0, pi/2] para que el potencial de Wronski
    reproduzca el potencial cerrado sobre la malla."""
    xs = check_grid() if grid is None else np.asarray(grid, dtype=float)
    objetivo = target(xs)
    # arranque desplazado 0.03 hacia el interior
    x0 = np.clip([_theta_of(nu) for nu in guess], 0.03, math.pi / 2 - 0.03)

    def residuos(thetas):
        seeds = [seed_from_angle(e, t) for e, t in zip(epsilons, thetas)]
        try:
            return wronskian_potential(seeds, xs) - objetivo
        except SingularWronskian:
            return np.full(xs.size, 1e6)

    sol = optimize.least_squares(residuos, x0, bounds=(0.0, math.pi / 2), method="trf",
                                 xtol=FIT_TOL, ftol=FIT_TOL, gtol=FIT_TOL)
    thetas = []
    for t in sol.x:
        if t < 1e-4:
            t = 0.0
        elif t > math.pi / 2 - 1e-4:
            t = math.pi / 2
        thetas.append(float(t))
    nus = tuple(0.0 if t == 0 else (math.inf if t == math.pi / 2 else math.tan(t)) for t in thetas)
    seeds = [seed_solution(e, nu) for e, nu in zip(epsilons, nus)]
    residual = float(np.max(np.abs(wronskian_potential(seeds, xs) - objetivo)))
    if residual > RESIDUAL_TOL:
        raise NonConvergence(f"ajuste de nu sin éxito: desvío {residual:.3e} con nu = {nus}")
    info(f"nu recuperados {nus} (desvío {residual:.2e})")
    return NuFit(nus, tuple(thetas), residual)


# --------- Autofunciones ----------
def iso_eigenfunction_derivatives(model, n, x, order=2):
    """[phi_n, phi_n', phi_n''] con Q aplicado a derivadas analíticas de psi_n."""
    _require_q4(model)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    psi = eigenfunction_derivatives(n, xs, 4 + order)
    E = energy(n)
    c = 0.25 / math.sqrt(math.prod(E - e for e in model.epsilons))
    etas = [eta.derivatives(xs, order) for eta in model.intertwiner_coeffs]
    unos = [np.ones_like(xs), np.zeros_like(xs), np.zeros_like(xs)]
    etas.append(unos)
    out = []
    for m in range(order + 1):
        # Leibniz: (eta_j psi^{(j)})^{(m)}
        total = np.zeros_like(xs)
        for j, eta in enumerate(etas):
            for i in range(m + 1):
                total += math.comb(m, i) * eta[i] * psi[j + m - i]
        out.append(c * total)
    return out


def iso_eigenfunction(model, n):
    _require_q4(model)

    def phi(x):
        v = iso_eigenfunction_derivatives(model, n, x, 0)[0]
        return float(v[0]) if np.ndim(x) == 0 else v

    return phi


def new_eigenfunction_derivatives(model, j, x, order=2):
    _require_q4(model)
    if j not in (0, 1):
        raise IndexOutOfRange(f"j = {j}: el modelo q = 4 tiene dos niveles nuevos")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    R = RationalFunction(_NEW_NUM[j], _DEN).derivatives(xs, order)
    g = np.exp(-xs ** 2 / 2.0)
    out = [g * R[0]]
    if order >= 1:
        out.append(g * (R[1] - xs * R[0]))
    if order >= 2:
        out.append(g * (R[2] - 2.0 * xs * R[1] + (xs ** 2 - 1.0) * R[0]))
    return out


def new_eigenfunction(model, j):
    _require_q4(model)
    if j not in (0, 1):
        raise IndexOutOfRange(f"j = {j}: el modelo q = 4 tiene dos niveles nuevos")

    def phi(x):
        v = new_eigenfunction_derivatives(model, j, x, 0)[0]
        return float(v[0]) if np.ndim(x) == 0 else v

    return phi


def eigen_residual(model, values, second, energy_value, x):
    """sup |-phi''/2 + V phi - E phi| sobre la malla."""
    xs = np.asarray(x, dtype=float)
    r = -0.5 * second + (model.potential(xs) - energy_value) * values
    return float(np.max(np.abs(r)))


def eigen_samples(model, subspace):
    """Función (n_max, x) -> (filas phi, filas phi') para build_table."""
    _require_q4(model)

    def samples(n_max, x):
        if subspace == ISO:
            filas = [iso_eigenfunction_derivatives(model, n, x, 1) for n in range(n_max + 1)]
        else:
            if n_max >= model.kappa:
                raise IndexOutOfRange(f"n_max = {n_max} con kappa = {model.kappa}")
            filas = [new_eigenfunction_derivatives(model, j, x, 1) for j in range(n_max + 1)]
        return np.array([f[0] for f in filas]), np.array([f[1] for f in filas])

    return samples


# --------- Operadores de escalera ----------
@dataclass(frozen=True)
class SusyLadder:
    roots: Tuple[float, ...]
    gamma_roots: Tuple[float, ...]
    delta1: float
    kappa: int
    new_ground: float

    def L_minus_coeff(self, E):
        """sqrt(prod (E - raíz)) con rama principal."""
        return cmath.sqrt(math.prod(E - r for r in self.roots))

    def lin_coeff_iso(self, n):
        return math.sqrt(2.0 * n)

    def lin_coeff_new(self, j):
        return cmath.sqrt(2.0 * j - self.delta1)

    def gamma(self, E):
        """gamma(E) = prod (E - raíz)^{-1/2} sobre las cinco raíces."""
        return 1.0 / cmath.sqrt(math.prod(E - r for r in self.gamma_roots))


def susy_ladder(model):
    e = model.epsilons
    if model.q < 2:
        raise UnsupportedModel(f"{model.name}: las escaleras requieren q >= 2")
    gamma_roots = (0.5, e[0], e[1], e[-2] + 2.0, e[-1] + 2.0)
    return SusyLadder(
        roots=(0.5, 1.5) + gamma_roots[1:], gamma_roots=gamma_roots,
        delta1=model.delta1, kappa=model.kappa,
        new_ground=model.new_energies[0] if model.kappa else math.nan,
    )


def susy_ladder_action(ladder, subspace, direction, index, operator=OP_LINEAR):
    """(coeficiente complejo, índice nuevo); la aniquilación devuelve (0, None)."""
    if subspace == ISO:
        if index < 0:
            raise IndexOutOfRange(f"n = {index} < 0")
        tope = None
    elif subspace == NEW:
        if not 0 <= index < ladder.kappa:
            raise IndexOutOfRange(f"j = {index} fuera de [0, {ladder.kappa})")
        tope = ladder.kappa - 1
    else:
        raise ValueError(f"subespacio desconocido: {subspace}")

    if direction == LOWER:
        if index == 0:
            return 0j, None
        destino = index - 1
    elif direction == RAISE:
        if tope is not None and index == tope:
            return 0j, None
        destino = index + 1
    else:
        raise ValueError(f"dirección desconocida: {direction}")

    # el coeficiente se evalúa en el nivel superior del par (index, destino)
    arriba = max(index, destino)
    if operator == OP_FULL:
        E = ISO_GROUND + 2.0 * arriba if subspace == ISO else ladder.new_ground + 2.0 * arriba
        return complex(ladder.L_minus_coeff(E)), destino
    if operator != OP_LINEAR:
        raise ValueError(f"operador desconocido: {operator}")
    if subspace == ISO:
        return complex(ladder.lin_coeff_iso(arriba)), destino
    return complex(ladder.lin_coeff_new(arriba)), destino


# --------- Estados coherentes D_L(z) ----------
def iso_spec():
    return LadderSpec(
        f=lambda k: 2.0 * k, g=lambda k: 2.0 * k, xi=lambda k: ISO_GROUND + 2.0 * k,
        dim=None, basis=BASIS_SUSY_ISO, name="SUSY iso",
    )


def new_spec(model):
    kappa, d1, e0 = model.kappa, model.delta1, model.new_energies[0]

    def paso(j):
        return 0.0 if j <= 0 or j >= kappa else 2.0 * j - d1

    return LadderSpec(
        f=paso, g=paso, xi=lambda j: e0 + 2.0 * j,
        dim=kappa, basis=BASIS_SUSY_NEW, name="SUSY new",
    )


def new_amplitudes(model, z):
    """(sqrt(2) z)^j / j! sqrt((-Delta_1/2)_j), rama principal, sin normalizar."""
    z = complex(z)
    return np.array([
        (math.sqrt(2.0) * z) ** j / math.factorial(j)
        * cmath.sqrt(pochhammer_ratio(-model.delta1 / 2.0, j))
        for j in range(model.kappa)
    ], dtype=complex)


def susy_cs(model, subspace, z, truncation=None):
    if subspace == ISO:
        return build_cs(FAMILY_DL_ISO, iso_spec(), z, LIN_ALPHA,
                        truncation or BASIS_TRUNCATION)
    if subspace != NEW:
        raise ValueError(f"subespacio desconocido: {subspace}")
    if model.kappa == 0:
        raise UnsupportedModel(f"{model.name}: no hay niveles nuevos")
    if truncation is not None and truncation != model.kappa:
        aviso(f"truncación {truncation} ignorada: el subespacio nuevo tiene dimensión {model.kappa}")
    cs = coherent_from_amplitudes(FAMILY_DL_NEW, new_spec(model), z, LIN_ALPHA,
                                  new_amplitudes(model, z))
    c_hat = hat_c(model, abs(complex(z)))
    info(f"|z| = {abs(complex(z)):.4g}: norma directa {1.0 / cs.norm_constant ** 2:.6g}, "
         f"C^_z publicado {c_hat:.6g}")
    return cs


def hat_c(model, modulus):
    """C^_z tal como aparece publicado (suma con signo, se registra, no se usa)."""
    y = 2.0 * float(modulus) ** 2
    k, d = model.kappa, model.delta1
    cola = (y ** k * pochhammer_ratio(-d / 2.0, k) / math.factorial(k) ** 2
            * hyp2f2(1.0, k - d / 2.0, k + 1.0, k + 1.0, y))
    return float(hyp1f1(-d / 2.0, 1.0, y) - cola)


def new_energy_closed_form(model, modulus):
    """<H>_new con sigma = kappa en la suma publicada."""
    y = 2.0 * float(modulus) ** 2
    c = hat_c(model, modulus)
    suma = sum(j * y ** j / math.factorial(j) ** 2 * special.rgamma(model.delta1 / 2.0 - j)
               for j in range(model.kappa))
    return model.new_energies[0] + 2.0 * c ** 2 * suma


def new_probability_closed_form(model, modulus, j):
    if not 1 <= j < model.kappa:
        raise IndexOutOfRange(f"P_j publicado sólo está definido para 1 <= j < kappa (j = {j})")
    y = 2.0 * float(modulus) ** 2
    c = hat_c(model, modulus)
    return (y ** (j - 1) / math.factorial(j - 1) ** 2 * c ** 2
            * special.rgamma(model.delta1 / 2.0 + 1.0 - j))


def compare_new_closed_forms(model, modulus):
    """Registra <H> y P_j directos frente a los publicados; devuelve los pares."""
    cs = susy_cs(model, NEW, modulus)
    directo = energy_expectation(cs)
    publicado = new_energy_closed_form(model, modulus)
    filas = [("H", directo, publicado)]
    for j in range(1, model.kappa):
        filas.append((f"P_{j}", abs(cs.amplitudes[j]) ** 2,
                      new_probability_closed_form(model, modulus, j)))
    for nombre, a, b in filas:
        if abs(a - b) > 1e-8 * max(1.0, abs(a)):
            aviso(f"{nombre} en |z| = {modulus}: directo {a:.8g}, forma publicada {b:.8g}")
    return filas


# --------- Medidas ----------
def measure_new(model):
    """Densidad radial publicada de H_new; PoleError si Γ(-Delta_1/2) es un polo."""
    lg, sg = log_gamma_signed(-model.delta1 / 2.0)
    pref = 2.0 * sg * math.exp(lg) / math.pi
    a1 = -(model.delta1 + 2.0) / 2.0

    def densidad(r):
        if r <= 0:
            return 0.0
        return pref / hat_c(model, r) ** 2 * meijer_g_2012(a1, 2.0 * r * r)

    return densidad


def _new_moments(model, densidad, r_max):
    def probs(r):
        a = np.abs(new_amplitudes(model, r)) ** 2
        return a / a.sum()

    cola = 2.0 * math.pi * r_max * densidad(r_max) * probs(r_max)
    if np.any(np.abs(cola) > TAIL_TOL):
        raise TailTooFat(f"mu_new en r_max = {r_max} vale {np.max(np.abs(cola)):.2e}")
    return np.array([
        integrate.quad(lambda r: 2.0 * math.pi * r * densidad(r) * probs(r)[j],
                       0.0, r_max, limit=400)[0]
        for j in range(model.kappa)
    ])


def new_measure_check(model, n_max=None, r_max=R_MAX, subspace=NEW):
    """Desvío máximo de la resolución de la identidad en el subespacio pedido."""
    if subspace == ISO:
        n = 10 if n_max is None else n_max
        return identity_resolution_check(FAMILY_DL_ISO, iso_spec(), measure_iso(), n,
                                         r_max, LIN_ALPHA)
    try:
        densidad = measure_new(model)
    except PoleError:
        aviso(f"{MU_NEW}: Γ(-Delta_1/2) con Delta_1 = {model.delta1} es un polo; "
              "la medida publicada no está definida")
        return math.inf
    try:
        momentos = _new_moments(model, densidad, r_max)
    except NumericalError as exc:
        aviso(f"{MU_NEW}: {exc}")
        return math.inf
    desvio = float(np.max(np.abs(momentos - 1.0)))
    info(f"{MU_NEW}: momentos diagonales {np.round(momentos, 6).tolist()} (desvío {desvio:.3e})")
    return desvio


# --------- Incertidumbres ----------
def susy_tables(model, subspace, n_max=None):
    if subspace == NEW:
        n_max = model.kappa - 1
    elif n_max is None:
        n_max = UNCERTAINTY_TERMS - 1
    basis = BASIS_SUSY_ISO if subspace == ISO else BASIS_SUSY_NEW
    muestras = eigen_samples(model, subspace)
    return {kind: build_table(kind, n_max, basis, samples=muestras) for kind in KINDS}


def susy_uncertainty_scan(model, subspace, z_moduli, n_terms=UNCERTAINTY_TERMS,
                          truncation=BASIS_TRUNCATION):
    tablas = susy_tables(model, subspace, n_terms - 1)
    family = FAMILY_DL_ISO if subspace == ISO else FAMILY_DL_NEW
    return uncertainty_scan(
        family, None, z_moduli, n_terms=n_terms, truncation=truncation,
        cs_builder=lambda r: susy_cs(model, subspace, r,
                                     truncation if subspace == ISO else None),
        tables=tablas,
    )


# --------- Exportación ----------
def export_model_csv(model, ruta, x=None, config=None):
    xs = np.linspace(0.1, 6.0, 200) if x is None else np.asarray(x, dtype=float)
    V = model.potential(xs)
    if model.intertwiner_coeffs is None:
        return write_csv(ruta, ["x", "V"], list(zip(xs, V)), config=config)
    cols = [new_eigenfunction(model, j)(xs) for j in range(model.kappa)]
    cols += [iso_eigenfunction(model, n)(xs) for n in range(6)]
    header = ["x", "V", "phi_E0", "phi_E1"] + [f"phi_{n}" for n in range(6)]
    rows = [tuple(fila) for fila in np.column_stack([xs, V] + cols)]
    return write_csv(ruta, header, rows, config=config)
