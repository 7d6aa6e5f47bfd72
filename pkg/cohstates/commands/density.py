# =========================
# Densidad de probabilidad P_z(x) = |<x|z>|^2
# =========================
import numpy as np
from scipy import integrate

from . import csv_config, model_for, x_grid
from ..coherent import build_cs
from ..constants import EXIT_OK, ISO, LIN_ALPHA
from ..fock import truncated_oscillator_spec
from ..observables import position_density, trunc_rows
from ..susy import iso_eigenfunction_derivatives, new_eigenfunction_derivatives, susy_cs
from ..utils import aviso, info, write_csv


def _rows_susy(model, subspace, n, x):
    if subspace == ISO:
        return np.array([iso_eigenfunction_derivatives(model, k, x, 0)[0] for k in range(n)])
    return np.array([new_eigenfunction_derivatives(model, j, x, 0)[0] for j in range(n)])


def local_maxima(P):
    return int(np.sum((P[1:-1] > P[:-2]) & (P[1:-1] > P[2:])))


def run(config):
    x = x_grid()
    model = model_for(config)
    filas = []
    cache = None
    for r in config.z_grid():
        if model is None:
            cs = build_cs(config.family, truncated_oscillator_spec(), r, LIN_ALPHA,
                          config.basis_size)
            cache = cache if cache is not None else trunc_rows(cs.truncation - 1, x)
        else:
            cs = susy_cs(model, config.subspace, r,
                         config.basis_size if config.subspace == ISO else None)
            cache = cache if cache is not None else _rows_susy(model, config.subspace,
                                                               cs.truncation, x)
        P = position_density(cs, cache)
        masa = float(integrate.trapezoid(P, x))
        if abs(masa - 1.0) > 1e-4:
            aviso(f"|z| = {r:.4g}: la integral de P sobre la malla vale {masa:.6f}")
        info(f"|z| = {r:.4g}: {local_maxima(P)} máximo(s) local(es)")
        filas.extend((r, xi, pi) for xi, pi in zip(x, P))
    write_csv(config.output_path, ["z_abs", "x", "P"], filas,
              config=csv_config(config), basis_size=config.basis_size)
    return EXIT_OK
