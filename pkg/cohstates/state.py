import math
import os
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .constants import (
    BASIS_TRUNCATION, CMD_POTENTIAL, COMMANDS, DEFAULT_OUT, DEFAULT_PHI, DEFAULT_THETA,
    DEFAULT_Z_MAX, DEFAULT_Z_MIN, DEFAULT_Z_STEPS, FAMILY_DL_ISO,
    FAMILY_DL_NEW, FAMILY_L_MINUS, ISO, MIN_TRUNCATION, MODEL_SUSY_Q4,
    MODEL_TRUNC, NEW, SUSY_FAMILIES, TRUNC_FAMILIES,
)
from .errors import ConfigError


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: str
    model: str
    z_min: float
    z_max: float
    z_steps: int
    basis_size: int
    theta: float
    phi: float
    output_path: str
    seed_config: Optional[str] = None

    def z_grid(self):
        return np.linspace(self.z_min, self.z_max, self.z_steps)

    @property
    def subspace(self):
        if self.family == FAMILY_DL_ISO:
            return ISO
        if self.family == FAMILY_DL_NEW:
            return NEW
        return None

    def as_dict(self):
        return asdict(self)


def reset_config():
    """Valores por defecto de una corrida."""
    return {
        "command": None, "family": None, "model": MODEL_TRUNC,
        "z_min": DEFAULT_Z_MIN, "z_max": DEFAULT_Z_MAX, "z_steps": DEFAULT_Z_STEPS,
        "basis_size": BASIS_TRUNCATION, "theta": DEFAULT_THETA, "phi": DEFAULT_PHI,
        "output_path": DEFAULT_OUT, "seed_config": None,
    }


def _family_for(model, family):
    if family is None:
        return FAMILY_L_MINUS if model == MODEL_TRUNC else FAMILY_DL_NEW
    if model == MODEL_TRUNC and family not in TRUNC_FAMILIES:
        raise ConfigError(f"la familia {family} no pertenece al oscilador truncado")
    if model == MODEL_SUSY_Q4 and family not in SUSY_FAMILIES:
        raise ConfigError(f"con el modelo {model} la familia debe ser una de {SUSY_FAMILIES}")
    return family


def _check_output(ruta):
    carpeta = os.path.dirname(os.path.abspath(ruta)) or "."
    # la carpeta puede no existir todavía: se busca el primer ancestro existente
    while not os.path.isdir(carpeta):
        padre = os.path.dirname(carpeta)
        if padre == carpeta:
            break
        carpeta = padre
    if not os.access(carpeta, os.W_OK):
        raise ConfigError(f"no se puede escribir en '{ruta}'")


def build_config(**cambios):
    datos = reset_config()
    desconocidos = set(cambios) - set(datos)
    if desconocidos:
        raise ConfigError(f"opciones desconocidas: {sorted(desconocidos)}")
    datos.update({k: v for k, v in cambios.items() if v is not None})
    if datos["command"] not in COMMANDS:
        raise ConfigError(f"comando desconocido: {datos['command']}")
    if datos["model"] not in (MODEL_TRUNC, MODEL_SUSY_Q4):
        raise ConfigError(f"modelo desconocido: {datos['model']}")
    datos["family"] = _family_for(datos["model"], datos["family"])
    if int(datos["z_steps"]) < 2:
        raise ConfigError(f"z_steps debe ser >= 2 (recibido {datos['z_steps']})")
    if int(datos["basis_size"]) < MIN_TRUNCATION:
        raise ConfigError(f"basis_size debe ser >= {MIN_TRUNCATION} (recibido {datos['basis_size']})")
    if not (0.0 <= float(datos["z_min"]) <= float(datos["z_max"])):
        raise ConfigError(f"rango de |z| inválido: [{datos['z_min']}, {datos['z_max']}]")
    for clave in ("theta", "phi", "z_min", "z_max"):
        if not math.isfinite(float(datos[clave])):
            raise ConfigError(f"{clave} no es finito")
    if datos["seed_config"] is not None:
        if datos["command"] != CMD_POTENTIAL:
            raise ConfigError("--seed-config sólo se usa con el comando 'potential'")
        if not os.path.isfile(datos["seed_config"]):
            raise ConfigError(f"no existe el archivo de semillas '{datos['seed_config']}'")
    _check_output(datos["output_path"])
    datos["z_steps"] = int(datos["z_steps"])
    datos["basis_size"] = int(datos["basis_size"])
    return RunConfig(**datos)


def config_from_args(args):
    return build_config(
        command=args.command, family=args.family, model=args.model,
        z_min=args.zmin, z_max=args.zmax, z_steps=args.steps,
        basis_size=args.basis, theta=args.theta, phi=args.phi,
        output_path=args.out, seed_config=args.seed_config,
    )


# --------- Archivo de semillas ----------
def read_seed_file(ruta):
    """Pares (eps, nu) por línea; '#' comenta, 'inf' vale para nu."""
    pares = []
    try:
        with open(ruta, "r", encoding="utf-8") as f:
            lineas = f.readlines()
    except OSError as exc:
        raise ConfigError(f"no se pudo leer '{ruta}': {exc}") from exc
    for i, linea in enumerate(lineas, start=1):
        texto = linea.split("#", 1)[0].strip()
        if not texto:
            continue
        partes = texto.split()
        if len(partes) != 2:
            raise ConfigError(f"{ruta}:{i}: se esperaban 'epsilon nu'")
        try:
            eps, nu = float(partes[0]), float(partes[1])
        except ValueError as exc:
            raise ConfigError(f"{ruta}:{i}: valor no numérico") from exc
        if not math.isfinite(eps):
            raise ConfigError(f"{ruta}:{i}: epsilon debe ser finito")
        pares.append((eps, nu))
    if not pares:
        raise ConfigError(f"'{ruta}' no contiene semillas")
    return pares
