# cohstates/app.py
import argparse

from .commands import density, entropy, potential, uncertainty, validate
from .constants import (
    APP_TITLE, CMD_DENSITY, CMD_ENTROPY, CMD_POTENTIAL, CMD_UNCERTAINTY,
    CMD_VALIDATE, COMMANDS, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, MODEL_SUSY_Q4,
    MODEL_TRUNC, SUSY_FAMILIES, TRUNC_FAMILIES, VERSION,
)
from .errors import ConfigError, ContractError, NumericalError
from .state import config_from_args
from .utils import error, info


def build_parser():
    p = argparse.ArgumentParser(
        prog=APP_TITLE,
        description="Estados coherentes del oscilador truncado y sus compañeros SUSY.",
    )
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--family", choices=TRUNC_FAMILIES + SUSY_FAMILIES, default=None)
    p.add_argument("--model", choices=(MODEL_TRUNC, MODEL_SUSY_Q4), default=None)
    p.add_argument("--zmin", type=float, default=None)
    p.add_argument("--zmax", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--basis", type=int, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--phi", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--seed-config", dest="seed_config", default=None)
    p.add_argument("--version", action="version", version=f"{APP_TITLE} {VERSION}")
    return p


class CohApp:
    def __init__(self):
        self.parser = build_parser()
        # comando -> manejador; cada manejador devuelve el código de salida
        self.handlers = {
            CMD_DENSITY: density.run,
            CMD_UNCERTAINTY: uncertainty.run,
            CMD_ENTROPY: entropy.run,
            CMD_VALIDATE: validate.run,
            CMD_POTENTIAL: potential.run,
        }

    def run(self, argv=None):
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as exc:
            # argparse ya imprimió el uso; --help y --version salen con 0
            return EXIT_OK if not exc.code else EXIT_CONFIG
        try:
            config = config_from_args(args)
            info(f"comando '{config.command}' (modelo {config.model}, familia {config.family})")
            return self.handlers[config.command](config)
        except ConfigError as e:
            error(f"configuración inválida: {e}")
            return EXIT_CONFIG
        except (NumericalError, ContractError) as e:
            error(f"{type(e).__name__}: {e}")
            return EXIT_NUMERIC
