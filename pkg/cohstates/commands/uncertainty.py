from . import csv_config, model_for
from ..constants import EXIT_OK, LIN_ALPHA, UNCERTAINTY_TERMS
from ..fock import truncated_oscillator_spec
from ..observables import uncertainty_scan
from ..susy import susy_uncertainty_scan
from ..utils import write_csv


def run(config):
    model = model_for(config)
    if model is None:
        registros = uncertainty_scan(
            config.family, truncated_oscillator_spec(), config.z_grid(),
            n_terms=UNCERTAINTY_TERMS, truncation=config.basis_size, alpha=LIN_ALPHA,
        )
    else:
        registros = susy_uncertainty_scan(model, config.subspace, config.z_grid(),
                                          truncation=config.basis_size)
    filas = [(r.z_modulus, r.sigma_x, r.sigma_p, r.product) for r in registros]
    write_csv(config.output_path, ["z_abs", "sigma_x", "sigma_p", "product"], filas,
              config=csv_config(config), basis_size=config.basis_size)
    return EXIT_OK
