from . import csv_config, model_for, x_grid
from ..constants import EXIT_OK
from ..errors import ConfigError
from ..susy import export_model_csv


def run(config):
    model = model_for(config)
    if model is None:
        raise ConfigError("'potential' requiere --model SUSY_Q4 o --seed-config")
    export_model_csv(model, config.output_path, x_grid(), config=csv_config(config))
    return EXIT_OK
