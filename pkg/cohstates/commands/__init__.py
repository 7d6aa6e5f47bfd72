import numpy as np

from ..constants import GRID_POINTS, GRID_X_MAX, GRID_X_MIN, MODEL_SUSY_Q4
from ..state import read_seed_file
from ..susy import custom_model, q4_model


def x_grid():
    return np.linspace(GRID_X_MIN, GRID_X_MAX, GRID_POINTS)


def model_for(config):
    """Modelo SUSY de la corrida: archivo de semillas o el modelo q = 4."""
    if config.seed_config is not None:
        return custom_model(read_seed_file(config.seed_config))
    if config.model == MODEL_SUSY_Q4:
        return q4_model()
    return None


def csv_config(config):
    return config.as_dict()
