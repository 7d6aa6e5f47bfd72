from . import csv_config, model_for
from ..constants import ENTROPY_CUTOFF, ENTROPY_TERMS, EXIT_OK
from ..entangle import BeamSplitterSetting, entropy_scan, write_entropy_csv


def run(config):
    model = model_for(config)
    setting = BeamSplitterSetting(config.theta, config.phi)
    source = config.family if model is None else config.subspace
    puntos = entropy_scan(source, config.z_grid(), setting, cutoff=ENTROPY_CUTOFF,
                          terms=ENTROPY_TERMS, model=model)
    write_entropy_csv(config.output_path, puntos, config=csv_config(config))
    return EXIT_OK
