"""Hybrid spline / super-resolution multigrid Poisson solver."""

from ._mgsr import (
    ConfigError,
    Generator,
    GeneratorWeights,
    NormBounds,
    Prolongation,
    RunConfig,
    WeightFileError,
    apply_laplacian,
    denormalize,
    extract_windows,
    gauss_seidel,
    load_grid,
    load_weights,
    load_windows,
    make_nearest_neighbor_weights,
    make_random_weights,
    normalize,
    parse_ratio,
    power_spectrum,
    residual,
    restrict_injection,
    save_grid,
    save_weights,
    schedule_operator,
    single_mode_field,
    solve,
    spectral_poisson_solve,
    spline_prolong,
    sr_prolong,
    turbulent_source,
)

__version__ = "0.1.0"


def config(**overrides):
    """RunConfig with the given fields set; `prolongation` may be a string."""
    cfg = RunConfig()
    for key, value in overrides.items():
        if key == "prolongation" and isinstance(value, str):
            value = getattr(Prolongation, value)
        if key == "N_GAN" and isinstance(value, str):
            value = parse_ratio(value)
        if not hasattr(cfg, key):
            raise ConfigError(f"unknown config field {key!r}")
        setattr(cfg, key, value)
    return cfg
