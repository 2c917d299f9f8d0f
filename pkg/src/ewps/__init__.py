"""Compound extended-Weibull power-series lifetime distributions."""
from .data import describe, phosphorus, read_dataset, write_dataset
from .dataset import Dataset
from .errors import (DivergenceError, DomainError, InsufficientDataError, NonexistentMomentError,
                     TruncationError)
from .generators import (GENERATORS, Chen, Exponential, ExponentialPower, ExtendedWeibullFamily,
                         Gompertz, ModifiedWeibull, Pareto, Rayleigh, Weibull, get_generator)
from .inference import (FitConfig, FitReport, direct_fit, e_step, em_fit, fit, ks_statistic,
                        log_likelihood, model_criteria, observed_info, score)
from .model import EwpsModel, MixtureTruncation
from .power_series import (POWER_SERIES, Binomial, Geometric, Logarithmic, Poisson,
                           PowerSeriesFamily, get_power_series)

__version__ = "0.1.0"

__all__ = [
    "describe", "phosphorus", "read_dataset", "write_dataset", "Dataset",
    "DivergenceError", "DomainError", "InsufficientDataError", "NonexistentMomentError",
    "TruncationError",
    "GENERATORS", "Chen", "Exponential", "ExponentialPower", "ExtendedWeibullFamily", "Gompertz",
    "ModifiedWeibull", "Pareto", "Rayleigh", "Weibull", "get_generator",
    "FitConfig", "FitReport", "direct_fit", "e_step", "em_fit", "fit", "ks_statistic",
    "log_likelihood", "model_criteria", "observed_info", "score",
    "EwpsModel", "MixtureTruncation",
    "POWER_SERIES", "Binomial", "Geometric", "Logarithmic", "Poisson", "PowerSeriesFamily",
    "get_power_series",
]
