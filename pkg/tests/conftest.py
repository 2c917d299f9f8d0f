import numpy as np
import pytest

from ewps import (Binomial, Chen, EwpsModel, Exponential, ExponentialPower, Geometric, Gompertz,
                  Logarithmic, ModifiedWeibull, Pareto, Poisson, Rayleigh, Weibull, phosphorus)

# representative interior parameter per mixer
MIXERS = {
    "poisson": (Poisson(), 1.5),
    "logarithmic": (Logarithmic(), 0.6),
    "geometric": (Geometric(), 0.5),
    "binomial": (Binomial(10), 0.4),
}

# two shape settings per generator
GENERATORS = {
    "exponential": (Exponential(), Exponential()),
    "rayleigh": (Rayleigh(), Rayleigh()),
    "weibull": (Weibull(1.7), Weibull(0.8)),
    "modified_weibull": (ModifiedWeibull(1.5, 0.3), ModifiedWeibull(0.7, 1.2)),
    "pareto": (Pareto(0.5), Pareto(2.0)),
    "gompertz": (Gompertz(0.8), Gompertz(2.5)),
    "chen": (Chen(1.3), Chen(0.6)),
    "exponential_power": (ExponentialPower(1.2, 0.9), ExponentialPower(0.5, 2.0)),
}

PAIRS = [(m, g) for m in MIXERS for g in GENERATORS]


def make_model(mixer: str, generator: str, setting: int = 0, alpha: float = 1.3,
               theta: float | None = None) -> EwpsModel:
    ps, default_theta = MIXERS[mixer]
    ew = GENERATORS[generator][setting]
    if ew.alpha_fixed:
        alpha = 1.0
    return EwpsModel(ps, ew, default_theta if theta is None else theta, alpha)


@pytest.fixture(scope="session")
def phosphorus_data():
    return phosphorus()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
