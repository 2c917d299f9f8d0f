import math

import numpy as np
import pytest
from scipy.special import shichi

from ewps import (Chen, DivergenceError, EwpsModel, Exponential, Geometric, Logarithmic,
                  ModifiedWeibull, Weibull)
from ewps import entropy, moments
from ewps import special_cases as sc
from ewps.model import MixtureTruncation
from conftest import PAIRS, make_model

EG = EwpsModel(Geometric(), Exponential(), 0.5, 1.0)


def shi_series(z, terms=40):
    """Oracle: sum z^(2k+1) / ((2k+1) (2k+1)!)."""
    return sum(z ** (2 * k + 1) / ((2 * k + 1) * math.factorial(2 * k + 1)) for k in range(terms))


def test_entropy_formula_matches_numeric_eg():
    assert entropy.shannon_entropy_formula(EG) == pytest.approx(entropy.shannon_entropy_numeric(EG), abs=1e-6)


@pytest.mark.parametrize("alpha,expected", [(1.0, 1.0), (2.0, 1 - math.log(2))])
def test_entropy_exponential_limit(alpha, expected):
    model = EwpsModel(Geometric(), Exponential(), 1e-10, alpha)
    assert entropy.shannon_entropy_numeric(model) == pytest.approx(expected, abs=1e-8)
    assert entropy.shannon_entropy_formula(model) == pytest.approx(expected, abs=1e-8)


@pytest.mark.parametrize("mixer,generator", PAIRS[1::4])
def test_entropy_formula_identity(mixer, generator):
    model = make_model(mixer, generator)
    assert entropy.shannon_entropy_formula(model) == pytest.approx(
        entropy.shannon_entropy_numeric(model), abs=1e-6)


@pytest.mark.parametrize("model", [
    EG,
    EwpsModel(Logarithmic(), Chen(2.0), 0.7, 1.0),
    EwpsModel(Geometric(), Weibull(2.0), 0.5, 1.0),
], ids=["EG", "CL", "WG"])
def test_max_entropy_constraints(model):
    assert np.all(np.abs(entropy.max_entropy_constraint_residuals(model)) < 1e-6)


def test_shi_against_series_and_scipy():
    assert sc.shi(0.5) == pytest.approx(shi_series(0.5), abs=1e-10)
    assert sc.shi(0.5) == pytest.approx(0.5 + 0.5**3 / 18 + 0.5**5 / 600, abs=1e-6)
    for z in (0.1, 1.0, 3.0, 7.5):
        assert sc.shi(z) == pytest.approx(shichi(z)[0], rel=1e-12)
        assert sc.chi(z) == pytest.approx(shichi(z)[1], rel=1e-12)
    assert sc.shi(-1.0) == pytest.approx(-sc.shi(1.0))


def test_chi_small_argument_limit():
    for z in (1e-3, 1e-6):
        assert abs(sc.chi(z) - math.log(z) - sc.EULER_GAMMA) < z


def test_pp_entropy_closed_form_reports_gap():
    res = sc.pp_entropy_closed_form(0.5, 2.0, 1.0)
    assert np.isfinite(res.closed_form) and np.isfinite(res.numeric)
    assert res.gap == pytest.approx(res.closed_form - res.numeric)


def weibull_series_oracle(theta, alpha, gamma, r, trunc=MixtureTruncation()):
    p = trunc.weights(Geometric(), theta)
    n = np.arange(1, p.size + 1)
    return float(np.sum(p * np.exp(math.lgamma(1 + r / gamma) - (r / gamma) * np.log(n * alpha))))


def test_mwg_series_lambda_zero_collapse():
    value = sc.mwg_moment_series(0.5, 1.0, 2.0, 0.0, r=2, truncation_depth=10)
    assert value == pytest.approx(math.log(2), rel=1e-10)
    for r in (1, 2, 3, 5):
        assert sc.mwg_moment_series(0.4, 1.7, 1.3, 0.0, r, 6) == pytest.approx(
            weibull_series_oracle(0.4, 1.7, 1.3, r), rel=1e-10)


def test_mwg_series_matches_quadrature():
    model = EwpsModel(Geometric(), ModifiedWeibull(1.5, 0.1), 0.3, 2.0)
    series = sc.mwg_moment_series(0.3, 2.0, 1.5, 0.1, r=1, truncation_depth=25)
    assert series == pytest.approx(moments.raw_moment(model, 1), rel=1e-5)


def test_mwg_series_divergence_signal():
    with pytest.raises(DivergenceError):
        sc.mwg_moment_series(0.5, 0.2, 1.0, 3.0, r=1, truncation_depth=30)
