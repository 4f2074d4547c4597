import math
import time

import numpy as np
import pytest
from scipy.special import erfc

from hybrid_d2d.analytic.inversion import InverseLaplaceConfig, bromwich_nodes, inverse_laplace
from hybrid_d2d.errors import InversionDivergence

# transform, inverse; bounded inverses on [0.1, 10]
KNOWN_PAIRS = {
    "step": (lambda s: 1 / s, lambda t: np.ones_like(t)),
    "exp": (lambda s: 1 / (s + 1), lambda t: np.exp(-t)),
    "sin": (lambda s: 1 / (s * s + 1), np.sin),
    "cos": (lambda s: s / (s * s + 1), np.cos),
    "t_exp": (lambda s: 1 / (s + 1) ** 2, lambda t: t * np.exp(-t)),
    "inv_sqrt": (lambda s: 1 / np.sqrt(s), lambda t: 1 / np.sqrt(math.pi * t)),
    "exp_sqrt": (lambda s: np.exp(-np.sqrt(s)), lambda t: np.exp(-1 / (4 * t)) / (2 * np.sqrt(math.pi * t**3))),
    "one_minus_exp": (lambda s: 1 / (s * (s + 1)), lambda t: 1 - np.exp(-t)),
    "damped_sin": (lambda s: 1 / ((s + 1) ** 2 + 1), lambda t: np.exp(-t) * np.sin(t)),
    "erfc": (lambda s: np.exp(-np.sqrt(s)) / s, lambda t: erfc(1 / (2 * np.sqrt(t)))),
}


def test_spec_pairs():
    assert inverse_laplace(lambda s: 1 / s, 1.0) == pytest.approx(1.0, abs=1e-8)
    assert inverse_laplace(lambda s: 1 / (s + 1), 1.0) == pytest.approx(math.exp(-1), abs=1e-8)
    assert inverse_laplace(lambda s: 1 / s**2, 2.5) == pytest.approx(2.5, abs=1e-7)


@pytest.mark.parametrize("name", sorted(KNOWN_PAIRS))
def test_known_pairs(name):
    F, f = KNOWN_PAIRS[name]
    t = np.linspace(0.1, 10.0, 100)
    assert np.max(np.abs(inverse_laplace(F, t) - f(t))) <= 1e-7


def test_nodes_have_positive_real_part():
    cfg = InverseLaplaceConfig()
    s = bromwich_nodes([0.5, 2.0], cfg)
    assert s.shape == (2, 2 * 32 + 1)
    assert np.all(s.real > 0)


def test_config_validation():
    with pytest.raises(ValueError):
        InverseLaplaceConfig(terms=4)
    with pytest.raises(ValueError):
        InverseLaplaceConfig(A=0.0)
    with pytest.raises(ValueError):
        inverse_laplace(lambda s: 1 / s, 0.0)


def test_divergence_is_reported():
    # exp(s) is the transform of a time advance, not of a function
    with pytest.raises(InversionDivergence):
        inverse_laplace(np.exp, 1.0)


def test_suite_is_fast():
    t = np.linspace(0.1, 10.0, 100)
    start = time.perf_counter()
    for F, _ in KNOWN_PAIRS.values():
        inverse_laplace(F, t)
    assert time.perf_counter() - start < 1.0
