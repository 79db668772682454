import math

import mpmath as mp
import numpy as np
import pytest

from frachardy.errors import DomainError, PolicyRejected
from frachardy.kernel import TruncationPolicy
from frachardy.riesz import (
    RieszIndex,
    green_function,
    mellin_identity_adaptive,
    mellin_identity_residual,
    riesz_asymptotic_constant,
    riesz_oracle,
    riesz_potential,
    riesz_regularized,
)

SQRT_HALF_PI = math.sqrt(math.pi / 2)


def _mp_riesz(alpha, n, eps=0):
    # t = u**4 removes the endpoint singularity at t = 0
    def f(u):
        t = u**4
        return 4 * u**3 * mp.sin(n * t) * mp.sin(t) * (2 * (eps + 2 * mp.sin(t / 2) ** 2)) ** (-alpha)

    with mp.workdps(30):
        val = mp.quad(f, mp.linspace(0, mp.pi ** 0.25, 4 * n + 4))
    return float(mp.sqrt(2 / mp.pi) * val)


def test_index_range():
    with pytest.raises(DomainError):
        RieszIndex(1.5)


def test_examples():
    assert riesz_potential(1, 7) == pytest.approx(SQRT_HALF_PI, rel=1e-14)
    assert riesz_potential(0.5, 1) == pytest.approx(4 / (1.5 * math.sqrt(2 * math.pi)), rel=1e-14)


def test_against_mpmath_integral():
    for a, n in [(0.4, 3), (0.75, 12), (1.25, 5)]:
        assert riesz_potential(a, n) == pytest.approx(_mp_riesz(a, n), rel=1e-12)


def test_oracle_examples():
    assert riesz_oracle(1, 5, 1e-9) == pytest.approx(SQRT_HALF_PI, abs=1e-9)
    assert riesz_oracle(0.5, 1, 1e-9) == pytest.approx(riesz_potential(0.5, 1), abs=1e-9)
    assert riesz_oracle(0.75, 12, 1e-8) == pytest.approx(riesz_potential(0.75, 12), abs=1e-8)


def test_positivity_grid():
    n = np.arange(1, 10_001)
    for a in np.linspace(0.01, 1.49, 25):
        assert np.all(riesz_potential(a, n) > 0)


def test_growth_exponent():
    a = 1.25
    r = riesz_potential(a, np.array([10_000, 40_000]))
    assert r[1] / r[0] == pytest.approx(2.0, rel=1e-4)


def test_regularized_matches_mpmath():
    for a, eps, n in [(1.0, 1e-6, 3), (0.5, 1.0, 1), (1.4, 0.1, 2)]:
        assert riesz_regularized(a, eps, n) == pytest.approx(_mp_riesz(a, n, eps), rel=1e-9)


def test_regularized_below_limit_for_alpha_half():
    assert abs(riesz_regularized(0.5, 1.0, 1)) < riesz_oracle(0.5, 1)


@pytest.mark.parametrize("a", [0.5, 1.0])
@pytest.mark.parametrize("n", [1, 5, 20])
def test_regularized_convergence(a, n):
    gaps = [abs(riesz_regularized(a, eps, n) - riesz_potential(a, n)) for eps in (1e-2, 1e-4, 1e-6)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_regularized_gap_shrinks_like_sqrt_eps():
    g4 = abs(riesz_regularized(1.0, 1e-4, 3) - SQRT_HALF_PI)
    g6 = abs(riesz_regularized(1.0, 1e-6, 3) - SQRT_HALF_PI)
    assert g4 / g6 == pytest.approx(10.0, rel=0.05)


def test_green_function():
    assert np.allclose(green_function(1, np.arange(1, 100)), 1.0, atol=1e-14)
    assert green_function(0.5, 1) == pytest.approx(8 / (3 * math.pi), rel=1e-14)
    with pytest.raises(DomainError):
        green_function(1.2, 3)


def test_green_decay_half():
    g = green_function(0.5, np.array([1000, 10_000]))
    assert g[0] / g[1] == pytest.approx(10.0, rel=1e-3)


def test_asymptotic_constants():
    assert riesz_asymptotic_constant(1) == pytest.approx(SQRT_HALF_PI, rel=1e-14)
    assert riesz_asymptotic_constant(0.5) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-14)
    for a in (0.5, 0.75, 1.25):
        n = 10_000
        ratio = riesz_potential(a, n) * n ** (2 - 2 * a) / riesz_asymptotic_constant(a)
        assert abs(ratio - 1) <= 0.02


def test_mellin_examples():
    chk = mellin_identity_residual(1, 1.25, 5, TruncationPolicy(n_max=1000))
    assert chk.bracketed and chk.relative_residual < 1e-12
    chk = mellin_identity_adaptive(0.5, 1.0, 3)
    assert chk.bracketed and chk.relative_residual <= 1e-3


def test_mellin_honest_rejection():
    with pytest.raises(PolicyRejected):
        mellin_identity_residual(0.5, 1.0, 3, TruncationPolicy(n_max=10, tail_tol=1e-6))


def test_mellin_domain():
    with pytest.raises(DomainError):
        mellin_identity_residual(0.5, 1.6, 3)
