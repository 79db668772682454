import math

import numpy as np
import pytest

from frachardy.criticality import (
    EnergyReport,
    energy_functional,
    gsr_residual,
    hardy_constant_estimate,
    null_criticality_increments,
    null_criticality_sum,
    null_energy_curve,
    null_sequence,
    null_sequence_function,
    simplified_energy,
    symmetric_eigen_min,
    tridiagonal_eigen_min,
)
from frachardy.errors import DomainError
from frachardy.hardy_weights import WeightSpec, critical_alpha, hardy_weight, optimal_weight
from frachardy.kernel import LatticeFunction, kernel_entry
from frachardy.riesz import riesz_potential


def cubic_oracle_min(A):
    """Smallest root of the characteristic polynomial from its coefficients."""
    A = np.asarray(A, dtype=float)
    c = [
        -1.0,
        np.trace(A),
        -0.5 * (np.trace(A) ** 2 - np.trace(A @ A)),
        np.linalg.det(A),
    ]
    roots = np.roots(c)
    return float(np.min(roots.real))


def test_null_sequence_examples():
    assert null_sequence(4, 3) == 1.0
    assert null_sequence(4, 8) == pytest.approx(0.5, abs=1e-15)
    assert null_sequence(4, 17) == 0.0
    assert null_sequence(4, 16) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        null_sequence(1, 3)


def test_null_sequence_normalization():
    for k in (2, 3, 8, 100):
        assert null_sequence(k, 1) == 1.0


def test_null_sequence_claim_bound():
    for k in (3, 8, 20):
        n = np.arange(1, 2 * k * k + 1)
        phi = null_sequence(k, n)
        d2 = (phi[:, None] - phi[None, :]) ** 2
        bound = (np.log(n[None, :] / n[:, None]) / math.log(k)) ** 2
        upper = np.triu(np.ones_like(d2, dtype=bool), 1)
        assert np.all(d2[upper] <= bound[upper] + 1e-14)


def test_energy_functional_examples():
    e1 = LatticeFunction.delta(1)
    r = energy_functional(1, lambda n: optimal_weight(1, n), e1)
    assert r.value == pytest.approx(10 / 7, abs=1e-12)
    r = energy_functional(1, lambda n: np.zeros(np.shape(n)), e1)
    assert r.value == pytest.approx(2, abs=1e-13)
    spec = WeightSpec(0.5, 1.0)
    r = energy_functional(0.5, lambda n: hardy_weight(spec, n), e1, method="direct")
    assert r.value == pytest.approx(64 / (15 * math.pi) - 8 / (3 * math.pi), rel=1e-13)
    g = energy_functional(0.5, lambda n: hardy_weight(spec, n), e1)
    assert g.lower <= r.value <= g.upper


def test_energy_report_method_checked():
    with pytest.raises(DomainError):
        EnergyReport(1.0, 0.0, 0.0, "spectral")


def test_simplified_energy_single_pair():
    r = simplified_energy(1, 1.25, LatticeFunction.delta(1))
    assert r.value == pytest.approx(riesz_potential(1.25, 1) * riesz_potential(1.25, 2), rel=1e-13)
    assert r.truncation_tail == 0.0


def test_simplified_energy_null_sequence_positive():
    r = simplified_energy(1, 1.25, null_sequence_function(8))
    assert 0 < r.value < math.inf


def test_gst_identity_examples():
    chk = gsr_residual(1, 1.25, LatticeFunction.delta(1))
    assert chk.residual <= 1e-10
    phi = LatticeFunction(1, riesz_potential(1.25, np.arange(1, 31)))
    assert gsr_residual(1, 1.25, phi).passed


@pytest.mark.parametrize("s,a", [(1.0, 1.25), (0.5, 1.0), (0.75, 1.1), (0.5, 0.9)])
def test_gst_identity_random(s, a):
    rng = np.random.default_rng(2024)
    for _ in range(20):
        phi = LatticeFunction(int(rng.integers(1, 31)), rng.uniform(-1, 1, int(rng.integers(1, 31))))
        chk = gsr_residual(s, a, phi)
        assert chk.passed, (chk.residual, chk.tolerance)
        assert chk.energy.value >= -chk.tolerance


def test_weighted_energy_nonnegative():
    rng = np.random.default_rng(8)
    for s, a in [(1.0, 1.25), (0.5, 1.0), (0.3, 0.6), (1.0, 1.45)]:
        spec = WeightSpec(s, a)
        for _ in range(10):
            phi = LatticeFunction(int(rng.integers(1, 20)), rng.uniform(-1, 1, int(rng.integers(1, 25))))
            r = energy_functional(s, lambda n: hardy_weight(spec, n), phi, method="direct")
            assert r.value >= -1e-12


def test_null_energy_curve_sigma_one():
    curve = null_energy_curve(1.0, 1.25, (8, 16, 32))
    vals = [r.value for _, r in curve]
    assert vals[0] > vals[1] > vals[2] > 0
    qlog = [r.value * math.log(k) for k, r in curve]
    assert max(qlog) <= 2 * qlog[0]


def test_null_energy_curve_subcritical_squared_log():
    curve = null_energy_curve(1.0, 1.15, (8, 16, 32))
    q2 = [r.value * math.log(k) ** 2 for k, r in curve]
    assert max(q2) <= 2 * q2[0]


def test_null_criticality_sum_monotone():
    s1 = null_criticality_sum(0.5, 1.0, 1000)
    s2 = null_criticality_sum(0.5, 1.0, 2000)
    assert s2 > s1 > 0


def test_null_criticality_increments_critical():
    inc = null_criticality_increments(1.0, 1.25, (100, 1000, 10_000))
    assert inc.expected_exponent == pytest.approx(0.0, abs=1e-15)
    d = np.array(inc.increments)
    assert np.all(np.abs(d / d[-1] - 1) < 0.1)


def test_null_criticality_increments_convergent():
    inc = null_criticality_increments(1.0, 1.15, (100, 1000, 10_000))
    for e in inc.observed_exponents:
        assert e == pytest.approx(inc.expected_exponent, rel=0.15)


def test_eigen_min_small_examples():
    assert symmetric_eigen_min(np.diag([1.0, 2.0, 3.0])) == pytest.approx(1.0, abs=1e-14)
    assert symmetric_eigen_min([[2.0, -1.0], [-1.0, 2.0]]) == pytest.approx(1.0, abs=1e-14)
    assert symmetric_eigen_min([[4.5]]) == 4.5


def test_eigen_min_against_cubic_oracle():
    rng = np.random.default_rng(17)
    for _ in range(50):
        B = rng.uniform(-2, 2, (3, 3))
        A = B + B.T
        assert abs(symmetric_eigen_min(A) - cubic_oracle_min(A)) <= 1e-10 * np.linalg.norm(A, 2)


def test_eigen_min_against_numpy():
    rng = np.random.default_rng(4)
    B = rng.standard_normal((120, 120))
    A = B + B.T
    assert abs(symmetric_eigen_min(A) - np.linalg.eigvalsh(A)[0]) <= 1e-10 * np.linalg.norm(A, 2)


def test_eigen_min_rejects_non_symmetric():
    with pytest.raises(DomainError):
        symmetric_eigen_min([[1.0, 2.0], [0.0, 1.0]])


def test_tridiagonal_clustered_spectrum():
    d = np.full(50, 2.0)
    e = np.full(49, -1.0)
    lam, _ = tridiagonal_eigen_min(d, e)
    assert lam == pytest.approx(2 - 2 * math.cos(math.pi / 51), abs=1e-14)


def test_hardy_estimate_small_window():
    est = hardy_constant_estimate(1.0, 3)
    n = np.arange(1, 4, dtype=float)
    T = np.array([[2, -1, 0], [-1, 2, -1], [0, -1, 2]], dtype=float)
    assert est.lambda_min == pytest.approx(cubic_oracle_min(n[:, None] * T * n[None, :]), abs=1e-10)
    assert est.window_len == 3 and est.window_start == 1


def test_hardy_estimate_reproducible():
    a = hardy_constant_estimate(0.5, 200, 10)
    b = hardy_constant_estimate(0.5, 200, 10)
    assert a == b


def test_hardy_estimate_monotone_in_window_length():
    vals = [hardy_constant_estimate(0.5, N, 16).lambda_min for N in (64, 128, 256, 512)]
    assert all(x >= y for x, y in zip(vals, vals[1:]))
    vals = [hardy_constant_estimate(1.0, N).lambda_min for N in (64, 128, 256, 512)]
    assert all(x >= y for x, y in zip(vals, vals[1:]))
    assert vals[-1] >= 0.25


def test_hardy_estimate_domain():
    with pytest.raises(DomainError):
        hardy_constant_estimate(1.2, 10)
    with pytest.raises(DomainError):
        hardy_constant_estimate(0.5, 1)


def test_hardy_estimate_nonnegative():
    for s in (0.25, 0.5, 0.75):
        assert hardy_constant_estimate(s, 256).lambda_min >= 0
