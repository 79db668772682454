import math

import mpmath as mp
import numpy as np
import pytest

from frachardy.errors import DomainError, PolicyRejected
from frachardy.kernel import (
    FracExponent,
    KernelTable,
    LatticeFunction,
    TruncationPolicy,
    apply_operator,
    apply_operator_tabulated,
    decay_prefactor,
    kernel_block,
    kernel_entry,
    kernel_entry_binomial,
    kernel_entry_oracle,
    kernel_section,
    kernel_sign_scan,
    potential_oracle,
    potential_term,
    quadratic_form,
)

K11_HALF = 64 / (15 * math.pi)


def test_frac_exponent_range():
    assert FracExponent(1.0).graph_representable
    assert not FracExponent(1.25).graph_representable
    for bad in (0.0, 1.5, -0.2):
        with pytest.raises(DomainError):
            FracExponent(bad)


def test_lattice_function_zero_outside():
    f = LatticeFunction(3, [1.0, 2.0])
    assert f(2) == 0.0 and f(3) == 1.0 and f(4) == 2.0 and f(5) == 0.0
    assert f.support_end == 4
    with pytest.raises(DomainError):
        LatticeFunction(0, [1.0])


def test_sigma_one_entries():
    assert kernel_entry(1, 1, 1) == pytest.approx(2, abs=1e-14)
    assert kernel_entry(1, 1, 2) == pytest.approx(-1, abs=1e-14)
    assert kernel_entry(1, 2, 5) == 0.0


def test_half_entries():
    assert kernel_entry(0.5, 1, 1) == pytest.approx(K11_HALF, rel=1e-14)
    assert kernel_entry(0.5, 3, 1) == kernel_entry(0.5, 1, 3)


def test_entry_against_mpmath_spectral_integral():
    for s, m, n in [(0.3, 2, 7), (0.75, 4, 9), (0.5, 10, 10), (1.2, 3, 6)]:
        f = lambda t: (2 * mp.sin(t / 2) ** 2) ** s * mp.sin(m * t) * mp.sin(n * t)
        ref = 2 ** (s + 1) / mp.pi * mp.quad(f, mp.linspace(0, mp.pi, 8))
        assert kernel_entry(s, m, n) == pytest.approx(float(ref), abs=1e-13)


def test_oracle_examples():
    assert kernel_entry_oracle(1, 1, 1, 1e-10) == pytest.approx(2, abs=1e-10)
    assert kernel_entry_oracle(0.5, 1, 1, 1e-9) == pytest.approx(K11_HALF, abs=1e-9)
    assert kernel_entry_oracle(0.75, 4, 9, 1e-9) == pytest.approx(kernel_entry(0.75, 4, 9), abs=1e-9)


def test_binomial_route_agrees_at_small_indices():
    for s in (0.3, 0.5, 0.75, 1.25):
        for m in range(1, 12):
            for n in range(1, 12):
                assert kernel_entry_binomial(s, m, n) == pytest.approx(kernel_entry(s, m, n), abs=1e-12)


def test_symmetry_exact():
    rng = np.random.default_rng(1)
    for _ in range(200):
        s = rng.uniform(0.05, 1.45)
        m, n = rng.integers(1, 500, 2)
        assert kernel_entry(s, int(m), int(n)) == kernel_entry(s, int(n), int(m))


def test_section_matches_block():
    idx = np.arange(1, 60)
    for s in (0.3, 1.25):
        A = kernel_section(s, 59)
        B = kernel_block(s, idx[:, None], idx[None, :])
        assert np.array_equal(A, A.T)
        assert np.max(np.abs(A - B)) <= 1e-15


def test_section_examples():
    assert np.allclose(kernel_section(1, 3), [[2, -1, 0], [-1, 2, -1], [0, -1, 2]], atol=1e-14)
    A = kernel_section(0.5, 2)
    assert A[0, 0] == pytest.approx(K11_HALF, rel=1e-14)
    assert A[0, 1] == A[1, 0] == pytest.approx(kernel_entry(0.5, 1, 2), rel=1e-14)
    assert kernel_section(0.7, 1).shape == (1, 1)


def test_section_cap():
    with pytest.raises(DomainError):
        kernel_section(0.5, 9000)


def test_kernel_table_bounds():
    t = KernelTable(0.5, 10)
    with pytest.raises(DomainError):
        t.block(11, 1)


def test_potential_examples():
    assert potential_term(1, 1) == pytest.approx(1, abs=1e-14)
    assert potential_term(1, 2) == 0.0
    assert potential_term(0.5, 1) == pytest.approx(8 / (3 * math.pi), rel=1e-14)


def test_potential_half_decays_like_inverse_n():
    n = np.array([1e3, 1e4, 1e5])
    r = potential_term(0.5, n.astype(int)) * n
    assert abs(r[2] / r[1] - 1) < abs(r[1] / r[0] - 1) < 1e-2


def test_potential_nonnegative():
    for s in (0.1, 0.5, 0.9, 1.0):
        assert np.all(potential_term(s, np.arange(1, 2000)) >= 0)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75, 1.0])
def test_potential_oracle_brackets_closed_form(s):
    policy = TruncationPolicy(n_max=200_000, tail_tol=1.0)
    for n in range(1, 21):
        row = potential_oracle(s, n, policy)
        assert row.contains(potential_term(s, n))


def test_potential_oracle_rejects_small_budget():
    with pytest.raises(PolicyRejected):
        potential_oracle(0.25, 3, TruncationPolicy(n_max=100, tail_tol=1e-6))


def test_apply_operator_examples():
    g = apply_operator(1, LatticeFunction.delta(1), range(1, 5))
    assert np.allclose(g.values, [2, -1, 0, 0], atol=1e-14)
    g = apply_operator(1, LatticeFunction(1, [1.0, 1.0]), range(1, 4))
    assert np.allclose(g.values, [1, 1, -1], atol=1e-14)
    g = apply_operator(0.5, LatticeFunction.delta(1), range(1, 4))
    assert g.values[0] == pytest.approx(K11_HALF, rel=1e-14)
    assert g.values[2] == pytest.approx(kernel_entry(0.5, 1, 3), rel=1e-14)


def test_apply_operator_tabulated_delta():
    g = np.zeros(10)
    g[0] = 1.0
    out = apply_operator_tabulated(1, g, 1, 0.0)
    assert out.value == pytest.approx(2.0, abs=1e-14)
    assert out.width < 1e-12


def test_apply_operator_tabulated_rejects_non_summable():
    g = np.arange(1, 1001, dtype=float) ** 1.5
    with pytest.raises(PolicyRejected):
        apply_operator_tabulated(0.5, g, 3, 1.5)


def test_quadratic_form_examples():
    assert quadratic_form(1, LatticeFunction.delta(1)).value == pytest.approx(2, abs=1e-13)
    assert quadratic_form(1, LatticeFunction(1, [1.0, 1.0])).value == pytest.approx(2, abs=1e-13)
    q = quadratic_form(0.5, LatticeFunction.delta(1))
    assert q.direct == pytest.approx(K11_HALF, rel=1e-14)
    assert q.value + q.tail_lo <= K11_HALF <= q.value + q.tail_hi


@pytest.mark.parametrize("s", [0.3, 0.5, 0.75, 1.0])
def test_quadratic_form_paths_and_positivity(s):
    rng = np.random.default_rng(int(s * 100))
    for _ in range(25):
        f = LatticeFunction(int(rng.integers(1, 31)), rng.uniform(-1, 1, int(rng.integers(1, 31))))
        q = quadratic_form(s, f)
        assert q.value + q.tail_lo <= q.direct <= q.value + q.tail_hi
        assert q.direct >= 0


def test_sign_scan():
    for s in (0.25, 0.5, 1.0):
        scan = kernel_sign_scan(s, 200)
        assert scan.all_offdiag_nonpositive and scan.witness is None
    scan = kernel_sign_scan(1.25, 200)
    assert not scan.all_offdiag_nonpositive
    m, n, v = scan.witness
    assert v > 0 and kernel_entry(1.25, m, n) == v


def test_sign_structure_above_one():
    # first off-diagonal stays negative; positive entries appear at distance >= 2
    s = 1.25
    A = kernel_section(s, 100)
    assert np.all(np.diag(A, 1) < 0)
    assert np.any(np.diag(A, 2) > 0)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.75, 1.25])
def test_decay_bound(s):
    # |K[m, n]| |m - n|**(2 s + 1) stays bounded, independent of the row
    bounds = [decay_prefactor(s, n) for n in (1, 10, 100)]
    assert max(bounds) < 10 * min(bounds)
    assert max(bounds) < 5.0
