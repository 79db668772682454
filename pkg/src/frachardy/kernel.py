"""The fractional Dirichlet Laplacian on {1, 2, ...} as an explicit kernel.

Entries are

    K[m, n] = (-1)**(m + n) * (C(2s, s + m - n) - C(2s, s + m + n))

with ``C`` the real binomial coefficient. For ``|k| >= 2`` the reflection
formula turns ``C(2s, s + k)`` into ``-(-1)**k * c_s * g(k)`` with
``c_s = Gamma(2s + 1) sin(pi s) / pi`` and ``g(k) = Gamma(k - s) / Gamma(k + s + 1)``,
so far-off-diagonal entries reduce to ``-c_s * (g(|m - n|) - g(m + n))``, a
difference of two positive, smoothly decaying numbers. Only the diagonal and
the first off-diagonal go through :func:`binomial_real`.

Indices are 1-based throughout; the Dirichlet condition ``f(0) = 0`` is implicit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, InternalInconsistency, PolicyRejected
from .special_fn import (
    binomial_real,
    gamma_ratio,
    gamma_ratio_shifted,
    quad_adaptive,
    rgamma,
    sinpi,
)

SECTION_CAP = 8192
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class FracExponent:
    """Order ``sigma`` of the fractional Laplacian, ``0 < sigma < 3/2``."""

    sigma: float

    def __post_init__(self):
        s = float(self.sigma)
        if not (0.0 < s < 1.5):
            raise DomainError(f"sigma must lie in (0, 3/2), got {self.sigma!r}")
        object.__setattr__(self, "sigma", s)

    @property
    def graph_representable(self) -> bool:
        """Off-diagonal entries are nonpositive exactly when ``sigma <= 1``."""
        return self.sigma <= 1.0

    def __float__(self) -> float:
        return self.sigma


def as_sigma(sigma) -> float:
    """Validate ``sigma`` (float or :class:`FracExponent`) and return it as a float."""
    if isinstance(sigma, FracExponent):
        return sigma.sigma
    return FracExponent(sigma).sigma


@dataclass(frozen=True)
class LatticeFunction:
    """Finitely supported sequence on {1, 2, ...}.

    ``values[i]`` is the value at ``support_start + i``; everything outside the
    stored window, and the site 0, is zero.
    """

    support_start: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if int(self.support_start) != self.support_start or self.support_start < 1:
            raise DomainError("support_start must be a positive integer")
        vals = np.array(self.values, dtype=float).ravel()
        vals.setflags(write=False)
        object.__setattr__(self, "support_start", int(self.support_start))
        object.__setattr__(self, "values", vals)

    @classmethod
    def delta(cls, n: int) -> "LatticeFunction":
        return cls(n, [1.0])

    @property
    def support_end(self) -> int:
        """Last stored index (inclusive)."""
        return self.support_start + self.values.size - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.support_start, self.support_end + 1)

    def __call__(self, n):
        n = np.asarray(n)
        idx = n - self.support_start
        inside = (idx >= 0) & (idx < self.values.size)
        out = np.zeros(n.shape)
        out[inside] = self.values[idx[inside]]
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class TruncationPolicy:
    """Cut-off for infinite row sums and the tolerance its tail must meet.

    Tails are bounded by ``c * sum_{m > n_max} |m - n|**(-2 sigma - 1) * m**e``
    where ``e`` is the growth exponent of the summed sequence and ``c`` is
    twice the largest prefactor observed on ``[n_max/2, n_max]``. A request
    whose bound exceeds ``tail_tol``, or whose exponents leave less than
    ``tail_exponent_margin`` of summability, is rejected.
    """

    n_max: int = 100_000
    tail_tol: float = 1e-6
    tail_exponent_margin: float = 0.05

    def __post_init__(self):
        if self.n_max < 1:
            raise DomainError("n_max must be positive")
        if self.tail_tol <= 0:
            raise DomainError("tail_tol must be positive")


@dataclass(frozen=True)
class TailSum:
    """Partial sum together with an interval for the neglected tail.

    The exact infinite sum lies in ``[value + tail_lo, value + tail_hi]`` up
    to the rounding allowance already folded into the interval.
    """

    value: float
    tail_lo: float
    tail_hi: float
    n_max: int

    @property
    def lower(self) -> float:
        return self.value + self.tail_lo

    @property
    def upper(self) -> float:
        return self.value + self.tail_hi

    @property
    def width(self) -> float:
        return self.tail_hi - self.tail_lo

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


# --- entries ---------------------------------------------------------------


def _c_sigma(sigma: float) -> float:
    return math.gamma(2.0 * sigma + 1.0) * sinpi(sigma) / math.pi


def _g(sigma: float, k):
    """``Gamma(k - sigma) / Gamma(k + sigma + 1)`` for integers ``k >= 2``."""
    return gamma_ratio_shifted(np.asarray(k, dtype=float), -sigma, sigma + 1.0)


def _near_diagonal(sigma: float) -> tuple[float, float]:
    """``C(2s, s)`` and ``-C(2s, s + 1)`` (the latter carries the (-1)**d sign)."""
    return binomial_real(2.0 * sigma, sigma), -binomial_real(2.0 * sigma, sigma + 1.0)


def kernel_block(sigma, m, n) -> np.ndarray:
    """Kernel entries ``K[m, n]`` for broadcastable integer arrays ``m``, ``n``."""
    s = as_sigma(sigma)
    m = np.asarray(m, dtype=np.int64)
    n = np.asarray(n, dtype=np.int64)
    if np.any(m < 1) or np.any(n < 1):
        raise DomainError("kernel indices start at 1")
    m, n = np.broadcast_arrays(m, n)
    d = np.abs(m - n)
    t = m + n
    c = _c_sigma(s)
    out = np.empty(d.shape)
    if c == 0.0:
        out[...] = 0.0
    else:
        out[...] = c * _g(s, t)
        far = d >= 2
        if np.any(far):
            out[far] -= c * _g(s, d[far])
    diag, off1 = _near_diagonal(s)
    out[d == 0] += diag
    out[d == 1] += off1
    return out


def kernel_entry(sigma, m: int, n: int) -> float:
    """Single kernel entry ``K[m, n]``; symmetric by construction."""
    if m < 1 or n < 1:
        raise DomainError("kernel indices start at 1")
    return float(kernel_block(sigma, min(m, n), max(m, n)))


def kernel_entry_binomial(sigma, m: int, n: int) -> float:
    """Kernel entry straight from the two binomial coefficients.

    Kept as an independent route for testing the reflected evaluation used by
    :func:`kernel_entry`; accuracy degrades for large ``m + n``.
    """
    s = as_sigma(sigma)
    sign = -1.0 if (m + n) % 2 else 1.0
    return sign * (binomial_real(2 * s, s + m - n) - binomial_real(2 * s, s + m + n))


def kernel_entry_oracle(sigma, m: int, n: int, tol: float = 1e-10) -> float:
    """Kernel entry by quadrature of its spectral integral.

    With ``x = cos t`` the defining integral becomes
    ``(2**(s+1) / pi) * int_0^pi (1 - cos t)**s sin(m t) sin(n t) dt``;
    the integrand behaves like ``t**(2s + 2)`` at ``t = 0``.
    """
    s = as_sigma(sigma)
    if tol <= 0:
        raise DomainError("tol must be positive")
    pref = 2.0 ** (s + 1.0) / math.pi

    def f(t):
        return (2.0 * np.sin(0.5 * t) ** 2) ** s * np.sin(m * t) * np.sin(n * t)

    panels = max(4, (m + n) // 2)
    val, _ = quad_adaptive(f, 0.0, math.pi, 2.0 * s + 2.0, tol / pref, initial_panels=panels)
    return pref * val


# --- potential term --------------------------------------------------------


def potential_term(sigma, n):
    """Row sum ``R[n] = sum_m K[m, n]`` in closed form.

    For noninteger ``sigma`` this is
    ``(2/pi) Gamma(2s) sin(pi s) n Gamma(n - s) / Gamma(n + s + 1)``; at
    ``sigma = 1`` the equivalent form
    ``-2 (-1)**n n Gamma(2s) / (Gamma(1 + s - n) Gamma(1 + s + n))`` is used so
    that the reciprocal-Gamma poles give ``R = delta_1`` exactly.
    """
    s = as_sigma(sigma)
    n_arr = np.atleast_1d(np.asarray(n, dtype=np.int64))
    if np.any(n_arr < 1):
        raise DomainError("potential_term needs n >= 1")
    nf = n_arr.astype(float)
    if s == math.floor(s):
        sign = np.where(n_arr % 2 == 0, 1.0, -1.0)
        out = -2.0 * sign * nf * math.gamma(2 * s) * rgamma(1.0 + s - nf) * rgamma(1.0 + s + nf)
    else:
        pref = 2.0 / math.pi * math.gamma(2.0 * s) * sinpi(s)
        ratio = np.where(
            nf - s >= 10.0,
            gamma_ratio_shifted(nf, -s, s + 1.0),
            gamma_ratio(nf - s, nf + s + 1.0),
        )
        out = pref * nf * ratio
    out = out + 0.0  # no negative zeros
    return out if np.ndim(n) else float(out[0])


# --- tails -----------------------------------------------------------------


def tail_bounds(
    sigma: float,
    rows: np.ndarray,
    m: np.ndarray,
    terms: np.ndarray,
    growth_exponent: float,
    policy: TruncationPolicy,
) -> np.ndarray:
    """Bounds on ``|sum_{m > n_max} term(m)|`` for several rows at once.

    ``terms[i]`` is row ``rows[i]`` evaluated at the increasing indices ``m``
    ending at ``n_max``. Each row is modelled as
    ``|term(m)| <= c |m - n|**(-2 sigma - 1) m**e`` with ``c`` twice the
    largest ratio seen on ``[n_max/2, n_max]``.
    """
    rows = np.atleast_1d(np.asarray(rows, dtype=np.int64))
    terms = np.atleast_2d(terms)
    n_max = int(m[-1])
    p = 2.0 * sigma + 1.0
    e = growth_exponent
    if p - e - 1.0 < policy.tail_exponent_margin:
        raise PolicyRejected(
            f"row is not summable with margin: exponent {e - p:.3g} vs -1 (margin {policy.tail_exponent_margin})"
        )
    if n_max <= 2 * int(rows.max()):
        raise PolicyRejected(f"n_max={n_max} must exceed twice the row index n={int(rows.max())}")
    sel = m >= n_max // 2
    mm = m[sel].astype(float)
    nn = rows[:, None].astype(float)
    model = np.abs(mm[None, :] - nn) ** (-p) * mm[None, :] ** e
    c = 2.0 * np.max(np.abs(terms[:, sel]) / model, axis=1)
    gap = n_max - rows.astype(float)
    factor = np.maximum(1.0, (n_max / gap) ** e)
    bound = c * factor * gap ** (e - p + 1.0) / (p - e - 1.0)
    worst = float(np.max(bound))
    if worst > policy.tail_tol:
        raise PolicyRejected(
            f"tail bound {worst:.3g} at n_max={n_max} exceeds tail_tol={policy.tail_tol:.3g}"
        )
    return bound


def tail_interval(
    sigma: float,
    n: int,
    m: np.ndarray,
    terms: np.ndarray,
    growth_exponent: float,
    policy: TruncationPolicy,
    nonpositive: bool = False,
) -> tuple[float, float]:
    """Interval for ``sum_{m > n_max}`` of row ``n`` whose head is ``terms`` at ``m``.

    See :func:`tail_bounds`; with ``nonpositive`` the interval is one-sided.
    """
    bound = float(tail_bounds(sigma, [n], m, terms, growth_exponent, policy)[0])
    return (-bound, 0.0) if nonpositive else (-bound, bound)


def _rounding_allowance(terms: np.ndarray) -> float:
    return 64.0 * _EPS * float(np.sum(np.abs(terms)))


def potential_oracle(sigma, n: int, policy: TruncationPolicy | None = None) -> TailSum:
    """Row sum of the kernel up to ``policy.n_max`` with a tail interval.

    Brackets :func:`potential_term` when the policy admits the row.
    """
    s = as_sigma(sigma)
    policy = policy or TruncationPolicy()
    m = np.arange(1, policy.n_max + 1)
    row = kernel_block(s, m, n)
    head = math.fsum(row)
    lo, hi = tail_interval(s, n, m, row, 0.0, policy, nonpositive=s <= 1.0)
    r = _rounding_allowance(row)
    return TailSum(head, lo - r, hi + r, policy.n_max)


# --- operator application --------------------------------------------------


def apply_operator(sigma, f: LatticeFunction, window: Sequence[int] | range) -> LatticeFunction:
    """``(-Delta)^sigma f`` on ``window`` for finitely supported ``f`` (exact finite sums)."""
    s = as_sigma(sigma)
    win = np.asarray(list(window), dtype=np.int64)
    if win.size == 0:
        raise DomainError("window is empty")
    if np.any(np.diff(win) != 1):
        raise DomainError("window must be a contiguous increasing index range")
    block = kernel_block(s, f.indices[None, :], win[:, None])
    vals = np.array([math.fsum(row) for row in block * f.values[None, :]])
    return LatticeFunction(int(win[0]), vals)


def apply_operator_tabulated(
    sigma,
    g: np.ndarray,
    n: int,
    tail_exponent: float,
    policy: TruncationPolicy | None = None,
) -> TailSum:
    """``sum_m K[m, n] g(m)`` for ``g`` tabulated on ``[1, len(g)]``.

    ``g`` must be positive beyond the table with power-law growth
    ``m**tail_exponent``; the neglected tail is bounded accordingly.
    ``policy.n_max`` is ignored in favour of the table length.
    """
    s = as_sigma(sigma)
    g = np.asarray(g, dtype=float)
    policy = policy or TruncationPolicy(n_max=g.size)
    m = np.arange(1, g.size + 1)
    terms = kernel_block(s, m, n) * g
    head = math.fsum(terms)
    if s == 1.0 and g.size > n + 1:
        lo = hi = 0.0  # tridiagonal: nothing beyond n + 1
    else:
        lo, hi = tail_interval(
            s, n, m, terms, tail_exponent, policy, nonpositive=s <= 1.0 and bool(np.all(g > 0))
        )
    r = _rounding_allowance(terms)
    return TailSum(head, lo - r, hi + r, g.size)


# --- quadratic form --------------------------------------------------------


@dataclass(frozen=True)
class QuadraticForm:
    """Both evaluations of ``<f, (-Delta)^sigma f>``.

    ``value`` is the graph-form evaluation truncated at ``n_max``; the
    neglected part lies in ``[tail_lo, tail_hi]``. ``direct`` is the exact
    finite double sum.
    """

    value: float
    direct: float
    tail_lo: float
    tail_hi: float
    n_max: int

    @property
    def tail(self) -> float:
        return max(-self.tail_lo, self.tail_hi)


def _graph_form(s: float, f: LatticeFunction, n_max: int, policy: TruncationPolicy):
    idx = f.indices
    vals = f.values
    if n_max <= idx[-1]:
        raise PolicyRejected("n_max must lie beyond the support")
    # pairs inside the support
    block = kernel_block(s, idx[:, None], idx[None, :])
    np.fill_diagonal(block, 0.0)
    diff2 = (vals[:, None] - vals[None, :]) ** 2
    inside = 0.5 * math.fsum((-block * diff2).ravel())
    # support against everything else up to n_max
    others = np.concatenate([np.arange(1, idx[0]), np.arange(idx[-1] + 1, n_max + 1)])
    cross_parts = []
    tail_lo = tail_hi = 0.0
    m_tail = np.arange(idx[-1] + 1, n_max + 1)
    for j, n in enumerate(idx):
        fn2 = vals[j] ** 2
        if fn2 == 0.0:
            continue
        row = kernel_block(s, others, n)
        cross_parts.append(-fn2 * math.fsum(row))
        if s == 1.0:
            continue
        tail_row = row[others > idx[-1]]
        lo, hi = tail_interval(
            s, int(n), m_tail, tail_row, 0.0, policy, nonpositive=s <= 1.0
        )
        # the row enters with a minus sign
        tail_lo += -hi * fn2
        tail_hi += -lo * fn2
    potential = math.fsum(potential_term(s, idx) * vals**2)
    return inside + math.fsum(cross_parts) + potential, tail_lo, tail_hi


def quadratic_form(sigma, f: LatticeFunction, policy: TruncationPolicy | None = None) -> QuadraticForm:
    """``<f, (-Delta)^sigma f>`` by the direct double sum and by the graph form.

    The graph form ``(1/2) sum (-K~)(f_m - f_n)**2 + sum R f**2`` has an
    infinite range in one index; it is truncated at ``policy.n_max`` (default
    ``64 * max(support)``) with a tail interval. The two evaluations must
    agree within that interval, otherwise :class:`InternalInconsistency` is
    raised.
    """
    s = as_sigma(sigma)
    idx = f.indices
    if policy is None:
        policy = TruncationPolicy(n_max=64 * int(idx[-1]), tail_tol=1.0)
    block = kernel_block(s, idx[:, None], idx[None, :])
    direct_terms = (f.values[:, None] * block * f.values[None, :]).ravel()
    direct = math.fsum(direct_terms)
    graph, lo, hi = _graph_form(s, f, policy.n_max, policy)
    slack = 1e-12 * max(1.0, float(np.sum(np.abs(direct_terms))))
    if not (graph + lo - slack <= direct <= graph + hi + slack):
        raise InternalInconsistency(
            f"direct form {direct!r} outside graph-form bracket [{graph + lo!r}, {graph + hi!r}]"
        )
    return QuadraticForm(graph, direct, lo - slack, hi + slack, policy.n_max)


# --- sections and sign structure -------------------------------------------


class KernelTable:
    """Kernel entries for indices ``1 <= m, n <= size`` gathered from one table.

    Entries depend on ``|m - n|`` and ``m + n`` only, so a single table of
    ``c_s * g(k)`` for ``k <= 2 size`` serves every row.
    """

    def __init__(self, sigma, size: int):
        s = as_sigma(sigma)
        if size < 1:
            raise DomainError("table size must be positive")
        self.sigma = s
        self.size = int(size)
        self._diag, self._off1 = _near_diagonal(s)
        c = _c_sigma(s)
        self._table = np.zeros(2 * self.size + 1)
        if c != 0.0:
            k = np.arange(2, 2 * self.size + 1)
            self._table[2:] = c * _g(s, k)

    def block(self, m, n) -> np.ndarray:
        """Entries ``K[m, n]`` for broadcastable index arrays within the table."""
        m = np.asarray(m, dtype=np.int64)
        n = np.asarray(n, dtype=np.int64)
        if np.any(m < 1) or np.any(n < 1) or np.any(m > self.size) or np.any(n > self.size):
            raise DomainError(f"indices must lie in [1, {self.size}]")
        d = np.abs(m - n)
        A = self._table[m + n] - np.where(d >= 2, self._table[d], 0.0)
        A[d == 0] += self._diag
        A[d == 1] += self._off1
        return A


def kernel_section(sigma, N: int, *, start: int = 1, allow_large: bool = False) -> np.ndarray:
    """Dense symmetric section ``K[i, j]`` for ``start <= i, j < start + N``."""
    s = as_sigma(sigma)
    if N < 1:
        raise DomainError("section size must be positive")
    if N > SECTION_CAP and not allow_large:
        raise DomainError(f"section size {N} exceeds {SECTION_CAP}; pass allow_large=True")
    idx = np.arange(start, start + N)
    A = KernelTable(s, start + N - 1).block(idx[:, None], idx[None, :])
    return 0.5 * (A + A.T)


@dataclass(frozen=True)
class SignScan:
    all_offdiag_nonpositive: bool
    witness: tuple[int, int, float] | None


def kernel_sign_scan(sigma, N: int) -> SignScan:
    """Check whether every off-diagonal entry of the ``N``-section is ``<= 0``.

    Returns the first positive entry in row-major order over ``m < n`` as a
    witness when one exists.
    """
    if N < 2:
        raise DomainError("sign scan needs N >= 2")
    A = kernel_section(sigma, N)
    iu = np.triu_indices(N, k=1)
    vals = A[iu]
    pos = np.flatnonzero(vals > 0)
    if pos.size == 0:
        return SignScan(True, None)
    k = int(pos[0])
    return SignScan(False, (int(iu[0][k]) + 1, int(iu[1][k]) + 1, float(vals[k])))


def decay_prefactor(sigma, n: int, d_min: int = 2, d_max: int = 500) -> float:
    """``max |K[n + d, n]| * d**(2 sigma + 1)`` over ``d_min <= d <= d_max``."""
    s = as_sigma(sigma)
    d = np.arange(d_min, d_max + 1)
    return float(np.max(np.abs(kernel_block(s, n + d, n)) * d ** (2 * s + 1)))
