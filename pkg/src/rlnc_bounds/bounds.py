"""Closed-form bounds on the decoding-failure probability.

A destination fails to decode when the received coding matrix has rank
below the number of sources.  This module evaluates every analytical
quantity attached to that event for an (N sources, M relays, F_q,
eps_sr, eps_rd) network:

* ``row_zero_sum_prob``      -- probability that a coding row restricted to
  ``weight`` positions sums to zero,
* ``expected_null_vectors``  -- expected number of projective nonzero null
  vectors of the matrix when every relay delivers,
* ``column_dependence_bound``-- column-by-column independence-failure bound
  built from the largest/smallest single-symbol probability,
* ``zero_column_prob``       -- probability that some source column is
  all-zero among the delivered rows,
* ``ub_old`` / ``lb_old``    -- the classic bounds,
* ``ub_new`` / ``lb_new``    -- their sharpened versions, which mix a
  per-delivered-count minimum (resp. maximum) of the quantities above
  under the binomial delivery distribution.

Every series is evaluated term-by-term as exp(sum of logs) so that huge
binomial weights and vanishing powers combine without overflow; all terms
are nonnegative, so plain accumulation is cancellation-free and double
precision holds ~1e-12 relative error.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from .fields import _prime_power

_EXP_MAX = 709.0  # beyond this, exp() saturates to the largest double


def _exp(x: float) -> float:
    return math.exp(x) if x < _EXP_MAX else sys.float_info.max


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


@dataclass(frozen=True)
class NetworkParams:
    """One network instance: N sources, M relays, field order, erasure rates."""

    n_sources: int
    n_relays: int
    q: int
    eps_sr: float
    eps_rd: float

    def __post_init__(self):
        if self.n_sources < 1:
            raise ValueError("n_sources must be >= 1")
        if self.n_relays < 1:
            raise ValueError("n_relays must be >= 1")
        if _prime_power(self.q) is None:
            raise ValueError(f"field order must be a prime power, got {self.q}")
        for name in ("eps_sr", "eps_rd"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


def _row_zero_sum_raw(params: NetworkParams, weight: int) -> float:
    qinv = 1.0 / params.q
    base = 1.0 - (1.0 - params.eps_sr) / (1.0 - qinv)
    # The base may be negative (e.g. -1 at eps_sr=0, q=2), so the power is
    # taken in linear domain before combining.
    return qinv + (1.0 - qinv) * base**weight


def row_zero_sum_prob(params: NetworkParams, weight: int) -> float:
    """Probability that ``weight`` coding coefficients sum to zero.

    Clamped into [0, 1]; the raw value can stray by rounding only.  For
    weight 1 the algebra collapses to eps_sr, which is returned exactly.
    """
    if not 1 <= weight <= params.n_sources:
        raise ValueError(f"weight must lie in [1, {params.n_sources}]")
    if weight == 1:
        return params.eps_sr
    return min(1.0, max(0.0, _row_zero_sum_raw(params, weight)))


def dependence_prob(params: NetworkParams, weight: int, rows: int) -> float:
    """Probability that ``rows`` independent coding rows all cancel a fixed
    weight-``weight`` combination; 1 for rows = 0 (empty conjunction)."""
    if rows < 0:
        raise ValueError("rows must be >= 0")
    return row_zero_sum_prob(params, weight) ** rows


def _gammas(params: NetworkParams) -> list[float]:
    return [row_zero_sum_prob(params, w) for w in range(1, params.n_sources + 1)]


def _null_vector_sum(params: NetworkParams, rows: int, gammas: list[float]) -> float:
    n, q = params.n_sources, params.q
    lq1 = math.log(q - 1.0) if q > 2 else 0.0
    total = 0.0
    for w in range(1, n + 1):
        g = gammas[w - 1]
        if g == 0.0:
            if rows > 0:
                continue  # 0^rows vanishes; ln(0) is dropped, not evaluated
            powlog = 0.0  # 0^0 = 1
        else:
            powlog = rows * math.log(g)
        total += _exp(_log_comb(n, w) + (w - 1) * lq1 + powlog)
    return total


def expected_null_vectors(params: NetworkParams, rows: int) -> float:
    """Expected count of projective nonzero null vectors of a ``rows``-row
    coding matrix with no relay-side erasures.  May exceed 1; it is at
    least 1 whenever rows < N (rank deficiency is then certain)."""
    if rows < 0:
        raise ValueError("rows must be >= 0")
    return _null_vector_sum(params, rows, _gammas(params))


def ub_old(params: NetworkParams) -> float:
    """Classic upper bound (raw).

    Folds relay-side erasures into each row term and is reported unclamped:
    the value exceeding 1 in loose regimes is part of its behaviour.  Use
    :func:`ub_old_clamped` for the min(., 1) view.
    """
    n, m, q = params.n_sources, params.n_relays, params.q
    lq1 = math.log(q - 1.0) if q > 2 else 0.0
    total = 0.0
    for w in range(1, n + 1):
        v = params.eps_rd + (1.0 - params.eps_rd) * row_zero_sum_prob(params, w)
        if v == 0.0:
            continue  # m >= 1, so the term vanishes
        total += _exp(_log_comb(n, w) + (w - 1) * lq1 + m * math.log(v))
    return total


def ub_old_clamped(params: NetworkParams) -> float:
    return min(1.0, ub_old(params))


def _delivery_pmf(m: int, eps_rd: float) -> list[float]:
    """Binomial(m, 1 - eps_rd) over the number of delivered rows."""
    if eps_rd == 0.0:
        return [0.0] * m + [1.0]
    if eps_rd == 1.0:
        return [1.0] + [0.0] * m
    lp, lq = math.log1p(-eps_rd), math.log(eps_rd)
    return [_exp(_log_comb(m, r) + r * lp + (m - r) * lq) for r in range(m + 1)]


def ub_old_binomial_form(params: NetworkParams) -> float:
    """The classic upper bound re-grouped by delivered-row count.

    Exists to property-test the binomial-theorem identity with
    :func:`ub_old`; both agree to ~1e-9 relative.
    """
    weights = _delivery_pmf(params.n_relays, params.eps_rd)
    gammas = _gammas(params)
    return sum(wt * _null_vector_sum(params, r, gammas)
               for r, wt in enumerate(weights) if wt > 0.0)


def lb_old(params: NetworkParams) -> float:
    """Classic lower bound: driven by sources whose column dies end-to-end.

    Both the binomial-sum form and its closed form 1 - (1 - e^M)^N are
    evaluated and cross-checked before the closed form is returned.
    """
    n, m = params.n_sources, params.n_relays
    eff = params.eps_sr + params.eps_rd - params.eps_sr * params.eps_rd
    a = eff**m
    if a >= 1.0:
        closed = 1.0
        sumform = 1.0
    elif a == 0.0:
        closed = 0.0
        sumform = 0.0
    else:
        closed = -math.expm1(n * math.log1p(-a))
        la, l1a = math.log(a), math.log1p(-a)
        sumform = sum(_exp(_log_comb(n, k) + k * la + (n - k) * l1a)
                      for k in range(1, n + 1))
    if abs(closed - sumform) > 1e-12:
        raise AssertionError(f"lower-bound forms disagree: {closed} vs {sumform}")
    return closed


def column_dependence_bound(params: NetworkParams, rows: int, which: str) -> float:
    """Column-by-column bound on rank deficiency with ``rows`` delivered rows.

    ``which='max'`` uses the largest single-symbol probability (an upper
    bound on failure), ``which='min'`` the smallest (a lower bound).
    Exactly 1 whenever rows < N, where a zero-exponent factor kills the
    product; 0^0 = 1 throughout.
    """
    if rows < 0:
        raise ValueError("rows must be >= 0")
    if which not in ("max", "min"):
        raise ValueError("which must be 'max' or 'min'")
    n = params.n_sources
    spread = (1.0 - params.eps_sr) / (params.q - 1)
    beta = max(params.eps_sr, spread) if which == "max" else min(params.eps_sr, spread)
    if rows < n:
        return 1.0
    logprod = 0.0
    for i in range(1, n + 1):
        factor = beta ** (rows - i + 1)
        if factor >= 1.0:
            return 1.0
        logprod += math.log1p(-factor)
    return -math.expm1(logprod)


def zero_column_prob(params: NetworkParams, rows: int) -> float:
    """Probability that at least one source column is all-zero among
    ``rows`` delivered rows; equals 1 - (1 - eps_sr^rows)^N."""
    if rows < 0:
        raise ValueError("rows must be >= 0")
    a = params.eps_sr**rows  # 0^0 = 1
    if a >= 1.0:
        return 1.0
    return -math.expm1(params.n_sources * math.log1p(-a))


def _mix_over_deliveries(params: NetworkParams, per_row_value) -> float:
    weights = _delivery_pmf(params.n_relays, params.eps_rd)
    total = sum(wt * per_row_value(r) for r, wt in enumerate(weights) if wt > 0.0)
    return min(1.0, max(0.0, total))


def ub_new(params: NetworkParams) -> float:
    """Sharpened upper bound.

    For each possible delivered-row count the smaller of the expected-count
    and column-dependence bounds is taken (capped at 1, since each term
    bounds a probability) before the binomial mixing -- a per-count
    minimum, not a minimum of whole distributions.
    """
    gammas = _gammas(params)

    def term(r: int) -> float:
        return min(column_dependence_bound(params, r, "max"),
                   _null_vector_sum(params, r, gammas), 1.0)

    return _mix_over_deliveries(params, term)


def lb_new(params: NetworkParams) -> float:
    """Sharpened lower bound: mirrors :func:`ub_new` with a per-count
    maximum of the column-dependence and all-zero-column bounds."""

    def term(r: int) -> float:
        return max(column_dependence_bound(params, r, "min"),
                   zero_column_prob(params, r))

    return _mix_over_deliveries(params, term)


@dataclass(frozen=True)
class PerDeliveryTables:
    """Per-delivered-count intermediates, index r = 0..M, for diagnostics."""

    delivery_pmf: tuple[float, ...]
    expected_null_vectors: tuple[float, ...]
    dependence_ub: tuple[float, ...]
    dependence_lb: tuple[float, ...]
    zero_column_prob: tuple[float, ...]


@dataclass(frozen=True)
class BoundSet:
    """All analytical quantities for one network instance.

    ``mu0`` is the expected failure count with every relay delivering and
    may exceed 1; the four bound fields are probabilities.  ``ub_old_raw``
    is deliberately unclamped.
    """

    params: NetworkParams
    mu0: float
    lb_old: float
    lb_new: float
    ub_new: float
    ub_old_clamped: float
    ub_old_raw: float
    tables: PerDeliveryTables | None = None

    def __post_init__(self):
        for name in ("lb_old", "lb_new", "ub_new", "ub_old_clamped"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.mu0 < 0.0:
            raise ValueError(f"mu0 must be nonnegative, got {self.mu0}")
        if self.lb_new > self.ub_new + 1e-12:
            raise ValueError(f"bound inversion: lb_new={self.lb_new} > ub_new={self.ub_new}")
        if self.ub_new > min(1.0, self.ub_old_raw) + 1e-12:
            raise ValueError(f"ub_new={self.ub_new} exceeds the classic bound {self.ub_old_raw}")


def evaluate_all(params: NetworkParams, keep_tables: bool = False) -> BoundSet:
    """Evaluate every bound, sharing the per-weight and per-count tables."""
    m = params.n_relays
    gammas = _gammas(params)
    pmf = _delivery_pmf(m, params.eps_rd)
    nulls = [_null_vector_sum(params, r, gammas) for r in range(m + 1)]
    dep_ub = [column_dependence_bound(params, r, "max") for r in range(m + 1)]
    dep_lb = [column_dependence_bound(params, r, "min") for r in range(m + 1)]
    zerocol = [zero_column_prob(params, r) for r in range(m + 1)]

    clamp = lambda x: min(1.0, max(0.0, x))
    up = clamp(sum(wt * min(dep_ub[r], nulls[r], 1.0) for r, wt in enumerate(pmf)))
    low = clamp(sum(wt * max(dep_lb[r], zerocol[r]) for r, wt in enumerate(pmf)))
    raw = ub_old(params)

    tables = None
    if keep_tables:
        tables = PerDeliveryTables(tuple(pmf), tuple(nulls), tuple(dep_ub),
                                   tuple(dep_lb), tuple(zerocol))
    return BoundSet(params=params, mu0=nulls[m], lb_old=lb_old(params), lb_new=low,
                    ub_new=up, ub_old_clamped=min(1.0, raw), ub_old_raw=raw,
                    tables=tables)
