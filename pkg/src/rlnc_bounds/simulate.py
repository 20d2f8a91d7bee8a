"""Seeded Monte Carlo estimation of the decoding-failure probability, plus
an exact exhaustive oracle for tiny instances.

Reproducibility scheme: every trial owns a fixed, disjoint window of a
Philox counter-based stream keyed by the master seed.  Trial t reads its
uniforms from counter blocks [t*S, (t+1)*S), where S depends only on the
network dimensions, so the estimate is identical no matter how trials are
batched or distributed across workers.  Within a trial the draw order is:
M*N coefficient uniforms (row-major), then M delivery uniforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .bounds import NetworkParams
from .fields import FieldSpec, entry_dtype, make_field
from .linalg import CodingMatrix, _eliminate, rank_batch

_MASK64 = (1 << 64) - 1

STATE_SPACE_LIMIT = 10**8


class StateSpaceExceeded(ValueError):
    """The exact oracle refuses instances whose configuration space is huge."""


@dataclass(frozen=True)
class SimEstimate:
    """Monte Carlo failure-rate estimate with a 99.99% (+/-4 sigma) interval."""

    params: NetworkParams
    trials: int
    failures: int
    estimate: float
    ci_low: float
    ci_high: float
    seed: int


@dataclass(frozen=True)
class ExactResult:
    """Exact failure probability from total enumeration of the model."""

    params: NetworkParams
    p_fail: float
    state_count: int


def _coefficient_from_uniform(u: float, eps_sr: float, q: int) -> int:
    # the operation order must match _coefficients_from_uniform bit-for-bit
    if u < eps_sr or eps_sr >= 1.0:
        return 0
    return min(q - 1, 1 + int((u - eps_sr) * ((q - 1) / (1.0 - eps_sr))))


def _coefficients_from_uniform(u: np.ndarray, eps_sr: float, q: int) -> np.ndarray:
    out = np.zeros(u.shape, dtype=entry_dtype(q))
    if eps_sr >= 1.0:
        return out
    scaled = 1 + ((u - eps_sr) * ((q - 1) / (1.0 - eps_sr))).astype(np.int64)
    np.minimum(scaled, q - 1, out=scaled)
    nz = u >= eps_sr
    out[nz] = scaled[nz].astype(out.dtype)
    return out


def sample_coefficient(f: FieldSpec, eps_sr: float, rng: np.random.Generator) -> int:
    """One draw of a coding coefficient: zero with probability eps_sr,
    otherwise uniform over the q - 1 nonzero elements."""
    return _coefficient_from_uniform(rng.random(), eps_sr, f.q)


def sample_received_matrix(params: NetworkParams, rng: np.random.Generator) -> CodingMatrix:
    """Draw one received coding matrix.

    All M relays draw their N coefficients entry-wise (a relay that heard
    nothing still sends an all-zero row), then each row independently
    survives the relay-to-destination link with probability 1 - eps_rd.
    The returned matrix keeps only surviving rows and may have zero rows.
    """
    f = make_field(params.q)
    m, n = params.n_relays, params.n_sources
    coeffs = _coefficients_from_uniform(rng.random(m * n), params.eps_sr, params.q)
    keep = rng.random(m) < (1.0 - params.eps_rd)
    return CodingMatrix(f, coeffs.reshape(m, n)[keep])


def _trial_stride(params: NetworkParams) -> int:
    # counter blocks per trial window; each block yields 4 doubles
    need = params.n_relays * params.n_sources + params.n_relays
    return -(-need // 4)


def _philox_at(seed: int, block: int) -> np.random.Philox:
    bg = np.random.Philox(key=[seed & _MASK64, 0])
    st = bg.state
    st["state"]["counter"][:] = (block & _MASK64, block >> 64, 0, 0)
    bg.state = st
    return bg


def trial_rng(params: NetworkParams, seed: int, trial: int) -> np.random.Generator:
    """Generator positioned at trial ``trial``'s substream for ``seed``."""
    return np.random.Generator(_philox_at(seed, trial * _trial_stride(params)))


def estimate_pfail(params: NetworkParams, trials: int, seed: int = 0,
                   batch_size: int = 4096) -> SimEstimate:
    """Estimate the failure probability from ``trials`` independent draws.

    Deterministic for fixed (params, trials, seed) regardless of
    ``batch_size``: each trial consumes exactly the uniforms of its own
    substream, identically to feeding :func:`trial_rng` streams one at a
    time into :func:`sample_received_matrix`.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    f = make_field(params.q)
    m, n = params.n_relays, params.n_sources
    need = m * n + m
    stride = _trial_stride(params)
    failures = 0
    for start in range(0, trials, batch_size):
        b = min(batch_size, trials - start)
        gen = np.random.Generator(_philox_at(seed, start * stride))
        u = gen.random(b * stride * 4).reshape(b, stride * 4)
        coeffs = _coefficients_from_uniform(u[:, :m * n], params.eps_sr, params.q)
        coeffs = coeffs.reshape(b, m, n)
        keep = u[:, m * n:need] < (1.0 - params.eps_rd)
        coeffs *= keep[:, :, None].astype(coeffs.dtype)
        viable = keep.sum(axis=1) >= n
        failures += int(b - viable.sum())
        if viable.any():
            ranks = rank_batch(f, coeffs[viable], target=n)
            failures += int((ranks < n).sum())
    est = failures / trials
    sigma = math.sqrt(est * (1.0 - est) / trials)
    return SimEstimate(params=params, trials=trials, failures=failures, estimate=est,
                       ci_low=max(0.0, est - 4.0 * sigma),
                       ci_high=min(1.0, est + 4.0 * sigma), seed=seed)


@lru_cache(maxsize=None)
def _singular_zero_counts(q: int, cols: int, rows: int) -> tuple[int, ...]:
    """Histogram over zero-entry counts of the rank-deficient rows x cols
    matrices over F_q, by full enumeration."""
    f = make_field(q)
    hist = [0] * (rows * cols + 1)
    for ent in product(range(q), repeat=rows * cols):
        mat = [list(ent[i * cols:(i + 1) * cols]) for i in range(rows)]
        if _eliminate(f, mat, cols, target=cols) < cols:
            hist[ent.count(0)] += 1
    return tuple(hist)


def exact_pfail(params: NetworkParams) -> ExactResult:
    """Exact failure probability by enumerating the whole model.

    Sums the exact rational mass of every (coefficient matrix, erasure
    pattern) configuration whose delivered rows have deficient rank.
    Patterns with the same number of delivered rows share one matrix
    enumeration; the erasure probabilities enter as exact fractions of the
    given floats, so the result is exact for the parameters as stored.
    """
    n, m, q = params.n_sources, params.n_relays, params.q
    state_count = q ** (m * n) * 2**m
    if state_count > STATE_SPACE_LIMIT:
        raise StateSpaceExceeded(
            f"state space {state_count} exceeds the oracle guard {STATE_SPACE_LIMIT}")
    esr = Fraction(params.eps_sr)
    erd = Fraction(params.eps_rd)
    nonzero_mass = (1 - esr) / (q - 1)
    total = Fraction(0)
    for r in range(m + 1):
        hist = _singular_zero_counts(q, n, r)
        fail_r = sum(cnt * esr**z * nonzero_mass ** (r * n - z)
                     for z, cnt in enumerate(hist) if cnt)
        total += math.comb(m, r) * (1 - erd) ** r * erd ** (m - r) * fail_r
    return ExactResult(params=params, p_fail=float(total), state_count=state_count)
