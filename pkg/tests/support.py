"""Shared independent oracles for the test suite.

Everything here deliberately avoids the library's computation paths:
ranks come from nullspace enumeration, probabilities from exact rational
arithmetic, and the tiny-instance failure probability from enumerating the
full joint (matrix, erasure-pattern) space.
"""

from fractions import Fraction
from itertools import product
from math import comb

import numpy as np

from rlnc_bounds.fields import FieldSpec, array_add, array_mul


def nullspace_rank(field: FieldSpec, rows: list[list[int]], cols: int) -> int:
    """rank = cols - log_q(#nullspace), counting Ax = 0 by enumeration."""
    q = field.q
    null = 0
    for x in product(range(q), repeat=cols):
        if not any(x):
            continue
        if all(_dot_is_zero(field, row, x) for row in rows):
            null += 1
    size = null + 1
    nullity = 0
    while size > 1:
        assert size % q == 0
        size //= q
        nullity += 1
    return cols - nullity


def _dot_is_zero(field: FieldSpec, row, x) -> bool:
    acc = 0
    for a, b in zip(row, x):
        acc = field.add(acc, field.mul(a, b))
    return acc == 0


def check_field_axioms(field: FieldSpec) -> None:
    """Exhaustive axiom check (pairs and triples) via the array ops."""
    q = field.q
    a = np.arange(q, dtype=np.uint8 if q <= 256 else np.int64)
    add2 = array_add(field, a[:, None], a[None, :])
    mul2 = array_mul(field, a[:, None], a[None, :])
    assert (add2 == add2.T).all(), "addition must commute"
    assert (mul2 == mul2.T).all(), "multiplication must commute"
    assert (add2[:, 0] == a).all(), "0 must be the additive identity"
    assert (mul2[:, 1] == a).all(), "1 must be the multiplicative identity"
    assert (mul2[:, 0] == 0).all(), "multiplication by 0 must vanish"
    assert ((add2 == 0).sum(axis=1) == 1).all(), "unique additive inverses"
    assert ((mul2[1:] == 1).sum(axis=1) == 1).all(), "unique multiplicative inverses"
    x, y, z = a[:, None, None], a[None, :, None], a[None, None, :]
    assert (array_add(field, array_add(field, x, y), z)
            == array_add(field, x, array_add(field, y, z))).all(), "addition associates"
    assert (array_mul(field, array_mul(field, x, y), z)
            == array_mul(field, x, array_mul(field, y, z))).all(), "multiplication associates"
    assert (array_mul(field, x, array_add(field, y, z))
            == array_add(field, array_mul(field, x, y), array_mul(field, x, z))).all(), \
        "multiplication distributes over addition"


# Rational-arithmetic versions of the analytical quantities.

def gamma_frac(q: int, eps_sr: Fraction, w: int) -> Fraction:
    qi = Fraction(1, q)
    return qi + (1 - qi) * (1 - (1 - eps_sr) / (1 - qi)) ** w


def mu0_frac(n: int, q: int, eps_sr: Fraction, rows: int) -> Fraction:
    return sum(comb(n, w) * (q - 1) ** w * gamma_frac(q, eps_sr, w) ** rows
               for w in range(1, n + 1)) / Fraction(q - 1)


def ub_old_frac(n: int, m: int, q: int, eps_sr: Fraction, eps_rd: Fraction) -> Fraction:
    return sum(comb(n, w) * (q - 1) ** w
               * (eps_rd + (1 - eps_rd) * gamma_frac(q, eps_sr, w)) ** m
               for w in range(1, n + 1)) / Fraction(q - 1)


def exact_pfail_full_joint(field: FieldSpec, n: int, m: int,
                           eps_sr: Fraction, eps_rd: Fraction) -> Fraction:
    """Failure probability by enumerating every full matrix and every
    erasure pattern separately (no grouping), with nullspace-counted ranks."""
    q = field.q
    nz = (1 - eps_sr) / (q - 1)
    total = Fraction(0)
    for ent in product(range(q), repeat=m * n):
        mat = [list(ent[i * n:(i + 1) * n]) for i in range(m)]
        z = ent.count(0)
        mat_mass = eps_sr**z * nz ** (m * n - z)
        if mat_mass == 0:
            continue
        for pat in product((0, 1), repeat=m):
            kept = [mat[i] for i in range(m) if pat[i]]
            r = len(kept)
            pat_mass = (1 - eps_rd) ** r * eps_rd ** (m - r)
            if pat_mass == 0:
                continue
            if nullspace_rank(field, kept, n) < n:
                total += mat_mass * pat_mass
    return total
