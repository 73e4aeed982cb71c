"""Tests for the exact coefficient rings.

Reference values were computed by hand or by an independent convolution
before the ring code existed, then frozen here.
"""

from __future__ import annotations

import pytest

from toeplab.errors import (
    ContractViolation,
    DomainError,
    NotInvertible,
    PrecisionExceeded,
)
from toeplab.rings import (
    GradedPoly,
    GradedRing,
    LaurentSeries,
    Series,
    as_q,
    exp_series_coefficients,
    schur_p,
)


def naive_convolve(a, b, order):
    """Independent truncated product used to cross-check Series.__mul__."""
    out = [as_q(0)] * order
    for i in range(order):
        for j in range(order - i):
            out[i + j] += as_q(a[i]) * as_q(b[j]) if i < len(a) and j < len(b) else 0
    return out


def test_as_q_parses_and_normalizes():
    assert as_q("2/4") == as_q(1, 2)
    assert as_q(3) + as_q("1/3") == as_q(10, 3)
    with pytest.raises(ContractViolation):
        as_q(0.5)


def test_series_mul_matches_naive_convolution():
    a = Series([1, 2, 3, 4], 6)
    b = Series([5, 0, "1/2", 7], 6)
    expected = naive_convolve([1, 2, 3, 4], [5, 0, "1/2", 7], 6)
    assert (a * b).coeffs == expected


def test_series_exp_log_roundtrip():
    x = Series.variable(8)
    f = (x + x * x * as_q(1, 3)).exp()
    assert f.coeff(0) == 1
    assert f.log() == x + x * x * as_q(1, 3)
    # exp(t) * exp(-t) == 1
    assert (x.exp() * (-x).exp()) == 1


def test_series_inverse_frozen_values():
    # (1 + t^2 + t^4/4)^-1 = 1 - t^2 + 3 t^4 / 4 + O(t^6), by hand
    x = Series.variable(6)
    f = 1 + x**2 + x**4 * as_q(1, 4)
    g = f.inv()
    assert g.coeff(0) == 1
    assert g.coeff(2) == -1
    assert g.coeff(4) == as_q(3, 4)
    assert g.coeff(1) == 0 and g.coeff(3) == 0
    assert f * g == 1


def test_series_exp_frozen_values():
    x = Series.variable(7)
    e = x.exp()
    assert e.coeff(3) == as_q(1, 6)
    assert e.coeff(6) == as_q(1, 720)


def test_series_contract_checks():
    x = Series.variable(5)
    with pytest.raises(ContractViolation):
        x + Series.variable(6)
    with pytest.raises(NotInvertible):
        x.inv()
    with pytest.raises(DomainError):
        (1 + x).exp()
    with pytest.raises(PrecisionExceeded):
        x.coeff(5)
    assert x.coeff(-3) == 0


def test_series_diff_drops_order():
    x = Series.variable(6)
    d = (x**3).diff()
    assert d.order == 5
    assert d.coeff(2) == 3


def test_series_eval():
    x = Series.variable(4)
    f = 1 + 2 * x + 3 * x**2
    assert f.eval(as_q(1, 2)) == as_q(11, 4)
    assert abs(f.eval(0.5) - 2.75) < 1e-15


def test_series_pow_and_div():
    x = Series.variable(6)
    f = 1 + x
    assert f**3 == 1 + 3 * x + 3 * x**2 + x**3
    assert (f**3 / f) == f**2
    assert (1 / f) * f == 1


def test_graded_ring_basics():
    R = GradedRing(["t", "s"], [1, 1], 6)
    t, s = R.gens()
    f = (t + s) ** 2
    assert f.coeff((2, 0)) == 1
    assert f.coeff((1, 1)) == 2
    assert f.coeff((0, 2)) == 1
    assert f.coeff((3, 0)) == 0


def test_graded_truncation_by_weighted_degree():
    # s has weight 2, so t^2 s^3 (weighted degree 8) falls outside order 7
    R = GradedRing(["t", "s"], [1, 2], 7)
    t, s = R.gens()
    f = (t**2) * (s**3)
    assert f.is_zero()
    g = t * s**3  # weighted degree 7, kept
    assert g.coeff((1, 3)) == 1


def test_graded_inv_exp_log():
    R = GradedRing(["t", "s"], [1, 1], 8)
    t, s = R.gens()
    f = 1 + t + 2 * s
    assert f * f.inv() == 1
    g = (t + s).exp()
    assert g.log() == t + s
    assert g.coeff((2, 2)) == as_q(1, 4)  # t^2 s^2 / (2! 2!)


def test_graded_diff_and_integrate():
    R = GradedRing(["t", "s"], [1, 1], 6)
    t, s = R.gens()
    f = t**2 * s
    assert f.diff("t") == 2 * t * s
    assert f.diff("s") == t**2
    assert (2 * t * s).integrate("t") == f
    assert f.diff("t").diff("s") == 2 * t


def test_graded_subs_scalar():
    R = GradedRing(["t", "s"], [1, 1], 5)
    t, s = R.gens()
    f = t**2 + 3 * t * s - 1
    assert f.subs_scalar({"t": 2, "s": as_q(1, 3)}) == 4 + 2 - 1


def test_graded_is_zero_upto():
    R = GradedRing(["t"], [1], 8)
    (t,) = R.gens()
    f = t**5
    assert f.is_zero(upto=4)
    assert not f.is_zero(upto=5)
    assert not f.is_zero()


def test_graded_ring_mismatch_raises():
    R1 = GradedRing(["t"], [1], 5)
    R2 = GradedRing(["t"], [1], 6)
    with pytest.raises(ContractViolation):
        R1.gen("t") + R2.gen("t")


def test_laurent_inverse_of_singular_denominator():
    # 1/(2 eps + eps^2) = (1/2) eps^-1 - 1/4 + (1/8) eps - ..., by hand
    e = LaurentSeries.eps(valid=6)
    f = 2 * e + e * e
    g = f.inv()
    assert g.lowest() == -1
    assert g.coeff(-1) == as_q(1, 2)
    assert g.coeff(0) == as_q(-1, 4)
    assert g.coeff(1) == as_q(1, 8)
    # inversion at a simple zero costs two orders of validity
    assert g.valid == 4
    assert f * g == LaurentSeries([1], 0, 5)


def test_laurent_validity_bookkeeping():
    e = LaurentSeries.eps(valid=10)
    a = 1 + e
    b = a.inv()  # valid stays 10: inversion at exponent 0 is free
    assert b.valid == 10
    assert b.coeff(3) == -1
    c = e.inv()
    assert c.valid == 8
    assert c.coeff(-1) == 1
    with pytest.raises(PrecisionExceeded):
        c.coeff(8)


def test_laurent_known_zero_semantics():
    e = LaurentSeries.eps(valid=5)
    z = e - e
    assert z.is_known_zero()
    assert z.valid == 5
    with pytest.raises(PrecisionExceeded):
        z.inv()
    # multiplying a known-zero keeps track of how far the zero is known
    w = z * e.inv()
    assert w.is_known_zero()
    assert w.valid == 4


def test_laurent_exact_scalars():
    a = LaurentSeries.scalar(3)
    assert (a * a).coeff(0) == 9
    assert a.inv().coeff(0) == as_q(1, 3)
    assert a.valid is None
    with pytest.raises(ContractViolation):
        (1 + LaurentSeries.eps()).inv()  # exact multi-term has no finite inverse


def test_laurent_mixed_arithmetic():
    e = LaurentSeries.eps(valid=7)
    f = (1 + e) * (1 - e)
    assert f.coeff(0) == 1
    assert f.coeff(1) == 0
    assert f.coeff(2) == -1
    g = f - 1
    assert g.lowest() == 2


def test_exp_series_coefficients_rational():
    # exp(t z + s z^2): p_2 = t^2/2 + s
    p = exp_series_coefficients({1: as_q(3), 2: as_q(5)}, 3)
    assert p[0] == 1
    assert p[1] == 3
    assert p[2] == as_q(9, 2) + 5
    assert p[3] == as_q(27, 6) + 15


def test_exp_series_coefficients_graded():
    R = GradedRing(["t1", "t2"], [1, 2], 6)
    t1, t2 = R.gens()
    p = exp_series_coefficients({1: t1, 2: t2}, 4)
    assert p[2] == t1**2 / 2 + t2
    assert p[4] == t1**4 / 24 + t1**2 * t2 / 2 + t2**2 / 2


def prop_ring_axioms_series():
    samples = [
        Series([1, 2, 3], 5),
        Series(["1/2", 0, 4, 1], 5),
        Series.zero(5),
        Series.variable(5),
    ]
    for a in samples:
        for b in samples:
            for c in samples:
                assert (a + b) * c == a * c + b * c
                assert a * (b * c) == (a * b) * c
                assert a + b == b + a


def test_ring_axioms_series():
    prop_ring_axioms_series()


def test_ring_axioms_graded():
    R = GradedRing(["t", "s"], [1, 2], 5)
    t, s = R.gens()
    samples = [t, s, 1 + t, t * s - 3, R.zero(), t**2 + s]
    for a in samples:
        for b in samples:
            assert a * b == b * a
            assert (a - b) + b == a
    for a in samples:
        for b in samples:
            for c in samples:
                assert (a + b) * c == a * c + b * c


def test_schur_p_spec_examples():
    assert schur_p([], 0) == 1
    assert schur_p([as_q(7)], 1) == 7
    t = [as_q(2), as_q(3)]
    assert schur_p(t, 2) == as_q(2) ** 2 / 2 + 3
    assert schur_p(t, -1) == 0
