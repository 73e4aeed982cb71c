"""Determinant engine and ratio-variable state."""

from __future__ import annotations

import pytest

from toeplab.errors import RefusedSize, SingularTau
from toeplab.rings import Series, as_q
from toeplab.toeplitz import (
    biorthogonal_poly,
    build_state,
    det_matrix,
    inner_product,
    prefix_toeplitz_dets,
    reconstruct_In,
    solve_linear,
    toeplitz_det,
)
from toeplab.weights import WeightSpec, dual_weight, moment_fn


def cofactor_det(M):
    """Independent O(n!) determinant used as the oracle."""
    n = len(M)
    if n == 0:
        return as_q(1)
    if n == 1:
        return M[0][0]
    acc = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = M[0][j] * cofactor_det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def sd_weight(order: int):
    t = Series.variable(order)
    return WeightSpec(u_plus=(t,), u_minus=(t,)), t


def test_det_against_cofactor_oracle():
    M = [
        [as_q(2), as_q(-1), as_q(1, 2), as_q(0)],
        [as_q(1), as_q(3), as_q(0), as_q(1)],
        [as_q(0), as_q(1, 3), as_q(1), as_q(2)],
        [as_q(5), as_q(0), as_q(-2), as_q(1)],
    ]
    assert det_matrix(M) == cofactor_det(M)
    for r in range(1, 5):
        sub = [row[:r] for row in M[:r]]
        assert det_matrix(sub) == cofactor_det(sub)


def test_prefix_dets_match_individual_dets():
    mu = {k: as_q(k * k - 3 * k + 5, 1 + abs(k)) for k in range(-6, 7)}
    prefix = prefix_toeplitz_dets(mu, 5, eps=1)
    for n in range(6):
        assert prefix[n] == toeplitz_det(mu, n, eps=1)
    M = [[mu[1 + i - j] for j in range(4)] for i in range(4)]
    assert prefix[4] == cofactor_det(M)


def test_toeplitz_det_base_cases():
    w, t = sd_weight(6)
    mu = moment_fn(w)
    assert toeplitz_det(mu, 0) == 1
    assert toeplitz_det(mu, 1) == 1 + t**2 + t**4 / 4
    two = toeplitz_det(mu, 2)
    assert two == mu(0) * mu(0) - mu(1) * mu(-1)


def test_build_state_selfdual_series():
    w, t = sd_weight(8)
    st = build_state(w, 5)
    assert st.x == st.y
    # x_1 = -t + t^3/2 - t^5/3 + ...
    assert st.x[1].coeff(1) == -1
    assert st.x[1].coeff(3) == as_q(1, 2)
    assert st.x[1].coeff(0) == 0 and st.x[1].coeff(2) == 0
    assert st.v[0] == 0
    for n in range(1, 5):
        assert st.v[n] == 1 - st.x[n] * st.y[n]
        # v_n I_n^2 = I_{n-1} I_{n+1}
        assert st.v[n] * st.I[n] ** 2 == st.I[n - 1] * st.I[n + 1]
        assert st.h[n] == st.I[n + 1] / st.I[n]


def test_trivial_weight_state():
    w = WeightSpec()
    st = build_state(w, 4)
    for n in range(5):
        assert st.I[n] == 1
    for n in range(1, 5):
        assert st.x[n] == 0 and st.y[n] == 0


def test_reconstruction_matches_direct_determinant():
    w, _ = sd_weight(10)
    st = build_state(w, 5)
    for n in range(6):
        assert reconstruct_In(st, n) == st.I[n]


def test_duality_swaps_x_and_y():
    t = Series.variable(8)
    w = WeightSpec(u_plus=(t,), gamma=0, d1=as_q(1, 2), gpp1=2)
    st = build_state(w, 3)
    std = build_state(dual_weight(w), 3)
    assert std.x == st.y
    assert std.y == st.x


def test_singular_tau_reported_with_index():
    # z * exp(tz) has mu_0 = 0, so the first determinant vanishes at t = 0
    t = Series.variable(5)
    w = WeightSpec(u_plus=(t,), gamma=1)
    with pytest.raises(SingularTau) as err:
        build_state(w, 2)
    assert err.value.n == 1


def test_refused_size_guard():
    mu = {k: as_q(1, 1 + abs(k)) for k in range(-40, 41)}
    with pytest.raises(RefusedSize):
        toeplitz_det(mu, 17)


def test_solve_linear_cramer():
    A = [[as_q(2), as_q(1)], [as_q(1), as_q(3)]]
    sol = solve_linear(A, [as_q(4), as_q(7)])
    assert sol == [as_q(1), as_q(2)]


def test_biorthogonal_polys_and_h():
    w, t = sd_weight(8)
    mu = moment_fn(w)
    st = build_state(w, 4)
    p1 = biorthogonal_poly(mu, 1, 1)
    # p_1(z) = z - mu_1/mu_0, constant term x_1
    assert p1[1] == 1
    assert p1[0] == st.x[1]
    for n in range(4):
        q1 = biorthogonal_poly(mu, n, 1)
        q2 = biorthogonal_poly(mu, n, 2)
        assert q1[0] == st.x[n] or n == 0
        assert q2[0] == st.y[n] or n == 0
        # orthogonality against lower powers
        for j in range(n):
            assert inner_product(mu, q1, [0] * j + [1]) == Series.zero(8)
            assert inner_product(mu, [0] * j + [1], q2) == Series.zero(8)
        # normalization <p1_n, p2_n> = h_n
        assert inner_product(mu, q1, q2) == st.h[n]


def test_biorthogonal_cross_orthogonality():
    w, _ = sd_weight(8)
    mu = moment_fn(w)
    st = build_state(w, 4)
    polys1 = [biorthogonal_poly(mu, n, 1) for n in range(4)]
    polys2 = [biorthogonal_poly(mu, n, 2) for n in range(4)]
    for n in range(4):
        for m in range(4):
            ip = inner_product(mu, polys1[n], polys2[m])
            if n == m:
                assert ip == st.h[n]
            else:
                assert ip.is_zero()


def test_float_state_matches_exact():
    wq = WeightSpec(u_plus=(as_q(1, 2),), d1=as_q(3), gpp1=2)
    wf = WeightSpec(
        u_plus=(as_q(1, 2),), d1=as_q(3), gpp1=2, mode="numeric"
    )
    se = build_state(wq, 4)
    sf = build_state(wf, 4, M=256)
    assert sf.ring == "float"
    for n in range(5):
        assert abs(float(se.I[n]) - sf.I[n]) < 1e-10
        assert abs(float(se.x[n]) - sf.x[n]) < 1e-9
        assert abs(float(se.y[n]) - sf.y[n]) < 1e-9
