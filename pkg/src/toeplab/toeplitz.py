"""Toeplitz determinants and the lattice variables built from them.

Exact determinants use a division-free minor expansion with a
subset-of-columns dynamic program. Fraction-free elimination is not
safe here: over truncated series a pivot with vanishing constant term
silently eats precision, and the perturbed moment matrices this package
cares about hit that case routinely. The DP costs n * 2^(n-1) ring
multiplications, which is cheap at desk scale, and all leading
principal minors fall out of a single run.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import NotInvertible, RefusedSize, SingularTau
from .rings import QZERO, as_q, _is_scalar
from .weights import WeightSpec, moment_fn

_MAX_EXACT_N = 16


def _as_callable(moments):
    if callable(moments):
        return moments
    return lambda k: moments[k]


def _entry_kind(x) -> str:
    if isinstance(x, (float, complex)):
        return "float"
    try:
        import mpmath

        if isinstance(x, (mpmath.mpf, mpmath.mpc)):
            return "mp"
    except ImportError:  # pragma: no cover
        pass
    return "exact"


def _prefix_dets_exact(M: list, n: int) -> list:
    if n > _MAX_EXACT_N:
        raise RefusedSize(f"exact determinant of size {n} exceeds the guard")
    dets = [as_q(1)]
    dp: dict[int, object] = {0: as_q(1)}
    for r in range(1, n + 1):
        row = M[r - 1]
        ndp: dict[int, object] = {}
        for cols in combinations(range(n), r):
            mask = 0
            for c in cols:
                mask |= 1 << c
            acc = 0
            for t, c in enumerate(cols):
                e = row[c]
                if e == 0:
                    continue
                minor = dp[mask ^ (1 << c)]
                if minor == 0:
                    continue
                term = e * minor
                acc = acc + term if (r - 1 + t) % 2 == 0 else acc - term
            ndp[mask] = acc
        dp = ndp
        dets.append(dp[(1 << r) - 1])
    return dets


def _prefix_dets_float(M: list, n: int) -> list:
    import numpy as np

    a = np.array(M, dtype=complex if any(isinstance(e, complex) for row in M for e in row) else float)
    dets = [1.0]
    for r in range(1, n + 1):
        dets.append(np.linalg.det(a[:r, :r]).item() if a.dtype == complex else float(np.linalg.det(a[:r, :r])))
    return dets


def _prefix_dets_mp(M: list, n: int) -> list:
    import mpmath

    dets = [mpmath.mpf(1)]
    for r in range(1, n + 1):
        dets.append(mpmath.det(mpmath.matrix([row[:r] for row in M[:r]])))
    return dets


def prefix_toeplitz_dets(moments, n_max: int, eps: int = 0) -> list:
    """All determinants det(mu_{eps+i-j}) of sizes 0..n_max in one pass."""
    mu = _as_callable(moments)
    if n_max == 0:
        return [as_q(1)]
    M = [[mu(eps + i - j) for j in range(n_max)] for i in range(n_max)]
    kind = _entry_kind(M[0][0])
    if kind == "float":
        return _prefix_dets_float(M, n_max)
    if kind == "mp":
        return _prefix_dets_mp(M, n_max)
    return _prefix_dets_exact(M, n_max)


def toeplitz_det(moments, n: int, eps: int = 0):
    """det(mu_{eps+i-j}) for an n x n matrix; the empty determinant is 1."""
    if n < 0:
        raise SingularTau(n, "negative matrix size")
    return prefix_toeplitz_dets(moments, n, eps)[n]


def det_matrix(M: list):
    """Determinant of an explicit square matrix over any supported ring."""
    n = len(M)
    if n == 0:
        return as_q(1)
    kind = _entry_kind(M[0][0])
    if kind == "float":
        return _prefix_dets_float(M, n)[n]
    if kind == "mp":
        return _prefix_dets_mp(M, n)[n]
    return _prefix_dets_exact(M, n)[n]


def divide(a, b):
    """a / b over whichever ring the values live in; NotInvertible when
    b has no inverse there."""
    if isinstance(b, (float, complex)):
        if b == 0:
            raise NotInvertible("division by float zero")
        return a / b
    if _is_scalar(b):
        bq = as_q(b)
        if bq == 0:
            raise NotInvertible("division by zero")
        return a * (1 / bq)
    return a * b.inv()


def solve_linear(A: list, rhs: list) -> list:
    """Cramer solve of a small square system over any supported ring."""
    n = len(A)
    d = det_matrix(A)
    out = []
    for i in range(n):
        Ai = [row[:i] + [rhs[r]] + row[i + 1 :] for r, row in enumerate(A)]
        out.append(divide(det_matrix(Ai), d))
    return out


@dataclass
class ToeplitzState:
    """Per-index data of one weight over one coefficient ring: the three
    determinant families and the ratio variables."""

    n_max: int
    I: list
    I_plus: list
    I_minus: list
    x: list
    y: list
    v: list
    h: list
    ring: str
    weight: WeightSpec | None = None


def build_state(w: WeightSpec, n_max: int, mode: str | None = None, M: int = 512) -> ToeplitzState:
    """Determinants and ratio variables for n = 0..n_max.

    x_n = (-1)^n I_n^+ / I_n and y_n = (-1)^n I_n^- / I_n with the
    boundary x_0 = y_0 = 1; v_n = 1 - x_n y_n; h_n = I_{n+1}/I_n.
    Raises SingularTau(n) when an I_n is not invertible in its ring.
    """
    mu = moment_fn(w, mode=mode, M=M)
    I0 = prefix_toeplitz_dets(mu, n_max, 0)
    Ip = prefix_toeplitz_dets(mu, n_max, 1)
    Im = prefix_toeplitz_dets(mu, n_max, -1)
    kind = _entry_kind(I0[-1])
    if kind == "float":
        one, zero = 1.0, 0.0
    elif kind == "mp":
        import mpmath

        one, zero = mpmath.mpf(1), mpmath.mpf(0)
    else:
        one, zero = as_q(1), QZERO
    x = [one]
    y = [one]
    v = [zero]
    for n in range(1, n_max + 1):
        sign = 1 if n % 2 == 0 else -1
        try:
            xn = divide(sign * Ip[n], I0[n])
            yn = divide(sign * Im[n], I0[n])
        except NotInvertible as exc:
            raise SingularTau(n, f"determinant {n} is not invertible: {exc}") from exc
        x.append(xn)
        y.append(yn)
        v.append(1 - xn * yn)
    h = []
    for n in range(n_max):
        try:
            h.append(divide(I0[n + 1], I0[n]))
        except NotInvertible as exc:
            raise SingularTau(n, f"determinant {n} is not invertible: {exc}") from exc
    ring = {"float": "float", "mp": "mp"}.get(kind, "exact")
    return ToeplitzState(
        n_max=n_max,
        I=I0,
        I_plus=Ip,
        I_minus=Im,
        x=x,
        y=y,
        v=v,
        h=h,
        ring=ring,
        weight=w,
    )


def reconstruct_In(state: ToeplitzState, n: int):
    """I_n rebuilt from I_1 and the ratio variables alone:
    I_1^n * prod_{i=1}^{n-1} (1 - x_i y_i)^(n-i)."""
    if n == 0:
        return as_q(1)
    if n > state.n_max:
        raise SingularTau(n, "state too short for reconstruction")
    acc = state.I[1] ** n
    for i in range(1, n):
        acc = acc * state.v[i] ** (n - i)
    return acc


def inner_product(moments, f: list, g: list):
    """<f, g> = sum f_i g_j mu_{i-j} for coefficient vectors in z."""
    mu = _as_callable(moments)
    acc = 0
    for i, fi in enumerate(f):
        if fi == 0:
            continue
        for j, gj in enumerate(g):
            if gj == 0:
                continue
            acc = acc + fi * gj * mu(i - j)
    return acc if not isinstance(acc, int) else as_q(acc)


def biorthogonal_poly(moments, n: int, which: int) -> list:
    """Coefficients (low to high, monic) of the degree-n member of the
    biorthogonal pair: which=1 kills <p, z^j>, which=2 kills <z^j, p>,
    for j = 0..n-1. Constant terms are the ratio variables x_n, y_n."""
    if which not in (1, 2):
        raise SingularTau(n, "which must be 1 or 2")
    mu = _as_callable(moments)
    if n == 0:
        return [as_q(1)]
    A = []
    rhs = []
    for j in range(n):
        if which == 1:
            A.append([mu(i - j) for i in range(n)])
            rhs.append(-mu(n - j))
        else:
            A.append([mu(j - i) for i in range(n)])
            rhs.append(-mu(j - n))
    try:
        coeffs = solve_linear(A, rhs)
    except NotInvertible as exc:
        raise SingularTau(n, f"biorthogonal system of size {n} is singular") from exc
    return coeffs + [as_q(1)]
