"""Windowed exact arithmetic on the two band matrices attached to a state.

L1 is lower Hessenberg, L2 upper Hessenberg, both built from the ratio
vectors (x, y) and v = 1 - x*y.  With 1-based row/column indices and the
boundary convention x_0 = y_0 = 1, v_0 = 0:

    L1[i][j] = -x_i y_{j-1}   for j <= i,      L1[i][i+1] = v_i,
    L2[i][j] = -x_{i-1} y_j   for j >= i,      L2[i][i-1] = v_{i-1},

and all other entries vanish.  Powers are computed entry by entry over the
band window, never materializing anything semi-infinite.  Everything here
is ring-agnostic: entries may be rationals, floats, or truncated series,
as long as they support +, -, *.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import ContractViolation, InsufficientState
from .weights import WeightSpec


class LatticeView:
    """Read-only window onto (x, y, v); the matrices are never stored.

    The vectors are indexed 0..n_max and shared, not copied.  Instances
    are safe to use from several evaluation sites at once; the power
    cache only ever gains entries.
    """

    def __init__(self, x: Sequence, y: Sequence, v: Sequence):
        if not (len(x) == len(y) == len(v)):
            raise ContractViolation("x, y, v must have equal length")
        if len(x) == 0:
            raise ContractViolation("empty state")
        self.x = x
        self.y = y
        self.v = v
        self._cache: dict = {}

    @classmethod
    def from_state(cls, state) -> "LatticeView":
        return cls(state.x, state.y, state.v)

    @property
    def n_max(self) -> int:
        return len(self.x) - 1

    def dual(self) -> "LatticeView":
        """Swap the roles of x and y; realizes L1 <-> L2 transposed."""
        return LatticeView(self.y, self.x, self.v)

    # index accessors; < 0 means the monomial is absent, not an error
    def _x(self, k):
        if k < 0:
            return 0
        if k > self.n_max:
            raise InsufficientState(f"x_{k} beyond available range {self.n_max}")
        return self.x[k]

    def _y(self, k):
        if k < 0:
            return 0
        if k > self.n_max:
            raise InsufficientState(f"y_{k} beyond available range {self.n_max}")
        return self.y[k]

    def _v(self, k):
        if k < 0:
            return 0
        if k > self.n_max:
            raise InsufficientState(f"v_{k} beyond available range {self.n_max}")
        return self.v[k]

    def band_entry(self, which: int, i: int, j: int):
        if which == 1:
            if j > i + 1:
                return 0
            if j == i + 1:
                return self._v(i)
            return -(self._x(i) * self._y(j - 1))
        if which == 2:
            if i > j + 1:
                return 0
            if i == j + 1:
                return self._v(j)
            return -(self._x(i - 1) * self._y(j))
        raise ContractViolation("which must be 1 or 2")


def power_entry(view: LatticeView, which: int, p: int, i: int, j: int):
    """Entry (i, j) of L1^p or L2^p, 1-based.

    Band vanishing is checked first, so trivially-zero entries never
    touch the state.  Entries that genuinely involve variables beyond
    the stored range raise InsufficientState.
    """
    if which not in (1, 2):
        raise ContractViolation("which must be 1 or 2")
    if p < 0:
        raise ContractViolation("power must be nonnegative")
    if i < 1 or j < 1:
        raise ContractViolation("indices are 1-based")
    if which == 1 and j > i + p:
        return 0
    if which == 2 and i > j + p:
        return 0
    if p == 0:
        return 1 if i == j else 0
    if p == 1:
        return view.band_entry(which, i, j)
    key = (which, p, i, j)
    cached = view._cache.get(key)
    if cached is not None:
        return cached
    # split off the last factor; the middle index m is limited on one
    # side by the band of L^{p-1} and on the other by the band of L
    acc = 0
    if which == 1:
        lo, hi = max(1, j - 1), i + p - 1
    else:
        lo, hi = max(1, i - 1), j + p - 1
    for m in range(lo, hi + 1):
        if which == 1:
            left = power_entry(view, 1, p - 1, i, m)
            right = view.band_entry(1, m, j)
        else:
            left = view.band_entry(2, i, m)
            right = power_entry(view, 2, p - 1, m, j)
        if _known_zero(left) or _known_zero(right):
            continue
        acc = acc + left * right
    view._cache[key] = acc
    return acc


def _known_zero(e) -> bool:
    return isinstance(e, int) and e == 0


@dataclass
class ScriptL:
    """One of the two weight-dressed band matrices at superscript n.

    which=1 holds (aI + bL1 + cL1^2)P1'(L1) + c(n+gp1+gp2+gamma)L1 in the
    collected form sum alpha_m L1^m plus the identity piece a*u_1*I;
    which=2 holds (cI + bL2 + aL2^2)P2'(L2) + a(n+gpp1+gpp2-gamma)L2 as
    sum over m of (-beta_m) L2^m plus the identity piece c*u_{-1}*I.
    """

    which: int
    n: int
    abc: tuple
    coeffs: dict          # m -> coefficient of L^m, m >= 1
    ident: object         # coefficient of the identity
    view: LatticeView

    def top_power(self) -> int:
        return max(self.coeffs) if self.coeffs else 0


def script_matrix(view: LatticeView, w: WeightSpec, abc, n: int, which: int) -> ScriptL:
    """Collect the L-power coefficients of the dressed matrix.

    abc is the polynomial triple (a, b, c) attached to the weight's
    binomial roots; n enters only through the shift coefficient.
    """
    if which not in (1, 2):
        raise ContractViolation("which must be 1 or 2")
    a, b, c = abc
    if which == 1:
        shift = c * (n + w.gp1 + w.gp2 + w.gamma)
        top = w.n1 + 1
        ident = a * w.u(1)
        sgn = 1
    else:
        shift = a * (n + w.gpp1 + w.gpp2 - w.gamma)
        top = w.n2 + 1
        ident = c * w.u(-1)
        sgn = -1
    coeffs = {}
    for m in range(1, top + 1):
        # for which=2 the a and c roles trade places: sgn*m+1 walks the
        # u-ladder toward the weight's own side
        cm = a * w.u(sgn * m + 1) + b * w.u(sgn * m) + c * w.u(sgn * m - 1)
        if m == 1:
            cm = cm + shift
        coeffs[m] = cm
    return ScriptL(which=which, n=n, abc=(a, b, c), coeffs=coeffs,
                   ident=ident, view=view)


def script_entry(sL: ScriptL, i: int, j: int):
    """Entry (i, j) of the dressed matrix, identity piece included."""
    acc = 0
    for m, cm in sL.coeffs.items():
        if _is_exact_zero(cm):
            continue
        term = power_entry(sL.view, sL.which, m, i, j)
        if _known_zero(term):
            continue
        acc = acc + cm * term
    if i == j and not _is_exact_zero(sL.ident):
        acc = acc + sL.ident
    return acc


def _is_exact_zero(e) -> bool:
    try:
        return e == 0
    except TypeError:
        return False


def discrete_deriv(f: Callable[[int], object], n: int):
    """Difference of a diagonal-indexed sequence: f(n+1) - f(n).

    The callable is expected to evaluate its own matrix entries at the
    shifted indices; this helper only takes the difference.
    """
    return f(n + 1) - f(n)


@dataclass(frozen=True)
class LeadingTerm:
    """A single extreme-index monomial, sign * x_a * y_b * prod v_k."""

    sign: int
    x_index: int
    y_index: int
    v_indices: tuple

    def evaluate(self, view: LatticeView):
        acc = view._x(self.x_index) * view._y(self.y_index)
        for k in self.v_indices:
            acc = acc * view._v(k)
        return -acc if self.sign < 0 else acc


def leading_terms(which: int, p: int, position: str, n: int) -> dict:
    """Extreme-index monomials of a power entry, as index data.

    position="diag" describes (L^p)_{nn}; position="subdiag" describes
    v_n (L1^p)_{n+1,n} for which=1 (the combination the second relation
    uses) and (L2^p)_{n+1,n} for which=2.  Returns {"top": ..., "bottom":
    ...}; for p=1 the two coincide.
    """
    if p < 1:
        raise ContractViolation("power must be >= 1")
    if which not in (1, 2):
        raise ContractViolation("which must be 1 or 2")
    if position not in ("diag", "subdiag"):
        raise ContractViolation("position must be diag or subdiag")
    N = p - 1
    if position == "diag":
        if which == 1:
            top = LeadingTerm(-1, n + N, n - 1, tuple(range(n, n + N)))
            bot = LeadingTerm(-1, n, n - N - 1, tuple(range(n - N, n)))
        else:
            top = LeadingTerm(-1, n - 1, n + N, tuple(range(n, n + N)))
            bot = LeadingTerm(-1, n - N - 1, n, tuple(range(n - N, n)))
    else:
        if which == 1:
            top = LeadingTerm(-1, n + N + 1, n - 1, tuple(range(n, n + N + 1)))
            bot = LeadingTerm(-1, n + 1, n - N - 1, tuple(range(n - N, n + 1)))
        else:
            top = LeadingTerm(-1, n, n + N, tuple(range(n, n + N)))
            bot = LeadingTerm(-1, n - N, n, tuple(range(n - N + 1, n + 1)))
    return {"top": top, "bottom": bot}
