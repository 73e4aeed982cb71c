"""The circle symbol family and its Fourier moments.

A weight is
    rho(z) = exp(sum_{i>=1} u_i z^i / i) * exp(sum_{i>=1} u_{-i} z^{-i} / i)
             * z^gamma
             * (1 - d1 z)^gp1 (1 - d2 z)^gp2
             * (1 - z^{-1}/d1)^gpp1 (1 - z^{-1}/d2)^gpp2.

Exact moments are coefficient extractions over rational, Series, or
GradedPoly coefficients; numeric moments are spectral trapezoid sums on
the unit circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    ContractViolation,
    DomainError,
    UnclassifiableWeight,
    UnsupportedExactWeight,
)
from .rings import GradedPoly, Series, QZERO, as_q

_MODES = ("exact", "numeric")


def _is_ring_element(x) -> bool:
    return isinstance(x, (Series, GradedPoly))


def _nonzero(x) -> bool:
    if _is_ring_element(x):
        return not x.is_zero()
    if isinstance(x, float):
        return x != 0.0
    return as_q(x) != 0


@dataclass(frozen=True)
class WeightSpec:
    """Parameters of one symbol. u_plus[i-1] is u_i, u_minus[i-1] is
    u_{-i}. Binomial slot j is (d_j, gp_j, gpp_j); a slot with d_j = 0
    must have both exponents zero and contributes nothing."""

    u_plus: tuple = ()
    u_minus: tuple = ()
    gamma: int = 0
    d1: object = 0
    d2: object = 0
    gp1: object = 0
    gp2: object = 0
    gpp1: object = 0
    gpp2: object = 0
    mode: str = "exact"

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ContractViolation(f"mode must be one of {_MODES}")
        if not isinstance(self.gamma, int):
            raise ContractViolation("gamma must be an integer")
        object.__setattr__(self, "u_plus", tuple(self._coerce(c) for c in self.u_plus))
        object.__setattr__(self, "u_minus", tuple(self._coerce(c) for c in self.u_minus))
        for name in ("d1", "d2", "gp1", "gp2", "gpp1", "gpp2"):
            object.__setattr__(self, name, self._coerce(getattr(self, name), scalar=True))
        for d, gp, gpp in self.slots():
            if not _nonzero(d):
                if _nonzero(gp) or _nonzero(gpp):
                    raise DomainError("binomial exponent attached to d = 0")
            elif self.mode == "exact":
                for g in (gp, gpp):
                    q = as_q(g)
                    if q.denominator != 1 or q < 0:
                        raise UnsupportedExactWeight(
                            "exact mode needs non-negative integer binomial exponents"
                        )

    def _coerce(self, c, scalar: bool = False):
        if _is_ring_element(c):
            if scalar:
                raise ContractViolation("d and exponent parameters must be scalars")
            if self.mode == "numeric":
                raise ContractViolation("numeric mode takes numeric parameters only")
            return c
        if isinstance(c, float):
            if self.mode == "exact":
                raise ContractViolation("exact mode rejects floats; pass rationals")
            return c
        return as_q(c)

    @property
    def n1(self) -> int:
        return len(self.u_plus)

    @property
    def n2(self) -> int:
        return len(self.u_minus)

    def u(self, i: int):
        """u_i for any integer i, zero outside the stored ranges (and at
        i = 0 by convention)."""
        if i >= 1:
            return self.u_plus[i - 1] if i <= self.n1 else QZERO
        if i <= -1:
            return self.u_minus[-i - 1] if -i <= self.n2 else QZERO
        return QZERO

    def slots(self):
        return (
            (self.d1, self.gp1, self.gpp1),
            (self.d2, self.gp2, self.gpp2),
        )

    def active_slots(self):
        """Slots that actually multiply the weight by something."""
        return [
            (d, gp, gpp)
            for d, gp, gpp in self.slots()
            if _nonzero(d) and (_nonzero(gp) or _nonzero(gpp))
        ]


@dataclass(frozen=True)
class CaseTag:
    case_id: str  # Case1 | Case2 | Case3 | SelfDual
    abc: tuple
    alternate_abc: tuple | None = None


def dual_weight(w: WeightSpec) -> WeightSpec:
    """The involution z -> 1/z on the symbol: swaps the two exponential
    sides, negates gamma, inverts the d's, and swaps each slot's
    exponent pair. Applying it twice is the identity."""

    def dinv(d):
        if not _nonzero(d):
            return d
        if isinstance(d, float):
            return 1.0 / d
        return 1 / as_q(d)

    return WeightSpec(
        u_plus=w.u_minus,
        u_minus=w.u_plus,
        gamma=-w.gamma,
        d1=dinv(w.d1),
        d2=dinv(w.d2),
        gp1=w.gpp1,
        gp2=w.gpp2,
        gpp1=w.gp1,
        gpp2=w.gp2,
        mode=w.mode,
    )


def classify_case(w: WeightSpec) -> CaseTag:
    """Sort the weight into the recursion family it belongs to and
    return the quadratic coefficients (a, b, c) whose roots absorb the
    binomial tails.

    Two active slots with distinct d: (1, -d1-d2, d1 d2). One active
    slot: both admissible triples, preferring (1, -d, 0) when the plus
    degree is at least the minus degree. No active slot: (0, 1, 0),
    tagged SelfDual when the symbol is invariant under z -> 1/z.
    """
    active = w.active_slots()
    if len(active) == 2:
        (da, _, _), (db, _, _) = active
        if da == db:
            raise UnclassifiableWeight(
                "two active binomial slots share one root; no quadratic separates them"
            )
        return CaseTag("Case1", (as_q(1), -(da + db), da * db))
    if len(active) == 1:
        d = active[0][0]
        first = (as_q(1), -d, QZERO)
        second = (QZERO, as_q(1), -d)
        if w.n1 >= w.n2:
            return CaseTag("Case2", first, second)
        return CaseTag("Case2", second, first)
    triple = (QZERO, as_q(1), QZERO)
    if w.gamma == 0 and w.u_plus == w.u_minus:
        return CaseTag("SelfDual", triple)
    return CaseTag("Case3", triple)


# ---------------------------------------------------------------------------
# Exact moments


def _ring_order(x) -> int:
    if isinstance(x, Series):
        return x.order
    return x.ring.order


def _side_support_bound(w: WeightSpec, plus: bool) -> int | None:
    """Largest z-power (in the side's own variable) that can carry a
    nonzero coefficient, or None when the support is infinite.

    Ring-valued u's with zero constant term kill high powers by
    valuation: the a-th exponential coefficient is a sum of products of
    at least ceil(a/N) u's, so it truncates to zero past N * order.
    """
    u = w.u_plus if plus else w.u_minus
    nonzero = [(i + 1, c) for i, c in enumerate(u) if _nonzero(c)]
    bound = 0
    if nonzero:
        n_top = max(i for i, _ in nonzero)
        if all(_is_ring_element(c) for _, c in nonzero):
            if any(
                (c.coeff(0) if isinstance(c, Series) else c.constant()) != 0
                for _, c in nonzero
            ):
                return None
            bound = n_top * _ring_order(nonzero[0][1])
        else:
            return None
    for d, gp, gpp in w.active_slots():
        g = gp if plus else gpp
        if _nonzero(g):
            bound += int(as_q(g))
    return bound


class _SideStream:
    """Lazily grown coefficients of one side of the symbol: the
    exponential factor convolved with the finite binomial factors."""

    def __init__(self, w: WeightSpec, plus: bool):
        u = w.u_plus if plus else w.u_minus
        self.tvec = {
            i + 1: c * as_q(1, i + 1) for i, c in enumerate(u) if _nonzero(c)
        }
        bino = [as_q(1)]
        for d, gp, gpp in w.active_slots():
            g = gp if plus else gpp
            if not _nonzero(g):
                continue
            g = int(as_q(g))
            deff = as_q(d) if plus else 1 / as_q(d)
            factor = [math.comb(g, j) * (-deff) ** j for j in range(g + 1)]
            bino = [
                sum(bino[i] * factor[j - i] for i in range(max(0, j - g), min(j, len(bino) - 1) + 1))
                for j in range(len(bino) + g)
            ]
        self.bino = bino
        self.p = [1]

    def _grow(self, a: int):
        while len(self.p) <= a:
            k = len(self.p)
            acc = 0
            for i, t in self.tvec.items():
                if i <= k:
                    acc = acc + (i * t) * self.p[k - i]
            self.p.append(acc * as_q(1, k))

    def coeff(self, a: int):
        if a < 0:
            return QZERO
        acc = 0
        for j, b in enumerate(self.bino):
            if j > a:
                break
            if b != 0:
                self._grow(a - j)
                acc = acc + b * self.p[a - j]
        return acc


def moment_fn(w: WeightSpec, mode: str | None = None, M: int = 512):
    """Cached moment provider k -> mu_k, the coefficient of z^{-k} in
    the symbol. Build one per weight and reuse it; fourier_moment is a
    one-shot convenience on top of this."""
    mode = mode or w.mode
    if mode == "numeric":
        return _numeric_moment_fn(w, M)
    if mode != "exact":
        raise ContractViolation(f"mode must be one of {_MODES}")

    bound_p = _side_support_bound(w, True)
    bound_m = _side_support_bound(w, False)
    if bound_p is None and bound_m is None:
        raise UnsupportedExactWeight(
            "both sides of the symbol have infinite support over exact scalars; "
            "move the exponential coefficients into a truncated ring or drop one side"
        )
    plus = _SideStream(w, True)
    minus = _SideStream(w, False)
    gamma = w.gamma
    cache: dict = {}

    def mu(k: int):
        if k in cache:
            return cache[k]
        acc = 0
        if bound_p is not None:
            lo = max(0, -k - gamma)
            for a in range(lo, bound_p + 1):
                b = a + k + gamma
                if bound_m is not None and b > bound_m:
                    break
                fb = minus.coeff(b)
                if fb == 0:
                    continue
                fa = plus.coeff(a)
                if fa == 0:
                    continue
                acc = acc + fa * fb
        else:
            for b in range(max(0, k + gamma), bound_m + 1):
                a = b - k - gamma
                fa = plus.coeff(a)
                if fa == 0:
                    continue
                fb = minus.coeff(b)
                if fb == 0:
                    continue
                acc = acc + fa * fb
        acc = as_q(acc) if isinstance(acc, int) else acc
        cache[k] = acc
        return acc

    return mu


def _numeric_moment_fn(w: WeightSpec, M: int = 512):
    import numpy as np

    def fl(x):
        return float(x)

    theta = 2.0 * np.pi * np.arange(M) / M
    z = np.exp(1j * theta)
    log_rho = np.zeros(M, dtype=complex)
    for i, c in enumerate(w.u_plus):
        if _nonzero(c):
            log_rho += (fl(c) / (i + 1)) * z ** (i + 1)
    for i, c in enumerate(w.u_minus):
        if _nonzero(c):
            log_rho += (fl(c) / (i + 1)) * z ** (-(i + 1))
    rho = np.exp(log_rho) * z**w.gamma
    for d, gp, gpp in w.active_slots():
        d = fl(d)
        if _nonzero(gp):
            rho = rho * (1.0 - d * z) ** fl(gp)
        if _nonzero(gpp):
            rho = rho * (1.0 - z ** (-1) / d) ** fl(gpp)
    cache: dict = {}

    def mu(k: int):
        if k not in cache:
            val = complex(np.mean(rho * z**k))
            # real weights give real moments; keep tiny imaginary noise out
            cache[k] = val.real if abs(val.imag) < 1e-9 * (1.0 + abs(val.real)) else val
        return cache[k]

    return mu


def fourier_moment(w: WeightSpec, k: int, mode: str | None = None, M: int = 512):
    """Coefficient of z^{-k} in the symbol (so the size-n Toeplitz
    matrix has entry mu_{eps+i-j} at row i, column j)."""
    return moment_fn(w, mode=mode, M=M)(k)


# ---------------------------------------------------------------------------
# The time locus carried by a weight


def locus_times(w: WeightSpec, imax: int):
    """The (t, s) point at which the two-sided time-dependent symbol
    reproduces this weight: i t_i = u_i - sum_j gp_j d_j^i and
    i s_i = -u_{-i} + sum_j gpp_j d_j^{-i}, returned for i = 1..imax."""
    if imax < max(w.n1, w.n2):
        raise ContractViolation("index bound must reach the exponential degrees")
    t0 = []
    s0 = []
    for i in range(1, imax + 1):
        ti = w.u(i)
        si = -w.u(-i)
        for d, gp, gpp in w.slots():
            if _nonzero(d):
                if _nonzero(gp):
                    ti = ti - as_q(gp) * as_q(d) ** i
                if _nonzero(gpp):
                    si = si + as_q(gpp) * as_q(d) ** (-i)
        t0.append(ti * as_q(1, i))
        s0.append(si * as_q(1, i))
    return t0, s0


def locus_symbol_coefficients(w: WeightSpec, t0, s0, jmax: int):
    """z-coefficients (plus side) and z^{-1}-coefficients (minus side)
    of exp(sum t_i z^i) and exp(-sum s_i z^{-i}) at a locus point,
    trustworthy for powers up to min(jmax, len(t0))."""
    if jmax > len(t0) or jmax > len(s0):
        raise ContractViolation("locus vectors too short for the requested power")
    from .rings import exp_series_coefficients

    pt = exp_series_coefficients({i + 1: c for i, c in enumerate(t0[:jmax]) if c != 0}, jmax)
    ps = exp_series_coefficients({i + 1: -c for i, c in enumerate(s0[:jmax]) if c != 0}, jmax)
    return pt, ps


def side_symbol_coefficients(w: WeightSpec, plus: bool, jmax: int):
    """Direct z-expansion of one side of the weight (exponential factor
    times binomial factors), coefficients 0..jmax."""
    stream = _SideStream(w, plus)
    return [stream.coeff(a) for a in range(jmax + 1)]


# ---------------------------------------------------------------------------
# JSON round-trip (the on-disk weight format)

_JSON_FIELDS = (
    "u_plus",
    "u_minus",
    "gamma",
    "d1",
    "d2",
    "gp1",
    "gp2",
    "gpp1",
    "gpp2",
    "mode",
)


def _scalar_to_json(x):
    if isinstance(x, float):
        return x
    q = as_q(x)
    if q.denominator == 1:
        return str(int(q))
    return str(q)


def weight_to_json(w: WeightSpec) -> dict:
    """Plain-data form of a weight with rational parameters. Ring-valued
    exponential coefficients have no file form and are rejected."""
    if any(_is_ring_element(c) for c in w.u_plus + w.u_minus):
        raise ContractViolation("ring-valued weights cannot be serialized")

    def expo(x):
        if isinstance(x, float):
            return x
        q = as_q(x)
        return int(q) if q.denominator == 1 else float(q)

    return {
        "u_plus": [_scalar_to_json(c) for c in w.u_plus],
        "u_minus": [_scalar_to_json(c) for c in w.u_minus],
        "gamma": w.gamma,
        "d1": _scalar_to_json(w.d1),
        "d2": _scalar_to_json(w.d2),
        "gp1": expo(w.gp1),
        "gp2": expo(w.gp2),
        "gpp1": expo(w.gpp1),
        "gpp2": expo(w.gpp2),
        "mode": w.mode,
    }


def weight_from_json(obj: dict) -> WeightSpec:
    """Strict parser for the on-disk weight format: unknown fields are
    rejected, values must be rational strings, integers, or (numeric
    mode only) floats."""
    if not isinstance(obj, dict):
        raise ContractViolation("weight document must be a JSON object")
    unknown = set(obj) - set(_JSON_FIELDS)
    if unknown:
        raise ContractViolation(f"unknown weight fields: {sorted(unknown)}")
    mode = obj.get("mode", "exact")
    if mode not in _MODES:
        raise ContractViolation(f"mode must be one of {_MODES}")

    def scalar(x, name):
        if isinstance(x, bool):
            raise ContractViolation(f"{name} must be a number or rational string")
        if isinstance(x, float):
            if mode == "exact":
                raise ContractViolation(f"{name}: floats need numeric mode")
            return x
        if isinstance(x, (int, str)):
            try:
                return as_q(x)
            except (ValueError, ZeroDivisionError) as exc:
                raise ContractViolation(f"{name}: bad rational {x!r}") from exc
        raise ContractViolation(f"{name} must be a number or rational string")

    def vector(x, name):
        if not isinstance(x, list):
            raise ContractViolation(f"{name} must be an array")
        return tuple(scalar(c, name) for c in x)

    gamma = obj.get("gamma", 0)
    if not isinstance(gamma, int) or isinstance(gamma, bool):
        raise ContractViolation("gamma must be an integer")
    return WeightSpec(
        u_plus=vector(obj.get("u_plus", []), "u_plus"),
        u_minus=vector(obj.get("u_minus", []), "u_minus"),
        gamma=gamma,
        d1=scalar(obj.get("d1", 0), "d1"),
        d2=scalar(obj.get("d2", 0), "d2"),
        gp1=scalar(obj.get("gp1", 0), "gp1"),
        gp2=scalar(obj.get("gp2", 0), "gp2"),
        gpp1=scalar(obj.get("gpp1", 0), "gpp1"),
        gpp2=scalar(obj.get("gpp2", 0), "gpp2"),
        mode=mode,
    )
