"""Exact coefficient rings for the rest of the package.

Three element types, all with arbitrary-precision rational coefficients
(gmpy2.mpq when available, fractions.Fraction otherwise):

* Series: truncated power series in one variable, fixed order.
* GradedPoly over a GradedRing: multivariate polynomials truncated by
  weighted degree.
* LaurentSeries: truncated Laurent series in a formal perturbation with
  per-value validity tracking, so precision spent on inverting small
  denominators is never hidden.

Binary operations lift plain ints and rationals, so generic code can use
0 and 1 as identities.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Union

from .errors import ContractViolation, DomainError, NotInvertible, PrecisionExceeded

try:
    import gmpy2

    _QT = type(gmpy2.mpq(0))

    def _q_make(a, b=None):
        return gmpy2.mpq(a) if b is None else gmpy2.mpq(a, b)

except ImportError:  # pragma: no cover
    from fractions import Fraction as _QT

    def _q_make(a, b=None):
        return _QT(a) if b is None else _QT(a, b)

from fractions import Fraction as _Fraction

QLike = Union[int, str, _Fraction, _QT]


def as_q(a: QLike, b: QLike | None = None):
    """Coerce to an exact rational. Rejects floats on purpose: a float
    is a binary approximation and would poison exact identities."""
    if b is not None:
        return as_q(a) / as_q(b)
    if isinstance(a, _QT):
        return a
    if isinstance(a, bool):
        return _q_make(int(a))
    if isinstance(a, int):
        return _q_make(a)
    if isinstance(a, str):
        return _q_make(a.strip())
    if isinstance(a, _Fraction):
        return _q_make(a.numerator, a.denominator)
    raise ContractViolation(f"cannot coerce {type(a).__name__} to an exact rational")


QZERO = as_q(0)
QONE = as_q(1)


def _is_scalar(x) -> bool:
    return isinstance(x, (int, _QT, _Fraction))


# ---------------------------------------------------------------------------
# Truncated single-variable power series


class Series:
    """Power series in one variable modulo x**order.

    coeffs[k] is the coefficient of x**k, len(coeffs) == order. Binary
    operations demand equal orders; use truncate() to align explicitly.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Sequence[QLike], order: int | None = None):
        coeffs = [as_q(c) for c in coeffs]
        if order is None:
            order = len(coeffs)
        if len(coeffs) > order:
            raise ContractViolation("more coefficients than the stated order")
        coeffs.extend([QZERO] * (order - len(coeffs)))
        if order <= 0:
            raise ContractViolation("series order must be positive")
        self.coeffs = coeffs
        self.order = order

    @classmethod
    def zero(cls, order: int) -> "Series":
        return cls([], order)

    @classmethod
    def one(cls, order: int) -> "Series":
        return cls([QONE], order)

    @classmethod
    def const(cls, c: QLike, order: int) -> "Series":
        return cls([as_q(c)], order)

    @classmethod
    def variable(cls, order: int) -> "Series":
        if order < 2:
            raise ContractViolation("order too small to hold the variable")
        return cls([QZERO, QONE], order)

    def _lift(self, x) -> "Series":
        if isinstance(x, Series):
            if x.order != self.order:
                raise ContractViolation(
                    f"series order mismatch: {self.order} vs {x.order}"
                )
            return x
        return Series.const(as_q(x), self.order)

    def coeff(self, k: int):
        if k < 0:
            return QZERO
        if k >= self.order:
            raise PrecisionExceeded(f"coefficient {k} beyond order {self.order}")
        return self.coeffs[k]

    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise ContractViolation("cannot extend a truncated series")
        return Series(self.coeffs[:order], order)

    def is_zero(self, upto: int | None = None) -> bool:
        n = self.order if upto is None else min(upto + 1, self.order)
        return all(c == 0 for c in self.coeffs[:n])

    def __add__(self, other):
        other = self._lift(other)
        return Series([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    __radd__ = __add__

    def __neg__(self):
        return Series([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            c = as_q(other)
            return Series([c * a for a in self.coeffs], self.order)
        other = self._lift(other)
        n = self.order
        out = [QZERO] * n
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j in range(n - i):
                b = other.coeffs[j]
                if b != 0:
                    out[i + j] += a * b
        return Series(out, n)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            c = as_q(other)
            if c == 0:
                raise NotInvertible("division by zero scalar")
            return self * (QONE / c)
        return self * self._lift(other).inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ContractViolation("series powers must be integers")
        if k < 0:
            return self.inv() ** (-k)
        result = Series.one(self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inv(self) -> "Series":
        a = self.coeffs
        if a[0] == 0:
            raise NotInvertible("series has zero constant term")
        n = self.order
        c0 = QONE / a[0]
        out = [QZERO] * n
        out[0] = c0
        for k in range(1, n):
            acc = QZERO
            for j in range(1, k + 1):
                if a[j] != 0:
                    acc += a[j] * out[k - j]
            out[k] = -c0 * acc
        return Series(out, n)

    def exp(self) -> "Series":
        a = self.coeffs
        if a[0] != 0:
            raise DomainError("exp needs zero constant term")
        n = self.order
        out = [QZERO] * n
        out[0] = QONE
        for k in range(1, n):
            acc = QZERO
            for j in range(1, k + 1):
                if a[j] != 0:
                    acc += j * a[j] * out[k - j]
            out[k] = acc / k
        return Series(out, n)

    def log(self) -> "Series":
        a = self.coeffs
        if a[0] != 1:
            raise DomainError("log needs constant term one")
        n = self.order
        out = [QZERO] * n
        for k in range(1, n):
            acc = QZERO
            for j in range(1, k):
                if a[k - j] != 0 and out[j] != 0:
                    acc += j * out[j] * a[k - j]
            out[k] = a[k] - acc / k
        return Series(out, n)

    def diff(self) -> "Series":
        # honest order drop: the top coefficient of the derivative is unknown
        if self.order < 2:
            raise ContractViolation("cannot differentiate an order-1 series")
        return Series(
            [k * self.coeffs[k] for k in range(1, self.order)], self.order - 1
        )

    def eval(self, x):
        """Horner evaluation; x may be a float or a rational."""
        if isinstance(x, float):
            acc = 0.0
            for c in reversed(self.coeffs):
                acc = acc * x + float(c)
            return acc
        x = as_q(x)
        acc = QZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if _is_scalar(other):
            other = Series.const(as_q(other), self.order)
        if not isinstance(other, Series):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, tuple(self.coeffs)))

    def __repr__(self):
        terms = [
            f"{c}*x^{k}" if k else f"{c}"
            for k, c in enumerate(self.coeffs)
            if c != 0
        ]
        body = " + ".join(terms) if terms else "0"
        return f"Series({body} + O(x^{self.order}))"


# ---------------------------------------------------------------------------
# Weighted-graded multivariate polynomials


class GradedRing:
    """Ambient data for GradedPoly: variable names, positive integer
    weights, and the retained weighted degree (inclusive)."""

    def __init__(self, names: Sequence[str], weights: Sequence[int], order: int):
        names = tuple(names)
        weights = tuple(int(w) for w in weights)
        if len(names) != len(weights) or len(set(names)) != len(names):
            raise ContractViolation("names and weights must match and be distinct")
        if any(w < 1 for w in weights):
            raise ContractViolation("weights must be positive integers")
        if order < 0:
            raise ContractViolation("order must be nonnegative")
        self.names = names
        self.weights = weights
        self.order = order
        self._index = {n: i for i, n in enumerate(names)}
        self._wd_cache: dict[tuple, int] = {}

    def wd(self, exp: tuple) -> int:
        w = self._wd_cache.get(exp)
        if w is None:
            w = sum(e * wt for e, wt in zip(exp, self.weights))
            self._wd_cache[exp] = w
        return w

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ContractViolation(f"no variable named {name!r}") from None

    def zero(self) -> "GradedPoly":
        return GradedPoly(self, {})

    def one(self) -> "GradedPoly":
        return self.const(QONE)

    def const(self, c: QLike) -> "GradedPoly":
        c = as_q(c)
        zero_exp = (0,) * len(self.names)
        return GradedPoly(self, {zero_exp: c} if c != 0 else {})

    def gen(self, name: str) -> "GradedPoly":
        i = self.index(name)
        if self.weights[i] > self.order:
            raise ContractViolation(f"variable {name!r} does not fit in the order")
        exp = tuple(1 if j == i else 0 for j in range(len(self.names)))
        return GradedPoly(self, {exp: QONE})

    def gens(self) -> tuple:
        return tuple(self.gen(n) for n in self.names)

    def __eq__(self, other):
        if not isinstance(other, GradedRing):
            return NotImplemented
        return (
            self.names == other.names
            and self.weights == other.weights
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.names, self.weights, self.order))

    def __repr__(self):
        vars_ = ", ".join(f"{n}:{w}" for n, w in zip(self.names, self.weights))
        return f"GradedRing({vars_}; order={self.order})"


class GradedPoly:
    """Element of a GradedRing: exact modulo monomials of weighted
    degree above ring.order. terms maps exponent tuples to nonzero
    rationals."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: GradedRing, terms: dict):
        self.ring = ring
        self.terms = terms

    def _lift(self, x) -> "GradedPoly":
        if isinstance(x, GradedPoly):
            if x.ring != self.ring:
                raise ContractViolation("mixed graded rings")
            return x
        return self.ring.const(as_q(x))

    def coeff(self, exp: tuple):
        return self.terms.get(tuple(exp), QZERO)

    def constant(self):
        return self.terms.get((0,) * len(self.ring.names), QZERO)

    def is_zero(self, upto: int | None = None) -> bool:
        if upto is None:
            return not self.terms
        wd = self.ring.wd
        return all(c == 0 for e, c in self.terms.items() if wd(e) <= upto)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, QZERO) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return GradedPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return GradedPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            c = as_q(other)
            if c == 0:
                return self.ring.zero()
            return GradedPoly(self.ring, {e: c * v for e, v in self.terms.items()})
        other = self._lift(other)
        ring = self.ring
        order = ring.order
        wd = ring.wd
        # iterate in weighted-degree order so the inner loop can stop early
        a = sorted(self.terms.items(), key=lambda kv: wd(kv[0]))
        b = sorted(other.terms.items(), key=lambda kv: wd(kv[0]))
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        for ea, ca in a:
            wa = wd(ea)
            for eb, cb in b:
                if wa + wd(eb) > order:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, QZERO) + ca * cb
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return GradedPoly(ring, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            c = as_q(other)
            if c == 0:
                raise NotInvertible("division by zero scalar")
            return self * (QONE / c)
        return self * self._lift(other).inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ContractViolation("polynomial powers must be integers")
        if k < 0:
            return self.inv() ** (-k)
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inv(self) -> "GradedPoly":
        c = self.constant()
        if c == 0:
            raise NotInvertible("graded element has zero constant term")
        u = self * (QONE / c) - 1
        # geometric series; u^k has weighted degree >= k so this closes
        res = self.ring.one()
        for _ in range(self.ring.order):
            res = 1 - u * res
        return res * (QONE / c)

    def exp(self) -> "GradedPoly":
        if self.constant() != 0:
            raise DomainError("exp needs zero constant term")
        res = self.ring.one()
        for k in range(self.ring.order, 0, -1):
            res = 1 + (self * as_q(1, k)) * res
        return res

    def log(self) -> "GradedPoly":
        if self.constant() != 1:
            raise DomainError("log needs constant term one")
        u = self - 1
        res = self.ring.zero()
        for k in range(self.ring.order, 0, -1):
            res = as_q(1, k) - u * res
        return u * res

    def diff(self, name: str) -> "GradedPoly":
        i = self.ring.index(name)
        out: dict = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            e2 = e[:i] + (e[i] - 1,) + e[i + 1 :]
            out[e2] = out.get(e2, QZERO) + c * e[i]
        return GradedPoly(self.ring, {e: c for e, c in out.items() if c != 0})

    def integrate(self, name: str) -> "GradedPoly":
        """Antiderivative with zero constant term; monomials pushed past
        the ring order are dropped (they were not representable)."""
        ring = self.ring
        i = ring.index(name)
        out: dict = {}
        for e, c in self.terms.items():
            e2 = e[:i] + (e[i] + 1,) + e[i + 1 :]
            if ring.wd(e2) <= ring.order:
                out[e2] = c / (e[i] + 1)
        return GradedPoly(ring, out)

    def subs_scalar(self, values: dict):
        """Evaluate at a full point with rational coordinates."""
        vals = [as_q(values[n]) for n in self.ring.names]
        acc = QZERO
        for e, c in self.terms.items():
            term = c
            for x, k in zip(vals, e):
                if k:
                    term = term * x**k
            acc += term
        return acc

    def __eq__(self, other):
        if _is_scalar(other):
            other = self.ring.const(as_q(other))
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        ring = self.ring
        if not self.terms:
            return "GradedPoly(0)"
        items = sorted(self.terms.items(), key=lambda kv: (ring.wd(kv[0]), kv[0]))
        parts = []
        for e, c in items:
            factors = [
                n if k == 1 else f"{n}^{k}"
                for n, k in zip(ring.names, e)
                if k
            ]
            body = "*".join(factors)
            if not body:
                parts.append(f"{c}")
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c}*{body}")
        return "GradedPoly(" + " + ".join(parts).replace("+ -", "- ") + ")"


# ---------------------------------------------------------------------------
# Truncated Laurent series with validity tracking


def _vmin(a: int | None, b: int | None):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class LaurentSeries:
    """Laurent series in a formal perturbation, known exactly for all
    exponents below `valid` (None means known at every order).

    coeffs[i] is the coefficient of eps**(m+i). The stored range always
    ends just below `valid`, so every stored coefficient is trustworthy,
    including stored zeros. An empty coeffs list means "zero to order
    valid". Multiplication and inversion shrink `valid` by the usual
    Newton-polygon bookkeeping; nothing is ever reported beyond it.
    """

    __slots__ = ("m", "coeffs", "valid")

    def __init__(self, coeffs: Sequence[QLike], m: int = 0, valid: int | None = None):
        coeffs = [as_q(c) for c in coeffs]
        if valid is not None and m + len(coeffs) > valid:
            raise ContractViolation("coefficients extend past the validity bound")
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
            m += 1
        if not coeffs:
            m = 0 if valid is None else valid
        elif valid is not None:
            # invariant: with finite validity the stored range reaches it,
            # trailing zeros meaning "known to vanish"
            coeffs.extend([QZERO] * (valid - m - len(coeffs)))
        self.coeffs = coeffs
        self.m = m
        self.valid = valid

    @classmethod
    def scalar(cls, c: QLike) -> "LaurentSeries":
        return cls([as_q(c)], 0, None)

    @classmethod
    def eps(cls, valid: int | None = None) -> "LaurentSeries":
        return cls([QONE], 1, valid)

    def _effective_m(self) -> int | None:
        # exponent floor used by validity bookkeeping; None means +infinity
        if self.coeffs:
            return self.m
        return self.valid

    def _lift(self, x) -> "LaurentSeries":
        if isinstance(x, LaurentSeries):
            return x
        return LaurentSeries.scalar(as_q(x))

    def coeff(self, e: int):
        if self.valid is not None and e >= self.valid:
            raise PrecisionExceeded(
                f"coefficient of exponent {e} is beyond validity {self.valid}"
            )
        i = e - self.m
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return QZERO

    def lowest(self) -> int | None:
        """Exponent of the first known nonzero coefficient, or None if
        the known part is identically zero."""
        return self.m if self.coeffs else None

    def is_known_zero(self) -> bool:
        return not self.coeffs

    def with_valid(self, valid: int) -> "LaurentSeries":
        if self.valid is not None and valid > self.valid:
            raise ContractViolation("cannot extend validity")
        kept = [c for i, c in enumerate(self.coeffs) if self.m + i < valid]
        return LaurentSeries(kept, self.m if kept else 0, valid)

    def __add__(self, other):
        other = self._lift(other)
        v = _vmin(self.valid, other.valid)
        if not self.coeffs:
            return other.with_valid(v) if v is not None else other
        if not other.coeffs:
            return self.with_valid(v) if v is not None else self
        m = min(self.m, other.m)
        top = max(self.m + len(self.coeffs), other.m + len(other.coeffs))
        if v is not None:
            top = min(top, v)
        out = [QZERO] * (top - m)
        for i, c in enumerate(self.coeffs):
            if self.m + i < top:
                out[self.m + i - m] += c
        for i, c in enumerate(other.coeffs):
            if other.m + i < top:
                out[other.m + i - m] += c
        return LaurentSeries(out, m, v)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries([-c for c in self.coeffs], self.m, self.valid)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        ma, mb = self._effective_m(), other._effective_m()
        if self.valid is None and other.valid is None:
            v = None
        else:
            cands = []
            if self.valid is not None:
                cands.append(None if mb is None else self.valid + mb)
            if other.valid is not None:
                cands.append(None if ma is None else other.valid + ma)
            cands = [c for c in cands if c is not None]
            v = min(cands) if cands else None
        if not self.coeffs or not other.coeffs:
            return LaurentSeries([], 0, v)
        m = self.m + other.m
        n = len(self.coeffs) + len(other.coeffs) - 1
        if v is not None:
            n = min(n, v - m)
        out = [QZERO] * n
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            jmax = min(len(other.coeffs), n - i)
            for j in range(jmax):
                b = other.coeffs[j]
                if b != 0:
                    out[i + j] += a * b
        return LaurentSeries(out, m, v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self._lift(other).inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ContractViolation("powers must be integers")
        if k < 0:
            return self.inv() ** (-k)
        result = LaurentSeries.scalar(QONE)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inv(self) -> "LaurentSeries":
        if not self.coeffs:
            if self.valid is None:
                raise NotInvertible("inverse of exact zero")
            raise PrecisionExceeded(
                "cannot invert a value that is zero to its tracked order"
            )
        m, c0 = self.m, self.coeffs[0]
        rel = len(self.coeffs)  # relative orders known: exponents 1..rel-1
        if self.valid is None and rel > 1:
            raise ContractViolation(
                "inverse of an exact multi-term value is an infinite series; "
                "cap it with with_valid() first"
            )
        inv0 = QONE / c0
        out = [QZERO] * rel
        out[0] = QONE
        # (1 + u)^-1 with u the relative tail, computed order by order
        u = [c * inv0 for c in self.coeffs]
        for k in range(1, rel):
            acc = QZERO
            for j in range(1, k + 1):
                if u[j] != 0:
                    acc += u[j] * out[k - j]
            out[k] = -acc
        v = None if self.valid is None else self.valid - 2 * m
        return LaurentSeries([c * inv0 for c in out], -m, v)

    def __eq__(self, other):
        if isinstance(other, (LaurentSeries, int, _QT, _Fraction)):
            other = self._lift(other)
            return (
                self.m == other.m
                and self.coeffs == other.coeffs
                and self.valid == other.valid
            )
        return NotImplemented

    def __hash__(self):
        return hash((self.m, tuple(self.coeffs), self.valid))

    def __repr__(self):
        parts = [
            f"{c}*e^{self.m + i}"
            for i, c in enumerate(self.coeffs)
            if c != 0
        ]
        body = " + ".join(parts) if parts else "0"
        tail = "" if self.valid is None else f" + O(e^{self.valid})"
        return f"LaurentSeries({body}{tail})"


# ---------------------------------------------------------------------------


def exp_series_coefficients(tvec: dict, kmax: int) -> list:
    """Coefficients p_0..p_kmax of exp(sum_i tvec[i] z^i) in z.

    tvec maps positive indices to coefficients in any ring understood by
    the lifting rules (rationals, Series, GradedPoly). Standard
    recursion k p_k = sum_i i tvec[i] p_{k-i}.
    """
    if any(i < 1 for i in tvec):
        raise ContractViolation("exp_series_coefficients needs positive indices")
    p = [1]
    for k in range(1, kmax + 1):
        acc = 0
        for i, t in tvec.items():
            if i <= k:
                acc = acc + (i * t) * p[k - i]
        p.append(acc * as_q(1, k))
    return p


# ---------------------------------------------------------------------------
# Free-function spellings of the core operations


def series_mul(a: Series, b: Series) -> Series:
    return a * b


def series_inv(a: Series) -> Series:
    return a.inv()


def series_exp(a: Series) -> Series:
    return a.exp()


def series_log(a: Series) -> Series:
    return a.log()


def laurent_inv(a: LaurentSeries) -> LaurentSeries:
    return a.inv()


def schur_p(t: Sequence, k: int):
    """k-th coefficient of exp(sum_i t[i-1] z^i); zero for negative k."""
    if k < 0:
        return QZERO
    tvec = {i + 1: c for i, c in enumerate(t) if i < k and not _is_zeroish(c)}
    return exp_series_coefficients(tvec, k)[k]


def _is_zeroish(c) -> bool:
    if _is_scalar(c):
        return as_q(c) == 0
    return False
