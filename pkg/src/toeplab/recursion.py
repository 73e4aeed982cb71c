"""Recursion relations for the ratio variables, and their forward solver.

Three residual families are evaluated on a lattice view of a state:

  * the two-boundary family (first and second kind, plus the mirror of
    the second kind under the x/y involution),
  * the pure-exponential pair (gamma, gamma~), dual to each other,
  * the self-dual single relation, in a division-free form.

Every residual is the zero element on a determinant-built state.  The
forward solver treats a designated pair of residuals as affine in the two
highest-index unknowns and recovers the affine map by evaluating at
(0, 0), (1, 0), (0, 1).  The confinement probe drives the self-dual
solver over a formal Laurent ring in a small parameter and checks that a
seeded blow-up heals after two steps.
"""

from dataclasses import dataclass, field

from .errors import (
    ConfinementFailure,
    ConsistencyFailure,
    ContractViolation,
    DomainError,
    InsufficientState,
    NotInvertible,
    SingularVariable,
    UnsolvableStep,
)
from .lattice import LatticeView, _is_exact_zero, power_entry, script_entry, script_matrix
from .rings import LaurentSeries, as_q
from .toeplitz import divide, solve_linear
from .weights import WeightSpec, classify_case


def _view(state) -> LatticeView:
    if isinstance(state, LatticeView):
        return state
    return LatticeView.from_state(state)


def _abc_for(w: WeightSpec, abc):
    if abc is None:
        return classify_case(w).abc
    if len(abc) != 3:
        raise ContractViolation("abc must be a length-3 triple")
    return tuple(abc)


def is_zero_value(val, tol=None) -> bool:
    """Exact zero test for ring elements, tolerance test for floats."""
    if isinstance(val, float):
        return abs(val) <= (1e-10 if tol is None else tol)
    if isinstance(val, complex):
        return abs(val) <= (1e-10 if tol is None else tol)
    if isinstance(val, LaurentSeries):
        return val.is_known_zero()
    probe = getattr(val, "is_zero", None)
    if probe is not None:
        return probe()
    return val == 0


def residual_case12_first(state, w: WeightSpec, n: int, abc=None):
    """Difference of consecutive diagonal entries of the boundary
    combinations, plus the first-order band correction.

    Needs x, y through index n + max(N1, N2) + 1; missing indices raise
    InsufficientState from the view.
    """
    if n < 1:
        raise ContractViolation("first residual needs n >= 1")
    view = _view(state)
    abc = _abc_for(w, abc)
    a, _, c = abc

    def diag(k):
        s1 = script_matrix(view, w, abc, k, 1)
        s2 = script_matrix(view, w, abc, k, 2)
        return script_entry(s1, k, k) - script_entry(s2, k, k)

    corr = c * power_entry(view, 1, 1, n, n) - a * power_entry(view, 2, 1, n, n)
    return diag(n + 1) - diag(n) + corr


def _second_pieces(view, w, abc, k, dual):
    # S(k) on the subdiagonal and the T(k) band term; the dual form is
    # the same pair after the x/y involution, read off the superdiagonal
    a, b, c = abc
    s1 = script_matrix(view, w, abc, k, 1)
    s2 = script_matrix(view, w, abc, k, 2)
    if not dual:
        s_val = view._v(k) * script_entry(s1, k + 1, k) - script_entry(s2, k + 1, k)
        t_val = c * power_entry(view, 1, 2, k, k) + b * power_entry(view, 1, 1, k, k)
    else:
        s_val = script_entry(s1, k, k + 1) - view._v(k) * script_entry(s2, k, k + 1)
        t_val = -(a * power_entry(view, 2, 2, k, k) + b * power_entry(view, 2, 1, k, k))
    return s_val, t_val


def second_constant(state, w: WeightSpec, abc=None, dual: bool = False):
    """The telescoping constant: the k = 1 window value S(1) + T(1).

    The subdiagonal entry at k = 0 is taken as zero, which is the
    boundary convention that makes the constant well defined.
    """
    view = _view(state)
    abc = _abc_for(w, abc)
    s1, t1 = _second_pieces(view, w, abc, 1, dual)
    return s1 + t1


def residual_case12_second(state, w: WeightSpec, n: int, abc=None, dual: bool = False):
    """Telescoped subdiagonal relation E(n) - E(1), where
    E(k) = S(k) - S(k-1) + T(k) and E(1) plays the integration constant.

    Trivially zero at n = 1; meaningful from n = 2 on.  dual=True gives
    the mirror relation on the superdiagonal.
    """
    if n < 1:
        raise ContractViolation("second residual needs n >= 1")
    view = _view(state)
    abc = _abc_for(w, abc)

    def window(k):
        s_k, t_k = _second_pieces(view, w, abc, k, dual)
        if k == 1:
            return s_k + t_k
        s_prev, _ = _second_pieces(view, w, abc, k - 1, dual)
        return s_k - s_prev + t_k

    return window(n) - window(1)


def _exp_band_sum(view, which, coeffs, i, j, shift=0):
    # (sum_p c_p L^(p+shift))_{ij} over one side's exponential tail
    acc = None
    for p, cp in coeffs:
        if _is_exact_zero(cp):
            continue
        term = cp * power_entry(view, which, p + shift, i, j)
        acc = term if acc is None else acc + term
    return 0 if acc is None else acc


def _exp_coeffs(w, which):
    sgn = 1 if which == 1 else -1
    top = w.n1 if which == 1 else w.n2
    return [(p, w.u(sgn * p)) for p in range(1, top + 1)]


def residual_case3(state, w: WeightSpec, n: int, form: str = "polynomial"):
    """The dual residual pair for a weight with no boundary factors.

    form="polynomial" (default) returns the pair cleared of the 1/y_n and
    1/x_n prefactors, which is exact on any state.  form="rational"
    performs the divisions and raises SingularVariable(n) when y_n or
    x_n is not invertible in its ring.
    """
    if n < 1:
        raise ContractViolation("case-3 residual needs n >= 1")
    if form not in ("polynomial", "rational"):
        raise ContractViolation("form must be 'polynomial' or 'rational'")
    view = _view(state)
    c1 = _exp_coeffs(w, 1)
    c2 = _exp_coeffs(w, 2)
    xn, yn, vn = view._x(n), view._y(n), view._v(n)

    off = _exp_band_sum(view, 1, c1, n + 1, n, shift=-1) + _exp_band_sum(
        view, 2, c2, n, n + 1, shift=-1
    )
    bracket_g = off - _exp_band_sum(view, 1, c1, n + 1, n + 1) - _exp_band_sum(view, 2, c2, n, n)
    bracket_gt = off - _exp_band_sum(view, 1, c1, n, n) - _exp_band_sum(view, 2, c2, n + 1, n + 1)

    if form == "polynomial":
        g = vn * bracket_g + (xn * yn) * n
        gt = vn * bracket_gt + (xn * yn) * n
        return g, gt
    try:
        g = divide(vn * bracket_g, yn) + xn * n
    except NotInvertible:
        raise SingularVariable(n, "y at this index is not invertible") from None
    try:
        gt = divide(vn * bracket_gt, xn) + yn * n
    except NotInvertible:
        raise SingularVariable(n, "x at this index is not invertible") from None
    return g, gt


def residual_selfdual(state, u, k: int, form: str = "direct"):
    """Single recurrence residual for an even symmetric weight, x = y.

    u is the vector (u_1 .. u_N) of exponential coefficients.  The
    default form is division free; it agrees with form="rational"
    exactly when the state satisfies v = 1 - x^2.
    """
    if k < 1:
        raise ContractViolation("self-dual residual needs k >= 1")
    if form not in ("direct", "rational"):
        raise ContractViolation("form must be 'direct' or 'rational'")
    view = _view(state)
    big_n = len(u)
    xk = view._x(k)
    if big_n == 0:
        return xk * k
    vk = view._v(k)

    if form == "rational":
        coeffs = list(enumerate(u, start=1))
        bracket = (
            _exp_band_sum(view, 1, coeffs, k + 1, k + 1)
            + _exp_band_sum(view, 1, coeffs, k, k)
            - 2 * _exp_band_sum(view, 1, coeffs, k + 1, k, shift=-1)
        )
        try:
            return xk * k - divide(vk * bracket, xk)
        except NotInvertible:
            raise SingularVariable(k, "x at this index is not invertible") from None

    acc = None
    for i, ui in enumerate(u, start=1):
        if _is_exact_zero(ui):
            continue
        part = None
        for j in range(k - 1, k + i):
            term = view._x(j + 1) * power_entry(view, 1, i - 1, k + 1, j + 1)
            part = term if part is None else part + term
        for j in range(max(1, k - i + 1), k + 2):
            term = view._x(j - 1) * power_entry(view, 1, i - 1, j, k)
            part = term if part is None else part + term
        term = ui * part
        acc = term if acc is None else acc + term
    if acc is None:
        return xk * k
    return xk * k + vk * acc


@dataclass
class RecursionReport:
    """Residual values of one weight's applicable relation family."""

    case_id: str
    abc: tuple | None
    residuals: dict
    constants: dict = field(default_factory=dict)
    verified: bool = False


def verify_relations(state, w: WeightSpec, ns=None, abc=None, tol=None) -> RecursionReport:
    """Evaluate every residual the weight's case admits at each n in ns.

    ns defaults to the largest index range the state supports.  The
    verified flag is set only when every stored residual is the zero
    element of its ring (floats: within tol, default 1e-10).
    """
    view = _view(state)
    tag = classify_case(w)
    n_max = view.n_max
    big = max(w.n1, w.n2)
    residuals: dict = {}
    constants: dict = {}

    if tag.case_id in ("Case1", "Case2"):
        abc_used = _abc_for(w, abc)
        hi = n_max - big - 1
        points = list(ns) if ns is not None else list(range(1, hi))
        if not points:
            raise InsufficientState("state too short for any residual window")
        constants["C"] = second_constant(state, w, abc=abc_used)
        constants["C_dual"] = second_constant(state, w, abc=abc_used, dual=True)
        for n in points:
            residuals[("first", n)] = residual_case12_first(state, w, n, abc=abc_used)
            residuals[("second", n)] = residual_case12_second(state, w, n, abc=abc_used)
            residuals[("second_dual", n)] = residual_case12_second(
                state, w, n, abc=abc_used, dual=True
            )
    elif tag.case_id == "Case3":
        abc_used = None
        points = list(ns) if ns is not None else list(range(1, n_max - big + 1))
        if not points:
            raise InsufficientState("state too short for any residual window")
        for n in points:
            g, gt = residual_case3(state, w, n)
            residuals[("gamma", n)] = g
            residuals[("gamma_dual", n)] = gt
    else:
        abc_used = None
        u = list(w.u_plus)
        points = list(ns) if ns is not None else list(range(1, n_max - max(w.n1, 1) + 1))
        if not points:
            raise InsufficientState("state too short for any residual window")
        for k in points:
            residuals[("selfdual", k)] = residual_selfdual(state, u, k)

    ok = all(is_zero_value(v, tol) for v in residuals.values())
    return RecursionReport(
        case_id=tag.case_id,
        abc=abc_used,
        residuals=residuals,
        constants=constants,
        verified=ok,
    )


@dataclass
class PartialState:
    """Bare (x, y) history for the forward solver.  v is derived; padded
    None entries mark indices a windowed computation must never read."""

    x: list
    y: list

    @property
    def v(self):
        return [
            None if xi is None or yi is None else 1 - xi * yi
            for xi, yi in zip(self.x, self.y)
        ]

    @property
    def n_max(self):
        return len(self.x) - 1


# Row tables for the 2x2 solve, keyed by case and by the degree gap
# N1 - N2.  Each row is (residual kind, shift); the residual is placed
# at base index m - N1 + shift for unknown index m.  The pairing follows
# the two-highest/two-lowest term rule; second-kind rows need base >= 2
# to escape the trivial k = 1 zero.
_CASE1_ROWS = {
    0: (("first", -1), ("second", -1)),
    -1: (("first", -2), ("second", -1)),
    1: (("first", -1), ("second_dual", 0)),
}

# Case 2 rows additionally depend on which end of the boundary triple is
# zero: "a0" means abc = (0, 1, -d), "c0" means abc = (1, -d, 0).
_CASE2_ROWS = {
    (0, "a0"): (("first", -1), ("second_dual", 0)),
    (0, "c0"): (("second", 0), ("first", -1)),
    (-1, "a0"): (("first", -1), ("second", -1)),
    (1, "c0"): (("first", 0), ("second_dual", 0)),
}

_CASE3_ROWS = {
    0: (("gamma", 0), ("gamma_dual", 0)),
    -1: (("gamma", 0), ("gamma_dual", -1)),
    1: (("gamma", 0), ("gamma_dual", 1)),
}


def _case2_kind(abc) -> str:
    if _is_exact_zero(abc[0]):
        return "a0"
    if _is_exact_zero(abc[2]):
        return "c0"
    raise ContractViolation("a one-boundary triple must have a zero end")


def _residual_by_kind(kind, trial, w, base, abc):
    if kind == "first":
        return residual_case12_first(trial, w, base, abc=abc)
    if kind == "second":
        return residual_case12_second(trial, w, base, abc=abc)
    if kind == "second_dual":
        return residual_case12_second(trial, w, base, abc=abc, dual=True)
    if kind == "gamma":
        return residual_case3(trial, w, base)[0]
    if kind == "gamma_dual":
        return residual_case3(trial, w, base)[1]
    raise ContractViolation(f"unknown residual kind {kind!r}")


def solve_forward(state, w: WeightSpec, abc=None, check_against=None):
    """One forward step: compute (x_m, y_m) for m = len(state.x) from the
    case's designated residual pair, treated as affine in the unknowns.

    check_against, when given, is a reference state holding index m; a
    mismatch beyond truncation order raises ConsistencyFailure.  Singular
    leading 2x2 systems raise UnsolvableStep(m).
    """
    xs, ys = list(state.x), list(state.y)
    m = len(xs)
    if len(ys) != m:
        raise ContractViolation("x and y histories must have equal length")
    if m < 2:
        raise InsufficientState("need history through index 1 at least")
    tag = classify_case(w)
    gap = w.n1 - w.n2

    if tag.case_id == "SelfDual":
        out = _solve_selfdual_step(xs, w, m)
        result = (out, out)
    else:
        if gap not in (-1, 0, 1):
            raise ContractViolation(
                "no pairing rule for exponential degrees differing by more than one"
            )
        if tag.case_id == "Case1":
            abc_used = _abc_for(w, abc)
            rows = _CASE1_ROWS[gap]
        elif tag.case_id == "Case2":
            if abc is None:
                # the zero-gap pairing wants the (0, 1, -d) end; otherwise
                # take the classifier's preferred triple
                if gap == 0:
                    cands = [classify_case(w).abc, classify_case(w).alternate_abc]
                    abc_used = next(t for t in cands if _is_exact_zero(t[0]))
                else:
                    abc_used = classify_case(w).abc
            else:
                abc_used = _abc_for(w, abc)
            key = (gap, _case2_kind(abc_used))
            if key not in _CASE2_ROWS:
                raise ContractViolation(
                    f"triple {abc_used!r} has no pairing at degree gap {gap}"
                )
            rows = _CASE2_ROWS[key]
        else:
            abc_used = None
            rows = _CASE3_ROWS[gap]

        bases = []
        for kind, shift in rows:
            base = m - w.n1 + shift
            floor = 2 if kind.startswith("second") else 1
            if base < floor:
                raise InsufficientState(
                    f"history too short: residual {kind} would sit at index {base}"
                )
            bases.append(base)

        def probe(tx, ty):
            trial = PartialState(xs + [tx], ys + [ty])
            return [
                _residual_by_kind(kind, trial, w, base, abc_used)
                for (kind, _), base in zip(rows, bases)
            ]

        r00 = probe(0, 0)
        r10 = probe(1, 0)
        r01 = probe(0, 1)
        A = [[r10[i] - r00[i], r01[i] - r00[i]] for i in range(2)]
        rhs = [-r00[i] for i in range(2)]
        try:
            sol = solve_linear(A, rhs)
        except NotInvertible as exc:
            raise UnsolvableStep(m, f"singular leading system: {exc}") from None
        result = (sol[0], sol[1])

    if check_against is not None:
        for got, ref in zip(result, (check_against.x[m], check_against.y[m])):
            if not is_zero_value(got - ref):
                raise ConsistencyFailure(
                    f"solved index {m} disagrees with the reference state"
                )
    return result


def _solve_selfdual_step(xs, w: WeightSpec, m: int):
    u = list(w.u_plus)
    big_n = max(w.n1, 1)
    base = m - big_n
    if base < 1:
        raise InsufficientState(
            f"history too short: self-dual residual would sit at index {base}"
        )
    if w.n1 == 0 or _is_exact_zero(u[-1]):
        raise UnsolvableStep(m, "top exponential coefficient is zero")

    def probe(t):
        trial = PartialState(xs + [t], xs + [t])
        return residual_selfdual(trial, u, base)

    r0 = probe(0)
    r1 = probe(1)
    slope = r1 - r0
    try:
        return divide(-r0, slope)
    except NotInvertible as exc:
        raise UnsolvableStep(m, f"singular leading coefficient: {exc}") from None


def solve_chain(state, w: WeightSpec, upto: int, abc=None, check_against=None) -> PartialState:
    """Extend the history index by index through `upto`; returns a new
    PartialState and leaves the input untouched."""
    xs, ys = list(state.x), list(state.y)
    while len(xs) <= upto:
        nx, ny = solve_forward(
            PartialState(xs, ys), w, abc=abc, check_against=check_against
        )
        xs.append(nx)
        ys.append(ny)
    return PartialState(xs, ys)


def invariant_phi(kind: str, window, n: int, t, s=None):
    """Conserved quantity of the three-step and five-step maps.

    kind="three_step": window is the adjacent pair (x_{n+1}, x_n) and the
    value is (1 - y^2)(1 - z^2) + a y z with a = -n/t.  When t is not
    invertible in its ring, the value is returned scaled through by t;
    the shift identity is insensitive to that overall factor.

    kind="five_step": window is (x_{n-1}, x_n, x_{n+1}, x_{n+2}) in
    ascending order and the value is
    n y z - (1 - y^2)(1 - z^2)(t + 2 s (x (u - y) - z (u + y))) with
    slots (x, y, z, u) read from the window.  The n multiplying y z is
    the index of the y slot.
    """
    if kind == "three_step":
        if len(window) != 2:
            raise ContractViolation("three_step takes a window of 2 values")
        y_, z_ = window
        base = (1 - y_ * y_) * (1 - z_ * z_)
        try:
            a = divide(-n, t)
        except NotInvertible:
            return t * base - (y_ * z_) * n
        return base + a * (y_ * z_)
    if kind == "five_step":
        if len(window) != 4:
            raise ContractViolation("five_step takes a window of 4 values")
        if s is None:
            raise ContractViolation("five_step needs the second coefficient s")
        x_, y_, z_, u_ = window
        tail = t + (x_ * (u_ - y_) - z_ * (u_ + y_)) * (2 * s)
        return (y_ * z_) * n - (1 - y_ * y_) * (1 - z_ * z_) * tail
    raise ContractViolation("kind must be 'three_step' or 'five_step'")


@dataclass
class ConfinementReport:
    """Outcome of one blow-up probe: seed window, lowest exponent of each
    probed value, and the leading data at the singular step."""

    n: int
    sign: int
    mode: str
    order: int
    window: dict
    exponents: dict
    blow_coeff: object = None
    blow_const: object = None
    post_value: object = None


def _lift_laurent(val) -> LaurentSeries:
    if isinstance(val, LaurentSeries):
        return val
    return LaurentSeries.scalar(as_q(val))


def _lowest_or_none(val):
    return _lift_laurent(val).lowest()


def confinement_probe(
    w: WeightSpec, n: int, order: int, sign: int = 1, seed=None, window=None, probe_past: int = 4
) -> ConfinementReport:
    """Seed x_{n-1} = sign + eps on a generic rational window and run the
    self-dual solver over the formal Laurent ring in eps.

    Default mode checks the heal pattern: x_n blows up like 1/eps,
    x_{n+1} returns to -sign + O(eps), and everything after stays
    finite through n + probe_past.  Passing an explicit eps-free seed
    switches to a regularity probe: every exponent must be nonnegative.
    Pattern violations raise ConfinementFailure; a seed that fails to
    blow up in default mode raises DomainError as degenerate data.
    """
    tag = classify_case(w)
    if tag.case_id != "SelfDual":
        raise ContractViolation("confinement probe needs a self-dual weight")
    if sign not in (1, -1):
        raise ContractViolation("sign must be +1 or -1")
    if order < 1:
        raise ContractViolation("order must be positive")
    big_n = w.n1
    u = list(w.u_plus)
    if big_n < 1 or _is_exact_zero(u[-1]):
        raise DomainError("blow-up analysis needs a nonzero top coefficient")
    if n < 2 * big_n + 1:
        raise DomainError("n too small: the seed window would reach index 0")

    if window is None:
        # generic rationals, kept away from 0 and +-1 so no v vanishes
        window = [as_q(i + 2, 2 * i + 5) for i in range(2 * big_n - 1)]
    window = [as_q(v) if not isinstance(v, LaurentSeries) else v for v in window]
    if len(window) != 2 * big_n - 1:
        raise ContractViolation(f"window must hold {2 * big_n - 1} values")

    eps = LaurentSeries.eps(valid=order + 8)
    if seed is None:
        mode = "blowup"
        seed_val = sign + eps
    else:
        mode = "regular"
        if isinstance(seed, LaurentSeries):
            if seed.valid is None and len(seed.coeffs) > 1:
                seed = seed.with_valid(order + 8)
            seed_val = seed
        else:
            seed_val = _lift_laurent(seed)

    lo = n - 2 * big_n
    xs = [None] * lo + list(window) + [seed_val]
    state = solve_chain(PartialState(xs, xs), w, n + probe_past)

    probed = list(range(n, n + probe_past + 1))
    exponents = {k: _lowest_or_none(state.x[k]) for k in probed}
    report = ConfinementReport(
        n=n,
        sign=sign,
        mode=mode,
        order=order,
        window={lo + i: v for i, v in enumerate(window)} | {n - 1: seed_val},
        exponents=exponents,
    )

    if mode == "regular":
        for k in probed:
            e = exponents[k]
            if e is not None and e < 0:
                raise ConfinementFailure(f"regular seed blew up at index {k}")
        return report

    e_n = exponents[n]
    if e_n is None or e_n > -1:
        raise DomainError("degenerate initial data: no blow-up at the seeded step")
    if e_n < -1:
        raise ConfinementFailure(f"blow-up at index {n} is stronger than a simple pole")
    blow = _lift_laurent(state.x[n])
    post = _lift_laurent(state.x[n + 1])
    report.blow_coeff = blow.coeff(-1)
    report.blow_const = blow.coeff(0)
    e_post = exponents[n + 1]
    if e_post is not None and e_post < 0:
        raise ConfinementFailure(f"index {n + 1} did not return to finite values")
    report.post_value = post.coeff(0)
    if report.post_value != as_q(-sign):
        raise ConfinementFailure(
            f"index {n + 1} settled at {report.post_value} instead of {-sign}"
        )
    for k in probed[2:]:
        e = exponents[k]
        if e is not None and e < 0:
            raise ConfinementFailure(f"index {k} escaped after the heal step")
    return report
