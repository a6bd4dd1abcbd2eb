"""Interval evaluation of expressions over boxes, and refutation of conditions.

Soundness is with respect to the concrete double-precision evaluator in
:mod:`pathart.expr`: for every point of the box where an expression is
defined, its concrete value lies inside the interval returned by
:func:`iv_eval`.  Endpoints are rounded outward (one ULP for field
operations, a few for library functions).  When every operand is a single
point the concrete operation is applied directly, so one-point boxes
evaluate exactly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import expr as ex
from .errors import UnboundVariable
from .grid import InputBox

_INF = math.inf
_TWO_PI = 2 * math.pi
_HALF_PI = math.pi / 2


@dataclass(frozen=True)
class Interval:
    """Closed interval; ``maybe_undefined`` flags that some point of the box
    may make the expression undefined.  ``empty`` intervals have no defined
    point at all and their bounds are meaningless."""

    lo: float
    hi: float
    maybe_undefined: bool = False
    empty: bool = False

    def __post_init__(self):
        if not self.empty and not self.lo <= self.hi:
            raise ValueError(f"bad interval [{self.lo}, {self.hi}]")

    @property
    def is_point(self) -> bool:
        return not self.empty and self.lo == self.hi

    def contains(self, x: float) -> bool:
        return not self.empty and self.lo <= x <= self.hi

    def subset_of(self, other: "Interval") -> bool:
        if self.empty:
            return True
        return not other.empty and other.lo <= self.lo and self.hi <= other.hi

    def __repr__(self):
        flag = ", maybe_undefined" if self.maybe_undefined else ""
        if self.empty:
            return f"Interval(EMPTY{flag})"
        return f"Interval([{self.lo!r}, {self.hi!r}]{flag})"


EMPTY = Interval(math.nan, math.nan, True, True)
ENTIRE = Interval(-_INF, _INF, True)


def _down(x: float, ulps: int = 1) -> float:
    if math.isinf(x):
        return x
    for _ in range(ulps):
        x = math.nextafter(x, -_INF)
    return x


def _up(x: float, ulps: int = 1) -> float:
    if math.isinf(x):
        return x
    for _ in range(ulps):
        x = math.nextafter(x, _INF)
    return x


def _make(lo: float, hi: float, mu: bool, ulps: int = 1) -> Interval:
    if lo != lo:
        lo, mu = -_INF, True
    if hi != hi:
        hi, mu = _INF, True
    return Interval(_down(lo, ulps), _up(hi, ulps), mu)


def _mul_bound(a: float, b: float) -> float:
    # 0 * inf contributes 0 to the bound: the concrete 0 * inf is undefined
    if a == 0 or b == 0:
        return 0.0
    return a * b


def _has_zero_times_inf(a: Interval, b: Interval) -> bool:
    return (a.contains(0) and (math.isinf(b.lo) or math.isinf(b.hi))) or (
        b.contains(0) and (math.isinf(a.lo) or math.isinf(a.hi))
    )


def _hits(x_lo: float, x_hi: float, offset: float) -> bool:
    """Whether ``offset + 2*k*pi`` may lie in [x_lo, x_hi] for some integer k.

    Errs towards True near the edges.
    """
    t_lo = (x_lo - offset) / _TWO_PI
    t_hi = (x_hi - offset) / _TWO_PI
    guard = 1e-12 * max(1.0, abs(t_lo), abs(t_hi))
    return math.floor(t_hi + guard) >= math.ceil(t_lo - guard)


def _trig(a: Interval, fn, max_at: float, min_at: float) -> Interval:
    if math.isinf(a.lo) or math.isinf(a.hi):
        return Interval(-1.0, 1.0, True)
    if a.hi - a.lo >= _TWO_PI:
        return Interval(-1.0, 1.0, a.maybe_undefined)
    ya, yb = fn(a.lo), fn(a.hi)
    lo = max(-1.0, _down(min(ya, yb), 2))
    hi = min(1.0, _up(max(ya, yb), 2))
    if _hits(a.lo, a.hi, max_at):
        hi = 1.0
    if _hits(a.lo, a.hi, min_at):
        lo = -1.0
    return Interval(lo, hi, a.maybe_undefined)


def _pow_int(a: Interval, m: int) -> Interval:
    mu = a.maybe_undefined
    p = ex._pow
    if m == 0:
        return Interval(1.0, 1.0, mu)
    if m > 0:
        if m % 2 == 1:
            return _make(p(a.lo, m), p(a.hi, m), mu, 2)
        if a.lo >= 0:
            return _make(p(a.lo, m), p(a.hi, m), mu, 2)
        if a.hi <= 0:
            return _make(p(a.hi, m), p(a.lo, m), mu, 2)
        return Interval(0.0, _up(max(p(a.lo, m), p(a.hi, m)), 2), mu)
    # negative exponent: undefined at 0
    if a.lo < 0 < a.hi:
        return ENTIRE
    if a.lo == 0 and a.hi == 0:
        return EMPTY
    if a.lo == 0:
        return Interval(max(0.0, _down(p(a.hi, m), 2)), _INF, True)
    if a.hi == 0:
        if m % 2 == 1:
            return Interval(-_INF, _up(p(a.lo, m), 2), True)
        return Interval(max(0.0, _down(p(a.lo, m), 2)), _INF, True)
    ya, yb = p(a.lo, m), p(a.hi, m)
    return _make(min(ya, yb), max(ya, yb), mu, 2)


def _pow(a: Interval, b: Interval) -> Interval:
    if b.is_point and float(b.lo).is_integer() and not math.isinf(b.lo):
        r = _pow_int(a, int(b.lo))
        if b.maybe_undefined and not r.empty:
            r = Interval(r.lo, r.hi, True)
        return r
    mu = a.maybe_undefined or b.maybe_undefined
    p = ex._pow
    if b.is_point:
        e = b.lo
        if a.hi < 0:
            return EMPTY
        lo = a.lo
        if lo < 0:
            lo, mu = 0.0, True
        if e > 0:
            return Interval(max(0.0, _down(p(lo, e), 2)), _up(p(a.hi, e), 2), mu)
        if a.hi == 0:
            return EMPTY
        if lo == 0:
            return Interval(max(0.0, _down(p(a.hi, e), 2)), _INF, True)
        return Interval(max(0.0, _down(p(a.hi, e), 2)), _up(p(lo, e), 2), mu)
    if a.lo > 0:
        r = _unary("exp", _binary(ex.Mul, b, _unary("log", a)))
        return Interval(max(0.0, _down(r.lo, 4)), _up(r.hi, 4), mu or r.maybe_undefined)
    return ENTIRE


def _unary(fn: str, a: Interval) -> Interval:
    mu = a.maybe_undefined
    if fn == "sin":
        return _trig(a, math.sin, _HALF_PI, -_HALF_PI)
    if fn == "cos":
        return _trig(a, math.cos, 0.0, math.pi)
    if fn == "sqrt":
        if a.hi < 0:
            return EMPTY
        lo = a.lo
        if lo < 0:
            lo, mu = 0.0, True
        return Interval(max(0.0, _down(math.sqrt(lo))), _up(math.sqrt(a.hi)), mu)
    if fn == "log":
        if a.hi <= 0:
            return EMPTY
        if a.lo <= 0:
            return Interval(-_INF, _up(ex._log(a.hi), 2), True)
        return _make(ex._log(a.lo), ex._log(a.hi), mu, 2)
    if fn == "exp":
        return Interval(max(0.0, _down(ex._exp(a.lo), 2)), _up(ex._exp(a.hi), 2), mu)
    if fn == "abs":
        if a.lo >= 0:
            return a
        if a.hi <= 0:
            return Interval(-a.hi, -a.lo, mu)
        return Interval(0.0, max(-a.lo, a.hi), mu)
    raise ValueError(f"no interval rule for {fn!r}")


def _binary(cls, a: Interval, b: Interval) -> Interval:
    mu = a.maybe_undefined or b.maybe_undefined
    if cls is ex.Add:
        return _make(a.lo + b.lo, a.hi + b.hi, mu)
    if cls is ex.Sub:
        return _make(a.lo - b.hi, a.hi - b.lo, mu)
    if cls is ex.Mul:
        ps = [_mul_bound(x, y) for x in (a.lo, a.hi) for y in (b.lo, b.hi)]
        return _make(min(ps), max(ps), mu or _has_zero_times_inf(a, b))
    if cls is ex.Div:
        if b.lo <= 0 <= b.hi:
            return ENTIRE
        qs = [x / y for x in (a.lo, a.hi) for y in (b.lo, b.hi)]
        if any(q != q for q in qs):
            return ENTIRE
        return _make(min(qs), max(qs), mu)
    raise ValueError(f"no interval rule for {cls.__name__}")


def _call2(fn: str, a: Interval, b: Interval) -> Interval:
    mu = a.maybe_undefined or b.maybe_undefined
    if fn == "min":
        return Interval(min(a.lo, b.lo), min(a.hi, b.hi), mu)
    if fn == "max":
        return Interval(max(a.lo, b.lo), max(a.hi, b.hi), mu)
    if fn == "pow":
        return _pow(a, b)
    raise ValueError(f"no interval rule for {fn!r}")


def _point(value: float, mu: bool) -> Interval:
    if value != value:
        return EMPTY
    return Interval(value, value, mu)


def iv_eval(e: ex.NumExpr, box: InputBox) -> Interval:
    """Natural interval extension of ``e`` over ``box``."""
    if isinstance(e, ex.Const):
        return Interval(e.value, e.value)
    if isinstance(e, ex.Var):
        for dim in box.dims:
            if dim.name == e.name:
                return Interval(float(dim.lo), float(dim.hi))
        raise UnboundVariable(e.name)
    if isinstance(e, ex.Neg):
        a = iv_eval(e.child, box)
        if a.empty:
            return EMPTY
        return Interval(-a.hi, -a.lo, a.maybe_undefined)
    if isinstance(e, ex._Binary):
        a, b = iv_eval(e.left, box), iv_eval(e.right, box)
        if a.empty or b.empty:
            return EMPTY
        if a.is_point and b.is_point:
            v = ex._eval(type(e)(ex.Const(a.lo), ex.Const(b.lo)), {})
            return _point(v, a.maybe_undefined or b.maybe_undefined)
        return _binary(type(e), a, b)
    if isinstance(e, ex.Call):
        args = [iv_eval(x, box) for x in e.args]
        if any(a.empty for a in args):
            return EMPTY
        mu = any(a.maybe_undefined for a in args)
        if all(a.is_point for a in args):
            return _point(ex.FUNCTIONS[e.function][1](*(a.lo for a in args)), mu)
        if len(args) == 1:
            return _unary(e.function, args[0])
        return _call2(e.function, *args)
    raise TypeError(f"not a numeric expression: {e!r}")


class Verdict(enum.Enum):
    UNSAT = "unsat"
    UNKNOWN = "unknown"


def _separated(op: str, a: Interval, b: Interval) -> bool:
    if op == "<=":
        return a.lo > b.hi
    if op == "<":
        return a.lo >= b.hi
    if op == ">=":
        return a.hi < b.lo
    if op == ">":
        return a.hi <= b.lo
    if op == "==":
        return a.lo > b.hi or a.hi < b.lo
    if op == "!=":
        return (
            a.is_point and b.is_point and a.lo == b.lo
            and not (a.maybe_undefined or b.maybe_undefined)
        )
    raise ValueError(f"unknown relational operator {op!r}")


def refute_predicate(p: ex.Predicate, box: InputBox) -> Verdict:
    """UNSAT only if no point of ``box`` can satisfy ``p``."""
    a, b = iv_eval(p.lhs, box), iv_eval(p.rhs, box)
    if a.empty or b.empty:
        return Verdict.UNSAT
    return Verdict.UNSAT if _separated(p.op, a, b) else Verdict.UNKNOWN


def refute_pc(pc: ex.PathCondition, box: InputBox) -> Verdict:
    if isinstance(pc, ex.Leaf):
        return refute_predicate(pc.pred, box)
    if isinstance(pc, ex.And):
        # evaluate every child so unbound variables are always reported
        verdicts = [refute_pc(c, box) for c in pc.children]
        return Verdict.UNSAT if Verdict.UNSAT in verdicts else Verdict.UNKNOWN
    if isinstance(pc, ex.Or):
        verdicts = [refute_pc(c, box) for c in pc.children]
        return Verdict.UNSAT if all(v is Verdict.UNSAT for v in verdicts) else Verdict.UNKNOWN
    if isinstance(pc, ex.Not):
        refute_pc(pc.child, box)
        return Verdict.UNKNOWN
    raise TypeError(f"not a path condition: {pc!r}")
