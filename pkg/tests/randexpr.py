"""Seeded random generators of expressions, conditions and boxes for tests."""
import random

from pathart.expr import (
    FUNCTIONS, RELOPS, Add, And, Call, Const, Div, Leaf, Mul, Neg, Not, Or,
    Predicate, Sub, Var,
)
from pathart.grid import InputBox, VarDomain

_BINARY = (Add, Sub, Mul, Div)
_CONSTS = (0.0, 0.5, 1.0, 2.0, 3.0, 7.0, 0.2, 8.0, 16.0, 1e-3, 100.0)


def rand_const(rng):
    if rng.random() < 0.5:
        return Const(rng.choice(_CONSTS))
    return Const(round(rng.uniform(0, 20), rng.choice((0, 1, 3, 6))))


def rand_expr(rng, names=("x", "y"), depth=4):
    if depth <= 0 or rng.random() < 0.25:
        return Var(rng.choice(names)) if rng.random() < 0.6 else rand_const(rng)
    r = rng.random()
    if r < 0.1:
        return Neg(rand_expr(rng, names, depth - 1))
    if r < 0.55:
        cls = rng.choice(_BINARY)
        return cls(rand_expr(rng, names, depth - 1), rand_expr(rng, names, depth - 1))
    fn = rng.choice(sorted(FUNCTIONS))
    if fn == "pow" and rng.random() < 0.6:
        # mostly small integer exponents, as in real path conditions
        return Call("pow", (rand_expr(rng, names, depth - 1), Const(float(rng.randint(0, 4)))))
    arity = FUNCTIONS[fn][0]
    return Call(fn, tuple(rand_expr(rng, names, depth - 1) for _ in range(arity)))


def rand_condition(rng, names=("x", "y"), depth=3, expr_depth=3):
    if depth <= 0 or rng.random() < 0.35:
        return Leaf(Predicate(rand_expr(rng, names, expr_depth), rng.choice(RELOPS),
                              rand_expr(rng, names, expr_depth)))
    r = rng.random()
    if r < 0.2:
        return Not(rand_condition(rng, names, depth - 1, expr_depth))
    cls = And if r < 0.6 else Or
    k = rng.randint(2, 3)
    return cls(tuple(rand_condition(rng, names, depth - 1, expr_depth) for _ in range(k)))


def rand_int_box(rng, names=("x", "y"), max_width=10, span=20):
    dims = []
    for name in names:
        lo = rng.randint(-span, span)
        dims.append(VarDomain(name, "int", lo, lo + rng.randint(0, max_width)))
    return InputBox(tuple(dims))


def rand_real_box(rng, names=("x", "y"), span=20.0):
    dims = []
    for name in names:
        lo = rng.uniform(-span, span)
        dims.append(VarDomain(name, "real", lo, lo + rng.uniform(0, 8)))
    return InputBox(tuple(dims))
