import math
import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathart.errors import ParseError, UnboundVariable
from pathart.expr import (
    FUNCTIONS, RELOPS, UNDEFINED, Add, And, Call, Const, Div, Leaf, Mul, Neg, Not,
    Or, Predicate, Sub, Var, compile_condition, eval_condition, eval_num,
    free_vars, parse_condition, parse_expr, print_condition,
)

from .conftest import FOO_TEXT
from .randexpr import rand_condition, rand_expr

X, Y = Var("x"), Var("y")


# ---------------------------------------------------------------------------
# parsing

def test_parse_foo_is_three_way_and(foo_pc):
    assert isinstance(foo_pc, And)
    assert len(foo_pc.children) == 3
    assert all(isinstance(c, Leaf) for c in foo_pc.children)
    first = foo_pc.children[0].pred
    assert first.lhs == Y and first.op == "<="
    assert first.rhs == Add(Mul(Const(8.0), Call("sin", (Add(Mul(Const(0.2), X), Const(7.0)),))),
                            Const(4.0))
    assert foo_pc.children[2].pred == Predicate(X, "<=", Sub(Const(16.0), Y))


def test_parse_tautology_leaf():
    assert parse_condition("x <= x") == Leaf(Predicate(X, "<=", X))


def test_whitespace_insensitive():
    assert parse_condition("  x<=y &&\n\t y >= 2 ") == parse_condition("x <= y && y >= 2")


def test_precedence():
    pc = parse_condition("!a < 1 && b < 2 || c < 3")
    assert isinstance(pc, Or)
    left = pc.children[0]
    assert isinstance(left, And) and isinstance(left.children[0], Not)
    assert parse_expr("-x * 2 + 3") == Add(Mul(Neg(X), Const(2.0)), Const(3.0))
    assert parse_expr("1 - 2 - 3") == Sub(Sub(Const(1.0), Const(2.0)), Const(3.0))
    assert parse_expr("8 / 4 / 2") == Div(Div(Const(8.0), Const(4.0)), Const(2.0))


def test_parenthesized_arith_before_relop():
    pc = parse_condition("((x + 1)) * 2 <= (y)")
    assert pc == Leaf(Predicate(Mul(Add(X, Const(1.0)), Const(2.0)), "<=", Y))


def test_nested_condition_parens():
    pc = parse_condition("((x < 1) || (y < 2)) && !(x == y)")
    assert isinstance(pc, And)
    assert isinstance(pc.children[0], Or)
    assert pc.children[1] == Not(Leaf(Predicate(X, "==", Y)))


def test_number_literals():
    assert parse_expr("1.5e3") == Const(1500.0)
    assert parse_expr(".25") == Const(0.25)
    assert parse_expr("3.") == Const(3.0)
    assert parse_expr("2E-2") == Const(0.02)


@pytest.mark.parametrize("text, fragment, line, column", [
    ("sin(x, y) <= 0", "argument", 1, 1),
    ("foo(x) <= 0", "unknown function", 1, 1),
    ("x <= ", "expected number", 1, 6),
    ("x + 1", "relational operator", 1, 6),
    ("x < 1 && ", "expected", 1, 10),
    ("(x < 1) + 2 < 3", "expected", 1, None),
    ("x < 1)", "end of input", 1, 6),
    ("x <= y\n  && z # 2", "unexpected character", 2, 8),
    ("x < (y < 1)", "expected", 1, None),
    ("", "expected", 1, 1),
    ("pow(x) > 1", "argument", 1, 1),
    ("x <= y <= z", "end of input", 1, 8),
])
def test_parse_errors_carry_position(text, fragment, line, column):
    with pytest.raises(ParseError) as info:
        parse_condition(text)
    err = info.value
    assert fragment in str(err)
    assert err.line == line
    if column is not None:
        assert err.column == column


def test_ast_invariants():
    with pytest.raises(ValueError):
        Call("sin", (X, Y))
    with pytest.raises(ValueError):
        Var("1x")
    with pytest.raises(ValueError):
        And((Leaf(Predicate(X, "<", Y)),))
    with pytest.raises(ValueError):
        Predicate(X, "=<", Y)


def test_free_vars(foo_pc):
    assert free_vars(foo_pc) == {"x", "y"}
    assert free_vars(parse_condition("1 < 2")) == set()


# ---------------------------------------------------------------------------
# printing

def test_print_leaf():
    assert print_condition(Leaf(Predicate(X, "<=", X))) == "(x <= x)"


def test_print_and_layout():
    a, b, c = (Leaf(Predicate(Var(n), "<", Const(1.0))) for n in "abc")
    assert print_condition(And((a, b, c))) == "((a < 1.0) && (b < 1.0) && (c < 1.0))"
    assert print_condition(Not(a)) == "!(a < 1.0)"


def test_print_roundtrip_foo(foo_pc):
    text = print_condition(foo_pc)
    assert parse_condition(text) == foo_pc
    assert print_condition(parse_condition(text)) == text


def test_print_roundtrip_nested_groups():
    pc = parse_condition("(a < 1 && b < 2) && c < 3 || !(!(d > 0))")
    assert parse_condition(print_condition(pc)) == pc


# hypothesis strategies over ASTs in the parser's image
_names = st.sampled_from(["x", "y", "z", "sin", "_v1"])
_consts = st.floats(min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False).map(Const)


def _num_exprs(depth):
    leaf = st.one_of(_names.map(Var), _consts)
    if depth == 0:
        return leaf
    sub = _num_exprs(depth - 1)
    bins = st.sampled_from([Add, Sub, Mul, Div])
    unary_fns = st.sampled_from([f for f, (a, _) in FUNCTIONS.items() if a == 1])
    binary_fns = st.sampled_from([f for f, (a, _) in FUNCTIONS.items() if a == 2])
    return st.one_of(
        leaf,
        sub.map(Neg),
        st.builds(lambda c, l, r: c(l, r), bins, sub, sub),
        st.builds(lambda f, a: Call(f, (a,)), unary_fns, sub),
        st.builds(lambda f, a, b: Call(f, (a, b)), binary_fns, sub, sub),
    )


def _conditions(depth):
    leaf = st.builds(Predicate, _num_exprs(2), st.sampled_from(RELOPS), _num_exprs(2)).map(Leaf)
    if depth == 0:
        return leaf
    sub = _conditions(depth - 1)
    kids = st.lists(sub, min_size=2, max_size=3).map(tuple)
    return st.one_of(leaf, sub.map(Not), kids.map(And), kids.map(Or))


@settings(max_examples=300, deadline=None)
@given(_conditions(3))
def test_roundtrip_property(pc):
    assert parse_condition(print_condition(pc)) == pc


def test_roundtrip_deep_random_trees():
    rng = random.Random(5)
    for _ in range(300):
        pc = rand_condition(rng, depth=6, expr_depth=6)
        assert parse_condition(print_condition(pc)) == pc


# ---------------------------------------------------------------------------
# evaluation

def test_eval_num_examples():
    assert eval_num(parse_expr("16 - y"), {"y": 0}) == 16
    assert eval_num(Call("sqrt", (X,)), {"x": -1}) is UNDEFINED


def test_eval_foo_rhs_against_mpmath():
    mpmath.mp.dps = 40
    expected = 8 * mpmath.sin(mpmath.mpf(7)) + 4
    got = eval_num(parse_expr("8*sin(0.2*x+7)+4"), {"x": 0})
    assert got == pytest.approx(float(expected), rel=1e-15)
    assert got == pytest.approx(9.2559, abs=5e-5)


@pytest.mark.parametrize("text, env", [
    ("log(0)", {}), ("log(-2)", {}), ("1 / 0", {}), ("x / (x - x)", {"x": 3}),
    ("sqrt(-1e-300)", {}), ("pow(-8, 0.5)", {}), ("pow(0, -1)", {}),
    ("sin(exp(1000) - exp(1000))", {}),
])
def test_undefined_cases(text, env):
    assert eval_num(parse_expr(text), env) is UNDEFINED


def test_ieee_overflow_is_infinite_not_undefined():
    assert eval_num(parse_expr("exp(1000)"), {}) == math.inf
    assert eval_num(parse_expr("pow(-10, 1001)"), {}) == -math.inf
    assert eval_num(parse_expr("1e308 * 10"), {}) == math.inf


def test_unbound_variable():
    with pytest.raises(UnboundVariable) as info:
        eval_num(parse_expr("x + z"), {"x": 1})
    assert info.value.name == "z"
    with pytest.raises(UnboundVariable):
        eval_condition(parse_condition("z < 1"), {})


def test_eval_condition_foo_points(foo_pc):
    assert eval_condition(foo_pc, {"x": 0, "y": 15}) is False
    assert eval_condition(foo_pc, {"x": 8, "y": 8}) is True
    assert eval_condition(parse_condition("x <= x"), {"x": 3}) is True


def test_undefined_predicate_false_and_not_true():
    pc = parse_condition("sqrt(x) > 0")
    assert eval_condition(pc, {"x": -1}) is False
    assert eval_condition(Not(pc), {"x": -1}) is True
    assert eval_condition(parse_condition("sqrt(x) != 0"), {"x": -1}) is False


def test_exact_equality():
    assert eval_condition(parse_condition("0.1 + 0.2 == 0.3"), {}) is False
    assert eval_condition(parse_condition("0.1 + 0.2 != 0.3"), {}) is True
    assert eval_condition(parse_condition("x * 2 == 6"), {"x": 3}) is True


def test_strictness_injected_undefined():
    rng = random.Random(11)
    bad = Call("sqrt", (Const(-1.0),))

    def inject(e):
        # replace one random leaf by sqrt(-1)
        if isinstance(e, (Var, Const)):
            return bad
        if isinstance(e, Neg):
            return Neg(inject(e.child))
        if isinstance(e, (Add, Sub, Mul, Div)):
            if rng.random() < 0.5:
                return type(e)(inject(e.left), e.right)
            return type(e)(e.left, inject(e.right))
        args = list(e.args)
        i = rng.randrange(len(args))
        args[i] = inject(args[i])
        return Call(e.function, tuple(args))

    for _ in range(500):
        e = inject(rand_expr(rng, depth=5))
        assert eval_num(e, {"x": rng.uniform(-5, 5), "y": rng.uniform(-5, 5)}) is UNDEFINED


def test_predicate_le_matches_double_comparison():
    rng = random.Random(2)
    for _ in range(10_000):
        a = rng.choice([rng.uniform(-1e3, 1e3), float(rng.randint(-3, 3))])
        b = rng.choice([rng.uniform(-1e3, 1e3), float(rng.randint(-3, 3)), a])
        pc = Leaf(Predicate(Const(a), "<=", Const(b)))
        assert eval_condition(pc, {}) is (a <= b)


def test_evaluation_is_deterministic(foo_pc):
    v = {"x": 3, "y": 7}
    assert len({eval_condition(foo_pc, v) for _ in range(20)}) == 1
    e = parse_expr("8*sin(0.2*x+7)+4")
    assert len({eval_num(e, v) for _ in range(20)}) == 1


# ---------------------------------------------------------------------------
# compiled fast path agrees with the tree walker

def test_compiled_matches_reference_random():
    rng = random.Random(3)
    for _ in range(2000):
        pc = rand_condition(rng)
        fn = compile_condition(pc, ("x", "y"))
        for _ in range(5):
            pt = (rng.choice([rng.randint(-10, 10), rng.uniform(-10, 10), 0]),
                  rng.choice([rng.randint(-10, 10), rng.uniform(-10, 10), 0]))
            assert fn(*pt) is eval_condition(pc, {"x": pt[0], "y": pt[1]}), print_condition(pc)


def test_compiled_foo_exhaustive(foo_pc):
    fn = compile_condition(foo_pc, ("x", "y"))
    for x in range(16):
        for y in range(16):
            assert fn(x, y) is eval_condition(foo_pc, {"x": x, "y": y})


def test_compiled_respects_argument_order():
    pc = parse_condition("x - y > 0")
    assert compile_condition(pc, ("x", "y"))(5, 1) is True
    assert compile_condition(pc, ("y", "x"))(5, 1) is False


def test_compiled_unbound():
    with pytest.raises(UnboundVariable):
        compile_condition(parse_condition("q < 1"), ("x",))


def test_compiled_source_matches_foo():
    assert FOO_TEXT  # the bundled file carries the same text
    from pathart import example_path
    assert parse_condition(example_path("foo.pc").read_text()) == parse_condition(FOO_TEXT)
