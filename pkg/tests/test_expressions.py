import math

import numpy as np
import pytest

from wellpath import ParseError, EvalDomainError, evaluate, free_variables, parse_expression, to_source


def ev(src, variables=("x1",), **env):
    return evaluate(parse_expression(src, variables), env)


def test_double_well_at_zero():
    assert ev("0.5*(1-x1^2)^2", x1=0.0) == 0.5


def test_two_dim_well():
    tree = parse_expression("0.5*((x1^2-1)^2 + x2^2)", ("x1", "x2"))
    assert evaluate(tree, {"x1": 1.0, "x2": 0.0}) == 0.0


def test_trailing_operator_is_syntax_error():
    with pytest.raises(ParseError) as info:
        parse_expression("x1^2 +", ("x1",))
    assert info.value.position is not None


def test_unknown_identifier():
    with pytest.raises(ParseError):
        parse_expression("x1 + y", ("x1",))


def test_arity_mismatch():
    with pytest.raises(ParseError):
        parse_expression("sqrt(x1, x1)", ("x1",))
    with pytest.raises(ParseError):
        parse_expression("min(x1)", ("x1",))


def test_error_position_reported():
    with pytest.raises(ParseError) as info:
        parse_expression("1 + * 2", ("x1",))
    assert "position" in str(info.value)


@pytest.mark.parametrize(
    "src,value",
    [
        ("2^3^2", 512.0),  # right associative
        ("2**3", 8.0),
        ("-2^2", -4.0),  # unary minus binds looser than ^
        ("(-2)^2", 4.0),
        ("6/3/2", 1.0),  # left associative
        ("1 - 2 - 3", -4.0),
        ("min(3, 1, 2)", 1.0),
        ("max(3, 1, 2)", 3.0),
        ("abs(-2.5)", 2.5),
        ("tanh(0)", 0.0),
    ],
)
def test_grammar_cases(src, value):
    assert ev(src, x1=0.0) == value


def test_functions_match_math():
    for src, ref in [
        ("exp(x1)", math.exp(0.3)),
        ("log(x1)", math.log(0.3)),
        ("sin(x1)", math.sin(0.3)),
        ("cos(x1)", math.cos(0.3)),
        ("sqrt(x1)", math.sqrt(0.3)),
    ]:
        assert ev(src, x1=0.3) == pytest.approx(ref, rel=1e-15)


def test_domain_errors():
    with pytest.raises(EvalDomainError):
        ev("sqrt(x1)", x1=-1.0)
    with pytest.raises(EvalDomainError):
        ev("log(x1)", x1=0.0)
    with pytest.raises(EvalDomainError):
        ev("1/x1", x1=0.0)
    with pytest.raises(EvalDomainError):
        ev("exp(x1)", x1=1e6)  # overflow is a domain error, not inf


def test_array_domain_errors():
    tree = parse_expression("log(x1)", ("x1",))
    with pytest.raises(EvalDomainError):
        evaluate(tree, {"x1": np.array([1.0, -1.0])})


def test_scalar_and_array_agree(rng):
    sources = [
        "0.5*(1-x1^2)^2",
        "exp(-x1^2) + sin(x1)*cos(x1)",
        "abs(x1 - 0.5) + max(x1, 0.25, x1^3)",
        "tanh(x1) / (2 + x1^2)",
    ]
    xs = rng.uniform(-2, 2, size=50)
    for src in sources:
        tree = parse_expression(src, ("x1",))
        batch = evaluate(tree, {"x1": xs})
        for i, x in enumerate(xs):
            one = evaluate(tree, {"x1": float(x)})
            assert one == pytest.approx(batch[i], rel=1e-14, abs=1e-300)


def test_free_variables():
    tree = parse_expression("x1*x3 + 2", ("x1", "x2", "x3"))
    assert free_variables(tree) == {"x1", "x3"}


def _random_tree_source(rng, depth=0):
    # random expression text over x1, x2 that stays finite on [-1, 1]^2
    if depth > 3 or rng.uniform() < 0.3:
        choice = rng.integers(0, 3)
        if choice == 0:
            return "{:.4f}".format(rng.uniform(-2, 2))
        return "x1" if choice == 1 else "x2"
    kind = rng.integers(0, 6)
    a = _random_tree_source(rng, depth + 1)
    b = _random_tree_source(rng, depth + 1)
    if kind == 0:
        return f"({a} + {b})"
    if kind == 1:
        return f"({a} - {b})"
    if kind == 2:
        return f"({a} * {b})"
    if kind == 3:
        return f"(({a})^2)"
    if kind == 4:
        return f"sin({a})"
    return f"-({a})"


def test_round_trip_random_trees(rng):
    # pretty-print then re-parse: identical values on 100 random points
    pts = rng.uniform(-1, 1, size=(100, 2))
    for _ in range(30):
        src = _random_tree_source(rng)
        tree = parse_expression(src, ("x1", "x2"))
        back = parse_expression(to_source(tree), ("x1", "x2"))
        for x1, x2 in pts[rng.integers(0, 100, size=5)]:
            env = {"x1": float(x1), "x2": float(x2)}
            v1 = evaluate(tree, env)
            v2 = evaluate(back, env)
            assert v1 == pytest.approx(v2, rel=1e-12, abs=1e-300)


def test_round_trip_precedence_sensitive():
    for src in ["2^3^2", "-2^2", "1-2-3", "6/3/2", "2*(3+4)", "-(x1+1)^2"]:
        tree = parse_expression(src, ("x1",))
        back = parse_expression(to_source(tree), ("x1",))
        assert evaluate(tree, {"x1": 0.7}) == evaluate(back, {"x1": 0.7})


def test_whitespace_and_numbers():
    assert ev("  1.5e2 + .5 ", x1=0.0) == 150.5
    assert ev("2.", x1=0.0) == 2.0


def test_empty_source():
    with pytest.raises(ParseError):
        parse_expression("", ("x1",))
    with pytest.raises(ParseError):
        parse_expression("   ", ("x1",))
