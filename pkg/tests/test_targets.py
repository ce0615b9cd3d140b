from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sadic_builder.errors import TargetError
from sadic_builder.targets import parse_target


@pytest.mark.parametrize(
    "expression, alpha",
    [
        ("n^3/2", Fraction(3, 2)),
        ("n^1.5", Fraction(3, 2)),
        ("n ^ 2", Fraction(2)),
        ("n^4/3", Fraction(4, 3)),
        ("n", Fraction(1)),
    ],
)
def test_power_targets(expression, alpha):
    target = parse_target(expression)
    assert target.kind == "power"
    assert target.alpha == alpha
    assert str(target) == expression.strip()


@pytest.mark.parametrize("expression, beta", [("n*log2(n)", 1), ("n * log2(n)^2", 2)])
def test_log_targets(expression, beta):
    target = parse_target(expression)
    assert target.kind == "log"
    assert target.beta == beta
    assert target.monotone_from == 1


@pytest.mark.parametrize("expression", ["", "  ", "m^2", "n^0", "n^1/0", "n^-2", "n*log2(n)^0", "2^n"])
def test_invalid_targets(expression):
    with pytest.raises(TargetError):
        parse_target(expression)


def test_linear_target_warns(caplog):
    with caplog.at_level("WARNING", logger="sadic-builder"):
        parse_target("n")
    assert "not superlinear" in caplog.text


def test_integer_power_is_exact():
    target = parse_target("n^2")
    assert target.exact_value(5) == 25
    assert target.approx(5) == 25.0
    assert target.greater_than(5, 24)
    assert not target.greater_than(5, 25)


def test_fractional_power_compared_exactly():
    target = parse_target("n^3/2")
    assert target.exact_value(4) is None
    assert target.approx(4) == pytest.approx(8.0)
    assert target.greater_than(4, 7)
    assert not target.greater_than(4, 8)
    assert target.greater_than(4, Fraction(15, 2))
    assert target.greater_than(2, -1)
    # 2^(3/2) is irrational and just below 2.8285
    assert target.greater_than(2, Fraction(28284, 10000))
    assert not target.greater_than(2, Fraction(28285, 10000))


def test_log_values():
    target = parse_target("n*log2(n)^2")
    assert target.exact_value(1) == 1
    assert target.exact_value(8) == 8 * 3**2
    assert target.exact_value(9) == 9 * 4**2


def test_ratio_key_orders_like_ratio():
    target = parse_target("n^3/2")
    assert target.ratio_key(8, 4) == 1
    assert target.ratio_key(9, 4) > target.ratio_key(8, 4)
    assert parse_target("n^2").ratio_key(10, 5) == Fraction(2, 5)


def test_monotonicity_point():
    assert parse_target("n^3/2").monotone_from == 1
    assert parse_target("n^1/2").monotone_from is None
    assert parse_target("n^2").horizon is None


@given(st.integers(1, 10**4), st.integers(0, 10**6))
def test_greater_than_is_monotone_in_x(n, x):
    target = parse_target("n^3/2")
    if target.greater_than(n, x + 1):
        assert target.greater_than(n, x)
    assert target.greater_than(n, x) == (n**3 > x**2)


def test_table_target(tmp_path):
    (tmp_path / "p.csv").write_text("n,p\n1,2\n2,5\n3,19/2\n")
    target = parse_target("@p.csv", base_dir=tmp_path)
    assert target.kind == "table"
    assert target.horizon == 3
    assert target.monotone_from is None
    assert target.exact_value(3) == Fraction(19, 2)
    assert target.greater_than(2, 4)
    with pytest.raises(TargetError):
        target.exact_value(4)
    with pytest.raises(TargetError):
        target.exact_value(0)


@pytest.mark.parametrize(
    "content",
    ["", "n,p\n", "1,2\n3,4\n", "1,0\n", "1\n", "1,abc\n"],
)
def test_bad_tables(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(TargetError):
        parse_target(f"@{path}")


def test_missing_table(tmp_path):
    with pytest.raises(TargetError, match="cannot read"):
        parse_target("@missing.csv", base_dir=tmp_path)
