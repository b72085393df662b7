import pytest

from ovalbill import CurveFileError, SupportFunction, parse_curve
from ovalbill.curvefile import describe_curve
from ovalbill.geometry import PerturbedCurve


def test_parse_basic():
    text = "# comment\nn = 3\na0 = 1.0\nharmonic = {3, 0.05, 0}   # trailing\n"
    assert parse_curve(text) == SupportFunction.cosine(3, 0.05)


def test_named_fields_and_defaults():
    sf = parse_curve("n=4\nharmonic = {k=8, sin=0.001}\nharmonic = {4, 0.02}\n")
    assert sf == SupportFunction(4, 1.0, ((4, 0.02, 0.0), (8, 0.0, 0.001)))


def test_bump_line():
    c = parse_curve("n = 3\nharmonic = {3, 0.05}\nbump = {center=1.0471975511965976, eps=1e-4, power=4}\n")
    assert isinstance(c, PerturbedCurve) and c.power == 4 and c.delta2 == 0.1
    assert describe_curve(c)["bumps"][0]["eps"] == 1e-4


@pytest.mark.parametrize(
    "text, line, msg",
    [
        ("n = 3\nharmonic = {2, 0.05}\n", 2, "harmonic not multiple of n"),
        ("harmonic = {3, 0.05}\n", None, "missing n"),
        ("n = 3\nfoo = 1\n", 2, "unknown key"),
        ("n = 3\n\nharmonic = 3\n", 3, "braced"),
        ("n = 3\nharmonic = {3, x}\n", 2, "not a number"),
        ("n = 2.5\n", 1, "integer"),
        ("n = 3\nbump = {eps=1}\n", 2, "center"),
        ("n = 3\nharmonic = {3, 0.05}\nbump = {center=0.1, eps=1e-3, power=2}\n", 3, "critical point"),
        ("n = 3\njust words\n", 2, "key = value"),
    ],
)
def test_errors_carry_line_numbers(text, line, msg):
    with pytest.raises(CurveFileError, match=msg) as info:
        parse_curve(text)
    assert info.value.lineno == line
    if line is not None:
        assert str(info.value).startswith(f"line {line}:")
