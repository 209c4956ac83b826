import charcycle as cc
import charcycle.poly as poly
from charcycle import parse_poly
from collections import OrderedDict
from fractions import Fraction
import logging
import numpy as np
import pytest

VARIABLES = ["x", "y", "z"]

def _random_poly(rng, nvars, degree = 4, nterms = 6):
    variables = VARIABLES[:nvars]
    terms = {}
    for _ in range(nterms):
        exps = rng.integers(0, degree + 1, size = nvars)
        while exps.sum() > degree:
            exps[rng.integers(0, nvars)] -= 1
            exps = np.maximum(exps, 0)
        terms[tuple(int(e) for e in exps)] = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5)))
    return cc.Polynomial(variables, terms)

def test_parse_and_print():
    """Can parse a polynomial and print it canonically"""
    f = parse_poly("x^3 - y^2", "x,y")
    assert str(f) == "x^3 - y^2", "printing failed"
    assert f.degree == 3, "degree failed"
    assert f.order == 2, "order failed"
    assert parse_poly(str(f), "x,y") == f, "reparse failed"

def test_parse_leading_sign_and_fractions():
    """Can parse a leading sign and rational coefficients"""
    f = parse_poly("-x^2 + y", ["x", "y"])
    assert str(f) == "-x^2 + y", "leading sign failed"
    g = parse_poly("1/2*x*y + 3", "x,y")
    assert g.coefficient((1, 1)) == Fraction(1, 2), "rational coefficient failed"
    assert g.constant_term == 3, "constant term failed"

def test_parse_merges_terms():
    """Can merge repeated monomials"""
    actual = parse_poly("2*x*y + x*y", "x,y")
    expected = parse_poly("3*x*y", "x,y")
    assert actual == expected, "merging failed"
    assert parse_poly("x - x", "x,y").is_zero(), "cancellation failed"

def test_parse_errors():
    """Can report parse errors with their position"""
    with pytest.raises(cc.PolynomialParseError) as e:
        parse_poly("x^^2", "x")
    assert e.value.position == 2, "error position failed"
    assert e.value.code == "parse-error", "error code failed"
    with pytest.raises(cc.PolynomialParseError):
        parse_poly("x y", "x,y")
    with pytest.raises(cc.PolynomialParseError):
        parse_poly("x + 1/0", "x")

def test_unknown_variable():
    """Can reject undeclared variables"""
    with pytest.raises(cc.UnknownVariableError):
        parse_poly("x + w", "x,y")

def test_arithmetic():
    """Can add, multiply and raise polynomials to powers"""
    x = cc.Polynomial.variable("x,y", "x")
    y = cc.Polynomial.variable("x,y", "y")
    actual = (x + y) ** 2 - x * x - y * y
    expected = parse_poly("2*x*y", "x,y")
    assert actual == expected, "arithmetic failed"
    assert (x - Fraction(1, 10)).constant_term == Fraction(-1, 10), "rational coercion failed"
    with pytest.raises(cc.DimensionMismatchError):
        x + cc.Polynomial.variable("x,z", "x")

def test_differentiate():
    """Can differentiate, and build gradients and Hessians"""
    f = parse_poly("x^3 - y^2", "x,y")
    assert str(cc.differentiate(f, "x")) == "3*x^2", "derivative failed"
    assert [str(g) for g in cc.gradient(f)] == ["3*x^2", "-2*y"], "gradient failed"
    hess = [[str(h) for h in row] for row in cc.hessian(f)]
    assert hess == [["6*x", "0"], ["0", "-2"]], "hessian failed"
    with pytest.raises(cc.UnknownVariableError):
        cc.differentiate(f, "z")

def test_substitute_linear():
    """Can compose with an affine-linear substitution"""
    f = parse_poly("x^2 + y^2 + z^2", "x,y,z")
    g = cc.substitute_linear(f, {"x": "x", "y": "y", "z": "-x - y"}, "x,y")
    assert str(g) == "2*x^2 + 2*x*y + 2*y^2", "substitution failed"
    shifted = cc.substitute_linear(parse_poly("x*y*z", "x,y,z"), {"x": "1", "y": "y", "z": "z"}, "y,z")
    assert str(shifted) == "y*z", "constant image failed"
    with pytest.raises(cc.PreconditionError):
        cc.substitute_linear(f, {"x": "x^2", "y": "y", "z": "z"}, "x,y,z")
    with pytest.raises(cc.DimensionMismatchError):
        cc.substitute_linear(f, {"x": "x", "y": "y"}, "x,y")

def test_evaluate():
    """Can evaluate at complex points"""
    f = parse_poly("x^2 + y^2", "x,y")
    assert cc.evaluate(f, (1, 1j)) == 0, "complex evaluation failed"
    assert cc.evaluate(f, (3, 4)) == 25, "real evaluation failed"
    with pytest.raises(cc.DimensionMismatchError):
        cc.evaluate(f, (1,))

def test_random_linear_form():
    """Can draw reproducible generic linear forms"""
    a = cc.random_linear_form(3, 7)
    b = cc.random_linear_form(3, 7)
    assert a == b, "reproducibility failed"
    assert a.n == 3, "length failed"
    assert all(c != 0 and -100 <= c <= 100 for c in a.coefficients), "range failed"
    assert all(c.denominator == 1 for c in a.coefficients), "integer coefficients failed"
    with pytest.raises(ValueError):
        cc.random_linear_form(0, 1)

def test_linear_form_as_polynomial():
    """Can turn a linear form into a polynomial"""
    form = cc.RationalLinearForm((1, -2, 0))
    assert str(form.as_polynomial("x,y,z")) == "x - 2*y", "as_polynomial failed"
    assert form.negated().coefficients == (-1, 2, 0), "negation failed"
    with pytest.raises(ValueError):
        cc.RationalLinearForm((0, 0))

def test_random_linear_change():
    """Can undo a random change of coordinates exactly"""
    f = parse_poly("x^3 + x*y^2 - 5*y + 1/3", "x,y")
    forward, inverse = cc.random_linear_change("x,y", 11)
    g = cc.substitute_linear(f, forward, "x,y")
    actual = cc.substitute_linear(g, inverse, "x,y")
    assert actual == f, "inverse change failed"
    assert g.degree == f.degree, "degree invariance failed"

def test_variable_names():
    """Can reject invalid and repeated variable names"""
    with pytest.raises(cc.PreconditionError) as e:
        parse_poly("x", "x,1y")
    assert e.value.details["variable"] == "1y", "invalid name failed"
    with pytest.raises(cc.PreconditionError) as e:
        cc.Polynomial.variable("x,y,x", "x")
    assert e.value.details["repeated"] == ["x"], "repeated name failed"
    with pytest.raises(cc.PreconditionError):
        parse_poly("1", "")

def test_evaluate_horner():
    """Can evaluate sparse high-degree polynomials by nested Horner"""
    f = parse_poly("x^10*y - 3*x^2*y^5 + 1/2*y + 7", "x,y")
    x, y = 1.1 - 0.3j, -0.7 + 0.2j
    expected = x ** 10 * y - 3 * x ** 2 * y ** 5 + 0.5 * y + 7
    assert abs(cc.evaluate(f, (x, y)) - expected) <= 1e-12 * abs(expected), "Horner value failed"
    assert cc.evaluate(cc.Polynomial.constant("x,y", 5), (2, 3)) == 5, "constant failed"
    assert cc.evaluate(parse_poly("0", "x,y"), (2, 3)) == 0, "zero failed"

@pytest.mark.parametrize("seed", range(20))
def test_differentiate_rules(seed):
    """Can differentiate sums and products by the additivity and Leibniz rules"""
    rng = np.random.default_rng(seed)
    nvars = int(rng.integers(1, 4))
    f, g = _random_poly(rng, nvars), _random_poly(rng, nvars)
    for v in VARIABLES[:nvars]:
        df, dg = cc.differentiate(f, v), cc.differentiate(g, v)
        assert cc.differentiate(f + g, v) == df + dg, "additivity failed"
        assert cc.differentiate(f * g, v) == df * g + f * dg, "Leibniz rule failed"

def _scale(p, radius):
    return sum(abs(float(c)) for c in p.terms.values()) * radius ** max(p.degree, 0)

@pytest.mark.parametrize("seed", range(20))
def test_evaluate_product(seed):
    """Can evaluate a product as the product of the values"""
    rng = np.random.default_rng(100 + seed)
    nvars = int(rng.integers(1, 4))
    f, g = _random_poly(rng, nvars), _random_poly(rng, nvars)
    for _ in range(5):
        modulus = rng.uniform(0, 2, size = nvars)
        angle = rng.uniform(0, 2 * np.pi, size = nvars)
        point = tuple(complex(z) for z in modulus * np.exp(1j * angle))
        actual = cc.evaluate(f * g, point)
        expected = cc.evaluate(f, point) * cc.evaluate(g, point)
        assert abs(actual - expected) <= 1e-10 * _scale(f, 2) * _scale(g, 2), "product failed"

@pytest.mark.slow
def test_random_linear_form_sweep():
    """Can draw 1000 distinct forms with nonzero coefficients"""
    forms = [cc.random_linear_form(5, seed) for seed in range(1000)]
    assert all(all(c != 0 for c in form.coefficients) for form in forms), "zero coefficient failed"
    assert len({form.coefficients for form in forms}) == 1000, "collision failed"

def test_seen_forms_registry(monkeypatch, caplog):
    """Can bound the form registry and log coinciding draws"""
    monkeypatch.setattr(poly, "_seen_forms", OrderedDict())
    monkeypatch.setattr(poly, "SEEN_FORMS_LIMIT", 8)
    for seed in range(20):
        cc.random_linear_form(2, seed)
    assert len(poly._seen_forms) == 8, "registry bound failed"
    first = cc.RationalLinearForm((3, 4), 1)
    assert poly._record_form(first) == 1, "first seed failed"
    with caplog.at_level(logging.WARNING, logger = "charcycle.poly"):
        previous = poly._record_form(cc.RationalLinearForm((3, 4), 2))
    assert previous == 1, "collision seed failed"
    assert "coincide" in caplog.text, "collision warning failed"
