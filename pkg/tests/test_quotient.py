import charcycle as cc
from charcycle import parse_poly, gradient, MonomialOrder
from charcycle.poly import Polynomial
from fractions import Fraction
import numpy as np
import math
import pytest
import sympy

def test_groebner_basis():
    """Can compute a reduced Groebner basis"""
    gens = [parse_poly("x - y", "x,y"), parse_poly("y^2", "x,y")]
    actual = [str(g) for g in cc.groebner_basis(gens)]
    assert actual == ["x - y", "y^2"], "basis failed"
    gens = [parse_poly("x^2 + y", "x,y"), parse_poly("x*y - 1", "x,y")]
    basis = cc.groebner_basis(gens)
    for g in gens:
        assert cc.normal_form(g, basis).is_zero(), "ideal membership failed"

@pytest.mark.parametrize("polys, vars", [
    (("x^2 + y", "x*y - 1"), "x,y"),
    (("x^3 - y*z", "y^2 - x*z", "z^2 - x^2*y"), "x,y,z"),
    (("x^2 + y^2 + z^2 - 1", "x - y*z", "x*y + z - 1/2"), "x,y,z"),
    (("3*x^2", "-2*y"), "x,y"),
])
def test_groebner_matches_sympy(polys, vars):
    """Can reproduce the reduced basis sympy computes"""
    gens = [parse_poly(p, vars) for p in polys]
    actual = {g.element.as_expr() for g in cc.groebner_basis(gens)}
    expected = sympy.groebner([g.element.as_expr() for g in gens], *gens[0].ring.symbols,
                              order = "grevlex", domain = sympy.QQ)
    assert actual == set(expected.exprs), "sympy cross-check failed"

def test_groebner_caps():
    """Can stop Buchberger at the S-polynomial degree cap"""
    gens = [parse_poly("x^3 - y*z", "x,y,z"), parse_poly("y^2 - x*z", "x,y,z"),
            parse_poly("z^2 - x^2*y", "x,y,z")]
    with pytest.raises(cc.CapExceededError):
        cc.groebner_basis(gens, caps = cc.Caps(spoly_degree = 3))

def test_groebner_local_order_refused():
    """Can refuse Buchberger under the local order"""
    with pytest.raises(cc.PreconditionError):
        cc.groebner_basis([parse_poly("x", "x")], MonomialOrder.LOCAL)

def test_quotient_dimension():
    """Can count standard monomials"""
    f = parse_poly("x^3 + y^3 + z^3", "x,y,z")
    assert cc.quotient_dimension(gradient(f)) == 8, "finite quotient failed"
    assert cc.quotient_dimension([parse_poly("x*y", "x,y")]) == math.inf, "infinite quotient failed"
    assert cc.quotient_dimension([parse_poly("x", "x"), parse_poly("x - 1", "x")]) == 0, "unit ideal failed"
    g = parse_poly("x^3 - y^2", "x,y")
    assert cc.quotient_dimension(gradient(g), MonomialOrder.LOCAL) == 2, "local delegation failed"

@pytest.mark.parametrize("polys, vars, dim", [
    (("x^2 - y", "y^2 - 1"), "x,y", 4),
    (("3*x^2", "3*y^2", "3*z^2"), "x,y,z", 8),
    (("x*y - 1", "x + y - 3"), "x,y", 2),
])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_quotient_dimension_coordinate_invariance(polys, vars, dim, seed):
    """Can keep the quotient dimension under a linear change of coordinates"""
    gens = [parse_poly(p, vars) for p in polys]
    forward, _ = cc.random_linear_change(vars, seed)
    changed = [cc.substitute_linear(g, forward, vars) for g in gens]
    assert cc.quotient_dimension(gens) == dim, "quotient dimension failed"
    assert cc.quotient_dimension(changed) == dim, "changed coordinates failed"

def test_generator_checks():
    """Can reject empty, zero and mixed generators"""
    with pytest.raises(cc.PreconditionError):
        cc.quotient_dimension([])
    with pytest.raises(cc.PreconditionError):
        cc.quotient_dimension([Polynomial("x,y")])
    with pytest.raises(cc.DimensionMismatchError):
        cc.quotient_dimension([parse_poly("x", "x,y"), parse_poly("x", "x,z")])

def test_quotient_algebra():
    """Can build commuting multiplication matrices"""
    f = parse_poly("x^3 - y^2", "x,y")
    q = cc.QuotientAlgebra(gradient(f))
    assert q.dimension == 2, "dimension failed"
    assert q.basis == ((0, 0), (1, 0)), "standard monomials failed"
    assert q.matrices_commute(), "commutation failed"
    mx = q.multiplication_matrix("x")
    assert mx.to_list() == [[0, 0], [1, 0]], "multiplication matrix failed"
    assert q.normal_form(parse_poly("x^2 + 3*x + 2", "x,y")) == [2, 3], "normal form failed"
    with pytest.raises(cc.NotZeroDimensionalError):
        cc.QuotientAlgebra([parse_poly("x*y", "x,y")])

def test_local_quotient_dimension():
    """Can compute the local dimension at the origin only"""
    gens = [parse_poly("x^2 - x", "x,y"), parse_poly("y", "x,y")]
    assert cc.quotient_dimension(gens) == 2, "global count failed"
    assert cc.local_quotient_dimension(gens) == 1, "local count failed"
    assert cc.local_quotient_dimension([parse_poly("x + 1", "x")]) == 0, "unit at origin failed"

@pytest.mark.parametrize("poly, vars", [
    ("x^2 + y^2", "x,y"),
    ("x^3 - y^2", "x,y"),
    ("x^4 + y^2", "x,y"),
    ("x^6 + y^2", "x,y"),
    ("x^2 + y^2 + z^2", "x,y,z"),
    ("x^3 + y^3 + z^3", "x,y,z"),
])
def test_local_equals_global_for_weighted_homogeneous(poly, vars):
    """Can agree with the global count when the origin is the only solution"""
    grad = gradient(parse_poly(poly, vars))
    assert cc.local_quotient_dimension(grad) == cc.quotient_dimension(grad), "oracle failed"

def test_local_quotient_undecided():
    """Can refuse to decide a non-isolated singular point"""
    f = parse_poly("x*y*z", "x,y,z")
    with pytest.raises(cc.UndecidedError):
        cc.local_quotient_dimension(gradient(f), degree_cap = 8)

def test_solve_simple_system():
    """Can solve a system with two points"""
    g = parse_poly("x*y*z - x - y - z", "x,y,z")
    sol = cc.solve_zero_dim_system(gradient(g))
    assert sol.total_with_multiplicity == 2, "count failed"
    assert sol.multiplicities == (1, 1), "multiplicity failed"
    points = sorted(np.real(p[0]) for p in sol.points)
    assert np.allclose(points, [-1, 1]), "points failed"
    assert max(sol.residuals) <= 1e-8, "residual failed"

def test_solve_with_multiplicity():
    """Can report multiple points once with their multiplicity"""
    gens = [parse_poly("x^2", "x,y"), parse_poly("y - 1", "x,y")]
    sol = cc.solve_zero_dim_system(gens)
    assert sol.total_with_multiplicity == 2, "total failed"
    assert sol.multiplicities == (2,), "multiplicity failed"
    assert np.allclose(sol.points[0], (0, 1)), "point failed"

def test_solve_unit_ideal():
    """Can return an empty point set for an inconsistent system"""
    sol = cc.solve_zero_dim_system([parse_poly("x", "x"), parse_poly("x - 1", "x")])
    assert sol.total_with_multiplicity == 0 and len(sol) == 0, "empty solution failed"

def test_critical_point_selection():
    """Can select points within a radius"""
    sol = cc.solve_zero_dim_system([parse_poly("x^2 - 4", "x"), ])
    assert sol.count_within(1) == 0, "small radius failed"
    assert sol.count_within(3) == 2, "large radius failed"
    sol = cc.solve_zero_dim_system([parse_poly("x^2 + 4", "x")])
    assert sol.select(real_tolerance = 1e-8) == [], "real selection failed"

def _random_system(rng, n):
    variables = ["x", "y", "z"][:n]
    gens = []
    for i in range(n):
        d = int(rng.integers(1, 4))
        terms = {tuple(d if j == i else 0 for j in range(n)): 1}
        for _ in range(3):
            exps = tuple(int(e) for e in rng.integers(0, d, size = n))
            if sum(exps) < d:
                terms[exps] = terms.get(exps, 0) + Fraction(int(rng.integers(-3, 4)))
        gens.append(Polynomial(variables, terms))
    return gens

@pytest.mark.slow
def test_solve_random_systems():
    """Can count solutions of random zero-dimensional systems with multiplicity"""
    rng = np.random.default_rng(2024)
    for k in range(50):
        n = int(rng.integers(1, 4))
        gens = _random_system(rng, n)
        sol = cc.solve_zero_dim_system(gens, seed = k)
        assert sol.total_with_multiplicity == cc.quotient_dimension(gens), "count failed"
        assert max(sol.residuals, default = 0) <= 1e-8, "residual failed"
