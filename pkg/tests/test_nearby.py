import charcycle as cc
from charcycle import parse_poly, FamilySpec, RationalLinearForm, LagrangianCycle
from charcycle.nearby import lagrange_system, morsification_system, escape_radius
from fractions import Fraction
import numpy as np
import pytest

DIAGONAL = RationalLinearForm((1, 1))

def _spec(poly, vars, mode, **kwargs):
    return FamilySpec.from_text(poly, vars, mode, **kwargs)

# Family settings
# --------------------
def test_family_spec_defaults():
    """Can fill in the default schedule and test form"""
    spec = _spec("x^3 - y^2", "x,y", "real-nearby")
    assert spec.a_schedule == tuple(Fraction(1, 10 ** k) for k in range(1, 5)), "schedule failed"
    assert spec.test_form.coefficients == (1, 0), "real test form failed"
    spec = _spec("x^3 - y^2", "x,y", "nearby", seed = 3)
    assert spec.mode == "complex-nearby", "mode alias failed"
    assert spec.test_form == cc.random_linear_form(2, 3), "random test form failed"

def test_family_spec_contracts():
    """Can reject bad modes, schedules and forms"""
    with pytest.raises(cc.PreconditionError):
        _spec("x^2", "x", "sideways")
    with pytest.raises(cc.PreconditionError):
        _spec("x^2 + y^2", "x,y", "nearby", a_schedule = ("1/100", "1/10", "1/1000"))
    with pytest.raises(cc.PreconditionError):
        _spec("x^2 + y^2", "x,y", "nearby", a_schedule = ("1/10", "1/100"))
    with pytest.raises(cc.PreconditionError):
        _spec("x^2 + y^2", "x,y", "nearby", radius_schedule = (1, 2, 3, 4))
    with pytest.raises(cc.DimensionMismatchError):
        _spec("x^2 + y^2", "x,y", "nearby", test_form = RationalLinearForm((1, 2, 3)))

# Systems and counts
# ------------------
def test_lagrange_system():
    """Can write the Lagrange system in both formulations"""
    f = parse_poly("x^2 + y^2", "x,y")
    minors = lagrange_system(f, RationalLinearForm((1, 2)), Fraction(1, 100))
    assert [str(g) for g in minors] == ["4*x - 2*y", "x^2 + y^2 - 1/100"], "minors failed"
    multiplier = lagrange_system(f, RationalLinearForm((1, 2)), Fraction(1, 100), "multiplier")
    assert multiplier[0].variables == ("x", "y", "lam"), "multiplier variable failed"
    assert [str(g) for g in multiplier] == ["2*x - lam", "2*y - 2*lam", "x^2 + y^2 - 1/100"], "multiplier failed"

def test_restricted_count_formulations_agree():
    """Can count restricted critical points with either formulation"""
    f = parse_poly("x^3 + y^3 + z^3", "x,y,z")
    form = cc.random_linear_form(3, 0)
    minors = cc.restricted_critical_count(f, form, Fraction(1, 1000))
    multiplier = cc.restricted_critical_count(f, form, Fraction(1, 1000), formulation = "multiplier")
    assert minors.count == 12 and minors.total == 12, "minor formulation failed"
    assert multiplier.count == minors.count, "multiplier formulation failed"
    assert minors.warnings == () and minors.radius is None, "clean sample failed"

def test_escape_radius():
    """Can find the limit points that escape the origin"""
    f = parse_poly("x^3 - y^2", "x,y")
    radius = escape_radius(lagrange_system(f, DIAGONAL, 0))
    assert radius == pytest.approx(np.hypot(4 / 9, 8 / 27) / 2, rel = 1e-6), "escape radius failed"
    assert cc.restricted_critical_count(f, DIAGONAL, Fraction(1, 10000), radius).count == 3, "near count failed"
    assert cc.restricted_critical_count(f, DIAGONAL, Fraction(1, 10000)).count == 4, "total count failed"
    g = parse_poly("x^2 + y^2 + z^2", "x,y,z")
    assert escape_radius(lagrange_system(g, cc.random_linear_form(3, 1), 0)) == float("inf"), "no escape failed"
    h = parse_poly("x*y*z", "x,y,z")
    assert escape_radius(cc.gradient(h)) is None, "non-isolated escape failed"

def test_polar_multiplicity():
    """Can compute the local polar multiplicity"""
    assert cc.polar_multiplicity(parse_poly("x^3 - y^2", "x,y"), DIAGONAL) == 3, "cusp failed"
    f = parse_poly("x^3 + y^3 + z^3", "x,y,z")
    assert cc.polar_multiplicity(f, cc.random_linear_form(3, 0)) == 12, "Fermat cubic failed"

def test_morsification_normal_crossings():
    """Can find the two Morse points of the perturbed normal crossing"""
    f = parse_poly("x*y*z", "x,y,z")
    form = RationalLinearForm((1, 1, 1))
    for a in (Fraction(1), Fraction(1, 10), Fraction(1, 100)):
        assert cc.morsification_count(f, form, a).count == 2, "count failed"
        sol = cc.solve_zero_dim_system(morsification_system(f, form, a))
        root = np.sqrt(float(a))
        points = sorted(np.real(p[0]) for p in sol.points)
        assert np.allclose(points, [-root, root], rtol = 1e-6), "points failed"
        for p in sol.points:
            assert np.allclose(p, [p[0]] * 3, rtol = 1e-6), "diagonal failed"

def test_real_signed_morse_count():
    """Can count real critical points with Morse signs"""
    f = parse_poly("x^3 - y^2", "x,y")
    x1 = RationalLinearForm((1, 0))
    assert cc.real_signed_morse_count(f, x1, Fraction(1, 100)) == (1, (0,)), "covector +p failed"
    assert cc.real_signed_morse_count(f, x1, Fraction(1, 100), orientation = -1) == (-1, (1,)), "covector -p failed"
    sphere = parse_poly("x^2 + y^2 + z^2", "x,y,z")
    assert cc.real_signed_morse_count(sphere, RationalLinearForm((1, 0, 0)), Fraction(1, 10)) == (2, (0, 2)), "sphere failed"

def test_real_signed_morse_count_degenerate():
    """Can refuse a degenerate real critical point"""
    f = parse_poly("y - x^3", "x,y")
    with pytest.raises(cc.DegenerateMorseError):
        cc.real_signed_morse_count(f, RationalLinearForm((0, 1)), Fraction(1, 10))

# Real nearby cycles
# ------------------
@pytest.mark.parametrize("poly, vars, expected", [
    ("x^2 + y^2", "x,y", 0),
    ("x^2 + y^2 + z^2", "x,y,z", 2),
    ("x^2 + y^2 + z^2 + w^2", "x,y,z,w", 0),
])
def test_real_nearby_quadrics(poly, vars, expected):
    """Can compute the real nearby cycle of a nondegenerate quadric"""
    cycle, report = cc.cc_real_nearby(_spec(poly, vars, "real-nearby"))
    assert cycle["{0}"] == expected, "multiplicity failed"
    assert report.passed, "routes failed"
    assert report.constancy["plus"]["passed"], "constancy failed"
    assert [s["payload"] for s in report.samples] == [[expected, expected]] * 4, "samples failed"
    assert report.invariants["fiber_euler_characteristic"] == expected, "fiber Euler characteristic failed"

def test_real_nearby_cusp():
    """Can separate the two covectors of the cusp"""
    cycle, report = cc.cc_real_nearby(_spec("x^3 - y^2", "x,y", "real-nearby"))
    assert cycle.support == {"{0}+", "{0}-"}, "labels failed"
    assert (cycle["{0}+"], cycle["{0}-"]) == (1, -1), "signed counts failed"
    assert report.invariants["microlocal_type"] == {"+": "C_{0}", "-": "C_{0}[-1]"}, "microlocal type failed"
    assert report.invariants["fiber_euler_characteristic"] is None, "fiber Euler characteristic failed"
    assert report.passed, "routes failed"
    assert set(report.routes) == {"limit", "resample"}, "route names failed"
    assert report.routes["resample"] == report.routes["limit"], "resample route failed"
    assert report.constancy["resample"]["passed"], "resample constancy failed"

def test_real_nearby_mode_check():
    """Can refuse a family of another mode"""
    with pytest.raises(cc.PreconditionError):
        cc.cc_real_nearby(_spec("x^2 + y^2", "x,y", "vanishing"))

# Complex nearby and vanishing cycles
# -----------------------------------
def test_complex_nearby_cusp():
    """Can compute the complex nearby cycle of the cusp by every route"""
    cycle, report = cc.cc_complex_nearby(_spec("x^3 - y^2", "x,y", "nearby", test_form = DIAGONAL))
    poset = cc.isolated_hypersurface_strata(2)
    assert cycle == LagrangianCycle(poset, {"Z_reg": -1, "{0}": 3}), "cycle failed"
    assert set(report.routes) == {"limit", "index", "polar"}, "routes failed"
    assert report.passed, "route agreement failed"
    assert report.invariants["N"] == 3 and report.invariants["le_identity"], "Le identity failed"
    assert len(report.samples) >= 4, "samples failed"
    solution = report.invariants["solution_chi"]
    assert solution["values"] == {"Z_reg": -1, "{0}": 1}, "solution stalks failed"
    assert solution["decomposition_holds"], "solution decomposition failed"

@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_complex_nearby_a_k(k):
    """Can count k + 1 restricted critical points for the A_k singularity"""
    cycle, report = cc.cc_complex_nearby(_spec(f"x^{k + 1} + y^2", "x,y", "nearby", test_form = DIAGONAL))
    assert cycle["{0}"] == k + 1, "multiplicity failed"
    assert cycle["Z_reg"] == -1, "sign failed"
    assert report.passed, "route agreement failed"

def test_complex_nearby_redraws_scaled_form():
    """Can replace a drawn form whose limit points crowd the origin"""
    spec = _spec("x^3 - y^2", "x,y", "nearby", test_form = RationalLinearForm((1, 100)), form_seed = 0)
    cycle, report = cc.cc_complex_nearby(spec)
    assert report.diagnostics["form_reseeds"] >= 1, "redraw failed"
    assert report.diagnostics["test_form"] != ["1", "100"], "form failed"
    assert cycle["{0}"] == 3, "multiplicity failed"

def test_complex_nearby_fermat_cubic():
    """Can compute the complex nearby cycle of the Fermat cubic"""
    cycle, report = cc.cc_complex_nearby(_spec("x^3 + y^3 + z^3", "x,y,z", "nearby"))
    assert str(cycle) == "[T*_{Z_reg}] + 12[T*_{0}]", "cycle failed"
    assert (report.invariants["mu"], report.invariants["mu_section"]) == (8, 4), "invariants failed"
    assert report.invariants["polar_multiplicity"] == 12, "polar multiplicity failed"
    assert report.invariants["solution_chi"] == {"values": {"Z_reg": -1, "{0}": -9}, "decomposition_holds": True}, "solution side failed"
    assert report.passed, "route agreement failed"

def test_vanishing_cusp():
    """Can compute the vanishing cycle of the cusp by every route"""
    cycle, report = cc.cc_vanishing(_spec("x^3 - y^2", "x,y", "vanishing", test_form = DIAGONAL))
    assert str(cycle) == "2[T*_{0}]", "cycle failed"
    assert set(report.routes) == {"morsification", "triangle", "index"}, "routes failed"
    assert report.invariants["triangle"]["holds"], "triangle failed"
    assert report.passed, "route agreement failed"

def test_vanishing_sphere():
    """Can compute the vanishing cycle of an odd-dimensional quadric"""
    cycle, report = cc.cc_vanishing(_spec("x^2 + y^2 + z^2", "x,y,z", "vanishing"))
    assert str(cycle) == "[T*_{0}]", "cycle failed"
    assert report.passed, "route agreement failed"

def test_vanishing_smooth_point():
    """Can refuse a smooth point"""
    with pytest.raises(cc.SmoothPointError):
        cc.cc_vanishing(_spec("x + y^2", "x,y", "vanishing"))

# Normal crossings
# ----------------
def test_registered_singularity():
    """Can recognize the normal crossing in any variable names"""
    assert cc.registered_singularity(parse_poly("x*y*z", "x,y,z")).name == "normal_crossings", "lookup failed"
    assert cc.registered_singularity(parse_poly("a*b*c", "a,b,c")) is not None, "renamed lookup failed"
    assert cc.registered_singularity(parse_poly("x^3 - y^2", "x,y")) is None, "isolated lookup failed"

def test_normal_crossings_vanishing():
    """Can compute the vanishing cycle of the normal crossing"""
    cycle, report = cc.cc_vanishing(_spec("x*y*z", "x,y,z", "vanishing"))
    assert str(cycle) == "-[T*_{L1}] - [T*_{L2}] - [T*_{L3}] + 2[T*_{0}]", "cycle failed"
    assert report.invariants["morsification_count"] == 2, "Morse count failed"
    assert report.passed, "route agreement failed"
    assert report.constancy["passed"], "constancy failed"

def test_normal_crossings_nearby():
    """Can compute the nearby cycle of the normal crossing"""
    cycle, report = cc.cc_complex_nearby(_spec("x*y*z", "x,y,z", "nearby"))
    assert str(cycle) == "[T*_{Z_reg}] - 2[T*_{L1}] - 2[T*_{L2}] - 2[T*_{L3}] + 3[T*_{0}]", "cycle failed"
    assert report.passed, "route agreement failed"

# Acceptance sweeps
# -----------------
ISOLATED = [
    ("x^2 + y^2", "x,y", 1, 1),
    ("x^3 - y^2", "x,y", 2, 1),
    ("x^3 + y^2", "x,y", 2, 1),
    ("x^4 + y^2", "x,y", 3, 1),
    ("x^5 + y^2", "x,y", 4, 1),
    ("x^6 + y^2", "x,y", 5, 1),
    ("x^2 + y^2 + z^2", "x,y,z", 1, 1),
    ("x^3 + y^3 + z^3", "x,y,z", 8, 4),
]

@pytest.mark.slow
@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("poly, vars, mu, mu_section", ISOLATED)
def test_le_identity_and_routes(poly, vars, mu, mu_section, seed):
    """Can confirm N = mu + mu_section and agreement of every route"""
    f = parse_poly(poly, vars)
    n = f.nvars
    cycle, report = cc.cc_complex_nearby(FamilySpec(f, "nearby", seed = seed))
    assert report.invariants["N"] == mu + mu_section, "Le identity failed"
    assert report.passed, "nearby routes failed"
    assert cycle["Z_reg"] == (-1) ** (n - 1), "sign failed"
    cycle, report = cc.cc_vanishing(FamilySpec(f, "vanishing", seed = seed))
    assert cycle == LagrangianCycle(cycle.poset, {"{0}": mu}), "vanishing cycle failed"
    assert report.passed, "vanishing routes failed"

def test_count_warnings():
    """Can carry non-Morse and radius warnings in the count result"""
    f = parse_poly("x^3", "x")
    degenerate = cc.morsification_count(f, RationalLinearForm((1,)), 0)
    assert degenerate.count == 2 and degenerate.warnings == ("non-Morse",), "non-Morse failed"
    g = parse_poly("x^2 - 4*x", "x")
    far = cc.morsification_count(g, RationalLinearForm((1,)), Fraction(1, 100), radius = 1)
    assert far.count == 0 and far.total == 1, "count failed"
    assert far.radius == 1 and "radius-suspicious" in far.warnings, "radius warning failed"
    assert far.as_dict()["warnings"] == ["radius-suspicious"], "record failed"

# Specialization
# --------------
@pytest.mark.parametrize("sheaf, expected", [
    ("restriction", {"Z_reg": -1, "{0}": 1}),
    ("nearby", {"Z_reg": -1, "{0}": 3}),
    ("vanishing", {"{0}": 2}),
])
def test_specialization_cusp(sheaf, expected):
    """Can take the specialization limit of the cusp along y = 0"""
    f = parse_poly("x^3 - y^2", "x,y")
    cycle, report = cc.cc_specialization(f, "y", sheaf = sheaf)
    assert cycle == LagrangianCycle(cycle.poset, expected), "cycle failed"
    assert report.passed, "limit and direct cycle failed"
    assert report.constancy["passed"], "constancy failed"
    assert [s["mu"] for s in report.samples] == [2] * 4, "sample Milnor numbers failed"
    assert report.invariants["submanifold"] == ["y"], "submanifold failed"

@pytest.mark.slow
def test_specialization_fermat_cubic():
    """Can take the specialization limit of the Fermat cubic at the origin"""
    f = parse_poly("x^3 + y^3 + z^3", "x,y,z")
    cycle, report = cc.cc_specialization(f, ["x", "y", "z"])
    assert str(cycle) == "[T*_{Z_reg}] + 4[T*_{0}]", "restriction cycle failed"
    assert report.passed, "limit and direct cycle failed"
    cycle, _ = cc.cc_specialization(f, "x,y,z", sheaf = "nearby")
    assert str(cycle) == "[T*_{Z_reg}] + 12[T*_{0}]", "nearby cycle failed"

def test_specialization_contracts():
    """Can reject unknown sheaves and coordinates"""
    f = parse_poly("x^3 - y^2", "x,y")
    with pytest.raises(cc.PreconditionError):
        cc.cc_specialization(f, "y", sheaf = "dual")
    with pytest.raises(cc.PreconditionError):
        cc.cc_specialization(f, "w")
