import charcycle as cc
from charcycle import parse_poly
import polars as pl
import pytest

@pytest.mark.parametrize("poly, vars, mu", [
    ("x^2 + y^2", "x,y", 1),
    ("x^3 - y^2", "x,y", 2),
    ("x^4 + y^2", "x,y", 3),
    ("x^6 + y^2", "x,y", 5),
    ("x^2 + y^2 + z^2", "x,y,z", 1),
    ("x^3 + y^3 + z^3", "x,y,z", 8),
    ("x^2*y + y^4", "x,y", 5),
])
def test_milnor_number(poly, vars, mu):
    """Can compute Milnor numbers"""
    actual = cc.milnor_number(parse_poly(poly, vars))
    assert actual == mu, "Milnor number failed"

@pytest.mark.parametrize("poly, vars, mu", [
    ("x^3 - y^2", "x,y", 2),
    ("x^2*y + y^4", "x,y", 5),
    pytest.param("x^3 + y^3 + z^3", "x,y,z", 8, marks = pytest.mark.slow),
])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_milnor_number_coordinate_invariance(poly, vars, mu, seed):
    """Can keep the Milnor number under a linear change of coordinates"""
    forward, _ = cc.random_linear_change(vars, seed)
    g = cc.substitute_linear(parse_poly(poly, vars), forward, vars)
    assert cc.milnor_number(g) == mu, "Milnor number failed"
    assert cc.local_quotient_dimension(cc.gradient(g)) == mu, "local quotient dimension failed"

def test_milnor_number_contracts():
    """Can reject smooth points, nonzero values and non-isolated points"""
    with pytest.raises(cc.SmoothPointError):
        cc.milnor_number(parse_poly("x", "x"))
    with pytest.raises(cc.SmoothPointError):
        cc.milnor_number(parse_poly("x + y^2", "x,y"))
    with pytest.raises(cc.PreconditionError):
        cc.milnor_number(parse_poly("x^2 + 1", "x"))
    with pytest.raises(cc.UndecidedError):
        cc.milnor_number(parse_poly("x*y*z", "x,y,z"), degree_cap = 8)

@pytest.mark.parametrize("poly, vars, mu_section", [
    ("x^2 + y^2", "x,y", 1),
    ("x^3 - y^2", "x,y", 1),
    ("x^5 + y^2", "x,y", 1),
    ("x^2 + y^2 + z^2", "x,y,z", 1),
    ("x^3 + y^3 + z^3", "x,y,z", 4),
])
def test_sectional_milnor_number(poly, vars, mu_section):
    """Can compute the Milnor number of a generic hyperplane section"""
    actual = cc.sectional_milnor_number(parse_poly(poly, vars))
    assert actual.value == mu_section, "section Milnor number failed"
    assert 1 <= actual.attained <= 5 and len(actual.values) == 5, "attained count failed"
    assert int(actual) == mu_section, "int conversion failed"

def test_sectional_milnor_number_attained_once(monkeypatch):
    """Can carry the attained-once warning in the result"""
    from charcycle import invariants
    table = pl.DataFrame({"seed": [0, 1, 2], "form": ["a", "b", "c"], "mu": [3, 2, None]},
                         schema = {"seed": pl.Int64, "form": pl.Utf8, "mu": pl.Int64})
    monkeypatch.setattr(invariants, "section_trials", lambda *args, **kwargs: table)
    actual = cc.sectional_milnor_number(parse_poly("x^3 + y^3 + z^3", "x,y,z"), trials = 3)
    assert actual.value == 2 and actual.attained == 1, "minimum failed"
    assert actual.warnings == ("section-minimum-attained-once",), "warning failed"
    assert actual.values == (3, 2, None), "trial values failed"

def test_section_trials_table():
    """Can list every hyperplane trial"""
    f = parse_poly("x^3 + y^3 + z^3", "x,y,z")
    table = cc.section_trials(f, trials = 4, seed = 10)
    assert table.columns == ["seed", "form", "mu"], "columns failed"
    assert table["seed"].to_list() == [10, 11, 12, 13], "seeds failed"
    assert table["mu"].to_list() == [4, 4, 4, 4], "values failed"
    with pytest.raises(cc.PreconditionError):
        cc.section_trials(parse_poly("x^2", "x"))

def test_section_trials_threads():
    """Can run hyperplane trials on worker threads"""
    f = parse_poly("x^3 - y^2", "x,y")
    serial = cc.section_trials(f, trials = 3)
    threaded = cc.section_trials(f, trials = 3, workers = 3)
    assert serial.equals(threaded), "threaded trials failed"

def test_isolated_singularity_profile():
    """Can collect the Milnor data of an isolated singularity"""
    p = cc.isolated_singularity_profile(parse_poly("x^3 - y^2", "x,y"))
    assert (p.n, p.mu, p.mu_section) == (2, 2, 1), "profile failed"
    assert p.section_bounded, "section bound failed"
    assert p.warnings == (), "warnings failed"
    assert p.as_dict()["section_values"] == [1] * 5, "trial values failed"

def test_stalk_euler_profiles():
    """Can build the stalk Euler characteristics of the three sheaves"""
    p = cc.isolated_singularity_profile(parse_poly("x^3 + y^3 + z^3", "x,y,z"))
    nearby = cc.stalk_euler_nearby(p)
    vanishing = cc.stalk_euler_vanishing(p)
    restriction = cc.stalk_euler_restriction(p)
    assert dict(nearby.values) == {"Z_reg": 1, "{0}": 9}, "nearby failed"
    assert dict(vanishing.values) == {"Z_reg": 0, "{0}": 8}, "vanishing failed"
    assert dict(restriction.values) == {"Z_reg": 1, "{0}": 1}, "restriction failed"
    difference = nearby - restriction
    assert difference["{0}"] == vanishing["{0}"], "triangle failed"
    assert difference["Z_reg"] == vanishing["Z_reg"], "triangle failed"

def test_stalk_euler_even_dimension():
    """Can apply the sign of the shift in even dimension"""
    p = cc.isolated_singularity_profile(parse_poly("x^2 + y^2", "x,y"))
    assert dict(cc.stalk_euler_nearby(p).values) == {"Z_reg": -1, "{0}": 0}, "nearby failed"

def test_stalk_euler_from_fibers():
    """Can build stalk profiles from Milnor fiber Euler characteristics"""
    fibers = {"Z_reg": 1, "L1": 0, "L2": 0, "L3": 0, "{0}": 0}
    nearby = cc.stalk_euler_from_fibers(fibers, 3, "nearby")
    vanishing = cc.stalk_euler_from_fibers(fibers, 3, "vanishing")
    assert dict(nearby.values) == fibers, "nearby failed"
    assert dict(vanishing.values) == {"Z_reg": 0, "L1": -1, "L2": -1, "L3": -1, "{0}": -1}, "vanishing failed"
    with pytest.raises(ValueError):
        cc.stalk_euler_from_fibers(fibers, 3, "other")

def test_solution_chi():
    """Can pass to the solution-complex side"""
    chi = cc.StalkEulerProfile("nearby", {"Z_reg": 1, "{0}": 9})
    actual = cc.solution_chi(chi, 3)
    assert dict(actual.values) == {"Z_reg": -1, "{0}": -9}, "solution side failed"

def test_stalk_profile_table():
    """Can show a stalk profile as a table"""
    chi = cc.StalkEulerProfile("nearby", {"Z_reg": -1, "{0}": 1})
    expected = pl.DataFrame({"stratum": ["Z_reg", "{0}"], "chi": [-1, 1]})
    assert chi.to_polars().equals(expected), "table failed"
