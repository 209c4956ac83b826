"""
Characteristic cycles of nearby and vanishing cycle sheaves.

Every pipeline computes the cycle in two independent ways and compares
them exactly:

* a limit route that counts critical points (restricted to the fiber
  ``f = a``, or of a Morsification ``f - a*l``) over a decreasing schedule
  of parameters and reads off the stabilized count;
* an index route that solves the index-theorem system for the stalk Euler
  characteristics with the Euler obstruction table.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .config import (Tolerances, Caps, DEFAULT_SCHEDULE, DEFAULT_TRIALS,
                     DEFAULT_STABILITY_WINDOW, DEFAULT_RADIUS_SCALE, AUX_SEED_OFFSET,
                     FORM_RESEED_OFFSET, RESAMPLE_SEED_OFFSET)
from .cycles import (Stratum, StratificationPoset, EulerObstructionTable,
                     LagrangianCycle, FamilyOfCycles, cc_from_chi, pair_with_test,
                     limit_of_family, constancy_check, isolated_hypersurface_strata)
from .errors import (PreconditionError, NotZeroDimensionalError, SingularFiberError,
                     DegenerateMorseError, DimensionMismatchError, UndecidedError,
                     CapExceededError)
from .invariants import (ZREG, ORIGIN, isolated_singularity_profile,
                         stalk_euler_nearby, stalk_euler_vanishing,
                         stalk_euler_restriction, stalk_euler_from_fibers, solution_chi)
from .poly import (Polynomial, RationalLinearForm, parse_poly, gradient, hessian,
                   evaluate, substitute_linear, random_linear_form)
from .quotient import solve_zero_dim_system, local_quotient_dimension
from .utils import _as_fraction, _as_list, _sign_power

__all__ = [
    "FamilySpec", "CrossCheckReport", "CriticalCount", "RegisteredSingularity",
    "MODES",
    "lagrange_system", "morsification_system", "escape_radius",
    "polar_multiplicity",
    "restricted_critical_count", "morsification_count",
    "real_signed_morse_count",
    "cc_real_nearby", "cc_complex_nearby", "cc_vanishing", "cc_specialization",
    "registered_singularity",
]

logger = logging.getLogger(__name__)

MODES = ("real-nearby", "complex-nearby", "vanishing")
_MODE_ALIASES = {"nearby": "complex-nearby", "real": "real-nearby"}
FORMULATIONS = ("minors", "multiplier")


def _rationals(values, what):
    try:
        return tuple(_as_fraction(a) for a in _as_list(values))
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise PreconditionError(f"Cannot read the {what} {values!r} as rationals: {e}",
                                field = what) from e


def _floats(values, what):
    try:
        out = tuple(float(r) for r in _as_list(values))
    except (ValueError, TypeError) as e:
        raise PreconditionError(f"Cannot read the {what} {values!r} as numbers: {e}",
                                field = what) from e
    if not all(math.isfinite(r) for r in out):
        raise PreconditionError(f"The {what} must be finite", field = what)
    return out


# Run settings
# ----------------------
@dataclass(frozen = True)
class FamilySpec:
    """
    Everything a pipeline needs.

    Parameters
    ----------
    f : Polynomial
    mode : str
        ``'real-nearby'``, ``'complex-nearby'`` (alias ``'nearby'``) or
        ``'vanishing'``.
    a_schedule : tuple
        Strictly decreasing positive rationals.
    test_form : RationalLinearForm, optional
        The test function or perturbation direction. Defaults to ``x_1`` in
        real-nearby mode and to ``random_linear_form(n, seed)`` otherwise.
    radius_schedule : tuple of float, optional
        Explicit per-parameter filtering radii (positive, nonincreasing).
    radius_scale : float, optional
        Use ``min(radius_scale * a^(1/deg f), escape radius)``.
    seed : int
    trials : int
        Hyperplane trials for the section Milnor number.
    stability_window : int
    lagrange : str
        ``'minors'`` or ``'multiplier'``.
    extend_schedule : bool
        Slide the schedule by further decades while the samples differ.
    form_seed : int, optional
        Seed the test form was drawn with; set when ``test_form`` is left to
        its random default, which lets the Lagrange route redraw a badly
        scaled form.
    """
    f: Polynomial
    mode: str
    a_schedule: tuple = DEFAULT_SCHEDULE
    test_form: Optional[RationalLinearForm] = None
    radius_schedule: Optional[tuple] = None
    radius_scale: Optional[float] = None
    seed: int = 0
    trials: int = DEFAULT_TRIALS
    stability_window: int = DEFAULT_STABILITY_WINDOW
    lagrange: str = "minors"
    extend_schedule: bool = True
    tolerances: Tolerances = field(default_factory = Tolerances)
    caps: Caps = field(default_factory = Caps.from_env)
    workers: Optional[int] = None
    form_seed: Optional[int] = None

    def __post_init__(self):
        mode = _MODE_ALIASES.get(self.mode, self.mode)
        if mode not in MODES:
            raise PreconditionError(f"Unknown mode {self.mode!r}; use one of {MODES}")
        object.__setattr__(self, "mode", mode)
        schedule = _rationals(self.a_schedule, "a-schedule")
        if len(schedule) < 2:
            raise PreconditionError("The a-schedule needs at least two values")
        if any(a <= 0 for a in schedule) or any(x <= y for x, y in zip(schedule, schedule[1:])):
            raise PreconditionError("The a-schedule must be strictly decreasing and positive",
                                    schedule = [str(a) for a in schedule])
        if len(schedule) < self.stability_window:
            raise PreconditionError(
                f"The a-schedule is shorter than the stability window {self.stability_window}")
        object.__setattr__(self, "a_schedule", schedule)
        if self.radius_schedule is not None:
            radii = _floats(self.radius_schedule, "radius schedule")
            if len(radii) != len(schedule):
                raise PreconditionError("One radius per a-value is required")
            if any(r <= 0 for r in radii) or any(x < y for x, y in zip(radii, radii[1:])):
                raise PreconditionError("Radii must be positive and nonincreasing")
            object.__setattr__(self, "radius_schedule", radii)
        if self.radius_scale is not None:
            scale, = _floats([self.radius_scale], "radius_scale")
            if scale <= 0:
                raise PreconditionError("radius_scale must be positive")
            object.__setattr__(self, "radius_scale", scale)
        bad = {k: v for k, v in asdict(self.tolerances).items()
               if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0)}
        if bad:
            raise PreconditionError("Tolerances must be positive and finite", tolerances = bad)
        if self.lagrange not in FORMULATIONS:
            raise PreconditionError(f"lagrange must be one of {FORMULATIONS}")
        n = self.f.nvars
        form = self.test_form
        if form is None:
            if mode == "real-nearby":
                form = RationalLinearForm((1,) + (0,) * (n - 1))
            else:
                form = random_linear_form(n, self.seed)
                object.__setattr__(self, "form_seed", self.seed)
        if form.n != n:
            raise DimensionMismatchError(f"Test form has {form.n} coefficients for {n} variables")
        object.__setattr__(self, "test_form", form)

    @classmethod
    def from_text(cls, poly, variables, mode, **kwargs):
        return cls(parse_poly(poly, variables), mode, **kwargs)

    @property
    def n(self):
        return self.f.nvars

    def echo(self):
        return {
            "f": str(self.f),
            "variables": list(self.f.variables),
            "mode": self.mode,
            "a_schedule": [str(a) for a in self.a_schedule],
            "test_form": [str(c) for c in self.test_form.coefficients],
            "radius_schedule": None if self.radius_schedule is None else list(self.radius_schedule),
            "radius_scale": self.radius_scale,
            "seed": self.seed,
            "trials": self.trials,
            "stability_window": self.stability_window,
            "lagrange": self.lagrange,
        }


@dataclass(frozen = True)
class CrossCheckReport:
    """
    Outcome of one pipeline: the cycle of every route and their verdict.

    ``passed`` holds only when all routes give the same cycle.
    """
    mode: str
    cycle: LagrangianCycle
    routes: dict
    passed: bool
    invariants: dict = field(default_factory = dict)
    samples: tuple = ()
    constancy: dict = field(default_factory = dict)
    warnings: tuple = ()
    diagnostics: dict = field(default_factory = dict)

    def as_dict(self):
        return {
            "mode": self.mode,
            "passed": self.passed,
            "cycle": self.cycle.as_records(),
            "cycle_text": str(self.cycle),
            "routes": {name: {"cycle": c.as_records(), "text": str(c)}
                       for name, c in self.routes.items()},
            "invariants": dict(self.invariants),
            "samples": [dict(s) for s in self.samples],
            "constancy": dict(self.constancy),
            "warnings": list(self.warnings),
            "diagnostics": dict(self.diagnostics),
        }


def _routes_agree(routes):
    cycles = list(routes.values())
    return all(c == cycles[0] for c in cycles[1:])


# Polynomial systems
# ------------------
def _fresh(variables, base):
    name = base
    while name in variables:
        name += "_"
    return name


def _extend(p, variables):
    pad = (0,) * (len(variables) - p.nvars)
    return Polynomial(variables, {e + pad: c for e, c in p.terms.items()})


def lagrange_system(f: Polynomial, form: RationalLinearForm, a, formulation = "minors"):
    """
    Critical points of the linear form restricted to the fiber ``f = a``.

    Parameters
    ----------
    formulation : str
        ``'minors'``: the 2x2 minors ``df/dx_i c_j - df/dx_j c_i`` together
        with ``f - a``. ``'multiplier'``: ``df/dx_i - lambda c_i`` and
        ``f - a`` in one extra variable ``lambda`` (the last one).

    Returns
    -------
    list of Polynomial

    Examples
    --------
    >>> f = parse_poly("x^2 + y^2", "x,y")
    >>> [str(g) for g in lagrange_system(f, RationalLinearForm((1, 2)), Fraction(1, 100))]
    ['4*x - 2*y', 'x^2 + y^2 - 1/100']
    """
    if form.n != f.nvars:
        raise DimensionMismatchError(f"Form has {form.n} coefficients for {f.nvars} variables")
    a = _as_fraction(a)
    grad = gradient(f)
    c = form.coefficients
    if formulation == "minors":
        n = f.nvars
        minors = [grad[i] * c[j] - grad[j] * c[i] for i in range(n) for j in range(i + 1, n)]
        return [m for m in minors if not m.is_zero()] + [f - a]
    if formulation == "multiplier":
        lam = _fresh(f.variables, "lam")
        variables = f.variables + (lam,)
        lam_poly = Polynomial.variable(variables, lam)
        return [_extend(g, variables) - lam_poly * ci for g, ci in zip(grad, c)] + \
               [_extend(f, variables) - a]
    raise PreconditionError(f"formulation must be one of {FORMULATIONS}")


def morsification_system(f: Polynomial, form: RationalLinearForm, a):
    """Gradient of the Morsification ``f - a * l``."""
    a = _as_fraction(a)
    return gradient(f - form.as_polynomial(f.variables) * a)


def escape_radius(gens, nvars = None, seed = 0, tolerances = None, caps = None):
    """
    Half the distance from the origin to the nearest other solution.

    Used on a system at ``a = 0``: its solutions away from the origin are
    the limits of the critical points that do not converge to the
    singular point. The origin is removed with an extra variable ``t`` and
    the equation ``t * l'(x) = 1`` for a second random form ``l'``.

    Parameters
    ----------
    gens : list of Polynomial
    nvars : int, optional
        Only the first ``nvars`` coordinates are spatial (the others are
        multipliers). Defaults to all.

    Returns
    -------
    float or None
        ``math.inf`` when no other solution exists, ``None`` when the
        system has a positive-dimensional solution set off the origin.
    """
    gens = list(gens)
    variables = gens[0].variables
    nvars = len(variables) if nvars is None else nvars
    t = _fresh(variables, "t")
    ext = variables + (t,)
    aux = random_linear_form(nvars, seed + AUX_SEED_OFFSET)
    coeffs = tuple(aux.coefficients) + (0,) * (len(variables) - nvars)
    aux_poly = _extend(RationalLinearForm(coeffs).as_polynomial(variables), ext)
    system = [_extend(g, ext) for g in gens if not g.is_zero()]
    system.append(Polynomial.variable(ext, t) * aux_poly - 1)
    try:
        sol = solve_zero_dim_system(system, seed, tolerances, caps)
    except NotZeroDimensionalError:
        logger.warning("solutions away from the origin are not isolated; no escape radius")
        return None
    norms = [float(np.linalg.norm(np.asarray(p[:nvars]))) for p in sol.points]
    if not norms:
        return math.inf
    radius = min(norms) / 2
    logger.debug("escape radius %.6g from %d limit point(s)", radius, len(norms))
    return radius


def polar_multiplicity(f: Polynomial, form: RationalLinearForm, degree_cap = None, caps = None):
    """
    Local intersection number at the origin of the polar curve with ``f = 0``.

    The dimension of the local algebra of the 2x2 minors of
    ``(grad f, c)`` together with ``f``; for an isolated singularity and a
    generic form it equals ``mu + mu_section``.

    Examples
    --------
    >>> polar_multiplicity(parse_poly("x^3 - y^2", "x,y"), random_linear_form(2, 0))
    3
    """
    gens = lagrange_system(f, form, 0, "minors")
    return local_quotient_dimension(gens, degree_cap = degree_cap, caps = caps)


# Counting
# --------
def _within(sol, nvars, radius, real_tolerance = None):
    out = []
    for k, p in enumerate(sol.points):
        x = np.asarray(p[:nvars])
        if not np.linalg.norm(x) < radius:
            continue
        if real_tolerance is not None and np.any(
                np.abs(x.imag) > real_tolerance * np.maximum(1, np.abs(x))):
            continue
        out.append(k)
    return out


@dataclass(frozen = True)
class CriticalCount:
    """
    Critical points of one sample counted with multiplicity.

    ``count`` is the number within ``radius`` (``None`` for no radius),
    ``total`` the number over all of ``C^n``. ``warnings`` holds
    ``'non-Morse'`` when a counted point is multiple and
    ``'radius-suspicious'`` when every point lies outside the radius.
    """
    count: int
    total: int
    radius: Optional[float] = None
    warnings: tuple = ()

    def __int__(self):
        return self.count

    def as_dict(self):
        return {"count": self.count, "total": self.total, "radius": self.radius,
                "warnings": list(self.warnings)}


def _count_sample(gens, nvars, radius, seed, tol, caps):
    sol = solve_zero_dim_system(gens, seed, tol, caps)
    radius = math.inf if radius is None else radius
    inside = _within(sol, nvars, radius)
    mults = [sol.multiplicities[k] for k in inside]
    warnings = []
    if any(m > 1 for m in mults):
        warnings.append("non-Morse")
        logger.warning("non-Morse sample (multiplicities %s); rerun with a new seed", mults)
    if not mults and sol.total_with_multiplicity > 0:
        warnings.append("radius-suspicious")
        logger.warning("all %d solutions lie outside radius %.3g",
                       sol.total_with_multiplicity, radius)
    return CriticalCount(
        count = sum(mults),
        total = sol.total_with_multiplicity,
        radius = None if math.isinf(radius) else radius,
        warnings = tuple(warnings),
    )


def _record(count):
    rec = count.as_dict()
    rec["payload"] = rec.pop("count")
    return rec


def restricted_critical_count(f: Polynomial, form: RationalLinearForm, a, radius = None,
                              seed = 0, formulation = "minors", tolerances = None, caps = None):
    """
    Number of critical points of ``form`` on ``f = a`` within ``radius``.

    Counted with multiplicity; ``radius=None`` counts all of them.

    Returns
    -------
    CriticalCount

    Examples
    --------
    >>> f = parse_poly("x^3 + y^3 + z^3", "x,y,z")
    >>> restricted_critical_count(f, random_linear_form(3, 0), Fraction(1, 1000)).count
    12
    """
    gens = lagrange_system(f, form, a, formulation)
    return _count_sample(gens, f.nvars, radius, seed, tolerances, caps)


def morsification_count(f: Polynomial, form: RationalLinearForm, a, radius = None,
                        seed = 0, tolerances = None, caps = None):
    """
    Number of critical points of ``f - a * l`` within ``radius``.

    Returns
    -------
    CriticalCount

    Examples
    --------
    >>> f = parse_poly("x*y*z", "x,y,z")
    >>> morsification_count(f, RationalLinearForm((1, 1, 1)), 1).count
    2
    """
    gens = morsification_system(f, form, a)
    return _count_sample(gens, f.nvars, radius, seed, tolerances, caps)


_FIBER = "Z_a"


@lru_cache(maxsize = None)
def _fiber_poset(n):
    return StratificationPoset([Stratum(_FIBER, n - 1, n, real = True)])


def _morse_index(f, form, orientation, x, tol):
    n = f.nvars
    g = np.array([evaluate(d, x).real for d in gradient(f)])
    if np.linalg.norm(g) <= tol.hessian * max(1.0, float(np.linalg.norm(x))):
        raise SingularFiberError("The fiber is singular at a critical point",
                                 point = [float(v) for v in x])
    c = orientation * np.array([float(v) for v in form.coefficients])
    lam = float(c @ g) / float(g @ g)
    hess = np.array([[evaluate(h, x).real for h in row] for row in hessian(f)])
    # Hessian of phi - lam*f on the tangent space of the fiber
    tangent = np.linalg.svd(g.reshape(1, n))[2][1:].T
    projected = tangent.T @ (-lam * hess) @ tangent
    eig = np.linalg.eigvalsh(projected)
    if eig.size:
        scale = max(float(np.abs(eig).max()), np.finfo(float).tiny)
        if np.any(np.abs(eig) < tol.hessian * scale) or np.abs(eig).max() == 0:
            raise DegenerateMorseError("Degenerate critical point; rerun with another test form",
                                       point = [float(v) for v in x],
                                       eigenvalues = [float(v) for v in eig])
    return int(np.sum(eig < 0))


def real_signed_morse_count(f: Polynomial, form: RationalLinearForm, a, radius = None,
                            orientation = 1, seed = 0, tolerances = None, caps = None):
    """
    Signed count of real critical points of ``orientation * form`` on ``f = a``.

    Each real critical point within ``radius`` contributes
    ``(-1)^index``, the index being the number of negative eigenvalues of
    the Hessian of ``phi - lambda f`` on the tangent space of the fiber.

    Returns
    -------
    tuple
        ``(count, indices)`` with ``indices`` sorted.

    Raises
    ------
    DegenerateMorseError
        When a real critical point is not Morse.
    SingularFiberError
        When the fiber is singular at a critical point.

    Examples
    --------
    >>> f = parse_poly("x^3 - y^2", "x,y")
    >>> real_signed_morse_count(f, RationalLinearForm((1, 0)), Fraction(1, 100))
    (1, (0,))
    >>> real_signed_morse_count(f, RationalLinearForm((1, 0)), Fraction(1, 100), orientation = -1)
    (-1, (1,))
    """
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    tol = tolerances or Tolerances()
    radius = math.inf if radius is None else radius
    sol = solve_zero_dim_system(lagrange_system(f, form, a), seed, tol, caps)
    indices = []
    for k in _within(sol, f.nvars, radius, tol.imaginary):
        if sol.multiplicities[k] > 1:
            raise DegenerateMorseError("Real critical point of multiplicity > 1",
                                       multiplicity = sol.multiplicities[k])
        x = np.asarray(sol.points[k]).real
        indices.append(_morse_index(f, form, orientation, x, tol))
    indices = tuple(sorted(indices))
    fiber = LagrangianCycle(_fiber_poset(f.nvars), {_FIBER: 1})
    return pair_with_test(fiber, {_FIBER: indices}), indices


def _real_points_outside(f, form, a, radius, seed, tol, caps):
    sol = solve_zero_dim_system(lagrange_system(f, form, a), seed, tol, caps)
    real = _within(sol, f.nvars, math.inf, tol.imaginary)
    inside = _within(sol, f.nvars, radius, tol.imaginary)
    return len(real) - len(inside)


# Schedules
# ---------
def _radius_for(spec, a, index, escape):
    if spec.radius_schedule is not None:
        return spec.radius_schedule[index]
    d = max(spec.f.degree, 1)
    scaled = None
    if spec.radius_scale is not None:
        scaled = spec.radius_scale * float(a) ** (1.0 / d)
    if escape is None:
        # no usable escape radius: fall back to the scaled default
        return scaled if scaled is not None else DEFAULT_RADIUS_SCALE * float(a) ** (1.0 / d)
    return escape if scaled is None else min(scaled, escape)


def _map(spec, fn, items):
    if spec.workers and spec.workers > 1:
        with ThreadPoolExecutor(max_workers = spec.workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _run_schedule(spec, sample, escape):
    """
    Evaluate ``sample(a, radius)`` over the schedule, sliding it by
    decades while the samples differ.

    Returns the family over the final window, its constancy report and
    all sample records in schedule order.
    """
    schedule = list(spec.a_schedule)
    width = len(schedule)
    records = {}
    extra = 0

    def compute(item):
        index, a = item
        radius = _radius_for(spec, a, min(index, width - 1), escape)
        rec = sample(a, radius)
        rec["a"] = str(a)
        logger.info("a = %s: %s", a, rec["payload"])
        return a, rec

    while True:
        todo = [(k, a) for k, a in enumerate(schedule) if a not in records]
        for a, rec in _map(spec, compute, todo):
            records[a] = rec
        window = schedule[-width:]
        fam = FamilyOfCycles(tuple((a, records[a]["payload"]) for a in window))
        report = constancy_check(fam)
        can_extend = (spec.extend_schedule and spec.radius_schedule is None
                      and extra < spec.caps.max_extra_decades)
        if report.passed or not can_extend:
            break
        extra += 1
        schedule.append(schedule[-1] / 10)
        logger.info("samples differ; extending the schedule to a = %s", schedule[-1])
    ordered = [records[a] for a in schedule]
    return fam, report, ordered, extra


def _sample_rows(records):
    rows = []
    for rec in records:
        row = {k: v for k, v in rec.items() if k != "payload"}
        payload = rec["payload"]
        row["payload"] = payload if isinstance(payload, (int, tuple, list)) else str(payload)
        if isinstance(row["payload"], tuple):
            row["payload"] = list(row["payload"])
        rows.append(row)
    return tuple(rows)


# Registered non-isolated singularities
# -------------------------------------
@dataclass(frozen = True)
class RegisteredSingularity:
    """
    A non-isolated singularity entered from data: strata, Euler
    obstructions, Milnor fiber Euler characteristics and normal slices.
    """
    name: str
    f: Polynomial
    poset: StratificationPoset
    eu: EulerObstructionTable
    fiber_chi: dict
    slices: dict

    def slice_function(self, label):
        """``f`` restricted to the normal slice through the stratum's base point."""
        point, free = self.slices[label]
        mapping = {}
        for v, p in zip(self.f.variables, point):
            image = Polynomial.constant(free, p)
            if v in free:
                image = image + Polynomial.variable(free, v)
            mapping[v] = image
        return substitute_linear(self.f, mapping, free)


def _shape(p):
    return p.nvars, tuple(p.terms.items())


@lru_cache(maxsize = None)
def _registry():
    from . import data
    strata = data.normal_crossings_strata
    poset = StratificationPoset.from_polars(strata)
    eu = EulerObstructionTable.from_polars(poset, data.normal_crossings_euler)
    entry = data.catalog.filter(data.catalog["name"] == "normal_crossings").row(0, named = True)
    f = parse_poly(entry["poly"], entry["vars"])
    slices = {}
    for r in strata.iter_rows(named = True):
        if r["slice_point"]:
            point = tuple(_as_fraction(v) for v in _as_list(r["slice_point"]))
            slices[r["stratum"]] = (point, tuple(_as_list(r["slice_vars"])))
    fiber_chi = {r["stratum"]: int(r["fiber_chi"]) for r in strata.iter_rows(named = True)}
    reg = RegisteredSingularity(entry["name"], f, poset, eu, fiber_chi, slices)
    return {_shape(f): reg}


def registered_singularity(f: Polynomial):
    """The registered entry with the same terms as ``f`` (any variable names), or None."""
    return _registry().get(_shape(f))


# Pipelines
# ---------
def cc_real_nearby(spec: FamilySpec):
    """
    Characteristic cycle of the real nearby cycles at the origin.

    For every ``a`` of the schedule the signed real Morse count of the test
    form on ``f = a`` is taken for both covectors ``p`` and ``-p``. The
    stabilized counts are the multiplicities; they carry the label
    ``{0}`` when they agree and ``{0}+`` / ``{0}-`` otherwise.

    Returns
    -------
    tuple
        ``(LagrangianCycle, CrossCheckReport)``

    Examples
    --------
    >>> cycle, report = cc_real_nearby(FamilySpec.from_text("x^2 + y^2 + z^2", "x,y,z", "real-nearby"))
    >>> print(cycle)
    2[T*_{0}]
    """
    if spec.mode != "real-nearby":
        raise PreconditionError("cc_real_nearby needs mode 'real-nearby'")
    f, form, tol, caps = spec.f, spec.test_form, spec.tolerances, spec.caps
    if f.constant_term != 0:
        raise PreconditionError(f"f(0) = {f.constant_term} is not zero")
    escape = escape_radius(lagrange_system(f, form, 0), f.nvars, spec.seed, tol, caps)

    def sample(a, radius):
        plus, ip = real_signed_morse_count(f, form, a, radius, 1, spec.seed, tol, caps)
        minus, im = real_signed_morse_count(f, form, a, radius, -1, spec.seed, tol, caps)
        return {"payload": (plus, minus), "radius": None if radius is None or math.isinf(radius) else radius,
                "indices_plus": list(ip), "indices_minus": list(im)}

    fam, constancy, records, extra = _run_schedule(spec, sample, escape)
    plus, minus = limit_of_family(fam, spec.stability_window)
    plus_fam = FamilyOfCycles(tuple((a, p[0]) for a, p in fam.samples))
    minus_fam = FamilyOfCycles(tuple((a, p[1]) for a, p in fam.samples))

    cycle = _real_point_cycle(f.nvars, plus, minus)

    # same window and radii, fresh seed for the combination and the root finder
    radii = {rec["a"]: rec["radius"] for rec in records}
    reseed = spec.seed + RESAMPLE_SEED_OFFSET

    def resample(a):
        radius = radii[str(a)]
        radius = math.inf if radius is None else radius
        p, _ = real_signed_morse_count(f, form, a, radius, 1, reseed, tol, caps)
        m, _ = real_signed_morse_count(f, form, a, radius, -1, reseed, tol, caps)
        return a, (p, m)

    resampled = constancy_check(FamilyOfCycles(tuple(_map(spec, resample, fam.parameters))))
    routes = {"limit": cycle, "resample": _real_point_cycle(f.nvars, *resampled.value)}

    last = records[-1]
    microlocal = {}
    for key, indices in (("+", last["indices_plus"]), ("-", last["indices_minus"])):
        # the full stalk is determined only by a single Morse datum
        microlocal[key] = (f"C_{{0}}[-{indices[0]}]" if indices[0] else "C_{0}") \
            if len(indices) == 1 else None
    fiber_euler = None
    if plus == minus:
        last_a = fam.parameters[-1]
        radius = _radius_for(spec, last_a, len(spec.a_schedule) - 1, escape)
        if _real_points_outside(f, form, last_a, radius, spec.seed, tol, caps) == 0:
            fiber_euler = plus

    passed = constancy.passed and resampled.passed and _routes_agree(routes)
    logger.info("real nearby: %s (%s)", cycle, "pass" if passed else "fail")
    report = CrossCheckReport(
        mode = spec.mode, cycle = cycle, routes = routes, passed = passed,
        invariants = {
            "signed_count_plus": plus, "signed_count_minus": minus,
            "microlocal_euler": {"+": plus, "-": minus},
            "microlocal_type": microlocal,
            "fiber_euler_characteristic": fiber_euler,
        },
        samples = _sample_rows(records),
        constancy = {"plus": _constancy_dict(plus_fam), "minus": _constancy_dict(minus_fam),
                     "resample": resampled.as_dict()},
        diagnostics = {"escape_radius": _finite(escape), "extra_decades": extra},
    )
    return cycle, report


def _real_point_cycle(n, plus, minus):
    # one conormal label per covector orientation unless both agree
    if plus == minus:
        poset = StratificationPoset([Stratum(ORIGIN, 0, n, real = True)])
        return LagrangianCycle(poset, {ORIGIN: plus})
    poset = StratificationPoset([Stratum(ORIGIN + "+", 0, n, real = True),
                                 Stratum(ORIGIN + "-", 0, n, real = True)])
    return LagrangianCycle(poset, {ORIGIN + "+": plus, ORIGIN + "-": minus})


def _constancy_dict(fam):
    return constancy_check(fam).as_dict()


def _finite(r):
    return None if r is None or math.isinf(r) else r


def _isolated_setup(spec):
    profile = isolated_singularity_profile(spec.f, spec.trials, spec.seed,
                                           caps = spec.caps, workers = spec.workers)
    poset = isolated_hypersurface_strata(spec.n)
    eu = EulerObstructionTable.isolated_hypersurface(poset, spec.n, profile.mu_section)
    return profile, poset, eu


def _separation_floor(spec):
    # norm a^(1/deg f) of the near points over the last reachable window
    window = spec.a_schedule[-spec.stability_window]
    if spec.extend_schedule and spec.radius_schedule is None:
        window = window / 10 ** spec.caps.max_extra_decades
    return 2 * float(window) ** (1.0 / max(spec.f.degree, 1))


def _lagrange_form(spec):
    """
    Test form of the Lagrange route and its escape radius.

    A drawn form can be generic and still badly scaled: for ``x^3 - y^2``
    and ``c = (1, 100)`` the off-origin limit points lie within ``1e-4`` of
    the origin, so the near points only separate from them far below the
    reachable values of ``a``. Such a draw is replaced by another form of
    the seed, at most ``max_reseeds`` times. An explicit form is kept.
    """
    f, tol, caps = spec.f, spec.tolerances, spec.caps
    form, floor = spec.test_form, _separation_floor(spec)
    for attempt in range(caps.max_reseeds + 1):
        escape = escape_radius(lagrange_system(f, form, 0, spec.lagrange), f.nvars,
                               spec.seed, tol, caps)
        if spec.form_seed is None or escape is None or escape > floor:
            return form, escape, attempt
        if attempt == caps.max_reseeds:
            break
        logger.debug("escape radius %.3g of %s is below %.3g; redrawing the test form",
                     escape, form, floor)
        form = random_linear_form(f.nvars, spec.form_seed + (attempt + 1) * FORM_RESEED_OFFSET)
    logger.warning("every drawn test form leaves an escape radius below %.3g", floor)
    return form, escape, attempt


def _lagrange_limit(spec):
    f, tol, caps = spec.f, spec.tolerances, spec.caps
    form, escape, reseeds = _lagrange_form(spec)

    def sample(a, radius):
        return _record(_count_sample(lagrange_system(f, form, a, spec.lagrange),
                                     f.nvars, radius, spec.seed, tol, caps))

    fam, constancy, records, extra = _run_schedule(spec, sample, escape)
    N = limit_of_family(fam, spec.stability_window)
    diagnostics = {"escape_radius": _finite(escape), "extra_decades": extra,
                   "test_form": [str(c) for c in form.coefficients], "form_reseeds": reseeds}
    return N, form, fam, constancy, records, diagnostics


def cc_complex_nearby(spec: FamilySpec):
    """
    Characteristic cycle of the complex nearby cycles ``psi_f(C[n])[-1]``.

    Isolated singularities: the limit route counts the critical points
    ``N`` of the test form on ``f = a`` near the origin, giving
    ``(-1)^(n-1)[T*_{Z_reg}] + N[T*_{0}]``; the index route applies the
    index rule to the stalk profile with ``Eu_Z(0) = 1 + (-1)^n mu_section``;
    the polar route uses the local polar multiplicity. They agree exactly
    when ``N = mu + mu_section``.

    Registered non-isolated singularities: the index route with the
    registered Euler obstructions, against the vanishing cycle of the
    Morsification route plus the cycle of the restriction.

    Returns
    -------
    tuple
        ``(LagrangianCycle, CrossCheckReport)``

    Examples
    --------
    >>> cycle, report = cc_complex_nearby(FamilySpec.from_text("x^3 + y^3 + z^3", "x,y,z", "nearby"))
    >>> print(cycle)
    [T*_{Z_reg}] + 12[T*_{0}]
    """
    if spec.mode != "complex-nearby":
        raise PreconditionError("cc_complex_nearby needs mode 'complex-nearby'")
    reg = registered_singularity(spec.f)
    if reg is not None:
        return _registered_nearby(spec, reg)

    return _isolated_nearby(spec, _isolated_setup(spec))


def _isolated_nearby(spec, setup):
    profile, poset, eu = setup
    sign = _sign_power(spec.n - 1)
    N, form, fam, constancy, records, diag = _lagrange_limit(spec)
    limit_cycle = LagrangianCycle(poset, {ZREG: sign, ORIGIN: N})
    index_cycle = cc_from_chi(stalk_euler_nearby(profile).as_function(poset), eu)
    routes = {"limit": limit_cycle, "index": index_cycle}

    warnings = list(profile.warnings)
    polar = None
    try:
        polar = polar_multiplicity(spec.f, form, caps = spec.caps)
        routes["polar"] = LagrangianCycle(poset, {ZREG: sign, ORIGIN: polar})
    except (UndecidedError, CapExceededError) as e:
        warnings.append("polar-undecided")
        logger.warning("polar multiplicity unavailable: %s", e)
    for rec in records:
        warnings.extend(w for w in rec["warnings"] if w not in warnings)

    # chi(Sol) = -Eu_Z + (-1)^n (mu + mu_section) 1_{0}
    solution = solution_chi(stalk_euler_nearby(profile), spec.n)
    decomposition = {s: -eu.value(ZREG, s) for s in (ZREG, ORIGIN)}
    decomposition[ORIGIN] += _sign_power(spec.n) * (profile.mu + profile.mu_section)

    passed = _routes_agree(routes)
    logger.info("complex nearby: %s (%s)", limit_cycle, "pass" if passed else "fail")
    report = CrossCheckReport(
        mode = spec.mode, cycle = limit_cycle, routes = routes, passed = passed,
        invariants = {
            **profile.as_dict(),
            "N": N,
            "polar_multiplicity": polar,
            "le_identity": N == profile.mu + profile.mu_section,
            "solution_chi": {"values": dict(solution.values),
                             "decomposition_holds": dict(solution.values) == decomposition},
        },
        samples = _sample_rows(records),
        constancy = constancy.as_dict(),
        warnings = tuple(warnings),
        diagnostics = diag,
    )
    return limit_cycle, report


def cc_vanishing(spec: FamilySpec):
    """
    Characteristic cycle of the vanishing cycles ``phi_f(C[n])[-1]``.

    Isolated singularities: the Morsification route counts the critical
    points of ``f - a l`` near the origin (``mu`` of them) and gives
    ``mu [T*_{0}]``; the triangle route subtracts the cycle of the
    restriction ``C_Z[n-1]`` from the complex nearby cycle; the index
    route applies the index rule to the vanishing stalk profile.

    Registered non-isolated singularities: the Morsification route adds the
    counts on the normal slice of every stratum, signed by
    ``(-1)^(dim S)``.

    Returns
    -------
    tuple
        ``(LagrangianCycle, CrossCheckReport)``

    Examples
    --------
    >>> cycle, report = cc_vanishing(FamilySpec.from_text("x*y*z", "x,y,z", "vanishing"))
    >>> print(cycle)
    -[T*_{L1}] - [T*_{L2}] - [T*_{L3}] + 2[T*_{0}]
    """
    if spec.mode != "vanishing":
        raise PreconditionError("cc_vanishing needs mode 'vanishing'")
    reg = registered_singularity(spec.f)
    if reg is not None:
        return _registered_vanishing(spec, reg)

    profile, poset, eu = _isolated_setup(spec)
    f, form, tol, caps = spec.f, spec.test_form, spec.tolerances, spec.caps
    escape = escape_radius(gradient(f), f.nvars, spec.seed, tol, caps)

    def sample(a, radius):
        return _record(_count_sample(morsification_system(f, form, a), f.nvars, radius,
                                     spec.seed, tol, caps))

    fam, constancy, records, extra = _run_schedule(spec, sample, escape)
    m = limit_of_family(fam, spec.stability_window)
    morse_cycle = LagrangianCycle(poset, {ORIGIN: m})

    nearby_cycle, nearby_report = _isolated_nearby(_with_mode(spec, "complex-nearby"),
                                                   (profile, poset, eu))
    restriction_cycle = cc_from_chi(stalk_euler_restriction(profile).as_function(poset), eu)
    triangle_cycle = nearby_cycle - restriction_cycle
    index_cycle = cc_from_chi(stalk_euler_vanishing(profile).as_function(poset), eu)
    routes = {"morsification": morse_cycle, "triangle": triangle_cycle, "index": index_cycle}

    expected_restriction = LagrangianCycle(
        poset, {ZREG: _sign_power(spec.n - 1), ORIGIN: profile.mu_section})
    triangle = {
        "restriction_cycle": restriction_cycle.as_records(),
        "holds": (nearby_cycle - morse_cycle == restriction_cycle
                  and restriction_cycle == expected_restriction),
    }
    warnings = list(profile.warnings) + [w for w in nearby_report.warnings
                                         if w not in profile.warnings]
    for rec in records:
        warnings.extend(w for w in rec["warnings"] if w not in warnings)

    passed = _routes_agree(routes) and nearby_report.passed and triangle["holds"]
    logger.info("vanishing: %s (%s)", morse_cycle, "pass" if passed else "fail")
    report = CrossCheckReport(
        mode = spec.mode, cycle = morse_cycle, routes = routes, passed = passed,
        invariants = {
            **profile.as_dict(),
            "N": nearby_report.invariants["N"],
            "morsification_count": m,
            "triangle": triangle,
        },
        samples = _sample_rows(records),
        constancy = constancy.as_dict(),
        warnings = tuple(warnings),
        diagnostics = {"escape_radius": _finite(escape), "extra_decades": extra,
                       "nearby_passed": nearby_report.passed},
    )
    return morse_cycle, report


def _with_mode(spec, mode):
    fields = {k: getattr(spec, k) for k in spec.__dataclass_fields__}
    fields["mode"] = mode
    return FamilySpec(**fields)


def _slice_count(reg, label, a, seed, tol, caps):
    g = reg.slice_function(label)
    if any(d.constant_term != 0 for d in gradient(g)):
        # smooth slice: no critical points near the base point
        return CriticalCount(count = 0, total = 0)
    form = random_linear_form(g.nvars, seed)
    return morsification_count(g, form, a, None, seed, tol, caps)


def _registered_vanishing_limit(spec, reg):
    f = _rename(spec.f, reg.f.variables)
    tol, caps = spec.tolerances, spec.caps

    def sample(a, radius):
        results = {ORIGIN: morsification_count(f, spec.test_form, a, None, spec.seed, tol, caps)}
        for k, label in enumerate(sorted(reg.slices)):
            results[label] = _slice_count(reg, label, a, spec.seed + k + 1, tol, caps)
        counts = {s: r.count for s, r in results.items()}
        warnings = []
        for r in results.values():
            warnings.extend(w for w in r.warnings if w not in warnings)
        mult = {s: _sign_power(reg.poset.dim(s)) * c for s, c in counts.items()}
        return {"payload": LagrangianCycle(reg.poset, mult), "counts": counts,
                "radius": None, "warnings": warnings}

    fam, constancy, records, extra = _run_schedule(spec, sample, math.inf)
    cycle = limit_of_family(fam, spec.stability_window)
    return cycle, constancy, records, extra


def _collect_warnings(records, warnings = ()):
    out = list(warnings)
    for rec in records:
        out.extend(w for w in rec.get("warnings", ()) if w not in out)
    return tuple(out)


def _rename(f, variables):
    return Polynomial(variables, f.terms)


def _registered_profiles(spec, reg):
    n = spec.n
    return {sheaf: stalk_euler_from_fibers(reg.fiber_chi, n, sheaf)
            for sheaf in ("nearby", "vanishing", "restriction")}


def _registered_nearby(spec, reg):
    profiles = _registered_profiles(spec, reg)
    index_cycle = cc_from_chi(profiles["nearby"].as_function(reg.poset), reg.eu)
    restriction_cycle = cc_from_chi(profiles["restriction"].as_function(reg.poset), reg.eu)
    vanishing_cycle, constancy, records, extra = _registered_vanishing_limit(spec, reg)
    triangle_cycle = vanishing_cycle + restriction_cycle
    routes = {"index": index_cycle, "triangle": triangle_cycle}
    passed = _routes_agree(routes)
    logger.info("complex nearby (%s): %s (%s)", reg.name, index_cycle, "pass" if passed else "fail")
    report = CrossCheckReport(
        mode = spec.mode, cycle = index_cycle, routes = routes, passed = passed,
        invariants = {
            "registered": reg.name,
            "stalk_euler": {k: dict(p.values) for k, p in profiles.items()},
        },
        samples = _sample_rows(records),
        constancy = constancy.as_dict(),
        warnings = _collect_warnings(records),
        diagnostics = {"extra_decades": extra},
    )
    return index_cycle, report


def _registered_vanishing(spec, reg):
    profiles = _registered_profiles(spec, reg)
    morse_cycle, constancy, records, extra = _registered_vanishing_limit(spec, reg)
    index_cycle = cc_from_chi(profiles["vanishing"].as_function(reg.poset), reg.eu)
    nearby_cycle = cc_from_chi(profiles["nearby"].as_function(reg.poset), reg.eu)
    restriction_cycle = cc_from_chi(profiles["restriction"].as_function(reg.poset), reg.eu)
    routes = {
        "morsification": morse_cycle,
        "index": index_cycle,
        "triangle": nearby_cycle - restriction_cycle,
    }
    passed = _routes_agree(routes)
    logger.info("vanishing (%s): %s (%s)", reg.name, morse_cycle, "pass" if passed else "fail")
    report = CrossCheckReport(
        mode = spec.mode, cycle = morse_cycle, routes = routes, passed = passed,
        invariants = {
            "registered": reg.name,
            "morsification_count": records[-1]["counts"][ORIGIN],
            "stalk_euler": {k: dict(p.values) for k, p in profiles.items()},
            "triangle": {"restriction_cycle": restriction_cycle.as_records(),
                         "nearby_cycle": nearby_cycle.as_records()},
        },
        samples = _sample_rows(records),
        constancy = constancy.as_dict(),
        warnings = _collect_warnings(records),
        diagnostics = {"extra_decades": extra},
    )
    return morse_cycle, report


# Specialization along a coordinate submanifold
# ---------------------------------------------
_STALKS = {
    "restriction": stalk_euler_restriction,
    "nearby": stalk_euler_nearby,
    "vanishing": stalk_euler_vanishing,
}


def _scaled(f, normal, a):
    return substitute_linear(f, {v: Polynomial.variable(f.variables, v) * a if v in normal
                                 else Polynomial.variable(f.variables, v)
                                 for v in f.variables}, f.variables)


def _sheaf_cycle(g, sheaf, trials, seed, caps, workers):
    profile = isolated_singularity_profile(g, trials, seed, caps = caps, workers = workers)
    poset = isolated_hypersurface_strata(g.nvars)
    eu = EulerObstructionTable.isolated_hypersurface(poset, g.nvars, profile.mu_section)
    return cc_from_chi(_STALKS[sheaf](profile).as_function(poset), eu), profile


def cc_specialization(f: Polynomial, submanifold_vars, sheaf = "restriction",
                      a_schedule = DEFAULT_SCHEDULE, trials = DEFAULT_TRIALS, seed = 0,
                      stability_window = DEFAULT_STABILITY_WINDOW, caps = None, workers = None):
    """
    Characteristic cycle of the specialization of a sheaf on ``{f = 0}``
    along the submanifold ``M = {x' = 0}``.

    The normal deformation restricted to ``t = a`` is the original space,
    with the sheaf pulled back by ``x -> (a*x', x'')``. The specialization
    cycle is the limit of the cycles of the rescaled hypersurfaces

        ``f_a(x) = f(a*x', x'')``

    as ``a -> +0``. Each sample is computed from the Milnor and section
    Milnor numbers of ``f_a`` through the index theorem.

    Parameters
    ----------
    f : Polynomial
        Isolated singularity at the origin.
    submanifold_vars : str or list of str
        The coordinates ``x'`` whose common zero set is ``M``.
    sheaf : str
        ``'restriction'``, ``'nearby'`` or ``'vanishing'``.
    a_schedule : tuple
        Strictly decreasing positive rationals.

    Returns
    -------
    tuple
        ``(LagrangianCycle, CrossCheckReport)``; the report compares the
        limit with the cycle of ``f`` itself (the sample ``a = 1``).

    Raises
    ------
    PreconditionError
        For an unknown sheaf or a coordinate that is not a variable of ``f``.
    NotStabilizedError
        When the last samples differ.

    Examples
    --------
    >>> f = parse_poly("x^3 - y^2", "x,y")
    >>> print(cc_specialization(f, "x")[0])
    -[T*_{Z_reg}] + [T*_{0}]
    """
    if sheaf not in _STALKS:
        raise PreconditionError(f"Unknown sheaf {sheaf!r}; use one of {tuple(_STALKS)}")
    normal = tuple(_as_list(submanifold_vars))
    unknown = [v for v in normal if v not in f.variables]
    if not normal or unknown:
        raise PreconditionError("Submanifold coordinates must be variables of f",
                                variables = list(normal), unknown = unknown)
    schedule = _rationals(a_schedule, "a-schedule")
    caps = caps or Caps.from_env()

    def sample(a):
        cycle, profile = _sheaf_cycle(_scaled(f, normal, a), sheaf, trials, seed, caps, workers)
        logger.info("a = %s: %s", a, cycle)
        return {"a": str(a), "payload": cycle, "mu": profile.mu,
                "mu_section": profile.mu_section, "warnings": list(profile.warnings)}

    records = [sample(a) for a in schedule]
    fam = FamilyOfCycles(tuple((a, rec["payload"]) for a, rec in zip(schedule, records)))
    limit_cycle = limit_of_family(fam, stability_window)
    direct_cycle, profile = _sheaf_cycle(f, sheaf, trials, seed, caps, workers)
    routes = {"limit": limit_cycle, "direct": direct_cycle}
    constancy = constancy_check(fam)
    passed = _routes_agree(routes) and constancy.passed
    logger.info("specialization along %s: %s (%s)", normal, limit_cycle, "pass" if passed else "fail")
    report = CrossCheckReport(
        mode = "specialization", cycle = limit_cycle, routes = routes, passed = passed,
        invariants = {**profile.as_dict(), "sheaf": sheaf, "submanifold": list(normal)},
        samples = _sample_rows(records),
        constancy = constancy.as_dict(),
        warnings = _collect_warnings(records, profile.warnings),
    )
    return limit_cycle, report
