"""
Milnor numbers, generic-section Milnor numbers and stalkwise Euler
characteristic profiles of the nearby, vanishing and restricted sheaves of
an isolated hypersurface singularity at the origin.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import polars as pl

from .config import Caps, DEFAULT_TRIALS
from .errors import SmoothPointError, PreconditionError, UndecidedError
from .poly import Polynomial, gradient, random_linear_form, substitute_linear
from .quotient import local_quotient_dimension
from .utils import _sign_power

__all__ = [
    "IsolatedSingularityProfile", "SectionMilnorNumber", "StalkEulerProfile",
    "ZREG", "ORIGIN",
    "milnor_number", "section_trials", "sectional_milnor_number",
    "isolated_singularity_profile",
    "stalk_euler_nearby", "stalk_euler_vanishing", "stalk_euler_restriction",
    "stalk_euler_from_fibers", "solution_chi",
]

logger = logging.getLogger(__name__)

ZREG = "Z_reg"
ORIGIN = "{0}"

SHEAVES = ("nearby", "vanishing", "restriction")


@dataclass(frozen = True)
class IsolatedSingularityProfile:
    """
    Milnor data of an isolated singular point at the origin.

    Attributes
    ----------
    f : Polynomial
    n : int
        Number of variables (complex dimension of the ambient space).
    mu : int
        Milnor number of ``f``.
    mu_section : int
        Milnor number of ``f`` restricted to a generic hyperplane.
    section_seeds : tuple of int
        Seeds of the hyperplanes tried.
    section_values : tuple
        Milnor number per trial (``None`` when a trial was undecided).
    warnings : tuple of str
    """
    f: Polynomial
    n: int
    mu: int
    mu_section: int
    section_seeds: tuple = ()
    section_values: tuple = ()
    warnings: tuple = ()

    @property
    def section_bounded(self):
        """Recorded check ``mu_section <= mu`` (not enforced)."""
        return self.mu_section <= self.mu

    def as_dict(self):
        return {
            "n": self.n,
            "mu": self.mu,
            "mu_section": self.mu_section,
            "section_seeds": list(self.section_seeds),
            "section_values": list(self.section_values),
            "section_bounded": self.section_bounded,
        }


@dataclass(frozen = True)
class StalkEulerProfile:
    """
    Values of the local Euler characteristic of a sheaf at generic points
    of each stratum. Strata not listed carry the value 0.
    """
    sheaf: str
    values: Mapping = field(default_factory = dict)
    strata: tuple = ()

    def __post_init__(self):
        values = {str(k): int(v) for k, v in dict(self.values).items()}
        strata = tuple(self.strata) or tuple(values)
        unknown = set(values) - set(strata)
        if unknown:
            raise ValueError(f"Values given for unlisted strata {sorted(unknown)}")
        object.__setattr__(self, "values", MappingProxyType(values))
        object.__setattr__(self, "strata", strata)

    def __getitem__(self, label):
        return self.values.get(label, 0)

    def __sub__(self, other):
        strata = tuple(dict.fromkeys(self.strata + other.strata))
        values = {s: self[s] - other[s] for s in strata}
        return StalkEulerProfile(f"{self.sheaf}-{other.sheaf}", values, strata)

    def as_function(self, poset):
        from .cycles import ConstructibleFunction
        return ConstructibleFunction(poset, dict(self.values))

    def to_polars(self):
        return pl.DataFrame({
            "stratum": list(self.strata),
            "chi": [self[s] for s in self.strata],
        }, schema = {"stratum": pl.Utf8, "chi": pl.Int64})


def _check_singular_at_origin(f):
    if f.nvars < 1:
        raise PreconditionError("f needs at least one variable")
    if f.constant_term != 0:
        raise PreconditionError(f"f(0) = {f.constant_term} is not zero")
    grad = gradient(f)
    if any(g.constant_term != 0 for g in grad):
        raise SmoothPointError("The origin is a smooth point of f (gradient is nonzero)",
                               gradient = [str(g.constant_term) for g in grad])
    return grad


def milnor_number(f: Polynomial, degree_cap = None, caps = None) -> int:
    """
    Milnor number of ``f`` at the origin.

    Parameters
    ----------
    f : Polynomial
        With ``f(0) = 0`` and vanishing gradient at the origin.
    degree_cap : int, optional
        Passed to ``local_quotient_dimension``.

    Returns
    -------
    int
        Local dimension of the quotient by the Jacobian ideal.

    Raises
    ------
    SmoothPointError
        When the gradient of ``f`` does not vanish at the origin.
    UndecidedError
        When the singular point is not certified isolated.

    Examples
    --------
    >>> milnor_number(parse_poly("x^3 + y^3 + z^3", "x,y,z"))
    8
    """
    grad = _check_singular_at_origin(f)
    return local_quotient_dimension(grad, degree_cap = degree_cap, caps = caps)


def _hyperplane_restriction(f, seed):
    # Hyperplane c.x = 0, solved for the last variable with c_k != 0
    form = random_linear_form(f.nvars, seed)
    k = max(i for i, c in enumerate(form.coefficients) if c != 0)
    kept = tuple(v for i, v in enumerate(f.variables) if i != k)
    mapping = {}
    for i, v in enumerate(f.variables):
        if i == k:
            terms = {}
            for j, w in enumerate(kept):
                c = form.coefficients[j if j < k else j + 1]
                if c:
                    terms[tuple(int(m == j) for m in range(len(kept)))] = -c / form.coefficients[k]
            mapping[v] = Polynomial(kept, terms)
        else:
            mapping[v] = Polynomial.variable(kept, v)
    return form, substitute_linear(f, mapping, kept)


def _section_trial(f, seed, degree_cap, caps):
    form, g = _hyperplane_restriction(f, seed)
    try:
        value = milnor_number(g, degree_cap = degree_cap, caps = caps)
    except (UndecidedError, PreconditionError) as e:
        logger.debug("section trial %d failed: %s", seed, e)
        value = None
    return {"seed": seed, "form": str(form), "mu": value}


def section_trials(f, trials = DEFAULT_TRIALS, seed = 0, degree_cap = None,
                   caps = None, workers = None):
    """
    Milnor numbers of ``f`` restricted to random hyperplanes.

    The hyperplane of trial ``t`` is ``c . x = 0`` with
    ``c = random_linear_form(n, seed + t)``.

    Returns
    -------
    polars.DataFrame
        One row per trial with columns ``seed``, ``form`` and ``mu``
        (null when the trial was undecided).
    """
    if f.nvars < 2:
        raise PreconditionError("Hyperplane sections need at least two variables")
    if trials < 1:
        raise ValueError("trials must be positive")
    _check_singular_at_origin(f)
    caps = caps or Caps.from_env()
    seeds = [seed + t for t in range(trials)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers = workers) as pool:
            rows = list(pool.map(lambda s: _section_trial(f, s, degree_cap, caps), seeds))
    else:
        rows = [_section_trial(f, s, degree_cap, caps) for s in seeds]
    return pl.DataFrame(rows, schema = {"seed": pl.Int64, "form": pl.Utf8, "mu": pl.Int64})


@dataclass(frozen = True)
class SectionMilnorNumber:
    """
    Minimum Milnor number over random hyperplane sections.

    ``attained`` counts the trials reaching the minimum; a single one
    adds the ``'section-minimum-attained-once'`` warning.
    """
    value: int
    attained: int
    seeds: tuple = ()
    values: tuple = ()
    warnings: tuple = ()

    def __int__(self):
        return self.value

    def as_dict(self):
        return {"value": self.value, "attained": self.attained, "seeds": list(self.seeds),
                "values": list(self.values), "warnings": list(self.warnings)}


def _section_minimum(table):
    decided = table.filter(pl.col("mu").is_not_null())
    if decided.height == 0:
        raise UndecidedError("Every hyperplane section was undecided",
                             seeds = table["seed"].to_list())
    minimum = decided["mu"].min()
    attained = decided.filter(pl.col("mu") == minimum).height
    warnings = []
    if attained < 2:
        warnings.append("section-minimum-attained-once")
        logger.warning("section Milnor number %d attained by %d trial only", minimum, attained)
    return SectionMilnorNumber(
        value = int(minimum), attained = attained,
        seeds = tuple(table["seed"].to_list()), values = tuple(table["mu"].to_list()),
        warnings = tuple(warnings),
    )


def sectional_milnor_number(f: Polynomial, trials = DEFAULT_TRIALS, seed = 0,
                            degree_cap = None, caps = None, workers = None) -> SectionMilnorNumber:
    """
    Milnor number of a generic hyperplane section through the origin.

    Genericity is realized as the minimum over ``trials`` random
    hyperplanes.

    Returns
    -------
    SectionMilnorNumber

    Examples
    --------
    >>> sectional_milnor_number(parse_poly("x^3 + y^3 + z^3", "x,y,z")).value
    4
    """
    table = section_trials(f, trials, seed, degree_cap, caps, workers)
    return _section_minimum(table)


def isolated_singularity_profile(f: Polynomial, trials = DEFAULT_TRIALS, seed = 0,
                                 degree_cap = None, caps = None, workers = None):
    """
    Milnor number and generic-section Milnor number of ``f``.

    Returns
    -------
    IsolatedSingularityProfile
    """
    mu = milnor_number(f, degree_cap, caps)
    section = sectional_milnor_number(f, trials, seed, degree_cap, caps, workers)
    warnings = list(section.warnings)
    if section.value > mu:
        warnings.append("section-exceeds-milnor")
    logger.info("Milnor number %d, section Milnor number %d", mu, section.value)
    return IsolatedSingularityProfile(
        f = f, n = f.nvars, mu = mu, mu_section = section.value,
        section_seeds = section.seeds,
        section_values = section.values,
        warnings = tuple(warnings),
    )


def stalk_euler_nearby(profile: IsolatedSingularityProfile) -> StalkEulerProfile:
    """
    Euler characteristic of the nearby cycles of ``C[n]`` shifted by -1.

    ``(-1)^(n-1)`` on the smooth part of the zero locus and
    ``(-1)^(n-1) + mu`` at the origin.

    Examples
    --------
    >>> p = isolated_singularity_profile(parse_poly("x^2 + y^2", "x,y"))
    >>> dict(stalk_euler_nearby(p).values)
    {'Z_reg': -1, '{0}': 0}
    """
    sign = _sign_power(profile.n - 1)
    return StalkEulerProfile("nearby", {ZREG: sign, ORIGIN: sign + profile.mu}, (ZREG, ORIGIN))


def stalk_euler_vanishing(profile: IsolatedSingularityProfile) -> StalkEulerProfile:
    """Vanishing cycles: ``mu`` at the origin, zero elsewhere."""
    return StalkEulerProfile("vanishing", {ZREG: 0, ORIGIN: profile.mu}, (ZREG, ORIGIN))


def stalk_euler_restriction(profile: IsolatedSingularityProfile) -> StalkEulerProfile:
    """Restriction ``C_Z[n-1]``: ``(-1)^(n-1)`` on every stratum of the zero locus."""
    sign = _sign_power(profile.n - 1)
    return StalkEulerProfile("restriction", {ZREG: sign, ORIGIN: sign}, (ZREG, ORIGIN))


def stalk_euler_from_fibers(fiber_chi, n, sheaf):
    """
    Stalk profile built from Euler characteristics of Milnor fibers.

    Parameters
    ----------
    fiber_chi : dict
        ``{stratum: chi(Milnor fiber at a point of the stratum)}`` for every
        stratum of the zero locus.
    n : int
        Number of variables.
    sheaf : str
        One of ``'nearby'``, ``'vanishing'``, ``'restriction'``.
    """
    if sheaf not in SHEAVES:
        raise ValueError(f"sheaf must be one of {SHEAVES}")
    sign = _sign_power(n - 1)
    strata = tuple(fiber_chi)
    nearby = {s: sign * int(c) for s, c in fiber_chi.items()}
    restriction = {s: sign for s in strata}
    if sheaf == "nearby":
        values = nearby
    elif sheaf == "restriction":
        values = restriction
    else:
        values = {s: nearby[s] - restriction[s] for s in strata}
    return StalkEulerProfile(sheaf, values, strata)


def solution_chi(chi: StalkEulerProfile, n: int) -> StalkEulerProfile:
    """
    Pass to the solution-complex side: ``chi(Sol) = (-1)^n chi(F)``.
    """
    sign = _sign_power(n)
    return StalkEulerProfile(f"solution-{chi.sheaf}",
                             {s: sign * v for s, v in chi.values.items()}, chi.strata)
