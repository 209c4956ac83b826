"""
Run configuration, JSON reports and the catalog suite.
"""

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict, replace
from typing import Optional

import polars as pl

from .config import Tolerances, Caps, DEFAULT_SCHEDULE, DEFAULT_TRIALS, DEFAULT_STABILITY_WINDOW
from .errors import CharCycleError, PreconditionError
from .nearby import FamilySpec, cc_real_nearby, cc_complex_nearby, cc_vanishing
from .poly import parse_poly
from .utils import _as_list, _expand_to_full_path

__all__ = [
    "RunConfig", "Report",
    "run", "catalog_suite", "seed_invariance",
    "render_text", "write_report",
    "SCHEMA", "EXIT_PASS", "EXIT_ERROR", "EXIT_DISAGREEMENT",
]

logger = logging.getLogger(__name__)

SCHEMA = "charcycle/1"
EXIT_PASS = 0
EXIT_ERROR = 1
EXIT_DISAGREEMENT = 2

_PIPELINES = {
    "real-nearby": cc_real_nearby,
    "complex-nearby": cc_complex_nearby,
    "vanishing": cc_vanishing,
}


@dataclass(frozen = True)
class RunConfig:
    """
    One analysis as requested on the command line.

    Parameters
    ----------
    poly : str
        Polynomial text, e.g. ``"x^3 + y^3 + z^3"``.
    variables : str or list of str
        Variable names in order (``"x,y,z"`` is accepted).
    mode : str
        ``'real-nearby'``, ``'nearby'`` (or ``'complex-nearby'``) or
        ``'vanishing'``.
    seed, trials : int
    schedule : tuple
        Values of ``a``, strictly decreasing.
    radii : tuple, optional
        Explicit radius per value of ``a``.
    radius_scale : float, optional
    tolerances : Tolerances
    caps : Caps
    output : str, optional
        Where ``run`` writes the JSON report.
    verbosity : int
    name : str, optional
        Label of the run in a suite.
    """
    poly: str
    variables: tuple
    mode: str
    seed: int = 0
    trials: int = DEFAULT_TRIALS
    schedule: tuple = DEFAULT_SCHEDULE
    radii: Optional[tuple] = None
    radius_scale: Optional[float] = None
    stability_window: int = DEFAULT_STABILITY_WINDOW
    lagrange: str = "minors"
    tolerances: Tolerances = field(default_factory = Tolerances)
    caps: Caps = field(default_factory = Caps.from_env)
    output: Optional[str] = None
    verbosity: int = 0
    workers: Optional[int] = None
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(_as_list(self.variables)))
        object.__setattr__(self, "schedule", tuple(str(a) for a in _as_list(self.schedule)))
        if self.radii is not None:
            # parsed by to_spec
            object.__setattr__(self, "radii", tuple(str(r) for r in _as_list(self.radii)))

    def to_spec(self) -> FamilySpec:
        """Parse and validate; every module precondition is checked here."""
        if not self.variables:
            raise PreconditionError("At least one variable is required")
        f = parse_poly(self.poly, self.variables)
        return FamilySpec(
            f, self.mode,
            a_schedule = self.schedule,
            radius_schedule = self.radii,
            radius_scale = self.radius_scale,
            seed = self.seed,
            trials = self.trials,
            stability_window = self.stability_window,
            lagrange = self.lagrange,
            tolerances = self.tolerances,
            caps = self.caps,
            workers = self.workers,
        )

    def echo(self):
        return {
            "name": self.name,
            "poly": self.poly,
            "variables": list(self.variables),
            "mode": self.mode,
            "seed": self.seed,
            "trials": self.trials,
            "schedule": list(self.schedule),
            "radii": None if self.radii is None else list(self.radii),
            "radius_scale": self.radius_scale,
            "stability_window": self.stability_window,
            "lagrange": self.lagrange,
            "tolerances": asdict(self.tolerances),
            "caps": asdict(self.caps),
        }


@dataclass(frozen = True)
class Report:
    """
    Machine-readable result of a run or of a suite.

    ``status`` is ``'pass'``, ``'fail'`` (routes disagree) or ``'error'``.
    ``timing`` is kept apart: it is excluded from equality and from
    ``to_json(timing=False)`` so that two runs with the same configuration
    serialize byte-identically.
    """
    config: dict
    status: str
    mode: Optional[str] = None
    cycle: tuple = ()
    cycle_text: Optional[str] = None
    invariants: dict = field(default_factory = dict)
    routes: dict = field(default_factory = dict)
    samples: tuple = ()
    constancy: dict = field(default_factory = dict)
    warnings: tuple = ()
    error: Optional[dict] = None
    entries: tuple = ()
    timing: dict = field(default_factory = dict, compare = False)

    @property
    def passed(self):
        return self.status == "pass"

    @property
    def exit_code(self):
        if self.status == "pass":
            return EXIT_PASS
        if self.status == "fail":
            return EXIT_DISAGREEMENT
        return EXIT_ERROR

    @classmethod
    def from_check(cls, config, check, seconds = None):
        # Same containers as a report read back from JSON
        data = json.loads(json.dumps(check.as_dict()))
        return cls(
            config = config.echo(),
            status = "pass" if check.passed else "fail",
            mode = check.mode,
            cycle = tuple(data["cycle"]),
            cycle_text = data["cycle_text"],
            invariants = data["invariants"],
            routes = data["routes"],
            samples = tuple(data["samples"]),
            constancy = data["constancy"],
            warnings = tuple(data["warnings"]),
            timing = {} if seconds is None else {"seconds": seconds},
        )

    @classmethod
    def from_error(cls, config, error: CharCycleError, seconds = None):
        return cls(
            config = config.echo(),
            status = "error",
            mode = config.mode,
            error = error.as_dict(),
            timing = {} if seconds is None else {"seconds": seconds},
        )

    def to_dict(self, timing = True):
        out = {
            "schema": SCHEMA,
            "config": self.config,
            "status": self.status,
            "exit_code": self.exit_code,
            "mode": self.mode,
            "cycle": list(self.cycle),
            "cycle_text": self.cycle_text,
            "invariants": self.invariants,
            "routes": self.routes,
            "samples": list(self.samples),
            "constancy": self.constancy,
            "warnings": list(self.warnings),
            "error": self.error,
            "entries": [e.to_dict(timing) for e in self.entries],
        }
        if timing:
            out["timing"] = self.timing
        return out

    @classmethod
    def from_dict(cls, data):
        if data.get("schema") != SCHEMA:
            raise ValueError(f"Unknown report schema {data.get('schema')!r}")
        return cls(
            config = data["config"],
            status = data["status"],
            mode = data.get("mode"),
            cycle = tuple(data.get("cycle", ())),
            cycle_text = data.get("cycle_text"),
            invariants = data.get("invariants", {}),
            routes = data.get("routes", {}),
            samples = tuple(data.get("samples", ())),
            constancy = data.get("constancy", {}),
            warnings = tuple(data.get("warnings", ())),
            error = data.get("error"),
            entries = tuple(cls.from_dict(e) for e in data.get("entries", ())),
            timing = data.get("timing", {}),
        )

    def to_json(self, timing = True, indent = 2):
        return json.dumps(self.to_dict(timing), sort_keys = True, indent = indent)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def entries_table(self):
        """One row per suite entry."""
        rows = [{
            "name": e.config.get("name"),
            "mode": e.mode,
            "status": e.status,
            "cycle": e.cycle_text,
            "error": None if e.error is None else e.error["code"],
        } for e in self.entries]
        return pl.DataFrame(rows, schema = {"name": pl.Utf8, "mode": pl.Utf8, "status": pl.Utf8,
                                            "cycle": pl.Utf8, "error": pl.Utf8})


def write_report(report: Report, path):
    path = _expand_to_full_path(path)
    with open(path, "w") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    logger.info("report written to %s", path)
    return path


def run(config: RunConfig) -> Report:
    """
    Run one analysis and build its report.

    Module errors do not propagate: they become a report with status
    ``'error'`` carrying the error code. The process exit code is
    ``report.exit_code`` (0 pass, 2 route disagreement, 1 error).

    Examples
    --------
    >>> report = run(RunConfig("x", "x", "nearby"))
    >>> report.error["code"], report.exit_code
    ('smooth-point', 1)
    >>> run(RunConfig("x", "x,1y", "nearby")).error["code"]
    'precondition'
    """
    start = time.perf_counter()
    logger.info("running %s (%s)", config.name or config.poly, config.mode)
    try:
        spec = config.to_spec()
        _, check = _PIPELINES[spec.mode](spec)
        report = Report.from_check(config, check, time.perf_counter() - start)
    except CharCycleError as e:
        logger.info("%s failed: [%s] %s", config.name or config.poly, e.code, e)
        report = Report.from_error(config, e, time.perf_counter() - start)
    if config.output:
        write_report(report, config.output)
    return report


# Catalog
# -------
_EXPECTED = {
    "real-nearby": {"signed_count_plus": "real_count_plus",
                    "signed_count_minus": "real_count_minus"},
    "complex-nearby": {"mu": "mu", "mu_section": "mu_section", "N": "lagrange_count"},
    "vanishing": {"mu": "mu", "morsification_count": "mu"},
}
_MODE_NAMES = {"nearby": "complex-nearby"}


def _catalog_configs(entries, seed, **kwargs):
    configs = []
    for row in entries.iter_rows(named = True):
        for mode in (row["modes"] or "").split(";"):
            mode = mode.strip()
            if not mode:
                continue
            configs.append((row, RunConfig(row["poly"], row["vars"], mode, seed = seed,
                                           name = f"{row['name']}/{mode}", **kwargs)))
    return configs


def _check_expected(row, report):
    if report.status == "error":
        return report
    mode = _MODE_NAMES.get(report.config["mode"], report.config["mode"])
    mismatches = []
    for key, column in _EXPECTED[mode].items():
        expected = row.get(column)
        if expected is None:
            continue
        actual = report.invariants.get(key)
        if actual != expected:
            mismatches.append(f"expected-{key}: {expected} != {actual}")
    if not mismatches:
        return report
    logger.warning("%s: %s", report.config["name"], "; ".join(mismatches))
    return replace(report, status = "fail", warnings = report.warnings + tuple(mismatches))


def catalog_suite(seed = 0, entries = None, workers = None, **kwargs) -> Report:
    """
    Run every mode of every catalog entry.

    Parameters
    ----------
    seed : int
    entries : polars.DataFrame, optional
        Rows in the format of ``charcycle.data.catalog``; defaults to it.
    workers : int, optional
        Run entries concurrently on this many threads. Results are merged
        by entry name, so the report does not depend on scheduling.
    **kwargs
        Forwarded to every ``RunConfig``.

    Returns
    -------
    Report
        Aggregate report; ``entries`` holds one report per run. Passes when
        every entry passes and matches the catalog's expected invariants.
    """
    if entries is None:
        from . import data
        entries = data.catalog
    start = time.perf_counter()
    configs = _catalog_configs(entries, seed, **kwargs)

    def one(item):
        row, config = item
        return _check_expected(row, run(config))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers = workers) as pool:
            reports = list(pool.map(one, configs))
    else:
        reports = [one(item) for item in configs]
    reports = tuple(sorted(reports, key = lambda r: r.config["name"]))
    failed = [r.config["name"] for r in reports if not r.passed]
    status = "pass" if not failed else ("error" if all(r.status == "error" for r in reports) else "fail")
    logger.info("catalog suite: %d run(s), %d failed", len(reports), len(failed))
    return Report(
        config = {"suite": "catalog", "seed": seed, "entries": len(reports)},
        status = status,
        invariants = {"failed": failed, "runs": len(reports)},
        entries = reports,
        timing = {"seconds": time.perf_counter() - start},
    )


def seed_invariance(seeds = (0, 1, 2), entries = None, workers = None, **kwargs) -> pl.DataFrame:
    """
    Run the catalog under several seeds and compare the integer results.

    Returns
    -------
    polars.DataFrame
        One row per run, with columns ``name``, ``results`` (distinct
        integer outcomes across seeds) and ``invariant``.
    """
    rows = []
    for seed in seeds:
        suite = catalog_suite(seed, entries, workers, **kwargs)
        for e in suite.entries:
            outcome = {k: v for k, v in e.invariants.items() if isinstance(v, int)}
            rows.append({
                "name": e.config["name"],
                "seed": seed,
                "outcome": json.dumps({"status": e.status, "cycle": e.cycle_text,
                                       "invariants": outcome}, sort_keys = True),
            })
    table = pl.DataFrame(rows, schema = {"name": pl.Utf8, "seed": pl.Int64, "outcome": pl.Utf8})
    return (table
            .group_by("name")
            .agg(pl.col("outcome").n_unique().alias("results"))
            .with_columns(invariant = pl.col("results") == 1)
            .sort("name"))


# Text rendering
# --------------
def render_text(data) -> str:
    """
    Human-readable rendering of a report dictionary (``Report.to_dict``).

    Only reads the dictionary, so the text never disagrees with the JSON.
    """
    if isinstance(data, Report):
        data = data.to_dict()
    lines = []
    config = data["config"]
    if data.get("entries"):
        table = pl.DataFrame([{
            "name": e["config"].get("name"),
            "status": e["status"],
            "cycle": e["cycle_text"] or (e["error"] or {}).get("code"),
        } for e in data["entries"]])
        with pl.Config(tbl_rows = -1, fmt_str_lengths = 80, tbl_hide_dataframe_shape = True):
            lines.append(str(table))
        lines.append(f"status: {data['status']}")
        return "\n".join(lines)

    lines.append(f"{config.get('poly')}  ({data['mode']})")
    if data["status"] == "error":
        lines.append(f"error [{data['error']['code']}]: {data['error']['message']}")
        return "\n".join(lines)
    lines.append(f"CC = {data['cycle_text']}")
    with pl.Config(tbl_rows = -1, fmt_str_lengths = 80, tbl_hide_dataframe_shape = True):
        if data["cycle"]:
            lines.append(str(pl.DataFrame(data["cycle"])))
        routes = pl.DataFrame({"route": list(data["routes"]),
                               "cycle": [r["text"] for r in data["routes"].values()]})
        lines.append(str(routes))
        if data["samples"]:
            samples = pl.DataFrame([{"a": s["a"], "payload": str(s["payload"]),
                                     "radius": s.get("radius")} for s in data["samples"]])
            lines.append(str(samples))
    scalars = {k: v for k, v in data["invariants"].items() if isinstance(v, (int, bool, type(None)))}
    lines.append("invariants: " + ", ".join(f"{k}={v}" for k, v in sorted(scalars.items())))
    if data["warnings"]:
        lines.append("warnings: " + ", ".join(data["warnings"]))
    lines.append(f"status: {data['status']}")
    return "\n".join(lines)
