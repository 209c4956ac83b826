"""Numerical tolerances and resource caps shared by every module."""

import os
import logging
from dataclasses import dataclass, replace

__all__ = ["Tolerances", "Caps", "DEFAULT_SCHEDULE", "DEFAULT_TRIALS",
           "DEFAULT_STABILITY_WINDOW", "DEFAULT_RADIUS_SCALE", "AUX_SEED_OFFSET",
           "FORM_RESEED_OFFSET", "RESAMPLE_SEED_OFFSET", "DEGREE_CAP_ENV"]

logger = logging.getLogger(__name__)

DEGREE_CAP_ENV = "CHARCYCLE_DEGREE_CAP"

DEFAULT_SCHEDULE = ("1/10", "1/100", "1/1000", "1/10000")
DEFAULT_TRIALS = 5
DEFAULT_STABILITY_WINDOW = 3
DEFAULT_RADIUS_SCALE = 10.0
AUX_SEED_OFFSET = 1_000_003
FORM_RESEED_OFFSET = 2_000_029
RESAMPLE_SEED_OFFSET = 3_000_017


@dataclass(frozen=True)
class Tolerances:
    """
    Floating-point tolerances.

    Parameters
    ----------
    residual : float
        Largest accepted relative residual of a numeric solution.
    clustering : float
        Relative distance below which two numeric points are merged.
    hessian : float
        Relative size below which a Hessian eigenvalue counts as zero.
    imaginary : float
        Largest imaginary part of a coordinate still called real.
    root_convergence : float
        Step size at which the simultaneous root iteration stops.
    root_max_iter : int
        Iteration budget of the root finder.
    """
    residual: float = 1e-8
    clustering: float = 1e-6
    hessian: float = 1e-8
    imaginary: float = 1e-8
    root_convergence: float = 1e-12
    root_max_iter: int = 200

    def updated(self, **kwargs):
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs)


@dataclass(frozen=True)
class Caps:
    """
    Resource caps. Exceeding one raises ``CapExceededError`` or
    ``UndecidedError``, never a wrong answer.
    """
    spoly_degree: int = 30
    pair_queue: int = 100_000
    degree_cap: int = 24
    max_reseeds: int = 4
    max_extra_decades: int = 8

    @classmethod
    def from_env(cls, **kwargs):
        value = os.environ.get(DEGREE_CAP_ENV)
        if value is not None and "degree_cap" not in kwargs:
            try:
                kwargs["degree_cap"] = int(value)
            except ValueError:
                logger.warning("ignoring %s=%r (not an integer)", DEGREE_CAP_ENV, value)
        return cls(**kwargs)
