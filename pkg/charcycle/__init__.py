try:
    from importlib.metadata import version
    __version__ = version("charcycle")
except Exception:
    __version__ = ""

import logging

from .errors import *
from .config import *
from .poly import *
from .quotient import *
from .invariants import *
from .cycles import *
from .nearby import *
from .report import *

logging.getLogger(__name__).addHandler(logging.NullHandler())

API_labels = {
    "poly": "Polynomials",
    "quotient": "Quotient Algebras",
    "invariants": "Singularity Invariants",
    "cycles": "Lagrangian Cycles",
    "nearby": "Nearby and Vanishing Cycles",
    "report": "Reports",
    "errors": "Errors",
    "config": "Configuration",
}
