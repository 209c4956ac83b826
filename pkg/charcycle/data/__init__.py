from pathlib import Path
from .catalog import __load_catalog__
from .normal_crossings import (__load_normal_crossings_strata__,
                               __load_normal_crossings_euler__)

__all__ = (
    "catalog",
    "normal_crossings_strata",
    "normal_crossings_euler",
)

DATA_DIR = Path(__file__).parent

catalog = __load_catalog__()
normal_crossings_strata = __load_normal_crossings_strata__()
normal_crossings_euler = __load_normal_crossings_euler__()
