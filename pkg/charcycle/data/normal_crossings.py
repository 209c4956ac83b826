from pathlib import Path
import polars as pl

DATA_DIR = Path(__file__).parent

def __load_normal_crossings_strata__():
    """
    Strata of the zero locus of xyz

    The smooth part, the three coordinate axes without the origin, and the
    origin. ``milnor_fiber`` is the homotopy type of the Milnor fiber at a
    point of the stratum (a point, a circle, a 2-torus) and ``fiber_chi``
    its Euler characteristic. ``slice_point`` and ``slice_vars`` give a
    normal slice: the free variables vary, the others are fixed at the
    point's coordinates.
    """
    return pl.read_csv(
        DATA_DIR / "normal_crossings_strata.csv",
        schema_overrides = {"closure_of": pl.Utf8, "slice_point": pl.Utf8, "slice_vars": pl.Utf8},
    )

def __load_normal_crossings_euler__():
    """
    Euler obstructions of the closures of the strata of xyz

    The value at a point is the number of local irreducible components of
    the closure through it.
    """
    return pl.read_csv(DATA_DIR / "normal_crossings_euler.csv")
