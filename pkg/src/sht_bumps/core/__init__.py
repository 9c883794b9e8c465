"""Numerical core: Young functions, Orlicz averages, dyadic grids, sparse families and bumps."""

from .bump import BumpReport, ScanFamily, WeightPair, bump_double, bump_separated, bump_separated_dual
from .orlicz import average, orlicz_norm
from .space import DyadicGrid, FiniteSpace, finite_grid, line_grid, verify_grid
from .sparse import SparseFamily, cz_cubes, cz_decompose, dyadic_maximal, sparse_apply, sparse_from_levels
from .stepfunctions import IntervalSet, PointFunction, PointSet, StepFunction
from .young import LogBump, Power, PowerLog, YoungFunction, bp_constant, complementary, conjugate, inverse

__all__ = [
    "BumpReport",
    "DyadicGrid",
    "FiniteSpace",
    "IntervalSet",
    "LogBump",
    "PointFunction",
    "PointSet",
    "Power",
    "PowerLog",
    "ScanFamily",
    "SparseFamily",
    "StepFunction",
    "WeightPair",
    "YoungFunction",
    "average",
    "bp_constant",
    "bump_double",
    "bump_separated",
    "bump_separated_dual",
    "complementary",
    "conjugate",
    "cz_cubes",
    "cz_decompose",
    "dyadic_maximal",
    "finite_grid",
    "inverse",
    "line_grid",
    "orlicz_norm",
    "sparse_apply",
    "sparse_from_levels",
    "verify_grid",
]
