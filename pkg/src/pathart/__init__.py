"""Path-oriented random test data generation.

Find the grid cells of an input box that satisfy a path condition by
adaptive-random grid search, then draw uniform test suites from them.  Plain
random testing (RT) and interval-pruned path-oriented random testing (PRT)
are included as baselines.
"""
from importlib.resources import files

from .errors import (
    AcceptanceTooLow, DegenerateDomain, Exhausted, NotAdjacent, ParseError,
    UnboundVariable, UnsatProven,
)
from .expr import (
    UNDEFINED, compile_condition, eval_condition, eval_num, parse_condition,
    print_condition,
)
from .grid import (
    GridSpec, InputBox, VarDomain, boundary_band, cell_box, cell_label,
    neighbors_moore, parse_domain, partition, sample_uniform,
)
from .interval import Interval, Verdict, iv_eval, refute_pc, refute_predicate
from .oracle import OracleReport, run_oracle
from .search import (
    CellState, SearchConfig, ValidRegion, expand_valid, find_first_valid,
    find_valid_region,
)
from .suite import GenReport, generate_art, generate_prt, generate_rt

__version__ = "0.1.0"


def example_path(name: str):
    """Path of a bundled example file, e.g. ``example_path("foo.pc")``."""
    return files(__name__) / "data" / name
