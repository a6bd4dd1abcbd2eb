"""Brute-force ground truth: satisfying fraction and per-cell validity maps."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from scipy.stats import binomtest

from . import expr as ex
from .grid import InputBox, iter_points, locate, partition, sample_uniform

DEFAULT_POINT_LIMIT = 10**8


class OracleRefused(ValueError):
    pass


@dataclass
class OracleReport:
    mode: str  # "exhaustive" or "montecarlo"
    total: int
    count: int
    n: Optional[int] = None
    valid_map: dict = field(default_factory=dict)
    grid: object = field(default=None, repr=False)

    @property
    def fraction(self) -> float:
        return self.count / self.total

    @property
    def valid_cells(self) -> frozenset:
        return frozenset(c for c, ok in self.valid_map.items() if ok)

    def wilson(self, confidence: float = 0.95) -> tuple:
        ci = binomtest(self.count, self.total).proportion_ci(confidence, method="wilson")
        return ci.low, ci.high


def run_oracle(pc: ex.PathCondition, box: InputBox, n: int = None,
               montecarlo: int = None, seed: int = 0,
               point_limit: int = DEFAULT_POINT_LIMIT) -> OracleReport:
    """Count satisfying points of ``box`` exhaustively (int boxes) or by
    ``montecarlo`` uniform samples.  With ``n``, also record which cells of
    ``partition(box, n)`` hold a satisfying point.

    Uses the tree-walking evaluator so it stays independent of the compiled
    path the generators use.
    """
    grid = partition(box, n) if n is not None else None
    valid_map = {c: False for c in grid.cells()} if grid else {}
    names = box.names
    if montecarlo is None:
        if not box.all_int:
            raise OracleRefused("exhaustive mode needs an all-int domain; pass --montecarlo N")
        if box.point_count() > point_limit:
            raise OracleRefused(
                f"{box.point_count()} points exceed the exhaustive limit {point_limit}; "
                "pass --montecarlo N"
            )
        points, mode, total = iter_points(box), "exhaustive", box.point_count()
    else:
        rng = random.Random(seed)
        points = (sample_uniform(box, rng) for _ in range(montecarlo))
        mode, total = "montecarlo", montecarlo
    count = 0
    for p in points:
        if ex.eval_condition(pc, dict(zip(names, p))):
            count += 1
            if grid is not None:
                valid_map[locate(grid, p)] = True
    return OracleReport(mode, total, count, n, valid_map, grid)
