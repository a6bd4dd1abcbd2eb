"""Grid search for the sub-domains of an input box that satisfy a path condition.

The search runs in two phases.

1. :func:`find_first_valid` partitions the box into an ``n``-per-dimension
   grid and probes random candidate cells, one point per cell.  A failed
   probe removes the cell and its Moore neighbours from the candidate set.
   When no candidates remain the grid is discarded and the search restarts
   at ``n + 1``.
2. :func:`expand_valid` flood-fills outward from the first valid cell.  Each
   neighbour is probed inside the band that borders the valid cell it was
   reached from.

Every probe is one concrete evaluation of the condition.  Points outside
the caller's box (possible when int dimensions were enlarged to fit the
grid) count as probes that fail.
"""
from __future__ import annotations

import enum
import logging
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from . import expr as ex
from .errors import DegenerateDomain, Exhausted
from .grid import (
    CellId, GridSpec, InputBox, Point, boundary_band, cell_box, iter_points,
    neighbors_moore, partition, sample_uniform,
)

log = logging.getLogger(__name__)


class CellState(enum.Enum):
    CANDIDATE = "candidate"
    EXCLUDED = "excluded"
    VALID = "valid"
    INVALID = "invalid"


@dataclass(frozen=True)
class SearchConfig:
    n0: int = 1
    n_max: int = 64
    samples_per_cell: int = 8
    beta: float = 0.25
    probe_budget: int = 10**6
    retest: bool = True
    # fresh passes at n_max after it runs out of candidates; None = until
    # the probe budget is spent
    restarts: Optional[int] = 0

    def __post_init__(self):
        if self.n0 < 1 or self.n0 > self.n_max:
            raise ValueError(f"need 1 <= n0 <= n_max, got n0={self.n0}, n_max={self.n_max}")
        if self.samples_per_cell < 1:
            raise ValueError("samples_per_cell must be >= 1")
        if not 0 < self.beta <= 1:
            raise ValueError("beta must lie in (0, 1]")
        if self.probe_budget < 1:
            raise ValueError("probe_budget must be >= 1")
        if self.restarts is not None and self.restarts < 0:
            raise ValueError("restarts must be >= 0 or None")

    @classmethod
    def fixed(cls, n: int, **kw) -> "SearchConfig":
        """Single-resolution configuration that restarts at ``n`` until the
        probe budget runs out."""
        kw.setdefault("restarts", None)
        return cls(n0=n, n_max=n, **kw)


class BudgetSpent(Exception):
    pass


class Probe:
    """Counting wrapper around a compiled condition.

    ``probe(point)`` is True iff ``point`` lies in ``box`` and satisfies the
    condition.  Raises :class:`BudgetSpent` once ``budget`` evaluations have
    been made.
    """

    def __init__(self, pc: ex.PathCondition, box: InputBox, budget: int = 10**6,
                 used: int = 0):
        missing = ex.free_vars(pc) - set(box.names)
        if missing:
            raise ex.UnboundVariable(sorted(missing)[0])
        self.fn = ex.compile_condition(pc, box.names)
        self.box = box
        self.budget = budget
        self.used = used
        self.trace: Optional[list] = None

    def __call__(self, point: Point) -> bool:
        if self.used >= self.budget:
            raise BudgetSpent
        self.used += 1
        ok = self.box.contains(point) and self.fn(*point)
        if self.trace is not None:
            self.trace.append((point, ok))
        return ok


class FirstValidSearch:
    """Candidate-exclusion search at a single grid resolution."""

    def __init__(self, grid: GridSpec, probe: Probe, rng: random.Random):
        self.grid = grid
        self.probe = probe
        self.rng = rng
        self.states = {c: CellState.CANDIDATE for c in grid.cells()}
        self._cands = list(self.states)
        self._where = {c: i for i, c in enumerate(self._cands)}

    @property
    def candidates(self) -> frozenset:
        return frozenset(self._cands)

    def _drop(self, c: CellId) -> None:
        i = self._where.pop(c)
        last = self._cands.pop()
        if i < len(self._cands):
            self._cands[i] = last
            self._where[last] = i

    def step(self, cell: CellId = None, point: Point = None):
        """Probe one candidate; returns ``(cell, point, satisfied)``.

        ``cell`` and ``point`` default to a uniform random candidate and a
        uniform point inside it.
        """
        if cell is None:
            cell = self._cands[int(self.rng.random() * len(self._cands))]
        elif self.states[cell] is not CellState.CANDIDATE:
            raise ValueError(f"cell {cell} is not a candidate")
        if point is None:
            point = sample_uniform(cell_box(self.grid, cell), self.rng)
        if self.probe(point):
            self.states[cell] = CellState.VALID
            self._drop(cell)
            return cell, point, True
        for c in (cell, *sorted(neighbors_moore(self.grid, cell))):
            if self.states[c] is CellState.CANDIDATE:
                self.states[c] = CellState.EXCLUDED
                self._drop(c)
        return cell, point, False

    def run(self):
        """Probe until a cell is valid (returns it) or candidates run out (None)."""
        while self._cands:
            cell, point, ok = self.step()
            if ok:
                return cell, point
        return None


@dataclass(frozen=True)
class FirstValid:
    grid: GridSpec
    cell: CellId
    witness: Point
    probes_used: int


def find_first_valid(pc: ex.PathCondition, box: InputBox, cfg: SearchConfig,
                     rng: random.Random, probe: Probe = None) -> FirstValid:
    """Search grids of resolution ``cfg.n0 .. cfg.n_max`` for a satisfying cell.

    Raises :class:`Exhausted` when every resolution runs out of candidates
    or the probe budget is spent.
    """
    probe = probe or Probe(pc, box, cfg.probe_budget)
    last_n = cfg.n0
    for n in _schedule(cfg):
        try:
            grid = partition(box, n)
        except DegenerateDomain:
            if n == cfg.n0:
                raise
            break
        last_n = n
        search = FirstValidSearch(grid, probe, rng)
        try:
            found = search.run()
        except BudgetSpent:
            raise Exhausted(probe.used, n, "probe budget spent") from None
        if found is not None:
            log.debug("first valid cell %s at n=%d after %d probes", found[0], n, probe.used)
            return FirstValid(grid, found[0], found[1], probe.used)
        log.debug("n=%d ran out of candidates after %d probes", n, probe.used)
    raise Exhausted(probe.used, last_n)


def _schedule(cfg: SearchConfig) -> Iterator[int]:
    yield from range(cfg.n0, cfg.n_max + 1)
    if cfg.restarts is None:
        while True:
            yield cfg.n_max
    for _ in range(cfg.restarts):
        yield cfg.n_max


@dataclass
class ValidRegion:
    grid: GridSpec
    valid: frozenset
    witnesses: dict
    probes_used: int
    truncated: bool = False
    states: dict = field(default_factory=dict, repr=False)


def _band_points(band: InputBox, s: int, rng: random.Random) -> Iterator[Point]:
    # Int bands are sampled without replacement so a small band is never
    # probed twice at the same point.
    if band.all_int:
        size = band.point_count()
        if size <= s:
            pts = list(iter_points(band))
            rng.shuffle(pts)
            yield from pts
            return
        seen = set()
        while len(seen) < s:
            p = sample_uniform(band, rng)
            if p not in seen:
                seen.add(p)
                yield p
        return
    for _ in range(s):
        yield sample_uniform(band, rng)


def expand_valid(pc: ex.PathCondition, grid: GridSpec, seed_cell: CellId,
                 seed_witness: Point, cfg: SearchConfig, rng: random.Random,
                 probe: Probe = None) -> ValidRegion:
    """Breadth-first flood fill of valid cells from ``seed_cell``.

    A neighbour ``u`` of a valid cell ``v`` is probed with up to
    ``cfg.samples_per_cell`` points from the band of ``u`` bordering ``v``.
    With ``cfg.retest`` an invalid cell is probed again when reached from a
    different valid neighbour.
    """
    probe = probe or Probe(pc, grid.box, cfg.probe_budget)
    states = {c: CellState.CANDIDATE for c in grid.cells()}
    states[seed_cell] = CellState.VALID
    witnesses = {seed_cell: seed_witness}
    queue = deque([seed_cell])
    truncated = False
    try:
        while queue:
            v = queue.popleft()
            for u in sorted(neighbors_moore(grid, v)):
                state = states[u]
                if state is CellState.VALID:
                    continue
                if state is CellState.INVALID and not cfg.retest:
                    continue
                band = boundary_band(grid, u, v, cfg.beta)
                for p in _band_points(band, cfg.samples_per_cell, rng):
                    if probe(p):
                        states[u] = CellState.VALID
                        witnesses[u] = p
                        queue.append(u)
                        break
                else:
                    states[u] = CellState.INVALID
    except BudgetSpent:
        truncated = True
        log.warning("probe budget spent during expansion; region is partial")
    valid = frozenset(c for c, st in states.items() if st is CellState.VALID)
    return ValidRegion(grid, valid, witnesses, probe.used, truncated, states)


def find_valid_region(pc: ex.PathCondition, box: InputBox, cfg: SearchConfig,
                      rng: random.Random) -> ValidRegion:
    """First-valid search followed by expansion, sharing one probe budget."""
    probe = Probe(pc, box, cfg.probe_budget)
    first = find_first_valid(pc, box, cfg, rng, probe)
    return expand_valid(pc, first.grid, first.cell, first.witness, cfg, rng, probe)
