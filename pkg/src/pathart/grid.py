"""Input boxes, n-per-dimension grids, Moore neighbourhoods and uniform sampling.

Cells are addressed by ``CellId`` tuples of per-dimension indices, counted
upward from each dimension's lower bound.  For two-dimensional grids,
:func:`cell_label` gives the ``D_i`` names: column-major with
the first dimension as the column and the second dimension descending, so
``D_1`` is the lowest-x / highest-y cell.

Points are plain tuples in dimension order.  Integer dimensions hold ints.
"""
from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import DegenerateDomain, NotAdjacent, ParseError

CellId = tuple  # tuple[int, ...]
Point = tuple


@dataclass(frozen=True)
class VarDomain:
    name: str
    kind: str  # "int" or "real"
    lo: float
    hi: float

    def __post_init__(self):
        if self.kind not in ("int", "real"):
            raise ValueError(f"domain kind must be 'int' or 'real', got {self.kind!r}")
        if self.lo > self.hi:
            raise ValueError(f"{self.name}: lo exceeds hi ({self.lo} > {self.hi})")
        if self.kind == "int":
            if self.lo != int(self.lo) or self.hi != int(self.hi):
                raise ValueError(f"{self.name}: int bounds must be integers")
            object.__setattr__(self, "lo", int(self.lo))
            object.__setattr__(self, "hi", int(self.hi))

    @property
    def is_int(self) -> bool:
        return self.kind == "int"

    @property
    def size(self) -> int:
        """Number of integer values (int dims only)."""
        return self.hi - self.lo + 1

    def contains(self, value) -> bool:
        return self.lo <= value <= self.hi


@dataclass(frozen=True)
class InputBox:
    dims: tuple

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        if not self.dims:
            raise ValueError("an input box needs at least one dimension")
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate dimension names in {names}")

    @property
    def names(self) -> tuple:
        return tuple(d.name for d in self.dims)

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def all_int(self) -> bool:
        return all(dim.is_int for dim in self.dims)

    def contains(self, point: Sequence) -> bool:
        return all(dim.lo <= x <= dim.hi for dim, x in zip(self.dims, point))

    def is_subbox(self, other: "InputBox") -> bool:
        return all(a.lo >= b.lo and a.hi <= b.hi for a, b in zip(self.dims, other.dims))

    def point_count(self) -> int:
        return math.prod(dim.size for dim in self.dims)

    def valuation(self, point: Sequence) -> dict:
        return dict(zip(self.names, point))

    def __str__(self):
        return format_domain(self)


@dataclass(frozen=True)
class GridSpec:
    """An ``n``-per-dimension grid over ``base``.

    ``base`` is the user's box with int dimensions enlarged so that ``n``
    divides their size; ``box`` is the box the caller asked for.
    """

    base: InputBox
    n: int
    box: InputBox
    cell_widths: tuple = field(default=())

    @property
    def d(self) -> int:
        return self.base.d

    @property
    def cell_count(self) -> int:
        return self.n ** self.d

    def cells(self) -> Iterator[CellId]:
        return itertools.product(range(self.n), repeat=self.d)

    def valid_cell(self, c: CellId) -> bool:
        return len(c) == self.d and all(0 <= i < self.n for i in c)


def partition(box: InputBox, n: int) -> GridSpec:
    """Grid ``box`` into ``n`` equal slabs per dimension.

    An int dimension whose size is not a multiple of ``n`` has its upper
    bound raised by the smallest amount that makes it one.  Real dimensions
    are never enlarged.
    """
    if n < 1:
        raise ValueError(f"grid resolution must be >= 1, got {n}")
    dims, widths = [], []
    for dim in box.dims:
        if dim.is_int:
            size = dim.size
            if size < n:
                raise DegenerateDomain(dim.name, size, n)
            padded = -(-size // n) * n
            dims.append(VarDomain(dim.name, "int", dim.lo, dim.lo + padded - 1))
            widths.append(padded // n)
        else:
            dims.append(dim)
            widths.append((dim.hi - dim.lo) / n)
    return GridSpec(InputBox(tuple(dims)), n, box, tuple(widths))


def _cell_range(grid: GridSpec, k: int, i: int) -> tuple:
    dim = grid.base.dims[k]
    if dim.is_int:
        w = grid.cell_widths[k]
        return dim.lo + i * w, dim.lo + (i + 1) * w - 1
    span = dim.hi - dim.lo
    lo = dim.lo + span * i / grid.n
    hi = dim.hi if i == grid.n - 1 else dim.lo + span * (i + 1) / grid.n
    return lo, hi


def cell_box(grid: GridSpec, c: CellId) -> InputBox:
    dims = []
    for k, (dim, i) in enumerate(zip(grid.base.dims, c)):
        lo, hi = _cell_range(grid, k, i)
        dims.append(VarDomain(dim.name, dim.kind, lo, hi))
    return InputBox(tuple(dims))


def locate(grid: GridSpec, point: Sequence) -> CellId:
    """Cell containing ``point`` (real cells are half-open, the last one closed)."""
    idx = []
    for k, (dim, x) in enumerate(zip(grid.base.dims, point)):
        if dim.is_int:
            i = (x - dim.lo) // grid.cell_widths[k]
        else:
            span = dim.hi - dim.lo
            i = math.floor((x - dim.lo) * grid.n / span) if span > 0 else 0
            # guard against rounding at slab edges
            while i > 0 and x < _cell_range(grid, k, i)[0]:
                i -= 1
            while i < grid.n - 1 and x >= _cell_range(grid, k, i + 1)[0]:
                i += 1
        idx.append(min(max(int(i), 0), grid.n - 1))
    return tuple(idx)


def neighbors_moore(grid: GridSpec, c: CellId) -> frozenset:
    """Cells at Chebyshev distance exactly 1 from ``c`` (no wraparound)."""
    out = []
    for delta in itertools.product((-1, 0, 1), repeat=len(c)):
        if not any(delta):
            continue
        nb = tuple(i + di for i, di in zip(c, delta))
        if all(0 <= i < grid.n for i in nb):
            out.append(nb)
    return frozenset(out)


def sample_uniform(box: InputBox, rng: random.Random) -> Point:
    """Draw one point uniformly from ``box``.

    Consumes exactly one ``rng.random()`` per dimension, in dimension order:
    int dims map it onto the inclusive integer range, real dims onto
    ``[lo, hi)`` (or ``lo`` when the range is a single value).
    """
    out = []
    for dim in box.dims:
        u = rng.random()
        if dim.is_int:
            out.append(min(dim.lo + int(u * dim.size), dim.hi))
        else:
            x = dim.lo + u * (dim.hi - dim.lo)
            if x >= dim.hi > dim.lo:
                x = math.nextafter(dim.hi, dim.lo)
            out.append(x)
    return tuple(out)


def sampler(box: InputBox):
    """Fast equivalent of ``sample_uniform(box, rng)`` as ``f(rng)``.

    Consumes the random stream identically.
    """
    specs = tuple((d.is_int, d.lo, d.hi, d.size if d.is_int else d.hi - d.lo)
                  for d in box.dims)

    def draw(rng: random.Random) -> Point:
        out = []
        for is_int, lo, hi, width in specs:
            u = rng.random()
            if is_int:
                x = lo + int(u * width)
                out.append(x if x <= hi else hi)
            else:
                x = lo + u * width
                if x >= hi > lo:
                    x = math.nextafter(hi, lo)
                out.append(x)
        return tuple(out)

    return draw


def boundary_band(grid: GridSpec, neighbor: CellId, valid: CellId, beta: float) -> InputBox:
    """The slice of ``neighbor`` that touches ``valid``.

    Along each dimension where the two cells differ, keep the ``beta``
    fraction of the neighbour's extent on the side facing the valid cell
    (at least one integer for int dims); elsewhere keep the full extent.
    """
    if not 0 < beta <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    if neighbor not in neighbors_moore(grid, valid):
        raise NotAdjacent(f"cell {neighbor} is not a Moore neighbour of {valid}")
    dims = []
    for k, (dim, i, j) in enumerate(zip(grid.base.dims, neighbor, valid)):
        lo, hi = _cell_range(grid, k, i)
        if i != j:
            if dim.is_int:
                # tolerance keeps products like 0.25*4 from rounding up a whole step
                b = max(1, math.ceil(beta * grid.cell_widths[k] - 1e-9))
                lo, hi = (lo, lo + b - 1) if i > j else (hi - b + 1, hi)
            else:
                b = beta * (hi - lo)
                lo, hi = (lo, min(hi, lo + b)) if i > j else (max(lo, hi - b), hi)
        dims.append(VarDomain(dim.name, dim.kind, lo, hi))
    return InputBox(tuple(dims))


def cell_label(grid: GridSpec, c: CellId) -> str:
    """``D_i`` label for 2-d grids, column-major with the second axis descending."""
    if grid.d != 2:
        raise ValueError("D_i labels are defined for 2-d grids only")
    col, row = c[0], grid.n - 1 - c[1]
    return f"D_{col * grid.n + row + 1}"


def cell_from_label(grid: GridSpec, label: str) -> CellId:
    if grid.d != 2:
        raise ValueError("D_i labels are defined for 2-d grids only")
    k = int(label.removeprefix("D_")) - 1
    if not 0 <= k < grid.n * grid.n:
        raise ValueError(f"label {label!r} out of range for n={grid.n}")
    col, row = divmod(k, grid.n)
    return (col, grid.n - 1 - row)


def iter_points(box: InputBox) -> Iterator[Point]:
    """Every integer point of an all-int box, in lexicographic order."""
    if not box.all_int:
        raise ValueError("point enumeration needs an all-int box")
    return itertools.product(*(range(d.lo, d.hi + 1) for d in box.dims))


# ---------------------------------------------------------------------------
# Domain strings:  name:kind:lo..hi;name:kind:lo..hi

def parse_domain(text: str) -> InputBox:
    dims = []
    offset = 0
    for part in text.split(";"):
        column = offset + len(part) - len(part.lstrip()) + 1
        offset += len(part) + 1
        part = part.strip()
        if not part:
            raise ParseError("expected 'name:kind:lo..hi', found empty entry", 1, column)
        fields = part.split(":")
        if len(fields) != 3 or ".." not in fields[2]:
            raise ParseError(f"expected 'name:kind:lo..hi', found {part!r}", 1, column)
        name, kind, bounds = (f.strip() for f in fields)
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ParseError(f"invalid variable name {name!r}", 1, column)
        if kind not in ("int", "real"):
            raise ParseError(f"kind must be 'int' or 'real', found {kind!r}", 1, column)
        lo_text, _, hi_text = bounds.partition("..")
        conv = int if kind == "int" else float
        try:
            lo, hi = conv(lo_text), conv(hi_text)
        except ValueError:
            raise ParseError(f"bad bounds {bounds!r} for {kind} dimension", 1, column) from None
        if lo > hi:
            raise ParseError(f"{name}: lo exceeds hi ({lo_text} > {hi_text})", 1, column)
        try:
            dims.append(VarDomain(name, kind, lo, hi))
        except ValueError as exc:
            raise ParseError(str(exc), 1, column) from None
    try:
        return InputBox(tuple(dims))
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1) from None


def format_domain(box: InputBox) -> str:
    def num(x):
        return str(x) if isinstance(x, int) else repr(float(x))

    return ";".join(f"{d.name}:{d.kind}:{num(d.lo)}..{num(d.hi)}" for d in box.dims)
