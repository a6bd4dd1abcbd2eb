"""Uniform random test suites for a path condition: RT, PRT and ART.

All three strategies report ``generated_total``, the number of concrete
condition evaluations spent to collect ``requested`` satisfying points.  For
ART this includes the probes spent locating the valid region.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from . import expr as ex
from .errors import AcceptanceTooLow, UnsatProven
from .grid import InputBox, cell_box, partition, sampler
from .interval import Verdict, refute_pc
from .search import Probe, SearchConfig, find_valid_region

RngLike = Union[random.Random, int]


@dataclass
class GenReport:
    method: str
    params: dict
    seed: Optional[int]
    requested: int
    accepted: list = field(repr=False)
    generated_total: int
    search_probes: int = 0
    cells: tuple = field(default=(), repr=False)

    @property
    def rejected(self) -> int:
        return self.generated_total - self.requested

    def summary(self) -> str:
        fields = [f"method={self.method}"]
        fields += [f"{k}={v}" for k, v in self.params.items()]
        return (
            " ".join(fields) + f" seed={self.seed} requested={self.requested} "
            f"generated_total={self.generated_total} rejected={self.rejected} "
            f"search_probes={self.search_probes}"
        )


def _rng(rng: RngLike):
    if isinstance(rng, random.Random):
        return rng, None
    return random.Random(rng), rng


def _fill(fn, box: InputBox, boxes: Sequence[InputBox], count: int, rng: random.Random,
          cap: int, spent: int, on_reject) -> tuple:
    """Sample equal-size cells uniformly until ``count`` points satisfy ``fn``."""
    accepted = []
    generated = spent
    draws = [sampler(b) for b in boxes]
    k = len(draws)
    # only enlarged grids can reach outside the caller's box
    inside = box.contains if any(not b.is_subbox(box) for b in boxes) else None
    while len(accepted) < count:
        draw = draws[0] if k == 1 else draws[int(rng.random() * k)]
        p = draw(rng)
        generated += 1
        if (inside is None or inside(p)) and fn(*p):
            accepted.append(p)
        else:
            if on_reject is not None:
                on_reject(p)
            if generated >= cap:
                raise AcceptanceTooLow(generated, len(accepted), count)
    return accepted, generated


def _check(count: int, cap_factor: float) -> int:
    if count < 1:
        raise ValueError("requested count must be >= 1")
    if cap_factor < 1:
        raise ValueError("cap_factor must be >= 1")
    return int(cap_factor * count)


def generate_rt(pc: ex.PathCondition, box: InputBox, count: int, rng: RngLike,
                cap_factor: float = 1000,
                on_reject: Callable = None) -> GenReport:
    """Plain random testing: uniform points over the whole box."""
    cap = _check(count, cap_factor)
    rng, seed = _rng(rng)
    fn = Probe(pc, box).fn
    accepted, generated = _fill(fn, box, [box], count, rng, cap, 0, on_reject)
    return GenReport("rt", {}, seed, count, accepted, generated)


def surviving_cells(pc: ex.PathCondition, box: InputBox, k: int):
    grid = partition(box, k)
    return grid, [c for c in grid.cells()
                  if refute_pc(pc, cell_box(grid, c)) is not Verdict.UNSAT]


def generate_prt(pc: ex.PathCondition, box: InputBox, k: int, count: int, rng: RngLike,
                 cap_factor: float = 1000,
                 on_reject: Callable = None) -> GenReport:
    """Path-oriented random testing: ``k``-per-dimension grid, drop the cells
    interval evaluation refutes, sample uniformly over the rest."""
    cap = _check(count, cap_factor)
    rng, seed = _rng(rng)
    fn = Probe(pc, box).fn
    grid, cells = surviving_cells(pc, box, k)
    if not cells:
        raise UnsatProven(f"every cell of the {k}-per-dimension grid is refuted")
    boxes = [cell_box(grid, c) for c in cells]
    accepted, generated = _fill(fn, box, boxes, count, rng, cap, 0, on_reject)
    return GenReport("prt", {"k": k}, seed, count, accepted, generated, 0, tuple(cells))


def generate_art(pc: ex.PathCondition, box: InputBox, cfg: SearchConfig, count: int,
                 rng: RngLike, cap_factor: float = 1000,
                 on_reject: Callable = None) -> GenReport:
    """Locate the valid region by grid search, then sample uniformly over it.

    Search and expansion probes are part of ``generated_total``.
    """
    cap = _check(count, cap_factor)
    rng, seed = _rng(rng)
    region = find_valid_region(pc, box, cfg, rng)
    cells = sorted(region.valid)
    # equal-probability cell choice is uniform because cells are equal-size;
    # weight by volume if grids ever get per-dimension resolutions
    boxes = [cell_box(region.grid, c) for c in cells]
    fn = Probe(pc, box).fn
    accepted, generated = _fill(fn, box, boxes, count, rng, cap,
                                region.probes_used, on_reject)
    params = {"n": region.grid.n, "s": cfg.samples_per_cell, "beta": cfg.beta}
    return GenReport("art", params, seed, count, accepted, generated,
                     region.probes_used, tuple(cells))
