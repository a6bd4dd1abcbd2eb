"""Repeated seeded trials of RT / PRT / ART over a grid of parameters."""
from __future__ import annotations

import hashlib
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import AcceptanceTooLow, Exhausted, UnsatProven
from .expr import eval_condition, parse_condition
from .grid import parse_domain
from .search import SearchConfig
from .suite import GenReport, generate_art, generate_prt, generate_rt

METHODS = ("rt", "prt", "art")
HEADER = (
    "method", "n", "requested", "trials", "mean_generated", "sd_generated",
    "min_generated", "max_generated", "mean_rejected", "mean_search_probes",
)


@dataclass(frozen=True)
class Knobs:
    samples_per_cell: int = 8
    beta: float = 0.25
    n_max: Optional[int] = None  # None: stay at n, restarting until the budget runs out
    cap_factor: float = 1000
    retest: bool = True
    probe_budget: int = 10**6

    def search_config(self, n: int) -> SearchConfig:
        kw = dict(samples_per_cell=self.samples_per_cell, beta=self.beta,
                  retest=self.retest, probe_budget=self.probe_budget)
        if self.n_max is None:
            return SearchConfig.fixed(n, **kw)
        return SearchConfig(n0=n, n_max=max(n, self.n_max), **kw)


# single-shot expansion: one probe per neighbour band, failed cells discarded
SINGLE_SHOT_KNOBS = Knobs(samples_per_cell=1, retest=False)


def trial_seed(base: int, method: str, n: Optional[int], requested: int, trial: int) -> int:
    """64-bit seed for one trial: SHA-256 of ``base|method|n|requested|trial``.

    ``n`` is written as ``-`` for rt.  Trials are independent of how many
    other trials or cells the matrix holds.
    """
    key = f"{base}|{method}|{'-' if n is None else n}|{requested}|{trial}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


def run_method(method: str, pc, box, n: Optional[int], requested: int, seed: int,
               knobs: Knobs = Knobs(), on_reject=None) -> GenReport:
    if method == "rt":
        return generate_rt(pc, box, requested, seed, knobs.cap_factor, on_reject)
    if method == "prt":
        return generate_prt(pc, box, n, requested, seed, knobs.cap_factor, on_reject)
    if method == "art":
        return generate_art(pc, box, knobs.search_config(n), requested, seed,
                            knobs.cap_factor, on_reject)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class Row:
    method: str
    n: Optional[int]
    requested: int
    trials: int
    generated: list = field(default_factory=list)
    rejected: list = field(default_factory=list)
    search_probes: list = field(default_factory=list)
    note: str = ""
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.note

    def stats(self) -> tuple:
        if not self.ok:
            nan = math.nan
            return nan, nan, nan, nan, nan, nan
        g = self.generated
        sd = statistics.stdev(g) if len(g) > 1 else 0.0
        return (statistics.fmean(g), sd, min(g), max(g),
                statistics.fmean(self.rejected), statistics.fmean(self.search_probes))


def _cell_task(args):
    method, cond, domain, n, requested, trials, base, knobs, verify = args
    pc, box = parse_condition(cond), parse_domain(domain)
    row = Row(method, n, requested, trials)
    verdicts = {}
    for t in range(trials):
        seed = trial_seed(base, method, n, requested, t)
        try:
            r = run_method(method, pc, box, n, requested, seed, knobs)
        except (Exhausted, UnsatProven, AcceptanceTooLow) as exc:
            row.note = f"trial {t}: {type(exc).__name__}: {exc}"
            break
        row.generated.append(r.generated_total)
        row.rejected.append(r.rejected)
        row.search_probes.append(r.search_probes)
        if verify:
            # tree-walking re-check, independent of the compiled fast path
            for p in r.accepted:
                ok = verdicts.get(p)
                if ok is None:
                    ok = verdicts[p] = box.contains(p) and eval_condition(pc, box.valuation(p))
                if not ok:
                    row.violations.append(p)
            row.checked += len(r.accepted)
    return row


def bench_matrix(condition: str, domain: str, methods: Sequence[str], ns: Sequence[int],
                 requested: Sequence[int], trials: int, base_seed: int,
                 knobs: Knobs = Knobs(), jobs: int = 1, verify: bool = False) -> list:
    """One Row per (method, n, requested), in that order; rt gets one row per
    requested value with ``n = None``.  With ``verify`` every accepted point
    is re-checked with the tree-walking evaluator; failures land in
    ``Row.violations``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tasks = []
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
        for n in ([None] if method == "rt" else ns):
            for req in requested:
                tasks.append((method, condition, domain, n, req, trials, base_seed, knobs,
                              verify))
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_cell_task, tasks))
    return [_cell_task(t) for t in tasks]


def _num(x) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "NaN"
    if isinstance(x, int):
        return str(x)
    return f"{x:.4f}"


def row_fields(row: Row) -> list:
    mean, sd, lo, hi, rej, probes = row.stats()
    return [row.method, "-" if row.n is None else str(row.n), str(row.requested),
            str(row.trials), _num(mean), _num(sd), _num(lo), _num(hi), _num(rej), _num(probes)]


def format_rows(rows: Sequence[Row], fmt: str = "csv") -> str:
    if fmt == "csv":
        sep = ","
    elif fmt == "tsv":
        sep = "\t"
    elif fmt == "markdown":
        return _pivot_markdown(rows)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    lines = [sep.join(HEADER)] + [sep.join(row_fields(r)) for r in rows]
    return "\n".join(lines) + "\n"


def _pivot_markdown(rows: Sequence[Row]) -> str:
    """Mean generated per (method, n) against requested: one line per
    method and resolution, one column per requested size."""
    requested = sorted({r.requested for r in rows})
    labels, cells = [], {}
    for r in rows:
        label = r.method.upper() if r.n is None else f"{r.method.upper()}(n={r.n})"
        if label not in cells:
            labels.append(label)
            cells[label] = {}
        cells[label][r.requested] = _num(r.stats()[0]) if r.ok else "NaN"
    out = ["| method | " + " | ".join(str(q) for q in requested) + " |",
           "|---" * (len(requested) + 1) + "|"]
    for label in labels:
        vals = [cells[label].get(q, "") for q in requested]
        out.append(f"| {label} | " + " | ".join(vals) + " |")
    return "\n".join(out) + "\n"
