"""Selection of an optimal feasible subset of modifications.

Two objectives are supported. ``Budget(xi)`` maximizes the total quality
gain subject to total cost <= xi (the empty plan is always admissible).
``Ratio(gamma)`` maximizes ``quality**gamma / cost`` over non-empty plans,
where quality is either the plan's gain or the adherence after applying it.

Both are solved exactly by branch-and-bound over the lexicographic subset
tree. The bound adds the positive part of every modification still
reachable from a node. Plans are ordered by objective, then higher gain,
then lower cost, then the lexicographically smallest id list in catalog
order; ratio objectives are compared with an absolute tolerance of 1e-9.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Callable, Iterable, Sequence, Union

from plopt import _kernels
from plopt.assessment import ResolvedAssessment, adherence
from plopt.catalog import (
    PER_FEATURE,
    Catalog,
    apply,
    is_feasible,
    positive_mass,
    subset_cost,
    total_cost,
)
from plopt.numbers import format_number, to_fraction

RATIO_TOL = 1e-9
DEFAULT_ENUMERATION_LIMIT = 20
QUALITY_TERMS = ("gain", "adherence")


class NoCandidateError(ValueError):
    """No plan qualifies for the ratio objective."""


class EnumerationLimitError(ValueError):
    pass


@dataclass(frozen=True)
class Budget:
    xi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "xi", to_fraction(self.xi))
        if self.xi < 0:
            raise ValueError(f"budget must be >= 0, got {format_number(self.xi)}")

    def to_dict(self) -> dict:
        return {"type": "budget", "xi": format_number(self.xi)}


@dataclass(frozen=True)
class Ratio:
    gamma: float
    quality: str = "gain"

    def __post_init__(self) -> None:
        g = float(self.gamma)
        if not math.isfinite(g) or g <= 0:
            raise ValueError(f"gamma must be finite and > 0, got {self.gamma!r}")
        if self.quality not in QUALITY_TERMS:
            raise ValueError(f"quality term must be one of {QUALITY_TERMS}, got {self.quality!r}")
        object.__setattr__(self, "gamma", g)

    def value(self, quality: Fraction, cost: Fraction) -> float | None:
        if quality < 0 or cost <= 0:
            return None
        return float(quality) ** self.gamma / float(cost)

    def to_dict(self) -> dict:
        return {"type": "ratio", "gamma": self.gamma, "quality": self.quality}


Objective = Union[Budget, Ratio]


@dataclass(frozen=True)
class Plan:
    subset: tuple[str, ...]
    total_cost: Fraction
    total_gain: Fraction
    adherence_before: Fraction
    adherence_after: Fraction
    objective_value: float | None = None

    @property
    def label(self) -> str:
        return "+".join(self.subset)

    def to_dict(self) -> dict:
        return {
            "subset": list(self.subset),
            "total_cost": format_number(self.total_cost),
            "total_gain": format_number(self.total_gain),
            "adherence_before": format_number(self.adherence_before),
            "adherence_after": format_number(self.adherence_after),
            "objective_value": self.objective_value,
        }


def default_threads() -> int:
    env = os.environ.get("PLOPT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


class _Instance:
    """Catalog plus baseline, with integer-scaled data for the kernels."""

    def __init__(self, catalog: Catalog, resolved: ResolvedAssessment) -> None:
        self.catalog = catalog
        self.resolved = resolved
        self.n = len(catalog)
        self.adj = catalog.adjacency
        self.baseline = adherence(resolved)
        self.additive = catalog.mode != PER_FEATURE
        self.costs = [total_cost(m) for m in catalog.modifications]
        self.cost_scale = reduce(math.lcm, (c.denominator for c in self.costs), 1)
        self.icosts = [int(c * self.cost_scale) for c in self.costs]
        if self.additive:
            self.gains = [m.gains.total for m in catalog.modifications]
            self.gain_scale = reduce(math.lcm, (g.denominator for g in self.gains), 1)
            self.igains = [int(g * self.gain_scale) for g in self.gains]
        else:
            self.pos = [positive_mass(m, resolved) for m in catalog.modifications]

    def gain_of(self, mask: int) -> Fraction:
        if self.additive:
            return sum((self.gains[i] for i in range(self.n) if (mask >> i) & 1), Fraction(0))
        return apply(self.catalog, self.catalog.subset(mask), self.resolved).gain

    def cost_of(self, mask: int) -> Fraction:
        return sum((self.costs[i] for i in range(self.n) if (mask >> i) & 1), Fraction(0))

    def plan(self, mask: int, objective: Objective | None = None, gain: Fraction | None = None) -> Plan:
        gain = self.gain_of(mask) if gain is None else gain
        cost = self.cost_of(mask)
        return Plan(
            subset=tuple(self.catalog.subset(mask)),
            total_cost=cost,
            total_gain=gain,
            adherence_before=self.baseline,
            adherence_after=self.baseline + gain,
            objective_value=_objective_value(objective, gain, cost, self.baseline),
        )


def _objective_value(objective: Objective | None, gain: Fraction, cost: Fraction, baseline: Fraction) -> float | None:
    if isinstance(objective, Budget):
        return float(gain) if cost <= objective.xi else None
    if isinstance(objective, Ratio):
        if cost == 0:
            return None
        return objective.value(gain if objective.quality == "gain" else baseline + gain, cost)
    return None


def enumerate_feasible(
    catalog: Catalog,
    resolved: ResolvedAssessment,
    objective: Objective | None = None,
    limit: int = DEFAULT_ENUMERATION_LIMIT,
    backend: str | None = None,
) -> list[Plan]:
    """Every non-empty feasible plan: gain descending, cost ascending, then lex."""
    inst = _Instance(catalog, resolved)
    if inst.n > limit:
        raise EnumerationLimitError(
            f"enumeration is limited to {limit} modifications (catalog has {inst.n}); "
            "use the branch-and-bound optimizer instead"
        )
    if inst.additive:
        k = _kernels.select(inst.adj, inst.igains, inst.icosts, name=backend)
        masks, gsum, csum = k.enumerate_independent(inst.adj, inst.igains, inst.icosts)
        rows = [
            (m, Fraction(g, inst.gain_scale), Fraction(c, inst.cost_scale))
            for m, g, c in zip(masks, gsum, csum)
            if m
        ]
    else:
        k = _kernels.select(inst.adj, inst.icosts, name=backend)
        masks, _, csum = k.enumerate_independent(inst.adj, [0] * inst.n, inst.icosts)
        rows = [(m, inst.gain_of(m), Fraction(c, inst.cost_scale)) for m, c in zip(masks, csum) if m]
    # kernels emit lexicographic order; a stable sort keeps it as the last key
    rows.sort(key=lambda r: (-r[1], r[2]))
    return [inst.plan(m, objective, g) for m, g, _ in rows]


def _run_tasks(fn: Callable[[int], object], firsts: Sequence[int], threads: int) -> list:
    if threads <= 1 or len(firsts) <= 1:
        return [fn(f) for f in firsts]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, firsts))


def _budget_generic(inst: _Instance, xi: Fraction) -> int:
    n, adj, costs, pos = inst.n, inst.adj, inst.costs, inst.pos
    best = [0, Fraction(0), Fraction(0)]  # mask, gain, cost; the empty plan

    def visit(mask: int, last: int, forb: int, c: Fraction) -> None:
        g = inst.gain_of(mask) if mask else Fraction(0)
        if g > best[1] or (g == best[1] and c < best[2]):
            best[:] = [mask, g, c]
        children = [j for j in range(last + 1, n) if not (forb >> j) & 1 and c + costs[j] <= xi]
        rem = sum((pos[j] for j in children), Fraction(0))
        if g + rem < best[1] or (g + rem == best[1] and c >= best[2]):
            return
        for j in children:
            visit(mask | (1 << j), j, forb | adj[j], c + costs[j])

    visit(0, -1, 0, Fraction(0))
    return best[0]


def optimize_budget(
    catalog: Catalog,
    resolved: ResolvedAssessment,
    xi: Fraction | str | int,
    threads: int | None = None,
    backend: str | None = None,
) -> Plan:
    """Highest-gain feasible plan whose total cost does not exceed ``xi``."""
    objective = Budget(xi)
    inst = _Instance(catalog, resolved)
    if not inst.additive:
        plan = inst.plan(_budget_generic(inst, objective.xi), objective)
        _check_or_raise(plan, catalog, resolved, objective)
        return plan

    # anything above the sum of all costs admits every subset
    ibudget = min(math.floor(objective.xi * inst.cost_scale), sum(inst.icosts))
    k = _kernels.select(inst.adj, inst.igains, inst.icosts, extra=ibudget, name=backend)
    threads = default_threads() if threads is None else threads
    if threads <= 1:
        _, mask, _, _ = k.budget_search(inst.adj, inst.igains, inst.icosts, ibudget, -1)
    else:
        results = _run_tasks(
            lambda j: k.budget_search(inst.adj, inst.igains, inst.icosts, ibudget, j),
            range(inst.n),
            threads,
        )
        mask, bg, bc = 0, 0, 0  # the empty plan precedes every subtree
        for found, m, g, c in results:
            if found and (g > bg or (g == bg and c < bc)):
                mask, bg, bc = m, g, c
    plan = inst.plan(mask, objective)
    _check_or_raise(plan, catalog, resolved, objective)
    return plan


def _pick_ratio(cands: Iterable[tuple[int, float, object, object]]) -> int | None:
    cands = list(cands)
    if not cands:
        return None
    top = max(c[1] for c in cands)
    near = [c for c in cands if c[1] >= top - RATIO_TOL]
    return min(near, key=lambda c: (-c[2], c[3]))[0]


def _ratio_generic(inst: _Instance, objective: Ratio) -> list[tuple[int, float, Fraction, Fraction]]:
    n, adj, costs, pos = inst.n, inst.adj, inst.costs, inst.pos
    offset = Fraction(0) if objective.quality == "gain" else inst.baseline
    gamma = objective.gamma
    out: list[tuple[int, float, Fraction, Fraction]] = []
    best = [-math.inf]

    def visit(mask: int, last: int, forb: int, c: Fraction) -> None:
        g = inst.gain_of(mask) if mask else Fraction(0)
        if mask:
            obj = objective.value(offset + g, c)
            if obj is not None and obj >= best[0] - RATIO_TOL:
                out.append((mask, obj, g, c))
                best[0] = max(best[0], obj)
        children = [j for j in range(last + 1, n) if not (forb >> j) & 1]
        if not children:
            return
        qub = offset + g + sum((pos[j] for j in children), Fraction(0))
        if qub < 0:
            return
        denom = c if mask else min(costs[j] for j in children)
        if float(qub) ** gamma / float(denom) < best[0] - RATIO_TOL:
            return
        for j in children:
            visit(mask | (1 << j), j, forb | adj[j], c + costs[j])

    visit(0, -1, 0, Fraction(0))
    return out


def optimize_ratio(
    catalog: Catalog,
    resolved: ResolvedAssessment,
    gamma: float,
    quality: str = "gain",
    threads: int | None = None,
    backend: str | None = None,
) -> Plan:
    """Non-empty feasible plan maximizing ``quality**gamma / cost``.

    ``quality="gain"`` uses the plan's gain; ``quality="adherence"`` uses the
    adherence after applying it. Plans with negative quality are excluded.
    """
    objective = Ratio(gamma, quality)
    if len(catalog) == 0:
        raise NoCandidateError("no candidate modifications")
    inst = _Instance(catalog, resolved)
    if not inst.additive:
        best = _pick_ratio(_ratio_generic(inst, objective))
    else:
        offset = 0.0 if quality == "gain" else float(inst.baseline)
        k = _kernels.select(inst.adj, inst.igains, inst.icosts, name=backend)
        args = (inst.adj, inst.igains, inst.icosts, inst.gain_scale, inst.cost_scale, offset, objective.gamma, RATIO_TOL)
        threads = default_threads() if threads is None else threads
        if threads <= 1:
            cands = k.ratio_search(*args, -1)
        else:
            parts = _run_tasks(lambda j: k.ratio_search(*args, j), range(inst.n), threads)
            cands = [c for part in parts for c in part]
        best = _pick_ratio(cands)
    if best is None:
        raise NoCandidateError("no non-empty feasible plan has non-negative quality")
    plan = inst.plan(best, objective)
    _check_or_raise(plan, catalog, resolved, objective)
    return plan


def optimize(
    catalog: Catalog,
    resolved: ResolvedAssessment,
    objective: Objective,
    threads: int | None = None,
    backend: str | None = None,
) -> Plan:
    if isinstance(objective, Budget):
        return optimize_budget(catalog, resolved, objective.xi, threads, backend)
    return optimize_ratio(catalog, resolved, objective.gamma, objective.quality, threads, backend)


def check_plan(plan: Plan, catalog: Catalog, resolved: ResolvedAssessment, objective: Objective) -> list[str]:
    """Recompute a plan from scratch and list every inconsistency."""
    problems = []
    if not is_feasible(catalog, plan.subset):
        problems.append("subset contains a conflicting pair")
    if list(plan.subset) != catalog.sorted_ids(plan.subset):
        problems.append("subset is not in catalog order")
    cost = subset_cost(catalog, plan.subset)
    if cost != plan.total_cost:
        problems.append(f"cost {format_number(plan.total_cost)} != recomputed {format_number(cost)}")
    result = apply(catalog, plan.subset, resolved)
    if result.gain != plan.total_gain:
        problems.append(f"gain {format_number(plan.total_gain)} != recomputed {format_number(result.gain)}")
    if result.adherence_after != plan.adherence_after:
        problems.append("adherence after does not match")
    if isinstance(objective, Budget) and cost > objective.xi:
        problems.append(f"cost {format_number(cost)} exceeds budget {format_number(objective.xi)}")
    if isinstance(objective, Ratio) and not plan.subset:
        problems.append("ratio plans must be non-empty")
    return problems


def _check_or_raise(plan: Plan, catalog: Catalog, resolved: ResolvedAssessment, objective: Objective) -> None:
    problems = check_plan(plan, catalog, resolved, objective)
    if problems:
        raise RuntimeError("optimizer produced an inconsistent plan: " + "; ".join(problems))


@dataclass(frozen=True)
class ParetoRow:
    rank: int
    subset: tuple[str, ...]
    gain: Fraction
    cost: Fraction
    adherence: Fraction
    objective: float | None


def pareto_export(
    catalog: Catalog,
    resolved: ResolvedAssessment,
    objective: Objective | None = None,
    limit: int = DEFAULT_ENUMERATION_LIMIT,
    backend: str | None = None,
) -> list[ParetoRow]:
    """One row per non-empty feasible plan, ranked from the lowest gain upward.

    Rows come in enumeration order, so the first row holds the highest rank
    (equal to the number of feasible plans).
    """
    plans = enumerate_feasible(catalog, resolved, objective, limit, backend)
    total = len(plans)
    return [
        ParetoRow(total - i, p.subset, p.total_gain, p.total_cost, p.adherence_after, p.objective_value)
        for i, p in enumerate(plans)
    ]


PARETO_HEADER = ("rank", "subset", "gain", "cost", "adherence", "objective")


def pareto_csv(rows: Iterable[ParetoRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PARETO_HEADER)
    for r in rows:
        w.writerow(
            [
                r.rank,
                "+".join(r.subset),
                format_number(r.gain),
                format_number(r.cost),
                format_number(r.adherence),
                "" if r.objective is None else repr(r.objective),
            ]
        )
    return buf.getvalue()
