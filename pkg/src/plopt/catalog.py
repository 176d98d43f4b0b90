"""Architecture modifications: costs, quality gains and mutual exclusions.

A modification's cost is a shared product-line cost plus a cost per affected
product. Its effect is recorded either as a quality gain per product (purely
additive across modifications) or as per-cell deltas on compliance values,
which are summed and then clamped to [0, 1] when several modifications touch
the same cell.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Union

from plopt import _kernels
from plopt.assessment import ResolvedAssessment, adherence
from plopt.numbers import clamp01, format_number, to_fraction
from plopt.quality_model import UnknownIdError
from plopt.validation import ValidationReport

PER_PRODUCT = "per_product"
PER_FEATURE = "per_feature"


class InfeasibleSubsetError(ValueError):
    pass


@dataclass(frozen=True)
class PerProductGains:
    """Adherence gain per product; may be negative."""

    gains: Mapping[str, Fraction]

    @property
    def total(self) -> Fraction:
        return sum(self.gains.values(), Fraction(0))


@dataclass(frozen=True)
class PerFeatureGains:
    """Change of the compliance value per (feature, product) cell."""

    deltas: Mapping[tuple[str, str], Fraction]


GainSpec = Union[PerProductGains, PerFeatureGains]


@dataclass(frozen=True)
class Modification:
    id: str
    label: str
    shared_cost: Fraction
    per_product_costs: Mapping[str, Fraction]
    gains: GainSpec

    @property
    def mode(self) -> str:
        return PER_PRODUCT if isinstance(self.gains, PerProductGains) else PER_FEATURE


@dataclass(frozen=True)
class ConflictGraph:
    pairs: tuple[tuple[str, str], ...] = ()

    def conflicting(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self._pairset

    @cached_property
    def _pairset(self) -> frozenset[frozenset[str]]:
        return frozenset(frozenset(p) for p in self.pairs if p[0] != p[1])


@dataclass(frozen=True)
class Catalog:
    modifications: tuple[Modification, ...]
    conflicts: ConflictGraph = field(default_factory=ConflictGraph)

    @property
    def ids(self) -> list[str]:
        return [m.id for m in self.modifications]

    def __len__(self) -> int:
        return len(self.modifications)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {m.id: i for i, m in enumerate(self.modifications)}

    def index(self, mod_id: str) -> int:
        try:
            return self._index[mod_id]
        except KeyError:
            raise UnknownIdError(f"unknown modification id {mod_id!r}") from None

    def get(self, mod_id: str) -> Modification:
        return self.modifications[self.index(mod_id)]

    @property
    def mode(self) -> str | None:
        modes = {m.mode for m in self.modifications}
        if len(modes) > 1:
            raise ValueError("catalog mixes per-product and per-feature gains")
        return modes.pop() if modes else None

    @cached_property
    def adjacency(self) -> list[int]:
        """Neighbour bitmask per modification, in catalog order."""
        adj = [0] * len(self.modifications)
        for a, b in self.conflicts.pairs:
            if a == b or a not in self._index or b not in self._index:
                continue
            i, j = self._index[a], self._index[b]
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return adj

    def mask(self, subset: Iterable[str]) -> int:
        m = 0
        for mod_id in subset:
            m |= 1 << self.index(mod_id)
        return m

    def subset(self, mask: int) -> list[str]:
        """Ids of a bitmask, in catalog order."""
        return [m.id for i, m in enumerate(self.modifications) if (mask >> i) & 1]

    def sorted_ids(self, subset: Iterable[str]) -> list[str]:
        return self.subset(self.mask(subset))

    @classmethod
    def from_dict(cls, doc: dict) -> "Catalog":
        try:
            mods = []
            for m in doc["modifications"]:
                g = m["gains"]
                if "per_product" in g and "per_feature" not in g:
                    gains: GainSpec = PerProductGains(
                        {str(p): to_fraction(v) for p, v in g["per_product"].items()}
                    )
                elif "per_feature" in g and "per_product" not in g:
                    gains = PerFeatureGains(
                        {
                            (str(f), str(p)): to_fraction(v)
                            for f, row in g["per_feature"].items()
                            for p, v in row.items()
                        }
                    )
                else:
                    raise ValueError(
                        f"modification {m.get('id')!r}: gains need exactly one of per_product, per_feature"
                    )
                mods.append(
                    Modification(
                        id=str(m["id"]),
                        label=str(m.get("label", m["id"])),
                        shared_cost=to_fraction(m.get("shared_cost", "0")),
                        per_product_costs={
                            str(p): to_fraction(v) for p, v in m.get("per_product_costs", {}).items()
                        },
                        gains=gains,
                    )
                )
            pairs = []
            for pair in doc.get("conflicts", []):
                if len(pair) != 2:
                    raise ValueError(f"conflict entry {pair!r} is not a pair")
                pairs.append((str(pair[0]), str(pair[1])))
        except KeyError as exc:
            raise ValueError(f"modifications document is missing field {exc.args[0]!r}") from None
        except (TypeError, AttributeError) as exc:
            raise ValueError(f"malformed modifications document: {exc}") from None
        return cls(tuple(mods), ConflictGraph(tuple(pairs)))

    def to_dict(self) -> dict:
        mods = []
        for m in self.modifications:
            if isinstance(m.gains, PerProductGains):
                gains: dict = {"per_product": {p: format_number(v) for p, v in m.gains.gains.items()}}
            else:
                rows: dict[str, dict[str, str]] = {}
                for (f, p), v in m.gains.deltas.items():
                    rows.setdefault(f, {})[p] = format_number(v)
                gains = {"per_feature": rows}
            mods.append(
                {
                    "id": m.id,
                    "label": m.label,
                    "shared_cost": format_number(m.shared_cost),
                    "per_product_costs": {p: format_number(v) for p, v in m.per_product_costs.items()},
                    "gains": gains,
                }
            )
        return {"modifications": mods, "conflicts": [list(p) for p in self.conflicts.pairs]}


def load_catalog(path: str | Path) -> Catalog:
    with open(path, encoding="utf-8") as fh:
        return Catalog.from_dict(json.load(fh))


def total_cost(modification: Modification) -> Fraction:
    return modification.shared_cost + sum(modification.per_product_costs.values(), Fraction(0))


def subset_cost(catalog: Catalog, subset: Iterable[str]) -> Fraction:
    return sum((total_cost(catalog.get(i)) for i in set(subset)), Fraction(0))


def is_feasible(catalog: Catalog, subset: Iterable[str]) -> bool:
    """True when no two members are mutually exclusive."""
    ids = set(subset)
    for i in ids:
        catalog.index(i)
    return not any(a in ids and b in ids for a, b in catalog.conflicts.pairs if a != b)


def _conflict_in(catalog: Catalog, subset: Iterable[str]) -> tuple[str, str] | None:
    ids = set(subset)
    for a, b in catalog.conflicts.pairs:
        if a != b and a in ids and b in ids:
            return (a, b)
    return None


def _components(adj: list[int]) -> list[list[int]]:
    seen = 0
    comps = []
    for start in range(len(adj)):
        if (seen >> start) & 1:
            continue
        comp, frontier = [], [start]
        seen |= 1 << start
        while frontier:
            v = frontier.pop()
            comp.append(v)
            nb = adj[v] & ~seen
            seen |= nb
            while nb:
                low = nb & -nb
                frontier.append(low.bit_length() - 1)
                nb ^= low
        comps.append(sorted(comp))
    return comps


def count_feasible(catalog: Catalog, backend: str | None = None) -> int:
    """Exact number of non-empty subsets that contain no conflicting pair.

    The conflict graph is split into connected components; the count is the
    product of per-component independent-set counts, minus the empty set.
    """
    adj = catalog.adjacency
    total = 1
    for comp in _components(adj):
        pos = {v: k for k, v in enumerate(comp)}
        sub = []
        for v in comp:
            m = 0
            nb = adj[v]
            for u in comp:
                if (nb >> u) & 1:
                    m |= 1 << pos[u]
            sub.append(m)
        total *= _kernels.select(sub, name=backend).count_independent(sub)
    return total - 1


@dataclass(frozen=True)
class Application:
    """Result of applying a feasible subset of modifications."""

    subset: tuple[str, ...]
    adherence_before: Fraction
    adherence_after: Fraction
    product_gains: Mapping[str, Fraction]
    resolved: ResolvedAssessment | None = None  # per-feature mode only

    @property
    def gain(self) -> Fraction:
        return self.adherence_after - self.adherence_before


def apply(catalog: Catalog, subset: Iterable[str], resolved: ResolvedAssessment) -> Application:
    """Apply modifications to a resolved assessment.

    Per-product gains are summed. Per-feature deltas are summed per cell and
    the result clamped to [0, 1], so the outcome does not depend on order.
    """
    ids = catalog.sorted_ids(subset)
    pair = _conflict_in(catalog, ids)
    if pair is not None:
        raise InfeasibleSubsetError(f"conflicting modifications {pair[0]}, {pair[1]}")
    before = adherence(resolved)
    mods = [catalog.get(i) for i in ids]
    pids = resolved.product_ids

    if catalog.mode == PER_FEATURE:
        summed: dict[tuple[str, str], Fraction] = {}
        for m in mods:
            for cell, d in m.gains.deltas.items():
                summed[cell] = summed.get(cell, Fraction(0)) + d
        values = dict(resolved.values)
        for cell, d in summed.items():
            if cell not in values:
                raise UnknownIdError(f"modification touches unknown cell {cell[0]!r}/{cell[1]!r}")
            values[cell] = clamp01(values[cell] + d)
        after = resolved.with_values(values)
        per_product = {
            p: sum(
                (after.weights[(f, p)] * (after.values[(f, p)] - resolved.values[(f, p)]) for f in resolved.feature_ids),
                Fraction(0),
            )
            for p in pids
        }
        return Application(tuple(ids), before, adherence(after), per_product, after)

    per_product = {p: Fraction(0) for p in pids}
    for m in mods:
        for p, g in m.gains.gains.items():
            if p not in per_product:
                raise UnknownIdError(f"modification {m.id!r} names unknown product {p!r}")
            per_product[p] += g
    gain = sum(per_product.values(), Fraction(0))
    return Application(tuple(ids), before, before + gain, per_product)


def subset_gain(catalog: Catalog, subset: Iterable[str], resolved: ResolvedAssessment) -> Fraction:
    return apply(catalog, subset, resolved).gain


def positive_mass(modification: Modification, resolved: ResolvedAssessment | None = None) -> Fraction:
    """Upper bound on how much this modification can add to any adherence.

    Per-product gains are additive, so this is the total gain clipped at 0.
    A per-feature delta changes a clamped cell by at most its positive part,
    weighted by the cell's weight.
    """
    if isinstance(modification.gains, PerProductGains):
        return max(modification.gains.total, Fraction(0))
    if resolved is None:
        raise ValueError("per-feature bound needs the resolved assessment")
    return sum(
        (resolved.weights[cell] * d for cell, d in modification.gains.deltas.items() if d > 0 and cell in resolved.weights),
        Fraction(0),
    )


def validate_catalog(
    catalog: Catalog,
    resolved: ResolvedAssessment | None = None,
    feature_ids: Iterable[str] | None = None,
    product_ids: Iterable[str] | None = None,
) -> ValidationReport:
    """Check ids, costs, references and conflict pairs.

    Product and feature references are only checked when the assessment (or
    explicit id lists) are supplied.
    """
    report = ValidationReport()
    if resolved is not None:
        feature_ids = resolved.feature_ids if feature_ids is None else feature_ids
        product_ids = resolved.product_ids if product_ids is None else product_ids
    fids = set(feature_ids) if feature_ids is not None else None
    pids = set(product_ids) if product_ids is not None else None

    seen: set[str] = set()
    for m in catalog.modifications:
        if m.id in seen:
            report.add("duplicate-id", m.id, "modification id is not unique")
        seen.add(m.id)
        if m.shared_cost < 0:
            report.add("cost-range", m.id, f"shared cost {format_number(m.shared_cost)} is negative")
        for p, c in m.per_product_costs.items():
            if c < 0:
                report.add("cost-range", m.id, f"cost for product {p!r} is negative")
            if pids is not None and p not in pids:
                report.add("unknown-product", m.id, f"cost names unknown product {p!r}")
        if total_cost(m) <= 0:
            report.add("zero-cost", m.id, "total cost must be strictly positive")
        if isinstance(m.gains, PerProductGains):
            for p in m.gains.gains:
                if pids is not None and p not in pids:
                    report.add("unknown-product", m.id, f"gain names unknown product {p!r}")
        else:
            for f, p in m.gains.deltas:
                if fids is not None and f not in fids:
                    report.add("unknown-feature", m.id, f"delta names unknown feature {f!r}")
                if pids is not None and p not in pids:
                    report.add("unknown-product", m.id, f"delta names unknown product {p!r}")

    if len({m.mode for m in catalog.modifications}) > 1:
        report.add("mixed-gains", "catalog", "catalog mixes per-product and per-feature gains")

    seen_pairs: set[frozenset[str]] = set()
    for a, b in catalog.conflicts.pairs:
        subject = f"{a}/{b}"
        if a == b:
            report.add("self-conflict", subject, "a modification cannot conflict with itself")
        for x in (a, b):
            if x not in seen:
                report.add("unknown-modification", subject, f"conflict names unknown modification {x!r}")
        key = frozenset((a, b))
        if key in seen_pairs:
            report.warn("duplicate-conflict", subject, "conflict pair listed more than once")
        seen_pairs.add(key)

    if resolved is not None and report.ok and catalog.mode == PER_PRODUCT:
        base = adherence(resolved)
        ceiling = Fraction(100) * len(resolved.products)
        reach = base + sum((max(m.gains.total, Fraction(0)) for m in catalog.modifications), Fraction(0))
        if reach > ceiling:
            report.warn(
                "gain-overshoot",
                "catalog",
                f"baseline {format_number(base)} plus all positive gains reaches "
                f"{format_number(reach)} > maximum adherence {format_number(ceiling)}",
            )
    return report
