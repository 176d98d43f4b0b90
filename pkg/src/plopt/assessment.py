"""Per-product compliance values, irrelevance handling and weighted scores."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Optional

from plopt.numbers import format_number, to_fraction
from plopt.quality_model import QualityModel, UnknownIdError
from plopt.validation import InvalidInputError, ValidationReport

Cell = tuple[str, str]  # (feature_id, product_id)


@dataclass(frozen=True)
class Product:
    id: str
    name: str


class IrrelevancePolicy(enum.Enum):
    """What to do with a feature that does not apply to a product.

    REDISTRIBUTE hands its weight to the other features of the same
    characteristic, in proportion to their feature weights. PERFECT scores it
    as full compliance, EMPTY as none.
    """

    REDISTRIBUTE = "redistribute"
    PERFECT = "perfect"
    EMPTY = "empty"


@dataclass(frozen=True)
class ScoreMatrix:
    """Compliance value per (feature, product); ``None`` marks an irrelevant cell."""

    products: tuple[Product, ...]
    entries: Mapping[Cell, Optional[Fraction]]

    @property
    def product_ids(self) -> list[str]:
        return [p.id for p in self.products]

    @classmethod
    def from_dict(cls, doc: dict) -> "ScoreMatrix":
        try:
            products = tuple(Product(str(p["id"]), str(p.get("name", p["id"]))) for p in doc["products"])
            entries: dict[Cell, Optional[Fraction]] = {}
            for fid, row in doc["scores"].items():
                for pid, value in row.items():
                    entries[(str(fid), str(pid))] = None if value is None else to_fraction(value)
        except KeyError as exc:
            raise ValueError(f"assessment document is missing field {exc.args[0]!r}") from None
        except (TypeError, AttributeError) as exc:
            raise ValueError(f"malformed assessment document: {exc}") from None
        return cls(products, entries)

    def to_dict(self) -> dict:
        scores: dict[str, dict[str, Optional[str]]] = {}
        for (fid, pid), value in self.entries.items():
            scores.setdefault(fid, {})[pid] = None if value is None else format_number(value)
        return {
            "products": [{"id": p.id, "name": p.name} for p in self.products],
            "scores": scores,
        }


def load_assessment(path: str | Path) -> ScoreMatrix:
    with open(path, encoding="utf-8") as fh:
        return ScoreMatrix.from_dict(json.load(fh))


def validate_assessment(model: QualityModel, matrix: ScoreMatrix) -> ValidationReport:
    report = ValidationReport()
    pids = matrix.product_ids
    if not pids:
        report.add("no-products", "assessment", "assessment lists no products")
    if len(set(pids)) != len(pids):
        for pid in sorted({p for p in pids if pids.count(p) > 1}):
            report.add("duplicate-id", pid, "product id is not unique")
    fids = set(model.feature_ids)
    known_p = set(pids)
    for fid in model.feature_ids:
        for pid in pids:
            if (fid, pid) not in matrix.entries:
                report.add("missing-cell", f"{fid}/{pid}", "no value for this feature and product")
    for (fid, pid), value in matrix.entries.items():
        subject = f"{fid}/{pid}"
        if fid not in fids:
            report.add("unknown-feature", subject, f"feature {fid!r} is not in the model")
        if pid not in known_p:
            report.add("unknown-product", subject, f"product {pid!r} is not listed")
        if value is not None and not 0 <= value <= 1:
            report.add("value-range", subject, f"value {format_number(value)} outside [0,1]")
    return report


@dataclass(frozen=True)
class ResolvedAssessment:
    """A score matrix with no irrelevant cells plus per-product effective weights.

    ``weights[(f, p)]`` is the overall weight of feature ``f`` as it applies to
    product ``p``; it differs from the model weight only under REDISTRIBUTE.
    """

    feature_ids: tuple[str, ...]
    products: tuple[Product, ...]
    weights: Mapping[Cell, Fraction]
    values: Mapping[Cell, Fraction]
    policy: IrrelevancePolicy = field(default=IrrelevancePolicy.PERFECT)

    @property
    def product_ids(self) -> list[str]:
        return [p.id for p in self.products]

    def score(self, feature_id: str, product_id: str) -> Fraction:
        cell = (feature_id, product_id)
        try:
            return self.weights[cell] * self.values[cell]
        except KeyError:
            raise UnknownIdError(f"unknown cell {feature_id!r}/{product_id!r}") from None

    def with_values(self, values: Mapping[Cell, Fraction]) -> "ResolvedAssessment":
        return replace(self, values=dict(values))


def resolve_irrelevance(
    model: QualityModel,
    matrix: ScoreMatrix,
    policy: IrrelevancePolicy | str = IrrelevancePolicy.PERFECT,
) -> ResolvedAssessment:
    policy = IrrelevancePolicy(policy)
    report = validate_assessment(model, matrix)
    if not report.ok:
        raise InvalidInputError(report, "assessment")

    base = model.overall_weights()
    pids = matrix.product_ids
    weights: dict[Cell, Fraction] = {}
    values: dict[Cell, Fraction] = {}

    for c in model.characteristics:
        for pid in pids:
            irrelevant = [f for f in c.features if matrix.entries[(f.id, pid)] is None]
            if policy is IrrelevancePolicy.REDISTRIBUTE and irrelevant:
                if len(irrelevant) == len(c.features):
                    raise ValueError(f"characteristic fully irrelevant: {c.id!r} for product {pid!r}")
                kept = [f for f in c.features if matrix.entries[(f.id, pid)] is not None]
                kept_mass = sum((f.weight for f in kept), Fraction(0))
                if kept_mass == 0:
                    raise ValueError(
                        f"cannot redistribute in characteristic {c.id!r} for product {pid!r}: "
                        "remaining features all have weight 0"
                    )
                for f in c.features:
                    cell = (f.id, pid)
                    v = matrix.entries[cell]
                    if v is None:
                        weights[cell] = Fraction(0)
                        values[cell] = Fraction(0)
                    else:
                        weights[cell] = 100 * c.weight * f.weight / kept_mass
                        values[cell] = v
                continue
            for f in c.features:
                cell = (f.id, pid)
                v = matrix.entries[cell]
                weights[cell] = base[f.id]
                if v is None:
                    v = Fraction(1) if policy is IrrelevancePolicy.PERFECT else Fraction(0)
                values[cell] = v

    return ResolvedAssessment(tuple(model.feature_ids), matrix.products, weights, values, policy)


def weighted_score(resolved: ResolvedAssessment, feature_id: str, product_id: str) -> Fraction:
    return resolved.score(feature_id, product_id)


def product_quality(resolved: ResolvedAssessment, product_id: str) -> Fraction:
    if product_id not in resolved.product_ids:
        raise UnknownIdError(f"unknown product id {product_id!r}")
    return sum((resolved.score(f, product_id) for f in resolved.feature_ids), Fraction(0))


def adherence(resolved: ResolvedAssessment) -> Fraction:
    """Sum of weighted scores over every feature and product."""
    return sum(
        (resolved.weights[cell] * v for cell, v in resolved.values.items()),
        Fraction(0),
    )
