"""Weighted quality model: characteristics, features and their weights.

A characteristic weight is a business priority, a feature weight is an
engineering judgement of how much the feature contributes to its
characteristic. Both are normalized (they sum to one at their level) and the
overall weight of a feature is ``100 * wc * wf``, so the overall weights of a
valid model always add up to exactly 100.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterator

from plopt.numbers import format_number, to_fraction
from plopt.validation import ValidationReport

HUNDRED = Fraction(100)


class UnknownIdError(LookupError):
    pass


@dataclass(frozen=True)
class Feature:
    id: str
    name: str
    question: str
    weight: Fraction


@dataclass(frozen=True)
class Characteristic:
    id: str
    name: str
    weight: Fraction
    features: tuple[Feature, ...]


@dataclass(frozen=True)
class QualityModel:
    characteristics: tuple[Characteristic, ...]

    def __iter__(self) -> Iterator[Characteristic]:
        return iter(self.characteristics)

    @property
    def features(self) -> list[Feature]:
        return [f for c in self.characteristics for f in c.features]

    @property
    def feature_ids(self) -> list[str]:
        return [f.id for f in self.features]

    @cached_property
    def _owner(self) -> dict[str, tuple[Characteristic, Feature]]:
        return {f.id: (c, f) for c in self.characteristics for f in c.features}

    def lookup(self, feature_id: str) -> tuple[Characteristic, Feature]:
        try:
            return self._owner[feature_id]
        except KeyError:
            raise UnknownIdError(f"unknown feature id {feature_id!r}") from None

    def overall_weights(self) -> dict[str, Fraction]:
        return {f.id: HUNDRED * c.weight * f.weight for c in self.characteristics for f in c.features}

    @classmethod
    def from_dict(cls, doc: dict) -> "QualityModel":
        try:
            chars = []
            for c in doc["characteristics"]:
                feats = tuple(
                    Feature(
                        id=str(f["id"]),
                        name=str(f.get("name", f["id"])),
                        question=str(f.get("question", "")),
                        weight=to_fraction(f["weight"]),
                    )
                    for f in c["features"]
                )
                chars.append(
                    Characteristic(
                        id=str(c["id"]),
                        name=str(c.get("name", c["id"])),
                        weight=to_fraction(c["weight"]),
                        features=feats,
                    )
                )
        except KeyError as exc:
            raise ValueError(f"model document is missing field {exc.args[0]!r}") from None
        except TypeError as exc:
            raise ValueError(f"malformed model document: {exc}") from None
        return cls(tuple(chars))

    def to_dict(self) -> dict:
        return {
            "characteristics": [
                {
                    "id": c.id,
                    "name": c.name,
                    "weight": format_number(c.weight),
                    "features": [
                        {
                            "id": f.id,
                            "name": f.name,
                            "question": f.question,
                            "weight": format_number(f.weight),
                        }
                        for f in c.features
                    ],
                }
                for c in self.characteristics
            ]
        }


def load_model(path: str | Path) -> QualityModel:
    with open(path, encoding="utf-8") as fh:
        return QualityModel.from_dict(json.load(fh))


def validate_model(model: QualityModel) -> ValidationReport:
    """Report every violated model invariant; an empty report means valid.

    A zero feature weight is allowed but reported as a warning.
    """
    report = ValidationReport()
    if not model.characteristics:
        report.add("empty-model", "model", "model has no characteristics")
        return report

    seen_chars: set[str] = set()
    seen_feats: set[str] = set()
    for c in model.characteristics:
        if c.id in seen_chars:
            report.add("duplicate-id", c.id, "characteristic id is not unique")
        seen_chars.add(c.id)
        if not 0 <= c.weight <= 1:
            report.add("weight-range", c.id, f"characteristic weight {format_number(c.weight)} outside [0,1]")
        if not c.features:
            report.add("empty-characteristic", c.id, "characteristic has no features")
            continue
        for f in c.features:
            if f.id in seen_feats:
                report.add("duplicate-id", f.id, "feature id is not unique")
            seen_feats.add(f.id)
            if not f.id.startswith(c.id + "."):
                report.add("id-prefix", f.id, f"feature id does not extend characteristic id {c.id!r}")
            if not 0 <= f.weight <= 1:
                report.add("weight-range", f.id, f"feature weight {format_number(f.weight)} outside [0,1]")
            elif f.weight == 0:
                report.warn("zero-weight", f.id, "feature weight is 0; it cannot affect any score")
        total = sum((f.weight for f in c.features), Fraction(0))
        if total != 1:
            report.add("feature-sum", c.id, f"feature weights sum to {format_number(total)} ≠ 1")

    total = sum((c.weight for c in model.characteristics), Fraction(0))
    if total != 1:
        report.add("characteristic-sum", "model", f"characteristic weights sum to {format_number(total)} ≠ 1")
    return report


def apply_default_characteristic_weights(model: QualityModel) -> QualityModel:
    """Give every characteristic the same weight, 1/|C|. Feature weights are kept."""
    if not model.characteristics:
        raise ValueError("empty model")
    w = Fraction(1, len(model.characteristics))
    return replace(model, characteristics=tuple(replace(c, weight=w) for c in model.characteristics))


def renormalize(model: QualityModel) -> QualityModel:
    """Scale weights so that each level sums to one.

    This is the only operation that changes weights supplied by the user; it
    is never applied implicitly.
    """
    if not model.characteristics:
        raise ValueError("empty model")
    ctotal = sum((c.weight for c in model.characteristics), Fraction(0))
    if ctotal <= 0:
        raise ValueError("characteristic weights sum to 0; nothing to scale")
    chars = []
    for c in model.characteristics:
        ftotal = sum((f.weight for f in c.features), Fraction(0))
        if ftotal <= 0:
            raise ValueError(f"feature weights of characteristic {c.id!r} sum to 0; nothing to scale")
        feats = tuple(replace(f, weight=f.weight / ftotal) for f in c.features)
        chars.append(replace(c, weight=c.weight / ctotal, features=feats))
    return QualityModel(tuple(chars))


def feature_overall_weight(model: QualityModel, feature_id: str) -> Fraction:
    c, f = model.lookup(feature_id)
    return HUNDRED * c.weight * f.weight


def max_adherence(model: QualityModel, product_count: int) -> Fraction:
    """Adherence reached when every product fully complies with every feature."""
    if isinstance(product_count, bool) or not isinstance(product_count, int) or product_count < 1:
        raise ValueError(f"product_count must be a positive integer, got {product_count!r}")
    return HUNDRED * product_count
