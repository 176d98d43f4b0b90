"""Quality-gap statistics and flags over a resolved assessment.

For each feature the mean weighted score across products and its standard
deviation are computed; the gap is how far the mean falls short of the
feature weight. A feature whose gap exceeds the cross-feature mean gap by
more than one standard deviation is a product-line risk; a single cell that
falls more than one standard deviation below its feature mean is a
product-specific gap.

Means and gaps are exact. Standard deviations are floats and every flag is a
strict comparison of an exact difference against a float deviation, with no
tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from plopt.assessment import ResolvedAssessment
from plopt.numbers import format_number, to_fraction
from plopt.quality_model import UnknownIdError

STDDEV_FORMS = ("population", "sample")


def _stddev(values: Sequence[Fraction], form: str) -> float:
    if form not in STDDEV_FORMS:
        raise ValueError(f"stddev form must be one of {STDDEV_FORMS}, got {form!r}")
    n = len(values)
    if n == 0:
        raise ValueError("standard deviation of no values")
    if form == "sample" and n < 2:
        raise ValueError("sample standard deviation needs at least two values")
    mean = sum(values, Fraction(0)) / n
    ss = sum(((v - mean) ** 2 for v in values), Fraction(0))
    return math.sqrt(ss / (n if form == "population" else n - 1))


def _scores(resolved: ResolvedAssessment, feature_id: str) -> list[Fraction]:
    if feature_id not in resolved.feature_ids:
        raise UnknownIdError(f"unknown feature id {feature_id!r}")
    if not resolved.products:
        raise ValueError("feature statistics need at least one product")
    return [resolved.score(feature_id, p) for p in resolved.product_ids]


def feature_stats(
    resolved: ResolvedAssessment, feature_id: str, stddev: str = "population"
) -> tuple[Fraction, float]:
    """Mean weighted score of a feature across products, and its deviation."""
    s = _scores(resolved, feature_id)
    return sum(s, Fraction(0)) / len(s), _stddev(s, stddev)


def feature_gap(resolved: ResolvedAssessment, feature_id: str) -> Fraction:
    """Feature weight minus the mean weighted score.

    Under REDISTRIBUTE the weight differs per product, so the per-product
    shortfalls are averaged instead; without redistribution this is the same
    number.
    """
    s = _scores(resolved, feature_id)
    w = [resolved.weights[(feature_id, p)] for p in resolved.product_ids]
    return (sum(w, Fraction(0)) - sum(s, Fraction(0))) / len(s)


def _gap_threshold(gaps: dict[str, Fraction], stddev: str) -> tuple[Fraction, float]:
    values = list(gaps.values())
    return sum(values, Fraction(0)) / len(values), _stddev(values, stddev)


def high_impact_features(resolved: ResolvedAssessment, stddev: str = "population") -> set[str]:
    gaps = {f: feature_gap(resolved, f) for f in resolved.feature_ids}
    if not gaps:
        return set()
    mean, sd = _gap_threshold(gaps, stddev)
    return {f for f, d in gaps.items() if d - mean > sd}


def product_major_gaps(resolved: ResolvedAssessment, stddev: str = "population") -> set[tuple[str, str]]:
    flagged = set()
    for f in resolved.feature_ids:
        mean, sd = feature_stats(resolved, f, stddev)
        for p in resolved.product_ids:
            if resolved.score(f, p) - mean < -sd:
                flagged.add((f, p))
    return flagged


def product_strengths(resolved: ResolvedAssessment, stddev: str = "population") -> set[tuple[str, str]]:
    """Cells more than one deviation above their feature mean (the "high" marks)."""
    flagged = set()
    for f in resolved.feature_ids:
        mean, sd = feature_stats(resolved, f, stddev)
        for p in resolved.product_ids:
            if resolved.score(f, p) - mean > sd:
                flagged.add((f, p))
    return flagged


@dataclass(frozen=True)
class FeatureGap:
    id: str
    weight: Fraction
    mean: Fraction
    stddev: float
    gap: Fraction


@dataclass(frozen=True)
class GapReport:
    features: tuple[FeatureGap, ...]
    product_ids: tuple[str, ...]
    gap_mean: Fraction
    gap_stddev: float
    high_impact_features: frozenset[str]
    product_major_gaps: frozenset[tuple[str, str]]
    product_strengths: frozenset[tuple[str, str]]
    stddev_form: str = "population"

    @property
    def high_impact_threshold(self) -> float:
        return float(self.gap_mean) + self.gap_stddev

    def annotation(self, feature_id: str, product_id: str) -> str:
        cell = (feature_id, product_id)
        if cell in self.product_major_gaps:
            return "low"
        if cell in self.product_strengths:
            return "high"
        return ""

    def to_dict(self) -> dict:
        order = {f.id: i for i, f in enumerate(self.features)}
        porder = {p: i for i, p in enumerate(self.product_ids)}

        def cells(items: Iterable[tuple[str, str]]) -> list[list[str]]:
            return [list(c) for c in sorted(items, key=lambda c: (order[c[0]], porder[c[1]]))]

        return {
            "stddev_form": self.stddev_form,
            "products": list(self.product_ids),
            "thresholds": {
                "gap_mean": format_number(self.gap_mean),
                "gap_stddev": self.gap_stddev,
                "high_impact": self.high_impact_threshold,
            },
            "features": [
                {
                    "id": f.id,
                    "weight": format_number(f.weight),
                    "mean": format_number(f.mean),
                    "stddev": f.stddev,
                    "gap": format_number(f.gap),
                    "high_impact": f.id in self.high_impact_features,
                }
                for f in self.features
            ],
            "high_impact_features": [f.id for f in self.features if f.id in self.high_impact_features],
            "product_major_gaps": cells(self.product_major_gaps),
            "product_strengths": cells(self.product_strengths),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "GapReport":
        th = doc["thresholds"]
        return cls(
            features=tuple(
                FeatureGap(
                    f["id"],
                    to_fraction(f["weight"]),
                    to_fraction(f["mean"]),
                    float(f["stddev"]),
                    to_fraction(f["gap"]),
                )
                for f in doc["features"]
            ),
            product_ids=tuple(doc["products"]),
            gap_mean=to_fraction(th["gap_mean"]),
            gap_stddev=float(th["gap_stddev"]),
            high_impact_features=frozenset(doc["high_impact_features"]),
            product_major_gaps=frozenset(tuple(c) for c in doc["product_major_gaps"]),
            product_strengths=frozenset(tuple(c) for c in doc["product_strengths"]),
            stddev_form=doc["stddev_form"],
        )


def build_gap_report(resolved: ResolvedAssessment, stddev: str = "population") -> GapReport:
    rows = []
    for f in resolved.feature_ids:
        mean, sd = feature_stats(resolved, f, stddev)
        w = sum((resolved.weights[(f, p)] for p in resolved.product_ids), Fraction(0)) / len(resolved.products)
        rows.append(FeatureGap(f, w, mean, sd, feature_gap(resolved, f)))
    gaps = {r.id: r.gap for r in rows}
    gap_mean, gap_sd = _gap_threshold(gaps, stddev) if gaps else (Fraction(0), 0.0)
    return GapReport(
        features=tuple(rows),
        product_ids=tuple(resolved.product_ids),
        gap_mean=gap_mean,
        gap_stddev=gap_sd,
        high_impact_features=frozenset(high_impact_features(resolved, stddev)),
        product_major_gaps=frozenset(product_major_gaps(resolved, stddev)),
        product_strengths=frozenset(product_strengths(resolved, stddev)),
        stddev_form=stddev,
    )
