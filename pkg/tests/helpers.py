"""Instance builders and brute-force oracles shared by the test modules.

The oracles deliberately avoid the package's search code: they enumerate
subsets with itertools and recompute everything with plain Fractions.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from hypothesis import strategies as st

from plopt import Catalog, QualityModel, ScoreMatrix, resolve_irrelevance

RATIO_TOL = 1e-9


def make_model(char_weights, feature_weights):
    """``feature_weights[i]`` lists the feature weights of characteristic ``i + 1``."""
    return QualityModel.from_dict(
        {
            "characteristics": [
                {
                    "id": str(i + 1),
                    "weight": str(cw),
                    "features": [{"id": f"{i + 1}.{j + 1}", "weight": str(fw)} for j, fw in enumerate(fws)],
                }
                for i, (cw, fws) in enumerate(zip(char_weights, feature_weights))
            ]
        }
    )


def _partition(draw, k):
    """k positive rationals summing to exactly 1."""
    parts = draw(st.lists(st.integers(1, 40), min_size=k, max_size=k))
    total = sum(parts)
    return [Fraction(p, total) for p in parts]


@st.composite
def valid_models(draw):
    nc = draw(st.integers(1, 6))
    cws = _partition(draw, nc)
    fws = [_partition(draw, draw(st.integers(1, 6))) for _ in range(nc)]
    return make_model([str(w) for w in cws], [[str(w) for w in ws] for ws in fws])


def one_feature_model() -> QualityModel:
    return QualityModel.from_dict(
        {"characteristics": [{"id": "1", "weight": "1", "features": [{"id": "1.1", "weight": "1"}]}]}
    )


def flat_assessment(products=("p1", "p2"), value="0"):
    matrix = ScoreMatrix.from_dict(
        {"products": [{"id": p} for p in products], "scores": {"1.1": {p: value for p in products}}}
    )
    return resolve_irrelevance(one_feature_model(), matrix)


def catalog_doc(costs, gains, pairs, products=("p1", "p2")):
    """Per-product catalog with all cost in ``shared_cost`` and gain on the first product."""
    mods = []
    for i, (c, g) in enumerate(zip(costs, gains)):
        mods.append(
            {
                "id": f"m{i + 1}",
                "shared_cost": str(c),
                "gains": {"per_product": {p: (str(g) if k == 0 else "0") for k, p in enumerate(products)}},
            }
        )
    return {"modifications": mods, "conflicts": [[f"m{a + 1}", f"m{b + 1}"] for a, b in pairs]}


def random_pairs(rng: random.Random, n: int, density: float) -> list[tuple[int, int]]:
    return [(a, b) for a, b in itertools.combinations(range(n), 2) if rng.random() < density]


def random_instance(rng: random.Random, n: int, negative: bool = True, decimals: bool = True):
    """(catalog, resolved, costs, gains, pairs) with exact rational data."""

    def num(lo, hi):
        v = Fraction(rng.randint(lo, hi))
        if decimals and rng.random() < 0.5:
            v += Fraction(rng.randint(0, 9), 10)
        return v

    costs = [num(1, 60) for _ in range(n)]
    lo = -10 if negative else 0
    gains = [num(lo, 40) for _ in range(n)]
    pairs = random_pairs(rng, n, rng.choice([0.0, 0.1, 0.25, 0.5]))
    catalog = Catalog.from_dict(catalog_doc(costs, gains, pairs))
    return catalog, flat_assessment(), costs, gains, pairs


def feasible_subsets(n: int, pairs) -> list[tuple[int, ...]]:
    """All feasible index tuples (including the empty one) in lexicographic order."""
    bad = {frozenset(p) for p in pairs}
    out = []
    for k in range(n + 1):
        for combo in itertools.combinations(range(n), k):
            if not any(frozenset(q) in bad for q in itertools.combinations(combo, 2)):
                out.append(combo)
    out.sort()
    return out


def brute_count(n: int, pairs) -> int:
    return len(feasible_subsets(n, pairs)) - 1


def brute_budget(costs, gains, pairs, xi) -> tuple[int, ...]:
    """Max gain within budget; then lower cost; then lexicographically first."""
    best = None
    for s in feasible_subsets(len(costs), pairs):
        c = sum((costs[i] for i in s), Fraction(0))
        if c > xi:
            continue
        g = sum((gains[i] for i in s), Fraction(0))
        key = (-g, c, s)
        if best is None or key < best:
            best = key
    return best[2]


def brute_ratio(costs, gains, pairs, gamma, offset=Fraction(0)) -> tuple[int, ...] | None:
    """Max (offset + gain)**gamma / cost over non-empty plans, ties as documented."""
    scored = []
    for s in feasible_subsets(len(costs), pairs):
        if not s:
            continue
        g = sum((gains[i] for i in s), Fraction(0))
        c = sum((costs[i] for i in s), Fraction(0))
        q = offset + g
        if q < 0:
            continue
        scored.append((float(q) ** gamma / float(c), g, c, s))
    if not scored:
        return None
    top = max(r[0] for r in scored)
    near = [r for r in scored if r[0] >= top - RATIO_TOL]
    return min(near, key=lambda r: (-r[1], r[2], r[3]))[3]


def ids(subset) -> tuple[str, ...]:
    return tuple(f"m{i + 1}" for i in subset)


def population_sd(values) -> float:
    m = sum(values, Fraction(0)) / len(values)
    return math.sqrt(float(sum(((v - m) ** 2 for v in values), Fraction(0)) / len(values)))
