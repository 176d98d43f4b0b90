import itertools
import random
from fractions import Fraction

import pytest

from plopt import (
    Budget,
    Catalog,
    Ratio,
    apply,
    enumerate_feasible,
    is_feasible,
    optimize,
    optimize_budget,
    optimize_ratio,
    pareto_export,
    subset_cost,
)
from plopt import _kernels
from plopt.optimizer import EnumerationLimitError, NoCandidateError, check_plan, pareto_csv

from helpers import brute_budget, brute_ratio, catalog_doc, flat_assessment, ids, random_instance, random_pairs

BACKENDS = [m.NAME for m in _kernels.available()]


# -- case study -----------------------------------------------------------------

def test_budget_optimum(catalog, resolved):
    plan = optimize_budget(catalog, resolved, "250")
    assert plan.subset == ("m3", "m5", "m6", "m8", "m10")
    assert plan.total_gain == Fraction("102.5") and plan.total_cost == 233
    assert plan.adherence_before == Fraction("262.4") and plan.adherence_after == Fraction("364.9")
    assert check_plan(plan, catalog, resolved, Budget("250")) == []


def test_ratio_optimum(catalog, resolved):
    plan = optimize_ratio(catalog, resolved, 1.6)
    assert plan.subset == ("m2", "m6", "m8", "m10")
    assert plan.total_gain == Fraction("69.3") and plan.total_cost == 109
    assert plan.objective_value == pytest.approx(float(Fraction("69.3")) ** 1.6 / 109)


def test_ratio_with_adherence_term_prefers_cheapest_plan(catalog, resolved):
    # with the baseline inside the quality term, cost dominates
    plan = optimize_ratio(catalog, resolved, 1.6, quality="adherence")
    assert plan.subset == ("m10",)


def test_zero_budget_gives_empty_plan(catalog, resolved):
    plan = optimize_budget(catalog, resolved, 0)
    assert plan.subset == () and plan.total_gain == 0


def test_gain_never_decreases_with_budget(catalog, resolved):
    gains = [optimize_budget(catalog, resolved, xi).total_gain for xi in range(0, 700, 10)]
    assert gains == sorted(gains)
    assert gains[-1] == max(p.total_gain for p in enumerate_feasible(catalog, resolved))


@pytest.mark.parametrize("threads", [1, 2, 4])
def test_thread_count_does_not_change_results(catalog, resolved, threads):
    assert optimize_budget(catalog, resolved, 250, threads=threads).subset == ("m3", "m5", "m6", "m8", "m10")
    assert optimize_ratio(catalog, resolved, 1.6, threads=threads).subset == ("m2", "m6", "m8", "m10")


def test_enumeration_order_and_size(catalog, resolved):
    plans = enumerate_feasible(catalog, resolved)
    assert len(plans) == 359
    gains = [p.total_gain for p in plans]
    assert gains == sorted(gains, reverse=True)
    assert all(is_feasible(catalog, p.subset) for p in plans)


def test_pareto_ranks(catalog, resolved):
    rows = pareto_export(catalog, resolved, Budget(250))
    assert len(rows) == 359
    by_subset = {r.subset: r for r in rows}
    assert by_subset[("m3", "m5", "m6", "m8", "m10")].rank == 351
    assert by_subset[("m2", "m6", "m8", "m10")].rank == 201
    assert max(r.adherence for r in rows if r.cost <= 250) == Fraction("364.9")
    assert sorted(r.rank for r in rows) == list(range(1, 360))


def test_pareto_csv_layout(catalog, resolved):
    text = pareto_csv(pareto_export(catalog, resolved, Ratio(1.6)))
    lines = text.splitlines()
    assert lines[0] == "rank,subset,gain,cost,adherence,objective"
    assert len(lines) == 360
    row = next(line for line in lines if line.startswith("351,"))
    assert row.split(",")[1:5] == ["m3+m5+m6+m8+m10", "102.5", "233", "364.9"]


def test_pareto_small_catalog():
    cat = Catalog.from_dict(catalog_doc([1, 2, 3], [1, 2, 3], []))
    assert len(pareto_export(cat, flat_assessment())) == 7
    assert len(enumerate_feasible(Catalog.from_dict(catalog_doc([1, 2], [1, 1], [])), flat_assessment())) == 3


def test_enumeration_limit():
    cat = Catalog.from_dict(catalog_doc([1] * 6, [1] * 6, []))
    with pytest.raises(EnumerationLimitError):
        enumerate_feasible(cat, flat_assessment(), limit=5)


# -- small cases ----------------------------------------------------------------

def test_single_modification_ratio():
    cat = Catalog.from_dict(catalog_doc([7], [3], []))
    assert optimize_ratio(cat, flat_assessment(), 2.0).subset == ("m1",)


def test_ratio_without_candidates():
    cat = Catalog.from_dict(catalog_doc([7, 3], ["-1", "-2"], []))
    with pytest.raises(NoCandidateError):
        optimize_ratio(cat, flat_assessment(), 1.0)
    with pytest.raises(NoCandidateError):
        optimize_ratio(Catalog(()), flat_assessment(), 1.0)


def test_negative_gains_are_skipped_by_budget_mode():
    cat = Catalog.from_dict(catalog_doc([1, 1], ["-2", "3"], []))
    assert optimize_budget(cat, flat_assessment(), 10).subset == ("m2",)


def test_exact_tie_prefers_lower_cost_then_lex():
    cat = Catalog.from_dict(catalog_doc([5, 4, 4], [3, 3, 3], [(0, 1), (1, 2), (0, 2)]))
    assert optimize_budget(cat, flat_assessment(), 10).subset == ("m2",)
    assert optimize_ratio(cat, flat_assessment(), 1.0).subset == ("m2",)


def test_objective_validation():
    with pytest.raises(ValueError):
        Budget("-1")
    with pytest.raises(ValueError):
        Ratio(0)
    with pytest.raises(ValueError):
        Ratio(1.0, "nonsense")


# -- tabulated four-modification example ------------------------------------------
# Each subset carries its own quality and cost (neither is additive here), so the
# objectives are evaluated directly over the table.

TABLE = {
    "1": (".2", "2.2"), "2": (".3", "2.6"), "3": (".4", "3.3"), "12": (".45", "4.0"),
    "4": (".5", "4.4"), "13": (".52", "4.6"), "14": (".6", "6.1"), "23": (".62", "5.5"),
    "123": (".7", "7.2"), "24": (".71", "6.6"), "124": (".78", "8.4"), "34": (".79", "7.0"),
    "134": (".84", "8.8"), "234": (".93", "9.2"), "1234": ("1.0", "10.0"),
}


def _table_pick(objective):
    rows = [(k, Fraction(q), Fraction(c)) for k, (q, c) in TABLE.items()]
    if isinstance(objective, Budget):
        return max((r for r in rows if r[2] <= objective.xi), key=lambda r: (r[1], -r[2]))[0]
    return max(rows, key=lambda r: objective.value(r[1], r[2]))[0]


@pytest.mark.parametrize(
    "objective, expected",
    [
        (Budget(8), "34"),
        (Budget(6), "23"),
        (Ratio(0.7), "2"),
        (Ratio(1.0), "3"),
        (Ratio(1.2), "34"),
        (Ratio(1.6), "1234"),
    ],
)
def test_tabulated_example(objective, expected):
    assert _table_pick(objective) == expected


# -- oracle equivalence -------------------------------------------------------------

@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("seed", range(60))
def test_budget_matches_brute_force(seed, backend):
    rng = random.Random(seed)
    cat, resolved, costs, gains, pairs = random_instance(rng, rng.randint(1, 12))
    xi = Fraction(rng.randint(0, int(sum(costs)) + 5))
    plan = optimize_budget(cat, resolved, xi, threads=1, backend=backend)
    assert plan.subset == ids(brute_budget(costs, gains, pairs, xi))


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("seed", range(60))
def test_ratio_matches_brute_force(seed, backend):
    rng = random.Random(1000 + seed)
    cat, resolved, costs, gains, pairs = random_instance(rng, rng.randint(1, 12))
    gamma = rng.choice([0.5, 1.0, 1.6, 2.5, rng.uniform(0.1, 3)])
    expected = brute_ratio(costs, gains, pairs, gamma)
    if expected is None:
        with pytest.raises(NoCandidateError):
            optimize_ratio(cat, resolved, gamma, threads=1, backend=backend)
    else:
        assert optimize_ratio(cat, resolved, gamma, threads=1, backend=backend).subset == ids(expected)


@pytest.mark.parametrize("seed", range(25))
def test_parallel_equals_serial(seed):
    rng = random.Random(2000 + seed)
    cat, resolved, costs, *_ = random_instance(rng, rng.randint(2, 14))
    xi = Fraction(rng.randint(0, int(sum(costs))))
    assert optimize_budget(cat, resolved, xi, threads=1) == optimize_budget(cat, resolved, xi, threads=3)
    assert optimize_ratio(cat, resolved, 1.3, threads=1) == optimize_ratio(cat, resolved, 1.3, threads=3)


@pytest.mark.parametrize("seed", range(15))
def test_gamma_sweep_never_trades_down(seed):
    rng = random.Random(3000 + seed)
    cat, resolved, *_ = random_instance(rng, 4, negative=False)
    picks = []
    for gamma in [0.25 * k for k in range(1, 17)]:
        try:
            picks.append(optimize_ratio(cat, resolved, gamma, threads=1))
        except NoCandidateError:
            return
    for a, b in zip(picks, picks[1:]):
        assert b.total_gain >= a.total_gain
        assert not (b.total_cost < a.total_cost and b.total_gain < a.total_gain)


# -- per-feature gains ------------------------------------------------------------------

def per_feature_instance(rng, n):
    products = ("p1", "p2")
    resolved = flat_assessment(products, str(Fraction(rng.randint(0, 10), 10)))
    mods = []
    for k in range(n):
        deltas = {p: str(Fraction(rng.randint(-5, 8), 10)) for p in products if rng.random() < 0.8}
        mods.append({"id": f"m{k + 1}", "shared_cost": str(rng.randint(1, 30)), "gains": {"per_feature": {"1.1": deltas}}})
    pairs = random_pairs(rng, n, 0.2)
    doc = {"modifications": mods, "conflicts": [[f"m{a + 1}", f"m{b + 1}"] for a, b in pairs]}
    return Catalog.from_dict(doc), resolved


@pytest.mark.parametrize("seed", range(25))
def test_per_feature_modes_match_brute_force(seed):
    rng = random.Random(4000 + seed)
    cat, resolved = per_feature_instance(rng, rng.randint(1, 8))
    rows = []
    for k in range(len(cat) + 1):
        for combo in itertools.combinations(range(len(cat)), k):
            sub = [cat.ids[i] for i in combo]
            if is_feasible(cat, sub):
                rows.append((combo, apply(cat, sub, resolved).gain, subset_cost(cat, sub)))
    xi = Fraction(rng.randint(0, 60))
    best = min((r for r in rows if r[2] <= xi), key=lambda r: (-r[1], r[2], r[0]))
    assert optimize_budget(cat, resolved, xi).subset == ids(best[0])

    gamma = rng.choice([0.8, 1.0, 1.6])
    scored = [(float(g) ** gamma / float(c), g, c, s) for s, g, c in rows if s and g >= 0]
    if not scored:
        with pytest.raises(NoCandidateError):
            optimize_ratio(cat, resolved, gamma)
        return
    top = max(r[0] for r in scored)
    pick = min((r for r in scored if r[0] >= top - 1e-9), key=lambda r: (-r[1], r[2], r[3]))
    assert optimize_ratio(cat, resolved, gamma).subset == ids(pick[3])


def test_optimize_dispatch(catalog, resolved):
    assert optimize(catalog, resolved, Budget(250)).total_cost == 233
    assert optimize(catalog, resolved, Ratio(1.6)).total_cost == 109
