"""Pure-Python search kernels.

Subsets are bitmasks over modification indices. Gains and costs arrive as
integers (already scaled by a common denominator), so every comparison in
the budget search is exact.

All searches walk the subset tree in preorder: a node is a set, its children
add one index larger than the node's largest. That preorder is the
lexicographic order of the sorted index lists, so among exact ties the first
incumbent found is also the lexicographically smallest subset.
"""

from __future__ import annotations

import math
from typing import Sequence

NAME = "python"


def count_independent(adj: Sequence[int]) -> int:
    """Number of independent sets (the empty set included)."""
    memo: dict[int, int] = {}

    def count(s: int) -> int:
        if s == 0:
            return 1
        hit = memo.get(s)
        if hit is not None:
            return hit
        low = s & -s
        v = low.bit_length() - 1
        rest = s & ~low
        if adj[v] & rest:
            r = count(rest) + count(rest & ~adj[v])
        else:
            r = 2 * count(rest)
        memo[s] = r
        return r

    return count((1 << len(adj)) - 1)


def enumerate_independent(
    adj: Sequence[int], gains: Sequence[int], costs: Sequence[int]
) -> tuple[list[int], list[int], list[int]]:
    """Every independent set in lexicographic order, with gain and cost sums."""
    n = len(adj)
    masks: list[int] = []
    gsum: list[int] = []
    csum: list[int] = []
    stack = [(0, -1, 0, 0, 0)]
    while stack:
        mask, last, forb, g, c = stack.pop()
        masks.append(mask)
        gsum.append(g)
        csum.append(c)
        for j in range(n - 1, last, -1):
            if not (forb >> j) & 1:
                stack.append((mask | (1 << j), j, forb | adj[j], g + gains[j], c + costs[j]))
    return masks, gsum, csum


def budget_search(
    adj: Sequence[int],
    gains: Sequence[int],
    costs: Sequence[int],
    budget: int,
    first: int = -1,
) -> tuple[bool, int, int, int]:
    """Best subset with cost within budget: max gain, then min cost, then lex.

    ``first=-1`` searches the whole tree (the empty set is always feasible);
    ``first=j`` searches only the subtree of sets whose smallest index is j.
    Returns ``(found, mask, gain, cost)``.
    """
    n = len(adj)
    best = [False, 0, 0, 0]

    def visit(mask: int, last: int, forb: int, g: int, c: int) -> None:
        if not best[0] or g > best[2] or (g == best[2] and c < best[3]):
            best[:] = [True, mask, g, c]
        children = [j for j in range(last + 1, n) if not (forb >> j) & 1 and c + costs[j] <= budget]
        rem = sum(gains[j] for j in children if gains[j] > 0)
        if g + rem < best[2] or (g + rem == best[2] and c >= best[3]):
            return
        for j in children:
            visit(mask | (1 << j), j, forb | adj[j], g + gains[j], c + costs[j])

    if first < 0:
        visit(0, -1, 0, 0, 0)
    elif costs[first] <= budget:
        visit(1 << first, first, adj[first], gains[first], costs[first])
    return best[0], best[1], best[2], best[3]


def ratio_search(
    adj: Sequence[int],
    gains: Sequence[int],
    costs: Sequence[int],
    gain_scale: int,
    cost_scale: int,
    offset: float,
    gamma: float,
    tol: float,
    first: int = -1,
) -> list[tuple[int, float, int, int]]:
    """Near-optimal candidates for ``(offset + gain)**gamma / cost``.

    Only non-empty sets with ``offset + gain >= 0`` qualify. Returns every
    candidate whose objective came within ``tol`` of the incumbent when it was
    visited, in lexicographic order; the caller keeps those within ``tol`` of
    the final best. Costs must be positive.
    """
    n = len(adj)
    gs = float(gain_scale)
    cs = float(cost_scale)
    out: list[tuple[int, float, int, int]] = []
    best = [-math.inf]

    def visit(mask: int, last: int, forb: int, g: int, c: int) -> None:
        if mask:
            q = offset + float(g) / gs
            if q >= 0:
                obj = q**gamma / (float(c) / cs)
                if obj >= best[0] - tol:
                    out.append((mask, obj, g, c))
                    if obj > best[0]:
                        best[0] = obj
        children = [j for j in range(last + 1, n) if not (forb >> j) & 1]
        if not children:
            return
        rem = sum(gains[j] for j in children if gains[j] > 0)
        qub = offset + float(g + rem) / gs
        if qub < 0:
            return
        denom = float(c) / cs if mask else float(min(costs[j] for j in children)) / cs
        if qub**gamma / denom < best[0] - tol:
            return
        for j in children:
            visit(mask | (1 << j), j, forb | adj[j], g + gains[j], c + costs[j])

    if first < 0:
        visit(0, -1, 0, 0, 0)
    else:
        visit(1 << first, first, adj[first], gains[first], costs[first])
    return out
