"""Brute-force reference implementations of the plug-in measures.

Everything here is written the slow, obvious way: dict-of-cells joints,
explicit grouping loops, math.log2, no vectorization, and deliberately no
imports from the measure module it cross-checks. Tests compare the fast
route against this one; the two must agree to tight tolerances but must
never share code.

A joint is a mapping from a tuple of category values (one per axis,
positional) to a nonnegative count. Axes are addressed by position.
"""

from __future__ import annotations

import math
from typing import Mapping


Cell = tuple
Joint = Mapping[Cell, float]


def _project(joint: Joint, positions: tuple[int, ...]) -> dict[Cell, float]:
    out: dict[Cell, float] = {}
    for cell, n in joint.items():
        key = tuple(cell[p] for p in positions)
        out[key] = out.get(key, 0.0) + n
    return out


def oracle_entropy(joint: Joint) -> float:
    """-sum p log2 p over the cells, skipping zero-count cells."""
    total = sum(joint.values())
    h = 0.0
    for n in joint.values():
        if n > 0:
            p = n / total
            h -= p * math.log2(p)
    return h


def oracle_conditional_entropy(
    joint: Joint, target: tuple[int, ...], given: tuple[int, ...] = ()
) -> float:
    """Double sum: H(T|G) = sum_g p(g) * [-sum_t p(t|g) log2 p(t|g)]."""
    if not given:
        return oracle_entropy(_project(joint, target))
    grouped = _project(joint, given + target)
    totals: dict[Cell, float] = {}
    for cell, n in grouped.items():
        g = cell[: len(given)]
        totals[g] = totals.get(g, 0.0) + n
    grand = sum(totals.values())
    h = 0.0
    for cell, n in grouped.items():
        if n > 0:
            g = cell[: len(given)]
            p_g = totals[g] / grand
            p_t_g = n / totals[g]
            h += p_g * (-p_t_g * math.log2(p_t_g))
    return h


def oracle_mutual_information(
    joint: Joint, a: tuple[int, ...], b: tuple[int, ...], given: tuple[int, ...] = ()
) -> float:
    """MI(a;b|given) = H(a|given) - H(a|b,given)."""
    return oracle_conditional_entropy(joint, a, given) - oracle_conditional_entropy(
        joint, a, b + given
    )


def oracle_tripartite(joint: Joint, c, e, w) -> float:
    """MI(c;e;w) = MI(c;w) - MI(c;w|e); sign carries meaning."""
    return oracle_mutual_information(joint, c, w) - oracle_mutual_information(
        joint, c, w, e
    )


def xor_joint() -> dict[Cell, float]:
    """Two fair bits and their XOR, uniform over the 4 consistent cells.

    Axes: (c, a, b) with c = a ^ b. Pairwise MI(c;a) = MI(c;b) = 0 while
    MI(c;a|b) = 1 bit, so the interaction term is exactly -1 bit. The
    canonical witness that the tripartite measure must stay signed.
    """
    cells: dict[Cell, float] = {}
    for a in (0, 1):
        for b in (0, 1):
            cells[(a ^ b, a, b)] = 1.0
    return cells


def cells_from_array(counts) -> dict[Cell, float]:
    """Flatten an n-dim count array into the dict-of-cells form."""
    out: dict[Cell, float] = {}
    shape = counts.shape

    def rec(prefix, sub):
        if len(prefix) == len(shape):
            out[prefix] = float(sub)
            return
        for i in range(shape[len(prefix)]):
            rec(prefix + (i,), sub[i])

    rec((), counts)
    return out
