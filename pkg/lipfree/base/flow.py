# The MIT License (MIT)
# Copyright © 2024 lipfree developers

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.


# Exact transport solver behind the free-space norm.
#
# Successive shortest paths on the complete graph over the support, with
# Bellman-Ford on the residual network. Everything is a Fraction; the loop
# terminates because every augmentation moves a positive multiple of 1/D of
# excess, D being the common denominator of the input masses.

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Set, Tuple

import bittensor as bt

from lipfree.base.metric import FiniteMetricSpace


PIVOT_ENV = "LIPFREE_PIVOT_RULE"
PIVOT_RULES = ("nearest", "first")

Arc = Tuple[str, str]


@dataclass(frozen=True)
class TransportPlan:
    """
    Optimal primal/dual pair for a zero-mass measure.

    Attributes:
        cost (Fraction): optimal transport cost.
        flow (tuple): (source, target, amount) triples with positive amounts, sorted.
        potential (dict): Kantorovich potential on the support; 1-Lipschitz there and
            tight (potential[p] - potential[q] = d(p, q)) on every flow arc.
    """

    cost: Fraction
    flow: Tuple[Tuple[str, str, Fraction], ...]
    potential: Dict[str, Fraction]


def pivot_rule() -> str:
    """Sink selection rule for augmentations. Changes certificates' shape, never the optimum."""
    rule = os.environ.get(PIVOT_ENV, "nearest")
    if rule not in PIVOT_RULES:
        bt.logging.warning(f"Unknown {PIVOT_ENV}={rule!r}, falling back to 'nearest'")
        return "nearest"
    return rule


def _arc(space: FiniteMetricSpace, flow: Mapping[Arc, Fraction], p: str, q: str):
    """Cheapest residual arc p -> q as (cost, capacity); capacity None means unbounded."""
    back = flow.get((q, p), 0)
    if back > 0:
        return -space.d(p, q), back
    return space.d(p, q), None


def _shortest_paths(
    space: FiniteMetricSpace,
    nodes: List[str],
    flow: Mapping[Arc, Fraction],
    sources: Set[str],
):
    dist: Dict[str, Optional[Fraction]] = {p: (Fraction(0) if p in sources else None) for p in nodes}
    pred: Dict[str, str] = {}
    for _ in range(len(nodes) + 1):
        changed = False
        for p in nodes:
            if dist[p] is None:
                continue
            for q in nodes:
                if q == p:
                    continue
                cost, _ = _arc(space, flow, p, q)
                candidate = dist[p] + cost
                if dist[q] is None or candidate < dist[q]:
                    dist[q] = candidate
                    pred[q] = p
                    changed = True
        if not changed:
            return dist, pred
    raise RuntimeError("negative cycle in the residual network")


def solve_transport(space: FiniteMetricSpace, masses: Mapping[str, Fraction]) -> TransportPlan:
    """
    Solves min sum x(p,q) d(p,q) subject to net outflow(p) = masses[p], x >= 0.

    Args:
        space (FiniteMetricSpace): the metric.
        masses (Mapping[str, Fraction]): signed masses summing to exactly zero.

    Returns:
        TransportPlan: optimal flow, its cost and a matching dual potential on the support.
    """
    nodes = sorted(p for p, m in masses.items() if m != 0)
    if sum(masses.values(), Fraction(0)) != 0:
        raise ValueError("transport needs total mass zero")
    if not nodes:
        return TransportPlan(Fraction(0), (), {})

    excess = {p: Fraction(masses[p]) for p in nodes}
    flow: Dict[Arc, Fraction] = {}
    rule = pivot_rule()
    augmentations = 0

    while True:
        sources = {p for p in nodes if excess[p] > 0}
        if not sources:
            break
        dist, pred = _shortest_paths(space, nodes, flow, sources)
        sinks = [p for p in nodes if excess[p] < 0]
        if rule == "first":
            target = sinks[0]
        else:
            target = min(sinks, key=lambda p: (dist[p], p))

        path = [target]
        while path[-1] in pred:
            path.append(pred[path[-1]])
        path.reverse()
        origin = path[0]

        amount = min(excess[origin], -excess[target])
        for p, q in zip(path, path[1:]):
            _, capacity = _arc(space, flow, p, q)
            if capacity is not None:
                amount = min(amount, capacity)

        for p, q in zip(path, path[1:]):
            back = flow.get((q, p), 0)
            if back > 0:
                if back == amount:
                    del flow[(q, p)]
                else:
                    flow[(q, p)] = back - amount
            else:
                flow[(p, q)] = flow.get((p, q), 0) + amount
        excess[origin] -= amount
        excess[target] += amount
        augmentations += 1

    # Potentials from a virtual source joined to every node at cost 0.
    dist, _ = _shortest_paths(space, nodes, flow, set(nodes))
    potential = {p: -dist[p] for p in nodes}
    cost = sum((x * space.d(p, q) for (p, q), x in flow.items()), Fraction(0))
    bt.logging.debug(
        f"Transport over {len(nodes)} support points: cost {cost} after {augmentations} augmentations"
    )
    return TransportPlan(
        cost=cost,
        flow=tuple(sorted((p, q, x) for (p, q), x in flow.items())),
        potential=potential,
    )
