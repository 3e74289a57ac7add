"""Choosing download amounts and the repair degree.

The download-allocation LP (minimize cost-weighted downloads subject to
every (n-k)-subset of helpers jointly holding a full node's worth) always
has a structured optimum: zero out the most expensive helpers and spread
l evenly over the d cheapest, for some degree d.  This module evaluates
that structure exactly, validates it against a brute-force grid oracle,
and applies it to graphs: per-node optimal repair degree under relaying,
rate thresholds that force d* = n-1, exhaustive/heuristic repair-tree
search, and a Monte-Carlo experiment on random graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import ceil, floor, log

import networkx as nx
import numpy as np

from .errors import ParameterError
from .graphs import StorageGraph, erdos_renyi
from .graphrepair import RepairTree, lambda_ip_uniform

__all__ = [
    "LpInstance",
    "DegreePlan",
    "solve_lp_structural",
    "lp_bruteforce_oracle",
    "optimal_degree_af",
    "af_cost_curve",
    "threshold_k",
    "threshold_k_general",
    "optimal_tree_search",
    "mc_random_graph_experiment",
]


@dataclass(frozen=True)
class LpInstance:
    """Download-allocation LP data; costs are relabeled nonincreasing."""

    n: int
    k: int
    l: int
    costs: tuple[int, ...]

    def __post_init__(self):
        if len(self.costs) != self.n - 1:
            raise ParameterError(f"need {self.n - 1} costs")
        if self.l < 0 or not 1 <= self.k <= self.n - 1:
            raise ParameterError("invalid LP parameters")
        object.__setattr__(self, "costs", tuple(sorted(self.costs, reverse=True)))


@dataclass(frozen=True)
class DegreePlan:
    d: int
    betas: tuple[Fraction, ...]
    objective: Fraction

    def feasible(self, l: int, k: int) -> bool:
        """Every (n-k)-subset holds >= l, via the sorted-prefix condition."""
        n = len(self.betas) + 1
        smallest = sorted(self.betas)[: n - k]
        return sum(smallest, Fraction(0)) >= l


def solve_lp_structural(inst: LpInstance) -> DegreePlan:
    """Evaluate the structured optimum for every degree and take the best."""
    best = None
    for d in range(inst.k, inst.n):
        share = Fraction(inst.l, d - inst.k + 1)
        obj = sum(inst.costs[inst.n - 1 - d :]) * share
        betas = (Fraction(0),) * (inst.n - 1 - d) + (share,) * d
        if best is None or obj < best.objective:
            best = DegreePlan(d, betas, obj)
    assert best.feasible(inst.l, inst.k)
    return best


def lp_bruteforce_oracle(inst: LpInstance, grid_denominator: int) -> Fraction:
    """Exhaustive minimum over the grid {0, l/Q, ..., l} with the full
    subset-constraint family; independent of the structural argument."""
    if inst.n > 6:
        raise ParameterError("brute-force oracle is limited to n <= 6")
    if inst.l == 0:
        return Fraction(0)
    Q = grid_denominator
    m = inst.n - 1
    subsets = list(combinations(range(m), inst.n - inst.k))
    best = None
    for grid in product(range(Q + 1), repeat=m):
        if any(sum(grid[i] for i in sub) < Q for sub in subsets):
            continue
        cost = sum(c * g for c, g in zip(inst.costs, grid))
        if best is None or cost < best:
            best = cost
    if best is None:
        raise ParameterError("no feasible grid point")
    return Fraction(best * inst.l, Q)


# ---------------------------------------------------------------------------
# Optimal repair degree on graphs (relay-only)
# ---------------------------------------------------------------------------


def af_cost_curve(graph: StorageGraph, f: int, k: int, l: int = 1) -> dict[int, Fraction]:
    """Relay bandwidth for every degree, filling helpers nearest first."""
    layers = graph.layers_from(f)
    reach = sum(len(x) for x in layers)
    if reach != graph.n - 1:
        raise ParameterError("graph must be connected")
    curve = {}
    for d in range(k, graph.n):
        remaining = d
        hops = 0
        for i, layer in enumerate(layers, start=1):
            take = min(remaining, len(layer))
            hops += i * take
            remaining -= take
            if remaining == 0:
                break
        curve[d] = Fraction(hops * l, d - k + 1)
    return curve


def optimal_degree_af(graph: StorageGraph, f: int, k: int, l: int = 1):
    """Degree minimizing relay bandwidth; ties go to the smallest degree.

    Returns (d_star, bandwidth, helper list in nearest-first order).
    """
    curve = af_cost_curve(graph, f, k, l)
    d_star = min(curve, key=lambda d: (curve[d], d))
    order = []
    for layer in graph.layers_from(f):
        order.extend(sorted(layer))
    return d_star, curve[d_star], order[:d_star]


def threshold_k(t: int, m: int) -> tuple[Fraction, int]:
    """Rate threshold forcing d* = n-1 on a t-regular graph of eccentricity m.

    Returns the exact threshold and the least k guaranteed above it
    (equality is enough for nonincrease, so the ceiling is used).
    """
    if t < 2 or m < 1:
        raise ParameterError("need t >= 2 and m >= 1")
    best = Fraction(0)
    for a in range(1, m + 1):
        val = sum(
            Fraction(t * (t - 1) ** (i - 1)) * (1 - Fraction(i, a)) for i in range(1, a)
        )
        best = max(best, val)
    threshold = 1 + best
    return threshold, ceil(threshold)


def threshold_k_general(graph: StorageGraph, f: int) -> tuple[Fraction, int]:
    """Per-node version using the actual sphere sizes around f."""
    layers = graph.layers_from(f)
    m = len(layers)
    best = None
    cum = 0
    weighted = 0
    for a in range(1, m + 1):
        c_a = cum + 1
        val = Fraction(c_a) - (Fraction(weighted, a) if a > 1 else Fraction(0))
        best = val if best is None else max(best, val)
        cum += len(layers[a - 1])
        weighted += a * len(layers[a - 1])
    return best, ceil(best)


# ---------------------------------------------------------------------------
# Repair-tree search (processing repair)
# ---------------------------------------------------------------------------


def _subtree_ip_total(tree: RepairTree, k: int, l: int) -> Fraction:
    return lambda_ip_uniform(tree, l, tree.d, k).total


def optimal_tree_search(graph: StorageGraph, f: int, k: int, l: int, mode: str = "heuristic"):
    """Minimum processing-repair bandwidth over trees and helper sets.

    Heuristic mode prunes over the BFS tree with nearest-first helpers;
    exhaustive mode (n <= 9) enumerates every spanning tree and every
    connected helper subset, lower-bounding the heuristic.
    Returns (best total, helper tuple, tree edge list).
    """
    if mode not in ("heuristic", "exhaustive"):
        raise ParameterError("mode must be heuristic or exhaustive")
    best = None
    if mode == "heuristic":
        order = []
        for layer in graph.layers_from(f):
            order.extend(sorted(layer))
        for d in range(k, graph.n):
            helpers = order[:d]
            tree = RepairTree(graph, f, helpers)
            total = _subtree_ip_total(tree, k, l)
            cand = (total, tuple(helpers), [(v, tree.parent[v]) for v in tree.helpers])
            if best is None or cand[0] < best[0]:
                best = cand
        return best
    if graph.n > 9:
        raise ParameterError("exhaustive search is limited to n <= 9")
    G = nx.Graph()
    G.add_nodes_from(range(graph.n))
    G.add_edges_from(graph.edges)
    others = [v for v in range(graph.n) if v != f]
    for T in nx.SpanningTreeIterator(G):
        adj = {v: sorted(T.adj[v]) for v in T.nodes}
        for size in range(k, graph.n):
            for D in combinations(others, size):
                sub = set(D) | {f}
                edges = [(u, v) for u, v in T.edges if u in sub and v in sub]
                if len(edges) != size:
                    continue  # not connected within T
                subgraph = StorageGraph(graph.n, edges)
                tree = RepairTree(subgraph, f, D)
                total = _subtree_ip_total(tree, k, l)
                cand = (total, tuple(D), edges)
                if best is None or cand[0] < best[0]:
                    best = cand
    return best


# ---------------------------------------------------------------------------
# Random-graph experiment
# ---------------------------------------------------------------------------


def default_p_rule(n: int) -> float:
    return min(1.0, 3 * log(n) / n)


def mc_random_graph_experiment(
    n_list,
    trials: int,
    seed: int,
    p_rule=default_p_rule,
    k_fraction: float = 0.5,
):
    """Empirical frequency of d* = n-1 on connected G(n, p) samples.

    Deterministic given the seed; disconnected samples are resampled and
    counted.  Trials use independent derived seeds, so any execution
    order yields identical results.
    """
    results = {}
    for n in n_list:
        p = p_rule(n)
        k = max(1, floor(k_fraction * n))
        hits = 0
        resamples = 0
        for trial in range(trials):
            attempt = 0
            while True:
                g = erdos_renyi(n, p, [seed, n, trial, attempt])
                if g.is_connected():
                    break
                attempt += 1
                resamples += 1
            d_star, _, _ = optimal_degree_af(g, 0, k)
            if d_star == n - 1:
                hits += 1
        results[n] = {
            "p": p,
            "k": k,
            "trials": trials,
            "hits": hits,
            "frequency": hits / trials,
            "resamples": resamples,
        }
    return results
