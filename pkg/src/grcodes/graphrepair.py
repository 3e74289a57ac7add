"""Repair trees, bandwidth accounting, and symbol-level repair over graphs.

A repair tree is the BFS tree of the failed node over the subgraph induced
by the helpers.  Bandwidth formulas come in four flavors (accumulate-and-
forward vs intermediate processing, uniform vs per-layer downloads); each
has an exact per-edge attribution, kept in rational arithmetic so that
non-integer per-helper averages still account exactly.

The processing set of a tree is ancestor-closed: a node compresses its
subtree's repair data into l symbols when the subtree holds at least
d-k+1 helpers besides itself.  Per-layer download plans keep the same
processing set; their feasibility identity pins the d-k+1 smallest
downloads to sum to l.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .codes import GpmCode, PmCode
from .errors import ParameterError, RepairError
from .graphs import StorageGraph
from .stacking import StackedCode

__all__ = [
    "RepairTree",
    "BandwidthReport",
    "NonuniformPlan",
    "lambda_af_uniform",
    "lambda_ip_uniform",
    "lambda_af_nonuniform",
    "lambda_ip_nonuniform",
    "nonuniform_savings",
    "simulate_repair",
    "nearest_first_tau",
]


class RepairTree:
    """BFS tree over {f} + D rooted at the failed node, index tie-breaking."""

    def __init__(self, graph: StorageGraph, f: int, helpers):
        helpers = sorted(set(helpers))
        if f in helpers:
            raise ParameterError("failed node cannot be a helper")
        self.graph = graph
        self.f = f
        self.helpers = tuple(helpers)
        dist, parent = graph.bfs(f, allowed=helpers)
        unreachable = [h for h in helpers if dist[h] < 0]
        if unreachable:
            raise ParameterError(f"helpers {unreachable} unreachable from {f} in the induced subgraph")
        self.depth = {v: dist[v] for v in helpers}
        self.parent = {v: parent[v] for v in helpers}
        self.t = max(self.depth.values())
        self.layers = [
            [v for v in helpers if self.depth[v] == i] for i in range(1, self.t + 1)
        ]
        self.children: dict[int, list[int]] = {v: [] for v in helpers}
        self.children[f] = []
        for v in helpers:
            self.children[self.parent[v]].append(v)
        self.sigma = {v: 0 for v in helpers}
        for v in sorted(helpers, key=lambda v: -self.depth[v]):
            p = self.parent[v]
            if p != f:
                self.sigma[p] += self.sigma[v] + 1

    @property
    def d(self) -> int:
        return len(self.helpers)

    @property
    def layer_sizes(self) -> list[int]:
        return [len(layer) for layer in self.layers]

    def layer_of(self, v: int) -> int:
        return self.depth[v]

    def ip_set(self, dk1: int) -> set[int]:
        """Nodes whose descendants number at least d-k+1 (they compress)."""
        return {v for v in self.helpers if self.sigma[v] >= dk1}

    def direct_children_set(self, dk1: int) -> set[int]:
        """Literal direct-children threshold; narrower than ip_set on deep trees."""
        return {v for v in self.helpers if len(self.children[v]) >= dk1}

    def nearest_processing_ancestor(self, v: int, proc: set[int]) -> int:
        """Closest strict ancestor inside ``proc``; the root if none."""
        p = self.parent[v]
        while p != self.f:
            if p in proc:
                return p
            p = self.parent[p]
        return self.f

    def hop_to(self, v: int, anc: int) -> int:
        return self.depth[v] - (0 if anc == self.f else self.depth[anc])


@dataclass
class BandwidthReport:
    scheme: str
    total: Fraction
    per_edge: dict[tuple[int, int], Fraction]
    per_helper: dict[int, Fraction]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        assert self.total == sum(self.per_edge.values(), Fraction(0))

    def total_int(self) -> int:
        if self.total.denominator != 1:
            raise ParameterError(f"total {self.total} is not integral")
        return int(self.total)


def _edge(tree: RepairTree, v: int) -> tuple[int, int]:
    return (v, tree.parent[v])


def uniform_beta(l: int, d: int, k: int) -> Fraction:
    return Fraction(l, d - k + 1)


def lambda_af_uniform(tree: RepairTree, l: int, d: int, k: int) -> BandwidthReport:
    """Relay-only repair: every helper's share travels its full depth."""
    if tree.d != d:
        raise ParameterError(f"tree has {tree.d} helpers, expected d={d}")
    beta = uniform_beta(l, d, k)
    per_edge = {_edge(tree, v): (tree.sigma[v] + 1) * beta for v in tree.helpers}
    total = sum((tree.depth[v] * beta for v in tree.helpers), Fraction(0))
    return BandwidthReport(
        "af-u", total, per_edge, {v: beta for v in tree.helpers}, {"beta": beta}
    )


def lambda_ip_uniform(tree: RepairTree, l: int, d: int, k: int) -> BandwidthReport:
    """Processing repair: an edge carries at most l = (d-k+1) * beta symbols."""
    if tree.d != d:
        raise ParameterError(f"tree has {tree.d} helpers, expected d={d}")
    dk1 = d - k + 1
    beta = uniform_beta(l, d, k)
    per_edge = {
        _edge(tree, v): min(tree.sigma[v] + 1, dk1) * beta for v in tree.helpers
    }
    total = sum(per_edge.values(), Fraction(0))
    return BandwidthReport(
        "ip-u", total, per_edge, {v: beta for v in tree.helpers}, {"beta": beta}
    )


class NonuniformPlan:
    """Per-layer download amounts with the exact feasibility identity.

    Layer i of the tree contributes beta_i from each of its d_i helpers,
    with beta_1 >= ... >= beta_t; the d-k+1 smallest downloads must still
    sum to the node size l.
    """

    def __init__(self, tree: RepairTree, l: int, d: int, k: int, layer_betas):
        if tree.d != d:
            raise ParameterError(f"tree has {tree.d} helpers, expected d={d}")
        self.tree, self.l, self.d, self.k = tree, l, d, k
        self.layer_betas = [Fraction(b) for b in layer_betas]
        if len(self.layer_betas) != tree.t:
            raise ParameterError(f"need one beta per layer ({tree.t})")
        if any(b < 0 for b in self.layer_betas):
            raise ParameterError("downloads must be nonnegative")
        if any(
            self.layer_betas[i] < self.layer_betas[i + 1] for i in range(tree.t - 1)
        ):
            raise ParameterError("layer downloads must be nonincreasing with depth")
        self.beta = uniform_beta(l, d, k)
        self.deltas = [self.beta - b for b in self.layer_betas]
        sizes = tree.layer_sizes
        dk1 = d - k + 1
        acc = 0
        self.t_prime = None
        for s in range(tree.t, 0, -1):
            acc += sizes[s - 1]
            if acc >= dk1:
                self.t_prime = s
                break
        if self.t_prime is None:
            raise ParameterError("tree too shallow for the threshold layer")
        tail = sum(sizes[i - 1] for i in range(self.t_prime + 1, tree.t + 1))
        lhs = sum(
            sizes[i - 1] * self.deltas[i - 1] for i in range(self.t_prime + 1, tree.t + 1)
        ) + (dk1 - tail) * self.deltas[self.t_prime - 1]
        if lhs != 0:
            raise ParameterError(
                f"infeasible plan: deficit identity is {lhs}, not 0 "
                f"(the {dk1} smallest downloads must sum to l={l})"
            )

    @classmethod
    def uniform(cls, tree, l, d, k):
        beta = uniform_beta(l, d, k)
        return cls(tree, l, d, k, [beta] * tree.t)

    @classmethod
    def tilt_last_layer(cls, tree, l, d, k, delta_last):
        """Lower the deepest layer by delta_last, raising all nearer layers
        equally; the two-layer tail must still cover d-k+1 helpers."""
        delta_last = Fraction(delta_last)
        sizes = tree.layer_sizes
        a = tree.t
        dk1 = d - k + 1
        if a < 2 or sizes[a - 1] + sizes[a - 2] < dk1:
            raise ParameterError("two deepest layers must cover d-k+1 helpers")
        if sizes[a - 1] >= dk1:
            raise ParameterError("deepest layer alone covers d-k+1; nothing to tilt")
        beta = uniform_beta(l, d, k)
        near = -Fraction(sizes[a - 1], dk1 - sizes[a - 1]) * delta_last
        deltas = [near] * (a - 1) + [delta_last]
        return cls(tree, l, d, k, [beta - dl for dl in deltas])

    @classmethod
    def drop_last_layer(cls, tree, l, d, k):
        """The limiting tilt: the deepest layer contributes nothing."""
        beta = uniform_beta(l, d, k)
        return cls.tilt_last_layer(tree, l, d, k, beta)

    def beta_of(self, v: int) -> Fraction:
        return self.layer_betas[self.tree.depth[v] - 1]

    def download_multiset(self) -> list[Fraction]:
        return sorted(self.beta_of(v) for v in self.tree.helpers)

    def integral(self) -> bool:
        return all(b.denominator == 1 for b in self.layer_betas)


def lambda_af_nonuniform(tree: RepairTree, plan: NonuniformPlan) -> BandwidthReport:
    """Relay-only with per-layer downloads: total = sum_i i * d_i * beta_i."""
    per_edge = {}
    for v in tree.helpers:
        acc = plan.beta_of(v)
        for u in tree.helpers:
            if u != v and _in_subtree(tree, u, v):
                acc += plan.beta_of(u)
        per_edge[_edge(tree, v)] = acc
    total = sum(
        (tree.depth[v] * plan.beta_of(v) for v in tree.helpers), Fraction(0)
    )
    return BandwidthReport(
        "af-nu", total, per_edge, {v: plan.beta_of(v) for v in tree.helpers}
    )


def _in_subtree(tree: RepairTree, u: int, v: int) -> bool:
    p = u
    while p != tree.f:
        p = tree.parent[p]
        if p == v:
            return True
    return False


def lambda_ip_nonuniform(
    tree: RepairTree, plan: NonuniformPlan, greedy: bool = False
) -> BandwidthReport:
    """Processing repair with per-layer downloads.

    Reference scheme: exactly the processing set compresses (to l).  The
    optional greedy variant lets any node whose subtree accumulates at
    least l symbols compress as well, which can only lower the total.
    """
    l, d, k = plan.l, plan.d, plan.k
    dk1 = d - k + 1
    proc = tree.ip_set(dk1)
    per_edge: dict[tuple[int, int], Fraction] = {}
    acc: dict[int, Fraction] = {}
    for v in sorted(tree.helpers, key=lambda v: -tree.depth[v]):
        subtotal = plan.beta_of(v) + sum(
            (acc[c] for c in tree.children[v]), Fraction(0)
        )
        if v in proc or (greedy and subtotal >= l):
            load = Fraction(l)
        else:
            load = min(subtotal, Fraction(l)) if greedy else subtotal
        acc[v] = load
        per_edge[_edge(tree, v)] = load
    total = sum(per_edge.values(), Fraction(0))
    return BandwidthReport(
        "ip-nu" + ("-greedy" if greedy else ""),
        total,
        per_edge,
        {v: plan.beta_of(v) for v in tree.helpers},
        {"processing_set": sorted(proc)},
    )


def nonuniform_savings(tree: RepairTree, plan: NonuniformPlan) -> Fraction:
    """Bandwidth saved over the uniform plan under processing repair:
    sum over non-processing helpers of hops-to-processing-ancestor times
    the per-layer deficit."""
    dk1 = plan.d - plan.k + 1
    proc = tree.ip_set(dk1)
    out = Fraction(0)
    for v in tree.helpers:
        if v in proc:
            continue
        anc = tree.nearest_processing_ancestor(v, proc)
        out += tree.hop_to(v, anc) * plan.deltas[tree.depth[v] - 1]
    return out


# ---------------------------------------------------------------------------
# Symbol-level simulation
# ---------------------------------------------------------------------------


def nearest_first_tau(tree: RepairTree) -> dict[int, int]:
    """Assign indices so the nearest helper gets the largest download.

    Downloads are indexed 1..d in nondecreasing order, so depth-1 helpers
    receive the top indices.
    """
    order = sorted(tree.helpers, key=lambda v: (tree.depth[v], v))
    d = len(order)
    return {h: d - r for r, h in enumerate(order)}


class _Payload:
    """What travels over one tree edge: raw per-helper symbols or a share."""

    __slots__ = ("raw", "share", "count")

    def __init__(self, raw=None, share=None, count=0):
        self.raw = raw or {}
        self.share = share
        self.count = count


def _symbol_count(raw: dict) -> int:
    return sum(np.asarray(v).size for v in raw.values())


class _CodeDriver:
    """Uniform facade over the code families used by the simulator."""

    def __init__(self, code, f: int, helpers: tuple[int, ...], tau: dict[int, int]):
        self.code = code
        self.f = f
        self.helpers = helpers
        self.tau = tau

    def helper_symbols(self, codeword, h: int) -> np.ndarray:
        if isinstance(self.code, StackedCode):
            payload = self.code.helper_payload(codeword, h, self.f, self.tau)
            return np.concatenate([payload[key] for key in sorted(payload)])
        return self.code.repair_map(h, self.f, codeword[h])

    def partial_share(self, codeword, raw: dict[int, np.ndarray]) -> np.ndarray:
        subset = sorted(raw)
        if isinstance(self.code, PmCode):
            return self.code.ip_combine(raw, self.f, self.helpers, subset=subset)
        if isinstance(self.code, GpmCode):
            return self.code.ip_combine(raw, self.f, self.helpers, subset=subset)
        if isinstance(self.code, StackedCode):
            return self.code._ip_partial(codeword, self.f, subset, self.helpers, self.tau)
        raise ParameterError(f"unsupported code type {type(self.code).__name__}")

    def af_repair(self, codeword, raw: dict[int, np.ndarray]) -> np.ndarray:
        if isinstance(self.code, PmCode):
            return self.code.af_repair(self.f, raw)
        if isinstance(self.code, GpmCode):
            return self.code.ip_combine(raw, self.f, self.helpers)
        if isinstance(self.code, StackedCode):
            content, _ = self.code.repair(codeword, self.f, list(self.helpers), self.tau)
            return content
        raise ParameterError(f"unsupported code type {type(self.code).__name__}")

    def downloads(self) -> dict[int, int]:
        if isinstance(self.code, StackedCode):
            return {h: self.code.download_count(h, self.tau) for h in self.helpers}
        return {h: self.code.beta(h, self.f) for h in self.helpers}


SCHEMES = ("af-u", "ip-u", "af-nu", "ip-nu")


def simulate_repair(
    graph: StorageGraph,
    code,
    f: int,
    helpers,
    scheme: str,
    codeword=None,
    plan: NonuniformPlan | None = None,
    rng=None,
    greedy: bool = False,
):
    """Run symbol-level repair over the tree and count every transmission.

    Returns (restored content, measured BandwidthReport, formula
    BandwidthReport).  The restored content is checked against the
    codeword before returning; a mismatch raises RepairError.
    """
    if scheme not in SCHEMES:
        raise ParameterError(f"scheme must be one of {SCHEMES}")
    if code.n != graph.n:
        raise ParameterError(f"code length {code.n} != graph size {graph.n}")
    helpers = sorted(set(helpers))
    if len(helpers) != code.d:
        raise ParameterError(f"need d={code.d} helpers, got {len(helpers)}")
    tree = RepairTree(graph, f, helpers)
    tau = nearest_first_tau(tree)
    if codeword is None:
        rng = np.random.default_rng(0) if rng is None else rng
        file = code.field.random_elements(rng, (code.message_dim,))
        codeword = code.encode(file)

    l, d, k = code.l, code.d, code.k
    dk1 = d - k + 1
    if scheme.endswith("-nu"):
        if plan is None:
            raise ParameterError("nonuniform schemes need a plan")
        if not plan.integral():
            raise ParameterError("symbol-level simulation needs integer downloads")
        if not isinstance(code, StackedCode):
            raise ParameterError("nonuniform downloads require a stacked code")
        want = sorted(int(b) for b in plan.download_multiset())
        if want != list(code.spec.B):
            raise ParameterError(
                f"plan downloads {want} do not match the code's B {list(code.spec.B)}"
            )
        # nearest-first tau realizes the per-layer downloads exactly
        driver = _CodeDriver(code, f, tuple(helpers), tau)
        for h in helpers:
            if driver.downloads()[h] != plan.beta_of(h):
                raise ParameterError("tau does not realize the plan's layer downloads")
        formula = (
            lambda_af_nonuniform(tree, plan)
            if scheme == "af-nu"
            else lambda_ip_nonuniform(tree, plan, greedy=greedy)
        )
    else:
        betas = {code.beta(h, f) for h in helpers} if not isinstance(code, StackedCode) else set(code.spec.B)
        if len(betas) != 1:
            raise ParameterError("uniform schemes need a uniform code")
        driver = _CodeDriver(code, f, tuple(helpers), tau)
        formula = (
            lambda_af_uniform(tree, l, d, k)
            if scheme == "af-u"
            else lambda_ip_uniform(tree, l, d, k)
        )

    use_ip = scheme.startswith("ip")
    proc = tree.ip_set(dk1) if use_ip else set()

    per_edge: dict[tuple[int, int], Fraction] = {}
    sent: dict[int, _Payload] = {}
    for v in sorted(tree.helpers, key=lambda v: -tree.depth[v]):
        raw = {v: driver.helper_symbols(codeword, v)}
        shares = []
        acc_count = 0
        for c in tree.children[v]:
            p = sent[c]
            raw.update(p.raw)
            if p.share is not None:
                shares.append(p.share)
            acc_count += p.count
        own_count = _symbol_count({v: raw[v]})
        subtotal = own_count + acc_count
        compress = use_ip and (v in proc or (greedy and subtotal >= l))
        if compress:
            share = driver.partial_share(codeword, raw)
            for s in shares:
                share = code.field.add(share, s)
            payload = _Payload(share=share, count=l)
        else:
            # the processing set is ancestor-closed, so a non-compressing
            # node can only ever receive raw symbols
            assert not shares
            payload = _Payload(raw=raw, count=_symbol_count(raw))
        sent[v] = payload
        per_edge[_edge(tree, v)] = Fraction(payload.count)

    # collect at the failed node
    raw: dict[int, np.ndarray] = {}
    shares = []
    for c in tree.children[f]:
        p = sent[c]
        raw.update(p.raw)
        if p.share is not None:
            shares.append(p.share)
    if use_ip:
        restored = driver.partial_share(codeword, raw) if raw else np.zeros(l, dtype=np.int64)
        for s in shares:
            restored = code.field.add(restored, s)
    else:
        restored = driver.af_repair(codeword, raw)
    if not np.array_equal(restored, np.asarray(codeword[f], dtype=np.int64)):
        raise RepairError("symbol-level repair mismatch")

    measured_total = sum(per_edge.values(), Fraction(0))
    measured = BandwidthReport(
        scheme + "-measured",
        measured_total,
        per_edge,
        {h: Fraction(driver.downloads()[h]) for h in helpers},
    )
    return restored, measured, formula
