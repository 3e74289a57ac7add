"""Repair with corrupted helpers: rank-metric outer code over an MSR inner code.

The construction concatenates a Gabidulin code (length N, over F_{q^m})
with a systematic MSR code of node size l = N over F_q.  Each of the m
expansion rows of the outer codewords is encoded separately by the inner
code, so a node's content is one inner-code coordinate per row, and a
systematic node's content recombines into an outer codeword.

During processing repair the helpers apply only F_q-linear maps, so a
corrupted stored value W_h + Z_h turns the collected result into
W_f + sum_h U_h Z~_h whose expansion rank is at most the corrupted
helpers' total download.  As long as N - K covers twice that, the failed
node decodes its true content.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bounds import omega_r
from .codes import derive_ip_matrices
from .codes.systematic import SystematicCode
from .errors import DecodingFailure, ParameterError
from .gabidulin import GabidulinCode
from .gf import TowerField, binary_field, tower_field
from .graphrepair import (
    BandwidthReport,
    RepairTree,
    lambda_af_uniform,
    lambda_ip_uniform,
    nearest_first_tau,
)
from .graphs import StorageGraph
from .stacking import StackedCode, TauBoundStackedCode, build_stack

__all__ = [
    "ConcatCode",
    "AdversaryModel",
    "AdversarialTrial",
    "adversarial_repair",
    "af_with_extra_helpers_baseline",
    "fig5_realizable_concat",
]


@dataclass(frozen=True)
class AdversaryModel:
    """Corrupts stored contents of up to t helpers; computations stay honest."""

    t: int
    corrupted: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.corrupted)) != len(self.corrupted) or len(self.corrupted) > self.t:
            raise ParameterError("corrupted set must be distinct and within the budget")


class ConcatCode:
    """Gabidulin outer code wrapped around a systematic MSR inner code."""

    def __init__(self, outer: GabidulinCode, inner_stack: StackedCode, systematic_nodes=None):
        if outer.tower.base is not inner_stack.field:
            raise ParameterError("outer tower must extend the inner code's field")
        if inner_stack.l != outer.N:
            raise ParameterError(
                f"inner node size {inner_stack.l} must equal outer length {outer.N}"
            )
        self.outer = outer
        self.tower = outer.tower
        self.inner = SystematicCode(inner_stack, systematic_nodes)
        self.stack = inner_stack
        self.field = inner_stack.field
        self.n = inner_stack.n
        self.k = inner_stack.k
        self.d = inner_stack.d
        self.N, self.K, self.m = outer.N, outer.K, outer.tower.m
        self.file_size = self.K * self.k * self.m  # base-field symbols
        # full systematic generator, for encoding all m rows in one product
        self._gen = np.vstack([self.inner.node_generator(i).a for i in range(self.n)])

    def __repr__(self):
        return (
            f"ConcatCode(outer=[{self.N},{self.K}] over {self.tower}, "
            f"inner={self.stack!r})"
        )

    def rate(self) -> Fraction:
        return Fraction(self.K * self.k, self.N * self.n)

    def l_inner(self) -> int:
        return self.stack.l

    def encode(self, file) -> np.ndarray:
        """file: K*k*m base symbols -> (n, m, N) per-node row stacks."""
        file = self.field.asarray(file)
        if file.shape != (self.file_size,):
            raise ParameterError(f"file must have {self.file_size} symbols")
        blocks = file.reshape(self.k, self.K, self.m)  # tower expansion per element
        outer_rows = np.stack([self.outer.encode(blocks[i]) for i in range(self.k)])
        # outer_rows: (k, N, m); row j of the data matrix feeds inner codeword j
        data = outer_rows.transpose(2, 0, 1).reshape(self.m, self.k * self.N)
        cw = self.field.matmul(self._gen, data.T.copy())  # (n*N, m)
        return cw.reshape(self.n, self.N, self.m).transpose(0, 2, 1).copy()

    def node_as_tower(self, node_rows) -> np.ndarray:
        """(m, N) stored rows -> (N, m) vector over the tower."""
        return np.asarray(node_rows, dtype=np.int64).T.copy()

    def systematic_check(self, codeword, file) -> bool:
        """Each systematic node's tower view is an outer codeword of its block."""
        file = self.field.asarray(file)
        blocks = file.reshape(self.k, self.K, self.m)
        for r, i in enumerate(self.inner.systematic_nodes):
            expect = self.outer.encode(blocks[r])
            if not np.array_equal(self.node_as_tower(codeword[i]), expect):
                return False
        return True

    def retrieval_cost(self, systematic_only: bool) -> int:
        """Base symbols downloaded for full data retrieval."""
        if systematic_only:
            return self.k * self.K * self.m
        return self.k * self.N * self.m


@dataclass
class AdversarialTrial:
    restored: np.ndarray
    success: bool
    error_rank: int
    rank_bound: int
    report: BandwidthReport


def adversarial_repair(
    code: ConcatCode,
    codeword,
    f: int,
    graph: StorageGraph,
    helpers,
    adversary: AdversaryModel,
    rng=None,
    corruptions=None,
) -> AdversarialTrial:
    """Processing repair of a systematic node with corrupted helpers.

    Every node applies its honest linear maps to whatever it stores; the
    failed node rank-decodes the collected tower vector.  Raises
    RepairError only for structural problems; a decoding miss is reported
    in the trial record, never silently.
    """
    if f not in code.inner.systematic_nodes:
        raise ParameterError(f"node {f} is not systematic")
    helpers = sorted(set(helpers))
    if len(helpers) != code.d:
        raise ParameterError(f"need d={code.d} helpers")
    if any(h not in helpers for h in adversary.corrupted):
        raise ParameterError("adversary must corrupt helper nodes")
    bound = omega_r(code.stack.spec.B, adversary.t)
    if code.N - code.K < 2 * bound:
        raise ParameterError(
            f"outer distance too small: N-K={code.N - code.K} < 2*Omega_t={2 * bound}"
        )
    tree = RepairTree(graph, f, helpers)
    tau = nearest_first_tau(tree)
    view = TauBoundStackedCode(code.stack, f, tau)
    ips = derive_ip_matrices(view, f, tuple(helpers))

    corrupted = np.array(codeword, dtype=np.int64, copy=True)
    if corruptions is None:
        if rng is None:
            raise ParameterError("need corruptions or an rng to sample them")
        corruptions = {}
        for h in adversary.corrupted:
            z = code.field.random_elements(rng, (code.m, code.N))
            while not z.any():
                z = code.field.random_elements(rng, (code.m, code.N))
            corruptions[h] = z
    for h, z in corruptions.items():
        corrupted[h] = code.field.add(corrupted[h], z)

    # honest helper maps on (possibly corrupted) contents, one run per row
    received_rows = np.zeros((code.m, code.l_inner()), dtype=np.int64)
    for j in range(code.m):
        syms = {h: view.repair_map(h, f, corrupted[h][j]) for h in helpers}
        received_rows[j] = ips.combine(syms)
    received = received_rows.T.copy()  # (N, m) over the tower

    true_tower = code.node_as_tower(codeword[f])
    err = code.tower.add(received, true_tower)
    error_rank = code.tower.rank_q(err)

    block = code.inner.systematic_nodes.index(f)
    success = False
    restored = received_rows
    try:
        message = code.outer.decode(received)
        reenc = code.outer.encode(message)
        restored = reenc.T.copy()  # back to (m, N) stored rows
        success = bool(np.array_equal(restored, np.asarray(codeword[f], dtype=np.int64)))
    except DecodingFailure:
        success = False

    per_tower = lambda_ip_uniform(tree, code.l_inner(), code.d, code.k)
    report = BandwidthReport(
        "ip-u-adversarial",
        per_tower.total * code.m,
        {e: v * code.m for e, v in per_tower.per_edge.items()},
        {h: v * code.m for h, v in per_tower.per_helper.items()},
        {"per_tower_symbol_total": per_tower.total, "block": block},
    )
    return AdversarialTrial(restored, success, error_rank, bound, report)


def af_with_extra_helpers_baseline(
    graph: StorageGraph, f: int, d: int, t: int, beta: int
) -> BandwidthReport:
    """Relay-only baseline contacting d + 2t nearest helpers at beta each."""
    order = []
    for layer in graph.layers_from(f):
        order.extend(sorted(layer))
    need = d + 2 * t
    if len(order) < need:
        raise ParameterError(f"graph offers {len(order)} helpers, need {need}")
    helpers = order[:need]
    tree = RepairTree(graph, f, helpers)
    per_edge = {
        (v, tree.parent[v]): Fraction((tree.sigma[v] + 1) * beta) for v in tree.helpers
    }
    total = sum((Fraction(tree.depth[v] * beta) for v in tree.helpers), Fraction(0))
    return BandwidthReport(
        "af-extra-helpers",
        total,
        per_edge,
        {v: Fraction(beta) for v in tree.helpers},
        {"d": d, "t": t},
    )


def fig5_realizable_concat(beta: int = 5) -> ConcatCode:
    """Nearest realizable instance to the 10-node adversarial example.

    The quoted inner parameters [n=10, k=5, d=9, l=25] have no registered
    MSR family (d=9 is strictly between k and 2(k-1)); d=8 with the same
    beta gives l=20, realized by beta parallel product-matrix codewords
    over GF(16), and the outer code keeps N-K = 2*Omega_1 = 2*beta.
    """
    n, k, d = 10, 5, 8
    field = binary_field(4)
    spec = build_stack(n, k, d, [beta] * d, field=field)
    stack = StackedCode(spec)
    tower = tower_field(field, stack.l)
    outer = GabidulinCode(tower, stack.l, stack.l - 2 * beta)
    return ConcatCode(outer, stack)
