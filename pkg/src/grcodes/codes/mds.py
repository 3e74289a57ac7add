"""Scalar MDS (Reed-Solomon) codes as the degenerate d = k MSR family.

One symbol per node; repairing a node means re-interpolating the message
polynomial from any k surviving evaluations, so each of the d = k helpers
contributes its whole (single-symbol) content.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConstructionError, ParameterError, RepairError
from ..gf import Field, Matrix, binary_field
from .base import LinearCode


class MdsUnitCode(LinearCode):
    """[n, k] Reed-Solomon code viewed as an MSR code with d=k, l=1, beta=1."""

    def __init__(self, n: int, k: int, field: Field | None = None, points=None):
        if not 1 <= k <= n - 1:
            raise ParameterError("need 1 <= k <= n-1")
        self.n, self.k, self.d, self.l = n, k, k, 1
        self.message_dim = k
        if field is None:
            w = 2
            while (1 << w) - 1 < n:
                w += 1
            field = binary_field(w)
        self.field = field
        self.points = [field.normalize(x) for x in (points if points is not None else range(1, n + 1))]
        if len(set(self.points)) != n:
            raise ConstructionError("evaluation points must be distinct")
        self._vand = Matrix.vandermonde(self.field, self.points, k)
        self._gen_cache: dict[int, Matrix] = {}

    def __repr__(self):
        return f"MdsUnitCode(n={self.n}, k={self.k}, {self.field})"

    def beta(self, h: int, f: int) -> int:
        return 1

    def node_generator(self, i: int) -> Matrix:
        if i not in self._gen_cache:
            self._gen_cache[i] = Matrix(self.field, self._vand.a[i : i + 1].copy())
        return self._gen_cache[i]

    def helper_generator(self, h: int, f: int) -> Matrix:
        if h == f:
            raise ParameterError("helper equals the failed node")
        return self.node_generator(h)

    def repair_map(self, h: int, f: int, content) -> np.ndarray:
        return np.asarray(content, dtype=np.int64).reshape(1)

    def af_repair(self, f: int, symbols: dict[int, np.ndarray]) -> np.ndarray:
        helpers = sorted(symbols)
        if len(helpers) != self.k or f in helpers:
            raise RepairError(f"need {self.k} distinct helpers excluding {f}")
        F = self.field
        sub = Matrix.vandermonde(F, [self.points[h] for h in helpers], self.k)
        rhs = np.array([int(np.asarray(symbols[h]).reshape(-1)[0]) for h in helpers], dtype=np.int64)
        msg = sub.solve(Matrix(F, rhs[:, None])).a[:, 0]
        return np.array([int(F.poly_eval(msg, self.points[f]))], dtype=np.int64)
