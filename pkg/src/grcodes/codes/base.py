"""Generic linear-code interface and the universal IP-matrix derivation.

Any code in the package exposes its encoding as per-node generator
matrices over one field: node i stores ``node_generator(i) @ file``.  The
repair traffic a helper emits is likewise linear in the file, which is
what makes intermediate processing possible for every code here: the
failed node's rows always lie in the row space of the stacked
helper-symbol rows, so each helper's transmission can be lifted to an
additive l-dimensional share.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InconsistentSystemError, ParameterError, RepairError
from ..gf import Field, Matrix


class LinearCode:
    """Shared helpers for codes defined by per-node generator matrices."""

    field: Field
    n: int
    k: int
    d: int
    l: int
    message_dim: int

    def beta(self, h: int, f: int) -> int:
        """Symbols helper h sends toward failed node f."""
        raise NotImplementedError

    def node_generator(self, i: int) -> Matrix:
        """l x M matrix mapping the file to node i's content."""
        raise NotImplementedError

    def helper_generator(self, h: int, f: int) -> Matrix:
        """beta x M matrix mapping the file to helper h's repair symbols."""
        raise NotImplementedError

    # -- conveniences built on the generators -------------------------------
    def encode(self, file) -> np.ndarray:
        file = self.field.asarray(file)
        if file.shape != (self.message_dim,):
            raise ParameterError(f"file must have {self.message_dim} symbols")
        col = Matrix(self.field, file[:, None])
        return np.stack([(self.node_generator(i) @ col).a[:, 0] for i in range(self.n)])

    def helper_symbols(self, codeword_or_file, h: int, f: int, *, is_file=False) -> np.ndarray:
        """Repair symbols computed from h's stored content."""
        if is_file:
            file = self.field.asarray(codeword_or_file)
            return (self.helper_generator(h, f) @ Matrix(self.field, file[:, None])).a[:, 0]
        content = self.field.asarray(codeword_or_file[h])
        return self.repair_map(h, f, content)

    def repair_map(self, h: int, f: int, content) -> np.ndarray:
        """Apply the content -> repair-symbols map (the per-helper code map)."""
        raise NotImplementedError

    def reconstruct(self, indices, contents) -> np.ndarray:
        """Generic data retrieval: solve the stacked node systems exactly."""
        indices = list(indices)
        if len(set(indices)) != self.k:
            raise ParameterError(f"need {self.k} distinct node indices")
        rows = np.vstack([self.node_generator(i).a for i in indices])
        rhs = np.concatenate([self.field.asarray(c) for c in contents])
        sol = Matrix(self.field, rows).solve_any(Matrix(self.field, rhs[:, None]))
        # reject silent mismatches: re-encode and compare
        if not np.array_equal(self.field.matmul(rows, sol.a)[:, 0], rhs):
            raise RepairError("node contents are inconsistent with the code")
        return sol.a[:, 0]


@dataclass
class IpMatrixSet:
    """Per-helper lifting matrices U with  W_f = sum_h U_h @ S_{h,f}."""

    f: int
    helpers: tuple[int, ...]
    matrices: dict[int, Matrix]

    def combine(self, symbols: dict[int, np.ndarray], subset=None) -> np.ndarray:
        """Additive share of the failed node's content from ``subset``."""
        field = next(iter(self.matrices.values())).field
        l = next(iter(self.matrices.values())).a.shape[0]
        out = np.zeros(l, dtype=np.int64)
        for h in subset if subset is not None else self.helpers:
            if h not in self.matrices:
                raise RepairError(f"helper {h} is not in the derived set")
            contrib = field.matmul(self.matrices[h].a, np.asarray(symbols[h], dtype=np.int64)[:, None])
            out = field.add(out, contrib[:, 0])
        return out


def derive_ip_matrices(code: LinearCode, f: int, helpers) -> IpMatrixSet:
    """Solve for lifting matrices U_h with sum_h U_h G_{h,f} = N_f.

    Works for any linear code whose helper set can repair f; raises if the
    stacked helper rows do not cover the failed node's row space.
    """
    helpers = tuple(helpers)
    if f in helpers:
        raise ParameterError("failed node cannot help itself")
    gens = [code.helper_generator(h, f) for h in helpers]
    stacked = np.vstack([g.a for g in gens])
    target = code.node_generator(f)
    try:
        # U @ stacked = target  <=>  stacked^T @ U^T = target^T
        ut = Matrix(code.field, stacked.T.copy()).solve_any(target.T)
    except InconsistentSystemError as exc:
        raise RepairError(f"node {f} is not repairable from {helpers}") from exc
    U = ut.a.T
    matrices = {}
    row = 0
    for h, g in zip(helpers, gens):
        b = g.a.shape[0]
        matrices[h] = Matrix(code.field, U[:, row : row + b].copy())
        row += b
    return IpMatrixSet(f, helpers, matrices)
