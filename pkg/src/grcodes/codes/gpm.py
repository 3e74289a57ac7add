"""Generalized product-matrix MSR codes via symmetric-power evaluation.

Parameters [n, k, d=(k-1)t/(t-1), l=C(k-1,t-1), beta=C(k-2,t-2), M=t*C(k,t)]
for 2 <= t <= k.  The file is a linear functional phi on X (x) S^t(Y) with
X = F^t and Y = F^{k-t+1}; node i stores phi restricted to the subspace
x_i (x) y_i . S^{t-1}(Y), evaluated on a fixed multiset-monomial basis.

Symmetric powers are handled as homogeneous polynomials: a basis vector is
a nondecreasing index multiset (lexicographic order) and the symmetric
product is polynomial multiplication.

Per-node vector families must satisfy three spanning conditions: any t of
the x_i span X, any k-t+1 of the y_i span Y, and any d of the node
subspaces span X (x) S^{t-1}(Y).  All three are verified exhaustively at
construction and violations raise ConstructionError.
"""

from __future__ import annotations

from itertools import combinations, combinations_with_replacement
from math import comb

import numpy as np

from ..errors import ConstructionError, InconsistentSystemError, ParameterError
from ..gf import GF16, Field, Matrix
from .base import LinearCode
from .pm import select_points


def _multisets(dim: int, p: int) -> list[tuple[int, ...]]:
    return list(combinations_with_replacement(range(dim), p))


def _sym_product(field: Field, vectors, base: tuple[int, ...] = ()) -> dict:
    """Expand the symmetric product of linear forms times a base monomial."""
    terms = {tuple(sorted(base)): 1}
    for v in vectors:
        new: dict = {}
        for mono, c in terms.items():
            if c == 0:
                continue
            for a, va in enumerate(v):
                if va == 0:
                    continue
                key = tuple(sorted(mono + (a,)))
                new[key] = field.add_s(new.get(key, 0), field.mul_s(c, int(va)))
        terms = new
    return terms


class GpmCode(LinearCode):
    """Generalized product-matrix code instance."""

    def __init__(self, n: int, k: int, t: int, field: Field | None = None, points=None, seed: int = 0):
        if not 2 <= t <= k:
            raise ParameterError("need 2 <= t <= k")
        if ((k - 1) * t) % (t - 1) != 0:
            raise ParameterError(f"(k-1)t/(t-1) is not an integer for k={k}, t={t}")
        self.n, self.k, self.t = n, k, t
        self.d = (k - 1) * t // (t - 1)
        self.l = comb(k - 1, t - 1)
        self.message_dim = t * comb(k, t)
        if self.d > n - 1:
            raise ParameterError(f"need n >= d+1 = {self.d + 1}")
        self.field = field if field is not None else GF16
        self.dim_y = k - t + 1
        self.msets_t = _multisets(self.dim_y, t)
        self.msets_tm1 = _multisets(self.dim_y, t - 1)
        self.msets_tm2 = _multisets(self.dim_y, t - 2)
        self._t_index = {m: i for i, m in enumerate(self.msets_t)}
        self._tm1_index = {m: i for i, m in enumerate(self.msets_tm1)}
        self.beta_size = len(self.msets_tm2)
        assert self.beta_size == comb(k - 2, t - 2)
        assert len(self.msets_tm1) == self.l
        if points is not None:
            self.xs, self.ys = [list(map(self.field.normalize, v)) for v in points[0]], [
                list(map(self.field.normalize, v)) for v in points[1]
            ]
        else:
            self.xs, self.ys = self._default_points(seed)
        if len(self.xs) != n or len(self.ys) != n:
            raise ParameterError("need one (x, y) vector pair per node")
        self._verify_conditions()
        self._gen_cache: dict[int, Matrix] = {}
        self._coeff_cache: dict = {}

    def __repr__(self):
        return (
            f"GpmCode(n={self.n}, k={self.k}, t={self.t}, d={self.d}, "
            f"l={self.l}, beta={self.beta_size}, {self.field})"
        )

    # -- point selection -----------------------------------------------------
    def _default_points(self, seed: int):
        F, n, k, t = self.field, self.n, self.k, self.t
        if t == 2:
            pts = select_points(F, n, k)
            xs = [[1, F.pow_s(a, k - 1)] for a in pts]
            ys = [[F.pow_s(a, j) for j in range(k - 1)] for a in pts]
            return xs, ys
        if t == 3 and self.dim_y == 3 and F.q - 1 >= n:
            # moment-curve exponents (1, a^2, a^6) / (1, a, a^3); not every
            # parameter subset satisfies the spanning conditions, so scan
            # subsets in lexicographic order until one verifies
            budget = 5000
            for sub in combinations(range(1, F.q), n):
                budget -= 1
                if budget < 0:
                    break
                xs = [[1, F.pow_s(a, 2), F.pow_s(a, 6)] for a in sub]
                ys = [[1, a, F.pow_s(a, 3)] for a in sub]
                try:
                    self.xs, self.ys = xs, ys
                    self._verify_conditions()
                    return xs, ys
                except ConstructionError:
                    continue
        # seeded random search, deterministic given the seed
        rng = np.random.default_rng(seed)
        for _ in range(50):
            xs = [[int(v) for v in F.random_elements(rng, (t,))] for _ in range(n)]
            ys = [[int(v) for v in F.random_elements(rng, (self.dim_y,))] for _ in range(n)]
            try:
                self.xs, self.ys = xs, ys
                self._verify_conditions()
                return xs, ys
            except ConstructionError:
                continue
        raise ConstructionError(
            f"no point family found for (n={self.n}, k={self.k}, t={self.t}) over {F}; "
            "supply points= explicitly"
        )

    # -- construction conditions ----------------------------------------------
    def _verify_conditions(self):
        F, t = self.field, self.t
        xs = np.array(self.xs, dtype=np.int64)
        ys = np.array(self.ys, dtype=np.int64)
        for sub in combinations(range(self.n), t):
            if Matrix(F, xs[list(sub)]).rank() != t:
                raise ConstructionError(f"x-vectors {sub} do not span X")
        for sub in combinations(range(self.n), self.dim_y):
            if Matrix(F, ys[list(sub)]).rank() != self.dim_y:
                raise ConstructionError(f"y-vectors {sub} do not span Y")
        dim_target = t * len(self.msets_tm1)
        blocks = [self._helper_space_rows(i) for i in range(self.n)]
        for sub in combinations(range(self.n), self.d):
            stacked = np.vstack([blocks[i] for i in sub])
            if Matrix(F, stacked).rank() != dim_target:
                raise ConstructionError(f"node subspaces {sub} do not span X (x) S^(t-1)Y")

    def _helper_space_rows(self, i: int) -> np.ndarray:
        """Basis of x_i (x) y_i . S^{t-2}Y inside X (x) S^{t-1}Y."""
        F = self.field
        rows = np.zeros((self.beta_size, self.t * len(self.msets_tm1)), dtype=np.int64)
        for r_idx, u in enumerate(self.msets_tm2):
            poly = _sym_product(F, [self.ys[i]], base=u)
            for mono, c in poly.items():
                col_base = self._tm1_index[mono]
                for r in range(self.t):
                    val = F.mul_s(int(self.xs[i][r]), c)
                    col = r * len(self.msets_tm1) + col_base
                    rows[r_idx, col] = F.add_s(int(rows[r_idx, col]), val)
        return rows

    # -- encoding ----------------------------------------------------------------
    def _tensor_row(self, x_vec, poly: dict) -> np.ndarray:
        """Expansion of x (x) poly in the L basis (length M)."""
        F = self.field
        row = np.zeros(self.message_dim, dtype=np.int64)
        block = len(self.msets_t)
        for mono, c in poly.items():
            j = self._t_index[mono]
            for r in range(self.t):
                val = F.mul_s(int(x_vec[r]), c)
                row[r * block + j] = F.add_s(int(row[r * block + j]), val)
        return row

    def node_generator(self, i: int) -> Matrix:
        if i not in self._gen_cache:
            rows = np.stack(
                [
                    self._tensor_row(self.xs[i], _sym_product(self.field, [self.ys[i]], base=u))
                    for u in self.msets_tm1
                ]
            )
            self._gen_cache[i] = Matrix(self.field, rows)
        return self._gen_cache[i]

    def beta(self, h: int, f: int) -> int:
        return self.beta_size

    def helper_generator(self, h: int, f: int) -> Matrix:
        if h == f:
            raise ParameterError("helper equals the failed node")
        rows = np.stack(
            [
                self._tensor_row(
                    self.xs[h], _sym_product(self.field, [self.ys[h], self.ys[f]], base=u)
                )
                for u in self.msets_tm2
            ]
        )
        return Matrix(self.field, rows)

    def repair_map(self, h: int, f: int, content) -> np.ndarray:
        """Helper symbols from stored data: evaluations on y_f-augmented tensors."""
        if h == f:
            raise ParameterError("helper equals the failed node")
        F = self.field
        content = F.asarray(content)
        out = np.zeros(self.beta_size, dtype=np.int64)
        for r_idx, u in enumerate(self.msets_tm2):
            w = _sym_product(F, [self.ys[f]], base=u)  # element of S^{t-1}Y
            acc = 0
            for mono, c in w.items():
                acc = F.add_s(acc, F.mul_s(c, int(content[self._tm1_index[mono]])))
            out[r_idx] = acc
        return out

    # -- intermediate processing ----------------------------------------------
    def ip_coefficients(self, f: int, helpers) -> dict[int, Matrix]:
        """Expansion coefficients of node f's basis tensors over helper tensors.

        Returns, per helper, the (l x beta) block A_h such that the shares
        A_h @ S_{h,f} summed over any partition of the helper set equal the
        failed node's content.  File-independent.
        """
        helpers = tuple(helpers)
        if (f, helpers) in self._coeff_cache:
            return self._coeff_cache[(f, helpers)]
        if f in helpers or len(set(helpers)) != len(helpers):
            raise ParameterError("helpers must be distinct and exclude f")
        gens = [self.helper_generator(h, f) for h in helpers]
        stacked = np.vstack([g.a for g in gens])  # (d*beta) x M
        target = self.node_generator(f)  # l x M
        try:
            coeffs = Matrix(self.field, stacked.T.copy()).solve_any(target.T)
        except InconsistentSystemError as exc:
            raise ConstructionError(
                "spanning solve failed; construction condition (iii) is violated"
            ) from exc
        A = coeffs.a  # (d*beta) x l
        out = {}
        for idx, h in enumerate(helpers):
            block = A[idx * self.beta_size : (idx + 1) * self.beta_size]
            out[h] = Matrix(self.field, block.T.copy())
        self._coeff_cache[(f, helpers)] = out
        return out

    def ip_combine(self, symbol_sets: dict[int, np.ndarray], f: int, helpers, subset=None):
        """Additive l-dimensional share from the helpers in ``subset``."""
        coeffs = self.ip_coefficients(f, tuple(helpers))
        out = np.zeros(self.l, dtype=np.int64)
        F = self.field
        for h in subset if subset is not None else sorted(symbol_sets):
            vals = np.asarray(symbol_sets[h], dtype=np.int64)[:, None]
            out = F.add(out, F.matmul(coeffs[h].a, vals)[:, 0])
        return out
