"""Product-matrix MSR codes with parameters [n, k, 2(k-1), k-1, beta=1].

The file fills two symmetric (k-1)x(k-1) matrices S1, S2 (upper triangle,
row-major).  Node i stores phi_i S1 + lambda_i phi_i S2 where phi_i is the
Vandermonde row of the node's evaluation point and lambda_i its (k-1)-th
power; equivalently the coefficient vector of the polynomial
g_i(z) = s1(x_i, z) + x_i^{k-1} s2(x_i, z).

Repair of node f downloads the single evaluation g_h(a_f) from each of
d = 2(k-1) helpers.  The intermediate-processing form lifts each helper
symbol through Lagrange coefficients over the helper set, so partial sums
of the lifted l-vectors are additive shares of the lost content.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConstructionError, ParameterError, RepairError
from ..gf import BinaryField, Field, Matrix, binary_field
from .base import LinearCode


def _tri_index(a: int, b: int, size: int) -> int:
    """Index of (a,b), a<=b, in the row-major upper triangle of a size x size grid."""
    if a > b:
        a, b = b, a
    return a * size - a * (a - 1) // 2 + (b - a)


def default_pm_field(n: int, k: int) -> BinaryField:
    """Smallest GF(2^w) with n usable points (distinct nonzero, distinct
    (k-1)-th powers)."""
    for w in range(2, 17):
        q = 1 << w
        if (q - 1) // math.gcd(k - 1, q - 1) >= n:
            return binary_field(w)
    raise ParameterError(f"no supported field offers {n} usable points for k={k}")


def select_points(field: Field, n: int, k: int) -> list[int]:
    """First n nonzero elements (in code order) with distinct (k-1)-th powers."""
    pts, seen = [], set()
    for x in range(1, field.q):
        lam = field.pow_s(x, k - 1)
        if lam not in seen:
            seen.add(lam)
            pts.append(x)
        if len(pts) == n:
            return pts
    raise ConstructionError(f"field {field} has only {len(pts)} usable points, need {n}")


class PmCode(LinearCode):
    """Product-matrix MSR code instance."""

    def __init__(self, n: int, k: int, field: Field | None = None, points=None):
        if k < 2:
            raise ParameterError("product-matrix codes need k >= 2")
        self.n = n
        self.k = k
        self.d = 2 * (k - 1)
        self.l = k - 1
        self.message_dim = k * (k - 1)
        if self.d > n - 1:
            raise ParameterError(f"need n >= d+1 = {self.d + 1}, got n={n}")
        self.field = field if field is not None else default_pm_field(n, k)
        if points is None:
            points = select_points(self.field, n, k)
        self.points = [self.field.normalize(x) for x in points]
        if len(self.points) != n:
            raise ParameterError(f"need {n} evaluation points")
        if len(set(self.points)) != n or 0 in self.points:
            raise ConstructionError("evaluation points must be distinct and nonzero")
        self.lams = [self.field.pow_s(x, k - 1) for x in self.points]
        if len(set(self.lams)) != n:
            raise ConstructionError("points must have distinct (k-1)-th powers")
        self._gen_cache: dict[int, Matrix] = {}
        self._lift_cache: dict = {}

    def __repr__(self):
        return f"PmCode(n={self.n}, k={self.k}, d={self.d}, l={self.l}, {self.field})"

    def beta(self, h: int, f: int) -> int:
        return 1

    # -- encoding -------------------------------------------------------------
    def _phi(self, i: int) -> list[int]:
        x = self.points[i]
        out = [1]
        for _ in range(self.l - 1):
            out.append(self.field.mul_s(out[-1], x))
        return out

    def node_generator(self, i: int) -> Matrix:
        if i not in self._gen_cache:
            F = self.field
            size = self.l
            phi = self._phi(i)
            lam = self.lams[i]
            half = self.message_dim // 2
            gen = np.zeros((self.l, self.message_dim), dtype=np.int64)
            for j in range(self.l):
                for a in range(size):
                    idx = _tri_index(a, j, size)
                    gen[j, idx] = F.add_s(int(gen[j, idx]), phi[a])
                    gen[j, half + idx] = F.add_s(int(gen[j, half + idx]), F.mul_s(lam, phi[a]))
            self._gen_cache[i] = Matrix(F, gen)
        return self._gen_cache[i]

    def pack_file(self, s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
        """Flatten two symmetric matrices into the file layout."""
        size = self.l
        out = []
        for mat in (s1, s2):
            for a in range(size):
                for b in range(a, size):
                    out.append(int(mat[a, b]))
        return np.array(out, dtype=np.int64)

    def unpack_file(self, file) -> tuple[np.ndarray, np.ndarray]:
        size = self.l
        half = self.message_dim // 2
        mats = []
        for offset in (0, half):
            m = np.zeros((size, size), dtype=np.int64)
            for a in range(size):
                for b in range(a, size):
                    m[a, b] = m[b, a] = file[offset + _tri_index(a, b, size)]
            mats.append(m)
        return mats[0], mats[1]

    # -- repair ----------------------------------------------------------------
    def repair_map(self, h: int, f: int, content) -> np.ndarray:
        if h == f:
            raise ParameterError("helper equals the failed node")
        val = self.field.poly_eval(content, self.points[f])
        return np.array([int(val)], dtype=np.int64)

    def helper_generator(self, h: int, f: int) -> Matrix:
        if h == f:
            raise ParameterError("helper equals the failed node")
        F = self.field
        v = np.array(self._phi_at(self.points[f], self.l), dtype=np.int64)
        return Matrix(F, F.matmul(v[None, :], self.node_generator(h).a))

    def _phi_at(self, x: int, length: int) -> list[int]:
        out = [1]
        for _ in range(length - 1):
            out.append(self.field.mul_s(out[-1], x))
        return out

    def af_repair(self, f: int, symbols: dict[int, np.ndarray]) -> np.ndarray:
        """Solve the full Vandermonde system from d helper evaluations."""
        helpers = sorted(symbols)
        if len(helpers) != self.d or f in helpers:
            raise RepairError(f"need {self.d} distinct helpers excluding {f}")
        F = self.field
        psi = Matrix.vandermonde(F, [self.points[h] for h in helpers], self.d)
        rhs = np.array([int(np.asarray(symbols[h]).reshape(-1)[0]) for h in helpers], dtype=np.int64)
        u = psi.solve(Matrix(F, rhs[:, None])).a[:, 0]
        s1pf, s2pf = u[: self.l], u[self.l :]
        return F.add(s1pf, F.mul(self.lams[f], s2pf))

    # -- intermediate processing -------------------------------------------------
    def lagrange_lift(self, f: int, helpers) -> dict[int, np.ndarray]:
        """Per-helper l-vectors turning g_h(a_f) into an additive share."""
        helpers = sorted(set(helpers))
        key = (f, tuple(helpers))
        if key in self._lift_cache:
            return self._lift_cache[key]
        if len(helpers) != self.d or f in helpers:
            raise RepairError(f"lifting needs the full helper set of size {self.d}")
        F = self.field
        pts = {h: self.points[h] for h in helpers}
        af_pow = F.pow_s(self.points[f], self.k - 1)
        lift = {}
        for h in helpers:
            # l^{(h)}(z) = prod_{i != h} (z - a_i) / (a_h - a_i)
            num = [1]
            denom = 1
            for i in helpers:
                if i == h:
                    continue
                num = _poly_mul_linear(F, num, pts[i])
                denom = F.mul_s(denom, F.add_s(pts[h], F.neg_s(pts[i])))
            scale = F.inv_s(denom)
            coeffs = [F.mul_s(scale, c) for c in num] + [0] * (self.d - len(num))
            col = [
                F.add_s(coeffs[j], F.mul_s(af_pow, coeffs[self.k - 1 + j]))
                for j in range(self.l)
            ]
            lift[h] = np.array(col, dtype=np.int64)
        self._lift_cache[key] = lift
        return lift

    def ip_combine(self, values: dict[int, np.ndarray], f: int, helpers, subset=None, partial=None):
        """Additive share xi(f, A) of node f's content from helpers in A."""
        lift = self.lagrange_lift(f, helpers)
        out = np.zeros(self.l, dtype=np.int64) if partial is None else np.asarray(partial).copy()
        for h in subset if subset is not None else sorted(values):
            v = int(np.asarray(values[h]).reshape(-1)[0])
            out = self.field.add(out, self.field.mul(v, lift[h]))
        return out

    # -- data retrieval -----------------------------------------------------------
    def reconstruct(self, indices, contents) -> np.ndarray:
        """Product-matrix reconstruction from any k nodes.

        Splits the pairwise mixed evaluations through the distinct lambdas,
        then peels S1 and S2 off the Vandermonde structure.
        """
        indices = list(indices)
        if len(set(indices)) != self.k:
            raise ParameterError(f"need {self.k} distinct node indices")
        F = self.field
        C = np.stack([F.asarray(c) for c in contents])
        phi = np.stack([self._phi(i) for i in indices])  # k x l
        theta = F.matmul(C, phi.T.copy())  # k x k, entry ij = g_i(a_j)-ish mix
        k = self.k
        P = np.zeros((k, k), dtype=np.int64)
        Q = np.zeros((k, k), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                if i == j:
                    continue
                li, lj = self.lams[indices[i]], self.lams[indices[j]]
                # theta[i,j] = p + li*q ; theta[j,i] = p + lj*q  (P, Q symmetric)
                det = F.add_s(li, F.neg_s(lj))
                q = F.div_s(F.add_s(theta[i, j], F.neg_s(int(theta[j, i]))), det)
                p = F.add_s(int(theta[i, j]), F.neg_s(F.mul_s(li, q)))
                P[i, j], Q[i, j] = p, q
        s1 = self._peel(indices, phi, P)
        s2 = self._peel(indices, phi, Q)
        return self.pack_file(s1, s2)

    def _peel(self, indices, phi, mixed) -> np.ndarray:
        """Recover the symmetric S from off-diagonal entries of Phi S Phi^T."""
        F = self.field
        k = self.k
        cols = []
        for j in range(k):
            others = [i for i in range(k) if i != j]
            sub = Matrix(F, phi[others])  # (k-1) x l Vandermonde, invertible
            rhs = Matrix(F, mixed[others, j][:, None])
            cols.append(sub.solve(rhs).a[:, 0])
        # S @ Phi_use^T = stacked  =>  S = Phi_use^{-1} @ stacked^T (S symmetric)
        use = list(range(self.l))
        stacked = np.stack([cols[j] for j in use], axis=1)  # l x l
        return Matrix(F, phi[use]).solve(Matrix(F, stacked.T.copy())).a


def _poly_mul_linear(field: Field, coeffs: list[int], root: int) -> list[int]:
    """Multiply a coefficient list by (z - root)."""
    out = [0] * (len(coeffs) + 1)
    for i, c in enumerate(coeffs):
        out[i + 1] = field.add_s(out[i + 1], c)
        out[i] = field.add_s(out[i], field.neg_s(field.mul_s(c, root)))
    return out


class ShortenedPmCode(LinearCode):
    """[n, k, d] MSR code with d > 2(k-1), by shortening a larger PM code.

    Codewords are the parent codewords whose last s node contents vanish;
    those nodes become virtual helpers that always contribute zero.
    """

    def __init__(self, n: int, k: int, d: int, field: Field | None = None):
        if d < 2 * (k - 1):
            raise ParameterError("shortening only reaches d >= 2(k-1)")
        s = d - 2 * (k - 1)
        kp = k + s
        self.parent = PmCode(n + s, kp, field=field)
        self.s = s
        self.n, self.k, self.d = n, k, d
        self.l = self.parent.l
        self.field = self.parent.field
        # message space: parent files with zero content on the virtual nodes
        if s:
            rows = np.vstack([self.parent.node_generator(n + i).a for i in range(s)])
            self._basis = Matrix(self.field, rows).nullspace().a  # M_parent x M_new
        else:
            self._basis = np.eye(self.parent.message_dim, dtype=np.int64)
        self.message_dim = self._basis.shape[1]
        assert self.message_dim == self.k * self.l
        self._gen_cache: dict[int, Matrix] = {}

    def __repr__(self):
        return f"ShortenedPmCode(n={self.n}, k={self.k}, d={self.d}, l={self.l}, {self.field})"

    def beta(self, h: int, f: int) -> int:
        return 1

    def node_generator(self, i: int) -> Matrix:
        if i not in self._gen_cache:
            par = self.parent.node_generator(i)
            self._gen_cache[i] = Matrix(self.field, self.field.matmul(par.a, self._basis))
        return self._gen_cache[i]

    def helper_generator(self, h: int, f: int) -> Matrix:
        par = self.parent.helper_generator(h, f)
        return Matrix(self.field, self.field.matmul(par.a, self._basis))

    def repair_map(self, h: int, f: int, content) -> np.ndarray:
        return self.parent.repair_map(h, f, content)

    def af_repair(self, f: int, symbols: dict[int, np.ndarray]) -> np.ndarray:
        if len(symbols) != self.d:
            raise RepairError(f"need {self.d} helpers")
        full = dict(symbols)
        for i in range(self.s):
            full[self.n + i] = np.zeros(1, dtype=np.int64)
        return self.parent.af_repair(f, full)
