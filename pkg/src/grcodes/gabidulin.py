"""Gabidulin (maximum rank distance) codes over F_{q^m}.

A message of K tower elements defines a linearized polynomial of q-degree
below K; the codeword is its evaluation at N points linearly independent
over the base field.  Errors are measured by the base-field rank of their
coordinate expansion, and up to floor((N-K)/2) rank errors are corrected
by a Welch-Berlekamp style interpolation: find linearized V, P with
V(y_i) = P(g_i) at every point, then recover the message as the left
quotient of P by V.
"""

from __future__ import annotations

import numpy as np

from .errors import DecodingFailure, ParameterError
from .gf import TowerField

__all__ = ["GabidulinCode", "random_rank_error"]


class GabidulinCode:
    def __init__(self, tower: TowerField, N: int, K: int, points=None):
        if not 1 <= K <= N:
            raise ParameterError("need 1 <= K <= N")
        if N > tower.m:
            raise ParameterError(f"need N <= m = {tower.m} independent points")
        self.tower = tower
        self.N, self.K = N, K
        self.min_distance = N - K + 1
        self.radius = (N - K) // 2
        if points is None:
            # powers of the primitive element of the tower's polynomial basis
            pts = tower.zero((N,))
            for i in range(N):
                pts[i, i] = 1
            points = pts
        self.points = np.asarray(points, dtype=np.int64).reshape(N, tower.m)
        if tower.rank_q(self.points) != N:
            raise ParameterError("evaluation points must be linearly independent over F_q")

    def __repr__(self):
        return f"GabidulinCode(N={self.N}, K={self.K}, D={self.min_distance}, {self.tower})"

    def encode(self, message) -> np.ndarray:
        """(K, m) message coefficients -> (N, m) evaluations."""
        message = np.asarray(message, dtype=np.int64).reshape(self.K, self.tower.m)
        return self.tower.linearized_eval(message, self.points)

    def rank_of(self, vector) -> int:
        return self.tower.rank_q(np.asarray(vector, dtype=np.int64).reshape(self.N, self.tower.m))

    def decode(self, received) -> np.ndarray:
        """Correct up to ``radius`` rank errors; raises DecodingFailure beyond."""
        T = self.tower
        y = np.asarray(received, dtype=np.int64).reshape(self.N, T.m)
        tau = self.radius
        nv, np_ = tau + 1, self.K + tau
        # interpolation system: sum_j V_j y^{q^j} + sum_j P_j g^{q^j} = 0
        cols = np.zeros((self.N, nv + np_, T.m), dtype=np.int64)
        cur = y.copy()
        for j in range(nv):
            cols[:, j] = cur
            if j + 1 < nv:
                cur = T.frob(cur)
        cur = self.points.copy()
        for j in range(np_):
            cols[:, nv + j] = cur
            if j + 1 < np_:
                cur = T.frob(cur)
        kernel = T.nullspace_vector(cols)
        if kernel is None:
            raise DecodingFailure("interpolation system has no nontrivial solution")
        V = kernel[:nv]
        P = kernel[nv:]
        message = self._left_quotient(P, V)
        reenc = self.encode(message)
        if self.rank_of(T.add(reenc, y)) > tau:
            raise DecodingFailure("residual rank exceeds the correction radius")
        return message

    def _left_quotient(self, P, V) -> np.ndarray:
        """Solve P = V o f for the q-degree < K linearized polynomial f."""
        T = self.tower
        vdeg = -1
        for j in range(V.shape[0] - 1, -1, -1):
            if V[j].any():
                vdeg = j
                break
        if vdeg < 0:
            raise DecodingFailure("zero annihilator in the interpolation solution")
        v_inv = T.inv(V[vdeg])
        f = T.zero((self.K,))
        for i in range(self.K - 1, -1, -1):
            s = i + vdeg
            acc = P[s].copy() if s < P.shape[0] else T.zero()
            for j in range(vdeg):
                idx = s - j
                if i < idx < self.K:
                    acc = T.add(acc, T.mul(V[j], T.frob(f[idx], j)))
            f[i] = T.frob(T.mul(acc, v_inv), -vdeg)
        return f

    def brute_force_decode(self, received):
        """Nearest-codeword search in rank distance; tiny instances only.

        Returns (message, distance, unique_minimum).
        """
        T = self.tower
        total = (T.base.q ** T.m) ** self.K
        if total > 4096:
            raise ParameterError("brute-force search is limited to 4096 codewords")
        y = np.asarray(received, dtype=np.int64).reshape(self.N, T.m)
        best, best_rank, ties = None, None, 0
        for idx in range(total):
            msg = T.zero((self.K,))
            v = idx
            for i in range(self.K):
                msg[i] = T.from_int(v % (T.base.q**T.m))
                v //= T.base.q**T.m
            r = self.rank_of(T.add(self.encode(msg), y))
            if best_rank is None or r < best_rank:
                best, best_rank, ties = msg, r, 1
            elif r == best_rank:
                ties += 1
        return best, best_rank, ties == 1


def random_rank_error(tower: TowerField, N: int, rank: int, rng) -> np.ndarray:
    """Error vector of exact base-field rank ``rank`` as an (N, m) array."""
    if rank == 0:
        return tower.zero((N,))
    if rank > min(N, tower.m):
        raise ParameterError("rank exceeds the ambient dimensions")
    while True:
        basis = tower.random_elements(rng, (rank,))
        if tower.rank_q(basis) != rank:
            continue
        coeffs = tower.base.random_elements(rng, (N, rank))
        err = tower.zero((N,))
        for j in range(rank):
            err = tower.add(err, tower.scalar_mul(coeffs[:, j], np.broadcast_to(basis[j], (N, tower.m))))
        if tower.rank_q(err) == rank:
            return err
