"""Systematic view of an MSR code by precoding through designated nodes.

At the minimum-storage point the stacked node maps of any k nodes form a
square invertible system, so pushing the raw data through its inverse
makes those k nodes store the data verbatim.  Repair machinery is
untouched: the per-helper maps act on stored contents, and the lifting
matrices solve an equation between generator rows that precoding
multiplies on the right without changing its solutions.
"""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError
from ..gf import Matrix
from .base import LinearCode


class SystematicCode(LinearCode):
    def __init__(self, inner: LinearCode, systematic_nodes=None):
        self.inner = inner
        self.systematic_nodes = tuple(
            systematic_nodes if systematic_nodes is not None else range(inner.k)
        )
        if len(set(self.systematic_nodes)) != inner.k:
            raise ParameterError(f"need {inner.k} distinct systematic nodes")
        self.field = inner.field
        self.n, self.k, self.d, self.l = inner.n, inner.k, inner.d, inner.l
        self.message_dim = inner.message_dim
        if self.message_dim != inner.k * inner.l:
            raise ParameterError("systematic precoding needs M = k*l")
        stackedgen = np.vstack([inner.node_generator(i).a for i in self.systematic_nodes])
        self._pre = Matrix(self.field, stackedgen).inv()

    def __repr__(self):
        return f"SystematicCode({self.inner!r}, nodes={self.systematic_nodes})"

    def file_from_data(self, data) -> np.ndarray:
        data = self.field.asarray(data)
        return self.field.matmul(self._pre.a, data[:, None])[:, 0]

    def encode(self, data) -> np.ndarray:
        cw = self.inner.encode(self.file_from_data(data))
        for r, i in enumerate(self.systematic_nodes):
            expected = self.field.asarray(data)[r * self.l : (r + 1) * self.l]
            assert np.array_equal(cw[i], expected)
        return cw

    def node_generator(self, i: int) -> Matrix:
        return Matrix(self.field, self.field.matmul(self.inner.node_generator(i).a, self._pre.a))

    def beta(self, h: int, f: int) -> int:
        return self.inner.beta(h, f)

    def repair_map(self, h: int, f: int, content) -> np.ndarray:
        return self.inner.repair_map(h, f, content)

    def reconstruct(self, indices, contents) -> np.ndarray:
        file = self.inner.reconstruct(indices, contents)
        out = []
        for i in self.systematic_nodes:
            out.append(self.field.matmul(self.inner.node_generator(i).a, file[:, None])[:, 0])
        return np.concatenate(out)
