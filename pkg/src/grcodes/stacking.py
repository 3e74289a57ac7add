"""Stacked MSR construction for arbitrary per-helper download sets.

Given sorted downloads B = (b_1 <= ... <= b_d), every index j <= d-k+1
where b_j jumps above b_{j-1} contributes a component MSR code with repair
degree d-j+1 and per-helper download b_j - b_{j-1}; stacking them yields a
code whose node size is exactly the sum of the d-k+1 smallest downloads,
i.e. the minimum-storage point for B.

Components are realized as parallel codewords of unit-download MSR codes:
the scalar MDS family covers degree k, product-matrix codes cover degree
2(k-1), and shortened product-matrix codes cover every degree above that.
Degrees strictly between k and 2(k-1) have no registered family and raise
UnrealizableComponentError (the decomposition itself is still returned by
build_stack for bandwidth analysis).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .bounds import delta_r
from .codes import LinearCode, MdsUnitCode, PmCode, ShortenedPmCode, derive_ip_matrices
from .errors import ParameterError, RepairError, UnrealizableComponentError
from .gf import Field, Matrix, binary_field


def unit_msr_code(n: int, k: int, degree: int, field: Field | None = None) -> LinearCode:
    """Unit-download MSR instance for the requested repair degree."""
    if degree == k:
        return MdsUnitCode(n, k, field=field)
    if degree == 2 * (k - 1):
        return PmCode(n, k, field=field)
    if degree > 2 * (k - 1):
        return ShortenedPmCode(n, k, degree, field=field)
    raise UnrealizableComponentError(
        f"no registered MSR family for degree {degree} with k={k} "
        f"(covered: {k} and >= {2 * (k - 1)})"
    )


def _realize_components(n: int, k: int, degrees: list[int], field: Field | None):
    """Instantiate unit codes over one shared field.

    With no field given, scans GF(2^w) upward until every degree's family
    accepts it (point-count constraints differ per family).
    """
    from .errors import ConstructionError

    def attempt(fld):
        codes, reasons = [], []
        for deg in degrees:
            try:
                codes.append(unit_msr_code(n, k, deg, field=fld))
                reasons.append(None)
            except UnrealizableComponentError as exc:
                codes.append(None)
                reasons.append(str(exc))
        return codes, reasons

    if field is not None:
        return attempt(field)
    last_exc = None
    for w in range(2, 17):
        try:
            return attempt(binary_field(w))
        except ConstructionError as exc:
            last_exc = exc
    raise ParameterError(f"no single field fits all stack components: {last_exc}")


@dataclass
class StackComponent:
    j: int
    copies: int  # b_j - b_{j-1}
    degree: int  # d - j + 1
    l_unit: int  # per-copy node size
    l_total: int  # copies * l_unit
    code: LinearCode | None
    gap_reason: str | None = None


class StackSpec:
    """Construction plan plus (when realizable) the live component codes."""

    def __init__(self, n: int, k: int, d: int, B, field: Field | None = None, realize: bool = True):
        if len(B) != d:
            raise ParameterError(f"B must have d={d} entries")
        if any(b <= 0 for b in B):
            raise ParameterError("downloads must be positive")
        if not 1 <= k <= d <= n - 1:
            raise ParameterError("need 1 <= k <= d <= n-1")
        self.n, self.k, self.d = n, k, d
        self.B = tuple(sorted(int(b) for b in B))
        r = d - k + 1
        self.mu = tuple(
            1 if self.B[j - 1] > (self.B[j - 2] if j > 1 else 0) else 0 for j in range(1, r + 1)
        )
        self.S = tuple(j for j in range(1, r + 1) if self.mu[j - 1])
        degrees = []
        gaps_copies = []
        for j in self.S:
            copies = self.B[j - 1] - (self.B[j - 2] if j > 1 else 0)
            degrees.append(d - j + 1)
            gaps_copies.append((j, copies))
        codes: list = [None] * len(self.S)
        reasons: list = [None] * len(self.S)
        if realize:
            codes, reasons = _realize_components(n, k, degrees, field)
        self.components = [
            StackComponent(j, copies, deg, deg - k + 1, copies * (deg - k + 1), code, reason)
            for (j, copies), deg, code, reason in zip(gaps_copies, degrees, codes, reasons)
        ]
        self.l = sum(c.l_total for c in self.components)
        self.M = self.k * self.l
        assert self.l == delta_r(self.B, r), "node-size identity violated"
        # slice boundaries of each (component, copy) inside a node vector
        self._slices = []
        pos = 0
        for c in self.components:
            for copy in range(c.copies):
                self._slices.append((c, copy, pos, pos + c.l_unit))
                pos += c.l_unit

    @property
    def realizable(self) -> bool:
        return all(c.code is not None for c in self.components)

    def gaps(self) -> list[str]:
        return [c.gap_reason for c in self.components if c.gap_reason]

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "k": self.k,
                "d": self.d,
                "B": list(self.B),
                "mu": list(self.mu),
                "S": list(self.S),
                "l": self.l,
                "M": self.M,
                "components": [
                    {
                        "j": c.j,
                        "copies": c.copies,
                        "degree": c.degree,
                        "l_unit": c.l_unit,
                        "l_total": c.l_total,
                        "family": type(c.code).__name__ if c.code else None,
                        "gap": c.gap_reason,
                    }
                    for c in self.components
                ],
                "boundaries": [[s, e] for _, _, s, e in self._slices],
            },
            indent=2,
        )

    def __repr__(self):
        return f"StackSpec(n={self.n}, k={self.k}, d={self.d}, B={self.B}, l={self.l})"


def build_stack(n: int, k: int, d: int, B, field: Field | None = None, realize: bool = True) -> StackSpec:
    return StackSpec(n, k, d, B, field=field, realize=realize)


class StackedCode(LinearCode):
    """Symbol-level stacked code; requires every component to be realizable."""

    def __init__(self, spec: StackSpec):
        if not spec.realizable:
            raise UnrealizableComponentError("; ".join(spec.gaps()))
        self.spec = spec
        self.n, self.k, self.d, self.l = spec.n, spec.k, spec.d, spec.l
        self.message_dim = spec.M
        fields = {id(c.code.field) for c in spec.components}
        if len(fields) != 1:
            raise ParameterError("component codes must share one field")
        self.field = spec.components[0].code.field
        self._ip_cache: dict = {}

    def __repr__(self):
        return f"StackedCode({self.spec!r})"

    def _component_ips(self, comp: StackComponent, f: int, part: tuple[int, ...]):
        key = (comp.j, f, part)
        if key not in self._ip_cache:
            self._ip_cache[key] = derive_ip_matrices(comp.code, f, part)
        return self._ip_cache[key]

    # file layout: per (component, copy) blocks of size k * l_unit, in slice order
    def _file_slices(self):
        pos = 0
        for comp, copy, s, e in self.spec._slices:
            mdim = comp.code.message_dim
            yield comp, copy, s, e, pos, pos + mdim
            pos += mdim

    def encode(self, file) -> np.ndarray:
        file = self.field.asarray(file)
        if file.shape != (self.message_dim,):
            raise ParameterError(f"file must have {self.message_dim} symbols")
        out = np.zeros((self.n, self.l), dtype=np.int64)
        for comp, copy, s, e, fs, fe in self._file_slices():
            cw = comp.code.encode(file[fs:fe])
            out[:, s:e] = cw
        return out

    def node_generator(self, i: int) -> Matrix:
        gen = np.zeros((self.l, self.message_dim), dtype=np.int64)
        for comp, copy, s, e, fs, fe in self._file_slices():
            gen[s:e, fs:fe] = comp.code.node_generator(i).a
        return Matrix(self.field, gen)

    def reconstruct(self, indices, contents) -> np.ndarray:
        indices = list(indices)
        contents = [self.field.asarray(c) for c in contents]
        out = np.zeros(self.message_dim, dtype=np.int64)
        for comp, copy, s, e, fs, fe in self._file_slices():
            out[fs:fe] = comp.code.reconstruct(indices, [c[s:e] for c in contents])
        return out

    # -- repair ------------------------------------------------------------------
    def default_tau(self, helpers) -> dict[int, int]:
        """Identity assignment on the sorted helper list (index j=1 first)."""
        helpers = sorted(helpers)
        return {h: j + 1 for j, h in enumerate(helpers)}

    def _check_tau(self, f: int, tau: dict[int, int]):
        if len(tau) != self.d or sorted(tau.values()) != list(range(1, self.d + 1)):
            raise RepairError("tau must be a bijection from the d helpers onto 1..d")
        if f in tau:
            raise RepairError("failed node cannot be a helper")

    def component_helpers(self, comp: StackComponent, tau: dict[int, int]) -> list[int]:
        """Helpers participating in component j: those with tau(h) >= j."""
        return sorted(h for h, j in tau.items() if j >= comp.j)

    def helper_payload(self, codeword, h: int, f: int, tau: dict[int, int]) -> dict:
        """Per-(component, copy) symbols helper h sends; b_{tau(h)} in total."""
        payload = {}
        for comp, copy, s, e, *_ in self._file_slices():
            if tau[h] >= comp.j:
                content = np.asarray(codeword[h][s:e], dtype=np.int64)
                payload[(comp.j, copy)] = comp.code.repair_map(h, f, content)
        return payload

    def download_count(self, h: int, tau: dict[int, int]) -> int:
        return sum(
            comp.copies for comp in self.spec.components if tau[h] >= comp.j
        )

    def repair(self, codeword, f: int, helpers, tau: dict[int, int] | None = None):
        """Exact repair; returns (content, per-helper download counts)."""
        helpers = sorted(helpers)
        if tau is None:
            tau = self.default_tau(helpers)
        self._check_tau(f, tau)
        payloads = {h: self.helper_payload(codeword, h, f, tau) for h in helpers}
        out = np.zeros(self.l, dtype=np.int64)
        for comp, copy, s, e, *_ in self._file_slices():
            part = self.component_helpers(comp, tau)
            syms = {h: payloads[h][(comp.j, copy)] for h in part}
            out[s:e] = comp.code.af_repair(f, syms)
        downloads = {h: self.download_count(h, tau) for h in helpers}
        assert sorted(downloads.values()) == list(self.spec.B)
        return out, downloads

    def ip_share(self, codeword, f: int, subset, helpers, tau: dict[int, int] | None = None):
        """Compress subset A's data into exactly l symbols (additive share).

        Requires |A| >= d-k+1; below that the compression is not gainful
        and the scheme forwards raw symbols instead.
        """
        if len(set(subset)) < self.d - self.k + 1:
            raise RepairError(
                f"IP needs at least d-k+1 = {self.d - self.k + 1} helpers, got {len(set(subset))}"
            )
        return self._ip_partial(codeword, f, subset, helpers, tau)

    def _ip_partial(self, codeword, f: int, subset, helpers, tau: dict[int, int] | None = None):
        helpers = sorted(helpers)
        if tau is None:
            tau = self.default_tau(helpers)
        self._check_tau(f, tau)
        subset = sorted(subset)
        if any(h not in tau for h in subset):
            raise RepairError("subset must be contained in the helper set")
        share = np.zeros(self.l, dtype=np.int64)
        for comp, copy, s, e, *_ in self._file_slices():
            part = self.component_helpers(comp, tau)
            ips = self._component_ips(comp, f, tuple(part))
            sub = [h for h in subset if h in part]
            syms = {
                h: self.helper_payload(codeword, h, f, tau)[(comp.j, copy)] for h in sub
            }
            share[s:e] = ips.combine(syms, subset=sub)
        return share

    def ip_repair(self, codeword, f: int, subset, helpers, tau: dict[int, int] | None = None):
        """Repair from an IP share for A plus raw symbols from the rest."""
        helpers = sorted(helpers)
        if tau is None:
            tau = self.default_tau(helpers)
        share = self._ip_partial(codeword, f, subset, helpers, tau)
        rest = [h for h in helpers if h not in set(subset)]
        out = share.copy()
        for comp, copy, s, e, *_ in self._file_slices():
            part = self.component_helpers(comp, tau)
            ips = self._component_ips(comp, f, tuple(part))
            sub = [h for h in rest if h in part]
            syms = {
                h: self.helper_payload(codeword, h, f, tau)[(comp.j, copy)] for h in sub
            }
            out[s:e] = self.field.add(out[s:e], ips.combine(syms, subset=sub))
        return out


class TauBoundStackedCode(LinearCode):
    """View of a stacked code with a fixed failed node and helper assignment.

    Exposes per-helper generator matrices (the helper map is only linear
    once tau is pinned), which is what the generic IP derivation and the
    adversarial repair layer consume.
    """

    def __init__(self, stack: StackedCode, f: int, tau: dict[int, int]):
        stack._check_tau(f, tau)
        self.stack = stack
        self.f = f
        self.tau = dict(tau)
        self.field = stack.field
        self.n, self.k, self.d, self.l = stack.n, stack.k, stack.d, stack.l
        self.message_dim = stack.message_dim

    def beta(self, h: int, f: int) -> int:
        return self.stack.download_count(h, self.tau)

    def node_generator(self, i: int) -> Matrix:
        return self.stack.node_generator(i)

    def helper_generator(self, h: int, f: int) -> Matrix:
        if f != self.f:
            raise ParameterError("this view is bound to a single failed node")
        rows = []
        for comp, copy, s, e, fs, fe in self.stack._file_slices():
            if self.tau[h] >= comp.j:
                block = np.zeros((1, self.message_dim), dtype=np.int64)
                block[:, fs:fe] = comp.code.helper_generator(h, f).a
                rows.append(block)
        return Matrix(self.field, np.vstack(rows))

    def repair_map(self, h: int, f: int, content) -> np.ndarray:
        if f != self.f:
            raise ParameterError("this view is bound to a single failed node")
        content = self.field.asarray(content)
        out = []
        for comp, copy, s, e, *_ in self.stack._file_slices():
            if self.tau[h] >= comp.j:
                out.append(comp.code.repair_map(h, f, content[s:e]))
        return np.concatenate(out)
