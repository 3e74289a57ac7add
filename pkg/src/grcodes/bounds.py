"""Information-theoretic bound calculators for generalized regenerating codes.

Everything here is exact integer arithmetic on symbol counts.  Download
sets B are accepted in any order; sorting happens internally, matching
the freedom to permute helper assignments.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ParameterError


@dataclass(frozen=True)
class CodeParams:
    """Parameter tuple (n, k, d, l, B, M) of a generalized regenerating code."""

    n: int
    k: int
    d: int
    l: int
    B: tuple[int, ...]
    M: int

    def __post_init__(self):
        object.__setattr__(self, "B", tuple(int(b) for b in self.B))
        if not (1 <= self.k <= self.d <= self.n - 1):
            raise ParameterError(f"need 1 <= k <= d <= n-1, got k={self.k}, d={self.d}, n={self.n}")
        if len(self.B) != self.d:
            raise ParameterError(f"B must have d={self.d} entries, got {len(self.B)}")
        if any(b < 0 for b in self.B):
            raise ParameterError("downloads must be nonnegative")
        if self.l < 1:
            raise ParameterError("node size must be >= 1")

    @classmethod
    def uniform(cls, n, k, d, l, beta, M=None):
        if M is None:
            M = k * l
        return cls(n, k, d, l, (beta,) * d, M)

    def is_msr(self) -> bool:
        return self.l == delta_r(self.B, self.d - self.k + 1) and self.M == self.k * self.l


def delta_r(B, r: int) -> int:
    """Sum of the r smallest downloads in B."""
    B = list(B)
    if not 0 <= r <= len(B):
        raise ParameterError(f"r={r} out of range for |B|={len(B)}")
    return sum(sorted(B)[:r])


def omega_r(B, r: int) -> int:
    """Sum of the r largest downloads in B."""
    B = list(B)
    if not 0 <= r <= len(B):
        raise ParameterError(f"r={r} out of range for |B|={len(B)}")
    return sum(sorted(B, reverse=True)[:r])


def cutset_bound(p: CodeParams) -> int:
    """Upper bound on the file size: sum_{i=0}^{k-1} min(l, Delta_{d-i}(B))."""
    return sum(min(p.l, delta_r(p.B, p.d - i)) for i in range(p.k))


def is_within_cutset(p: CodeParams) -> bool:
    return p.M <= cutset_bound(p)


def msr_mbr_points(n: int, k: int, d: int, B) -> tuple[int, int]:
    """Node sizes at the minimum-storage and minimum-bandwidth corner points."""
    CodeParams(n, k, d, 1, B, 1)  # validates the parameter ranges
    return delta_r(B, d - k + 1), delta_r(B, d)


def ip_lower_bound(p: CodeParams, at_msr: bool = False) -> int:
    """Minimum data any helper subset of size >= d-k+1 must emit for repair.

    With ``at_msr`` set, asserts the bound collapses to the node size l.
    """
    val = p.M - sum(min(p.l, delta_r(p.B, p.d - i)) for i in range(p.k - 1))
    if at_msr:
        if not p.is_msr():
            raise ParameterError("at_msr requested but parameters are not MSR")
        assert val == p.l
    return val


def functional_ip_lower_bound(p: CodeParams) -> int:
    """Same bound with the file size replaced by its cutset maximum."""
    return ip_lower_bound(replace(p, M=cutset_bound(p)))


def adversarial_cut_bound(p: CodeParams, t: int) -> int:
    """Minimum cut around any helper superset of the t corrupted nodes."""
    if t < 0:
        raise ParameterError("adversary count must be >= 0")
    return ip_lower_bound(p) + 2 * omega_r(p.B, t)
