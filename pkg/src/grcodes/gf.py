"""Finite-field arithmetic and dense linear algebra.

Supports GF(2^w) for w <= 16 (elements encoded as integers whose bits are
polynomial coefficients) and odd prime fields GF(p).  On top of the base
fields, ``TowerField`` provides extensions F_{q^m} in a polynomial basis,
with linearized-polynomial evaluation used by the rank-metric code layer.

Heavy inner loops (multiplication, matmul, Gaussian elimination over
GF(2^w)) dispatch to the kernel backend selected in ``grcodes._kernels``.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from . import _kernels as K
from .errors import (
    FieldMismatchError,
    InconsistentSystemError,
    ParameterError,
    SingularMatrixError,
)

# Primitive polynomials for GF(2^w), bitmask including the leading term.
_PRIMITIVE_POLY = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}


def _clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials as bitmasks."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def _clmod(a: int, m: int) -> int:
    dm = m.bit_length() - 1
    while a.bit_length() - 1 >= dm and a:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def _verify_irreducible_gf2(modulus: int, w: int) -> None:
    """Reject a reducible modulus for GF(2^w).

    Checks for roots in GF(2) and trial-divides by every lower-degree
    polynomial up to degree w//2 (cheap for w <= 16).
    """
    if modulus.bit_length() - 1 != w:
        raise ParameterError(f"modulus degree {modulus.bit_length() - 1} != {w}")
    if w == 1:
        return
    if modulus & 1 == 0:
        raise ParameterError("modulus has root 0")
    if bin(modulus).count("1") % 2 == 0:
        raise ParameterError("modulus has root 1")
    for deg in range(2, w // 2 + 1):
        for low in range(1 << deg):
            divisor = (1 << deg) | low
            if _clmod(modulus, divisor) == 0:
                raise ParameterError(f"modulus divisible by {divisor:#b}")


class Field:
    """Base class: vectorized arithmetic on integer-coded elements."""

    p: int
    w: int
    q: int
    modulus: int | None

    # -- element helpers -------------------------------------------------
    def el(self, value: int) -> "FieldElement":
        return FieldElement(self, self.normalize(value))

    @property
    def zero(self) -> "FieldElement":
        return self.el(0)

    @property
    def one(self) -> "FieldElement":
        return self.el(1)

    def normalize(self, value: int) -> int:
        raise NotImplementedError

    def elements(self):
        return range(self.q)

    def random_elements(self, rng, shape, nonzero=False):
        if nonzero:
            return np.asarray(rng.integers(1, self.q, size=shape), dtype=np.int64)
        return np.asarray(rng.integers(0, self.q, size=shape), dtype=np.int64)

    # -- vectorized ops ---------------------------------------------------
    def asarray(self, a):
        arr = np.asarray(a, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.q):
            raise ParameterError("element code out of range")
        return arr

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        b = np.asarray(b, dtype=np.int64)
        if np.any(b == 0):
            raise ZeroDivisionError("division by zero field element")
        return self.mul(a, self.inv(b))

    def matmul(self, A, B):
        raise NotImplementedError

    def rref(self, M):
        raise NotImplementedError

    # -- scalar ops (python ints, for tight non-vectorized loops) ---------
    def add_s(self, a: int, b: int) -> int:
        raise NotImplementedError

    def neg_s(self, a: int) -> int:
        raise NotImplementedError

    def mul_s(self, a: int, b: int) -> int:
        raise NotImplementedError

    def inv_s(self, a: int) -> int:
        raise NotImplementedError

    def div_s(self, a: int, b: int) -> int:
        return self.mul_s(a, self.inv_s(b))

    def pow_s(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow_s(self.inv_s(a), -e)
        out, base = 1, a
        while e:
            if e & 1:
                out = self.mul_s(out, base)
            base = self.mul_s(base, base)
            e >>= 1
        return out

    # -- polynomial evaluation -------------------------------------------
    def poly_eval(self, coeffs, xs):
        """Horner evaluation of sum_j c_j x^j; broadcasts over xs."""
        coeffs = self.asarray(coeffs)
        if coeffs.size == 0:
            raise ParameterError("empty coefficient list")
        xs = self.asarray(xs)
        out = np.broadcast_to(coeffs[-1], xs.shape).copy()
        for c in coeffs[-2::-1]:
            out = self.add(self.mul(out, xs), c)
        return out

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)


class BinaryField(Field):
    """GF(2^w) with log/antilog tables; addition is XOR."""

    def __init__(self, w: int, modulus: int | None = None):
        if not 1 <= w <= 16:
            raise ParameterError("supported extension degrees: 1..16")
        self.p = 2
        self.w = w
        self.q = 1 << w
        self.modulus = modulus if modulus is not None else _PRIMITIVE_POLY[w]
        _verify_irreducible_gf2(self.modulus, w)
        self._build_tables()

    def _build_tables(self):
        q = self.q
        exp = [0] * (2 * (q - 1))
        log = [0] * q
        # find a generator; x (=2) works for the default primitive moduli
        gen = 2 if self.w > 1 else 1
        while True:
            x = 1
            seen = set()
            ok = True
            for i in range(q - 1):
                exp[i] = x
                log[x] = i
                if x in seen:
                    ok = False
                    break
                seen.add(x)
                x = self._slow_mul(x, gen)
            if ok and x == 1 and len(seen) == q - 1:
                break
            gen += 1
            if gen >= q:
                raise ParameterError("no primitive element found (modulus reducible?)")
        for i in range(q - 1, 2 * (q - 1)):
            exp[i] = exp[i - (q - 1)]
        self._exp_list = exp
        self._log_list = log
        self._exp = np.array(exp, dtype=np.int64)
        self._log = np.array(log, dtype=np.int64)

    def _slow_mul(self, a: int, b: int) -> int:
        return _clmod(_clmul(a, b), self.modulus)

    def normalize(self, value: int) -> int:
        if 0 <= value < self.q:
            return int(value)
        return _clmod(int(value), self.modulus)

    # vectorized
    def add(self, a, b):
        return np.bitwise_xor(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    sub = add

    def neg(self, a):
        return np.asarray(a, dtype=np.int64)

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        shape = np.broadcast_shapes(a.shape, b.shape)
        af = np.ascontiguousarray(np.broadcast_to(a, shape)).ravel()
        bf = np.ascontiguousarray(np.broadcast_to(b, shape)).ravel()
        return np.asarray(K.gf2_mul(af, bf, self._log, self._exp)).reshape(shape)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(self.q - 1) - self._log[a]]

    def matmul(self, A, B):
        A = np.ascontiguousarray(A, dtype=np.int64)
        B = np.ascontiguousarray(B, dtype=np.int64)
        return np.asarray(K.gf2_matmul(A, B, self._log, self._exp))

    def conv(self, a, b):
        """Batched polynomial product along the last axis."""
        a = np.ascontiguousarray(a, dtype=np.int64)
        b = np.ascontiguousarray(b, dtype=np.int64)
        batch = a.shape[:-1]
        a2 = a.reshape(-1, a.shape[-1])
        b2 = b.reshape(-1, b.shape[-1])
        out = np.asarray(K.gf2_conv(a2, b2, self._log, self._exp))
        return out.reshape(batch + (out.shape[-1],))

    def rref(self, M):
        M = np.ascontiguousarray(M, dtype=np.int64)
        R, piv = K.gf2_rref(M, self._log, self._exp)
        return np.asarray(R), list(piv)

    # scalar
    def add_s(self, a, b):
        return a ^ b

    def neg_s(self, a):
        return a

    def mul_s(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp_list[self._log_list[a] + self._log_list[b]]

    def inv_s(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp_list[self.q - 1 - self._log_list[a]]

    def __repr__(self):
        return f"GF(2^{self.w})" if self.w > 1 else "GF(2)"


class PrimeField(Field):
    """GF(p) for an odd prime p (or p=2), plain modular arithmetic."""

    def __init__(self, p: int):
        if p < 2 or any(p % r == 0 for r in range(2, int(p**0.5) + 1)):
            raise ParameterError(f"{p} is not prime")
        self.p = p
        self.w = 1
        self.q = p
        self.modulus = None

    def normalize(self, value: int) -> int:
        return int(value) % self.p

    def add(self, a, b):
        return (np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)) % self.p

    def sub(self, a, b):
        return (np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64)) % self.p

    def neg(self, a):
        return (-np.asarray(a, dtype=np.int64)) % self.p

    def mul(self, a, b):
        return (np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)) % self.p

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        flat = [pow(int(x), self.p - 2, self.p) for x in a.ravel()]
        return np.array(flat, dtype=np.int64).reshape(a.shape)

    def matmul(self, A, B):
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for i in range(A.shape[1]):
            out = (out + np.outer(A[:, i], B[i])) % self.p
        return out

    def rref(self, M):
        R = np.array(M, dtype=np.int64) % self.p
        rows, cols = R.shape
        pivots = []
        pr = 0
        for col in range(cols):
            if pr >= rows:
                break
            nz = np.nonzero(R[pr:, col])[0]
            if len(nz) == 0:
                continue
            piv = pr + nz[0]
            if piv != pr:
                R[[pr, piv]] = R[[piv, pr]]
            R[pr] = (R[pr] * pow(int(R[pr, col]), self.p - 2, self.p)) % self.p
            targets = np.nonzero(R[:, col])[0]
            targets = targets[targets != pr]
            if len(targets):
                R[targets] = (R[targets] - np.outer(R[targets, col], R[pr])) % self.p
            pivots.append(col)
            pr += 1
        return R, pivots

    def add_s(self, a, b):
        return (a + b) % self.p

    def neg_s(self, a):
        return (-a) % self.p

    def mul_s(self, a, b):
        return (a * b) % self.p

    def inv_s(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def __repr__(self):
        return f"GF({self.p})"


_FIELD_CACHE: dict = {}


def binary_field(w: int, modulus: int | None = None) -> BinaryField:
    key = ("2^", w, modulus)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = BinaryField(w, modulus)
    return _FIELD_CACHE[key]


def prime_field(p: int) -> PrimeField:
    key = ("p", p)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = PrimeField(p)
    return _FIELD_CACHE[key]


GF2 = binary_field(1)
GF16 = binary_field(4)


class FieldElement:
    """Integer-coded element bound to its field; equality is bitwise."""

    __slots__ = ("field", "val")

    def __init__(self, field: Field, val: int):
        self.field = field
        self.val = int(val)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other.val
        return self.field.normalize(other)

    def __add__(self, other):
        return FieldElement(self.field, self.field.add_s(self.val, self._coerce(other)))

    def __sub__(self, other):
        o = self._coerce(other)
        if self.field.p == 2:
            return FieldElement(self.field, self.val ^ o)
        return FieldElement(self.field, (self.val - o) % self.field.p)

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul_s(self.val, self._coerce(other)))

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div_s(self.val, self._coerce(other)))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow_s(self.val, e))

    def inverse(self):
        return FieldElement(self.field, self.field.inv_s(self.val))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.val == other.val
        return NotImplemented

    def __hash__(self):
        return hash((id(self.field), self.val))

    def __repr__(self):
        return f"{self.val}:{self.field}"


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Dispatch add/sub/mul/div on two elements of one field."""
    if not isinstance(a, FieldElement) or not isinstance(b, FieldElement):
        raise ParameterError("field_arith expects FieldElement operands")
    if a.field is not b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")
    try:
        return {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__, "div": a.__truediv__}[op](b)
    except KeyError:
        raise ParameterError(f"unknown op {op!r}") from None


def poly_eval(coeffs, x):
    """Horner evaluation; accepts FieldElements or raw codes plus a field."""
    if coeffs and isinstance(coeffs[0], FieldElement):
        field = coeffs[0].field
        if any(c.field is not field for c in coeffs) or (
            isinstance(x, FieldElement) and x.field is not field
        ):
            raise FieldMismatchError("mixed fields in poly_eval")
        xv = x.val if isinstance(x, FieldElement) else field.normalize(x)
        out = int(field.poly_eval([c.val for c in coeffs], xv))
        return FieldElement(field, out)
    raise ParameterError("poly_eval needs FieldElement coefficients")


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


class Matrix:
    """Dense matrix over one field, row-major int64 grid."""

    def __init__(self, field: Field, data):
        self.field = field
        arr = np.asarray(data, dtype=np.int64)
        if arr.ndim != 2:
            raise ParameterError("matrix data must be 2-D")
        self.a = arr

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field, n):
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def vandermonde(cls, field, points, cols):
        pts = field.asarray(points)
        out = np.ones((len(pts), cols), dtype=np.int64)
        for j in range(1, cols):
            out[:, j] = field.mul(out[:, j - 1], pts)
        return cls(field, out)

    @property
    def shape(self):
        return self.a.shape

    def _check(self, other: "Matrix"):
        if other.field is not self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.a.shape[1] != other.a.shape[0]:
            raise ParameterError("inner dimensions differ")
        return Matrix(self.field, self.field.matmul(self.a, other.a))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.field, self.field.add(self.a, other.a))

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and other.field is self.field
            and other.a.shape == self.a.shape
            and bool(np.array_equal(other.a, self.a))
        )

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.a.T.copy())

    def rref(self):
        R, piv = self.field.rref(self.a)
        return Matrix(self.field, R), piv

    def rank(self) -> int:
        _, piv = self.field.rref(self.a)
        return len(piv)

    def inv(self) -> "Matrix":
        n, m = self.a.shape
        if n != m:
            raise SingularMatrixError("inverse of a non-square matrix")
        aug = np.hstack([self.a, np.eye(n, dtype=np.int64)])
        R, piv = self.field.rref(aug)
        if piv[:n] != list(range(n)):
            raise SingularMatrixError("matrix is singular")
        return Matrix(self.field, R[:, n:])

    def solve(self, rhs: "Matrix") -> "Matrix":
        """Unique solution of A x = rhs for square invertible A."""
        self._check(rhs)
        n, m = self.a.shape
        if n != m:
            raise SingularMatrixError("solve expects a square system")
        aug = np.hstack([self.a, rhs.a])
        R, piv = self.field.rref(aug)
        if piv[:n] != list(range(n)):
            raise SingularMatrixError("matrix is singular")
        return Matrix(self.field, R[:, n:])

    def solve_any(self, rhs: "Matrix") -> "Matrix":
        """A particular solution of A x = rhs (free variables set to 0)."""
        self._check(rhs)
        rows, cols = self.a.shape
        k = rhs.a.shape[1]
        aug = np.hstack([self.a, rhs.a])
        R, piv = self.field.rref(aug)
        if any(c >= cols for c in piv):
            raise InconsistentSystemError("no solution")
        x = np.zeros((cols, k), dtype=np.int64)
        for r, c in enumerate(piv):
            x[c] = R[r, cols:]
        return Matrix(self.field, x)

    def nullspace(self) -> "Matrix":
        """Basis of the right null space, one solution per column."""
        rows, cols = self.a.shape
        R, piv = self.field.rref(self.a)
        free = [c for c in range(cols) if c not in piv]
        basis = np.zeros((cols, len(free)), dtype=np.int64)
        for j, fc in enumerate(free):
            basis[fc, j] = 1
            for r, c in enumerate(piv):
                basis[c, j] = self.field.neg(R[r, fc])
        return Matrix(self.field, basis)

    def __repr__(self):
        return f"Matrix({self.field}, {self.a.shape[0]}x{self.a.shape[1]})"


def mat_solve(A: Matrix, b: Matrix) -> Matrix:
    return A.solve(b)


def mat_rank(A: Matrix) -> int:
    return A.rank()


def mat_invert(A: Matrix) -> Matrix:
    return A.inv()


# ---------------------------------------------------------------------------
# Extension towers F_{q^m}
# ---------------------------------------------------------------------------


def _poly_trim(c: list[int]) -> list[int]:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(field: Field, a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if bj:
                out[i + j] = field.add_s(out[i + j], field.mul_s(ai, bj))
    return out


def _poly_mulmod(field: Field, a, b, mod):
    return _poly_divmod(field, _poly_mul(field, a, b), mod)[1]


def _poly_divmod(field: Field, a, b):
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    if not any(b):
        raise ZeroDivisionError("polynomial division by zero")
    db = len(b) - 1
    if len(a) - 1 < db or not any(a):
        return [0], a
    rem = list(a)
    quot = [0] * (len(a) - db)
    inv_lead = field.inv_s(b[-1])
    for shift in range(len(a) - 1 - db, -1, -1):
        factor = field.mul_s(rem[shift + db], inv_lead)
        quot[shift] = factor
        if factor:
            for i, bc in enumerate(b):
                rem[shift + i] = field.add_s(rem[shift + i], field.neg_s(field.mul_s(factor, bc)))
    return _poly_trim(quot), _poly_trim(rem[:db] or [0])


def _poly_gcd(field: Field, a, b):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while any(b):
        _, r = _poly_divmod(field, a, b)
        a, b = b, r
    return a


def _prime_divisors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _reduction_rows(base: Field, poly: list[int]) -> np.ndarray:
    """Coordinates of x^i mod poly for i < 2m-1, as a (2m-1, m) matrix."""
    m = len(poly) - 1
    red = np.zeros((2 * m - 1, m), dtype=np.int64)
    cur = [0] * m
    cur[0] = 1
    for i in range(2 * m - 1):
        red[i] = cur
        carry = cur[-1]
        cur = [0] + cur[:-1]
        if carry:
            for j in range(m):
                cur[j] = base.add_s(cur[j], base.neg_s(base.mul_s(carry, poly[j])))
    return red


def _is_irreducible(base: "BinaryField", poly: list[int]) -> bool:
    """Rabin's irreducibility test for a monic polynomial over F_q, q=2^w."""
    m = len(poly) - 1
    if m == 1:
        return True
    # cheap pre-filter: no roots in the base field
    if np.any(base.poly_eval(poly, np.arange(base.q, dtype=np.int64)) == 0):
        return False
    red = _reduction_rows(base, poly)

    def mulmod(a, b):
        full = base.conv(a[None, :], b[None, :])[0]
        return base.matmul(full[None, :], red)[0]

    def pow_q(t):
        result = np.zeros(m, dtype=np.int64)
        result[0] = 1
        b, e = t, base.q
        while e:
            if e & 1:
                result = mulmod(result, b)
            b = mulmod(b, b)
            e >>= 1
        return result

    x = np.zeros(m, dtype=np.int64)
    x[1] = 1

    def sub_x(t):
        out = t.copy()
        out[1] ^= 1
        return _poly_trim([int(c) for c in out])

    for r in sorted(_prime_divisors(m), reverse=True):
        t = x.copy()
        for _ in range(m // r):
            t = pow_q(t)
        diff = sub_x(t)
        if not any(diff):
            return False
        g = _poly_gcd(base, poly, diff)
        if len(_poly_trim(g)) - 1 >= 1:
            return False
    t = x.copy()
    for _ in range(m):
        t = pow_q(t)
    return not any(sub_x(t))


_IRREDUCIBLE_CACHE: dict = {}

# Verified irreducible tails (coefficients below x^m) for towers whose
# canonical search would otherwise scan thousands of reducible candidates.
# Each entry is re-verified by TowerField at construction time.
_KNOWN_TAILS = {
    (16, 19, 20): [9, 8, 0, 1],
}


def find_irreducible(field: "BinaryField", m: int) -> list[int]:
    """Canonical monic irreducible of degree m over F_q.

    Deterministic order: smallest degree of the tail below x^m first, then
    counting order of the tail digits.  Sparse tails keep the search short.
    """
    key = (field.q, field.modulus, m)
    if key in _IRREDUCIBLE_CACHE:
        return list(_IRREDUCIBLE_CACHE[key])
    if m == 1:
        return [0, 1]
    q = field.q
    tail = _KNOWN_TAILS.get((field.q, field.modulus, m))
    if tail is not None:
        poly = tail + [0] * (m - len(tail)) + [1]
        _IRREDUCIBLE_CACHE[key] = list(poly)
        return poly
    for dbound in range(m):
        for lead in range(1, q):
            for count in range(q**dbound):
                low = []
                c = count
                for _ in range(dbound):
                    low.append(c % q)
                    c //= q
                tail = low + [lead]
                if tail[0] == 0:
                    continue
                poly = tail + [0] * (m - len(tail)) + [1]
                if _is_irreducible(field, poly):
                    _IRREDUCIBLE_CACHE[key] = list(poly)
                    return poly
    raise ParameterError("no irreducible polynomial found")  # pragma: no cover


class TowerField:
    """F_{q^m} over a base GF(2^w), polynomial basis {1, g, ..., g^{m-1}}.

    Elements are numpy int64 arrays with last axis of length m holding the
    base-field coordinates; all operations broadcast over leading axes.
    """

    def __init__(self, base: BinaryField, m: int, modulus: list[int] | None = None):
        if not isinstance(base, BinaryField):
            raise ParameterError("tower base must be a binary field")
        if m < 1:
            raise ParameterError("extension degree must be >= 1")
        self.base = base
        self.m = m
        if modulus is None:
            modulus = find_irreducible(base, m)
        modulus = [base.normalize(c) for c in modulus]
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ParameterError("modulus must be monic of degree m")
        if m > 1 and not _is_irreducible(base, modulus):
            raise ParameterError("modulus is reducible")
        self.modulus = modulus
        self._build_reduction()
        self._build_frobenius()

    # -- setup -------------------------------------------------------------
    def _build_reduction(self):
        self._red = _reduction_rows(self.base, self.modulus)

    def _build_frobenius(self):
        m, base = self.m, self.base
        q = base.q
        xq = self.pow_int(self.gen() if m > 1 else self.one(), q)
        frob = np.zeros((m, m), dtype=np.int64)
        cur = self.one()
        for j in range(m):
            frob[j] = cur
            cur = self.mul(cur, xq)
        self._frob = frob
        self._frob_inv = Matrix(base, frob).inv().a

    # -- constructors -------------------------------------------------------
    def zero(self, shape=()):
        return np.zeros(shape + (self.m,), dtype=np.int64)

    def one(self, shape=()):
        out = self.zero(shape)
        out[..., 0] = 1
        return out

    def gen(self):
        out = self.zero()
        if self.m == 1:
            out[..., 0] = 1
        else:
            out[..., 1] = 1
        return out

    def from_base(self, scalars):
        scalars = self.base.asarray(scalars)
        out = self.zero(scalars.shape)
        out[..., 0] = scalars
        return out

    def from_int(self, value: int):
        out = self.zero()
        for j in range(self.m):
            out[j] = value % self.base.q
            value //= self.base.q
        return out

    def to_int(self, el) -> int:
        out = 0
        for j in range(self.m - 1, -1, -1):
            out = out * self.base.q + int(el[..., j])
        return out

    def random_elements(self, rng, shape=(), nonzero=False):
        out = self.base.random_elements(rng, shape + (self.m,))
        if nonzero:
            flat = out.reshape(-1, self.m)
            for i in range(flat.shape[0]):
                while not flat[i].any():
                    flat[i] = self.base.random_elements(rng, (self.m,))
        return out

    # -- arithmetic ----------------------------------------------------------
    def add(self, a, b):
        return np.bitwise_xor(a, b)

    sub = add

    def is_zero(self, a):
        return not np.asarray(a).any()

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        shape = np.broadcast_shapes(a.shape, b.shape)
        a = np.broadcast_to(a, shape)
        b = np.broadcast_to(b, shape)
        if self.m == 1:
            return self.base.mul(a, b)
        full = self.base.conv(a, b)
        flat = full.reshape(-1, 2 * self.m - 1)
        red = self.base.matmul(flat, self._red)
        return red.reshape(shape)

    def scalar_mul(self, c, a):
        """Multiply by a base-field scalar (array broadcastable to a's batch)."""
        c = np.asarray(c, dtype=np.int64)
        return self.base.mul(a, c[..., None])

    def frob(self, a, times: int = 1):
        """Apply x -> x^q (times may be negative for q-th roots)."""
        a = np.asarray(a, dtype=np.int64)
        mat = self._frob if times >= 0 else self._frob_inv
        for _ in range(abs(times)):
            flat = a.reshape(-1, self.m)
            a = self.base.matmul(flat, mat).reshape(a.shape)
        return a

    def inv(self, a):
        """Inverse of a single element via extended Euclid over F_q[x]."""
        coeffs = [int(c) for c in np.asarray(a, dtype=np.int64).reshape(self.m)]
        if not any(coeffs):
            raise ZeroDivisionError("inverse of zero")
        base = self.base
        r0, r1 = list(self.modulus), _poly_trim(list(coeffs))
        s0, s1 = [0], [1]
        while any(r1) and len(_poly_trim(list(r1))) - 1 > 0:
            qpoly, rem = _poly_divmod(base, r0, r1)
            r0, r1 = r1, rem
            prod = [0] * (len(qpoly) + len(s1) - 1)
            for i, qc in enumerate(qpoly):
                if qc == 0:
                    continue
                for j, sc in enumerate(s1):
                    if sc:
                        prod[i + j] = base.add_s(prod[i + j], base.mul_s(qc, sc))
            new_s = [
                base.add_s(s0[i] if i < len(s0) else 0, prod[i] if i < len(prod) else 0)
                for i in range(max(len(s0), len(prod)))
            ]
            s0, s1 = s1, _poly_trim(new_s) if new_s else [0]
        if not any(r1):
            raise ZeroDivisionError("element not invertible (modulus reducible?)")
        c = base.inv_s(r1[0])
        out = self.zero()
        for i, sc in enumerate(s1):
            if i < self.m:
                out[i] = base.mul_s(c, sc)
        return out

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow_int(self, a, e: int):
        out = self.one()
        base = np.asarray(a, dtype=np.int64)
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    # -- linearized polynomials ----------------------------------------------
    def linearized_eval(self, q_coeffs, x):
        """Evaluate sum_i a_i x^{q^i}; coefficients shape (D+1, m), x batched."""
        q_coeffs = np.asarray(q_coeffs, dtype=np.int64)
        x = np.asarray(x, dtype=np.int64)
        acc = self.zero(x.shape[:-1])
        cur = x
        for i in range(q_coeffs.shape[0]):
            acc = self.add(acc, self.mul(q_coeffs[i], cur))
            if i + 1 < q_coeffs.shape[0]:
                cur = self.frob(cur)
        return acc

    # -- linear algebra over the tower ----------------------------------------
    def rank_q(self, vectors) -> int:
        """F_q-rank of a set of tower elements, via their coordinate matrix."""
        arr = np.asarray(vectors, dtype=np.int64).reshape(-1, self.m)
        return Matrix(self.base, arr).rank()

    def rref(self, M):
        """RREF of a matrix of tower elements, shape (r, c, m)."""
        R = np.array(M, dtype=np.int64)
        rows, cols = R.shape[0], R.shape[1]
        pivots = []
        pr = 0
        for col in range(cols):
            if pr >= rows:
                break
            piv = -1
            for i in range(pr, rows):
                if R[i, col].any():
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != pr:
                R[[pr, piv]] = R[[piv, pr]]
            inv = self.inv(R[pr, col])
            R[pr] = self.mul(R[pr], inv[None, :])
            for i in range(rows):
                if i != pr and R[i, col].any():
                    R[i] = self.add(R[i], self.mul(R[pr], R[i, col][None, :]))
            pivots.append(col)
            pr += 1
        return R, pivots

    def nullspace_vector(self, M):
        """A nonzero kernel vector of M (r, c, m), or None if trivial."""
        R, piv = self.rref(M)
        cols = M.shape[1]
        free = [c for c in range(cols) if c not in piv]
        if not free:
            return None
        fc = free[0]
        vec = self.zero((cols,))
        vec[fc] = self.one()
        for r, c in enumerate(piv):
            vec[c] = R[r, fc]  # char 2: -x = x
        return vec

    def __repr__(self):
        return f"TowerField({self.base}, m={self.m})"


_TOWER_CACHE: dict = {}


def tower_field(base: BinaryField, m: int) -> TowerField:
    """Cached tower with the canonical (first-in-counting-order) modulus."""
    key = (id(base), m)
    if key not in _TOWER_CACHE:
        _TOWER_CACHE[key] = TowerField(base, m)
    return _TOWER_CACHE[key]


class TowerElement:
    """Element of F_{q^m} carrying its base-field expansion."""

    __slots__ = ("field", "coords")

    def __init__(self, field: TowerField, coords):
        self.field = field
        arr = np.asarray(coords, dtype=np.int64).reshape(field.m)
        self.coords = arr

    def expand(self) -> list[int]:
        return [int(c) for c in self.coords]

    @classmethod
    def recombine(cls, field: TowerField, coords) -> "TowerElement":
        return cls(field, coords)

    def _coerce(self, other):
        if not isinstance(other, TowerElement) or other.field is not self.field:
            raise FieldMismatchError("tower element from a different field")
        return other.coords

    def __add__(self, other):
        return TowerElement(self.field, self.field.add(self.coords, self._coerce(other)))

    __sub__ = __add__

    def __mul__(self, other):
        return TowerElement(self.field, self.field.mul(self.coords, self._coerce(other)))

    def __truediv__(self, other):
        return TowerElement(self.field, self.field.div(self.coords, self._coerce(other)))

    def __eq__(self, other):
        return (
            isinstance(other, TowerElement)
            and other.field is self.field
            and bool(np.array_equal(other.coords, self.coords))
        )

    def __hash__(self):
        return hash((id(self.field), tuple(int(c) for c in self.coords)))

    def __repr__(self):
        return f"T{self.expand()}"


def linearized_eval(q_coeffs: list[TowerElement], x: TowerElement) -> TowerElement:
    """Evaluate the linearized polynomial sum_i a_i x^{q^i} at x."""
    if not q_coeffs:
        raise ParameterError("empty coefficient list")
    field = x.field
    if any(c.field is not field for c in q_coeffs):
        raise FieldMismatchError("mixed tower fields")
    arr = np.stack([c.coords for c in q_coeffs])
    return TowerElement(field, field.linearized_eval(arr, x.coords))
