"""Arithmetic in the tower F_p <= F_q <= F_{q^(t-1)}.

Elements of the big field are polynomials over F_p reduced modulo a fixed
monic irreducible polynomial.  Internally an element is stored as the integer
``sum(c_i * p**i)``, so the integer order of codes coincides with the
lexicographic order on ``(c_{d-1}, ..., c_0)``; that order is the canonical
element order used everywhere in the package.

Small fields (the only ones a norm graph can be built over) get exp/log and
Zech tables, making every scalar operation O(1) and giving numpy-vectorised
versions for the graph builder.  Larger fields fall back to polynomial
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

# Upper bound on p**d; exponents stay exact Python ints but anything above this
# is outside what the package is meant to handle.
MAX_ORDER = 2**64
# Fields up to this size get lookup tables.
TABLE_ORDER = 2**20


class FieldError(ValueError):
    """Invalid field parameters or an undefined field operation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# --- polynomials over F_p as lists of coefficients, low degree first ---------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_sub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _trim(a)
    return a


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def _poly_powmod(base: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(base, m, p)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, p), m, p)
        base = _poly_mod(_poly_mul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Ben-Or test: f of degree d is irreducible iff gcd(x^(p^i) - x, f) = 1 for i <= d/2."""
    f = _trim(list(f))
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    xp = [0, 1]
    for _ in range(d // 2):
        xp = _poly_powmod(xp, p, f, p)
        g = _poly_gcd(f, _poly_sub(xp, [0, 1], p), p)
        if len(g) > 1:
            return False
    return True


def find_irreducible(p: int, d: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible polynomial of degree ``d`` over F_p.

    Candidates are compared on ``(c_{d-1}, ..., c_0)``.  The result is returned
    low degree first with the leading 1 included, e.g. ``(1, 1, 1)`` for x^2+x+1.
    """
    if not is_prime(p):
        raise FieldError(f"p = {p} is not prime")
    if d < 1:
        raise FieldError(f"degree must be >= 1, got {d}")
    if d == 1:
        return (0, 1)
    for code in range(p**d):
        low = [(code // p**i) % p for i in range(d)]
        if low[0] == 0:
            continue  # divisible by x
        f = low + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("unreachable: irreducible polynomials exist in every degree")


def format_poly(f: Sequence[int]) -> str:
    terms = []
    for i in range(len(f) - 1, -1, -1):
        c = f[i]
        if not c:
            continue
        mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
        terms.append(mono if c == 1 and i else f"{c}{'' if i == 0 else '*'}{mono if i else ''}")
    return " + ".join(terms) or "0"


class FieldCtx:
    """The field F_{q^(t-1)} with q = p^h, realised as F_p[x]/(modulus).

    Elements are integer codes in ``range(order)``; :class:`FieldElement` wraps
    a code for the public, operator-based API.
    """

    def __init__(self, p: int, h: int, t: int, use_tables: bool = True):
        if not is_prime(p):
            raise FieldError(f"p = {p} is not prime")
        if h < 1:
            raise FieldError(f"h must be >= 1, got {h}")
        if t < 2:
            raise FieldError(f"t must be >= 2, got {t}")
        self.p, self.h, self.t = p, h, t
        self.q = p**h
        self.d = h * (t - 1)
        self.order = p**self.d
        if self.order > MAX_ORDER:
            raise FieldError(f"field order p^d = {self.order} exceeds cap {MAX_ORDER}")
        assert self.q ** (t - 1) == self.order
        self.modulus = find_irreducible(p, self.d)
        self._mod_list = list(self.modulus)
        self._pow_p = [p**i for i in range(self.d)]
        self.has_tables = use_tables and self.order <= TABLE_ORDER
        if self.has_tables:
            self._build_tables()

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, h={self.h}, t={self.t}, modulus={format_poly(self.modulus)})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldCtx) and (self.p, self.h, self.t) == (other.p, other.h, other.t)

    def __hash__(self) -> int:
        return hash((self.p, self.h, self.t))

    # --- codes <-> coefficient vectors -------------------------------------

    def coeffs(self, a: int) -> tuple[int, ...]:
        p = self.p
        return tuple((a // self._pow_p[i]) % p for i in range(self.d))

    def encode(self, coeffs: Iterable[int]) -> int:
        cs = list(coeffs)
        if len(cs) != self.d:
            raise FieldError(f"expected {self.d} coefficients, got {len(cs)}")
        if any(not 0 <= c < self.p for c in cs):
            raise FieldError(f"coefficients must lie in [0, {self.p})")
        return sum(c * w for c, w in zip(cs, self._pow_p))

    def _poly(self, a: int) -> list[int]:
        return _trim(list(self.coeffs(a)))

    def _from_poly(self, f: list[int]) -> int:
        return sum(c * self._pow_p[i] for i, c in enumerate(f))

    # --- tables --------------------------------------------------------------

    def _mul_poly(self, a: int, b: int) -> int:
        prod = _poly_mod(_poly_mul(self._poly(a), self._poly(b), self.p), self._mod_list, self.p)
        return self._from_poly(prod)

    def _pow_poly(self, a: int, e: int) -> int:
        return self._from_poly(_poly_powmod(self._poly(a), e, self._mod_list, self.p))

    def _add_digits(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        p = self.p
        out, w = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * w
            a //= p
            b //= p
            w *= p
        return out

    def _neg_digits(self, a: int) -> int:
        p = self.p
        out, w = 0, 1
        while a:
            out += ((-(a % p)) % p) * w
            a //= p
            w *= p
        return out

    def primitive_element(self) -> int:
        """Smallest code generating the multiplicative group."""
        m = self.order - 1
        if m == 1:
            return 1
        exps = [m // r for r in prime_factors(m)]
        for g in range(2, self.order):
            if all(self._pow_poly(g, e) != 1 for e in exps):
                return g
        raise AssertionError("unreachable: multiplicative group is cyclic")

    def _build_tables(self) -> None:
        n, m = self.order, self.order - 1
        g = self.primitive_element() if n > 2 else 1
        exp = [0] * m
        log = [-1] * n
        x = 1
        for i in range(m):
            exp[i] = x
            log[x] = i
            x = self._mul_poly(x, g)
        assert x == 1, "generator order mismatch"
        neg = [self._neg_digits(a) for a in range(n)]
        # zech[k] = log(1 + g^k), or -1 when 1 + g^k = 0
        one_plus = [self._add_digits(1, exp[k]) for k in range(m)]
        zech = [log[v] if v else -1 for v in one_plus]
        self.generator = g
        self._exp, self._log, self._neg, self._zech = exp, log, neg, zech
        self.exp_table = np.array(exp, dtype=np.int64)
        self.log_table = np.array(log, dtype=np.int64)
        self.neg_table = np.array(neg, dtype=np.int64)
        self.zech_table = np.array(zech, dtype=np.int64)

    # --- scalar arithmetic on codes -------------------------------------------

    def add(self, a: int, b: int) -> int:
        if not self.has_tables:
            return self._add_digits(a, b)
        if a == 0:
            return b
        if b == 0:
            return a
        m = self.order - 1
        la = self._log[a]
        z = self._zech[(self._log[b] - la) % m]
        return 0 if z < 0 else self._exp[(la + z) % m]

    def neg(self, a: int) -> int:
        return self._neg[a] if self.has_tables else self._neg_digits(a)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if not self.has_tables:
            return self._mul_poly(a, b)
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if not self.has_tables:
            return self._pow_poly(a, self.order - 2)
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if e == 0:
            return 1
        if a == 0:
            return 0
        if not self.has_tables:
            return self._pow_poly(a, e)
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def frobenius_q(self, a: int, e: int = 1) -> int:
        """a^(q^e)."""
        if e < 0:
            raise FieldError("Frobenius exponent must be >= 0")
        # a^(q^d') = a once q^d' reaches the field order, so reduce e mod (t-1)
        return self.pow(a, self.q ** (e % (self.t - 1)))

    @cached_property
    def norm_exponent(self) -> int:
        return (self.order - 1) // (self.q - 1)

    def norm(self, a: int) -> int:
        """N(a) = a^(1 + q + ... + q^(t-2))."""
        return self.pow(a, self.norm_exponent)

    def in_subfield(self, a: int) -> bool:
        return self.pow(a, self.q) == a

    @cached_property
    def subfield(self) -> tuple[int, ...]:
        """Codes of F_q inside the big field, in canonical order."""
        if self.has_tables:
            codes = np.arange(self.order)
            mask = self.pow_array(codes, self.q) == codes
            out = tuple(int(c) for c in np.flatnonzero(mask))
        else:
            # F_q* = <g^((order-1)/(q-1))>; enumerate through the cyclic subgroup
            g = self.pow(self.primitive_element(), self.norm_exponent)
            elems, x = {0}, 1
            for _ in range(self.q - 1):
                elems.add(x)
                x = self.mul(x, g)
            out = tuple(sorted(elems))
        assert len(out) == self.q
        return out

    @cached_property
    def subfield_nonzero(self) -> tuple[int, ...]:
        return self.subfield[1:]

    # --- vectorised arithmetic (table fields only) ---------------------------

    def _need_tables(self) -> None:
        if not self.has_tables:
            raise FieldError(f"vectorised arithmetic needs order <= {TABLE_ORDER}")

    def add_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self._need_tables()
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        m = self.order - 1
        la = self.log_table[a]
        lb = self.log_table[b]
        z = self.zech_table[(lb - la) % m]
        out = np.where(z < 0, 0, self.exp_table[(la + z) % m])
        out = np.where(a == 0, b, out)
        return np.where(b == 0, a, out)

    def mul_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self._need_tables()
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        s = (self.log_table[a] + self.log_table[b]) % (self.order - 1)
        return np.where((a == 0) | (b == 0), 0, self.exp_table[s])

    def pow_array(self, a: np.ndarray, e: int) -> np.ndarray:
        self._need_tables()
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        s = (self.log_table[a] * (e % (self.order - 1))) % (self.order - 1)
        return np.where(a == 0, 0, self.exp_table[s])

    @cached_property
    def norm_table(self) -> np.ndarray:
        """N(a) for every code a."""
        return self.pow_array(np.arange(self.order), self.norm_exponent)

    # --- element wrappers ----------------------------------------------------

    def element(self, value: int | Sequence[int]) -> FieldElement:
        """Wrap a code, or a coefficient vector (low degree first)."""
        if isinstance(value, (int, np.integer)):
            v = int(value)
            if not 0 <= v < self.order:
                raise FieldError(f"code {v} out of range for field of order {self.order}")
            return FieldElement(self, v)
        return FieldElement(self, self.encode(value))

    def x(self) -> FieldElement:
        """The class of the indeterminate x (equals a prime-field element when d = 1)."""
        if self.d == 1:
            return FieldElement(self, 0)
        return FieldElement(self, self.p)

    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self, a) for a in range(self.order)]

    def subfield_elements(self) -> list[FieldElement]:
        return [FieldElement(self, a) for a in self.subfield]

    def parse(self, text: str) -> FieldElement:
        """Inverse of ``str(FieldElement)``: ``"c0,c1,...,c_{d-1}"``."""
        try:
            cs = [int(tok) for tok in text.split(",")]
        except ValueError as exc:
            raise FieldError(f"malformed field element {text!r}") from exc
        return FieldElement(self, self.encode(cs))


@dataclass(frozen=True)
class FieldElement:
    ctx: FieldCtx
    value: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ctx.coeffs(self.value)

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coeffs)

    def __repr__(self) -> str:
        return f"FieldElement({self})"

    def __int__(self) -> int:
        return self.value

    def __lt__(self, other: FieldElement) -> bool:
        return self.value < other.value

    def __bool__(self) -> bool:
        return self.value != 0

    def _other(self, other: FieldElement | int) -> int:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise FieldError("operands live in different fields")
            return other.value
        # integers act through the prime field
        return self.ctx.encode([other % self.ctx.p] + [0] * (self.ctx.d - 1))

    def __add__(self, other):
        return FieldElement(self.ctx, self.ctx.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self._other(other), self.value))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.value))

    def __mul__(self, other):
        return FieldElement(self.ctx, self.ctx.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.ctx, self.ctx.mul(self.value, self.ctx.inv(self._other(other))))

    def __pow__(self, e: int):
        return FieldElement(self.ctx, self.ctx.pow(self.value, e))

    def inv(self) -> FieldElement:
        return FieldElement(self.ctx, self.ctx.inv(self.value))

    def frobenius_q(self, e: int = 1) -> FieldElement:
        return FieldElement(self.ctx, self.ctx.frobenius_q(self.value, e))

    def norm(self) -> FieldElement:
        return FieldElement(self.ctx, self.ctx.norm(self.value))

    def in_subfield(self) -> bool:
        return self.ctx.in_subfield(self.value)


def arith(a: FieldElement, b: FieldElement | None, kind: str, exponent: int | None = None) -> FieldElement:
    """Dispatch form of the field operations: kind in {add, sub, mul, inv, pow}."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "inv":
        return a.inv()
    if kind == "pow":
        if exponent is None or exponent < 0:
            raise FieldError("pow needs a nonnegative integer exponent")
        return a**exponent
    raise FieldError(f"unknown operation {kind!r}")
