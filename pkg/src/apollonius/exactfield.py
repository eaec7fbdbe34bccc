"""Exact arithmetic over Q, F_p (p an odd prime), and towers of
quadratic extensions k(sqrt(d1), ..., sqrt(dm)).

Elements are stored recursively: a level-m element is a pair (lo, hi)
of level-(m-1) elements meaning ``lo + hi*sqrt(d_m)``; level-0 elements
wrap a raw base scalar (:class:`fractions.Fraction` or :class:`FpElement`).
Every radicand is certified non-square in the tower below it at
construction time, so each level is an honest degree-2 field extension
and norms of nonzero elements never vanish.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Optional, Union

from sympy.ntheory import isprime
from sympy.ntheory.residue_ntheory import sqrt_mod

from .errors import FieldMismatch, NoEmbedding, ZeroRadicand

Scalar = Union[Fraction, "FpElement"]
Coercible = Union[int, Fraction, "FpElement", "FieldElement"]


class FpElement:
    """An element of the prime field F_p, p an odd prime."""

    __slots__ = ("p", "v")

    def __init__(self, p: int, v: int):
        self.p = p
        self.v = v % p

    def _coerce(self, other) -> Optional["FpElement"]:
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise FieldMismatch(f"mixed moduli {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return FpElement(self.p, other)
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return FpElement(self.p, other.numerator * pow(other.denominator, -1, self.p))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else FpElement(self.p, self.v + o.v)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else FpElement(self.p, self.v - o.v)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else FpElement(self.p, o.v - self.v)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else FpElement(self.p, self.v * o.v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.v == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return FpElement(self.p, self.v * pow(o.v, -1, self.p))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if n < 0:
            return (FpElement(self.p, 1) / self) ** (-n)
        return FpElement(self.p, pow(self.v, n, self.p))

    def __neg__(self):
        return FpElement(self.p, -self.v)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (FieldMismatch, ZeroDivisionError):
            return False
        return NotImplemented if o is None else self.v == o.v

    def __hash__(self):
        return hash(("Fp", self.p, self.v))

    def __repr__(self):
        return f"{self.v} mod {self.p}"


def _scalar_is_zero(s: Scalar) -> bool:
    return s.v == 0 if isinstance(s, FpElement) else s == 0


def _scalar_sqrt(s: Scalar) -> Optional[Scalar]:
    """Canonical square root of a base scalar, or None."""
    if isinstance(s, FpElement):
        if s.v == 0:
            return FpElement(s.p, 0)
        if pow(s.v, (s.p - 1) // 2, s.p) != 1:
            return None
        w = sqrt_mod(s.v, s.p)
        return FpElement(s.p, min(w, s.p - w))
    if s < 0:
        return None
    rn, rd = isqrt(s.numerator), isqrt(s.denominator)
    if rn * rn != s.numerator or rd * rd != s.denominator:
        return None
    return Fraction(rn, rd)


def _scalar_str(s: Scalar) -> str:
    return repr(s) if isinstance(s, FpElement) else str(s)


def _parse_scalar(text: str, base) -> Scalar:
    text = text.strip()
    if base == "Q":
        return Fraction(text)
    if text.endswith(f"mod {base}"):
        text = text[: -len(f"mod {base}")].strip()
    frac = Fraction(text)
    if frac.denominator % base == 0:
        raise ZeroDivisionError(f"denominator divisible by {base}")
    return FpElement(base, frac.numerator * pow(frac.denominator, -1, base))


class FieldDescriptor:
    """A tower of quadratic extensions over Q or F_p.

    Use :func:`rationals`, :func:`prime_field`, and :func:`adjoin_sqrt`
    to build descriptors; the constructor is internal.  Equality ignores
    embedding branch choices (two descriptors describe the same field if
    they adjoin the same radicands in the same order over the same base).
    """

    __slots__ = ("base", "parent", "radicand", "branch", "level", "_key")

    def __init__(self, base, parent: Optional["FieldDescriptor"] = None,
                 radicand: Optional["FieldElement"] = None, branch: Optional[int] = None):
        self.base = base  # "Q" or an odd prime p
        self.parent = parent
        self.radicand = radicand
        self.branch = branch  # +1/-1 real-root choice, or None (no embedding)
        self.level = 0 if parent is None else parent.level + 1
        self._key = None

    # -------------------------------------------------------- identity

    def key(self):
        if self._key is None:
            if self.parent is None:
                self._key = (self.base,)
            else:
                self._key = self.parent.key() + (tuple(self.radicand._minimal_flat()),)
        return self._key

    def __eq__(self, other):
        if not isinstance(other, FieldDescriptor):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        name = "Q" if self.base == "Q" else f"F{self.base}"
        if self.level == 0:
            return name
        roots = ", ".join(f"sqrt(r{j + 1})" for j in range(self.level))
        return f"{name}({roots})"

    def is_prefix_of(self, other: "FieldDescriptor") -> bool:
        while other.level > self.level:
            other = other.parent
        return self == other

    def tower(self) -> list["FieldDescriptor"]:
        chain = []
        k = self
        while k is not None:
            chain.append(k)
            k = k.parent
        return chain[::-1]

    @property
    def char(self) -> int:
        return 0 if self.base == "Q" else self.base

    def has_embedding(self) -> bool:
        if self.base != "Q":
            return False
        return all(k.branch is not None for k in self.tower() if k.level > 0)

    def with_embedding(self, signs) -> "FieldDescriptor":
        """Return a copy of this tower with the given per-level root signs."""
        signs = tuple(signs)
        if len(signs) != self.level:
            raise ValueError("one sign per adjoined root required")
        if self.base != "Q":
            raise NoEmbedding("only rational towers embed in R")
        desc = _descriptor_base(self.base)
        for k, sgn in zip(self.tower()[1:], signs):
            rad = _rewrap(desc.coerce(k.radicand), desc)
            if sign_under_embedding(desc, rad) < 0:
                raise NoEmbedding("radicand negative under the induced embedding")
            desc = FieldDescriptor(self.base, desc, rad, +1 if sgn >= 0 else -1)
        return desc

    # ------------------------------------------------------- elements

    def scalar(self, x) -> Scalar:
        if self.base == "Q":
            if isinstance(x, FpElement):
                raise FieldMismatch("F_p scalar in a rational tower")
            return Fraction(x)
        if isinstance(x, FpElement):
            if x.p != self.base:
                raise FieldMismatch(f"mixed moduli {x.p} and {self.base}")
            return x
        if isinstance(x, Fraction):
            if x.denominator % self.base == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.base}")
            return FpElement(self.base, x.numerator * pow(x.denominator, -1, self.base))
        return FpElement(self.base, x)

    def zero(self) -> "FieldElement":
        return self.coerce(0)

    def one(self) -> "FieldElement":
        return self.coerce(1)

    def coerce(self, x: Coercible) -> "FieldElement":
        """Coerce an int, Fraction, base scalar, string, or element of a
        subtower into this field."""
        if isinstance(x, FieldElement):
            if x.field == self:
                return x
            if x.field.is_prefix_of(self):
                return _lift(x, self)
            low = x._minimal()
            if low.field.is_prefix_of(self):
                return _lift(low, self)
            raise FieldMismatch(f"{x.field!r} does not embed in {self!r}")
        if isinstance(x, str):
            return self.coerce(_parse_scalar(x, self.base))
        if self.level == 0:
            return FieldElement(self, self.scalar(x))
        return FieldElement(self, (self.parent.coerce(x), self.parent.zero()))

    def root(self, index: Optional[int] = None) -> "FieldElement":
        """The adjoined root sqrt(d_index) (1-based; default: top level)."""
        if index is None:
            index = self.level
        if not 1 <= index <= self.level:
            raise ValueError(f"no adjoined root r{index} in {self!r}")
        chain = self.tower()
        at = chain[index]
        r = FieldElement(at, (at.parent.zero(), at.parent.one()))
        return self.coerce(r)


def _descriptor_base(base) -> FieldDescriptor:
    return FieldDescriptor(base)


_RATIONALS = FieldDescriptor("Q")


def rationals() -> FieldDescriptor:
    """The base field Q."""
    return _RATIONALS


def prime_field(p: int) -> FieldDescriptor:
    """The base field F_p; p must be an odd prime."""
    if p == 2:
        raise ValueError("characteristic 2 is excluded")
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    return FieldDescriptor(p)


class FieldElement:
    """An element of a quadratic tower; immutable."""

    __slots__ = ("field", "rep")

    def __init__(self, field: FieldDescriptor, rep):
        self.field = field
        self.rep = rep  # Scalar at level 0, else (lo, hi) pair

    # ------------------------------------------------------ structure

    @property
    def is_zero(self) -> bool:
        if self.field.level == 0:
            return _scalar_is_zero(self.rep)
        return self.rep[0].is_zero and self.rep[1].is_zero

    def __bool__(self):
        return not self.is_zero

    def _flat(self) -> list[Scalar]:
        if self.field.level == 0:
            return [self.rep]
        return self.rep[0]._flat() + self.rep[1]._flat()

    def _minimal(self) -> "FieldElement":
        """The same value in the smallest subtower containing it."""
        a = self
        while a.field.level > 0 and a.rep[1].is_zero:
            a = a.rep[0]
        return a

    def _minimal_flat(self):
        return tuple(self._minimal()._flat())

    # ----------------------------------------------------- arithmetic

    def _pair(self, other) -> Optional[tuple["FieldElement", "FieldElement"]]:
        if isinstance(other, FieldElement):
            if other.field == self.field:
                return self, other
            if other.field.is_prefix_of(self.field):
                return self, _lift(other, self.field)
            if self.field.is_prefix_of(other.field):
                return _lift(self, other.field), other
            a, b = self._minimal(), other._minimal()
            if a.field.is_prefix_of(b.field):
                return _lift(a, b.field), b
            if b.field.is_prefix_of(a.field):
                return a, _lift(b, a.field)
            raise FieldMismatch(f"incompatible towers {self.field!r} and {other.field!r}")
        if isinstance(other, (int, Fraction, FpElement)):
            return self, self.field.coerce(other)
        return None

    def __add__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if a.field.level == 0:
            return FieldElement(a.field, a.rep + b.rep)
        return FieldElement(a.field, (a.rep[0] + b.rep[0], a.rep[1] + b.rep[1]))

    __radd__ = __add__

    def __neg__(self):
        if self.field.level == 0:
            return FieldElement(self.field, -self.rep)
        return FieldElement(self.field, (-self.rep[0], -self.rep[1]))

    def __sub__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if a.field.level == 0:
            return FieldElement(a.field, a.rep * b.rep)
        d = a.field.radicand
        lo1, hi1 = a.rep
        lo2, hi2 = b.rep
        return FieldElement(a.field, (lo1 * lo2 + hi1 * hi2 * d, lo1 * hi2 + hi1 * lo2))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero")
        if self.field.level == 0:
            one = Fraction(1) if self.field.base == "Q" else FpElement(self.field.base, 1)
            return FieldElement(self.field, one / self.rep)
        lo, hi = self.rep
        norm = lo * lo - hi * hi * self.field.radicand
        ninv = norm.inverse()
        return FieldElement(self.field, (lo * ninv, -(hi * ninv)))

    def __truediv__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, FpElement, FieldElement)):
            try:
                pair = self._pair(other)
            except FieldMismatch:
                return False
            a, b = pair
            return (a - b).is_zero
        return NotImplemented

    def __hash__(self):
        a = self._minimal()
        return hash((a.field.key(), tuple(a._flat())))

    def __repr__(self):
        return element_to_str(self)

    # -------------------------------------------------- tower motions

    def conjugate(self) -> "FieldElement":
        """The nontrivial automorphism over the next tower down."""
        if self.field.level == 0:
            return self
        return FieldElement(self.field, (self.rep[0], -self.rep[1]))

    def trace_down(self) -> "FieldElement":
        if self.field.level == 0:
            return self
        return self.rep[0] + self.rep[0]

    def norm_down(self) -> "FieldElement":
        if self.field.level == 0:
            return self
        lo, hi = self.rep
        return lo * lo - hi * hi * self.field.radicand


def _lift(a: FieldElement, target: FieldDescriptor) -> FieldElement:
    if a.field == target:
        return a
    lifted = _lift(a, target.parent)
    return FieldElement(target, (lifted, target.parent.zero()))


def _rewrap(a: FieldElement, K: FieldDescriptor) -> FieldElement:
    """Reattach a (structurally equal) descriptor, e.g. to pick up new
    embedding branches after :meth:`FieldDescriptor.with_embedding`."""
    if K.level == 0:
        return FieldElement(K, a.rep)
    return FieldElement(K, (_rewrap(a.rep[0], K.parent), _rewrap(a.rep[1], K.parent)))


def element(K: FieldDescriptor, x: Coercible) -> FieldElement:
    """Coerce ``x`` into the tower ``K``."""
    return K.coerce(x)


# ------------------------------------------------------------------ ops


class AlreadySquare:
    """Result of :func:`adjoin_sqrt` when the radicand is a square."""

    __slots__ = ("sqrt",)

    def __init__(self, sqrt: FieldElement):
        self.sqrt = sqrt

    def __repr__(self):
        return f"AlreadySquare({self.sqrt!r})"


def adjoin_sqrt(K: FieldDescriptor, d: Coercible) -> Union[FieldDescriptor, AlreadySquare]:
    """Extend K by sqrt(d), or report a witness if d is already a square.

    The new level's embedding branch defaults to the positive root when
    K embeds in R and d is positive there; otherwise the extension
    carries no embedding.
    """
    d = K.coerce(d)
    if d.is_zero:
        raise ZeroRadicand("cannot adjoin sqrt(0)")
    w = is_square(K, d)
    if w is not None:
        return AlreadySquare(w)
    branch = None
    if K.has_embedding() and sign_under_embedding(K, d) > 0:
        branch = +1
    return FieldDescriptor(K.base, K, d, branch)


def is_square(K: FieldDescriptor, a: Coercible) -> Optional[FieldElement]:
    """A canonical witness w with w*w == a, or None.

    The witness is normalized so its first nonzero coordinate is
    canonical-positive (positive over Q; in [1, (p-1)/2] over F_p),
    making root choices deterministic across runs.
    """
    a = K.coerce(a)
    w = _sqrt_in(a.field, a)
    if w is None:
        return None
    return K.coerce(_canonical_sign(w))


def _canonical_sign(w: FieldElement) -> FieldElement:
    for c in w._flat():
        if _scalar_is_zero(c):
            continue
        if isinstance(c, FpElement):
            return w if c.v <= (c.p - 1) // 2 else -w
        return w if c > 0 else -w
    return w


def _sqrt_in(K: FieldDescriptor, a: FieldElement) -> Optional[FieldElement]:
    if a.is_zero:
        return K.zero()
    if K.level == 0:
        s = _scalar_sqrt(a.rep)
        return None if s is None else FieldElement(K, s)
    P = K.parent
    d = K.radicand
    x, y = a.rep
    if y.is_zero:
        w = _sqrt_in(P, x)
        if w is not None:
            return FieldElement(K, (w, P.zero()))
        w = _sqrt_in(P, x / d)
        if w is not None:
            return FieldElement(K, (P.zero(), w))
        return None
    e = _sqrt_in(P, x * x - y * y * d)
    if e is None:
        return None
    half = P.one() / 2
    for cand in ((x + e) * half, (x - e) * half):
        u = _sqrt_in(P, cand)
        if u is not None and not u.is_zero:
            v = y / (u + u)
            return FieldElement(K, (u, v))
    return None


def trace_to_base(L: FieldDescriptor, a: Coercible) -> FieldElement:
    """Tr_{L/k}(a): the trace of multiplication-by-a down to the base."""
    a = L.coerce(a)
    while a.field.level > 0:
        a = a.trace_down()
    return a


def norm_to_base(L: FieldDescriptor, a: Coercible) -> FieldElement:
    """N_{L/k}(a): the determinant of multiplication-by-a down to the base."""
    a = L.coerce(a)
    while a.field.level > 0:
        a = a.norm_down()
    return a


# ------------------------------------------------- real sign via intervals


class Interval:
    """A closed interval with exact Fraction endpoints.

    Sums and products of exact endpoints stay exact; only square roots
    introduce width, controlled by a dyadic precision parameter.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Fraction, hi: Fraction):
        self.lo = lo
        self.hi = hi

    def __add__(self, other):
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __mul__(self, other):
        prods = (self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi)
        return Interval(min(prods), max(prods))

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def sqrt(self, bits: int) -> "Interval":
        """Enclosure of the positive square root, outward-rounded to
        the given number of fractional bits."""
        scale = 1 << bits
        lo_floor = isqrt((self.lo.numerator * scale * scale) // self.lo.denominator)
        hi_floor = isqrt((self.hi.numerator * scale * scale) // self.hi.denominator)
        return Interval(Fraction(lo_floor, scale), Fraction(hi_floor + 1, scale))


def real_interval(a: FieldElement, bits: int = 30) -> Interval:
    """An exact-endpoint enclosure of a under its tower's embedding."""
    K = a.field
    if K.base != "Q":
        raise NoEmbedding("finite fields do not embed in R")
    if not K.has_embedding():
        raise NoEmbedding(f"{K!r} carries no real embedding")
    return _enclose(_rewrap(a, K), bits)


def _enclose(a: FieldElement, bits: int) -> Interval:
    if a.field.level == 0:
        return Interval(a.rep, a.rep)
    lo, hi = a.rep
    d = a.field.radicand
    root = _positive_enclosure(d, bits).sqrt(bits)
    if a.field.branch < 0:
        root = -root
    return _enclose(lo, bits) + _enclose(hi, bits) * root


def _positive_enclosure(d: FieldElement, bits: int) -> Interval:
    iv = _enclose(d, bits)
    while iv.lo <= 0:
        bits *= 2
        iv = _enclose(d, bits)
    return iv


def sign_under_embedding(K: FieldDescriptor, a: Coercible) -> int:
    """The exact sign of a under K's chosen real embedding."""
    a = K.coerce(a)
    if a.is_zero:
        return 0
    if K.base != "Q" or not K.has_embedding():
        raise NoEmbedding(f"{K!r} carries no real embedding")
    a = _rewrap(a, K)
    bits = 16
    iv = _enclose(a, bits)
    while iv.contains_zero():
        bits *= 2
        iv = _enclose(a, bits)
    return 1 if iv.lo > 0 else -1


# --------------------------------------------------------- serialization


def _basis_label(mask: int) -> str:
    if mask == 0:
        return "1"
    return "*".join(f"r{j + 1}" for j in range(mask.bit_length()) if mask >> j & 1)


def element_to_coords(a: FieldElement) -> dict[str, str]:
    """Coefficient map over the square-free root-product basis."""
    flat = a._flat()
    out = {}
    for mask, c in enumerate(flat):
        if not _scalar_is_zero(c):
            out[_basis_label(mask)] = _scalar_str(c)
    if not out:
        out["1"] = _scalar_str(a.field.scalar(0))
    return out


def element_from_coords(K: FieldDescriptor, coords: dict) -> FieldElement:
    out = K.zero()
    for label, text in coords.items():
        term = K.coerce(str(text))
        if label != "1":
            for part in label.split("*"):
                term = term * K.root(int(part[1:]))
        out = out + term
    return out


def element_to_str(a: FieldElement) -> str:
    coords = element_to_coords(a)
    return " + ".join(c if label == "1" else f"({c})*{label}"
                      for label, c in coords.items())


def descriptor_to_json(K: FieldDescriptor) -> dict:
    """Tower description: the base field and the adjoined radicands,
    innermost first, as coefficient maps over the preceding level."""
    return {
        "base": "Q" if K.base == "Q" else int(K.base),
        "radicands": [
            element_to_coords(level.radicand) for level in K.tower()[1:]
        ],
    }
