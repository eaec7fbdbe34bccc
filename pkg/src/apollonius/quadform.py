"""Symmetric bilinear forms over Q and F_p: diagonalization, invariants
(rank, discriminant class, signature, Hasse symbols), trace forms of
quadratic towers, and comparison against multiples of the hyperbolic
form H = <1> + <-1>.

Over Q the invariant set (rank, disc, signature, Hasse) classifies
nondegenerate forms completely; over F_p rank and disc suffice.
FormClass equality is therefore an honest isomorphism test.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from sympy import factorint

from .errors import FieldMismatch, ZeroArgument, ZeroScalar
from .exactfield import (
    FieldDescriptor,
    FieldElement,
    FpElement,
    trace_to_base,
)

INF = "inf"


# ---------------------------------------------------------------- square classes


def squarefree_part(x: Union[int, Fraction]) -> int:
    """The signed square-free integer representing x's square class in Q*."""
    x = Fraction(x)
    if x == 0:
        raise ZeroArgument("0 has no square class")
    n = x.numerator * x.denominator
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorint(abs(n)).items():
        if e % 2:
            out *= p
    return sign * out


def least_nonresidue(p: int) -> int:
    """The smallest positive quadratic non-residue mod p."""
    for n in range(2, p):
        if pow(n, (p - 1) // 2, p) == p - 1:
            return n
    raise ValueError(f"no non-residue mod {p}")


def _fp_class(v: int, p: int) -> int:
    if v % p == 0:
        raise ZeroArgument("0 has no square class")
    return 1 if pow(v, (p - 1) // 2, p) == 1 else least_nonresidue(p)


def square_class(base, x) -> int:
    """Canonical square-class representative: signed square-free integer
    over Q; 1 or the least non-residue over F_p."""
    if base == "Q":
        return squarefree_part(x)
    v = x.v if isinstance(x, FpElement) else int(x)
    return _fp_class(v, base)


# ---------------------------------------------------------------- Hilbert symbol


def _val_unit(x: Fraction, p: int) -> tuple[int, Fraction]:
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v, Fraction(num, den)


def _mod(x: Fraction, m: int) -> int:
    return x.numerator * pow(x.denominator, -1, m) % m


def _legendre(u: Fraction, p: int) -> int:
    return 1 if pow(_mod(u, p), (p - 1) // 2, p) == 1 else -1


def hilbert_symbol(a, b, place) -> int:
    """The Hilbert symbol (a, b) at a finite prime or the real place.

    ``place`` is an odd prime, 2, or the string "inf".
    """
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ZeroArgument("Hilbert symbol needs nonzero arguments")
    if place == INF or place == float("inf"):
        return -1 if (a < 0 and b < 0) else 1
    p = int(place)
    alpha, u = _val_unit(a, p)
    beta, v = _val_unit(b, p)
    if p == 2:
        eps_u, eps_v = (_mod(u, 8) - 1) // 2 % 2, (_mod(v, 8) - 1) // 2 % 2
        om_u, om_v = (_mod(u, 8) ** 2 - 1) // 8 % 2, (_mod(v, 8) ** 2 - 1) // 8 % 2
        exp = eps_u * eps_v + alpha * om_v + beta * om_u
        return -1 if exp % 2 else 1
    sym = 1
    if alpha * beta * ((p - 1) // 2) % 2:
        sym = -sym
    if beta % 2 and _legendre(u, p) < 0:
        sym = -sym
    if alpha % 2 and _legendre(v, p) < 0:
        sym = -sym
    return sym


def _support(*values: int) -> set[int]:
    primes = {2}
    for v in values:
        primes.update(factorint(abs(v)).keys())
    return primes


# --------------------------------------------------------------------- GramForm


class GramForm:
    """A symmetric matrix over a base field (level-0 tower)."""

    __slots__ = ("field", "entries")

    def __init__(self, field: FieldDescriptor, entries: Sequence[Sequence]):
        if field.level != 0:
            raise ValueError("Gram matrices live over the base field")
        rows = [[field.coerce(x) for x in row] for row in entries]
        n = len(rows)
        for row in rows:
            if len(row) != n:
                raise ValueError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("Gram matrix must be symmetric")
        self.field = field
        self.entries = tuple(tuple(row) for row in rows)

    @property
    def n(self) -> int:
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, GramForm):
            return NotImplemented
        return self.field == other.field and self.entries == other.entries

    def __repr__(self):
        rows = "; ".join(" ".join(repr(x) for x in row) for row in self.entries)
        return f"GramForm[{rows}]"

    def to_json(self) -> list[list[str]]:
        from .exactfield import element_to_str

        return [[element_to_str(x) for x in row] for row in self.entries]


def diagonalize(form: GramForm) -> list[FieldElement]:
    """Diagonal entries of a form congruent to the input.

    Symmetric row/column elimination with deterministic pivot search;
    zero entries (degenerate directions) come last.
    """
    n = form.n
    M = [list(row) for row in form.entries]
    K = form.field
    diag: list[FieldElement] = []

    def add_into(i, j, c):
        # row_i += c*row_j, then col_i += c*col_j
        for t in range(n):
            M[i][t] = M[i][t] + c * M[j][t]
        for t in range(n):
            M[t][i] = M[t][i] + c * M[t][j]

    def swap(i, j):
        M[i], M[j] = M[j], M[i]
        for t in range(n):
            M[t][i], M[t][j] = M[t][j], M[t][i]

    one = K.one()
    for i in range(n):
        pivot = next((k for k in range(i, n) if not M[k][k].is_zero), None)
        if pivot is None:
            off = next(((k, l) for k in range(i, n) for l in range(k + 1, n)
                        if not M[k][l].is_zero), None)
            if off is None:
                diag.extend(K.zero() for _ in range(i, n))
                break
            k, l = off
            add_into(k, l, one)  # char != 2: new (k,k) entry is 2*M[k][l]
            pivot = k
        if pivot != i:
            swap(pivot, i)
        p = M[i][i]
        for j in range(i + 1, n):
            if not M[j][i].is_zero:
                add_into(j, i, -(M[j][i] / p))
        diag.append(p)
    return diag


# -------------------------------------------------------------------- FormClass


class FormClass:
    """Invariants of a nondegenerate symmetric bilinear form.

    ``disc`` is a canonical square-class representative (signed
    square-free integer over Q; 1 or the least non-residue over F_p).
    ``hasse_minus`` is the finite set of primes with Hasse symbol -1
    (Q only; the real place is determined by the signature).
    """

    __slots__ = ("base", "rank", "disc", "signature", "hasse_minus")

    def __init__(self, base, rank: int, disc: int,
                 signature: Optional[int] = None,
                 hasse_minus: Iterable[int] = ()):
        self.base = base
        self.rank = rank
        self.disc = disc
        self.signature = signature if base == "Q" else None
        self.hasse_minus = frozenset(hasse_minus) if base == "Q" else frozenset()

    def hasse(self, p) -> int:
        if p == INF or p == float("inf"):
            neg = (self.rank - self.signature) // 2
            return -1 if neg * (neg - 1) // 2 % 2 else 1
        return -1 if p in self.hasse_minus else 1

    def __eq__(self, other):
        if not isinstance(other, FormClass):
            return NotImplemented
        return (self.base == other.base and self.rank == other.rank
                and self.disc == other.disc and self.signature == other.signature
                and self.hasse_minus == other.hasse_minus)

    def __hash__(self):
        return hash((self.base, self.rank, self.disc, self.signature, self.hasse_minus))

    def __repr__(self):
        bits = [f"rank {self.rank}", f"disc {self.disc}"]
        if self.base == "Q":
            bits.append(f"sig {self.signature}")
            bits.append("hasse -1 at {%s}" % ", ".join(map(str, sorted(self.hasse_minus))))
        else:
            bits.append(f"over F{self.base}")
        return "FormClass(" + ", ".join(bits) + ")"

    def to_json(self) -> dict:
        out = {"rank": self.rank, "disc": self.disc}
        if self.base == "Q":
            out["signature"] = self.signature
            out["hasse"] = [[p, -1] for p in sorted(self.hasse_minus)]
        else:
            out["p"] = self.base
        return out


def invariants(diag: Sequence[FieldElement],
               field: Optional[FieldDescriptor] = None) -> FormClass:
    """FormClass of a diagonal form; zero entries lower the rank."""
    entries = list(diag)
    if field is None:
        if not entries:
            raise ValueError("empty diagonal needs an explicit field")
        field = entries[0].field
    base = field.base
    scalars = []
    for x in entries:
        x = field.coerce(x)
        if not x.is_zero:
            scalars.append(x.rep)
    rank = len(scalars)
    if rank == 0:
        return FormClass(base, 0, 1, 0 if base == "Q" else None)
    classes = [square_class(base, s) for s in scalars]
    if base != "Q":
        d = 1
        for c in classes:
            d = _fp_class(d * c, base)
        return FormClass(base, rank, d)
    disc = squarefree_part(Fraction(1) * _product(classes))
    signature = sum(1 if s > 0 else -1 for s in scalars)
    minus = set()
    for p in _support(*classes):
        sym = 1
        for i in range(rank):
            for j in range(i + 1, rank):
                sym *= hilbert_symbol(classes[i], classes[j], p)
        if sym < 0:
            minus.add(p)
    return FormClass(base, rank, disc, signature, minus)


def _product(xs):
    out = 1
    for x in xs:
        out *= x
    return out


def form_class(gram: GramForm) -> FormClass:
    """Invariants of an arbitrary symmetric Gram matrix."""
    return invariants(diagonalize(gram), gram.field)


def trace_form(L: FieldDescriptor, a) -> GramForm:
    """The base-field Gram matrix of (x, y) -> Tr_{L/k}(a*x*y) on the
    square-free root-product basis of the tower L."""
    a = L.coerce(a)
    if a.is_zero:
        raise ZeroScalar("trace form of <0> is degenerate")
    m = L.level
    basis = []
    for mask in range(1 << m):
        e = L.one()
        for j in range(m):
            if mask >> j & 1:
                e = e * L.root(j + 1)
        basis.append(e)
    base = L
    while base.level > 0:
        base = base.parent
    rows = []
    for ei in basis:
        rows.append([trace_to_base(L, a * ei * ej) for ej in basis])
    return GramForm(base, rows)


def add_forms(x: FormClass, y: FormClass) -> FormClass:
    """Invariants of the orthogonal sum of two forms."""
    if x.base != y.base:
        raise FieldMismatch("forms over different base fields")
    base = x.base
    rank = x.rank + y.rank
    if base != "Q":
        if x.rank == 0:
            return FormClass(base, rank, y.disc)
        if y.rank == 0:
            return FormClass(base, rank, x.disc)
        return FormClass(base, rank, _fp_class(x.disc * y.disc, base))
    if x.rank == 0:
        return FormClass(base, rank, y.disc, y.signature, y.hasse_minus)
    if y.rank == 0:
        return FormClass(base, rank, x.disc, x.signature, x.hasse_minus)
    disc = squarefree_part(x.disc * y.disc)
    signature = x.signature + y.signature
    minus = set()
    for p in _support(x.disc, y.disc) | x.hasse_minus | y.hasse_minus:
        if x.hasse(p) * y.hasse(p) * hilbert_symbol(x.disc, y.disc, p) < 0:
            minus.add(p)
    return FormClass(base, rank, disc, signature, minus)


def sum_forms(forms: Iterable[FormClass], base) -> FormClass:
    total = FormClass(base, 0, 1, 0 if base == "Q" else None)
    for f in forms:
        total = add_forms(total, f)
    return total


def hyperbolic_class(base, m: int) -> FormClass:
    """The class of m*H: rank 2m, disc (-1)^m, signature 0, and Hasse
    symbol (-1,-1)_p^(m(m-1)/2) (nontrivial only at 2 and the real place)."""
    disc_val = -1 if m % 2 else 1
    if base != "Q":
        return FormClass(base, 2 * m, _fp_class(disc_val, base))
    minus = {2} if (m * (m - 1) // 2) % 2 else set()
    return FormClass(base, 2 * m, disc_val, 0, minus)


def is_multiple_of_H(cls: FormClass, m: int) -> bool:
    """True iff cls is the class of m copies of the hyperbolic form."""
    return cls == hyperbolic_class(cls.base, m)
