"""The intersection scheme as a finite-dimensional algebra.

Working in the affine chart c0 = 1 of the moduli space, the three
tangency/incidence equations cut out a zero-dimensional scheme whose
coordinate ring A = k[c1,c2,c3]/(f1,f2,f3) is computed here exactly: a
degree-reverse-lexicographic Groebner basis, the standard-monomial
basis under the staircase, and multiplication matrices.  On A the
bilinear form B(x, y) = Tr(J*x*y), with J the image of the Jacobian
determinant of the equations, is the sum over solution points of the
trace forms Tr_{k(p)/k}<Vol(p)> whenever A is etale -- the same total
the per-point path adds up solution by solution, but computed without
ever writing a single root down.

Polynomials are dicts mapping exponent triples to nonzero field
elements; T-polynomials (for minimal polynomials of separating forms)
are coefficient lists, ascending degree.
"""

from __future__ import annotations

from math import gcd
from typing import Optional, Sequence

from sympy import nextprime

from .errors import (
    DegenerateForm,
    NotZeroDimensional,
    SolutionsAtInfinity,
)
from .exactfield import FieldDescriptor, FieldElement, element_to_str
from .moduli import Circle, Point, plane_through
from .quadform import (
    GramForm,
    diagonalize,
    form_class,
    hyperbolic_class,
    sum_forms,
)

VARS = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


# ----------------------------------------------------------- polynomials


def order_key(m):
    """Sort key realizing degrevlex: highest key = leading monomial."""
    return (sum(m), tuple(-e for e in reversed(m)))


def as_poly(terms, field: FieldDescriptor) -> dict:
    """Coerce a {exponent-triple: value} mapping into a clean polynomial."""
    out = {}
    for m, v in terms.items():
        c = field.coerce(v)
        if not c.is_zero:
            out[tuple(m)] = c
    return out


def poly_add(f: dict, g: dict) -> dict:
    out = dict(f)
    for m, c in g.items():
        s = out.get(m)
        s = c if s is None else s + c
        if s.is_zero:
            out.pop(m, None)
        else:
            out[m] = s
    return out


def poly_neg(f: dict) -> dict:
    return {m: -c for m, c in f.items()}


def poly_sub(f: dict, g: dict) -> dict:
    return poly_add(f, poly_neg(g))


def poly_mul(f: dict, g: dict) -> dict:
    out: dict = {}
    for mf, cf in f.items():
        for mg, cg in g.items():
            m = tuple(a + b for a, b in zip(mf, mg))
            c = cf * cg
            s = out.get(m)
            s = c if s is None else s + c
            if s.is_zero:
                out.pop(m, None)
            else:
                out[m] = s
    return out


def poly_scale(f: dict, c) -> dict:
    if c.is_zero:
        return {}
    return {m: c * v for m, v in f.items()}


def leading(f: dict):
    return max(f, key=order_key)


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def poly_derivative(f: dict, var: int) -> dict:
    out = {}
    for m, c in f.items():
        e = m[var]
        if e == 0:
            continue
        mm = tuple(x - (1 if i == var else 0) for i, x in enumerate(m))
        d = e * c
        if not d.is_zero:
            out[mm] = d
    return out


def top_component(f: dict) -> dict:
    """Highest homogeneous part; the c0 = 0 restriction of the closure."""
    d = max(sum(m) for m in f)
    return {m: c for m, c in f.items() if sum(m) == d}


def normal_form(f: dict, basis: Sequence[dict]) -> dict:
    """Fully reduced remainder of f modulo the basis."""
    lts = [(leading(g), g) for g in basis]
    work = dict(f)
    out: dict = {}
    while work:
        m = max(work, key=order_key)
        c = work.pop(m)
        for lt, g in lts:
            if _divides(lt, m):
                q = c / g[lt]
                shift = tuple(a - b for a, b in zip(m, lt))
                for mg, cg in g.items():
                    if mg == lt:
                        continue
                    mm = tuple(a + b for a, b in zip(mg, shift))
                    s = work.get(mm)
                    s = -(q * cg) if s is None else s - q * cg
                    if s.is_zero:
                        work.pop(mm, None)
                    else:
                        work[mm] = s
                break
        else:
            out[m] = c
    return out


def _primitive(f: dict, field: FieldDescriptor) -> dict:
    """Scale a polynomial to integer coefficients with content 1.

    Generators may be scaled freely; keeping them primitive stops the
    coefficient blowup of rational Buchberger runs.  Over a prime field
    this normalizes the leading coefficient to 1 instead.
    """
    if not f or field.base != "Q":
        if f:
            lc = f[leading(f)]
            if not (lc - field.one()).is_zero:
                return {m: c / lc for m, c in f.items()}
        return f
    den = 1
    num = 0
    for c in f.values():
        r = c.rep
        den = den * r.denominator // gcd(den, r.denominator)
        num = gcd(num, abs(r.numerator))
    scale = field.coerce(den) / field.coerce(num)
    if (scale - field.one()).is_zero:
        return f
    return {m: c * scale for m, c in f.items()}


def s_polynomial(f: dict, g: dict) -> dict:
    lf, lg = leading(f), leading(g)
    lcm = tuple(max(a, b) for a, b in zip(lf, lg))
    fs = tuple(a - b for a, b in zip(lcm, lf))
    gs = tuple(a - b for a, b in zip(lcm, lg))
    cf, cg = f[lf], g[lg]
    left = {tuple(a + b for a, b in zip(m, fs)): c / cf for m, c in f.items()}
    right = {tuple(a + b for a, b in zip(m, gs)): c / cg for m, c in g.items()}
    return poly_sub(left, right)


def _int_strip(h: dict) -> dict:
    """Divide the integer coefficients by their content, in place."""
    g = 0
    for c in h.values():
        g = gcd(g, c)
        if g == 1:
            return h
    if g > 1:
        for m in h:
            h[m] //= g
    return h


def _int_primitive(h: dict) -> dict:
    if not h:
        return h
    h = _int_strip(h)
    if h[leading(h)] < 0:
        return {m: -c for m, c in h.items()}
    return h


def _int_spoly(f: dict, g: dict) -> dict:
    lf, lg = leading(f), leading(g)
    cf, cg = f[lf], g[lg]
    lead_lcm = cf * cg // gcd(cf, cg)
    qf, qg = lead_lcm // cf, lead_lcm // cg
    lcm = tuple(max(a, b) for a, b in zip(lf, lg))
    fs = tuple(a - b for a, b in zip(lcm, lf))
    gs = tuple(a - b for a, b in zip(lcm, lg))
    out = {}
    for m, c in f.items():
        out[tuple(a + b for a, b in zip(m, fs))] = qf * c
    for m, c in g.items():
        mm = tuple(a + b for a, b in zip(m, gs))
        v = out.get(mm, 0) - qg * c
        if v:
            out[mm] = v
        else:
            out.pop(mm, None)
    return out


def _int_reduce(f: dict, basis: Sequence[dict], leads: Sequence[tuple]) -> dict:
    """Pseudo-reduction: scale by the reducer's leading coefficient
    instead of dividing by it, so every coefficient stays an integer.
    The result is the normal form up to a rational factor."""
    h = _int_strip({m: c for m, c in f.items() if c})
    done: set = set()
    keys: dict = {}
    steps = 0
    while True:
        m = None
        mk = None
        for mm in h:
            if mm in done:
                continue
            k = keys.get(mm)
            if k is None:
                k = keys[mm] = order_key(mm)
            if mk is None or k > mk:
                m, mk = mm, k
        if m is None:
            return _int_strip(h)
        for g, lt in zip(basis, leads):
            if _divides(lt, m):
                c = h.pop(m)
                gc = g[lt]
                d = gcd(c, gc)
                scale, c = gc // d, c // d
                shift = tuple(a - b for a, b in zip(m, lt))
                if scale != 1:
                    for mm in h:
                        h[mm] *= scale
                for mg, cg in g.items():
                    if mg == lt:
                        continue
                    mm = tuple(a + b for a, b in zip(mg, shift))
                    v = h.get(mm, 0) - c * cg
                    if v:
                        h[mm] = v
                    else:
                        h.pop(mm, None)
                steps += 1
                if steps % 8 == 0:
                    _int_strip(h)
                break
        else:
            done.add(m)


def _buchberger_int(polys: Sequence[dict], field: FieldDescriptor) -> list[dict]:
    """Buchberger over the rationals on integer representatives.

    Dividing inside the reduction loop costs a gcd per coefficient
    operation once denominators appear; working with content-1 integer
    polynomials and deferring the single division to the final monic
    scaling keeps the arithmetic small.
    """
    basis = []
    for p in polys:
        q = _primitive(p, field)
        basis.append(_int_primitive({m: int(c.rep) for m, c in q.items()}))
    basis = [b for b in basis if b]
    leads = [leading(b) for b in basis]
    pairs = [(i, j) for i in range(len(basis)) for j in range(i)]
    while pairs:
        # normal strategy: take the pair with the smallest lead lcm first
        best = min(
            range(len(pairs)),
            key=lambda k: sum(
                max(a, b) for a, b in zip(leads[pairs[k][0]], leads[pairs[k][1]])
            ),
        )
        i, j = pairs.pop(best)
        if all(a == 0 or b == 0 for a, b in zip(leads[i], leads[j])):
            continue  # coprime leading monomials reduce to zero
        r = _int_reduce(_int_spoly(basis[i], basis[j]), basis, leads)
        if r:
            basis.append(_int_primitive(r))
            leads.append(leading(basis[-1]))
            pairs.extend((k, len(basis) - 1) for k in range(len(basis) - 1))
    keep = []
    for i, g in enumerate(basis):
        redundant = any(
            j != i
            and _divides(leads[j], leads[i])
            and (leads[j] != leads[i] or j < i)
            for j in range(len(basis))
        )
        if not redundant:
            keep.append(g)
    out = []
    for i, g in enumerate(keep):
        rest = keep[:i] + keep[i + 1 :]
        r = _int_reduce(g, rest, [leading(x) for x in rest]) if rest else g
        lc = field.coerce(r[leading(r)])
        out.append({m: field.coerce(c) / lc for m, c in r.items()})
    return sorted(out, key=lambda g: order_key(leading(g)))


def buchberger(polys: Sequence[dict]) -> list[dict]:
    """Reduced degrevlex Groebner basis of the input ideal."""
    polys = [p for p in polys if p]
    if not polys:
        return []
    field = next(iter(polys[0].values())).field
    if field.base == "Q":
        return _buchberger_int(polys, field)
    basis = [_primitive(dict(p), field) for p in polys]
    pairs = [(i, j) for i in range(len(basis)) for j in range(i)]
    while pairs:
        i, j = pairs.pop()
        li, lj = leading(basis[i]), leading(basis[j])
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue  # coprime leading monomials reduce to zero
        r = normal_form(s_polynomial(basis[i], basis[j]), basis)
        if r:
            basis.append(_primitive(r, field))
            pairs.extend((k, len(basis) - 1) for k in range(len(basis) - 1))
    return _interreduce(basis)


def _interreduce(basis: list[dict]) -> list[dict]:
    lts = [leading(g) for g in basis]
    keep = []
    for i, g in enumerate(basis):
        redundant = any(
            j != i
            and _divides(lts[j], lts[i])
            and (lts[j] != lts[i] or j < i)
            for j in range(len(basis))
        )
        if not redundant:
            keep.append(g)
    out = []
    for i, g in enumerate(keep):
        rest = keep[:i] + keep[i + 1 :]
        r = normal_form(g, rest) if rest else dict(g)
        lc = r[leading(r)]
        out.append({m: c / lc for m, c in r.items()})
    return sorted(out, key=lambda g: order_key(leading(g)))


def _staircase(gb: Sequence[dict]) -> list:
    """Standard monomials under the leading terms; raises if infinite."""
    lts = [leading(g) for g in gb]
    if any(lt == (0, 0, 0) for lt in lts):
        return []  # unit ideal: the empty scheme
    bounds = []
    for v in range(3):
        pures = [
            lt[v]
            for lt in lts
            if all(lt[w] == 0 for w in range(3) if w != v)
        ]
        if not pures:
            raise NotZeroDimensional(
                f"no pure power of c{v + 1} among the leading terms"
            )
        bounds.append(min(pures))
    mons = [
        (i, j, k)
        for i in range(bounds[0])
        for j in range(bounds[1])
        for k in range(bounds[2])
        if not any(_divides(lt, (i, j, k)) for lt in lts)
    ]
    return sorted(mons, key=order_key)


# -------------------------------------------------------- linear algebra


def _dot(u, v):
    out = None
    for a, b in zip(u, v):
        t = a * b
        out = t if out is None else out + t
    return out


def _mat_vec(M, v):
    return [_dot(row, v) for row in M]


def _mat_mul(A, B):
    n = len(A)
    cols = list(zip(*B))
    return [[_dot(row, col) for col in cols] for row in A]


def _solve_in_span(vectors: list, target: list, field: FieldDescriptor):
    """Coefficients writing target in the span, or None."""
    n = len(target)
    k = len(vectors)
    rows = [[vectors[j][i] for j in range(k)] + [target[i]] for i in range(n)]
    pivots = []
    r = 0
    for c in range(k):
        pr = next((i for i in range(r, n) if not rows[i][c].is_zero), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(n):
            if i != r and not rows[i][c].is_zero:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, n):
        if not rows[i][k].is_zero:
            return None
    sol = [field.zero()] * k
    for idx, c in enumerate(pivots):
        sol[c] = rows[idx][k]
    return sol


def _independent_columns(M, field: FieldDescriptor) -> list:
    """A basis of the column space, as column vectors."""
    n = len(M)
    basis = []
    echelon = []  # (pivot row, reduced vector)
    for j in range(n):
        v = [M[i][j] for i in range(n)]
        for pivot, e in echelon:
            if not v[pivot].is_zero:
                f = v[pivot]
                v = [x - f * y for x, y in zip(v, e)]
        lead = next((i for i in range(n) if not v[i].is_zero), None)
        if lead is None:
            continue
        basis.append([M[i][j] for i in range(n)])
        echelon.append((lead, [x / v[lead] for x in v]))
    return basis


# -------------------------------------------------------- T-polynomials


def _t_strip(a: list) -> list:
    while a and a[-1].is_zero:
        a.pop()
    return a


def _t_mul(a: list, b: list, field: FieldDescriptor) -> list:
    if not a or not b:
        return []
    out = [field.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _t_strip(out)


def _t_divmod(a: list, b: list, field: FieldDescriptor) -> tuple[list, list]:
    r = list(a)
    q = [field.zero()] * max(0, len(a) - len(b) + 1)
    inv = field.one() / b[-1]
    while len(r) >= len(b):
        c = r[-1] * inv
        d = len(r) - len(b)
        q[d] = c
        for i, x in enumerate(b):
            r[i + d] = r[i + d] - c * x
        _t_strip(r)
        if not r:
            break
    return _t_strip(q), r


def _t_gcd(a: list, b: list, field: FieldDescriptor) -> list:
    a, b = list(a), list(b)
    while b:
        a, b = b, _t_divmod(a, b, field)[1]
    if a:
        inv = field.one() / a[-1]
        a = [x * inv for x in a]
    return a


def _t_sub(a: list, b: list, field: FieldDescriptor) -> list:
    n = max(len(a), len(b))
    zero = field.zero()
    out = [
        (a[i] if i < len(a) else zero) - (b[i] if i < len(b) else zero)
        for i in range(n)
    ]
    return _t_strip(out)


def _t_xgcd(a: list, b: list, field: FieldDescriptor):
    """(g, u, v) monic with u*a + v*b = g."""
    r0, r1 = list(a), list(b)
    u0, u1 = [field.one()], []
    v0, v1 = [], [field.one()]
    while r1:
        q, r = _t_divmod(r0, r1, field)
        r0, r1 = r1, r
        u0, u1 = u1, _t_sub(u0, _t_mul(q, u1, field), field)
        v0, v1 = v1, _t_sub(v0, _t_mul(q, v1, field), field)
    g = r0
    if g:
        inv = field.one() / g[-1]
        g = [x * inv for x in g]
        u0 = [x * inv for x in u0]
        v0 = [x * inv for x in v0]
    return g, u0, v0


def _t_derivative(a: list) -> list:
    return _t_strip([i * c for i, c in enumerate(a)][1:])


def _t_eval(a: list, x):
    acc = None
    for c in reversed(a):
        acc = c if acc is None else acc * x + c
    return acc


def _t_str(a: list) -> str:
    if not a:
        return "0"
    parts = []
    for i, c in enumerate(a):
        if c.is_zero:
            continue
        mono = "1" if i == 0 else ("T" if i == 1 else f"T^{i}")
        parts.append(f"({element_to_str(c)})*{mono}" if i else element_to_str(c))
    return " + ".join(parts)


def _t_pow(a: list, n: int, field: FieldDescriptor) -> list:
    out = [field.one()]
    for _ in range(n):
        out = _t_mul(out, a, field)
    return out


# ------------------------------------------------------ quotient algebra


class QuotientAlgebra:
    """k[c1,c2,c3]/(f1,f2,f3) with a monomial basis and mult matrices."""

    __slots__ = ("field", "groebner", "monomial_basis", "mult_tables", "dim",
                 "_trace_vec")

    def __init__(self, field: FieldDescriptor, groebner, monomial_basis,
                 mult_tables):
        self.field = field
        self.groebner = groebner
        self.monomial_basis = monomial_basis
        self.mult_tables = mult_tables
        self.dim = len(monomial_basis)
        self._trace_vec = None

    def nf(self, poly: dict) -> dict:
        return normal_form(poly, self.groebner)

    def coords(self, poly: dict) -> list:
        """Coordinate vector of the normal form on the monomial basis."""
        r = self.nf(poly)
        zero = self.field.zero()
        out = [zero] * self.dim
        for m, c in r.items():
            out[self.monomial_basis.index(m)] = c
        return out

    def trace_vector(self) -> list:
        """Tr of multiplication by each basis monomial."""
        if self._trace_vec is None:
            vec = []
            for m in self.monomial_basis:
                t = None
                for k, mk in enumerate(self.monomial_basis):
                    prod = tuple(a + b for a, b in zip(m, mk))
                    c = self.coords({prod: self.field.one()})[k]
                    t = c if t is None else t + c
                vec.append(t)
            self._trace_vec = vec
        return self._trace_vec

    def trace_of(self, poly: dict):
        """Tr of multiplication by the class of poly."""
        tv = self.trace_vector()
        out = self.field.zero()
        for c, t in zip(self.coords(poly), tv):
            out = out + c * t
        return out

    def operator_of(self, poly: dict) -> list:
        """Matrix of multiplication by poly on the monomial basis."""
        one = self.field.one()
        cols = [
            self.coords(poly_mul(poly, {m: one}))
            for m in self.monomial_basis
        ]
        return [list(row) for row in zip(*cols)]


def _infer_field(eqs, field: Optional[FieldDescriptor]) -> FieldDescriptor:
    if field is None:
        for eq in eqs:
            for v in eq.values():
                if isinstance(v, FieldElement):
                    field = v.field
                    break
            if field is not None:
                break
    if field is None:
        raise ValueError("no field element among the coefficients")
    if field.level != 0:
        raise ValueError("the quotient algebra lives over the base field")
    return field


def build_algebra(eqs, field: Optional[FieldDescriptor] = None) -> QuotientAlgebra:
    """Quotient algebra of three equations in the chart c0 = 1.

    Rejects systems whose projective closure meets c0 = 0 (the three
    top-degree parts must cut out only the origin) and systems that are
    not zero-dimensional in the chart.
    """
    field = _infer_field(eqs, field)
    eqs = [as_poly(eq, field) for eq in eqs]
    if any(not eq for eq in eqs):
        raise ValueError("zero polynomial among the equations")

    tops = [top_component(eq) for eq in eqs]
    try:
        _staircase(buchberger(tops))
    except NotZeroDimensional:
        raise SolutionsAtInfinity(
            "the closure of the solution set meets c0 = 0"
            " (a degenerate line-circle solves the system)"
        ) from None

    gb = buchberger(eqs)
    basis = _staircase(gb)
    algebra = QuotientAlgebra(field, gb, basis, None)
    tables = [algebra.operator_of({v: field.one()}) for v in VARS]
    algebra.mult_tables = tables
    for i in range(3):
        for j in range(i):
            assert _mat_mul(tables[i], tables[j]) == _mat_mul(
                tables[j], tables[i]
            ), "multiplication tables must commute"
    return algebra


# ------------------------------------------------------ equations, forms


def equations_from(objects) -> list[dict]:
    """Chart equations of the three inputs, in input order.

    Circles contribute their tangency quadric (a radius-0 circle gives
    the doubled incidence plane); points contribute the incidence plane
    itself, a linear equation.
    """
    eqs = []
    for obj in objects:
        if isinstance(obj, Point):
            plane = plane_through(obj.x, obj.y, obj.field)
            k = plane.coeffs
            eqs.append(as_poly(
                {(0, 0, 0): k[0], VARS[0]: k[1], VARS[1]: k[2], VARS[2]: k[3]},
                obj.field,
            ))
        else:
            cone = _cone_poly(obj)
            eqs.append(cone)
    return eqs


def _cone_poly(circle: Circle) -> dict:
    from .moduli import cone_of

    G = cone_of(circle).gram
    field = circle.field
    terms: dict = {}
    def bump(m, c):
        cur = terms.get(m)
        cur = c if cur is None else cur + c
        if cur.is_zero:
            terms.pop(m, None)
        else:
            terms[m] = cur

    two = field.coerce(2)
    bump((0, 0, 0), G[0][0])
    for i in range(1, 4):
        bump(VARS[i - 1], two * G[0][i])
    for i in range(1, 4):
        for j in range(i, 4):
            c = G[i][j] if i == j else two * G[i][j]
            m = tuple(
                (1 if k == i - 1 else 0) + (1 if k == j - 1 else 0)
                for k in range(3)
            )
            bump(m, c)
    return terms


def jacobian_poly(eqs, field: Optional[FieldDescriptor] = None) -> dict:
    """det of the partial-derivative matrix of the three equations."""
    field = _infer_field(eqs, field)
    eqs = [as_poly(eq, field) for eq in eqs]
    J = [[poly_derivative(eq, v) for v in range(3)] for eq in eqs]
    out: dict = {}
    for sign, (a, b, c) in (
        (1, (0, 1, 2)), (1, (1, 2, 0)), (1, (2, 0, 1)),
        (-1, (0, 2, 1)), (-1, (1, 0, 2)), (-1, (2, 1, 0)),
    ):
        term = poly_mul(poly_mul(J[0][a], J[1][b]), J[2][c])
        out = poly_add(out, term if sign > 0 else poly_neg(term))
    return out


def _gram_matrix(algebra: QuotientAlgebra, volpoly: dict) -> list:
    J = algebra.nf(as_poly(volpoly, algebra.field))
    n = algebra.dim
    basis = algebra.monomial_basis
    B = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            m = tuple(x + y for x, y in zip(basis[a], basis[b]))
            val = algebra.trace_of(poly_mul(J, {m: algebra.field.one()}))
            B[a][b] = B[b][a] = val
    return B


def _form_rank(gram: GramForm) -> int:
    """Rank by symmetric elimination; no invariants, no factoring."""
    return sum(1 for d in diagonalize(gram) if not d.is_zero)


def global_trace_form(algebra: QuotientAlgebra, volpoly: dict) -> GramForm:
    """Gram matrix of Tr(J*x*y) on the monomial basis.

    Nondegenerate exactly when the intersection is transverse (etale
    algebra); a degenerate result is rejected so no caller mistakes it
    for a sum of local indices.
    """
    B = _gram_matrix(algebra, volpoly)
    gram = GramForm(algebra.field, B)
    if _form_rank(gram) < algebra.dim:
        raise DegenerateForm(
            "Tr(J*x*y) is singular: the configuration is not transverse"
        )
    return gram


# --------------------------------------------------- idempotent splitting

SEPARATING_FORMS = (
    {VARS[0]: 1, VARS[1]: 2, VARS[2]: 4},
    {VARS[0]: 1, VARS[1]: 3, VARS[2]: 9},
)


def _minimal_polynomial(algebra: QuotientAlgebra, lform: dict) -> list:
    """Monic minimal polynomial of the class of lform, ascending coeffs."""
    field = algebra.field
    M = algebra.operator_of(lform)
    v = [field.one()] + [field.zero()] * (algebra.dim - 1)
    krylov = [v]
    while True:
        v = _mat_vec(M, krylov[-1])
        combo = _solve_in_span(krylov, v, field)
        if combo is not None:
            return [-c for c in combo] + [field.one()]
        krylov.append(v)


def _poly_gcd_mod(a: list, b: list, p: int) -> list:
    """Euclidean gcd of integer coefficient lists modulo p."""
    a = [c % p for c in a]
    b = [c % p for c in b]
    while any(b):
        while b and b[-1] % p == 0:
            b.pop()
        if not b:
            break
        inv = pow(b[-1], p - 2, p)
        r = list(a)
        while len(r) >= len(b) and any(r):
            while r and r[-1] % p == 0:
                r.pop()
            if len(r) < len(b):
                break
            q = r[-1] * inv % p
            off = len(r) - len(b)
            for i, c in enumerate(b):
                r[off + i] = (r[off + i] - q * c) % p
        a, b = b, r
    while a and a[-1] % p == 0:
        a.pop()
    return a


def _int_roots(ints: list) -> list:
    """Integer roots of a squarefree integer polynomial.

    Factoring the constant term can stall on large inputs, so instead
    scan the residues of one prime that keeps the polynomial squarefree
    and Hensel-lift each modular root past the Cauchy root bound; a
    lift that lands on an exact root is kept.
    """
    deg = len(ints) - 1
    if deg <= 0:
        return []
    if deg == 1:
        return [-ints[0] // ints[1]] if ints[0] % ints[1] == 0 else []
    lead = ints[-1]
    bound = 2 + max(abs(c) for c in ints[:-1]) // abs(lead)
    der = [i * c for i, c in enumerate(ints)][1:]
    p = 997
    while True:
        p = int(nextprime(p))
        if lead % p == 0:
            continue
        if len(_poly_gcd_mod(ints, der, p)) <= 1:
            break
    residues = []
    mods = [c % p for c in ints]
    for r in range(p):
        acc = 0
        for c in reversed(mods):
            acc = (acc * r + c) % p
        if acc == 0:
            residues.append(r)
    roots = []
    for r in residues:
        m = p
        while m <= 2 * bound:
            # Newton step doubles the modulus of Q(r) = 0
            m = m * m
            fr = 0
            for c in reversed(ints):
                fr = (fr * r + c) % m
            dr = 0
            for c in reversed(der):
                dr = (dr * r + c) % m
            r = (r - fr * pow(dr, -1, m)) % m
        x = r if r <= m // 2 else r - m
        val = 0
        for c in reversed(ints):
            val = val * x + c
        if val == 0:
            roots.append(x)
    return roots


def _root_candidates(poly: list, field: FieldDescriptor):
    if field.base != "Q":
        p = field.base
        return [field.coerce(i) for i in range(p)]
    fracs = [c.rep for c in poly]
    den = 1
    for f in fracs:
        den = den * f.denominator // gcd(den, f.denominator)
    ints = [int(f * den) for f in fracs]
    while ints and ints[0] == 0:
        ints = ints[1:]  # zero root handled by its own candidate below
    if not ints or len(ints) == 1:
        return [field.zero()]
    g = 0
    for c in ints:
        g = gcd(g, c)
        if g == 1:
            break
    if g > 1:
        ints = [c // g for c in ints]
    # a rational root n/q of P is the integer root y = q n of the monic
    # transform lead^(deg-1) P(T / lead), scaled back by the lead
    deg = len(ints) - 1
    lead = ints[-1]
    monic = [c * lead ** (deg - 1 - i) for i, c in enumerate(ints[:-1])] + [1]
    cands = [field.zero()]
    for y in _int_roots(monic):
        cands.append(field.coerce(y) / field.coerce(lead))
    return cands


def _rational_roots(poly: list, field: FieldDescriptor):
    """((root, multiplicity) list, rootless cofactor), exact division."""
    roots = []
    rest = list(poly)
    squarefree = rest
    if len(rest) > 2:
        # repeated roots square the coefficients the candidates divide;
        # hunting on the squarefree part keeps the divisor sets small
        g = _t_gcd(rest, _t_derivative(rest), field)
        if len(g) > 1:
            squarefree = _t_divmod(rest, g, field)[0]
    for r in _root_candidates(squarefree, field):
        if len(rest) <= 1:
            break
        val = _t_eval(squarefree, r)
        if val is None or not val.is_zero:
            continue
        mult = 0
        lin = [-r, field.one()]
        while True:
            q, rem = _t_divmod(rest, lin, field)
            if rem:
                break
            rest = q
            mult += 1
            if len(rest) <= 1:
                break
        if mult:
            roots.append((r, mult))
    return roots, rest


class SplitReport:
    """Block decomposition of the algebra along a separating form."""

    __slots__ = ("field", "dim", "separating", "minpoly", "blocks", "total")

    def __init__(self, field, dim, separating, minpoly, blocks, total):
        self.field = field
        self.dim = dim
        self.separating = separating
        self.minpoly = minpoly
        self.blocks = blocks
        self.total = total

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "separating": {
                "".join(f"c{i + 1}" * e for i, e in enumerate(m)) or "1":
                    element_to_str(self.field.coerce(c))
                for m, c in self.separating.items()
            },
            "minpoly": _t_str(self.minpoly),
            "blocks": [
                {
                    "factor": _t_str(b["factor"]),
                    "power": b["power"],
                    "reduced_degree": b["reduced_degree"],
                    "rank": b["rank"],
                    "formclass": None if b["formclass"] is None
                    else b["formclass"].to_json(),
                    "beta": None if b["beta"] is None else b["beta"].to_json(),
                }
                for b in self.blocks
            ],
            "total": None if self.total is None else self.total.to_json(),
        }


def _factor_power(tpoly: list, field: FieldDescriptor):
    """(h, k) with tpoly = h^k and h squarefree, else (tpoly, 1)."""
    deg = len(tpoly) - 1
    sf = _t_divmod(tpoly, _t_gcd(tpoly, _t_derivative(tpoly), field), field)[0]
    if sf:
        inv = field.one() / sf[-1]
        sf = [c * inv for c in sf]
    d = len(sf) - 1
    if d and deg % d == 0 and _t_pow(sf, deg // d, field) == tpoly:
        return sf, deg // d
    return tpoly, 1


def _separating_minpoly(algebra: QuotientAlgebra):
    """Best separating form and its minimal polynomial on the algebra."""
    best = None
    for lform in SEPARATING_FORMS:
        l = as_poly(lform, algebra.field)
        mu = _minimal_polynomial(algebra, l)
        if best is None or len(mu) > len(best[1]):
            best = (l, mu)
        if len(mu) - 1 == algebra.dim:
            break
    return best


def idempotent_split(algebra: QuotientAlgebra, volpoly: dict) -> SplitReport:
    """Decompose along rational roots of a separating form's minpoly.

    Coprime factors of the minimal polynomial give orthogonal
    idempotents by xgcd; each block carries the restriction of the
    global form.  A block whose restricted form is nondegenerate
    reports it as the block's local index sum; a doubled block
    ((T-r)^2 structure, rank 2*deg) reports the hyperbolic index its
    double point carries.  Blocks with no rational split stay whole.
    """
    field = algebra.field
    lform, mu = _separating_minpoly(algebra)

    roots, cofactor = _rational_roots(mu, field)
    factors = [_t_pow([-r, field.one()], m, field) for r, m in roots]
    meta = [([-r, field.one()], m) for r, m in roots]
    if len(cofactor) > 1:
        factors.append(cofactor)
        meta.append(_factor_power(cofactor, field))

    B = _gram_matrix(algebra, volpoly)
    if len(factors) <= 1:
        identity = [
            [field.one() if i == j else field.zero() for j in range(algebra.dim)]
            for i in range(algebra.dim)
        ]
        col_bases = [_independent_columns(identity, field)]
    else:
        M = algebra.operator_of(lform)
        col_bases = []
        for f in factors:
            h = _t_divmod(mu, f, field)[0]
            g, u, _ = _t_xgcd(h, f, field)
            assert len(g) == 1, "factors of the minimal polynomial not coprime"
            e = _t_divmod(_t_mul(u, h, field), mu, field)[1]
            E = _t_matrix_eval(e, M, field)
            assert _mat_mul(E, E) == E, "idempotent evaluation failed"
            col_bases.append(_independent_columns(E, field))

    blocks = []
    betas = []
    for (base_factor, power), cols in zip(meta, col_bases):
        rank = len(cols)
        gram = [[_bilinear(B, u, v, field) for v in cols] for u in cols]
        gf = GramForm(field, gram)
        # rank by elimination first: invariants factor the entries,
        # which a degenerate block (all zeros) never needs
        degenerate = _form_rank(gf) < rank
        cls = None if degenerate else form_class(gf)
        red_deg = len(base_factor) - 1
        beta = None
        if not degenerate:
            beta = cls
        elif power == 2 and rank == 2 * red_deg:
            # a double point: its index is the hyperbolic form traced
            # down from the residue field of the reduced factor
            beta = hyperbolic_class(field.base, red_deg)
        blocks.append({
            "factor": base_factor,
            "power": power,
            "reduced_degree": red_deg,
            "rank": rank,
            "formclass": None if degenerate else cls,
            "beta": beta,
        })
        betas.append(beta)

    total = None
    if all(b is not None for b in betas) and betas:
        total = sum_forms(betas, field.base)
    return SplitReport(field, algebra.dim, lform, mu, blocks, total)


def _t_matrix_eval(coeffs: list, M: list, field: FieldDescriptor) -> list:
    n = len(M)
    zero = field.zero()
    out = [[zero] * n for _ in range(n)]
    if not coeffs:
        return out
    for i in range(n):
        out[i][i] = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        out = _mat_mul(out, M)
        for i in range(n):
            out[i][i] = out[i][i] + c
    return out


def _bilinear(B, u, v, field: FieldDescriptor):
    out = field.zero()
    for i, x in enumerate(u):
        if x.is_zero:
            continue
        for j, y in enumerate(v):
            if not y.is_zero:
                out = out + x * B[i][j] * y
    return out


# ---------------------------------------------------------- full report


def zerodim_report(objects, field: Optional[FieldDescriptor] = None) -> dict:
    """One-call pipeline: equations, algebra, global form, blocks."""
    eqs = equations_from(objects)
    field = _infer_field(eqs, field)
    algebra = build_algebra(eqs, field)
    vol = jacobian_poly(eqs, field)
    split = idempotent_split(algebra, vol)
    B = _gram_matrix(algebra, vol)
    gf = GramForm(field, B)
    overall = form_class(gf) if _form_rank(gf) == algebra.dim else split.total
    return {
        "dim": algebra.dim,
        "gram": [[element_to_str(x) for x in row] for row in B],
        "formclass": None if overall is None else overall.to_json(),
        "blocks": [
            {
                "rank": b["rank"],
                "formclass": None if (b["beta"] or b["formclass"]) is None
                else (b["beta"] or b["formclass"]).to_json(),
            }
            for b in split.blocks
        ],
    }


def rational_points(algebra: QuotientAlgebra):
    """(points, unresolved ranks): chart coordinates read off rank-1 blocks.

    Each simple rational point shows up as a rank-1 block of the
    idempotent splitting, on which every coordinate acts as a scalar.
    Blocks of higher rank (conjugate or multiple points, or a
    non-separating form) are tallied by rank, not enumerated.
    """
    field = algebra.field
    best, mu = _separating_minpoly(algebra)
    roots, _ = _rational_roots(mu, field)
    M = algebra.operator_of(best)
    points = []
    unresolved = []
    factors = [_t_pow([-r, field.one()], m, field) for r, m in roots]
    # rebuild the idempotent columns to read coordinates off each block
    cofactor = mu
    for f in factors:
        cofactor = _t_divmod(cofactor, f, field)[0]
    if len(cofactor) > 1:
        factors.append(cofactor)
    if len(factors) <= 1:
        cols = [[field.one() if i == j else field.zero()
                 for j in range(algebra.dim)] for i in range(algebra.dim)]
        col_bases = [_independent_columns(cols, field)]
    else:
        col_bases = []
        for f in factors:
            h = _t_divmod(mu, f, field)[0]
            g, u, _ = _t_xgcd(h, f, field)
            e = _t_divmod(_t_mul(u, h, field), mu, field)[1]
            E = _t_matrix_eval(e, M, field)
            col_bases.append(_independent_columns(E, field))
    for cols in col_bases:
        if len(cols) != 1:
            unresolved.append(len(cols))
            continue
        v = cols[0]
        lead = next(i for i, x in enumerate(v) if not x.is_zero)
        coords = []
        for T in algebra.mult_tables:
            w = _mat_vec(T, v)
            coords.append(w[lead] / v[lead])
        points.append(tuple(coords))
    return points, unresolved
