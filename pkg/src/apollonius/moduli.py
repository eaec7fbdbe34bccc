"""The moduli space P^3 of circles.

A point [c0:c1:c2:c3] is identified with the plane conic
c0*(x^2+y^2) + z*(c1*x + c2*y + c3*z) = 0; for c0 != 0 this is the
circle of center (-c1/(2c0), -c2/(2c0)) and radius squared
-c3/c0 + (c1^2+c2^2)/(4c0^2).  Circles tangent to a fixed one form a
quadric cone in P^3, circles through a fixed point form a hyperplane,
and both are stored as explicit (bi)linear data for evaluation and
gradient computations downstream.
"""

from __future__ import annotations

from typing import Optional, Sequence, Union

from .errors import (
    DegenerateCircle,
    DegenerateInput,
    CollinearCenters,
    PoleAtT,
    SquareRootUnavailable,
    TangentPair,
    UnderDetermined,
)
from .exactfield import FieldDescriptor, FieldElement, is_square, rationals


class _OkStatus:
    def __repr__(self):
        return "OK"


OK = _OkStatus()


def _common_field(values, field: Optional[FieldDescriptor]) -> FieldDescriptor:
    best = field
    for v in values:
        if isinstance(v, FieldElement):
            if best is None or best.is_prefix_of(v.field):
                best = v.field
    return best if best is not None else rationals()


class Circle:
    """A point of the circle moduli P^3, canonicalized so its first
    nonzero coordinate is 1."""

    __slots__ = ("field", "coords")

    def __init__(self, coords: Sequence, field: Optional[FieldDescriptor] = None):
        field = _common_field(coords, field)
        raw = [field.coerce(x) for x in coords]
        if len(raw) != 4:
            raise ValueError("a circle has four projective coordinates")
        lead = next((x for x in raw if not x.is_zero), None)
        if lead is None:
            raise ValueError("[0:0:0:0] is not a point of P^3")
        inv = lead.inverse()
        self.field = field
        self.coords = tuple(x * inv for x in raw)

    @property
    def is_degenerate(self) -> bool:
        return self.coords[0].is_zero

    def __eq__(self, other):
        if not isinstance(other, Circle):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "[" + " : ".join(repr(c) for c in self.coords) + "]"

    def to_json(self) -> dict:
        from .exactfield import element_to_str

        return {"coords": [element_to_str(c) for c in self.coords]}


class Point:
    """A genuine point of the plane (not a radius-0 circle): tangency
    through it is the linear condition of :func:`plane_through`."""

    __slots__ = ("x", "y", "field")

    def __init__(self, x, y, field: Optional[FieldDescriptor] = None):
        field = _common_field((x, y), field)
        self.x = field.coerce(x)
        self.y = field.coerce(y)
        self.field = field

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        return f"Point({self.x!r}, {self.y!r})"


def center_radius(c: Circle) -> tuple[FieldElement, FieldElement, FieldElement]:
    """(a, b, r^2) of a non-degenerate circle."""
    if c.is_degenerate:
        raise DegenerateCircle(f"{c!r} has no center")
    c0, c1, c2, c3 = c.coords
    a = -c1 / (2 * c0)
    b = -c2 / (2 * c0)
    r2 = -c3 / c0 + (c1 * c1 + c2 * c2) / (4 * c0 * c0)
    return a, b, r2


def circle_from(a, b, r2, field: Optional[FieldDescriptor] = None) -> Circle:
    """The circle of center (a, b) and radius squared r2."""
    field = _common_field((a, b, r2), field)
    a, b, r2 = field.coerce(a), field.coerce(b), field.coerce(r2)
    return Circle((field.one(), -2 * a, -2 * b, a * a + b * b - r2), field)


class QuadricCone:
    """The quadric of circles tangent to a fixed circle: a rank-3 cone
    with apex the circle itself (rank 1 for a radius-0 circle, where it
    degenerates to the doubled incidence plane)."""

    __slots__ = ("field", "gram", "apex")

    def __init__(self, field: FieldDescriptor, gram, apex: Circle):
        self.field = field
        self.gram = tuple(tuple(field.coerce(x) for x in row) for row in gram)
        self.apex = apex

    def evaluate(self, c: Circle) -> FieldElement:
        # Element arithmetic lifts across compatible towers, so the
        # circle may live in an extension of the cone's field.
        total = None
        for i in range(4):
            for j in range(4):
                term = self.gram[i][j] * c.coords[i] * c.coords[j]
                total = term if total is None else total + term
        return total

    def gradient(self, coords) -> list[FieldElement]:
        """The four partials of c^T G c at the given coordinates."""
        out = []
        for i in range(4):
            g = None
            for j in range(4):
                term = self.gram[i][j] * coords[j]
                g = term if g is None else g + term
            out.append(g + g)
        return out


class Hyperplane:
    """The hyperplane of circles through a fixed point."""

    __slots__ = ("field", "coeffs")

    def __init__(self, coeffs: Sequence, field: Optional[FieldDescriptor] = None):
        field = _common_field(coeffs, field)
        self.field = field
        self.coeffs = tuple(field.coerce(x) for x in coeffs)
        if all(x.is_zero for x in self.coeffs):
            raise ValueError("zero coefficients do not cut a hyperplane")

    def evaluate(self, c: Circle) -> FieldElement:
        total = None
        for h, x in zip(self.coeffs, c.coords):
            term = h * x
            total = term if total is None else total + term
        return total

    def __repr__(self):
        return "V[" + " : ".join(repr(c) for c in self.coeffs) + "]"


def cone_of(c: Circle) -> QuadricCone:
    """The tangency cone of a non-degenerate circle.

    With w = (a^2+b^2+r^2, a, b, 1), x = (2a, 1, 0, 0), y = (2b, 0, 1, 0),
    the defining form is (w.c)^2 - r^2((x.c)^2 + (y.c)^2), so the Gram
    matrix is w w^T - r^2 (x x^T + y y^T).  For r^2 = 0 it collapses to
    the rank-1 outer product of the incidence plane's coefficients.
    """
    a, b, r2 = center_radius(c)
    K = c.field
    one, zero = K.one(), K.zero()
    w = (a * a + b * b + r2, a, b, one)
    x = (2 * a, one, zero, zero)
    y = (2 * b, zero, one, zero)
    gram = [
        [w[i] * w[j] - r2 * (x[i] * x[j] + y[i] * y[j]) for j in range(4)]
        for i in range(4)
    ]
    return QuadricCone(K, gram, c)


def plane_through(a, b, field: Optional[FieldDescriptor] = None) -> Hyperplane:
    """The hyperplane of circles through the point (a, b)."""
    field = _common_field((a, b), field)
    a, b = field.coerce(a), field.coerce(b)
    return Hyperplane((a * a + b * b, a, b, field.one()), field)


def tangency_test(c1: Circle, c2: Circle) -> bool:
    """Whether two non-degenerate circles are tangent (cone membership)."""
    return cone_of(c1).evaluate(c2).is_zero


def centers_determinant(centers) -> FieldElement:
    """det[(a_i, b_i, 1)] = (a1-a2)(b1-b3) - (a1-a3)(b1-b2); zero iff
    the three centers are collinear."""
    (a1, b1), (a2, b2), (a3, b3) = centers
    return (a1 - a2) * (b1 - b3) - (a1 - a3) * (b1 - b2)


def config_check(c1: Circle, c2: Circle, c3: Circle):
    """OK, or the diagnosis (an unraised exception instance):
    DegenerateInput, CollinearCenters, or TangentPair(i, j).

    Degeneracy is checked first, then collinearity, then tangency.
    """
    circles = (c1, c2, c3)
    if any(c.is_degenerate for c in circles):
        return DegenerateInput("an input is a degenerate (line) circle")
    if c1 == c2 or c1 == c3 or c2 == c3:
        return DegenerateInput("two input circles coincide")
    data = [center_radius(c) for c in circles]
    if centers_determinant([(a, b) for a, b, _ in data]).is_zero:
        return CollinearCenters("the three centers are collinear")
    for i, j in ((1, 2), (1, 3), (2, 3)):
        if tangency_test(circles[i - 1], circles[j - 1]):
            return TangentPair(i, j)
    return OK


def circle_through_points(p1, p2, p3, field: Optional[FieldDescriptor] = None) -> Circle:
    """The unique circle through three distinct points, by solving the
    three incidence conditions; collinear points give the degenerate
    line-circle (c0 = 0)."""
    pts = []
    for p in (p1, p2, p3):
        if isinstance(p, Point):
            pts.append((p.x, p.y))
        else:
            pts.append(tuple(p))
    flat = [x for p in pts for x in p]
    field = _common_field(flat, field)
    pts = [(field.coerce(x), field.coerce(y)) for x, y in pts]
    if pts[0] == pts[1] or pts[0] == pts[2] or pts[1] == pts[2]:
        raise UnderDetermined("two of the three points coincide")
    rows = [plane_through(x, y, field).coeffs for x, y in pts]

    def minor(skip: int) -> FieldElement:
        cols = [j for j in range(4) if j != skip]
        m = [[rows[i][j] for j in cols] for i in range(3)]
        return (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )

    coords = []
    sign = 1
    for k in range(4):
        mk = minor(k)
        coords.append(mk if sign > 0 else -mk)
        sign = -sign
    if all(x.is_zero for x in coords):
        raise UnderDetermined("the three incidence conditions are dependent")
    return Circle(coords, field)


def directrix_member(c: Circle, t) -> Circle:
    """The member at parameter t (or "inf") of the conic directrix on
    the tangency cone of c: radius squared (2r)^2, center
    (a + r(1-t^2)/(1+t^2), b + 2rt/(1+t^2))."""
    a, b, r2 = center_radius(c)
    K = c.field
    r = is_square(K, r2)
    if r is None:
        raise SquareRootUnavailable(f"r^2 = {r2!r} is not a square in {K!r}")
    if t == "inf":
        return circle_from(a - r, b, 4 * r2, K)
    t = K.coerce(t)
    den = 1 + t * t
    if den.is_zero:
        raise PoleAtT("1 + t^2 = 0")
    alpha = a + r * (1 - t * t) / den
    beta = b + r * (2 * t) / den
    return circle_from(alpha, beta, 4 * r2, K)
