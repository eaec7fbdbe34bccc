"""Closed-form solver for the three-circle tangency problem.

Fix a sign vector s in {+1,-1}^3 (s and -s give the same circles, so
representatives with s1 = +1 are enough).  The three tangency
conditions

    (alpha - a_i)^2 + (beta - b_i)^2 = (x - s_i r_i)^2

are linear in (alpha, beta) after subtracting the first from the other
two, so the center moves linearly in the signed radius x and the first
condition collapses to a single quadratic f_s(x).  Each of the four
sign classes contributes the two roots of its f_s: eight tangent
circles in all, each living in at most a quadratic extension of the
field generated by the chosen radii.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .errors import (
    CollinearCenters,
    ConcentricDegeneracy,
    InfiniteRadius,
    TangentPair,
)
from .exactfield import (
    AlreadySquare,
    FieldDescriptor,
    FieldElement,
    adjoin_sqrt,
    descriptor_to_json,
    element_to_str,
    is_square,
)
from .moduli import (
    OK,
    Circle,
    center_radius,
    centers_determinant,
    circle_from,
    cone_of,
    config_check,
    _common_field,
)

SIGN_VECTORS = ((1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1))


def delta(centers, field: Optional[FieldDescriptor] = None) -> FieldElement:
    """(a1-a2)(b1-b3) - (a1-a3)(b1-b2); zero iff the centers are collinear."""
    flat = [x for p in centers for x in p]
    field = _common_field(flat, field)
    pairs = [(field.coerce(a), field.coerce(b)) for a, b in centers]
    return centers_determinant(pairs)


class CoaklayCoefficients:
    """The six elimination quantities (A1, B1, A2, B2, M, N) of one sign
    class, iterable in that order; also carries s and s1*r1 so the
    quadratic can be reassembled without re-deriving them."""

    __slots__ = ("A1", "B1", "A2", "B2", "M", "N", "sign", "sr1")

    def __init__(self, A1, B1, A2, B2, M, N, sign, sr1):
        self.A1, self.B1, self.A2, self.B2 = A1, B1, A2, B2
        self.M, self.N = M, N
        self.sign = tuple(sign)
        self.sr1 = sr1

    def __iter__(self):
        return iter((self.A1, self.B1, self.A2, self.B2, self.M, self.N))

    def __repr__(self):
        return (
            f"CoaklayCoefficients(s={self.sign}, A1={self.A1!r}, B1={self.B1!r}, "
            f"A2={self.A2!r}, B2={self.B2!r}, M={self.M!r}, N={self.N!r})"
        )


def coefficients_from_data(centers, radii, s) -> CoaklayCoefficients:
    """Eliminate the center from the tangency system.

    Generic over the coefficient ring: values need only support ring
    arithmetic with ints and division by the (constant) determinant, so
    the same code serves field elements and polynomials in the family
    parameter t.
    """
    (a1, b1), (a2, b2), (a3, b3) = centers
    r1, r2, r3 = radii
    s1, s2, s3 = s
    dl = (a1 - a2) * (b1 - b3) - (a1 - a3) * (b1 - b2)
    if dl.is_zero:
        raise CollinearCenters("the three centers are collinear")
    d12 = a1 * a1 - a2 * a2 + b1 * b1 - b2 * b2 - (r1 * r1 - r2 * r2)
    d13 = a1 * a1 - a3 * a3 + b1 * b1 - b3 * b3 - (r1 * r1 - r3 * r3)
    g2 = s1 * r1 - s2 * r2
    g3 = s1 * r1 - s3 * r3
    two_dl = 2 * dl
    A1 = ((b1 - b3) * g2 - (b1 - b2) * g3) / dl
    B1 = ((a1 - a2) * g3 - (a1 - a3) * g2) / dl
    A2 = ((b1 - b3) * d12 - (b1 - b2) * d13) / two_dl
    B2 = ((a1 - a2) * d13 - (a1 - a3) * d12) / two_dl
    sr1 = s1 * r1
    M = A2 + A1 * sr1 - a1
    N = B2 + B1 * sr1 - b1
    return CoaklayCoefficients(A1, B1, A2, B2, M, N, s, sr1)


def coaklay_coefficients(circles: Sequence[Circle], radii, s) -> CoaklayCoefficients:
    """The elimination coefficients for three circles and chosen radius
    roots r_i (each r_i^2 must equal the circle's radius squared)."""
    centers = []
    for c in circles:
        a, b, _ = center_radius(c)
        centers.append((a, b))
    return coefficients_from_data(centers, radii, s)


def coaklay_poly(coeffs: CoaklayCoefficients, s=None):
    """The quadratic f_s as x-coefficients (quad, lin, const).

    f_s(x) = (1 - A1^2 - B1^2)(x - s1 r1)^2
             - 2(M A1 + N B1)(x - s1 r1) - (M^2 + N^2).

    A vanishing leading coefficient signals a solution of infinite
    radius (a common tangent line), which callers reject.
    """
    if s is not None and tuple(s) != coeffs.sign:
        raise ValueError("sign vector does not match the coefficients")
    A1, B1, A2, B2, M, N = coeffs
    sr1 = coeffs.sr1
    lead = 1 - A1 * A1 - B1 * B1
    cross = M * A1 + N * B1
    quad = lead
    lin = -2 * (lead * sr1) - 2 * cross
    const = lead * (sr1 * sr1) + 2 * (cross * sr1) - (M * M + N * N)
    return quad, lin, const


class ProblemData:
    """Three circles with radius roots chosen in a common tower."""

    __slots__ = ("circles", "field", "centers", "radii", "r2s")

    def __init__(self, circles, field, centers, radii, r2s):
        self.circles = tuple(circles)
        self.field = field
        self.centers = tuple(centers)
        self.radii = tuple(radii)
        self.r2s = tuple(r2s)


def choose_radii(circles: Sequence[Circle], branches=(1, 1, 1)) -> ProblemData:
    """Pick square roots r_i of the radius-squares, extending the tower
    when a radius is irrational.  Each branch entry is +1/-1 (flipping
    the canonical root) or an explicit FieldElement r with r^2 = r_i^2.
    """
    K = circles[0].field
    for c in circles[1:]:
        if K.is_prefix_of(c.field):
            K = c.field
    data = [center_radius(c) for c in circles]
    radii = []
    for (a, b, r2), br in zip(data, branches):
        if isinstance(br, FieldElement):
            if br * br != r2:
                raise ValueError("explicit radius does not square to r^2")
            if K.is_prefix_of(br.field):
                K = br.field
            radii.append(br)
            continue
        if br not in (1, -1):
            raise ValueError("radius branch must be +1, -1, or an element")
        if r2.is_zero:
            radii.append(K.zero())
            continue
        w = is_square(K, r2)
        if w is None:
            K = adjoin_sqrt(K, r2)
            w = K.root()
        radii.append(br * w)
    return ProblemData(
        circles, K, [(a, b) for a, b, _ in data], radii, [r2 for _, _, r2 in data]
    )


class ApolloniusSolution:
    """One tangent circle: a root x = rho of f_s with its center,
    moduli point, and the tower containing all of its coordinates."""

    __slots__ = (
        "sign",
        "root_index",
        "rho",
        "alpha",
        "beta",
        "circle",
        "field",
        "disc",
        "multiplicity",
        "problem",
        "tangency",
    )

    def __init__(self, sign, root_index, rho, alpha, beta, circle, field, disc, problem):
        self.sign = tuple(sign)
        self.root_index = root_index
        self.rho = rho
        self.alpha = alpha
        self.beta = beta
        self.circle = circle
        self.field = field
        self.disc = disc
        self.multiplicity = 1
        self.problem = problem
        self.tangency = [None, None, None]

    def __repr__(self):
        return (
            f"ApolloniusSolution(s={self.sign}, root={self.root_index}, "
            f"center=({self.alpha!r}, {self.beta!r}), rho={self.rho!r})"
        )

    def to_json(self) -> dict:
        tangency = []
        for entry in self.tangency:
            if entry is None:
                tangency.append(None)
                continue
            (tx, ty), u, v = entry
            tangency.append(
                {
                    "tau": [element_to_str(tx), element_to_str(ty)],
                    "u": element_to_str(u),
                    "v": element_to_str(v),
                }
            )
        return {
            "sign": list(self.sign),
            "root_index": self.root_index,
            "rho": element_to_str(self.rho),
            "center": [element_to_str(self.alpha), element_to_str(self.beta)],
            "circle": self.circle.to_json(),
            "field": descriptor_to_json(self.field),
            "tangency": tangency,
        }


def _tangent_pair_error(circles) -> TangentPair:
    from .moduli import tangency_test

    for i, j in ((1, 2), (1, 3), (2, 3)):
        if tangency_test(circles[i - 1], circles[j - 1]):
            return TangentPair(i, j)
    return TangentPair(0, 0)


def solve_sign_class(problem: ProblemData, s) -> list[ApolloniusSolution]:
    """Both solutions of one sign class, in k(s) = K or K(sqrt disc)."""
    coeffs = coefficients_from_data(problem.centers, problem.radii, s)
    quad, lin, const = coaklay_poly(coeffs)
    if quad.is_zero:
        raise InfiniteRadius(f"leading coefficient of f_{s} vanishes")
    disc = lin * lin - 4 * (quad * const)
    if disc.is_zero:
        raise _tangent_pair_error(problem.circles)
    w = is_square(problem.field, disc)
    if w is None:
        Ks = adjoin_sqrt(problem.field, disc)
        w = Ks.root()
    else:
        Ks = problem.field
    out = []
    for root_index, branch in ((0, 1), (1, -1)):
        x = (-lin + branch * w) / (2 * quad)
        alpha = coeffs.A2 + coeffs.A1 * x
        beta = coeffs.B2 + coeffs.B1 * x
        circle = circle_from(alpha, beta, x * x, Ks)
        for c in problem.circles:
            assert cone_of(c).evaluate(circle).is_zero, "solution off a cone"
        out.append(
            ApolloniusSolution(s, root_index, x, alpha, beta, circle, Ks, disc, problem)
        )
    return out


def solve_all(c1: Circle, c2: Circle, c3: Circle, radii=(1, 1, 1)):
    """All eight tangent circles of a transverse configuration.

    `radii` fixes the square-root branch of each input radius (or gives
    the roots explicitly); the solution list is ordered by SIGN_VECTORS
    with the canonical-root branch (root_index 0) first in each class.
    """
    status = config_check(c1, c2, c3)
    if status is not OK:
        raise status
    problem = choose_radii((c1, c2, c3), radii)
    sols = []
    for s in SIGN_VECTORS:
        sols.extend(solve_sign_class(problem, s))
    return sols


def is_real(sol: ApolloniusSolution) -> bool:
    """Whether the solution's coordinates all live in an ordered tower
    (the standard real embedding)."""
    return sol.field.has_embedding()


def tangency_point(sol: ApolloniusSolution, i: int):
    """The point tau_i where the solution touches input circle i.

    tau_i = z_i + lambda (gamma - z_i) with
    lambda = (d^2 + r_i^2 - rho^2) / (2 d^2), d^2 = |gamma - z_i|^2:
    subtracting the two tangency distance equations keeps tau_i inside
    the solution's own field.
    """
    a_i, b_i = sol.problem.centers[i - 1]
    r2_i = sol.problem.r2s[i - 1]
    gx = sol.alpha - a_i
    gy = sol.beta - b_i
    d2 = gx * gx + gy * gy
    if d2.is_zero:
        raise ConcentricDegeneracy(f"solution concentric with input {i}")
    lam = (d2 + r2_i - sol.rho * sol.rho) / (2 * d2)
    tx = a_i + lam * gx
    ty = b_i + lam * gy
    assert ((tx - a_i) * (tx - a_i) + (ty - b_i) * (ty - b_i) - r2_i).is_zero
    assert (
        (tx - sol.alpha) * (tx - sol.alpha)
        + (ty - sol.beta) * (ty - sol.beta)
        - sol.rho * sol.rho
    ).is_zero
    return tx, ty
