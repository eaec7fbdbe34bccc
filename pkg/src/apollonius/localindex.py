"""Per-solution local indices and the enriched count.

Each tangent circle contributes the class of a trace form
Tr_{k(s)/k}<value>, where the value is either the gradient determinant
of the three tangency hypersurfaces at the solution (vol) or the
intrinsic weighted-area expression (area); the two agree up to squares,
so the contribution is well defined.  Summing over all solutions gives
the configuration-independent total: 4H for three circles, H for one
circle and two points, a rank-1 form for three points.
"""

from __future__ import annotations

from typing import Optional, Sequence, Union

from .errors import DegenerateSolution, ZeroArgument, ZeroIndex
from .exactfield import FieldElement, is_square
from .moduli import (
    Circle,
    Hyperplane,
    Point,
    QuadricCone,
    center_radius,
    circle_from,
    cone_of,
    plane_through,
)
from .quadform import FormClass, form_class, hyperbolic_class, sum_forms, trace_form
from .solver import ApolloniusSolution, solve_all, tangency_point

SurfaceObject = Union[QuadricCone, Hyperplane]


def _det3(rows) -> FieldElement:
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def vol(objects: Sequence[SurfaceObject], sol: ApolloniusSolution) -> FieldElement:
    """Gradient determinant of the three hypersurfaces at the solution,
    in the affine patch c0 = 1 (rows are d/d(c1, c2, c3) in input order)."""
    if sol.circle.is_degenerate:
        raise DegenerateSolution("no affine chart at a degenerate solution")
    coords = sol.circle.coords
    rows = []
    for obj in objects:
        if isinstance(obj, QuadricCone):
            rows.append(obj.gradient(coords)[1:4])
        else:
            rows.append(obj.coeffs[1:4])
    return _det3(rows)


def uv(sol: ApolloniusSolution, i: int):
    """The tangency weights (u_i, v_i) against input i.

    u_i = (z_i - tau_i).(z_i - gamma), v_i = (z_i - tau_i).(tau_i - gamma)
    for a circle input; both 1 for a point (radius-0) input.  The result
    is cached on the solution's tangency slot.
    """
    cached = sol.tangency[i - 1]
    if cached is not None:
        tau, u, v = cached
        return u, v
    a, b = sol.problem.centers[i - 1]
    r2 = sol.problem.r2s[i - 1]
    if r2.is_zero:
        one = sol.field.one()
        sol.tangency[i - 1] = ((a, b), one, one)
        return one, one
    tx, ty = tangency_point(sol, i)
    wx, wy = a - tx, b - ty
    u = wx * (a - sol.alpha) + wy * (b - sol.beta)
    v = wx * (tx - sol.alpha) + wy * (ty - sol.beta)
    sol.tangency[i - 1] = ((tx, ty), u, v)
    return u, v


def area(sol: ApolloniusSolution) -> FieldElement:
    """The weighted-area expression: determinant of the 3x3 matrix with
    rows (v_i (a_i - alpha), v_i (b_i - beta), u_i)."""
    if sol.circle.is_degenerate:
        raise DegenerateSolution("no center at a degenerate solution")
    rows = []
    for i in (1, 2, 3):
        u, v = uv(sol, i)
        a, b = sol.problem.centers[i - 1]
        rows.append((v * (a - sol.alpha), v * (b - sol.beta), u))
    return _det3(rows)


def area_cofactor_sum(sol: ApolloniusSolution) -> FieldElement:
    """The same quantity as :func:`area`, evaluated as the alternating
    sum over {i, m, n} = {1, 2, 3}, m < n, of
    (-1)^(i+1) u_i v_m v_n ((a_m-alpha)(b_n-beta) - (a_n-alpha)(b_m-beta));
    kept separate so the two evaluations can cross-check each other."""
    weights = [uv(sol, i) for i in (1, 2, 3)]
    centers = sol.problem.centers
    total = None
    for i, m, n in ((1, 2, 3), (2, 1, 3), (3, 1, 2)):
        u_i = weights[i - 1][0]
        v_m, v_n = weights[m - 1][1], weights[n - 1][1]
        (am, bm), (an, bn) = centers[m - 1], centers[n - 1]
        par = (am - sol.alpha) * (bn - sol.beta) - (an - sol.alpha) * (bm - sol.beta)
        term = u_i * v_m * v_n * par
        if i % 2 == 0:
            term = -term
        total = term if total is None else total + term
    return total


def beta(sol: ApolloniusSolution, value: FieldElement) -> FormClass:
    """Invariants of Tr_{k(s)/k}<value>; the caller must ensure
    sol.field is the field of definition k(s) (true on the split-radii
    path, where the only extension is by sqrt of the discriminant)."""
    value = sol.field.coerce(value)
    if value.is_zero:
        raise ZeroIndex("zero gradient determinant: non-transverse solution")
    return form_class(trace_form(sol.field, value))


def square_class_equal(x: FieldElement, y: FieldElement) -> bool:
    """Whether x and y differ by a square in their common tower."""
    if x.is_zero or y.is_zero:
        raise ZeroArgument("square classes are defined for nonzero values")
    K = x.field if y.field.is_prefix_of(x.field) else y.field
    return is_square(K, x / y) is not None


class EnrichedCount:
    """Report of the per-point path: one record per distinct tangent
    circle, plus the global sum and its expected value (when the
    variant has one)."""

    def __init__(self, mode, base, records, total, expected):
        self.mode = mode
        self.base = base
        self.records = records
        self.total = total
        self.expected = expected

    @property
    def ok(self) -> Optional[bool]:
        if self.expected is None:
            return None
        return self.total == self.expected

    def to_json(self) -> dict:
        from .exactfield import element_to_str

        return {
            "mode": self.mode,
            "records": [
                {
                    "sign": list(rec["sol"].sign),
                    "root_index": rec["sol"].root_index,
                    "degree": rec["degree"],
                    "multiplicity": rec["multiplicity"],
                    "vol": element_to_str(rec["vol"]),
                    "area": element_to_str(rec["area"]),
                    "same_square_class": rec["same_square_class"],
                    "real": rec["real"],
                    "beta": rec["beta"].to_json(),
                }
                for rec in self.records
            ],
            "total": self.total.to_json(),
            "expected": None if self.expected is None else self.expected.to_json(),
            "ok": self.ok,
        }


def _as_circle(obj) -> tuple[Circle, bool]:
    if isinstance(obj, Point):
        zero = obj.field.zero()
        return circle_from(obj.x, obj.y, zero, obj.field), False
    a, b, r2 = center_radius(obj)
    return obj, not r2.is_zero


def enriched_count(objects, radii=(1, 1, 1)) -> EnrichedCount:
    """Solve, deduplicate, and sum the local indices.

    `objects` are three Circles and/or Points in a fixed order (the
    order orients every determinant; it is never permuted).  Points and
    radius-0 circles enter the count through their incidence hyperplane.
    Requires the split-radii path: every radius squared a square in the
    base field, so that each solution's own tower is its field of
    definition.
    """
    if len(objects) != 3:
        raise ValueError("the tangency problem takes exactly three objects")
    circles = []
    is_circle = []
    for obj in objects:
        c, genuine = _as_circle(obj)
        if obj.field.level != 0:
            raise ValueError("the per-point path works over the base field")
        circles.append(c)
        is_circle.append(genuine)
    base = objects[0].field
    for c in circles:
        _, _, r2 = center_radius(c)
        if not r2.is_zero and is_square(base, r2) is None:
            raise ValueError(
                "per-point path requires split radii; use the quotient-algebra"
                " path for irrational radii"
            )

    base_id = base.base
    sols = solve_all(*circles, radii=radii)

    # Group the eight solve slots into closed points: slots sharing a
    # circle are the same point (merged sign classes for point inputs),
    # and when a class needed sqrt(disc) its two roots are conjugate --
    # one closed point of degree 2 contributing a single trace form.
    problem = sols[0].problem
    # Sign classes differing only at radius-zero slots pose the same
    # three equations; the first such class is canonical, the rest are
    # merged into it and only bump the instance counts.
    zero_slots = [r2.is_zero for r2 in problem.r2s]
    merged_signs = set()
    for k in range(0, len(sols), 2):
        s = sols[k].sign
        canon = tuple(1 if z else x for x, z in zip(s, zero_slots))
        if canon != s:
            merged_signs.add(s)

    points: list[dict] = []
    by_circle: dict[Circle, dict] = {}
    for k in range(0, len(sols), 2):
        pair = sols[k : k + 2]
        known = [by_circle.get(p.circle) for p in pair]
        if sols[k].sign in merged_signs:
            assert None not in known, "merged sign class with unseen roots"
            known[0]["instances"].append(pair[0])
            known[1]["instances"].append(pair[1])
            continue
        if known != [None, None]:
            # A circle recurring across sign classes that differ at a
            # genuine (positive-radius) input must have radius zero, so
            # it is a common point of all three inputs.  Every cone is
            # tangent to the point-circle quadric along its input's
            # locus, hence the three gradients are proportional there
            # and the local index vanishes.
            raise ZeroIndex(
                "a radius-zero solution lies on every input:"
                " the three quadrics meet non-transversally"
            )
        if pair[0].circle == pair[1].circle:
            # both roots give one circle (only rho flips sign): a single
            # point whose coordinates stay in the problem field
            rec = {"sol": pair[0], "degree": 1, "field": problem.field,
                   "instances": list(pair)}
            points.append(rec)
            by_circle[pair[0].circle] = rec
        elif pair[0].field.level > problem.field.level:
            rec = {"sol": pair[0], "degree": 2, "field": pair[0].field,
                   "instances": list(pair)}
            points.append(rec)
            by_circle[pair[0].circle] = by_circle[pair[1].circle] = rec
        else:
            for p in pair:
                rec = {"sol": p, "degree": 1, "field": p.field, "instances": [p]}
                points.append(rec)
                by_circle[p.circle] = rec

    surfaces = [
        cone_of(c) if genuine else plane_through(*center_radius(c)[:2])
        for c, genuine in zip(circles, is_circle)
    ]

    records = []
    betas = []
    for rec in points:
        sol = rec["sol"]
        v = vol(surfaces, sol)
        ar = area(sol)
        assert ar == area_cofactor_sum(sol)
        if v.is_zero:
            raise ZeroIndex("zero gradient determinant: non-transverse solution")
        b = form_class(trace_form(rec["field"], v))
        rec.update(
            {
                "multiplicity": len(rec["instances"]) // rec["degree"],
                "vol": v,
                "area": ar,
                "same_square_class": square_class_equal(v, ar),
                "real": sol.field.has_embedding(),
                "beta": b,
            }
        )
        records.append(rec)
        betas.append(b)

    total = sum_forms(betas, base_id)
    n_circles = sum(1 for g in is_circle if g)
    if n_circles == 3:
        expected = hyperbolic_class(base_id, 4)
    elif n_circles == 1:
        expected = hyperbolic_class(base_id, 1)
    else:
        expected = None  # CCP is section-dependent; PPP reports rank 1
    mode = "".join("C" if g else "P" for g in is_circle)
    return EnrichedCount(mode, base, records, total, expected)
