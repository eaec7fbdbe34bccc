"""Degeneration and inversion symmetries of the eight tangent circles.

Scaling one input radius by a family parameter t deforms the eight
solutions; at t = 0 that input collapses to its center point and the
four sign classes merge in pairs.  Matching the merged solutions by
exact equality of their circle coordinates yields an involutive pairing
of the eight solution labels for each input slot; together these three
pairings give the eight solutions the adjacency structure of a cube.
This module computes the pairings exactly, checks the cube structure,
and verifies the identities they impose on the local indices (root-pair
sums and merged-quadruple sums are hyperbolic of the rank forced by the
residue fields).  The identity checks are conditional verifiers: every
hypothesis is tested, and a configuration that fails one is reported as
``hypothesis-not-met`` rather than asserted against.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .errors import DegenerateMerge, FieldMismatch, InfiniteRadius
from .exactfield import (
    FieldDescriptor,
    FieldElement,
    adjoin_sqrt,
    element_to_str,
    is_square,
)
from .localindex import _as_circle, vol
from .moduli import OK, Circle, center_radius, circle_from, cone_of, config_check, plane_through
from .quadform import FormClass, add_forms, form_class, hyperbolic_class, sum_forms, trace_form
from .solver import (
    SIGN_VECTORS,
    ProblemData,
    choose_radii,
    coaklay_poly,
    coefficients_from_data,
    solve_all,
)
from .zerodim import _rational_roots

# ------------------------------------------------------------- labeling

#: The eight solution identities in label order: label n (1-based)
#: corresponds to SOLUTION_LABELS[n - 1] = (sign vector, root_index).
#: Each sign class owns two consecutive labels with the canonical-root
#: branch (root_index 0) on the odd label.
SOLUTION_LABELS = tuple((s, b) for s in SIGN_VECTORS for b in (0, 1))


def label_of(sign, root_index: int) -> int:
    """The 1-based label of a solution slot (sign class, root branch)."""
    return 2 * SIGN_VECTORS.index(tuple(sign)) + root_index + 1


def label_identity(n: int) -> tuple[tuple[int, int, int], int]:
    """The (sign vector, root_index) identity behind a 1-based label."""
    if not 1 <= n <= 8:
        raise ValueError("labels run from 1 to 8")
    return SOLUTION_LABELS[n - 1]


def _check_slot(i: int) -> None:
    if i not in (1, 2, 3):
        raise ValueError("the input slot must be 1, 2, or 3")


# ------------------------------------------------------ family parameter


class TPoly:
    """A dense polynomial in the family parameter t over a tower.

    Coefficients are stored in ascending degree order.  The class
    supports ring arithmetic with ints and field elements and division
    by nonzero constants, which is all the center elimination needs, so
    :func:`solver.coefficients_from_data` runs on TPoly inputs unchanged.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldDescriptor, coeffs: Sequence):
        cs = [field.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    # ------------------------------------------------------- structure

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree in t; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def constant_value(self) -> FieldElement:
        """The value of a polynomial of degree <= 0."""
        if len(self.coeffs) > 1:
            raise ValueError("not a constant polynomial")
        return self.coeffs[0] if self.coeffs else self.field.zero()

    def coefficient(self, k: int) -> FieldElement:
        """The coefficient of t^k (zero beyond the degree)."""
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.field.zero()

    def evaluate(self, t) -> FieldElement:
        t = self.field.coerce(t)
        acc = self.field.zero()
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    # ------------------------------------------------------ arithmetic

    def _wrap(self, other) -> Optional["TPoly"]:
        if isinstance(other, TPoly):
            return other
        if isinstance(other, (int, Fraction, FieldElement)):
            return TPoly(self.field, [other])
        return None

    @staticmethod
    def _merge(a: "TPoly", b: "TPoly") -> tuple["TPoly", "TPoly"]:
        if a.field == b.field:
            return a, b
        if a.field.is_prefix_of(b.field):
            return TPoly(b.field, a.coeffs), b
        if b.field.is_prefix_of(a.field):
            return a, TPoly(a.field, b.coeffs)
        raise FieldMismatch("polynomials over incompatible towers")

    def __add__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        a, b = self._merge(self, o)
        n = max(len(a.coeffs), len(b.coeffs))
        zero = a.field.zero()
        return TPoly(
            a.field,
            [a.coefficient(k) + b.coefficient(k) for k in range(n)] or [zero],
        )

    __radd__ = __add__

    def __neg__(self):
        return TPoly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        a, b = self._merge(self, o)
        if a.is_zero or b.is_zero:
            return TPoly(a.field, [])
        zero = a.field.zero()
        out = [zero] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, ca in enumerate(a.coeffs):
            for j, cb in enumerate(b.coeffs):
                out[i + j] = out[i + j] + ca * cb
        return TPoly(a.field, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        a, b = self._merge(self, o)
        if b.degree > 0:
            raise ValueError("polynomial division only by constants")
        if b.is_zero:
            raise ZeroDivisionError("division by the zero polynomial")
        inv = b.coeffs[0].inverse()
        return TPoly(a.field, [c * inv for c in a.coeffs])

    def __eq__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        a, b = self._merge(self, o)
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash((self.field.key(), self.coeffs))

    def __repr__(self):
        if self.is_zero:
            return "TPoly[0]"
        return "TPoly[" + ", ".join(repr(c) for c in self.coeffs) + "]"

    def to_json(self) -> list[str]:
        return [element_to_str(c) for c in self.coeffs]


# --------------------------------------------------------------- family


class FamilyQuadratic:
    """One sign class of the one-parameter deformation.

    The quadratic in x whose coefficients are polynomials in t, obtained
    by scaling the radius of input ``slot`` by t and eliminating exactly
    as in the undeformed problem; t = 1 recovers the plain coefficients
    and t = 0 shrinks input ``slot`` to its center point.
    """

    __slots__ = ("sign", "slot", "field", "quad", "lin", "const")

    def __init__(self, sign, slot: int, field: FieldDescriptor,
                 quad: TPoly, lin: TPoly, const: TPoly):
        self.sign = tuple(sign)
        self.slot = slot
        self.field = field
        self.quad, self.lin, self.const = quad, lin, const

    def coefficients_at(self, t) -> tuple[FieldElement, FieldElement, FieldElement]:
        """(quad, lin, const) of the fiber quadratic at a given t."""
        return (self.quad.evaluate(t), self.lin.evaluate(t), self.const.evaluate(t))

    def disc(self) -> TPoly:
        """The discriminant lin^2 - 4*quad*const as a polynomial in t;
        its zeros are the fibers where the two roots of this class
        collide."""
        return self.lin * self.lin - 4 * (self.quad * self.const)

    def __repr__(self):
        return (
            f"FamilyQuadratic(s={self.sign}, slot={self.slot}, "
            f"quad={self.quad!r}, lin={self.lin!r}, const={self.const!r})"
        )

    def to_json(self) -> dict:
        return {
            "sign": list(self.sign),
            "slot": self.slot,
            "quad": self.quad.to_json(),
            "lin": self.lin.to_json(),
            "const": self.const.to_json(),
        }


def _scaled_radii(problem: ProblemData, i: int) -> list[TPoly]:
    K = problem.field
    out = []
    for j, r in enumerate(problem.radii):
        if j == i - 1:
            out.append(TPoly(K, [K.zero(), r]))
        else:
            out.append(TPoly(K, [r]))
    return out


def _family_quadratic(problem: ProblemData, s, i: int) -> FamilyQuadratic:
    K = problem.field
    centers = [(TPoly(K, [a]), TPoly(K, [b])) for a, b in problem.centers]
    coeffs = coefficients_from_data(centers, _scaled_radii(problem, i), s)
    quad, lin, const = coaklay_poly(coeffs)
    return FamilyQuadratic(s, i, K, quad, lin, const)


def family_poly(config, radii, s, i: int) -> FamilyQuadratic:
    """The deformed quadratic of sign class s with radius i scaled by t.

    ``config`` is three circles and ``radii`` the square-root branches,
    as in :func:`solver.solve_all`.  The elimination runs once over
    polynomials in t, so the result specializes exactly: evaluating the
    coefficients at t = 1 reproduces :func:`solver.coaklay_poly`.
    """
    _check_slot(i)
    problem = choose_radii(tuple(config), radii)
    return _family_quadratic(problem, s, i)


# --------------------------------------------------- degenerate fiber


class MergedPair:
    """Two sign classes sharing their solution circles at t = 0.

    ``matching`` pairs the root branches: (b, b2) means branch b of the
    first class and branch b2 of the second land on the same circle of
    the degenerate fiber.  ``degree`` is the residue degree of those
    double points: 1 when the shared discriminant is a square (two
    rational double circles), else 2 (one conjugate pair).
    """

    __slots__ = ("classes", "signs", "field", "degree", "discs", "circles", "matching")

    def __init__(self, classes, signs, field, degree, discs, circles, matching):
        self.classes = tuple(classes)
        self.signs = tuple(tuple(s) for s in signs)
        self.field = field
        self.degree = degree
        self.discs = tuple(discs)
        self.circles = tuple(circles)
        self.matching = tuple(matching)

    def label_pairs(self) -> tuple[tuple[int, int], ...]:
        """The matched label pairs (one per shared circle)."""
        m, n = self.classes
        return tuple(
            (2 * m + b + 1, 2 * n + b2 + 1) for b, b2 in self.matching
        )

    def all_labels(self) -> tuple[int, ...]:
        return tuple(sorted(l for pair in self.label_pairs() for l in pair))

    def __repr__(self):
        return (
            f"MergedPair(classes={self.signs[0]}~{self.signs[1]}, "
            f"degree={self.degree}, matching={self.matching})"
        )

    def to_json(self) -> dict:
        return {
            "signs": [list(s) for s in self.signs],
            "labels": list(self.all_labels()),
            "matched_labels": [list(p) for p in self.label_pairs()],
            "degree": self.degree,
            "disc": element_to_str(self.discs[0]),
        }


def _fiber_circles(cls: dict, Ks: FieldDescriptor, w: FieldElement) -> list[Circle]:
    quad = Ks.coerce(cls["quad"])
    lin = Ks.coerce(cls["lin"])
    co = cls["coeffs"]
    out = []
    for branch in (1, -1):
        x = (-lin + branch * w) / (2 * quad)
        alpha = co.A2 + co.A1 * x
        beta = co.B2 + co.B1 * x
        out.append(circle_from(alpha, beta, x * x, Ks))
    return out


def _match_fibers(K: FieldDescriptor, cm: dict, cn: dict):
    """The branch matching of two classes whose t = 0 circles coincide,
    or None when the two solution sets differ.

    Classes can only share their fiber when their discriminants agree
    up to a square (the roots generate the same extension); in that
    case both solution pairs are computed in one tower with canonical
    roots and compared circle by circle.
    """
    if is_square(K, cm["disc"] / cn["disc"]) is None:
        return None
    w = is_square(K, cm["disc"])
    if w is not None:
        Ks, degree = K, 1
    else:
        Ks = adjoin_sqrt(K, cm["disc"])
        w = Ks.root()
        degree = 2
    wn = is_square(Ks, cn["disc"])
    if wn is None:
        return None
    circles_m = _fiber_circles(cm, Ks, w)
    circles_n = _fiber_circles(cn, Ks, wn)
    if circles_m[0] == circles_m[1] or circles_n[0] == circles_n[1]:
        raise DegenerateMerge(
            "both roots of a degenerate-fiber class lie on one circle;"
            " the merge pairing is ambiguous"
        )
    matching = []
    for b, c in enumerate(circles_m):
        hits = [b2 for b2, c2 in enumerate(circles_n) if c == c2]
        if not hits:
            return None
        matching.append((b, hits[0]))
    return Ks, degree, tuple(circles_m), tuple(matching), (cm["disc"], cn["disc"])


def degeneration_data(problem: ProblemData, i: int) -> tuple[MergedPair, MergedPair]:
    """Solve the four sign classes at t = 0 (input i shrunk to its
    center point) and pair them by exact equality of solution sets.

    The pairing is derived, not assumed: every pair of classes whose
    fiber discriminants agree up to a square is solved in a common
    tower and compared circle by circle.  A clean degeneration yields
    exactly two merged pairs; anything else (repeated roots, a fiber
    class turning into a line, ambiguous sharing) raises.
    """
    _check_slot(i)
    K = problem.field
    radii0 = list(problem.radii)
    radii0[i - 1] = K.zero()
    classes = []
    for s in SIGN_VECTORS:
        coeffs = coefficients_from_data(problem.centers, radii0, s)
        quad, lin, const = coaklay_poly(coeffs)
        if quad.is_zero:
            raise InfiniteRadius(
                f"the degenerate fiber of class {s} is a line, not a circle"
            )
        disc = lin * lin - 4 * (quad * const)
        if disc.is_zero:
            raise DegenerateMerge(
                "the t = 0 specialization has a repeated root;"
                " perturb the configuration and retry"
            )
        classes.append(
            {"s": s, "coeffs": coeffs, "quad": quad, "lin": lin, "const": const,
             "disc": disc}
        )
    partners: dict[int, int] = {}
    details = {}
    for m in range(4):
        for n in range(m + 1, 4):
            match = _match_fibers(K, classes[m], classes[n])
            if match is None:
                continue
            if m in partners or n in partners:
                raise DegenerateMerge(
                    "a sign class shares its degenerate fiber with more"
                    " than one other class; the merge pairing is ambiguous"
                )
            partners[m] = n
            partners[n] = m
            details[(m, n)] = match
    if sorted(partners) != [0, 1, 2, 3]:
        raise DegenerateMerge(
            "the degenerate fiber does not split the four sign classes"
            " into two merged pairs"
        )
    out = []
    for (m, n), (Ks, degree, circles, matching, discs) in sorted(details.items()):
        out.append(
            MergedPair((m, n), (SIGN_VECTORS[m], SIGN_VECTORS[n]),
                       Ks, degree, discs, circles, matching)
        )
    return tuple(out)


# ---------------------------------------------------------- ThetaMatrix


class ThetaMatrix:
    """A permutation of the eight solution labels as a 0/1 matrix.

    Stored as the image tuple (perm[n-1] is the image of label n); the
    matrix view has entry (r, c) = 1 iff label c+1 maps to r+1.  The
    degeneration pairings are symmetric fixed-point-free involutions,
    but the class represents arbitrary permutations so products and
    sabotaged inputs can be expressed.
    """

    __slots__ = ("perm",)

    def __init__(self, images: Sequence[int]):
        perm = tuple(int(x) for x in images)
        if sorted(perm) != list(range(1, 9)):
            raise ValueError("images must be a permutation of 1..8")
        self.perm = perm

    @classmethod
    def identity(cls) -> "ThetaMatrix":
        return cls(tuple(range(1, 9)))

    @classmethod
    def from_pairs(cls, pairs) -> "ThetaMatrix":
        """The involution swapping each given pair of labels."""
        images = list(range(1, 9))
        for a, b in pairs:
            images[a - 1], images[b - 1] = b, a
        return cls(images)

    def image(self, n: int) -> int:
        return self.perm[n - 1]

    __call__ = image

    def compose(self, other: "ThetaMatrix") -> "ThetaMatrix":
        """self after other: (self @ other)(n) = self(other(n))."""
        return ThetaMatrix(tuple(self.perm[other.perm[n] - 1] for n in range(8)))

    __matmul__ = compose

    def inverse(self) -> "ThetaMatrix":
        images = [0] * 8
        for n, img in enumerate(self.perm, start=1):
            images[img - 1] = n
        return ThetaMatrix(images)

    def fixed_points(self) -> tuple[int, ...]:
        return tuple(n for n in range(1, 9) if self.perm[n - 1] == n)

    @property
    def is_involution(self) -> bool:
        return all(self.perm[self.perm[n] - 1] == n + 1 for n in range(8))

    @property
    def is_symmetric(self) -> bool:
        """Matrix symmetry; for a permutation matrix this is exactly
        being an involution."""
        return self.is_involution

    def pairs(self) -> tuple[tuple[int, int], ...]:
        """The 2-cycles (a, b) with a < b; fixed points are omitted."""
        return tuple(
            (n, self.perm[n - 1])
            for n in range(1, 9)
            if self.perm[n - 1] > n and self.perm[self.perm[n - 1] - 1] == n
        )

    def rows(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(1 if self.perm[c] == r + 1 else 0 for c in range(8))
            for r in range(8)
        )

    def __eq__(self, other):
        if not isinstance(other, ThetaMatrix):
            return NotImplemented
        return self.perm == other.perm

    def __hash__(self):
        return hash(self.perm)

    def __repr__(self):
        return f"ThetaMatrix{self.perm}"

    def __str__(self):
        return "\n".join(" ".join(str(x) for x in row) for row in self.rows())

    def to_json(self) -> list[str]:
        return ["".join(str(x) for x in row) for row in self.rows()]


def theta(config, radii, i: int) -> ThetaMatrix:
    """The involution pairing solution labels that merge at t = 0.

    Shrinking input i to its center point makes the four sign classes
    coincide in pairs; each label is sent to the label of the other
    class whose root lands on the same circle of the degenerate fiber.
    Requires a transverse configuration (config_check OK); raises
    DegenerateMerge when the fiber has repeated or ambiguously shared
    roots and InfiniteRadius when a fiber solution is a line.
    """
    circles = tuple(config)
    status = config_check(*circles)
    if status is not OK:
        raise status
    problem = choose_radii(circles, radii)
    images = [0] * 9
    for pair in degeneration_data(problem, i):
        for la, lb in pair.label_pairs():
            images[la] = lb
            images[lb] = la
    return ThetaMatrix(images[1:])


def inversive_pairs() -> ThetaMatrix:
    """The involution swapping the two roots of every sign class:
    labels pair as {1,2}, {3,4}, {5,6}, {7,8}.  As a permutation it
    coincides with the product of the three degeneration involutions
    (checked, not assumed, by :func:`cube_check`)."""
    return ThetaMatrix((2, 1, 4, 3, 6, 5, 8, 7))


# ----------------------------------------------------------- cube check


class CubeReport:
    """Outcome of the cube-structure verification."""

    __slots__ = ("checks", "failures", "product")

    def __init__(self, checks, failures, product):
        self.checks = tuple(checks)
        self.failures = tuple(failures)
        self.product = product

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def is_cube(self) -> bool:
        """Whether the union graph is the cube graph.

        A connected trivalent bipartite graph on the eight labels must
        split 4 + 4, and 3-regularity then leaves each vertex
        non-adjacent to exactly one vertex across the split, so the
        graph is K_{4,4} minus a perfect matching: the cube.
        """
        return self.ok

    def __repr__(self):
        status = "ok" if self.ok else "failures: " + ", ".join(self.failures)
        return f"CubeReport({status})"

    def to_json(self) -> dict:
        return {
            "checks": {name: passed for name, passed in self.checks},
            "failures": list(self.failures),
            "product": self.product.to_json(),
            "ok": self.ok,
        }


def cube_check(thetas: Sequence[ThetaMatrix]) -> CubeReport:
    """Verify that three pairings give the eight labels a cube structure.

    Checks, in order: each pairing is a fixed-point-free involution;
    no label has the same image under two different pairings; the
    pairings commute; their product has no fixed point; and the union
    graph (one edge per pairing per label) is trivalent, connected, and
    bipartite.  Failures are collected, not raised: a failed check
    means the inputs do not carry the cube structure.
    """
    ths = tuple(thetas)
    if len(ths) != 3:
        raise ValueError("the cube check takes exactly three pairings")
    checks = []
    failures = []

    def record(name: str, passed: bool) -> None:
        checks.append((name, bool(passed)))
        if not passed:
            failures.append(name)

    record(
        "involutions",
        all(th.is_involution for th in ths),
    )
    record(
        "fixed-point-free",
        all(not th.fixed_points() for th in ths),
    )
    record(
        "images-disjoint",
        all(
            ths[a](n) != ths[b](n)
            for a in range(3)
            for b in range(a + 1, 3)
            for n in range(1, 9)
        ),
    )
    record(
        "commuting",
        all(
            ths[a] @ ths[b] == ths[b] @ ths[a]
            for a in range(3)
            for b in range(a + 1, 3)
        ),
    )
    product = ths[0] @ ths[1] @ ths[2]
    record("product-fixed-point-free", not product.fixed_points())

    adjacency = {n: set() for n in range(1, 9)}
    for th in ths:
        for n in range(1, 9):
            if th(n) != n:
                adjacency[n].add(th(n))
    record("trivalent", all(len(adjacency[n]) == 3 for n in adjacency))

    seen = {1}
    stack = [1]
    while stack:
        n = stack.pop()
        for m in adjacency[n]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    record("connected", len(seen) == 8)

    colors: dict[int, int] = {}
    bipartite = True
    for start in range(1, 9):
        if start in colors:
            continue
        colors[start] = 0
        queue = [start]
        while queue and bipartite:
            n = queue.pop()
            for m in adjacency[n]:
                if m not in colors:
                    colors[m] = 1 - colors[n]
                    queue.append(m)
                elif colors[m] == colors[n]:
                    bipartite = False
                    break
    record("bipartite", bipartite)

    return CubeReport(checks, failures, product)


# ------------------------------------------------- index-sum verifiers

PASS = "pass"
FAIL = "fail"
HYPOTHESIS_NOT_MET = "hypothesis-not-met"


class _SolveContext:
    """Shared solve bookkeeping for the index-sum verifiers: the eight
    solution slots grouped into closed points, with labels, residue
    degrees, and local indices attached."""

    __slots__ = (
        "base",
        "base_id",
        "mode",
        "problem",
        "sols",
        "surfaces",
        "records",
        "by_label",
        "merged_signs",
        "orbit",
    )


def _new_record(sol, degree: int, field: FieldDescriptor, circles) -> dict:
    return {
        "sol": sol,
        "degree": degree,
        "field": field,
        "circles": list(circles),
        "labels": [],
        "classes": set(),
        "vol": None,
        "beta": None,
        "zero_vol": False,
    }


def _closed_points(objects, radii) -> _SolveContext:
    """Solve on the split-radii path and group the eight root slots into
    closed points (mirroring the enriched count's bookkeeping), keeping
    every label and cross-class coincidence so the verifiers can test
    their hypotheses instead of assuming them."""
    objects = tuple(objects)
    if len(objects) != 3:
        raise ValueError("the tangency problem takes exactly three objects")
    for obj in objects:
        if obj.field.level != 0:
            raise ValueError("the index checks work over the base field")
    converted = [_as_circle(obj) for obj in objects]
    circles = [c for c, _ in converted]
    genuine = [g for _, g in converted]
    base = objects[0].field
    for c in circles:
        _, _, r2 = center_radius(c)
        if not r2.is_zero and is_square(base, r2) is None:
            raise ValueError(
                "the index checks require split radii; use the"
                " quotient-algebra path for irrational radii"
            )
    sols = solve_all(*circles, radii=radii)
    problem = sols[0].problem

    zero_slots = [r2.is_zero for r2 in problem.r2s]
    canon_of = [
        tuple(1 if z else x for x, z in zip(s, zero_slots)) for s in SIGN_VECTORS
    ]
    merged_signs = {
        SIGN_VECTORS[m] for m in range(4) if canon_of[m] != SIGN_VECTORS[m]
    }
    orbit = [
        frozenset(n for n in range(4) if canon_of[n] == canon_of[m])
        for m in range(4)
    ]

    records: list[dict] = []
    by_circle: dict[Circle, dict] = {}
    by_label: dict[int, dict] = {}

    def attach(rec: dict, label: int, m: int) -> None:
        rec["labels"].append(label)
        rec["classes"].add(m)
        by_label[label] = rec

    for m in range(4):
        pair = sols[2 * m : 2 * m + 2]
        labels = (2 * m + 1, 2 * m + 2)
        if pair[0].sign in merged_signs:
            for p, lab in zip(pair, labels):
                rec = by_circle.get(p.circle)
                assert rec is not None, "merged sign class with unseen roots"
                attach(rec, lab, m)
            continue
        c0, c1 = pair[0].circle, pair[1].circle
        if c0 == c1:
            rec = by_circle.get(c0)
            if rec is None:
                rec = _new_record(pair[0], 1, problem.field, [c0])
                records.append(rec)
                by_circle[c0] = rec
            attach(rec, labels[0], m)
            attach(rec, labels[1], m)
        elif pair[0].field.level > problem.field.level:
            known = by_circle.get(c0) or by_circle.get(c1)
            if known is None:
                rec = _new_record(pair[0], 2, pair[0].field, [c0, c1])
                records.append(rec)
                by_circle[c0] = by_circle[c1] = rec
                attach(rec, labels[0], m)
                attach(rec, labels[1], m)
            else:
                # a conjugate pair colliding with an earlier class's
                # circle: fold into that record so the coincidence is
                # visible to the hypothesis gates
                by_circle.setdefault(c0, known)
                by_circle.setdefault(c1, known)
                attach(known, labels[0], m)
                attach(known, labels[1], m)
        else:
            for p, lab in zip(pair, labels):
                rec = by_circle.get(p.circle)
                if rec is None:
                    rec = _new_record(p, 1, p.field, [p.circle])
                    records.append(rec)
                    by_circle[p.circle] = rec
                attach(rec, lab, m)

    surfaces = [
        cone_of(c) if g else plane_through(*center_radius(c)[:2])
        for c, g in zip(circles, genuine)
    ]
    for rec in records:
        v = vol(surfaces, rec["sol"])
        rec["vol"] = v
        rec["zero_vol"] = v.is_zero
        if not v.is_zero:
            rec["beta"] = form_class(trace_form(rec["field"], v))

    ctx = _SolveContext()
    ctx.base = base
    ctx.base_id = base.base
    ctx.mode = "".join("C" if g else "P" for g in genuine)
    ctx.problem = problem
    ctx.sols = sols
    ctx.surfaces = surfaces
    ctx.records = records
    ctx.by_label = by_label
    ctx.merged_signs = merged_signs
    ctx.orbit = orbit
    return ctx


class PairReport:
    """Verdict for one root pair: the two solutions of a sign class,
    which the root-swap involution exchanges."""

    __slots__ = (
        "sign",
        "labels",
        "state",
        "reason",
        "degree",
        "lhs",
        "expected",
        "closed",
    )

    def __init__(self, sign, labels, state, reason=None, degree=None,
                 lhs=None, expected=None, closed=()):
        self.sign = tuple(sign)
        self.labels = tuple(labels)
        self.state = state
        self.reason = reason
        self.degree = degree
        self.lhs = lhs
        self.expected = expected
        self.closed = tuple(closed)

    @property
    def passed(self) -> Optional[bool]:
        if self.state == HYPOTHESIS_NOT_MET:
            return None
        return self.state == PASS

    def __repr__(self):
        tail = f", reason={self.reason}" if self.reason else ""
        return f"PairReport(s={self.sign}, labels={self.labels}, {self.state}{tail})"

    def to_json(self) -> dict:
        return {
            "sign": list(self.sign),
            "labels": list(self.labels),
            "state": self.state,
            "reason": self.reason,
            "degree": self.degree,
            "lhs": None if self.lhs is None else self.lhs.to_json(),
            "expected": None if self.expected is None else self.expected.to_json(),
        }


def _pair_report(base_id, sign, labels, records,
                 merged_duplicate: bool = False,
                 shared: bool = False) -> PairReport:
    """Check one root pair against its expected hyperbolic sum.

    ``records`` holds the distinct closed points behind the two labels
    (one record: conjugate roots or a shared circle; two records: split
    roots).  Hypotheses are tested in order -- duplicate merged class,
    distinct circles, shared circles across classes, matching residue
    fields, nonzero local index -- and the first failure gates the pair
    as hypothesis-not-met with that reason.
    """
    def gated(reason: str) -> PairReport:
        return PairReport(sign, labels, HYPOTHESIS_NOT_MET, reason=reason)

    if merged_duplicate:
        return gated("merged-class-duplicate")
    if len(records) == 1 and records[0]["degree"] == 1:
        return gated("pair-not-distinct")
    if shared:
        return gated("shared-across-classes")
    if len(records) == 2 and (
        records[0]["field"] != records[1]["field"]
        or records[0]["degree"] != records[1]["degree"]
    ):
        return gated("field-mismatch")
    if any(rec["zero_vol"] for rec in records):
        return gated("zero-local-index")
    if len(records) == 1:
        degree = 2
        b = records[0]["beta"]
        lhs = add_forms(b, b)
        closed = (b,)
    else:
        degree = 1
        lhs = add_forms(records[0]["beta"], records[1]["beta"])
        closed = (records[0]["beta"], records[1]["beta"])
    expected = hyperbolic_class(base_id, degree)
    state = PASS if lhs == expected else FAIL
    return PairReport(sign, labels, state, degree=degree, lhs=lhs,
                      expected=expected, closed=closed)


class InversiveSumReport:
    """Per-pair verdicts plus the closed-point total over all pairs."""

    __slots__ = ("mode", "pairs", "closed_total", "expected_total")

    def __init__(self, mode, pairs, closed_total, expected_total):
        self.mode = mode
        self.pairs = tuple(pairs)
        self.closed_total = closed_total
        self.expected_total = expected_total

    @property
    def ok(self) -> Optional[bool]:
        if any(p.state == FAIL for p in self.pairs):
            return False
        if any(p.state == HYPOTHESIS_NOT_MET for p in self.pairs):
            return None
        return True

    @property
    def totals_ok(self) -> Optional[bool]:
        if self.closed_total is None or self.expected_total is None:
            return None
        return self.closed_total == self.expected_total

    def __repr__(self):
        return f"InversiveSumReport(mode={self.mode}, ok={self.ok})"

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "pairs": [p.to_json() for p in self.pairs],
            "closed_total": None if self.closed_total is None
            else self.closed_total.to_json(),
            "expected_total": None if self.expected_total is None
            else self.expected_total.to_json(),
            "ok": self.ok,
            "totals_ok": self.totals_ok,
        }


def _pair_records(ctx: _SolveContext, m: int) -> list[dict]:
    rec0 = ctx.by_label[2 * m + 1]
    rec1 = ctx.by_label[2 * m + 2]
    return [rec0] if rec0 is rec1 else [rec0, rec1]


def inversive_sum_check(objects, radii=(1, 1, 1)) -> InversiveSumReport:
    """Verify that each root pair's index sum is the transferred
    hyperbolic form.

    For each sign class, the two roots q, q' form either two rational
    points or one conjugate closed point; whenever the pair hypotheses
    hold (distinct circles not shared with other classes, matching
    residue fields, nonzero indices), their index contributions must sum
    to the trace of the hyperbolic form from k(q) down to the base: H
    for a split pair, 2H for a conjugate pair.  The closed-point total
    across all pairs is reported alongside (4H for three circles).
    """
    ctx = _closed_points(objects, radii)
    reports = []
    for m in range(4):
        records = _pair_records(ctx, m)
        merged_dup = SIGN_VECTORS[m] in ctx.merged_signs
        shared = any(rec["classes"] - ctx.orbit[m] for rec in records)
        reports.append(
            _pair_report(ctx.base_id, SIGN_VECTORS[m], (2 * m + 1, 2 * m + 2),
                         records, merged_dup, shared)
        )
    if any(rec["zero_vol"] for rec in ctx.records):
        closed_total = None
    else:
        closed_total = sum_forms((rec["beta"] for rec in ctx.records), ctx.base_id)
    n_circles = ctx.mode.count("C")
    if n_circles == 3:
        expected_total = hyperbolic_class(ctx.base_id, 4)
    elif n_circles == 1:
        expected_total = hyperbolic_class(ctx.base_id, 1)
    else:
        expected_total = None
    return InversiveSumReport(ctx.mode, reports, closed_total, expected_total)


class QuadrupleReport:
    """Verdict for one merged quadruple: a root pair together with its
    images under a degeneration pairing."""

    __slots__ = (
        "sign",
        "partner_sign",
        "labels",
        "quadruple",
        "degrees",
        "kd_degree",
        "disc",
        "state",
        "reason",
        "lhs",
        "expected",
    )

    def __init__(self, sign, partner_sign, labels, quadruple, degrees,
                 kd_degree, disc, state, reason=None, lhs=None, expected=None):
        self.sign = tuple(sign)
        self.partner_sign = tuple(partner_sign)
        self.labels = tuple(labels)
        self.quadruple = tuple(quadruple)
        self.degrees = tuple(degrees)
        self.kd_degree = kd_degree
        self.disc = disc
        self.state = state
        self.reason = reason
        self.lhs = lhs
        self.expected = expected

    @property
    def passed(self) -> Optional[bool]:
        if self.state == HYPOTHESIS_NOT_MET:
            return None
        return self.state == PASS

    def __repr__(self):
        tail = f", reason={self.reason}" if self.reason else ""
        return (
            f"QuadrupleReport(s={self.sign}, quadruple={self.quadruple}, "
            f"{self.state}{tail})"
        )

    def to_json(self) -> dict:
        return {
            "sign": list(self.sign),
            "partner_sign": list(self.partner_sign),
            "labels": list(self.labels),
            "quadruple": list(self.quadruple),
            "degrees": list(self.degrees),
            "kd_degree": self.kd_degree,
            "disc": None if self.disc is None else element_to_str(self.disc),
            "state": self.state,
            "reason": self.reason,
            "lhs": None if self.lhs is None else self.lhs.to_json(),
            "expected": None if self.expected is None else self.expected.to_json(),
        }


class DegenDualReport:
    """Per-quadruple verdicts for one degeneration slot."""

    __slots__ = ("slot", "rows", "merged_pairs")

    def __init__(self, slot, rows, merged_pairs):
        self.slot = slot
        self.rows = tuple(rows)
        self.merged_pairs = tuple(merged_pairs)

    @property
    def ok(self) -> Optional[bool]:
        if any(r.state == FAIL for r in self.rows):
            return False
        if any(r.state == HYPOTHESIS_NOT_MET for r in self.rows):
            return None
        return True

    def __repr__(self):
        return f"DegenDualReport(slot={self.slot}, ok={self.ok})"

    def to_json(self) -> dict:
        return {
            "slot": self.slot,
            "rows": [r.to_json() for r in self.rows],
            "merged_pairs": [mp.to_json() for mp in self.merged_pairs],
            "ok": self.ok,
        }


def _record_degree(records) -> int:
    return 2 if len(records) == 1 and records[0]["degree"] == 2 else 1


def _pair_lhs(records) -> FormClass:
    if len(records) == 1:
        b = records[0]["beta"]
        return add_forms(b, b)
    return add_forms(records[0]["beta"], records[1]["beta"])


def degen_dual_sum_check(config, radii, i: int) -> DegenDualReport:
    """Verify the merged-quadruple index sums for degeneration slot i.

    Each root pair {q, q'} and its images under the slot-i pairing form
    a quadruple whose index contributions, when the hypotheses hold,
    must sum to twice the trace of the hyperbolic form from the double
    point's residue field k(d): 2H when the merged fiber discriminant
    is a square, 4H when k(d) is quadratic.  Hypothesis gates mark
    quadruples with coinciding circles, straddling residue fields
    (rank mismatch against k(d)), or vanishing indices.
    """
    _check_slot(i)
    ctx = _closed_points(config, radii)
    merged = degeneration_data(ctx.problem, i)
    partner: dict[int, int] = {}
    pair_of: dict[int, MergedPair] = {}
    for mp in merged:
        a, b = mp.classes
        partner[a], partner[b] = b, a
        pair_of[a] = pair_of[b] = mp
    rows = []
    for m in range(4):
        n = partner[m]
        mp = pair_of[m]
        labels = (2 * m + 1, 2 * m + 2)
        quadruple = tuple(sorted(labels + (2 * n + 1, 2 * n + 2)))
        sign_m, sign_n = SIGN_VECTORS[m], SIGN_VECTORS[n]
        disc0 = mp.discs[mp.classes.index(m)]
        recs_m = _pair_records(ctx, m)
        recs_n = _pair_records(ctx, n)
        circles_m = [ctx.sols[2 * m].circle, ctx.sols[2 * m + 1].circle]
        circles_n = [ctx.sols[2 * n].circle, ctx.sols[2 * n + 1].circle]
        allowed = ctx.orbit[m] | ctx.orbit[n]

        def gated(reason: str) -> QuadrupleReport:
            return QuadrupleReport(sign_m, sign_n, labels, quadruple,
                                   (deg_m, deg_n), mp.degree, disc0,
                                   HYPOTHESIS_NOT_MET, reason=reason)

        deg_m = _record_degree(recs_m)
        deg_n = _record_degree(recs_n)
        if circles_m[0] == circles_m[1] or circles_n[0] == circles_n[1]:
            rows.append(gated("pair-not-distinct"))
            continue
        if any(cm == cn for cm in circles_m for cn in circles_n):
            rows.append(gated("quadruple-not-distinct"))
            continue
        if any(rec["classes"] - allowed for rec in recs_m + recs_n):
            rows.append(gated("shared-across-classes"))
            continue
        if deg_m != deg_n:
            rows.append(gated("straddling-residue-fields"))
            continue
        if 2 * deg_m + 2 * deg_n != 4 * mp.degree:
            rows.append(gated("rank-mismatch"))
            continue
        if any(rec["zero_vol"] for rec in recs_m + recs_n):
            rows.append(gated("zero-local-index"))
            continue
        lhs = add_forms(_pair_lhs(recs_m), _pair_lhs(recs_n))
        expected = hyperbolic_class(ctx.base_id, 2 * mp.degree)
        state = PASS if lhs == expected else FAIL
        rows.append(
            QuadrupleReport(sign_m, sign_n, labels, quadruple, (deg_m, deg_n),
                            mp.degree, disc0, state, lhs=lhs, expected=expected)
        )
    return DegenDualReport(i, rows, merged)


# ----------------------------------------------------------- ramification


class ClassRamification:
    """Branch data of one sign class's family discriminant."""

    __slots__ = (
        "sign",
        "labels",
        "disc",
        "degree",
        "roots",
        "residual_degree",
        "at_zero",
        "evaluations",
        "identically_zero",
    )

    def __init__(self, sign, labels, disc, degree, roots, residual_degree,
                 at_zero, evaluations, identically_zero):
        self.sign = tuple(sign)
        self.labels = tuple(labels)
        self.disc = disc
        self.degree = degree
        self.roots = tuple(roots)
        self.residual_degree = residual_degree
        self.at_zero = at_zero
        self.evaluations = tuple(evaluations)
        self.identically_zero = identically_zero

    def __repr__(self):
        return (
            f"ClassRamification(s={self.sign}, roots={self.roots}, "
            f"residual_degree={self.residual_degree})"
        )

    def to_json(self) -> dict:
        return {
            "sign": list(self.sign),
            "labels": list(self.labels),
            "disc": self.disc.to_json(),
            "degree": self.degree,
            "roots": [[element_to_str(r), mult] for r, mult in self.roots],
            "residual_degree": self.residual_degree,
            "at_zero": element_to_str(self.at_zero),
            "evaluations": [
                {"t": element_to_str(t), "value": element_to_str(v), "zero": z}
                for t, v, z in self.evaluations
            ],
            "identically_zero": self.identically_zero,
        }


class RamificationReport:
    """Rational branch points of the slot-i family, class by class.

    A fiber t0 is a branch point for a class exactly when that class's
    family discriminant vanishes there (its two roots collide).  Roots
    outside the base field are not extracted; only the degree of the
    root-free cofactor is reported.  The t = 0 fiber is summarized
    separately via the merged-pair structure (its four double points
    come from classes merging, not from discriminants vanishing).
    """

    __slots__ = ("slot", "field", "classes", "merge")

    def __init__(self, slot, field, classes, merge):
        self.slot = slot
        self.field = field
        self.classes = tuple(classes)
        self.merge = merge

    def branch_points(self) -> tuple[FieldElement, ...]:
        """The distinct rational branch points across all classes."""
        out: list[FieldElement] = []
        for entry in self.classes:
            for r, _ in entry.roots:
                if not any(r == seen for seen in out):
                    out.append(r)
        return tuple(out)

    def vanishing_at(self, t) -> tuple[tuple[int, int, int], ...]:
        """The sign classes whose discriminant vanishes at t."""
        out = []
        for entry in self.classes:
            if entry.identically_zero or entry.disc.evaluate(t).is_zero:
                out.append(entry.sign)
        return tuple(out)

    def is_branch_point(self, t) -> bool:
        return bool(self.vanishing_at(t))

    def __repr__(self):
        return f"RamificationReport(slot={self.slot}, classes={len(self.classes)})"

    def to_json(self) -> dict:
        merge = dict(self.merge)
        if "pairs" in merge:
            merge["pairs"] = [mp.to_json() for mp in merge["pairs"]]
        return {
            "slot": self.slot,
            "classes": [entry.to_json() for entry in self.classes],
            "merge": merge,
        }


def ramification_scan(config, radii, i: int, t_values=()) -> RamificationReport:
    """Locate the fibers of the slot-i family where solutions collide.

    For each sign class the family discriminant is a polynomial in t;
    its rational roots (found exactly after clearing denominators) are
    the base-field branch points, the remaining factor is reported by
    degree only, and the polynomial is evaluated at every requested t.
    Radii must split in the base field so the coefficients stay
    rational.
    """
    _check_slot(i)
    problem = choose_radii(tuple(config), radii)
    if problem.field.level != 0:
        raise ValueError(
            "branch-point detection requires split radii"
            " (base-field discriminant coefficients)"
        )
    K = problem.field
    entries = []
    for m, s in enumerate(SIGN_VECTORS):
        labels = (2 * m + 1, 2 * m + 2)
        disc = _family_quadratic(problem, s, i).disc()
        evaluations = []
        for t in t_values:
            tv = K.coerce(t)
            val = disc.evaluate(tv)
            evaluations.append((tv, val, val.is_zero))
        if disc.is_zero:
            entries.append(
                ClassRamification(s, labels, disc, -1, (), 0, K.zero(),
                                  evaluations, True)
            )
            continue
        roots, rest = _rational_roots(list(disc.coeffs), K)
        entries.append(
            ClassRamification(
                s,
                labels,
                disc,
                disc.degree,
                roots,
                len(rest) - 1,
                disc.evaluate(K.zero()),
                evaluations,
                False,
            )
        )
    try:
        pairs = degeneration_data(problem, i)
        merge = {"state": "ok", "pairs": list(pairs),
                 "double_points": sum(len(mp.circles) for mp in pairs)}
    except DegenerateMerge as exc:
        merge = {"state": "degenerate-merge", "detail": str(exc)}
    except InfiniteRadius as exc:
        merge = {"state": "infinite-radius", "detail": str(exc)}
    return RamificationReport(i, K, entries, merge)
