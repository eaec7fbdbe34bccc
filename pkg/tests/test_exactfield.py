"""Tower arithmetic: squares, traces, signs, serialization.

Frozen oracle values:
  - squares mod 7 enumerate to {1, 2, 4}; mod 13 to {1, 3, 4, 9, 10, 12}
    (brute force over x^2, re-derived below).
  - Tr over Q(sqrt2, sqrt3) of 5 + sqrt6 is 20: the four conjugates are
    5 +- sqrt6, each appearing twice.
  - 3 - 2*sqrt2 = (sqrt2 - 1)^2 > 0.
"""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apollonius import exactfield as xf
from apollonius.errors import FieldMismatch, NoEmbedding, ZeroRadicand

Q = xf.rationals()


def tower(*radicands, base=None):
    K = base if base is not None else Q
    for d in radicands:
        K = xf.adjoin_sqrt(K, d)
        assert isinstance(K, xf.FieldDescriptor), f"{d} unexpectedly a square"
    return K


# ----------------------------------------------------------- base fields


def test_prime_field_rejects_two_and_composites():
    with pytest.raises(ValueError):
        xf.prime_field(2)
    with pytest.raises(ValueError):
        xf.prime_field(15)


def test_fp_squares_match_enumeration():
    for p in (7, 13):
        K = xf.prime_field(p)
        brute = {(x * x) % p for x in range(1, p)}
        detected = {n for n in range(1, p) if xf.is_square(K, n) is not None}
        assert detected == brute
    assert {(x * x) % 7 for x in range(1, 7)} == {1, 2, 4}
    assert {(x * x) % 13 for x in range(1, 13)} == {1, 3, 4, 9, 10, 12}


def test_fp_sqrt_witness_squares_back():
    K = xf.prime_field(13)
    for n in (1, 3, 4, 9, 10, 12):
        w = xf.is_square(K, n)
        assert w * w == K.coerce(n)
    assert xf.is_square(K, 5) is None


def test_rational_square_basic():
    assert xf.is_square(Q, Fraction(9, 4)) == Q.coerce(Fraction(3, 2))
    assert xf.is_square(Q, 0) == Q.zero()
    assert xf.is_square(Q, -4) is None
    assert xf.is_square(Q, Fraction(2, 3)) is None


# ---------------------------------------------------------- adjoin_sqrt


def test_adjoin_square_reports_witness():
    res = xf.adjoin_sqrt(Q, 4)
    assert isinstance(res, xf.AlreadySquare)
    assert res.sqrt == Q.coerce(2)


def test_adjoin_zero_rejected():
    with pytest.raises(ZeroRadicand):
        xf.adjoin_sqrt(Q, 0)


def test_adjoin_nonsquare_extends():
    K = tower(2)
    assert K.level == 1
    r = K.root()
    assert r * r == 2


def test_generator_is_its_own_witness():
    K = tower(2)
    res = xf.adjoin_sqrt(K, 2)
    assert isinstance(res, xf.AlreadySquare)
    assert res.sqrt == K.root()


def test_adjoin_sqrt3_mod7_extends():
    K = xf.prime_field(7)
    L = xf.adjoin_sqrt(K, 3)
    assert isinstance(L, xf.FieldDescriptor) and L.level == 1
    assert L.root() * L.root() == 3


def test_fp_scalar_always_square_in_quadratic_extension():
    # The norm map F_{p^2} -> F_p is surjective, so every base scalar
    # becomes a square one level up.
    K = xf.prime_field(7)
    L = tower(3, base=K)
    for n in range(1, 7):
        w = xf.is_square(L, n)
        assert w is not None and w * w == n


def test_tower_square_with_cross_term():
    K = tower(2)
    a = K.coerce(3) + 2 * K.root()
    w = xf.is_square(K, a)
    assert w is not None and w * w == a
    assert w == K.coerce(1) + K.root()  # canonical branch: leading coord > 0


def test_tower_nonsquare_detected():
    K = tower(2)
    assert xf.is_square(K, K.coerce(3)) is None
    assert xf.is_square(K, K.root() * 5) is None


def test_nested_tower_squares():
    K = tower(2, 3)
    r6 = K.root(1) * K.root(2)
    assert xf.is_square(K, K.coerce(6)) == r6
    a = (K.coerce(1) + K.root(1) + r6) ** 2
    w = xf.is_square(K, a)
    assert w is not None and w * w == a


# ------------------------------------------------------------ arithmetic


def test_field_axioms_on_sample():
    K = tower(2, 3)
    a = K.coerce(Fraction(1, 2)) + K.root(1) * 3 - K.root(2)
    b = K.root(1) * K.root(2) + 7
    c = K.coerce(-2) + K.root(2)
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a - a == 0
    assert a * a.inverse() == 1


def test_descent_to_subtower():
    K2 = tower(2)
    K23 = tower(2, 3)
    a_low = K2.coerce(5) + K2.root()
    a_high = K23.coerce(5) + K23.root(1)
    assert a_high == a_low
    assert hash(a_high) == hash(a_low)
    assert a_high + a_low == 2 * a_low


def test_mismatched_towers():
    K2, K3 = tower(2), tower(3)
    with pytest.raises(FieldMismatch):
        K2.root() + K3.root()
    assert (K2.root() == K3.root()) is False
    with pytest.raises(FieldMismatch):
        xf.prime_field(7).coerce(1) + Q.coerce(1)


def test_power_and_division():
    K = tower(5)
    a = 2 + K.root()
    assert a ** 0 == 1
    assert a ** 3 == a * a * a
    assert a ** -2 == (a * a).inverse()
    assert (a / a) == 1
    assert 1 / a == a.inverse()


# ----------------------------------------------------------------- trace


def test_trace_examples():
    K = tower(2)
    assert xf.trace_to_base(K, K.root()) == 0
    assert xf.trace_to_base(K, 1) == 2
    K23 = tower(2, 3)
    a = K23.coerce(5) + K23.root(1) * K23.root(2)
    assert xf.trace_to_base(K23, a) == 20


def test_trace_is_k_linear_and_counts_degree():
    K = tower(2, 3, 5)
    assert xf.trace_to_base(K, 1) == 8
    a = K.root(1) + K.root(2) * K.root(3)
    b = K.coerce(Fraction(3, 7))
    lhs = xf.trace_to_base(K, a + a) + xf.trace_to_base(K, b * 8)
    # Tr is additive and Q-linear: Tr(2a) + Tr(8b) = 2*Tr(a) + 8*8*(3/7).
    assert lhs == 2 * xf.trace_to_base(K, a) + Fraction(192, 7)


def test_norm_multiplicative():
    K = tower(2, 7)
    a = 1 + K.root(1)
    b = 3 - K.root(2)
    assert xf.norm_to_base(K, a * b) == xf.norm_to_base(K, a) * xf.norm_to_base(K, b)


# ------------------------------------------------------------------ sign


def test_sign_examples():
    K = tower(2)
    assert xf.sign_under_embedding(K, K.zero()) == 0
    assert xf.sign_under_embedding(K, 1 - K.root()) == -1
    assert xf.sign_under_embedding(K, 3 - 2 * K.root()) == 1


def test_sign_respects_branch_choice():
    K = tower(2)
    K_neg = K.with_embedding([-1])
    assert xf.sign_under_embedding(K_neg, 1 - K_neg.root()) == 1


def test_sign_needs_embedding():
    Kneg = xf.adjoin_sqrt(Q, -1)
    with pytest.raises(NoEmbedding):
        xf.sign_under_embedding(Kneg, Kneg.root())
    Fp = xf.prime_field(11)
    with pytest.raises(NoEmbedding):
        xf.sign_under_embedding(Fp, Fp.coerce(3))


def test_sign_tight_value():
    # 1 + sqrt2 + sqrt3 - sqrt6 is approximately 0.0157: a tight but
    # positive combination the interval loop must resolve.
    K = tower(2, 3)
    a = 1 + K.root(1) + K.root(2) - K.root(1) * K.root(2)
    assert xf.sign_under_embedding(K, a) == 1
    assert xf.sign_under_embedding(K, -a) == -1


# -------------------------------------------------------- serialization


def test_coords_round_trip():
    K = tower(2, 3)
    a = K.coerce(Fraction(-7, 3)) + K.root(1) * Fraction(1, 2) - K.root(1) * K.root(2) * 4
    coords = xf.element_to_coords(a)
    assert coords == {"1": "-7/3", "r1": "1/2", "r1*r2": "-4"}
    assert xf.element_from_coords(K, coords) == a


def test_scalar_strings():
    assert xf.element_to_coords(Q.coerce(Fraction(3, 2))) == {"1": "3/2"}
    F = xf.prime_field(7)
    assert xf.element_to_coords(F.coerce(10)) == {"1": "3 mod 7"}
    assert F.coerce("3 mod 7") == F.coerce(3)
    assert xf.element_to_coords(F.zero()) == {"1": "0 mod 7"}


# ------------------------------------------------------- property tests

rational = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=12
)


@given(rational, rational, rational, rational)
@settings(max_examples=60, deadline=None)
def test_property_inverse_in_tower(p1, q1, p2, q2):
    K = tower(2)
    a = K.coerce(p1) + K.root() * q1
    b = K.coerce(p2) + K.root() * q2
    if not a.is_zero:
        assert a * a.inverse() == 1
    assert (a + b) * (a + b) == a * a + 2 * a * b + b * b


@given(rational, rational)
@settings(max_examples=60, deadline=None)
def test_property_square_witness(p, q):
    K = tower(3)
    a = K.coerce(p) + K.root() * q
    w = xf.is_square(K, a * a)
    assert w is not None
    assert w * w == a * a


@given(rational, rational, rational, rational)
@settings(max_examples=40, deadline=None)
def test_property_sign_multiplicative(p1, q1, p2, q2):
    K = tower(5)
    a = K.coerce(p1) + K.root() * q1
    b = K.coerce(p2) + K.root() * q2
    if a.is_zero or b.is_zero:
        return
    assert xf.sign_under_embedding(K, a * b) == (
        xf.sign_under_embedding(K, a) * xf.sign_under_embedding(K, b)
    )


@given(st.integers(min_value=0, max_value=12), st.integers(min_value=0, max_value=12))
@settings(max_examples=40, deadline=None)
def test_property_fp_trace_form_symmetry(x, y):
    F = xf.prime_field(13)
    L = tower(2, base=F)
    a = L.coerce(x) + L.root() * y
    b = L.root() * x - L.coerce(y)
    assert xf.trace_to_base(L, a * b) == xf.trace_to_base(L, b * a)
