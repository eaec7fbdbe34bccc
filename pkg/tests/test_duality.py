"""Degeneration pairings of the eight solutions: the one-parameter
family, the t = 0 merge matchings, the cube structure of the three
involutions, and the conditional index-sum identities they impose."""

from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apollonius import duality as du
from apollonius import exactfield as xf
from apollonius import moduli as md
from apollonius import quadform as qf
from apollonius import solver as sv
from apollonius.errors import (
    ApolloniusError,
    CollinearCenters,
    DegenerateMerge,
    FieldMismatch,
    InfiniteRadius,
    TangentPair,
)

Q = xf.rationals()


def C(a, b, r2):
    return md.circle_from(Fraction(a), Fraction(b), Fraction(r2))


UNIT_TRIPLE = (C(0, 0, 1), C(4, 0, 1), C(2, 3, 1))
# all four sign classes conjugate: every root pair is one closed point
ALL_CONJUGATE = (C(0, Fraction(1, 8), Fraction(49, 64)), C(Fraction(5, 4), 0, 1), C(1, 2, Fraction(1, 4)))
# the (1,-1,-1) class splits, the others are conjugate
MIXED_TRIPLE = (C(0, 0, 4), C(7, 1, 1), C(3, 6, 1))
# every class conjugate and every merged quadruple clean
CLEAN_QUADRUPLES = (C(-1, 2, 9), C(4, -1, 1), C(2, 5, 4))

THETA_1 = (8, 7, 6, 5, 4, 3, 2, 1)
THETA_2 = (5, 6, 7, 8, 1, 2, 3, 4)
THETA_3 = (3, 4, 1, 2, 7, 8, 5, 6)


def thetas_of(config, radii=(1, 1, 1)):
    return tuple(du.theta(config, radii, i) for i in (1, 2, 3))


# ---------------------------------------------------------------- TPoly


def test_tpoly_ring_arithmetic():
    p = du.TPoly(Q, [1, 2]) * du.TPoly(Q, [3, 0, 1]) - 2
    assert p.coeffs == tuple(Q.coerce(c) for c in (1, 6, 1, 2))
    assert p.degree == 3
    assert p.evaluate(2) == 33
    assert (p / 2).evaluate(2) == Fraction(33, 2)
    assert (3 * du.TPoly(Q, [0, 1]) + 1).coeffs == (Q.one(), Q.coerce(3))
    assert (1 - du.TPoly(Q, [1, 1])).coeffs == (Q.zero(), Q.coerce(-1))


def test_tpoly_zero_and_constants():
    z = du.TPoly(Q, [0, 0])
    assert z.is_zero and z.degree == -1 and z.constant_value().is_zero
    assert z.evaluate(7).is_zero
    c = du.TPoly(Q, [5])
    assert c.constant_value() == 5
    with pytest.raises(ValueError):
        (c + du.TPoly(Q, [0, 1])).constant_value()


def test_tpoly_division_restrictions():
    p = du.TPoly(Q, [1, 1])
    with pytest.raises(ValueError):
        p / du.TPoly(Q, [0, 1])
    with pytest.raises(ZeroDivisionError):
        p / du.TPoly(Q, [])


def test_tpoly_tower_merge():
    K = xf.adjoin_sqrt(Q, Q.coerce(2))
    p = du.TPoly(Q, [1, 1]) + du.TPoly(K, [K.root()])
    assert p.field == K
    assert p.evaluate(K.zero()) == 1 + K.root()
    F5 = xf.prime_field(5)
    with pytest.raises(FieldMismatch):
        du.TPoly(Q, [1]) + du.TPoly(F5, [1])


# --------------------------------------------------------------- labels


def test_solution_labels_enumerate_classes_then_branches():
    assert len(du.SOLUTION_LABELS) == 8
    for n in range(1, 9):
        s, b = du.label_identity(n)
        assert du.label_of(s, b) == n
        assert b == (0 if n % 2 else 1)  # odd labels carry the + branch
    assert du.label_identity(1) == ((1, 1, 1), 0)
    assert du.label_identity(8) == ((1, -1, -1), 1)
    with pytest.raises(ValueError):
        du.label_identity(0)
    with pytest.raises(ValueError):
        du.label_identity(9)


# --------------------------------------------------------------- family


def test_family_frozen_coefficients_unit_triple():
    fam = du.family_poly(UNIT_TRIPLE, (1, 1, 1), (1, 1, 1), 3)
    assert fam.sign == (1, 1, 1) and fam.slot == 3
    assert fam.quad.coeffs == tuple(
        Q.coerce(c) for c in (Fraction(8, 9), Fraction(2, 9), Fraction(-1, 9))
    )
    assert fam.lin.coeffs == tuple(
        Q.coerce(c)
        for c in (Fraction(-4, 3), Fraction(-2, 3), Fraction(-1, 9), Fraction(1, 9))
    )
    assert fam.const.coeffs == tuple(
        Q.coerce(c) for c in (-4, 0, Fraction(1, 3), 0, Fraction(-1, 36))
    )
    assert fam.coefficients_at(1) == (Q.one(), Q.coerce(-2), Q.coerce(Fraction(-133, 36)))
    assert fam.disc().evaluate(1) == Fraction(169, 9)


def test_family_at_one_recovers_plain_elimination():
    problem = sv.choose_radii(UNIT_TRIPLE, (1, 1, 1))
    for i in (1, 2, 3):
        for s in sv.SIGN_VECTORS:
            fam = du.family_poly(UNIT_TRIPLE, (1, 1, 1), s, i)
            plain = sv.coaklay_poly(
                sv.coefficients_from_data(problem.centers, problem.radii, s)
            )
            assert fam.coefficients_at(1) == plain


def test_family_merges_classes_at_zero():
    # shrinking slot 3 identifies s3 = +1 with s3 = -1 classwise
    for pair in ((0, 1), (2, 3)):
        fams = [
            du.family_poly(UNIT_TRIPLE, (1, 1, 1), sv.SIGN_VECTORS[m], 3)
            for m in pair
        ]
        assert fams[0].coefficients_at(0) == fams[1].coefficients_at(0)


def test_family_slot_validation_and_collinear():
    with pytest.raises(ValueError):
        du.family_poly(UNIT_TRIPLE, (1, 1, 1), (1, 1, 1), 0)
    with pytest.raises(CollinearCenters):
        du.family_poly(
            (C(0, 0, 1), C(1, 1, 1), C(2, 2, 1)), (1, 1, 1), (1, 1, 1), 1
        )


def test_family_serialization():
    fam = du.family_poly(UNIT_TRIPLE, (1, 1, 1), (1, 1, 1), 3)
    blob = json.dumps(fam.to_json())
    data = json.loads(blob)
    assert data["sign"] == [1, 1, 1] and data["slot"] == 3
    assert data["quad"] == ["8/9", "2/9", "-1/9"]


config_strategy = st.tuples(
    st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(1, 4)),
    st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(1, 4)),
    st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(1, 4)),
)


@given(config_strategy, st.sampled_from([1, 2, 3]))
@settings(max_examples=25, deadline=None)
def test_property_family_specializes_to_plain(triples, slot):
    circles = tuple(C(a, b, r2) for a, b, r2 in triples)
    if md.config_check(*circles) is not md.OK:
        return
    problem = sv.choose_radii(circles, (1, 1, 1))
    for s in sv.SIGN_VECTORS:
        fam = du.family_poly(circles, (1, 1, 1), s, slot)
        plain = sv.coaklay_poly(
            sv.coefficients_from_data(problem.centers, problem.radii, s)
        )
        assert fam.coefficients_at(1) == plain
        assert fam.disc().evaluate(0) == (
            fam.lin.evaluate(0) ** 2 - 4 * fam.quad.evaluate(0) * fam.const.evaluate(0)
        )


# ---------------------------------------------------------- ThetaMatrix


def test_theta_matrix_permutation_validation():
    with pytest.raises(ValueError):
        du.ThetaMatrix((1, 1, 3, 4, 5, 6, 7, 8))
    with pytest.raises(ValueError):
        du.ThetaMatrix((1, 2, 3))


def test_theta_matrix_operations():
    t = du.ThetaMatrix(THETA_1)
    assert t.is_involution and t.is_symmetric
    assert not t.fixed_points()
    assert t.pairs() == ((1, 8), (2, 7), (3, 6), (4, 5))
    assert t.inverse() == t
    assert t @ t == du.ThetaMatrix.identity()
    assert du.ThetaMatrix.from_pairs(((1, 8), (2, 7), (3, 6), (4, 5))) == t
    ident = du.ThetaMatrix.identity()
    assert ident.fixed_points() == tuple(range(1, 9))
    assert (t @ ident) == t and (ident @ t) == t


def test_theta_matrix_rows_and_json():
    t = du.ThetaMatrix(THETA_3)
    rows = t.rows()
    for r in range(8):
        for c in range(8):
            assert rows[r][c] == (1 if t(c + 1) == r + 1 else 0)
    assert all(sum(row) == 1 for row in rows)
    assert all(sum(col) == 1 for col in zip(*rows))
    assert t.to_json() == [
        "00100000",
        "00010000",
        "10000000",
        "01000000",
        "00000010",
        "00000001",
        "00001000",
        "00000100",
    ]
    assert json.dumps(t.to_json())


def test_inversive_pairs_swaps_each_class():
    inv = du.inversive_pairs()
    assert inv.perm == (2, 1, 4, 3, 6, 5, 8, 7)
    assert inv.pairs() == ((1, 2), (3, 4), (5, 6), (7, 8))
    assert inv.is_involution and not inv.fixed_points()


# ------------------------------------------------------------ theta data


def test_theta_frozen_matrices_unit_triple():
    t1, t2, t3 = thetas_of(UNIT_TRIPLE)
    assert t1.perm == THETA_1
    assert t2.perm == THETA_2
    assert t3.perm == THETA_3
    assert (t1 @ t2 @ t3) == du.inversive_pairs()


def test_theta_frozen_matrices_other_configs():
    for config in (ALL_CONJUGATE, MIXED_TRIPLE, CLEAN_QUADRUPLES):
        t1, t2, t3 = thetas_of(config)
        assert (t1.perm, t2.perm, t3.perm) == (THETA_1, THETA_2, THETA_3)


def test_theta_over_prime_field():
    F17 = xf.prime_field(17)
    cfg = tuple(
        md.circle_from(F17.coerce(a), F17.coerce(b), F17.coerce(r2), F17)
        for a, b, r2 in ((0, 0, 1), (4, 0, 1), (2, 3, 1))
    )
    t1, t2, t3 = thetas_of(cfg)
    assert (t1.perm, t2.perm, t3.perm) == (THETA_1, THETA_2, THETA_3)
    assert du.cube_check((t1, t2, t3)).ok


def test_theta_over_quadratic_tower():
    # an irrational radius pushes the whole family into Q(sqrt 2)
    cfg = (C(0, 0, 2), C(4, 0, 1), C(2, 3, 1))
    t1, t2, t3 = thetas_of(cfg)
    assert (t1.perm, t2.perm, t3.perm) == (THETA_1, THETA_2, THETA_3)


def test_theta_requires_transverse_configuration():
    with pytest.raises(TangentPair):
        du.theta((C(0, 0, 1), C(2, 0, 1), C(1, 5, 1)), (1, 1, 1), 1)
    with pytest.raises(CollinearCenters):
        du.theta((C(0, 0, 1), C(1, 1, 1), C(2, 2, 1)), (1, 1, 1), 1)


def test_theta_degenerate_fiber_errors_over_small_fields():
    def fp_config(p):
        F = xf.prime_field(p)
        return tuple(
            md.circle_from(F.coerce(a), F.coerce(b), F.coerce(r2), F)
            for a, b, r2 in ((0, 0, 1), (4, 0, 1), (2, 3, 1))
        )

    # mod 5 the shrunk fiber has a repeated root; mod 11 one fiber class
    # degenerates to a line
    with pytest.raises(DegenerateMerge):
        du.theta(fp_config(5), (1, 1, 1), 1)
    with pytest.raises(InfiniteRadius):
        du.theta(fp_config(11), (1, 1, 1), 1)


def test_degeneration_data_merged_pair_structure():
    problem = sv.choose_radii(UNIT_TRIPLE, (1, 1, 1))
    by_slot = {
        1: ((0, 3), (1, 2)),
        2: ((0, 2), (1, 3)),
        3: ((0, 1), (2, 3)),
    }
    for i, expected_classes in by_slot.items():
        pairs = du.degeneration_data(problem, i)
        assert tuple(mp.classes for mp in pairs) == expected_classes
        for mp in pairs:
            assert len(mp.circles) == 2 and mp.circles[0] != mp.circles[1]
            assert sorted(b for b, _ in mp.matching) == [0, 1]
            assert sorted(b2 for _, b2 in mp.matching) == [0, 1]
    # slot 3: the s3-merge keeps one rational double pair and one
    # quadratic double pair
    pairs = du.degeneration_data(problem, 3)
    assert [mp.degree for mp in pairs] == [1, 2]
    assert pairs[0].discs[0] == 16 and pairs[1].discs[0] == 12
    # slot 1 and 2 merges both land in quadratic residue fields
    for i in (1, 2):
        assert [mp.degree for mp in du.degeneration_data(problem, i)] == [2, 2]


def test_merged_pair_serialization():
    problem = sv.choose_radii(UNIT_TRIPLE, (1, 1, 1))
    pairs = du.degeneration_data(problem, 3)
    data = json.loads(json.dumps([mp.to_json() for mp in pairs]))
    assert data[0]["signs"] == [[1, 1, 1], [1, 1, -1]]
    assert data[0]["labels"] == [1, 2, 3, 4]
    assert data[0]["degree"] == 1 and data[1]["degree"] == 2
    assert data[0]["disc"] == "16" and data[1]["disc"] == "12"


# ------------------------------------------------------------ cube check


def test_cube_check_passes_on_unit_triple():
    ths = thetas_of(UNIT_TRIPLE)
    rep = du.cube_check(ths)
    assert rep.ok and rep.is_cube and not rep.failures
    assert rep.product == du.inversive_pairs()
    assert dict(rep.checks) == {
        "involutions": True,
        "fixed-point-free": True,
        "images-disjoint": True,
        "commuting": True,
        "product-fixed-point-free": True,
        "trivalent": True,
        "connected": True,
        "bipartite": True,
    }
    assert json.dumps(rep.to_json())


def test_cube_check_rejects_identity_sabotage():
    t1, _, t3 = thetas_of(UNIT_TRIPLE)
    rep = du.cube_check((t1, du.ThetaMatrix.identity(), t3))
    assert not rep.ok and not rep.is_cube
    assert "fixed-point-free" in rep.failures
    assert "trivalent" in rep.failures


def test_cube_check_rejects_non_commuting_sabotage():
    t1, t2, _ = thetas_of(UNIT_TRIPLE)
    # a fixed-point-free involution chosen to break commutativity:
    # rogue(theta1(1)) = 7 but theta1(rogue(1)) = 6
    rogue = du.ThetaMatrix.from_pairs(((1, 3), (2, 4), (5, 6), (7, 8)))
    assert rogue.is_involution and not rogue.fixed_points()
    rep = du.cube_check((t1, t2, rogue))
    assert not rep.ok
    assert "commuting" in rep.failures


def test_cube_check_rejects_shared_edges():
    t1, t2, t3 = thetas_of(UNIT_TRIPLE)
    rep = du.cube_check((t1, t1, t3))
    assert not rep.ok
    assert "images-disjoint" in rep.failures
    assert "trivalent" in rep.failures


def test_cube_check_arity():
    t1, t2, t3 = thetas_of(UNIT_TRIPLE)
    with pytest.raises(ValueError):
        du.cube_check((t1, t2))


# --------------------------------------------------- inversive sum check


def test_inversive_sums_unit_triple():
    rep = du.inversive_sum_check(UNIT_TRIPLE, (1, 1, 1))
    assert rep.mode == "CCC"
    assert [(p.sign, p.state, p.degree) for p in rep.pairs] == [
        ((1, 1, 1), "pass", 1),
        ((1, 1, -1), "pass", 1),
        ((1, -1, 1), "pass", 2),
        ((1, -1, -1), "pass", 2),
    ]
    for p in rep.pairs:
        assert p.lhs == qf.hyperbolic_class("Q", p.degree)
        assert p.passed is True
    assert rep.ok is True
    assert rep.closed_total == qf.hyperbolic_class("Q", 4)
    assert rep.totals_ok is True
    assert json.dumps(rep.to_json())


def test_inversive_sums_all_conjugate_config():
    rep = du.inversive_sum_check(ALL_CONJUGATE, (1, 1, 1))
    assert all(p.state == "pass" and p.degree == 2 for p in rep.pairs)
    for p in rep.pairs:
        # one conjugate closed point: the doubled trace form is 2H
        assert p.lhs.rank == 4 and p.lhs == qf.hyperbolic_class("Q", 2)
        assert len(p.closed) == 1 and p.closed[0].rank == 2
    assert rep.ok is True and rep.totals_ok is True


def test_inversive_sums_mixed_split_pattern():
    rep = du.inversive_sum_check(MIXED_TRIPLE, (1, 1, 1))
    assert [(p.state, p.degree) for p in rep.pairs] == [
        ("pass", 2),
        ("pass", 2),
        ("pass", 2),
        ("pass", 1),
    ]
    assert rep.ok is True and rep.totals_ok is True


def test_inversive_sums_over_prime_field():
    F17 = xf.prime_field(17)
    cfg = tuple(
        md.circle_from(F17.coerce(a), F17.coerce(b), F17.coerce(r2), F17)
        for a, b, r2 in ((0, 0, 1), (4, 0, 1), (2, 3, 1))
    )
    rep = du.inversive_sum_check(cfg, (1, 1, 1))
    assert [p.degree for p in rep.pairs] == [1, 1, 2, 2]
    assert rep.ok is True and rep.totals_ok is True


def test_inversive_sums_gate_shared_circles_small_field():
    F7 = xf.prime_field(7)
    cfg = tuple(
        md.circle_from(F7.coerce(a), F7.coerce(b), F7.coerce(r2), F7)
        for a, b, r2 in ((0, 0, 1), (4, 0, 1), (2, 3, 1))
    )
    rep = du.inversive_sum_check(cfg, (1, 1, 1))
    assert all(p.state == "hypothesis-not-met" for p in rep.pairs)
    assert all(p.reason == "shared-across-classes" for p in rep.pairs)
    assert rep.ok is None
    assert all(p.passed is None for p in rep.pairs)


def test_inversive_sums_point_gates():
    ppp = (C(0, 0, 0), C(4, 0, 0), C(2, 3, 0))
    rep = du.inversive_sum_check(ppp, (1, 1, 1))
    assert rep.mode == "PPP"
    assert (rep.pairs[0].state, rep.pairs[0].reason) == (
        "hypothesis-not-met",
        "pair-not-distinct",
    )
    for p in rep.pairs[1:]:
        assert (p.state, p.reason) == ("hypothesis-not-met", "merged-class-duplicate")
    assert rep.ok is None and rep.expected_total is None

    cpp = (C(0, 0, 1), C(4, 0, 0), C(2, 3, 0))
    rep = du.inversive_sum_check(cpp, (1, 1, 1))
    assert rep.mode == "CPP"
    assert rep.pairs[0].state == "pass" and rep.pairs[0].degree == 2
    for p in rep.pairs[1:]:
        assert p.reason == "merged-class-duplicate"
    # one genuine circle: the closed-point total is a single H
    assert rep.expected_total == qf.hyperbolic_class("Q", 1)
    assert rep.closed_total == rep.expected_total and rep.totals_ok is True


def test_inversive_sums_input_validation():
    with pytest.raises(ValueError):
        du.inversive_sum_check((C(0, 0, 1), C(4, 0, 1)), (1, 1, 1))
    with pytest.raises(ValueError):
        # irrational radius: the per-point grouping needs split radii
        du.inversive_sum_check((C(0, 0, 2), C(4, 0, 1), C(2, 3, 1)), (1, 1, 1))


# ------------------------------------------------- pair report unit tests


def one_dim_class(a):
    return qf.form_class(qf.trace_form(Q, Q.coerce(a)))


def fake_record(beta, degree=1, field=Q, zero_vol=False):
    return {"beta": beta, "degree": degree, "field": field, "zero_vol": zero_vol}


def test_pair_report_pass_and_fail_states():
    good = du._pair_report(
        "Q", (1, 1, 1), (1, 2), [fake_record(one_dim_class(1)), fake_record(one_dim_class(-1))]
    )
    assert good.state == "pass" and good.degree == 1
    bad = du._pair_report(
        "Q", (1, 1, 1), (1, 2), [fake_record(one_dim_class(1)), fake_record(one_dim_class(1))]
    )
    assert bad.state == "fail" and bad.passed is False


def test_pair_report_field_mismatch_gate():
    K = xf.adjoin_sqrt(Q, Q.coerce(5))
    h = qf.hyperbolic_class("Q", 1)
    mismatch = du._pair_report(
        "Q",
        (1, 1, 1),
        (1, 2),
        [fake_record(h, degree=1, field=Q), fake_record(h, degree=2, field=K)],
    )
    assert mismatch.state == "hypothesis-not-met"
    assert mismatch.reason == "field-mismatch"


def test_pair_report_zero_index_gate():
    rec = fake_record(None, zero_vol=True)
    rep = du._pair_report("Q", (1, 1, 1), (1, 2), [rec, fake_record(one_dim_class(1))])
    assert rep.state == "hypothesis-not-met" and rep.reason == "zero-local-index"


def test_pair_report_gate_priority():
    rec = fake_record(None, zero_vol=True)
    rep = du._pair_report("Q", (1, 1, 1), (1, 2), [rec], merged_duplicate=True)
    assert rep.reason == "merged-class-duplicate"
    rep = du._pair_report("Q", (1, 1, 1), (1, 2), [rec])
    assert rep.reason == "pair-not-distinct"
    rep = du._pair_report("Q", (1, 1, 1), (1, 2), [rec, rec], shared=True)
    assert rep.reason == "shared-across-classes"


# ------------------------------------------------ degenerate dual sums


def test_degen_dual_unit_triple_slot3():
    rep = du.degen_dual_sum_check(UNIT_TRIPLE, (1, 1, 1), 3)
    assert rep.slot == 3
    assert [r.state for r in rep.rows] == ["pass"] * 4
    assert [r.quadruple for r in rep.rows] == [
        (1, 2, 3, 4),
        (1, 2, 3, 4),
        (5, 6, 7, 8),
        (5, 6, 7, 8),
    ]
    assert [r.kd_degree for r in rep.rows] == [1, 1, 2, 2]
    assert [r.disc for r in rep.rows] == [
        Q.coerce(16),
        Q.coerce(16),
        Q.coerce(12),
        Q.coerce(12),
    ]
    # rational double point: sum over the quadruple is 2H; quadratic: 4H
    assert rep.rows[0].expected == qf.hyperbolic_class("Q", 2)
    assert rep.rows[2].expected == qf.hyperbolic_class("Q", 4)
    for r in rep.rows:
        assert r.lhs == r.expected
    assert rep.ok is True
    assert json.dumps(rep.to_json())


def test_degen_dual_unit_triple_straddling_slots():
    # slots 1 and 2 of the unit triple merge a split pair with a
    # conjugate pair: the residue fields straddle and the identity is
    # not asserted
    for i in (1, 2):
        rep = du.degen_dual_sum_check(UNIT_TRIPLE, (1, 1, 1), i)
        assert [(r.state, r.reason) for r in rep.rows] == [
            ("hypothesis-not-met", "straddling-residue-fields")
        ] * 4
        assert rep.ok is None
        assert all(r.passed is None for r in rep.rows)


def test_degen_dual_all_conjugate_config_all_slots_pass():
    for i in (1, 2, 3):
        rep = du.degen_dual_sum_check(ALL_CONJUGATE, (1, 1, 1), i)
        assert [r.state for r in rep.rows] == ["pass"] * 4
        assert all(r.kd_degree == 2 for r in rep.rows)
        assert all(r.expected == qf.hyperbolic_class("Q", 4) for r in rep.rows)
        assert rep.ok is True


def test_degen_dual_mixed_config_partial_pattern():
    by_slot = {
        1: {(1, 2, 7, 8): "hypothesis-not-met", (3, 4, 5, 6): "pass"},
        2: {(1, 2, 5, 6): "pass", (3, 4, 7, 8): "hypothesis-not-met"},
        3: {(1, 2, 3, 4): "pass", (5, 6, 7, 8): "hypothesis-not-met"},
    }
    for i, expected in by_slot.items():
        rep = du.degen_dual_sum_check(MIXED_TRIPLE, (1, 1, 1), i)
        got = {r.quadruple: r.state for r in rep.rows}
        assert got == expected, (i, got)
        for r in rep.rows:
            if r.state == "hypothesis-not-met":
                assert r.reason == "straddling-residue-fields"
        assert rep.ok is None


def test_degen_dual_clean_quadruple_config():
    for i in (1, 2, 3):
        rep = du.degen_dual_sum_check(CLEAN_QUADRUPLES, (1, 1, 1), i)
        assert [r.state for r in rep.rows] == ["pass"] * 4
        assert rep.ok is True
    # disc of the merged fiber may be negative and still quadratic
    rep = du.degen_dual_sum_check(CLEAN_QUADRUPLES, (1, 1, 1), 2)
    assert {str(r.disc) for r in rep.rows} == {"425/16", "-175/16"}


def test_degen_dual_slot_validation():
    with pytest.raises(ValueError):
        du.degen_dual_sum_check(UNIT_TRIPLE, (1, 1, 1), 4)


# ----------------------------------------------------------- ramification


def test_ramification_unit_triple_slot1():
    scan = du.ramification_scan(UNIT_TRIPLE, (1, 1, 1), 1, t_values=(1,))
    assert scan.slot == 1
    assert [e.sign for e in scan.classes] == list(sv.SIGN_VECTORS)
    assert [e.labels for e in scan.classes] == [(1, 2), (3, 4), (5, 6), (7, 8)]
    roots = [sorted((str(r), m) for r, m in e.roots) for e in scan.classes]
    assert roots[0] == [("-3", 1), ("5", 1)]
    assert roots[1] == [("-3", 1), ("5", 1)]
    assert roots[2] == [("-5", 1), ("3", 1)]
    assert roots[3] == [("-5", 1), ("3", 1)]
    assert [e.degree for e in scan.classes] == [4, 4, 4, 4]
    assert [e.residual_degree for e in scan.classes] == [2, 2, 2, 2]
    assert [str(e.at_zero) for e in scan.classes] == ["65/4", "45/4", "45/4", "65/4"]
    # t = 1 is the undeformed problem: no class ramifies there
    assert all(not zero for e in scan.classes for _, _, zero in e.evaluations)
    assert not scan.is_branch_point(1)
    assert scan.vanishing_at(5) == ((1, 1, 1), (1, 1, -1))
    assert scan.vanishing_at(-5) == ((1, -1, 1), (1, -1, -1))
    assert sorted(str(t) for t in scan.branch_points()) == ["-3", "-5", "3", "5"]
    assert scan.merge["state"] == "ok"
    assert scan.merge["double_points"] == 4
    assert [mp.classes for mp in scan.merge["pairs"]] == [(0, 3), (1, 2)]


def test_ramification_unit_triple_other_slots():
    scan2 = du.ramification_scan(UNIT_TRIPLE, (1, 1, 1), 2)
    assert [str(e.at_zero) for e in scan2.classes] == ["65/4", "45/4", "65/4", "45/4"]
    scan3 = du.ramification_scan(UNIT_TRIPLE, (1, 1, 1), 3)
    # slot 3: all branch points are irrational; only the residual degree
    # of the root-free factor is reported
    assert all(e.roots == () for e in scan3.classes)
    assert [e.residual_degree for e in scan3.classes] == [4, 4, 4, 4]
    assert [str(e.at_zero) for e in scan3.classes] == ["16", "16", "12", "12"]
    assert scan3.branch_points() == ()
    assert [mp.classes for mp in scan3.merge["pairs"]] == [(0, 1), (2, 3)]


def test_ramification_at_zero_matches_merged_discs():
    # the discriminant limits at t = 0 agree pairwise exactly as the
    # classes merge
    for i, pairing in ((1, ((0, 3), (1, 2))), (2, ((0, 2), (1, 3))), (3, ((0, 1), (2, 3)))):
        scan = du.ramification_scan(UNIT_TRIPLE, (1, 1, 1), i)
        for m, n in pairing:
            assert scan.classes[m].at_zero == scan.classes[n].at_zero


def test_ramification_serialization_and_validation():
    scan = du.ramification_scan(UNIT_TRIPLE, (1, 1, 1), 1, t_values=(0, 1))
    data = json.loads(json.dumps(scan.to_json()))
    assert data["slot"] == 1
    assert len(data["classes"]) == 4
    assert sorted(data["classes"][0]["roots"]) == [["-3", 1], ["5", 1]]
    assert data["classes"][0]["evaluations"][1]["zero"] is False
    assert data["merge"]["state"] == "ok"
    with pytest.raises(ValueError):
        du.ramification_scan(UNIT_TRIPLE, (1, 1, 1), 5)
    with pytest.raises(ValueError):
        # irrational radius: branch points live in a quadratic tower
        du.ramification_scan((C(0, 0, 2), C(4, 0, 1), C(2, 3, 1)), (1, 1, 1), 1)


def test_ramification_over_prime_field():
    F17 = xf.prime_field(17)
    cfg = tuple(
        md.circle_from(F17.coerce(a), F17.coerce(b), F17.coerce(r2), F17)
        for a, b, r2 in ((0, 0, 1), (4, 0, 1), (2, 3, 1))
    )
    scan = du.ramification_scan(cfg, (1, 1, 1), 1)
    # over F17 the rational branch points are the mod-17 images of the
    # rational ones; each class still ramifies at finitely many fibers
    assert all(e.degree == 4 for e in scan.classes)
    assert {str(r) for r, _ in scan.classes[0].roots} >= {"14 mod 17", "5 mod 17"}


# ------------------------------------------------------------ properties


def test_theta_stable_across_random_configurations():
    rng = random.Random(20260815)
    count = 0
    attempts = 0
    while count < 20 and attempts < 400:
        attempts += 1
        vals = [Fraction(rng.randint(-8, 8), rng.randint(1, 4)) for _ in range(6)]
        r2s = [Fraction(rng.randint(1, 6)) ** 2 for _ in range(3)]
        cfg = tuple(C(vals[2 * j], vals[2 * j + 1], r2s[j]) for j in range(3))
        try:
            ths = thetas_of(cfg)
        except ApolloniusError:
            continue
        assert (ths[0].perm, ths[1].perm, ths[2].perm) == (THETA_1, THETA_2, THETA_3)
        rep = du.cube_check(ths)
        assert rep.ok and rep.product == du.inversive_pairs()
        count += 1
    assert count == 20


@given(config_strategy)
@settings(max_examples=25, deadline=None)
def test_property_index_checks_never_assert_against_failed_hypotheses(triples):
    circles = tuple(C(a, b, r * r) for a, b, r in triples)
    if md.config_check(*circles) is not md.OK:
        return
    try:
        rep = du.inversive_sum_check(circles, (1, 1, 1))
    except InfiniteRadius:
        return
    # the identity may be gated but must never FAIL on a transverse
    # rational configuration
    assert rep.ok is not False
    for p in rep.pairs:
        if p.state == "pass":
            assert p.lhs == qf.hyperbolic_class("Q", p.degree)
    if rep.closed_total is not None:
        assert rep.closed_total == qf.hyperbolic_class("Q", 4)
    try:
        dual = du.degen_dual_sum_check(circles, (1, 1, 1), 1)
    except (DegenerateMerge, InfiniteRadius):
        return
    assert dual.ok is not False
