import itertools

import pytest

from markov_dyck.builders import (
    M_THEN_TWO,
    TWO_THEN_M,
    AuxParams,
    FamilyIIIParams,
    FamilyIIParams,
    FamilyIParams,
    FamilyParamError,
    build_aux,
    build_family_I,
    build_family_II,
    build_family_III,
)
from markov_dyck.dynamics import count_tables_dp
from markov_dyck.families import (
    classification_table,
    classify,
    classify_III,
    decide_conjugacy_in_family,
    family_III_conditions,
    structural_neutral_four,
    verify_lemma_formulas,
)
from markov_dyck.graph_core import DirectedMultigraph, contracting_forest, validate_graph

from conftest import CORPUS


def relabeled(g):
    names = {v: f"n{i}" for i, v in enumerate(reversed(g.vertices))}
    return g.relabel(names, {e: f"{e}'" for e in g.edge_ids}, order=sorted(names.values()))


def report(g, horizon):
    cd = contracting_forest(g)
    return verify_lemma_formulas(g, count_tables_dp(g, cd, horizon, horizon), cd)


# -- builders ------------------------------------------------------------------------------


def test_builder_tree_edge_counts():
    for s in ({1: 1, 2: 1}, {2: 1, 3: 2}):
        g = build_family_I(FamilyIParams(s))
        assert validate_graph(g).standing_hypotheses_met
        assert len(contracting_forest(g).single_incoming_edges) == sum((k - 1) * v for k, v in s.items())
    g = build_family_II(FamilyIIParams(1, {1: 1, 2: 2}))
    assert len(contracting_forest(g).single_incoming_edges) == 3
    for ell in (2, 5):
        g = build_family_III(FamilyIIIParams(ell, 2))
        assert len(contracting_forest(g).single_incoming_edges) == 2 * ell - 2


@pytest.mark.parametrize(
    "make",
    [
        lambda: FamilyIParams({1: 1}),
        lambda: FamilyIIParams(1, {}),
        lambda: FamilyIIIParams(1, 1),
        lambda: AuxParams("sideways", 6, 1, 1),
    ],
)
def test_bad_params(make):
    with pytest.raises(FamilyParamError):
        make()


# -- classifiers -------------------------------------------------------------------------


def test_fibonacci_lies_in_I_and_II():
    c = classify(CORPUS["Fib"])
    assert c == {"I": FamilyIParams({1: 1, 2: 1}), "II": FamilyIIParams(1, {1: 1})}


def test_dyck_classification():
    assert classify(CORPUS["D2"]) == {"I": FamilyIParams({1: 2}), "II": FamilyIIParams(2)}


def test_G32_lies_outside():
    # ell = 3 is below the family III threshold
    assert classify(CORPUS["G32"]) == {}


def test_two_roots_classify_nowhere():
    g = DirectedMultigraph.build(
        ["a", "b"], [("x1", "a", "b"), ("x2", "a", "b"), ("y1", "b", "a"), ("y2", "b", "a")]
    )
    assert classify(g) == {}


def test_family_II_without_root_loops_is_not_I():
    g = build_family_II(FamilyIIParams(0, {2: 2}))
    c = classify(g)
    assert "I" not in c and c["II"] == FamilyIIParams(0, {2: 2})


def test_III_excludes_II():
    for ell, m in ((5, 1), (6, 2)):
        c = classify(build_family_III(FamilyIIIParams(ell, m)))
        assert c["III"] == FamilyIIIParams(ell, m) and "II" not in c


@pytest.mark.parametrize("s1, s2, s3", [p for p in itertools.product(range(4), repeat=3) if 1 < sum(p) <= 4])
def test_round_trip_I(s1, s2, s3):
    p = FamilyIParams({1: s1, 2: s2, 3: s3})
    assert classify(build_family_I(p))["I"] == p


@pytest.mark.parametrize("r, q1, q2", [p for p in itertools.product(range(3), repeat=3) if sum(p) > 1])
def test_round_trip_II(r, q1, q2):
    p = FamilyIIParams(r, {1: q1, 2: q2})
    assert classify(build_family_II(p))["II"] == p


@pytest.mark.parametrize("ell, m", [(5, 1), (5, 2), (6, 1), (6, 2)])
def test_round_trip_III(ell, m):
    assert classify(build_family_III(FamilyIIIParams(ell, m)))["III"] == FamilyIIIParams(ell, m)


@pytest.mark.parametrize("ell, m", [(5, 1), (6, 2)])
def test_strict_conditions_reject_models(ell, m):
    g = build_family_III(FamilyIIIParams(ell, m))
    cd, ct = classification_table(g)
    checks = {c.name: c.holds for c in family_III_conditions(ct, strict=True)}
    assert checks["A"] and not checks["B"]
    assert classify_III(g, ct, cd, strict=True) is None


@pytest.mark.parametrize("variant", [TWO_THEN_M, M_THEN_TWO])
@pytest.mark.parametrize("ell, big_l, m", [(7, 2, 1), (7, 2, 2), (8, 3, 1)])
def test_aux_graphs_rejected(variant, ell, big_l, m):
    g = build_aux(AuxParams(variant, ell, big_l, m))
    assert "III" not in classify(g)


# -- conjugacy -----------------------------------------------------------------------------


def test_conjugate_relabeled_model():
    g = build_family_III(FamilyIIIParams(5, 1))
    v = decide_conjugacy_in_family(g, relabeled(g))
    assert v.kind == "Conjugate" and v.family == "I"
    assert v.isomorphism is not None and len(v.isomorphism) == len(g.vertices)


def test_not_conjugate_within_family():
    a = build_family_I(FamilyIParams({1: 1, 2: 1}))
    b = build_family_I(FamilyIParams({1: 1, 3: 1}))
    v = decide_conjugacy_in_family(a, b)
    assert v.kind == "NotConjugate" and v.family == "I"


def test_not_conjugate_family_III():
    v = decide_conjugacy_in_family(build_family_III(FamilyIIIParams(5, 2)), build_family_III(FamilyIIIParams(6, 2)))
    assert v.kind == "NotConjugate" and v.family == "III"


def test_undecided_outside_families():
    g = CORPUS["G32"]
    v = decide_conjugacy_in_family(g, relabeled(g), truncation=6)
    assert v.kind == "Undecided"


# -- identities versus enumeration -------------------------------------------------------


def test_structural_count(named_graph):
    _, g, cd = named_graph
    ct = count_tables_dp(g, cd, 4, 1)
    assert ct.neutral_orbits_least(4) == structural_neutral_four(g)


def test_half_I2_points_convention():
    r = report(CORPUS["G32"], 7)
    (row,) = r.rows_for("half_I2")
    ev = row.eval("points_least")
    assert row.applies and ev.match and ev.predicted == 8


def test_xi_identities_on_G51():
    r = report(build_family_III(FamilyIIIParams(5, 1)), 9)
    for row in r.rows_for("xi_plus_2"):
        assert row.eval("orbits_least").match and row.eval("orbits_least").predicted == 6
    for row in r.rows_for("xi_plus_4"):
        ev = row.eval("orbits_least")
        assert (ev.predicted, ev.enumerated) == (43, 29)
    for row in r.rows_for("xi_plus_4_enumerated"):
        assert row.eval("orbits_least").match


def test_xi_plus_2_on_G52():
    r = report(build_family_III(FamilyIIIParams(5, 2)), 9)
    for row in r.rows_for("xi_plus_2"):
        assert row.eval("orbits_least").predicted == 7 and row.eval("orbits_least").match


def test_uncorrected_period_four_identity_fails():
    r = report(build_family_III(FamilyIIIParams(5, 1)), 9)
    (row,) = r.rows_for("I4_V")
    assert not any(ev.match for ev in row.evals)
    (row,) = r.rows_for("I4_V_enumerated")
    assert row.eval("points_least").match


def test_aux_report_values():
    g = build_aux(AuxParams(TWO_THEN_M, 7, 2, 1))
    r = report(g, 11)
    assert any(m.get("variant") == TWO_THEN_M for m in r.recognized)
    (row,) = r.rows_for("I4_two_then_M")
    ev = row.eval("points_least")
    assert row.applies and (ev.predicted, ev.enumerated) == (96, 56)


def test_coinciding_aux_graphs():
    a = build_aux(AuxParams(TWO_THEN_M, 7, 2, 2))
    r = report(a, 11)
    variants = {m["variant"] for m in r.recognized if m["family"] == "aux"}
    assert variants == {TWO_THEN_M, M_THEN_TWO}
    p1 = r.rows_for("I4_two_then_M")[0].eval("points_least").predicted
    p2 = r.rows_for("I4_M_then_two")[0].eval("points_least").predicted
    assert p1 != p2


def test_markdown_report():
    md = report(CORPUS["G21"], 6).to_markdown()
    assert md.startswith("recognized models: family=III, ell=2, M=1")
    assert "| half_I2 |" in md
