import pytest

from markov_dyck.builders import FamilyIIParams, build_family_II
from markov_dyck.invariants import TruncationMismatch, Verdict, compare, fingerprint

from conftest import CORPUS


def relabeled(g):
    names = {v: f"w{i}" for i, v in enumerate(reversed(g.vertices))}
    return g.relabel(names, {e: f"x_{e}" for e in g.edge_ids}, order=sorted(names.values()))


def test_dyck_fingerprint():
    f = fingerprint(CORPUS["D2"], 6)
    assert f.nu == 2
    assert f.lambda_spectrum == (1, 1)
    assert f.m_ell_sizes == ((1, 2),)
    assert f.neutral_fixed_vector == (0, 4, 0, 24, 0, 160)
    assert f.xi_profile == ((1, 0, 2, 2, 10, 11),) * 2


def test_fibonacci_spectrum():
    f = fingerprint(CORPUS["Fib"], 6)
    assert f.lambda_spectrum == (1, 2)
    assert f.m_ell_sizes == ((1, 1), (2, 1))


def test_unreached_multiplier_sorts_last():
    f = fingerprint(CORPUS["G32"], 2)
    assert f.lambda_spectrum == (None,) * 4


@pytest.mark.parametrize("name", ["G21", "G32", "Fib", "II_R1_Q2"])
def test_relabel_invariance(name):
    g = CORPUS[name]
    assert fingerprint(g, 6) == fingerprint(relabeled(g), 6)


def test_compare_nu():
    v = compare(fingerprint(CORPUS["D2"], 4), fingerprint(CORPUS["D3"], 4))
    assert v.distinguished and v.field == "nu" and v.values == (2, 3)
    assert str(v) == "Distinguished(nu: 2 vs 3)"


def test_compare_spectrum():
    v = compare(fingerprint(CORPUS["D2"], 4), fingerprint(CORPUS["Fib"], 4))
    assert v.field == "lambda_spectrum"


def test_compare_self():
    f = fingerprint(CORPUS["G22"], 5)
    v = compare(f, f)
    assert not v.distinguished and str(v) == "InvariantsAgree"
    assert v.to_json()["note"] == Verdict.NOTE


def test_isomorphic_models_agree():
    a = build_family_II(FamilyIIParams(0, {1: 2}))
    assert not compare(fingerprint(a, 6), fingerprint(CORPUS["G21"], 6)).distinguished


def test_truncation_mismatch():
    with pytest.raises(TruncationMismatch):
        compare(fingerprint(CORPUS["D2"], 4), fingerprint(CORPUS["D2"], 5))


def test_json_is_stable():
    f = fingerprint(CORPUS["G21"], 6)
    assert f.to_json() == fingerprint(relabeled(CORPUS["G21"]), 6).to_json()
