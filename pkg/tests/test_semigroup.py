from collections import defaultdict

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markov_dyck.graph_core import contracting_forest
from markov_dyck.semigroup import (
    IDENTITY,
    NF,
    ZERO,
    Letter,
    UnknownEdgeError,
    alphabet,
    classify_powers,
    format_element,
    invert,
    lambda_image,
    multiply,
    parse_word,
    power,
    reduce,
    serialize,
    step,
)

from conftest import CORPUS, SMALL

W = parse_word


def elements_up_to(g, n):
    """Every nonzero element reachable by a word of length 1..n."""
    out = set()
    layer = {IDENTITY}
    for _ in range(n):
        nxt = set()
        for x in layer:
            for a in alphabet(g):
                y = step(g, x, a)
                if y is not ZERO:
                    nxt.add(y)
        out |= nxt
        layer = nxt
    return out


@st.composite
def graph_and_words(draw, count=1, max_len=8):
    name = draw(st.sampled_from(sorted(CORPUS)))
    g = CORPUS[name]
    letters = alphabet(g)
    words = [tuple(draw(st.lists(st.sampled_from(letters), max_size=max_len))) for _ in range(count)]
    return g, words


@st.composite
def graph_and_admissible_word(draw, max_len=10):
    """Admissible words drawn letter by letter among the nonzero continuations."""
    name = draw(st.sampled_from(sorted(CORPUS)))
    g = CORPUS[name]
    n = draw(st.integers(1, max_len))
    w, x = (), IDENTITY
    for _ in range(n):
        options = [a for a in alphabet(g) if step(g, x, a) is not ZERO]
        a = draw(st.sampled_from(options))
        w, x = w + (a,), step(g, x, a)
    return g, w


# -- frozen examples -------------------------------------------------------------------------


def test_cancellation(g21):
    assert reduce(W("f0(1)- f0(1)+"), g21) == NF((), "V(0)", ())


def test_mismatch_is_zero(g21):
    assert reduce(W("f0(1)- f1(1)+"), g21) is ZERO


def test_plus_then_minus_is_normal(d2):
    assert reduce(W("a+ b-"), d2) == NF(("a",), "V0", ("b",))
    assert format_element(reduce(W("a+ b-"), d2)) == "[a | V0 | b]"


def test_non_composable_minus_letters(g21):
    assert reduce(W("e0(1)- e0(1)-"), g21) is ZERO


def test_empty_word_is_identity(d2):
    x = reduce((), d2)
    assert x is IDENTITY
    assert multiply(d2, x, NF((), "V0", ("a",))) == NF((), "V0", ("a",))


def test_unknown_edge(d2):
    with pytest.raises(UnknownEdgeError):
        reduce(W("zz-"), d2)


def test_parse_rejects_bad_token():
    with pytest.raises(ValueError):
        parse_word("a- b")


def test_vertex_idempotents(g21):
    one = NF((), "V(0)", ())
    assert multiply(g21, one, one) == one
    assert multiply(g21, one, NF((), "V0(1)", ())) is ZERO


def test_full_cancellation(d2):
    assert multiply(d2, NF((), "V0", ("b",)), NF(("b",), "V0", ())) == NF((), "V0", ())


def test_invert_examples():
    assert invert(W("a-")) == W("a+")
    assert invert(W("f- e0-")) == W("e0+ f+")


def test_classify_examples(d2, g21):
    assert classify_powers(d2, NF((), "V0", ())).kind == "idempotent"
    pc = classify_powers(d2, reduce(W("a-"), d2))
    assert pc.kind == "down_excess" and pc.cycle == ("a",)
    for k in range(1, 11):
        assert power(d2, reduce(W("a-"), d2), k) is not ZERO
    assert classify_powers(g21, reduce(W("f0(1)-"), g21)).kind == "nilpotent"
    assert reduce(W("f0(1)- f0(1)-"), g21) is ZERO


def test_lambda_examples(d2, g21):
    cd = contracting_forest(g21)
    assert lambda_image(W("f0(1)- e0(1)-"), cd) == NF((), "V(0)", ("e0(1)",))
    assert lambda_image(W("f0(1)- f0(1)+"), cd) == NF((), "V(0)", ())
    cd2 = contracting_forest(d2)
    for w in [W("a- b+"), W("a+ b- b-"), W("b- b+ a-")]:
        assert lambda_image(w, cd2) == reduce(w, d2)


def test_serialize_round_trip(named_graph):
    _, g, _ = named_graph
    for x in elements_up_to(g, 4):
        if x.up or x.down:
            assert reduce(serialize(x), g) == x
        else:
            assert serialize(x) == ()


# -- exhaustive checks on short words ----------------------------------------------------


@pytest.mark.parametrize("name", SMALL)
def test_idempotent_iff_classified(name):
    g = CORPUS[name]
    for x in elements_up_to(g, 8):
        assert (multiply(g, x, x) == x) == (classify_powers(g, x).kind == "idempotent")


@pytest.mark.parametrize("name", SMALL)
def test_power_stability_oracle(name):
    g = CORPUS[name]
    for x in elements_up_to(g, 8):
        bound = 2 * (len(x.up) + len(x.down)) + 4
        all_nonzero = all(power(g, x, k) is not ZERO for k in range(1, bound + 1))
        assert classify_powers(g, x).stable == all_nonzero
        if not classify_powers(g, x).stable:
            assert power(g, x, 2) is ZERO or power(g, x, 3) is ZERO


@pytest.mark.parametrize("name", SMALL)
def test_lambda_homomorphism_on_admissible_words(name):
    g = CORPUS[name]
    cd = contracting_forest(g)
    layer = {(): IDENTITY}
    for _ in range(5):
        nxt = {}
        for w, x in layer.items():
            for a in alphabet(g):
                y = step(g, x, a)
                if y is not ZERO:
                    nxt[w + (a,)] = y
        layer = nxt
        for w in layer:
            for cut in range(1, len(w)):
                whole = lambda_image(w, cd)
                assert whole is not ZERO
                assert multiply(cd.contracted, lambda_image(w[:cut], cd), lambda_image(w[cut:], cd)) == whole


def test_element_counts_by_length(d2):
    # NF(up, V0, down) with |up| + |down| = k: (k + 1) * 2**k of them
    counts = defaultdict(int)
    for x in elements_up_to(d2, 6):
        counts[len(x.up) + len(x.down)] += 1
    assert dict(counts) == {k: (k + 1) * 2 ** k for k in range(0, 7)}


# -- properties --------------------------------------------------------------------------


@given(graph_and_words(count=2))
@settings(max_examples=300, deadline=None)
def test_reduce_is_homomorphism(data):
    g, (w1, w2) = data
    assert reduce(w1 + w2, g) == multiply(g, reduce(w1, g), reduce(w2, g))


@given(graph_and_words(count=3, max_len=6))
@settings(max_examples=300, deadline=None)
def test_associativity(data):
    g, (a, b, c) = data
    x, y, z = (reduce(w, g) for w in (a, b, c))
    assert multiply(g, multiply(g, x, y), z) == multiply(g, x, multiply(g, y, z))


@given(graph_and_admissible_word())
@settings(max_examples=300, deadline=None)
def test_inverse_law(data):
    g, w = data
    assert reduce(w + invert(w) + w, g) == reduce(w, g)
    e = reduce(w + invert(w), g)
    assert multiply(g, e, e) == e


@given(graph_and_admissible_word())
@settings(max_examples=300, deadline=None)
def test_subwords_of_admissible_words(data):
    g, w = data
    for i in range(len(w)):
        for j in range(i + 1, len(w) + 1):
            assert reduce(w[i:j], g) is not ZERO


@given(graph_and_words(count=1))
@settings(max_examples=300, deadline=None)
def test_zero_absorbs(data):
    g, (w,) = data
    x = reduce(w, g)
    assert multiply(g, ZERO, x) is ZERO and multiply(g, x, ZERO) is ZERO


def test_letter_inverse():
    assert Letter("a", "-").inverse() == Letter("a", "+")
