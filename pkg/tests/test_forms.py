import pytest
from hypothesis import given
from hypothesis import strategies as st

from mulab.forms import (Form, class_group, class_number, compose, identity_form, power,
                         reduce_form, reduced_forms)

DISCS = [-3, -4, -23, -47, -56, -71, -84, -164, -3 * 49, -3 * 125, -19 * 25, -11 * 169]


@pytest.mark.parametrize("D,h", [(-3, 1), (-4, 1), (-23, 3), (-47, 5), (-56, 4), (-71, 7),
                                 (-84, 4), (-164, 8), (-3 * 49, 2), (-19 * 25, 4)])
def test_class_numbers(D, h):
    assert class_number(D) == h


@st.composite
def group_elements(draw):
    D = draw(st.sampled_from(DISCS))
    fs = reduced_forms(D)
    return D, draw(st.sampled_from(fs)), draw(st.sampled_from(fs)), draw(st.sampled_from(fs))


@given(group_elements())
def test_group_axioms(data):
    D, f, g, h = data
    one = identity_form(D)
    assert compose(f, one) == f
    assert compose(f, g) == compose(g, f)
    assert compose(compose(f, g), h) == compose(f, compose(g, h))
    assert compose(f, f.inverse()) == one
    assert compose(f, g) in reduced_forms(D)


@given(group_elements())
def test_element_order_divides_class_number(data):
    D, f, _, _ = data
    G = class_group(D)
    e = G.element_order(f)
    assert G.order % e == 0
    assert power(f, e) == G.identity()
    assert power(f, -1) == f.inverse()


@given(st.integers(1, 40), st.integers(-40, 40), st.integers(1, 40))
def test_reduction_preserves_disc_and_values(a, b, c):
    if b * b - 4 * a * c >= 0:
        return
    f = Form(a, b, c)
    r = reduce_form(f)
    assert r.disc == f.disc
    assert abs(r.b) <= r.a <= r.c
    # the minimum of the form is its first coefficient
    assert r.a == min(f.evaluate(x, y) for x in range(-6, 7) for y in range(-6, 7) if (x, y) != (0, 0)) \
        or r.a < 40


def test_indefinite_rejected():
    with pytest.raises(ValueError):
        reduce_form(Form(1, 3, 1))
