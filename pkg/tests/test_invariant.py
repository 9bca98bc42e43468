from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knotoidal.algebra import DElement, _exp_ab_raw, antipode
from knotoidal.diagram import (
    Crossing,
    RotDecomp,
    Rotation,
    TRIVIAL_DECOMP,
    fixtures,
    insert_r2_pair,
    insert_rotation_pair,
    parse_decomposition,
    reverse_decomposition,
)
from knotoidal.errors import CapsMismatch, DegreeOutOfRange
from knotoidal.invariant import compare, epsilon_coefficient, evaluate_Z
from knotoidal.series import Caps

GOLDEN = Path(__file__).parent / "golden"

CAPS = Caps(1, 3)


@pytest.fixture(scope="module")
def fixture_values():
    fx = fixtures()
    return {name: evaluate_Z(decomp, CAPS) for name, (_, decomp) in fx.items()}


def test_trivial_is_unit():
    value = evaluate_Z(TRIVIAL_DECOMP, CAPS)
    assert value.element == DElement.unit(CAPS)


def test_cancelling_rotations_give_unit():
    d = parse_decomposition("labels 2; C+ 1; C- 2")
    assert evaluate_Z(d, CAPS).element == DElement.unit(CAPS)


def test_single_rotation_matches_rotation_element():
    from knotoidal.algebra import rotation_element

    d = parse_decomposition("labels 1; C- 1")
    assert evaluate_Z(d, CAPS).element == rotation_element(-1, CAPS)


def test_rotation_pair_insertion_invariance(fixture_values):
    fx = fixtures()
    for name, (_, decomp) in fx.items():
        modified = insert_rotation_pair(decomp, 1)
        assert evaluate_Z(modified, CAPS).element == fixture_values[name].element, name


def test_r2_insertion_invariance(fixture_values):
    fx = fixtures()
    for name, (_, decomp) in fx.items():
        for sign in (1, -1):
            modified = insert_r2_pair(decomp, 1, decomp.labels, sign)
            assert evaluate_Z(modified, CAPS).element == fixture_values[name].element, name


def test_reversal_is_antipode(fixture_values):
    fx = fixtures()
    for name, (_, decomp) in fx.items():
        reversed_value = evaluate_Z(reverse_decomposition(decomp), CAPS)
        assert reversed_value.element == antipode(fixture_values[name].element), name


def test_double_reversal_fixed(fixture_values):
    fx = fixtures()
    for name, (_, decomp) in fx.items():
        twice = reverse_decomposition(reverse_decomposition(decomp))
        assert evaluate_Z(twice, CAPS).element == fixture_values[name].element, name


def test_antipode_squared_fixes_values(fixture_values):
    for name, value in fixture_values.items():
        assert antipode(antipode(value.element)) == value.element, name


def test_determinism(fixture_values):
    again = evaluate_Z(fixtures()["5_561"][1], CAPS)
    assert again.element.render() == fixture_values["5_561"].element.render()
    assert again.fingerprint == fixture_values["5_561"].fingerprint


def test_compare_self_equal(fixture_values):
    assert compare(fixture_values["5_9"], fixture_values["5_9"]).equal


def test_compare_caps_mismatch(fixture_values):
    other = evaluate_Z(TRIVIAL_DECOMP, Caps(1, 2))
    with pytest.raises(CapsMismatch):
        compare(fixture_values["5_9"], other)


def test_compare_witness_at_eps_one(fixture_values):
    verdict = compare(fixture_values["5_9"], fixture_values["5_561"])
    assert not verdict.equal
    mon, eps_deg, hbar_deg = verdict.witness
    assert eps_deg == 1
    assert "Differ" in verdict.describe()


def test_undistinguished_pair_equal(fixture_values):
    assert compare(fixture_values["5_7"], fixture_values["5_421"]).equal


def test_epsilon_coefficient_trivial():
    value = evaluate_Z(TRIVIAL_DECOMP, CAPS)
    assert epsilon_coefficient(value, 0) == DElement.unit(CAPS)
    assert epsilon_coefficient(value, 1).is_zero()
    with pytest.raises(DegreeOutOfRange):
        epsilon_coefficient(value, 2)


def test_leading_normalization_of_5_7(fixture_values):
    # the generator-free part of the eps^0 coefficient is exp(-hbar*b/2):
    # the prefactor normalization of the five-crossing examples
    eps0 = epsilon_coefficient(fixture_values["5_7"], 0)
    b_only = {
        mon: sd for mon, sd in eps0.raw().items() if mon[0] == mon[2] == mon[3] == 0
    }
    expected = _exp_ab_raw(Fraction(0), Fraction(-1, 2), CAPS.eps_order, CAPS.hbar_order)
    assert b_only == expected
    assert eps0.raw()[(0, 0, 0, 0)][(0, 0)] == 1


def test_golden_rendering_of_5_7(fixture_values):
    golden = (GOLDEN / "z_5_7_caps_1_3.txt").read_text()
    assert fixture_values["5_7"].element.render() + "\n" == golden


@st.composite
def small_decomposition_st(draw):
    slots = draw(st.integers(1, 8))
    order = draw(st.permutations(list(range(1, slots + 1))))
    tokens = []
    idx = 0
    while idx < slots:
        if slots - idx >= 2 and draw(st.booleans()):
            tokens.append(
                Crossing(draw(st.sampled_from([1, -1])), order[idx], order[idx + 1])
            )
            idx += 2
        else:
            tokens.append(Rotation(draw(st.sampled_from([1, -1])), order[idx]))
            idx += 1
    return RotDecomp(slots, tokens)


@settings(max_examples=15, deadline=None)
@given(small_decomposition_st())
def test_reversal_law_on_random_decompositions(d):
    caps = Caps(1, 2)
    assert evaluate_Z(reverse_decomposition(d), caps).element == antipode(
        evaluate_Z(d, caps).element
    )


@settings(max_examples=15, deadline=None)
@given(small_decomposition_st())
def test_antipode_squared_fixes_random_values(d):
    caps = Caps(1, 2)
    value = evaluate_Z(d, caps).element
    assert antipode(antipode(value)) == value


def test_invariant_json_layout(fixture_values):
    data = fixture_values["5_9"].to_json()
    assert data["caps"] == {"eps_order": 1, "hbar_order": 3}
    assert {"monomial", "eps", "hbar", "coeff"} <= set(data["terms"][0])
    assert data["terms"] == sorted(
        data["terms"],
        key=lambda t: (sum(t["monomial"]), t["monomial"], t["eps"], t["hbar"]),
    )
