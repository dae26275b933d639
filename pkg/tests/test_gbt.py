from dataclasses import replace

import pytest

from ssforge.gbt import (
    DifferentialWitness,
    Element,
    GBTWitness,
    WitnessError,
    apply_connecting,
    apply_gbt_case3,
    apply_naturality,
    check_witness,
    closed_form_matches,
    derive_families,
    differential,
    dump_witness,
    fiber_sequence,
    generalize,
    identity_map,
    load_witness,
    representative,
    ro_derived_tate_rules,
    worked_example,
)
from ssforge.presets import tate_rules


@pytest.fixture(scope="module")
def example():
    return worked_example()


def test_worked_example_classes(example):
    w, fs = example
    assert (w.r, w.r_prime) == (3, 7)
    assert w.z == Element((7, -3), (-1,))
    assert w.z_prime == Element((3, 4), (-1,))
    assert w.z.render() == "u^7*alpha^-3*u1^-1"
    out = apply_gbt_case3(fs, w)
    assert out.where == "tate-en-mod-ik(2)" and out.r == 7


def test_stored_witness_matches_regenerated(example):
    w, fs = example
    header, stored = load_witness()
    assert header == {"n": 2, "k": 1, "l": 2}
    assert stored == w
    assert GBTWitness.from_json(w.to_json()) == w
    assert '"r_prime": 7' in dump_witness(w, 2, 1, 2)


@pytest.mark.parametrize(
    "field, value",
    [
        ("z_prime", Element((1, 5), (-1,))),
        ("x_prime", Element((3, 7), (0,))),
        ("y1", Element((5, -3), (-1,))),
        ("z", Element((7, -3), (-2,))),
    ],
)
def test_tampered_witness_is_rejected(example, field, value):
    w, fs = example
    with pytest.raises(WitnessError):
        apply_gbt_case3(fs, replace(w, **{field: value}))


def test_case3_needs_shorter_first_differential(example):
    w, fs = example
    with pytest.raises(WitnessError):
        apply_gbt_case3(fs, replace(w, r=7))


def test_connecting_base_case():
    rules = ro_derived_tate_rules(2)
    fs = fiber_sequence(2, 0, rules, [], [])
    (rule,) = [r for r in rules if r.page == 3]
    x = representative(fs.X, rule, 1)
    known = DifferentialWitness("tate-en", 3, x, differential(fs.X, x, 3))
    out = apply_connecting(fs, known)
    assert out.source == Element((x.exps[0] + 1, 0), x.coeffs)
    assert out.r == 3 and out.where == "tate-en-mod-ik(1)"
    with pytest.raises(WitnessError):
        apply_connecting(fs, replace(known, target=Element((0, 4), (0,))))


def test_naturality_along_identity():
    rules = ro_derived_tate_rules(2)
    fs = fiber_sequence(2, 0, rules, [], [])
    (rule,) = [r for r in rules if r.page == 3]
    x = representative(fs.X, rule, 1)
    known = DifferentialWitness("tate-en", 3, x, differential(fs.X, x, 3))
    assert apply_naturality(identity_map(fs.X), known) == known
    check_witness(fs.X, known)
    with pytest.raises(WitnessError):
        check_witness(fs.X, replace(known, r=7))


def test_generalize_rejects_non_monomial_change():
    w = DifferentialWitness("x", 3, Element((1, 0), (0,)), Element((-1, 3), (2,)))
    with pytest.raises(WitnessError):
        generalize(w, 2)
    with pytest.raises(WitnessError):
        generalize(replace(w, r=5), 2)


def test_derivation_at_height_2_reproduces_closed_forms():
    derivations = derive_families(2)
    assert all(closed_form_matches(2, derivations).values())
    assert sorted(r.canonical() for r in derivations[2].z_rules) == sorted(
        r.canonical() for r in tate_rules(2, 2)
    )
    kinds = [w.provenance[0] for w in derivations[1].witnesses]
    assert kinds == ["connecting", "connecting"]
    assert len(derivations[2].gbt) == 1
