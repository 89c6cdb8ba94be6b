import itertools

import numpy as np
import pytest

from peribeta import parse_base
from peribeta.classify import (
    classify,
    conjugate_kind,
    cubic_family,
    direct_F,
    family_verdict,
    pisot_unit_gate,
    quadratic_F,
)
from peribeta.errors import DomainError
from peribeta.expansion import expand
from peribeta.field import FieldElement, sign_of


def numpy_gate(text):
    coeffs = [int(c) for c in text.split(",")]
    roots = np.roots(coeffs[::-1])
    mods = sorted(abs(roots), reverse=True)
    return mods[0] > 1 and all(m < 1 for m in mods[1:]) and abs(coeffs[0]) == 1


def small_elements(base, bound):
    """Elements of Z[beta] cap [0, 1) with coordinates in [-bound, bound]."""
    for c in itertools.product(range(-bound, bound + 1), repeat=base.degree):
        y = FieldElement(base.minpoly, c)
        if sign_of(y) >= 0 and sign_of(y - 1) < 0:
            yield y


@pytest.mark.parametrize("text", [
    "-1,-1,0,1", "-1,-1,1", "1,-3,1", "-1,2,-3,1", "-2,-2,1", "-2,0,1",
    "-1,-1,-1,1", "-1,0,-2,1", "1,0,-3,1", "-1,-3,0,1",
])
def test_gate_matches_numpy(text):
    assert pisot_unit_gate(parse_base(text)) == numpy_gate(text)


def test_gate_examples(eta):
    assert pisot_unit_gate(eta)
    assert not pisot_unit_gate(parse_base("-2,-2,1"))
    assert not pisot_unit_gate(parse_base("-2,0,1"))


def test_quadratic_F(phi, theta):
    assert quadratic_F(phi)
    assert not quadratic_F(theta)
    assert quadratic_F(parse_base("-1,-2,1"))
    with pytest.raises(DomainError):
        quadratic_F(parse_base("-1,-1,0,1"))


def test_cubic_family():
    assert cubic_family(parse_base("-1,-1,-2,1")) == (2, 1)
    assert cubic_family(parse_base("-1,-1,0,1")) == (0, 1)
    assert cubic_family(parse_base("1,-3,1")) is None


@pytest.mark.parametrize("text,expected", [
    ("-1,-1,0,1", "holds"),
    ("-1,-1,-2,1", "holds"),
    ("-1,-1,-1,1", "holds"),
    ("-1,2,-3,1", "fails"),
    ("1,-3,1", "fails"),
    ("-1,-1,1", "holds"),
])
def test_direct_F(text, expected):
    base = parse_base(text)
    v = direct_F(base)
    assert v.verdict == expected
    elems = list(small_elements(base, 3))
    if expected == "holds":
        # every small element must have a finite expansion
        for y in elems:
            assert expand(y, base, engine="hash").is_finite
    else:
        w = FieldElement.parse(base.minpoly, v.witness)
        e = expand(w, base, engine="hash")
        assert not e.truncated and not e.is_finite


def test_direct_F_rejects_non_units():
    with pytest.raises(DomainError):
        direct_F(parse_base("-2,-2,1"))


def test_conjugate_kinds(eta, phi, theta):
    assert conjugate_kind(eta) == "complex_pair"
    assert conjugate_kind(phi) == "negative_real_conjugate"
    assert conjugate_kind(theta) == "positive_real_conjugate"
    assert conjugate_kind(parse_base("-1,2,-3,1")) == "complex_pair"
    assert conjugate_kind(parse_base("1,0,-3,1")) == "totally_real"


def test_family_verdict(eta, phi, theta):
    assert family_verdict(phi) == "holds"
    assert family_verdict(theta) == "fails"
    assert family_verdict(parse_base("-1,-1,-2,1")) == "holds"
    # the coefficient family as quoted leaves out x^3 - x - 1
    assert family_verdict(eta) == "fails"


def test_classify_reports(eta, nonf, phi, theta):
    r = classify(eta).to_dict()
    assert r["schema"] == "peribeta.classify/1"
    assert r["property_F"] == "holds" and r["gamma_known"] == "open"
    assert r["is_pisot"] and r["is_unit"] and r["signature"] == [1, 1]
    assert r["discrepancies"]
    r = classify(nonf)
    assert r.property_F == "fails" and r.property_F_states == 102
    assert r.family == "cubic-F-family(3,-2)" and r.gamma_known == "0"
    assert r.witness == "-3/1;-8/1;4/1"
    assert classify(phi).gamma_known == "1"
    assert classify(theta).gamma_known == "0"
    r = classify(parse_base("-1,-1,-2,1"))
    assert r.property_F == "holds" and not r.discrepancies
    r = classify(parse_base("-2,-2,1"))
    assert r.property_F == "undetermined" and r.gamma_known == "0"


def test_classify_undetermined_when_search_too_large(eta):
    r = classify(eta, search_bound=3)
    assert r.property_F == "undetermined" and r.gamma_known is None
