"""
Tests for the polynomial model on C^n and the hat identities.
"""

import json
import random

import pytest

from linfty.polynomial_model import (
    COMMUTATOR_SIGNS,
    bracket_hat,
    build_polynomial_model,
    check_hat_commutators,
    commutator_expansion,
    contraction,
    commutator_coefficients,
    merge_words,
)


class TestWedgeAlgebra:
    """Test cases for wedge words and contraction."""

    def test_merge_words(self):
        """Test dz̄∧dz = -dz∧dz̄ and repeated generators vanish."""
        assert merge_words((1,), (0,)) == (-1, (0, 1))
        assert merge_words((0,), (0, 1)) is None

    def test_contraction_signs(self):
        """Test α⌟(v_1∧v_2) picks up (-1)^(i-1)."""
        assert contraction({0: 1}, (0, 1)) == {(1,): 1}
        assert contraction({1: 1}, (0, 1)) == {(0,): -1}
        assert contraction({}, (0, 1)) == {}

    def test_contraction_is_a_derivation(self):
        """Test α⌟(u∧v) = (α⌟u)∧v + (-1)^{|u|} u∧(α⌟v) on random disjoint words."""
        rng = random.Random(41)

        def wedge(left, right):
            total = {}
            for lw, lc in left.items():
                for rw, rc in right.items():
                    merged = merge_words(lw, rw)
                    if merged is not None:
                        s, word = merged
                        total[word] = total.get(word, 0) + s * lc * rc
            return {w: c for w, c in total.items() if c}

        for _ in range(50):
            generators = list(range(6))
            rng.shuffle(generators)
            cut = rng.randint(0, 6)
            rest = rng.randint(cut, 6)
            u, v = tuple(sorted(generators[:cut])), tuple(sorted(generators[cut:rest]))
            alpha = {g: rng.randint(-3, 3) for g in range(6)}
            s, uv = merge_words(u, v)
            lhs = {w: s * c for w, c in contraction(alpha, uv).items()}
            first = wedge(contraction(alpha, u), {v: 1})
            second = wedge({u: 1}, contraction(alpha, v))
            rhs = {}
            for w, c in list(first.items()) + [(w, (-1) ** len(u) * c) for w, c in second.items()]:
                rhs[w] = rhs.get(w, 0) + c
            assert lhs == {w: c for w, c in rhs.items() if c}


    def test_del_and_delbar(self):
        """Test ∂ and ∂̄ of the function z z̄ on C."""
        model = build_polynomial_model(1, 2)
        z, zb = model.z[0], model.zb[0]
        f = {(): z * zb}
        assert model.del_(f) == {(0,): zb}
        assert model.delbar(f) == {(1,): z}
        assert model.add(model.del_(model.delbar(f)), model.delbar(model.del_(f))) == {}

    def test_bad_dimensions(self):
        """Test n >= 1 and D >= 0 are required."""
        with pytest.raises(ValueError):
            build_polynomial_model(0, 1)


class TestFragment:
    """Test cases for the finite fragment of forms."""

    def test_relations(self):
        """Test ∂² = ∂̄² = ∂∂̄ + ∂̄∂ = 0 on the fragment."""
        fragment = build_polynomial_model(1, 1).fragment()
        assert fragment.space.dim == 12
        assert fragment.del_.compose(fragment.del_).is_zero()
        assert fragment.delbar.compose(fragment.delbar).is_zero()
        assert (fragment.del_.compose(fragment.delbar) + fragment.delbar.compose(fragment.del_)).is_zero()


class TestHatIdentities:
    """Test cases for check_hat_commutators and the fixed signs."""

    def test_signs_match_golden(self, fixtures_dir):
        """Test the frozen signs agree with the golden file."""
        golden = json.loads((fixtures_dir / "commutator_signs.json").read_text(encoding="utf-8"))
        assert COMMUTATOR_SIGNS == golden

    def test_coefficients(self):
        """Test the four coefficients for even and odd hats."""
        assert commutator_coefficients(0, 0) == {"a_del_b": 1, "b_del_a": 1, "del_a_b": -1, "b_a_del": -1}
        assert commutator_coefficients(-1, -1) == {"a_del_b": -1, "b_del_a": 1, "del_a_b": -1, "b_a_del": 1}

    def test_identities_hold(self):
        """Test every identity on C and on C^2 on the default forms."""
        for n, D in ((1, 1), (2, 0)):
            report = check_hat_commutators(build_polynomial_model(n, D))
            assert report.passed, report.issues

    def test_flipped_sign_detected(self, monkeypatch):
        """Test a wrong sign on b̂â∂ is caught once ∂ of the test form is nonzero."""
        model = build_polynomial_model(2, 0)
        forms = [{(0,): model.z[1]}]
        assert check_hat_commutators(model, forms=forms).passed
        monkeypatch.setitem(COMMUTATOR_SIGNS, "b_a_del", {"sign": 1, "exponent": ["ab", "a", "b"]})
        report = check_hat_commutators(model, forms=forms)
        assert report.issues == ["commutator signs"]

    def test_bracket_of_translation_and_dilation(self):
        """Test Q(∂/∂z, z∂/∂z)^ = -[[∂, â], b̂] = -ι on dz over C."""
        model = build_polynomial_model(1, 1)
        z = model.z[0]
        a = {0: {(): model.ring.one}}
        b = {0: {(): z}}
        dz = {(0,): model.ring.one}
        assert model.Q(a, b) == {0: {(): -model.ring.one}}
        assert model.hat(model.Q(a, b))(dz) == {(): -model.ring.one}
        assert bracket_hat(model, a, b)(dz) == {(): -model.ring.one}
        assert commutator_expansion(model, a, b)(dz) == {(): -model.ring.one}
        generators = [("1 1 d/dz1", a), ("z1 1 d/dz1", b)]
        assert check_hat_commutators(model, generators=generators).passed

    def test_test_forms_reach_past_dz(self):
        """Test the default forms carry z̄ coefficients and mixed bidegrees."""
        model = build_polynomial_model(2, 0)
        forms = model.test_forms()
        assert {(0,): model.ring.one} in forms
        words = {w for form in forms for w in form}
        assert (0, 1) in words and (0, 2) in words and (0, 1, 2, 3) in words
        assert any(model.del_(form) and model.delbar(form) for form in forms)
        a = {0: {(2,): model.ring.one}}
        b = {1: {(3,): model.ring.one}}
        assert any(model.hat(a)(model.hat(b)(form)) for form in forms)

    def test_identities_hold_on_monomial_forms(self):
        """Test every identity on the basis forms of the fragment."""
        for n, D in ((1, 1), (2, 0)):
            model = build_polynomial_model(n, D)
            forms = model.monomial_forms(1)
            assert len(forms) == len(model.monomials(1)) * 4 ** n
            report = check_hat_commutators(model, forms=forms)
            assert report.passed, report.issues

    def test_flipped_sign_detected_on_default_forms(self, monkeypatch):
        """Test a wrong sign on ∂âb̂ is caught without hand-picked forms."""
        model = build_polynomial_model(2, 0)
        monkeypatch.setitem(COMMUTATOR_SIGNS, "del_a_b", {"sign": 1, "exponent": []})
        report = check_hat_commutators(model)
        assert report.issues == ["commutator signs"]


if __name__ == "__main__":
    pytest.main([__file__])
