"""
Tests for DGLAs, the codifferential and L-infinity checks.
"""

import random

import pytest

from linfty import fixtures
from linfty.dgla import (
    DGLA,
    build_delta,
    check_coderivation,
    check_delta_squared,
    check_F_delta_zero,
    check_morphism_commutes,
    dgla_morphism_report,
    formality_projection,
    induced_coalgebra_map,
    linfty_from_dgla_morphism,
    random_dgla,
    search_jacobi_violation,
    validate_dgla,
)
from linfty.exceptions import DegreeError, NotAProjectionError, PreconditionError
from linfty.graded import GradedLinearMap, GradedSpace, Vector
from linfty.scalars import ONE, scalar


class TestValidateDGLA:
    """Test cases for validate_dgla."""

    def test_fix_dgla_1_is_valid(self, dgla_1):
        """Test the one-bracket fixture passes every axiom."""
        report = validate_dgla(dgla_1)
        assert report.is_valid
        assert [c.name for c in report.checks] == ["d_squared", "antisymmetry", "jacobi", "leibniz"]

    def test_leibniz_broken(self):
        """Test d[u, x] = y while [du, x] + [u, dx] = 0."""
        report = validate_dgla(fixtures.leibniz_broken())
        assert report.issues == ["leibniz"]
        assert report.check("leibniz").witness == ["u", "x"]

    def test_jacobi_violating(self):
        """Test the three-generator bracket breaks Jacobi only."""
        report = validate_dgla(fixtures.jacobi_violating())
        assert report.issues == ["jacobi"]

    def test_bracket_degree_enforced(self):
        """Test [x, x] must land in degree 2."""
        space = GradedSpace.from_degrees({"x": 1, "y": 2})
        with pytest.raises(DegreeError):
            DGLA(space, bracket={("x", "x"): {"x": ONE}})

    def test_antisymmetry_from_one_ordering(self, dgla_1):
        """Test [b, a] is derived from [a, b] with the graded sign."""
        g = fixtures.kah_2_dgla()
        assert g.bracket_basis("a2", "a1") == Vector(g.space, {"a1": -ONE, "a2": ONE})
        assert g.bracket_basis("b", "a1") == Vector(g.space, {"b": ONE})


class TestCodifferential:
    """Test cases for δ on C(K)."""

    def test_delta_squared_and_coderivation(self, dgla_1, massey):
        """Test δ∘δ = 0 and the coderivation rule for valid DGLAs."""
        for g in (dgla_1, massey, fixtures.kah_2_dgla()):
            delta = build_delta(g, 4)
            assert check_delta_squared(delta).passed, g.name
            assert check_coderivation(delta).passed, g.name

    def test_random_dglas(self):
        """Test δ∘δ = 0 and the coderivation rule on twenty seeded random DGLAs."""
        for seed in range(20):
            g = random_dgla(random.Random(100 + seed))
            delta = build_delta(g, 3)
            assert check_delta_squared(delta).passed, seed
            assert check_coderivation(delta).passed, seed

    def test_jacobi_failure_shows_in_delta_squared(self):
        """Test the Jacobi violation is caught as δ∘δ != 0 on e1⊙e2⊙e3."""
        report = check_delta_squared(build_delta(fixtures.jacobi_violating(), 3))
        assert not report.passed
        assert report.check("delta_squared").witness == ["e1", "e2", "e3"]
        assert report.data["residual"]

    def test_quadratic_part(self, dgla_1):
        """Test δ(x⊙x) = Q(x⊙x) = y since x has degree 0 in L."""
        delta = build_delta(dgla_1, 2)
        image = delta.apply_word(("x", "x"))
        assert image.to_dict() == {("y",): ONE}

    def test_cutoff_enforced(self, dgla_1):
        """Test words longer than the cutoff are refused."""
        with pytest.raises(DegreeError):
            build_delta(dgla_1, 2).apply_word(("x", "x", "x"))


class TestFDeltaZero:
    """Test cases for check_F_delta_zero."""

    def test_pipeline_family_passes(self, dgla_1):
        """Test F_1(x) = e, F_2(x⊙x) = e is an L-infinity morphism to a line."""
        report = check_F_delta_zero(fixtures.pipeline_family(dgla_1), build_delta(dgla_1, 3))
        assert report.passed
        assert report.check("F1_d_zero").passed
        assert all(entry["zero"] for entry in report.data["per_word"])

    def test_projection_family_fails(self, dgla_1):
        """Test the cohomology projection does not kill δ(x⊙x) = y."""
        report = check_F_delta_zero(fixtures.projection_family(dgla_1), build_delta(dgla_1, 3))
        assert not report.passed
        assert report.check("F_delta_zero").witness == ["x", "x"]
        assert report.data["value"] == {"[y]": "1"}


class TestMorphisms:
    """Test cases for DGLA morphisms and their L-infinity lifts."""

    def test_identity_morphism(self, dgla_1):
        """Test the identity commutes with δ."""
        identity = GradedLinearMap.identity(dgla_1.space)
        assert dgla_morphism_report(identity, dgla_1, dgla_1).passed
        theta = induced_coalgebra_map(identity, dgla_1, dgla_1, 3)
        delta = build_delta(dgla_1, 3)
        assert check_morphism_commutes(theta, delta, delta).passed

    def test_bracket_not_preserved(self, dgla_1):
        """Test x -> x, y -> 2y breaks f[x, x] = [fx, fx]."""
        f = GradedLinearMap(dgla_1.space, dgla_1.space, 0, {"x": {"x": ONE}, "y": {"y": scalar(2)}})
        report = dgla_morphism_report(f, dgla_1, dgla_1)
        assert report.issues == ["preserves_bracket"]
        with pytest.raises(PreconditionError) as info:
            linfty_from_dgla_morphism(f, dgla_1, dgla_1, 2)
        assert info.value.witness == ["x", "x"]

    def test_formality_projection_needs_idempotent(self, dgla_1):
        """Test a non-idempotent post-composition is refused."""
        family = fixtures.pipeline_family(dgla_1)
        doubled = GradedLinearMap.identity(family.target).scale(scalar(2))
        with pytest.raises(NotAProjectionError):
            formality_projection(family, doubled)
        kept = formality_projection(family, GradedLinearMap.identity(family.target))
        assert kept.component(("x", "x")) == family.component(("x", "x"))


class TestSearches:
    """Test cases for the bounded searches."""

    def test_no_two_dimensional_violation(self):
        """Test every antisymmetric bracket on two even generators satisfies Jacobi."""
        assert search_jacobi_violation(GradedSpace.from_degrees({"a": 0, "b": 0}), 1) is None

    def test_three_dimensional_violation(self):
        """Test the search finds a violation on three even generators."""
        found = search_jacobi_violation(GradedSpace.from_degrees({"e1": 0, "e2": 0, "e3": 0}), 1)
        assert found is not None
        assert not validate_dgla(found).check("jacobi").passed

    def test_random_dgla_is_valid(self):
        """Test the seeded sampler returns a valid DGLA."""
        for seed in range(3):
            assert validate_dgla(random_dgla(random.Random(seed))).passed


if __name__ == "__main__":
    pytest.main([__file__])
