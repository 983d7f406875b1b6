"""
Tests for the package L-infinity morphism and the checks around it.
"""

import pytest

from linfty import fixtures
from linfty.coalgebra import theta_is_morphism
from linfty.dgla import build_delta
from linfty.exceptions import DegreeError, NotACocycleError, NotHarmonicError
from linfty.graded import GradedLinearMap, Vector
from linfty.scalars import ONE
from linfty.theorem import (
    TaylorFamily,
    check_bridging_identity,
    check_proof_identities,
    check_taylor_morphism,
    corrupt_tau,
    ev_omega,
    ev_omega_report,
    g_m,
    theta_on_cohomology,
    theta_report,
)


class TestTaylorFamily:
    """Test cases for F_1 and the symmetrized F_m."""

    def test_F1(self, kah_2):
        """Test F_1(a1) = h1 -> h0 and F_1(a2) = F_1(b) = 0."""
        pkg, _, hats = kah_2
        family = TaylorFamily(pkg, hats, 3)
        H = pkg.harmonic_space
        assert family.F1("a1") == GradedLinearMap(H, H, -1, {"h1": {"h0": ONE}})
        assert family.F1("a2").is_zero()
        assert family.F1("b").is_zero()

    def test_F_m_symmetric(self, kah_2):
        """Test F_2 is graded symmetric in its arguments."""
        pkg, _, hats = kah_2
        family = TaylorFamily(pkg, hats, 3)
        assert family.F_m(("a2", "a1")) == -family.F_m(("a1", "a2"))
        assert family.F_m(("a1", "b")) == family.F_m(("b", "a1"))
        assert family.F_m(("a1", "a1")).is_zero()

    def test_torus_higher_components_vanish(self, torus):
        """Test τ = 0 on the torus kills every F_m with m >= 2."""
        pkg, _, hats = torus
        family = TaylorFamily(pkg, hats, 3)
        assert pkg.tau.is_zero()
        assert not family.F1("a").is_zero()
        assert family.F_m(("a", "c")).is_zero()
        assert family.F_m(("c", "c", "c")).is_zero()


class TestMainCheck:
    """Test cases for F∘δ = 0 on the package family."""

    def test_fix_kah_2_passes(self, kah_2):
        """Test the two-class fixture satisfies F∘δ = 0 and yields a coalgebra morphism."""
        pkg, _, hats = kah_2
        report, theta = check_taylor_morphism(pkg, hats, 3)
        assert report.passed
        assert theta is not None
        assert theta_is_morphism(theta, 2).passed

    def test_torus_passes(self, torus):
        """Test the torus family passes as well."""
        pkg, _, hats = torus
        report, _ = check_taylor_morphism(pkg, hats, 3)
        assert report.passed

    def test_corrupted_tau_detected(self, kah_2):
        """Test dropping G from τ breaks F∘δ = 0 at a1⊙a2."""
        pkg, _, hats = kah_2
        report, theta = check_taylor_morphism(corrupt_tau(pkg), hats, 3)
        assert not report.passed
        assert theta is None
        assert report.check("F_delta_zero").witness == ["a1", "a2"]

    def test_proof_identities(self, kah_2):
        """Test both operator identities behind the main check."""
        pkg, g, hats = kah_2
        family = TaylorFamily(pkg, hats, 3)
        report = check_proof_identities(family, build_delta(g, 3))
        assert report.passed
        assert check_bridging_identity(pkg, hats).passed

    def test_g_m_needs_two_factors(self, kah_2):
        """Test g_m is only defined for m >= 2."""
        pkg, _, hats = kah_2
        with pytest.raises(DegreeError):
            g_m(["a1"], pkg, hats)


class TestThetaOnCohomology:
    """Test cases for θ: H(L) -> Hom(H, H)."""

    def test_kah_2_theta(self, kah_2):
        """Test θ sends the class of a2 - a1 to h1 -> -h0."""
        pkg, _, hats = kah_2
        theta = theta_on_cohomology(TaylorFamily(pkg, hats, 3))
        assert theta.well_defined()
        assert theta_report(theta) == {"[h-1.0]": {"h0|h1": "-1"}}

    def test_apply_needs_cocycle(self, kah_2):
        """Test θ refuses elements that are not closed."""
        pkg, g, hats = kah_2
        theta = theta_on_cohomology(TaylorFamily(pkg, hats, 3))
        with pytest.raises(NotACocycleError):
            theta.apply(Vector.basis_vector(g.L, "a1"))


class TestEvaluation:
    """Test cases for ev_Ω∘F."""

    def test_torus_evaluation(self, torus):
        """Test ev_dz F_1(a) = 1 and the evaluated family passes its checks."""
        pkg, _, hats = torus
        family = TaylorFamily(pkg, hats, 3)
        omega = fixtures.torus_omega(pkg)
        evaluated = ev_omega(family, omega)
        assert evaluated.component(("a",)) == Vector.basis_vector(pkg.harmonic_space, "one")
        report = ev_omega_report(family, omega)
        assert report.passed
        assert len(report.data["omega_kernel"]) == 2

    def test_non_harmonic_omega(self, kah_2):
        """Test Ω must be harmonic."""
        pkg, _, hats = kah_2
        with pytest.raises(NotHarmonicError):
            ev_omega(TaylorFamily(pkg, hats, 3), Vector.basis_vector(pkg.space, "one"))


if __name__ == "__main__":
    pytest.main([__file__])
