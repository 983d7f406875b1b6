"""
Tests for graded spaces, vectors, maps and sign combinatorics.
"""

import random
from math import comb

import pytest

from linfty.exceptions import DegreeError
from linfty.graded import (
    BasisElement,
    GradedLinearMap,
    GradedSpace,
    Vector,
    graded_commutator,
    hom_space,
    koszul_sign,
    koszul_sign_degrees,
    map_to_vector,
    shift,
    unshuffles,
    vector_to_map,
)
from linfty.scalars import ONE, scalar, sign


@pytest.fixture
def space():
    return GradedSpace.from_degrees({"a": 0, "x": 1, "y": 1, "z": 2})


class TestGradedSpace:
    """Test cases for GradedSpace."""

    def test_degrees_and_shift(self, space):
        """Test V[n] lowers every degree by n and shifts compose."""
        assert space.degrees() == [0, 1, 2]
        L = shift(space, 1)
        assert L.degree("x") == 0
        assert shift(L, 2).degree("z") == -1
        assert shift(space, 0) is space

    def test_duplicate_names_rejected(self):
        """Test basis names are unique."""
        with pytest.raises(DegreeError):
            GradedSpace((BasisElement("a", 0), BasisElement("a", 1)))

    def test_bidegree_must_sum(self):
        """Test bidegrees are consistent with total degree."""
        space = GradedSpace.from_bidegrees({"x": (1, 0), "y": (0, 1)})
        assert space.has_bidegrees
        assert space.names_of_bidegree((0, 1)) == ["y"]
        assert space.degree("x") == 1


class TestVector:
    """Test cases for sparse vectors."""

    def test_zero_coefficients_dropped(self, space):
        """Test zero entries are never stored."""
        v = Vector(space, {"x": scalar(0), "y": scalar(2)})
        assert v.support() == ["y"]
        assert (v - v).is_zero()

    def test_degree(self, space):
        """Test homogeneous degree and the inhomogeneous error."""
        assert Vector.basis_vector(space, "z").degree() == 2
        assert Vector.zero(space).degree() is None
        with pytest.raises(DegreeError):
            Vector(space, {"a": ONE, "x": ONE}).degree()

    def test_unknown_name(self, space):
        """Test unknown basis names are degree errors."""
        with pytest.raises(DegreeError):
            Vector(space, {"q": ONE})


class TestGradedLinearMap:
    """Test cases for graded maps."""

    def test_degree_enforced(self, space):
        """Test entries must respect the map degree."""
        with pytest.raises(DegreeError):
            GradedLinearMap(space, space, 1, {"x": {"y": ONE}})

    def test_compose_and_commutator(self, space):
        """Test composition degrees and the graded commutator of two odd maps."""
        d = GradedLinearMap(space, space, 1, {"a": {"x": ONE}})
        e = GradedLinearMap(space, space, 1, {"x": {"z": ONE}})
        ed = e.compose(d)
        assert ed.degree == 2
        assert ed.apply(Vector.basis_vector(space, "a")) == Vector.basis_vector(space, "z")
        # both odd: [e, d] = ed + de, and de = 0 here
        assert graded_commutator(e, d) == ed

    def test_hom_space_round_trip(self, space):
        """Test a map survives flattening into its hom space."""
        f = GradedLinearMap(space, space, 1, {"a": {"x": scalar(3)}, "y": {"z": ONE}})
        hom = hom_space(space, space)
        vector = map_to_vector(f, hom)
        assert vector.degree() == 1
        assert vector_to_map(vector, space, space) == f


class TestSigns:
    """Test cases for Koszul signs and unshuffles."""

    def test_unshuffle_count(self):
        """Test there are binomial(p + q, p) unshuffles."""
        for p, q in [(0, 3), (1, 2), (2, 2), (3, 1)]:
            assert len(unshuffles(p, q)) == comb(p + q, p)
        assert unshuffles(-1, 2) == []

    def test_unshuffle_order(self):
        """Test blocks are increasing."""
        for u in unshuffles(2, 2):
            assert list(u.sigma[:2]) == sorted(u.sigma[:2])
            assert list(u.sigma[2:]) == sorted(u.sigma[2:])

    def test_koszul_sign(self, space):
        """Test swapping two odd elements costs a sign, even elements do not."""
        assert koszul_sign_degrees([1, 1], (1, 0)) == -ONE
        assert koszul_sign_degrees([0, 1], (1, 0)) == ONE
        assert koszul_sign(space, (1, 0), ["x", "y"]) == -ONE
        assert koszul_sign(shift(space, 1), (1, 0), ["x", "y"]) == ONE

    def test_not_a_permutation(self):
        """Test malformed permutations are rejected."""
        with pytest.raises(DegreeError):
            koszul_sign_degrees([1, 1], (0, 0))


def _random_space(rng: random.Random, size: int) -> GradedSpace:
    return GradedSpace.from_degrees({f"v{i}": rng.choice((-1, 0, 1, 2)) for i in range(size)})


def _random_map(rng: random.Random, space: GradedSpace, degree: int) -> GradedLinearMap:
    columns = {}
    for a in space.names:
        for b in space.names_of_degree(space.degree(a) + degree):
            if rng.random() < 0.5:
                columns.setdefault(a, {})[b] = scalar(rng.randint(-2, 2))
    return GradedLinearMap(space, space, degree, columns)


def _stepwise_sign(degrees, sigma) -> int:
    """Bubble a_{s1}...a_{sm} back to a_1...a_m, one adjacent swap at a time."""
    order = list(sigma)
    result = 1
    for end in range(len(order) - 1, 0, -1):
        for i in range(end):
            if order[i] > order[i + 1]:
                if (degrees[order[i]] * degrees[order[i + 1]]) % 2:
                    result = -result
                order[i], order[i + 1] = order[i + 1], order[i]
    return result


class TestRandomized:
    """Seeded randomized checks of the sign conventions."""

    def test_koszul_sign_matches_adjacent_swaps(self):
        """Test the closed-form Koszul sign against a swap-by-swap count."""
        rng = random.Random(11)
        for _ in range(200):
            m = rng.randint(1, 5)
            degrees = [rng.randint(-2, 3) for _ in range(m)]
            sigma = list(range(m))
            rng.shuffle(sigma)
            assert koszul_sign_degrees(degrees, sigma) == scalar(_stepwise_sign(degrees, sigma))

    def test_graded_jacobi(self):
        """Test [f,[g,h]] = [[f,g],h] + (-1)^{|f||g|} [g,[f,h]] for random maps."""
        rng = random.Random(12)
        for _ in range(25):
            space = _random_space(rng, rng.randint(2, 5))
            f, g, h = (_random_map(rng, space, rng.choice((-1, 0, 1))) for _ in range(3))
            lhs = graded_commutator(f, graded_commutator(g, h))
            rhs = graded_commutator(graded_commutator(f, g), h) + \
                graded_commutator(g, graded_commutator(f, h)).scale(sign(f.degree * g.degree))
            assert lhs == rhs

    def test_graded_antisymmetry(self):
        """Test [f, g] = -(-1)^{|f||g|} [g, f] for random maps."""
        rng = random.Random(13)
        for _ in range(25):
            space = _random_space(rng, rng.randint(2, 5))
            f, g = (_random_map(rng, space, rng.choice((-1, 0, 1))) for _ in range(2))
            assert graded_commutator(f, g) == \
                graded_commutator(g, f).scale(-sign(f.degree * g.degree))



if __name__ == "__main__":
    pytest.main([__file__])
