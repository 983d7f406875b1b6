"""
Tests for exact scalars and their wire format.
"""

from fractions import Fraction

import pytest

from linfty.exceptions import InputError
from linfty.scalars import I, ONE, ZERO, conjugate, format_scalar, is_real, parse_scalar, scalar, sign


class TestScalar:
    """Test cases for scalar construction."""

    def test_integer_and_fraction(self):
        """Test ints, Fractions and strings build the same scalar."""
        assert scalar(Fraction(3, 2)) == scalar("3/2")
        assert scalar(2) == ONE + ONE
        assert scalar(0) == ZERO

    def test_imaginary_part(self):
        """Test the imaginary unit squares to -1."""
        assert I * I == -ONE
        assert scalar(0, 1) == I
        assert not is_real(I)
        assert is_real(scalar("5/7"))

    def test_booleans_rejected(self):
        """Test booleans are not silently read as 0 and 1."""
        with pytest.raises(TypeError):
            scalar(True)

    def test_sign(self):
        """Test (-1)^n."""
        assert sign(0) == ONE
        assert sign(3) == -ONE
        assert sign(-2) == ONE

    def test_conjugate(self):
        """Test conjugation flips the imaginary part only."""
        assert conjugate(scalar("1/2", -3)) == scalar("1/2", 3)
        assert conjugate(I) == -I
        assert conjugate(scalar(5)) == scalar(5)
        z = scalar(2, 7)
        assert z * conjugate(z) == scalar(53)


class TestWireFormat:
    """Test cases for parse_scalar and format_scalar."""

    def test_parse_forms(self):
        """Test every accepted spelling."""
        cases = [
            ("3/2", scalar("3/2")),
            ("-7", scalar(-7)),
            ("i", I),
            ("-i", -I),
            ("-1/3*i", scalar(0, "-1/3")),
            ("1/2+1/2*i", scalar("1/2", "1/2")),
            ("2-i", scalar(2, -1)),
        ]
        for text, expected in cases:
            assert parse_scalar(text) == expected, text

    def test_format_is_canonical(self):
        """Test formatting gives the canonical spelling."""
        assert format_scalar(scalar(4, 2)) == "4+2*i"
        assert format_scalar(scalar("1/2", "-1/3")) == "1/2-1/3*i"
        assert format_scalar(scalar(0, 1)) == "1*i"
        assert format_scalar(scalar("6/4")) == "3/2"

    def test_parse_inverts_format(self):
        """Test a formatted scalar parses back to itself."""
        for value in (scalar("-5/3", "2/7"), scalar(0, -1), scalar(9)):
            assert parse_scalar(format_scalar(value)) == value

    def test_rejects_floats_and_garbage(self):
        """Test non-exact or malformed scalars are input errors."""
        for bad in ("0.5", "", "1/0", "x", "1e3"):
            with pytest.raises(InputError):
                parse_scalar(bad)
        with pytest.raises(InputError):
            parse_scalar(0.5)


if __name__ == "__main__":
    pytest.main([__file__])
