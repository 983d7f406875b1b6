"""
Exact scalars: the Gaussian rationals Q(i).

Scalars are elements of sympy's ``QQ_I`` domain, so every sum, product and
quotient is exact and equality is decidable.
"""

import re
from fractions import Fraction
from typing import Union

from sympy.polys.domains import QQ, QQ_I

from linfty.exceptions import InputError

Scalar = type(QQ_I.one)
ZERO = QQ_I.zero
ONE = QQ_I.one
I = QQ_I(0, 1)

_RATIONAL = re.compile(r"^[+-]?\d+(?:/\d+)?$")

RationalLike = Union[int, str, Fraction]


def _rational(value):
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, str):
        return _parse_rational(value)
    if QQ.of_type(value):
        return value
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def scalar(re_part: RationalLike = 0, im_part: RationalLike = 0) -> Scalar:
    """
    Build the Gaussian rational re + im*i.

    Args:
        re_part: Real part (int, Fraction, "p/q" string or QQ element)
        im_part: Imaginary part, same accepted types

    Returns:
        Exact scalar in QQ_I
    """
    if isinstance(re_part, Scalar) and im_part == 0:
        return re_part
    return QQ_I(_rational(re_part), _rational(im_part))


def sign(exponent: int) -> Scalar:
    """Return (-1)**exponent as a scalar."""
    return ONE if exponent % 2 == 0 else -ONE


def is_real(value: Scalar) -> bool:
    return not value.y


def conjugate(value: Scalar) -> Scalar:
    """Complex conjugate re - im*i."""
    return QQ_I(value.x, -value.y)


def _parse_rational(text: str):
    if not _RATIONAL.match(text):
        raise InputError(f"not an exact rational: {text!r}")
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise InputError(f"zero denominator in {text!r}")
        return QQ(int(num), int(den))
    return QQ(int(text))


def parse_scalar(text: str) -> Scalar:
    """
    Parse the wire format: "3/2", "-1/3*i", "1/2+1/2*i".

    Args:
        text: Scalar string

    Returns:
        Exact scalar
    """
    if not isinstance(text, str):
        raise InputError(f"scalars are strings on the wire, got {text!r}")
    t = text.replace(" ", "")
    if not t:
        raise InputError("empty scalar")
    if t.endswith("i"):
        body = t[:-1]
        if body.endswith("*"):
            body = body[:-1]
        cut = max(body.rfind("+"), body.rfind("-"))
        if cut > 0:
            re_text, im_text = body[:cut], body[cut:]
        else:
            re_text, im_text = "0", body
        if im_text in ("", "+"):
            im_text = "1"
        elif im_text == "-":
            im_text = "-1"
    else:
        re_text, im_text = t, "0"
    return QQ_I(_parse_rational(re_text), _parse_rational(im_text))


def _format_rational(q) -> str:
    num, den = int(q.numerator), int(q.denominator)
    return f"{num}" if den == 1 else f"{num}/{den}"


def format_scalar(value: Scalar) -> str:
    """Inverse of parse_scalar; canonical so round trips are byte-stable."""
    re_part, im_part = value.x, value.y
    if not im_part:
        return _format_rational(re_part)
    im_text = _format_rational(im_part)
    if not re_part:
        return f"{im_text}*i"
    if int(im_part.numerator) > 0:
        im_text = "+" + im_text
    return f"{_format_rational(re_part)}{im_text}*i"
