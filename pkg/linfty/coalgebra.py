"""
The reduced graded symmetric coalgebra C(V) = S̄(V[1]).

Every function here takes the space whose degrees govern the signs, i.e.
already V[1]. Words are tuples of basis names sorted by basis order.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from linfty.exceptions import DegreeError
from linfty.graded import GradedSpace, Vector, koszul_sign, unshuffles
from linfty.report import Report
from linfty.scalars import ONE, ZERO, Scalar, scalar

logger = logging.getLogger(__name__)

Word = Tuple[str, ...]
TensorTerms = Dict[Tuple[Word, ...], Scalar]


@dataclass(frozen=True)
class SymWord:
    """A normalized word with the sign picked up while sorting; sign 0 marks the zero word."""

    factors: Word
    sign: Scalar

    @property
    def length(self) -> int:
        return len(self.factors)

    def is_zero(self) -> bool:
        return not self.sign


def word_degree(space: GradedSpace, word: Iterable[str]) -> int:
    return sum(space.degree(name) for name in word)


def normalize_word(space: GradedSpace, factors: Iterable[str]) -> SymWord:
    """
    Sort factors into basis order, folding the Koszul sign in.

    Args:
        space: The space V[1] the factors live in
        factors: Basis names in any order

    Returns:
        SymWord; the zero word when an odd factor repeats
    """
    factors = tuple(factors)
    if not factors:
        raise DegreeError("words have length at least 1")
    order = sorted(range(len(factors)), key=lambda k: space.index(factors[k]))
    word = tuple(factors[k] for k in order)
    for left, right in zip(word, word[1:]):
        if left == right and space.degree(left) % 2:
            return SymWord(word, ZERO)
    return SymWord(word, koszul_sign(space, order, factors))


def basis_words(space: GradedSpace, cutoff: int) -> List[Word]:
    """Every nonzero normalized word of length 1..cutoff, by length then lexicographically."""
    words = []
    names = space.names
    for length in range(1, cutoff + 1):
        for indices in combinations_with_replacement(range(len(names)), length):
            word = tuple(names[i] for i in indices)
            if not normalize_word(space, word).is_zero():
                words.append(word)
    return words


def _word_key(space: GradedSpace, word: Word):
    return (len(word), tuple(space.index(name) for name in word))


class CElement:
    """Finite linear combination of normalized words, i.e. an element of C(V) up to a length cutoff."""

    __slots__ = ("space", "cutoff", "_terms")

    def __init__(self, space: GradedSpace, terms: Optional[Mapping[Word, Scalar]] = None,
                 cutoff: Optional[int] = None):
        self.space = space
        self.cutoff = cutoff
        collected: Dict[Word, Scalar] = {}
        for factors, coeff in (terms or {}).items():
            if not coeff:
                continue
            word = normalize_word(space, factors)
            if word.is_zero():
                continue
            if cutoff is not None and word.length > cutoff:
                raise DegreeError(f"word of length {word.length} exceeds cutoff {cutoff}")
            collected[word.factors] = collected.get(word.factors, ZERO) + word.sign * coeff
        self._terms = {w: c for w, c in sorted(collected.items(), key=lambda t: _word_key(space, t[0])) if c}

    @classmethod
    def word(cls, space: GradedSpace, factors: Iterable[str], coeff: Scalar = ONE,
             cutoff: Optional[int] = None) -> "CElement":
        return cls(space, {tuple(factors): coeff}, cutoff)

    @classmethod
    def from_vector(cls, vector: Vector) -> "CElement":
        return cls(vector.space, {(name,): coeff for name, coeff in vector.items()})

    def items(self):
        return iter(self._terms.items())

    def to_dict(self) -> Dict[Word, Scalar]:
        return dict(self._terms)

    def __getitem__(self, word: Word) -> Scalar:
        return self._terms.get(tuple(word), ZERO)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _merge_cutoff(self, other: "CElement") -> Optional[int]:
        if self.cutoff is None or other.cutoff is None:
            return None
        return max(self.cutoff, other.cutoff)

    def __add__(self, other: "CElement") -> "CElement":
        if other.space != self.space:
            raise DegreeError("elements of different coalgebras")
        terms = dict(self._terms)
        for word, coeff in other.items():
            terms[word] = terms.get(word, ZERO) + coeff
        return CElement(self.space, terms, self._merge_cutoff(other))

    def __sub__(self, other: "CElement") -> "CElement":
        return self + other.scale(-ONE)

    def __neg__(self) -> "CElement":
        return self.scale(-ONE)

    def scale(self, factor: Scalar) -> "CElement":
        return CElement(self.space, {w: factor * c for w, c in self.items()}, self.cutoff)

    def __rmul__(self, factor: Scalar) -> "CElement":
        return self.scale(factor)

    def __eq__(self, other) -> bool:
        return isinstance(other, CElement) and self.space == other.space and self._terms == other._terms

    def __hash__(self):
        return hash((self.space, tuple(self._terms.items())))

    def lengths(self) -> List[int]:
        return sorted({len(w) for w in self._terms})

    def of_length(self, length: int) -> "CElement":
        return CElement(self.space, {w: c for w, c in self.items() if len(w) == length}, self.cutoff)

    def __repr__(self) -> str:
        return f"CElement({len(self._terms)} terms)"


def p1(x: CElement) -> Vector:
    """Projection onto the length-one part, returned as a vector of the underlying space."""
    return Vector(x.space, {word[0]: coeff for word, coeff in x.items() if len(word) == 1})


def coproduct(space: GradedSpace, word: Iterable[str]) -> List[Tuple[Word, Word, Scalar]]:
    """
    Unshuffle coproduct of a normalized word.

    Returns:
        Sorted (left, right, coefficient) triples with identical pairs merged;
        empty for words of length one
    """
    normalized = normalize_word(space, word)
    if normalized.is_zero():
        return []
    factors = normalized.factors
    m = len(factors)
    merged: Dict[Tuple[Word, Word], Scalar] = {}
    for r in range(1, m):
        for sigma in unshuffles(r, m - r):
            eps = koszul_sign(space, sigma, factors)
            left = tuple(factors[i] for i in sigma.sigma[:r])
            right = tuple(factors[i] for i in sigma.sigma[r:])
            key = (left, right)
            merged[key] = merged.get(key, ZERO) + eps
    ordered = sorted(merged.items(), key=lambda t: (_word_key(space, t[0][0]), _word_key(space, t[0][1])))
    return [(left, right, coeff * normalized.sign) for (left, right), coeff in ordered if coeff]


def coproduct_element(x: CElement) -> TensorTerms:
    """Δ extended linearly; result keyed by (left, right)."""
    result: TensorTerms = {}
    for word, coeff in x.items():
        for left, right, c in coproduct(x.space, word):
            key = (left, right)
            result[key] = result.get(key, ZERO) + coeff * c
    return {k: v for k, v in result.items() if v}


def iterated_coproduct(space: GradedSpace, word: Iterable[str], k: int) -> TensorTerms:
    """Δ^{k-1}(word) as terms keyed by k-tuples of words; Δ^0 is the identity."""
    normalized = normalize_word(space, word)
    if k < 1:
        raise DegreeError("iterated coproduct needs k >= 1")
    if normalized.is_zero():
        return {}
    terms: TensorTerms = {(normalized.factors,): normalized.sign}
    for _ in range(k - 1):
        expanded: TensorTerms = {}
        for key, coeff in terms.items():
            for left, right, c in coproduct(space, key[-1]):
                new_key = key[:-1] + (left, right)
                expanded[new_key] = expanded.get(new_key, ZERO) + coeff * c
        terms = {key: value for key, value in expanded.items() if value}
    return terms


def symmetric_product(space: GradedSpace, vectors: List[Vector], coeff: Scalar = ONE) -> CElement:
    """v_1 ⊙ ... ⊙ v_m for vectors of ``space``, expanded multilinearly."""
    terms: Dict[Word, Scalar] = {(): coeff}
    for vector in vectors:
        step: Dict[Word, Scalar] = {}
        for prefix, c in terms.items():
            for name, value in vector.items():
                key = prefix + (name,)
                step[key] = step.get(key, ZERO) + c * value
        terms = step
    return CElement(space, {w: c for w, c in terms.items() if w})


class Family:
    """
    A family F = (F_1, F_2, ...) of graded-symmetric multilinear maps
    S̄^m(source) -> target, evaluated on normalized words.

    Values come either from a table keyed by words (any factor order) or
    from ``func(word) -> Vector`` called on normalized words and cached.
    """

    def __init__(self, source: GradedSpace, target: GradedSpace,
                 values: Optional[Mapping[Word, Vector]] = None,
                 func: Optional[Callable[[Word], Vector]] = None,
                 max_length: Optional[int] = None, degree: int = 0):
        self.source = source
        self.target = target
        self.max_length = max_length
        self.degree = degree
        self._func = func
        self._cache: Dict[Word, Vector] = {}
        for factors, value in (values or {}).items():
            word = normalize_word(source, factors)
            if word.is_zero():
                continue
            if value.space != target:
                raise DegreeError("family value outside the target space")
            value_degree = value.degree()
            if value_degree is not None and value_degree != word_degree(source, word.factors) + degree:
                raise DegreeError(f"F{word.factors} has degree {value_degree}")
            self._cache[word.factors] = value.scale(word.sign)

    def component(self, factors: Iterable[str]) -> Vector:
        word = normalize_word(self.source, factors)
        if word.is_zero() or (self.max_length is not None and word.length > self.max_length):
            return Vector(self.target)
        value = self._cache.get(word.factors)
        if value is None:
            value = self._func(word.factors) if self._func is not None else Vector(self.target)
            self._cache[word.factors] = value
        return value.scale(word.sign)

    def evaluate(self, x: CElement) -> Vector:
        total: Dict[str, Scalar] = {}
        for word, coeff in x.items():
            for name, value in self.component(word).items():
                total[name] = total.get(name, ZERO) + coeff * value
        return Vector(self.target, total)

    __call__ = evaluate

    def linear_part(self, vector: Vector) -> Vector:
        return self.evaluate(CElement.from_vector(vector))

    def then(self, post, target: Optional[GradedSpace] = None) -> "Family":
        """Post-compose every component with a linear map (anything with ``apply``)."""
        new_target = target if target is not None else post.target
        return Family(self.source, new_target, func=lambda word: post.apply(self.component(word)),
                      max_length=self.max_length, degree=self.degree + getattr(post, "degree", 0))

    def known_words(self) -> List[Word]:
        return sorted(self._cache, key=lambda w: _word_key(self.source, w))


def family_from_linear(map_, source: GradedSpace, target: GradedSpace) -> Family:
    """The family with F_1 given by a degree-0 linear map and F_m = 0 for m >= 2."""
    def value(word: Word) -> Vector:
        if len(word) != 1:
            return Vector(target)
        return Vector(target, map_.column(word[0]).to_dict())

    return Family(source, target, func=value)


class CoalgebraMorphism:
    """Θ = Σ (1/m!) F^{⊙m} ∘ Δ^{m-1}, evaluated lazily per word."""

    def __init__(self, family: Family, cutoff: int):
        self.family = family
        self.cutoff = cutoff
        self.source = family.source
        self.target = family.target
        self._cache: Dict[Word, CElement] = {}

    def apply_word(self, factors: Iterable[str]) -> CElement:
        word = normalize_word(self.source, factors)
        if word.is_zero():
            return CElement(self.target)
        if word.length > self.cutoff:
            raise DegreeError(f"word of length {word.length} exceeds cutoff {self.cutoff}")
        image = self._cache.get(word.factors)
        if image is None:
            image = CElement(self.target)
            for m in range(1, word.length + 1):
                weight = scalar(Fraction(1, factorial(m)))
                for blocks, coeff in iterated_coproduct(self.source, word.factors, m).items():
                    vectors = [self.family.component(block) for block in blocks]
                    if any(v.is_zero() for v in vectors):
                        continue
                    image = image + symmetric_product(self.target, vectors, coeff * weight)
            self._cache[word.factors] = image
        return image.scale(word.sign)

    def apply(self, x: CElement) -> CElement:
        total = CElement(self.target)
        for word, coeff in x.items():
            total = total + self.apply_word(word).scale(coeff)
        return total


def theta_from_F(family: Family, cutoff: int) -> CoalgebraMorphism:
    """The coalgebra morphism with p1∘Θ = F."""
    logger.info("building coalgebra morphism up to word length %d", cutoff)
    return CoalgebraMorphism(family, cutoff)


def tensor_apply(theta: CoalgebraMorphism, terms: TensorTerms) -> TensorTerms:
    """(Θ⊗Θ) on pairs; Θ has degree 0 so no sign appears."""
    result: TensorTerms = {}
    for (left, right), coeff in terms.items():
        image_left = theta.apply_word(left)
        image_right = theta.apply_word(right)
        for wl, cl in image_left.items():
            for wr, cr in image_right.items():
                key = (wl, wr)
                result[key] = result.get(key, ZERO) + coeff * cl * cr
    return {k: v for k, v in result.items() if v}


def theta_is_morphism(theta: CoalgebraMorphism, cutoff: Optional[int] = None) -> Report:
    """Check Δ_W∘Θ = (Θ⊗Θ)∘Δ_V on every basis word up to the cutoff."""
    report = Report("theta_is_morphism")
    cutoff = theta.cutoff if cutoff is None else cutoff
    for word in basis_words(theta.source, cutoff):
        lhs = coproduct_element(theta.apply_word(word))
        rhs = tensor_apply(theta, coproduct_element(CElement.word(theta.source, word)))
        if lhs != rhs:
            report.add("coalgebra_morphism", False, witness=list(word))
            return report
    report.add("coalgebra_morphism", True)
    return report
