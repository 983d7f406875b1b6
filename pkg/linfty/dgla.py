"""
Differential graded Lie algebras and their codifferential on C(V).

A DGLA K carries its bracket as structure constants; the L-infinity side
lives on L = K[1], where the quadratic part is Q(a⊙b) = (-1)^{deg(a, L)}[a, b].
"""

import logging
import random
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from linfty.coalgebra import (
    CElement,
    CoalgebraMorphism,
    Family,
    Word,
    basis_words,
    coproduct,
    coproduct_element,
    family_from_linear,
    normalize_word,
    theta_from_F,
    word_degree,
)
from linfty.exceptions import DegreeError, NotAProjectionError, PreconditionError
from linfty.graded import GradedLinearMap, GradedSpace, Vector, combine, shift, unshuffles, koszul_sign
from linfty.report import Report, describe_element, describe_vector
from linfty.scalars import ONE, ZERO, Scalar, scalar, sign
from utils.helpers import parallel_map

logger = logging.getLogger(__name__)


class DGLA:
    """
    A finite-dimensional DGLA (K, d, [ , ]).

    ``bracket`` maps pairs of basis names to the value of [a, b] in K. Only
    one ordering of each pair is needed; the other follows from graded
    antisymmetry. Supplying both orderings is allowed and is checked by
    validate_dgla.
    """

    def __init__(self, space: GradedSpace, d: Optional[GradedLinearMap] = None,
                 bracket: Optional[Mapping[Tuple[str, str], Mapping[str, Scalar]]] = None,
                 name: str = "K"):
        self.space = space
        self.name = name
        self.d = d if d is not None else GradedLinearMap.zero(space, space, 1)
        if self.d.source != space or self.d.target != space:
            raise DegreeError("differential must be an endomorphism of the space")
        if self.d.degree != 1 and not self.d.is_zero():
            raise DegreeError(f"differential has degree {self.d.degree}")
        self._raw: Dict[Tuple[str, str], Vector] = {}
        for (a, b), value in (bracket or {}).items():
            vector = value if isinstance(value, Vector) else Vector(space, value)
            if vector.space != space:
                raise DegreeError("bracket value outside the space")
            expected = space.degree(a) + space.degree(b)
            degree = vector.degree()
            if degree is not None and degree != expected:
                raise DegreeError(f"[{a},{b}] has degree {degree}, expected {expected}")
            if not vector.is_zero():
                self._raw[(a, b)] = vector
        self.L = shift(space, 1)

    @classmethod
    def abelian(cls, space: GradedSpace, name: str = "K") -> "DGLA":
        return cls(space, name=name)

    def bracket_entries(self) -> List[Tuple[str, str, Vector]]:
        """Stored bracket values in canonical (a <= b) basis order."""
        entries = []
        names = self.space.names
        for i, a in enumerate(names):
            for b in names[i:]:
                value = self.bracket_basis(a, b)
                if not value.is_zero():
                    entries.append((a, b, value))
        return entries

    def bracket_basis(self, a: str, b: str) -> Vector:
        if (a, b) in self._raw:
            return self._raw[(a, b)]
        if (b, a) in self._raw:
            eps = sign(self.space.degree(a) * self.space.degree(b))
            return self._raw[(b, a)].scale(-eps)
        return Vector(self.space)

    def bracket(self, u: Vector, v: Vector) -> Vector:
        """Bilinear extension of the bracket to vectors of K."""
        terms = []
        for a, ca in u.items():
            for b, cb in v.items():
                terms.append((ca * cb, self.bracket_basis(a, b)))
        return combine(self.space, terms)

    def differential(self, u: Vector) -> Vector:
        return self.d.apply(u)

    def Q_pair(self, a: str, b: str) -> Vector:
        """Q(a⊙b) = (-1)^{deg(a, L)} [a, b], as a vector of L."""
        return self.bracket_basis(a, b).scale(sign(self.L.degree(a))).in_space(self.L)

    @property
    def d_L(self) -> GradedLinearMap:
        """The differential read on L = K[1]."""
        return GradedLinearMap(self.L, self.L, self.d.degree,
                               {src: image.in_space(self.L) for src, image in self.d.columns()})

    def is_abelian(self) -> bool:
        return self.d.is_zero() and not self._raw

    def raw_pairs(self) -> List[Tuple[str, str]]:
        return list(self._raw)


def _first(iterable):
    return next(iter(iterable), None)


def validate_dgla(g: DGLA) -> Report:
    """
    Check d∘d = 0, graded antisymmetry, Jacobi and Leibniz on basis elements.

    Args:
        g: The DGLA to validate

    Returns:
        Report with checks d_squared, antisymmetry, jacobi, leibniz; each
        failure carries the first failing basis tuple
    """
    logger.info("validating DGLA %s of dimension %d", g.name, g.space.dim)
    report = Report(f"validate_dgla[{g.name}]")
    space = g.space
    names = space.names
    deg = space.degree

    square = g.d.compose(g.d)
    report.add("d_squared", square.is_zero(), witness=square.first_nonzero())

    antisymmetry_witness = None
    for i, a in enumerate(names):
        for b in names[i:]:
            eps = sign(deg(a) * deg(b))
            if a == b:
                value = g._raw.get((a, a), Vector(space))
                if not (value + value.scale(eps)).is_zero():
                    antisymmetry_witness = [a, a]
            elif (a, b) in g._raw and (b, a) in g._raw:
                if not (g._raw[(a, b)] + g._raw[(b, a)].scale(eps)).is_zero():
                    antisymmetry_witness = [a, b]
            if antisymmetry_witness:
                break
        if antisymmetry_witness:
            break
    report.add("antisymmetry", antisymmetry_witness is None, witness=antisymmetry_witness)

    def basis(name):
        return Vector.basis_vector(space, name)

    jacobi_witness = None
    for a, b, c in product(names, repeat=3):
        lhs = g.bracket(basis(a), g.bracket_basis(b, c))
        rhs = g.bracket(g.bracket_basis(a, b), basis(c)) + \
            g.bracket(basis(b), g.bracket_basis(a, c)).scale(sign(deg(a) * deg(b)))
        if lhs != rhs:
            jacobi_witness = [a, b, c]
            break
    report.add("jacobi", jacobi_witness is None, witness=jacobi_witness)

    leibniz_witness = None
    for a, b in product(names, repeat=2):
        lhs = g.differential(g.bracket_basis(a, b))
        rhs = g.bracket(g.d.column(a), basis(b)) + \
            g.bracket(basis(a), g.d.column(b)).scale(sign(deg(a)))
        if lhs != rhs:
            leibniz_witness = [a, b]
            break
    report.add("leibniz", leibniz_witness is None, witness=leibniz_witness)
    return report


def build_Q(g: DGLA) -> Family:
    """Q: ⊙²(L) -> L as a family concentrated in word length 2 (degree 1)."""
    def value(word: Word) -> Vector:
        if len(word) != 2:
            return Vector(g.L)
        return g.Q_pair(word[0], word[1])

    return Family(g.L, g.L, func=value, max_length=2, degree=1)


class Codifferential:
    """
    δ on C(K) = S̄(L): the d-part summed over S(1, m-1) plus the Q-part summed over S(2, m-2).
    """

    def __init__(self, dgla: DGLA, cutoff: int):
        self.dgla = dgla
        self.cutoff = cutoff
        self.space = dgla.L
        self.d_L = dgla.d_L
        self.Q = build_Q(dgla)
        self._cache: Dict[Word, CElement] = {}

    def d_part(self, factors: Word) -> CElement:
        m = len(factors)
        terms: Dict[Word, Scalar] = {}
        for sigma in unshuffles(1, m - 1):
            eps = koszul_sign(self.space, sigma, factors)
            first = factors[sigma.sigma[0]]
            rest = tuple(factors[i] for i in sigma.sigma[1:])
            for name, coeff in self.d_L.column(first).items():
                key = (name,) + rest
                terms[key] = terms.get(key, ZERO) + eps * coeff
        return CElement(self.space, terms)

    def q_part(self, factors: Word) -> CElement:
        m = len(factors)
        terms: Dict[Word, Scalar] = {}
        for sigma in unshuffles(2, m - 2):
            eps = koszul_sign(self.space, sigma, factors)
            pair = (factors[sigma.sigma[0]], factors[sigma.sigma[1]])
            rest = tuple(factors[i] for i in sigma.sigma[2:])
            for name, coeff in self.Q.component(pair).items():
                key = (name,) + rest
                terms[key] = terms.get(key, ZERO) + eps * coeff
        return CElement(self.space, terms)

    def apply_word(self, factors: Iterable[str]) -> CElement:
        word = normalize_word(self.space, factors)
        if word.is_zero():
            return CElement(self.space)
        if word.length > self.cutoff:
            raise DegreeError(f"word of length {word.length} exceeds cutoff {self.cutoff}")
        image = self._cache.get(word.factors)
        if image is None:
            image = self.d_part(word.factors) + self.q_part(word.factors)
            self._cache[word.factors] = image
        return image.scale(word.sign)

    def apply(self, x: CElement) -> CElement:
        total = CElement(self.space)
        for word, coeff in x.items():
            total = total + self.apply_word(word).scale(coeff)
        return total

    __call__ = apply


def build_delta(g: DGLA, cutoff: int) -> Codifferential:
    logger.info("building codifferential of %s up to word length %d", g.name, cutoff)
    return Codifferential(g, cutoff)


def _first_failure(words: Sequence[Word], residuals: Sequence) -> Optional[int]:
    return _first(i for i, residual in enumerate(residuals) if not residual.is_zero())


def check_delta_squared(delta: Codifferential) -> Report:
    """δ∘δ = 0 on every basis word up to the cutoff; the witness is the first failing word."""
    report = Report(f"delta_squared[{delta.dgla.name}]")
    words = basis_words(delta.space, delta.cutoff)
    residuals = parallel_map(lambda w: delta.apply(delta.apply_word(w)), words)
    index = _first_failure(words, residuals)
    if index is None:
        report.add("delta_squared", True)
    else:
        report.add("delta_squared", False, witness=list(words[index]))
        report.data["residual"] = describe_element(residuals[index])
    report.data["words_checked"] = len(words)
    return report


def check_coderivation(delta: Codifferential) -> Report:
    """Δ∘δ = (δ⊗id + id⊗δ)∘Δ on basis words, with the Koszul sign (-1)^{|left|} on id⊗δ."""
    report = Report(f"coderivation[{delta.dgla.name}]")
    space = delta.space
    for word in basis_words(space, delta.cutoff):
        lhs = coproduct_element(delta.apply_word(word))
        rhs: Dict[Tuple[Word, Word], Scalar] = {}
        for left, right, coeff in coproduct(space, word):
            for image, c in delta.apply_word(left).items():
                rhs[(image, right)] = rhs.get((image, right), ZERO) + coeff * c
            eps = sign(word_degree(space, left))
            for image, c in delta.apply_word(right).items():
                rhs[(left, image)] = rhs.get((left, image), ZERO) + eps * coeff * c
        rhs = {k: v for k, v in rhs.items() if v}
        if lhs != rhs:
            report.add("coderivation", False, witness=list(word))
            return report
    report.add("coderivation", True)
    return report


def dgla_morphism_report(f: GradedLinearMap, g: DGLA, g_prime: DGLA) -> Report:
    """Check f∘d = d'∘f and f[a,b] = [f a, f b] on basis elements."""
    report = Report(f"dgla_morphism[{g.name}->{g_prime.name}]")
    if f.source != g.space or f.target != g_prime.space:
        raise DegreeError("morphism spaces do not match the DGLAs")
    if f.degree != 0 and not f.is_zero():
        raise DegreeError("a DGLA morphism has degree 0")
    chain = f.compose(g.d) - g_prime.d.compose(f)
    report.add("commutes_with_d", chain.is_zero(), witness=chain.first_nonzero())
    names = g.space.names
    witness = None
    for i, a in enumerate(names):
        for b in names[i:]:
            lhs = f.apply(g.bracket_basis(a, b))
            rhs = g_prime.bracket(f.column(a), f.column(b))
            if lhs != rhs:
                witness = [a, b]
                break
        if witness:
            break
    report.add("preserves_bracket", witness is None, witness=witness)
    return report


def induced_coalgebra_map(f: GradedLinearMap, g: DGLA, g_prime: DGLA, cutoff: int) -> CoalgebraMorphism:
    """a_1⊙...⊙a_m -> f(a_1)⊙...⊙f(a_m), as Θ of the family (f, 0, 0, ...)."""
    return theta_from_F(family_from_linear(f, g.L, g_prime.L), cutoff)


def linfty_from_dgla_morphism(f: GradedLinearMap, g: DGLA, g_prime: DGLA, cutoff: int) -> CoalgebraMorphism:
    """
    The L-infinity morphism induced by a DGLA morphism.

    Raises:
        PreconditionError: f is not a DGLA morphism; ``witness`` names the failure
    """
    report = dgla_morphism_report(f, g, g_prime)
    failure = report.first_failure()
    if failure is not None:
        raise PreconditionError(f"not a DGLA morphism: {failure.name}", witness=failure.witness)
    return induced_coalgebra_map(f, g, g_prime, cutoff)


def check_morphism_commutes(theta: CoalgebraMorphism, delta: Codifferential,
                            delta_prime: Codifferential) -> Report:
    """Θ∘δ = δ'∘Θ on every basis word up to the cutoff."""
    report = Report("codifferential_commutation")
    for word in basis_words(delta.space, min(theta.cutoff, delta.cutoff)):
        lhs = theta.apply(delta.apply_word(word))
        rhs = delta_prime.apply(theta.apply_word(word))
        if lhs != rhs:
            report.add("theta_delta_commutes", False, witness=list(word))
            return report
    report.add("theta_delta_commutes", True)
    return report


def check_F_delta_zero(F: Family, delta: Codifferential, cutoff: Optional[int] = None) -> Report:
    """
    Evaluate F(δ(w)) on every basis word; pass iff all vanish.

    A passing family also gets the derived check F_1∘d = 0.
    """
    cutoff = delta.cutoff if cutoff is None else cutoff
    logger.info("checking F∘δ = 0 up to word length %d", cutoff)
    report = Report("F_delta_zero")
    words = basis_words(delta.space, cutoff)
    values = parallel_map(lambda w: F.evaluate(delta.apply_word(w)), words)
    results = []
    for word, value in zip(words, values):
        results.append({"word": list(word), "zero": value.is_zero()})
        logger.debug("F∘δ%s = %s", word, value)
    index = _first_failure(words, values)
    if index is None:
        report.add("F_delta_zero", True)
        linear = _first(a for a in delta.space.names
                        if not F.linear_part(delta.d_L.column(a)).is_zero())
        report.add("F1_d_zero", linear is None, witness=linear)
    else:
        report.add("F_delta_zero", False, witness=list(words[index]))
        report.data["value"] = describe_vector(values[index])
    report.data["per_word"] = results
    return report


def formality_projection(F: Family, p: GradedLinearMap) -> Family:
    """p∘F_m for a projection p of the target onto the image of θ."""
    if p.source != F.target or p.target != F.target:
        raise DegreeError("projection must be an endomorphism of the family target")
    if p.compose(p) != p:
        raise NotAProjectionError("p∘p != p")
    return F.then(p)


def _value_range(bound: int) -> List[int]:
    values = [0]
    for k in range(1, bound + 1):
        values.extend([k, -k])
    return values


def _bracket_slots(space: GradedSpace) -> List[Tuple[str, str, str]]:
    slots = []
    names = space.names
    for i, a in enumerate(names):
        for b in names[i:]:
            if a == b and space.degree(a) % 2 == 0:
                continue
            target_degree = space.degree(a) + space.degree(b)
            for c in space.names_of_degree(target_degree):
                slots.append((a, b, c))
    return slots


def search_jacobi_violation(space: GradedSpace, bound: int = 1) -> Optional[DGLA]:
    """
    First graded-antisymmetric bracket (d = 0, coefficients in [-bound, bound])
    whose Jacobi identity fails, scanning slots in basis order; None if there is none.
    """
    slots = _bracket_slots(space)
    logger.info("searching %d bracket slots for a Jacobi violation", len(slots))
    for values in product(_value_range(bound), repeat=len(slots)):
        if not any(values):
            continue
        bracket: Dict[Tuple[str, str], Dict[str, Scalar]] = {}
        for (a, b, c), value in zip(slots, values):
            if value:
                bracket.setdefault((a, b), {})[c] = scalar(value)
        candidate = DGLA(space, bracket=bracket, name="jacobi_violation")
        if not validate_dgla(candidate).check("jacobi").passed:
            return candidate
    return None


def random_dgla(rng: random.Random, dim: int = 4, degrees: Sequence[int] = (0, 1, 2),
                density: float = 0.3, max_tries: int = 200) -> DGLA:
    """
    Seeded rejection sampler: draw degrees, a sparse d and a sparse bracket with
    coefficients in {-1, 1}, keep the first draw passing validate_dgla.
    """
    names = [f"e{i + 1}" for i in range(dim)]
    space = GradedSpace.from_degrees({name: rng.choice(list(degrees)) for name in names})
    for _ in range(max_tries):
        columns: Dict[str, Dict[str, Scalar]] = {}
        for a in names:
            for b in space.names_of_degree(space.degree(a) + 1):
                if rng.random() < density:
                    columns.setdefault(a, {})[b] = scalar(rng.choice((1, -1)))
        bracket: Dict[Tuple[str, str], Dict[str, Scalar]] = {}
        for a, b, c in _bracket_slots(space):
            if rng.random() < density:
                bracket.setdefault((a, b), {})[c] = scalar(rng.choice((1, -1)))
        candidate = DGLA(space, GradedLinearMap(space, space, 1, columns), bracket, name="random")
        if validate_dgla(candidate).passed:
            return candidate
    logger.debug("random_dgla fell back to the abelian structure on %s", space.names)
    return DGLA.abelian(space, name="random")
