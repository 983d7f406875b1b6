"""
Deformation functors of a DGLA over local Artinian rings.

Rings are C[t_1, ..., t_k]/I for monomial ideals I, with the nonconstant
monomials outside I as the basis of the maximal ideal. Coefficient tensors
V⊗m_A are stored as {monomial: vector of V}; the ring sits in degree zero,
so brackets and differentials act on the vector part only.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from linfty.coalgebra import Family, symmetric_product
from linfty.dgla import DGLA
from linfty.exceptions import DegreeError, NotACocycleError, NotMaurerCartanError, PreconditionError
from linfty.graded import GradedLinearMap, GradedSpace, Vector
from linfty.linalg import Cohomology, cohomology, kernel_basis, preimage, rank, rref, vector_coords
from linfty.report import Report, describe_vector
from linfty.scalars import ONE, ZERO, Scalar, scalar
from utils.helpers import parallel_map

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
RingElement = Dict[Monomial, Scalar]

HALF = scalar(Fraction(1, 2))


def _monomial_key(monomial: Monomial):
    return sum(monomial), tuple(-e for e in monomial)


def _divides(small: Monomial, big: Monomial) -> bool:
    return all(a <= b for a, b in zip(small, big))


class ArtinAlgebra:
    """
    A local Artinian algebra C[t_1..t_k]/I for a monomial ideal I.

    I is generated by ``relations`` (exponent tuples) together with every
    monomial of total degree ``order`` when an order is given. Each variable
    must be nilpotent modulo I.
    """

    def __init__(self, variables: Sequence[str], relations: Iterable[Sequence[int]] = (),
                 order: Optional[int] = None):
        variables = tuple(variables)
        if not variables:
            raise PreconditionError("an Artin algebra needs at least one variable")
        if len(set(variables)) != len(variables):
            raise PreconditionError("duplicate variable names", witness=list(variables))
        if order is not None and order < 1:
            raise PreconditionError(f"truncation order must be positive, got {order}")
        cleaned = set()
        for relation in relations:
            relation = tuple(int(e) for e in relation)
            if len(relation) != len(variables) or any(e < 0 for e in relation) or not any(relation):
                raise PreconditionError(f"bad monomial relation {relation}", witness=list(relation))
            cleaned.add(relation)
        self.variables = variables
        self.relations: Tuple[Monomial, ...] = tuple(sorted(cleaned, key=_monomial_key))
        self.order = order

        bounds = []
        for i, name in enumerate(variables):
            pure = [r[i] for r in self.relations if sum(r) == r[i]]
            if order is not None:
                pure.append(order)
            if not pure:
                raise PreconditionError(f"variable {name} is not nilpotent", witness=name)
            bounds.append(min(pure))
        candidates = product(*(range(b) for b in bounds))
        self.monomials: List[Monomial] = sorted(
            (m for m in candidates if any(m) and not self.in_ideal(m)), key=_monomial_key)
        self._index = {m: i for i, m in enumerate(self.monomials)}
        self.nilpotency = max((sum(m) for m in self.monomials), default=0) + 1

    @property
    def unit(self) -> Monomial:
        return (0,) * len(self.variables)

    def in_ideal(self, monomial: Monomial) -> bool:
        if self.order is not None and sum(monomial) >= self.order:
            return True
        return any(_divides(r, monomial) for r in self.relations)

    def __contains__(self, monomial) -> bool:
        return tuple(monomial) in self._index

    def index(self, monomial: Monomial) -> int:
        return self._index[tuple(monomial)]

    @property
    def dim(self) -> int:
        """Dimension of m_A."""
        return len(self.monomials)

    def multiply(self, left: Monomial, right: Monomial) -> Optional[Monomial]:
        """Product of two monomials, None when it falls in the ideal."""
        total = tuple(a + b for a, b in zip(left, right))
        return None if self.in_ideal(total) else total

    def multiply_elements(self, left: Mapping[Monomial, Scalar], right: Mapping[Monomial, Scalar]) -> RingElement:
        result: RingElement = {}
        for m1, c1 in left.items():
            for m2, c2 in right.items():
                m = self.multiply(m1, m2)
                if m is not None:
                    result[m] = result.get(m, ZERO) + c1 * c2
        return {m: c for m, c in result.items() if c}

    def ideal_generators(self) -> List[Monomial]:
        generators = list(self.relations)
        if self.order is not None:
            generators.extend(m for m in product(range(self.order + 1), repeat=len(self.variables))
                              if sum(m) == self.order)
        return sorted(set(generators), key=_monomial_key)

    def label(self, monomial: Monomial) -> str:
        parts = []
        for name, e in zip(self.variables, monomial):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"

    def validate(self) -> Report:
        report = Report(f"ring {self}")
        basis = self.monomials
        bad = next(([self.label(a), self.label(b)] for a, b in product(basis, repeat=2)
                    if self.multiply(a, b) != self.multiply(b, a)), None)
        report.add("commutative", bad is None, bad)
        bad = None
        for a, b, c in product(basis, repeat=3):
            ab = self.multiply(a, b)
            bc = self.multiply(b, c)
            left = self.multiply(ab, c) if ab is not None else None
            right = self.multiply(a, bc) if bc is not None else None
            if left != right:
                bad = [self.label(a), self.label(b), self.label(c)]
                break
        report.add("associative", bad is None, bad)
        survivors = [self.label(m) for m in basis if sum(m) >= self.nilpotency]
        report.add(f"m_A^{self.nilpotency} = 0", not survivors, survivors[0] if survivors else None)
        report.data["nilpotency"] = self.nilpotency
        report.data["basis"] = [self.label(m) for m in basis]
        return report

    def __eq__(self, other) -> bool:
        return (isinstance(other, ArtinAlgebra) and self.variables == other.variables
                and self.monomials == other.monomials)

    def __hash__(self):
        return hash((self.variables, tuple(self.monomials)))

    def __str__(self) -> str:
        gens = [self.label(r) for r in self.relations]
        text = f"C[{','.join(self.variables)}]"
        quotient = []
        if gens:
            quotient.append(f"({','.join(gens)})")
        if self.order is not None:
            quotient.append(f"m^{self.order}")
        return text + ("/" + "+".join(quotient) if quotient else "")

    __repr__ = __str__


def make_truncated_line(n: int, variable: str = "t") -> ArtinAlgebra:
    """C[t]/(t^n); its maximal ideal has basis t, ..., t^(n-1)."""
    if n < 1:
        raise PreconditionError(f"truncated line needs n >= 1, got {n}")
    return ArtinAlgebra((variable,), relations=[(n,)])


class TensorElement:
    """An element of V⊗m_A stored as {monomial: vector of V}."""

    def __init__(self, space: GradedSpace, ring: ArtinAlgebra,
                 parts: Optional[Mapping[Monomial, Vector]] = None):
        cleaned: Dict[Monomial, Vector] = {}
        for monomial, vector in (parts or {}).items():
            monomial = tuple(monomial)
            if monomial not in ring:
                raise DegreeError(f"{monomial} is not a basis monomial of {ring}")
            if vector.space != space:
                raise DegreeError("tensor coefficient outside the space")
            if not vector.is_zero():
                cleaned[monomial] = vector
        self.space = space
        self.ring = ring
        self._parts = cleaned

    @classmethod
    def single(cls, vector: Vector, ring: ArtinAlgebra, monomial: Monomial) -> "TensorElement":
        return cls(vector.space, ring, {monomial: vector})

    def items(self) -> List[Tuple[Monomial, Vector]]:
        return sorted(self._parts.items(), key=lambda kv: self.ring.index(kv[0]))

    def part(self, monomial: Monomial) -> Vector:
        return self._parts.get(tuple(monomial), Vector(self.space))

    def is_zero(self) -> bool:
        return not self._parts

    def _check(self, other: "TensorElement") -> None:
        if self.space != other.space or self.ring != other.ring:
            raise DegreeError("tensors live in different spaces or rings")

    def __add__(self, other: "TensorElement") -> "TensorElement":
        self._check(other)
        parts = dict(self._parts)
        for monomial, vector in other._parts.items():
            parts[monomial] = parts[monomial] + vector if monomial in parts else vector
        return TensorElement(self.space, self.ring, parts)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def __neg__(self) -> "TensorElement":
        return self.scale(-ONE)

    def scale(self, factor: Scalar) -> "TensorElement":
        return TensorElement(self.space, self.ring, {m: v.scale(factor) for m, v in self._parts.items()})

    def map_vectors(self, f: GradedLinearMap) -> "TensorElement":
        return TensorElement(f.target, self.ring, {m: f.apply(v) for m, v in self._parts.items()})

    def in_space(self, space: GradedSpace) -> "TensorElement":
        return TensorElement(space, self.ring, {m: v.in_space(space) for m, v in self._parts.items()})

    def restrict(self, monomials: Iterable[Monomial]) -> "TensorElement":
        keep = set(monomials)
        return TensorElement(self.space, self.ring, {m: v for m, v in self._parts.items() if m in keep})

    def degree(self) -> Optional[int]:
        degrees = {v.degree() for v in self._parts.values()}
        if not degrees:
            return None
        if len(degrees) > 1:
            raise DegreeError(f"tensor is not homogeneous: degrees {sorted(degrees)}")
        return degrees.pop()

    def __eq__(self, other) -> bool:
        return (isinstance(other, TensorElement) and self.space == other.space
                and self.ring == other.ring and self._parts == other._parts)

    def __hash__(self):
        return hash((self.ring, tuple(self.items())))

    def __repr__(self) -> str:
        terms = [f"{self.ring.label(m)}⊗{v!r}" for m, v in self.items()]
        return " + ".join(terms) or "0"


def describe_tensor(x: TensorElement) -> Dict[str, Dict[str, str]]:
    return {x.ring.label(m): describe_vector(v) for m, v in x.items()}


def tensor_d(g: DGLA, x: TensorElement) -> TensorElement:
    return x.map_vectors(g.d)


def tensor_bracket(g: DGLA, x: TensorElement, y: TensorElement) -> TensorElement:
    """[u⊗α, v⊗β] = [u, v]⊗αβ."""
    x._check(y)
    parts: Dict[Monomial, Vector] = {}
    for m1, u in x.items():
        for m2, v in y.items():
            m = x.ring.multiply(m1, m2)
            if m is None:
                continue
            value = g.bracket(u, v)
            parts[m] = parts[m] + value if m in parts else value
    return TensorElement(g.space, x.ring, parts)


def mc_residual(g: DGLA, a: TensorElement) -> TensorElement:
    """da + ½[a, a]."""
    return tensor_d(g, a) + tensor_bracket(g, a, a).scale(HALF)


@dataclass(frozen=True)
class MCElement:
    """An element of K^1⊗m_A together with its Maurer-Cartan residual."""

    dgla: DGLA
    element: TensorElement
    residual: TensorElement = field(compare=False)

    @classmethod
    def of(cls, g: DGLA, element: TensorElement) -> "MCElement":
        if element.space != g.space:
            raise DegreeError("Maurer-Cartan candidate is not in the DGLA")
        degree = element.degree()
        if degree not in (None, 1):
            raise DegreeError(f"Maurer-Cartan candidate has degree {degree}, expected 1")
        return cls(g, element, mc_residual(g, element))

    @property
    def ring(self) -> ArtinAlgebra:
        return self.element.ring

    @property
    def is_mc(self) -> bool:
        return self.residual.is_zero()


def gauge_act(g: DGLA, x: TensorElement, a: MCElement) -> MCElement:
    """
    exp(x)·a = a + Σ_{n>=0} ad_x^n([x, a] - dx)/(n+1)! for x in K^0⊗m_A.

    The sum stops once ad_x kills the term; nilpotency of m_A bounds it.
    """
    if x.degree() not in (None, 0):
        raise DegreeError(f"gauge element has degree {x.degree()}, expected 0")
    result = a.element
    term = tensor_bracket(g, x, a.element) - tensor_d(g, x)
    n = 0
    while not term.is_zero():
        result = result + term.scale(scalar(Fraction(1, factorial(n + 1))))
        term = tensor_bracket(g, x, term)
        n += 1
    return MCElement.of(g, result)


def bch(g: DGLA, x: TensorElement, y: TensorElement) -> TensorElement:
    """
    log(exp(x)exp(y)) through brackets of length four.

    Exact whenever m_A^5 = 0.
    """
    xy = tensor_bracket(g, x, y)
    third = tensor_bracket(g, x, xy) - tensor_bracket(g, y, xy)
    fourth = tensor_bracket(g, y, tensor_bracket(g, x, xy))
    return (x + y + xy.scale(HALF) + third.scale(scalar(Fraction(1, 12)))
            - fourth.scale(scalar(Fraction(1, 24))))


def check_gauge_action(g: DGLA, x: TensorElement, y: TensorElement, a: MCElement) -> Report:
    """MC preservation and exp(x)·(exp(y)·a) = exp(bch(x, y))·a."""
    report = Report("gauge action")
    moved = gauge_act(g, y, a)
    report.add("exp(y)·a is Maurer-Cartan", moved.is_mc or not a.is_mc,
               describe_tensor(moved.residual) if a.is_mc and not moved.is_mc else None)
    if a.ring.nilpotency > 5:
        report.add("group action through bch", True, detail="skipped: m_A^5 != 0")
        return report
    twice = gauge_act(g, x, moved)
    once = gauge_act(g, bch(g, x, y), a)
    difference = twice.element - once.element
    report.add("group action through bch", difference.is_zero(),
               describe_tensor(difference) if not difference.is_zero() else None)
    return report


class ArtinMorphism:
    """A local ring map A -> A' given by the images of the variables of A."""

    def __init__(self, source: ArtinAlgebra, target: ArtinAlgebra,
                 images: Mapping[str, Mapping[Monomial, Scalar]]):
        unknown = set(images) - set(source.variables)
        if unknown:
            raise PreconditionError("images given for unknown variables", witness=sorted(unknown))
        self.source = source
        self.target = target
        self.images: Dict[str, RingElement] = {}
        for name in source.variables:
            image: RingElement = {}
            for monomial, coeff in images.get(name, {}).items():
                monomial = tuple(monomial)
                if not any(monomial):
                    raise PreconditionError(f"image of {name} has a constant term", witness=name)
                if monomial in target and coeff:
                    image[monomial] = coeff
            self.images[name] = image
        for generator in source.ideal_generators():
            if self._image(generator):
                raise PreconditionError(f"relation {source.label(generator)} does not map to zero",
                                        witness=source.label(generator))
        self._cache: Dict[Monomial, RingElement] = {}

    def _image(self, monomial: Monomial) -> RingElement:
        result: RingElement = {self.target.unit: ONE}
        for name, e in zip(self.source.variables, monomial):
            for _ in range(e):
                result = self._times(result, self.images[name])
        return result

    def _times(self, left: RingElement, right: RingElement) -> RingElement:
        # the unit is not in the monomial basis, so multiply by hand
        result: RingElement = {}
        for m1, c1 in left.items():
            for m2, c2 in right.items():
                total = tuple(a + b for a, b in zip(m1, m2))
                if self.target.in_ideal(total):
                    continue
                result[total] = result.get(total, ZERO) + c1 * c2
        return {m: c for m, c in result.items() if c}

    def apply_monomial(self, monomial: Monomial) -> RingElement:
        monomial = tuple(monomial)
        if monomial not in self._cache:
            self._cache[monomial] = self._image(monomial)
        return self._cache[monomial]

    def push(self, x: TensorElement) -> TensorElement:
        if x.ring != self.source:
            raise DegreeError(f"tensor is over {x.ring}, morphism starts at {self.source}")
        parts: Dict[Monomial, Vector] = {}
        for monomial, vector in x.items():
            for image, coeff in self.apply_monomial(monomial).items():
                value = vector.scale(coeff)
                parts[image] = parts[image] + value if image in parts else value
        return TensorElement(x.space, self.target, parts)

    def induced(self, source: ArtinAlgebra, target: ArtinAlgebra) -> "ArtinMorphism":
        """The same variable images read between quotients of source and target."""
        images = {name: {m: c for m, c in image.items() if m in target}
                  for name, image in self.images.items()}
        return ArtinMorphism(source, target, images)


class SmallExtension:
    """
    0 -> J -> A -> B -> 0 with B a monomial quotient of A and J·m_A = 0.

    The projection keeps the monomials of B; J is spanned by the remaining
    monomials of A, listed in ring order.
    """

    def __init__(self, A: ArtinAlgebra, B: ArtinAlgebra):
        if A.variables != B.variables:
            raise PreconditionError("extension rings use different variables")
        missing = [B.label(m) for m in B.monomials if m not in A]
        if missing:
            raise PreconditionError("B is not a quotient of A", witness=missing[0])
        for m1, m2 in product(B.monomials, repeat=2):
            in_b = B.multiply(m1, m2)
            if in_b is not None and A.multiply(m1, m2) != in_b:
                raise PreconditionError("projection A -> B is not a ring map",
                                        witness=[B.label(m1), B.label(m2)])
        self.A = A
        self.B = B
        self.J: List[Monomial] = [m for m in A.monomials if m not in B]
        for j, m in product(self.J, A.monomials):
            if A.multiply(j, m) is not None:
                raise PreconditionError("J·m_A != 0; extension is not small",
                                        witness=[A.label(j), A.label(m)])

    @classmethod
    def epsilon(cls) -> "SmallExtension":
        """C[t]/(t^3) -> C[t]/(t^2) with J = (t^2)."""
        return cls(make_truncated_line(3), make_truncated_line(2))

    @classmethod
    def curvilinear(cls, n: int) -> "SmallExtension":
        """C[t]/(t^(n+1)) -> C[t]/(t^n) with J = (t^n)."""
        return cls(make_truncated_line(n + 1), make_truncated_line(n))

    def project(self, x: TensorElement) -> TensorElement:
        if x.ring != self.A:
            raise DegreeError(f"tensor is over {x.ring}, expected {self.A}")
        return TensorElement(x.space, self.B, {m: v for m, v in x.items() if m in self.B})

    def section(self, x: TensorElement) -> TensorElement:
        """Lift by sending each monomial of B to the same monomial of A."""
        if x.ring != self.B:
            raise DegreeError(f"tensor is over {x.ring}, expected {self.B}")
        return TensorElement(x.space, self.A, dict(x.items()))

    def __str__(self) -> str:
        return f"{self.A} -> {self.B}"


def dgla_cohomology(g: DGLA) -> Cohomology:
    return cohomology(g.space, g.d)


@dataclass(frozen=True)
class ObstructionRecord:
    """ob_e(b): the lift used, the cocycle h in K^2⊗J and its class per J monomial."""

    extension: SmallExtension
    input: MCElement
    lift: TensorElement
    cocycle: TensorElement
    classes: Dict[Monomial, Vector] = field(compare=False)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.classes.values())

    def to_dict(self) -> Dict:
        ring = self.extension.A
        return {
            "extension": str(self.extension),
            "lift": describe_tensor(self.lift),
            "cocycle": describe_tensor(self.cocycle),
            "class": {ring.label(j): describe_vector(c) for j, c in self.classes.items()},
            "zero": self.is_zero,
        }


def obstruction(e: SmallExtension, b: MCElement,
                perturbation: Optional[TensorElement] = None) -> ObstructionRecord:
    """
    Obstruction to lifting b along e.

    The lift is the monomial section of b, plus ``perturbation`` (an element
    of K^1⊗J) when given; the class does not depend on it.
    """
    g = b.dgla
    if b.ring != e.B:
        raise PreconditionError(f"element is over {b.ring}, extension ends at {e.B}")
    if not b.is_mc:
        raise NotMaurerCartanError(f"element is not Maurer-Cartan over {e.B}", residual=b.residual)
    lift = e.section(b.element)
    if perturbation is not None:
        stray = [e.A.label(m) for m, _ in perturbation.items() if m not in e.J]
        if stray or perturbation.degree() not in (None, 1):
            raise PreconditionError("perturbation must lie in K^1⊗J", witness=stray[0] if stray else None)
        lift = lift + perturbation
    h = mc_residual(g, lift)
    stray = [e.A.label(m) for m, _ in h.items() if m not in e.J]
    if stray:
        raise PreconditionError("residual of the lift leaves K^2⊗J", witness=stray[0])
    for monomial, vector in h.items():
        if not g.d.apply(vector).is_zero():
            raise NotACocycleError(f"obstruction cocycle is not closed at {e.A.label(monomial)}")
    H = dgla_cohomology(g)
    classes = {j: H.proj(h.part(j)) for j in e.J}
    logger.debug("obstruction along %s: %s", e, {e.A.label(j): c for j, c in classes.items()})
    return ObstructionRecord(e, b, lift, h, classes)


def _lift_from_record(record: ObstructionRecord) -> Optional[MCElement]:
    g = record.input.dgla
    e = record.extension
    correction: Dict[Monomial, Vector] = {}
    for j in e.J:
        target = record.cocycle.part(j)
        if target.is_zero():
            continue
        c = preimage(g.d, -target)
        if c is None:
            return None
        correction[j] = c
    lifted = MCElement.of(g, record.lift + TensorElement(g.space, e.A, correction))
    if not lifted.is_mc:
        raise NotMaurerCartanError("corrected lift is not Maurer-Cartan", residual=lifted.residual)
    return lifted


def lift_mc(e: SmallExtension, b: MCElement) -> Optional[MCElement]:
    """A Maurer-Cartan lift of b over A, or None when ob_e(b) != 0."""
    return _lift_from_record(obstruction(e, b))


def primary_obstruction(g: DGLA, b_class: Vector) -> Vector:
    """q_2(b): obstruction of t·b over C[t]/(t^2) along epsilon, as a class in H^2."""
    H = dgla_cohomology(g)
    if b_class.space != H.space:
        raise DegreeError("primary obstruction takes a cohomology class of the DGLA")
    if b_class.degree() not in (None, 1):
        raise DegreeError(f"class has degree {b_class.degree()}, expected 1")
    e = SmallExtension.epsilon()
    a = MCElement.of(g, TensorElement(g.space, e.B, {(1,): H.rep(b_class)}))
    return obstruction(e, a).classes[(2,)]


def solve_mc_order_by_order(g: DGLA, start: Vector,
                            n_max: int) -> Tuple[MCElement, List[ObstructionRecord]]:
    """
    Extend t·start along C[t]/(t^n) for n = 2, ..., n_max + 1.

    One record per order, stopping after the first nonzero obstruction.
    Returns the last Maurer-Cartan element reached and the records.
    """
    if start.space != g.space:
        raise DegreeError("starting element is not in the DGLA")
    if not g.d.apply(start).is_zero():
        raise NotACocycleError(f"{start!r} is not closed")
    current = MCElement.of(g, TensorElement(g.space, make_truncated_line(2), {(1,): start}))
    records: List[ObstructionRecord] = []
    for n in range(2, n_max + 1):
        record = obstruction(SmallExtension.curvilinear(n), current)
        records.append(record)
        if not record.is_zero:
            logger.info("curvilinear tower stops at order %d", n)
            break
        current = _lift_from_record(record)
    return current, records


def curvilinear_obstructions(g: DGLA, b_class: Vector, n_max: int) -> List[Vector]:
    """Obstruction classes at orders 2, 3, ... (entry k is order k + 2)."""
    H = dgla_cohomology(g)
    _, records = solve_mc_order_by_order(g, H.rep(b_class), n_max)
    return [record.classes[record.extension.J[-1]] for record in records]


def obstruction_span(classes: Iterable[Vector]) -> List[Vector]:
    """A basis of the span of the given classes, picked from the classes themselves."""
    classes = [c for c in classes if not c.is_zero()]
    if not classes:
        return []
    names = classes[0].space.names
    matrix = [[vector_coords(c, names)[i] for c in classes] for i in range(len(names))]
    _, pivots = rref(matrix, len(classes))
    return [classes[p] for p in pivots]


def check_functoriality(e: SmallExtension, e_prime: SmallExtension, phi: ArtinMorphism,
                        b: MCElement) -> Report:
    """ob_{e'}(phi_B b) equals phi applied to ob_e(b), for phi: A -> A' mapping J into J'."""
    report = Report("obstruction functoriality")
    if phi.source != e.A or phi.target != e_prime.A:
        raise PreconditionError("ring map does not connect the two extensions")
    phi_B = phi.induced(e.B, e_prime.B)
    record = obstruction(e, b)
    pushed: Dict[Monomial, Vector] = {}
    outside: List[str] = []
    for j, cls in record.classes.items():
        for image, coeff in phi.apply_monomial(j).items():
            if image not in e_prime.J:
                outside.append(e_prime.A.label(image))
                continue
            value = cls.scale(coeff)
            pushed[image] = pushed[image] + value if image in pushed else value
    report.add("phi(J) lies in J'", not outside, outside[0] if outside else None)
    image_record = obstruction(e_prime, MCElement.of(b.dgla, phi_B.push(b.element)))
    bad = None
    for j in e_prime.J:
        expected = pushed.get(j)
        actual = image_record.classes[j]
        if (expected is None and not actual.is_zero()) or (expected is not None and expected != actual):
            bad = e_prime.A.label(j)
            break
    report.add("ob_e' after phi = phi after ob_e", bad is None, bad)
    return report


def pushforward(F: Family, a: Union[MCElement, TensorElement]) -> TensorElement:
    """
    Θ̃(a) = Σ_{m>=1} F_m(a^{⊙m})/m!, a finite sum by nilpotency.

    ``a`` is read in the source of F (K^1 entries become L^0 entries).
    """
    element = a.element if isinstance(a, MCElement) else a
    if element.space.names != F.source.names:
        raise DegreeError("element and family live on different spaces")
    ring = element.ring
    terms = [(m, v.in_space(F.source)) for m, v in element.items()]
    parts: Dict[Monomial, Vector] = {}
    for m in range(1, ring.nilpotency):
        weight = scalar(Fraction(1, factorial(m)))
        for combo in product(terms, repeat=m):
            monomial: Optional[Monomial] = combo[0][0]
            for other, _ in combo[1:]:
                monomial = ring.multiply(monomial, other)
                if monomial is None:
                    break
            if monomial is None:
                continue
            value = F.evaluate(symmetric_product(F.source, [v for _, v in combo], weight))
            if value.is_zero():
                continue
            parts[monomial] = parts[monomial] + value if monomial in parts else value
    return TensorElement(F.target, ring, parts)


def linear_cohomology_map(F: Family, g: DGLA) -> GradedLinearMap:
    """The map H(K, d) -> target induced by F_1; the target differential is taken to be zero."""
    H = dgla_cohomology(g)
    columns = {name: F.linear_part(rep.in_space(F.source)) for name, rep in H.representatives.items()}
    return GradedLinearMap(H.space, F.target, F.degree - 1, columns)


def tower_samples(g: DGLA, n_max: int) -> List[Tuple[SmallExtension, MCElement]]:
    """(extension, element) pairs met while running the curvilinear tower from each H^1 basis class."""
    H = dgla_cohomology(g)
    samples = []
    for name in H.space.names_of_degree(1):
        _, records = solve_mc_order_by_order(g, H.representatives[name], n_max)
        samples.extend((record.extension, record.input) for record in records)
    return samples


def check_annihilation(g: DGLA, mu11: GradedLinearMap,
                       samples: Sequence[Tuple[SmallExtension, MCElement]]) -> Report:
    """Every sampled obstruction class is killed by the H^2-level map mu11."""
    report = Report("obstruction annihilation")
    records = parallel_map(lambda sample: obstruction(*sample), samples)
    witness = None
    classes = []
    for index, record in enumerate(records):
        for j, cls in record.classes.items():
            classes.append(cls)
            if witness is None and not mu11.apply(cls).is_zero():
                witness = {"sample": index, "monomial": record.extension.A.label(j),
                           "class": describe_vector(cls)}
    report.add("mu_1 kills every obstruction class", witness is None, witness)
    span = obstruction_span(classes)
    report.data["samples"] = len(records)
    report.data["obstruction_span"] = [describe_vector(c) for c in span]
    report.data["obstruction_span_is_lower_bound"] = True
    return report


def _restricted_matrix(d: GradedLinearMap, degree: int) -> List[List[Scalar]]:
    rows = d.target.names_of_degree(degree + 1)
    cols = d.source.names_of_degree(degree)
    return [[d.column(c)[r] for c in cols] for r in rows]


def tangent_space(g: DGLA) -> Tuple[GradedSpace, Report]:
    """
    H^1(K) and a comparison with Def_K over the dual numbers.

    Over C[t]/(t^2) the Maurer-Cartan set is Z^1⊗t and gauge moves
    translate by d(K^0)⊗t, so Def_K is H^1⊗t.
    """
    H = dgla_cohomology(g)
    h1 = GradedSpace(tuple(H.space.element(name) for name in H.space.names_of_degree(1)))
    ring = make_truncated_line(2)
    report = Report("tangent space")

    k0 = g.space.names_of_degree(0)
    k1 = g.space.names_of_degree(1)
    cycles = [Vector(g.space, dict(zip(k1, coords)))
              for coords in kernel_basis(_restricted_matrix(g.d, 1), len(k1))]
    bad = next((describe_vector(z) for z in cycles
                if not MCElement.of(g, TensorElement.single(z, ring, (1,))).is_mc), None)
    if bad is None:
        bad = next((v for v in k1 if not g.d.column(v).is_zero()
                    and MCElement.of(g, TensorElement.single(Vector.basis_vector(g.space, v), ring, (1,))).is_mc),
                   None)
    report.add("MC over dual numbers = Z^1⊗t", bad is None, bad)

    origin = MCElement.of(g, TensorElement(g.space, ring))
    bad = None
    for x in k0:
        moved = gauge_act(g, TensorElement.single(Vector.basis_vector(g.space, x), ring, (1,)), origin)
        expected = TensorElement(g.space, ring, {(1,): -g.d.column(x)})
        if moved.element != expected:
            bad = x
            break
    report.add("gauge acts by d(K^0) translations", bad is None, bad)

    boundaries = rank(_restricted_matrix(g.d, 0), len(k0))
    report.add("dim Def = dim H^1", len(cycles) - boundaries == h1.dim,
               {"cycles": len(cycles), "boundaries": boundaries, "h1": h1.dim}
               if len(cycles) - boundaries != h1.dim else None)
    report.data["dimension"] = h1.dim
    report.data["representatives"] = {name: describe_vector(H.representatives[name]) for name in h1.names}
    return h1, report

