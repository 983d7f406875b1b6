"""
Graded vector spaces, sparse vectors, graded linear maps and the sign
combinatorics (Koszul signs, unshuffles, graded commutators).
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from linfty.exceptions import DegreeError
from linfty.scalars import ONE, ZERO, Scalar, sign

logger = logging.getLogger(__name__)

Bidegree = Tuple[int, int]


@dataclass(frozen=True)
class BasisElement:
    """A named homogeneous basis vector; ``degree`` is taken in the unshifted space."""

    name: str
    degree: int
    bidegree: Optional[Bidegree] = None


@dataclass(frozen=True)
class GradedSpace:
    """
    Finite-dimensional graded space with a named, ordered basis.

    ``shift`` is the n of V[n]; deg(a, V[n]) = deg(a, V) - n.
    """

    basis: Tuple[BasisElement, ...]
    shift: int = 0
    _index: Dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        index = {}
        for position, element in enumerate(self.basis):
            if element.name in index:
                raise DegreeError(f"duplicate basis name {element.name!r}")
            if element.bidegree is not None and sum(element.bidegree) != element.degree:
                raise DegreeError(
                    f"{element.name}: bidegree {element.bidegree} does not sum to degree {element.degree}"
                )
            index[element.name] = position
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_degrees(cls, degrees: Mapping[str, int]) -> "GradedSpace":
        return cls(tuple(BasisElement(name, deg) for name, deg in degrees.items()))

    @classmethod
    def from_bidegrees(cls, bidegrees: Mapping[str, Bidegree]) -> "GradedSpace":
        return cls(tuple(BasisElement(name, p + q, (p, q)) for name, (p, q) in bidegrees.items()))

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(element.name for element in self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def has_bidegrees(self) -> bool:
        return bool(self.basis) and all(e.bidegree is not None for e in self.basis)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise DegreeError(f"{name!r} is not a basis element") from None

    def element(self, name: str) -> BasisElement:
        return self.basis[self.index(name)]

    def degree(self, name: str) -> int:
        return self.element(name).degree - self.shift

    def bidegree(self, name: str) -> Optional[Bidegree]:
        return self.element(name).bidegree

    def degrees(self) -> List[int]:
        return sorted({self.degree(name) for name in self.names})

    def names_of_degree(self, degree: int) -> List[str]:
        return [name for name in self.names if self.degree(name) == degree]

    def names_of_bidegree(self, bidegree: Bidegree) -> List[str]:
        return [e.name for e in self.basis if e.bidegree == tuple(bidegree)]


def shift(space: GradedSpace, n: int) -> GradedSpace:
    """Return V[n]: same basis, every degree lowered by n. Shifts compose additively."""
    if n == 0:
        return space
    return GradedSpace(space.basis, space.shift + n)


class Vector:
    """Immutable sparse vector over a GradedSpace; zero coefficients are never stored."""

    __slots__ = ("space", "_coords")

    def __init__(self, space: GradedSpace, coords: Optional[Mapping[str, Scalar]] = None):
        self.space = space
        cleaned = {}
        for name, coeff in (coords or {}).items():
            space.index(name)
            if coeff:
                cleaned[name] = coeff
        self._coords = dict(sorted(cleaned.items(), key=lambda item: space.index(item[0])))

    @classmethod
    def zero(cls, space: GradedSpace) -> "Vector":
        return cls(space)

    @classmethod
    def basis_vector(cls, space: GradedSpace, name: str, coeff: Scalar = ONE) -> "Vector":
        return cls(space, {name: coeff})

    def items(self) -> Iterator[Tuple[str, Scalar]]:
        return iter(self._coords.items())

    def to_dict(self) -> Dict[str, Scalar]:
        return dict(self._coords)

    def __getitem__(self, name: str) -> Scalar:
        return self._coords.get(name, ZERO)

    def __len__(self) -> int:
        return len(self._coords)

    def is_zero(self) -> bool:
        return not self._coords

    def in_space(self, space: GradedSpace) -> "Vector":
        """Same coordinates read in another space with the same basis names (e.g. V versus V[1])."""
        return Vector(space, self._coords)

    def support(self) -> List[str]:
        return list(self._coords)

    def _check(self, other: "Vector") -> None:
        if other.space != self.space:
            raise DegreeError("vectors live in different spaces")

    def __add__(self, other: "Vector") -> "Vector":
        self._check(other)
        coords = dict(self._coords)
        for name, coeff in other.items():
            coords[name] = coords.get(name, ZERO) + coeff
        return Vector(self.space, coords)

    def __sub__(self, other: "Vector") -> "Vector":
        return self + (-other)

    def __neg__(self) -> "Vector":
        return Vector(self.space, {name: -coeff for name, coeff in self.items()})

    def scale(self, factor: Scalar) -> "Vector":
        if not factor:
            return Vector(self.space)
        return Vector(self.space, {name: factor * coeff for name, coeff in self.items()})

    def __rmul__(self, factor: Scalar) -> "Vector":
        return self.scale(factor)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vector) and self.space == other.space and self._coords == other._coords

    def __hash__(self):
        return hash((self.space, tuple(self._coords.items())))

    def degree(self) -> Optional[int]:
        """Common degree of the support; None for the zero vector."""
        degrees = {self.space.degree(name) for name in self._coords}
        if len(degrees) > 1:
            raise DegreeError(f"inhomogeneous vector with degrees {sorted(degrees)}")
        return degrees.pop() if degrees else None

    def __repr__(self) -> str:
        from linfty.scalars import format_scalar

        body = " + ".join(f"({format_scalar(c)}){n}" for n, c in self.items())
        return f"Vector({body or '0'})"


def combine(space: GradedSpace, terms: Iterable[Tuple[Scalar, Vector]]) -> Vector:
    """Linear combination sum(c * v) without building intermediate vectors."""
    coords: Dict[str, Scalar] = {}
    for coeff, vector in terms:
        if not coeff:
            continue
        for name, value in vector.items():
            coords[name] = coords.get(name, ZERO) + coeff * value
    return Vector(space, coords)


class GradedLinearMap:
    """
    Sparse graded linear map, stored column by column.

    ``columns[s]`` is the image of the basis element ``s`` of the source.
    """

    def __init__(self, source: GradedSpace, target: GradedSpace, degree: int,
                 columns: Optional[Mapping[str, Mapping[str, Scalar]]] = None,
                 bidegree: Optional[Bidegree] = None):
        self.source = source
        self.target = target
        self.degree = degree
        self.bidegree = tuple(bidegree) if bidegree is not None else None
        cols: Dict[str, Vector] = {}
        for src, image in (columns or {}).items():
            vector = image if isinstance(image, Vector) else Vector(target, image)
            if vector.space != target:
                raise DegreeError("column lives outside the target space")
            source.index(src)
            if not vector.is_zero():
                cols[src] = vector
        self._columns = dict(sorted(cols.items(), key=lambda item: source.index(item[0])))
        self._validate()

    def _validate(self) -> None:
        check_bidegree = (self.bidegree is not None and self.source.has_bidegrees
                          and self.target.has_bidegrees)
        for src, image in self._columns.items():
            for tgt, _ in image.items():
                if self.target.degree(tgt) != self.source.degree(src) + self.degree:
                    raise DegreeError(
                        f"entry {src} -> {tgt} breaks map degree {self.degree}"
                    )
                if check_bidegree:
                    sp, sq = self.source.bidegree(src)
                    tp, tq = self.target.bidegree(tgt)
                    if (tp - sp, tq - sq) != self.bidegree:
                        raise DegreeError(
                            f"entry {src} -> {tgt} breaks map bidegree {self.bidegree}"
                        )

    @classmethod
    def identity(cls, space: GradedSpace) -> "GradedLinearMap":
        return cls(space, space, 0, {name: {name: ONE} for name in space.names}, bidegree=(0, 0))

    @classmethod
    def zero(cls, source: GradedSpace, target: GradedSpace, degree: int = 0,
             bidegree: Optional[Bidegree] = None) -> "GradedLinearMap":
        return cls(source, target, degree, {}, bidegree=bidegree)

    @classmethod
    def from_function(cls, source: GradedSpace, target: GradedSpace, degree: int, func,
                      bidegree: Optional[Bidegree] = None) -> "GradedLinearMap":
        """Tabulate ``func(name) -> Vector`` on the source basis."""
        return cls(source, target, degree, {name: func(name) for name in source.names},
                   bidegree=bidegree)

    def column(self, name: str) -> Vector:
        self.source.index(name)
        return self._columns.get(name, Vector(self.target))

    def columns(self) -> Iterator[Tuple[str, Vector]]:
        return iter(self._columns.items())

    def entries(self) -> List[Tuple[str, str, Scalar]]:
        """Sparse (source, target, value) triplets in basis order."""
        return [(src, tgt, value) for src, image in self._columns.items() for tgt, value in image.items()]

    def apply(self, vector: Vector) -> Vector:
        if vector.space != self.source:
            raise DegreeError("vector is not in the source space")
        return combine(self.target, ((coeff, self._columns[name]) for name, coeff in vector.items()
                                     if name in self._columns))

    __call__ = apply

    def compose(self, other: "GradedLinearMap") -> "GradedLinearMap":
        """Return self ∘ other."""
        if other.target != self.source:
            raise DegreeError("maps are not composable")
        bidegree = None
        if self.bidegree is not None and other.bidegree is not None:
            bidegree = (self.bidegree[0] + other.bidegree[0], self.bidegree[1] + other.bidegree[1])
        columns = {name: self.apply(image) for name, image in other.columns()}
        return GradedLinearMap(other.source, self.target, self.degree + other.degree, columns,
                               bidegree=bidegree)

    __matmul__ = compose

    def _check_same_shape(self, other: "GradedLinearMap") -> None:
        if (self.source, self.target) != (other.source, other.target):
            raise DegreeError("maps have different source or target")
        if self.degree != other.degree and not (self.is_zero() or other.is_zero()):
            raise DegreeError(f"cannot add maps of degrees {self.degree} and {other.degree}")

    def __add__(self, other: "GradedLinearMap") -> "GradedLinearMap":
        self._check_same_shape(other)
        columns = {name: self.column(name) + other.column(name) for name in self.source.names}
        degree = self.degree if not self.is_zero() else other.degree
        bidegree = self.bidegree if self.bidegree == other.bidegree else None
        return GradedLinearMap(self.source, self.target, degree, columns, bidegree=bidegree)

    def __sub__(self, other: "GradedLinearMap") -> "GradedLinearMap":
        return self + (-other)

    def __neg__(self) -> "GradedLinearMap":
        return self.scale(-ONE)

    def scale(self, factor: Scalar) -> "GradedLinearMap":
        return GradedLinearMap(self.source, self.target, self.degree,
                               {name: image.scale(factor) for name, image in self.columns()},
                               bidegree=self.bidegree)

    def __rmul__(self, factor: Scalar) -> "GradedLinearMap":
        return self.scale(factor)

    def is_zero(self) -> bool:
        return not self._columns

    def first_nonzero(self) -> Optional[str]:
        """First source basis element (in basis order) with a nonzero image."""
        return next(iter(self._columns), None)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedLinearMap):
            return NotImplemented
        if (self.source, self.target) != (other.source, other.target):
            return False
        if self._columns != other._columns:
            return False
        return self.is_zero() or self.degree == other.degree

    def __hash__(self):
        return hash((self.source, self.target, tuple(self.entries())))

    def __repr__(self) -> str:
        return f"GradedLinearMap(degree={self.degree}, nonzero_columns={list(self._columns)})"


@dataclass(frozen=True)
class Unshuffle:
    """A permutation with sigma[0] < ... < sigma[p-1] and sigma[p] < ... < sigma[m-1] (0-based)."""

    m: int
    p: int
    sigma: Tuple[int, ...]

    def one_based(self) -> Tuple[int, ...]:
        return tuple(i + 1 for i in self.sigma)


def unshuffles(p: int, q: int) -> List[Unshuffle]:
    """
    All unshuffles of type (p, q), ordered lexicographically by their first block.

    Args:
        p: Size of the first block
        q: Size of the second block

    Returns:
        binomial(p + q, p) unshuffles
    """
    if p < 0 or q < 0:
        return []
    m = p + q
    result = []
    for first in combinations(range(m), p):
        chosen = set(first)
        rest = tuple(i for i in range(m) if i not in chosen)
        result.append(Unshuffle(m, p, tuple(first) + rest))
    return result


def _check_permutation(sigma: Sequence[int], m: int) -> None:
    if len(sigma) != m or sorted(sigma) != list(range(m)):
        raise DegreeError(f"{tuple(sigma)} is not a permutation of {m} elements")


def koszul_sign_degrees(degrees: Sequence[int], sigma: Sequence[int]) -> Scalar:
    """Koszul sign of a permutation acting on elements of the given degrees."""
    _check_permutation(sigma, len(degrees))
    exponent = 0
    for i in range(len(sigma)):
        for j in range(i + 1, len(sigma)):
            if sigma[i] > sigma[j]:
                exponent += degrees[sigma[i]] * degrees[sigma[j]]
    return sign(exponent)


def koszul_sign(space: GradedSpace, sigma, elems: Sequence[str]) -> Scalar:
    """
    The sign e with a_{s1} ⊙ ... ⊙ a_{sm} = e * a_1 ⊙ ... ⊙ a_m in the symmetric
    power of ``space``. Depends on degrees in ``space`` only.

    Args:
        space: Graded space the elements are taken in
        sigma: 0-based permutation (or an Unshuffle)
        elems: Basis names a_1, ..., a_m

    Returns:
        ONE or -ONE
    """
    if isinstance(sigma, Unshuffle):
        sigma = sigma.sigma
    return koszul_sign_degrees([space.degree(e) for e in elems], sigma)


def graded_commutator(f: GradedLinearMap, g: GradedLinearMap) -> GradedLinearMap:
    """[f, g] = f∘g - (-1)^{|f||g|} g∘f for endomorphisms of one space."""
    spaces = {f.source, f.target, g.source, g.target}
    if len(spaces) != 1:
        raise DegreeError("graded commutator needs endomorphisms of a single space")
    return f.compose(g) - g.compose(f).scale(sign(f.degree * g.degree))


def hom_space(source: GradedSpace, target: GradedSpace) -> GradedSpace:
    """Hom*(source, target) with basis ``t|s`` of degree deg(t) - deg(s)."""
    elements = []
    bigraded = source.has_bidegrees and target.has_bidegrees
    for t in target.names:
        for s in source.names:
            bidegree = None
            if bigraded:
                (tp, tq), (sp, sq) = target.bidegree(t), source.bidegree(s)
                bidegree = (tp - sp, tq - sq)
            elements.append(BasisElement(f"{t}|{s}", target.degree(t) - source.degree(s), bidegree))
    return GradedSpace(tuple(elements))


def map_to_vector(f: GradedLinearMap, hom: GradedSpace) -> Vector:
    """Flatten a map into the hom space built by hom_space(f.source, f.target)."""
    return Vector(hom, {f"{tgt}|{src}": value for src, tgt, value in f.entries()})


def vector_to_map(vector: Vector, source: GradedSpace, target: GradedSpace) -> GradedLinearMap:
    """Inverse of map_to_vector for a homogeneous vector."""
    columns: Dict[str, Dict[str, Scalar]] = {}
    for name, value in vector.items():
        tgt, src = name.split("|", 1)
        columns.setdefault(src, {})[tgt] = value
    degree = vector.degree()
    return GradedLinearMap(source, target, 0 if degree is None else degree, columns)
