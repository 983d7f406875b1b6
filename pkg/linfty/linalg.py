"""
Exact linear algebra over QQ_I: reduced row echelon forms, kernels, particular
solutions, inverses, metric checks, cohomology and adjoints.

Dense work is delegated to sympy's DomainMatrix; graded bookkeeping stays in
linfty.graded.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix
from sympy.polys.domains import QQ_I

from linfty.exceptions import DegreeError, DifferentialError, MetricError, NotACocycleError
from linfty.graded import BasisElement, GradedLinearMap, GradedSpace, Vector
from linfty.scalars import ONE, ZERO, Scalar, conjugate

logger = logging.getLogger(__name__)

Matrix = List[List[Scalar]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[ZERO] * cols for _ in range(rows)]


def identity_matrix(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def _domain(matrix: Matrix, cols: int) -> DomainMatrix:
    return DomainMatrix([list(row) for row in matrix], (len(matrix), cols), QQ_I)


def rref(matrix: Matrix, cols: int) -> Tuple[Matrix, Tuple[int, ...]]:
    """Reduced row echelon form and pivot columns of a rows x cols matrix."""
    if not matrix or cols == 0:
        return [list(row) for row in matrix], ()
    reduced, pivots = _domain(matrix, cols).rref()
    return reduced.to_list(), tuple(pivots)


def rank(matrix: Matrix, cols: int) -> int:
    return len(rref(matrix, cols)[1])


def kernel_basis(matrix: Matrix, cols: int) -> List[List[Scalar]]:
    """
    Basis of the null space, one vector per free column in increasing order.

    Args:
        matrix: Row-major matrix
        cols: Number of columns (needed when the matrix has no rows)

    Returns:
        List of column vectors of length ``cols``
    """
    reduced, pivots = rref(matrix, cols)
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        vector = [ZERO] * cols
        vector[free] = ONE
        for row, pivot in enumerate(pivots):
            vector[pivot] = -reduced[row][free]
        basis.append(vector)
    return basis


def solve(matrix: Matrix, rhs: Sequence[Scalar], cols: int) -> Optional[List[Scalar]]:
    """
    Particular solution of matrix @ x = rhs with every free variable set to zero.

    Returns None when the system is inconsistent.
    """
    if not matrix:
        return [ZERO] * cols if not any(rhs) else None
    augmented = [list(row) + [value] for row, value in zip(matrix, rhs)]
    reduced, pivots = rref(augmented, cols + 1)
    if cols in pivots:
        return None
    solution = [ZERO] * cols
    for row, pivot in enumerate(pivots):
        solution[pivot] = reduced[row][cols]
    return solution


def inverse(matrix: Matrix) -> Matrix:
    n = len(matrix)
    if n == 0:
        return []
    return _domain(matrix, n).inv().to_list()


def determinant(matrix: Matrix) -> Scalar:
    n = len(matrix)
    if n == 0:
        return ONE
    return _domain(matrix, n).det()


def matmul(left: Matrix, right: Matrix, inner: int, cols: int) -> Matrix:
    result = zeros(len(left), cols)
    for i, row in enumerate(left):
        for k in range(inner):
            a = row[k]
            if not a:
                continue
            for j in range(cols):
                b = right[k][j]
                if b:
                    result[i][j] += a * b
    return result


def conjugate_transpose(matrix: Matrix, cols: int) -> Matrix:
    return [[conjugate(matrix[i][j]) for i in range(len(matrix))] for j in range(cols)]


def is_hermitian(matrix: Matrix) -> bool:
    n = len(matrix)
    return all(matrix[i][j] == conjugate(matrix[j][i]) for i in range(n) for j in range(n))


def positive_definite(matrix: Matrix) -> bool:
    """Sylvester's criterion for a Hermitian matrix: all leading principal minors are positive reals."""
    if not is_hermitian(matrix):
        return False
    for k in range(1, len(matrix) + 1):
        minor = determinant([row[:k] for row in matrix[:k]])
        if minor.y or minor.x <= 0:
            return False
    return True


def map_matrix(f: GradedLinearMap) -> Matrix:
    """Dense matrix of f, rows indexed by target basis, columns by source basis."""
    matrix = zeros(f.target.dim, f.source.dim)
    for src, tgt, value in f.entries():
        matrix[f.target.index(tgt)][f.source.index(src)] = value
    return matrix


def matrix_map(matrix: Matrix, source: GradedSpace, target: GradedSpace, degree: int,
               bidegree=None) -> GradedLinearMap:
    columns: Dict[str, Dict[str, Scalar]] = {}
    for j, src in enumerate(source.names):
        column = {tgt: matrix[i][j] for i, tgt in enumerate(target.names) if matrix[i][j]}
        if column:
            columns[src] = column
    return GradedLinearMap(source, target, degree, columns, bidegree=bidegree)


def vector_coords(vector: Vector, names: Sequence[str]) -> List[Scalar]:
    return [vector[name] for name in names]


def kernel(f: GradedLinearMap) -> List[Vector]:
    """Kernel basis of f as vectors of f.source, in free-column order."""
    names = f.source.names
    vectors = kernel_basis(map_matrix(f), len(names))
    return [Vector(f.source, dict(zip(names, coords))) for coords in vectors]


def preimage(f: GradedLinearMap, target_vector: Vector) -> Optional[Vector]:
    """Some v with f(v) = target_vector (free coordinates zero), or None."""
    names = f.source.names
    solution = solve(map_matrix(f), vector_coords(target_vector, f.target.names), len(names))
    if solution is None:
        return None
    return Vector(f.source, dict(zip(names, solution)))


def _component_key(element: BasisElement):
    return element.bidegree if element.bidegree is not None else element.degree


class InnerProduct:
    """
    Hermitian inner product <u, v> = u^H G v on a graded space.

    The Gram matrix must be Hermitian, positive-definite and orthogonal across
    distinct (bi)degree components; otherwise MetricError is raised.
    """

    def __init__(self, space: GradedSpace, gram: Matrix):
        self.space = space
        self.gram = [list(row) for row in gram]
        self._check()
        self._gram_inverse = inverse(self.gram)

    @classmethod
    def orthonormal(cls, space: GradedSpace) -> "InnerProduct":
        return cls(space, identity_matrix(space.dim))

    @classmethod
    def diagonal(cls, space: GradedSpace, weights: Dict[str, Scalar]) -> "InnerProduct":
        gram = identity_matrix(space.dim)
        for name, weight in weights.items():
            index = space.index(name)
            gram[index][index] = weight
        return cls(space, gram)

    def _check(self) -> None:
        n = self.space.dim
        if len(self.gram) != n or any(len(row) != n for row in self.gram):
            raise MetricError(f"Gram matrix must be {n}x{n}")
        if not is_hermitian(self.gram):
            raise MetricError("Gram matrix is not Hermitian")
        basis = self.space.basis
        for i in range(n):
            for j in range(n):
                if self.gram[i][j] and _component_key(basis[i]) != _component_key(basis[j]):
                    raise MetricError(
                        f"components of {basis[i].name} and {basis[j].name} are not orthogonal"
                    )
        if not positive_definite(self.gram):
            raise MetricError("Gram matrix is not positive-definite")

    @property
    def gram_inverse(self) -> Matrix:
        return self._gram_inverse

    def pair(self, u: Vector, v: Vector) -> Scalar:
        total = ZERO
        for a, ua in u.items():
            i = self.space.index(a)
            for b, vb in v.items():
                g = self.gram[i][self.space.index(b)]
                if g:
                    total += conjugate(ua) * g * vb
        return total

    def __eq__(self, other) -> bool:
        return isinstance(other, InnerProduct) and self.space == other.space and self.gram == other.gram


def adjoint(f: GradedLinearMap, ip: InnerProduct) -> GradedLinearMap:
    """
    Metric adjoint f* = G^-1 F^H G, so <f u, v> = <u, f* v>.

    Args:
        f: Endomorphism of ip.space
        ip: Inner product

    Returns:
        f* with degree (and bidegree) negated
    """
    if f.source != ip.space or f.target != ip.space:
        raise DegreeError("adjoint needs an endomorphism of the inner-product space")
    n = ip.space.dim
    conj = conjugate_transpose(map_matrix(f), n)
    star = matmul(ip.gram_inverse, matmul(conj, ip.gram, n, n), n, n)
    bidegree = (-f.bidegree[0], -f.bidegree[1]) if f.bidegree is not None else None
    return matrix_map(star, ip.space, ip.space, -f.degree, bidegree=bidegree)


@dataclass(frozen=True)
class Cohomology:
    """
    H(V, d) with chosen representatives.

    ``representatives`` maps each class name to a cocycle of ``complex_space``.
    """

    complex_space: GradedSpace
    differential: GradedLinearMap
    space: GradedSpace
    representatives: Dict[str, Vector] = field(hash=False, compare=False)

    def rep(self, cls_vector: Vector) -> Vector:
        """Section H -> V choosing the stored representatives."""
        if cls_vector.space != self.space:
            raise DegreeError("vector is not a cohomology class")
        total = Vector(self.complex_space)
        for name, coeff in cls_vector.items():
            total = total + self.representatives[name].scale(coeff)
        return total

    def inclusion(self) -> GradedLinearMap:
        return GradedLinearMap(self.space, self.complex_space, 0,
                               {name: vec for name, vec in self.representatives.items()})

    def proj(self, cocycle: Vector) -> Vector:
        """Class of a cocycle; raises NotACocycleError when d(cocycle) != 0."""
        if cocycle.space != self.complex_space:
            raise DegreeError("vector is not in the complex")
        if not self.differential.apply(cocycle).is_zero():
            raise NotACocycleError(f"{cocycle!r} is not closed")
        coords: Dict[str, Scalar] = {}
        for degree in self.complex_space.degrees():
            names = self.complex_space.names_of_degree(degree)
            rhs = vector_coords(cocycle, names)
            if not any(rhs):
                continue
            image_cols = _image_columns(self.differential, degree)
            classes = self.space.names_of_degree(degree)
            columns = image_cols + [vector_coords(self.representatives[c], names) for c in classes]
            matrix = [[col[i] for col in columns] for i in range(len(names))]
            solution = solve(matrix, rhs, len(columns))
            offset = len(image_cols)
            for j, name in enumerate(classes):
                coords[name] = solution[offset + j]
        return Vector(self.space, coords)

    def proj_map(self, source: Optional[GradedSpace] = None) -> GradedLinearMap:
        """proj tabulated on the cocycle basis elements; non-closed basis elements map to zero."""
        columns = {}
        for name in self.complex_space.names:
            basis_vector = Vector.basis_vector(self.complex_space, name)
            if self.differential.apply(basis_vector).is_zero():
                columns[name] = self.proj(basis_vector)
        return GradedLinearMap(self.complex_space, self.space, 0, columns)


def _image_columns(d: GradedLinearMap, degree: int) -> List[List[Scalar]]:
    """Images d(b) for b of degree-1, written in degree-coordinates."""
    names = d.target.names_of_degree(degree)
    return [vector_coords(d.column(b), names) for b in d.source.names_of_degree(degree - 1)]


def check_square_zero(d: GradedLinearMap) -> None:
    square = d.compose(d)
    if not square.is_zero():
        witness = square.first_nonzero()
        raise DifferentialError(f"d∘d != 0 on {witness}", witness=witness)


def cohomology(space: GradedSpace, d: GradedLinearMap) -> Cohomology:
    """
    Cohomology of (V, d) with pivot-chosen representatives.

    Representatives are kernel vectors that become pivots after the image
    columns in a reduced echelon computation, so the choice is deterministic.
    A class is named ``[e]`` when its representative is the basis element e.
    """
    if d.source != space or d.target != space:
        raise DegreeError("differential must be an endomorphism of the space")
    if d.degree != 1 and not d.is_zero():
        raise DegreeError(f"differential has degree {d.degree}, expected 1")
    check_square_zero(d)

    elements: List[BasisElement] = []
    representatives: Dict[str, Vector] = {}
    for degree in space.degrees():
        names = space.names_of_degree(degree)
        next_names = space.names_of_degree(degree + 1)
        restricted = [[d.column(n)[m] for n in names] for m in next_names]
        kernel_vectors = kernel_basis(restricted, len(names))
        image_cols = _image_columns(d, degree)
        columns = image_cols + kernel_vectors
        matrix = [[col[i] for col in columns] for i in range(len(names))]
        _, pivots = rref(matrix, len(columns))
        counter = 0
        for pivot in pivots:
            if pivot < len(image_cols):
                continue
            coords = dict(zip(names, kernel_vectors[pivot - len(image_cols)]))
            vector = Vector(space, coords)
            support = vector.support()
            if len(support) == 1 and vector[support[0]] == ONE:
                name = f"[{support[0]}]"
            else:
                name = f"[h{degree}.{counter}]"
            counter += 1
            bidegrees = {space.bidegree(s) for s in support}
            bidegree = bidegrees.pop() if len(bidegrees) == 1 else None
            elements.append(BasisElement(name, degree, bidegree))
            representatives[name] = vector
    if any(e.bidegree is None for e in elements):
        elements = [BasisElement(e.name, e.degree) for e in elements]
    cohomology_space = GradedSpace(tuple(elements))
    logger.debug("cohomology dimensions: %s",
                 {deg: len(cohomology_space.names_of_degree(deg)) for deg in cohomology_space.degrees()})
    return Cohomology(space, d, cohomology_space, representatives)
