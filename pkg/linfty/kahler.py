"""
Finite-dimensional stand-in for the analytic package of a compact Kähler
manifold: a bigraded algebra with ∂ and ∂̄, the operators derived from a
metric (∂̄*, Δ, G, h, i, τ), the hat map into derivations and its checks.
"""

import logging
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from config.settings import settings
from linfty.dgla import DGLA
from linfty.exceptions import DegreeError, DifferentialError
from linfty.graded import (
    BasisElement,
    GradedLinearMap,
    GradedSpace,
    Vector,
    combine,
    graded_commutator,
)
from linfty.linalg import (
    InnerProduct,
    adjoint,
    conjugate_transpose,
    inverse,
    kernel,
    map_matrix,
    matmul,
    matrix_map,
    vector_coords,
)
from linfty.report import Report
from linfty.scalars import ONE, ZERO, Scalar, scalar, sign

logger = logging.getLogger(__name__)


class BigradedAlgebra:
    """
    Graded-commutative algebra on a bigraded space, given by structure constants.

    ``product[(a, b)]`` is a·b; the opposite order follows from graded
    commutativity, and pairs that are absent multiply to zero.
    """

    def __init__(self, space: GradedSpace, product_table: Optional[Mapping[Tuple[str, str], Mapping[str, Scalar]]] = None,
                 unit: Optional[str] = None):
        if not space.has_bidegrees:
            raise DegreeError("a bigraded algebra needs bidegrees on every basis element")
        self.space = space
        self.unit = unit
        if unit is not None and space.bidegree(unit) != (0, 0):
            raise DegreeError(f"unit {unit} must have bidegree (0, 0)")
        self._raw: Dict[Tuple[str, str], Vector] = {}
        for (a, b), value in (product_table or {}).items():
            vector = value if isinstance(value, Vector) else Vector(space, value)
            (ap, aq), (bp, bq) = space.bidegree(a), space.bidegree(b)
            for name, _ in vector.items():
                if space.bidegree(name) != (ap + bp, aq + bq):
                    raise DegreeError(f"{a}·{b} has a term {name} of the wrong bidegree")
            if not vector.is_zero():
                self._raw[(a, b)] = vector

    def product_basis(self, a: str, b: str) -> Vector:
        if self.unit is not None:
            if a == self.unit:
                return Vector.basis_vector(self.space, b)
            if b == self.unit:
                return Vector.basis_vector(self.space, a)
        if (a, b) in self._raw:
            return self._raw[(a, b)]
        if (b, a) in self._raw:
            return self._raw[(b, a)].scale(sign(self.space.degree(a) * self.space.degree(b)))
        return Vector(self.space)

    def multiply(self, u: Vector, v: Vector) -> Vector:
        return combine(self.space, ((cu * cv, self.product_basis(a, b))
                                    for a, cu in u.items() for b, cv in v.items()))

    def product_entries(self) -> List[Tuple[str, str, Vector]]:
        return [(a, b, value) for (a, b), value in self._raw.items()]

    def validate(self) -> Report:
        report = Report("bigraded_algebra")
        names = self.space.names
        deg = self.space.degree
        witness = None
        for (a, b), value in self._raw.items():
            if (b, a) in self._raw and a != b:
                if self._raw[(b, a)] != value.scale(sign(deg(a) * deg(b))):
                    witness = [a, b]
                    break
            if a == b and deg(a) % 2 and not value.is_zero():
                witness = [a, a]
                break
        report.add("graded_commutative", witness is None, witness=witness)
        witness = None
        for a, b, c in product(names, repeat=3):
            left = self.multiply(self.product_basis(a, b), Vector.basis_vector(self.space, c))
            right = self.multiply(Vector.basis_vector(self.space, a), self.product_basis(b, c))
            if left != right:
                witness = [a, b, c]
                break
        report.add("associative", witness is None, witness=witness)
        return report


def derivation_witness(algebra: BigradedAlgebra, f: GradedLinearMap) -> Optional[List[str]]:
    """First basis pair where f(uv) = f(u)v + (-1)^{|f||u|} u f(v) fails, else None."""
    space = algebra.space
    for u, v in product(space.names, repeat=2):
        lhs = f.apply(algebra.product_basis(u, v))
        rhs = algebra.multiply(f.column(u), Vector.basis_vector(space, v)) + \
            algebra.multiply(Vector.basis_vector(space, u), f.column(v)).scale(sign(f.degree * space.degree(u)))
        if lhs != rhs:
            return [u, v]
    return None


def _harmonic_name(vector: Vector, index: int) -> str:
    support = vector.support()
    if len(support) == 1 and vector[support[0]] == ONE:
        return support[0]
    return f"harm{index}"


class OperatorPackage:
    """
    (A, ∂, ∂̄, ∂̄*, Δ, G, H, i, h, τ) with every derived operator computed once.

    ``h`` is the harmonic projector A -> H, ``i`` the inclusion H -> A and
    ``harmonic_projector`` the endomorphism i∘h of A.
    """

    def __init__(self, algebra: BigradedAlgebra, del_: GradedLinearMap, delbar: GradedLinearMap,
                 ip: InnerProduct, tau: Optional[GradedLinearMap] = None):
        self.algebra = algebra
        self.space = algebra.space
        self.del_ = del_
        self.delbar = delbar
        self.ip = ip
        if ip.space != self.space:
            raise DegreeError("inner product lives on another space")
        self.delbar_star = adjoint(delbar, ip)
        self.laplacian = delbar.compose(self.delbar_star) + self.delbar_star.compose(delbar)
        self._build_harmonics()
        self.tau = tau if tau is not None else self.green.compose(self.delbar_star).compose(del_)

    def _build_harmonics(self) -> None:
        space = self.space
        n = space.dim
        harmonic_vectors = kernel(self.laplacian)
        elements = []
        for index, vector in enumerate(harmonic_vectors):
            bidegrees = {space.bidegree(name) for name in vector.support()}
            p, q = bidegrees.pop()
            elements.append(BasisElement(_harmonic_name(vector, index), p + q, (p, q)))
        self.harmonic_space = GradedSpace(tuple(elements))
        k = len(elements)

        kmat = [[vector[name] for vector in harmonic_vectors] for name in space.names]
        self.i = matrix_map(kmat, self.harmonic_space, space, 0, bidegree=(0, 0))
        if k:
            kh_g = matmul(conjugate_transpose(kmat, k), self.ip.gram, n, n)
            coords = matmul(inverse(matmul(kh_g, kmat, n, k)), kh_g, k, n)
        else:
            coords = []
        self.h = matrix_map(coords, space, self.harmonic_space, 0, bidegree=(0, 0))
        self.harmonic_projector = self.i.compose(self.h)

        lap = map_matrix(self.laplacian)
        proj = map_matrix(self.harmonic_projector)
        shifted = [[lap[r][c] + proj[r][c] for c in range(n)] for r in range(n)]
        inv = inverse(shifted)
        green = [[inv[r][c] - proj[r][c] for c in range(n)] for r in range(n)]
        self.green = matrix_map(green, space, space, 0, bidegree=(0, 0))
        logger.info("package has %d harmonic generators out of %d", k, n)

    @property
    def identity(self) -> GradedLinearMap:
        return GradedLinearMap.identity(self.space)


def derive_package(algebra: BigradedAlgebra, del_: GradedLinearMap, delbar: GradedLinearMap,
                   ip: InnerProduct) -> OperatorPackage:
    """
    Compute ∂̄* = adjoint(∂̄), Δ = ∂̄∂̄* + ∂̄*∂̄, H = ker Δ, G, h, i and τ = G∂̄*∂.

    Raises:
        DifferentialError: ∂² ≠ 0, ∂̄² ≠ 0 or ∂∂̄ + ∂̄∂ ≠ 0
        MetricError: raised earlier by InnerProduct for a bad Gram matrix
    """
    for name, square in (("del", del_.compose(del_)), ("delbar", delbar.compose(delbar)),
                         ("del_delbar", del_.compose(delbar) + delbar.compose(del_))):
        if not square.is_zero():
            raise DifferentialError(f"{name} relation fails", witness=square.first_nonzero())
    return OperatorPackage(algebra, del_, delbar, ip)


def _identity_check(report: Report, name: str, difference: GradedLinearMap) -> None:
    report.add(name, difference.is_zero(), witness=difference.first_nonzero())


def validate_kahler_identities(pkg: OperatorPackage) -> Report:
    """Every operator identity the construction relies on, as an exact matrix equation."""
    report = Report("kahler_identities")
    d, db, ds = pkg.del_, pkg.delbar, pkg.delbar_star
    G, tau, P = pkg.green, pkg.tau, pkg.harmonic_projector
    ident = pkg.identity
    lap = pkg.laplacian

    _identity_check(report, "del^2 = 0", d.compose(d))
    _identity_check(report, "delbar^2 = 0", db.compose(db))
    _identity_check(report, "del delbar + delbar del = 0", d.compose(db) + db.compose(d))
    _identity_check(report, "[del, delbar*] = 0", graded_commutator(d, ds))
    _identity_check(report, "[del, G] = 0", graded_commutator(d, G))
    _identity_check(report, "[delbar, G] = 0", graded_commutator(db, G))
    _identity_check(report, "G laplacian del = del", G.compose(lap).compose(d) - d)
    _identity_check(report, "h del = 0", pkg.h.compose(d))
    _identity_check(report, "del h = 0", d.compose(P))
    _identity_check(report, "tau h = 0", tau.compose(P))
    _identity_check(report, "h tau = 0", pkg.h.compose(tau))
    _identity_check(report, "del tau = 0", d.compose(tau))
    _identity_check(report, "tau del = 0", tau.compose(d))
    _identity_check(report, "[delbar, tau] = del", graded_commutator(db, tau) - d)
    _identity_check(report, "h delbar = 0", pkg.h.compose(db))
    _identity_check(report, "delbar i = 0", db.compose(pkg.i))
    _identity_check(report, "h^2 = h", P.compose(P) - P)
    _identity_check(report, "h i = id", pkg.h.compose(pkg.i) - GradedLinearMap.identity(pkg.harmonic_space))
    _identity_check(report, "G laplacian = id - h", G.compose(lap) - (ident - P))
    _identity_check(report, "laplacian G = id - h", lap.compose(G) - (ident - P))
    return report


class HatAssignment:
    """
    The map a -> â from L = K[1] into derivations of the algebra.

    ``hats`` maps L basis names to endomorphisms of the algebra space of
    degree deg(a, L); missing names have â = 0.
    """

    def __init__(self, dgla: DGLA, algebra_space: GradedSpace, hats: Optional[Mapping[str, GradedLinearMap]] = None):
        self.dgla = dgla
        self.L = dgla.L
        self.algebra_space = algebra_space
        self._hats: Dict[str, GradedLinearMap] = {}
        for name, f in (hats or {}).items():
            self.L.index(name)
            if f.source != algebra_space or f.target != algebra_space:
                raise DegreeError(f"hat of {name} is not an endomorphism of the algebra")
            if not f.is_zero() and f.degree != self.L.degree(name):
                raise DegreeError(f"hat of {name} has degree {f.degree}, expected {self.L.degree(name)}")
            self._hats[name] = f

    def hat(self, name: str) -> GradedLinearMap:
        if name not in self._hats:
            return GradedLinearMap.zero(self.algebra_space, self.algebra_space, self.L.degree(name))
        return self._hats[name]

    def hat_vector(self, vector: Vector) -> GradedLinearMap:
        """Hat of a homogeneous vector of L (or K, read in L)."""
        if vector.space != self.L:
            vector = vector.in_space(self.L)
        degree = vector.degree()
        total = GradedLinearMap.zero(self.algebra_space, self.algebra_space,
                                     0 if degree is None else degree)
        for name, coeff in vector.items():
            total = total + self.hat(name).scale(coeff)
        return total

    def nonzero(self) -> List[str]:
        return [name for name in self.L.names if not self.hat(name).is_zero()]

    def items(self):
        return ((name, self.hat(name)) for name in self.L.names)


def validate_hat(ha: HatAssignment, pkg: OperatorPackage) -> Report:
    """
    Check that every â is a derivation of bidegree (-1, ā+1) killing A^{0,*},
    that (da)^ = [∂̄, â], Q(a⊙b)^ = -[[∂, â], b̂] and [â, b̂] = 0.
    """
    report = Report("validate_hat")
    space = pkg.space
    L = ha.L
    names = L.names

    witness = None
    for a in names:
        target_shift = (-1, L.degree(a) + 1)
        for src, tgt, _ in ha.hat(a).entries():
            (sp, sq), (tp, tq) = space.bidegree(src), space.bidegree(tgt)
            if (tp - sp, tq - sq) != target_shift:
                witness = [a, src]
                break
        if witness:
            break
    report.add("hat bidegree (-1, a+1)", witness is None, witness=witness)

    witness = None
    for a in names:
        for u in space.names:
            if space.bidegree(u)[0] == 0 and not ha.hat(a).column(u).is_zero():
                witness = [a, u]
                break
        if witness:
            break
    report.add("hat kills A^{0,*}", witness is None, witness=witness)

    witness = None
    for a in names:
        pair = derivation_witness(pkg.algebra, ha.hat(a))
        if pair is not None:
            witness = [a] + pair
            break
    report.add("hat is a derivation", witness is None, witness=witness)

    witness = None
    d_L = ha.dgla.d_L
    for a in names:
        lhs = ha.hat_vector(d_L.column(a)) if not d_L.column(a).is_zero() else \
            GradedLinearMap.zero(space, space, L.degree(a) + 1)
        if lhs != graded_commutator(pkg.delbar, ha.hat(a)):
            witness = a
            break
    report.add("(da)^ = [delbar, hat a]", witness is None, witness=witness)

    witness = None
    for a, b in product(names, repeat=2):
        q = ha.dgla.Q_pair(a, b)
        lhs = ha.hat_vector(q) if not q.is_zero() else \
            GradedLinearMap.zero(space, space, L.degree(a) + L.degree(b) + 1)
        rhs = -graded_commutator(graded_commutator(pkg.del_, ha.hat(a)), ha.hat(b))
        if lhs != rhs:
            witness = [a, b]
            break
    report.add("Q(a.b)^ = -[[del, hat a], hat b]", witness is None, witness=witness)

    witness = None
    for a, b in product(names, repeat=2):
        if not graded_commutator(ha.hat(a), ha.hat(b)).is_zero():
            witness = [a, b]
            break
    report.add("[hat a, hat b] = 0", witness is None, witness=witness)
    return report


def _hat_slots(space: GradedSpace, L: GradedSpace) -> List[Tuple[str, str, str]]:
    """(a, source, target) entries allowed by bidegree (-1, ā+1) and A^{0,*} vanishing."""
    slots = []
    for a in L.names:
        shift_p, shift_q = -1, L.degree(a) + 1
        for src in space.names:
            sp, sq = space.bidegree(src)
            if sp == 0:
                continue
            for tgt in space.names_of_bidegree((sp + shift_p, sq + shift_q)):
                slots.append((a, src, tgt))
    return slots


@dataclass(frozen=True)
class HatSearch:
    """Outcome of search_hat: the assignment found, candidates tried, and whether the cap stopped it."""

    hats: Optional[HatAssignment]
    candidates: int
    truncated: bool


def search_hat(pkg: OperatorPackage, dgla: DGLA, bound: int = 1,
               max_candidates: Optional[int] = None) -> HatSearch:
    """
    First nonzero hat assignment passing validate_hat, scanning entry values
    0, 1, -1, ..., bound, -bound with slots in basis order.

    At most ``max_candidates`` assignments are tried (settings.SEARCH_MAX_CANDIDATES
    by default; zero or less means no cap).
    """
    if max_candidates is None:
        max_candidates = settings.SEARCH_MAX_CANDIDATES
    slots = _hat_slots(pkg.space, dgla.L)
    values = [0]
    for k in range(1, bound + 1):
        values.extend([k, -k])
    logger.info("searching %d hat slots with values %s", len(slots), values)
    count = 0
    for choice in product(values, repeat=len(slots)):
        if 0 < max_candidates <= count:
            logger.warning("hat search stopped after %d candidates without a valid assignment", count)
            return HatSearch(None, count, True)
        count += 1
        if not any(choice):
            continue
        columns: Dict[str, Dict[str, Dict[str, Scalar]]] = {}
        for (a, src, tgt), value in zip(slots, choice):
            if value:
                columns.setdefault(a, {}).setdefault(src, {})[tgt] = scalar(value)
        hats = {a: GradedLinearMap(pkg.space, pkg.space, dgla.L.degree(a), cols)
                for a, cols in columns.items()}
        candidate = HatAssignment(dgla, pkg.space, hats)
        if validate_hat(candidate, pkg).passed:
            logger.info("hat search succeeded after %d candidates", count)
            return HatSearch(candidate, count, False)
    return HatSearch(None, count, False)
