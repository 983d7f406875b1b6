"""
The explicit L-infinity morphism S̄(L) -> Hom*(H, H) built from an operator
package and a hat assignment, its proof operators, and the checks around it.

Conventions: ā = deg(a, L) with L = K[1]; F_1(a) = h â i and
f_m(a_1⊗...⊗a_m) = h â_1 τ â_2 τ ... τ â_m i.
"""

import logging
from itertools import combinations_with_replacement, permutations
from typing import Dict, Optional, Sequence, Tuple

from linfty.coalgebra import (
    CElement,
    CoalgebraMorphism,
    Family,
    Word,
    basis_words,
    normalize_word,
    symmetric_product,
    theta_from_F,
)
from linfty.dgla import Codifferential, build_delta, check_F_delta_zero
from linfty.exceptions import DegreeError, NotACocycleError, NotHarmonicError
from linfty.graded import (
    GradedLinearMap,
    GradedSpace,
    Vector,
    hom_space,
    koszul_sign,
    map_to_vector,
    vector_to_map,
)
from linfty.kahler import HatAssignment, OperatorPackage
from linfty.linalg import Cohomology, cohomology, kernel
from linfty.report import Report, describe_vector
from linfty.scalars import sign

logger = logging.getLogger(__name__)


class TaylorFamily:
    """
    F = (F_1, F_2, ...) with F_m the Koszul-symmetrization of f_m.

    Operator products are built right to left; suffixes τ â_k ... τ â_m i
    are cached since every permutation of a word reuses them.
    """

    def __init__(self, pkg: OperatorPackage, hat: HatAssignment, cutoff: int):
        if hat.algebra_space != pkg.space:
            raise DegreeError("hat assignment lives on another algebra")
        self.pkg = pkg
        self.hat = hat
        self.cutoff = cutoff
        self.L = hat.L
        self.H = pkg.harmonic_space
        self.M = hom_space(self.H, self.H)
        self._suffixes: Dict[Tuple[str, ...], GradedLinearMap] = {}
        self._symmetrized: Dict[Word, GradedLinearMap] = {}

    def _suffix(self, names: Tuple[str, ...]) -> GradedLinearMap:
        """â_1 τ â_2 ... τ â_k i : H -> A."""
        cached = self._suffixes.get(names)
        if cached is not None:
            return cached
        if len(names) == 1:
            result = self.hat.hat(names[0]).compose(self.pkg.i)
        else:
            result = self.hat.hat(names[0]).compose(self.pkg.tau).compose(self._suffix(names[1:]))
        self._suffixes[names] = result
        return result

    def F1(self, a: str) -> GradedLinearMap:
        return self.pkg.h.compose(self.hat.hat(a)).compose(self.pkg.i)

    def f_m(self, names: Sequence[str]) -> GradedLinearMap:
        names = tuple(names)
        if not names:
            raise DegreeError("f_m needs at least one factor")
        return self.pkg.h.compose(self._suffix(names))

    def F_m(self, factors: Sequence[str]) -> GradedLinearMap:
        """Σ_{σ ∈ Σ_m} ε(L, σ; a) f_m(a_σ1 ⊗ ... ⊗ a_σm) on a word in any factor order."""
        word = normalize_word(self.L, factors)
        degree = sum(self.L.degree(a) for a in word.factors)
        if word.is_zero():
            return GradedLinearMap.zero(self.H, self.H, degree)
        cached = self._symmetrized.get(word.factors)
        if cached is None:
            cached = GradedLinearMap.zero(self.H, self.H, degree)
            m = word.length
            for sigma in permutations(range(m)):
                value = self.f_m([word.factors[k] for k in sigma])
                if value.is_zero():
                    continue
                cached = cached + value.scale(koszul_sign(self.L, sigma, word.factors))
            self._symmetrized[word.factors] = cached
        return cached.scale(word.sign)

    def as_family(self) -> Family:
        """The family with values flattened into Hom*(H, H)."""
        return Family(self.L, self.M, func=lambda word: map_to_vector(self.F_m(word), self.M),
                      max_length=self.cutoff)


def q_op(a: str, b: str, pkg: OperatorPackage, hat: HatAssignment) -> GradedLinearMap:
    """q(a⊗b) = (-1)^ā â ∂ b̂."""
    return hat.hat(a).compose(pkg.del_).compose(hat.hat(b)).scale(sign(hat.L.degree(a)))


def g_m(names: Sequence[str], pkg: OperatorPackage, hat: HatAssignment) -> GradedLinearMap:
    """-Σ_{i=0}^{m-2} (-1)^{ā_1+...+ā_i} h â_1τ...â_iτ q(a_{i+1}⊗a_{i+2}) τâ_{i+3}...τâ_m i."""
    names = tuple(names)
    m = len(names)
    if m < 2:
        raise DegreeError("g_m needs m >= 2")
    L = hat.L
    degree = sum(L.degree(a) for a in names) + 1
    total = GradedLinearMap.zero(pkg.harmonic_space, pkg.harmonic_space, degree)
    for i in range(m - 1):
        right = pkg.i
        for a in reversed(names[i + 2:]):
            right = pkg.tau.compose(hat.hat(a)).compose(right)
        middle = q_op(names[i], names[i + 1], pkg, hat).compose(right)
        for a in reversed(names[:i]):
            middle = hat.hat(a).compose(pkg.tau).compose(middle)
        term = pkg.h.compose(middle)
        exponent = sum(L.degree(a) for a in names[:i])
        total = total - term.scale(sign(exponent))
    return total


def symmetrized_g(word: Word, pkg: OperatorPackage, hat: HatAssignment) -> GradedLinearMap:
    m = len(word)
    degree = sum(hat.L.degree(a) for a in word) + 1
    total = GradedLinearMap.zero(pkg.harmonic_space, pkg.harmonic_space, degree)
    for sigma in permutations(range(m)):
        total = total + g_m([word[k] for k in sigma], pkg, hat).scale(koszul_sign(hat.L, sigma, word))
    return total


def _family_on(family: TaylorFamily, element: CElement, degree: int) -> GradedLinearMap:
    total = GradedLinearMap.zero(family.H, family.H, degree)
    for word, coeff in element.items():
        total = total + family.F_m(word).scale(coeff)
    return total


def check_proof_identities(family: TaylorFamily, delta: Codifferential,
                           cutoff: Optional[int] = None) -> Report:
    """
    For every basis word of length 2..cutoff:
    (i)  Σ_σ ε g_m(a_σ) = -F_{m-1}(Q-part of δ(a)) and
    (ii) Σ_σ ε g_m(a_σ) = F_m(d-part of δ(a)).
    """
    cutoff = family.cutoff if cutoff is None else cutoff
    report = Report("proof_identities")
    first_q = first_d = None
    for word in basis_words(family.L, cutoff):
        if len(word) < 2:
            continue
        degree = sum(family.L.degree(a) for a in word) + 1
        lhs = symmetrized_g(word, family.pkg, family.hat)
        if first_q is None and lhs != -_family_on(family, delta.q_part(word), degree):
            first_q = list(word)
        if first_d is None and lhs != _family_on(family, delta.d_part(word), degree):
            first_d = list(word)
        if first_q and first_d:
            break
    report.add("sum g_m = -F_{m-1}(Q-sum)", first_q is None, witness=first_q)
    report.add("sum g_m = F_m(d-sum)", first_d is None, witness=first_d)
    return report


def check_bridging_identity(pkg: OperatorPackage, hat: HatAssignment) -> Report:
    """α Q(a⊙b)^ β = α (q(a⊗b) + (-1)^{āb̄} q(b⊗a)) β for α ∈ {h, τ}, β ∈ {τ, i}."""
    report = Report("bridging_identity")
    L = hat.L
    names = L.names
    alphas = (("h", pkg.h), ("tau", pkg.tau))
    betas = (("tau", pkg.tau), ("i", pkg.i))
    for alpha_name, alpha in alphas:
        for beta_name, beta in betas:
            witness = None
            for a in names:
                for b in names:
                    q_hat = hat.hat_vector(hat.dgla.Q_pair(a, b))
                    combined = q_op(a, b, pkg, hat) + \
                        q_op(b, a, pkg, hat).scale(sign(L.degree(a) * L.degree(b)))
                    if alpha.compose(q_hat).compose(beta) != alpha.compose(combined).compose(beta):
                        witness = [a, b]
                        break
                if witness:
                    break
            report.add(f"{alpha_name} Q(a.b)^ {beta_name}", witness is None, witness=witness)
    return report


def check_taylor_morphism(pkg: OperatorPackage, hat: HatAssignment,
                          cutoff: int) -> Tuple[Report, Optional[CoalgebraMorphism]]:
    """
    Build δ on S̄(L) and the family F, then check F∘δ = 0.

    Returns:
        The report and, on success, the coalgebra morphism Θ with p_1∘Θ = F
    """
    logger.info("checking F∘δ = 0 for the package family, cutoff %d", cutoff)
    delta = build_delta(hat.dgla, cutoff)
    family = TaylorFamily(pkg, hat, cutoff)
    flat = family.as_family()
    report = Report("taylor_morphism")
    report.extend(check_F_delta_zero(flat, delta, cutoff))
    if not report.passed:
        return report, None
    return report, theta_from_F(flat, cutoff)


def corrupt_tau(pkg: OperatorPackage) -> OperatorPackage:
    """Copy of the package with τ replaced by ∂̄*∂ (the Green operator dropped)."""
    return OperatorPackage(pkg.algebra, pkg.del_, pkg.delbar, pkg.ip,
                           tau=pkg.delbar_star.compose(pkg.del_))


class ThetaMap:
    """θ: H*(L, d) -> Hom*(H, H), θ([a]) = F_1(a)."""

    def __init__(self, family: TaylorFamily):
        self.family = family
        d_L = family.hat.dgla.d_L
        self.cohomology: Cohomology = cohomology(family.L, d_L)
        columns = {}
        for name, rep in self.cohomology.representatives.items():
            columns[name] = self._linear(rep)
        self.matrix = GradedLinearMap(self.cohomology.space, family.M, 0, columns)

    def _linear(self, vector: Vector) -> Vector:
        total = Vector(self.family.M)
        for name, coeff in vector.items():
            total = total + map_to_vector(self.family.F1(name), self.family.M).scale(coeff)
        return total

    def well_defined(self) -> bool:
        """F_1∘d = 0, so θ does not depend on the representative."""
        return all(self._linear(image).is_zero() for _, image in self.family.hat.dgla.d_L.columns())

    def apply(self, cocycle: Vector) -> Vector:
        """θ of the class of a cocycle of L."""
        if not self.family.hat.dgla.d_L.apply(cocycle).is_zero():
            raise NotACocycleError(f"{cocycle!r} is not closed")
        return self._linear(cocycle)


def theta_on_cohomology(family: TaylorFamily) -> ThetaMap:
    theta = ThetaMap(family)
    if not theta.well_defined():
        logger.warning("F_1∘d != 0; θ depends on the representative")
    return theta


def theta_report(theta: ThetaMap) -> Dict:
    """θ as {class name: {hom basis name: scalar}}."""
    return {name: describe_vector(theta.matrix.column(name)) for name in theta.cohomology.space.names}


class Evaluation:
    """ev_Ω: Hom*(H, H) -> H."""

    def __init__(self, hom: GradedSpace, harmonic: GradedSpace, omega: Vector):
        self.source = hom
        self.target = harmonic
        self.omega = omega
        self.degree = omega.degree() or 0

    def apply(self, vector: Vector) -> Vector:
        return vector_to_map(vector, self.target, self.target).apply(self.omega)


def _harmonic_omega(pkg: OperatorPackage, omega: Vector) -> Vector:
    if omega.space == pkg.harmonic_space:
        return omega
    if omega.space != pkg.space:
        raise DegreeError("Ω must be a form or a harmonic class")
    if not pkg.laplacian.apply(omega).is_zero():
        raise NotHarmonicError(f"{omega!r} is not harmonic")
    return pkg.h.apply(omega)


def ev_omega(family: TaylorFamily, omega: Vector) -> Family:
    """The family (ev_Ω∘F_m)(word) = F_m(word)(Ω), with values in H."""
    harmonic = _harmonic_omega(family.pkg, omega)
    evaluation = Evaluation(family.M, family.H, harmonic)
    return family.as_family().then(evaluation, target=family.H)


def ev_omega_report(family: TaylorFamily, omega: Vector, cutoff: Optional[int] = None) -> Report:
    """
    Closure of the evaluated family under δ, plus vanishing for m >= 2 on
    words built from {a | ∂(â Ω) = 0}.
    """
    cutoff = family.cutoff if cutoff is None else cutoff
    pkg = family.pkg
    harmonic = _harmonic_omega(pkg, omega)
    evaluated = ev_omega(family, harmonic)
    report = Report("ev_omega")
    delta = build_delta(family.hat.dgla, cutoff)
    report.extend(check_F_delta_zero(evaluated, delta, cutoff))

    form = pkg.i.apply(harmonic)
    columns = {a: pkg.del_.apply(family.hat.hat(a).apply(form)) for a in family.L.names}
    contraction = GradedLinearMap(family.L, pkg.space, (form.degree() or 0) + 1, columns)
    vectors = kernel(contraction)
    report.data["omega_kernel"] = [describe_vector(v) for v in vectors]
    witness = None
    for m in range(2, cutoff + 1):
        for combo in combinations_with_replacement(range(len(vectors)), m):
            element = symmetric_product(family.L, [vectors[k] for k in combo])
            if not evaluated.evaluate(element).is_zero():
                witness = [describe_vector(vectors[k]) for k in combo]
                break
        if witness:
            break
    report.add("ev_omega F_m vanishes on ker(a -> del(hat a Omega)), m >= 2", witness is None, witness=witness)
    return report
