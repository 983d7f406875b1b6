"""
Local-coordinate model on C^n: differential forms with polynomial
coefficients in z, z̄, the contraction hat of (0, p+1)-form valued vector
fields, and exact checks of the hat identities.

Generators dz_1..dz_n carry indices 0..n-1 and dz̄_1..dz̄_n carry n..2n-1.
A form is a dict {increasing index tuple: coefficient polynomial}; a vector
field Σ φ_i ∂/∂z_i is a dict {i: form φ_i}.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from linfty.graded import BasisElement, GradedLinearMap, GradedSpace
from linfty.report import Report
from linfty.scalars import scalar

logger = logging.getLogger(__name__)

WedgeWord = Tuple[int, ...]
Form = Dict[WedgeWord, object]
Field = Dict[int, Form]

# Signs of the two terms of -[[∂, â], b̂] that the hat identity leaves as "±":
# coefficient of ∂âb̂ is -1, of b̂â∂ is -(-1)^(āb̄ + ā + b̄).
COMMUTATOR_SIGNS = {
    "del_a_b": {"sign": -1, "exponent": []},
    "b_a_del": {"sign": -1, "exponent": ["ab", "a", "b"]},
}


def _parity(sequence: Sequence[int]) -> int:
    inversions = sum(1 for i in range(len(sequence)) for j in range(i + 1, len(sequence))
                     if sequence[i] > sequence[j])
    return -1 if inversions % 2 else 1


def merge_words(left: WedgeWord, right: WedgeWord) -> Optional[Tuple[int, WedgeWord]]:
    """Sign and sorted word of left ∧ right, or None when a generator repeats."""
    if set(left) & set(right):
        return None
    joined = left + right
    return _parity(joined), tuple(sorted(joined))


def contraction(alpha: Mapping[int, object], word: WedgeWord) -> Dict[WedgeWord, object]:
    """
    α⌟(v_1∧...∧v_k) = Σ (-1)^{i-1} α(v_i) v_1∧...v̂_i...∧v_k.

    Args:
        alpha: Values of the functional on generator indices (missing means 0)
        word: Increasing tuple of generator indices

    Returns:
        Combination of shorter words
    """
    result: Dict[WedgeWord, object] = {}
    for position, generator in enumerate(word):
        value = alpha.get(generator, 0)
        if not value:
            continue
        rest = word[:position] + word[position + 1:]
        term = value if position % 2 == 0 else -value
        result[rest] = result.get(rest, 0) + term
    return {w: c for w, c in result.items() if c}


def commutator_coefficients(a_deg: int, b_deg: int) -> Dict[str, int]:
    """Coefficients of the four operator products in -[[∂, â], b̂] for hat degrees ā, b̄."""
    def parity(exponent: int) -> int:
        return -1 if exponent % 2 else 1

    values = {"ab": a_deg * b_deg, "a": a_deg, "b": b_deg}
    coefficients = {
        "a_del_b": parity(a_deg),
        "b_del_a": parity(a_deg * b_deg + b_deg),
    }
    for key, entry in COMMUTATOR_SIGNS.items():
        coefficients[key] = entry["sign"] * parity(sum(values[e] for e in entry["exponent"]))
    return coefficients


@dataclass(frozen=True)
class Fragment:
    """Forms whose coefficients are monomials of degree <= D, with ∂ and ∂̄ as maps."""

    space: GradedSpace
    del_: GradedLinearMap
    delbar: GradedLinearMap


class PolynomialModel:
    """Forms and vector fields on C^n with polynomial coefficients of degree <= D."""

    def __init__(self, n: int, D: int):
        if n < 1 or D < 0:
            raise ValueError("need n >= 1 and D >= 0")
        self.n = n
        self.D = D
        names = [f"z{i + 1}" for i in range(n)] + [f"zb{i + 1}" for i in range(n)]
        self.ring, *gens = ring(",".join(names), QQ)
        self.z = gens[:n]
        self.zb = gens[n:]

    # forms

    def _clean(self, form: Mapping[WedgeWord, object]) -> Form:
        return {w: c for w, c in form.items() if c}

    def add(self, *forms: Form) -> Form:
        total: Form = {}
        for form in forms:
            for word, coeff in form.items():
                total[word] = total.get(word, self.ring.zero) + coeff
        return self._clean(total)

    def scale(self, factor, form: Form) -> Form:
        return self._clean({w: factor * c for w, c in form.items()})

    def wedge(self, left: Form, right: Form) -> Form:
        total: Form = {}
        for lw, lc in left.items():
            for rw, rc in right.items():
                merged = merge_words(lw, rw)
                if merged is None:
                    continue
                s, word = merged
                total[word] = total.get(word, self.ring.zero) + s * lc * rc
        return self._clean(total)

    def _exterior_derivative(self, form: Form, variables, offset: int) -> Form:
        total: Form = {}
        for word, coeff in form.items():
            for i, var in enumerate(variables):
                derivative = coeff.diff(var)
                if not derivative:
                    continue
                merged = merge_words((offset + i,), word)
                if merged is None:
                    continue
                s, new_word = merged
                total[new_word] = total.get(new_word, self.ring.zero) + s * derivative
        return self._clean(total)

    def del_(self, form: Form) -> Form:
        return self._exterior_derivative(form, self.z, 0)

    def delbar(self, form: Form) -> Form:
        return self._exterior_derivative(form, self.zb, self.n)

    def contract(self, i: int, form: Form) -> Form:
        """∂/∂z_i ⌟ form."""
        total: Form = {}
        for word, coeff in form.items():
            for rest, value in contraction({i: 1}, word).items():
                total[rest] = total.get(rest, self.ring.zero) + value * coeff
        return self._clean(total)

    def coefficient_diff(self, form: Form, var) -> Form:
        return self._clean({w: c.diff(var) for w, c in form.items()})

    def form_degree(self, form: Form) -> Optional[int]:
        degrees = {len(w) for w in form}
        return degrees.pop() if len(degrees) == 1 else None

    def bidegree(self, word: WedgeWord) -> Tuple[int, int]:
        p = sum(1 for g in word if g < self.n)
        return p, len(word) - p

    # vector fields

    def field_degree(self, a: Field) -> int:
        """deg(a, L) for a homogeneous field with (0, p+1)-form coefficients."""
        degrees = {len(w) - 1 for form in a.values() for w in form}
        if len(degrees) != 1:
            raise ValueError("vector field is not homogeneous")
        return degrees.pop()

    def hat(self, a: Field) -> Callable[[Form], Form]:
        """â(η) = Σ φ_i ∧ (∂/∂z_i ⌟ η)."""
        def apply(form: Form) -> Form:
            return self.add(*(self.wedge(phi, self.contract(i, form)) for i, phi in a.items()))
        return apply

    def d_field(self, a: Field) -> Field:
        return {i: f for i, f in ((i, self.delbar(phi)) for i, phi in a.items()) if f}

    def Q(self, a: Field, b: Field) -> Field:
        """(-1)^ā Σ_{i,j} [φ_i ∧ ∂_{z_i}ψ_j] ∂_j - [∂_{z_j}φ_i ∧ ψ_j] ∂_i."""
        s = -1 if self.field_degree(a) % 2 else 1
        result: Dict[int, List[Form]] = {}
        for i, phi in a.items():
            for j, psi in b.items():
                result.setdefault(j, []).append(self.wedge(phi, self.coefficient_diff(psi, self.z[i])))
                result.setdefault(i, []).append(
                    self.scale(-1, self.wedge(self.coefficient_diff(phi, self.z[j]), psi)))
        field: Field = {}
        for k, parts in result.items():
            form = self.scale(s, self.add(*parts))
            if form:
                field[k] = form
        return field

    def add_fields(self, *fields: Field) -> Field:
        keys = sorted({k for f in fields for k in f})
        result = {k: self.add(*(f.get(k, {}) for f in fields)) for k in keys}
        return {k: v for k, v in result.items() if v}

    # enumeration

    def monomials(self, degree_bound: Optional[int] = None) -> List[object]:
        bound = self.D if degree_bound is None else degree_bound
        gens = list(self.z) + list(self.zb)
        result = []
        for exponents in product(range(bound + 1), repeat=len(gens)):
            if sum(exponents) > bound:
                continue
            monomial = self.ring.one
            for g, e in zip(gens, exponents):
                monomial = monomial * g ** e
            result.append((sum(exponents), exponents, monomial))
        result.sort(key=lambda item: (item[0], tuple(-e for e in item[1])))
        return [m for _, _, m in result]

    def antiholomorphic_words(self) -> List[WedgeWord]:
        indices = range(self.n, 2 * self.n)
        return [w for k in range(self.n + 1) for w in combinations(indices, k)]

    def generators(self) -> List[Tuple[str, Field]]:
        """Basis fields monomial·dz̄_I·∂/∂z_i of L, labelled."""
        result = []
        for monomial in self.monomials():
            for word in self.antiholomorphic_words():
                for i in range(self.n):
                    label = f"{monomial.as_expr()} {self.word_label(word)} d/dz{i + 1}"
                    result.append((label, {i: {word: monomial}}))
        return result

    def word_label(self, word: WedgeWord) -> str:
        if not word:
            return "1"
        parts = [f"dz{g + 1}" if g < self.n else f"dzb{g - self.n + 1}" for g in word]
        return "^".join(parts)

    def test_forms(self) -> List[Form]:
        """
        dz_j for every j, then every wedge word with the coefficient
        1 + Σ z_i + Σ z̄_i + z_1 z̄_1, so ∂, ∂̄ and products of two hats act
        nontrivially.
        """
        forms = [{(j,): self.ring.one} for j in range(self.n)]
        coefficient = self.ring.one + sum(self.z) + sum(self.zb) + self.z[0] * self.zb[0]
        for k in range(1, 2 * self.n + 1):
            forms.extend({word: coefficient} for word in combinations(range(2 * self.n), k))
        return forms

    def monomial_forms(self, D: Optional[int] = None) -> List[Form]:
        """The basis forms of fragment(D): one monomial coefficient on one wedge word."""
        bound = self.D if D is None else D
        words = [w for k in range(2 * self.n + 1) for w in combinations(range(2 * self.n), k)]
        return [{word: monomial} for monomial in self.monomials(bound) for word in words]

    def fragment(self, D: Optional[int] = None) -> Fragment:
        """Finite space of forms with monomial coefficients of degree <= D, with ∂, ∂̄."""
        bound = self.D if D is None else D
        all_words = [w for k in range(2 * self.n + 1) for w in combinations(range(2 * self.n), k)]
        keys = []
        elements = []
        for monomial in self.monomials(bound):
            for word in all_words:
                name = f"{monomial.as_expr()}*{self.word_label(word)}"
                p, q = self.bidegree(word)
                keys.append((word, monomial))
                elements.append(BasisElement(name, p + q, (p, q)))
        space = GradedSpace(tuple(elements))
        lookup = {(word, monomial): e.name for (word, monomial), e in zip(keys, elements)}

        def to_columns(operator) -> Dict[str, Dict[str, object]]:
            columns = {}
            for (word, monomial), element in zip(keys, elements):
                image = operator({word: monomial})
                column = {}
                for new_word, coeff in image.items():
                    for exps, c in coeff.terms():
                        mono = self.ring.from_dict({exps: QQ(1)})
                        column[lookup[(new_word, mono)]] = scalar(Fraction(int(c.numerator), int(c.denominator)))
                if column:
                    columns[element.name] = column
            return columns

        del_ = GradedLinearMap(space, space, 1, to_columns(self.del_), bidegree=(1, 0))
        delbar = GradedLinearMap(space, space, 1, to_columns(self.delbar), bidegree=(0, 1))
        return Fragment(space, del_, delbar)


def build_polynomial_model(n: int, D: int) -> PolynomialModel:
    logger.info("building polynomial model on C^%d with coefficient degree <= %d", n, D)
    return PolynomialModel(n, D)


def _commutator(first, first_degree: int, second, second_degree: int):
    """[f, g] = f g - (-1)^{|f||g|} g f on forms, given as callables."""
    s = 1 if (first_degree * second_degree) % 2 else -1

    def apply(form):
        return _combine_forms(first(second(form)), second(first(form)), s)
    return apply


def _combine_forms(left: Form, right: Form, s: int) -> Form:
    total = dict(left)
    for word, coeff in right.items():
        total[word] = total.get(word, 0) + s * coeff
    return {w: c for w, c in total.items() if c}


def bracket_hat(model: PolynomialModel, a: Field, b: Field) -> Callable[[Form], Form]:
    """-[[∂, â], b̂] as an operator on forms."""
    a_deg, b_deg = model.field_degree(a), model.field_degree(b)
    inner = _commutator(model.del_, 1, model.hat(a), a_deg)
    outer = _commutator(inner, a_deg + 1, model.hat(b), b_deg)
    return lambda form: model.scale(-1, outer(form))


def commutator_expansion(model: PolynomialModel, a: Field, b: Field) -> Callable[[Form], Form]:
    """The four-term expansion with the coefficients of commutator_coefficients."""
    coefficients = commutator_coefficients(model.field_degree(a), model.field_degree(b))
    ha, hb, d = model.hat(a), model.hat(b), model.del_

    def apply(form: Form) -> Form:
        return model.add(
            model.scale(coefficients["a_del_b"], ha(d(hb(form)))),
            model.scale(coefficients["b_del_a"], hb(d(ha(form)))),
            model.scale(coefficients["del_a_b"], d(ha(hb(form)))),
            model.scale(coefficients["b_a_del"], hb(ha(d(form)))),
        )
    return apply


def check_hat_commutators(model: PolynomialModel, generators: Optional[List[Tuple[str, Field]]] = None,
                          forms: Optional[List[Form]] = None) -> Report:
    """
    Both hat identities, [â, b̂] = 0, the symmetry of [[∂,â],b̂] and the fixed
    commutator signs, for every generator (pair) on every test form.
    """
    generators = model.generators() if generators is None else generators
    forms = model.test_forms() if forms is None else forms
    report = Report(f"hat_identities[n={model.n},D={model.D}]")
    logger.info("checking hat identities on %d generators", len(generators))

    witness = None
    for label, a in generators:
        a_deg = model.field_degree(a)
        lhs_op = model.hat(model.d_field(a))
        rhs_op = _commutator(model.delbar, 1, model.hat(a), a_deg)
        if any(lhs_op(f) != rhs_op(f) for f in forms):
            witness = label
            break
    report.add("(da)^ = [delbar, hat a]", witness is None, witness=witness)

    witness = None
    kills = None
    for label, a in generators:
        ha = model.hat(a)
        for word in model.antiholomorphic_words():
            if ha({word: model.ring.one + model.z[0] * model.zb[0]}):
                kills = label
                break
        if kills:
            break
    report.add("hat kills A^{0,*}", kills is None, witness=kills)

    failures = {"bracket": None, "commute": None, "symmetry": None, "signs": None}
    for (la, a), (lb, b) in product(generators, repeat=2):
        a_deg, b_deg = model.field_degree(a), model.field_degree(b)
        q = model.Q(a, b)
        lhs = model.hat(q)
        rhs = bracket_hat(model, a, b)
        expansion = commutator_expansion(model, a, b)
        commute = _commutator(model.hat(a), a_deg, model.hat(b), b_deg)
        other = bracket_hat(model, b, a)
        s = -1 if (a_deg * b_deg) % 2 else 1
        for form in forms:
            value = rhs(form)
            if failures["bracket"] is None and lhs(form) != value:
                failures["bracket"] = [la, lb]
            if failures["signs"] is None and expansion(form) != value:
                failures["signs"] = [la, lb]
            if failures["commute"] is None and commute(form):
                failures["commute"] = [la, lb]
            if failures["symmetry"] is None and value != model.scale(s, other(form)):
                failures["symmetry"] = [la, lb]
        if all(v is not None for v in failures.values()):
            break
    report.add("Q(a.b)^ = -[[del, hat a], hat b]", failures["bracket"] is None, witness=failures["bracket"])
    report.add("commutator signs", failures["signs"] is None, witness=failures["signs"])
    report.add("[hat a, hat b] = 0", failures["commute"] is None, witness=failures["commute"])
    report.add("[[del,a],b] = (-1)^(ab) [[del,b],a]", failures["symmetry"] is None,
               witness=failures["symmetry"])
    report.data["generators"] = len(generators)
    return report
