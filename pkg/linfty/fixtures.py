"""
Named fixtures: small DGLAs, Kähler packages and hat assignments with
hand-checked values. The JSON files under fixtures/ are written from these.
"""

from typing import Dict, Tuple

from linfty.coalgebra import Family
from linfty.dgla import DGLA
from linfty.graded import GradedLinearMap, GradedSpace, Vector
from linfty.kahler import BigradedAlgebra, HatAssignment, OperatorPackage, derive_package
from linfty.linalg import InnerProduct
from linfty.scalars import scalar


def _map(space: GradedSpace, degree: int, columns: Dict[str, Dict[str, int]], bidegree=None) -> GradedLinearMap:
    return GradedLinearMap(space, space, degree,
                           {src: {tgt: scalar(c) for tgt, c in col.items()} for src, col in columns.items()},
                           bidegree=bidegree)


def _vec(space: GradedSpace, coords: Dict[str, int]) -> Vector:
    return Vector(space, {name: scalar(c) for name, c in coords.items()})


# -- DGLAs ---------------------------------------------------------------------

def fix_dgla_1() -> DGLA:
    """x in degree 1, y in degree 2, [x, x] = y, d = 0."""
    space = GradedSpace.from_degrees({"x": 1, "y": 2})
    return DGLA(space, bracket={("x", "x"): _vec(space, {"y": 1})}, name="fix-dgla-1")


def leibniz_broken() -> DGLA:
    """dx = y and [u, x] = x: d[u, x] = y while [du, x] + [u, dx] = 0."""
    space = GradedSpace.from_degrees({"u": 0, "x": 1, "y": 2})
    d = _map(space, 1, {"x": {"y": 1}})
    return DGLA(space, d, {("u", "x"): _vec(space, {"x": 1})}, name="leibniz-broken")


def jacobi_violating() -> DGLA:
    """Three degree-0 generators with [e1, e2] = e2, [e2, e3] = e1, [e1, e3] = 0."""
    space = GradedSpace.from_degrees({"e1": 0, "e2": 0, "e3": 0})
    bracket = {("e1", "e2"): _vec(space, {"e2": 1}), ("e2", "e3"): _vec(space, {"e1": 1})}
    return DGLA(space, bracket=bracket, name="jacobi-violating")


def fix_massey() -> DGLA:
    """
    dz = y, [x, x] = -2y, [x, z] = w.

    The primary obstruction of x vanishes because y is exact; the tower
    picks z at order 2 and meets [w] at order 3.
    """
    space = GradedSpace.from_degrees({"x": 1, "z": 1, "y": 2, "w": 2})
    d = _map(space, 1, {"z": {"y": 1}})
    bracket = {("x", "x"): _vec(space, {"y": -2}), ("x", "z"): _vec(space, {"w": 1})}
    return DGLA(space, d, bracket, name="fix-massey")


def abelian(degrees: Dict[str, int], name: str = "abelian") -> DGLA:
    return DGLA.abelian(GradedSpace.from_degrees(degrees), name=name)


def kah_2_dgla() -> DGLA:
    """a1, a2 in degree 0 and b in degree 1; da_i = b, [a1, a2] = a1 - a2, [a_i, b] = -b."""
    space = GradedSpace.from_degrees({"a1": 0, "a2": 0, "b": 1})
    d = _map(space, 1, {"a1": {"b": 1}, "a2": {"b": 1}})
    bracket = {
        ("a1", "a2"): _vec(space, {"a1": 1, "a2": -1}),
        ("a1", "b"): _vec(space, {"b": -1}),
        ("a2", "b"): _vec(space, {"b": -1}),
    }
    return DGLA(space, d, bracket, name="fix-kah-2-dgla")


# -- Kähler packages -------------------------------------------------------------

def fix_kah_1(skewed: bool = False) -> OperatorPackage:
    """
    one, x, y, xy with zero product; ∂: one -> x, y -> xy; ∂̄: one -> y, x -> -xy.

    With the orthonormal metric Δ = G = Id and there is no harmonic part.
    ``skewed`` weights x by 2, which breaks [∂, ∂̄*] = 0.
    """
    space = GradedSpace.from_bidegrees({"one": (0, 0), "x": (1, 0), "y": (0, 1), "xy": (1, 1)})
    algebra = BigradedAlgebra(space)
    del_ = _map(space, 1, {"one": {"x": 1}, "y": {"xy": 1}}, bidegree=(1, 0))
    delbar = _map(space, 1, {"one": {"y": 1}, "x": {"xy": -1}}, bidegree=(0, 1))
    ip = InnerProduct.diagonal(space, {"x": scalar(2)}) if skewed else InnerProduct.orthonormal(space)
    return derive_package(algebra, del_, delbar, ip)


def fix_kah_1_ext() -> OperatorPackage:
    """FIX-KAH-1 plus a harmonic w of bidegree (1, 1)."""
    space = GradedSpace.from_bidegrees({"one": (0, 0), "x": (1, 0), "y": (0, 1), "xy": (1, 1), "w": (1, 1)})
    algebra = BigradedAlgebra(space)
    del_ = _map(space, 1, {"one": {"x": 1}, "y": {"xy": 1}}, bidegree=(1, 0))
    delbar = _map(space, 1, {"one": {"y": 1}, "x": {"xy": -1}}, bidegree=(0, 1))
    return derive_package(algebra, del_, delbar, InnerProduct.orthonormal(space))


def kah_1_ext_dgla() -> DGLA:
    return abelian({"a": 0}, name="fix-kah-1-ext-dgla")


def fix_kah_2() -> OperatorPackage:
    """
    FIX-KAH-1 with ∂̄ doubled plus harmonic h0 (0, 0) and h1 (1, 0).

    G is 1/4 on the non-harmonic block and τ(y) = -x/2.
    """
    space = GradedSpace.from_bidegrees({"one": (0, 0), "x": (1, 0), "y": (0, 1), "xy": (1, 1),
                                        "h0": (0, 0), "h1": (1, 0)})
    algebra = BigradedAlgebra(space)
    del_ = _map(space, 1, {"one": {"x": 1}, "y": {"xy": 1}}, bidegree=(1, 0))
    delbar = _map(space, 1, {"one": {"y": 2}, "x": {"xy": -2}}, bidegree=(0, 1))
    return derive_package(algebra, del_, delbar, InnerProduct.orthonormal(space))


def kah_2_hats(pkg: OperatorPackage, g: DGLA) -> HatAssignment:
    space = pkg.space
    hats = {
        "a1": _map(space, -1, {"x": {"one": 1, "h0": 1}, "h1": {"one": 1, "h0": 1}}),
        "a2": _map(space, -1, {"x": {"one": 1}, "h1": {"one": 1}}),
        "b": _map(space, 0, {"x": {"y": 2}, "h1": {"y": 2}}),
    }
    return HatAssignment(g, space, hats)


def fix_kah_2_setup() -> Tuple[OperatorPackage, DGLA, HatAssignment]:
    pkg = fix_kah_2()
    g = kah_2_dgla()
    return pkg, g, kah_2_hats(pkg, g)


def fix_torus() -> OperatorPackage:
    """Constant forms one, dz, dzb, dzdzb on a complex torus; ∂ = ∂̄ = 0."""
    space = GradedSpace.from_bidegrees({"one": (0, 0), "dz": (1, 0), "dzb": (0, 1), "dzdzb": (1, 1)})
    algebra = BigradedAlgebra(space, {("dz", "dzb"): _vec(space, {"dzdzb": 1})}, unit="one")
    del_ = GradedLinearMap.zero(space, space, 1, bidegree=(1, 0))
    delbar = GradedLinearMap.zero(space, space, 1, bidegree=(0, 1))
    return derive_package(algebra, del_, delbar, InnerProduct.orthonormal(space))


def torus_setup() -> Tuple[OperatorPackage, DGLA, HatAssignment]:
    """
    The contraction hats of ∂/∂z (a, degree 0) and dz̄ ∂/∂z (c, degree 1).

    â: dz -> 1, dz∧dz̄ -> dz̄ and ĉ: dz -> dz̄.
    """
    pkg = fix_torus()
    g = abelian({"a": 0, "c": 1}, name="torus-fields")
    hats = {
        "a": _map(pkg.space, -1, {"dz": {"one": 1}, "dzdzb": {"dzb": 1}}),
        "c": _map(pkg.space, 0, {"dz": {"dzb": 1}}),
    }
    return pkg, g, HatAssignment(g, pkg.space, hats)


def torus_omega(pkg: OperatorPackage) -> Vector:
    return Vector.basis_vector(pkg.space, "dz")


# -- L-infinity families into abelian targets --------------------------------

def pipeline_family(g: DGLA) -> Family:
    """F_1(x) = e and F_2(x⊙x) = e into a single degree-0 line; F∘δ = 0 on FIX-DGLA-1."""
    target = GradedSpace.from_degrees({"e": 0})
    e = _vec(target, {"e": 1})
    return Family(g.L, target, values={("x",): e, ("x", "x"): e}, max_length=2)


def projection_family(g: DGLA) -> Family:
    """F_1 = cohomology projection of FIX-DGLA-1; fails F∘δ = 0 at x⊙x."""
    target = GradedSpace.from_degrees({"[x]": 0, "[y]": 1})
    return Family(g.L, target, values={("x",): _vec(target, {"[x]": 1}), ("y",): _vec(target, {"[y]": 1})},
                  max_length=1)
