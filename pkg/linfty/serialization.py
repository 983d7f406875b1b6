"""
Versioned JSON formats for every input and output type.

Every file carries ``"format": "linfty-lab/1"`` and a ``kind``. Scalars are
exact strings ("3/2", "-1/3*i", "1/2+1/2*i"); unknown fields are rejected.
"""

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from config.settings import FORMAT_VERSION
from linfty.coalgebra import Family, basis_words
from linfty.deformation import ArtinAlgebra, Monomial, SmallExtension, TensorElement
from linfty.dgla import DGLA
from linfty.exceptions import InputError, LinftyError
from linfty.graded import BasisElement, GradedLinearMap, GradedSpace, Vector
from linfty.kahler import BigradedAlgebra, HatAssignment, OperatorPackage, derive_package
from linfty.linalg import InnerProduct
from linfty.scalars import format_scalar, parse_scalar
from utils.helpers import canonical_json, digest

logger = logging.getLogger(__name__)

_RING = re.compile(r"^C\[(?P<vars>[A-Za-z_]\w*(?:,[A-Za-z_]\w*)*)\](?:/(?P<quotient>.+))?$")
_POWER = re.compile(r"^(?P<var>[A-Za-z_]\w*)(?:\^(?P<exp>\d+))?$")
_ORDER = re.compile(r"^m\^(?P<order>\d+)$")
_CURVILINEAR = re.compile(r"^curvilinear:(?P<n>\d+)$")


def parse_json(text: str, path: Optional[str] = None) -> Any:
    """json.loads with decode errors turned into InputError carrying line and column."""
    if not text.strip():
        raise InputError("empty input", path=path, line=1, column=1)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(exc.msg, path=path, line=exc.lineno, column=exc.colno) from exc


def load_json(path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read input: {exc.strerror}", path=str(path)) from exc
    return parse_json(text, str(path))


def _fields(data: Any, where: str, required: Iterable[str], optional: Iterable[str] = ()) -> Dict:
    if not isinstance(data, dict):
        raise InputError(f"{where}: expected an object, got {type(data).__name__}")
    required = list(required)
    allowed = set(required) | set(optional)
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise InputError(f"{where}: unknown field {unknown[0]!r}")
    missing = [name for name in required if name not in data]
    if missing:
        raise InputError(f"{where}: missing field {missing[0]!r}")
    return data


def _header(data: Any, kind: str) -> Dict:
    if not isinstance(data, dict):
        raise InputError(f"{kind}: expected an object")
    if data.get("format") != FORMAT_VERSION:
        raise InputError(f"{kind}: format must be {FORMAT_VERSION!r}, got {data.get('format')!r}")
    if data.get("kind") != kind:
        raise InputError(f"expected kind {kind!r}, got {data.get('kind')!r}")
    return data


def _document(kind: str, body: Dict) -> Dict:
    return {"format": FORMAT_VERSION, "kind": kind, **body}


# -- spaces, vectors and maps ------------------------------------------------

def space_to_json(space: GradedSpace) -> List[Dict]:
    basis = []
    for element in space.basis:
        entry: Dict[str, Any] = {"name": element.name}
        if element.bidegree is not None and not space.shift:
            entry["bidegree"] = list(element.bidegree)
        else:
            entry["degree"] = space.degree(element.name)
        basis.append(entry)
    return basis


def space_from_json(data: Any, where: str = "basis") -> GradedSpace:
    if not isinstance(data, list):
        raise InputError(f"{where}: expected a list of basis elements")
    elements = []
    for index, entry in enumerate(data):
        entry = _fields(entry, f"{where}[{index}]", ["name"], ["degree", "bidegree"])
        name = entry["name"]
        if not isinstance(name, str) or not name:
            raise InputError(f"{where}[{index}]: name must be a non-empty string")
        if "bidegree" in entry:
            bidegree = entry["bidegree"]
            if not (isinstance(bidegree, list) and len(bidegree) == 2 and all(isinstance(b, int) for b in bidegree)):
                raise InputError(f"{where}[{index}]: bidegree must be [p, q]")
            degree = entry.get("degree", sum(bidegree))
            if degree != sum(bidegree):
                raise InputError(f"{where}[{index}]: degree disagrees with bidegree")
            elements.append(BasisElement(name, degree, tuple(bidegree)))
        elif isinstance(entry.get("degree"), int):
            elements.append(BasisElement(name, entry["degree"]))
        else:
            raise InputError(f"{where}[{index}]: needs an integer degree or a bidegree")
    try:
        return GradedSpace(tuple(elements))
    except LinftyError as exc:
        raise InputError(f"{where}: {exc}") from exc


def vector_to_json(vector: Vector) -> Dict[str, str]:
    return {name: format_scalar(coeff) for name, coeff in vector.items()}


def vector_from_json(data: Any, space: GradedSpace, where: str = "vector") -> Vector:
    if not isinstance(data, dict):
        raise InputError(f"{where}: expected {{name: scalar}}")
    unknown = [name for name in data if name not in space]
    if unknown:
        raise InputError(f"{where}: unknown basis element {unknown[0]!r}")
    return Vector(space, {name: parse_scalar(value) for name, value in data.items()})


def map_to_json(f: GradedLinearMap) -> List[List[str]]:
    """Sparse [source, target, scalar] triplets in basis order."""
    return [[src, tgt, format_scalar(value)] for src, tgt, value in f.entries()]


def map_from_json(data: Any, source: GradedSpace, target: GradedSpace, degree: int,
                  where: str = "map", bidegree=None) -> GradedLinearMap:
    if not isinstance(data, list):
        raise InputError(f"{where}: expected a list of [source, target, scalar] triplets")
    columns: Dict[str, Dict[str, Any]] = {}
    for index, entry in enumerate(data):
        if not (isinstance(entry, list) and len(entry) == 3 and all(isinstance(part, str) for part in entry)):
            raise InputError(f"{where}[{index}]: expected [source, target, scalar]")
        src, tgt, value = entry
        if src not in source:
            raise InputError(f"{where}[{index}]: unknown source element {src!r}")
        if tgt not in target:
            raise InputError(f"{where}[{index}]: unknown target element {tgt!r}")
        column = columns.setdefault(src, {})
        if tgt in column:
            raise InputError(f"{where}[{index}]: duplicate entry {src} -> {tgt}")
        column[tgt] = parse_scalar(value)
    try:
        return GradedLinearMap(source, target, degree, columns, bidegree=bidegree)
    except LinftyError as exc:
        raise InputError(f"{where}: {exc}") from exc


def _table_to_json(entries) -> List[Dict]:
    return [{"a": a, "b": b, "value": vector_to_json(value)} for a, b, value in entries]


def _table_from_json(data: Any, space: GradedSpace, where: str) -> Dict[Tuple[str, str], Vector]:
    if not isinstance(data, list):
        raise InputError(f"{where}: expected a list of {{a, b, value}}")
    table = {}
    for index, entry in enumerate(data):
        entry = _fields(entry, f"{where}[{index}]", ["a", "b", "value"])
        for side in ("a", "b"):
            if entry[side] not in space:
                raise InputError(f"{where}[{index}]: unknown basis element {entry[side]!r}")
        key = (entry["a"], entry["b"])
        if key in table:
            raise InputError(f"{where}[{index}]: duplicate entry for {key}")
        table[key] = vector_from_json(entry["value"], space, f"{where}[{index}].value")
    return table


# -- DGLAs and families --------------------------------------------------------

def dgla_to_json(g: DGLA) -> Dict:
    return _document("dgla", {
        "name": g.name,
        "basis": space_to_json(g.space),
        "d": map_to_json(g.d),
        "bracket": _table_to_json(g.bracket_entries()),
    })


def dgla_from_json(data: Any) -> DGLA:
    data = _fields(_header(data, "dgla"), "dgla", ["format", "kind", "basis"], ["name", "d", "bracket"])
    space = space_from_json(data["basis"])
    d = map_from_json(data.get("d", []), space, space, 1, "d")
    bracket = _table_from_json(data.get("bracket", []), space, "bracket")
    try:
        return DGLA(space, d, bracket, name=data.get("name", "K"))
    except LinftyError as exc:
        raise InputError(f"dgla: {exc}") from exc


def family_to_json(F: Family, cutoff: Optional[int] = None) -> Dict:
    """Nonzero components on basis words up to ``cutoff``; by default the longest tabulated word."""
    if cutoff is None:
        cutoff = max((len(word) for word in F.known_words()), default=1)
    values = []
    for word in basis_words(F.source, cutoff):
        value = F.component(word)
        if not value.is_zero():
            values.append({"word": list(word), "value": vector_to_json(value)})
    body = {"target": space_to_json(F.target), "degree": F.degree, "values": values}
    if F.max_length is not None:
        body["max_length"] = F.max_length
    return _document("family", body)


def family_from_json(data: Any, g: DGLA) -> Family:
    """A family S̄(L) -> target with L = K[1] of the given DGLA."""
    data = _fields(_header(data, "family"), "family", ["format", "kind", "target", "values"],
                   ["degree", "max_length"])
    target = space_from_json(data["target"], "target")
    if not isinstance(data["values"], list):
        raise InputError("family.values: expected a list")
    values = {}
    for index, entry in enumerate(data["values"]):
        entry = _fields(entry, f"values[{index}]", ["word", "value"])
        word = entry["word"]
        if not isinstance(word, list) or not word or any(name not in g.L for name in word):
            raise InputError(f"values[{index}]: word must list basis elements of the DGLA")
        values[tuple(word)] = vector_from_json(entry["value"], target, f"values[{index}].value")
    try:
        return Family(g.L, target, values=values, max_length=data.get("max_length"),
                      degree=data.get("degree", 0))
    except LinftyError as exc:
        raise InputError(f"family: {exc}") from exc


# -- Kähler packages and hats ------------------------------------------------

def package_to_json(pkg: OperatorPackage, include_tau: bool = False) -> Dict:
    space = pkg.space
    gram = pkg.ip.gram
    body: Dict[str, Any] = {
        "basis": space_to_json(space),
        "product": _table_to_json(pkg.algebra.product_entries()),
        "del": map_to_json(pkg.del_),
        "delbar": map_to_json(pkg.delbar),
        "gram": [[format_scalar(value) for value in row] for row in gram],
    }
    if pkg.algebra.unit is not None:
        body["unit"] = pkg.algebra.unit
    if include_tau:
        body["tau"] = map_to_json(pkg.tau)
    return _document("package", body)


def _gram_from_json(data: Any, space: GradedSpace) -> InnerProduct:
    if isinstance(data, list):
        if len(data) != space.dim or any(not isinstance(row, list) or len(row) != space.dim for row in data):
            raise InputError(f"gram: expected a {space.dim}x{space.dim} matrix")
        return InnerProduct(space, [[parse_scalar(value) for value in row] for row in data])
    data = _fields(data, "gram", ["diagonal"])
    weights = vector_from_json(data["diagonal"], space, "gram.diagonal")
    return InnerProduct.diagonal(space, weights.to_dict())


def package_from_json(data: Any) -> OperatorPackage:
    data = _fields(_header(data, "package"), "package", ["format", "kind", "basis", "del", "delbar"],
                   ["product", "unit", "gram", "tau"])
    space = space_from_json(data["basis"])
    if not space.has_bidegrees:
        raise InputError("package: every basis element needs a bidegree")
    try:
        algebra = BigradedAlgebra(space, _table_from_json(data.get("product", []), space, "product"),
                                  unit=data.get("unit"))
        del_ = map_from_json(data["del"], space, space, 1, "del", bidegree=(1, 0))
        delbar = map_from_json(data["delbar"], space, space, 1, "delbar", bidegree=(0, 1))
        ip = _gram_from_json(data["gram"], space) if "gram" in data else InnerProduct.orthonormal(space)
        pkg = derive_package(algebra, del_, delbar, ip)
    except InputError:
        raise
    except LinftyError as exc:
        raise InputError(f"package: {exc}") from exc
    if "tau" in data:
        tau = map_from_json(data["tau"], space, space, 0, "tau", bidegree=(1, -1))
        pkg = OperatorPackage(algebra, del_, delbar, ip, tau=tau)
    return pkg


def hats_to_json(hat: HatAssignment) -> Dict:
    return _document("hats", {"hats": {name: map_to_json(f) for name, f in hat.items()}})


def hats_from_json(data: Any, g: DGLA, space: GradedSpace) -> HatAssignment:
    data = _fields(_header(data, "hats"), "hats", ["format", "kind", "hats"])
    if not isinstance(data["hats"], dict):
        raise InputError("hats: expected {name: map}")
    hats = {}
    for name, columns in data["hats"].items():
        if name not in g.L:
            raise InputError(f"hats: unknown DGLA element {name!r}")
        hats[name] = map_from_json(columns, space, space, g.L.degree(name), f"hats.{name}")
    try:
        return HatAssignment(g, space, hats)
    except LinftyError as exc:
        raise InputError(f"hats: {exc}") from exc


# -- rings, extensions and tensors -------------------------------------------

def parse_monomial(text: str, variables: Tuple[str, ...]) -> Monomial:
    """'t1*t2^3' -> exponent tuple over ``variables``."""
    exponents = [0] * len(variables)
    for factor in text.replace(" ", "").split("*"):
        match = _POWER.match(factor)
        if not match or match.group("var") not in variables:
            raise InputError(f"bad monomial {text!r} over variables {list(variables)}")
        exponents[variables.index(match.group("var"))] += int(match.group("exp") or 1)
    return tuple(exponents)


def parse_ring(text: str) -> ArtinAlgebra:
    """
    Parse ring syntax such as "C[t]/(t^4)", "C[t,s]/(t^2,s^2)" or "C[t,s]/m^3".

    Monomial relations and a total-degree truncation may be combined with '+':
    "C[t,s]/(t^2)+m^3".
    """
    if not isinstance(text, str):
        raise InputError(f"ring must be a string, got {text!r}")
    match = _RING.match(text.replace(" ", ""))
    if not match:
        raise InputError(f"bad ring syntax {text!r}")
    variables = tuple(match.group("vars").split(","))
    relations: List[Monomial] = []
    order = None
    for part in (match.group("quotient") or "").split("+") if match.group("quotient") else []:
        order_match = _ORDER.match(part)
        if order_match:
            order = int(order_match.group("order"))
        elif part.startswith("(") and part.endswith(")"):
            relations.extend(parse_monomial(m, variables) for m in part[1:-1].split(",") if m)
        else:
            raise InputError(f"bad quotient {part!r} in ring {text!r}")
    try:
        return ArtinAlgebra(variables, relations, order)
    except LinftyError as exc:
        raise InputError(f"ring {text!r}: {exc}") from exc


def parse_extension(data: Any) -> SmallExtension:
    """"eps", "curvilinear:n" or {"A": ring, "B": ring}."""
    try:
        if data == "eps":
            return SmallExtension.epsilon()
        if isinstance(data, str):
            match = _CURVILINEAR.match(data)
            if not match:
                raise InputError(f"bad extension {data!r}")
            return SmallExtension.curvilinear(int(match.group("n")))
        data = _fields(data, "extension", ["A", "B"])
        return SmallExtension(parse_ring(data["A"]), parse_ring(data["B"]))
    except InputError:
        raise
    except LinftyError as exc:
        raise InputError(f"extension: {exc}") from exc


def tensor_to_json(x: TensorElement) -> Dict[str, Dict[str, str]]:
    return {x.ring.label(m): vector_to_json(v) for m, v in x.items()}


def tensor_from_json(data: Any, space: GradedSpace, ring: ArtinAlgebra, where: str = "tensor") -> TensorElement:
    if not isinstance(data, dict):
        raise InputError(f"{where}: expected {{monomial: vector}}")
    parts = {}
    for label, vector in data.items():
        monomial = parse_monomial(label, ring.variables)
        if monomial not in ring:
            raise InputError(f"{where}: {label} is zero in {ring}")
        parts[monomial] = vector_from_json(vector, space, f"{where}.{label}")
    return TensorElement(space, ring, parts)


# -- manifests -----------------------------------------------------------------

MANIFEST_FIELDS = ("format", "kind", "name", "description", "dgla", "package", "hats", "hat_search",
                   "family", "corrupt_tau", "ring", "start", "gauge", "extension", "tower", "cutoff", "seed")


@dataclass
class Manifest:
    """A loaded manifest: parsed inputs plus the raw documents used for the inputs digest."""

    path: Path
    name: str
    description: Optional[str] = None
    dgla: Optional[DGLA] = None
    package: Optional[OperatorPackage] = None
    hats: Optional[HatAssignment] = None
    hat_search: Optional[int] = None
    family: Optional[Family] = None
    corrupt_tau: bool = False
    ring: Optional[ArtinAlgebra] = None
    start: Optional[TensorElement] = None
    gauge: Optional[TensorElement] = None
    extension: Optional[SmallExtension] = None
    tower: Optional[int] = None
    cutoff: Optional[int] = None
    seed: Optional[int] = None
    documents: Dict[str, Any] = field(default_factory=dict)

    @property
    def inputs_digest(self) -> str:
        return digest(self.documents)

    def require(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise InputError(f"manifest has no {missing[0]!r}", path=str(self.path))


def _load_ref(ref: Any, base: Path, where: str) -> Any:
    if isinstance(ref, str):
        return load_json(base / ref)
    if isinstance(ref, dict):
        return ref
    raise InputError(f"{where}: expected a file name or an inline document")


def _int_field(data: Mapping, name: str, minimum: int) -> Optional[int]:
    value = data.get(name)
    if value is None:
        return None
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise InputError(f"manifest: {name} must be an integer >= {minimum}")
    return value


def load_manifest(path) -> Manifest:
    """Load a manifest and everything it references, relative to its directory."""
    path = Path(path)
    return manifest_from_json(load_json(path), path)


def manifest_from_json(raw: Any, path: Path) -> Manifest:
    """Parse a manifest document; file references resolve against ``path.parent``."""
    path = Path(path)
    data = _fields(_header(raw, "manifest"), "manifest", ["format", "kind", "name"],
                   [f for f in MANIFEST_FIELDS if f not in ("format", "kind", "name")])
    base = path.parent
    if not isinstance(data.get("description", ""), str):
        raise InputError("manifest: description must be a string", path=str(path))
    manifest = Manifest(path=path, name=data["name"], description=data.get("description"))
    documents = manifest.documents

    try:
        if "dgla" in data:
            documents["dgla"] = _load_ref(data["dgla"], base, "dgla")
            manifest.dgla = dgla_from_json(documents["dgla"])
        if "package" in data:
            documents["package"] = _load_ref(data["package"], base, "package")
            manifest.package = package_from_json(documents["package"])
        if "hats" in data:
            if manifest.dgla is None or manifest.package is None:
                raise InputError("manifest: hats need both a dgla and a package")
            documents["hats"] = _load_ref(data["hats"], base, "hats")
            manifest.hats = hats_from_json(documents["hats"], manifest.dgla, manifest.package.space)
        if "family" in data:
            if manifest.dgla is None:
                raise InputError("manifest: a family needs a dgla")
            documents["family"] = _load_ref(data["family"], base, "family")
            manifest.family = family_from_json(documents["family"], manifest.dgla)
        if "ring" in data:
            manifest.ring = parse_ring(data["ring"])
            documents["ring"] = str(manifest.ring)
        for name in ("start", "gauge"):
            if name in data:
                if manifest.dgla is None or manifest.ring is None:
                    raise InputError(f"manifest: {name} needs a dgla and a ring")
                element = tensor_from_json(data[name], manifest.dgla.space, manifest.ring, name)
                setattr(manifest, name, element)
                documents[name] = tensor_to_json(element)
        if "extension" in data:
            manifest.extension = parse_extension(data["extension"])
            documents["extension"] = str(manifest.extension)
    except InputError as exc:
        if exc.path is None:
            raise InputError(str(exc), path=str(path)) from exc
        raise

    manifest.hat_search = _int_field(data, "hat_search", 0)
    manifest.tower = _int_field(data, "tower", 2)
    manifest.cutoff = _int_field(data, "cutoff", 1)
    manifest.seed = _int_field(data, "seed", 0)
    if not isinstance(data.get("corrupt_tau", False), bool):
        raise InputError("manifest: corrupt_tau must be a boolean", path=str(path))
    manifest.corrupt_tau = data.get("corrupt_tau", False)
    for name in ("hat_search", "tower", "cutoff", "seed", "corrupt_tau"):
        if name in data:
            documents[name] = data[name]
    logger.info("loaded manifest %s (%s)", manifest.name, ", ".join(sorted(documents)))
    return manifest


def manifest_to_json(manifest: Manifest) -> Dict:
    """The manifest with every referenced document written inline in canonical form."""
    body: Dict[str, Any] = {"name": manifest.name}
    if manifest.description is not None:
        body["description"] = manifest.description
    if manifest.dgla is not None:
        body["dgla"] = dgla_to_json(manifest.dgla)
    if manifest.package is not None:
        body["package"] = package_to_json(manifest.package, include_tau="tau" in manifest.documents["package"])
    if manifest.hats is not None:
        body["hats"] = hats_to_json(manifest.hats)
    if manifest.family is not None:
        body["family"] = family_to_json(manifest.family)
    if manifest.ring is not None:
        body["ring"] = str(manifest.ring)
    for name in ("start", "gauge"):
        element = getattr(manifest, name)
        if element is not None:
            body[name] = tensor_to_json(element)
    if manifest.extension is not None:
        body["extension"] = {"A": str(manifest.extension.A), "B": str(manifest.extension.B)}
    for name in ("hat_search", "tower", "cutoff", "seed", "corrupt_tau"):
        if name in manifest.documents:
            body[name] = getattr(manifest, name)
    return _document("manifest", body)


def reserialize(document: Dict, dgla: Optional[DGLA] = None, package: Optional[OperatorPackage] = None,
                base: Optional[Path] = None) -> str:
    """
    Parse a document of any kind and write it back canonically.

    Args:
        document: A parsed JSON document
        dgla: The DGLA a family or hats document refers to
        package: The package a hats document acts on
        base: Directory that a manifest's file references resolve against

    Returns:
        Canonical JSON text; parsing it and writing it again gives the same text
    """
    kind = document.get("kind") if isinstance(document, dict) else None
    if kind == "dgla":
        return canonical_json(dgla_to_json(dgla_from_json(document)))
    if kind == "package":
        return canonical_json(package_to_json(package_from_json(document), include_tau="tau" in document))
    if kind == "family":
        if dgla is None:
            raise InputError("family documents need the dgla they are defined on")
        return canonical_json(family_to_json(family_from_json(document, dgla)))
    if kind == "hats":
        if dgla is None or package is None:
            raise InputError("hats documents need a dgla and a package")
        return canonical_json(hats_to_json(hats_from_json(document, dgla, package.space)))
    if kind == "manifest":
        path = Path(base if base is not None else ".") / "manifest.json"
        return canonical_json(manifest_to_json(manifest_from_json(document, path)))
    raise InputError(f"unknown document kind {kind!r}")
