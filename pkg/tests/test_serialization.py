"""
Tests for the JSON codecs, ring syntax and manifest loading.
"""

import json
from pathlib import Path

import pytest

from config.settings import FORMAT_VERSION
from linfty import fixtures
from linfty.deformation import SmallExtension
from linfty.exceptions import InputError
from linfty.scalars import parse_scalar
from linfty.serialization import (
    dgla_from_json,
    dgla_to_json,
    family_from_json,
    family_to_json,
    hats_from_json,
    hats_to_json,
    load_json,
    load_manifest,
    map_from_json,
    map_to_json,
    package_from_json,
    package_to_json,
    parse_extension,
    parse_json,
    parse_monomial,
    parse_ring,
    reserialize,
    space_from_json,
    tensor_from_json,
    tensor_to_json,
    vector_from_json,
)
from utils.helpers import canonical_json


def _wire_documents():
    directory = Path(__file__).resolve().parent.parent / "fixtures"
    return [path for path in sorted(directory.glob("*.json"))
            if "kind" in json.loads(path.read_text(encoding="utf-8"))]


WIRE_DOCUMENTS = _wire_documents()


def _context(path):
    """The dgla and package a document is read against, taken from the manifest that uses it."""
    if path.name.endswith(".manifest.json"):
        return {"base": path.parent}
    for manifest_path in sorted(path.parent.glob("*.manifest.json")):
        raw = load_json(manifest_path)
        if path.name in (raw.get("family"), raw.get("hats")):
            manifest = load_manifest(manifest_path)
            return {"dgla": manifest.dgla, "package": manifest.package}
    return {}


def _without_name(document):
    return {key: value for key, value in document.items() if key != "name"}


def _write_manifest(directory, **fields):
    body = {"format": FORMAT_VERSION, "kind": "manifest", "name": "scratch", **fields}
    path = directory / "scratch.manifest.json"
    path.write_text(json.dumps(body), encoding="utf-8")
    return path


class TestParseJson:
    """Test suite for decode errors."""

    def test_empty_input(self):
        """Empty text is reported at line 1, column 1."""
        with pytest.raises(InputError) as info:
            parse_json("   ", "empty.json")
        assert info.value.line == 1
        assert info.value.column == 1
        assert str(info.value).startswith("empty.json:1:1:")

    def test_syntax_error_location(self):
        """A decode error carries the line of the offending token."""
        with pytest.raises(InputError) as info:
            parse_json('{\n  "a": }', "bad.json")
        assert info.value.line == 2
        assert info.value.path == "bad.json"

    def test_missing_file(self, tmp_path):
        """Unreadable paths raise InputError naming the path."""
        with pytest.raises(InputError) as info:
            load_json(tmp_path / "absent.json")
        assert "absent.json" in str(info.value)


class TestFixtureDocuments:
    """The shipped JSON fixtures describe the same objects as linfty.fixtures."""

    @pytest.mark.parametrize("file_name,builder", [
        ("fix_dgla_1.json", fixtures.fix_dgla_1),
        ("leibniz_broken.json", fixtures.leibniz_broken),
        ("jacobi_violating.json", fixtures.jacobi_violating),
        ("fix_massey.json", fixtures.fix_massey),
        ("kah_2_dgla.json", fixtures.kah_2_dgla),
    ])
    def test_dgla_documents(self, fixtures_dir, file_name, builder):
        """Loaded DGLAs serialise to the same basis, differential and bracket."""
        loaded = dgla_from_json(load_json(fixtures_dir / file_name))
        assert _without_name(dgla_to_json(loaded)) == _without_name(dgla_to_json(builder()))

    @pytest.mark.parametrize("file_name,builder", [
        ("fix_kah_2.json", fixtures.fix_kah_2),
        ("fix_torus.json", fixtures.fix_torus),
        ("fix_kah_1_skewed.json", lambda: fixtures.fix_kah_1(skewed=True)),
    ])
    def test_package_documents(self, fixtures_dir, file_name, builder):
        """Loaded packages carry the same operators and Gram matrix."""
        loaded = package_from_json(load_json(fixtures_dir / file_name))
        assert package_to_json(loaded, include_tau=True) == package_to_json(builder(), include_tau=True)

    def test_skewed_gram_diagonal(self, fixtures_dir):
        """A diagonal Gram entry lands on the diagonal of the matrix."""
        pkg = package_from_json(load_json(fixtures_dir / "fix_kah_1_skewed.json"))
        index = pkg.space.index("x")
        assert pkg.ip.gram[index][index] == parse_scalar("2")

    def test_hats_document(self, fixtures_dir, kah_2):
        """The hat assignment file matches the in-code one."""
        pkg, g, hat = kah_2
        loaded = hats_from_json(load_json(fixtures_dir / "kah_2_hats.json"), g, pkg.space)
        assert hats_to_json(loaded) == hats_to_json(hat)

    def test_family_document(self, fixtures_dir, dgla_1):
        """The pipeline family file matches the in-code family."""
        loaded = family_from_json(load_json(fixtures_dir / "pipeline_family.json"), dgla_1)
        expected = fixtures.pipeline_family(dgla_1)
        assert family_to_json(loaded, 3) == family_to_json(expected, 3)


class TestDocumentErrors:
    """Test suite for rejected documents."""

    def test_wrong_format(self):
        """The format tag must match the toolkit version."""
        document = {**dgla_to_json(fixtures.fix_dgla_1()), "format": "other/2"}
        with pytest.raises(InputError, match="format must be"):
            dgla_from_json(document)

    def test_wrong_kind(self):
        """A package document is not accepted as a DGLA."""
        with pytest.raises(InputError, match="expected kind"):
            dgla_from_json(package_to_json(fixtures.fix_torus()))

    def test_unknown_field(self):
        """Fields outside the schema are rejected by name."""
        document = {**dgla_to_json(fixtures.fix_dgla_1()), "colour": "blue"}
        with pytest.raises(InputError, match="colour"):
            dgla_from_json(document)

    def test_degree_disagrees_with_bidegree(self):
        """An explicit degree must equal p + q."""
        with pytest.raises(InputError, match="disagrees"):
            space_from_json([{"name": "x", "bidegree": [1, 0], "degree": 2}])

    def test_unknown_vector_name(self, dgla_1):
        """Coordinates must name basis elements."""
        with pytest.raises(InputError):
            vector_from_json({"q": "1"}, dgla_1.space)

    def test_differential_of_wrong_degree(self):
        """Degree violations inside a document surface as InputError."""
        document = {
            "format": FORMAT_VERSION,
            "kind": "dgla",
            "basis": [{"name": "a", "degree": 0}, {"name": "c", "degree": 2}],
            "d": [["a", "c", "1"]],
        }
        with pytest.raises(InputError):
            dgla_from_json(document)


class TestWireFormat:
    """Test suite for the shape of maps and bracket tables on the wire."""

    def test_maps_are_sparse_triplets(self, massey):
        """Differentials are written as [source, target, scalar] triplets."""
        document = dgla_to_json(massey)
        assert document["d"] == [["z", "y", "1"]]
        assert document["bracket"] == [
            {"a": "x", "b": "x", "value": {"y": "-2"}},
            {"a": "x", "b": "z", "value": {"w": "1"}},
        ]

    def test_map_triplets_parse(self, dgla_1):
        """Triplets become columns of the map."""
        space = dgla_1.space
        f = map_from_json([["x", "y", "-1/2*i"]], space, space, 1)
        assert f.entries() == [("x", "y", parse_scalar("-1/2*i"))]
        assert map_to_json(f) == [["x", "y", "-1/2*i"]]

    @pytest.mark.parametrize("data,message", [
        ({"x": {"y": "1"}}, "triplets"),
        ([["x", "y"]], "expected \\[source, target, scalar\\]"),
        ([["x", "y", 1]], "expected \\[source, target, scalar\\]"),
        ([["q", "y", "1"]], "unknown source"),
        ([["x", "q", "1"]], "unknown target"),
        ([["x", "y", "1"], ["x", "y", "2"]], "duplicate entry"),
    ])
    def test_bad_triplets(self, dgla_1, data, message):
        """Malformed or repeated triplets are input errors."""
        with pytest.raises(InputError, match=message):
            map_from_json(data, dgla_1.space, dgla_1.space, 1)

    def test_old_table_keys_rejected(self, dgla_1):
        """Bracket entries use the keys a, b and value."""
        document = dgla_to_json(dgla_1)
        document["bracket"] = [{"left": "x", "right": "x", "value": {"y": "1"}}]
        with pytest.raises(InputError, match="left"):
            dgla_from_json(document)

    def test_duplicate_bracket_entry(self, dgla_1):
        """A pair may appear only once in a table."""
        document = dgla_to_json(dgla_1)
        document["bracket"] = document["bracket"] * 2
        with pytest.raises(InputError, match="duplicate"):
            dgla_from_json(document)


class TestRings:
    """Test suite for ring and extension syntax."""

    def test_truncated_line(self):
        """C[t]/(t^4) has m_A spanned by t, t^2, t^3."""
        ring = parse_ring("C[t]/(t^4)")
        assert ring.monomials == [(1,), (2,), (3,)]
        assert ring.nilpotency == 4

    def test_two_variables(self):
        """C[t,s]/(t^2,s^2) has m_A spanned by t, s, ts."""
        ring = parse_ring("C[t,s]/(t^2,s^2)")
        assert set(ring.monomials) == {(1, 0), (0, 1), (1, 1)}

    def test_total_degree_truncation(self):
        """C[t,s]/m^3 keeps every monomial of degree 1 and 2."""
        ring = parse_ring("C[t,s]/m^3")
        assert set(ring.monomials) == {(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)}

    def test_combined_quotient(self):
        """Relations and a truncation combine with '+'."""
        ring = parse_ring("C[t,s]/(t^2)+m^3")
        assert set(ring.monomials) == {(1, 0), (0, 1), (1, 1), (0, 2)}
        assert parse_ring(str(ring)) == ring

    @pytest.mark.parametrize("text", ["C[t]", "Q[t]/(t^2)", "C[t]/(u^2)", "C[t]/t^2", 3])
    def test_bad_rings(self, text):
        """Bad syntax and non-nilpotent variables are rejected."""
        with pytest.raises(InputError):
            parse_ring(text)

    def test_parse_monomial(self):
        """Repeated factors add their exponents."""
        assert parse_monomial("t*s^2*t", ("t", "s")) == (2, 2)

    def test_extensions(self):
        """eps, curvilinear:n and explicit ring pairs are understood."""
        eps = parse_extension("eps")
        assert eps.A == SmallExtension.epsilon().A
        assert eps.J == [(2,)]
        curvilinear = parse_extension("curvilinear:3")
        assert curvilinear.J == [(3,)]
        explicit = parse_extension({"A": "C[t,s]/m^3", "B": "C[t,s]/m^2"})
        assert set(explicit.J) == {(2, 0), (1, 1), (0, 2)}

    def test_bad_extension(self):
        """B must be a quotient of A."""
        with pytest.raises(InputError):
            parse_extension({"A": "C[t]/(t^2)", "B": "C[t]/(t^3)"})
        with pytest.raises(InputError):
            parse_extension("square-zero")

    def test_tensor_codec(self, dgla_1):
        """Tensors are keyed by monomial labels."""
        ring = parse_ring("C[t]/(t^3)")
        element = tensor_from_json({"t": {"x": "1"}, "t^2": {"y": "1/2"}}, dgla_1.space, ring)
        assert tensor_to_json(element) == {"t": {"x": "1"}, "t^2": {"y": "1/2"}}

    def test_tensor_monomial_in_ideal(self, dgla_1):
        """A monomial that vanishes in the ring is an input error."""
        ring = parse_ring("C[t]/(t^2)")
        with pytest.raises(InputError, match="zero in"):
            tensor_from_json({"t^2": {"x": "1"}}, dgla_1.space, ring)


class TestManifest:
    """Test suite for manifest loading."""

    def test_pipeline_manifest(self, fixtures_dir):
        """Every referenced file and inline field is parsed."""
        manifest = load_manifest(fixtures_dir / "fix_dgla_1_pipeline.manifest.json")
        assert manifest.name == "fix-dgla-1-pipeline"
        assert str(manifest.ring) == "C[t]/(t^2)"
        assert manifest.extension.J == [(2,)]
        assert manifest.tower == 3
        assert manifest.cutoff == 3
        assert manifest.seed == 0
        assert tensor_to_json(manifest.start) == {"t": {"x": "1"}}
        assert manifest.family is not None

    def test_inputs_digest_is_stable(self, fixtures_dir):
        """Loading twice gives the same sha256 digest."""
        path = fixtures_dir / "fix_kah_2_mc.manifest.json"
        first = load_manifest(path).inputs_digest
        assert first.startswith("sha256:")
        assert load_manifest(path).inputs_digest == first

    def test_digest_depends_on_inputs(self, fixtures_dir):
        """Different manifests have different digests."""
        a = load_manifest(fixtures_dir / "fix_kah_2.manifest.json").inputs_digest
        b = load_manifest(fixtures_dir / "fix_kah_2_corrupt.manifest.json").inputs_digest
        assert a != b

    def test_require(self, fixtures_dir):
        """Missing inputs are reported by field name."""
        manifest = load_manifest(fixtures_dir / "fix_dgla_1.manifest.json")
        manifest.require("dgla")
        with pytest.raises(InputError, match="package"):
            manifest.require("package")

    def test_unknown_manifest_field(self, tmp_path):
        """Manifests reject unknown fields."""
        path = _write_manifest(tmp_path, verbose=True)
        with pytest.raises(InputError, match="verbose"):
            load_manifest(path)

    def test_inline_documents(self, tmp_path):
        """A dgla may be given inline instead of by file name."""
        path = _write_manifest(tmp_path, dgla=dgla_to_json(fixtures.fix_dgla_1()), cutoff=2)
        manifest = load_manifest(path)
        assert manifest.dgla.space.names == fixtures.fix_dgla_1().space.names
        assert manifest.cutoff == 2

    def test_missing_reference(self, tmp_path):
        """A referenced file that does not exist names its path."""
        path = _write_manifest(tmp_path, dgla="nowhere.json")
        with pytest.raises(InputError, match="nowhere.json"):
            load_manifest(path)

    def test_hats_need_dgla_and_package(self, tmp_path, fixtures_dir):
        """Hats cannot be loaded on their own."""
        path = _write_manifest(tmp_path, hats=load_json(fixtures_dir / "kah_2_hats.json"))
        with pytest.raises(InputError, match="hats need"):
            load_manifest(path)

    @pytest.mark.parametrize("fields", [{"tower": 1}, {"cutoff": 0}, {"seed": "zero"}, {"corrupt_tau": "yes"}])
    def test_bad_scalar_fields(self, tmp_path, fields):
        """Integer and boolean fields are range checked."""
        path = _write_manifest(tmp_path, **fields)
        with pytest.raises(InputError):
            load_manifest(path)


class TestReserialize:
    """Test suite for canonical rewriting."""

    def test_dgla_round_trip(self, fixtures_dir):
        """Reserialising a canonical document is a fixed point."""
        once = reserialize(load_json(fixtures_dir / "fix_massey.json"))
        assert reserialize(json.loads(once)) == once

    def test_package_keeps_tau(self):
        """A package with tau is written back with tau."""
        document = package_to_json(fixtures.fix_kah_2(), include_tau=True)
        text = reserialize(document)
        assert "tau" in json.loads(text)
        assert text == canonical_json(document)

    @pytest.mark.parametrize("path", WIRE_DOCUMENTS, ids=lambda p: p.name)
    def test_every_fixture_round_trips(self, path):
        """Every shipped document reserialises to a fixed point of its own kind."""
        document = load_json(path)
        context = _context(path)
        once = reserialize(document, **context)
        assert json.loads(once)["kind"] == document["kind"]
        assert reserialize(json.loads(once), **context) == once

    def test_family_round_trip(self, fixtures_dir, dgla_1):
        """A family comes back with the same normalized components."""
        document = load_json(fixtures_dir / "pipeline_family.json")
        again = json.loads(reserialize(document, dgla=dgla_1))
        assert family_to_json(family_from_json(again, dgla_1), 3) == \
            family_to_json(family_from_json(document, dgla_1), 3)

    def test_manifest_inlines_references(self, fixtures_dir):
        """A reserialised manifest carries its documents inline and loads on its own."""
        text = reserialize(load_json(fixtures_dir / "fix_kah_2.manifest.json"), base=fixtures_dir)
        inline = json.loads(text)
        assert inline["hats"]["kind"] == "hats"
        assert inline["package"]["kind"] == "package"
        assert reserialize(inline) == text

    def test_missing_context(self, fixtures_dir):
        """Families need their DGLA; hats need a DGLA and a package."""
        with pytest.raises(InputError, match="need the dgla"):
            reserialize(load_json(fixtures_dir / "pipeline_family.json"))
        with pytest.raises(InputError, match="need a dgla and a package"):
            reserialize(load_json(fixtures_dir / "kah_2_hats.json"), dgla=fixtures.kah_2_dgla())

    def test_unknown_kind(self):
        """Documents of an unknown kind are refused."""
        with pytest.raises(InputError, match="unknown document kind"):
            reserialize({"format": FORMAT_VERSION, "kind": "spreadsheet"})


if __name__ == "__main__":
    pytest.main([__file__])
