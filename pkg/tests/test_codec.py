"""
Document parsing, building and writing
"""

import os

import pytest

from separability_kernel.codec import (
    build_algebra,
    build_element,
    describe_element,
    dump_text,
    load_document,
    load_text,
    parse_scalar,
    read_array,
    write_array,
    write_atomic,
    write_labelled,
)
from separability_kernel.documents import CertificateDocument, ConstructionKind, InstanceDescription, exit_code_for
from sepcore.constructions.examples import make_direct_sum_E, make_E0
from sepcore.errors import DocumentError


def _location(exc_info) -> str:
    return exc_info.value.location


class TestScalars:

    def test_literals(self, exact):
        assert exact.equal(parse_scalar("7/5", "x", exact), exact.rational(7, 5))
        assert exact.equal(parse_scalar(3, "x", exact), exact.scalar(3))
        assert exact.equal(parse_scalar(["0", "1"], "x", exact), exact.scalar([0, 1]))

    @pytest.mark.parametrize("node, location", [
        (True, "x"),
        (None, "x"),
        ([1, 2, 3], "x"),
        (["1", [2]], "x[1]"),
        ("seven", "x"),
        ("1/0", "x"),
        ({"re": 1}, "x"),
    ])
    def test_errors(self, exact, node, location):
        with pytest.raises(DocumentError) as info:
            parse_scalar(node, "x", exact)
        assert _location(info) == location


class TestArrays:

    def test_matrix(self, exact):
        m = read_array([["1/2", 0], [["0", "1"], 2]], 2, "m", exact)
        assert m.shape == (2, 2)
        assert exact.equal(m[1, 0], exact.scalar([0, 1]))
        assert write_array(m, exact) == [["1/2", "0"], [["0", "1"], "2"]]

    def test_ragged(self, exact):
        with pytest.raises(DocumentError) as info:
            read_array([[1, 2], [3]], 2, "m", exact)
        assert _location(info) == "m"
        assert "different lengths" in str(info.value)

    def test_bad_entry(self, exact):
        with pytest.raises(DocumentError) as info:
            read_array([[1, 2], [3, "x/y"]], 2, "element.r", exact)
        assert _location(info) == "element.r[1][1]"

    def test_not_nested(self, exact):
        with pytest.raises(DocumentError):
            read_array([1, 2], 2, "m", exact)


class TestYaml:

    def test_invalid(self):
        with pytest.raises(DocumentError) as info:
            load_text("element: [1, 2\n", "bad.yaml")
        assert _location(info).startswith("bad.yaml")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DocumentError):
            load_document(str(tmp_path / "absent.yaml"))

    def test_write_atomic(self, tmp_path):
        path = tmp_path / "doc.yaml"
        write_atomic(str(path), {"kind": "instance", "element": {"construction": "E0", "n": 2}})
        assert load_document(str(path))["element"] == {"construction": "E0", "n": 2}
        assert os.listdir(tmp_path) == ["doc.yaml"]

    def test_text_round_trip(self):
        desc = InstanceDescription(element={"construction": "twisted", "r": [["7/5", 0], [0, "1/5"]],
                                            "s": [["7/5", 0], [0, "1/5"]]}, seed=4)
        again = InstanceDescription.from_dict(load_text(dump_text(desc.to_dict())))
        assert again == desc


class TestInstanceDescription:

    def test_defaults(self):
        desc = InstanceDescription.from_dict({"element": {"construction": "E0", "n": 2}})
        assert desc.mode == "exact"
        assert desc.construction == ConstructionKind.E0

    def test_float_alias(self):
        desc = InstanceDescription.from_dict({"mode": "float", "element": {"construction": "E0", "n": 2}})
        assert desc.mode == "float64"

    @pytest.mark.parametrize("data, location", [
        ([], "document"),
        ({"kind": "certificate", "element": {}}, "kind"),
        ({"mode": "quad", "element": {}}, "mode"),
        ({"tolerance": -1, "element": {}}, "tolerance"),
        ({"seed": "x", "element": {}}, "seed"),
        ({"colour": "red", "element": {}}, "colour"),
        ({"algebras": {"D": {}}, "element": {}}, "algebras.D"),
        ({"mode": "exact"}, "element"),
        ({"element": {"construction": "magic"}}, "element.construction"),
    ])
    def test_errors(self, data, location):
        with pytest.raises(DocumentError) as info:
            InstanceDescription.from_dict(data)
        assert _location(info) == location


class TestBuild:

    def test_twisted(self, exact, twisted_7_5):
        desc = InstanceDescription.from_dict(load_text(
            "element:\n  construction: twisted\n  r: [[7/5, 0], [0, 1/5]]\n  s: [[7/5, 0], [0, 1/5]]\n"))
        assert build_element(desc, exact) == twisted_7_5

    def test_shape_mismatch(self, exact):
        desc = InstanceDescription(element={"construction": "twisted", "r": [[1, 0], [0, 1]], "s": [[1]]})
        with pytest.raises(DocumentError) as info:
            build_element(desc, exact)
        assert _location(info) == "element.s"

    def test_explicit_needs_algebras(self, exact):
        desc = InstanceDescription(element={"coefficients": [[1]]})
        with pytest.raises(DocumentError) as info:
            build_element(desc, exact)
        assert _location(info) == "algebras"

    def test_explicit_shape(self, exact):
        desc = InstanceDescription(element={"coefficients": [[1, 0]]},
                                   algebras={"B": {"blocks": [1]}, "C": {"blocks": [1]}})
        with pytest.raises(DocumentError) as info:
            build_element(desc, exact)
        assert _location(info) == "element.coefficients"

    def test_engine_errors_are_located(self, exact):
        """a singular r is reported at the element"""
        desc = InstanceDescription(element={"construction": "twisted", "r": [[1, 1], [1, 1]], "s": [[1, 0], [0, 1]]})
        with pytest.raises(DocumentError) as info:
            build_element(desc, exact)
        assert _location(info) == "element"

    def test_declared_algebras_must_match(self, exact):
        desc = InstanceDescription(element={"construction": "E0", "n": 2},
                                   algebras={"B": {"blocks": [3]}})
        with pytest.raises(DocumentError) as info:
            build_element(desc, exact)
        assert _location(info) == "algebras.B"

    def test_direct_sum_components(self, exact):
        desc = InstanceDescription(element={"construction": "direct_sum", "components": [
            {"construction": "E0", "n": 1}, {"construction": "E0", "n": 2}]})
        E = build_element(desc, exact)
        assert E.left.blocks == (1, 2)

    def test_describe_round_trip(self, exact):
        E = make_direct_sum_E([make_E0(1, exact), make_E0(2, exact)])
        desc = describe_element(E)
        assert desc.algebras["B"] == {"blocks": [1, 2], "star": True}
        assert build_element(desc, exact) == E

    def test_structure_constant_algebra(self, exact):
        """C + C given by its structure constants"""
        spec = {"dim": 2, "constants": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]], "unit": [1, 1]}
        a = build_algebra(spec, "algebras.B", exact)
        assert a.labels == ("b1", "b2")
        assert a.name == "B"

    def test_structure_constant_errors(self, exact):
        spec = {"dim": 2, "constants": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]], "unit": [1, 0]}
        with pytest.raises(DocumentError) as info:
            build_algebra(spec, "algebras.B", exact)
        assert _location(info) == "algebras.B"


class TestCertificateDocument:

    def test_exit_codes(self):
        assert exit_code_for("separability_idempotent") == 0
        assert exit_code_for("nilpotent_variant") == 3
        assert exit_code_for("rejected") == 1

    def test_from_dict(self):
        doc = CertificateDocument(command="verify", mode="rejected", instance={}, reason="not full")
        again = CertificateDocument.from_dict(load_text(dump_text(doc.to_dict())))
        assert again.reason == "not full"
        assert again.exit_code == 1

    def test_missing_field(self):
        with pytest.raises(DocumentError) as info:
            CertificateDocument.from_dict({"kind": "certificate", "command": "verify", "mode": "rejected"})
        assert _location(info) == "instance"

    def test_labelled(self, exact, m2):
        assert write_labelled(m2.one().coeffs, m2.labels, exact) == {"e11": "1", "e22": "1"}
