"""
Tests for the public convenience functions, run on instance files
"""

import pytest

from separability_kernel import (
    CertificateDocument,
    InstanceDescription,
    construct_instance,
    decompose_instance,
    derive_data,
    verify_instance,
)
from separability_kernel.codec import dump_text, read_instance
from sepcore.errors import DocumentError, PreconditionFailed, RefusedForMode


class TestUtilsFunctions:
    """All public functions of the utils module"""

    @pytest.fixture
    def e0_path(self, tmp_path):
        """An E0 instance on M2"""
        path = tmp_path / "e0.yaml"
        construct_instance("E0", out=str(path), n=2)
        return str(path)

    @pytest.fixture
    def nilpotent_path(self, tmp_path):
        """r = 1, s = diag(1, -1)"""
        path = tmp_path / "nilpotent.yaml"
        construct_instance("twisted", out=str(path), r=[[1, 0], [0, 1]], s=[[1, 0], [0, -1]])
        return str(path)

    def test_functions_exist(self):
        """every convenience function is callable"""
        for fn in (verify_instance, derive_data, decompose_instance, construct_instance):
            assert callable(fn)

    def test_construct_writes_recipe(self, e0_path):
        """construct writes the construction, not the coefficients"""
        desc = read_instance(e0_path)
        assert isinstance(desc, InstanceDescription)
        assert desc.element == {"construction": "E0", "n": 2}
        assert desc.mode == "exact"

    def test_construct_explicit(self):
        """with explicit the coefficients and algebras are written out"""
        desc = construct_instance("E0", n=2, explicit=True)
        assert desc.element["construction"] == "explicit"
        assert desc.element["coefficients"][0][0] == "1/2"
        assert desc.algebras["B"] == {"blocks": [2], "star": True}

    def test_construct_missing_size(self):
        """E0 without n is an input error"""
        with pytest.raises(DocumentError) as info:
            construct_instance("E0")
        assert info.value.location == "n"

    def test_verify_instance(self, e0_path):
        """E0 is a separability idempotent with S the transpose"""
        doc = verify_instance(e0_path)
        assert isinstance(doc, CertificateDocument)
        assert doc.mode == "separability_idempotent"
        assert doc.exit_code == 0
        assert doc.derived["S"][1] == ["0", "0", "1", "0"]
        assert doc.derived["e"] == {"e11": "1", "e22": "1"}
        assert doc.checks["integral_transport"]["passed"]
        assert doc.checks["self_adjoint"]["passed"]

    def test_verify_float(self, e0_path):
        """the mode override switches the backend"""
        doc = verify_instance(e0_path, mode="float64")
        assert doc.mode == "separability_idempotent"
        assert doc.instance["mode"] == "float64"
        assert doc.derived["S"][1] == pytest.approx([0.0, 0.0, 1.0, 0.0], abs=1e-9)

    def test_verify_nilpotent(self, nilpotent_path):
        """Tr(s r) = 0 gives the nilpotent variant"""
        doc = verify_instance(nilpotent_path)
        assert doc.mode == "nilpotent_variant"
        assert doc.exit_code == 3
        assert doc.derived["e"] == {}

    def test_derive_integrals(self, e0_path):
        """phi = psi = 2 Tr on M2"""
        doc = derive_data(e0_path, "integrals")
        assert doc.derived == {"phi": ["2", "0", "0", "2"], "psi": ["2", "0", "0", "2"]}

    def test_derive_antipodes_nilpotent(self, nilpotent_path):
        """antipodes exist for the nilpotent variant"""
        doc = derive_data(nilpotent_path, "antipodes")
        assert doc.exit_code == 3
        assert set(doc.derived) == {"S", "S_prime", "e"}

    def test_derive_integrals_nilpotent(self, nilpotent_path):
        """integrals are refused for the nilpotent variant"""
        with pytest.raises(RefusedForMode):
            derive_data(nilpotent_path, "integrals")

    def test_derive_rejected(self, tmp_path):
        """derive needs a certified element"""
        path = tmp_path / "nonfull.yaml"
        construct_instance("nonfull", out=str(path), n=2)
        with pytest.raises(PreconditionFailed):
            derive_data(str(path), "antipodes")

    def test_decompose_instance(self, tmp_path):
        """a direct sum of E0 on M1 and M2 splits into two blocks"""
        parts = [InstanceDescription(element={"construction": "E0", "n": n}) for n in (1, 2)]
        path = tmp_path / "sum.yaml"
        construct_instance("direct_sum", out=str(path), components=parts)
        doc = decompose_instance(str(path))
        assert doc.exit_code == 0
        assert [b["size"] for b in doc.blocks] == [1, 2]
        assert doc.blocks[1]["r"] == [["1", "0"], ["0", "1"]]

    def test_document_text(self, e0_path):
        """the certificate serialises to YAML with its kind"""
        text = dump_text(verify_instance(e0_path).to_dict())
        assert text.startswith("kind: certificate")
