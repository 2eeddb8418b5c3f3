"""
Command line runs on instance files
"""

from fractions import Fraction

import pytest

from separability_kernel.cli import main
from separability_kernel.codec import load_document, load_text, write_atomic

TWIST = "[[7/5, 0], [0, 1/5]]"


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (load_text(out) if out else None)


@pytest.fixture
def make_instance(tmp_path, capsys):
    """Writes an instance with `construct` and returns its path"""
    def _make(name, *args):
        path = str(tmp_path / f"{name}.yaml")
        assert main(["construct", *args, "--out", path]) == 0
        capsys.readouterr()
        return path
    return _make


class TestVerify:

    def test_e0(self, make_instance, capsys):
        code, doc = _run(capsys, ["verify", make_instance("e0", "--kind", "E0", "--n", "2")])
        assert code == 0
        assert doc["kind"] == "certificate"
        assert doc["mode"] == "separability_idempotent"
        assert doc["axioms"]
        assert doc["checks"]["splitting"]["passed"]

    def test_nonfull(self, make_instance, capsys):
        code, doc = _run(capsys, ["verify", make_instance("nonfull", "--kind", "nonfull", "--n", "2")])
        assert code == 1
        assert doc["mode"] == "rejected"
        assert "not full" in doc["reason"]

    def test_nilpotent(self, make_instance, capsys):
        path = make_instance("nil", "--kind", "twisted", "--r", "[[1, 0], [0, 1]]", "--s", "[[1, 0], [0, -1]]")
        code, doc = _run(capsys, ["verify", path])
        assert code == 3
        assert doc["mode"] == "nilpotent_variant"

    def test_tampered_explicit(self, make_instance, capsys):
        path = make_instance("e0", "--kind", "E0", "--n", "2", "--explicit")
        data = load_document(path)
        data["element"]["coefficients"][1][2] = "1/7"
        write_atomic(path, data)
        code, doc = _run(capsys, ["verify", path])
        assert code == 1
        assert doc["reason"]

    def test_float_mode(self, make_instance, capsys):
        code, doc = _run(capsys, ["--mode", "float", "verify", make_instance("e0", "--kind", "E0", "--n", "2")])
        assert code == 0
        assert doc["instance"]["mode"] == "float64"

    def test_out_file(self, make_instance, tmp_path, capsys):
        out = str(tmp_path / "cert.yaml")
        assert main(["verify", make_instance("e0", "--kind", "E0", "--n", "1"), "--out", out]) == 0
        assert capsys.readouterr().out == ""
        assert load_document(out)["mode"] == "separability_idempotent"


class TestDerive:

    def test_integrals(self, make_instance, capsys):
        """phi = psi = 3 Tr on M3"""
        code, doc = _run(capsys, ["derive", make_instance("e0", "--kind", "E0", "--n", "3"), "--what", "integrals"])
        assert code == 0
        for key in ("phi", "psi"):
            assert [doc["derived"][key][k] for k in (0, 4, 8)] == ["3", "3", "3"]
            assert doc["derived"][key][1] == "0"

    def test_modular(self, make_instance, capsys):
        path = make_instance("tw", "--kind", "twisted", "--r", TWIST, "--s", TWIST)
        code, doc = _run(capsys, ["derive", path, "--what", "modular"])
        assert code == 0
        assert doc["derived"]["sigma"][1][1] == "1/49"
        assert doc["derived"]["sigma"][2][2] == "49"

    def test_integrals_refused_for_nilpotent(self, make_instance, capsys):
        path = make_instance("nil", "--kind", "twisted", "--r", "[[1, 0], [0, 1]]", "--s", "[[1, 0], [0, -1]]")
        assert main(["derive", path, "--what", "integrals"]) == 3
        assert "refused" in capsys.readouterr().err

    def test_antipodes_for_nilpotent(self, make_instance, capsys):
        path = make_instance("nil", "--kind", "twisted", "--r", "[[1, 0], [0, 1]]", "--s", "[[1, 0], [0, -1]]")
        code, doc = _run(capsys, ["derive", path, "--what", "antipodes"])
        assert code == 3
        assert "S" in doc["derived"]

    def test_dual(self, make_instance, capsys):
        code, doc = _run(capsys, ["derive", make_instance("e0", "--kind", "E0", "--n", "2"), "--what", "dual"])
        assert code == 0
        assert doc["derived"]["pairing"][1][1] == "2"
        assert "plancherel" in doc["derived"]

    def test_rejected_element(self, make_instance, capsys):
        path = make_instance("nonfull", "--kind", "nonfull", "--n", "3")
        assert main(["derive", path, "--what", "antipodes"]) == 1

    def test_float_agrees_with_exact(self, make_instance, capsys):
        path = make_instance("tw", "--kind", "twisted", "--r", TWIST, "--s", TWIST)
        _, exact = _run(capsys, ["derive", path, "--what", "integrals"])
        _, flt = _run(capsys, ["--mode", "float64", "derive", path, "--what", "integrals"])
        for key in ("phi", "psi"):
            expected = [float(Fraction(v)) for v in exact["derived"][key]]
            assert flt["derived"][key] == pytest.approx(expected, abs=1e-9)

    def test_what_is_required(self, make_instance):
        path = make_instance("e0", "--kind", "E0", "--n", "2")
        with pytest.raises(SystemExit) as info:
            main(["derive", path])
        assert info.value.code == 2


class TestDecompose:

    def test_direct_sum(self, make_instance, capsys):
        one = make_instance("one", "--kind", "E0", "--n", "1")
        tw = make_instance("tw", "--kind", "twisted", "--r", TWIST, "--s", TWIST)
        path = make_instance("sum", "--kind", "direct_sum", "--component", one, "--component", tw)
        code, doc = _run(capsys, ["decompose", path])
        assert code == 0
        assert [b["size"] for b in doc["blocks"]] == [1, 2]
        assert doc["blocks"][1]["r"] == [["1", "0"], ["0", "1/7"]]

    def test_leakage(self, make_instance, capsys):
        one = make_instance("one", "--kind", "E0", "--n", "1")
        two = make_instance("two", "--kind", "E0", "--n", "2")
        path = make_instance("sum", "--kind", "direct_sum", "--component", one, "--component", two, "--explicit")
        data = load_document(path)
        data["element"]["coefficients"][0][1] = "1"
        write_atomic(path, data)
        code, doc = _run(capsys, ["decompose", path])
        assert code == 1
        assert doc["mode"] == "rejected"
        assert doc["reason"]


class TestConstruct:

    def test_e0_stdout(self, capsys):
        code, doc = _run(capsys, ["construct", "--kind", "E0", "--n", "2"])
        assert code == 0
        assert doc["kind"] == "instance"
        assert doc["element"] == {"construction": "E0", "n": 2}

    def test_twisted_literals(self, make_instance):
        data = load_document(make_instance("tw", "--kind", "twisted", "--r", TWIST, "--s", TWIST))
        assert data["element"]["r"] == [["7/5", 0], [0, "1/5"]]

    def test_random_twisted_is_reproducible(self, capsys):
        _, first = _run(capsys, ["--seed", "3", "construct", "--kind", "random_twisted", "--n", "2"])
        _, second = _run(capsys, ["--seed", "3", "construct", "--kind", "random_twisted", "--n", "2"])
        assert first == second
        assert first["element"]["construction"] == "twisted"

    def test_explicit(self, capsys):
        _, doc = _run(capsys, ["construct", "--kind", "E0", "--n", "2", "--explicit"])
        assert doc["element"]["construction"] == "explicit"
        assert doc["algebras"]["C"]["blocks"] == [2]


class TestInputErrors:

    def test_missing_file(self, tmp_path, capsys):
        assert main(["verify", str(tmp_path / "absent.yaml")]) == 2
        assert "input error" in capsys.readouterr().err

    def test_bad_mode(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("mode: quad\nelement: {construction: E0, n: 2}\n")
        assert main(["verify", str(path)]) == 2

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("element: [1, 2\n")
        assert main(["verify", str(path)]) == 2

    def test_construct_without_size(self):
        assert main(["construct", "--kind", "E0"]) == 2

    def test_bad_environment(self, make_instance, monkeypatch):
        path = make_instance("e0", "--kind", "E0", "--n", "2")
        monkeypatch.setenv("SEPKERNEL_MODE", "quad")
        assert main(["verify", path]) == 2
