import json
import os

import pytest

from mackeykit import cli, jsonio
from mackeykit.groups import builtin_group
from mackeykit.mackey import burnside_mackey
from mackeykit.convolution import burnside_green


def run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_marks_json_matches_spec_example(capsys):
    code, out, _ = run(capsys, ["marks", "--group", "C2", "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["marks"] == [[2, 0], [1, 1]]


def test_bpq_trivial(capsys):
    code, out, _ = run(capsys, ["bpq", "--group", "trivial",
                                "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["verified"] is True
    assert doc["iso"]["e"] == [[1]]


def test_group_info_text(capsys):
    code, out, _ = run(capsys, ["group-info", "--group", "S3"])
    assert code == 0
    assert "4 classes" in out


def test_duality_check(capsys):
    code, out, _ = run(capsys, ["duality-check", "--group", "C4"])
    assert code == 0


def test_promonoidal_check(capsys):
    code, out, _ = run(capsys, ["promonoidal-check", "--group", "C2",
                                "--feet", "e", "C2", "--format", "json"])
    assert code == 0
    assert json.loads(out)["verified"] is True


def test_hom_basis_and_burnside_ring(capsys):
    code, out, _ = run(capsys, ["hom-basis", "--group", "C2",
                                "--source", "e", "--target", "e",
                                "--format", "json"])
    assert code == 0
    assert len(json.loads(out)["basis"]) == 2
    code, out, _ = run(capsys, ["burnside-ring", "--group", "C2",
                                "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["span_composition_agrees"] is True


def test_mackey_check_and_box(tmp_path, capsys):
    C2 = builtin_group("C2")
    M = burnside_mackey(C2)
    path = tmp_path / "m.json"
    path.write_text(json.dumps(jsonio.mackey_to_json(M)))
    code, out, _ = run(capsys, ["mackey-check", str(path),
                                "--format", "json", "--seed", "5"])
    assert code == 0
    assert json.loads(out)["valid"] is True
    code, out, _ = run(capsys, ["box", str(path), str(path),
                                "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["levels"]["e"] == [0]          # Z at the free level


def test_mackey_check_rejects_bad_data(tmp_path, capsys):
    C2 = builtin_group("C2")
    doc = jsonio.mackey_to_json(burnside_mackey(C2))
    doc["tr"]["e<C2"] = [[3], [0]]            # wrong transfer
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, ["mackey-check", str(path),
                                "--format", "json"])
    assert code == 1
    assert json.loads(out)["valid"] is False


def test_green_check_detects_violation(tmp_path, capsys):
    C2 = builtin_group("C2")
    doc = jsonio.green_to_json(burnside_green(C2))
    # corrupt one multiplication cell
    doc["rings"]["C2"][0][0] = [5, 0]
    path = tmp_path / "bad_green.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, ["green-check", str(path), "--format", "json"])
    assert code == 1
    payload = json.loads(out)
    assert payload["valid"] is False
    assert "cell" in payload["error"] or "unit" in payload["error"] \
        or "associative" in payload["error"] or "commutative" in payload["error"] \
        or "Frobenius" in payload["error"]


def test_green_check_accepts_valid(tmp_path, capsys):
    C2 = builtin_group("C2")
    doc = jsonio.green_to_json(burnside_green(C2))
    path = tmp_path / "green.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, ["green-check", str(path), "--format", "json"])
    assert code == 0


def test_tor_cli(tmp_path, capsys):
    C2 = builtin_group("C2")
    ring = tmp_path / "ring.json"
    ring.write_text(json.dumps({"burnside": "C2"}))
    m = tmp_path / "m.json"
    m.write_text(json.dumps(jsonio.mackey_to_json(burnside_mackey(C2))))
    code, out, _ = run(capsys, ["tor", str(ring), str(m), str(m),
                                "--pmax", "1", "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert len(doc["tor"]) == 2
    # Tor_p(R, R) vanishes above degree zero
    assert all(v == [] for v in doc["tor"][1].values())


def test_ss_cli(tmp_path, capsys):
    C2 = builtin_group("C2")
    mdoc = jsonio.mackey_to_json(burnside_mackey(C2))
    complex_doc = {
        "group": "C2",
        "terms": {"0": mdoc, "1": mdoc},
        "diffs": {"1": {"e": [[0]], "C2": [[0, 0], [0, 0]]}},
        "filtration": "skeletal",
    }
    path = tmp_path / "cx.json"
    path.write_text(json.dumps(complex_doc))
    code, out, _ = run(capsys, ["ss", str(path), "--rmax", "2",
                                "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["pages"][0]["r"] == 1


def test_compose_cli(tmp_path, capsys):
    C2 = builtin_group("C2")
    from mackeykit.gsets import point_gset, standard_orbit
    from mackeykit.burnside import hom_basis
    O = standard_orbit(C2, 0)
    pt = point_gset(C2)
    tr_doc = {
        "group": "C2",
        "source": jsonio.gset_to_json(O),
        "target": jsonio.gset_to_json(pt),
        "coefficients": [[jsonio.code_to_json(C2, hom_basis(O, pt)[0]), 1]],
    }
    res_doc = {
        "group": "C2",
        "source": jsonio.gset_to_json(pt),
        "target": jsonio.gset_to_json(O),
        "coefficients": [[jsonio.code_to_json(C2, hom_basis(pt, O)[0]), 1]],
    }
    f1 = tmp_path / "tr.json"
    f1.write_text(json.dumps(tr_doc))
    f2 = tmp_path / "res.json"
    f2.write_text(json.dumps(res_doc))
    code, out, _ = run(capsys, ["compose", str(f1), str(f2),
                                "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    # res . tr through the point is identity + translation
    assert len(doc["composite"]["coefficients"]) == 2


def test_determinism_with_seed(tmp_path, capsys):
    C2 = builtin_group("C2")
    path = tmp_path / "m.json"
    path.write_text(json.dumps(jsonio.mackey_to_json(burnside_mackey(C2))))
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, ["mackey-check", str(path),
                                    "--format", "json", "--seed", "11"])
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        cli.main(["marks"])          # missing --group
    assert exc.value.code == 2


def test_unknown_group_is_an_error(capsys):
    code, _out, err = run(capsys, ["marks", "--group", "E8"])
    assert code == 1
    assert "unknown group" in err


def test_out_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "marks.json"
    code, out, _ = run(capsys, ["marks", "--group", "C2", "--format", "json",
                                "--out", str(target)])
    assert code == 0
    assert json.loads(target.read_text())["marks"] == [[2, 0], [1, 1]]
