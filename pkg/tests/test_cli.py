"""CLI contract tests: formats, exit codes, determinism."""

import json

import pytest

from kspectra.cli import main
from kspectra.gf2n import mk_field
from kspectra.linmap import identity_map, map_to_json, zero_map


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_spectrum_csv(capsys):
    code, out = run_cli(capsys, "spectrum", "--n", "5", "--what", "kloosterman")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "elem_hex,value"
    assert lines[1] == "0x0,0"
    assert len(lines) == 33


def test_zeros_json(capsys):
    code, out = run_cli(capsys, "zeros", "--n", "5")
    assert code == 0
    obj = json.loads(out)
    assert obj["n"] == 5
    assert obj["count"] == 5
    assert len(obj["zeros"]) == 5
    assert abs(obj["ratio_to_2^{n/2}"] - 0.8839) < 1e-3


def test_zerospace_json(capsys):
    code, out = run_cli(capsys, "zerospace", "--n", "8", "--set", "zeros")
    assert code == 0
    obj = json.loads(out)
    assert obj["best_dim"] == 1
    assert obj["exhaustive"] is True
    code, out = run_cli(capsys, "zerospace", "--n", "8", "--set", "mod16")
    assert json.loads(out)["best_dim"] == 3


def test_qform_json(capsys):
    code, out = run_cli(capsys, "qform", "--n", "8")
    assert code == 0
    obj = json.loads(out)
    assert obj == {
        "n": 8, "dim_H": 7, "radical_dim": 1, "type": "elliptic",
        "witt_index": 2, "zeros": 56, "expected_zeros": 56,
        "max_isotropic_dim": 3,
    }


def test_permcheck_command(capsys):
    ctx = mk_field(5)
    l1 = json.dumps(map_to_json(ctx, identity_map(5)))
    l2 = json.dumps(map_to_json(ctx, zero_map(5)))
    code, out = run_cli(capsys, "permcheck", "--n", "5", "--l1", l1, "--l2", l2)
    assert code == 0
    obj = json.loads(out)
    assert obj["direct"]["is_perm"] and obj["spectral"]["is_perm"] and obj["agree"]
    code, out = run_cli(capsys, "permcheck", "--n", "5", "--l1", l1, "--l2", l1,
                        "--method", "direct")
    obj = json.loads(out)
    assert code == 0 and not obj["direct"]["is_perm"]


def test_table1_right(capsys):
    code, out = run_cli(capsys, "table1", "--side", "right", "--from", "5", "--to", "8")
    assert code == 0
    assert out.strip().splitlines() == ["n,max_dim", "5,1", "6,2", "7,3", "8,1"]


def test_table1_left(capsys):
    code, out = run_cli(capsys, "table1", "--side", "left", "--from", "5", "--to", "5")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "n,count,ratio_trunc,ratio_round"
    assert row == "5,5,0.88,0.88"


def test_verify_single_pass(capsys):
    code, out = run_cli(capsys, "verify", "--theorem", "radical", "--from", "4", "--to", "10")
    assert code == 0
    obj = json.loads(out)
    assert obj["ok"] is True and obj["criterion"] == "radical"


def test_verify_deterministic(capsys):
    code1, out1 = run_cli(capsys, "verify", "--theorem", "subspace-sum-identity",
                          "--from", "5", "--to", "6", "--samples", "20", "--seed", "7")
    code2, out2 = run_cli(capsys, "verify", "--theorem", "subspace-sum-identity",
                          "--from", "5", "--to", "6", "--samples", "20", "--seed", "7")
    assert code1 == code2 == 0
    assert out1 == out2


def test_verify_inverse_linear_n5(capsys):
    code, out = run_cli(capsys, "verify", "--theorem", "inverse-linear-n5")
    assert code == 0
    obj = json.loads(out)
    assert obj["candidates_checked"] == (1 << 25) - 1
    assert obj["violations"] == []


def test_usage_errors(capsys):
    code, _ = run_cli(capsys, "spectrum", "--n", "40")
    assert code == 2
    code, _ = run_cli(capsys, "qform", "--n", "8", "--poly", "0x11c")
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["bogus-command"])
    assert exc.value.code == 2


def test_out_file(tmp_path, capsys):
    path = tmp_path / "spec.csv"
    code, _ = run_cli(capsys, "spectrum", "--n", "4", "--out", str(path))
    assert code == 0
    assert path.read_text().startswith("elem_hex,value")
