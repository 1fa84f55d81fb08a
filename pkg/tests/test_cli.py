import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from ruthsplit import cli

SPECS = Path(__file__).resolve().parent.parent / "scripts" / "specs"


def invoke(*args):
    return CliRunner().invoke(cli.main, ["run", *map(str, args)])


def write_spec(tmp_path, **fields):
    spec = {"base": "Z/2", "bundle": {"kind": "generator", "dims": [1]}, "seeds": [1],
            "tasks": ["check-fibration"]}
    spec.update(fields)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    return path


def test_cyclic_group_compare(tmp_path):
    res = invoke(SPECS / "z2_compare.json", "--out", tmp_path)
    assert res.exit_code == 0, res.output
    assert "pass compare-cleavages" in res.output
    tr = json.loads((tmp_path / "transcript.json").read_text())
    assert tr["ok"] and tr["seeds"] == [1, 2]
    assert tr["base"]["simplices"] == {"0": 1, "1": 2, "2": 4}
    cert = tr["tasks"][0]["checks"][0]["data"]
    assert cert["phi0_identity"] and cert["left_inverse"] and cert["right_inverse"]
    assert (tmp_path / "compare-1-2.json").exists()


def test_pair_groupoid_from_tables(tmp_path):
    res = invoke(SPECS / "pair_tables.json", "--out", tmp_path)
    assert res.exit_code == 0, res.output
    tr = json.loads((tmp_path / "transcript.json").read_text())
    # two objects, four arrows, eight composable pairs
    assert tr["base"]["simplices"] == {"0": 2, "1": 4, "2": 8}
    assert "base.file" in tr["input_hashes"]


def test_point_invariants(tmp_path):
    res = invoke(SPECS / "point_invariants.json", "--out", tmp_path)
    assert res.exit_code == 0, res.output
    assert "pass invariant-suite" in res.output


def test_malformed_json_reports_position(tmp_path):
    res = invoke(SPECS / "malformed.json", "--out", tmp_path)
    assert res.exit_code == 2
    assert "line 5, column 3" in res.output


def test_broken_tables_name_the_triple(tmp_path):
    res = invoke(SPECS / "broken_tables.json", "--out", tmp_path)
    assert res.exit_code == 2
    assert "associativity fails at triple (1, 1, 2)" in res.output


@pytest.mark.parametrize("fields,where", [
    ({"seeds": [1, 1]}, "seeds"),
    ({"seeds": []}, "seeds"),
    ({"tasks": ["nonsense"]}, "tasks[0]"),
    ({"caps": {"m": 0, "n": 2}}, "caps.m"),
    ({"base": "Q/2"}, "base"),
    ({"base": {"kind": "pair"}}, "base.objects"),
    ({"bundle": {"kind": "generator", "dims": [1, -1]}}, "bundle.dims"),
    ({"bundle": {"kind": "semidirect", "random": {"dims": [1]}}}, "bundle.random.seed"),
    ({"bundle": {"kind": "tensor"}}, "bundle.kind"),
    ({"output": {"transcript": "a/b.json"}}, "output.transcript"),
    ({"colour": 1}, "colour"),
    ({"tasks": ["compare-cleavages"]}, "seeds"),
])
def test_validation_errors_name_the_field(tmp_path, fields, where):
    res = invoke(write_spec(tmp_path, **fields), "--out", tmp_path / "out")
    assert res.exit_code == 2
    assert f"input error: {where}" in res.output


def test_missing_field(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"base": "Z/2", "bundle": {"kind": "generator", "dims": [1]},
                                "tasks": ["split"]}))
    res = invoke(path)
    assert res.exit_code == 2 and "seeds" in res.output


def test_character_on_odd_group_is_an_input_error(tmp_path):
    spec = write_spec(tmp_path, base="Z/3",
                      bundle={"kind": "semidirect", "random": {"dims": [1, 1], "seed": 0, "character": True}})
    res = invoke(spec, "--out", tmp_path / "out")
    assert res.exit_code == 2 and "bundle.random" in res.output


def test_caps_override(tmp_path):
    spec = write_spec(tmp_path, caps={"m": 3, "n": 2})
    res = invoke(spec, "--caps", "2,1", "--out", tmp_path / "out")
    assert res.exit_code == 0
    tr = json.loads((tmp_path / "out" / "transcript.json").read_text())
    assert tr["caps"] == {"m": 2, "n": 1}
    assert invoke(spec, "--caps", "2", "--out", tmp_path / "o2").exit_code == 2


def test_failed_check_exits_one(tmp_path, monkeypatch):
    monkeypatch.setitem(cli.RUNNERS, "check-fibration",
                        lambda ctx: [cli.Check("always fails", False, 1, ["witness"])])
    res = invoke(write_spec(tmp_path), "--out", tmp_path / "out")
    assert res.exit_code == 1
    assert "FAIL check-fibration" in res.output


def test_library_error_becomes_a_failed_check(tmp_path, monkeypatch):
    def boom(ctx):
        raise cli.sp.SplitError("nope")
    monkeypatch.setitem(cli.RUNNERS, "check-fibration", boom)
    res = invoke(write_spec(tmp_path), "--out", tmp_path / "out")
    assert res.exit_code == 1
    tr = json.loads((tmp_path / "out" / "transcript.json").read_text())
    assert tr["tasks"][0]["checks"][0]["witnesses"] == ["SplitError: nope"]


def test_transcripts_are_byte_identical(tmp_path):
    spec = SPECS / "z2_semidirect.json"
    a = cli.run_file(spec, out=tmp_path / "a")
    b = cli.run_file(spec, out=tmp_path / "b")
    assert a.ok
    assert (tmp_path / "a" / "transcript.json").read_bytes() == (tmp_path / "b" / "transcript.json").read_bytes()
    assert "timings" not in a.text and str(tmp_path) not in a.text


@pytest.mark.parametrize("name", ["z2_semidirect", "z2_ruth_file", "z2_explicit", "point_complex"])
def test_other_input_kinds(tmp_path, name):
    res = invoke(SPECS / f"{name}.json", "--out", tmp_path)
    assert res.exit_code == 0, res.output
