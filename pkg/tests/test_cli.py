import io
import json
from fractions import Fraction
from importlib.resources import files

import jsonschema
import pytest

from youngwalls.cli import main
from youngwalls.shapes import is_valid_filling, tableau_shape


def schema(name):
    return json.loads(files("youngwalls").joinpath("schemas", f"{name}.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def cells_of(record):
    off = record.get("row_offset", 0)
    return {
        (i + off, c): lab
        for i, row in enumerate(record["labels"])
        for c, lab in enumerate(row)
        if lab is not None
    }


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["--model", "polyo-2nx3", "--n", "3", "--method", "density"], "39235950"),
        (["--model", "nx2-no-walls", "--n", "4", "--method", "formula"], "14"),
        (["--model", "polyo-2nx3", "--n", "2", "--method", "oracle"], "8550"),
        (["--model", "nxm-rowwalls", "--n", "2", "--m", "3", "--method", "oracle"], None),
    ],
)
def test_count(capsys, argv, expected):
    code, out, _ = run(capsys, "count", *argv)
    assert code == 0
    value, meta = out.splitlines()
    if expected is not None:
        assert value == expected
    meta = json.loads(meta)
    jsonschema.validate(meta, schema("count"))
    assert meta["count"] == value


def test_count_errors(capsys):
    assert run(capsys, "count", "--model", "polyo-2nx3", "--n", "5", "--method", "oracle")[0] == 3
    code, _, err = run(capsys, "count", "--model", "no-such-model", "--n", "1")
    assert code == 2 and "unknown model" in err
    assert run(capsys, "count", "--model", "nx2-no-walls", "--n", "2", "--method", "density")[0] == 2
    assert run(capsys, "count", "--model", "nxm-rowwalls", "--n", "2", "--method", "formula")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["count", "--n", "1"])
    assert exc.value.code == 2


def test_sequence_and_warm_cache(capsys):
    code, out, err = run(capsys, "sequence", "--max-n", "4", "-v")
    assert code == 0
    assert out.split() == ["1", "12", "8550", "39235950", "629738299350"]
    assert "computed 4 new levels" in err and "cache: wrote" in err
    code, out2, err = run(capsys, "sequence", "--max-n", "4", "-v")
    assert out2 == out
    assert "cache: loaded levels 0..4" in err and "computed 0 new levels" in err
    assert "cache: wrote" not in err
    assert run(capsys, "sequence", "--max-n", "0")[1] == "1\n"


def test_sequence_extends_cache(capsys, tmp_path):
    cache = str(tmp_path / "c")
    run(capsys, "sequence", "--max-n", "2", "--cache", cache)
    code, out, err = run(capsys, "sequence", "--max-n", "5", "--cache", cache, "-v")
    assert "computed 3 new levels" in err
    assert len(out.split()) == 6


def test_tampered_cache_is_rejected(capsys, tmp_path):
    cache = tmp_path / "c"
    run(capsys, "sequence", "--max-n", "3", "--cache", str(cache))
    (path,) = cache.glob("*.json")
    jsonschema.validate(json.loads(path.read_text()), schema("tower-cache"))
    assert run(capsys, "verify", "--cache", str(cache))[0] == 0
    data = json.loads(path.read_text())
    data["levels"][3]["coeffs"][0] = "5/7"
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", "--cache", str(cache))
    assert code == 1 and "FAIL cache" in out
    assert run(capsys, "count", "--model", "polyo-2nx3", "--n", "3", "--cache", str(cache))[0] == 1


def test_sample_reproducible_and_valid(capsys):
    _, a, _ = run(capsys, "sample", "--n", "1", "--count", "3", "--seed", "7")
    _, b, _ = run(capsys, "sample", "--n", "1", "--count", "3", "--seed", "7")
    assert a == b
    recs = [json.loads(line) for line in a.splitlines()]
    assert len(recs) == 3
    from youngwalls.shapes import polyomino_shape

    for r in recs:
        jsonschema.validate(r, schema("sample"))
        assert is_valid_filling(polyomino_shape(1), cells_of(r))
    _, c, _ = run(capsys, "sample", "--n", "1", "--count", "3", "--seed", "8")
    assert c != a


def test_sample_tableau(capsys):
    code, out, err = run(capsys, "sample", "--tableau", "--n", "1", "--count", "1", "-v")
    assert code == 0
    (rec,) = [json.loads(line) for line in out.splitlines()]
    jsonschema.validate(rec, schema("sample"))
    assert rec["kind"] == "tableau"
    assert is_valid_filling(tableau_shape(1), cells_of(rec))
    assert "accepted of" in err


def test_sample_ascii_and_cap(capsys):
    code, out, _ = run(capsys, "sample", "--n", "2", "--format", "ascii", "--seed", "1")
    assert code == 0 and out.startswith("# polyomino 1")
    assert "--" in out
    code = run(capsys, "sample", "--tableau", "--n", "6", "--max-attempts", "1", "--count", "20")[0]
    assert code == 3


def test_sample_to_stats_pipe(capsys, monkeypatch):
    _, out, _ = run(capsys, "sample", "--n", "2", "--count", "10000", "--seed", "3")
    monkeypatch.setattr("sys.stdin", io.StringIO(out))
    code, res, _ = run(capsys, "stats", "--format", "json")
    report = json.loads(res)
    jsonschema.validate(report, schema("stats"))
    assert code == 0 and report["accepted"] and report["samples"] == 10000


def test_stats_full_test_from_file(capsys, tmp_path):
    _, out, _ = run(capsys, "sample", "--n", "1", "--count", "1200", "--seed", "4")
    path = tmp_path / "s.jsonl"
    path.write_text(out)
    code, res, _ = run(capsys, "stats", "--input", str(path))
    assert code == 0 and "full test" in res and "accepted" in res


def test_stats_rejects_bad_input(capsys, tmp_path):
    path = tmp_path / "s.jsonl"
    path.write_text("not json\n")
    assert run(capsys, "stats", "--input", str(path))[0] == 2
    path.write_text("")
    assert run(capsys, "stats", "--input", str(path))[0] == 2


def test_dist(capsys):
    code, out, _ = run(capsys, "dist", "--n", "1")
    assert code == 0 and out.splitlines() == ["0\t1/3", "1\t2/3"]
    _, out, _ = run(capsys, "dist", "--n", "3")
    pmf = [Fraction(line.split("\t")[1]) for line in out.splitlines()]
    assert pmf == [Fraction(1, 15), Fraction(4, 15), Fraction(6, 15), Fraction(4, 15)]
    assert sum(pmf) == 1
    code, out, _ = run(capsys, "dist", "--n", "3", "--format", "json", "--empirical", "20000", "--seed", "2")
    data = json.loads(out)
    jsonschema.validate(data, schema("dist"))
    assert code == 0 and data["empirical"]["passed"]
    assert run(capsys, "dist", "--n", "0")[0] == 2


def test_verify_small(capsys):
    code, out, _ = run(capsys, "verify", "--format", "json")
    data = json.loads(out)
    jsonschema.validate(data, schema("verify"))
    assert code == 0 and data["passed"]
    names = {c["name"] for c in data["checks"]}
    assert {"models", "kernel", "bijection", "integrality", "identities", "cache"} <= names
    kernel = next(c for c in data["checks"] if c["name"] == "kernel")
    assert kernel["passed"] and "coefficient for coefficient" in kernel["detail"]


def test_block_json_model(capsys, tmp_path):
    from youngwalls.density import polyo_2nx3_block

    path = tmp_path / "block.json"
    path.write_text(json.dumps(polyo_2nx3_block().to_json()))
    jsonschema.validate(json.loads(path.read_text()), schema("block"))
    code, out, _ = run(capsys, "count", "--model", str(path), "--n", "2")
    assert code == 0 and out.splitlines()[0] == "8550"
    code, out, _ = run(capsys, "sample", "--model", str(path), "--n", "1", "--seed", "1")
    rec = json.loads(out)
    assert code == 0 and isinstance(rec["labels"], dict) and len(rec["labels"]) == 7
