import json

import pytest

from twoclass import __version__
from twoclass import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classgroup_308(capsys):
    code, out, _ = run(capsys, "classgroup", "--disc", "-308")
    assert code == 0
    obj = json.loads(out)
    assert obj["twoclass"] == __version__ and obj["config"]["disc"] == -308
    assert obj["profile"]["h"] == 8 and obj["profile"]["two_sylow_type"] == [2, 4]
    assert len(obj["ambiguous"]) == 4


@pytest.mark.parametrize("argv", [
    ["classgroup", "--disc", "-5"],
    ["classgroup", "--disc", "-16"],
    ["search", "--ell", "1", "--xmax", "10"],
    ["singular", "--m", "23", "--s1", "7", "--s2", "11", "--h", "18", "--combined"],
    ["verify", "--suite", "nope"],
    ["census", "--ell", "1"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2


def test_ell_one_points_to_construct22(capsys):
    _, _, err = run(capsys, "search", "--ell", "1", "--xmax", "10")
    assert "construct22" in err


def test_classgroup_trivial(capsys):
    code, out, _ = run(capsys, "classgroup", "--disc", "-4")
    assert code == 0 and json.loads(out)["profile"]["h"] == 1


def test_classgroup_capacity(capsys):
    code, _, _ = run(capsys, "classgroup", "--disc", "-4000000004", "--no-census")
    assert code == 3


def test_search_outputs(tmp_path, capsys):
    out, csvp = tmp_path / "w.jsonl", tmp_path / "c.csv"
    code, _, _ = run(capsys, "search", "--ell", "2", "--xmax", "100",
                     "--out", str(out), "--census-out", str(csvp))
    assert code == 0
    lines = out.read_text().splitlines()
    head = json.loads(lines[0])
    assert head["twoclass"] == __version__ and head["config"]["xmax"] == 100
    assert [json.loads(x)["d"] for x in lines[1:]] == [77]
    text = csvp.read_text().splitlines()
    assert text[0].startswith("# twoclass ") and text[1] == "X,ell,count,ratio"


def test_search_empty(tmp_path, capsys):
    out, csvp = tmp_path / "w.jsonl", tmp_path / "c.csv"
    code, _, _ = run(capsys, "search", "--ell", "2", "--xmax", "10",
                     "--out", str(out), "--census-out", str(csvp))
    assert code == 0
    assert len(out.read_text().splitlines()) == 1
    assert csvp.read_text().splitlines()[-1].startswith("10,2,0,")


def test_search_reproducible(tmp_path, capsys):
    # same config, different thread counts: byte-identical output
    out = tmp_path / "w.jsonl"
    run(capsys, "search", "--ell", "2", "--xmax", "1000000", "--out", str(out), "--workers", "1")
    first = out.read_bytes()
    run(capsys, "search", "--ell", "2", "--xmax", "1000000", "--out", str(out), "--workers", "3")
    assert out.read_bytes() == first


def test_search_resume_after_interrupt(tmp_path, capsys, monkeypatch):
    ref, out, ck = tmp_path / "ref.jsonl", tmp_path / "w.jsonl", tmp_path / "c.json"
    run(capsys, "search", "--ell", "2", "--xmax", "1000000", "--out", str(ref))

    real = cli.run_search

    def interrupted(*a, **k):
        for i, w in enumerate(real(*a, **k)):
            if i == 10:
                raise KeyboardInterrupt
            yield w

    monkeypatch.setattr(cli, "run_search", interrupted)
    with pytest.raises(KeyboardInterrupt):
        cli.main(["search", "--ell", "2", "--xmax", "1000000", "--out", str(out), "--checkpoint", str(ck)])
    monkeypatch.setattr(cli, "run_search", real)
    assert len(out.read_text().splitlines()) == 11

    # an existing checkpoint needs an explicit choice
    code, _, _ = run(capsys, "search", "--ell", "2", "--xmax", "1000000",
                     "--out", str(out), "--checkpoint", str(ck))
    assert code == 2
    code, _, _ = run(capsys, "search", "--ell", "2", "--xmax", "1000000",
                     "--out", str(out), "--checkpoint", str(ck), "--resume")
    assert code == 0
    assert out.read_text().splitlines()[1:] == ref.read_text().splitlines()[1:]


def test_search_refuses_corrupt_checkpoint(tmp_path, capsys):
    out, ck = tmp_path / "w.jsonl", tmp_path / "c.json"
    run(capsys, "search", "--ell", "2", "--xmax", "100000", "--out", str(out), "--checkpoint", str(ck))
    state = json.loads(ck.read_text())
    state["chain"] = "0" * 64
    ck.write_text(json.dumps(state))
    code, _, err = run(capsys, "search", "--ell", "2", "--xmax", "100000",
                       "--out", str(out), "--checkpoint", str(ck), "--resume")
    assert code == 2 and "digest" in err


def test_search_refuses_edited_output(tmp_path, capsys):
    out, ck = tmp_path / "w.jsonl", tmp_path / "c.json"
    run(capsys, "search", "--ell", "2", "--xmax", "100000", "--out", str(out), "--checkpoint", str(ck))
    lines = out.read_text().splitlines()
    lines[1] = lines[1].replace('"d": 77', '"d": 78')
    out.write_text("\n".join(lines) + "\n")
    code, _, err = run(capsys, "search", "--ell", "2", "--xmax", "100000",
                       "--out", str(out), "--checkpoint", str(ck), "--resume")
    assert code == 2 and "chain" in err


def test_singular(capsys):
    code, out, _ = run(capsys, "singular", "--h", "18", "--P", "10000")
    obj = json.loads(out)
    assert code == 0
    assert obj["finite"] == pytest.approx(0.33009, abs=1e-4)
    assert obj["gap"] <= obj["tail_bound"]
    code, out, _ = run(capsys, "singular", "--h", "20", "--P", "100")
    assert json.loads(out)["product"] == 0


def test_repcount(capsys):
    code, out, _ = run(capsys, "repcount", "--n", "162")
    obj = json.loads(out)
    assert code == 0 and obj["by_class"]["11,7"]["count"] == 4


def test_construct22(capsys):
    code, out, _ = run(capsys, "construct22", "--p1-bound", "20", "--pairs", "1")
    obj = json.loads(out)
    assert code == 0 and obj["reports"][0]["type"] == [2, 2]


def test_census_csv(capsys):
    code, out, _ = run(capsys, "census", "--grid", "1000", "100000")
    assert code == 0
    assert out.splitlines()[0].startswith("# twoclass")
    assert out.splitlines()[-1].startswith("100000,2,6,")


def test_verify_major_arc(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "major-arc")
    assert code == 0 and json.loads(out)["result"]["passed"]


def test_verify_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setitem(cli.SUITES, "oracles", lambda: {"passed": False})
    code, _, _ = run(capsys, "verify", "--suite", "oracles")
    assert code == 4
