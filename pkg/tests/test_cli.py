import json

import pytest

from conftest import run_pipeline
from nmtrepair.cli import build_manifest, build_parser, main


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    work = tmp_path_factory.mktemp("pipeline")
    run_pipeline(work)
    return work


def test_pipeline_outputs(pipeline):
    assert (pipeline / "mined" / "pairs.tsv").exists()
    assert len((pipeline / "methods" / "methods.jsonl").read_text().splitlines()) == 60
    manifest = json.loads((pipeline / "bundle" / "manifest").read_text())
    assert manifest["counts"] == {"train": 48, "valid": 6, "test": 6}
    assert manifest["seeds"] == {"split": 9}
    log = (pipeline / "model" / "checkpoints.tsv").read_text().splitlines()
    assert log[0].split("\t") == ["epoch", "step", "train_loss", "val_loss", "learning_rate"]
    assert len(log) == 3
    report = (pipeline / "eval" / "report.csv").read_text().splitlines()
    assert report[0].startswith("beam,perfect_count,total")
    assert [line.split(",")[0] for line in report[1:]] == ["1", "3"]
    assert (pipeline / "eval" / "report.timing.csv").exists()


def test_predict_text_and_jsonl(pipeline, capsys):
    method = json.loads((pipeline / "methods" / "methods.jsonl").read_text().splitlines()[0])["buggy"]
    src = pipeline / "one.java"
    src.write_text(method)
    ckpt = str(pipeline / "model" / "model.ckpt")
    assert main(["predict", "--model", ckpt, "--input", str(src), "--beam", "2", "--max-len", "5"]) == 0
    assert capsys.readouterr().out.startswith("# rank 1 score ")
    assert main(["predict", "--model", ckpt, "--input", str(src), "--beam", "2", "--max-len", "5",
                 "--format", "jsonl"]) == 0
    rows = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [r["rank"] for r in rows] == [1, 2]


def test_predict_out_of_vocabulary_is_user_error(pipeline, capsys):
    src = pipeline / "odd.java"
    src.write_text("void zzz() { synchronized (x) { yield(); } }")
    assert main(["predict", "--model", str(pipeline / "model" / "model.ckpt"), "--input", str(src)]) == 1
    assert "outside the model vocabulary" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    [],
    ["train"],
    ["mine", "--roots"],
    ["evaluate", "--model", "nope.ckpt", "--bundle", "nope", "--out", "r.csv"],
    ["dataset"],
    ["synth", "--pairs", "3", "--mutations", "bogus", "--out", "x"],
])
def test_user_errors_exit_one(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(argv))
    assert info.value.code == 1


def test_bad_checkpoint_is_user_error(tmp_path):
    bad = tmp_path / "m.ckpt"
    bad.write_bytes(b"junk")
    (tmp_path / "in.java").write_text("int f() { return 0; }")
    assert main(["predict", "--model", str(bad), "--input", str(tmp_path / "in.java")]) == 1


def test_internal_error_exits_two(tmp_path, monkeypatch):
    import nmtrepair.miner as miner

    def boom(*a, **k):
        raise RuntimeError("boom")

    monkeypatch.setattr(miner, "walk_repositories", boom)
    (tmp_path / "root").mkdir()
    assert main(["mine", "--roots", str(tmp_path / "root"), "--out", str(tmp_path / "o")]) == 2


def test_manifest_has_no_timestamps():
    args = build_parser().parse_args(["synth", "--out", "x", "--seed", "4"])
    m = build_manifest("synth", args, seeds={"synth": 4})
    assert m["arguments"]["seed"] == 4
    assert not any("time" in k for k in m)
    assert build_manifest("synth", args)["config_hash"] == m["config_hash"]


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert capsys.readouterr().out.startswith("nmtrepair ")
