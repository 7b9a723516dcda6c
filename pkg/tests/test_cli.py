import json

import numpy as np
import pytest

from cardbin.cli import run, scale_annotations
from cardbin.config import PipelineConfig, save_config
from cardbin.evaluation import Annotation, load_annotations
from cardbin.imageio import decode_pbm, load_image, save_gray
from cardbin.synth import CardSpec, Element, generate_card

SPEC = {"width": 640, "height": 480,
        "elements": [{"kind": "text", "box": [100, 100, 300, 20], "skew_deg": 3},
                     {"kind": "hrule", "box": [60, 300, 400, 2]}]}


@pytest.fixture
def card(tmp_path):
    img, anns = generate_card(CardSpec.from_dict(SPEC), 0)
    path = tmp_path / "card.pgm"
    save_gray(img, path)
    return path, anns


def test_gen(tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps(SPEC))
    out, ann = tmp_path / "c.pgm", tmp_path / "c.txt"
    assert run(["gen", "--spec", str(spec), "--seed", "3", "-o", str(out), "-a", str(ann)]) == 0
    img = load_image(out)
    assert img.shape == (480, 640)
    kinds = [a.kind for a in load_annotations(ann)]
    assert kinds == ["text", "nontext"]


def test_binarize_outputs(tmp_path, card):
    path, _ = card
    out, ov, rep, sk = (tmp_path / n for n in ("o.pbm", "ov.pgm", "r.txt", "s.tsv"))
    code = run(["binarize", str(path), "-o", str(out), "--overlay", str(ov),
                "--report", str(rep), "--skew-log", str(sk)])
    assert code == 0
    bits = decode_pbm(out.read_bytes())
    assert bits.shape == (480, 640) and bits.any()
    overlay = load_image(ov)
    assert set(np.unique(overlay)) <= {0, 96, 160, 192, 255}
    assert 0 in overlay and 96 in overlay
    stages = [line.split()[0] for line in rep.read_text().splitlines()]
    assert stages == ["background", "regions", "skew", "binarize"]
    rows = sk.read_text().splitlines()
    assert rows[0].startswith("region\tsource") and len(rows) >= 2
    angles = [np.degrees(float(row.split("\t")[-1])) for row in rows[1:]]
    # short fragments can read flat (block quantization); none overshoots
    assert 1.5 < max(angles) < 4.5 and min(angles) >= 0


def test_eval(card, tmp_path, capsys):
    path, anns = card
    truth = tmp_path / "t.txt"
    truth.write_text("".join(a.line() + "\n" for a in anns))
    assert run(["eval", str(path), "--truth", str(truth)]) == 0
    header, row = capsys.readouterr().out.strip().splitlines()
    assert header.split("\t")[-1] == "accuracy"
    assert row.split("\t")[-1] == "100.00"


def test_eval_empty_annotations(card, tmp_path, capsys):
    path, _ = card
    truth = tmp_path / "t.txt"
    truth.write_text("")
    assert run(["eval", str(path), "--truth", str(truth)]) == 0
    row = capsys.readouterr().out.strip().splitlines()[1].split("\t")
    # with no truth every text pick is a false positive
    assert int(row[1]) >= 1 and row[2] == "0" and row[3] == "0"
    assert row[-1] == f"{100 * int(row[0]) / int(row[4]):.2f}"


def test_eval_blank_card(tmp_path, capsys):
    path = tmp_path / "blank.pgm"
    save_gray(np.full((96, 128), 255, np.uint8), path)
    truth = tmp_path / "t.txt"
    truth.write_text("")
    assert run(["eval", str(path), "--truth", str(truth)]) == 0
    assert capsys.readouterr().out.strip().splitlines()[1].endswith("nan")


def test_sweep_default_rows(card, capsys):
    path, _ = card
    assert run(["sweep", str(path)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 7
    assert [l.split("\t")[0] for l in lines[1:]] == [
        "640x480", "800x600", "1024x768", "1182x886", "1672x1254", "2048x1536"]


def test_sweep_with_truth(card, tmp_path, capsys):
    path, anns = card
    truth = tmp_path / "t.txt"
    truth.write_text("".join(a.line() + "\n" for a in anns))
    assert run(["sweep", str(path), "--resolutions", "640x480,1280x960", "--truth", str(truth)]) == 0
    rows = capsys.readouterr().out.strip().splitlines()[1:]
    assert [r.split("\t")[-1] for r in rows] == ["100.00", "100.00"]


def test_scale_annotations_covers_box():
    [a] = scale_annotations([Annotation("text", 10, 11, 33, 7)], (100, 100), (150, 200))
    assert (a.x, a.y) == (15, 22) and a.x + a.w >= 64 and a.y + a.h >= 36


@pytest.mark.parametrize("argv", [
    [], ["frobnicate"], ["binarize", "x.pgm"], ["gen", "--spec", "s", "--seed", "x", "-o", "o", "-a", "a"],
    ["sweep", "x.pgm", "--resolutions", "640by480"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv) == 2
    assert "usage" in capsys.readouterr().err


def test_processing_errors_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P9\n1 1\n255\n\x00")
    assert run(["binarize", str(bad), "-o", str(tmp_path / "o.pbm")]) == 1
    assert run(["binarize", str(tmp_path / "missing.pgm"), "-o", str(tmp_path / "o.pbm")]) == 1
    truth = tmp_path / "t.txt"
    truth.write_text("blob 1 2 3 4\n")
    save_gray(np.full((96, 128), 200, np.uint8), tmp_path / "ok.pgm")
    assert run(["eval", str(tmp_path / "ok.pgm"), "--truth", str(truth)]) == 1
    assert "unknown kind" in capsys.readouterr().err


def test_config_from_environment(card, tmp_path, monkeypatch):
    path, _ = card
    cfg = tmp_path / "c.cfg"
    # t_min above the card level: nothing is background, so no text is found
    save_config(PipelineConfig(t_min=250), cfg)
    monkeypatch.setenv("CARDBIN_CONFIG", str(cfg))
    out = tmp_path / "o.pbm"
    assert run(["binarize", str(path), "-o", str(out)]) == 0
    env_bits = decode_pbm(out.read_bytes())
    monkeypatch.delenv("CARDBIN_CONFIG")
    assert run(["binarize", str(path), "-o", str(out)]) == 0
    assert not np.array_equal(env_bits, decode_pbm(out.read_bytes()))


def test_bad_config_exit_1(card, tmp_path):
    path, _ = card
    cfg = tmp_path / "c.cfg"
    cfg.write_text("t_fixed = 20\nbogus = 1\n")
    assert run(["binarize", str(path), "-o", str(tmp_path / "o.pbm"), "--config", str(cfg)]) == 1
