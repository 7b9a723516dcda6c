import itertools
import math

import numpy as np
import pytest

from cardbin.config import PipelineConfig
from cardbin.evaluation import (Annotation, AnnotationError, ConfusionCounts, EmptyScore,
                                accuracy, load_annotations, parse_annotations, save_annotations,
                                score)
from cardbin.pipeline import process_card
from cardbin.regions import RegionClass
from cardbin.synth import CardSpec, Element, SpecError, generate_card, load_spec, random_spec
from conftest import rect_component


def test_parse_line():
    assert parse_annotations("text 10 20 300 40\n") == [Annotation("text", 10, 20, 300, 40)]


def test_parse_empty_and_comments(tmp_path):
    path = tmp_path / "a.txt"
    path.write_text("")
    assert load_annotations(path) == []
    assert parse_annotations("# header\n\nnontext 1 2 3 4\n") == [Annotation("nontext", 1, 2, 3, 4)]


@pytest.mark.parametrize("text, fragment", [
    ("blob 0 0 5 5", "unknown kind"),
    ("text 0 0 5", "expected"),
    ("text 0 0 5 x", "non-integer"),
    ("text 0 0 0 5", "invalid box"),
])
def test_parse_errors_carry_line_numbers(text, fragment):
    with pytest.raises(AnnotationError, match=fragment) as exc:
        parse_annotations("text 1 1 1 1\n" + text, source="f")
    assert "f:2:" in str(exc.value)


def test_save_load_round_trip(tmp_path):
    anns = [Annotation("text", 1, 2, 3, 4), Annotation("nontext", 5, 6, 7, 8)]
    save_annotations(anns, tmp_path / "a.txt")
    assert load_annotations(tmp_path / "a.txt") == anns


def test_score_cases():
    inside = rect_component(10, 10, 20, 5)
    outside = rect_component(200, 200, 20, 5)
    partial = rect_component(0, 50, 10, 10)  # 6 of 10 columns inside the box
    anns = [Annotation("text", 0, 0, 100, 30), Annotation("text", 4, 50, 50, 10)]
    c = score([inside, outside, partial],
              [RegionClass.TEXT, RegionClass.NOISE, RegionClass.NOISE], anns)
    assert c == ConfusionCounts(bb=1, bt=0, tb=1, tt=1)


def test_score_majority_is_strict():
    cc = rect_component(0, 0, 10, 1)
    half = [Annotation("text", 5, 0, 5, 1)]
    assert score([cc], [RegionClass.NOISE], half) == ConfusionCounts(bb=1)


def test_nontext_boxes_do_not_count_as_truth():
    cc = rect_component(0, 0, 10, 2)
    assert score([cc], [RegionClass.TEXT], [Annotation("nontext", 0, 0, 10, 2)]) == \
        ConfusionCounts(bt=1)


def test_score_permutation_invariant():
    rng = np.random.default_rng(0)
    comps = [rect_component(int(rng.integers(0, 300)), int(rng.integers(0, 300)),
                            int(rng.integers(1, 40)), int(rng.integers(1, 40))) for _ in range(8)]
    classes = [RegionClass.TEXT if rng.random() < 0.5 else RegionClass.NOISE for _ in comps]
    anns = [Annotation("text", int(rng.integers(0, 300)), int(rng.integers(0, 300)), 60, 30)
            for _ in range(4)]
    ref = score(comps, classes, anns)
    for perm in itertools.islice(itertools.permutations(range(8)), 0, 40000, 997):
        for a_perm in itertools.permutations(anns):
            assert score([comps[i] for i in perm], [classes[i] for i in perm], list(a_perm)) == ref


@pytest.mark.parametrize("counts, expected", [
    (ConfusionCounts(bb=50, bt=3, tb=2, tt=45), 95.0),
    (ConfusionCounts(bb=3, tt=7), 100.0),
    (ConfusionCounts(bt=2, tb=1), 0.0),
])
def test_accuracy(counts, expected):
    assert accuracy(counts) == pytest.approx(expected)
    assert expected == 100 * (counts.bb + counts.tt) / counts.total


def test_accuracy_empty():
    with pytest.raises(EmptyScore):
        accuracy(ConfusionCounts())


def test_generator_deterministic():
    spec = random_spec(np.random.default_rng(4))
    a_img, a_ann = generate_card(spec, 17)
    b_img, b_ann = generate_card(spec, 17)
    assert np.array_equal(a_img, b_img) and a_ann == b_ann
    c_img, _ = generate_card(spec, 18)
    assert not np.array_equal(a_img, c_img)


def test_generator_blank():
    img, ann = generate_card(CardSpec(), 0)
    assert ann == [] and np.all(img == 200)


def test_generator_annotations_inside_canvas():
    rng = np.random.default_rng(8)
    for seed in range(10):
        spec = random_spec(rng)
        img, anns = generate_card(spec, seed)
        h, w = img.shape
        for a in anns:
            assert 0 <= a.x and 0 <= a.y and a.x + a.w <= w and a.y + a.h <= h
        assert sum(a.kind == "text" for a in anns) == sum(e.kind == "text" for e in spec.elements)


def test_generator_rejects_out_of_canvas():
    with pytest.raises(SpecError, match="outside"):
        generate_card(CardSpec(elements=(Element("logo", (1000, 700, 50, 50)),)), 0)
    with pytest.raises(SpecError, match="outside"):
        generate_card(CardSpec(elements=(Element("text", (0, 5, 600, 20), 10.0),)), 0)


def test_generator_rejects_non_text_aspect():
    with pytest.raises(SpecError, match="aspect"):
        generate_card(CardSpec(elements=(Element("text", (10, 10, 20, 20)),)), 0)


def test_generator_text_within_rules():
    cfg = PipelineConfig()
    spec = CardSpec(elements=(Element("text", (100, 100, 300, 20)), Element("text", (100, 300, 500, 28), 4.0)))
    img, _ = generate_card(spec, 5)
    r = process_card(img, cfg)
    assert len(r.text_regions) == 2
    for rec in r.text_regions:
        cc = rec.component
        assert cfg.ra_min < cc.fill_ratio_pct < cfg.ra_max
        assert cfg.r_min < cc.width / cc.height < cfg.r_max


def test_generated_skew_closes_the_loop():
    spec = CardSpec(elements=(Element("text", (250, 300, 480, 24), 5.0),))
    img, _ = generate_card(spec, 0)
    [rec] = process_card(img).text_regions
    assert math.degrees(rec.skew.angle) == pytest.approx(5.0, abs=1.0)


def test_spec_json(tmp_path):
    spec = random_spec(np.random.default_rng(1))
    path = tmp_path / "s.json"
    import json
    path.write_text(json.dumps(spec.to_dict()))
    assert load_spec(path) == spec
    path.write_text('{"elements": [{"kind": "star", "box": [0, 0, 1, 1]}]}')
    with pytest.raises(SpecError, match="unknown kind"):
        load_spec(path)


def test_small_card_rejected():
    with pytest.raises(SpecError):
        generate_card(CardSpec(width=100, height=96), 0)
