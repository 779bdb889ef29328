import json
import math

import pytest

import tsdistill as t


def test_version():
    assert t.__version__ == "0.1.0"


def test_generate_noiseless_matches_recursion():
    p = t.OuParams(kappa=0.2, r_bar=8.0, sigma=0.0, n_steps=50, seed=1)
    xs = t.generate_series(p)
    assert len(xs) == 51
    for step, x in enumerate(xs):
        assert x == pytest.approx(8.0 * (1 - 0.8**step), abs=1e-9)
    assert t.classify_trend(xs) == t.Trend.increasing


def test_theoretical_moments():
    mean, var = t.theoretical_moments(t.OuParams(kappa=0.1, r_bar=10.0, sigma=2.0, n_steps=200), 200)
    assert mean == pytest.approx(10.0, abs=1e-6)
    assert var == pytest.approx(4.0 * (1 - 0.9**400) / (1 - 0.81))


def test_sample_params_in_ranges():
    r = t.ParamRanges()
    p = t.sample_params(r, 5)
    assert r.kappa[0] <= p.kappa <= r.kappa[1]
    assert p.seed == 5
    assert t.sample_params(r, 5) == p


def test_labels_and_sentences_round_trip():
    xs = t.generate_series(t.OuParams(kappa=0.1, r_bar=-20.0, sigma=1.0, seed=3))
    labels = t.compute_labels(xs)
    ann = t.render_fact_sentences(labels)
    assert ann.source == t.AnnotationSource.oracle
    assert t.extract_category(ann.trend, t.Field.trend) == labels.trend
    assert t.extract_category(ann.noise, t.Field.noise) == labels.noise
    assert t.extract_category(ann.extrema, t.Field.extrema) == (labels.max_loc, labels.min_loc)
    assert t.mock_annotate(xs) == ann


def test_rescale_and_digits():
    xs = t.generate_series(t.OuParams(seed=9))
    ints = t.rescale_to_integers(xs)
    assert min(ints) == 0 and max(ints) == 99
    assert ints.index(99) == xs.index(max(xs))
    text = t.serialize_digits(ints)
    assert t.parse_digits(text) == ints
    assert t.serialize_digits([7, 42]) == "0 7 , 4 2"
    with pytest.raises(t.ParseError):
        t.parse_digits("0 7,4 2")


def test_png_bytes(tmp_path):
    xs = t.generate_series(t.OuParams(seed=2))
    data = t.render_plot_png(xs)
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    out = tmp_path / "p.png"
    t.render_plot(xs, out, 400, 300)
    assert out.read_bytes()[:4] == b"\x89PNG"


def test_annotation_json():
    a = t.parse_annotation_json('noise {"trend": "up", "noise": "low", "extrema": "max at end"}')
    assert (a.trend, a.noise, a.extrema) == ("up", "low", "max at end")
    assert json.loads(a.to_json_pattern()) == {"trend": "up", "noise": "low", "extrema": "max at end"}
    with pytest.raises(t.ParseError):
        t.parse_annotation_json('{"trend": "up"}')
    assert "increasing/decreasing/flat" in t.build_prompt()


def test_rule_nli_and_fact_check():
    label, score = t.rule_nli("The trend is increasing.", "The trend is decreasing.", t.Field.trend)
    assert label == t.NliLabel.contradiction and score == 0.0
    labels = t.FeatureLabels()
    labels.trend = t.Trend.increasing
    labels.max_loc = t.Location.end
    bad = t.Annotation("Increasing.", "Low noise.", "The maximum is at the beginning.")
    checked, tv, nv, ev = t.fact_check_sample(bad, labels)
    assert ev == t.NliLabel.contradiction
    assert checked.source == t.AnnotationSource.replaced
    assert "end" in checked.extrema


def test_evaluate_counts_flip():
    refs, cands = [], []
    for i in range(4):
        xs = t.generate_series(t.OuParams(kappa=0.1, r_bar=10.0 if i % 2 else -10.0, sigma=0.0))
        labels = t.compute_labels(xs)
        ann = t.render_fact_sentences(labels)
        refs.append((f"s{i}", ann, labels))
        cands.append((f"s{i}", ann.to_json_pattern()))
    cands[0] = ("s0", "not json")
    report = t.evaluate(refs, cands)
    assert report["parse_failures"] == 1
    assert report["metrics"]["feature_trend"] == 0.75
    assert report["metrics"]["cosine"] is None


def test_errors_are_typed():
    with pytest.raises(t.ValidationError):
        t.generate_series(t.OuParams(kappa=0.0))
    assert issubclass(t.ParseError, t.DataError)
    assert issubclass(t.ValidationError, t.Error)


def test_build_dataset_mock(tmp_path):
    cfg = {
        "output_dir": str(tmp_path / "ds"),
        "n_samples": 10,
        "annotator": {"mode": "mock"},
        "plot": {"width": 320, "height": 240},
        "jobs": 2,
    }
    manifest = t.build_dataset(cfg)
    assert manifest["status"] == "complete"
    assert manifest["split"]["train"] == 9
    lines = (tmp_path / "ds" / "sft_test.jsonl").read_text().splitlines()
    assert len(lines) == 1
    rec = json.loads(lines[0])
    assert set(json.loads(rec["completion"])) == {"trend", "noise", "extrema"}
    with pytest.raises(t.ValidationError):
        t.build_dataset({**cfg, "dataset_seed": 1})
    assert not math.isnan(manifest["oracle"]["flat_threshold"])
