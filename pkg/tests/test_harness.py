"""Streaming evaluation: loaders, runners, metrics, shadow verification."""

import json

import pytest

from dyntree import (
    DecisionTree,
    FeasibilityParams,
    Schema,
    StreamConfig,
    StreamMetrics,
    VerificationError,
    emit_metrics,
    era_flip_stream,
    load_stream,
    make_example,
    mixed_stream,
    prequential_f1,
    run_incremental,
    run_random_update,
    run_sliding_window,
    threshold_stream,
)
from dyntree.harness import _verify_step

PARAMS = FeasibilityParams(epsilon=0.3, alpha=0.2, beta=0.3, k=3, h=8)
GUARANTEED = FeasibilityParams(epsilon=0.03, alpha=0.4, beta=0.5, k=3, h=None)


def write_csv(path, text):
    path.write_text(text)
    return str(path)


def test_load_stream_infers_column_types(tmp_path):
    path = write_csv(tmp_path / "s.csv", (
        "size,shade,label\n"
        "1.5,red,yes\n"
        "2.0,blue,no\n"
        "0.25,red,yes\n"
    ))
    stream = load_stream(path, "label", "yes")
    assert [e.label for e in stream] == [1, 0, 1]
    assert stream[0].features == (1.5, "red")
    assert stream[1].features == (2.0, "blue")
    schema = Schema.infer(stream[0].features)
    assert not schema.all_categorical


def test_load_stream_numbers_stay_text_in_mixed_columns(tmp_path):
    path = write_csv(tmp_path / "s.csv", (
        "a,label\n"
        "12,x\n"
        "twelve,y\n"
    ))
    stream = load_stream(path, "label", "x")
    assert stream[0].features == ("12",)


def test_load_stream_label_by_index(tmp_path):
    path = write_csv(tmp_path / "s.csv", (
        "a,b,c\n"
        "1,0,2\n"
        "0,1,3\n"
    ))
    stream = load_stream(path, "1", "1")
    assert [e.label for e in stream] == [0, 1]
    assert stream[0].features == (1.0, 2.0)


def test_load_stream_errors(tmp_path):
    ragged = write_csv(tmp_path / "r.csv", "a,label\n1,yes\n2\n")
    with pytest.raises(ValueError, match="row 3"):
        load_stream(ragged, "label", "yes")
    unlabeled = write_csv(tmp_path / "u.csv", "a,label\n1,yes\n2,\n")
    with pytest.raises(ValueError, match="empty label"):
        load_stream(unlabeled, "label", "yes")
    ok = write_csv(tmp_path / "ok.csv", "a,label\n1,yes\n")
    with pytest.raises(ValueError, match="not in header"):
        load_stream(ok, "nope", "yes")
    with pytest.raises(ValueError, match="out of range"):
        load_stream(ok, "7", "yes")
    empty = write_csv(tmp_path / "e.csv", "")
    assert load_stream(empty, "label", "yes") == []


def test_prequential_f1_by_hand():
    # tp=2 fp=1 fn=1: precision and recall both 2/3
    assert prequential_f1([1, 0, 1, 1], [1, 1, 0, 1]) == pytest.approx(2 / 3)
    assert prequential_f1([0, 0, 1], [0, 0, 0]) == 0.0
    assert prequential_f1([1, 1], [1, 1]) == 1.0
    with pytest.raises(ValueError):
        prequential_f1([1], [1, 0])
    with pytest.raises(ValueError):
        prequential_f1([], [])


def test_stream_config_validation():
    with pytest.raises(ValueError):
        StreamConfig(PARAMS, mode="batch")
    with pytest.raises(ValueError):
        StreamConfig(PARAMS, mode="sw")
    with pytest.raises(ValueError):
        StreamConfig(PARAMS, mode="sw", window=10, warmup=11)
    cfg = StreamConfig(PARAMS, mode="sw", window=10)
    assert cfg.effective_warmup == 10
    assert StreamConfig(PARAMS).effective_warmup == 0


def test_sliding_window_matches_incremental_until_window_fills():
    stream = threshold_stream(120, d=3, seed=7, noise=0.1)
    inc = run_incremental(stream, StreamConfig(PARAMS))
    sw = run_sliding_window(
        stream, StreamConfig(PARAMS, mode="sw", window=10_000, warmup=0)
    )
    assert sw.predictions == inc.predictions
    assert sw.f1 == inc.f1


def test_sliding_window_keeps_active_set_at_window():
    stream = threshold_stream(150, d=2, seed=1)
    config = StreamConfig(PARAMS, mode="sw", window=40)
    metrics = run_sliding_window(stream, config)
    # warmup fills the window, every later step pairs one del with one ins
    assert metrics.n_updates == 2 * (150 - 40)
    assert len(metrics.predictions) == 150 - 40
    assert metrics.predictions[0][0] == 41


def test_random_update_runs_are_seed_deterministic():
    stream = mixed_stream(300, seed=5)
    a = run_random_update(stream, StreamConfig(PARAMS, mode="ru", seed=9))
    b = run_random_update(stream, StreamConfig(PARAMS, mode="ru", seed=9))
    assert a.predictions == b.predictions
    assert a.n_updates == b.n_updates
    assert a.rebuild_count == b.rebuild_count


def test_constant_stream_stays_single_leaf():
    stream = [make_example((1.0, 2.0), 1) for _ in range(60)]
    metrics = run_incremental(stream, StreamConfig(PARAMS))
    assert metrics.max_height == 0
    assert metrics.f1 > 0.95  # only the first, cold prediction misses


def test_warmup_is_not_scored():
    stream = threshold_stream(50, d=2, seed=3)
    metrics = run_incremental(stream, StreamConfig(PARAMS, warmup=20))
    assert len(metrics.predictions) == 30
    assert metrics.predictions[0][0] == 21
    assert metrics.n_updates == 30  # warm set lands in the initial build


def test_empty_stream_yields_empty_metrics():
    metrics = run_incremental([], StreamConfig(PARAMS))
    assert metrics.predictions == []
    assert metrics.f1 == 0.0
    assert metrics.n_updates == 0


def test_emit_metrics_writes_summary_and_series(tmp_path):
    stream = threshold_stream(80, d=2, seed=2)
    config = StreamConfig(PARAMS, warmup=10)
    metrics = run_incremental(stream, config)
    out = tmp_path / "m.json"
    series = tmp_path / "m.csv"
    summary = emit_metrics(metrics, out, config=config, series_path=series)
    on_disk = json.loads(out.read_text())
    assert on_disk == summary  # JSON round-trips every float exactly
    assert on_disk["predictions"] == 70
    assert on_disk["updates"] == metrics.n_updates
    assert on_disk["config"]["warmup"] == 10
    assert on_disk["mean_update_nanos"] > 0
    lines = series.read_text().strip().splitlines()
    assert lines[0] == "t,y_hat,y,nanos"
    assert len(lines) == 71
    first = lines[1].split(",")
    assert first[0] == "11"


def test_emit_metrics_handles_empty_run(tmp_path):
    out = tmp_path / "m.json"
    summary = emit_metrics(StreamMetrics(), out)
    assert summary["mean_update_nanos"] is None
    assert json.loads(out.read_text())["f1"] == 0.0


def test_verify_step_raises_on_corrupted_tree():
    stream = threshold_stream(40, d=2, seed=4)
    config = StreamConfig(GUARANTEED, verify=True)
    tree = DecisionTree.empty(GUARANTEED, Schema.numeric(2))
    shadow = tree.leaf_union()
    for e in stream:
        tree.update(e, "ins")
        shadow.insert(e)
    _verify_step(tree, shadow, config)
    node = tree.root
    while not node.is_leaf:
        node = node.left
    node.leaf_label = 1 - node.leaf_label
    with pytest.raises(VerificationError):
        _verify_step(tree, shadow, config)


def test_verified_run_completes_under_guaranteed_params():
    stream = mixed_stream(150, seed=8)
    config = StreamConfig(GUARANTEED, mode="ru", seed=1, verify=True)
    metrics = run_random_update(stream, config)
    assert metrics.n_updates == 150


def test_sliding_window_recovers_from_era_flip():
    stream = era_flip_stream(300, 500, d=4, seed=6, noise=0.02)
    config = StreamConfig(PARAMS, mode="sw", window=100)
    metrics = run_sliding_window(stream, config)
    tail = metrics.predictions[-250:]
    tail_f1 = prequential_f1([y for _, _, y in tail], [p for _, p, _ in tail])
    assert tail_f1 >= 0.9
