import numpy as np
import pytest
from rankshift.engine import AnomalyEngine, load_score, load_scores
from rankshift.errors import OutOfOrderTimestamp
from rankshift.graphstream import EdgeEvent, GraphState
from rankshift.scores.StructureScore import StructureScore
from rankshift.scores.WeightScore import WeightScore
from rankshift.solver import batch_score_s, batch_score_w, SolverConfig

from Testing import apply_window, events_at, make_config, random_windows


@pytest.mark.parametrize('metric, kinds', [('s', ['s']), ('w', ['w']), ('both', ['s', 'w'])])
def test_load_scores_by_metric(metric, kinds):
    scores = load_scores(make_config(Metric=metric))
    assert [score.kind for score in scores] == kinds


def test_load_score_by_name():
    score = load_score('WeightScore', make_config())
    assert isinstance(score, WeightScore)
    assert score.name == 'WeightScore'


def test_plugin_history_and_derivatives():
    score = StructureScore(make_config(Epsilon=1e-9, ReanchorInterval=0))
    state = GraphState(4)
    score.start(state)
    first = score.update(state, apply_window(state, events_at(0, (0, 1), (1, 2)), 0))
    pair = score.derivatives()
    assert not pair.d1.any() and not pair.d2.any()
    second = score.update(state, apply_window(state, events_at(1, (2, 3)), 1))
    pair = score.derivatives()
    np.testing.assert_allclose(pair.d1, second.values - first.values)
    assert not pair.d2.any()
    third = score.update(state, apply_window(state, events_at(2, (3, 0)), 2))
    pair = score.derivatives()
    np.testing.assert_allclose(pair.d2, third.values - 2 * second.values + first.values)
    assert pair.window_index == 2
    assert len(score.history) == 3


def test_plugin_reanchors_periodically():
    config = make_config(ReanchorInterval=3)
    score = WeightScore(config)
    state = GraphState(20)
    score.start(state)
    for window, events in enumerate(random_windows(8, n=20, windows=9)):
        vector = score.update(state, apply_window(state, events, window))
        if (window + 1) % 3 == 0:
            exact = batch_score_w(state, SolverConfig(epsilon=1e-9))
            assert np.abs(vector.values - exact.values).sum() < 10 * config.configuration['Epsilon']
    assert score.reanchors == 3
    score.reset()
    assert score.current is None
    assert not score.history


@pytest.mark.parametrize('plugin', [StructureScore, WeightScore])
def test_reanchor_over_unchanged_graph_has_flat_derivatives(plugin):
    score = plugin(make_config(ReanchorInterval=4))
    state = GraphState(12)
    score.start(state)
    windows = random_windows(5, n=12, windows=2) + [[], []]
    for window, events in enumerate(windows):
        score.update(state, apply_window(state, events, window))
    assert score.reanchors == 1
    pair = score.derivatives()
    assert not pair.d1.any()
    assert not pair.d2.any()
    exact = score.batch(state, 3, solver=SolverConfig(epsilon=1e-12, max_iters=10000))
    np.testing.assert_allclose(score.current.values, exact.values, atol=1e-9)
    np.testing.assert_array_equal(score.history[-1].values, score.current.values)


def test_reanchor_shifts_history_by_correction():
    score = WeightScore(make_config(ReanchorInterval=3))
    state = GraphState(20)
    score.start(state)
    windows = random_windows(13, n=20, windows=4)
    for window, events in enumerate(windows[:2]):
        score.update(state, apply_window(state, events, window))
    before = [v.values for v in score.history]
    delta = apply_window(state, windows[2], 2)
    incremental = score.incremental(score.current, delta)
    anchored = score.update(state, delta)
    correction = anchored.values - incremental.values
    for kept, old in zip(list(score.history)[:2], before):
        np.testing.assert_allclose(kept.values, old + correction, atol=1e-15)
    # the re-anchored window keeps the derivatives of the incremental update
    pair = score.derivatives()
    np.testing.assert_allclose(pair.d1, incremental.values - before[1], atol=1e-15)
    np.testing.assert_allclose(pair.d2, incremental.values - 2 * before[1] + before[0], atol=1e-15)


def test_engine_matches_batch_scores():
    config = make_config(Epsilon=1e-9, MaxIters=10000, ReanchorInterval=0, Window=1, Warmup=2)
    windows = random_windows(21, n=15, windows=12)
    engine = AnomalyEngine(config, 15)
    records = list(engine.run([event for events in windows for event in events]))
    assert [r.window_index for r in records] == list(range(12))
    assert [r.warmup for r in records] == [True, True] + [False] * 10
    s_vector = engine.scores[0].current.values
    w_vector = engine.scores[1].current.values
    np.testing.assert_allclose(s_vector, batch_score_s(engine.state, SolverConfig(epsilon=1e-9)).values, atol=1e-6)
    np.testing.assert_allclose(w_vector, batch_score_w(engine.state, SolverConfig(epsilon=1e-9)).values, atol=1e-6)
    for record in records:
        assert record.score == max(record.score_s, record.score_w)
        assert len(record.top_nodes) == 10
    assert set(engine.duration) >= {'graph', 'StructureScore', 'WeightScore', 'normalization'}


def test_engine_window_start_times():
    config = make_config(Window=10, Origin=5)
    engine = AnomalyEngine(config, 3)
    events = events_at(5, (0, 1)) + events_at(27, (1, 2))
    records = list(engine.run(events))
    assert [(r.window_index, r.t_start) for r in records] == [(0, 5), (1, 15), (2, 25)]


def test_engine_rejects_out_of_order_stream():
    engine = AnomalyEngine(make_config(Window=10), 3)
    events = [EdgeEvent(0, 1, 12, line=1), EdgeEvent(1, 2, 11, line=2)]
    with pytest.raises(OutOfOrderTimestamp) as exc:
        list(engine.run(events))
    assert exc.value.line == 2


def test_engine_single_metric():
    config = make_config(Metric='w', Window=1)
    engine = AnomalyEngine(config, 5)
    records = list(engine.run(events_at(0, (0, 1), (1, 2)) + events_at(1, (2, 3)) + events_at(2, *[(3, 4)] * 5)))
    assert all(r.score_s == 0 and r.l1_d1s == 0 for r in records)
    assert set(engine.stats.channels) == {'w1', 'w2'}
