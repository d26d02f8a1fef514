import random

import pytest

from npmt.semantics import EvaluationError
from npmt.session import Event, Session, verdict_report
from npmt.states import format_state, state_leq, state_initial

from conftest import random_structure


def test_fresh_session_at_initial_state(example21):
    s = Session(example21)
    assert s.state == state_initial(example21)
    assert s.events == []
    assert format_state(s.state) == "([],[<>])"


def test_two_sessions_are_independent(example21):
    a, b = Session(example21), Session(example21)
    assert a.id != b.id
    a.query("R1", (0,))
    assert b.state == state_initial(example21)


def test_query_appends_events_in_order(example21):
    s = Session(example21)
    assert s.query("R1", (0,)) == (1, 1)
    assert s.query("R1", (1,)) == (0, 2)
    assert [e.seq for e in s.events] == [1, 2]


def test_requery_is_idempotent_no_event(example21):
    s = Session(example21)
    s.query("R1", (0,))
    value, seq = s.query("R1", (0,))
    assert value == 1 and seq is None
    assert len(s.events) == 1


def test_state_only_grows(example21):
    s = Session(example21)
    previous = s.state
    for point in ((0,), (1,)):
        s.query("R1", point)
        assert state_leq(previous, s.state)
        previous = s.state


def test_eval_adds_watch_entry(example21):
    s = Session(example21)
    entry = s.eval("R1(0)")
    assert not entry.verdict.satisfied
    assert entry.flipped_at is None
    assert len(s.watchlist) == 1


def test_watch_flips_after_query(example21):
    s = Session(example21)
    s.eval("R1(0)")
    s.query("R1", (0,))
    entry = s.watchlist[0]
    assert entry.verdict.satisfied
    assert entry.flipped_at == 1


def test_eval_satisfied_from_start(example21):
    s = Session(example21)
    entry = s.eval("!!(R1(0) | !R1(0))")
    assert entry.verdict.satisfied
    assert entry.flipped_at == 0


def test_eval_rejects_open_formula(example21):
    s = Session(example21)
    with pytest.raises(EvaluationError, match="closed"):
        s.eval("R1(x)")


def test_eval_same_formula_updates_entry(example21):
    s = Session(example21)
    s.eval("R1(0)")
    s.eval("R1(0)")
    assert len(s.watchlist) == 1


def test_watchlist_never_unflips_over_random_query_orders():
    rng = random.Random(77)
    for _ in range(20):
        m = random_structure(rng, max_universe=2, max_predicates=2)
        s = Session(m)
        watched = ["R0(0)", "!R0(0)", "R0(0) | !R0(0)", "R0(0) -> R0(0)"]
        for text in watched:
            s.eval(text)
        history = {text: [] for text in watched}
        points = [(name, (x,)) for name, _ in m.signature.predicates for x in m.universe]
        rng.shuffle(points)
        for name, point in points:
            s.query(name, point)
            for entry in s.watchlist:
                history[entry.text].append(entry.verdict.satisfied)
        for text, seq in history.items():
            # monotone: refuted* satisfied*
            assert seq == sorted(seq), f"{text}: {seq}"


def test_replay_reproduces_state_and_watchlist(example21):
    s = Session(example21)
    s.eval("R1(0)")
    s.query("R1", (0,))
    s.query("R1", (1,))
    replayed = Session.replay(example21, s.events)
    assert replayed.state == s.state
    replayed.eval("R1(0)")
    assert replayed.watchlist[0].verdict.satisfied == s.watchlist[0].verdict.satisfied


def test_replay_rejects_divergent_log(example21):
    bogus = [Event(seq=1, symbol="R1", point=(0,), value=0)]  # first query yields 1
    with pytest.raises(EvaluationError, match="diverged"):
        Session.replay(example21, bogus)


def test_log_file_round_trip(example21, tmp_path):
    path = tmp_path / "events.jsonl"
    s = Session(example21, log_path=path)
    s.query("R1", (1,))
    s.query("R1", (0,))
    replayed = Session.replay_log_file(example21, path)
    assert replayed.state == s.state
    assert [e.seq for e in replayed.events] == [1, 2]


def test_event_json_round_trip():
    e = Event(seq=3, symbol="f", point=(0, 1), value=1)
    assert Event.from_json(e.to_json()) == e


def test_snapshot_shape(example21):
    s = Session(example21)
    s.eval("R1(0)")
    s.query("R1", (0,))
    snap = s.snapshot()
    assert snap["id"] == s.id
    assert snap["universe"] == [0, 1]
    assert snap["state"] == "([],[<(0)>])"
    assert snap["seq"] == 1
    assert snap["determined"]["R1"] == [{"point": [0], "value": 1}]
    assert snap["undetermined"]["R1"] == [[1]]
    assert snap["watchlist"][0]["satisfied"] is True
    assert snap["watchlist"][0]["flipped_at"] == 1


def test_verdict_report_format(example21):
    s = Session(example21)
    entry = s.eval("R1(0)")
    report = verdict_report(entry.text, entry.verdict)
    assert report.startswith("R1(0): refuted")
