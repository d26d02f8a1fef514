"""Interactive subject sessions: an append-only event log over one structure.

A session owns the single current state of its structure.  Each successful
query of an undetermined point appends one event; re-queries of determined
points return the stored value without an event.  Watched formulas are
re-evaluated after every event so the subject can see verdicts flip from
refuted to satisfied as determination proceeds (never the reverse: the
satisfaction relation is monotone along the state order).
"""

import json
import threading
import uuid
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .logic import Formula, format_formula, free_variables
from .parser import parse_formula
from .semantics import EvaluationError, Evaluator, Verdict
from .states import Point, State, Structure, determined_values, format_state, state_initial, state_query


@dataclass(frozen=True)
class Event:
    seq: int
    symbol: str
    point: Point
    value: int

    def to_json(self) -> str:
        return json.dumps(
            {"seq": self.seq, "symbol": self.symbol, "point": list(self.point), "value": self.value}
        )

    @staticmethod
    def from_json(line: str) -> "Event":
        d = json.loads(line)
        return Event(seq=d["seq"], symbol=d["symbol"], point=tuple(d["point"]), value=d["value"])


@dataclass
class WatchEntry:
    text: str
    formula: Formula
    verdict: Verdict
    flipped_at: Optional[int]  # event seq after which it became satisfied; 0 = from the start


class Session:
    def __init__(self, structure: Structure, spec_text: str = "", log_path=None, session_id: Optional[str] = None):
        self.id = session_id or uuid.uuid4().hex
        self.structure = structure
        self.spec_text = spec_text
        self.state: State = state_initial(structure)
        self.events: list[Event] = []
        self.watchlist: list[WatchEntry] = []
        self.log_path = log_path
        self._lock = threading.RLock()

    # -- queries -----------------------------------------------------------

    def query(self, symbol: str, point: Sequence[int]) -> tuple[int, Optional[int]]:
        """Returns (value, event seq) — seq is None when the point was
        already determined and no event was appended."""
        with self._lock:
            value, new_state = state_query(self.structure, self.state, symbol, point)
            if new_state == self.state:
                return value, None
            self.state = new_state
            event = Event(seq=len(self.events) + 1, symbol=symbol, point=tuple(point), value=value)
            self.events.append(event)
            if self.log_path is not None:
                with open(self.log_path, "a", encoding="utf-8") as fh:
                    fh.write(event.to_json() + "\n")
            self._refresh_watchlist(event.seq)
            return value, event.seq

    # -- watchlist ---------------------------------------------------------

    def eval(self, formula_text: str) -> WatchEntry:
        """Evaluate at the current state and add the formula to the watchlist."""
        with self._lock:
            phi = parse_formula(formula_text, self.structure.signature)
            if free_variables(phi):
                raise EvaluationError(f"formula must be closed: {formula_text}")
            verdict = Evaluator(self.structure).verdict(self.state, phi)
            for entry in self.watchlist:
                if entry.formula == phi:
                    entry.verdict = verdict
                    return entry
            entry = WatchEntry(
                text=format_formula(phi),
                formula=phi,
                verdict=verdict,
                flipped_at=(len(self.events) if verdict.satisfied else None),
            )
            self.watchlist.append(entry)
            return entry

    def _refresh_watchlist(self, seq: int):
        if not self.watchlist:
            return
        ev = Evaluator(self.structure)
        for entry in self.watchlist:
            was = entry.verdict.satisfied
            entry.verdict = ev.verdict(self.state, entry.formula)
            if entry.verdict.satisfied and not was:
                entry.flipped_at = seq

    # -- views -------------------------------------------------------------

    def determined_table(self) -> dict[str, dict[Point, int]]:
        out = {}
        for name, _ in self.structure.signature.functions:
            out[name] = determined_values(self.structure, self.state, name)
        for name, _ in self.structure.signature.predicates:
            out[name] = determined_values(self.structure, self.state, name)
        return out

    def undetermined_points(self) -> dict[str, list[Point]]:
        out = {}
        for name, arity in self.structure.signature.functions + self.structure.signature.predicates:
            table = determined_values(self.structure, self.state, name)
            out[name] = [p for p in self.structure.points(arity) if p not in table]
        return out

    def snapshot(self) -> dict:
        with self._lock:
            sig = self.structure.signature
            return {
                "id": self.id,
                "universe": list(self.structure.universe),
                "signature": {
                    "functions": [{"name": n, "arity": a} for n, a in sig.functions],
                    "predicates": [{"name": n, "arity": a} for n, a in sig.predicates],
                    "constants": {n: v for n, v in self.structure.constants},
                },
                "state": format_state(self.state),
                "seq": len(self.events),
                "determined": {
                    name: [{"point": list(p), "value": v} for p, v in table.items()]
                    for name, table in self.determined_table().items()
                },
                "undetermined": {
                    name: [list(p) for p in pts] for name, pts in self.undetermined_points().items()
                },
                "watchlist": [
                    {
                        "formula": entry.text,
                        "satisfied": entry.verdict.satisfied,
                        "flipped_at": entry.flipped_at,
                        "report": verdict_report(entry.text, entry.verdict),
                    }
                    for entry in self.watchlist
                ],
            }

    # -- replay ------------------------------------------------------------

    @classmethod
    def replay(cls, structure: Structure, events: Sequence[Event], spec_text: str = "") -> "Session":
        """Rebuild a session from its event log; validates values en route."""
        session = cls(structure, spec_text=spec_text)
        for event in events:
            value, seq = session.query(event.symbol, event.point)
            if value != event.value or seq != event.seq:
                raise EvaluationError(
                    f"log replay diverged at event {event.seq}: "
                    f"expected {event.symbol}{event.point} = {event.value}, got {value}"
                )
        return session

    @classmethod
    def replay_log_file(cls, structure: Structure, path) -> "Session":
        with open(path, "r", encoding="utf-8") as fh:
            events = [Event.from_json(line) for line in fh if line.strip()]
        return cls.replay(structure, events)


def verdict_report(formula_text: str, verdict: Verdict) -> str:
    """The one-line verdict report shared verbatim by the CLI and the HTTP API."""
    return f"{formula_text}: {verdict}"
