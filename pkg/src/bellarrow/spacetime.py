"""Minkowski interval classification and Bell-test event layout checks."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError

LIGHTLIKE_RTOL = 1e-12
EVENT_LABELS = ("E_S", "C_A", "C_B", "M_A", "M_B")


@dataclass(frozen=True)
class Event:
    label: str
    t: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.t, self.x, self.y, self.z)):
            raise ValidationError(f"event {self.label!r} has non-finite coordinates")


def interval(e1: Event, e2: Event, c: float = 1.0) -> tuple[float, str]:
    """Squared interval ``c^2 dt^2 - |dx|^2`` and its class.

    The pair is lightlike when ``|s2|`` is within ``1e-12`` of the larger of
    the temporal and spatial terms.
    """
    dt = e2.t - e1.t
    time_part = (c * dt) ** 2
    space_part = (e2.x - e1.x) ** 2 + (e2.y - e1.y) ** 2 + (e2.z - e1.z) ** 2
    s2 = time_part - space_part
    if abs(s2) <= LIGHTLIKE_RTOL * max(time_part, space_part):
        return s2, "lightlike"
    return s2, "timelike" if s2 > 0 else "spacelike"


def in_past_light_cone(e1: Event, e2: Event, c: float = 1.0) -> bool:
    """True when ``e1`` lies on or inside the past light cone of ``e2`` and strictly earlier."""
    _, kind = interval(e1, e2, c)
    return kind != "spacelike" and e1.t < e2.t


@dataclass(frozen=True)
class ExperimentGeometry:
    """Emission ``E_S``, setting choices ``C_A``/``C_B`` and measurements ``M_A``/``M_B``."""

    events: dict
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValidationError("light speed must be positive")
        missing = [k for k in EVENT_LABELS if k not in self.events]
        if missing:
            raise ValidationError(f"geometry is missing events {missing}")

    def __getitem__(self, label) -> Event:
        return self.events[label]

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentGeometry":
        try:
            events = {
                e["label"]: Event(e["label"], float(e["t"]), float(e.get("x", 0.0)),
                                  float(e.get("y", 0.0)), float(e.get("z", 0.0)))
                for e in doc["events"]
            }
            c = float(doc.get("c", 1.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed geometry document: {exc}") from None
        return cls(events, c)

    @classmethod
    def load(cls, path) -> "ExperimentGeometry":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class Condition:
    name: str
    passed: bool
    pairs: list[tuple[str, str, float, str]]  # (first, second, s2, class)


def _spacelike(g, name, *pairs):
    rows = []
    for a, b in pairs:
        s2, kind = interval(g[a], g[b], g.c)
        rows.append((a, b, s2, kind))
    return Condition(name, all(r[3] == "spacelike" for r in rows), rows)


def _past(g, name, *pairs):
    rows = []
    ok = True
    for a, b in pairs:
        s2, kind = interval(g[a], g[b], g.c)
        rows.append((a, b, s2, kind))
        ok &= in_past_light_cone(g[a], g[b], g.c)
    return Condition(name, ok, rows)


def validate_config(g: ExperimentGeometry) -> list[Condition]:
    """Check the six locality conditions of a loophole-free layout.

    Spacelike requirements are strict: a lightlike pair fails them.
    """
    return [
        _spacelike(g, "measurements spacelike", ("M_A", "M_B")),
        _spacelike(g, "Alice choice spacelike to Bob measurement", ("C_A", "M_B")),
        _spacelike(g, "Bob choice spacelike to Alice measurement", ("C_B", "M_A")),
        _spacelike(g, "choices spacelike to emission", ("C_A", "E_S"), ("C_B", "E_S")),
        _spacelike(g, "choices spacelike to each other", ("C_A", "C_B")),
        _past(g, "emission and local choice precede each measurement",
              ("E_S", "M_A"), ("C_A", "M_A"), ("E_S", "M_B"), ("C_B", "M_B")),
    ]
