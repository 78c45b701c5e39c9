"""JSON instance files and CSV formatting.

Floats are written with Python's shortest round-trip repr, so
``load_instance(dump_instance(h))`` reproduces every binary64 bit.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .instance import HardInstance
from .model import STAR, ClassParams, Schedule, ScheduleKind, Triplet, TripletSet


class InstanceFormatError(ValueError):
    pass


def fmt(x) -> str:
    """17 significant digits, '.' separator, empty for None."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return "%.17g" % float(x)


def instance_to_dict(h: HardInstance) -> dict:
    p = h.params
    s = h.schedule
    trips = []
    for label, t in zip(h.triplets.labels, h.triplets.all()):
        trips.append({"label": label, "x": [float(v) for v in t.x], "g": [float(v) for v in t.g], "f": float(t.f)})
    return {
        "params": {"mu": p.mu, "L": p.L, "R_x": p.R_x},
        "schedule": {"kind": s.kind.value, "gamma": [float(v) for v in s.gamma], "delta": [float(v) for v in s.delta]},
        "triplets": trips,
        "dim": h.dim,
    }


def dumps_instance(h: HardInstance) -> str:
    return json.dumps(instance_to_dict(h), indent=1, allow_nan=False)


def save_instance(h: HardInstance, path) -> None:
    Path(path).write_text(dumps_instance(h) + "\n")


def _num(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InstanceFormatError(f"{where}: expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise InstanceFormatError(f"{where}: non-finite value")
    return v


def _vec(v, where: str) -> list[float]:
    if not isinstance(v, list):
        raise InstanceFormatError(f"{where}: expected an array")
    return [_num(a, f"{where}[{i}]") for i, a in enumerate(v)]


def instance_from_dict(doc: dict) -> HardInstance:
    try:
        p = doc["params"]
        params = ClassParams(_num(p["mu"], "params.mu"), _num(p["L"], "params.L"), _num(p["R_x"], "params.R_x"))
        s = doc["schedule"]
        sched = Schedule(_vec(s["gamma"], "schedule.gamma"), _vec(s["delta"], "schedule.delta"), params,
                         ScheduleKind(s.get("kind", "custom")))
        entries: dict = {}
        star = None
        for n, t in enumerate(doc["triplets"]):
            where = f"triplets[{n}]"
            trip = Triplet(_vec(t["x"], where + ".x"), _vec(t["g"], where + ".g"), _num(t["f"], where + ".f"))
            label = t["label"]
            if label == STAR:
                if star is not None:
                    raise InstanceFormatError("label '*' appears more than once")
                star = trip
            elif isinstance(label, int) and not isinstance(label, bool):
                if label in entries:
                    raise InstanceFormatError(f"label {label} appears more than once")
                entries[label] = trip
            else:
                raise InstanceFormatError(f"{where}: bad label {label!r}")
        if star is None:
            raise InstanceFormatError("no '*' triplet")
        if sorted(entries) != list(range(len(entries))):
            raise InstanceFormatError("numbered labels must be 0..N without gaps")
        tset = TripletSet(tuple(entries[k] for k in range(len(entries))), star)
        if "dim" in doc and int(doc["dim"]) != tset.dim:
            raise InstanceFormatError(f"dim {doc['dim']} does not match vector length {tset.dim}")
        if sched.N != tset.N:
            raise InstanceFormatError("schedule length does not match the number of triplets")
    except KeyError as e:
        raise InstanceFormatError(f"missing key {e}") from None
    except (TypeError, ValueError) as e:
        if isinstance(e, InstanceFormatError):
            raise
        raise InstanceFormatError(str(e)) from None
    return HardInstance(tset, sched)


def loads_instance(text: str) -> HardInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        lines = text.splitlines()
        ctx = lines[e.lineno - 1] if 0 < e.lineno <= len(lines) else ""
        raise InstanceFormatError(f"line {e.lineno} column {e.colno}: {e.msg}\n  {ctx}") from None
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level must be a JSON object")
    return instance_from_dict(doc)


def load_instance(path) -> HardInstance:
    return loads_instance(Path(path).read_text())
