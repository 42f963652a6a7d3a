"""File formats: network documents, trace JSONL, report CSVs.

The network document is strict UTF-8 JSON with unit-suffixed field names
(energy_ev, distance_m, period_s); unknown fields are rejected so unit
mistakes cannot hide in ignored keys. Traces are JSONL, one event per
line in trace order. Timelines and entropy reports are CSV with a header
row. All numeric output uses Python's shortest round-trip float
representation, so emitted files re-parse to identical values.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, IO, Iterable

from .chronology import Timeline
from .engine import EventKind, EventTrace, SimEvent
from .errors import ParseError, ValidationFailed
from .network import (
    Arc,
    ClockNode,
    Network,
    NodeId,
    StandardClockSpec,
    validate_network,
)
from .quantum import EnergyLevel, TwoLevelSpec

SCHEMA_VERSION = "1"

TIMELINE_COLUMNS = ("event_id", "node", "pulse_id", "label", "time_number_s")
ENTROPY_COLUMNS = (
    "event_id",
    "ds_internal",
    "ds_signal",
    "ds_vacuum",
    "total",
    "production_rate",
    "lifetime_s",
)

_MAX_ID = 2**64 - 1


@dataclass(frozen=True)
class Injection:
    """One external excitation request: node and engine time."""

    node: NodeId
    at_s: float


@dataclass(frozen=True)
class NetworkDocument:
    """Parsed and validated network description."""

    schema_version: str
    network: Network
    injections: tuple[Injection, ...]

    @property
    def nodes(self) -> tuple[ClockNode, ...]:
        return self.network.nodes

    @property
    def arcs(self) -> tuple[Arc, ...]:
        return self.network.arcs

    @property
    def standard_clocks(self) -> tuple[StandardClockSpec, ...]:
        return self.network.clocks


# -- network document parsing ------------------------------------------


class _Fields:
    """One JSON object with strict field accounting."""

    def __init__(self, obj: Any, where: str):
        if not isinstance(obj, dict):
            raise ParseError(f"expected an object, got {type(obj).__name__}", where)
        self.obj = obj
        self.where = where
        self.seen: set[str] = set()

    def take(self, name: str, kind: str, required: bool = True, default: Any = None) -> Any:
        self.seen.add(name)
        if name not in self.obj:
            if required:
                raise ParseError(f"missing required field {name!r}", self.where)
            return default
        value = self.obj[name]
        if kind == "id":
            if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= _MAX_ID:
                raise ParseError(f"field {name!r} must be an unsigned 64-bit integer", self.where)
        elif kind == "int":
            if not isinstance(value, int) or isinstance(value, bool):
                raise ParseError(f"field {name!r} must be an integer", self.where)
        elif kind == "number":
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ParseError(f"field {name!r} must be a number", self.where)
            value = float(value)
            if not math.isfinite(value):
                raise ParseError(f"field {name!r} must be finite", self.where)
        elif kind == "bool":
            if not isinstance(value, bool):
                raise ParseError(f"field {name!r} must be a boolean", self.where)
        elif kind == "str":
            if not isinstance(value, str):
                raise ParseError(f"field {name!r} must be a string", self.where)
        elif kind == "list":
            if not isinstance(value, list):
                raise ParseError(f"field {name!r} must be an array", self.where)
        else:
            raise AssertionError(kind)
        return value

    def finish(self) -> None:
        unknown = set(self.obj) - self.seen
        if unknown:
            raise ParseError(f"unknown field(s): {', '.join(sorted(unknown))}", self.where)


def _reject_constant(text: str) -> float:
    raise ParseError(f"non-finite number literal {text!r} is not allowed", "document")


def _parse_position(value: Any, where: str) -> tuple[float, float, float]:
    if (
        not isinstance(value, list)
        or len(value) != 3
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
    ):
        raise ParseError("field 'position_m' must be an array of three numbers", where)
    return (float(value[0]), float(value[1]), float(value[2]))


def parse_network(data: bytes | str) -> NetworkDocument:
    """Parse and validate a network document.

    Raises ParseError for malformed JSON, wrong types, or unknown fields
    (with the offending JSON path), and ValidationFailed (with every
    problem found) when the parsed values violate network invariants.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"document is not UTF-8: {exc}", "document") from exc
    try:
        raw = json.loads(data, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from exc

    top = _Fields(raw, "document")
    version = top.take("schema_version", "str")
    if version != SCHEMA_VERSION:
        raise ParseError(f"unrecognized schema_version {version!r}", "document")
    raw_nodes = top.take("nodes", "list", required=False, default=[])
    raw_arcs = top.take("arcs", "list", required=False, default=[])
    raw_clocks = top.take("standard_clocks", "list", required=False, default=[])
    raw_injections = top.take("injections", "list", required=False, default=[])
    top.finish()

    problems: list[str] = []
    nodes: list[ClockNode] = []
    for i, obj in enumerate(raw_nodes):
        where = f"nodes[{i}]"
        f = _Fields(obj, where)
        node_id = f.take("id", "id")
        ground = f.take("ground_ev", "number")
        excited = f.take("excited_ev", "number")
        gamma = f.take("gamma_ev", "number", required=False)
        raw_pos = f.take("position_m", "list", required=False)
        position = _parse_position(raw_pos, where) if raw_pos is not None else (0.0, 0.0, 0.0)
        tolerance = f.take("resonance_tolerance_ev", "number", required=False)
        can_emit = f.take("can_emit", "bool", required=False, default=True)
        can_detect = f.take("can_detect", "bool", required=False, default=True)
        f.finish()
        try:
            nodes.append(
                ClockNode(
                    id=node_id,
                    spec=TwoLevelSpec(
                        ground=EnergyLevel("ground", ground),
                        excited=EnergyLevel("excited", excited),
                        gamma_ev=gamma,
                    ),
                    position_m=position,
                    resonance_tolerance_ev=tolerance,
                    can_emit=can_emit,
                    can_detect=can_detect,
                )
            )
        except Exception as exc:
            problems.append(f"{where}: {exc}")

    arcs: list[Arc] = []
    for i, obj in enumerate(raw_arcs):
        where = f"arcs[{i}]"
        f = _Fields(obj, where)
        arc_id = f.take("id", "id")
        source = f.take("source", "id")
        target = f.take("target", "id")
        distance = f.take("distance_m", "number")
        f.finish()
        try:
            arcs.append(Arc(id=arc_id, source=source, target=target, distance_m=distance))
        except Exception as exc:
            problems.append(f"{where}: {exc}")

    clocks: list[StandardClockSpec] = []
    for i, obj in enumerate(raw_clocks):
        where = f"standard_clocks[{i}]"
        f = _Fields(obj, where)
        clock_id = f.take("id", "id")
        period = f.take("period_s", "number")
        first_tick = f.take("first_tick_s", "number", required=False, default=0.0)
        counter_start = f.take("counter_start", "int", required=False, default=0)
        f.finish()
        if first_tick < 0:
            problems.append(f"{where}: first_tick_s must be >= 0")
            continue
        try:
            clocks.append(
                StandardClockSpec(
                    id=clock_id, period_s=period, first_tick_s=first_tick, counter_start=counter_start
                )
            )
        except Exception as exc:
            problems.append(f"{where}: {exc}")

    injections: list[Injection] = []
    node_ids = {n.id for n in nodes}
    for i, obj in enumerate(raw_injections):
        where = f"injections[{i}]"
        f = _Fields(obj, where)
        node = f.take("node", "id")
        at = f.take("at_s", "number")
        f.finish()
        if node not in node_ids:
            problems.append(f"{where}: unknown node {node}")
        if at < 0:
            problems.append(f"{where}: at_s must be >= 0")
        injections.append(Injection(node=node, at_s=at))

    try:
        network = validate_network(nodes, arcs, clocks)
    except ValidationFailed as exc:
        problems.extend(exc.problems)
        raise ValidationFailed(problems) from None
    if problems:
        raise ValidationFailed(problems)
    return NetworkDocument(
        schema_version=version, network=network, injections=tuple(injections)
    )


def parse_network_file(path: str | Path) -> NetworkDocument:
    return parse_network(Path(path).read_bytes())


# -- trace JSONL ---------------------------------------------------------

_BASE_KEYS = ("id", "kind", "node", "engine_time", "parents")


def event_to_record(event: SimEvent) -> dict[str, Any]:
    """Flatten one event: base fields first, then the payload fields."""
    record: dict[str, Any] = {
        "id": event.id,
        "kind": event.kind.value,
        "node": event.node,
        "engine_time": event.engine_time,
        "parents": sorted(event.parents),
    }
    record.update(event.payload)
    return record


def record_to_event(record: dict[str, Any], where: str = "record") -> SimEvent:
    if not isinstance(record, dict):
        raise ParseError("expected an object", where)
    missing = [k for k in _BASE_KEYS if k not in record]
    if missing:
        raise ParseError(f"missing field(s): {', '.join(missing)}", where)
    try:
        kind = EventKind(record["kind"])
    except ValueError:
        raise ParseError(f"unknown event kind {record['kind']!r}", where) from None
    event_id, node, t = record["id"], record["node"], record["engine_time"]
    parents = record["parents"]
    if not isinstance(event_id, int) or not isinstance(node, int):
        raise ParseError("'id' and 'node' must be integers", where)
    if isinstance(t, bool) or not isinstance(t, (int, float)):
        raise ParseError("'engine_time' must be a number", where)
    if not isinstance(parents, list) or not all(isinstance(p, int) for p in parents):
        raise ParseError("'parents' must be an array of integers", where)
    payload = {k: v for k, v in record.items() if k not in _BASE_KEYS}
    return SimEvent(
        id=event_id,
        kind=kind,
        node=node,
        engine_time=float(t),
        parents=frozenset(parents),
        payload=payload,
    )


def serialize_event(event: SimEvent) -> str:
    return json.dumps(event_to_record(event), separators=(",", ":"))


def parse_event_line(line: str, where: str = "line") -> SimEvent:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", where) from exc
    return record_to_event(record, where)


def serialize_trace(trace: Iterable[SimEvent]) -> str:
    return "".join(serialize_event(e) + "\n" for e in trace)


def parse_trace(text: str) -> EventTrace:
    events = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        events.append(parse_event_line(line, where=f"line {lineno}"))
    return tuple(events)


def write_trace(trace: Iterable[SimEvent], path: str | Path) -> None:
    Path(path).write_text(serialize_trace(trace), encoding="utf-8", newline="\n")


def read_trace(path: str | Path) -> EventTrace:
    return parse_trace(Path(path).read_text(encoding="utf-8"))


# -- CSV reports ---------------------------------------------------------


def _csv_writer(fp: IO[str]) -> Any:
    # Fixed line terminator so files are byte-identical across platforms.
    return csv.writer(fp, lineterminator="\n")


def write_timeline_csv(timeline: Timeline, trace: EventTrace, fp: IO[str]) -> int:
    """Write one row per time label; returns the row count."""
    node_of = {e.id: e.node for e in trace}
    writer = _csv_writer(fp)
    writer.writerow(TIMELINE_COLUMNS)
    for label in timeline.entries:
        writer.writerow(
            (
                label.event,
                node_of.get(label.event, ""),
                label.triplet.pulse,
                label.triplet.label,
                label.time_number_s,
            )
        )
    return len(timeline.entries)


def write_entropy_csv(trace: EventTrace, fp: IO[str]) -> int:
    """Write one row per decay, straight from the decay payloads."""
    writer = _csv_writer(fp)
    writer.writerow(ENTROPY_COLUMNS)
    rows = 0
    for event in trace:
        if event.kind is not EventKind.DECAY:
            continue
        p = event.payload
        writer.writerow(
            (
                event.id,
                p["ds_internal"],
                p["ds_signal"],
                p["ds_vacuum"],
                p["total"],
                p["production_rate"],
                p["lifetime_s"],
            )
        )
        rows += 1
    return rows
