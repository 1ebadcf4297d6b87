"""Task schemas: services, intents, slots, and the four-way slot taxonomy.

A schema file is a JSON array of service objects (``service_name``,
``description``, ``slots``, ``intents``).  Unknown fields are preserved on
load and written back out by :func:`serialize_schema`, so load/serialize is
an identity on the structured content.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import SchemaError, UsageError

# Sentinel candidates appended to every boolean/text candidate list.
DONTCARE = "dontcare"
UNKNOWN = "unknown"

_BOOLEAN_VALUES = {"True", "False"}


class SlotKind(Enum):
    """How a slot's value is produced.

    SPAN and NUMERICAL slots are answered by extracting a substring of the
    dialogue; BOOLEAN and TEXT slots are answered by ranking a fixed
    candidate list.
    """

    SPAN = "span"
    NUMERICAL = "numerical"
    BOOLEAN = "boolean"
    TEXT = "text"


@dataclass(frozen=True)
class SlotDef:
    name: str
    description: str
    is_categorical: bool = False
    possible_values: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class IntentDef:
    name: str
    description: str
    required_slots: tuple[str, ...] = ()
    optional_slots: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class ServiceDef:
    name: str
    description: str
    slots: tuple[SlotDef, ...] = ()
    intents: tuple[IntentDef, ...] = ()
    extra: dict = field(default_factory=dict, compare=False)

    def slot(self, name: str) -> SlotDef:
        for s in self.slots:
            if s.name == name:
                return s
        raise UsageError(f"service {self.name!r} has no slot {name!r}")

    def slot_names(self) -> set[str]:
        return {s.name for s in self.slots}


@dataclass(frozen=True)
class Schema:
    services: tuple[ServiceDef, ...] = ()

    def service(self, name: str) -> ServiceDef:
        for svc in self.services:
            if svc.name == name:
                return svc
        raise UsageError(f"schema has no service {name!r}")

    def service_names(self) -> set[str]:
        return {svc.name for svc in self.services}


def classify_slot(slot: SlotDef) -> SlotKind:
    """Classify a slot into the four-way taxonomy.

    Non-categorical slots are SPAN.  A categorical slot whose values are all
    "True"/"False" (case-sensitive) is BOOLEAN; one whose values all parse as
    base-10 integers is NUMERICAL; anything else is TEXT.  Total and
    deterministic.
    """
    if not slot.is_categorical:
        return SlotKind.SPAN
    values = slot.possible_values
    if values and set(values) <= _BOOLEAN_VALUES:
        return SlotKind.BOOLEAN
    if values and all(_is_int(v) for v in values):
        return SlotKind.NUMERICAL
    return SlotKind.TEXT


def _is_int(value: str) -> bool:
    try:
        int(value.strip())
    except ValueError:
        return False
    return True


def natural_name(name: str) -> str:
    """Readable words for a schema identifier: "FindBus" and "leaving_date"
    become "find bus" and "leaving date"."""
    spaced = re.sub(r"(?<=[a-z0-9])(?=[A-Z])", " ", name.replace("_", " "))
    return " ".join(spaced.lower().split())


def candidate_values(slot: SlotDef) -> list[str]:
    """Candidate list for a boolean/text slot: schema values plus sentinels.

    "dontcare" and "unknown" are appended (in that order) unless already
    present; the schema's ordering is preserved.  Span and numerical slots
    are answered by span extraction and have no candidate list.
    """
    kind = classify_slot(slot)
    if kind not in (SlotKind.BOOLEAN, SlotKind.TEXT):
        raise UsageError(
            f"slot {slot.name!r} is {kind.value}; candidate lists exist only "
            "for boolean and text slots"
        )
    out = list(slot.possible_values)
    for sentinel in (DONTCARE, UNKNOWN):
        if sentinel not in out:
            out.append(sentinel)
    return out


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaError(message)


def _parse_slot(raw: dict, service_name: str) -> SlotDef:
    known = {"name", "description", "is_categorical", "possible_values"}
    name = raw.get("name")
    _require(isinstance(name, str) and name != "", f"service {service_name!r}: slot without a name")
    values = tuple(raw.get("possible_values") or ())
    is_cat = bool(raw.get("is_categorical", False))
    _require(
        not (is_cat and not values),
        f"service {service_name!r}, slot {name!r}: categorical slot with empty possible_values",
    )
    _require(
        not (not is_cat and values),
        f"service {service_name!r}, slot {name!r}: non-categorical slot with possible_values",
    )
    return SlotDef(
        name=name,
        description=raw.get("description", ""),
        is_categorical=is_cat,
        possible_values=values,
        extra={k: v for k, v in raw.items() if k not in known},
    )


def _parse_intent(raw: dict, service_name: str, slot_names: set[str]) -> IntentDef:
    known = {"name", "description", "required_slots", "optional_slots"}
    name = raw.get("name")
    _require(isinstance(name, str) and name != "", f"service {service_name!r}: intent without a name")
    required = tuple(raw.get("required_slots") or ())
    optional_raw = raw.get("optional_slots") or ()
    # Some files carry optional slots as {name: default}; keep the names.
    optional = tuple(optional_raw if not isinstance(optional_raw, dict) else optional_raw.keys())
    for ref in (*required, *optional):
        _require(
            ref in slot_names,
            f"service {service_name!r}, intent {name!r}: references undefined slot {ref!r}",
        )
    overlap = set(required) & set(optional)
    _require(
        not overlap,
        f"service {service_name!r}, intent {name!r}: slots {sorted(overlap)} are both required and optional",
    )
    return IntentDef(
        name=name,
        description=raw.get("description", ""),
        required_slots=required,
        optional_slots=optional,
        extra={k: v for k, v in raw.items() if k not in known},
    )


def _parse_service(raw: dict) -> ServiceDef:
    known = {"service_name", "description", "slots", "intents"}
    name = raw.get("service_name")
    _require(isinstance(name, str) and name != "", "service object without a service_name")
    slots = tuple(_parse_slot(s, name) for s in raw.get("slots", ()))
    slot_names = [s.name for s in slots]
    _require(
        len(slot_names) == len(set(slot_names)),
        f"service {name!r}: duplicate slot names",
    )
    intents = tuple(_parse_intent(i, name, set(slot_names)) for i in raw.get("intents", ()))
    intent_names = [i.name for i in intents]
    _require(
        len(intent_names) == len(set(intent_names)),
        f"service {name!r}: duplicate intent names",
    )
    return ServiceDef(
        name=name,
        description=raw.get("description", ""),
        slots=slots,
        intents=intents,
        extra={k: v for k, v in raw.items() if k not in known},
    )


def parse_schema(raw: list) -> Schema:
    """Validate an already-decoded schema document."""
    if not isinstance(raw, list):
        raise SchemaError("schema document must be a JSON array of service objects")
    services = tuple(_parse_service(svc) for svc in raw)
    names = [svc.name for svc in services]
    _require(len(names) == len(set(names)), "duplicate service names in schema")
    return Schema(services=services)


def load_schema(path: str | Path) -> Schema:
    """Load and validate a schema file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read schema file {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_schema(raw)


def schema_to_raw(schema: Schema) -> list:
    """Inverse of :func:`parse_schema`, unknown fields included."""
    out = []
    for svc in schema.services:
        out.append(
            {
                "service_name": svc.name,
                "description": svc.description,
                "slots": [
                    {
                        "name": s.name,
                        "description": s.description,
                        "is_categorical": s.is_categorical,
                        "possible_values": list(s.possible_values),
                        **s.extra,
                    }
                    for s in svc.slots
                ],
                "intents": [
                    {
                        "name": i.name,
                        "description": i.description,
                        "required_slots": list(i.required_slots),
                        "optional_slots": list(i.optional_slots),
                        **i.extra,
                    }
                    for i in svc.intents
                ],
                **svc.extra,
            }
        )
    return out


def serialize_schema(schema: Schema, path: str | Path) -> None:
    Path(path).write_text(json.dumps(schema_to_raw(schema), indent=2) + "\n", encoding="utf-8")
