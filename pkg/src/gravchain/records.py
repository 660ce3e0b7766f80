"""Per-tick metric rows and trace events produced by a run."""
from __future__ import annotations

from dataclasses import dataclass

TRACE_KINDS = ("flood_tx", "response", "transfer", "retire", "arrival")


@dataclass(frozen=True)
class MetricsRow:
    tick: int
    transferred: int = 0
    cost: float = 0.0
    unmet_deficit: int = 0
    messages: int = 0
    active_consumers: int = 0
    active_suppliers: int = 0
    clusters: int = 0


@dataclass(frozen=True)
class TraceEvent:
    tick: int
    kind: str
    src: str | None = None
    dst: str | None = None
    commodity: str | None = None
    qty: int | None = None
    msg_id: int | None = None
