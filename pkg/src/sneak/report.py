"""Messages, transcripts and run reports shared by both dissemination schemes."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import node_name
from .numeric import to_json

KINDS = ("dealer_data", "relay", "fallback_chunk")


@dataclass(frozen=True)
class Message:
    tick: int
    src: int
    dst: int
    payload: tuple
    kind: str

    @property
    def size(self) -> int:
        return len(self.payload)


@dataclass
class RunReport:
    algorithm: str
    params: dict
    secret_length: int
    total_field_elements: int
    per_node_elements: dict
    randomness_draws: int
    delivered: frozenset
    stalled: frozenset
    failed: frozenset = frozenset()
    fallback_log: list = field(default_factory=list)
    control_messages: int = 0
    extras: dict = field(default_factory=dict)
    # simulation internals, not serialized
    transcript: list = field(default_factory=list, repr=False)
    shares: dict = field(default_factory=dict, repr=False)
    node_data: dict = field(default_factory=dict, repr=False)
    draws_by_owner: dict = field(default_factory=dict, repr=False)

    @property
    def total_units(self) -> Fraction:
        return Fraction(self.total_field_elements, self.secret_length)

    @property
    def per_node_download(self) -> dict:
        return {v: Fraction(e, self.secret_length) for v, e in self.per_node_elements.items()}

    @property
    def randomness_units(self) -> Fraction:
        return Fraction(self.randomness_draws, self.secret_length)

    @property
    def message_count(self) -> int:
        return len(self.transcript)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "params": self.params,
            "secret_length": self.secret_length,
            "total_field_elements": self.total_field_elements,
            "total_units": to_json(self.total_units),
            "per_node_download": {str(v): to_json(u)
                                  for v, u in sorted(self.per_node_download.items())},
            "randomness_draws": self.randomness_draws,
            "randomness_units": to_json(self.randomness_units),
            "delivered": sorted(self.delivered),
            "stalled": sorted(self.stalled),
            "failed": sorted(self.failed),
            "fallback_log": self.fallback_log,
            "message_count": self.message_count,
            "control_messages": self.control_messages,
            "extras": {k: to_json(v) for k, v in sorted(self.extras.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def transcript_csv(messages) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tick", "src", "dst", "payload_len", "kind"])
    for m in messages:
        w.writerow([m.tick, node_name(m.src), node_name(m.dst), m.size, m.kind])
    return buf.getvalue()


def download_counts(messages, participants) -> dict:
    out = {v: 0 for v in participants}
    for m in messages:
        if m.dst in out:
            out[m.dst] += m.size
    return out
