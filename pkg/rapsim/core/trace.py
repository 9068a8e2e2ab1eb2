"""
Per-run message trace.

One line per radio transmission: ``round,sender,receiver,kind,message_id,hop``
where receiver ``*`` marks a broadcast.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Union

BROADCAST = "*"


@dataclass(frozen=True)
class TraceEvent:
    round: int
    sender: str
    receiver: str
    kind: str
    message_id: str
    hop: int

    def to_line(self) -> str:
        return f"{self.round},{self.sender},{self.receiver},{self.kind},{self.message_id},{self.hop}"

    @classmethod
    def from_line(cls, line: str) -> "TraceEvent":
        rnd, sender, receiver, kind, message_id, hop = line.strip().split(",")
        return cls(int(rnd), sender, receiver, kind, message_id, int(hop))


class MessageTrace:
    """Collects transmissions in the order they happen."""

    def __init__(self):
        self.events: List[TraceEvent] = []

    def record(self, round: int, sender: str, receiver: str, kind: str, message_id: str, hop: int):
        self.events.append(TraceEvent(round, sender, receiver, kind, message_id, hop))

    def broadcasts(self, message_id: str) -> List[TraceEvent]:
        return [e for e in self.events if e.message_id == message_id and e.receiver == BROADCAST]

    def lines(self) -> List[str]:
        return [e.to_line() for e in self.events]

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(line + "\n" for line in self.lines()))
        return path

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[TraceEvent]:
        return iter(self.events)


def method_trace_path(path: Union[str, Path], method: str) -> Path:
    """``trace.txt`` -> ``trace.dd.txt``; every file holds the runs of one method."""
    path = Path(path)
    return path.with_name(f"{path.stem}.{method.lower()}{path.suffix}")
