"""The (time-unit x source) grid of messages and its slices."""
from __future__ import annotations

from collections import Counter
from typing import Iterator, Optional, Sequence

from .errors import DuplicateMessageError, UnknownSourceError
from .schema import Message


class Grid:
    """Messages indexed by (time, source). Immutable once built."""

    def __init__(self, cells: dict, sources: tuple):
        self._cells = {k: tuple(v) for k, v in cells.items()}
        self.sources = tuple(sources)
        self._source_rank = {s: i for i, s in enumerate(self.sources)}
        times = [t for t, _ in self._cells]
        self.time_range = (min(times), max(times)) if times else None

    @property
    def cells(self) -> dict:
        return dict(self._cells)

    def cell(self, time: int, source: str) -> tuple:
        return self._cells.get((time, source), ())

    def source_rank(self, source: str) -> int:
        try:
            return self._source_rank[source]
        except KeyError:
            raise UnknownSourceError(f"unknown source {source!r}") from None

    @property
    def times(self) -> list:
        return sorted({t for t, _ in self._cells})

    def messages(self) -> Iterator[Message]:
        """All messages ordered by time, source order, then cell order."""
        for key in sorted(self._cells, key=lambda k: (k[0], self._source_rank[k[1]])):
            yield from self._cells[key]

    def __len__(self):
        return sum(len(v) for v in self._cells.values())

    def __iter__(self):
        return self.messages()

    def to_dict(self) -> dict:
        return {
            "sources": list(self.sources),
            "time_range": list(self.time_range) if self.time_range else None,
            "cells": [
                {"time": t, "source": s, "messages": [m.to_dict() for m in self._cells[(t, s)]]}
                for t, s in sorted(self._cells, key=lambda k: (k[0], self._source_rank[k[1]]))
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Grid":
        msgs = [Message.from_dict(m) for c in d["cells"] for m in c["messages"]]
        return build_grid(msgs, sources=d["sources"], include_partial=True)


def _cell_order(m: Message):
    return (m.provenance, m.sort_key())


def build_grid(messages: Sequence[Message], sources: Optional[Sequence[str]] = None,
               include_partial: bool = False) -> Grid:
    """Place each message in the cell given by its own time and source.

    `sources` fixes the source order (normally the corpus manifest order);
    without it sources are ordered by name. Partial messages are skipped
    unless `include_partial` is set.
    """
    kept = [m for m in messages if include_partial or not m.partial]
    dupes = [m for m, n in Counter(kept).items() if n > 1]
    if dupes:
        raise DuplicateMessageError(f"message placed twice: {dupes[0]!r}")
    present = {m.source for m in kept}
    if sources is None:
        sources = sorted(present)
    else:
        sources = list(dict.fromkeys(sources))
        missing = present - set(sources)
        if missing:
            raise UnknownSourceError(f"messages from undeclared sources {sorted(missing)}")
    cells: dict = {}
    for m in sorted(kept, key=_cell_order):
        cells.setdefault((m.time, m.source), []).append(m)
    return Grid(cells, tuple(sources))


def horizontal_slice(grid: Grid, t: int) -> dict:
    """source -> messages at time `t`, in source order; empty if none."""
    return {s: grid.cell(t, s) for s in grid.sources if grid.cell(t, s)}


def vertical_slice(grid: Grid, source: str) -> dict:
    """time -> messages reported by `source`, in time order."""
    grid.source_rank(source)
    return {t: grid.cell(t, source) for t in grid.times if grid.cell(t, source)}
