"""Token sequences, edit spans, and edit application.

Edits are expressed in source-token coordinates and applied simultaneously,
so removing one edit from a set never shifts the spans of the others.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NotFoundError, OutOfRangeError, OverlapError

TokenSeq = tuple[str, ...]


def tokenize(text: str) -> TokenSeq:
    """Split on runs of whitespace. Empty text yields an empty sequence."""
    return tuple(text.split())


def detokenize(tokens: TokenSeq) -> str:
    """Single-space join; inverse of tokenize for already-tokenized text."""
    return " ".join(tokens)


@dataclass(frozen=True, order=True)
class Edit:
    """One correction: replace source tokens [start, end) with `replacement`.

    start == end is a pure insertion. A span that deletes nothing and inserts
    nothing is a no-op and is rejected.
    """

    start: int
    end: int
    replacement: tuple[str, ...]
    type_label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise OutOfRangeError(f"bad span [{self.start}, {self.end})")
        if self.start == self.end and not self.replacement:
            raise OverlapError(f"no-op edit at index {self.start}")
        if isinstance(self.replacement, list):
            object.__setattr__(self, "replacement", tuple(self.replacement))

    def descriptor(self) -> str:
        return f"{self.start}:{self.end}:{' '.join(self.replacement)}"

    def __repr__(self):
        return f"[{self.start}, {self.end}, {' '.join(self.replacement)!r}]"


@dataclass(frozen=True)
class EditSet:
    """Edits sorted by span, pairwise non-overlapping."""

    edits: tuple[Edit, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.edits, key=lambda e: (e.start, e.end)))
        object.__setattr__(self, "edits", ordered)
        for prev, nxt in zip(ordered, ordered[1:]):
            if nxt.start < prev.end:
                raise OverlapError(f"edits overlap: {prev} and {nxt}")
            if prev.start == prev.end == nxt.start == nxt.end:
                raise OverlapError(f"two insertions at index {prev.start}")

    def __len__(self):
        return len(self.edits)

    def __iter__(self):
        return iter(self.edits)

    def __contains__(self, edit: Edit):
        return edit in self.edits

    def without(self, omit: Edit) -> "EditSet":
        if omit not in self.edits:
            raise NotFoundError(f"edit {omit} not in set")
        return EditSet(tuple(e for e in self.edits if e != omit))

    @staticmethod
    def of(*edits: Edit) -> "EditSet":
        return EditSet(tuple(edits))


def apply_edits(src: TokenSeq, edits: EditSet) -> TokenSeq:
    """Replace every edit span simultaneously in source coordinates."""
    out: list[str] = []
    cursor = 0
    for e in edits:
        if e.end > len(src):
            raise OutOfRangeError(f"edit {e} exceeds source length {len(src)}")
        out.extend(src[cursor:e.start])
        out.extend(e.replacement)
        cursor = e.end
    out.extend(src[cursor:])
    return tuple(out)


def apply_edits_excluding(src: TokenSeq, edits: EditSet, omit: Edit) -> TokenSeq:
    """Apply every edit except `omit` (must be a member of `edits`)."""
    return apply_edits(src, edits.without(omit))
