"""Edit extraction from sentence pairs via token-level alignment.

A Damerau-Levenshtein alignment over tokens (with a character-similarity
term on substitutions and adjacent-block transpositions) is merged into
span edits. External M2 files can replace the built-in extractor when
richer edits or type labels are wanted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ParseError
from .textspan import Edit, EditSet, TokenSeq, tokenize

MAX_TRANSPOSE = 4  # longest token block considered for a transposition


class OpKind(enum.Enum):
    MATCH = "M"
    SUB = "S"
    INS = "I"
    DEL = "D"
    TRANSPOSE = "T"


@dataclass(frozen=True)
class AlignmentOp:
    kind: OpKind
    src_span: tuple[int, int]
    tgt_span: tuple[int, int]


def _lcs_len(a: str, b: str) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for ca in a:
        cur = [0]
        for j, cb in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if ca == cb else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def _sub_cost(s: str, t: str) -> float:
    if s == t:
        return 0.0
    if s.lower() == t.lower():
        return 1.0
    sim = 2.0 * _lcs_len(s, t) / (len(s) + len(t))
    return 2.0 - 0.5 * sim


def align(src: TokenSeq, tgt: TokenSeq) -> list[AlignmentOp]:
    """Minimal-cost token alignment path between src and tgt.

    Costs: Match 0; Ins/Del 1; Sub 1 for case-only changes, otherwise
    2 - 0.5 * (LCS character similarity); adjacent k-token transposition
    (equal multisets) 1.
    """
    n, m = len(src), len(tgt)
    INF = float("inf")
    cost = [[INF] * (m + 1) for _ in range(n + 1)]
    back: list[list[tuple[OpKind, int, int] | None]] = [
        [None] * (m + 1) for _ in range(n + 1)
    ]
    cost[0][0] = 0.0
    for i in range(n + 1):
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            best = INF
            choice: tuple[OpKind, int, int] | None = None
            if i > 0 and j > 0:
                # diagonal first: equal-cost ties resolve to Match/Sub
                best = cost[i - 1][j - 1] + _sub_cost(src[i - 1], tgt[j - 1])
                kind = OpKind.MATCH if src[i - 1] == tgt[j - 1] else OpKind.SUB
                choice = (kind, 1, 1)
            if i > 0 and cost[i - 1][j] + 1.0 < best:
                best = cost[i - 1][j] + 1.0
                choice = (OpKind.DEL, 1, 0)
            if j > 0 and cost[i][j - 1] + 1.0 < best:
                best = cost[i][j - 1] + 1.0
                choice = (OpKind.INS, 0, 1)
            if i > 0 and j > 0:
                for k in range(2, min(i, j, MAX_TRANSPOSE) + 1):
                    s_block = src[i - k:i]
                    t_block = tgt[j - k:j]
                    if s_block != t_block and sorted(s_block) == sorted(t_block):
                        if cost[i - k][j - k] + 1.0 < best:
                            best = cost[i - k][j - k] + 1.0
                            choice = (OpKind.TRANSPOSE, k, k)
            cost[i][j] = best
            back[i][j] = choice
    ops: list[AlignmentOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        kind, di, dj = back[i][j]  # type: ignore[misc]
        ops.append(AlignmentOp(kind, (i - di, i), (j - dj, j)))
        i -= di
        j -= dj
    ops.reverse()
    return ops


def merge_ops(ops: list[AlignmentOp], tgt: TokenSeq) -> EditSet:
    """Collapse maximal runs of non-Match ops into single span edits."""
    edits: list[Edit] = []
    run_start: tuple[int, int] | None = None
    run_end: tuple[int, int] = (0, 0)
    for op in ops:
        if op.kind is OpKind.MATCH:
            if run_start is not None:
                edits.append(
                    Edit(run_start[0], run_end[0], tgt[run_start[1]:run_end[1]])
                )
                run_start = None
        else:
            if run_start is None:
                run_start = (op.src_span[0], op.tgt_span[0])
            run_end = (op.src_span[1], op.tgt_span[1])
    if run_start is not None:
        edits.append(Edit(run_start[0], run_end[0], tgt[run_start[1]:run_end[1]]))
    return EditSet(tuple(edits))


def extract_edits(src_text: str, cor_text: str) -> EditSet:
    """Extract the edit set turning src_text into cor_text.

    Guarantee: apply_edits(tokenize(src_text), result) == tokenize(cor_text).
    """
    src = tokenize(src_text)
    tgt = tokenize(cor_text)
    return merge_ops(align(src, tgt), tgt)


def _is_punct_token(tok: str) -> bool:
    return len(tok) > 0 and all(not ch.isalnum() for ch in tok)


def classify_coarse(edit: Edit, src: TokenSeq) -> str:
    """Heuristic error type: ORTH (case/spacing only), PUNCT, or OTHER."""
    span = src[edit.start:edit.end]
    src_norm = "".join(span).lower().replace(" ", "")
    rep_norm = "".join(edit.replacement).lower().replace(" ", "")
    if src_norm == rep_norm and (span or edit.replacement):
        return "ORTH"
    affected = list(span) + list(edit.replacement)
    if affected and all(_is_punct_token(t) for t in affected):
        return "PUNCT"
    return "OTHER"


@dataclass(frozen=True)
class M2Sentence:
    source: TokenSeq
    annotations: dict[int, EditSet]


def parse_m2(path: str) -> list[M2Sentence]:
    """Parse an M2 file into per-sentence, per-annotator edit sets.

    Type labels ride on Edit.type_label; a noop record yields an annotator
    with an empty EditSet.
    """
    sentences: list[M2Sentence] = []
    source: TokenSeq | None = None
    pending: dict[int, list[Edit]] = {}

    def close():
        nonlocal source, pending
        if source is None:
            return
        annotations = {aid: EditSet(tuple(edits)) for aid, edits in pending.items()}
        sentences.append(M2Sentence(source, annotations))
        source, pending = None, {}

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                close()
                continue
            if line == "S" or line.startswith("S "):
                if source is not None:
                    close()
                source = tuple(line[2:].split())
            elif line.startswith("A "):
                if source is None:
                    raise ParseError("A line before S line", lineno)
                fields = line[2:].split("|||")
                if len(fields) < 6:
                    raise ParseError(
                        f"expected 6 '|||' fields, got {len(fields)}", lineno)
                span, etype, repl = fields[0], fields[1], fields[2]
                try:
                    start_s, end_s = span.split()
                    start, end = int(start_s), int(end_s)
                    annotator = int(fields[5])
                except ValueError as exc:
                    raise ParseError(str(exc), lineno) from exc
                pending.setdefault(annotator, [])
                if etype == "noop" or (start == -1 and end == -1):
                    continue
                replacement = () if repl == "-NONE-" else tuple(repl.split())
                try:
                    edit = Edit(start, end, replacement, type_label=etype)
                except Exception as exc:
                    raise ParseError(str(exc), lineno) from exc
                pending[annotator].append(edit)
            else:
                raise ParseError(f"unrecognized line: {line!r}", lineno)
    close()
    return sentences


def format_m2(sentences: list[M2Sentence]) -> str:
    """Render sentences in M2 format (LF newlines)."""
    lines: list[str] = []
    for sent in sentences:
        lines.append("S " + " ".join(sent.source))
        for aid in sorted(sent.annotations):
            edits = sent.annotations[aid]
            if len(edits) == 0:
                lines.append(f"A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||{aid}")
                continue
            for e in edits:
                repl = " ".join(e.replacement) if e.replacement else "-NONE-"
                etype = e.type_label or "UNK"
                lines.append(
                    f"A {e.start} {e.end}|||{etype}|||{repl}"
                    f"|||REQUIRED|||-NONE-|||{aid}"
                )
        lines.append("")
    return "\n".join(lines) + "\n" if lines else ""


def write_m2(sentences: list[M2Sentence], path: str) -> None:
    """Write sentences back out in M2 format (UTF-8, LF)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_m2(sentences))
