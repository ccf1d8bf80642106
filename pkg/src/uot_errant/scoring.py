"""Sentence scoring: transport-plan decomposition into TP/FP/FN and P/R/F.

Two scorers share the same degenerate-case and multi-reference rules:
the soft transport-based scorer and the hard exact-overlap baseline.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .editvec import (
    CostMode,
    MassMode,
    Vectorization,
    cost_matrix,
    edit_vectors,
    masses,
)
from .errors import ShapeMismatchError
from .textspan import EditSet, TokenSeq
from .edit_extract import extract_edits
from .uot import TransportPlan, UotConfig, solve_uot


class DegenerateCase(enum.Enum):
    BOTH_EMPTY = "BothEmpty"
    HYP_EMPTY = "HypEmpty"
    REF_EMPTY = "RefEmpty"


@dataclass
class SentenceScore:
    tp: float
    fp: float
    fn: float
    precision: float
    recall: float
    f_beta: float
    chosen_ref: int = 0
    plan: TransportPlan | None = None
    degenerate_case: DegenerateCase | None = None
    sum_a: float = 0.0
    sum_b: float = 0.0
    fp_raw: float = 0.0  # pre-clamp values; tp + fp_raw == sum_a by construction
    fn_raw: float = 0.0
    clamped: bool = False
    hyp_edits: EditSet | None = None
    ref_edits: EditSet | None = None


@dataclass
class ScoreConfig:
    provider: object = None
    vectorization: Vectorization = Vectorization.REMOVE
    mass_mode: MassMode = MassMode.L2_NORM
    cost_mode: CostMode = CostMode.EUCLIDEAN
    uot: UotConfig = field(default_factory=UotConfig)
    beta: float = 0.5


def decompose(
    plan: TransportPlan, a: np.ndarray, b: np.ndarray
) -> tuple[float, float, float]:
    """Split a plan into transported (TP) and stranded (FP/FN) mass."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if plan.T.shape != (len(a), len(b)):
        raise ShapeMismatchError(
            f"plan shape {plan.T.shape} != ({len(a)}, {len(b)})")
    tp = float(plan.T.sum())
    fp = max(float(a.sum()) - tp, 0.0)
    fn = max(float(b.sum()) - tp, 0.0)
    return tp, fp, fn


def prf(tp: float, fp: float, fn: float, beta: float = 0.5
        ) -> tuple[float, float, float]:
    """Precision, recall, F_beta with 0/0 := 1 conventions."""
    precision = 1.0 if tp + fp == 0.0 else tp / (tp + fp)
    recall = 1.0 if tp + fn == 0.0 else tp / (tp + fn)
    if precision == 0.0 and recall == 0.0:
        f = 0.0
    else:
        b2 = beta * beta
        f = (1.0 + b2) * precision * recall / (b2 * precision + recall)
    return precision, recall, f


def _degenerate(
    n_hyp: int, sum_a: float, n_ref: int, sum_b: float, ref_idx: int
) -> SentenceScore | None:
    if n_hyp == 0 and n_ref == 0:
        return SentenceScore(0.0, 0.0, 0.0, 1.0, 1.0, 1.0, ref_idx,
                             degenerate_case=DegenerateCase.BOTH_EMPTY)
    if n_hyp == 0:
        return SentenceScore(0.0, 0.0, sum_b, 1.0, 0.0, 0.0, ref_idx,
                             degenerate_case=DegenerateCase.HYP_EMPTY,
                             sum_b=sum_b, fn_raw=sum_b)
    if n_ref == 0:
        return SentenceScore(0.0, sum_a, 0.0, 0.0, 1.0, 0.0, ref_idx,
                             degenerate_case=DegenerateCase.REF_EMPTY,
                             sum_a=sum_a, fp_raw=sum_a)
    return None


def sentence_score_uot(
    src: TokenSeq,
    hyp: TokenSeq,
    refs: list[TokenSeq],
    cfg: ScoreConfig,
    hyp_edits: EditSet | None = None,
    ref_edits: list[EditSet] | None = None,
) -> SentenceScore:
    """Soft score via edit-vector transport; best reference wins.

    Pre-supplied edit sets (e.g. from M2 files) override internal extraction.
    """
    if not refs:
        raise ValueError("at least one reference is required")
    from .textspan import detokenize

    e_hyp = hyp_edits if hyp_edits is not None else extract_edits(
        detokenize(src), detokenize(hyp))
    hyp_vecs = edit_vectors(src, e_hyp, cfg.provider, cfg.vectorization)
    a = masses(hyp_vecs, cfg.mass_mode)

    best: SentenceScore | None = None
    for ridx, ref in enumerate(refs):
        if ref_edits is not None and ref_edits[ridx] is not None:
            e_ref = ref_edits[ridx]
        else:
            e_ref = extract_edits(detokenize(src), detokenize(ref))
        ref_vecs = edit_vectors(src, e_ref, cfg.provider, cfg.vectorization)
        b = masses(ref_vecs, cfg.mass_mode)

        score = _degenerate(len(e_hyp), float(a.sum()),
                            len(e_ref), float(b.sum()), ridx)
        if score is None:
            C = cost_matrix(hyp_vecs, ref_vecs, cfg.cost_mode)
            plan = solve_uot(a, b, C, cfg.uot)
            tp, fp, fn = decompose(plan, a, b)
            precision, recall, f = prf(tp, fp, fn, cfg.beta)
            sum_a, sum_b = float(a.sum()), float(b.sum())
            fp_raw, fn_raw = sum_a - tp, sum_b - tp
            score = SentenceScore(
                tp, fp, fn, precision, recall, f, ridx, plan=plan,
                sum_a=sum_a, sum_b=sum_b, fp_raw=fp_raw, fn_raw=fn_raw,
                clamped=(fp_raw < 0.0 or fn_raw < 0.0),
            )
        score.hyp_edits = e_hyp
        score.ref_edits = e_ref
        if best is None or score.f_beta > best.f_beta:
            best = score
    return best


def sentence_score_errant(
    src: TokenSeq,
    hyp: TokenSeq,
    refs: list[TokenSeq],
    beta: float = 0.5,
    hyp_edits: EditSet | None = None,
    ref_edits: list[EditSet] | None = None,
) -> SentenceScore:
    """Hard baseline: unit credit per exact (start, end, replacement) match."""
    if not refs:
        raise ValueError("at least one reference is required")
    from .textspan import detokenize

    e_hyp = hyp_edits if hyp_edits is not None else extract_edits(
        detokenize(src), detokenize(hyp))
    hyp_keys = {(e.start, e.end, e.replacement) for e in e_hyp}

    best: SentenceScore | None = None
    for ridx, ref in enumerate(refs):
        if ref_edits is not None and ref_edits[ridx] is not None:
            e_ref = ref_edits[ridx]
        else:
            e_ref = extract_edits(detokenize(src), detokenize(ref))
        score = _degenerate(len(e_hyp), float(len(e_hyp)),
                            len(e_ref), float(len(e_ref)), ridx)
        if score is None:
            ref_keys = {(e.start, e.end, e.replacement) for e in e_ref}
            tp = float(len(hyp_keys & ref_keys))
            fp = float(len(e_hyp)) - tp
            fn = float(len(e_ref)) - tp
            precision, recall, f = prf(tp, fp, fn, beta)
            score = SentenceScore(
                tp, fp, fn, precision, recall, f, ridx,
                sum_a=float(len(e_hyp)), sum_b=float(len(e_ref)),
                fp_raw=fp, fn_raw=fn,
            )
        score.hyp_edits = e_hyp
        score.ref_edits = e_ref
        if best is None or score.f_beta > best.f_beta:
            best = score
    return best


@dataclass
class CorpusReport:
    count: int
    mean_precision: float
    mean_recall: float
    mean_f: float
    degenerate_counts: dict[str, int]
    clamp_count: int
    nonconverged_count: int


def corpus_report(scores: list[SentenceScore]) -> CorpusReport:
    """Deterministic fold of sentence scores into corpus statistics."""
    degenerate = {c.value: 0 for c in DegenerateCase}
    clamps = 0
    nonconv = 0
    for s in scores:
        if s.degenerate_case is not None:
            degenerate[s.degenerate_case.value] += 1
        if s.clamped:
            clamps += 1
        if s.plan is not None and not s.plan.converged:
            nonconv += 1
    n = len(scores)
    mean = lambda xs: sum(xs) / n if n else 0.0  # noqa: E731
    return CorpusReport(
        count=n,
        mean_precision=mean([s.precision for s in scores]),
        mean_recall=mean([s.recall for s in scores]),
        mean_f=mean([s.f_beta for s in scores]),
        degenerate_counts=degenerate,
        clamp_count=clamps,
        nonconverged_count=nonconv,
    )
