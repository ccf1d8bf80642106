"""Meta-evaluation: pairwise comparisons, ratings, and correlations.

Sentence-level F scores from several systems are turned into pairwise
win/loss/tie records, aggregated into system ratings (two-player TrueSkill
or Expected Wins), and correlated with human judgments.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .errors import CoverageError, DegenerateInputError

_NORMAL = NormalDist()


class Outcome(enum.Enum):
    A_WINS = "a"
    B_WINS = "b"
    TIE = "tie"


@dataclass(frozen=True)
class Comparison:
    sentence_id: int | str
    system_a: str
    system_b: str
    outcome: Outcome


@dataclass
class SystemRating:
    system: str
    mu: float
    sigma: float

    @property
    def conservative(self) -> float:
        return self.mu - 3.0 * self.sigma


@dataclass(frozen=True)
class TrueSkillParams:
    mu0: float = 25.0
    sigma0: float = 25.0 / 3.0
    beta_skill: float = 25.0 / 6.0  # sigma0 / 2
    tau: float = 25.0 / 300.0       # sigma0 / 100
    draw_probability: float = 0.10
    shuffle_seed: int = 0

    def __post_init__(self):
        if min(self.mu0, self.sigma0, self.beta_skill, self.tau) <= 0:
            raise ValueError("TrueSkill parameters must be positive")
        if not 0.0 < self.draw_probability < 1.0:
            raise ValueError("draw_probability must be in (0, 1)")


def pairwise_outcomes(
    scores: dict[str, dict[int | str, float]], tie_epsilon: float = 1e-9
) -> list[Comparison]:
    """One Comparison per sentence per unordered system pair."""
    systems = sorted(scores)
    if len(systems) < 2:
        raise CoverageError("need at least two systems")
    sentence_ids = set(scores[systems[0]])
    for sysid in systems[1:]:
        if set(scores[sysid]) != sentence_ids:
            raise CoverageError(
                f"system {sysid!r} covers different sentences than {systems[0]!r}")
    comparisons = []
    for sid in sorted(sentence_ids, key=str):
        for sys_a, sys_b in itertools.combinations(systems, 2):
            fa, fb = scores[sys_a][sid], scores[sys_b][sid]
            if fa > fb + tie_epsilon:
                outcome = Outcome.A_WINS
            elif fb > fa + tie_epsilon:
                outcome = Outcome.B_WINS
            else:
                outcome = Outcome.TIE
            comparisons.append(Comparison(sid, sys_a, sys_b, outcome))
    return comparisons


def _v_w_win(t: float) -> tuple[float, float]:
    denom = _NORMAL.cdf(t)
    if denom < 1e-300:
        # deep tail: v ~ -t, w ~ 1
        return -t, 1.0
    v = _NORMAL.pdf(t) / denom
    return v, v * (v + t)


def _v_w_draw(t: float, eps: float) -> tuple[float, float]:
    denom = _NORMAL.cdf(eps - t) - _NORMAL.cdf(-eps - t)
    if denom < 1e-300:
        v = -t - eps if t > 0 else -t + eps
        return v, 1.0
    num_v = _NORMAL.pdf(-eps - t) - _NORMAL.pdf(eps - t)
    v = num_v / denom
    w = v * v + ((eps - t) * _NORMAL.pdf(eps - t)
                 + (eps + t) * _NORMAL.pdf(-eps - t)) / denom
    return v, w


def trueskill_rank(
    comparisons: list[Comparison], params: TrueSkillParams | None = None
) -> list[SystemRating]:
    """Sequential two-player TrueSkill over deterministically shuffled games."""
    params = params or TrueSkillParams()
    if not comparisons:
        raise ValueError("need at least one comparison")
    ordered = sorted(
        comparisons,
        key=lambda c: (str(c.sentence_id), c.system_a, c.system_b,
                       c.outcome.value),
    )
    random.Random(params.shuffle_seed).shuffle(ordered)

    mus: dict[str, float] = {}
    sig2: dict[str, float] = {}
    for c in comparisons:
        for s in (c.system_a, c.system_b):
            mus.setdefault(s, params.mu0)
            sig2.setdefault(s, params.sigma0 ** 2)

    draw_margin = (
        math.sqrt(2.0) * params.beta_skill
        * _NORMAL.inv_cdf((params.draw_probability + 1.0) / 2.0)
    )
    tau2 = params.tau ** 2

    for comp in ordered:
        if comp.outcome is Outcome.TIE:
            winner, loser, tie = comp.system_a, comp.system_b, True
        elif comp.outcome is Outcome.A_WINS:
            winner, loser, tie = comp.system_a, comp.system_b, False
        else:
            winner, loser, tie = comp.system_b, comp.system_a, False
        sig2[winner] += tau2
        sig2[loser] += tau2
        c2 = 2.0 * params.beta_skill ** 2 + sig2[winner] + sig2[loser]
        c = math.sqrt(c2)
        t = (mus[winner] - mus[loser]) / c
        eps = draw_margin / c
        if tie:
            v, w = _v_w_draw(t, eps)
            mus[winner] += sig2[winner] / c * v
            mus[loser] -= sig2[loser] / c * v
        else:
            v, w = _v_w_win(t - eps)
            mus[winner] += sig2[winner] / c * v
            mus[loser] -= sig2[loser] / c * v
        sig2[winner] *= max(1.0 - sig2[winner] / c2 * w, 1e-12)
        sig2[loser] *= max(1.0 - sig2[loser] / c2 * w, 1e-12)

    ratings = [
        SystemRating(s, mus[s], math.sqrt(sig2[s])) for s in sorted(mus)
    ]
    ratings.sort(key=lambda r: -r.mu)
    return ratings


def expected_wins(comparisons: list[Comparison]) -> list[tuple[str, float]]:
    """Fraction of comparisons won, ties worth half; sorted best first."""
    if not comparisons:
        raise ValueError("need at least one comparison")
    wins: dict[str, float] = {}
    totals: dict[str, int] = {}
    for c in comparisons:
        for s in (c.system_a, c.system_b):
            wins.setdefault(s, 0.0)
            totals.setdefault(s, 0)
            totals[s] += 1
        if c.outcome is Outcome.A_WINS:
            wins[c.system_a] += 1.0
        elif c.outcome is Outcome.B_WINS:
            wins[c.system_b] += 1.0
        else:
            wins[c.system_a] += 0.5
            wins[c.system_b] += 0.5
    scored = [(s, wins[s] / totals[s]) for s in sorted(wins)]
    scored.sort(key=lambda kv: -kv[1])
    return scored


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.size < 2:
        raise DegenerateInputError("need two equally sized samples of >= 2")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        raise DegenerateInputError("zero variance input")
    return float(xc @ yc) / denom


def _average_ranks(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x), dtype=np.float64)
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.size < 2:
        raise DegenerateInputError("need two equally sized samples of >= 2")
    return pearson(_average_ranks(x), _average_ranks(y))


def agreement_matrix(
    metric_comparisons: list[Comparison],
    human_comparisons: list[Comparison],
) -> dict[tuple[str, str], float]:
    """Per system pair: fraction of sentences with matching outcomes."""
    def index(comps):
        table = {}
        for c in comps:
            key = (c.sentence_id, c.system_a, c.system_b)
            table[key] = c.outcome
        return table

    metric = index(metric_comparisons)
    human = index(human_comparisons)
    if set(metric) != set(human):
        raise CoverageError("metric and human comparisons cover different keys")
    agree: dict[tuple[str, str], list[int]] = {}
    for key, outcome in metric.items():
        pair = (key[1], key[2])
        agree.setdefault(pair, []).append(int(outcome == human[key]))
    return {
        pair: sum(hits) / len(hits) for pair, hits in sorted(agree.items())
    }


@dataclass(frozen=True)
class TypeNormStats:
    type_label: str
    mean_norm: float
    stdev_norm: float
    count: int


def norm_stats_by_type(
    typed_vectors: list[tuple[str, np.ndarray]]
) -> list[TypeNormStats]:
    """Mean/stdev (population) of vector norms per type, sorted by mean."""
    groups: dict[str, list[float]] = {}
    for label, vec in typed_vectors:
        groups.setdefault(label, []).append(float(np.linalg.norm(vec)))
    stats = []
    for label, norms in groups.items():
        arr = np.asarray(norms)
        stats.append(TypeNormStats(
            type_label=label,
            mean_norm=float(arr.mean()),
            stdev_norm=float(arr.std()),
            count=len(norms),
        ))
    stats.sort(key=lambda s: (s.mean_norm, s.type_label))
    return stats
