"""Command-line interface.

Commands:
  extract    edits from parallel source/corrected files -> M2
  enumerate  every intermediate sentence the scorer will embed
  score      end-to-end scoring -> JSON report (optionally plan TSVs)
  rank       aggregate per-system reports into a ranking
  correlate  ranking vs human scores -> Pearson/Spearman
  agreement  per-system-pair agreement between metric and human outcomes

Exit codes: 0 ok, 2 input error, 3 embedder/dependency failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import metaeval, scoring
from .editvec import CostMode, MassMode, Vectorization, intermediate_sentences
from .edit_extract import (
    M2Sentence,
    classify_coarse,
    extract_edits,
    format_m2,
    parse_m2,
    write_m2,
)
from .embedder import (
    HashEmbedder,
    MissingEmbeddingError,
    RemoteEmbedder,
    ServiceError,
    StoreEmbedder,
    load_store,
)
from .errors import UotErrantError
from .metaeval import TrueSkillParams
from .textspan import Edit, EditSet, detokenize, tokenize
from .uot import UotConfig

REPORT_FORMAT = "uot-errant-report/v1"


class InputError(UotErrantError):
    pass


@dataclass
class RunConfig:
    embedder: str = "test"
    vectorization: str = "remove"
    mass: str = "l2"
    cost: str = "euclidean"
    epsilon: float = 0.1
    lambda1: float = 0.1
    lambda2: float = 0.1
    beta: float = 0.5
    max_iters: int = 1000
    tol: float = 1e-9
    tie_epsilon: float = 1e-9
    seed: int = 0
    workers: int = 1
    trueskill: dict = field(default_factory=dict)

    @staticmethod
    def load(path: str | None) -> "RunConfig":
        cfg = RunConfig()
        if path is None:
            return cfg
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        for key, value in data.items():
            if not hasattr(cfg, key):
                raise InputError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
        return cfg

    def as_dict(self) -> dict:
        return {
            "embedder": self.embedder,
            "vectorization": self.vectorization,
            "mass": self.mass,
            "cost": self.cost,
            "epsilon": self.epsilon,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "beta": self.beta,
            "max_iters": self.max_iters,
            "tol": self.tol,
            "tie_epsilon": self.tie_epsilon,
            "seed": self.seed,
            "workers": self.workers,
            "trueskill": dict(self.trueskill),
        }

    def make_provider(self):
        spec = self.embedder
        if spec == "test":
            return HashEmbedder()
        if spec.startswith("store:"):
            return StoreEmbedder(load_store(spec[len("store:"):]))
        if spec.startswith("remote:"):
            return RemoteEmbedder(spec[len("remote:"):])
        raise InputError(f"unknown embedder backend {spec!r}")

    def score_config(self) -> scoring.ScoreConfig:
        return scoring.ScoreConfig(
            provider=self.make_provider(),
            vectorization=Vectorization(self.vectorization),
            mass_mode=MassMode.L2_NORM if self.mass == "l2" else MassMode.UNIFORM,
            cost_mode=CostMode(self.cost),
            uot=UotConfig(
                epsilon=self.epsilon,
                lambda1=self.lambda1,
                lambda2=self.lambda2,
                max_iters=self.max_iters,
                tol=self.tol,
            ),
            beta=self.beta,
        )

    def trueskill_params(self) -> TrueSkillParams:
        kwargs = dict(self.trueskill)
        kwargs.setdefault("shuffle_seed", self.seed)
        return TrueSkillParams(**kwargs)


def _read_lines(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh]


def _read_parallel(paths: dict[str, str]) -> dict[str, list[str]]:
    data = {name: _read_lines(path) for name, path in paths.items()}
    lengths = {name: len(lines) for name, lines in data.items()}
    if len(set(lengths.values())) > 1:
        detail = ", ".join(f"{n}={c}" for n, c in sorted(lengths.items()))
        raise InputError(f"line-count mismatch across files: {detail}")
    return data


def _m2_edit_sets(path: str, expected: int, annotator: int = 0):
    sentences = parse_m2(path)
    if len(sentences) != expected:
        raise InputError(
            f"M2 file {path} has {len(sentences)} sentences, expected {expected}")
    out = []
    for sent in sentences:
        if sent.annotations:
            aid = annotator if annotator in sent.annotations else min(sent.annotations)
            out.append(sent.annotations[aid])
        else:
            out.append(None)
    return out


def cmd_extract(args) -> int:
    data = _read_parallel({"src": args.src, "cor": args.cor})
    sentences = []
    for src_line, cor_line in zip(data["src"], data["cor"]):
        src = tokenize(src_line)
        edits = extract_edits(src_line, cor_line)
        typed = EditSet(tuple(
            Edit(e.start, e.end, e.replacement,
                 type_label=classify_coarse(e, src))
            for e in edits
        ))
        sentences.append(M2Sentence(src, {0: typed}))
    if args.m2_out:
        write_m2(sentences, args.m2_out)
    else:
        sys.stdout.write(format_m2(sentences))
    return 0


def _gather_edit_sets(cfgs, srcs, texts, m2_path):
    if m2_path:
        return _m2_edit_sets(m2_path, len(srcs))
    return [extract_edits(s, t) for s, t in zip(srcs, texts)]


def cmd_enumerate(args) -> int:
    paths = {"src": args.src, "hyp": args.hyp}
    ref_paths = args.refs.split(",")
    for i, rp in enumerate(ref_paths):
        paths[f"ref{i}"] = rp
    data = _read_parallel(paths)
    modes = {
        "remove": [Vectorization.REMOVE],
        "add": [Vectorization.ADD],
        "both": [Vectorization.REMOVE, Vectorization.ADD],
    }[args.mode]

    hyp_sets = _gather_edit_sets(None, data["src"], data["hyp"], args.m2_hyp)
    ref_sets_per_file = []
    m2_refs = args.m2_refs.split(",") if args.m2_refs else [None] * len(ref_paths)
    for i in range(len(ref_paths)):
        ref_sets_per_file.append(
            _gather_edit_sets(None, data["src"], data[f"ref{i}"], m2_refs[i]))

    seen: dict[str, None] = {}
    for idx, src_line in enumerate(data["src"]):
        src = tokenize(src_line)
        seen.setdefault(detokenize(src))
        for mode in modes:
            for sent in intermediate_sentences(src, hyp_sets[idx], mode):
                seen.setdefault(sent)
            for ref_sets in ref_sets_per_file:
                for sent in intermediate_sentences(src, ref_sets[idx], mode):
                    seen.setdefault(sent)
    for sent in seen:
        sys.stdout.write(sent + "\n")
    return 0


def _score_to_json(s: scoring.SentenceScore) -> dict:
    return {
        "tp": s.tp,
        "fp": s.fp,
        "fn": s.fn,
        "precision": s.precision,
        "recall": s.recall,
        "f": s.f_beta,
        "chosen_ref": s.chosen_ref,
        "degenerate_case": s.degenerate_case.value if s.degenerate_case else None,
        "converged": s.plan.converged if s.plan is not None else True,
        "clamped": s.clamped,
    }


def cmd_score(args) -> int:
    cfg = RunConfig.load(args.config)
    paths = {"src": args.src, "hyp": args.hyp}
    ref_paths = args.refs.split(",")
    for i, rp in enumerate(ref_paths):
        paths[f"ref{i}"] = rp
    data = _read_parallel(paths)
    n = len(data["src"])

    hyp_sets = (_m2_edit_sets(args.m2_hyp, n) if args.m2_hyp
                else [None] * n)
    m2_refs = args.m2_refs.split(",") if args.m2_refs else None
    ref_sets: list[list] = [[None] * len(ref_paths) for _ in range(n)]
    if m2_refs:
        for i, m2_path in enumerate(m2_refs):
            per_sent = _m2_edit_sets(m2_path, n)
            for sidx in range(n):
                ref_sets[sidx][i] = per_sent[sidx]

    try:
        score_cfg = cfg.score_config()
    except (OSError, UotErrantError) as exc:
        print(f"error: embedder setup failed: {exc}", file=sys.stderr)
        return 3

    def score_one(idx: int):
        src = tokenize(data["src"][idx])
        hyp = tokenize(data["hyp"][idx])
        refs = [tokenize(data[f"ref{i}"][idx]) for i in range(len(ref_paths))]
        uot_score = scoring.sentence_score_uot(
            src, hyp, refs, score_cfg,
            hyp_edits=hyp_sets[idx], ref_edits=ref_sets[idx])
        errant_score = None
        if args.baseline == "errant":
            errant_score = scoring.sentence_score_errant(
                src, hyp, refs, beta=cfg.beta,
                hyp_edits=hyp_sets[idx], ref_edits=ref_sets[idx])
        return uot_score, errant_score

    try:
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                results = list(pool.map(score_one, range(n)))
        else:
            results = [score_one(i) for i in range(n)]
    except (MissingEmbeddingError, ServiceError) as exc:
        print(f"error: embedding failure: {exc}", file=sys.stderr)
        return 3

    scores = [r[0] for r in results]
    report = {
        "format": REPORT_FORMAT,
        "config": cfg.as_dict(),
        "sentences": [],
        "summary": {},
    }
    for idx, (uot_score, errant_score) in enumerate(results):
        entry = {"id": idx}
        entry.update(_score_to_json(uot_score))
        if errant_score is not None:
            entry["errant"] = _score_to_json(errant_score)
        report["sentences"].append(entry)
    summary = scoring.corpus_report(scores)
    report["summary"] = {
        "count": summary.count,
        "mean_precision": summary.mean_precision,
        "mean_recall": summary.mean_recall,
        "mean_f": summary.mean_f,
        "degenerate_counts": summary.degenerate_counts,
        "clamp_count": summary.clamp_count,
        "nonconverged_count": summary.nonconverged_count,
    }
    payload = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload + "\n")
    else:
        sys.stdout.write(payload + "\n")

    if args.plans_out:
        with open(args.plans_out, "w", encoding="utf-8", newline="\n") as fh:
            for idx, s in enumerate(scores):
                fh.write(f"# sentence {idx} chosen_ref {s.chosen_ref}\n")
                if s.plan is None or s.hyp_edits is None or s.ref_edits is None:
                    fh.write("\n")
                    continue
                cols = [e.descriptor() for e in s.ref_edits]
                fh.write("\t" + "\t".join(cols) + "\n")
                for i, e in enumerate(s.hyp_edits):
                    row = [f"{s.plan.T[i, j]:.9g}" for j in range(len(cols))]
                    fh.write(e.descriptor() + "\t" + "\t".join(row) + "\n")
                fh.write("\n")

    if summary.nonconverged_count:
        print(
            f"warning: {summary.nonconverged_count} sentence(s) hit the "
            "iteration cap without converging", file=sys.stderr)
    return 0


def _load_report_scores(path: str) -> dict[int, float]:
    with open(path, encoding="utf-8") as fh:
        report = json.load(fh)
    if report.get("format") != REPORT_FORMAT:
        raise InputError(f"{path}: not a {REPORT_FORMAT} report")
    return {entry["id"]: entry["f"] for entry in report["sentences"]}


def cmd_rank(args) -> int:
    paths = args.scores.split(",")
    names = args.names.split(",")
    if len(paths) != len(names):
        raise InputError(
            f"{len(paths)} score files but {len(names)} names")
    cfg = RunConfig.load(args.config)
    scores = {name: _load_report_scores(path)
              for name, path in zip(names, paths)}
    comparisons = metaeval.pairwise_outcomes(scores, cfg.tie_epsilon)
    params = cfg.trueskill_params()
    if args.method == "trueskill":
        ratings = metaeval.trueskill_rank(comparisons, params)
        ranking = [
            {"system": r.system, "mu": r.mu, "sigma": r.sigma,
             "score": r.mu, "conservative": r.conservative}
            for r in ratings
        ]
    else:
        ranking = [{"system": s, "score": v}
                   for s, v in metaeval.expected_wins(comparisons)]
    out = {
        "format": "uot-errant-ranking/v1",
        "method": args.method,
        "config": cfg.as_dict(),
        "trueskill_params": {
            "mu0": params.mu0, "sigma0": params.sigma0,
            "beta_skill": params.beta_skill, "tau": params.tau,
            "draw_probability": params.draw_probability,
            "shuffle_seed": params.shuffle_seed,
        },
        "ranking": ranking,
    }
    sys.stdout.write(
        json.dumps(out, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    return 0


def _read_human_tsv(path: str) -> dict[str, dict[str, float]]:
    """system -> sentence_id -> score; system-level rows use id '*'."""
    table: dict[str, dict[str, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            try:
                if len(fields) == 2:
                    system, score = fields[0], float(fields[1])
                    table.setdefault(system, {})["*"] = score
                elif len(fields) == 3:
                    system, sid, score = fields[0], fields[1], float(fields[2])
                    table.setdefault(system, {})[sid] = score
                else:
                    raise ValueError(f"{len(fields)} fields")
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: bad record ({exc})") from exc
    return table


def cmd_correlate(args) -> int:
    with open(args.ranking, encoding="utf-8") as fh:
        ranking = json.load(fh)
    metric = {row["system"]: row["score"] for row in ranking["ranking"]}
    human_table = _read_human_tsv(args.human)
    human = {
        system: (scores["*"] if "*" in scores
                 else sum(scores.values()) / len(scores))
        for system, scores in human_table.items()
    }
    systems = sorted(metric)
    if sorted(human) != systems:
        raise InputError(
            f"system sets differ: metric={systems}, human={sorted(human)}")
    x = [metric[s] for s in systems]
    y = [human[s] for s in systems]
    out = {"pearson": metaeval.pearson(x, y),
           "spearman": metaeval.spearman(x, y),
           "systems": systems}
    sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_agreement(args) -> int:
    cfg = RunConfig.load(args.config)
    paths = args.metric_scores.split(",")
    names = args.names.split(",")
    if len(paths) != len(names):
        raise InputError(f"{len(paths)} score files but {len(names)} names")
    metric_scores = {
        name: {str(k): v for k, v in _load_report_scores(path).items()}
        for name, path in zip(names, paths)
    }
    human_table = _read_human_tsv(args.human_scores)
    if sorted(human_table) != sorted(metric_scores):
        raise InputError(
            f"system sets differ: metric={sorted(metric_scores)}, "
            f"human={sorted(human_table)}")
    human_scores = {s: dict(v) for s, v in human_table.items()}
    mc = metaeval.pairwise_outcomes(metric_scores, cfg.tie_epsilon)
    hc = metaeval.pairwise_outcomes(human_scores, cfg.tie_epsilon)
    matrix = metaeval.agreement_matrix(mc, hc)
    systems = sorted(metric_scores)
    sys.stdout.write("\t" + "\t".join(systems) + "\n")
    for sa in systems:
        row = [sa]
        for sb in systems:
            if sa == sb:
                row.append("-")
            else:
                pair = (min(sa, sb), max(sa, sb))
                row.append(f"{matrix[pair]:.6f}")
        sys.stdout.write("\t".join(row) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uot-errant",
        description="Edit-level GEC scoring via unbalanced optimal transport",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract edits to M2")
    p.add_argument("--src", required=True)
    p.add_argument("--cor", required=True)
    p.add_argument("--m2-out")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("enumerate",
                       help="list every sentence the scorer will embed")
    p.add_argument("--src", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--refs", required=True, help="comma-separated files")
    p.add_argument("--mode", choices=["remove", "add", "both"], default="both")
    p.add_argument("--m2-hyp")
    p.add_argument("--m2-refs", help="comma-separated M2 files, one per ref")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("score", help="score hypothesis against references")
    p.add_argument("--src", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--refs", required=True, help="comma-separated files")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--plans-out")
    p.add_argument("--baseline", choices=["errant"])
    p.add_argument("--m2-hyp")
    p.add_argument("--m2-refs", help="comma-separated M2 files, one per ref")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("rank", help="aggregate reports into a system ranking")
    p.add_argument("--scores", required=True, help="comma-separated reports")
    p.add_argument("--names", required=True, help="comma-separated system names")
    p.add_argument("--method", choices=["trueskill", "expected-wins"],
                   default="trueskill")
    p.add_argument("--config")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("correlate", help="correlate a ranking with human scores")
    p.add_argument("--ranking", required=True)
    p.add_argument("--human", required=True)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("agreement",
                       help="metric-vs-human agreement per system pair")
    p.add_argument("--metric-scores", required=True)
    p.add_argument("--names", required=True)
    p.add_argument("--human-scores", required=True)
    p.add_argument("--config")
    p.set_defaults(func=cmd_agreement)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MissingEmbeddingError, ServiceError) as exc:
        print(f"error: embedding failure: {exc}", file=sys.stderr)
        return 3
    except UotErrantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
