"""``radius`` command line: eval, baseline, compare.

Exit codes: 0 success, 1 validation/usage error, 2 I/O error. Diagnostics go to
stderr; reports go to stdout unless ``--out`` is given.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .baselines import KINDS, BaselineSpec, baseline_survey
from .kernel import RngStream
from .model import RadiusError, Survey, ValidationError, read_survey
from .report import RunConfig, evaluate_survey, load_report, paired_compare, render_comparison, render_report

log = logging.getLogger("radius")

SEED_ENV = "RADIUS_SEED"
EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 42
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _guess_format(path: str, given: str | None) -> str:
    if given:
        return given
    return "csv" if path.lower().endswith(".csv") else "json"


def _load_survey(path: str, fmt: str | None) -> Survey:
    with open(path, "rb") as fh:
        return read_survey(fh, _guess_format(path, fmt))


def _write(data: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(out).write_bytes(data)
        log.info("wrote %s", out)


def _merge_agents(survey: Survey, agents: Survey) -> Survey:
    by_id = {q.question_id: q for q in agents.questions}
    questions = []
    for q in survey.questions:
        other = by_id.get(q.question_id)
        if other is None:
            questions.append(q)
            continue
        if other.k != q.k:
            raise ValidationError(f"agent override has {other.k} options, expected {q.k}", q.question_id, "agent_counts")
        questions.append(q.with_agent_counts(other.agent_counts))
    unknown = sorted(set(by_id) - {q.question_id for q in survey.questions})
    if unknown:
        log.warning("agent override ignores unknown question ids: %s", ", ".join(unknown))
    meta = dict(survey.meta)
    if agents.meta.get("baseline"):
        meta["baseline"] = agents.meta["baseline"]
    return Survey(survey.survey_id, questions, meta)


def cmd_eval(args) -> int:
    config = RunConfig(
        seed=args.seed,
        n_boot=args.boot,
        ci_level=args.level,
        alpha=args.alpha,
        metrics=args.metrics,
        rc_degenerate=args.rc_degenerate,
    )
    survey = _load_survey(args.input, args.format)
    if args.agents:
        survey = _merge_agents(survey, _load_survey(args.agents, args.agents_format))
    extra = {
        "input": {"path": args.input, "format": _guess_format(args.input, args.format)},
    }
    if args.agents:
        extra["input"]["agents"] = args.agents
    if survey.meta.get("baseline"):
        extra["baseline_spec"] = survey.meta["baseline"]
    report = evaluate_survey(
        survey.questions, config, RngStream(config.seed), survey_id=survey.survey_id, jobs=args.jobs, extra_meta=extra
    )
    for q in report.per_question:
        for w in q.warnings:
            log.warning("%s: %s", q.question_id, w)
    _write(render_report(report, args.report), args.out)
    return EXIT_OK


def _agents_arg(value: str) -> int | None:
    if value == "match-human":
        return None
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'match-human', got {value!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"agent count must be >= 1, got {n}")
    return n


def cmd_baseline(args) -> int:
    spec = BaselineSpec(
        kind=args.kind,
        n_agents=args.agents,
        dirichlet_alpha=args.alpha_dirichlet,
        normal_mean_mode=args.normal_mean,
        normal_std_factor=args.normal_std_factor,
    )
    survey = _load_survey(args.input, args.format)
    out = baseline_survey(survey, spec, RngStream(args.seed))
    _write(out.dumps().encode("utf-8"), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    reports = []
    for path in (args.report_a, args.report_b):
        with open(path, "rb") as fh:
            reports.append(load_report(fh.read()))
    results = paired_compare(reports[0], reports[1], args.alpha)
    _write(render_comparison(results, args.report, args.alpha), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="radius", description="Ranking and distribution alignment of simulated survey responses.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="score agent responses against human responses")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("json", "csv"), default=None, help="input format (default: from extension)")
    p.add_argument("--agents", default=None, help="survey file whose agent_counts replace the input's, by question id")
    p.add_argument("--agents-format", choices=("json", "csv"), default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--report", choices=("json", "markdown"), default="json")
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV} or 42)")
    p.add_argument("--boot", type=int, default=1000, help="bootstrap resamples for top-group CIs")
    p.add_argument("--level", type=float, default=0.95, help="bootstrap CI level")
    p.add_argument("--alpha", type=float, default=0.05, help="homogeneity test significance level")
    p.add_argument("--metrics", default="all", help="comma-separated subset of TRM,RC,TVD,DH,CV,JSD,WD")
    p.add_argument("--rc-degenerate", choices=("fallback", "exclude"), default="fallback",
                   help="include undefined RC as 0.5 in the mean, or leave it out")
    p.add_argument("--jobs", type=int, default=1, help="questions evaluated in parallel (output is unaffected)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("baseline", help="replace agent counts with a non-parametric baseline")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--kind", required=True, help=f"one of {', '.join(KINDS)}")
    p.add_argument("--agents", type=_agents_arg, default=None, help="agents per question, or match-human (default)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--alpha-dirichlet", type=float, default=1.0)
    p.add_argument("--normal-mean", choices=("midpoint", "human_mean"), default="midpoint")
    p.add_argument("--normal-std-factor", type=float, default=0.25)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("compare", help="paired t-tests between two reports on the same questions")
    p.add_argument("report_a")
    p.add_argument("report_b")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--report", choices=("json", "markdown"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="radius: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            log.setLevel(logging.INFO)
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be >= 1")
        if getattr(args, "command", None) == "compare" and not 0 < args.alpha < 1:
            raise UsageError(f"--alpha must be in (0, 1), got {args.alpha}")
        if getattr(args, "command", None) == "baseline" and not 0 <= args.seed < 2**64:
            raise UsageError(f"seed must be a 64-bit unsigned integer, got {args.seed}")
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f"error: {e.strerror or e}: {e.filename or ''}".rstrip(": "), file=sys.stderr)
        return EXIT_IO
    except RadiusError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
