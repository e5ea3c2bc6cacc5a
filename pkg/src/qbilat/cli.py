"""Command-line front end: ``qbilat eval | verify | scan | formal | limit``.

Every command renders a report as JSON (default), CSV or text.  Exit codes:
0 all checks pass, 1 a verification failed, 2 domain or usage error,
3 term budget or precision exhausted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone
from fractions import Fraction
from importlib import resources

from . import __version__
from .catalog import (
    REGISTRY,
    IdentityId,
    IdentityReport,
    LimitParams,
    SamplerConfig,
    as_identity,
    check,
    closed_form_approx,
    sample_params,
    statement,
)
from .errors import (
    BudgetError,
    DomainError,
    InsufficientDataError,
    PoleError,
    PrecisionContractError,
    PrecisionError,
    QBilatError,
)
from .formal import (
    DEFAULT_POINTS,
    FORMAL_IDENTITIES,
    FormalPairParams,
    FormalReport,
    FormalThetaParams,
    RationalParams,
    formal_check,
)
from .limits import limit_report
from .numeric import (
    PrecisionContext,
    dougall_closed_form,
    eval_1H1,
    eval_2H2,
    horn_closed_form,
)
from .qseries import (
    PsiSpec,
    QBase,
    psi_bilateral,
    q_gamma,
    qpoch_finite,
    qpoch_inf,
    ramanujan_rhs,
    theta_series,
)
from .values import RationalComplex, format_mpc, format_mpfr, parse_rational

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

DEFAULT_PREC = 256
DEFAULT_ORDER = 50
COMMANDS = ("eval", "verify", "scan", "formal", "limit")
EVAL_FUNCTIONS = ("qpoch", "theta", "qgamma", "psi", "h1", "h2", "horn", "dougall",
                  "ramanujan_rhs")
PARAM_KEYS = ("q", "a", "b", "c", "d", "z", "n", "beta", "w", "xi", "eta", "k", "case")


class UsageError(Exception):
    """Bad flags, config keys or parameter literals."""


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    """Everything that determines a run's output."""

    command: str
    precision_bits: int = DEFAULT_PREC
    seed: int = 0
    identity: str | None = None
    params: dict = field(default_factory=dict)
    output: str = "json"
    output_path: str | None = None
    deterministic: bool = False
    options: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.output not in ("json", "csv", "text"):
            raise UsageError(f"unknown output format {self.output!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise UsageError("seed must be an unsigned 64-bit integer")
        if not isinstance(self.precision_bits, int) or self.precision_bits < 64:
            raise UsageError("precision must be an integer >= 64 bits")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    def report_config(self) -> dict:
        """The config as recorded in reports; the output path is left out so
        the same run written to two files gives identical bytes."""
        out = self.to_dict()
        del out["output_path"]
        return out


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _global_options() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand from resetting a flag given before it
    g = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g.add_argument("--prec", type=int, help="working precision in bits (default 256, env QBILAT_PREC)")
    g.add_argument("--seed", type=int, help="seed for sampled parameters")
    g.add_argument("--output", choices=("json", "csv", "text"), help="report format")
    g.add_argument("--output-path", help="write the report here instead of stdout")
    g.add_argument("--deterministic", action="store_true",
                   help="omit the timestamp so repeated runs give identical bytes")
    g.add_argument("--config", help="file of key = value lines mirroring the flags")
    return g


_PARAM_HELP = {
    "q": "nome q in (0, 1), decimal or n/d",
    "k": "integer shift or exponent",
    "case": "case number of a multi-case identity",
    "n": "finite length of a q-Pochhammer symbol",
}

# flags each subcommand accepts besides the global ones, with their types
COMMAND_KEYS: dict[str, dict[str, type]] = {
    "eval": {"function": str, "q": str, "a": str, "b": str, "c": str, "d": str, "z": str,
             "n": str, "max_terms": int},
    "verify": {"identity": str, "statement": bool, "q": str, "a": str, "b": str, "c": str,
               "d": str, "z": str, "beta": str, "w": str, "xi": str, "eta": str, "k": str,
               "case": str},
    "scan": {"identity": str, "samples": int, "q": str, "workers": int},
    "formal": {"identity": str, "order": int, "statement": bool, "beta": str, "w": str, "z": str,
               "k": str, "xi": str, "eta": str},
    "limit": {"b": str, "w": str, "k": str, "order": int, "identity": str, "max_terms": int,
              "workers": int},
}
_HELP = {
    "identity": "identity tag (scan also takes 'all')",
    "statement": "print the identity's statement and exit",
    "samples": "samples per identity",
    "workers": "worker threads",
    "order": "truncation order (formal) or Richardson order (limit)",
    "max_terms": "term budget per series",
}


def build_parser() -> argparse.ArgumentParser:
    g = _global_options()
    parser = argparse.ArgumentParser(prog="qbilat", parents=[g],
                                     description="Evaluate q-series and verify identities.")
    parser.add_argument("--version", action="version", version=f"qbilat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"eval": "evaluate a special function", "verify": "check one identity at one point",
             "scan": "check identities over seeded samples",
             "formal": "coefficientwise check in p = q^(1/2)", "limit": "q -> 1 limit study"}
    for command, keys in COMMAND_KEYS.items():
        p = sub.add_parser(command, parents=[g], help=helps[command],
                           argument_default=argparse.SUPPRESS)
        for key, kind in keys.items():
            if key == "function":
                p.add_argument("function", choices=EVAL_FUNCTIONS)
            elif kind is bool:
                p.add_argument(f"--{key}", action="store_true", help=_HELP.get(key))
            else:
                flag = "--" + key.replace("_", "-")
                text = _HELP.get(key) or _PARAM_HELP.get(key, "complex literal such as 0.3-1/2i")
                if command == "scan" and key == "q":
                    text = "comma-separated q grid"
                if command == "limit" and key == "k":
                    text = "range of k as a..b, q_k = 1 - 2^-k"
                p.add_argument(flag, type=kind, help=text)
    return parser


_GLOBAL_KEYS = {"prec": int, "seed": int, "output": str, "output_path": str, "deterministic": bool}


def resolve_config(args: argparse.Namespace, environ=None) -> RunConfig:
    """Merge flags, the config file, ``QBILAT_PREC`` and defaults (in that order)."""
    environ = os.environ if environ is None else environ
    command = args.command
    allowed = {**_GLOBAL_KEYS, **COMMAND_KEYS[command]}
    given = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    file_values: dict[str, str] = {}
    config_path = getattr(args, "config", None)
    if config_path:
        file_values = read_config_file(config_path)
        unknown = sorted(set(file_values) - set(allowed))
        if unknown:
            raise UsageError(f"unknown config keys for {command}: {', '.join(unknown)}")

    def pick(key):
        if key in given:
            return given[key]
        if key in file_values:
            raw, kind = file_values[key], allowed[key]
            if kind is bool:
                return raw.lower() in ("1", "true", "yes", "on")
            try:
                return kind(raw)
            except ValueError as exc:
                raise UsageError(f"config value for {key}: {exc}") from exc
        return None

    prec = pick("prec")
    if prec is None:
        env = environ.get("QBILAT_PREC")
        try:
            prec = int(env) if env else DEFAULT_PREC
        except ValueError as exc:
            raise UsageError(f"QBILAT_PREC must be an integer, got {env!r}") from exc
    seed = pick("seed")
    params, options = {}, {}
    for key in COMMAND_KEYS[command]:
        if key == "identity":
            continue
        v = pick(key)
        if v is None:
            continue
        if key in PARAM_KEYS:
            params[key] = str(v)
        else:
            options[key] = v
    return RunConfig(
        command=command,
        precision_bits=prec,
        seed=0 if seed is None else seed,
        identity=pick("identity") if "identity" in allowed else None,
        params=params,
        output=pick("output") or "json",
        output_path=pick("output_path"),
        deterministic=bool(pick("deterministic")),
        options=options,
    )


# ---------------------------------------------------------------------------
# parameter parsing


def _complex(params: dict, key: str, default=None) -> RationalComplex:
    if key not in params:
        if default is not None:
            return default
        raise UsageError(f"missing --{key}")
    try:
        return RationalComplex.parse(params[key])
    except ValueError as exc:
        raise UsageError(f"--{key}: {exc}") from exc


def _rational(params: dict, key: str, default=None) -> Fraction:
    if key not in params:
        if default is not None:
            return default
        raise UsageError(f"missing --{key}")
    try:
        return parse_rational(params[key])
    except ValueError as exc:
        raise UsageError(f"--{key}: {exc}") from exc


def _int(params: dict, key: str, default: int) -> int:
    if key not in params:
        return default
    try:
        return int(params[key])
    except ValueError as exc:
        raise UsageError(f"--{key} must be an integer, got {params[key]!r}") from exc


def _base(params: dict) -> QBase:
    return QBase.from_q(_rational(params, "q"))


def identity_params(identity: IdentityId, params: dict):
    """Build the registry's parameter object from ``--key`` literals."""
    info = REGISTRY[identity]
    kw = {}
    for f in fields(info.params):
        if f.name == "base":
            kw["base"] = _base(params)
        elif f.name in ("case", "k"):
            kw[f.name] = _int(params, f.name, f.default)
        else:
            kw[f.name] = _complex(params, f.name)
    extra = sorted(set(params) - set(kw) - ({"q"} if info.uses_base else set()))
    if extra:
        raise UsageError(f"{identity} does not take --{', --'.join(extra)}")
    return info.params(**kw)


def formal_params(identity: IdentityId, params: dict) -> list:
    """Formal parameter points; without ``--beta``/``--w`` the three shipped points."""
    kind = FORMAL_IDENTITIES.get(identity)
    if kind is None:
        raise UsageError(f"{identity} has no formal check; choose from "
                         + ", ".join(t.value for t in FORMAL_IDENTITIES))
    if kind is RationalParams:
        if "beta" not in params and "w" not in params:
            return list(DEFAULT_POINTS)
        return [RationalParams(_rational(params, "beta"), _rational(params, "w"))]
    if kind is FormalThetaParams:
        return [FormalThetaParams(_rational(params, "z", Fraction(2, 3)), _int(params, "k", 1))]
    return [FormalPairParams(_rational(params, "xi", Fraction(2, 3)),
                             _rational(params, "eta", Fraction(1, 5)))]


def _k_range(text: str | None) -> tuple[int, int]:
    if text is None:
        return 3, 10
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError as exc:
        raise UsageError(f"--k must look like 3..10, got {text!r}") from exc


# ---------------------------------------------------------------------------
# commands


@dataclass
class Outcome:
    """Records to render plus the exit code and an optional CSV body."""

    records: list
    code: int
    summary: dict = field(default_factory=dict)
    csv_text: str | None = None
    text: str | None = None


def _eval_record(function: str, args: dict, approx, digits: int) -> dict:
    return {"kind": "eval", "function": function, "args": args,
            "value": format_mpc(approx.value, digits), "error_bound": format_mpfr(approx.err, 6),
            "terms": approx.terms}


def cmd_eval(cfg: RunConfig, ctx: PrecisionContext) -> Outcome:
    from .numeric import Approx

    fn = cfg.options["function"]
    prm = cfg.params
    budget = cfg.options.get("max_terms") or 10**6
    with ctx.local():
        c = lambda key: _complex(prm, key)  # noqa: E731
        if fn == "qpoch":
            if "n" in prm:
                value = Approx.exact(qpoch_finite(c("a"), _base(prm), _int(prm, "n", 0), ctx))
            else:
                value = qpoch_inf(c("a"), _base(prm), ctx)
        elif fn == "theta":
            value = theta_series(c("z"), _base(prm), ctx, max_terms=budget)
        elif fn == "qgamma":
            value = q_gamma(c("z"), _base(prm), ctx)
        elif fn == "psi":
            nums = tuple(RationalComplex.parse(s) for s in prm.get("a", "").split(",") if s)
            dens = tuple(RationalComplex.parse(s) for s in prm.get("b", "").split(",") if s)
            value = psi_bilateral(PsiSpec(nums, dens), _base(prm), c("z"), ctx, max_terms=budget)
        elif fn == "h1":
            value = eval_1H1(c("a"), c("c"), c("z"), ctx, max_terms=budget)
        elif fn == "h2":
            value = eval_2H2(c("a"), c("b"), c("c"), c("d"), c("z"), ctx, max_terms=budget)
        elif fn == "horn":
            value = closed_form_approx(horn_closed_form(c("a"), c("c"), c("z"), ctx), ctx)
        elif fn == "dougall":
            value = closed_form_approx(dougall_closed_form(c("a"), c("b"), c("c"), c("d"), ctx), ctx)
        else:
            value = ramanujan_rhs(c("a"), c("b"), _base(prm), c("z"), ctx)
        record = _eval_record(fn, dict(prm), value, ctx.digits)
    text = (f"{fn} = {record['value']['re']} {'+' if not record['value']['im'].startswith('-') else '-'}"
            f" {record['value']['im'].lstrip('-')}i  (error bound {record['error_bound']},"
            f" {record['terms']} terms)\n")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["function", "value_re", "value_im", "error_bound", "terms"])
    w.writerow([fn, record["value"]["re"], record["value"]["im"], record["error_bound"], record["terms"]])
    return Outcome([record], EXIT_PASS, csv_text=buf.getvalue(), text=text)


_REPORT_COLUMNS = ["identity", "params", "status", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
                   "abs_err", "rel_err", "tolerance"]


def _report_code(rep: IdentityReport) -> int:
    if rep.status == "pass":
        return EXIT_PASS
    if rep.status == "fail":
        return EXIT_FAIL
    if rep.status == "error":
        return EXIT_BUDGET
    return EXIT_USAGE


def _checked(identity: IdentityId, params, ctx: PrecisionContext) -> IdentityReport:
    """:func:`check`, with library errors turned into error reports."""
    try:
        return check(identity, params, ctx)
    except (BudgetError, PrecisionError) as exc:
        status, note = "error", str(exc)
    except (DomainError, PoleError) as exc:
        status, note = "domain", str(exc)
    return IdentityReport(identity, params.to_record(), None, None, None, None, None, None, None,
                          None, status, ctx.bits, {}, [note])


def _reports_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_REPORT_COLUMNS)
    for r in records:
        lhs, rhs = r["lhs"] or {}, r["rhs"] or {}
        w.writerow([r["identity"], json.dumps(r["params"], sort_keys=True), r["status"],
                    lhs.get("re", ""), lhs.get("im", ""), rhs.get("re", ""), rhs.get("im", ""),
                    r["abs_err"] or "", r["rel_err"] or "", r["bounds"]["tolerance"] or ""])
    return buf.getvalue()


def _report_line(r: dict) -> str:
    params = ", ".join(f"{k}={v}" for k, v in r["params"].items())
    line = f"{r['identity']:<12} {r['status']:<13} rel_err={r['rel_err']}  [{params}]"
    for note in r["notes"]:
        line += f"\n    note: {note}"
    return line


def _summarise(reports: list[IdentityReport]) -> dict:
    counts = {s: 0 for s in ("pass", "fail", "indeterminate", "domain", "error")}
    worst = None
    for rep in reports:
        counts[rep.status] += 1
        if rep.rel_err is not None and (worst is None or rep.rel_err > worst):
            worst = rep.rel_err
    return {"total": len(reports), **counts,
            "max_rel_err": None if worst is None else format_mpfr(worst, 6)}


def _identity_outcome(reports: list[IdentityReport], digits: int) -> Outcome:
    records = [r.to_record(digits) for r in reports]
    code = max((_report_code(r) for r in reports), default=EXIT_PASS)
    summary = _summarise(reports)
    by_identity: dict[str, dict] = {}
    for r in reports:
        entry = by_identity.setdefault(r.identity.value, {"total": 0, "pass": 0, "fail": 0})
        entry["total"] += 1
        if r.status in ("pass", "fail"):
            entry[r.status] += 1
    summary["by_identity"] = by_identity
    lines = [_report_line(r) for r in records]
    lines.append(f"total {summary['total']}: {summary['pass']} pass, {summary['fail']} fail,"
                 f" {summary['indeterminate']} indeterminate, {summary['domain']} domain,"
                 f" {summary['error']} error; max rel_err {summary['max_rel_err'] or 'n/a'}")
    return Outcome(records, code, summary, _reports_csv(records), "\n".join(lines) + "\n")


def _statement_outcome(identity: IdentityId) -> Outcome:
    rec = {"kind": "statement", **statement(identity)}
    text = f"{rec['identity']}: {rec['title']}\n  {rec['statement']}\n"
    if rec.get("defect"):
        text += f"  defect: {rec['defect']}\n"
    return Outcome([rec], EXIT_PASS, text=text)


def _need_identity(cfg: RunConfig) -> IdentityId:
    if not cfg.identity:
        raise UsageError("missing --identity")
    try:
        return as_identity(cfg.identity)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"unknown identity {cfg.identity!r}") from exc


def cmd_verify(cfg: RunConfig, ctx: PrecisionContext) -> Outcome:
    identity = _need_identity(cfg)
    if cfg.options.get("statement"):
        return _statement_outcome(identity)
    params = identity_params(identity, cfg.params)
    return _identity_outcome([check(identity, params, ctx)], ctx.digits)


def _q_grid(text: str | None) -> tuple:
    if not text:
        return SamplerConfig.q_grid
    try:
        grid = tuple(parse_rational(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise UsageError(f"--q: {exc}") from exc
    if not grid or any(not 0 < q < 1 for q in grid):
        raise UsageError("the q grid must be a nonempty list of values in (0, 1)")
    return grid


def cmd_scan(cfg: RunConfig, ctx: PrecisionContext) -> Outcome:
    tag = cfg.identity or "all"
    if tag.lower() == "all":
        identities = list(IdentityId)
    else:
        identities = [_need_identity(cfg)]
    samples = cfg.options.get("samples", 20)
    if samples < 0:
        raise UsageError("--samples must be >= 0")
    sampler = SamplerConfig(samples=samples, seed=cfg.seed, q_grid=_q_grid(cfg.params.get("q")),
                            workers=cfg.options.get("workers", 1))
    reports: list[IdentityReport] = []
    for identity in identities:
        points = sample_params(identity, sampler)
        if sampler.workers > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=sampler.workers) as pool:
                reports.extend(pool.map(lambda pt: _checked(identity, pt, ctx), points))
        else:
            reports.extend(_checked(identity, pt, ctx) for pt in points)
    return _identity_outcome(reports, ctx.digits)


def _formal_line(r: dict) -> str:
    params = ", ".join(f"{k}={v}" for k, v in r["params"].items())
    if r["pass"]:
        return f"{r['identity']:<12} pass through p^{r['order']}  [{params}]"
    return (f"{r['identity']:<12} fail: first nonzero coefficient at p^{r['first_failing_order']}"
            f" is {r['coefficient']}  [{params}]")


def cmd_formal(cfg: RunConfig, ctx: PrecisionContext) -> Outcome:
    identity = _need_identity(cfg)
    if cfg.options.get("statement"):
        return _statement_outcome(identity)
    order = cfg.options.get("order", DEFAULT_ORDER)
    if order < 0:
        raise UsageError("--order must be >= 0")
    points = formal_params(identity, cfg.params)
    reports: list[FormalReport] = [formal_check(identity, pt, order) for pt in points]
    records = [r.to_record() for r in reports]
    code = EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL
    summary = {"total": len(reports), "pass": sum(r.passed for r in reports),
               "fail": sum(not r.passed for r in reports)}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["identity", "params", "order", "status", "first_failing_order", "coefficient"])
    for r in records:
        w.writerow([r["identity"], json.dumps(r["params"], sort_keys=True), r["order"], r["status"],
                    "" if r["first_failing_order"] is None else r["first_failing_order"],
                    r["coefficient"] or ""])
    text = "\n".join(_formal_line(r) for r in records) + "\n"
    return Outcome(records, code, summary, buf.getvalue(), text)


def cmd_limit(cfg: RunConfig, ctx: PrecisionContext) -> Outcome:
    prm = cfg.params
    b = _complex(prm, "b", RationalComplex(1))
    w = _complex(prm, "w", RationalComplex(-1))
    if b.im != 0 or b.re <= 0:
        raise DomainError("b must be real and > 0")
    k_min, k_max = _k_range(prm.get("k"))
    identity = as_identity(cfg.identity or "COR1")
    if identity not in (IdentityId.COR1, IdentityId.COR2):
        raise UsageError("the limit study uses COR1 or COR2")
    kwargs = {}
    if cfg.options.get("max_terms"):
        kwargs["max_terms"] = cfg.options["max_terms"]
    try:
        table = limit_report(LimitParams(b, w), k_min, k_max, ctx, order=cfg.options.get("order", 3),
                             identity=identity, workers=cfg.options.get("workers", 1), **kwargs)
    except (InsufficientDataError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    record = table.to_record()
    if table.exhausted:
        code = EXIT_BUDGET
    else:
        code = EXIT_PASS if table.ratio_within_bounds(ctx) else EXIT_FAIL
    summary = {"rows": len(table.rows), "complete": table.exhausted is None,
               "max_ratio_deviation": record["max_ratio_deviation"],
               "constant": record["constant"], "stated_ratio": record["stated_ratio"]}
    lines = [f"limit study for {identity.value}: b = {b}, w = {w}, k = {k_min}..{k_max}"]
    for r in record["rows"]:
        lines.append(f"  k={r['k']:<3} lhs={r['lhs']['re']} ratio={r['ratio']['re']}")
    for key in ("extrapolated_lhs", "extrapolated_rhs", "closed_form", "horn_value", "constant",
                "stated_ratio"):
        v = record[key]
        lines.append(f"  {key}: {'n/a' if v is None else v['re'] + ' + ' + v['im'] + 'i'}")
    for note in record["notes"]:
        lines.append(f"  note: {note}")
    return Outcome([record], code, summary, table.to_csv(), "\n".join(lines) + "\n")


_COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "scan": cmd_scan, "formal": cmd_formal,
             "limit": cmd_limit}


# ---------------------------------------------------------------------------
# rendering


def build_document(cfg: RunConfig, outcome: Outcome) -> dict:
    doc = {
        "tool": "qbilat",
        "version": __version__,
        "command": cfg.command,
        "config": cfg.report_config(),
        "precision_bits": cfg.precision_bits,
        "reports": outcome.records,
        "summary": outcome.summary,
        "exit_code": outcome.code,
    }
    if not cfg.deterministic:
        doc["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return doc


def render(cfg: RunConfig, outcome: Outcome) -> str:
    if cfg.output == "json":
        return json.dumps(build_document(cfg, outcome), indent=2) + "\n"
    if cfg.output == "csv":
        if outcome.csv_text is None:
            raise UsageError(f"{cfg.command} has no CSV form; use --output json or text")
        return outcome.csv_text
    return outcome.text or ""


def report_schema() -> dict:
    """The JSON schema every report document follows."""
    text = resources.files("qbilat").joinpath("report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute a resolved config; returns the exit code and the rendered report."""
    ctx = PrecisionContext(cfg.precision_bits)
    outcome = _COMMANDS[cfg.command](cfg, ctx)
    return outcome.code, render(cfg, outcome)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        code, body = run(cfg)
    except (BudgetError, PrecisionError, PrecisionContractError) as exc:
        print(f"qbilat: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, QBilatError, ValueError, TypeError) as exc:
        print(f"qbilat: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
