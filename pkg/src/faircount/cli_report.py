"""Command-line surface and machine-readable reports.

Reports are JSON by default (CSV only for tabular count sweeps).  Every
numeric field carries a provenance key ("exact", "float", or "truncated:P"),
big integers are decimal strings, rationals are "num/den" strings, and floats
are printed with 17 significant digits so identical configurations produce
byte-identical payloads.

Exit codes: 0 success, 1 self-test failure, 2 usage or cap breach, 3 policy
refusal (mass-heuristic constant on a group of even order).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction

from . import __version__, analytic, arith_count, selftest
from . import malle_exponents as mexp
from .errors import (
    CapExceededError,
    EvenOrderError,
    FaircountError,
    PoleError,
    SieveLimitError,
)
from .group_core import CocycleGroup, build_gn, build_mixed_example

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_USAGE = 2
EXIT_POLICY = 3


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    x: str | None = None
    prime_bound: int | None = None
    mode: str | None = None
    family: str | None = None
    identification: int = 1
    allow_even: bool = False
    threads: int = 1
    element_cap: int = 10_000_000
    tuple_cap: int = 10_000_000
    level: str | None = None
    fmt: str = "json"
    out: str | None = None
    group_file: str | None = None

    def echo(self) -> dict:
        d = asdict(self)
        return {k: v for k, v in d.items() if v is not None}


# -- provenance-tagged serialization helpers ----------------------------------


def _exact(v) -> dict:
    return {"value": str(int(v)), "provenance": "exact"}


def _rational(fr: Fraction) -> dict:
    return {"value": f"{fr.numerator}/{fr.denominator}", "provenance": "exact"}


def _float(x: float) -> dict:
    return {"value": format(float(x), ".17g"), "provenance": "float"}


def _truncated(x: float, bound: int) -> dict:
    return {"value": format(float(x), ".17g"), "provenance": f"truncated:{bound}"}


def _euler_payload(res: analytic.EulerProductResult) -> dict:
    payload = {
        "value": _truncated(res.value, res.truncation_bound),
        "log_value": _truncated(res.log_value, res.truncation_bound),
        "truncation_bound": _exact(res.truncation_bound),
        "tail_estimate": _float(res.tail_estimate),
        "per_class_prime_counts": {
            str(k): _exact(v) for k, v in sorted(res.per_class_prime_counts.items())
        },
    }
    if res.note:
        payload["note"] = res.note
    return payload


def build_report(config: RunConfig, payload: dict, elapsed: float) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": config.command,
        "config": config.echo(),
        "payload": payload,
        "elapsed_seconds": round(elapsed, 6),
    }


# -- commands ------------------------------------------------------------------


def cmd_counterexample(config: RunConfig) -> dict:
    rep = mexp.counterexample_report(config.n)
    return {
        "n": _exact(rep.n),
        "naive_b": _exact(rep.naive_b),
        "alpha": _rational(rep.alpha),
        "fibered_b": _exact(rep.fibered_b),
        "is_counterexample": rep.is_counterexample,
        "margin": _rational(rep.margin),
        "brute_checked": rep.brute_checked,
    }


def cmd_count(config: RunConfig, dump_stream=None) -> dict:
    xs = [int(part) for part in config.x.split(",")]
    rows = []
    for X in xs:
        if config.mode == "hom":
            val = arith_count.hom_count(config.n, X)
        elif config.mode == "epi":
            val = arith_count.epi_count(config.n, X, cap=config.tuple_cap)
        else:  # tuples
            group = build_gn(config.n)
            count = 0
            for t in arith_count.enumerate_bad_tuples(
                config.n, X, cap=config.tuple_cap
            ):
                if dump_stream is not None:
                    dump_stream.write(arith_count.tuple_dump_line(group, t) + "\n")
                count += 1
            val = count
        rows.append({"n": config.n, "x": str(X), "mode": config.mode, "count": val})
    return {
        "rows": [
            {
                "n": _exact(r["n"]),
                "x": {"value": r["x"], "provenance": "exact"},
                "mode": r["mode"],
                "count": _exact(r["count"]),
            }
            for r in rows
        ]
    }


def cmd_predict(config: RunConfig) -> dict:
    X = int(config.x)
    P = config.prime_bound
    value = analytic.predict_count(config.n, float(X), P)
    cres = analytic.c0(config.n, P)
    return {
        "n": _exact(config.n),
        "x": {"value": str(X), "provenance": "exact"},
        "prime_bound": _exact(P),
        "predicted": _truncated(value, P),
        "c0": _euler_payload(cres),
    }


def _euler_group_datum(config: RunConfig):
    family = config.family or "gn"
    if family == "gn":
        group = build_gn(config.n)
        datum = mexp.gn_datum(config.n, identification=config.identification, group=group)
    elif family == "mixed":
        group = build_mixed_example(config.n)
        datum = mexp.mixed_datum(config.n, group=group)
    else:
        raise ValueError(f"unknown family {family!r}")
    return group, datum


def cmd_euler(config: RunConfig) -> dict:
    kind = config.mode
    P = config.prime_bound
    if kind == "c0":
        return {"kind": "c0", "n": _exact(config.n), "result": _euler_payload(analytic.c0(config.n, P))}
    group, datum = _euler_group_datum(config)
    if kind == "mb":
        res = analytic.mb_constant(group, datum, P, allow_even=config.allow_even)
    elif kind == "tame":
        res = analytic.tame_constant(group, datum, P)
    else:
        raise ValueError(f"unknown Euler product kind {kind!r}")
    return {
        "kind": kind,
        "n": _exact(config.n),
        "family": config.family or "gn",
        "fibered_b": _exact(mexp.fibered_b_orbit(group, datum)),
        "result": _euler_payload(res),
    }


def cmd_selftest(config: RunConfig, echo=print) -> tuple[dict, bool]:
    ok, results = selftest.run_selftest(config.level or "quick", echo=echo)
    return {"level": config.level or "quick", "ok": ok, "checks": results}, ok


def cmd_group_info(config: RunConfig) -> dict:
    if config.group_file:
        with open(config.group_file, "r", encoding="utf-8") as fh:
            group = CocycleGroup.from_dict(json.load(fh))
    elif config.family == "mixed":
        group = build_mixed_example(config.n)
    else:
        group = build_gn(config.n)
    naive = mexp.naive_b_orbit(group, cap=config.element_cap)
    formula = mexp.naive_b_formula(group, cap=config.element_cap)
    if naive != formula:
        raise AssertionError(
            f"orbit count {naive} and formula value {formula} disagree"
        )
    return {
        "name": group.name,
        "order": _exact(group.order),
        "exponent": _exact(group.exponent),
        "abelianization_invariants": [int(v) for v in group.abelianization_invariants()],
        "naive_b": _exact(naive),
        "descriptor": group.to_dict(),
    }


# -- output --------------------------------------------------------------------


def _emit(report: dict, config: RunConfig) -> None:
    if config.fmt == "csv":
        rows = report["payload"].get("rows")
        if rows is None:
            raise ValueError("csv format is only available for count sweeps")
        lines = ["n,x,mode,count"]
        for r in rows:
            lines.append(
                f'{r["n"]["value"]},{r["x"]["value"]},{r["mode"]},{r["count"]["value"]}'
            )
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if config.out and not (config.mode == "tuples" and config.command == "count"):
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"report written to {config.out}")
    else:
        sys.stdout.write(text)


# -- argument parsing ------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faircount",
        description=(
            "Exact and numerical invariants of nilpotent extension counting by "
            "product of ramified primes."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_n=True):
        if need_n:
            p.add_argument("--n", type=int, required=True, help="family index (>= 1)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None)
        p.add_argument("--element-cap", type=int, default=10_000_000)
        p.add_argument("--tuple-cap", type=int, default=10_000_000)

    p = sub.add_parser("counterexample", help="exponent report and verdict")
    common(p)

    p = sub.add_parser("count", help="exact tuple counts")
    common(p)
    p.add_argument("--x", required=True, help="conductor bound (decimal string; comma list for sweeps)")
    p.add_argument("--mode", choices=("hom", "epi", "tuples"), default="hom")

    p = sub.add_parser("predict", help="main-term predictor")
    common(p)
    p.add_argument("--x", required=True, help="count bound X (decimal string)")
    p.add_argument("--prime-bound", type=int, default=10**5)

    p = sub.add_parser("euler", help="Euler-product leading constants")
    common(p)
    p.add_argument("--kind", dest="mode", choices=("c0", "mb", "tame"), required=True)
    p.add_argument("--prime-bound", type=int, default=10**5)
    p.add_argument("--family", choices=("gn", "mixed"), default="gn")
    p.add_argument("--identification", type=int, choices=(1, 2), default=1)
    p.add_argument("--allow-even", action="store_true")

    p = sub.add_parser("selftest", help="run the invariant suites")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", dest="fmt", choices=("json",), default="json")
    p.add_argument("--out", default=None)

    p = sub.add_parser("group-info", help="inspect a built-in or serialized group")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--family", choices=("gn", "mixed"), default="gn")
    p.add_argument("--group-file", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", dest="fmt", choices=("json",), default="json")
    p.add_argument("--out", default=None)
    p.add_argument("--element-cap", type=int, default=10_000_000)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    for field_name in (
        "n",
        "x",
        "prime_bound",
        "mode",
        "family",
        "identification",
        "allow_even",
        "threads",
        "element_cap",
        "tuple_cap",
        "level",
        "fmt",
        "out",
        "group_file",
    ):
        if hasattr(args, field_name):
            setattr(cfg, field_name, getattr(args, field_name))
    return cfg


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    cfg = _config_from_args(args)
    if cfg.threads < 1:
        parser.error("--threads must be >= 1")
    if cfg.n is not None and cfg.command != "group-info" and cfg.n < 1:
        parser.error("--n must be >= 1")
    if cfg.command == "group-info" and cfg.group_file is None and cfg.n is None:
        parser.error("group-info needs --n or --group-file")

    started = time.monotonic()
    try:
        if cfg.command == "counterexample":
            payload = cmd_counterexample(cfg)
        elif cfg.command == "count":
            if cfg.mode == "tuples":
                if not cfg.out:
                    parser.error("count --mode tuples requires --out for the dump")
                with open(cfg.out, "w", encoding="utf-8") as fh:
                    payload = cmd_count(cfg, dump_stream=fh)
                payload["dump_path"] = cfg.out
            else:
                payload = cmd_count(cfg)
        elif cfg.command == "predict":
            payload = cmd_predict(cfg)
        elif cfg.command == "euler":
            payload = cmd_euler(cfg)
        elif cfg.command == "selftest":
            payload, ok = cmd_selftest(cfg)
            report = build_report(cfg, payload, time.monotonic() - started)
            _emit(report, cfg)
            return EXIT_OK if ok else EXIT_SELFTEST
        elif cfg.command == "group-info":
            payload = cmd_group_info(cfg)
        else:  # pragma: no cover - argparse guards this
            parser.error(f"unknown command {cfg.command!r}")
    except EvenOrderError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_POLICY
    except (CapExceededError, SieveLimitError) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PoleError, FaircountError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report = build_report(cfg, payload, time.monotonic() - started)
    _emit(report, cfg)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
