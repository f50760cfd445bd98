"""Command-line interface.

Subcommands:
  integrate sugeno   one Sugeno integral (crossing solver, optional oracle)
  integrate pseudo   one generated integral
  check              run checks from a config file (name or 'all')
  reproduce          run the bundled reference scenarios
  fuzz               seeded randomized sweep of one checker

Exit codes: 0 success, 1 hard error, 2 config error.  Inequality failures
are data, not errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, FuzzintError
from .exprdsl import PiecewiseFn
from .harness import (SuiteResult, fuzz_sweep, reproduce_reference_suite,
                      run_config, FAMILIES)
from .measures import FuzzyMeasure
from .pseudo import Generator, GGenerated, g_integral
from .sugeno import sugeno_integral, sugeno_oracle
from . import backend

_CSV_HEADER = "name,lhs,rhs,slack,holds,advisory"


def _load_function(spec: str, domain) -> PiecewiseFn:
    if spec.startswith("@"):
        body = json.loads(Path(spec[1:]).read_text())
        return PiecewiseFn.from_config(body, domain)
    return PiecewiseFn.from_expr(spec, domain)


def _emit_suite(result: SuiteResult, args) -> None:
    if getattr(args, "csv", False):
        print(_CSV_HEADER)
        for r in result.reports:
            print(f"{r.name},{r.lhs!r},{r.rhs!r},{r.slack!r},"
                  f"{int(r.holds)},{int(r.advisory)}")
    else:
        for line in result.to_jsonl_lines():
            print(line)
    if getattr(args, "output", None):
        result.write_jsonl(args.output)


def _cmd_integrate_sugeno(args) -> int:
    domain = (args.domain[0], args.domain[1])
    f = _load_function(args.f, domain)
    mu = FuzzyMeasure.from_config(json.loads(args.measure),
                                  span=domain[1] - domain[0])
    res = sugeno_integral(f, mu=mu, tol=args.tol)
    out = res.to_dict()
    if args.oracle:
        out["oracle"] = sugeno_oracle(f, mu=mu, n=args.oracle).to_dict()
    print(json.dumps(out, sort_keys=True))
    return 0


def _cmd_integrate_pseudo(args) -> int:
    domain = (args.domain[0], args.domain[1])
    f = _load_function(args.f, domain)
    gen = Generator(args.g, (args.interval[0], args.interval[1]))
    res = g_integral(GGenerated(gen), f)
    print(json.dumps(res.to_dict(), sort_keys=True))
    return 0


def _cmd_check(args) -> int:
    obj = json.loads(Path(args.config).read_text())
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    if args.checker != "all":
        checks = [c for c in obj.get("checks", [])
                  if c.get("checker") == args.checker]
        obj = {**obj, "checks": checks}
    result = run_config(obj)
    _emit_suite(result, args)
    return 0


def _cmd_reproduce(args) -> int:
    result = reproduce_reference_suite()
    if args.csv:
        _emit_suite(result, args)
    else:
        for r in result.reports:
            status = "advisory" if r.advisory else ("holds" if r.holds else "FAILS")
            print(f"[{status}] {r.context.get('scenario', r.name)}: "
                  f"lhs={r.lhs:.6g} rhs={r.rhs:.6g}")
            for row in r.context.get("reference_values", []):
                expected = row["expected"]
                shown = "-" if expected is None else f"{expected:.6g}"
                print(f"    {row['flag']:8s} {row['label']}: "
                      f"computed={row['computed']:.6g} expected={shown}")
        print(f"summary: {json.dumps(result.summary, sort_keys=True)}")
        print(f"errata: {len(result.errata)}")
        for item in result.errata:
            print(f"    {item['scenario']}/{item['label']}: {item.get('note', '')}")
        if args.output:
            result.write_jsonl(args.output)
    return 0


def _cmd_fuzz(args) -> int:
    options = {"s": args.s, "generator": args.generator,
               "interval": (args.interval[0], args.interval[1])}
    if args.measure:
        options["measure"] = json.loads(args.measure)
    if args.phi:
        options["phi"] = args.phi
    result = fuzz_sweep(args.family, args.checker, args.trials, args.seed,
                        options)
    _emit_suite(result, args)
    summary = result.summary
    print(f"# family={args.family} checker={args.checker} "
          f"trials={args.trials} seed={args.seed} "
          f"holds={summary['holds']} fails={summary['fails']} "
          f"advisory={summary['advisory']}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fuzzint",
                                description="Sugeno and generated integrals, "
                                            "with inequality checkers")
    p.add_argument("--backend", choices=("cython", "pure-python"),
                   help="force a kernel backend")
    sub = p.add_subparsers(dest="command", required=True)

    integ = sub.add_parser("integrate", help="compute one integral")
    isub = integ.add_subparsers(dest="kind", required=True)

    su = isub.add_parser("sugeno")
    su.add_argument("--f", required=True, help="expression or @file.json")
    su.add_argument("--measure", default='{"type":"lebesgue"}')
    su.add_argument("--domain", nargs=2, type=float, default=(0.0, 1.0))
    su.add_argument("--tol", type=float, default=1e-9)
    su.add_argument("--oracle", type=int, default=0,
                    help="also run the level-grid oracle with N points")
    su.set_defaults(func=_cmd_integrate_sugeno)

    ps = isub.add_parser("pseudo")
    ps.add_argument("--f", required=True)
    ps.add_argument("--g", required=True, help="generator expression in t")
    ps.add_argument("--domain", nargs=2, type=float, default=(0.0, 1.0))
    ps.add_argument("--interval", nargs=2, type=float, default=(0.0, 1.0))
    ps.set_defaults(func=_cmd_integrate_pseudo)

    ch = sub.add_parser("check", help="run checks from a config file")
    ch.add_argument("checker", help="checker name, or 'all'")
    ch.add_argument("--config", required=True)
    ch.add_argument("--csv", action="store_true")
    ch.add_argument("--output")
    ch.set_defaults(func=_cmd_check)

    rp = sub.add_parser("reproduce", help="run the bundled reference scenarios")
    rp.add_argument("--csv", action="store_true")
    rp.add_argument("--output")
    rp.set_defaults(func=_cmd_reproduce)

    fz = sub.add_parser("fuzz", help="seeded randomized sweep")
    fz.add_argument("--family", required=True, choices=sorted(FAMILIES))
    fz.add_argument("--checker", default="sugeno-diaz-metcalf")
    fz.add_argument("--trials", type=int, default=100)
    fz.add_argument("--seed", type=int, default=0)
    fz.add_argument("--s", type=float, default=2.0)
    fz.add_argument("--measure")
    fz.add_argument("--generator", default="t^2")
    fz.add_argument("--phi", default="t")
    fz.add_argument("--interval", nargs=2, type=float, default=(0.0, 1.0))
    fz.add_argument("--csv", action="store_true")
    fz.add_argument("--output")
    fz.set_defaults(func=_cmd_fuzz)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.backend:
            backend.use(args.backend)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FuzzintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
