"""Command-line entry point: `crossprod <command> [--fixture NAME | --system FILE] ...`.

Exit codes: 0 when every requested check passes, 1 when a mathematical check
fails, 2 on configuration or IO errors.  `--json` prints the machine report
(validated against report.schema.json in the tests); `--output` also writes it
to a file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import invariants
from .action import DynamicalSystem, NotFinelyRepresentable, SampleSpec, validate_transfer
from .algebra import DEFAULT_TOL, op_norm
from .fixtures import FIXTURES, get_fixture, list_fixtures, load_fixture
from .l1x import L1Element, monomial_product_oracle, mul, star
from .norms import SupportBlowup, cstar_norm_bounds, zero_test
from .ogroup import GroupElement, NotInCone, DimensionMismatch, as_group
from .regrep import (
    EmptyWindow,
    MarginTooSmall,
    StateFunctional,
    SupportExceedsWindow,
    adjointness_check,
    build_regrep,
    covariance_check,
    property_star_check,
)
from .report import CheckReport
from .serialize import (
    ConfigError,
    SystemLoadError,
    element_from_json,
    element_to_json,
    l1_from_json,
    l1_to_json,
    load_system,
    matrix_to_json,
    parse_element,
)

SCHEMA_VERSION = "1.0"
ENV_TOL = "CROSSPROD_TOL"
COMMANDS = ("check-system", "transfer", "mul", "norm", "regrep", "selftest", "list-fixtures")


def load_schema() -> dict:
    return json.loads(resources.files("crossprod").joinpath("report.schema.json").read_text())


def _default_tol() -> float:
    raw = os.environ.get(ENV_TOL)
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{ENV_TOL}={raw!r} is not a number") from None


def _json_safe(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    return obj


def parse_degrees(text: str, k: int) -> list[GroupElement]:
    """'1,2,3' for k = 1; '1,0;0,1' (semicolon between elements) for k >= 2."""
    try:
        if k == 1:
            return [as_group(int(t), 1) for t in text.split(",") if t.strip()]
        return [as_group(tuple(int(c) for c in t.split(",")), k) for t in text.split(";") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse degrees {text!r}: {exc}") from exc


def system_summary(system: DynamicalSystem, source: str) -> dict:
    w = system.verdict.witness
    return {
        "name": system.name,
        "source": source,
        "shape": list(system.shape.block_sizes),
        "group_dim": system.k,
        "verdict": "FinelyRepresentable" if system.representable else "NotFinelyRepresentable",
        "witness": str(w) if w else None,
    }


def _resolve_system(args) -> tuple[DynamicalSystem, str]:
    spec = SampleSpec(seed=args.seed, count=args.samples)
    if args.fixture and args.system:
        raise ConfigError("pass only one of --fixture / --system")
    if args.fixture:
        try:
            get_fixture(args.fixture)
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from None
        return load_fixture(args.fixture, spec, args.tol), f"fixture:{args.fixture}"
    if args.system:
        return load_system(args.system, spec, args.tol), f"file:{args.system}"
    raise ConfigError("need --fixture NAME or --system FILE")


def _read_element(text: str | None, path: str | None, system: DynamicalSystem, what: str) -> L1Element:
    if path:
        try:
            return l1_from_json(json.loads(Path(path).read_text()), system)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read {what} from {path}: {exc}") from exc
    if text is None:
        raise ConfigError(f"--{what} is required")
    return parse_element(text, system)


# commands -------------------------------------------------------------------


def cmd_list_fixtures(args, report):
    report["result"] = {"fixtures": list_fixtures()}
    return True


def cmd_check_system(args, report):
    system, source = _resolve_system(args)
    report["system"] = system_summary(system, source)
    report["checks"] = [r.to_json() for r in system.verdict.reports]
    report["result"] = {"verdict": report["system"]["verdict"], "witness": report["system"]["witness"]}
    if args.expect is None:
        return True
    return system.representable == (args.expect == "representable")


def cmd_transfer(args, report):
    system, source = _resolve_system(args)
    report["system"] = system_summary(system, source)
    if not system.representable:
        report["result"] = {"message": f"no transfer action: {system.verdict}"}
        return False
    xs = parse_degrees(args.x, system.k) if args.x else system.action.generators
    rng = np.random.default_rng(args.seed)
    pairs = [(x, y) for x in xs for y in xs]
    checks = validate_transfer(system.action, system.transfer, xs, pairs, rng, args.samples, args.tol)
    report["checks"] = [r.to_json() for r in checks]
    one = system.shape.unit()
    report["result"] = {"transfer": [
        {"x": x.to_json(), "L": matrix_to_json(system.L(x).matrix), "P": system.P(x).to_json(),
         "L_of_unit": element_to_json(system.L(x)(one)), "alpha_of_unit": element_to_json(system.unit(x))}
        for x in xs
    ]}
    return all(r.passed for r in checks)


def cmd_mul(args, report):
    system, source = _resolve_system(args)
    report["system"] = system_summary(system, source)
    system.require_representable()
    a = _read_element(args.a, args.a_file, system, "a")
    b = _read_element(args.b, args.b_file, system, "b")
    ab = mul(a, b)
    checks = []
    if len(a.coeffs) == 1 and len(b.coeffs) == 1:
        oracle, label = monomial_product_oracle(a, b)
        c = CheckReport("monomial_oracle", 1e-12)
        c.add(f"case {label}", ab.distance(oracle))
        checks.append(c)
    st = CheckReport("star_antihomomorphism", args.tol)
    st.add("product", star(ab).distance(mul(star(b), star(a))))
    checks.append(st)
    report["checks"] = [r.to_json() for r in checks]
    report["result"] = {"a": l1_to_json(a), "b": l1_to_json(b), "product": l1_to_json(ab),
                        "l1_norm": ab.l1_norm(), "zero_test": str(zero_test(ab, args.tol))}
    return all(r.passed for r in checks)


def cmd_norm(args, report):
    system, source = _resolve_system(args)
    report["system"] = system_summary(system, source)
    system.require_representable()
    a = _read_element(args.element, args.element_file, system, "element")
    cert = cstar_norm_bounds(a, args.kmax, args.growth_bound)
    sandwich = CheckReport("certificate_sandwich", args.tol)
    lo, hi = cert.interval
    sandwich.add(f"k<={args.kmax}", max(0.0, lo - hi))
    coeff = CheckReport("coefficient_bound", args.tol)
    coeff.add("max coefficient", max(0.0, max((op_norm(c) for c in a.coeffs.values()), default=0.0) - hi))
    report["checks"] = [sandwich.to_json(), coeff.to_json()]
    report["result"] = {"element": l1_to_json(a), "certificate": cert.to_json()}
    return sandwich.passed and coeff.passed


def _load_states(arg: str, system: DynamicalSystem) -> list[StateFunctional] | None:
    if arg == "trace":
        return None
    try:
        data = json.loads(Path(arg).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read state file {arg}: {exc}") from exc
    densities = data.get("densities") or [data["density"]]
    try:
        return [StateFunctional(element_from_json(d, system.shape)) for d in densities]
    except ValueError as exc:
        raise ConfigError(f"invalid state: {exc}") from exc


def cmd_regrep(args, report):
    system, source = _resolve_system(args)
    report["system"] = system_summary(system, source)
    system.require_representable()
    gens = parse_degrees(args.gens, system.k) if args.gens else system.action.generators
    rep = build_regrep(system, _load_states(args.state, system), args.window, gens, margin=args.margin)
    spec = SampleSpec(seed=args.seed, count=args.samples)
    checks = covariance_check(rep, spec, tol=args.tol) + adjointness_check(rep, spec, tol=args.tol)
    checks.append(property_star_check(rep, samples=spec, tol=args.tol))
    report["checks"] = [r.to_json() for r in checks]
    report["result"] = {
        "window": args.window,
        "margin": rep.margin,
        "generators": [x.to_json() for x in rep.generators],
        "total_dim": rep.dim,
        "dims": [{"g": g.to_json(), "d": d} for g, d in rep.dims().items()],
        "faithful_states": [f.faithful for f in rep.states],
        "caveat": "k >= 2 windows are componentwise boxes, which are not order-convex" if system.k > 1 else None,
    }
    return all(r.passed for r in checks)


def selftest_checks(system: DynamicalSystem, seed: int, tol: float) -> list[CheckReport]:
    """A compact run of every invariant family on one representable system."""
    rng = np.random.default_rng(seed)
    checks = [
        invariants.associativity_check(system, rng, 108, tol),
        invariants.star_antihom_check(system, rng, 50, tol),
        invariants.submultiplicativity_check(system, rng, 50, tol),
        invariants.oracle_agreement_check(system, rng, 2),
        *invariants.certificate_check(system, rng, 10, 3, tol),
        invariants.gauge_check(system, rng, 8),
        invariants.zero_equivalence_check(system, rng, 50),
    ]
    rep = build_regrep(system, window=6)
    spec = SampleSpec(seed=seed, count=4)
    checks += covariance_check(rep, spec, tol=tol) + adjointness_check(rep, spec, tol=tol)
    checks.append(property_star_check(rep, samples=spec, margin=2, tol=tol))
    return checks


def cmd_selftest(args, report):
    spec = SampleSpec(seed=args.seed, count=args.samples)
    if args.fixture or args.system:
        targets = [(*_resolve_system(args), None)]
    else:
        targets = [(load_fixture(n, spec, args.tol), f"fixture:{n}", f.expected_representable)
                   for n, f in FIXTURES.items()]
    report["systems"] = []
    checks = []
    for system, source, expected in targets:
        report["systems"].append(system_summary(system, source))
        verdict = CheckReport("verdict", 0.0)
        if expected is not None:
            verdict.add("expected verdict", 0.0 if system.representable == expected else 1.0)
        checks.append((system.name, verdict))
        if system.representable:
            checks += [(system.name, c) for c in selftest_checks(system, args.seed, args.tol)]
    report["checks"] = [dict(c.to_json(), system=name) for name, c in checks]
    return all(c.passed for _, c in checks)


HANDLERS = {
    "list-fixtures": cmd_list_fixtures,
    "check-system": cmd_check_system,
    "transfer": cmd_transfer,
    "mul": cmd_mul,
    "norm": cmd_norm,
    "regrep": cmd_regrep,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("system")
    src.add_argument("--fixture", help=f"built-in system: {', '.join(FIXTURES)}")
    src.add_argument("--system", help="JSON system description")
    common.add_argument("--seed", type=int, default=0, help="seed for all sampling (default 0)")
    common.add_argument("--samples", type=int, default=64, help="samples per randomized check (default 64)")
    common.add_argument("--tol", type=float, default=None, help=f"tolerance (default ${ENV_TOL} or {DEFAULT_TOL})")
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--output", help="also write the JSON report here")

    parser = argparse.ArgumentParser(prog="crossprod", description="Crossed products by endomorphisms of Z^k.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list-fixtures", parents=[common], help="list the built-in systems")
    p = sub.add_parser("check-system", parents=[common], help="fine representability verdict")
    p.add_argument("--expect", choices=["representable", "not-representable"])
    p = sub.add_parser("transfer", parents=[common], help="synthesized transfer operators")
    p.add_argument("--x", help="cone elements, e.g. 1,2,3 or 1,0;0,1")
    p = sub.add_parser("mul", parents=[common], help="product of two crossed-product elements")
    p.add_argument("--a", help="element expression, e.g. 1+u1")
    p.add_argument("--b", help="element expression, e.g. u1*")
    p.add_argument("--a-file", help="JSON element")
    p.add_argument("--b-file", help="JSON element")
    p = sub.add_parser("norm", parents=[common], help="two-sided C*-norm certificate")
    p.add_argument("--element", help="element expression, e.g. u1+u1*")
    p.add_argument("--element-file", help="JSON element")
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--growth-bound", type=int, default=10_000)
    p = sub.add_parser("regrep", parents=[common], help="truncated regular representation checks")
    p.add_argument("--window", type=int, default=12)
    p.add_argument("--gens", help="generators, e.g. 1,2 or 1,0;0,1 (default: unit vectors)")
    p.add_argument("--state", default="trace", help="'trace' or a JSON file with a density")
    p.add_argument("--margin", type=int, default=None)
    sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    return parser


CONFIG_ERRORS = (ConfigError, SystemLoadError, OSError, EmptyWindow, MarginTooSmall, SupportExceedsWindow,
                 SupportBlowup, NotInCone, DimensionMismatch)


def run(argv: list[str] | None = None) -> tuple[int, dict]:
    args = build_parser().parse_args(argv)
    report: dict = {"schema_version": SCHEMA_VERSION, "command": args.command, "seed": args.seed, "checks": []}
    try:
        if args.tol is None:
            args.tol = _default_tol()
        report["tol"] = args.tol
        ok = HANDLERS[args.command](args, report)
        code = 0 if ok else 1
    except CONFIG_ERRORS as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = 2
    except NotFinelyRepresentable as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = 1
    report["passed"] = code == 0
    report["exit_code"] = code
    return code, _json_safe(report)


def _human(report: dict) -> str:
    lines = []
    if "error" in report:
        lines.append(f"error ({report['error']['type']}): {report['error']['message']}")
    for s in report.get("systems", []) + ([report["system"]] if "system" in report else []):
        w = f" ({s['witness']})" if s.get("witness") else ""
        lines.append(f"{s['name']}: {s['verdict']}{w}")
    res = report.get("result", {})
    if "fixtures" in res:
        for f in res["fixtures"]:
            lines.append(f"{f['name']:5} {f['expected_verdict']:24} {f['description']}")
    if "certificate" in res:
        lo, hi = res["certificate"]["interval"]
        lines.append(f"norm in [{lo:.6f}, {hi:.6f}]")
    if "dims" in res:
        lines.append("d_g: " + " ".join(f"{d['g']}:{d['d']}" for d in res["dims"]))
    if "product" in res:
        lines.append(f"product: {len(res['product']['coeffs'])} terms, l1 norm {res['l1_norm']:.6g}, {res['zero_test']}")
    for c in report.get("checks", []):
        status = "PASS" if c["passed"] else "FAIL"
        tag = f"{c['system']}/" if "system" in c else ""
        mr = c["max_residual"]
        lines.append(f"[{status}] {tag}{c['name']}: max residual {mr if mr is None else f'{mr:.3e}'} (n={c['count']})")
    lines.append("PASS" if report["passed"] else "FAIL")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    code, report = run(argv)
    args = build_parser().parse_args(argv)
    text = json.dumps(report, indent=2)
    if args.output:
        try:
            Path(args.output).write_text(text + "\n")
        except OSError as exc:
            print(f"cannot write {args.output}: {exc}", file=sys.stderr)
            return 2
    print(text if args.json else _human(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
