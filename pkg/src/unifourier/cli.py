"""
Command-line front end.

    unifourier kernels --set n_list=0,1,10
    unifourier synth --config run.cfg --out results/
    unifourier universal --set stages=3 --out results/
    unifourier verify hausdorff --set set_a=0 --set set_b=pi
    unifourier defaults
    unifourier acceptance

Configuration is a flat ``key = value`` file (``#`` starts a comment) plus
command-line overrides; ``unifourier defaults`` prints every key with its
default. Exit codes: 0 pass, 2 search or stage exhaustion, 3 invalid input,
1 anything else.
"""

from __future__ import annotations

import argparse
import ast
import csv
import json
import math
import operator
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import acceptance
from .config import TargetingConfig
from .exceptions import InvalidInput, UnifourierError
from .gadgets import BumpSpec, IndexSetSpec, bump
from .synthesizer import ExhaustionSchedule, TargetSpec, multi_point_target, universal_function
from .trig_core import TWO_PI, TrigPoly, dirichlet_eval, lebesgue_constant, partial_sum
from .verify import (
    FiniteCompactum,
    carleson_return_report,
    grid_values,
    hausdorff_distance,
    localization_report,
    uniform_universality_report,
)


@dataclass(frozen=True)
class RunConfig:
    """
    Every parameter a subcommand reads. Lists are comma separated; angles
    accept arithmetic with ``pi`` (e.g. ``2*pi/3``); complex values use Python
    syntax (``3j``, ``1-2j``).
    """

    # synthesis
    g: str = ""                  # "k:re:im" triples separated by spaces, empty = zero polynomial
    g_file: str = ""             # CSV of k,re,im (overrides g)
    points: str = "0, 2*pi/3, 4*pi/3"
    values: str = "0.5, -1, 1.5j"
    eps: float = 0.5
    n_min: int = 0
    n_cap: int = 100_000
    # staged construction
    stages: int = 3
    tolerances: str = ""         # empty = 1/j
    norm_budget: float = 1.0
    # kernels and sampling
    n_list: str = "0, 1, 2, 5, 10, 100"
    grid: int = 1024
    # verify
    set_a: str = "0"
    set_b: str = "pi"
    f_file: str = ""
    indices: str = "1, 2, 4, 8"
    t0: str = "0"
    localization_n: str = "64, 256, 1024"
    n_max: int = 1000
    thresholds: str = ""         # empty = 1/k, k = 1..10
    seed: int = 0


# -- parsing helpers -----------------------------------------------------------------

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv,
        ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_angle(text: str) -> float:
    """Arithmetic on numbers and ``pi``; nothing else is evaluated."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise InvalidInput(f"cannot parse angle {text!r}")

    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise InvalidInput(f"cannot parse angle {text!r}") from exc


def _split(text: str) -> list[str]:
    return [s.strip() for s in str(text).split(",") if s.strip()]


def parse_angles(text: str) -> list[float]:
    return [parse_angle(s) for s in _split(text)]


def parse_complex_list(text: str) -> list[complex]:
    try:
        return [complex(s.replace(" ", "")) for s in _split(text)]
    except ValueError as exc:
        raise InvalidInput(f"cannot parse complex list {text!r}") from exc


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(s) for s in _split(text)]
    except ValueError as exc:
        raise InvalidInput(f"cannot parse integer list {text!r}") from exc


def parse_poly(text: str) -> TrigPoly:
    if not text.strip():
        return TrigPoly.zero()
    triples = []
    for item in text.split():
        parts = item.split(":")
        if len(parts) != 3:
            raise InvalidInput(f"polynomial terms are k:re:im, got {item!r}")
        triples.append((int(parts[0]), float(parts[1]), float(parts[2])))
    return TrigPoly.from_triples(triples)


def read_poly_csv(path) -> TrigPoly:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        return TrigPoly.from_triples((int(r["k"]), float(r["re"]), float(r["im"])) for r in rows)
    except (KeyError, ValueError) as exc:
        raise InvalidInput(f"{path}: expected columns k,re,im") from exc


def _coerce(name: str, raw: str, kind):
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return str(raw)
    except ValueError as exc:
        raise InvalidInput(f"bad value for {name}: {raw!r}") from exc


def _field_types(cls) -> dict:
    hints = {"int": int, "float": float, "str": str}
    return {f.name: hints.get(f.type if isinstance(f.type, str) else f.type.__name__, str) for f in fields(cls)}


def read_config_file(path) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInput(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def build_configs(args) -> tuple[RunConfig, TargetingConfig]:
    raw = {}
    if args.config:
        try:
            raw.update(read_config_file(args.config))
        except OSError as exc:
            raise InvalidInput(f"cannot read config: {exc}") from exc
    for item in args.set or []:
        if "=" not in item:
            raise InvalidInput(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        raw[key.strip()] = value.strip()
    for flag, key in (("seed", "seed"), ("n_cap", "n_cap"), ("eps", "eps"), ("grid", "grid")):
        if getattr(args, flag, None) is not None:
            raw[key] = str(getattr(args, flag))

    run_types, tgt_types = _field_types(RunConfig), _field_types(TargetingConfig)
    run_kw, tgt_kw = {}, {}
    for key, value in raw.items():
        if key in run_types:
            run_kw[key] = _coerce(key, value, run_types[key])
        if key in tgt_types:
            tgt_kw[key] = _coerce(key, value, tgt_types[key])
        if key not in run_types and key not in tgt_types:
            raise InvalidInput(f"unknown config key {key!r}")
    run = replace(RunConfig(), **run_kw)
    tgt = replace(TargetingConfig(), **tgt_kw)
    if not (run.eps > 0 and math.isfinite(run.eps)):
        raise InvalidInput("eps must be positive")
    if run.norm_budget <= 0:
        raise InvalidInput("norm_budget must be positive")
    if run.grid < 1:
        raise InvalidInput("grid must be positive")
    return run, tgt


# -- writers -----------------------------------------------------------------


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])


def write_poly(path: Path, p: TrigPoly):
    write_csv(path, ("k", "re", "im"), p.to_triples())


def write_curve(path: Path, p: TrigPoly, grid: int):
    vals = grid_values(p, grid)
    t = TWO_PI * np.arange(grid) / grid
    write_csv(path, ("t", "re", "im"), ((float(a), float(v.real), float(v.imag)) for a, v in zip(t, vals)))


def write_text(path: Path, text: str):
    path.write_text(text if text.endswith("\n") else text + "\n")


def _base_poly(run: RunConfig) -> TrigPoly:
    return read_poly_csv(run.g_file) if run.g_file else parse_poly(run.g)


def _target(run: RunConfig) -> TargetSpec:
    return TargetSpec(tuple(parse_angles(run.points)), tuple(parse_complex_list(run.values)))


# -- subcommands ---------------------------------------------------------------


def cmd_kernels(args, run, tgt) -> int:
    out = _out_dir(args)
    ns = parse_int_list(run.n_list)
    if any(n < 0 for n in ns):
        raise InvalidInput("kernel orders must be nonnegative")
    write_csv(out / "lebesgue.csv", ("n", "lebesgue_constant"), ((n, lebesgue_constant(n)) for n in ns))
    t = TWO_PI * np.arange(run.grid) / run.grid
    rows = ((n, float(a), float(v)) for n in ns for a, v in zip(t, np.atleast_1d(dirichlet_eval(n, t))))
    write_csv(out / "dirichlet.csv", ("n", "t", "value"), rows)
    for n in ns:
        print(f"L_{n} = {lebesgue_constant(n):.10f}")
    return 0


def cmd_synth(args, run, tgt) -> int:
    out = _out_dir(args)
    g = _base_poly(run)
    lam = IndexSetSpec(run.n_min, run.n_cap)
    f, n, cert = multi_point_target(g, _target(run), run.eps, lam, tgt)
    write_poly(out / "f_coeffs.csv", f)
    write_curve(out / "curve.csv", partial_sum(f, n), run.grid)
    write_text(out / "certificate.json", cert.to_json())
    print(f"n = {n}, degree = {f.degree}, certificate {'passed' if cert.passed else 'FAILED'}")
    return 0 if cert.passed else 1


def cmd_universal(args, run, tgt) -> int:
    out = _out_dir(args)
    g = _base_poly(run)
    pts = parse_angles(run.points)
    vals = parse_complex_list(run.values)
    if len(pts) != len(vals):
        raise InvalidInput("points and values differ in length")
    tol = tuple(float(x) for x in _split(run.tolerances)) or None
    schedule = ExhaustionSchedule.prefixes(pts, run.stages, tol)
    res = universal_function(g, dict(zip(pts, vals)), schedule, run.norm_budget,
                             IndexSetSpec(run.n_min, run.n_cap), tgt)
    write_poly(out / "f_coeffs.csv", res.f)
    write_curve(out / "curve.csv", partial_sum(res.f, res.indices[-1]), run.grid)
    write_text(out / "stage_log.jsonl", "\n".join(rec.to_json() for rec in res.log))
    write_text(out / "certificates.json",
               json.dumps([c.to_dict() for c in res.certificates], sort_keys=True, indent=2))
    write_text(out / "certificate.json", res.certificates[-1].to_json())
    print(f"indices = {res.indices}, degree = {res.f.degree}, "
          f"stages {'passed' if res.passed else 'FAILED'}")
    return 0 if res.passed else 1


def _poly_for_verify(run: RunConfig) -> TrigPoly:
    return read_poly_csv(run.f_file) if run.f_file else _base_poly(run)


def cmd_verify(args, run, tgt) -> int:
    out = _out_dir(args)
    name = args.report
    if name == "hausdorff":
        d = hausdorff_distance(FiniteCompactum(tuple(parse_angles(run.set_a))),
                               FiniteCompactum(tuple(parse_angles(run.set_b))))
        write_text(out / "hausdorff.json", json.dumps({"distance": d}, sort_keys=True))
        print(repr(d))
    elif name == "return":
        f = _poly_for_verify(run)
        th = [float(x) for x in _split(run.thresholds)] or None
        rep = carleson_return_report(f, parse_int_list(run.indices), run.grid, th)
        write_text(out / "return.csv", rep.to_csv())
        write_text(out / "return.json", rep.to_json())
        print(f"density at final J: {rep.density[-1].tolist()}")
    elif name == "localization":
        rng = np.random.default_rng(run.seed)
        if run.f_file:
            u = read_poly_csv(run.f_file)
        else:
            c = rng.standard_normal(41) + 1j * rng.standard_normal(41)
            u = TrigPoly(c / np.sum(np.abs(c)))
        t0 = parse_angle(run.t0)
        F = parse_angles(run.points) if run.points else [t0 + math.pi]
        F = [t for t in F if abs(math.remainder(t - t0, TWO_PI)) > 1e-12]
        if not F:
            raise InvalidInput("localization needs points away from t0")
        half = 0.48 * min(abs(math.remainder(t - t0, TWO_PI)) for t in F)
        phi, _ = bump(BumpSpec(tuple((t - half, t + half) for t in F), ((t0 - half, t0 + half),),
                               tgt.bump_eta, tgt.bump_budget))
        rep = localization_report(u, phi, F, t0, parse_int_list(run.localization_n))
        write_text(out / "localization.csv", rep.to_csv())
        write_text(out / "localization.json", rep.to_json())
        print(rep.to_csv(), end="")
    elif name == "universality":
        f = _poly_for_verify(run)
        dictionary = [TrigPoly.constant(v) for v in parse_complex_list(run.values)]
        rep = uniform_universality_report(f, FiniteCompactum(tuple(parse_angles(run.points))),
                                          dictionary, run.n_max)
        write_text(out / "universality.csv", rep.to_csv())
        write_text(out / "universality.json", rep.to_json())
        print(rep.to_csv(), end="")
    else:  # pragma: no cover - argparse restricts choices
        raise InvalidInput(f"unknown report {name!r}")
    return 0


def cmd_defaults(args, run, tgt) -> int:
    for key, value in asdict(RunConfig()).items():
        print(f"{key} = {value}")
    for key, value in asdict(TargetingConfig()).items():
        print(f"{key} = {value}")
    return 0


def cmd_acceptance(args, run, tgt) -> int:
    results = acceptance.run_all(run.seed)
    for r in results:
        print(r.line())
    if args.out:
        out = _out_dir(args)
        write_text(out / "acceptance.json", json.dumps(
            [{"criterion": r.criterion, "name": r.name, "passed": r.passed, "detail": r.detail}
             for r in results], sort_keys=True, indent=2))
    return 0 if all(r.passed for r in results) else 1


# -- entry point ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors are invalid input (exit 3), not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(InvalidInput.exit_code, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key = value configuration file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory (default .)")
    common.add_argument("--n-cap", dest="n_cap", type=int, help="largest admissible index")
    common.add_argument("--eps", type=float, help="tolerance for synth")
    common.add_argument("--grid", type=int, help="sample count for curves and reports")

    parser = _Parser(prog="unifourier", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("kernels", parents=[common], help="Dirichlet samples and Lebesgue constants")
    sub.add_parser("synth", parents=[common], help="multi-point targeting with certificate")
    sub.add_parser("universal", parents=[common], help="staged construction over nested point sets")
    v = sub.add_parser("verify", parents=[common], help="verification reports")
    v.add_argument("report", choices=["return", "localization", "universality", "hausdorff"])
    sub.add_parser("defaults", parents=[common], help="print every config key with its default")
    sub.add_parser("acceptance", parents=[common], help="run the acceptance checks")
    return parser


COMMANDS = {
    "kernels": cmd_kernels,
    "synth": cmd_synth,
    "universal": cmd_universal,
    "verify": cmd_verify,
    "defaults": cmd_defaults,
    "acceptance": cmd_acceptance,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        run, tgt = build_configs(args)
        return COMMANDS[args.command](args, run, tgt)
    except UnifourierError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
