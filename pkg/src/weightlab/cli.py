"""
Command-line front end.

Exit codes: 0 pass, 2 degenerate input, 3 inequality failure, 4 hypothesis
violation, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import shlex
import sys
import warnings
from dataclasses import dataclass, fields
from pathlib import Path

from .dsl import parse_function, parse_grid, parse_weight, render_grid
from .errors import DegenerateWeightError, HypothesisViolation, WeightlabError
from .experiments import (
    TheoremReport,
    buckley_sharpness_scan,
    check_prop21_embedding,
    check_prop31_abs,
    check_thm12_a1_witness,
    check_thm16_sandwich,
    check_thm18_upsi,
    check_vpsi,
)
from .grid import CubeFamily
from .norms import NormSpec, evaluate_norm
from .profiles import parse_psi
from .reports import fmt, report_csv, report_json
from .weights import Weight, a1_constant, ainfty_constant, ap_constant

EXIT_OK = 0
EXIT_DEGENERATE = 2
EXIT_FAILED = 3
EXIT_HYPOTHESIS = 4
EXIT_USAGE = 64

EXPERIMENTS = ("thm16", "prop31", "thm18", "vpsi", "prop21", "buckley", "thm12")
DEFAULT_GRID = "1d:-1,1,512"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _exponent(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad exponent {text!r}") from None
    if math.isnan(v):
        raise argparse.ArgumentTypeError("exponent is NaN")
    return v


def _deltas(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad delta list {text!r}") from None


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to rerun a command; renders back to a canonical command line."""

    command: str
    experiment: str | None = None
    kind: str = "ap"
    weight: str | None = None
    f: str | None = None
    spec: str | None = None
    p: float | None = None
    q: float | None = None
    r: float | None = None
    alpha: float | None = None
    psi: str | None = None
    deltas: tuple[float, ...] | None = None
    grid: str = DEFAULT_GRID
    family: str = "all"
    K: int = 1024
    seed: int = 42
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        p, q, r = self.p, self.q, self.r
        if self.command == "experiment" and self.experiment == "prop21":
            if None in (p, q, r) or not 0 < r < q <= p:
                raise UsageError("prop21 needs 0 < r < q <= p")
        if self.command == "experiment" and self.experiment == "buckley":
            if p is None or q is None or not 1 < q < p:
                raise UsageError("buckley needs 1 < q < p")
        if self.spec is not None:
            try:
                NormSpec.parse(self.spec)
            except WeightlabError as exc:
                raise UsageError(str(exc)) from None
        if self.K < 1:
            raise UsageError("--K must be >= 1")

    @classmethod
    def parse(cls, argv: "str | list[str]") -> "RunConfig":
        if isinstance(argv, str):
            argv = shlex.split(argv)
        ns = build_parser().parse_args(argv)
        kw = {f.name: getattr(ns, f.name) for f in fields(cls) if hasattr(ns, f.name)}
        return cls(**kw)

    def render(self) -> str:
        """Canonical command line: fixed flag order, every option spelled out."""
        parts = [self.command]
        if self.experiment:
            parts.append(self.experiment)
        for f in fields(self):
            if f.name in ("command", "experiment"):
                continue
            v = getattr(self, f.name)
            if v is None:
                continue
            if f.name == "kind" and self.command != "constant":
                continue
            if f.name == "deltas":
                v = ",".join(fmt(float(d)) for d in v)
            elif isinstance(v, float):
                v = fmt(v)
            parts.append(f"--{f.name}")
            parts.append(str(v))
        return shlex.join(parts)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--weight")
    p.add_argument("--f")
    p.add_argument("--p", type=_exponent)
    p.add_argument("--grid", default=DEFAULT_GRID)
    p.add_argument("--family", default="all", choices=["all", "dyadic"])
    p.add_argument("--K", type=int, default=1024)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out")
    p.add_argument("--format", default="csv", choices=["csv", "json"])


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="weightlab", description="Numerical checks for Muckenhoupt weights.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)
    c = sub.add_parser("constant", help="A_p, A_1 or A_infinity constant with witness cube")
    _common(c)
    c.add_argument("--kind", default="ap", choices=["ap", "a1", "ainfty"])
    n = sub.add_parser("norm", help="weighted norm of a function")
    _common(n)
    n.add_argument("--spec", required=True)
    e = sub.add_parser("experiment", help="theorem checks and sweeps")
    e.add_argument("experiment", choices=EXPERIMENTS)
    _common(e)
    e.add_argument("--q", type=_exponent)
    e.add_argument("--r", type=_exponent)
    e.add_argument("--alpha", type=_exponent)
    e.add_argument("--psi")
    e.add_argument("--deltas", type=_deltas)
    return top


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _simple_report(cfg: RunConfig, name: str, values: dict) -> str:
    if cfg.format == "json":
        env = {"tool": "weightlab", "command": cfg.render(), "result": name, **values}
        return json.dumps(env, indent=2) + "\n"
    return "".join(f"{k}={fmt(v)}\n" for k, v in values.items())


def _weight(cfg: RunConfig, grid, default: str | None = None) -> Weight:
    spec = cfg.weight or default
    if spec is None:
        raise UsageError("--weight is required")
    return parse_weight(spec, grid)


def cmd_constant(cfg: RunConfig) -> int:
    grid = parse_grid(cfg.grid)
    w = _weight(cfg, grid)
    family = CubeFamily.parse(cfg.family)
    if cfg.kind == "ap":
        p = 2.0 if cfg.p is None else cfg.p
        value, cube = ap_constant(w, p, family)
    elif cfg.kind == "a1":
        value, cube = a1_constant(w, family)
    else:
        value, cube = ainfty_constant(w, family)
    _emit(_simple_report(cfg, cfg.kind, {
        "value": value, "witness": cube.describe(grid), "grid": grid.describe(), "family": family.value,
    }), cfg)
    return EXIT_OK


def cmd_norm(cfg: RunConfig) -> int:
    grid = parse_grid(cfg.grid)
    w = _weight(cfg, grid, "const:1")
    if cfg.f is None:
        raise UsageError("--f is required")
    f = parse_function(cfg.f, grid)
    family = CubeFamily.parse(cfg.family)
    spec = NormSpec.parse(cfg.spec)
    value, cube = evaluate_norm(f, w, spec, family)
    _emit(_simple_report(cfg, spec.render(), {
        "value": value, "witness": cube.describe(grid) if cube else "", "grid": grid.describe(),
        "family": family.value,
    }), cfg)
    return EXIT_OK


def run_experiment(cfg: RunConfig) -> TheoremReport:
    grid = parse_grid(cfg.grid)
    family = CubeFamily.parse(cfg.family)
    exp = cfg.experiment
    p = cfg.p
    if exp == "thm16":
        return check_thm16_sandwich(_weight(cfg, grid), 2.0 if p is None else p, family)
    if exp == "prop31":
        f = parse_function(cfg.f or "coord", grid)
        return check_prop31_abs(f, _weight(cfg, grid), 2.0 if p is None else p, family)
    if exp == "thm12":
        return check_thm12_a1_witness(_weight(cfg, grid), family)
    if exp == "prop21":
        f = parse_function(cfg.f or "const:1", grid)
        return check_prop21_embedding(f, _weight(cfg, grid, "const:1"), p, cfg.q, cfg.r, family)
    if exp in ("thm18", "vpsi"):
        if cfg.weight is None:
            alpha = 0.5 if cfg.alpha is None else cfg.alpha
            w = Weight.power_law(grid, alpha)
        else:
            w = _weight(cfg, grid)
        default_psi = "const:1" if exp == "thm18" else "box:0.5,1"
        psi = parse_psi(cfg.psi or default_psi, cfg.K)
        if exp == "thm18":
            return check_thm18_upsi(w, psi, 2.0 if p is None else p, family, seed=cfg.seed)
        return check_vpsi(w, psi, 2.0 if p is None else p, family)
    deltas = cfg.deltas or (1.0, 0.5, 0.25, 0.125)
    return buckley_sharpness_scan(p, cfg.q, deltas, grid, family)


def cmd_experiment(cfg: RunConfig) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = run_experiment(cfg)
    csv_text = report_csv(rep)
    json_text = report_json(rep, cfg.render())
    if cfg.out:
        out = Path(cfg.out)
        main_text, other_text = (csv_text, json_text) if cfg.format == "csv" else (json_text, csv_text)
        other = out.with_suffix(".json" if cfg.format == "csv" else ".csv")
        out.write_text(main_text)
        if other != out:
            other.write_text(other_text)
    else:
        sys.stdout.write(csv_text if cfg.format == "csv" else json_text)
    if rep.flags:
        return EXIT_HYPOTHESIS
    return EXIT_OK if rep.passed else EXIT_FAILED


COMMANDS = {"constant": cmd_constant, "norm": cmd_norm, "experiment": cmd_experiment}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = RunConfig.parse(argv)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateWeightError as exc:
        print(f"degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except HypothesisViolation as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except WeightlabError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help exits through argparse
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
