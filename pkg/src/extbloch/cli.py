"""Command line front end.

    extbloch invariants FILE [--fill CUSP=A,B[,G,D]] [--method direct|corrected|both]
    extbloch lens N
    extbloch five-term-check COUNT
    extbloch pachner FILE --move 23:face=T/F | 32:edge=K

Exit status 1 means the input could not be parsed, 2 a shape solver
failure, 3 a flattening failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .branchlog import PI2, DEFAULT_TOL, mod_pi2
from .ebloch import BlochSum, five_term_instance, nu_vanishes, r_of_sum, verify_five_term_geometric
from .flatten_solver import FlatteningError
from .flattening import DegenerateSimplexError
from .invariants import (
    InvariantReport,
    labeled_invariants_seeded,
    lens_space_class,
    manifold_invariants,
)
from .shapes import DegenerateShapeError, Filling, SolverError
from .tricomplex import (
    EmptyComplexError,
    GluingError,
    LinkError,
    MoveError,
    OrderedTriangulation,
    OrientationError,
    ParseError,
    pachner_23,
    pachner_32,
    parse,
)

EXIT_PARSE, EXIT_SOLVER, EXIT_FLATTENING = 1, 2, 3


@dataclass
class RunConfig:
    path: str
    fillings: dict = field(default_factory=dict)
    method: str = "direct"
    tol: float = DEFAULT_TOL
    seed: int = 0
    fmt: str = "text"


def fixture_path(name: str) -> Optional[Path]:
    """Path of a bundled document, if ``name`` names one."""
    res = resources.files("extbloch") / "data" / Path(name).name
    return Path(str(res)) if res.is_file() else None


def load_document(path: str) -> OrderedTriangulation:
    p = Path(path)
    if not p.exists():
        bundled = fixture_path(path)
        if bundled is None:
            raise ParseError(f"{path}: no such file")
        p = bundled
    try:
        text = p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        return parse(text)
    except (ParseError, GluingError, OrientationError, EmptyComplexError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def parse_fill(spec: str) -> tuple[int, Filling]:
    try:
        cusp, rest = spec.split("=", 1)
        nums = [int(x) for x in rest.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad filling {spec!r}; expected CUSP=A,B[,G,D]")
    if len(nums) not in (2, 4):
        raise argparse.ArgumentTypeError(f"bad filling {spec!r}; expected CUSP=A,B[,G,D]")
    try:
        return int(cusp), Filling(*nums)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _f(x: float) -> float:
    return float(f"{x:.15g}")


def _symmetric(x: float, period: float) -> float:
    """Representative in (-period/2, period/2]."""
    r = x % period
    return r - period if r > period / 2 else r


def beta_json(beta: BlochSum) -> list[dict]:
    return [{"z": [_f(prm.z.real), _f(prm.z.imag)], "p": prm.p, "q": prm.q, "coef": c}
            for c, prm in beta.terms]


def report_json(rep: InvariantReport) -> dict:
    return {
        "volume": _f(rep.volume),
        "cs_mod_pi2": _f(_symmetric(rep.cs, PI2)),
        "cs_over_2pi2_mod_half": _f(_symmetric(rep.cs_over_2pi2, 0.5)),
        "beta": beta_json(rep.beta),
        "method": rep.method,
        "warnings": list(rep.warnings),
    }


def report_text(rep: InvariantReport, name: str = "") -> str:
    d = report_json(rep)
    lines = [f"{name} [{rep.method}]".strip(),
             f"  volume              {d['volume']:.15g}",
             f"  cs mod pi^2         {d['cs_mod_pi2']:.15g}",
             f"  cs/(2 pi^2) mod 1/2 {d['cs_over_2pi2_mod_half']:.15g}"]
    for lam in rep.complex_lengths:
        lines.append(f"  core length         {lam.real:.15g} {lam.imag:+.15g}i")
    lines.append("  beta:")
    for t in d["beta"]:
        re, im = t["z"]
        lines.append(f"    {t['coef']:+d} [{re:.15g}{im:+.15g}i; {t['p']}, {t['q']}]")
    for w in rep.warnings:
        lines.append(f"  warning: {w}")
    return "\n".join(lines)


def cmd_invariants(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    tri = load_document(cfg.path)
    if tri.labels is not None:
        res = labeled_invariants_seeded(tri, cfg.seed)
    else:
        res = manifold_invariants(tri, cfg.fillings, cfg.method)
    reports = res.reports
    if cfg.fmt == "json":
        payload = [report_json(r) for r in reports]
        print(json.dumps(payload[0] if len(payload) == 1 else payload), file=out)
    else:
        print("\n".join(report_text(r, tri.name) for r in reports), file=out)
        if len(reports) == 2:
            gap = reports[0].r_value.distance(reports[1].r_value)
            status = "agree" if gap < cfg.tol else "DISAGREE"
            print(f"methods {status}: difference {gap:.3e} mod pi^2", file=out)
    if len(reports) == 2 and reports[0].r_value.distance(reports[1].r_value) >= cfg.tol:
        return EXIT_FLATTENING
    return 0


def cmd_lens(n: int, cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    beta, rep = lens_space_class(n, cfg.seed)
    expected = mod_pi2(PI2 / n)
    resid = rep.r_value.distance(expected)
    if cfg.fmt == "json":
        d = report_json(rep)
        d.update({"n": n, "r_value": [_f(rep.r_value.real), _f(rep.r_value.imag)],
                  "residual": _f(resid)})
        print(json.dumps(d), file=out)
    else:
        print(report_text(rep, f"L({n},1)"), file=out)
        print(f"R = {rep.r_value.real:.15g} {rep.r_value.imag:+.3e}i; pi^2/{n} = "
              f"{expected.real:.15g}; residual {resid:.3e}", file=out)
    return 0 if resid < cfg.tol else EXIT_FLATTENING


def five_term_samples(count: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        y = complex(rng.uniform(-2, 2), rng.uniform(0.05, 3))
        a, b = rng.uniform(0.02, 0.98, size=2)
        if a + b >= 0.98:
            a, b = 0.98 - b, 0.98 - a
        x = a + b * y
        branches = [int(v) for v in rng.integers(-3, 4, size=5)]
        yield five_term_instance(x, y, *branches)


def cmd_five_term_check(count: int, cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    worst, disagree = 0.0, 0
    for inst in five_term_samples(count, cfg.seed):
        worst = max(worst, r_of_sum(inst.bloch_sum()).distance(0))
        if nu_vanishes(inst) != verify_five_term_geometric(inst.points(), inst.flats()):
            disagree += 1
    ok = worst < cfg.tol and disagree == 0
    if cfg.fmt == "json":
        print(json.dumps({"count": count, "seed": cfg.seed, "max_residual": _f(worst),
                          "criteria_disagreements": disagree, "ok": ok}), file=out)
    else:
        print(f"{count} instances, seed {cfg.seed}: max |sum (-1)^i R| mod pi^2 = {worst:.3e}; "
              f"criteria disagreements: {disagree}", file=out)
    return 0 if ok else EXIT_FLATTENING


def parse_move(spec: str):
    try:
        kind, arg = spec.split(":", 1)
        key, val = arg.split("=", 1)
        if kind == "23" and key == "face":
            t, f = val.split("/")
            return "23", (int(t), int(f))
        if kind == "32" and key == "edge":
            return "32", (int(val),)
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"bad move {spec!r}; expected 23:face=T/F or 32:edge=K")


def cmd_pachner(cfg: RunConfig, move, out=None) -> int:
    out = out or sys.stdout
    tri = load_document(cfg.path)
    kind, args = move
    new = pachner_23(tri, *args) if kind == "23" else pachner_32(tri, *args)
    if tri.labels is not None:
        before = labeled_invariants_seeded(tri, cfg.seed).reports[0]
        after = labeled_invariants_seeded(new, cfg.seed).reports[0]
    else:
        before = manifold_invariants(tri).reports[0]
        after = manifold_invariants(new).reports[0]
    delta = before.r_value.distance(after.r_value)
    if cfg.fmt == "json":
        print(json.dumps({"before": report_json(before), "after": report_json(after),
                          "tetrahedra": [len(tri), len(new)], "delta": _f(delta)}), file=out)
    else:
        print(f"{tri.name}: {len(tri)} -> {len(new)} tetrahedra", file=out)
        print(report_text(before, "before"), file=out)
        print(report_text(after, "after"), file=out)
        print(f"invariant delta {delta:.3e} mod pi^2", file=out)
    return 0 if delta < cfg.tol else EXIT_FLATTENING


def default_tol() -> float:
    env = os.environ.get("EXTBLOCH_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            pass
    return DEFAULT_TOL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="congruence tolerance (default 1e-9, or $EXTBLOCH_TOL)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "json"), default="text")

    ap = argparse.ArgumentParser(prog="extbloch", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("invariants", parents=[common], help="volume and Chern-Simons invariant")
    p.add_argument("file")
    p.add_argument("--fill", action="append", type=parse_fill, default=[], metavar="CUSP=A,B[,G,D]")
    p.add_argument("--method", choices=("direct", "corrected", "both"), default="direct")
    p = sub.add_parser("lens", parents=[common], help="class of the lens space L(n,1)")
    p.add_argument("n", type=int)
    p = sub.add_parser("five-term-check", parents=[common], help="random five-term relations")
    p.add_argument("count", type=int)
    p = sub.add_parser("pachner", parents=[common], help="invariant before and after a move")
    p.add_argument("file")
    p.add_argument("--move", required=True, type=parse_move)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tol = args.tol if args.tol is not None else default_tol()
    cfg = RunConfig(path=getattr(args, "file", ""), tol=tol, seed=args.seed, fmt=args.format)
    try:
        if args.command == "invariants":
            cfg.fillings = dict(args.fill)
            cfg.method = args.method
            return cmd_invariants(cfg)
        if args.command == "lens":
            return cmd_lens(args.n, cfg)
        if args.command == "five-term-check":
            return cmd_five_term_check(args.count, cfg)
        return cmd_pachner(cfg, args.move)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SolverError, DegenerateShapeError, DegenerateSimplexError, LinkError, MoveError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except FlatteningError as exc:
        print(f"flattening error: {exc}", file=sys.stderr)
        return EXIT_FLATTENING
    except ValueError as exc:
        # bad cusp index and similar configuration problems
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
