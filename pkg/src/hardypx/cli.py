"""Command-line front end.

Exit codes: 0 when every requested check passes, 2 on a condition
violation or failing report, 1 on usage and configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import conditions, config, exponent, fieldexpr, plaplace, testfn, verify
from .fields import ScalarField
from .measures import MeasureError, default_measures, sample_densities
from .scenario import validate as validate_scenario

__all__ = ["run", "main", "build_parser"]

OK, VIOLATION, USAGE = 0, 2, 1


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hardypx",
                description="Numerical checks of weighted Hardy inequalities with variable exponents.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("config", help="scenario configuration file")
        return sp

    sp = cmd("validate", "admissibility, crucial-condition and hypothesis reports")
    sp.add_argument("--samples", type=int, help="grid points per axis")

    sp = cmd("verify", "check the inequality on seeded random test functions")
    sp.add_argument("--out", help="CSV path (default: output.csv of the config)")
    sp.add_argument("--count", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--family", choices=("auto",) + testfn.FAMILIES)
    sp.add_argument("--plot", action="store_true", help="also write a PNG next to the CSV")

    sp = cmd("probe", "maximise lhs/rhs over one test-function family")
    sp.add_argument("--out", help="CSV path for the trace")
    sp.add_argument("--family", choices=testfn.FAMILIES)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--plot", action="store_true")

    sp = cmd("laplacian", "radial closed form and finite differences at one point")
    sp.add_argument("--at", required=True, help="comma separated coordinates")
    sp.add_argument("--h", type=float, default=1e-4, help="difference step")

    sp = cmd("norm", "Luxemburg norm of an expression in the scenario's exponent space")
    sp.add_argument("--f", required=True, help="expression in x1..xn and r")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--resolution", type=int, default=16)

    sp = cmd("density", "sample both weight densities on a grid")
    sp.add_argument("--out", required=True, help="CSV path")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--plot", action="store_true")
    return p


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _fmt_point(x) -> str:
    return "(" + ", ".join(f"{v:.6g}" for v in np.atleast_1d(x)) + ")"


def _csv_path(arg, cfg, default_suffix) -> Path:
    if arg:
        return Path(arg)
    if "csv" in cfg.output:
        base = Path(cfg.output["csv"])
        # verify owns the configured path; other reports get a suffixed sibling
        if default_suffix == "_verify.csv":
            return base
        return base.with_name(base.stem + default_suffix)
    return Path(Path(cfg.source).stem + default_suffix)


def _write_csv(path: Path, columns, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns)
        w.writeheader()
        for row in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def _plot_path(csv_path: Path, cfg, requested: bool, configured: bool = False):
    """PNG beside the CSV; ``output.plot`` of the config names the verify figure."""
    if configured and "plot" in cfg.output:
        return Path(cfg.output["plot"])
    return csv_path.with_suffix(".png") if requested else None


# -- subcommands -------------------------------------------------------------

def _cmd_validate(args, cfg, s, out) -> int:
    res = args.samples or cfg.setting("samples")
    ok = True
    rep = validate_scenario(s, res)
    for c in rep.checks:
        ok &= c.passed
        line = f"{_status(c.passed)}  {c.name}"
        if not c.passed:
            line += f": {c.message}"
            if c.witness is not None:
                line += f" at x = {_fmt_point(c.witness)}"
        print(line, file=out)
    reports = [conditions.crucial_report(s, res)]
    if s.radial:
        reports.append(conditions.K_report(s, res))
    seen = {r.name for r in reports}
    reports += [r for r in conditions.corollary_hypotheses(s, res) if r.name not in seen]
    for r in reports:
        ok &= r.passed
        line = f"{_status(r.passed)}  {r.name}: min margin {r.min_margin:.6g}"
        if r.witness is not None and not r.passed:
            line += f" at x = {_fmt_point(r.witness)}"
        print(line, file=out)
    return OK if ok else VIOLATION


def _cmd_verify(args, cfg, s, out) -> int:
    count = args.count if args.count is not None else cfg.setting("count")
    seed = args.seed if args.seed is not None else cfg.setting("seed")
    fam = args.family or cfg.setting("family")
    reports = verify.batch_verify(s, count, seed, None if fam == "auto" else fam,
                                  cfg.setting("resolution"), cfg.setting("refinement"),
                                  cfg.setting("power"))
    path = _csv_path(args.out, cfg, "_verify.csv")
    _write_csv(path, verify.CSV_COLUMNS(s.dim), [r.row(s.dim) for r in reports])
    passed = sum(r.passed for r in reports)
    worst = max(r.ratio for r in reports)
    print(f"{passed}/{len(reports)} passed, max ratio {worst:.6g}; wrote {path}", file=out)
    plot = _plot_path(path, cfg, args.plot, configured=True)
    if plot is not None:
        from .plots import plot_verification
        plot_verification(reports, plot)
        print(f"wrote {plot}", file=out)
    return OK if passed == len(reports) else VIOLATION


def _cmd_probe(args, cfg, s, out) -> int:
    fam = args.family or cfg.setting("family")
    if fam == "auto":
        fam = testfn.family_for_dim(s.dim, 0)
    budget = args.budget if args.budget is not None else cfg.setting("budget")
    seed = args.seed if args.seed is not None else cfg.setting("seed")
    res = verify.sharpness_probe(s, fam, seed, budget, cfg.setting("resolution"),
                                 cfg.setting("refinement"), cfg.setting("power"))
    path = _csv_path(args.out, cfg, "_probe.csv")
    cols = ["evaluation"] + verify.CSV_COLUMNS(s.dim)
    _write_csv(path, cols, [{"evaluation": i, **r.row(s.dim)} for i, r in enumerate(res.trace)])
    print(f"best ratio {res.best_ratio:.10g} after {res.evaluations} evaluations; "
          f"centre {_fmt_point(res.best_params['center'])}, "
          f"radius {_fmt_point(res.best_params['radius'])}; wrote {path}", file=out)
    plot = _plot_path(path, cfg, args.plot)
    if plot is not None:
        from .plots import plot_probe
        plot_probe(res.trace, plot)
        print(f"wrote {plot}", file=out)
    return OK if res.best_ratio <= 1.0 else VIOLATION


def _parse_point(text: str, n: int) -> np.ndarray:
    try:
        x = np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise _UsageError(f"--at: cannot read {text!r} as comma separated numbers") from None
    if x.size != n:
        raise _UsageError(f"--at: expected {n} coordinates, got {x.size}")
    return x


def _cmd_laplacian(args, cfg, s, out) -> int:
    x = _parse_point(args.at, s.dim)
    fd = plaplace.plaplacian_general(s.u, s.exponent, x, h=args.h)
    if not s.radial:
        print(f"finite_difference  {fd:.12g}  (h = {args.h:g})", file=out)
        return OK
    rad = plaplace.plaplacian_radial(s.profile, s.exponent, x)
    rel = abs(rad - fd) / max(1.0, abs(rad))
    print(f"radial_closed_form {rad:.12g}", file=out)
    print(f"finite_difference  {fd:.12g}  (h = {args.h:g})", file=out)
    print(f"relative difference {rel:.3g}", file=out)
    return OK if rel <= 1e-4 else VIOLATION


def _cmd_norm(args, cfg, s, out) -> int:
    node = fieldexpr.parse(args.f)
    if fieldexpr.max_var_index(node) > s.dim:
        raise _UsageError(f"--f uses a coordinate beyond x{s.dim}")
    f = ScalarField.from_expr(node)
    norm = exponent.luxemburg_norm(f, s.exponent, s.domain, tol=args.tol,
                                   resolution=args.resolution, breakpoints=s.breakpoints)
    mod = exponent.modular(f, s.exponent, s.domain, args.resolution, s.breakpoints)
    print(f"luxemburg_norm {norm:.12g}", file=out)
    print(f"modular        {mod:.12g}", file=out)
    return OK


def _cmd_density(args, cfg, s, out) -> int:
    res = args.samples or cfg.setting("samples")
    measures = default_measures(s)
    X, w1, w2 = sample_densities(s, measures, res)
    path = Path(args.out)
    cols = [f"x{i + 1}" for i in range(s.dim)] + ["mu1", "mu2"]
    rows = [dict(zip(cols, [*x, a, b])) for x, a, b in zip(X.tolist(), w1.tolist(), w2.tolist())]
    _write_csv(path, cols, rows)
    print(f"{len(rows)} points; mu1 in [{w1.min():.6g}, {w1.max():.6g}], "
          f"mu2 in [{w2.min():.6g}, {w2.max():.6g}]; wrote {path}", file=out)
    for w in measures.warnings:
        print(f"warning: {w}", file=out)
    plot = _plot_path(path, cfg, args.plot)
    if plot is not None:
        from .plots import plot_density
        plot_density(X, w1, w2, plot)
        print(f"wrote {plot}", file=out)
    negative = bool(np.any(w1 < 0)) or bool(np.any(w2 < 0))
    if negative:
        print("violation: a density is negative on the sample grid", file=out)
    return VIOLATION if negative or measures.warnings else OK


COMMANDS = {"validate": _cmd_validate, "verify": _cmd_verify, "probe": _cmd_probe,
            "laplacian": _cmd_laplacian, "norm": _cmd_norm, "density": _cmd_density}


def run(argv=None, out=None, err=None) -> int:
    """Run one subcommand and return its exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(err)
        print(exc, file=err)
        return USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        cfg = config.load(args.config)
        s = config.build_scenario(cfg)
        return COMMANDS[args.command](args, cfg, s, out)
    except (config.ConfigError, fieldexpr.ExprSyntaxError, _UsageError) as exc:
        print(f"error: {exc}", file=err)
        return USAGE
    except (MeasureError, plaplace.OperatorError, fieldexpr.EvalError,
            exponent.NormConvergenceError, verify.ProbeError) as exc:
        print(f"violation: {exc}", file=err)
        return VIOLATION


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
