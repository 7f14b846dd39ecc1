"""Command-line surface: witness tables, growth curves, contour and
Sturm-Liouville studies, and the named verification suites.

Exit codes: 0 all checks passed, 1 a mathematical check failed, 2 usage or
configuration error.  All CSV output is UTF-8 with mandatory headers and
'.' decimals, written atomically; identical config + seed reproduces the
files byte for byte.  KCL_THREADS caps the parallelism of embarrassingly
parallel command loops.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, KclabError, OrderViolation
from .eigenspectral import classify_infinity, growth_curve, interval
from .langer_contour import (
    build_discretized_model,
    contour_spectral_projection,
    verify_spectral_calculus,
)
from .membership import witness_table
from .model_space import ModelWeight
from .quadrature import QuadratureConfig
from .sturm_liouville import (
    assemble_operator,
    compute_eigenpairs,
    eval_u0,
    eval_u0_prime,
    make_problem,
    partial_sum_study,
    spectral_gap,
    u0_form_integral,
)
from .suites import run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "weight.epsilon": float,
    "weight.tail_power": float,
    "weight.rule": str,
    "quadrature.rel_tol": float,
    "quadrature.abs_tol": float,
    "quadrature.k0": float,
    "quadrature.doublings": int,
    "quadrature.nodes_per_panel": int,
    "quadrature.exponent_margin": float,
    "alphas": str,
    "out": str,
    "seed": int,
}


@dataclass(frozen=True)
class RunConfig:
    weight: ModelWeight = ModelWeight()
    quadrature: QuadratureConfig = QuadratureConfig()
    alphas: tuple = (0.0, 0.5, 1.0, 2.0)
    out_dir: str = "kclab-out"
    seed: int = 0

    def canonical_text(self) -> str:
        lines = [
            f"weight.epsilon = {self.weight.epsilon!r}",
            f"weight.tail_power = {self.weight.tail_power!r}",
            f"quadrature.rel_tol = {self.quadrature.rel_tol!r}",
            f"quadrature.abs_tol = {self.quadrature.abs_tol!r}",
            f"quadrature.k0 = {self.quadrature.k0!r}",
            f"quadrature.doublings = {self.quadrature.doublings}",
            f"quadrature.nodes_per_panel = {self.quadrature.nodes_per_panel}",
            f"quadrature.exponent_margin = {self.quadrature.exponent_margin!r}",
            f"alphas = {','.join(f'{a:g}' for a in self.alphas)}",
            f"seed = {self.seed}",
        ]
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


def parse_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = (s.strip() for s in line.partition("="))
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](val)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}")
    return values


def build_run_config(args) -> RunConfig:
    values = parse_config_file(args.config) if args.config else {}
    if values.get("weight.rule", "default") != "default":
        raise ConfigError("only weight.rule = default is configurable from "
                          "text; custom rules need the library API")
    weight = ModelWeight(epsilon=values.get("weight.epsilon", 1.0),
                         tail_power=values.get("weight.tail_power", 0.0))
    quad_kwargs = {}
    for name in ("rel_tol", "abs_tol", "k0", "doublings", "nodes_per_panel",
                 "exponent_margin"):
        key = f"quadrature.{name}"
        if key in values:
            quad_kwargs[name] = values[key]
    quadrature = QuadratureConfig(**quad_kwargs)
    alphas = _parse_alpha_list(values["alphas"]) if "alphas" in values \
        else (0.0, 0.5, 1.0, 2.0)
    if getattr(args, "alpha", None):
        alphas = _parse_alpha_list(args.alpha)
    out_dir = getattr(args, "out", None) or values.get("out", "kclab-out")
    seed = args.seed if getattr(args, "seed", None) is not None \
        else values.get("seed", 0)
    return RunConfig(weight, quadrature, alphas, out_dir, seed)


def _parse_alpha_list(text: str) -> tuple:
    try:
        alphas = tuple(float(a) for a in str(text).split(","))
    except ValueError as exc:
        raise ConfigError(f"bad alpha list {text!r}: {exc}")
    for a in alphas:
        if not 0.0 <= a <= 2.0:
            raise ConfigError(f"alpha {a:g} outside [0, 2]")
    return alphas


def _parse_k_range(text: str) -> list:
    """'2..256' doubles from 2 to 256; '4,16,64' is taken literally."""
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = float(lo_s), float(hi_s)
        if not 0 < lo < hi:
            raise ConfigError(f"bad k range {text!r}")
        ks = []
        k = lo
        while k <= hi * (1 + 1e-12):
            ks.append(k)
            k *= 2.0
        return ks
    try:
        ks = [float(k) for k in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad k list {text!r}: {exc}")
    if not all(b > a for a, b in zip(ks, ks[1:])):
        raise ConfigError("k values must be strictly increasing")
    return ks


def _thread_count() -> int:
    raw = os.environ.get("KCL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _parallel_map(fn, items):
    """Order-preserving map, parallel only when KCL_THREADS > 1."""
    n = _thread_count()
    items = list(items)
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v != v:
            return "nan"
        if v in (math.inf, -math.inf):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path: Path, header: list, rows: list) -> None:
    """Atomic CSV write: header + rows, '.' decimals, repr round-trip floats."""
    path.parent.mkdir(parents=True, exist_ok=True)
    text = ",".join(header) + "\n"
    for row in rows:
        text += ",".join(_fmt(v) for v in row) + "\n"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-csv-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_summary(out_dir: Path, cfg: RunConfig, entries: dict) -> None:
    lines = [f"config_hash = {cfg.config_hash()}"]
    for key, value in entries.items():
        lines.append(f"{key} = {value}")
    lines.append("")
    lines.append("# canonical configuration")
    for line in cfg.canonical_text().splitlines():
        lines.append(f"# {line}")
    out_dir.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=".tmp-sum-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, out_dir / "run_summary.txt")
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _print_checks(checks, stream=None) -> bool:
    stream = stream or sys.stdout
    width = max((len(c.name) for c in checks), default=10) + 2
    ok = True
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        ok = ok and c.passed
        print(f"  {c.name:<{width}} measured={c.measured:<12.4e} "
              f"tol={c.tolerance:<10.3e} {status}", file=stream)
    return ok


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_membership(args) -> int:
    cfg = build_run_config(args)
    if args.beta is None or args.alpha is None:
        raise ConfigError("membership needs --alpha and --beta")
    try:
        alpha = float(args.alpha)
        beta = float(args.beta)
    except ValueError as exc:
        raise ConfigError(f"bad --alpha/--beta: {exc}")
    try:
        table = witness_table(alpha, beta, cfg.weight, cfg.quadrature)
    except OrderViolation as exc:
        raise ConfigError(str(exc))
    out = Path(cfg.out_dir)
    rows = [(f"{table.alpha:g}", f"{table.beta:g}", r.function,
             f"{r.domain_alpha:g}", r.verdict.value, r.expected.value)
            for r in table.rows]
    write_csv(out / "membership.csv",
              ["alpha", "beta", "function", "domain_alpha", "verdict",
               "expected"], rows)
    write_summary(out, cfg, {"command": "membership",
                             "pattern_holds": table.pattern_holds})
    for r in table.rows:
        mark = "ok" if r.matches else "MISMATCH"
        print(f"  {r.function:6s} vs dom t_{r.domain_alpha:g}: "
              f"{r.verdict.value:12s} expected {r.expected.value:12s} {mark}")
    return EXIT_OK if table.pattern_holds else EXIT_CHECK_FAILED


def cmd_growth(args) -> int:
    cfg = build_run_config(args)
    ks = _parse_k_range(args.k) if args.k else [2.0**j for j in range(1, 9)]
    out = Path(cfg.out_dir)

    def one(alpha):
        curve = growth_curve(alpha, ks, None, cfg.weight, cfg.quadrature)
        verdict = classify_infinity(curve, cfg.quadrature)
        return curve, verdict

    results = _parallel_map(one, cfg.alphas)
    dominance_ok = True
    summary = {"command": "growth", "k_schedule": ",".join(f"{k:g}" for k in ks)}
    for alpha, (curve, verdict) in zip(cfg.alphas, results):
        rows = []
        for i, (k, est, paper, variant) in enumerate(curve.samples):
            last = i == len(curve.samples) - 1
            rows.append((f"{alpha:g}", k, est, paper, variant,
                         curve.fitted_exponent if last else ""))
            if est < variant - 1e-9:
                dominance_ok = False
        write_csv(out / f"growth_alpha{alpha:g}.csv",
                  ["alpha", "k", "norm_estimate", "paper_lower_bound",
                   "sqrt_variant_bound", "fitted_exponent"], rows)
        summary[f"alpha_{alpha:g}_classification"] = verdict.classification
        summary[f"alpha_{alpha:g}_fitted_exponent"] = _fmt(verdict.fitted_exponent)
        print(f"  alpha={alpha:g}: fitted_exponent={verdict.fitted_exponent:.4f} "
              f"classification={verdict.classification}")
    write_summary(out, cfg, summary)
    return EXIT_OK if dominance_ok else EXIT_CHECK_FAILED


def cmd_contour(args) -> int:
    cfg = build_run_config(args)
    out = Path(cfg.out_dir)
    n = args.n or 8
    seeds = range(args.seeds) if args.seeds else range(1)
    rng_grid = [-4.5, -3.5, -2.5, -1.5, 1.5, 2.5, 3.5, 4.5] if n == 8 else None

    def one(seed):
        if rng_grid is not None and seed == 0:
            grid = np.asarray(rng_grid)
        else:
            rng = np.random.default_rng(cfg.seed + seed)
            pos = cfg.weight.epsilon + 0.25 + np.cumsum(
                rng.uniform(0.2, 1.0, n // 2))
            grid = np.concatenate([-pos[::-1], pos])
        model = build_discretized_model(cfg.alphas[0] if cfg.alphas else 0.5,
                                        cfg.weight, grid)
        lo = 0.5 * (grid[n // 2] + grid[n // 2 + 1])
        hi = grid[-1] + 0.5
        d1 = interval(lo, hi)
        d2 = interval(grid[0] - 0.5, 0.5 * (grid[n // 4] + grid[n // 4 + 1]))
        report = verify_spectral_calculus(model, d1, d2)
        proj = contour_spectral_projection(model, d1)
        return model, report, proj

    results = _parallel_map(one, list(seeds))
    all_ok = True
    report_rows = []
    for seed, (model, report, proj) in zip(seeds, results):
        for c in report.checks:
            report_rows.append((seed, c.name, c.measured, c.tolerance,
                                "pass" if c.passed else "fail"))
            all_ok = all_ok and c.passed
    write_csv(out / "contour_report.csv",
              ["seed", "property", "measured", "tolerance", "status"],
              report_rows)
    model, _, proj = results[0]
    heat_rows = [(i, j, float(np.real(proj[i, j])))
                 for i in range(model.size) for j in range(model.size)]
    write_csv(out / "contour_projection.csv", ["i", "j", "value"], heat_rows)
    write_summary(out, cfg, {"command": "contour", "models": len(results),
                             "all_passed": all_ok})
    print(f"  {len(report_rows)} property checks over {len(results)} model(s): "
          f"{'all passed' if all_ok else 'FAILURES'}")
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def cmd_sl(args) -> int:
    cfg = build_run_config(args)
    out = Path(cfg.out_dir)
    n_cells = args.mesh or 2048
    problem = make_problem(n_cells)
    op = assemble_operator(problem)
    pairs = compute_eigenpairs(op, count_per_sign=args.pairs or 24)
    write_csv(out / "eigenvalues.csv", ["n", "lambda", "residual"],
              [(p.index, p.lam, p.residual) for p in pairs])
    coeffs_rows = []
    from .sturm_liouville import expansion_coefficients
    coeffs = expansion_coefficients((eval_u0, eval_u0_prime), pairs, op)
    for p, c in zip(pairs, coeffs):
        coeffs_rows.append((p.index, p.lam, c))
    write_csv(out / "coefficients.csv", ["n", "lambda", "c_n"], coeffs_rows)
    lams = np.array([p.lam for p in pairs])
    top = 0.999 * min(lams.max(), -lams.min())
    first = 1.05 * max(min(l for l in lams if l > 0),
                       -max(l for l in lams if l < 0))
    sched = np.geomspace(first, top, args.schedule_points or 10)
    rep = partial_sum_study((eval_u0, eval_u0_prime), pairs, sched, op)
    write_csv(out / "trajectories.csv",
              ["m", "norm_S", "norm_S_plus", "norm_S_minus"],
              list(zip(rep.schedule, rep.norm_S, rep.norm_S_plus,
                       rep.norm_S_minus)))
    gap = spectral_gap(pairs)
    dom = u0_form_integral(cfg.quadrature)
    checks_ok = (gap > 0 and max(p.residual for p in pairs) <= 1e-10
                 and dom.converged)
    grow = max((np.max(t) / t[0] for t in (rep.norm_S_plus, rep.norm_S_minus)
                if t[0] > 0), default=0.0)
    write_summary(out, cfg, {
        "command": "sl", "mesh_cells": n_cells, "spectral_gap": _fmt(gap),
        "u0_integral_status": dom.status.value,
        "max_one_sided_growth_factor": _fmt(float(grow)),
    })
    print(f"  {len(pairs)} eigenpairs, gap={gap:.4g}, u0 integral "
          f"{dom.status.value}, one-sided growth x{grow:.2f}")
    return EXIT_OK if checks_ok else EXIT_CHECK_FAILED


def cmd_verify(args) -> int:
    cfg = build_run_config(args)
    name = args.suite or "all"
    kwargs = {}
    if name == "thm-2.1":
        if args.n:
            kwargs["sizes"] = (args.n,)
        if args.seeds:
            kwargs["seeds"] = range(args.seeds)
    if name == "example-5.1" and args.mesh:
        kwargs["n_cells"] = args.mesh
    try:
        checks = run_suite(name, **kwargs)
    except KeyError as exc:
        raise ConfigError(str(exc))
    print(f"suite {name}:")
    ok = _print_checks(checks)
    out = Path(cfg.out_dir)
    write_csv(out / f"verify_{name.replace('.', '_')}.csv",
              ["suite", "check", "measured", "tolerance", "status"],
              [(name, c.name, c.measured, c.tolerance,
                "pass" if c.passed else "fail") for c in checks])
    write_summary(out, cfg, {"command": "verify", "suite": name,
                             "all_passed": ok})
    print(f"  => {'PASS' if ok else 'FAIL'} ({len(checks)} checks)")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kclab",
        description="Indefinite form closures: membership witnesses, "
                    "eigenspectral norm growth, contour projections and the "
                    "Sturm-Liouville model study.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="plain-text key = value config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="base RNG seed")

    p = sub.add_parser("membership", help="set-difference witness table")
    common(p)
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    p.set_defaults(fn=cmd_membership)

    p = sub.add_parser("growth", help="norm growth curves of E((eps,k])")
    common(p)
    p.add_argument("--alpha", help="comma list of closure parameters")
    p.add_argument("--k", help="k schedule, '2..256' or comma list")
    p.set_defaults(fn=cmd_growth)

    p = sub.add_parser("contour", help="contour projections on discrete models")
    common(p)
    p.add_argument("--alpha", help="closure parameter for the Gram")
    p.add_argument("--n", type=int, help="model size (even)")
    p.add_argument("--seeds", type=int, help="number of random models")
    p.set_defaults(fn=cmd_contour)

    p = sub.add_parser("sl", help="indefinite Sturm-Liouville study")
    common(p)
    p.add_argument("--mesh", type=int, help="cell count (even)")
    p.add_argument("--pairs", type=int, help="eigenpairs per sign")
    p.add_argument("--schedule-points", type=int, dest="schedule_points")
    p.set_defaults(fn=cmd_sl)

    p = sub.add_parser("verify", help="run a named verification suite")
    common(p)
    p.add_argument("--suite", help="suite name or 'all'")
    p.add_argument("--alpha", help="ignored unless the suite takes one")
    p.add_argument("--n", type=int, help="model size for thm-2.1")
    p.add_argument("--seeds", type=int, help="seed count for thm-2.1")
    p.add_argument("--mesh", type=int, help="cell count for example-5.1")
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KclabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
