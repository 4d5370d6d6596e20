"""Configuration-driven experiment runner.

Reads a JSON experiment config, dispatches to the library constructions,
and emits a machine-readable residual report (json), a flat table (csv), or
a human summary (text).  Exit code 0 means every configured check passed,
1 means some numerical check failed, 2 a config/schema problem, 3 an
unwritable output destination.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .roots import TOL_ROOT, BranchFunction
from .spans import amplification_iso_check, generate_span
from .torus import (
    TOL_TORUS,
    TorusParams,
    anticommuting_root_example,
    clock_matrix,
    clock_shift,
    iterate_theta_halving,
)
from .towers import (
    TOL_EMBED,
    CompactFunction,
    build_tower,
    level_independence_residual,
)

DEFAULT_MAX_DIM = 128

KINDS = ("tower", "torus", "theta_tower", "span", "lemma_iso", "anticommute_demo")

DEFAULT_CHECKS = {
    "anticommute_demo": {"square_residual": 0.0, "anticommute_residual": 0.0},
    "torus": {
        "relation_residual": TOL_TORUS,
        "clock_order_residual": TOL_TORUS,
        "shift_order_residual": TOL_TORUS,
    },
    "theta_tower": {"max_image_relation_residual": 1e-9},
    "tower": {"max_squaring_residual": TOL_ROOT, "max_level_independence": TOL_EMBED},
    "span": {"span_dim_error": 0.0, "max_generator_membership": 1e-10},
    "lemma_iso": {
        "multiplicativity_residual": 1e-8,
        "adjoint_residual": 1e-8,
        "module_residual": 1e-8,
        "span_dim_mismatch": 0.0,
    },
}


class ConfigError(ValueError):
    """A config file failed schema validation."""


@dataclass
class ExperimentConfig:
    kind: str
    parameters: dict
    name: str = ""
    checks: dict = field(default_factory=dict)
    seed: int = 0


def _require(params: dict, key: str, kind: str):
    if key not in params:
        raise ConfigError(f"experiment kind '{kind}' requires parameter '{key}'")
    return params[key]


def parse_experiment(obj: dict, index: int, seed: int) -> ExperimentConfig:
    if not isinstance(obj, dict):
        raise ConfigError(f"experiment {index} must be an object")
    kind = obj.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"experiment {index}: unknown kind {kind!r}; expected one of {KINDS}")
    params = obj.get("parameters", {})
    if not isinstance(params, dict):
        raise ConfigError(f"experiment {index}: 'parameters' must be an object")
    checks = dict(DEFAULT_CHECKS[kind])
    user_checks = obj.get("checks", {})
    if not isinstance(user_checks, dict):
        raise ConfigError(f"experiment {index}: 'checks' must be an object")
    checks.update({str(k): float(v) for k, v in user_checks.items()})
    name = str(obj.get("name", f"{kind}-{index}"))
    return ExperimentConfig(kind=kind, parameters=params, name=name, checks=checks, seed=seed)


def parse_config(data, seed_override: int | None = None) -> tuple[list[ExperimentConfig], int]:
    """Accept a single experiment object, a list, or {"seed", "experiments"}."""
    if isinstance(data, list):
        data = {"experiments": data}
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object or list")
    if "experiments" in data:
        experiments = data["experiments"]
        if not isinstance(experiments, list) or not experiments:
            raise ConfigError("'experiments' must be a non-empty list")
    elif "kind" in data:
        experiments = [data]
    else:
        raise ConfigError("config needs 'experiments' or a top-level 'kind'")
    seed = int(data.get("seed", 0)) if seed_override is None else int(seed_override)
    return [parse_experiment(e, i, seed) for i, e in enumerate(experiments)], seed


def _torus_params(params: dict, kind: str, max_dim: int) -> TorusParams:
    p = int(_require(params, "p", kind))
    q = int(_require(params, "q", kind))
    if q < 1:
        raise ConfigError(f"{kind}: q must be positive")
    if q > max_dim:
        raise ConfigError(f"{kind}: dimension {q} exceeds the maximum {max_dim}")
    return TorusParams(p, q)


def _branches_from_params(params: dict, depth: int) -> BranchFunction | list[BranchFunction]:
    choice = params.get("branches", "principal")
    if choice == "principal":
        return BranchFunction.principal(2)
    if isinstance(choice, list):
        if len(choice) != depth:
            raise ConfigError(f"tower: need {depth} branches, got {len(choice)}")
        try:
            return [BranchFunction.from_json(b) for b in choice]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"tower: bad branch data: {exc}") from exc
    raise ConfigError("tower: 'branches' must be \"principal\" or a list of branch objects")


def _functions_from_params(params: dict) -> list[CompactFunction]:
    choice = params.get("functions", {"hat_family": {}})
    if isinstance(choice, dict) and "hat_family" in choice:
        fam = choice["hat_family"]
        count = int(fam.get("count", 5))
        spread = float(fam.get("max_center", 0.6))
        half_width = float(fam.get("half_width", 0.3))
        centers = np.linspace(-spread, spread, count) if count > 1 else [0.0]
        return [
            CompactFunction.hat(float(c), half_width, support_exponent=0) for c in centers
        ]
    if isinstance(choice, list):
        try:
            return [CompactFunction.from_json(f) for f in choice]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"tower: bad function data: {exc}") from exc
    raise ConfigError("tower: 'functions' must be a list or {\"hat_family\": {...}}")


def _run_anticommute(cfg: ExperimentConfig, max_dim: int):
    witness = anticommuting_root_example()
    residuals = {
        "square_residual": witness.square_residual,
        "anticommute_residual": witness.anticommute_residual,
    }
    return residuals, {"dim": 2}


def _run_torus(cfg: ExperimentConfig, max_dim: int):
    params = _torus_params(cfg.parameters, "torus", max_dim)
    rep = clock_shift(params, tol=np.inf)
    residuals = {
        "relation_residual": rep.commutation_residual,
        "clock_order_residual": rep.clock_order_residual,
        "shift_order_residual": rep.shift_order_residual,
    }
    return residuals, {"theta": params.theta, "dim": params.q}


def _run_theta_tower(cfg: ExperimentConfig, max_dim: int):
    params = _torus_params(cfg.parameters, "theta_tower", max_dim)
    steps = int(cfg.parameters.get("steps", 3))
    if steps < 1:
        raise ConfigError("theta_tower: 'steps' must be at least 1")
    try:
        reports = iterate_theta_halving(params, steps, max_dim=max_dim, tol=np.inf)
    except ValueError as exc:
        raise ConfigError(f"theta_tower: {exc}") from exc
    residuals = {}
    for i, rep in enumerate(reports):
        residuals[f"step{i}_target_relation_residual"] = rep.target_relation_residual
        residuals[f"step{i}_image_relation_residual"] = rep.image_relation_residual
        residuals[f"step{i}_image_clock_order_residual"] = rep.image_clock_order_residual
        residuals[f"step{i}_image_shift_order_residual"] = rep.image_shift_order_residual
    residuals["max_image_relation_residual"] = max(
        r.image_relation_residual for r in reports
    )
    visited = [reports[0].source] + [r.target for r in reports]
    details = {
        "theta_sequence": [f"{t.p}/{t.q}" for t in visited],
        "dims": [t.q for t in visited],
    }
    return residuals, details


def _run_tower(cfg: ExperimentConfig, max_dim: int):
    params = _torus_params(cfg.parameters, "tower", max_dim)
    depth = int(cfg.parameters.get("depth", 3))
    branches = _branches_from_params(cfg.parameters, depth)
    functions = _functions_from_params(cfg.parameters)
    try:
        tower = build_tower(clock_matrix(params.p, params.q), depth, branches, tol_root=np.inf)
    except ValueError as exc:
        raise ConfigError(f"tower: {exc}") from exc
    pairs_choice = cfg.parameters.get("level_pairs", "all")
    min_level = max(f.support_exponent for f in functions)
    if pairs_choice == "all":
        pairs = [
            (a, b) for a in range(min_level, depth + 1) for b in range(a + 1, depth + 1)
        ]
    else:
        pairs = [(int(a), int(b)) for a, b in pairs_choice]
        for a, b in pairs:
            if not (min_level <= a <= depth and min_level <= b <= depth):
                raise ConfigError(f"tower: level pair ({a}, {b}) outside {min_level}..{depth}")
    max_indep = 0.0
    for f in functions:
        for a, b in pairs:
            max_indep = max(max_indep, level_independence_residual(tower, f, a, b))
    residuals = {
        "max_squaring_residual": max(tower.residuals),
        "max_level_independence": max_indep,
    }
    details = {"dim": params.q, "depth": depth, "functions": len(functions), "pairs": len(pairs)}
    return residuals, details


def _run_span(cfg: ExperimentConfig, max_dim: int):
    params = _torus_params(cfg.parameters, "span", max_dim)
    word_cap = int(cfg.parameters.get("word_cap", 2))
    rep = clock_shift(params)
    span = generate_span([rep.U, rep.V], word_cap)
    report = span.report()
    expected = cfg.parameters.get("expected_span_dim")
    residuals = {
        "max_generator_membership": report["residual_summary"]["max_generator_membership"],
        "orthonormality_defect": report["residual_summary"]["max_basis_orthonormality_defect"],
        "span_dim_error": 0.0
        if expected is None
        else float(abs(span.span_dim - int(expected))),
    }
    details = {"span_dim": span.span_dim, "word_cap": word_cap, "dim": params.q}
    return residuals, details


def _run_lemma_iso(cfg: ExperimentConfig, max_dim: int):
    params = _torus_params(cfg.parameters, "lemma_iso", max_dim)
    n = int(cfg.parameters.get("n", 2))
    m = int(cfg.parameters.get("m", 2))
    word_cap = int(cfg.parameters.get("word_cap", 3))
    flip_start = float(cfg.parameters.get("flip_start", 0.1))
    flip_end = float(cfg.parameters.get("flip_end", 1.2))
    flip_k = int(cfg.parameters.get("flip_k", 1))
    try:
        xi = BranchFunction.principal(n)
        eta = BranchFunction.with_flipped_arc(n, flip_start, flip_end, flip_k)
    except ValueError as exc:
        raise ConfigError(f"lemma_iso: {exc}") from exc
    u = clock_matrix(params.p, params.q)
    iso = amplification_iso_check([], u, xi, eta, m, word_cap, seed=cfg.seed)
    residuals = {
        "multiplicativity_residual": iso.multiplicativity_residual,
        "adjoint_residual": iso.adjoint_residual,
        "module_residual": iso.module_residual,
        "word_calculus_residual": iso.word_calculus_residual,
        "correction_order_residual": iso.correction_order_residual,
        "span_dim_mismatch": float(abs(iso.domain_span_dim - iso.image_span_dim)),
    }
    details = {
        "domain_span_dim": iso.domain_span_dim,
        "image_span_dim": iso.image_span_dim,
        "word_count": iso.word_count,
        "pair_count": iso.pair_count,
    }
    return residuals, details


_RUNNERS = {
    "anticommute_demo": _run_anticommute,
    "torus": _run_torus,
    "theta_tower": _run_theta_tower,
    "tower": _run_tower,
    "span": _run_span,
    "lemma_iso": _run_lemma_iso,
}


def run_experiment(cfg: ExperimentConfig, max_dim: int = DEFAULT_MAX_DIM) -> dict:
    """Execute one experiment and return its report entry."""
    start = time.perf_counter()
    residuals, details = _RUNNERS[cfg.kind](cfg, max_dim)
    residuals = {k: float(v) for k, v in residuals.items()}
    checks = []
    for name, threshold in cfg.checks.items():
        if name not in residuals:
            raise ConfigError(
                f"experiment '{cfg.name}': check '{name}' does not match any residual "
                f"(available: {sorted(residuals)})"
            )
        checks.append(
            {
                "name": name,
                "value": residuals[name],
                "threshold": threshold,
                "pass": residuals[name] <= threshold,
            }
        )
    return {
        "kind": cfg.kind,
        "name": cfg.name,
        "parameters": cfg.parameters,
        "seed": cfg.seed,
        "residuals": residuals,
        "details": details,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
        "wall_time_s": time.perf_counter() - start,
    }


def run_config(data, seed_override: int | None = None, max_dim: int = DEFAULT_MAX_DIM) -> dict:
    """Run every experiment in a parsed config; reports follow config order."""
    configs, seed = parse_config(data, seed_override)
    start = time.perf_counter()
    if len(configs) == 1:
        reports = [run_experiment(configs[0], max_dim)]
    else:
        workers = min(len(configs), os.cpu_count() or 1)
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda c: run_experiment(c, max_dim), configs))
    return {
        "library_version": __version__,
        "seed": seed,
        "max_dim": max_dim,
        "pass": all(r["pass"] for r in reports),
        "reports": reports,
        "wall_time_s": time.perf_counter() - start,
    }


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def render_csv(report: dict) -> str:
    out = io.StringIO()
    out.write("experiment,residual_name,value,threshold,pass\n")
    for rep in report["reports"]:
        checked = {c["name"]: c for c in rep["checks"]}
        for name, value in rep["residuals"].items():
            check = checked.get(name)
            threshold = "" if check is None else repr(check["threshold"])
            passed = "" if check is None else str(check["pass"]).lower()
            out.write(f"{rep['name']},{name},{value!r},{threshold},{passed}\n")
    return out.getvalue()


def render_text(report: dict) -> str:
    lines = [
        f"nclab {report['library_version']}  seed={report['seed']}  "
        f"overall={'PASS' if report['pass'] else 'FAIL'}"
    ]
    for rep in report["reports"]:
        lines.append(f"[{'PASS' if rep['pass'] else 'FAIL'}] {rep['name']} ({rep['kind']})")
        for check in rep["checks"]:
            verdict = "ok" if check["pass"] else "FAIL"
            lines.append(
                f"    {check['name']}: {check['value']:.3e} <= {check['threshold']:.3e} {verdict}"
            )
        unchecked = set(rep["residuals"]) - {c["name"] for c in rep["checks"]}
        for name in sorted(unchecked):
            lines.append(f"    {name}: {rep['residuals'][name]:.3e} (unchecked)")
    return "\n".join(lines) + "\n"


_RENDERERS = {"json": render_json, "csv": render_csv, "text": render_text}


def emit_report(report: dict, fmt: str = "json", out: str | None = None) -> str:
    """Render a report and write it to ``out`` (or stdout); returns the text."""
    if fmt not in _RENDERERS:
        raise ConfigError(f"unknown format {fmt!r}; expected one of {sorted(_RENDERERS)}")
    text = _RENDERERS[fmt](report)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _resolve_max_dim(cli_value: int | None) -> int:
    if cli_value is not None:
        return cli_value
    env = os.environ.get("NCLAB_MAX_DIM")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"NCLAB_MAX_DIM must be an integer, got {env!r}") from exc
    return DEFAULT_MAX_DIM


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nclab", description="run covering-construction experiments from a JSON config"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run experiments from a config file")
    run.add_argument("config", help="path to the JSON experiment config")
    run.add_argument("--format", choices=sorted(_RENDERERS), default="json")
    run.add_argument("--out", default=None, help="output path (default: stdout)")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument(
        "--max-dim", type=int, default=None, help=f"dimension guard (default {DEFAULT_MAX_DIM})"
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        max_dim = _resolve_max_dim(args.max_dim)
        with open(args.config, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"nclab: config error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run_config(data, seed_override=args.seed, max_dim=max_dim)
    except ConfigError as exc:
        print(f"nclab: config error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, ValueError) as exc:
        print(f"nclab: numerical failure: {exc}", file=sys.stderr)
        return 1
    try:
        emit_report(report, args.format, args.out)
    except OSError as exc:
        print(f"nclab: cannot write report: {exc}", file=sys.stderr)
        return 3
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
