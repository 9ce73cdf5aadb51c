"""Batch front end: verification suite runs and symbol dumps."""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from .checks import REGISTRY
from .config import ConfigError, SuiteConfig, parse_config
from .serialize import dump_json, dump_latex, model_block_to_json

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def run_verification_suite(cfg: SuiteConfig) -> dict:
    """Run the selected checks; deterministic for a fixed config and seed."""
    selected = sorted(REGISTRY) if cfg.checks is None else sorted(cfg.checks)
    unknown = [name for name in selected if name not in REGISTRY]
    if unknown:
        raise ConfigError(
            f"unknown checks: {unknown}; available: {sorted(REGISTRY)}"
        )
    results = []
    all_passed = True
    for name in selected:
        fn, anchor, pinned = REGISTRY[name]
        tol = cfg.effective_tolerance(name, pinned)
        rng = random.Random(f"{cfg.seed}:{name}")
        start = time.perf_counter()
        max_error, parameters, witness = fn(cfg, rng)
        runtime_ms = (time.perf_counter() - start) * 1000.0
        max_error = float(max_error)
        passed = bool(witness is None and max_error <= tol)
        all_passed = all_passed and passed
        entry = {
            "name": name,
            "anchor": anchor,
            "status": "pass" if passed else "fail",
            "max_error": max_error,
            "tolerance": tol,
            "runtime_ms": runtime_ms,
            "parameters": parameters,
        }
        if witness is not None:
            entry["witness"] = witness
        results.append(entry)
    return {
        "schema": "heisencalc-report/1",
        "config": cfg.as_dict(),
        "results": results,
        "all_passed": all_passed,
    }


def _model_registry(cfg: SuiteConfig):
    from .models import assemble_models, build_context, invert_model

    geom = cfg.geometry()
    szego = "classical" if all(t == 1.0 for t in cfg.tau) else "generalized"
    taus = None if szego == "classical" else list(cfg.tau)
    out = {}
    for side in (1, -1):
        s = "plus" if side > 0 else "minus"
        for parity in ("even", "odd"):
            def build(which, side=side, parity=parity):
                ctx = build_context(geom, cfg.N, side)
                if which == "U":
                    return invert_model(ctx, parity, szego=szego, taus=taus)
                return assemble_models(ctx, parity, szego=szego, taus=taus)[which]

            for which in ("P", "IdMinusP", "Rprime", "T", "U"):
                out[f"model_{which}_{s}_{parity}"] = (
                    lambda w=which, b=build: b(w)
                )
    return out


def dump_symbol(cfg: SuiteConfig, selector: str, fmt: str) -> str:
    """Render one published symbol or model operator as JSON or LaTeX."""
    from .dirac import symbol_registry

    geom = cfg.geometry()
    reg = symbol_registry(geom)
    if selector in reg:
        obj = reg[selector]()
        if fmt == "json":
            return json.dumps(
                dump_json(obj), indent=2, sort_keys=True, ensure_ascii=False
            )
        return dump_latex(obj)
    models = _model_registry(cfg)
    if selector in models:
        if fmt != "json":
            raise ConfigError("model operators dump as JSON only")
        return json.dumps(
            model_block_to_json(models[selector]()),
            indent=2, sort_keys=True, ensure_ascii=False,
        )
    available = sorted(reg) + sorted(models)
    raise ConfigError(
        f"unknown selector {selector!r}; available: {', '.join(available)}"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heisencalc",
        description="Verification suite and symbol dumps for the boundary model calculus",
    )
    parser.add_argument("--config", help="path to a JSON configuration file")
    parser.add_argument(
        "--check", action="append", default=None,
        help="check name to run (repeatable); default: all",
    )
    parser.add_argument("--dump", help="dump one symbol/model operator by name")
    parser.add_argument(
        "--format", choices=("json", "latex"), default="json",
        help="dump format (default json)",
    )
    parser.add_argument("--output", help="write the report/dump to this path")
    parser.add_argument("--tolerance", type=float, help="override the default tolerance")
    parser.add_argument("--seed", type=int, help="random seed for sample points")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        else:
            cfg = parse_config("{}")
        updates = {}
        if args.check:
            updates["checks"] = tuple(args.check)
        if args.tolerance is not None:
            updates["tolerance"] = args.tolerance
        if args.seed is not None:
            updates["seed"] = args.seed
        if args.output is not None:
            updates["output"] = args.output
        if updates:
            merged = cfg.as_dict()
            merged.pop("checks", None)
            cfg = SuiteConfig(
                n=cfg.n, r=cfg.r, N=cfg.N, b_re=cfg.b_re, b_im=cfg.b_im,
                tau=cfg.tau, sides=cfg.sides, parities=cfg.parities,
                checks=updates.get("checks", cfg.checks),
                tolerance=updates.get("tolerance", cfg.tolerance),
                tolerance_overrides=cfg.tolerance_overrides,
                seed=updates.get("seed", cfg.seed),
                output=updates.get("output", cfg.output),
            )
        if args.dump:
            text = dump_symbol(cfg, args.dump, args.format)
            if cfg.output:
                with open(cfg.output, "w", encoding="utf-8") as fh:
                    fh.write(text + "\n")
            else:
                print(text)
            return EXIT_OK
        report = run_verification_suite(cfg)
        text = json.dumps(report, indent=2, sort_keys=True)
        if cfg.output:
            with open(cfg.output, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        for entry in report["results"]:
            line = f"{entry['status'].upper():4s} {entry['name']} (max_error={entry['max_error']:.3e})"
            print(line, file=sys.stderr)
        return EXIT_OK if report["all_passed"] else EXIT_CHECK_FAILED
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
