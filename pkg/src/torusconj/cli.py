"""Command-line front end.

    torusconj build m2 --config pair.json --eps 1e-2 --out report.json
    torusconj obstruct --config pair.json
    torusconj tower --theta golden --n 100

Exit codes: 0 success, 2 obstruction (or non-isomorphic invariants),
1 numerical failure, 64 malformed configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .circle import convergents
from .cocycle import approx_coboundary_with_winding, solve_coboundary_exact
from .conjugacy import (
    build_exact_conjugacy,
    build_k_conjugacy_sequence,
    build_m1_conjugacy,
    build_m2_conjugacy,
    check_obstructions,
)
from .errors import ObstructionError, TorusConjError
from .functions import TrigPoly, phase_from_json
from .furstenberg import FurstenbergMap
from .ktheory import isomorphic, k_invariant
from .rokhlin import build_tower
from .verify import profile_to_csv

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_OBSTRUCTION = 2
EXIT_CONFIG = 64

GOLDEN = (math.sqrt(5) - 1) / 2
NAMED_THETAS = {
    "golden": GOLDEN,
    "1-golden": 1 - GOLDEN,
    "sqrt2-1": math.sqrt(2) - 1,
    "sqrt3-1": math.sqrt(3) - 1,
}

DEFAULTS = {"grid": 512, "samples": 10**5, "seed": 0, "candidates": 1000, "tol": 1e-9}


class ConfigError(Exception):
    pass


def parse_theta(value) -> float:
    if isinstance(value, str):
        if value in NAMED_THETAS:
            return NAMED_THETAS[value]
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"unknown theta {value!r}") from None
    if isinstance(value, (int, float)):
        return float(value)
    raise ConfigError(f"theta must be a number or a name, got {value!r}")


def parse_map(entry, name: str) -> FurstenbergMap:
    if not isinstance(entry, dict):
        raise ConfigError(f"{name} must be an object with theta, d and f")
    try:
        f = phase_from_json(entry["f"]) if entry.get("f") is not None else TrigPoly.zero()
        return FurstenbergMap(parse_theta(entry["theta"]), entry["d"], f)
    except KeyError as exc:
        raise ConfigError(f"{name} is missing {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None


def _positive(cfg, key):
    v = cfg.get(key)
    if v is None:
        raise ConfigError(f"missing required field {key!r}")
    if not isinstance(v, (int, float)) or v <= 0:
        raise ConfigError(f"{key} must be positive, got {v!r}")
    return float(v)


def _clean(obj):
    """JSON-safe copy: NaN and inf become null, numpy scalars become floats."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _pair(cfg):
    if "alpha" not in cfg or "beta" not in cfg:
        raise ConfigError("alpha and beta are required")
    return parse_map(cfg["alpha"], "alpha"), parse_map(cfg["beta"], "beta")


def run_build(mode, cfg):
    alpha, beta = _pair(cfg)
    grid = int(cfg["grid"])
    csv = None
    if mode == "m2":
        res = build_m2_conjugacy(alpha, beta, _positive(cfg, "eps"), grid)
        body = res.to_json()
    elif mode == "m1":
        res = build_m1_conjugacy(alpha, beta, _positive(cfg, "eps"), grid, int(cfg["samples"]), int(cfg["seed"]))
        body = res.to_json()
        csv = profile_to_csv(res.profile)
    elif mode == "exact":
        body = build_exact_conjugacy(alpha, beta, grid).to_json()
    elif mode == "kseq":
        schedule = cfg.get("eps_schedule") or ([cfg["eps"]] if cfg.get("eps") else None)
        if not schedule or any(not isinstance(e, (int, float)) or e <= 0 for e in schedule):
            raise ConfigError("kseq needs a positive eps_schedule")
        body = {"results": [r.to_json() for r in build_k_conjugacy_sequence(alpha, beta, schedule, grid)]}
    else:
        raise ConfigError(f"unknown build mode {mode!r}")
    return EXIT_OK, body, csv


def run_obstruct(cfg):
    alpha, beta = _pair(cfg)
    rep = check_obstructions(alpha, beta, int(cfg["candidates"]), int(cfg["seed"]))
    return (EXIT_OK if rep.compatible else EXIT_OBSTRUCTION), rep.to_json(), None


def run_kinv(cfg):
    alpha, beta = _pair(cfg)
    i1, i2 = k_invariant(alpha), k_invariant(beta)
    same = isomorphic(i1, i2, float(cfg["tol"]))
    body = {"alpha": i1.to_json(), "beta": i2.to_json(), "isomorphic": same}
    return (EXIT_OK if same else EXIT_OBSTRUCTION), body, None


def run_tower(cfg):
    theta = parse_theta(cfg.get("theta", "golden"))
    n = cfg.get("n")
    if not isinstance(n, int) or n < 1:
        raise ConfigError("tower needs a positive integer n")
    tower = build_tower(theta, n)
    overlap, gap = tower.overlap_and_gap()
    body = tower.to_json()
    body.update(total_mass=tower.total_mass(), min_height=tower.min_height, overlap=overlap, uncovered=gap)
    return EXIT_OK, body, None


def run_solve(cfg):
    theta = parse_theta(cfg.get("theta", "golden"))
    if "f" not in cfg:
        raise ConfigError("solve-coboundary needs f")
    try:
        f = phase_from_json(cfg["f"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"f: {exc}") from None
    convergents(theta, 4)  # rejects rational theta early
    if cfg.get("eps") is None:
        if not isinstance(f, TrigPoly):
            raise ConfigError("the exact solver needs a trigonometric polynomial f")
        g = solve_coboundary_exact(f, theta)
        return EXIT_OK, {"g": g.to_json(), "theta": theta}, None
    d = cfg.get("d", 1)
    k, g0, cert = approx_coboundary_with_winding(f, theta, int(d), _positive(cfg, "eps"))
    return EXIT_OK, {"k": k, "g0": g0.to_json(), "certificate": cert.to_json(), "theta": theta}, None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON experiment file")
    common.add_argument("--eps", type=float)
    common.add_argument("--grid", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", type=Path, help="report path (stdout when omitted)")

    parser = argparse.ArgumentParser(prog="torusconj", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    b = sub.add_parser("build", parents=[common], help="construct a conjugacy")
    b.add_argument("mode", choices=["m1", "m2", "exact", "kseq"])
    sub.add_parser("obstruct", parents=[common], help="rotation and winding obstructions")
    sub.add_parser("kinv", parents=[common], help="compare K-invariants")
    t = sub.add_parser("tower", parents=[common], help="Rokhlin tower for a rotation")
    t.add_argument("--theta")
    t.add_argument("--n", type=int)
    s = sub.add_parser("solve-coboundary", parents=[common], help="solve f = g - g(. + theta)")
    s.add_argument("--theta")
    s.add_argument("--d", type=int)
    return parser


def load_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        cfg.update(data)
    for key in ("eps", "grid", "samples", "seed", "theta", "n", "d"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if args.out is not None:
        cfg["out"] = str(args.out)
    return cfg


def _write(body: dict, csv_text, out):
    text = json.dumps(_clean(body), sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    if csv_text is not None:
        path.with_suffix(".csv").write_text(csv_text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args)
        if args.command == "build":
            code, body, csv_text = run_build(args.mode, cfg)
        elif args.command == "obstruct":
            code, body, csv_text = run_obstruct(cfg)
        elif args.command == "kinv":
            code, body, csv_text = run_kinv(cfg)
        elif args.command == "tower":
            code, body, csv_text = run_tower(cfg)
        else:
            code, body, csv_text = run_solve(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ObstructionError as exc:
        body = {"status": "obstructed", "message": str(exc)}
        if exc.report is not None:
            body["obstruction"] = exc.report.to_json()
        code, csv_text = EXIT_OBSTRUCTION, None
    except (TorusConjError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    body.setdefault("status", {EXIT_OK: "ok", EXIT_OBSTRUCTION: "obstructed"}[code])
    body["command"] = args.command if args.command != "build" else f"build {args.mode}"
    body["config"] = {k: v for k, v in cfg.items() if k != "out"}
    body["version"] = __version__
    _write(body, csv_text, cfg.get("out"))
    return code


if __name__ == "__main__":
    sys.exit(main())
