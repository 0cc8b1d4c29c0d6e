"""Command-line interface.

Subcommands: ``decompose`` (orthomartingale split of a chaos element),
``check-condition`` (weighted projective summability), ``simulate``
(lattice experiments), ``verify`` (limit-theorem checks: clt, wip,
moment, tail, holder), and ``vc`` (combinatorial complexity / entropy).

Every JSON output carries a provenance envelope: tool version, seed,
sha256 of the canonical configuration, kernel backend, and a timestamp
that --no-timestamp suppresses for byte-reproducible artifacts. Options
may come from a --config JSON file; explicit flags win. Exit status is
0 on success, 1 when a numeric check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from datetime import datetime, timezone
from typing import Optional, Sequence

import numpy as np

from . import __version__, kernels
from .chaos import ChaosElement, InnovationLaw
from .decomposition import (
    decompose,
    limit_variance,
    linear_condition,
    omd_verify,
    reconstruct,
    series_condition,
)
from .fields import (
    ExperimentSpec,
    FieldSpec,
    StatisticSpec,
    as_path_sample,
    run_experiment,
)
from .lattice import Rect
from .vcentropy import SetClass, covering_exponent, entropy_integral, vc_index
from .verification import (
    YoungFunctionSpec,
    covariance_structure_test,
    gaussian_limit_test,
    holder_check,
    holder_threshold,
    luxemburg_norm,
    moment_ratio,
    tail_bound_check,
)


class UsageError(Exception):
    """Bad or missing command-line input (exit status 2)."""


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _json_arg(text: str):
    """Inline JSON, @path, or a bare path to a JSON file."""
    if text.startswith("@"):
        text = _read_text(text[1:])
    elif text == "-" or not text.lstrip().startswith(("{", "[")):
        try:
            text = _read_text(text)
        except OSError as exc:
            raise UsageError(f"cannot read JSON from {text!r}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON argument: {exc}") from None


def _apply_config(args: argparse.Namespace) -> None:
    """Fill unset options from the --config JSON file (flags win)."""
    path = getattr(args, "config", None)
    if not path:
        return
    try:
        cfg = json.loads(_read_text(path))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    for key, val in cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise UsageError(f"unknown config key {key!r}")
        cur = getattr(args, attr)
        if cur is None or cur is False:
            setattr(args, attr, val)


def _req(args: argparse.Namespace, name: str):
    val = getattr(args, name.replace("-", "_"))
    if val is None:
        raise UsageError(f"missing required option --{name}")
    return val


def _law(args: argparse.Namespace) -> InnovationLaw:
    kind = getattr(args, "law", None) or "rademacher"
    sigma = getattr(args, "sigma", None)
    variance = float(sigma) ** 2 if sigma is not None else 1.0
    if kind == "rademacher":
        return InnovationLaw.rademacher(variance)
    if kind == "gaussian":
        return InnovationLaw.gaussian(variance)
    raise UsageError(f"unknown law {kind!r} (use rademacher or gaussian)")


def _element_from_arg(args: argparse.Namespace, option: str = "coeffs") -> ChaosElement:
    raw = _req(args, option)
    data = raw if isinstance(raw, dict) else _json_arg(raw)
    try:
        return ChaosElement.from_json_dict(data)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"bad element JSON for --{option}: {exc}") from None


def _field(args: argparse.Namespace) -> FieldSpec:
    kind = _req(args, "field")
    if kind == "product":
        kind = "product_omd"
    d = int(_req(args, "d"))
    if kind == "product_omd":
        return FieldSpec(kind, d)
    law = _law(args)
    coeffs = None
    if kind == "linear":
        elem = _element_from_arg(args)
        if elem.dim != d:
            raise UsageError(f"--coeffs has dimension {elem.dim}, expected {d}")
        coeffs = dict(elem.coeffs)
    return FieldSpec(kind, d, law, coeffs)


def _statistic(args: argparse.Namespace) -> StatisticSpec:
    kind = getattr(args, "stat", None) or "endpoint"
    d = int(_req(args, "d"))
    if kind == "endpoint":
        t = getattr(args, "t", None)
        tv = (1.0,) * d if t is None else _parse_t(t, d)
        return StatisticSpec("endpoint", t=tv)
    if kind == "points":
        pts = _json_arg(_req(args, "points")) if isinstance(args.points, str) else args.points
        return StatisticSpec("points", points=tuple(tuple(p) for p in pts))
    if kind in ("rect_sums", "rects"):
        return StatisticSpec("rect_sums", rects=_parse_rects(_req(args, "rects"), d))
    if kind == "sup_modulus":
        gamma = float(_req(args, "gamma"))
        level = int(getattr(args, "level", None) or 3)
        return StatisticSpec("sup_modulus", gamma=gamma, level=level)
    raise UsageError(f"unknown statistic {kind!r}")


def _parse_t(text, d: int) -> tuple:
    vals = text if isinstance(text, (list, tuple)) else [float(x) for x in str(text).split(",")]
    if len(vals) == 1 and d > 1:
        vals = list(vals) * d
    if len(vals) != d:
        raise UsageError(f"--t needs {d} coordinates, got {len(vals)}")
    return tuple(float(v) for v in vals)


def _parse_rects(raw, d: int) -> tuple:
    data = _json_arg(raw) if isinstance(raw, str) else raw
    rects = []
    for item in data:
        if len(item) != 2:
            raise UsageError("each rectangle must be a [lower, upper] pair")
        rects.append(Rect(tuple(float(x) for x in item[0]), tuple(float(x) for x in item[1])))
        if rects[-1].dim != d:
            raise UsageError(f"rectangle dimension {rects[-1].dim} != {d}")
    return tuple(rects)


def _workers(args: argparse.Namespace) -> int:
    w = getattr(args, "workers", None)
    if w is None:
        w = os.environ.get("ORTHOFIELD_WORKERS", "1")
    return max(1, int(w))


def _envelope(args: argparse.Namespace, command: str, claim: str, config: dict, result: dict, seed: Optional[int] = None) -> dict:
    text = json.dumps(config, sort_keys=True, separators=(",", ":"))
    env = {
        "tool": "orthofield",
        "version": __version__,
        "command": command,
        "claim": claim,
        "config_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
        "backend": kernels.BACKEND,
        "result": result,
    }
    if seed is not None:
        env["seed"] = int(seed)
    if not getattr(args, "no_timestamp", False):
        env["timestamp"] = datetime.now(timezone.utc).isoformat()
    return env


def _emit(args: argparse.Namespace, payload) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, sort_keys=True) + "\n"
    out = getattr(args, "out", None)
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands


def _cmd_decompose(args: argparse.Namespace) -> int:
    try:
        data = json.loads(_read_text(args.input))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read element from {args.input}: {exc}") from None
    elem = ChaosElement.from_json_dict(data)
    D = decompose(elem)
    result: dict = {"decomposition": D.to_json_dict()}
    status = 0
    if args.verify:
        report = omd_verify(D)
        result["verification"] = report.to_json_dict()
        recon_err = reconstruct(D).max_abs_diff(elem)
        result["reconstruction_error"] = recon_err
        if not report.passed or recon_err > 1e-10:
            status = 1
    cfg = {"input": elem.to_json_dict(), "verify": bool(args.verify)}
    claim = "orthomartingale core plus boundary transfers reconstructs the input"
    _emit(args, _envelope(args, "decompose", claim, cfg, result))
    return status


def _cmd_check_condition(args: argparse.Namespace) -> int:
    p = float(_req(args, "p"))
    axis = int(getattr(args, "axis", None) or 1)
    law = _law(args)
    elem = _element_from_arg(args, "input")
    cap = int(getattr(args, "cap", None) or 10_000)
    if args.mode == "linear":
        d = int(getattr(args, "d", None) or elem.dim)
        report = linear_condition(dict(elem.coeffs), axis, d, p, law, cap=cap)
    else:
        kind = getattr(args, "kind", None) or "half_space"
        report = series_condition(
            elem, axis, p, law, kind=kind, cap=cap, seed=int(getattr(args, "seed", None) or 0)
        )
    cfg = {
        "mode": args.mode,
        "input": elem.to_json_dict(),
        "axis": axis,
        "p": p,
        "law": {"kind": law.kind, "variance": law.variance},
        "cap": cap,
    }
    claim = "the weighted norm series of successive projections converges"
    _emit(args, _envelope(args, "check-condition", claim, cfg, report.to_json_dict()))
    return 0 if report.converged and math.isfinite(report.total) else 1


def _make_experiment(args: argparse.Namespace) -> ExperimentSpec:
    return ExperimentSpec(
        field=_field(args),
        n=int(_req(args, "n")),
        replicas=int(_req(args, "replicas")),
        seed=int(getattr(args, "seed", None) or 0),
        statistic=_statistic(args),
    )


def _cmd_simulate(args: argparse.Namespace) -> int:
    spec = _make_experiment(args)
    sample = run_experiment(spec, workers=_workers(args))
    fmt = getattr(args, "format", None) or "json"
    if fmt == "csv":
        header = f"# orthofield {__version__} spec={spec.spec_hash()} backend={sample.backend}\n"
        if not args.no_timestamp:
            header += f"# generated={datetime.now(timezone.utc).isoformat()}\n"
        _emit(args, header + sample.to_csv_text())
        return 0
    claim = "per-replica statistics are a pure function of seed and replica index"
    env = _envelope(args, "simulate", claim, spec.canonical_dict(), sample.to_json_dict(), seed=spec.seed)
    _emit(args, env)
    return 0


def _cmd_verify_clt(args: argparse.Namespace) -> int:
    ns = argparse.Namespace(**vars(args))
    ns.stat = "endpoint"
    spec = _make_experiment(ns)
    sample = run_experiment(spec, workers=_workers(args))
    d = spec.dim
    t = spec.statistic.t or (1.0,) * d
    sigma2 = limit_variance(spec.field.element(), spec.field.law)
    target = sigma2 * float(np.prod(t))
    threshold = getattr(args, "threshold", None)
    report = gaussian_limit_test(sample, target, None if threshold is None else float(threshold))
    result = {"ks": report.to_json_dict(), "target_variance": target, "core_variance": sigma2}
    claim = "normalized rectangular sums converge to a centered Gaussian scaled by the core variance"
    _emit(args, _envelope(args, "verify clt", claim, spec.canonical_dict(), result, seed=spec.seed))
    return 0 if report.passed else 1


def _cmd_verify_wip(args: argparse.Namespace) -> int:
    ns = argparse.Namespace(**vars(args))
    ns.stat = "rect_sums"
    spec = _make_experiment(ns)
    if spec.statistic.rects is None or len(spec.statistic.rects) < 2:
        raise UsageError("verify wip needs --rects with at least two rectangles")
    sample = run_experiment(spec, workers=_workers(args))
    paths = as_path_sample(sample)
    sigma2 = limit_variance(spec.field.element(), spec.field.law)
    pair_raw = getattr(args, "pair", None) or "0,1"
    i, j = (int(x) for x in str(pair_raw).split(","))
    rel_tol = float(getattr(args, "rel_tol", None) or 0.10)
    report = covariance_structure_test(paths, sigma2, pair=(i, j), rel_tol=rel_tol)
    result = {"covariance": report.to_json_dict(), "core_variance": sigma2}
    claim = "rectangular sums decorrelate like a Brownian sheet: covariance tracks intersection volume"
    _emit(args, _envelope(args, "verify wip", claim, spec.canonical_dict(), result, seed=spec.seed))
    return 0 if report.passed else 1


def _cmd_verify_moment(args: argparse.Namespace) -> int:
    field = _field(args)
    n = int(_req(args, "n"))
    p = float(_req(args, "p"))
    method = getattr(args, "method", None) or "auto"
    replicas = int(getattr(args, "replicas", None) or 0)
    seed = int(getattr(args, "seed", None) or 0)
    report = moment_ratio(field, n, p, replicas=replicas, seed=seed, method=method)
    max_factor = float(getattr(args, "max_factor", None) or 3.0)
    min_factor = float(getattr(args, "min_factor", None) or 0.1)
    passed = report.ratio <= max_factor * p and report.ratio >= min_factor * p
    result = {
        "moment": report.to_json_dict(),
        "max_allowed_ratio": max_factor * p,
        "min_allowed_ratio": min_factor * p,
        "passed": passed,
    }
    cfg = {"field": field.canonical_dict(), "n": n, "p": p, "method": method, "replicas": replicas}
    claim = "the p-th norm of the block sum grows like the square root of the site count, linearly in p"
    _emit(args, _envelope(args, "verify moment", claim, cfg, result, seed=seed))
    return 0 if passed else 1


def _grid_points(d: int, level: int) -> tuple:
    side = [(k + 1) / (1 << level) for k in range(1 << level)]
    import itertools

    return tuple(itertools.product(*([side] * d)))


def _cmd_verify_tail(args: argparse.Namespace) -> int:
    ns = argparse.Namespace(**vars(args))
    ns.field = getattr(args, "field", None) or "product"
    ns.stat = "points"
    level = int(getattr(args, "level", None) or 3)
    d = int(_req(args, "d"))
    ns.points = _grid_points(d, level)
    spec = _make_experiment(ns)
    sample = run_experiment(spec, workers=_workers(args))
    q = float(_req(args, "q"))
    sup_abs = np.max(np.abs(sample.values), axis=1)
    psi = YoungFunctionSpec(q)
    ref = luxemburg_norm(sup_abs, psi)
    raw_grid = getattr(args, "x_grid", None)
    if raw_grid is None:
        x_grid = list(np.quantile(sup_abs, np.linspace(0.5, 0.99, 10)))
    else:
        x_grid = [float(x) for x in (_json_arg(raw_grid) if isinstance(raw_grid, str) else raw_grid)]
    report = tail_bound_check(
        sup_abs, q, d, ref, x_grid, field_bounded=spec.field.bounded()
    )
    passed = report.monotone and report.kappa is not None
    result = {"tail": report.to_json_dict(), "orlicz_reference": ref, "passed": passed}
    claim = "tail frequencies of the path supremum stay under a stretched-exponential envelope"
    _emit(args, _envelope(args, "verify tail", claim, spec.canonical_dict(), result, seed=spec.seed))
    return 0 if passed else 1


def _cmd_verify_holder(args: argparse.Namespace) -> int:
    ns = argparse.Namespace(**vars(args))
    ns.stat = "points"
    level = int(getattr(args, "level", None) or 3)
    d = int(_req(args, "d"))
    ns.points = _grid_points(d, level)
    spec = _make_experiment(ns)
    sample = run_experiment(spec, workers=_workers(args))
    paths = as_path_sample(sample)
    p = float(_req(args, "p"))
    gamma = float(_req(args, "gamma"))
    report = holder_check(paths, p, gamma)
    passed = report.admissible and report.fitted_k is not None
    result = {
        "holder": report.to_json_dict(),
        "moment_threshold": holder_threshold(d),
        "passed": passed,
    }
    claim = "path increments satisfy a uniform Hoelder modulus below the admissibility line"
    _emit(args, _envelope(args, "verify holder", claim, spec.canonical_dict(), result, seed=spec.seed))
    return 0 if passed else 1


def _set_class(args: argparse.Namespace) -> SetClass:
    name = getattr(args, "cls", None)
    resolution = int(getattr(args, "resolution", None) or 256)
    members_raw = getattr(args, "members", None)
    if members_raw:
        data = _json_arg(members_raw) if isinstance(members_raw, str) else members_raw
        members = tuple(
            Rect(tuple(float(x) for x in lo), tuple(float(x) for x in hi)) for lo, hi in data
        )
        return SetClass("explicit", members[0].dim, resolution, members)
    if not name:
        raise UsageError("vc needs --class (Q<d>, B<d>/Qp<d>) or --members")
    tag = str(name).strip().replace("'", "p")
    if tag.startswith("Qp"):
        kind, dim_text = "boxes", tag[2:]
    elif tag.startswith("Q"):
        kind, dim_text = "quadrants", tag[1:]
    elif tag.startswith("B"):
        kind, dim_text = "boxes", tag[1:]
    else:
        raise UsageError(f"unknown class name {name!r}")
    try:
        d = int(dim_text)
    except ValueError:
        raise UsageError(f"unknown class name {name!r}") from None
    return SetClass(kind, d, resolution)


def _cmd_vc(args: argparse.Namespace) -> int:
    C = _set_class(args)
    report = vc_index(
        C,
        max_n=int(getattr(args, "max_n", None) or 8),
        budget=int(getattr(args, "budget", None) or 200_000),
    )
    result: dict = {
        "class": {"kind": C.kind, "d": C.dim, "resolution": C.resolution},
        "vc": report.to_json_dict(),
    }
    eps_raw = getattr(args, "eps_grid", None)
    eps_grid = None
    if eps_raw is not None:
        eps_grid = [float(x) for x in (_json_arg(eps_raw) if isinstance(eps_raw, str) else eps_raw)]
    if getattr(args, "entropy", False):
        p = getattr(args, "p", None)
        cov = entropy_integral(C, p=None if p is None else float(p), eps_grid=eps_grid)
        result["entropy"] = cov.to_json_dict()
    if getattr(args, "exponent", False):
        if eps_grid is None:
            eps_grid = list(np.linspace(0.05, 0.3, 8))
        result["covering_exponent"] = covering_exponent(C, eps_grid)
    cfg = {"class": result["class"], "eps_grid": eps_grid}
    claim = "the class picks out polynomially many subsets; entropy grows like a power of 1/eps"
    _emit(args, _envelope(args, "vc", claim, cfg, result))
    return 0


# ---------------------------------------------------------------- parser


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON file with option defaults (flags win)")
    sp.add_argument("--out", help="output path (default stdout)")
    sp.add_argument("--no-timestamp", action="store_true", help="omit timestamps for byte-stable output")


def _add_field_opts(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--field", choices=["linear", "iid", "product"], help="field kind")
    sp.add_argument("--d", type=int, help="lattice dimension")
    sp.add_argument("--law", choices=["rademacher", "gaussian"], help="innovation law")
    sp.add_argument("--sigma", type=float, help="innovation standard deviation (default 1)")
    sp.add_argument("--coeffs", help="element JSON (inline or @file) with the linear coefficients")


def _add_run_opts(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--n", type=int, help="lattice side length")
    sp.add_argument("--replicas", type=int, help="number of independent replicas")
    sp.add_argument("--seed", type=int, help="master seed (default 0)")
    sp.add_argument("--workers", type=int, help="worker threads (default $ORTHOFIELD_WORKERS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orthofield",
        description="Orthomartingale decompositions and limit-theorem checks for stationary lattice fields.",
    )
    parser.add_argument("--version", action="version", version=f"orthofield {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("decompose", help="split a chaos element into core and boundary transfers")
    sp.add_argument("--input", required=True, help="element JSON path, or - for stdin")
    sp.add_argument("--verify", action="store_true", help="check residuals and reconstruction")
    _add_common(sp)
    sp.set_defaults(func=_cmd_decompose)

    sp = sub.add_parser("check-condition", help="weighted projective summability of an element")
    sp.add_argument("--input", required=True, help="element JSON (inline, @file, or a path)")
    sp.add_argument("--mode", choices=["series", "linear"], default="series")
    sp.add_argument("--axis", type=int, help="axis to project along (default 1)")
    sp.add_argument("--p", type=float, help="norm exponent")
    sp.add_argument("--d", type=int, help="dimension for the weight (linear mode)")
    sp.add_argument("--kind", choices=["half_space", "shifted_past"], help="conditioning algebra")
    sp.add_argument("--law", choices=["rademacher", "gaussian"])
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--cap", type=int, help="maximum number of series terms")
    sp.add_argument("--seed", type=int)
    _add_common(sp)
    sp.set_defaults(func=_cmd_check_condition)

    sp = sub.add_parser("simulate", help="sample per-replica statistics of a lattice field")
    _add_field_opts(sp)
    _add_run_opts(sp)
    sp.add_argument("--stat", choices=["endpoint", "points", "rect_sums", "sup_modulus"])
    sp.add_argument("--t", help="endpoint, comma-separated (e.g. 0.5,0.75)")
    sp.add_argument("--points", help="JSON list of evaluation points")
    sp.add_argument("--rects", help="JSON list of [lower, upper] rectangles")
    sp.add_argument("--gamma", type=float, help="modulus exponent (sup_modulus)")
    sp.add_argument("--level", type=int, help="dyadic grid level (sup_modulus)")
    sp.add_argument("--format", choices=["json", "csv"], help="output format (default json)")
    _add_common(sp)
    sp.set_defaults(func=_cmd_simulate)

    vsub = sub.add_parser("verify", help="numeric checks of the limit-theorem claims")
    vv = vsub.add_subparsers(dest="check", required=True)

    sp = vv.add_parser("clt", help="KS distance of normalized sums from the Gaussian limit")
    _add_field_opts(sp)
    _add_run_opts(sp)
    sp.add_argument("--t", help="evaluation endpoint (default the unit corner)")
    sp.add_argument("--threshold", type=float, help="KS pass threshold (default 2*1.36/sqrt(N))")
    _add_common(sp)
    sp.set_defaults(func=_cmd_verify_clt)

    sp = vv.add_parser("wip", help="covariance of rectangular sums against intersection volume")
    _add_field_opts(sp)
    _add_run_opts(sp)
    sp.add_argument("--rects", help="JSON list of [lower, upper] rectangles (>= 2)")
    sp.add_argument("--pair", help="indices of the rectangle pair, e.g. 0,1")
    sp.add_argument("--rel-tol", type=float, help="relative tolerance for overlapping pairs")
    _add_common(sp)
    sp.set_defaults(func=_cmd_verify_wip)

    sp = vv.add_parser("moment", help="growth of block-sum p-norms against the site count")
    _add_field_opts(sp)
    sp.add_argument("--n", type=int, help="block side length")
    sp.add_argument("--p", type=float, help="norm exponent")
    sp.add_argument("--method", choices=["auto", "exact_factorized", "monte_carlo"])
    sp.add_argument("--replicas", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--max-factor", type=float, help="pass if ratio <= factor * p (default 3)")
    sp.add_argument("--min-factor", type=float, help="pass if ratio >= factor * p (default 0.1)")
    _add_common(sp)
    sp.set_defaults(func=_cmd_verify_moment)

    sp = vv.add_parser("tail", help="stretched-exponential tail envelope of the path supremum")
    _add_field_opts(sp)
    _add_run_opts(sp)
    sp.add_argument("--q", type=float, help="Young-function exponent")
    sp.add_argument("--level", type=int, help="dyadic evaluation level (default 3)")
    sp.add_argument("--x-grid", help="JSON list of threshold levels (default sample quantiles)")
    _add_common(sp)
    sp.set_defaults(func=_cmd_verify_tail)

    sp = vv.add_parser("holder", help="uniform Hoelder modulus of the normalized path")
    _add_field_opts(sp)
    _add_run_opts(sp)
    sp.add_argument("--p", type=float, help="available moment order")
    sp.add_argument("--gamma", type=float, help="modulus exponent")
    sp.add_argument("--level", type=int, help="dyadic evaluation level (default 3)")
    _add_common(sp)
    sp.set_defaults(func=_cmd_verify_holder)

    sp = sub.add_parser("vc", help="shattering index, covering numbers, entropy integrals")
    sp.add_argument("--class", dest="cls", help="Q<d> quadrants, B<d> or Qp<d> boxes")
    sp.add_argument("--members", help="JSON list of [lower, upper] rectangles (explicit class)")
    sp.add_argument("--resolution", type=int, help="dyadic discretization denominator (default 256)")
    sp.add_argument("--max-n", type=int, help="largest point-set size tried (default 8)")
    sp.add_argument("--budget", type=int, help="configuration budget before degrading to a lower bound")
    sp.add_argument("--entropy", action="store_true", help="also bracket covering numbers and integrate entropy")
    sp.add_argument("--exponent", action="store_true", help="also fit the covering-number exponent")
    sp.add_argument("--eps-grid", help="JSON list of radii for entropy/exponent")
    sp.add_argument("--p", type=float, help="norm exponent for the N^(1/p) integral")
    _add_common(sp)
    sp.set_defaults(func=_cmd_vc)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
