"""Command-line harness: ``kappa-fuzzy <command> --config path.json``.

Commands
--------
group-check      group law, inverse, coordinate round trips, modular function
geometry-check   frame brackets, metric reductions, embedding, classical modes
fuzzy-spectrum   fuzzy Laplacian spectrum matched to classical modes

Exit status is 0 when every check passes, 1 when a check or gate fails
(or the eigensolver does not converge) and 2 for usage or configuration
errors, including documented refusals such as the flat angle of the 2-D
metric family or a superoperator above the memory guard.
"""
from __future__ import annotations

import argparse
import copy
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from importlib import resources

import numpy as np

from . import __version__

COMMANDS = ("group-check", "geometry-check", "fuzzy-spectrum")

DEFAULTS = {
    "group-check": {
        "seed": 0, "D": [2, 3, 4], "samples": 10000, "t_range": 2.0, "y_range": 2.0,
        "law_tolerance": 1e-10, "roundtrip_tolerance": 1e-12,
    },
    "geometry-check": {
        "seed": 0, "D": [2, 3, 4], "metrics": 100, "theta": [0.0, 0.3, 1.2, 2.0],
        "embedding_points": 1000, "bracket_points": 20, "bracket_h": 1e-4,
        "reduction_tolerance": 1e-9, "embedding_tolerance": 1e-12, "bracket_tolerance": 1e-6,
        "modes": {"D": [2, 3], "orders": [[0.3, 0.0], [0.5, 0.0], [0.0, 0.4]],
                  "resolution": 512, "tolerance": 1e-6},
    },
    "fuzzy-spectrum": {
        "seed": 0, "D": 2, "N": [16], "lambda": None,
        "window": {"t": [-1.0, 1.0], "y": [-1.0, 1.0]}, "lattice": None, "n_modes": 16,
        "lambda_grid": {"n": 40, "min": 0.02, "max": 6.0},
        "gates": {"overlap_non_decreasing": True, "residual_decreasing": True, "overlap_target": None},
        "tolerances": {},
    },
}


class ConfigError(Exception):
    """Invalid configuration or a documented refusal; exit status 2."""


class CheckFailed(Exception):
    """A numerical step could not complete; exit status 1."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def load_schema() -> dict:
    text = resources.files("kappa_fuzzy").joinpath("data/config_schema.json").read_text()
    return json.loads(text)


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def validate_config(command: str, raw: dict, seed=None) -> dict:
    """Validate ``raw`` against the published schema and fill defaults."""
    import jsonschema

    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    schema = load_schema()
    schema = dict(schema, **{"$ref": f"#/$defs/{command}"})
    try:
        jsonschema.validate(raw, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None
    cfg = _merge(DEFAULTS[command], raw)
    cfg.pop("command", None)
    if seed is not None:
        cfg["seed"] = int(seed)
    if command == "fuzzy-spectrum":
        _finish_fuzzy_config(cfg)
    return cfg


def _finish_fuzzy_config(cfg: dict) -> None:
    D = cfg["D"]
    if cfg["lambda"] is None:
        cfg["lambda"] = [1.0] if D == 2 else [0.8, 0.6]
    if len(cfg["lambda"]) != D - 1:
        raise ConfigError(f"lambda needs {D - 1} components for D = {D}")
    if abs(float(np.linalg.norm(cfg["lambda"])) - 1.0) > 1e-12:
        raise ConfigError("lambda must be a unit vector")
    if cfg["lattice"] is None:
        cfg["lattice"] = [41, 61] if D == 2 else [21, 31, 9]
    if len(cfg["lattice"]) != D:
        raise ConfigError(f"lattice needs {D} entries for D = {D}")
    for key in ("t", "y"):
        lo, hi = cfg["window"][key]
        if not lo < hi:
            raise ConfigError(f"window {key} must be increasing")
    g = cfg["lambda_grid"]
    if not g["min"] < g["max"]:
        raise ConfigError("lambda_grid min must be below max")
    limit = cfg["tolerances"].get("superoperator_max_dim", 4096)
    for N in cfg["N"]:
        if N * N > limit:
            raise ConfigError(f"N = {N}: superoperator dimension {N * N} exceeds the memory guard {limit}")


# ---------------------------------------------------------------------------
# group-check
# ---------------------------------------------------------------------------


def _rng(seed: int, *tags) -> np.random.Generator:
    return np.random.default_rng([int(seed)] + [int(t) for t in tags])


def _group_case(cfg: dict, D: int) -> dict:
    from .group.elements import (exp_multiply_arrays, exp_to_split_arrays, split_inverse_arrays,
                                 split_multiply_arrays, split_to_exp_arrays)

    rng = _rng(cfg["seed"], 1, D)
    n = cfg["samples"]
    T, Y = cfg["t_range"], cfg["y_range"]
    ts = rng.uniform(-T, T, (3, n))
    ys = rng.uniform(-Y, Y, (3, n, D - 1))

    def rel(a, b):
        return float(np.max(np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))))

    # associativity
    t12, y12 = split_multiply_arrays(ts[0], ys[0], ts[1], ys[1])
    tl, yl = split_multiply_arrays(t12, y12, ts[2], ys[2])
    t23, y23 = split_multiply_arrays(ts[1], ys[1], ts[2], ys[2])
    tr, yr = split_multiply_arrays(ts[0], ys[0], t23, y23)
    assoc = max(rel(tl, tr), rel(yl, yr))
    # inverses, error relative to the size of the cancelling terms
    ti, yi = split_inverse_arrays(ts[0], ys[0])
    scale = 1.0 + np.exp(np.abs(ts[0]))[:, None] * np.abs(ys[0])
    inv = 0.0
    for a, b in (((ts[0], ys[0]), (ti, yi)), ((ti, yi), (ts[0], ys[0]))):
        tt, yy = split_multiply_arrays(a[0], a[1], b[0], b[1])
        inv = max(inv, float(np.max(np.abs(tt))), float(np.max(np.abs(yy) / scale)))
    # coordinate round trips
    x0, x = split_to_exp_arrays(ts[0], ys[0])
    tb, yb = exp_to_split_arrays(x0, x)
    rt = max(rel(tb, ts[0]), rel(yb, ys[0]))
    tb2, yb2 = exp_to_split_arrays(ts[1], ys[1])
    xb0, xb = split_to_exp_arrays(tb2, yb2)
    rt = max(rt, rel(xb0, ts[1]), rel(xb, ys[1]))
    # exponential product against split product
    a0, a = exp_multiply_arrays(ts[0], ys[0], ts[1], ys[1])
    s0, s = exp_to_split_arrays(a0, a)
    p0, p = exp_to_split_arrays(ts[0], ys[0])
    q0, q = exp_to_split_arrays(ts[1], ys[1])
    m0, m = split_multiply_arrays(p0, p, q0, q)
    consistency = max(rel(s0, m0), rel(s, m))
    # modular function is a homomorphism: Delta depends on t only
    modular = rel(np.exp(-(D - 1) * t12), np.exp(-(D - 1) * ts[0]) * np.exp(-(D - 1) * ts[1]))
    law_tol, rt_tol = cfg["law_tolerance"], cfg["roundtrip_tolerance"]
    checks = {
        "associativity": {"max_error": assoc, "tolerance": law_tol},
        "inverse": {"max_error": inv, "tolerance": law_tol},
        "exp_split_roundtrip": {"max_error": rt, "tolerance": rt_tol},
        "exp_product_consistency": {"max_error": consistency, "tolerance": law_tol},
        "modular_homomorphism": {"max_error": modular, "tolerance": law_tol},
    }
    for c in checks.values():
        c["passed"] = bool(c["max_error"] <= c["tolerance"])
    return {"D": D, "samples": n, "checks": checks}


def run_group_check(cfg: dict) -> dict:
    with ThreadPoolExecutor(max_workers=len(cfg["D"])) as pool:
        cases = list(pool.map(lambda D: _group_case(cfg, D), cfg["D"]))
    passed = all(c["passed"] for case in cases for c in case["checks"].values())
    return {"cases": cases, "passed": passed}


# ---------------------------------------------------------------------------
# geometry-check
# ---------------------------------------------------------------------------


def _geometry_case(cfg: dict, D: int) -> dict:
    from . import geometry as geo
    from .group.elements import SplitElement

    rng = _rng(cfg["seed"], 2, D)
    out = {"D": D}
    worst_br, worst_dual = 0.0, 0.0
    for _ in range(cfg["bracket_points"]):
        p = SplitElement(rng.uniform(-1, 1), rng.uniform(-1, 1, D - 1))
        for side in ("right", "left"):
            worst_br = max(worst_br, geo.bracket_check(side, p, cfg["bracket_h"]).max_deviation)
            worst_dual = max(worst_dual, float(np.max(np.abs(geo.frame_at(p, side).pairing() - np.eye(D)))))
    out["brackets"] = {"max_error": worst_br, "tolerance": cfg["bracket_tolerance"],
                       "passed": bool(worst_br <= cfg["bracket_tolerance"])}
    eps4 = 4 * np.finfo(float).eps
    out["duality"] = {"max_error": worst_dual, "tolerance": eps4, "passed": bool(worst_dual <= eps4)}

    worst_red = 0.0
    for _ in range(cfg["metrics"]):
        spec = geo.random_lorentzian_spec(D, rng)
        red = geo.reduce_metric_general(spec)
        worst_red = max(worst_red, red.residual(rng.uniform(0.1, 5.0, 20)))
    out["metric_reduction"] = {"metrics": cfg["metrics"], "max_residual": worst_red,
                               "tolerance": cfg["reduction_tolerance"],
                               "passed": bool(worst_red <= cfg["reduction_tolerance"])}

    n = cfg["embedding_points"]
    if n:
        t = rng.uniform(-2, 2, n)
        y = rng.uniform(-2, 2, (n, D - 1))
        X = geo.embed(t, y)
        q = float(np.max(geo.quadric_residual(X)))
        g = geo.induced_metric(t, y)
        ref = np.zeros_like(g)
        ref[:, 0, 0] = 1.0
        ref[:, 1:, 1:] = -np.exp(2 * t)[:, None, None] * np.eye(D - 1)
        gm = float(np.max(np.abs(g - ref) / np.maximum(1.0, np.exp(2 * t))[:, None, None]))
        witness = bool(np.all(X[:, 0] + X[:, -1] > 0))
        tol = cfg["embedding_tolerance"]
        out["embedding"] = {"points": n, "quadric_residual": q, "induced_metric_error": gm,
                            "half_space_witness": witness, "tolerance": tol,
                            "passed": bool(q <= tol and gm <= tol and witness)}
    out["passed"] = all(v["passed"] for v in out.values() if isinstance(v, dict))
    return out


def _mode_case(cfg: dict, D: int, order) -> tuple:
    from . import geometry as geo

    res = cfg["modes"]["resolution"]
    nu = complex(order[0], order[1])
    t = np.linspace(-1.0, 1.0, res)
    y = np.linspace(0.0, 2 * np.pi, res)
    if D == 2:
        axes, lam = [y], [1.0]
    else:
        axes, lam = [y, np.linspace(-0.5, 0.5, 9)], [0.8, 0.6]
    mode = geo.ClassicalMode.from_order(D, nu, lam, 1)
    f = geo.mode_grid(mode, t, *axes)
    r = geo.relative_residual(f, mode.mu2)
    tol = cfg["modes"]["tolerance"]
    entry = {"D": D, "nu": [nu.real, nu.imag], "mu2": [mode.mu2.real, mode.mu2.imag],
             "resolution": res, "relative_residual": r, "tolerance": tol, "passed": bool(r <= tol)}
    return entry, (f, mode)


def run_geometry_check(cfg: dict, emit_dir=None) -> dict:
    from . import geometry as geo
    from .errors import FlatCaseError, PreconditionError

    thetas = []
    rng = _rng(cfg["seed"], 3)
    for th in cfg["theta"]:
        try:
            red = geo.reduce_metric_2d(th)
        except FlatCaseError as exc:
            raise ConfigError(f"theta = {th}: {exc}") from None
        except PreconditionError as exc:
            raise ConfigError(f"theta = {th}: {exc}") from None
        r = red.residual(rng.uniform(0.1, 4.0, 50))
        thetas.append({"theta": th, "scale": red.scale, "residual": r,
                       "passed": bool(r <= cfg["reduction_tolerance"])})
    with ThreadPoolExecutor(max_workers=len(cfg["D"])) as pool:
        cases = list(pool.map(lambda D: _geometry_case(cfg, D), cfg["D"]))
    tasks = [(D, o) for D in cfg["modes"]["D"] for o in cfg["modes"]["orders"]]
    with ThreadPoolExecutor(max_workers=max(1, len(tasks))) as pool:
        mode_out = list(pool.map(lambda a: _mode_case(cfg, *a), tasks))
    modes = [m[0] for m in mode_out]
    if emit_dir is not None:
        from .fuzzy.spectrum import atomic_write
        from .group.algebra import GridFunction

        # D = 2 tables only, decimated to at most ~128 points per axis
        for entry, (f, mode) in mode_out:
            if f.D != 2:
                continue
            stride = max(1, f.t.size // 128)
            sub = GridFunction(f.t[::stride], (f.y[0][::stride],), f.values[::stride, ::stride])
            resid = geo.laplace_apply(sub, mode.mu2)
            name = f"mode_D2_nu_{entry['nu'][0]:+.3f}_{entry['nu'][1]:+.3f}.csv"
            _write_mode_table(os.path.join(emit_dir, name), sub, resid, atomic_write)
    passed = (all(c["passed"] for c in cases) and all(m["passed"] for m in modes)
              and all(t["passed"] for t in thetas))
    return {"theta_reductions": thetas, "cases": cases, "modes": modes, "passed": passed}


def _write_mode_table(path, f, resid, writer) -> None:
    mesh = np.meshgrid(f.t, *f.y, indexing="ij")
    cols = ["t"] + [f"y{k + 1}" for k in range(len(f.y))] + ["re", "im", "residual_re", "residual_im"]
    flat = [a.ravel() for a in mesh] + [f.values.real.ravel(), f.values.imag.ravel(),
                                        resid.values.real.ravel(), resid.values.imag.ravel()]
    lines = [",".join(cols)] + [",".join(repr(float(v)) for v in row) for row in zip(*flat)]
    writer(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# fuzzy-spectrum
# ---------------------------------------------------------------------------


def _fuzzy_case(cfg: dict, N: int):
    from .errors import ConvergenceError
    from .fuzzy import CoherentFamily, InitialState, fuzzy_laplacian, mode_compare
    from .numerics import eig_general
    from .representation import OscillatorTruncation, commutator_deviation, jordan_schwinger

    D = cfg["D"]
    tol = cfg["tolerances"]
    osc = OscillatorTruncation(N)
    ops = jordan_schwinger(osc, cfg["lambda"])
    state = InitialState.oscillator_ground(osc)
    lat = cfg["lattice"]
    t = np.linspace(*cfg["window"]["t"], lat[0])
    ys = [np.linspace(*cfg["window"]["y"], lat[1])]
    if D == 3:
        ys.append(np.linspace(*cfg["window"]["y"], lat[2]))
    family = CoherentFamily(state, ops, t, tuple(ys))
    L = fuzzy_laplacian(ops, D, max_dim=tol.get("superoperator_max_dim"))
    try:
        eig = eig_general(L, deflation=tol.get("qr_deflation"),
                          iteration_factor=tol.get("qr_iteration_factor"),
                          ill_conditioned=tol.get("ill_conditioned"), defective=tol.get("defective"))
    except ConvergenceError as exc:
        raise CheckFailed(f"N = {N}: {exc}") from None
    g = cfg["lambda_grid"]
    grid = np.geomspace(g["min"], g["max"], g["n"])
    grid = np.concatenate([-grid[::-1], grid])
    report = mode_compare(eig, family, n_modes=cfg["n_modes"], lam_grid=grid,
                          direction=cfg["lambda"], overlap_floor=tol.get("overlap_floor"),
                          config=cfg)
    report.truncation = {
        "commutator_deviation": commutator_deviation(ops),
        "ill_conditioned": int(np.sum(eig.ill_conditioned)),
        "defective": int(np.sum(eig.defective)),
    }
    return report


def run_fuzzy_spectrum(cfg: dict, out_dir: str, emit_plots: bool = False) -> dict:
    from .fuzzy.spectrum import atomic_write

    with ThreadPoolExecutor(max_workers=len(cfg["N"])) as pool:
        reports = list(pool.map(lambda N: _fuzzy_case(cfg, N), cfg["N"]))
    runs = []
    for N, rep in zip(cfg["N"], reports):
        d = rep.to_dict()
        d.pop("config_hash", None)
        runs.append(d)
        lines = ["index,re,im"] + [f"{i},{float(z.real)!r},{float(z.imag)!r}"
                                   for i, z in enumerate(np.asarray(rep.eigenvalues))]
        atomic_write(os.path.join(out_dir, f"eigenvalues_N{N}.csv"), "\n".join(lines) + "\n")
        head = "index,eig_re,eig_im,overlap,lambda,kind,residual,fitted_mu2_re,fitted_mu2_im,fock_weight,matched"
        rows = [head]
        for m in rep.modes:
            lam = m.lam[0] if m.lam else float("nan")
            rows.append(",".join([str(m.index), repr(float(m.eigenvalue.real)), repr(float(m.eigenvalue.imag)),
                                  repr(m.overlap), repr(float(lam)), str(m.kind), repr(m.residual),
                                  repr(float(m.fitted_mu2.real)), repr(float(m.fitted_mu2.imag)),
                                  repr(m.fock_weight), str(int(m.matched))]))
        atomic_write(os.path.join(out_dir, f"modes_N{N}.csv"), "\n".join(rows) + "\n")
        if emit_plots:
            sub = os.path.join(out_dir, f"plots_N{N}")
            os.makedirs(sub, exist_ok=True)
            rep.write_mode_tables(sub)
    gates = {}
    gcfg = cfg["gates"]
    ov = [r.best_overlap for r in reports]
    rs = [r.best_residual for r in reports]
    if len(reports) > 1 and gcfg["overlap_non_decreasing"]:
        gates["overlap_non_decreasing"] = {"values": ov,
                                           "passed": bool(all(b >= a for a, b in zip(ov, ov[1:])))}
    if len(reports) > 1 and gcfg["residual_decreasing"]:
        gates["residual_decreasing"] = {"values": rs,
                                        "passed": bool(all(b < a for a, b in zip(rs, rs[1:])))}
    if gcfg["overlap_target"] is not None:
        gates["overlap_target"] = {"value": ov[-1], "target": gcfg["overlap_target"],
                                   "passed": bool(ov[-1] >= gcfg["overlap_target"])}
    passed = all(g["passed"] for g in gates.values())
    return {"runs": runs, "gates": gates, "passed": passed}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kappa-fuzzy", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", default="kappa_fuzzy_out", help="output directory (created if missing)")
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.add_argument("--emit-plots-csv", action="store_true", help="write gnuplot-ready mode tables")
    return p


def main(argv=None) -> int:
    from .fuzzy.spectrum import atomic_write, config_hash

    args = build_parser().parse_args(argv)
    try:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        if args.seed is not None and args.seed < 0:
            raise ConfigError("seed must be non-negative")
        cfg = validate_config(args.command, raw, args.seed)
        os.makedirs(args.out, exist_ok=True)
        if args.command == "group-check":
            results = run_group_check(cfg)
        elif args.command == "geometry-check":
            results = run_geometry_check(cfg, args.out if args.emit_plots_csv else None)
        else:
            results = run_fuzzy_spectrum(cfg, args.out, args.emit_plots_csv)
    except ConfigError as exc:
        print(f"kappa-fuzzy: config error: {exc}", file=sys.stderr)
        return 2
    except CheckFailed as exc:
        print(f"kappa-fuzzy: {exc}", file=sys.stderr)
        return 1
    report = {
        "command": args.command,
        "version": __version__,
        "seed": cfg["seed"],
        "config": cfg,
        "config_hash": config_hash(cfg),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "passed": results["passed"],
        "results": results,
    }
    atomic_write(os.path.join(args.out, "report.json"),
                 json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    status = "PASS" if results["passed"] else "FAIL"
    print(f"{args.command}: {status} (report: {os.path.join(args.out, 'report.json')})")
    return 0 if results["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
