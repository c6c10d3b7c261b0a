"""Command line front end: ``freedeform --config run.json``."""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import os
import sys
from dataclasses import asdict
from importlib import resources

import jsonschema
import numpy as np

from . import freeconv as F
from . import models as M
from . import simlab as L
from . import spiked as SP
from . import support as S
from .errors import FreeDeformError, NoConvergence
from .models import DeformedModel

EXIT_OK, EXIT_USAGE, EXIT_NOCONV, EXIT_VERDICT = 0, 1, 2, 3
COMMANDS = ("convolve", "support", "outliers", "simulate", "compare")

DEFAULT_TOLERANCES = {
    "outlier": 0.10,
    "overlap": 0.05,
    "edge": 0.05,
    "count_fraction": 0.9,
    "ks": 0.02,
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# schemas
# ---------------------------------------------------------------------------

_SCHEMAS: dict = {}


def _inline(node):
    if isinstance(node, dict):
        ref = node.get("$ref")
        if isinstance(ref, str) and ref.endswith(".schema.json"):
            return load_schema(ref[: -len(".schema.json")])
        return {k: _inline(v) for k, v in node.items()}
    if isinstance(node, list):
        return [_inline(v) for v in node]
    return node


def load_schema(name: str) -> dict:
    """Schema shipped with the package, cross-file references inlined."""
    if name not in _SCHEMAS:
        text = resources.files("freedeform").joinpath("schemas", f"{name}.schema.json").read_text()
        _SCHEMAS[name] = _inline(json.loads(text))
    return _SCHEMAS[name]


def validate(obj, name: str) -> None:
    jsonschema.validate(obj, load_schema(name))


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(path, header, rows, comment: str):
    with open(path, "w", newline="") as fh:
        fh.write(f"# {comment} created={_dt.datetime.now(_dt.timezone.utc).isoformat()}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def write_json(path, obj, schema: str | None = None):
    if schema:
        validate(obj, schema)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, allow_nan=False)
        fh.write("\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _solver(cfg: dict) -> F.SolverConfig:
    return F.SolverConfig(**cfg.get("solver", {}))


def _spikes(cfg: dict):
    out = []
    for s in cfg.get("spikes", []):
        if isinstance(s, list):
            out.append((float(s[0]), int(s[1]) if len(s) > 1 else 1))
        else:
            out.append((float(s), 1))
    # same order as the outlier report, so spike coordinates line up
    return sorted(out, key=lambda s: -s[0])


def cmd_convolve(model, cfg, ctx):
    solver = _solver(cfg)
    if "grid" in cfg:
        g = cfg["grid"]
        grid = np.linspace(g["lo"], g["hi"], int(g["points"]))
        dens = F.convolve_density(model, grid=grid, cfg=solver)
    else:
        dens = F.convolve_density(model, cfg=solver)
    mom = [float(dens.moment(k)) for k in range(1, 5)]
    prefix = ctx["output"]
    rows = list(zip(dens.grid, dens.values))
    if ctx["format"] == "csv":
        write_csv(f"{prefix}_density.csv", ("x", "density"), rows, ctx["comment"])
    else:
        write_json(f"{prefix}_density.json", {"x": [float(x) for x in dens.grid], "density": [float(v) for v in dens.values]})
    summary = {
        "model_digest": model.digest(),
        "mass": float(dens.mass),
        "moments": mom,
        "points": int(dens.grid.size),
        "atoms": [[float(a), float(w)] for a, w in zip(dens.atom_locations, dens.atom_weights)],
        "lo": float(dens.grid[0]),
        "hi": float(dens.grid[-1]),
    }
    write_json(f"{prefix}_summary.json", summary, "density_summary")
    return EXIT_OK


def cmd_support(model, cfg, ctx):
    desc = S.support_intervals(model, _solver(cfg))
    prefix = ctx["output"]
    if ctx["format"] == "csv":
        rows = list(desc.csv_rows())
        write_csv(f"{prefix}_support.csv", rows[0], rows[1:], ctx["comment"])
    d = desc.to_dict()
    d["model_digest"] = model.digest()
    write_json(f"{prefix}_support.json", d, "support")
    return EXIT_OK


def predict_outliers(model, spikes, side, solver) -> dict:
    """Outlier report as a JSON-ready dict for any model kind."""
    if model.iid:
        sd = SP.SpikedDeformation(model, spikes, side)
        return SP.classify_spikes(sd, solver).to_dict()
    kind = "additive" if model.kind == M.ISOTROPIC_ADDITIVE else "multiplicative"
    rows = []
    for theta, k in spikes:
        rhos = SP.isotropic_outliers(model.mu, model.nu, theta, side=side, kind=kind, cfg=solver)
        ov = [SP.isotropic_overlap(model.mu, model.nu, theta, r, side=side, kind=kind, cfg=solver) for r in rhos]
        rows.append(
            {
                "theta": theta,
                "multiplicity": k,
                "classification": "Outlier" if rhos else "NoOutlier",
                "rho_values": rhos,
                "predicted_overlap": [float(min(max(x, 0.0), 1.0)) for x in ov],
                "critical": False,
                "alpha": None,
                "notes": ["multiplicative isotropic outliers use the same root scan; extrapolated"]
                if kind == "multiplicative"
                else [],
            }
        )
    return {
        "model_digest": model.digest(),
        "solver": asdict(solver),
        "side": side,
        "extrapolated": kind == "multiplicative",
        "spikes": rows,
    }


def cmd_outliers(model, cfg, ctx):
    rep = predict_outliers(model, _spikes(cfg), cfg.get("side", "nu"), _solver(cfg))
    write_json(f"{ctx['output']}_outliers.json", rep, "outlier_report")
    return EXIT_OK


def _run_sim(model, cfg, ctx, report=None, desc=None):
    sim = cfg["sim"]
    spikes = _spikes(cfg)
    side = cfg.get("side", "nu")
    seed = ctx["seed"] if ctx["seed"] is not None else int(sim.get("seed", 0))
    spec, coords = L.ensemble_for(model, int(sim["N"]), spikes, side, sim.get("p"), sim.get("entry_dist", "gaussian"), seed)
    trials = int(sim.get("trials", 1))
    solver = _solver(cfg)
    predicted = None
    if sim.get("ks", False):
        predicted = F.convolve_density(model, cfg=solver)
    predictions, projections = [], []
    if report is not None:
        above = []
        for row, ix in zip(report["spikes"], coords or [None] * len(report["spikes"])):
            if row["classification"] != "Outlier":
                continue
            predictions += row["rho_values"]
            if model.iid and row["multiplicity"] == 1 and row["rho_values"][0] > desc.hi:
                above.append((row["rho_values"][0], ix, row))
        above.sort(key=lambda t: -t[0])
        projections = [(j, ix) for j, (_, ix, _) in enumerate(above)]
    res = L.run_trials(
        spec,
        trials,
        ctx["threads"],
        support=desc,
        predicted=predicted,
        predictions=predictions,
        projections=projections,
        margin=float(sim.get("margin", L.OUTLIER_MARGIN)),
    )
    return spec, res, predicted, predictions, projections


def _write_sim(spec, res, predictions, ctx):
    prefix = ctx["output"]
    n = spec.N
    rows = [[r.trial] + list(r.eigenvalues) for r in res]
    if ctx["format"] == "csv":
        header = ["trial"] + [f"lambda_{i + 1}" for i in range(n)]
        write_csv(f"{prefix}_eigenvalues.csv", header, rows, f"{ctx['comment']} spec_hash={spec.digest()}")
    body = {
        "spec_hash": spec.digest(),
        "seed": int(spec.seed),
        "spec": {k: v for k, v in spec.to_dict().items() if k not in ("a_spec", "b_spec")},
        "predictions": [float(x) for x in predictions],
        "trials": [r.to_dict() for r in res],
    }
    write_json(f"{prefix}_sim.json", body, "sim_result")


def cmd_simulate(model, cfg, ctx):
    desc = S.support_intervals(model, _solver(cfg))
    report = predict_outliers(model, _spikes(cfg), cfg.get("side", "nu"), _solver(cfg)) if cfg.get("spikes") else None
    spec, res, _, predictions, _ = _run_sim(model, cfg, ctx, report, desc)
    _write_sim(spec, res, predictions, ctx)
    return EXIT_OK


def _check(name, passed, tol, predicted=None, measured=None, detail=""):
    return {
        "name": name,
        "passed": bool(passed),
        "tolerance": float(tol),
        "predicted": None if predicted is None else float(predicted),
        "measured": None if measured is None or not np.isfinite(measured) else float(measured),
        "detail": detail,
    }


def cmd_compare(model, cfg, ctx):
    solver = _solver(cfg)
    tol = dict(DEFAULT_TOLERANCES, **cfg.get("tolerances", {}))
    desc = S.support_intervals(model, solver)
    spikes = _spikes(cfg)
    report = predict_outliers(model, spikes, cfg.get("side", "nu"), solver) if spikes else None
    spec, res, predicted, predictions, projections = _run_sim(model, cfg, ctx, report, desc)
    checks = []
    preds = sorted(set(predictions))
    expected = 0
    if report is not None:
        expected = sum(len(r["rho_values"]) * r["multiplicity"] for r in report["spikes"] if r["classification"] == "Outlier")
    for rho in preds:
        hits = [o[0] for r in res for o in r.outliers if o[1] is not None and abs(o[1] - rho) < 1e-12]
        mean = float(np.mean(hits)) if hits else float("nan")
        checks.append(
            _check(f"outlier_position[{rho:.6g}]", hits and abs(mean - rho) <= tol["outlier"], tol["outlier"], rho, mean,
                   f"matched in {len(hits)} of {len(res)} trials")
        )
    counts = [len(r.outliers) for r in res]
    frac = float(np.mean([c == expected for c in counts]))
    checks.append(_check("outlier_count", frac >= tol["count_fraction"], tol["count_fraction"], expected, frac,
                         "fraction of trials with the predicted number of outliers"))
    if projections:
        above = sorted(
            ((r["rho_values"][0], r) for r in report["spikes"]
             if r["classification"] == "Outlier" and r["multiplicity"] == 1 and r["rho_values"][0] > desc.hi),
            key=lambda t: -t[0],
        )
        for j, (_, row) in enumerate(above):
            meas = float(np.mean([r.overlaps[j] for r in res]))
            pred = row["predicted_overlap"][0]
            checks.append(_check(f"overlap[{row['theta']:.6g}]", abs(meas - pred) <= tol["overlap"], tol["overlap"], pred, meas))
    if not any(p > desc.hi for p in preds):
        top = float(np.mean([r.eigenvalues[0] for r in res]))
        checks.append(_check("top_edge", abs(top - desc.hi) <= tol["edge"], tol["edge"], desc.hi, top,
                             "mean largest eigenvalue against the right support edge"))
    if predicted is not None:
        pooled = np.concatenate([r.eigenvalues for r in res])
        ks = L.empirical_stats(pooled, predicted)[0]
        checks.append(_check("ks_pooled", ks <= tol["ks"], tol["ks"], 0.0, ks))
    passed = all(c["passed"] for c in checks)
    verdict = {
        "passed": passed,
        "spec_hash": spec.digest(),
        "seed": int(spec.seed),
        "model_digest": model.digest(),
        "checks": checks,
    }
    write_json(f"{ctx['output']}_verdict.json", verdict, "verdict")
    _write_sim(spec, res, predictions, ctx)
    return EXIT_OK if passed else EXIT_VERDICT


HANDLERS = {
    "convolve": cmd_convolve,
    "support": cmd_support,
    "outliers": cmd_outliers,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="freedeform", description="Free-convolution predictions and Monte Carlo for deformed random matrices.")
    p.add_argument("command", nargs="?", choices=COMMANDS, help="overrides the command in the config file")
    p.add_argument("--config", required=True, help="run configuration (JSON)")
    p.add_argument("--output", help="output path prefix")
    p.add_argument("--seed", type=int, help="base seed for simulations")
    p.add_argument("--threads", type=int, help="worker cap for parallel trials (default: logical cores)")
    p.add_argument("--format", choices=("csv", "json"), help="format of tabular outputs")
    return p


def _fail(kind: str, message: str, code: int, **extra) -> int:
    err = {"error": kind, "message": message, "exit_code": code}
    err.update(extra)
    print(json.dumps(err), file=sys.stderr)
    return code


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not os.path.exists(args.config):
            raise UsageError(f"config file {args.config!r} does not exist")
        with open(args.config) as fh:
            cfg = json.load(fh)
        if args.command:
            cfg["command"] = args.command
        validate(cfg, "run_config")
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        if args.threads is not None and args.threads < 1:
            raise UsageError("--threads must be positive")
        output = args.output or cfg.get("output") or cfg["command"]
        out_dir = os.path.dirname(os.path.abspath(output))
        if not os.path.isdir(out_dir) or not os.access(out_dir, os.W_OK):
            raise UsageError(f"output directory {out_dir!r} is not writable")
        ctx = {
            "output": output,
            "format": args.format or cfg.get("format", "csv"),
            "seed": args.seed,
            "threads": args.threads or L.default_threads(),
        }
        model = DeformedModel.from_dict(cfg["model"])
        ctx["comment"] = f"freedeform {cfg['command']} model={model.digest()}"
        if args.seed is not None:
            ctx["comment"] += f" seed={args.seed}"
        elif "sim" in cfg:
            ctx["comment"] += f" seed={int(cfg['sim'].get('seed', 0))}"
        return HANDLERS[cfg["command"]](model, cfg, ctx)
    except NoConvergence as e:
        return _fail("NoConvergence", str(e), EXIT_NOCONV, residual=_finite(e.residual), iterations=e.iterations)
    except (UsageError, jsonschema.ValidationError, json.JSONDecodeError) as e:
        msg = e.message if isinstance(e, jsonschema.ValidationError) else str(e)
        return _fail(type(e).__name__, msg, EXIT_USAGE)
    except (FreeDeformError, ValueError, TypeError, KeyError) as e:
        return _fail(type(e).__name__, str(e), EXIT_USAGE)


def _finite(x):
    return float(x) if x is not None and np.isfinite(x) else None


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
