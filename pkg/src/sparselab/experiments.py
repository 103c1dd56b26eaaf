"""Seeded experiment orchestration with CSV/SVG emission.

Experiments are declared in a registry mapping a name to a parameter schema
and a runner.  Replicate r of a run always derives its randomness from
``base_seed + r`` (sub-draws within one replicate use SeedSequence-derived
streams), so results are independent of execution order and identical
configs produce identical CSV bytes.

Per-replicate failures are data: the failing replicate's metric cells are
emitted as ``inf`` and counted in the ``failed``/``failures`` column, and
the sweep continues.
"""

import configparser
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .clique import amp_clique, degree_heuristic, load_edge_list, overlap, spectral_clique
from .lasso import FixedAlpha, LassoProblem, amp_lasso, ista
from .models import (
    gaussian_design,
    linear_observe,
    orthogonal_design,
    planted_clique_instance,
    signed_permutation_design,
    sparse_signal,
)
from .regression import bias_variance_curve, ortho_denoise, universal_threshold
from .shrinkage import ShrinkageRule, minimax_soft
from .state_evolution import phase_boundary


class UsageError(ValueError):
    """Bad configuration: unknown experiment, missing key, or out-of-range value."""


@dataclass
class RunConfig:
    experiment: str
    parameters: dict = field(default_factory=dict)
    base_seed: int = 0
    replicates: int = 1
    output_dir: Path | None = None
    jobs: int = 1
    svg: bool = False


@dataclass
class ResultTable:
    columns: list  # ordered (name, unit) pairs
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name):
        for i, (cname, _) in enumerate(self.columns):
            if cname == name:
                return np.asarray([row[i] for row in self.rows], dtype=float)
        raise UsageError(f"unknown column {name!r}")


@dataclass
class PlotSpec:
    x: str
    ys: list
    logx: bool = False
    logy: bool = False
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""


def _sub_seed(base_seed, replicate, slot):
    """Deterministic 32-bit seed for the slot-th random object of a replicate."""
    ss = np.random.SeedSequence((int(base_seed), int(replicate), int(slot)))
    return int(ss.generate_state(1, np.uint32)[0])


def _run_replicates(fn, replicates, jobs):
    """Run fn(r) for r = 0..replicates-1, catching per-replicate errors.

    Returns a list in replicate order of (result, error_message) pairs, so
    aggregation never depends on completion order.
    """

    def safe(r):
        try:
            return fn(r), None
        except Exception as exc:  # failures are data, not crashes
            return None, f"{type(exc).__name__}: {exc}"

    if jobs <= 1:
        return [safe(r) for r in range(replicates)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(safe, range(replicates)))


# ---------------------------------------------------------------------------
# experiment runners


def _run_denoise(params, base_seed, replicates, jobs):
    p = params["p"]
    s0 = params["s0"]
    sigma = params["sigma"]
    lam = universal_threshold(sigma, p, p)
    amplitude = params["amplitude_mult"] * lam
    rule = ShrinkageRule(params["rule"], lam)
    make_design = {
        "permutation": signed_permutation_design,
        "haar": orthogonal_design,
    }[params["design"]]

    def one(r):
        seed = base_seed + r
        X = make_design(p, _sub_seed(seed, 0, 0))
        theta = sparse_signal(p, s0, amplitude, _sub_seed(seed, 0, 1))
        obs = linear_observe(X, theta, sigma, _sub_seed(seed, 0, 2))
        theta_hat = ortho_denoise(X, obs.y, rule)
        return float(np.sum((theta_hat - theta.values) ** 2))

    rows = []
    for r, (val, err) in enumerate(_run_replicates(one, replicates, jobs)):
        rows.append((r, val if err is None else math.inf, 0 if err is None else 1))
    columns = [("replicate", ""), ("sq_err", ""), ("failed", "")]
    meta = {"risk_ref": s0 * sigma**2 * 2.0 * math.log(p) / p, "lambda": lam}
    return columns, rows, meta


def _run_bias_variance(params, base_seed, replicates, jobs):
    signals = {
        "kink": lambda t: abs(t - 0.5),
        "cos3": lambda t: math.cos(3.0 * math.pi * t),
    }
    f = signals[params["signal"]]
    curve = bias_variance_curve(
        f, params["n"], params["sigma"], params["J_max"], replicates, base_seed
    )
    rows = [(J, risk) for J, risk in curve.grid]
    return [("J", ""), ("risk", "")], rows, {"argmin_J": curve.argmin_J}


def _run_lasso_compare(params, base_seed, replicates, jobs):
    p = params["p"]
    delta = params["delta"]
    eps = params["eps"]
    n = int(round(delta * p))
    s0 = int(round(eps * p))
    kappa = params["kappa"] or minimax_soft(eps).ell
    tol = params["tol"]

    def one(r):
        seed = base_seed + r
        X = gaussian_design(n, p, _sub_seed(seed, 0, 0))
        theta = sparse_signal(p, s0, params["amplitude"], _sub_seed(seed, 0, 1))
        sigma_obs = params["sigma_se"] * math.sqrt(n)
        obs = linear_observe(X, theta, sigma_obs, _sub_seed(seed, 0, 2))
        amp = amp_lasso(
            LassoProblem(X, obs.y, 0.0), FixedAlpha(kappa),
            max_iter=params["max_iter"], tol=tol,
        )
        prob = LassoProblem(X, obs.y, amp.induced_lambda)
        ist = ista(prob, max_iter=params["max_iter"], tol=tol)
        amp_mse = float(np.sum((amp.final - theta.values) ** 2) / p)
        ista_mse = float(np.sum((ist.final - theta.values) ** 2) / p)
        return amp.induced_lambda, amp.iterations, ist.iterations, amp_mse, ista_mse

    rows = []
    for r, (val, err) in enumerate(_run_replicates(one, replicates, jobs)):
        if err is None:
            rows.append((r, *val, 0))
        else:
            rows.append((r, math.inf, math.inf, math.inf, math.inf, math.inf, 1))
    columns = [
        ("replicate", ""), ("induced_lambda", ""), ("amp_iterations", ""),
        ("ista_iterations", ""), ("amp_mse", ""), ("ista_mse", ""), ("failed", ""),
    ]
    return columns, rows, {"kappa": kappa, "n": n, "s0": s0}


def _run_se_phase_diagram(params, base_seed, replicates, jobs):
    lo, hi, num = params["eps_min"], params["eps_max"], params["num_eps"]
    if not 0 < lo < hi < 1:
        raise UsageError(f"need 0 < eps_min < eps_max < 1, got {lo}, {hi}")
    if params["spacing"] == "log":
        grid = np.exp(np.linspace(math.log(lo), math.log(hi), num))
    else:
        grid = np.linspace(lo, hi, num)
    rows = [(e, d) for e, d in phase_boundary(grid)]
    return [("eps", ""), ("delta_c", "")], rows, {}


_CLIQUE_METHODS = {
    "degree": lambda inst, T: degree_heuristic(inst),
    "spectral": lambda inst, T: spectral_clique(inst),
    "amp": lambda inst, T: amp_clique(inst, T=T),
}


def _run_clique(params, base_seed, replicates, jobs):
    method = params["method"]
    if method not in _CLIQUE_METHODS:
        raise UsageError(f"unknown clique method {method!r}")
    T = params["T"]

    if params["edge_list"]:
        # single-instance mode: recover a clique from a file, no ground truth
        if params["k"] < 1:
            raise UsageError("edge-list mode requires k >= 1")
        inst = load_edge_list(params["edge_list"], params["k"])
        est = _CLIQUE_METHODS[method](inst, T)
        rows = [(rank, int(v)) for rank, v in enumerate(est.S_hat)]
        return [("rank", ""), ("vertex", "")], rows, {"method": method, "n": inst.n}

    n = params["n"]
    kappas = params["kappas"]
    if not kappas:
        raise UsageError("clique sweep requires a nonempty 'kappas' grid")
    rows = []
    for kap in kappas:
        k = max(1, int(math.ceil(kap * math.sqrt(n))))

        def one(r, k=k):
            inst = planted_clique_instance(n, k, base_seed + r)
            est = _CLIQUE_METHODS[method](inst, T)
            return overlap(est.S_hat, inst.S)

        results = _run_replicates(one, replicates, jobs)
        ovs = [val for val, err in results if err is None]
        failures = sum(1 for _, err in results if err is not None)
        successes = sum(1 for ov in ovs if ov == 1.0)
        rows.append((
            kap, k, replicates, successes,
            successes / replicates,
            float(np.mean(ovs)) if ovs else math.inf,
            failures,
        ))
    columns = [
        ("kappa", ""), ("k", ""), ("replicates", ""), ("successes", ""),
        ("success_rate", ""), ("mean_overlap", ""), ("failures", ""),
    ]
    return columns, rows, {"method": method, "n": n}


_REQUIRED = object()


def _floats_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(tok) for tok in str(text).replace(",", " ").split()]


EXPERIMENTS = {
    "denoise": {
        "runner": _run_denoise,
        "params": {
            "p": (int, 10_000),
            "s0": (int, 10),
            "sigma": (float, 1.0),
            "amplitude_mult": (float, 10.0),
            "rule": (str, "soft"),
            "design": (str, "permutation"),
        },
        "plot": PlotSpec("replicate", ["sq_err"], xlabel="replicate", ylabel="squared error"),
    },
    "bias_variance": {
        "runner": _run_bias_variance,
        "params": {
            "signal": (str, "kink"),
            "n": (int, 512),
            "sigma": (float, 0.5),
            "J_max": (int, 32),
        },
        "plot": PlotSpec("J", ["risk"], logx=True, logy=True, xlabel="J", ylabel="risk"),
    },
    "lasso_compare": {
        "runner": _run_lasso_compare,
        "params": {
            "p": (int, 1000),
            "delta": (float, 0.5),
            "eps": (float, 0.1),
            "sigma_se": (float, 0.2),
            "amplitude": (float, 3.0),
            "kappa": (float, 0.0),
            "tol": (float, 1e-6),
            "max_iter": (int, 2000),
        },
        "plot": PlotSpec(
            "replicate", ["amp_iterations", "ista_iterations"],
            xlabel="replicate", ylabel="iterations",
        ),
    },
    "se_phase_diagram": {
        "runner": _run_se_phase_diagram,
        "params": {
            "eps_min": (float, 0.01),
            "eps_max": (float, 0.5),
            "num_eps": (int, 20),
            "spacing": (str, "log"),
        },
        "plot": PlotSpec("eps", ["delta_c"], xlabel="eps", ylabel="delta_c"),
    },
    "clique_sweep": {
        "runner": _run_clique,
        "params": {
            "n": (int, 2000),
            "kappas": (_floats_list, [0.4, 0.6, 0.8, 1.0, 1.2]),
            "method": (str, "amp"),
            "T": (int, 30),
            "edge_list": (str, ""),
            "k": (int, 0),
        },
        "plot": PlotSpec("kappa", ["success_rate"], xlabel="kappa", ylabel="success rate"),
    },
}


def validate_parameters(experiment, raw):
    """Coerce raw (possibly string-valued) parameters against the schema."""
    if experiment not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {experiment!r}")
    schema = EXPERIMENTS[experiment]["params"]
    out = {}
    for key, value in raw.items():
        if key not in schema:
            raise UsageError(f"{experiment}: unknown parameter {key!r}")
    for key, (parse, default) in schema.items():
        if key in raw:
            try:
                out[key] = parse(raw[key])
            except (TypeError, ValueError) as exc:
                raise UsageError(f"{experiment}: invalid value for {key!r}: {exc}") from exc
        elif default is _REQUIRED:
            raise UsageError(f"{experiment}: missing required parameter {key!r}")
        else:
            out[key] = default
    return out


def run_experiment(cfg):
    """Execute a validated RunConfig and return (and optionally write) the table."""
    if cfg.replicates < 1:
        raise UsageError(f"replicates must be >= 1, got {cfg.replicates}")
    if cfg.jobs < 1:
        raise UsageError(f"jobs must be >= 1, got {cfg.jobs}")
    params = validate_parameters(cfg.experiment, cfg.parameters)
    spec = EXPERIMENTS[cfg.experiment]
    start = time.time()
    columns, rows, extra = spec["runner"](params, cfg.base_seed, cfg.replicates, cfg.jobs)
    table = ResultTable(
        columns,
        rows,
        metadata={
            "experiment": cfg.experiment,
            "parameters": params,
            "base_seed": cfg.base_seed,
            "replicates": cfg.replicates,
            "version": __version__,
            "wall_clock_s": time.time() - start,
            **extra,
        },
    )
    if cfg.output_dir is not None:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        emit_csv(table, out / f"{cfg.experiment}.csv")
        meta = dict(table.metadata)
        meta["parameters"] = {k: repr(v) for k, v in meta["parameters"].items()}
        (out / f"{cfg.experiment}.meta.json").write_text(
            json.dumps(meta, indent=2, default=str) + "\n"
        )
        if cfg.svg and spec["plot"] is not None:
            emit_svg_plot(table, spec["plot"], out / f"{cfg.experiment}.svg")
    return table


# ---------------------------------------------------------------------------
# emission


def _format_cell(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        raise ValueError("NaN cell in result table; encode divergence as inf upstream")
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def emit_csv(table, path):
    """RFC-4180-style CSV: header of column names, 17 significant digits, LF endings."""
    lines = [",".join(name for name, _ in table.columns)]
    width = len(table.columns)
    for row in table.rows:
        if len(row) != width:
            raise ValueError(f"row width {len(row)} != column count {width}")
        lines.append(",".join(_format_cell(v) for v in row))
    try:
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def parse_csv(path):
    """Inverse of emit_csv (numeric payloads only)."""
    text = Path(path).read_text()
    lines = [ln for ln in text.split("\n") if ln]
    header = lines[0].split(",")
    rows = [tuple(float(tok) for tok in ln.split(",")) for ln in lines[1:]]
    return header, rows


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
_W, _H = 640, 480
_ML, _MR, _MT, _MB = 70, 20, 30, 50


def _axis_transform(values, log):
    v = np.asarray(values, dtype=float)
    if log:
        if np.any(v <= 0):
            raise UsageError("log axis requires strictly positive values")
        v = np.log10(v)
    return v


def emit_svg_plot(table, plot_spec, path):
    """Standalone deterministic SVG 1.1 line/scatter plot of table columns."""
    if not table.rows:
        raise UsageError("empty table: nothing to plot")
    x_raw = table.column(plot_spec.x)
    ys_raw = [table.column(name) for name in plot_spec.ys]
    finite_mask = np.isfinite(x_raw)
    x = _axis_transform(x_raw[finite_mask], plot_spec.logx)
    ys = []
    for y in ys_raw:
        yv = y[finite_mask]
        keep = np.isfinite(yv)
        ys.append((yv, keep))
    all_y = np.concatenate([_axis_transform(yv[keep], plot_spec.logy) for yv, keep in ys if keep.any()])
    if all_y.size == 0:
        raise UsageError("no finite values to plot")
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(all_y.min()), float(all_y.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def sx(v):
        return _ML + (v - x0) / (x1 - x0) * (_W - _ML - _MR)

    def sy(v):
        return _H - _MB - (v - y0) / (y1 - y0) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" stroke="black"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        tx = x0 + frac * (x1 - x0)
        ty = y0 + frac * (y1 - y0)
        lx = 10**tx if plot_spec.logx else tx
        ly = 10**ty if plot_spec.logy else ty
        parts.append(
            f'<line x1="{sx(tx):.2f}" y1="{_H - _MB}" x2="{sx(tx):.2f}" y2="{_H - _MB + 5}" stroke="black"/>'
            f'<text x="{sx(tx):.2f}" y="{_H - _MB + 18}" font-size="11" text-anchor="middle">{lx:.4g}</text>'
        )
        parts.append(
            f'<line x1="{_ML - 5}" y1="{sy(ty):.2f}" x2="{_ML}" y2="{sy(ty):.2f}" stroke="black"/>'
            f'<text x="{_ML - 8}" y="{sy(ty):.2f}" font-size="11" text-anchor="end" dominant-baseline="middle">{ly:.4g}</text>'
        )
    xlabel = plot_spec.xlabel or plot_spec.x
    ylabel = plot_spec.ylabel or ",".join(plot_spec.ys)
    if plot_spec.logx:
        xlabel += " (log)"
    if plot_spec.logy:
        ylabel += " (log)"
    parts.append(
        f'<text x="{(_ML + _W - _MR) / 2:.1f}" y="{_H - 12}" font-size="13" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{(_MT + _H - _MB) / 2:.1f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2:.1f})">{ylabel}</text>'
    )
    if plot_spec.title:
        parts.append(
            f'<text x="{_W / 2:.1f}" y="18" font-size="14" text-anchor="middle">{plot_spec.title}</text>'
        )
    order = np.argsort(x, kind="stable")
    for i, (name, (yv, keep)) in enumerate(zip(plot_spec.ys, ys)):
        color = _PALETTE[i % len(_PALETTE)]
        pts = []
        for j in order:
            if not keep[j]:
                continue
            yt = _axis_transform([yv[j]], plot_spec.logy)[0]
            pts.append(f"{sx(x[j]):.2f},{sy(yt):.2f}")
        if not pts:
            continue
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(pts)}"/>'
        )
        parts.append(
            f'<text x="{_W - _MR - 5}" y="{_MT + 14 * (i + 1)}" font-size="11" '
            f'text-anchor="end" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    try:
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(parts) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write SVG to {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# config files


def load_config(path):
    """Read a flat key = value config file with one section per experiment.

    The [run] section selects the experiment and the global knobs
    (seed, replicates, jobs, out, svg); the [<experiment>] section holds
    that experiment's parameters as raw strings (validated by the schema).
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise OSError(f"cannot read config file {path}")
    if "run" not in parser:
        raise UsageError(f"{path}: missing [run] section")
    run = parser["run"]
    experiment = run.get("experiment")
    if not experiment:
        raise UsageError(f"{path}: [run] must set 'experiment'")
    if experiment not in EXPERIMENTS:
        raise UsageError(f"{path}: unknown experiment {experiment!r}")
    try:
        cfg = RunConfig(
            experiment=experiment,
            base_seed=run.getint("seed", 0),
            replicates=run.getint("replicates", 1),
            jobs=run.getint("jobs", 1),
            output_dir=Path(run["out"]) if "out" in run else None,
            svg=run.getboolean("svg", False),
        )
    except ValueError as exc:
        raise UsageError(f"{path}: bad [run] value: {exc}") from exc
    if experiment in parser:
        cfg.parameters = dict(parser[experiment])
    return cfg
