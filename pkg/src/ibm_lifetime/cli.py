"""Command-line front end: ``ibm-lifetime {predict,quadrature,montecarlo,converge,verify}``.

Exit codes: 0 success, 1 acceptance failure, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

import numpy as np
import yaml

from . import acceptance
from .config import ConfigError, ExperimentConfig, config_from_mapping, load_config
from .montecarlo import BTBMExitSampler, IBMExitSampler, estimate_survival_curve
from .predictors import predict_bounded, predict_parabola, predict_twisted
from .subordination import (
    btbm_survival_density,
    btbm_survival_tail,
    ibm_survival,
    scaled_for,
    scaled_ratio,
    tail_prediction,
)

log = logging.getLogger("ibm_lifetime")

QUADRATURE_COLUMNS = ("t", "log_value", "error", "evaluations", "converged")
MONTECARLO_COLUMNS = ("t", "p_hat", "std_err", "n", "seed")
CONVERGE_COLUMNS = ("t", "log_value", "error", "scaled", "prediction", "ratio", "slope")
CONVERGE_MC_COLUMNS = ("mc_p_hat", "mc_std_err", "mc_agrees")
PREDICT_COLUMNS = ("tag", "scale", "rate", "prefactor_constant", "sharp", "bound")


# ---------------------------------------------------------------------------
# Output helpers.


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else str(value)
    if value is None:
        return ""
    return str(value)


def write_csv(rows: list[dict], columns, path: str | None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    text = buf.getvalue()
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def write_json(obj, path: str | None) -> str:
    text = json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False, default=_fmt)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text


def write_svg(rows: list[dict], path: str, title: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    t = np.array([r["t"] for r in rows])
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    axes[0].semilogx(t, [r["ratio"] for r in rows], "o-")
    axes[0].axhline(1.0, color="grey", lw=0.8)
    axes[0].set_xlabel("t")
    axes[0].set_ylabel("scaled / prediction")
    axes[1].plot(np.log(t), [r["log_value"] for r in rows], "o-")
    axes[1].set_xlabel("log t")
    axes[1].set_ylabel("log P")
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# ---------------------------------------------------------------------------
# Commands.


def collect_predictions(cfg: ExperimentConfig) -> list[dict]:
    rows = []

    def add(group, preds):
        for key, pred in preds.items():
            row = pred.to_dict()
            row["tag"] = f"{group}/{key}"
            if pred.notes:
                row["notes"] = pred.notes
            rows.append(row)

    if cfg.domain is not None and cfg.z is not None:
        add("bounded", predict_bounded(cfg.domain, cfg.z))
    if cfg.twisted is not None:
        add("twisted", predict_twisted(cfg.twisted))
    if cfg.parabola is not None:
        add("parabola", predict_parabola(cfg.parabola))
    if cfg.tail is not None and cfg.tail.kind != "step":
        add("tail", {"btbm": tail_prediction(cfg.tail)})
    if not rows:
        raise ConfigError("nothing to predict: give domain and z, twisted, parabola or tail")
    return rows


def aligned_table(rows: list[dict]) -> str:
    cells = [PREDICT_COLUMNS] + [tuple(_fmt(r.get(c)) for c in PREDICT_COLUMNS) for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(PREDICT_COLUMNS))]
    return "\n".join("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells)


def cmd_predict(cfg: ExperimentConfig, out) -> int:
    rows = collect_predictions(cfg)
    text = write_json({"predictions": rows}, cfg.outputs.get("json"))
    out.write(text + "\n\n" + aligned_table(rows) + "\n")
    return 0


def _quadrature(cfg: ExperimentConfig, t: float):
    if cfg.tail is not None and cfg.prediction in (None, "tail_btbm") and cfg.domain is None:
        return btbm_survival_tail(cfg.tail, t, cfg.quad_tol)
    domain, z = cfg.require_domain()
    if cfg.process == "ibm":
        return ibm_survival(domain, z, t, cfg.quad_tol)
    return btbm_survival_density(domain, z, t, cfg.quad_tol)


def cmd_quadrature(cfg: ExperimentConfig, out) -> int:
    rows = []
    for t in cfg.require_grid():
        est = _quadrature(cfg, t)
        log.info("t=%g log P=%.12g", t, est.log_value)
        rows.append({"t": t, "log_value": est.log_value, "error": est.abs_error_log,
                     "evaluations": est.evaluations, "converged": est.converged})
    out.write(write_csv(rows, QUADRATURE_COLUMNS, cfg.outputs.get("csv")))
    return 0


def _sampler(cfg: ExperimentConfig):
    domain, z = cfg.require_domain()
    return IBMExitSampler(domain, z) if cfg.process == "ibm" else BTBMExitSampler(domain, z)


def cmd_montecarlo(cfg: ExperimentConfig, out) -> int:
    ts = cfg.require_grid()
    ests = estimate_survival_curve(_sampler(cfg), ts, cfg.n, cfg.seed, cfg.workers)
    rows = [{"t": t, "p_hat": e.p_hat, "std_err": e.std_err, "n": e.n, "seed": e.seed} for t, e in zip(ts, ests)]
    out.write(write_csv(rows, MONTECARLO_COLUMNS, cfg.outputs.get("csv")))
    return 0


def _prediction(cfg: ExperimentConfig):
    if cfg.prediction is None:
        raise ConfigError("converge needs a prediction: bounded_ibm, bounded_ibm_log or tail_btbm")
    if cfg.prediction == "tail_btbm":
        return tail_prediction(cfg.tail)
    domain, z = cfg.require_domain()
    preds = predict_bounded(domain, z)
    return preds["ibm_sharp"] if cfg.prediction == "bounded_ibm" else preds["ibm_log"]


def converge_rows(cfg: ExperimentConfig) -> list[dict]:
    ts = cfg.require_grid()
    pred = _prediction(cfg)
    rows, logs = [], []
    for t in ts:
        if cfg.method == "montecarlo":
            est = None
        elif cfg.prediction == "tail_btbm":
            est = btbm_survival_tail(cfg.tail, t, cfg.quad_tol)
        else:
            est = ibm_survival(cfg.domain, cfg.z, t, cfg.quad_tol)
        row = {"t": t}
        if est is not None:
            row.update(log_value=est.log_value, error=est.abs_error_log)
            if cfg.prediction == "bounded_ibm":
                row["scaled"] = scaled_ratio(est, t, pred)
                row["prediction"] = pred.prefactor_constant
            else:
                row["scaled"] = scaled_for(est, t, pred) if t > math.e else None
                row["prediction"] = pred.rate
            row["ratio"] = row["scaled"] / row["prediction"] if row["scaled"] is not None else None
            logs.append(est.log_value)
            if len(logs) >= 2:
                row["slope"] = float(np.polyfit(np.log(ts[:len(logs)]), logs, 1)[0])
        rows.append(row)
    if cfg.method in ("montecarlo", "both"):
        sampler = IBMExitSampler(cfg.domain, cfg.z)
        ests = estimate_survival_curve(sampler, ts, cfg.n, cfg.seed, cfg.workers)
        for row, mc in zip(rows, ests):
            row["mc_p_hat"], row["mc_std_err"] = mc.p_hat, mc.std_err
            if "log_value" in row:
                row["mc_agrees"] = mc.agrees_with(math.exp(row["log_value"]), cfg.sigmas)
            else:
                row["log_value"] = math.log(mc.p_hat) if mc.p_hat > 0 else -math.inf
    return rows


def cmd_converge(cfg: ExperimentConfig, out) -> int:
    rows = converge_rows(cfg)
    columns = CONVERGE_COLUMNS + (CONVERGE_MC_COLUMNS if cfg.method in ("montecarlo", "both") else ())
    out.write(write_csv(rows, columns, cfg.outputs.get("csv")))
    if cfg.outputs.get("svg") and all(r.get("ratio") is not None for r in rows):
        write_svg(rows, cfg.outputs["svg"], f"{cfg.prediction} convergence")
    return 0


def cmd_verify(args, out) -> int:
    report = acceptance.run_suite(args.only, faults=args.fault or ())
    for line in acceptance.format_lines(report):
        out.write(line + "\n")
    if args.json:
        write_json(report, args.json)
    failed = [c for c in report["criteria"] if not c["passed"]]
    for c in failed:
        if c.get("error"):
            out.write(f"  criterion {c['id']} raised {c['error']}\n")
    out.write(("all criteria passed" if not failed else f"{len(failed)} criterion(s) failed") + "\n")
    return 0 if not failed else 1


# ---------------------------------------------------------------------------
# Argument handling.


def _set_nested(raw: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = raw
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set {dotted}: {k} is not a mapping")
    node[keys[-1]] = value


def build_config(args) -> ExperimentConfig:
    raw = load_config(args.config) if args.config else {}
    for item in args.set or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, text = item.split("=", 1)
        _set_nested(raw, key, yaml.safe_load(text))
    if args.t:
        raw.pop("t_grid", None)
        raw["t"] = args.t
    for key in ("z", "n", "seed", "workers", "method", "process", "prediction"):
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    if args.tol is not None:
        raw.setdefault("tolerances", {})["quadrature"] = args.tol
    for key in ("csv", "json", "svg"):
        value = getattr(args, key, None)
        if value:
            raw.setdefault("outputs", {})[key] = value
    return config_from_mapping(raw)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ibm-lifetime", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML experiment file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config entry, e.g. --set twisted.p=0.5 (repeatable)")
        p.add_argument("--t", type=float, nargs="+", help="explicit times, replacing t_grid")
        p.add_argument("--z", type=float, nargs="+", help="starting point")
        p.add_argument("--tol", type=float, help="quadrature relative tolerance")
        p.add_argument("--csv", help="write CSV here as well as to stdout")
        p.add_argument("--json", help="write JSON here")
        p.add_argument("--svg", help="write an SVG plot here (converge)")
        p.add_argument("--process", choices=("ibm", "btbm"))
        p.add_argument("--method", choices=("quadrature", "montecarlo", "both"))
        p.add_argument("--prediction", choices=("bounded_ibm", "bounded_ibm_log", "tail_btbm"))
        p.add_argument("--n", type=int, help="Monte Carlo draws")
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int, help="worker processes (default from IBM_LIFETIME_WORKERS)")

    for name, help_text in (
        ("predict", "print every applicable asymptotic constant"),
        ("quadrature", "survival by quadrature on a t grid"),
        ("montecarlo", "survival by Monte Carlo on a t grid"),
        ("converge", "scaled survival against a prediction on a t grid"),
    ):
        common(sub.add_parser(name, help=help_text))
    verify = sub.add_parser("verify", help="run the acceptance suite")
    verify.add_argument("--only", type=int, nargs="+", choices=sorted(acceptance.CRITERIA))
    verify.add_argument("--fault", action="append", choices=acceptance.FAULTS,
                        help="inject a known fault (prefactor: scale the sharp constant by 1.1)")
    verify.add_argument("--json", help="write the JSON report here")
    return parser


COMMANDS = {
    "predict": cmd_predict,
    "quadrature": cmd_quadrature,
    "montecarlo": cmd_montecarlo,
    "converge": cmd_converge,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "verify":
        return cmd_verify(args, out)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg, out)
    except (ConfigError, ValueError) as exc:
        sys.stderr.write(f"invalid configuration: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
