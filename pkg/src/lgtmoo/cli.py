"""Command-line front end.

``lgtmoo {vqe|vqt|penalty-sweep|temp-sweep|ed} --config PATH --out DIR [--seed N]``

Configs are YAML (JSON is valid YAML). Keys are the ``RunConfig`` fields plus
the model keys ``n_sites, t, h, boundary, enforced``; ``p`` is accepted as an
alias of ``n_blocks``. A mapping keyed by a mode name (``vqt_moo: {...}``)
overrides the flat keys when that mode is active.

Exit status: 0 converged, 2 ran but unconverged, 1 error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import fields, replace
from pathlib import Path

import yaml

from . import drivers, lgt_model
from .drivers import MODES, RunConfig, RunTrace
from .lgt_model import ModelSpec

EXIT_OK, EXIT_ERROR, EXIT_UNCONVERGED = 0, 1, 2
MODEL_KEYS = {"n_sites", "t", "h", "boundary", "enforced"}
RUN_KEYS = {f.name for f in fields(RunConfig)} - {"model"}
ALIASES = {"p": "n_blocks"}
ALLOWED = MODEL_KEYS | RUN_KEYS | set(ALIASES)
TUPLE_KEYS = {"mu_grid", "t_grid", "enforced"}
SUBCOMMAND_MODES = {
    "vqe": ("vqe_moo",),
    "vqt": ("vqt_moo",),
    "penalty-sweep": ("vqe_penalty", "vqt_penalty"),
    "temp-sweep": ("vqt_moo",),
    "ed": MODES,
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


def _check_keys(section: dict, where: str) -> None:
    for key in section:
        if key not in ALLOWED:
            raise ConfigError(f"unknown config key {key!r}{where}")


def _resolve(raw: dict) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    if "mode" not in raw:
        raise ConfigError("missing required key 'mode'")
    mode = raw["mode"]
    if mode not in MODES:
        raise ConfigError(f"'mode' must be one of {MODES}, got {mode!r}")
    flat = {}
    for key, value in raw.items():
        if key in MODES:
            if not isinstance(value, dict):
                raise ConfigError(f"section {key!r} must be a mapping")
            _check_keys(value, f" in section {key!r}")
        else:
            _check_keys({key: value}, "")
            flat[ALIASES.get(key, key)] = value
    if isinstance(raw.get(mode), dict):
        flat.update({ALIASES.get(k, k): v for k, v in raw[mode].items()})
    return flat


def _coerce(key: str, value, kind):
    if value is None:
        return None
    try:
        if key in TUPLE_KEYS:
            return tuple(kind(v) for v in value)
        if kind is bool and not isinstance(value, bool):
            raise TypeError
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value for {key!r}: {value!r}") from None


_KINDS = {
    "n_sites": int, "t": float, "h": float, "boundary": str, "enforced": int,
    "mode": str, "n_blocks": int, "eta": float, "max_iters": int, "kkt_tol": float,
    "l2_tol": float, "seed": int, "restarts": int, "temperature": float, "mu": float,
    "mu_grid": float, "t_grid": float, "ring": bool, "theta_scale": float,
    "phi_center": float, "phi_width": float,
}

# checks whose failure message should name the key
_POSITIVE = ("eta", "temperature", "kkt_tol", "l2_tol", "max_iters", "restarts", "n_blocks", "theta_scale")


def build_config(raw: dict, seed: int | None = None) -> RunConfig:
    flat = _resolve(raw)
    if "n_sites" not in flat:
        raise ConfigError("missing required key 'n_sites'")
    values = {k: _coerce(k, v, _KINDS[k]) for k, v in flat.items()}
    if seed is not None:
        values["seed"] = int(seed)
    for key in _POSITIVE:
        if values.get(key) is not None and values[key] <= 0:
            raise ConfigError(f"{key!r} must be positive, got {values[key]!r}")
    for key in ("mu", "phi_width"):
        if values.get(key) is not None and values[key] < 0:
            raise ConfigError(f"{key!r} must be >= 0, got {values[key]!r}")
    mode = values["mode"]
    if mode.startswith("vqt") and values.get("temperature") is None and not values.get("t_grid"):
        raise ConfigError(f"mode {mode!r} requires key 'temperature'")
    if mode.startswith("vqt") and values.get("temperature") is None:
        values["temperature"] = values["t_grid"][0]
    model_kw = {k: values.pop(k) for k in MODEL_KEYS if k in values}
    try:
        model = ModelSpec(**model_kw)
        return RunConfig(model=model, **values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(path, seed: int | None = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read config file {str(path)!r}: {exc.strerror}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config file {str(path)!r}: {exc}") from None
    return build_config(raw if raw is not None else {}, seed)


def _num(x) -> str:
    # 17 significant digits: exact float round trip
    if not math.isfinite(x):
        return json.dumps(str(x))
    return f"{x:.16e}"


def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    if hasattr(obj, "item"):
        return dumps(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(x) -> str:
    if isinstance(x, float):
        return f"{x:.16e}"
    return "" if x is None else str(x)


def write_trace(trace: RunTrace, path: Path) -> None:
    with path.open("w") as fh:
        for r in trace.records:
            fh.write(dumps({"iter": r.iteration, "L1": r.l1, "L2": r.l2, "alpha": r.alpha,
                            "kkt_residual": r.kkt_residual}) + "\n")


def write_table(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(x) for x in row])


def _curve(trace: RunTrace, path: Path) -> None:
    write_table(path, ["iter", "L1", "L2", "alpha", "kkt_residual"],
                [[r.iteration, r.l1, r.l2, r.alpha, r.kkt_residual] for r in trace.records])


def _write_summary(out: Path, config: RunConfig, command: str, body: dict) -> None:
    doc = {"command": command, "config": config.to_dict(), **body}
    (out / "summary.json").write_text(dumps(doc) + "\n")


def ed_report(config: RunConfig) -> dict:
    spec = config.model
    e0, _ = lgt_model.ed_ground(spec)
    basis = lgt_model.enumerate_physical_basis(spec)
    report = {
        "n_sites": spec.n_sites,
        "boundary": spec.boundary,
        "n_qubits": spec.n_qubits,
        "ground_energy": e0,
        "unconstrained_ground_energy": lgt_model.unconstrained_ground_energy(spec),
        "physical_dimension": basis.dimension,
        "n_constraints": basis.n_constraints,
        "independent_constraints": basis.n_independent,
        "claimed_dimension": lgt_model.claimed_dimension(spec),
    }
    temps = config.t_grid or ((config.temperature,) if config.temperature else ())
    report["free_energy"] = {str(t): lgt_model.ed_thermal(spec, t).free_energy for t in temps}
    return report


def _print_ed(report: dict) -> None:
    d, claim = report["physical_dimension"], report["claimed_dimension"]
    print(f"N = {report['n_sites']} ({report['boundary']}, {report['n_qubits']} qubits)")
    print(f"ground energy E0 = {report['ground_energy']:.12f}")
    print(f"unconstrained ground energy = {report['unconstrained_ground_energy']:.12f}")
    print(f"physical dimension d = {d} "
          f"({report['independent_constraints']} independent of {report['n_constraints']} constraints)")
    verdict = "matches" if d == claim else "differs from"
    print(f"d {verdict} the 2^(N+1) = {claim} count")
    for t, f in report["free_energy"].items():
        print(f"free energy F(T={t}) = {f:.12f}")


def run_command(command: str, config: RunConfig, out: Path) -> int:
    allowed = SUBCOMMAND_MODES[command]
    if config.mode not in allowed:
        raise ConfigError(f"'mode' {config.mode!r} does not fit subcommand {command!r}; use one of {allowed}")
    out.mkdir(parents=True, exist_ok=True)
    if command == "ed":
        report = ed_report(config)
        _print_ed(report)
        _write_summary(out, config, command, {"ed": report})
        return EXIT_OK
    if command in ("vqe", "vqt"):
        trace = drivers.run_vqe(config) if command == "vqe" else drivers.run_vqt(config)
        write_trace(trace, out / "trace.jsonl")
        _curve(trace, out / "curve.csv")
        _write_summary(out, config, command, {"summary": trace.summary})
        return EXIT_OK if trace.converged else EXIT_UNCONVERGED
    if command == "penalty-sweep":
        run = drivers.run_vqe_penalty if config.mode == "vqe_penalty" else drivers.run_vqt_penalty
        traces = run(config)
        rows = []
        for i, tr in enumerate(traces):
            write_trace(tr, out / f"trace_mu{i:02d}.jsonl")
            s = tr.summary
            rows.append([s["mu"], s["l1"], s["l2"], s.get("oracle_energy", s.get("oracle_free_energy")),
                         s.get("unconstrained_energy"), s["converged"]])
        write_table(out / "penalty.csv", ["mu", "L1", "L2", "oracle", "unconstrained", "converged"], rows)
    else:
        traces = drivers.run_temperature_sweep(config)
        rows = []
        for i, tr in enumerate(traces):
            write_trace(tr, out / f"trace_T{i:02d}.jsonl")
            s = tr.summary
            rows.append([s["temperature"], s["l1"], s["oracle_free_energy"], s["abs_error"], s["l2"], s["converged"]])
        write_table(out / "temperature.csv", ["T", "F_vqt", "F_oracle", "abs_error", "L2_final", "converged"], rows)
    _write_summary(out, config, command, {"runs": [tr.summary for tr in traces]})
    return EXIT_OK if all(tr.converged for tr in traces) else EXIT_UNCONVERGED


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def main(argv=None) -> int:
    parser = _Parser(prog="lgtmoo", description="Gauss-law constrained VQE/VQT experiments")
    parser.add_argument("command", choices=sorted(SUBCOMMAND_MODES))
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        config = parse_config(args.config, args.seed)
        return run_command(args.command, config, Path(args.out))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
