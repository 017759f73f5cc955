"""Command-line runner: ``kmb09sim run`` and ``kmb09sim sweep``.

Exit codes: 0 success, 1 invalid configuration or arguments, 2 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import ConfigError, config_to_dict, config_to_ini, parse_angle, parse_config
from .experiment import ExperimentConfig, RunStats, simulate
from .rng import derive_seed

ROUND_COLUMNS = ("round", "conclusive", "alice_bit", "bob_bit", "error", "cum_qber", "cum_efficiency")
SWEEP_AXES = {
    "theta": "channel.rotation.theta",
    "rho": "channel.rotation.rho",
    "iterations": "run.iterations",
    "N": "protocol.dimension",
    "dimension": "protocol.dimension",
    "gain": "channel.turbulence.gain",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI config file")
    common.add_argument("--seed", type=str)
    common.add_argument("--iterations", type=str)
    common.add_argument("--protocol", choices=("kmb09", "bb84"))
    common.add_argument("--dimension", type=str)
    common.add_argument("--theta", type=str, help="radians or multiples of pi, e.g. pi/4")
    common.add_argument("--rho", type=str)
    common.add_argument("--turbulence", choices=("on", "off"))
    common.add_argument("--gain", type=str)
    common.add_argument("--beat-mode", choices=("paper", "standard"))
    common.add_argument("--workers", type=str)
    common.add_argument("--out", type=Path, default=Path("out"))

    p = _Parser(prog="kmb09sim", description="KMB09 homodyne DV-QKD Monte Carlo simulator")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sub.add_parser("run", parents=[common], help="single run -> rounds.csv, summary.json, manifest.json")
    s = sub.add_parser("sweep", parents=[common], help="one run per axis value -> sweep.csv")
    s.add_argument("--sweep", required=True, metavar="AXIS=V1,V2,...",
                   help=f"axis one of {sorted(set(SWEEP_AXES) - {'dimension'})}")
    s.add_argument("--contrast-turbulence", action="store_true",
                   help="run every value with turbulence off and on (paired columns)")
    return p


def _overrides(args) -> dict:
    o = {}
    simple = {
        "seed": "run.seed",
        "iterations": "run.iterations",
        "protocol": "protocol.name",
        "dimension": "protocol.dimension",
        "theta": "channel.rotation.theta",
        "rho": "channel.rotation.rho",
        "turbulence": "channel.turbulence.enabled",
        "gain": "channel.turbulence.gain",
        "beat_mode": "homodyne.beat_mode",
        "workers": "run.workers",
    }
    for attr, key in simple.items():
        val = getattr(args, attr)
        if val is not None:
            o[key] = val
    return o


def load_config(args, extra: Optional[dict] = None) -> ExperimentConfig:
    text = ""
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}", key="--config") from None
    return parse_config(text, {**_overrides(args), **(extra or {})})


def _fmt(x: float) -> str:
    return repr(float(x))


def write_rounds_csv(path: Path, rounds, stats: RunStats) -> None:
    err = rounds.error
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ROUND_COLUMNS)
        for r, c, a, b, e, q, eff in zip(
            rounds.round.tolist(), rounds.conclusive.tolist(), rounds.alice_bit.tolist(),
            rounds.bob_bit.tolist(), err.tolist(), stats.qber_series.tolist(),
            stats.efficiency_series.tolist(),
        ):
            w.writerow((r, int(c), a, b if c else "", int(e), _fmt(q), _fmt(eff)))


def _dump(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def execute(cfg: ExperimentConfig, out: Path) -> RunStats:
    """Run ``cfg`` and write rounds.csv, summary.json, config.ini and manifest.json."""
    started = datetime.now(timezone.utc).isoformat()
    rounds = simulate(cfg)
    stats = rounds.stats()
    finished = datetime.now(timezone.utc).isoformat()
    echo = config_to_dict(cfg)
    summary = {**stats.summary(), "sifted_length": stats.sifted, "seed": cfg.seed, "config": echo}
    out.mkdir(parents=True, exist_ok=True)
    write_rounds_csv(out / "rounds.csv", rounds, stats)
    _dump(out / "summary.json", summary)
    (out / "config.ini").write_text(config_to_ini(cfg))
    _dump(out / "manifest.json", {
        "config_echo": echo,
        "tool_version": __version__,
        "seed": cfg.seed,
        "started": started,
        "finished": finished,
        "summary": stats.summary(),
    })
    return stats


def run_command(cfg: ExperimentConfig, out: Path) -> int:
    try:
        stats = execute(cfg, out)
    except OSError as exc:
        print(f"kmb09sim: I/O error: {exc}", file=sys.stderr)
        return 2
    print(f"qber={stats.qber:.6f} efficiency={stats.efficiency:.6f} "
          f"sifted={stats.sifted}/{stats.rounds} -> {out}")
    return 0


def parse_axis(spec: str) -> tuple[str, list[str]]:
    axis, sep, values = spec.partition("=")
    axis = axis.strip()
    if not sep or axis not in SWEEP_AXES:
        raise ConfigError(f"axis must be one of {sorted(SWEEP_AXES)}", key="--sweep")
    vals = [v.strip() for v in values.split(",") if v.strip()]
    if not vals:
        raise ConfigError("empty axis", key="--sweep")
    return axis, vals


def _axis_number(axis: str, raw: str) -> float:
    return parse_angle(raw) if axis == "theta" else float(raw)


def sweep_command(args, axis_spec: str, contrast_turbulence: bool = False) -> int:
    axis, values = parse_axis(axis_spec)
    base = load_config(args)
    key = SWEEP_AXES[axis]
    variants = [("", None)]
    if contrast_turbulence:
        variants = [("_turb_off", "off"), ("_turb_on", "on")]

    # validate every point before any work
    plan = []
    for k, raw in enumerate(values):
        seed = derive_seed(base.seed, k)
        cfgs = []
        for suffix, turb in variants:
            extra = {key: raw, "run.seed": seed}
            if turb is not None:
                extra["channel.turbulence.enabled"] = turb
            cfgs.append((suffix, load_config(args, extra)))
        plan.append((k, raw, seed, cfgs))

    metrics = ("sifted", "errors", "qber", "efficiency")
    header = ["axis", "value", "value_numeric", "seed", "rounds"]
    header += [f"{m}{suffix}" for suffix, _ in variants for m in metrics]
    rows = []
    try:
        for k, raw, seed, cfgs in plan:
            row = [axis, raw, _fmt(_axis_number(axis, raw)), seed, None]
            for suffix, cfg in cfgs:
                stats = execute(cfg, args.out / "runs" / f"{k:03d}_{axis}{suffix}")
                row[4] = stats.rounds
                row += [stats.sifted, stats.errors, _fmt(stats.qber), _fmt(stats.efficiency)]
                print(f"{axis}={raw}{suffix}: qber={stats.qber:.6f} efficiency={stats.efficiency:.6f}")
            rows.append(row)
        with open(args.out / "sweep.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        _dump(args.out / "sweep_manifest.json", {
            "axis": axis,
            "values": values,
            "master_seed": base.seed,
            "contrast_turbulence": contrast_turbulence,
            "base_config": config_to_dict(base),
            "tool_version": __version__,
        })
    except OSError as exc:
        print(f"kmb09sim: I/O error: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "sweep":
            return sweep_command(args, args.sweep, args.contrast_turbulence)
        cfg = load_config(args)
    except ConfigError as exc:
        print(f"kmb09sim: invalid config: {exc}", file=sys.stderr)
        return 1
    return run_command(cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
