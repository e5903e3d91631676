"""Command-line front end: experiment runners, closed-form limits, the Friis
noise-figure calculator, and the statistical self-check suite.

Exit codes: 0 on success, 1 on configuration or validation errors (the
message on stderr names the offending field), 2 on runtime errors such as an
exceeded search budget or a failed self-check.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import __version__
from .asymptotics import (
    appendix_identity_check,
    gamma_factor,
    rate_limit,
    sector_expectation_check,
    sinr_limit,
)
from .channel import generate_iid
from .combining import PhaseBank, exhaustive_switch_combiner, quasi_coherent_switch_combiner
from .config import SystemConfig
from .errors import ConfigError, InvalidParameterError, SimulatorError
from .experiments import ExperimentConfig, run
from .metrics import sinr
from .rfchain import EXAMPLE_STAGES, RfStage, friis_composite_nf, preset_nf

logger = logging.getLogger(__name__)

_SCHEMA = {
    "system": {"N", "U", "NRF", "NQ"},
    "sweep": {"n_list", "snr_db_list", "nq_list"},
    "run": {"trials", "seed", "workers"},
    "architectures": None,
    "nf": {"mode", "preset", "chain"},
    "output": {"path", "format"},
}
_ARCH_KEYS = {"name", "combiner"}
_STAGE_KEYS = {"label", "gain_db", "nf_db"}


def load_config(path: str) -> dict:
    """Parse and structurally validate a JSON configuration document."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")
    for key, value in doc.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown top-level config key '{key}'")
        allowed = _SCHEMA[key]
        if allowed is None:
            continue
        if not isinstance(value, dict):
            raise ConfigError(f"config section '{key}' must be an object")
        for sub in value:
            if sub not in allowed:
                raise ConfigError(f"unknown config key '{key}.{sub}'")
    for i, arch in enumerate(doc.get("architectures", [])):
        if not isinstance(arch, dict):
            raise ConfigError(f"architectures[{i}] must be an object with 'name' and 'combiner'")
        for sub in arch:
            if sub not in _ARCH_KEYS:
                raise ConfigError(f"unknown config key 'architectures[{i}].{sub}'")
        if "name" not in arch or "combiner" not in arch:
            raise ConfigError(f"architectures[{i}] needs both 'name' and 'combiner'")
    return doc


def _field(doc: dict, section: str, key: str, kind, default=None, required=False):
    block = doc.get(section, {})
    if key not in block:
        if required:
            raise ConfigError(f"missing required config field '{section}.{key}'")
        return default
    value = block[key]
    try:
        if kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError
            return value
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise TypeError
            return float(value)
        if kind is str:
            if not isinstance(value, str):
                raise TypeError
            return value
        if kind is list:
            if not isinstance(value, list) or not value:
                raise TypeError
            return value
    except TypeError:
        pass
    raise ConfigError(f"config field '{section}.{key}' has the wrong type (expected {kind.__name__})")


def _system_from(doc: dict, args, forced_users: int | None = None) -> SystemConfig:
    n_ant = _field(doc, "system", "N", int, required=True)
    n_users = _field(doc, "system", "U", int, required=True)
    if forced_users is not None and n_users != forced_users:
        logger.info("system.U=%d overridden to %d for this experiment", n_users, forced_users)
        n_users = forced_users
    n_phases = _field(doc, "system", "NQ", int, required=True)
    n_rf = _field(doc, "system", "NRF", int, default=None)
    seed = args.seed if args.seed is not None else _field(doc, "run", "seed", int, default=0)
    try:
        return SystemConfig(
            n_antennas=n_ant, n_users=n_users, n_phases=n_phases, n_rf_chains=n_rf, rng_seed=seed
        )
    except InvalidParameterError as exc:
        raise ConfigError(f"system configuration invalid: {exc}") from None


def _run_controls(doc: dict, args) -> tuple[int, int]:
    trials = _field(doc, "run", "trials", int, required=True)
    workers = args.workers if args.workers is not None else _field(doc, "run", "workers", int, default=1)
    return trials, workers


def _output_target(doc: dict, args) -> tuple[str, str]:
    path = args.output or _field(doc, "output", "path", str, default=None)
    if path is None:
        raise ConfigError("missing required config field 'output.path' (or pass --output)")
    fmt = _field(doc, "output", "format", str, default="csv")
    if fmt not in ("csv", "json", "both"):
        raise ConfigError("config field 'output.format' must be 'csv', 'json', or 'both'")
    return path, fmt


def _write_result(result, path: str, fmt: str) -> None:
    if fmt in ("csv", "both"):
        result.to_csv(path)
        print(f"wrote {len(result.rows)} rows to {path}")
    if fmt in ("json", "both"):
        json_path = path + ".json" if fmt == "both" else path
        result.to_json(json_path)
        print(f"wrote {len(result.rows)} rows to {json_path}")


def cmd_fig2(args) -> int:
    doc = load_config(args.config)
    system = _system_from(doc, args, forced_users=1)
    trials, workers = _run_controls(doc, args)
    path, fmt = _output_target(doc, args)
    try:
        cfg = ExperimentConfig(
            kind="snr_ratio_convergence",
            system=system,
            n_list=tuple(_field(doc, "sweep", "n_list", list, required=True)),
            nq_list=tuple(_field(doc, "sweep", "nq_list", list, required=True)),
            n_trials=trials,
            workers=workers,
        )
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from None
    _write_result(run(cfg), path, fmt)
    return 0


def cmd_fig3(args) -> int:
    doc = load_config(args.config)
    system = _system_from(doc, args)
    trials, workers = _run_controls(doc, args)
    path, fmt = _output_target(doc, args)
    architectures = tuple(
        (arch["name"], str(arch["combiner"]).upper()) for arch in doc.get("architectures", [])
    )
    nf_mode = _field(doc, "nf", "mode", str, default="none")
    try:
        cfg = ExperimentConfig(
            kind="rate_vs_snr",
            system=system,
            snr_db_list=tuple(float(s) for s in _field(doc, "sweep", "snr_db_list", list, required=True)),
            n_trials=trials,
            architectures=architectures,
            nf_mode=nf_mode,
            workers=workers,
        )
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from None
    _write_result(run(cfg), path, fmt)
    return 0


def cmd_oracle_gap(args) -> int:
    bank = PhaseBank(args.nq)
    cfg = SystemConfig(n_antennas=args.antennas, n_users=args.users, n_phases=args.nq, rng_seed=args.seed or 0)
    rho = 10.0 ** (args.snr_db / 10.0)
    violations = 0
    gaps = []
    for t in range(args.trials):
        H = generate_iid(cfg, t)
        oracle = exhaustive_switch_combiner(H, bank, rho, budget=args.budget)
        _, greedy = quasi_coherent_switch_combiner(H, bank)
        rate_oracle = sinr(H, oracle, rho).sum_rate
        rate_greedy = sinr(H, greedy, rho).sum_rate
        if rate_oracle < rate_greedy:
            violations += 1
        snr_oracle = sinr(H, oracle, rho).per_user_sinr
        snr_greedy = sinr(H, greedy, rho).per_user_sinr
        gaps.append(float(np.mean((snr_oracle - snr_greedy) / snr_oracle)))
    print(f"instances={args.trials} N={args.antennas} U={args.users} NQ={args.nq}")
    print(f"dominance_violations={violations}")
    print(f"mean_relative_snr_gap={np.mean(gaps):.6f}")
    print(f"max_relative_snr_gap={np.max(gaps):.6f}")
    return 0 if violations == 0 else 2


def _stage_from_config(entry, index: int) -> RfStage:
    if isinstance(entry, str):
        if entry not in EXAMPLE_STAGES:
            known = ", ".join(sorted(EXAMPLE_STAGES))
            raise ConfigError(f"nf.chain[{index}]: unknown stage '{entry}' (catalog: {known})")
        return EXAMPLE_STAGES[entry]
    if isinstance(entry, dict):
        for key in entry:
            if key not in _STAGE_KEYS:
                raise ConfigError(f"unknown config key 'nf.chain[{index}].{key}'")
        try:
            return RfStage(
                label=str(entry.get("label", f"stage{index}")),
                gain_db=float(entry["gain_db"]),
                nf_db=float(entry["nf_db"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"nf.chain[{index}] needs numeric 'gain_db' and 'nf_db': {exc}") from None
    raise ConfigError(f"nf.chain[{index}] must be a stage object or a catalog name")


def cmd_nf(args) -> int:
    if args.preset and args.config:
        raise ConfigError("pass either --preset or --config, not both")
    if args.preset:
        try:
            value = preset_nf(args.preset)
        except InvalidParameterError as exc:
            raise ConfigError(str(exc)) from None
        print(f"composite NF ({args.preset}): {value:.2f} dB")
        return 0
    if not args.config:
        raise ConfigError("nf needs --preset or a --config file with an nf.chain list")
    doc = load_config(args.config)
    chain_doc = _field(doc, "nf", "chain", list, required=True)
    chain = [_stage_from_config(entry, i) for i, entry in enumerate(chain_doc)]
    value = friis_composite_nf(chain)
    labels = "+".join(stage.label for stage in chain)
    print(f"composite NF ({labels}): {value:.2f} dB")
    return 0


def cmd_limits(args) -> int:
    try:
        gamma = gamma_factor(args.nq)
        limit = sinr_limit(args.antennas, args.users, args.nq)
        rate = rate_limit(args.antennas, args.users, args.nq)
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from None
    print(f"gamma={gamma:.6f}")
    print(f"sinr_limit={limit:.4f}")
    print(f"rate_limit={rate:.4f}")
    return 0


def cmd_validate(args) -> int:
    seed = args.seed if args.seed is not None else 20240901
    failures = 0

    diffs = [appendix_identity_check(nq)[2] for nq in range(1, 10_001)]
    worst = max(diffs)
    ok = worst < 1e-12
    failures += not ok
    print(f"{'PASS' if ok else 'FAIL'} appendix_identity max|lhs-rhs|={worst:.3e} (limit 1e-12)")

    for nq in (1, 2, 4, 8):
        report = sector_expectation_check(nq, args.samples, seed + nq)
        ok = report.passed(z_limit=4.0)
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'} sector_expectations NQ={nq} max|z|={report.max_abs_z():.2f} (limit 4.0)")

    cfg = ExperimentConfig(
        kind="interference_distribution",
        system=SystemConfig(n_antennas=64, n_users=2, n_phases=4, rng_seed=seed),
        n_trials=args.samples,
        workers=args.workers or 1,
    )
    rows = {row.metric: row.mean for row in run(cfg).rows}
    checks = [
        ("interference_mean", 62.0 <= rows["cross_power_mean"] <= 66.0, f"mean={rows['cross_power_mean']:.2f} (range 62..66)"),
        ("interference_cv2", 0.94 <= rows["cross_power_cv2"] <= 1.06, f"var/mean^2={rows['cross_power_cv2']:.3f} (range 0.94..1.06)"),
        ("interference_ks", rows["ks_pvalue"] > 0.01, f"KS p={rows['ks_pvalue']:.3f} (needs > 0.01)"),
    ]
    for name, ok, detail in checks:
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'} {name} {detail}")

    return 0 if failures == 0 else 2


class _Parser(argparse.ArgumentParser):
    # usage mistakes are validation errors: exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="switchmimo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"switchmimo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="override the run seed")
        p.add_argument("-v", "--verbose", action="count", default=0, help="increase log verbosity")

    p = sub.add_parser("fig2", help="SNR-ratio convergence experiment (single user)")
    p.add_argument("--config", required=True, help="JSON experiment configuration")
    p.add_argument("--output", default=None, help="override output.path from the config")
    p.add_argument("--workers", type=int, default=None, help="worker threads for trials")
    common(p)
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("fig3", help="per-user rate vs SNR architecture comparison")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--workers", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("oracle-gap", help="exhaustive vs greedy switch design on small instances")
    p.add_argument("--antennas", type=int, default=6)
    p.add_argument("--users", type=int, default=1)
    p.add_argument("--nq", type=int, default=2)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--snr-db", type=float, default=10.0)
    p.add_argument("--budget", type=int, default=10**7)
    common(p)
    p.set_defaults(func=cmd_oracle_gap)

    p = sub.add_parser("nf", help="Friis composite noise figure of a stage chain")
    p.add_argument("--config", default=None, help="JSON config with an nf.chain list")
    p.add_argument("--preset", default=None, help="architecture preset name")
    common(p)
    p.set_defaults(func=cmd_nf)

    p = sub.add_parser("limits", help="closed-form gamma / SINR / rate limits")
    p.add_argument("--antennas", type=int, required=True)
    p.add_argument("--users", type=int, required=True)
    p.add_argument("--nq", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("validate", help="statistical self-check suite")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SimulatorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
