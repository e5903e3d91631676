"""Monte Carlo experiment runners with deterministic seeding and structured output.

Every experiment is a pure function of its ExperimentConfig: each trial draws
from its own counter-based substream, and aggregation runs over trial-ordered
arrays, so the emitted numbers are byte-identical for any worker count or
scheduling order.  Results are written as CSV (the stable interface, header
``experiment,architecture,combiner,N,U,NQ,snr_db,trials,metric,mean,ci95,seed``)
and as a JSON document mirroring the same fields.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy import stats

from . import _kernels as kernels
from . import metrics
from .asymptotics import gamma_factor, sinr_limit
from .channel import entry_angle, generate_iid, substream_rng
from .combining import (
    DEFAULT_SELECTION_BUDGET,
    PhaseBank,
    _subset_index_array,
    mrc_combiner,
    phase_shifter_combiner,
    quasi_coherent_switch_combiner,
    selection_sweep,
    zf_baseband,
)
from .config import SystemConfig
from .errors import InvalidParameterError, RankDeficientChannelError, SearchBudgetError
from .rfchain import db_to_linear, preset_nf

logger = logging.getLogger(__name__)

EXPERIMENT_KINDS = (
    "snr_ratio_convergence",
    "rate_vs_snr",
    "interference_distribution",
    "proposition1_convergence",
)
ARCHITECTURES = ("fully_digital", "ps_hybrid", "switch_hybrid", "antenna_selection")
NF_MODES = ("none", "preset")

CSV_HEADER = (
    "experiment",
    "architecture",
    "combiner",
    "N",
    "U",
    "NQ",
    "snr_db",
    "trials",
    "metric",
    "mean",
    "ci95",
    "seed",
)

# per-trial attempt substreams reserved for redrawing ill-conditioned channels
_MAX_REDRAWS = 64
_INTERFERENCE_BLOCK = 4096


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    architecture: str
    combiner: str
    n_antennas: int
    n_users: int
    n_phases: int
    snr_db: float
    n_trials: int
    metric: str
    mean: float
    ci95: float
    seed: int

    def as_record(self) -> dict:
        return {
            "experiment": self.experiment,
            "architecture": self.architecture,
            "combiner": self.combiner,
            "N": int(self.n_antennas),
            "U": int(self.n_users),
            "NQ": int(self.n_phases),
            "snr_db": float(self.snr_db),
            "trials": int(self.n_trials),
            "metric": self.metric,
            "mean": float(self.mean),
            "ci95": float(self.ci95),
            "seed": int(self.seed),
        }


def _fmt(value) -> str:
    # repr of a builtin float is the shortest round-trip form
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


@dataclass
class ExperimentResult:
    """Deterministically ordered result rows plus CSV/JSON writers."""

    rows: list[ResultRow] = field(default_factory=list)

    def find(self, **conditions) -> list[ResultRow]:
        out = []
        for row in self.rows:
            if all(getattr(row, key) == value for key, value in conditions.items()):
                out.append(row)
        return out

    def to_csv(self, path: str) -> None:
        tmp = f"{path}.tmp"
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for row in self.rows:
                record = row.as_record()
                writer.writerow([_fmt(record[k]) for k in CSV_HEADER])
        os.replace(tmp, path)

    def to_json(self, path: str) -> None:
        tmp = f"{path}.tmp"
        with open(tmp, "w") as fh:
            json.dump({"rows": [row.as_record() for row in self.rows]}, fh, indent=2)
            fh.write("\n")
        os.replace(tmp, path)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: kind, system dimensions, sweep lists, and run controls.

    ``architectures`` pairs an architecture name with a combiner mode
    ('MF' or 'ZF').  ``n_trials`` counts channel redraws (for the
    interference experiment, collected cross-term samples per interferer).
    """

    kind: str
    system: SystemConfig
    n_list: tuple[int, ...] = ()
    snr_db_list: tuple[float, ...] = ()
    nq_list: tuple[int, ...] = ()
    n_trials: int = 100
    architectures: tuple[tuple[str, str], ...] = ()
    nf_mode: str = "none"
    workers: int = 1
    selection_budget: int = DEFAULT_SELECTION_BUDGET

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise InvalidParameterError(f"kind must be one of {EXPERIMENT_KINDS}")
        if self.n_trials < 1:
            raise InvalidParameterError("n_trials must be >= 1")
        if self.workers < 1:
            raise InvalidParameterError("workers must be >= 1")
        if self.nf_mode not in NF_MODES:
            raise InvalidParameterError(f"nf_mode must be one of {NF_MODES}")
        if self.kind == "snr_ratio_convergence" and (not self.n_list or not self.nq_list):
            raise InvalidParameterError("snr_ratio_convergence needs nonempty n_list and nq_list")
        if self.kind == "rate_vs_snr":
            if not self.snr_db_list or not self.architectures:
                raise InvalidParameterError("rate_vs_snr needs nonempty snr_db_list and architectures")
            for name, mode in self.architectures:
                if name not in ARCHITECTURES:
                    raise InvalidParameterError(f"unknown architecture '{name}'")
                if mode not in ("MF", "ZF"):
                    raise InvalidParameterError(f"combiner mode must be 'MF' or 'ZF', got '{mode}'")
        if self.kind == "interference_distribution" and self.system.n_users < 2:
            raise InvalidParameterError("interference_distribution needs n_users >= 2")
        if self.kind == "proposition1_convergence" and not self.n_list:
            raise InvalidParameterError("proposition1_convergence needs a nonempty n_list")


def _run_trials(fn, n_trials: int, workers: int) -> list:
    if workers <= 1:
        return [fn(t) for t in range(n_trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_trials)))


def _mean_ci(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=np.float64)
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    ci = float(1.96 * values.std(ddof=1) / np.sqrt(values.size))
    return mean, ci


def run_snr_ratio_convergence(cfg: ExperimentConfig) -> ExperimentResult:
    """Mean single-user SNR ratio of the greedy switch combiner versus N.

    Forces U = 1.  For every (N_Q, N) cell emits the Monte Carlo mean of
    |w^H h|^2 / (N ||h||^2) plus the closed-form reference value.
    """
    if cfg.system.n_users != 1:
        logger.info("snr_ratio_convergence forces n_users = 1 (config had %d)", cfg.system.n_users)
    seed = cfg.system.rng_seed
    result = ExperimentResult()
    cell = 0
    for nq in cfg.nq_list:
        bank = PhaseBank(nq)
        rotors = bank.shifter_values
        for n_ant in cfg.n_list:
            sub_cfg = SystemConfig(n_antennas=n_ant, n_users=1, n_phases=nq, rng_seed=seed)
            base = cell * cfg.n_trials

            def trial(t, sub_cfg=sub_cfg, base=base, n_ant=n_ant, rotors=rotors):
                h = generate_iid(sub_cfg, base + t)[:, 0]
                _, combined = kernels.quasi_signal(h, rotors)
                return abs(combined) ** 2 / (n_ant * float(np.sum(np.abs(h) ** 2)))

            ratios = np.array(_run_trials(trial, cfg.n_trials, cfg.workers))
            mean, ci = _mean_ci(ratios)
            result.rows.append(
                ResultRow(cfg.kind, "switch_hybrid", "MF", n_ant, 1, nq, 0.0, cfg.n_trials, "snr_ratio", mean, ci, seed)
            )
            result.rows.append(
                ResultRow(
                    cfg.kind, "switch_hybrid", "MF", n_ant, 1, nq, 0.0, cfg.n_trials, "snr_ratio_limit",
                    gamma_factor(nq), 0.0, seed,
                )
            )
            cell += 1
    return result


def _architecture_nf_db(name: str, nf_mode: str) -> float:
    return preset_nf(name) if nf_mode == "preset" else 0.0


def run_rate_vs_snr(cfg: ExperimentConfig) -> ExperimentResult:
    """Per-user achievable rate (sum rate / U) of each architecture versus SNR.

    All architectures share the channel of each trial (paired comparison).
    Hybrid ZF designs the per-user analog vectors first and zero-forces on the
    effective channel; MF uses the analog (or matched) combiner alone.  Trials
    whose effective channel is too ill-conditioned for any requested ZF stage
    are redrawn from per-trial attempt substreams and counted.
    """
    system = cfg.system
    seed = system.rng_seed
    n_users = system.n_users
    bank = PhaseBank(system.n_phases)
    needs_selection = any(name == "antenna_selection" for name, _ in cfg.architectures)
    subsets = None
    if needs_selection:
        required = comb(system.n_antennas, n_users)
        if required > cfg.selection_budget:
            raise SearchBudgetError(
                f"antenna selection needs {required} subset evaluations, over the budget of {cfg.selection_budget}",
                required=required,
                budget=cfg.selection_budget,
            )
        subsets = _subset_index_array(system.n_antennas, n_users)

    snr_db = np.asarray(cfg.snr_db_list, dtype=np.float64)

    def trial(t):
        redraws = 0
        for attempt in range(_MAX_REDRAWS):
            H = generate_iid(system, t * _MAX_REDRAWS + attempt)
            try:
                built = _build_static_combiners(H, bank, cfg.architectures)
            except RankDeficientChannelError:
                redraws += 1
                continue
            break
        else:
            raise RankDeficientChannelError(f"trial {t}: channel stayed ill-conditioned after {_MAX_REDRAWS} redraws")
        rates = []
        for name, mode in cfg.architectures:
            rho_lin = db_to_linear(snr_db - _architecture_nf_db(name, cfg.nf_mode))
            if name == "antenna_selection":
                _, sinrs = selection_sweep(H, subsets, rho_lin, mode)
                rates.extend(np.log2(1.0 + sinrs).sum(axis=1) / n_users)
            else:
                combiner = built[(name, mode)]
                for rho in rho_lin:
                    rates.append(metrics.sinr(H, combiner, float(rho)).sum_rate / n_users)
        return np.array(rates), redraws

    outputs = _run_trials(trial, cfg.n_trials, cfg.workers)
    data = np.stack([rates for rates, _ in outputs])
    total_redraws = int(sum(redraws for _, redraws in outputs))

    result = ExperimentResult()
    col = 0
    for name, mode in cfg.architectures:
        for snr in cfg.snr_db_list:
            mean, ci = _mean_ci(data[:, col])
            result.rows.append(
                ResultRow(
                    cfg.kind, name, mode, system.n_antennas, n_users, system.n_phases,
                    float(snr), cfg.n_trials, "per_user_rate", mean, ci, seed,
                )
            )
            col += 1
    result.rows.append(
        ResultRow(
            cfg.kind, "", "", system.n_antennas, n_users, system.n_phases, 0.0,
            cfg.n_trials, "redraw_count", float(total_redraws), 0.0, seed,
        )
    )
    return result


def _build_static_combiners(H, bank, architectures):
    """SNR-independent combiners for one channel draw, keyed by (name, mode)."""
    built = {}
    greedy = None
    ps = None
    for name, mode in architectures:
        if name == "antenna_selection" or (name, mode) in built:
            continue
        if name == "fully_digital":
            built[(name, mode)] = mrc_combiner(H) if mode == "MF" else zf_baseband(H)
        elif name == "ps_hybrid":
            if ps is None:
                ps = phase_shifter_combiner(H)
            built[(name, mode)] = ps if mode == "MF" else zf_baseband(H, ps)
        elif name == "switch_hybrid":
            if greedy is None:
                _, greedy = quasi_coherent_switch_combiner(H, bank)
            built[(name, mode)] = greedy if mode == "MF" else zf_baseband(H, greedy)
    return built


def run_interference_distribution(cfg: ExperimentConfig) -> ExperimentResult:
    """Distribution of the cross term |w_u^H h_l|^2 under the greedy design.

    The combiner of user u is deterministic given h_u and independent of the
    interfering channels, so the cross term should be exponential with mean
    N.  Emits the sample mean and variance, the squared coefficient of
    variation, and a Kolmogorov-Smirnov fit against Exp(N).
    """
    system = cfg.system
    seed = system.rng_seed
    n_ant, n_users, nq = system.n_antennas, system.n_users, system.n_phases
    bank = PhaseBank(nq)
    conj_bank = bank.shifter_values.conj()
    width = 2.0 * np.pi / nq

    n_blocks = (cfg.n_trials + _INTERFERENCE_BLOCK - 1) // _INTERFERENCE_BLOCK

    def block(b):
        size = min(_INTERFERENCE_BLOCK, cfg.n_trials - b * _INTERFERENCE_BLOCK)
        rng = substream_rng(seed, b)
        scale = np.sqrt(0.5)
        own = (rng.standard_normal((size, n_ant)) + 1j * rng.standard_normal((size, n_ant))) * scale
        others = (
            rng.standard_normal((size, n_ant, n_users - 1)) + 1j * rng.standard_normal((size, n_ant, n_users - 1))
        ) * scale
        sectors = np.floor_divide(entry_angle(own), width).astype(np.int64).clip(0, nq - 1)
        shifters = (nq - sectors) % nq
        cross = np.einsum("bn,bnl->bl", conj_bank[shifters], others)
        return (np.abs(cross) ** 2).ravel()

    samples = np.concatenate(_run_trials(block, n_blocks, cfg.workers))
    mean, ci = _mean_ci(samples)
    variance = float(samples.var(ddof=1))
    cv2 = variance / mean**2
    ks = stats.kstest(samples, "expon", args=(0, n_ant))

    result = ExperimentResult()

    def row(metric, value, ci_value=0.0):
        result.rows.append(
            ResultRow(
                cfg.kind, "switch_hybrid", "MF", n_ant, n_users, nq, 0.0,
                samples.size, metric, float(value), float(ci_value), seed,
            )
        )

    row("cross_power_mean", mean, ci)
    row("cross_power_variance", variance)
    row("cross_power_cv2", cv2)
    row("ks_statistic", ks.statistic)
    row("ks_pvalue", ks.pvalue)
    return result


def run_proposition1_convergence(cfg: ExperimentConfig) -> ExperimentResult:
    """Mean SINR of the greedy design along an (N, U) sweep at fixed loading.

    User counts scale with ``n_list`` at the configured U/N ratio.  The SNR
    defaults to 40 dB so the interference-limited regime of the almost-sure
    limit is realized.

    Two estimators are emitted per cell.  ``sinr`` is the average SINR,
    the ratio of the Monte Carlo mean desired power to the mean
    interference-plus-noise power; it mirrors how the limit is derived
    (numerator and denominator converge separately) and its finite-size
    offset is about gamma*N/(U-1) versus the limit gamma*N/U.
    ``sinr_per_draw`` is the plain mean of the per-realization ratio, which
    carries an additional harmonic-mean inflation of roughly
    (U-1)/(U-2) because the interference is Gamma(U-1)-distributed.
    """
    system = cfg.system
    seed = system.rng_seed
    nq = system.n_phases
    bank = PhaseBank(nq)
    snr_db_list = cfg.snr_db_list or (40.0,)
    loading = system.n_users / system.n_antennas
    result = ExperimentResult()
    cell = 0
    for snr in snr_db_list:
        rho = db_to_linear(float(snr))
        for n_ant in cfg.n_list:
            n_users = max(1, round(n_ant * loading))
            sub_cfg = SystemConfig(n_antennas=n_ant, n_users=n_users, n_phases=nq, rng_seed=seed)
            base = cell * cfg.n_trials

            def trial(t, sub_cfg=sub_cfg, base=base, rho=rho):
                H = generate_iid(sub_cfg, base + t)
                _, combiner = quasi_coherent_switch_combiner(H, bank)
                W = combiner.composite
                cross_power = np.abs(W.conj().T @ H) ** 2
                signal = np.diagonal(cross_power).copy()
                interference = cross_power.sum(axis=1) - signal
                norms2 = np.sum(np.abs(W) ** 2, axis=0)
                denom = rho * interference + norms2
                return (
                    float(np.mean(rho * signal)),
                    float(np.mean(denom)),
                    float(np.mean(rho * signal / denom)),
                )

            values = _run_trials(trial, cfg.n_trials, cfg.workers)
            signals = np.array([v[0] for v in values])
            denoms = np.array([v[1] for v in values])
            per_draw = np.array([v[2] for v in values])
            avg_sinr = float(signals.mean() / denoms.mean())
            # delta-method CI for the ratio of means
            if cfg.n_trials >= 2:
                linearized = (signals - avg_sinr * denoms) / denoms.mean()
                ratio_ci = float(1.96 * linearized.std(ddof=1) / np.sqrt(cfg.n_trials))
            else:
                ratio_ci = 0.0
            draw_mean, draw_ci = _mean_ci(per_draw)

            def row(metric, mean, ci):
                result.rows.append(
                    ResultRow(
                        cfg.kind, "switch_hybrid", "MF", n_ant, n_users, nq, float(snr),
                        cfg.n_trials, metric, mean, ci, seed,
                    )
                )

            row("sinr", avg_sinr, ratio_ci)
            row("sinr_per_draw", draw_mean, draw_ci)
            row("sinr_limit", sinr_limit(n_ant, n_users, nq), 0.0)
            cell += 1
    return result


_RUNNERS = {
    "snr_ratio_convergence": run_snr_ratio_convergence,
    "rate_vs_snr": run_rate_vs_snr,
    "interference_distribution": run_interference_distribution,
    "proposition1_convergence": run_proposition1_convergence,
}


def run(cfg: ExperimentConfig) -> ExperimentResult:
    """Dispatch an experiment configuration to its runner."""
    return _RUNNERS[cfg.kind](cfg)
