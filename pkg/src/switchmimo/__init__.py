"""Link-level simulator for uplink massive MIMO receivers that combine in RF
with antenna switches and a small bank of constant phase shifters.

The package covers channel generation, the greedy quasi-coherent switch
design and its exhaustive oracle, the standard baselines (matched filter,
zero forcing, continuous phase shifters, antenna selection), closed-form
large-array limits, noise-figure cascade modeling, and reproducible Monte
Carlo experiment runners with a CLI front end.
"""

from ._kernels import active_backend
from .asymptotics import (
    AsymptoticPrediction,
    appendix_identity_check,
    gamma_factor,
    predict,
    rate_limit,
    sector_expectation_check,
    sinr_limit,
)
from .channel import (
    TransmissionBatch,
    TransmissionSample,
    entry_angle,
    generate_iid,
    simulate_transmission,
    substream_rng,
)
from .combining import (
    CombinerSet,
    PhaseBank,
    SwitchingMatrix,
    antenna_selection_combiner,
    assign_sector,
    exhaustive_switch_combiner,
    mrc_combiner,
    phase_shifter_combiner,
    quasi_coherent_switch_combiner,
    reconstruct_switching,
    zf_baseband,
)
from .config import SystemConfig
from .errors import (
    ConfigError,
    InsufficientSamplesError,
    InvalidCombinerError,
    InvalidParameterError,
    RankDeficientChannelError,
    SearchBudgetError,
    SimulatorError,
)
from .experiments import ExperimentConfig, ExperimentResult, ResultRow, run
from .metrics import LinkMetrics, empirical_sinr, sinr, snr_ratio
from .rfchain import (
    COMPOSITE_NF_DB,
    EXAMPLE_STAGES,
    RfStage,
    apply_nf_penalty,
    db_to_linear,
    friis_composite_nf,
    linear_to_db,
    preset_nf,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticPrediction",
    "CombinerSet",
    "COMPOSITE_NF_DB",
    "ConfigError",
    "EXAMPLE_STAGES",
    "ExperimentConfig",
    "ExperimentResult",
    "InsufficientSamplesError",
    "InvalidCombinerError",
    "InvalidParameterError",
    "LinkMetrics",
    "PhaseBank",
    "RankDeficientChannelError",
    "ResultRow",
    "RfStage",
    "SearchBudgetError",
    "SimulatorError",
    "SwitchingMatrix",
    "SystemConfig",
    "TransmissionBatch",
    "TransmissionSample",
    "active_backend",
    "antenna_selection_combiner",
    "appendix_identity_check",
    "apply_nf_penalty",
    "assign_sector",
    "db_to_linear",
    "empirical_sinr",
    "entry_angle",
    "exhaustive_switch_combiner",
    "friis_composite_nf",
    "gamma_factor",
    "generate_iid",
    "linear_to_db",
    "mrc_combiner",
    "phase_shifter_combiner",
    "predict",
    "preset_nf",
    "quasi_coherent_switch_combiner",
    "rate_limit",
    "reconstruct_switching",
    "run",
    "sector_expectation_check",
    "simulate_transmission",
    "sinr",
    "sinr_limit",
    "snr_ratio",
    "substream_rng",
    "zf_baseband",
]
