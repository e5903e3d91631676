"""RF front-end noise-figure modeling: Friis cascades and preset penalties.

Each receiver architecture pays an SNR penalty equal to its composite noise
figure.  The four composite values used by the architecture comparison are
fixed constants; ``friis_composite_nf`` is a general cascade calculator for
exploring alternative stage lineups.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError

#: composite noise figure (dB) per receiver architecture
COMPOSITE_NF_DB = {
    "fully_digital": 5.1,
    "antenna_selection": 5.1,
    "ps_hybrid": 5.7,
    "switch_hybrid": 7.2,
}


@dataclass(frozen=True)
class RfStage:
    """One two-port stage of an RF chain (gain and noise figure in dB)."""

    label: str
    gain_db: float
    nf_db: float

    def __post_init__(self):
        if not np.isfinite(self.gain_db):
            raise InvalidParameterError(f"stage '{self.label}': gain_db must be finite")
        if not (np.isfinite(self.nf_db) and self.nf_db >= 0):
            raise InvalidParameterError(f"stage '{self.label}': nf_db must be finite and >= 0")


# example stage catalog for exploring cascade topologies; passive stages use
# the loss-equals-noise-figure convention for two-ports
EXAMPLE_STAGES = {
    "lna": RfStage("lna", 22.0, 5.0),
    "mixer": RfStage("mixer", 0.0, 12.0),
    "combiner": RfStage("combiner", -1.0, 1.0),
    "divider": RfStage("divider", -1.0, 1.0),
    "switch": RfStage("switch", -1.5, 1.5),
    "phase_shifter": RfStage("phase_shifter", -4.0, 4.0),
    "vga": RfStage("vga", 4.0, 4.0),
}


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0:
        raise InvalidParameterError("linear value must be > 0 to convert to dB")
    return 10.0 * np.log10(value)


def friis_composite_nf(chain: Sequence[RfStage]) -> float:
    """Composite noise figure (dB) of a cascade of two-port stages.

    F_total = F_1 + sum_{k >= 2} (F_k - 1) / prod_{i < k} G_i in linear
    units; later stages are discounted by the gain accumulated before them.
    """
    stages = list(chain)
    if not stages:
        raise InvalidParameterError("noise-figure cascade needs at least one stage")
    total = db_to_linear(stages[0].nf_db)
    gain = db_to_linear(stages[0].gain_db)
    for stage in stages[1:]:
        total += (db_to_linear(stage.nf_db) - 1.0) / gain
        gain *= db_to_linear(stage.gain_db)
    return linear_to_db(total)


def preset_nf(architecture: str) -> float:
    """Composite noise figure (dB) of one of the four studied architectures."""
    try:
        return COMPOSITE_NF_DB[architecture]
    except KeyError:
        known = ", ".join(sorted(COMPOSITE_NF_DB))
        raise InvalidParameterError(f"unknown architecture '{architecture}' (expected one of: {known})") from None


def apply_nf_penalty(rho_db: float, nf_db: float) -> float:
    """Effective SNR (dB) after charging a receiver its noise figure."""
    return rho_db - nf_db
