"""1-bit quantized multi-user MIMO downlink: minimum-BER lookup-table precoding,
per-channel input subset selection, LDPC coding and Monte-Carlo BER sweeps."""

from .channel import derived_rng, draw_channel, draw_noise, receive_correlation
from .constellation import (
    BOX_HALF_WIDTH,
    decimal_value,
    gray_decode,
    gray_encode,
    project_box,
    quantize,
)
from .harness import SweepConfig, SweepResult, crossing_db, run_sweep, wilson_interval
from .ldpc import DecoderConfig, LdpcCode, construct_code, decode, encode, load_alist, save_alist
from .precoder import (
    LookupTable,
    MberCost,
    SolverOptions,
    build_lut,
    find_feasible_start,
    mber_cost,
    solve_mber,
)
from .spatial import (
    UserCodebook,
    build_codebook,
    map_to_transmit,
    select_subset_su,
    select_subsets_mu,
    spatial_decode,
    spatial_encode,
)

__version__ = "0.1.0"

__all__ = [
    "BOX_HALF_WIDTH",
    "DecoderConfig",
    "LdpcCode",
    "LookupTable",
    "MberCost",
    "SolverOptions",
    "SweepConfig",
    "SweepResult",
    "UserCodebook",
    "build_codebook",
    "build_lut",
    "construct_code",
    "crossing_db",
    "decimal_value",
    "decode",
    "derived_rng",
    "draw_channel",
    "draw_noise",
    "encode",
    "find_feasible_start",
    "gray_decode",
    "gray_encode",
    "load_alist",
    "map_to_transmit",
    "mber_cost",
    "project_box",
    "quantize",
    "receive_correlation",
    "run_sweep",
    "save_alist",
    "select_subset_su",
    "select_subsets_mu",
    "solve_mber",
    "spatial_decode",
    "spatial_encode",
    "wilson_interval",
]
