"""PAC code toolkit: encoding, unified trellis decoding, sorter latency model, FER harness."""

from .channel import ChannelParams, awgn, bpsk_modulate, channel_llr
from .decoder import DecoderConfig, DecodeResult, branch_metric, decode, hard_decision
from .pac_core import PacCode, pac_encode, parse_gen, polar_transform, rm_rate_profile
from .sim import FerPoint, SimPlan, confidence_interval, run_point, run_sweep
from .sorter import build_reduced_bitonic, latency_report, psi_ld, psi_lva

__version__ = "0.1.0"

__all__ = [
    "PacCode",
    "pac_encode",
    "parse_gen",
    "polar_transform",
    "rm_rate_profile",
    "DecoderConfig",
    "DecodeResult",
    "decode",
    "hard_decision",
    "branch_metric",
    "ChannelParams",
    "bpsk_modulate",
    "awgn",
    "channel_llr",
    "SimPlan",
    "FerPoint",
    "run_point",
    "run_sweep",
    "confidence_interval",
    "psi_ld",
    "psi_lva",
    "build_reduced_bitonic",
    "latency_report",
    "__version__",
]
