"""Quantum image state preparation workbench: SCMFRQI and EFRQI circuits,
block-DCT compression, bit-rate accounting and statevector verification."""

from .circuit import Circuit, Gate, GateKind, RegisterLayout, count_gates, dump_circuit, parse_circuit
from .encoders import (
    CostReport, Scheme, ValueMap, bit_rate, build_efrqi_circuit, build_scmfrqi_circuit, toffoli_bits,
)
from .imageio import Image, load_image, merge_channels, save_image, split_channel
from .metrics import RatePoint, psnr, rate_table
from .pipeline import RunConfig, run_dct, run_direct, verify_by_simulation
from .simulator import EnsembleState, apply_gate, extract_map, fidelity_report, init_state, run_circuit
from .transform import CoefficientGrid, dequantize, forward_dct_block, inverse_dct_block, quantize

__version__ = "0.1.0"
