"""End-to-end runs: direct (pixel) and DCT modes, per channel and per scheme."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import transform
from .circuit import Circuit, count_gates
from .encoders import (
    SCHEME_ORDER, Scheme, ValueMap, bit_rate, bit_rate_from_plane, bits_needed,
    build_circuit, log2_exact, plane_blocks,
)
from .errors import ExtractionError, CoherenceError, CapacityError
from .imageio import Image, channel_labels
from .metrics import RatePoint, psnr
from .simulator import (
    EXACT_TOL, IDEALIZED, PHYSICAL, MAX_QUBITS, extract_map, fidelity_report, run_circuit,
)

log = logging.getLogger(__name__)

DIRECT_Q = 8
DEFAULT_Q_FACTORS = (8, 16, 32, 64, 70)


@dataclass
class RunConfig:
    mode: str = "dct"
    schemes: tuple = SCHEME_ORDER
    q_factors: tuple = DEFAULT_Q_FACTORS
    block_size: int = 4
    simulate: bool = False
    verify_blocks: int = 8
    seed: int = 0
    image_name: str = ""

    def __post_init__(self):
        if self.mode not in ("direct", "dct"):
            raise ValueError(f"mode must be 'direct' or 'dct', got {self.mode!r}")
        self.schemes = tuple(Scheme.parse(s) for s in self.schemes)
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        log2_exact(self.block_size)
        self.q_factors = tuple(int(q) for q in self.q_factors)
        if self.mode == "dct":
            if not self.q_factors:
                raise ValueError("dct mode requires at least one quantization factor")
            if any(q < 1 for q in self.q_factors):
                raise ValueError(f"quantization factors must be >= 1, got {self.q_factors}")


def _pad_zero(plane: np.ndarray, multiple: int) -> np.ndarray:
    h, w = plane.shape
    return np.pad(plane, ((0, -h % multiple), (0, -w % multiple)))


def direct_plane(img: Image, channel: int, block_size: int) -> np.ndarray:
    return _pad_zero(img.samples[channel].astype(np.int64), block_size)


@dataclass
class DctChannel:
    coeffs: np.ndarray  # quantized, zero-padded to a multiple of the block size
    q_bits: int
    reconstruction: np.ndarray  # uint8, unpadded
    psnr: float


def dct_channel(plane, q_factor: int, block_size: int) -> DctChannel:
    plane = np.asarray(plane)
    h, w = plane.shape
    padded = transform.pad_to_blocks(plane, transform.BLOCK)
    grid = transform.quantize(transform.forward_dct_plane(padded), q_factor)
    recon = transform.inverse_dct_plane(transform.dequantize(grid))[:h, :w]
    recon = np.clip(np.rint(recon), 0, 255).astype(np.uint8)
    coeffs = _pad_zero(grid.coeffs, block_size)
    max_abs = int(np.abs(coeffs).max()) if coeffs.size else 0
    return DctChannel(coeffs, bits_needed(max_abs), recon, psnr(plane, recon))


def run_direct(img: Image, cfg: RunConfig) -> list[RatePoint]:
    points = []
    for c, label in enumerate(channel_labels(img)):
        plane = direct_plane(img, c, cfg.block_size)
        for report in bit_rate_from_plane(plane, cfg.block_size, DIRECT_Q, cfg.schemes):
            points.append(RatePoint(report.scheme, label, None, math.inf, report,
                                    cfg.image_name, DIRECT_Q))
    return points


def run_dct(img: Image, cfg: RunConfig) -> list[RatePoint]:
    points = []
    for c, label in enumerate(channel_labels(img)):
        for qf in cfg.q_factors:
            ch = dct_channel(img.samples[c], qf, cfg.block_size)
            for report in bit_rate_from_plane(ch.coeffs, cfg.block_size, ch.q_bits, cfg.schemes):
                points.append(RatePoint(report.scheme, label, qf, ch.psnr, report,
                                        cfg.image_name, ch.q_bits))
    return points


@dataclass
class Verification:
    scheme: str
    passed: bool
    fidelity: float
    cause: str = ""
    circuit: Circuit | None = None
    branches: int = 1
    context: dict = field(default_factory=dict)


def verify_by_simulation(region, scheme, q: int | None = None,
                         max_qubits: int = MAX_QUBITS) -> Verification:
    """Build, simulate and decode one S x S region.

    Checks that the idealized run decodes back to the region, that it matches
    the EFRQI statevector, and that gate counts agree with the cost report.
    ``fidelity`` is the overlap of the physical-reset run with the ideal state.
    """
    scheme = Scheme.parse(scheme)
    region = np.asarray(region, dtype=np.int64)
    if q is None:
        q = bits_needed(int(np.abs(region).max()) if region.size else 0)
    vm = ValueMap.from_block(region, q)
    circuit = build_circuit(vm, scheme)
    try:
        ideal = run_circuit(circuit, IDEALIZED, max_qubits)
        decoded = extract_map(ideal)
        if decoded.entries != vm.entries:
            return Verification(scheme.value, False, 0.0, "decoded values differ from the input region", circuit)

        other = Scheme.EFRQI if scheme is Scheme.SCMFRQI else Scheme.SCMFRQI
        twin = run_circuit(build_circuit(vm, other), IDEALIZED, max_qubits)
        if np.max(np.abs(twin.vector - ideal.vector)) > EXACT_TOL:
            return Verification(scheme.value, False, 0.0, "EFRQI and SCMFRQI states differ", circuit)

        report = bit_rate([(0, 0, vm)], scheme, grid=(1, 1))
        tally = count_gates(circuit)
        expected = (report.position_mcx, report.value_mcx, report.sign_mcx, report.resets)
        counted = (tally.mcx_targets["aux"], tally.mcx_targets["value"],
                   tally.mcx_targets["sign"], tally["RESET"])
        if expected != counted:
            return Verification(scheme.value, False, 0.0,
                                f"gate counts {counted} disagree with cost model {expected}", circuit)

        physical = run_circuit(circuit, PHYSICAL, max_qubits)
        fid = fidelity_report(ideal, physical)
    except (ExtractionError, CoherenceError, CapacityError) as exc:
        return Verification(scheme.value, False, 0.0, f"{type(exc).__name__}: {exc}", circuit)
    return Verification(scheme.value, True, fid, "", circuit, len(physical.branches))


def _value_planes(img: Image, cfg: RunConfig):
    """Yield (channel label, q_factor, q_bits, value plane) for every run in cfg."""
    for c, label in enumerate(channel_labels(img)):
        if cfg.mode == "direct":
            yield label, None, DIRECT_Q, direct_plane(img, c, cfg.block_size)
        else:
            for qf in cfg.q_factors:
                ch = dct_channel(img.samples[c], qf, cfg.block_size)
                yield label, qf, ch.q_bits, ch.coeffs


@dataclass
class SampledBlock:
    channel: str
    q_factor: int | None
    q_bits: int
    block: tuple[int, int]
    region: np.ndarray


def sample_blocks(img: Image, cfg: RunConfig) -> list[SampledBlock]:
    """Pick ``cfg.verify_blocks`` nonzero blocks at random across all channels and factors."""
    candidates = []
    planes = list(_value_planes(img, cfg))
    for p, (_, _, _, plane) in enumerate(planes):
        tiles = plane_blocks(plane, cfg.block_size)
        for r, c in np.argwhere((tiles != 0).any(axis=(2, 3))):
            candidates.append((p, int(r), int(c)))
    rng = np.random.default_rng(cfg.seed)
    k = min(cfg.verify_blocks, len(candidates))
    picks = sorted(rng.choice(len(candidates), size=k, replace=False).tolist()) if k else []
    out = []
    for i in picks:
        p, r, c = candidates[i]
        label, qf, q_bits, plane = planes[p]
        out.append(SampledBlock(label, qf, q_bits, (r, c), plane_blocks(plane, cfg.block_size)[r, c].copy()))
    return out


def sample_verifications(img: Image, cfg: RunConfig) -> list[Verification]:
    results = []
    for b in sample_blocks(img, cfg):
        for scheme in cfg.schemes:
            v = verify_by_simulation(b.region, scheme, b.q_bits)
            v.context = {"image": cfg.image_name, "channel": b.channel,
                         "q_factor": b.q_factor, "block": b.block}
            log.info("verify %s %s q=%s block=%s: %s fidelity=%.6f %s", b.channel, scheme.value,
                     b.q_factor, b.block, "pass" if v.passed else "FAIL", v.fidelity, v.cause)
            results.append(v)
    return results


@dataclass
class RunResult:
    points: list[RatePoint]
    verifications: list[Verification] = field(default_factory=list)

    @property
    def all_verified(self) -> bool:
        return all(v.passed for v in self.verifications)


def run(img: Image, cfg: RunConfig) -> RunResult:
    points = run_direct(img, cfg) if cfg.mode == "direct" else run_dct(img, cfg)
    verifications = sample_verifications(img, cfg) if cfg.simulate else []
    return RunResult(points, verifications)
