"""8x8 block DCT-II (orthonormal) and uniform scalar quantization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

BLOCK = 8
LEVEL_SHIFT = 128.0


def forward_dct_block(block) -> np.ndarray:
    block = np.asarray(block, dtype=np.float64)
    if block.shape != (BLOCK, BLOCK):
        raise ValueError(f"block must be {BLOCK}x{BLOCK}, got {block.shape}")
    return dctn(block, type=2, norm="ortho")


def inverse_dct_block(coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape != (BLOCK, BLOCK):
        raise ValueError(f"block must be {BLOCK}x{BLOCK}, got {coeffs.shape}")
    return idctn(coeffs, type=2, norm="ortho")


def _tiles(a: np.ndarray) -> np.ndarray:
    h, w = a.shape
    return a.reshape(h // BLOCK, BLOCK, w // BLOCK, BLOCK)


def pad_to_blocks(plane, multiple: int = BLOCK) -> np.ndarray:
    """Edge-replicate a 2-D plane up to the next multiple of ``multiple``."""
    plane = np.asarray(plane)
    h, w = plane.shape
    ph, pw = -h % multiple, -w % multiple
    if ph == 0 and pw == 0:
        return plane
    return np.pad(plane, ((0, ph), (0, pw)), mode="edge")


def forward_dct_plane(plane) -> np.ndarray:
    """Level-shift and transform every 8x8 tile of a plane whose sides are multiples of 8."""
    shifted = np.asarray(plane, dtype=np.float64) - LEVEL_SHIFT
    h, w = shifted.shape
    if h % BLOCK or w % BLOCK:
        raise ValueError(f"plane {w}x{h} is not tiled by {BLOCK}x{BLOCK} blocks")
    return dctn(_tiles(shifted), type=2, norm="ortho", axes=(1, 3)).reshape(h, w)


def inverse_dct_plane(coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    h, w = coeffs.shape
    if h % BLOCK or w % BLOCK:
        raise ValueError(f"grid {w}x{h} is not tiled by {BLOCK}x{BLOCK} blocks")
    return idctn(_tiles(coeffs), type=2, norm="ortho", axes=(1, 3)).reshape(h, w) + LEVEL_SHIFT


@dataclass(frozen=True, eq=False)
class CoefficientGrid:
    coeffs: np.ndarray  # (height, width) int64, 8x8-tiled
    q_factor: int

    def __post_init__(self):
        arr = np.asarray(self.coeffs)
        if arr.ndim != 2 or arr.shape[0] % BLOCK or arr.shape[1] % BLOCK:
            raise ValueError(f"coefficient grid must be 2-D with sides divisible by {BLOCK}")
        arr = np.array(arr, dtype=np.int64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def height(self) -> int:
        return self.coeffs.shape[0]

    @property
    def width(self) -> int:
        return self.coeffs.shape[1]

    @property
    def nonzero(self) -> np.ndarray:
        return np.argwhere(self.coeffs != 0)

    def __eq__(self, other):
        if not isinstance(other, CoefficientGrid):
            return NotImplemented
        return self.q_factor == other.q_factor and np.array_equal(self.coeffs, other.coeffs)


def round_half_away(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def quantize(coeffs, q_factor) -> CoefficientGrid:
    if q_factor < 1:
        raise ValueError(f"quantization factor must be >= 1, got {q_factor}")
    q = round_half_away(np.asarray(coeffs, dtype=np.float64) / q_factor)
    return CoefficientGrid(q.astype(np.int64), int(q_factor))


def dequantize(grid: CoefficientGrid) -> np.ndarray:
    return grid.coeffs.astype(np.float64) * grid.q_factor
