"""PSNR and rate table assembly."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .encoders import SCHEME_ORDER, CostReport
from .imageio import Image

PEAK = 255.0
BITS_PER_MB = 8 * 2**20

CSV_FIELDS = [
    "image", "channel", "scheme", "q_factor", "psnr_db",
    "bits", "q_ones", "s_bit", "t_bit", "a_bit", "b_e", "mb",
    "q_bits",
]

_CHANNEL_ORDER = {"gray": 0, "R": 0, "G": 1, "B": 2}
_SCHEME_RANK = {s.value: i for i, s in enumerate(SCHEME_ORDER)}


def mse(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def psnr(original, reconstructed) -> float:
    """PSNR in dB at peak 255; ``math.inf`` for identical inputs.

    Accepts ``Image`` objects or plain sample arrays of equal shape.
    """
    a = original.samples if isinstance(original, Image) else original
    b = reconstructed.samples if isinstance(reconstructed, Image) else reconstructed
    err = mse(a, b)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(PEAK**2 / err)


def bits_to_mb(bits: int) -> float:
    return bits / BITS_PER_MB


@dataclass(frozen=True)
class RatePoint:
    scheme: str
    channel: str
    q_factor: int | None
    psnr: float
    cost: CostReport
    image: str = ""
    q_bits: int | None = None

    def __post_init__(self):
        if not (self.psnr > 0):
            raise ValueError(f"psnr must be positive or inf, got {self.psnr}")
        if self.cost.br < 0:
            raise ValueError("negative bit rate")


def _sort_key(p: RatePoint):
    return (
        p.image,
        _CHANNEL_ORDER.get(p.channel, 99), p.channel,
        -1 if p.q_factor is None else p.q_factor,
        _SCHEME_RANK.get(p.scheme, 99), p.scheme,
    )


def format_psnr(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4f}"


def rate_table(points) -> list[dict]:
    points = list(points)
    if not points:
        raise ValueError("rate_table needs at least one point")
    rows = []
    for p in sorted(points, key=_sort_key):
        c = p.cost
        rows.append({
            "image": p.image,
            "channel": p.channel,
            "scheme": p.scheme,
            "q_factor": "" if p.q_factor is None else p.q_factor,
            "psnr_db": format_psnr(p.psnr),
            "bits": c.br,
            "q_ones": c.q_ones,
            "s_bit": c.s_bit,
            "t_bit": c.t_bit,
            "a_bit": c.a_bit,
            "b_e": c.b_e,
            "mb": f"{bits_to_mb(c.br):.2f}",
            "q_bits": "" if p.q_bits is None else p.q_bits,
        })
    return rows


def table_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def write_csv(points, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(table_to_csv(rate_table(points)))
