"""Symbol-level sampling of the true received observable.

Each channel use superposes all K users' symbols with their complex gains
and adds circularly-symmetric complex Gaussian thermal noise with total
variance ``n_thermal`` (``E|w|^2 = n_thermal``). Sampling is
symbol-synchronous and co-frequency: one complex observable per use.

Draws are produced in fixed-size chunks so sample counts up to 1e8 never
require holding the whole stream. The draw order inside a chunk (user 1
symbols, ..., user K symbols, then noise) and the chunk size are frozen,
which makes a stream a pure function of (scenario, n_thermal, n, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List

import numpy as np

from .scenario import Scenario
from .constellations import draw_symbols

#: Frozen chunk size; part of the determinism contract.
CHUNK = 1 << 16


@dataclass(frozen=True)
class ChannelDraw:
    """One channel use: observable, per-user symbol indices, noise power."""

    y: complex
    x_indices: tuple
    noise_var_n: float


@dataclass(frozen=True)
class ChannelBlock:
    """A chunk of channel uses.

    `symbols` holds the drawn per-user symbol values (K x m); `indices`
    the per-user alphabet indices (-1 for Gaussian users).
    """

    y: np.ndarray
    symbols: np.ndarray
    indices: np.ndarray
    noise_var_n: float

    def __len__(self):
        return len(self.y)


def rng_for_seed(seed: int) -> np.random.Generator:
    """The generator used for all sampling in this package."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def sample_channel(
    s: Scenario, n_thermal: float, n: int, seed: int
) -> Iterator[ChannelBlock]:
    """Yield `n` independent channel uses in chunks.

    All users draw independently and uniformly from their constellations;
    the stream is bit-identical for identical (scenario, n_thermal, n, seed).
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    if n_thermal <= 0:
        raise ValueError(f"thermal noise power must be > 0, got {n_thermal}")
    rng = rng_for_seed(seed)
    consts = [s.constellation(i) for i in range(s.k)]
    amp = math.sqrt(s.p)
    noise_scale = math.sqrt(n_thermal / 2.0)
    remaining = n
    while remaining > 0:
        m = min(CHUNK, remaining)
        remaining -= m
        symbols = np.empty((s.k, m), dtype=np.complex128)
        indices = np.empty((s.k, m), dtype=np.int64)
        for i, c in enumerate(consts):
            indices[i], symbols[i] = draw_symbols(c, rng, m)
        w = noise_scale * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
        y = amp * (s.gains @ symbols) + w
        yield ChannelBlock(y=y, symbols=symbols, indices=indices, noise_var_n=n_thermal)


def first_draws(s: Scenario, n_thermal: float, n: int, seed: int) -> List[ChannelDraw]:
    """Materialize the first `n` draws as individual ChannelDraw records."""
    out: List[ChannelDraw] = []
    for block in sample_channel(s, n_thermal, n, seed):
        for t in range(len(block)):
            out.append(
                ChannelDraw(
                    y=complex(block.y[t]),
                    x_indices=tuple(int(v) for v in block.indices[:, t]),
                    noise_var_n=n_thermal,
                )
            )
            if len(out) == n:
                return out
    return out


def residual_interference_power(s: Scenario, first_modeled: int) -> float:
    """Power of the interferers the receiver lumps into noise.

    `first_modeled` = 2 treats everything beyond the reference user as
    residual (single-user detection); 3 keeps the strongest interferer
    modeled (two-user detection). Returns ``p * sum_{i >= first_modeled} |gain_i|^2``.
    """
    if first_modeled not in (2, 3):
        raise ValueError(f"first_modeled must be 2 or 3, got {first_modeled}")
    tail = s.gains[first_modeled - 1 :]
    return float(s.p * np.sum(np.abs(tail) ** 2))
