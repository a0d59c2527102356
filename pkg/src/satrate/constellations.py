"""Modulation alphabets used on the forward link.

All discrete alphabets are normalized to unit average symbol energy, so
transmit power enters the channel model only through the per-user gains.
Point ordering is part of the external contract (CSV column mapping and
seeded draws depend on it) and is frozen as follows:

* QPSK: the four points ``(+-1 +-j)/sqrt(2)`` in counter-clockwise
  (Gray-adjacent) order starting from ``(1+j)/sqrt(2)``.
* 8PSK: ``exp(j 2 pi k / 8)`` for ``k = 0..7``.
* 16APSK: the 4 inner-ring points first (angles ``pi/4 + k pi/2``), then
  the 12 outer-ring points (angles ``pi/12 + k pi/6``), outer/inner radius
  ratio 3.15 by default, radii scaled for unit average energy.

The GAUSSIAN pseudo-alphabet has no point list; it is sampler-only and is
rejected by any operation that needs to enumerate symbols.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError, GaussianInputError

#: Default 16APSK outer/inner ring radius ratio.
DEFAULT_RING_RATIO = 3.15


class Modulation(enum.Enum):
    """Supported modulation labels (string values appear in scenario files)."""

    QPSK = "qpsk"
    PSK8 = "8psk"
    APSK16 = "16apsk"
    GAUSSIAN = "gaussian"

    @classmethod
    def from_label(cls, label: str) -> "Modulation":
        try:
            return cls(str(label).strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ConfigurationError(
                f"unknown modulation label {label!r}; expected one of: {valid}"
            ) from None


# k-fold rotational symmetry of each alphabet (0 marks the continuous case).
_SYMMETRY_ORDER = {
    Modulation.QPSK: 4,
    Modulation.PSK8: 8,
    Modulation.APSK16: 4,
    Modulation.GAUSSIAN: 0,
}


@dataclass(frozen=True)
class Constellation:
    """A finite symbol alphabet with a prior, or the Gaussian sampler.

    `points` and `prior` are None exactly when `label` is GAUSSIAN.
    Instances are immutable and safe to share across workers.
    """

    label: Modulation
    points: Optional[np.ndarray]
    prior: Optional[np.ndarray]

    def __post_init__(self):
        if self.label is Modulation.GAUSSIAN:
            if self.points is not None or self.prior is not None:
                raise ConfigurationError("GAUSSIAN constellation has no point list")
            return
        pts = np.asarray(self.points, dtype=np.complex128)
        pri = np.asarray(self.prior, dtype=np.float64)
        if pts.ndim != 1 or pts.shape != pri.shape:
            raise ConfigurationError("points and prior must be 1-D and equal length")
        if abs(pri.sum() - 1.0) > 1e-12:
            raise ConfigurationError("prior must sum to 1")
        energy = float(np.sum(pri * np.abs(pts) ** 2))
        if abs(energy - 1.0) > 1e-12:
            raise ConfigurationError(
                f"constellation must have unit average energy, got {energy!r}"
            )
        pts.setflags(write=False)
        pri.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "prior", pri)

    @property
    def is_discrete(self) -> bool:
        return self.label is not Modulation.GAUSSIAN

    @property
    def size(self) -> int:
        """Alphabet size M (discrete labels only)."""
        self._require_discrete()
        return len(self.points)

    @property
    def bits(self) -> float:
        """log2(M), the entropy of the uniform input."""
        return math.log2(self.size)

    def _require_discrete(self):
        if not self.is_discrete:
            raise GaussianInputError(
                "operation needs a finite alphabet; GAUSSIAN inputs are handled "
                "by satrate.gaussian"
            )


def _qpsk_points() -> np.ndarray:
    # (+-1 +-j)/sqrt(2), counter-clockwise from the first quadrant
    return np.exp(1j * (np.pi / 4 + np.pi / 2 * np.arange(4)))


def _psk8_points() -> np.ndarray:
    return np.exp(1j * 2 * np.pi * np.arange(8) / 8)


def _apsk16_points(ring_ratio: float) -> np.ndarray:
    # (4 r^2 + 12 (rho r)^2) / 16 = 1  =>  r = 4 / sqrt(4 + 12 rho^2)
    r_inner = 4.0 / math.sqrt(4.0 + 12.0 * ring_ratio**2)
    r_outer = ring_ratio * r_inner
    inner = r_inner * np.exp(1j * (np.pi / 4 + np.pi / 2 * np.arange(4)))
    outer = r_outer * np.exp(1j * (np.pi / 12 + np.pi / 6 * np.arange(12)))
    return np.concatenate([inner, outer])


def make_constellation(
    label, ring_ratio: float = DEFAULT_RING_RATIO
) -> Constellation:
    """Build the constellation for `label` (a Modulation or its string value).

    `ring_ratio` only affects 16APSK and must be > 1.
    """
    if not isinstance(label, Modulation):
        label = Modulation.from_label(label)
    if label is Modulation.GAUSSIAN:
        return Constellation(label, None, None)
    if label is Modulation.QPSK:
        pts = _qpsk_points()
    elif label is Modulation.PSK8:
        pts = _psk8_points()
    elif label is Modulation.APSK16:
        if ring_ratio <= 1.0:
            raise ConfigurationError(f"16APSK ring ratio must exceed 1, got {ring_ratio}")
        pts = _apsk16_points(ring_ratio)
    else:  # pragma: no cover - enum is closed
        raise ConfigurationError(f"unsupported label {label!r}")
    # exact renormalization guards against rounding in the point formulas
    pri = np.full(len(pts), 1.0 / len(pts))
    pts = pts / math.sqrt(float(np.sum(pri * np.abs(pts) ** 2)))
    return Constellation(label, pts, pri)


def rotational_symmetry_order(c: Constellation) -> int:
    """k such that the alphabet is invariant under rotation by 2*pi/k.

    Returns 0 for GAUSSIAN (invariant under every rotation).
    """
    return _SYMMETRY_ORDER[c.label]


def draw_symbols(c: Constellation, rng: np.random.Generator, n: int):
    """Draw `n` symbols; returns (indices, values).

    Discrete labels draw uniform indices into the frozen point order;
    GAUSSIAN draws circularly-symmetric complex normals with unit variance
    (indices are all -1).
    """
    if c.is_discrete:
        idx = rng.integers(0, c.size, size=n)
        return idx, c.points[idx]
    re = rng.standard_normal(n)
    im = rng.standard_normal(n)
    return np.full(n, -1, dtype=np.int64), (re + 1j * im) / math.sqrt(2.0)


def draw_symbol(c: Constellation, rng: np.random.Generator) -> complex:
    """Draw a single symbol (see `draw_symbols`)."""
    _, vals = draw_symbols(c, rng, 1)
    return complex(vals[0])
