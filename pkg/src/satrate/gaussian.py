"""Closed-form two-user rates for Gaussian inputs.

With Gaussian symbols and a single modeled interferer of relative gain
magnitude `gamma`, every quantity in the piecewise rate rule has a closed
form built from the Gaussian capacity function C(x) = log2(1 + x). For
snr = P/N the reference user's bound is

    r1 < C(snr)                               if r2 < C(g2 snr / (1 + snr))
    r1 < C((1 + g2) snr) - r2                 if C(g2 snr / (1+snr)) <= r2 < C(g2 snr)
    r1 < C(snr / (1 + g2 snr))                if r2 >= C(g2 snr)

where g2 = gamma^2. The three branches meet continuously; the bound is
positive for every snr > 0 and non-decreasing in snr. The phase of the
interferer gain is irrelevant by rotation invariance, so only |gamma|
enters.

The module doubles as an end-to-end oracle: `mc_gaussian_quad` runs the
Monte-Carlo estimator pipeline with Gaussian samplers and exact Gaussian
conditional densities, which must agree with these closed forms at K = 2.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .constellations import Modulation
from .errors import ConfigurationError
from .estimators import Mud2Estimates, estimate_all
from .scenario import Scenario


def capacity(x):
    """C(x) = log2(1 + x), the Gaussian-input capacity function."""
    return np.log2(1.0 + np.asarray(x, dtype=float))


class GaussRegime(enum.Enum):
    FULL = "full"
    SUMRATE_LIMITED = "sumrate_limited"
    INTERFERENCE_LIMITED = "interference_limited"


@dataclass(frozen=True)
class GaussianExampleResult:
    """One operating point of the closed-form bound.

    `thresholds` are the two r2 thresholds (lower, upper) =
    (C(g2 snr/(1+snr)), C(g2 snr)) that select the branch.
    """

    snr: float
    r1_bound: float
    regime: GaussRegime
    thresholds: Tuple[float, float]


@dataclass(frozen=True)
class GaussianCurve:
    points: List[GaussianExampleResult]
    # SNRs (linear) where the active branch changes, low to high; None when
    # a boundary does not exist at finite SNR.
    boundary_enter_sumrate: Optional[float]
    boundary_enter_full: Optional[float]


def gaussian_rate(snr: float, gamma_abs: float, r2: float) -> GaussianExampleResult:
    """Evaluate the three-branch bound at one (snr, |gamma|, r2) point."""
    if snr < 0 or gamma_abs < 0 or r2 < 0:
        raise ConfigurationError("snr, gamma_abs and r2 must all be >= 0")
    g2 = gamma_abs * gamma_abs
    t_low = float(capacity(g2 * snr / (1.0 + snr))) if snr > 0 else 0.0
    t_high = float(capacity(g2 * snr))
    if r2 < t_low:
        value = float(capacity(snr))
        regime = GaussRegime.FULL
    elif r2 < t_high:
        value = float(capacity((1.0 + g2) * snr)) - r2
        regime = GaussRegime.SUMRATE_LIMITED
    else:
        value = float(capacity(snr / (1.0 + g2 * snr)))
        regime = GaussRegime.INTERFERENCE_LIMITED
    return GaussianExampleResult(snr=snr, r1_bound=value, regime=regime, thresholds=(t_low, t_high))


def regime_boundaries(gamma_abs: float, r2: float):
    """Linear SNRs where the branch thresholds cross r2.

    Returns (enter_sumrate, enter_full): the SNR above which the
    interference-limited branch hands over to the sum-rate-limited one
    (inverting C(g2 s) = r2), and the SNR above which the full branch takes
    over (inverting C(g2 s / (1+s)) = r2). Either is None when no finite
    crossing exists.
    """
    g2 = gamma_abs * gamma_abs
    t = 2.0**r2 - 1.0
    if g2 <= 0.0:
        return (None, None) if r2 > 0 else (0.0, 0.0)
    enter_sumrate = t / g2
    enter_full = t / (g2 - t) if g2 > t else None
    return enter_sumrate, enter_full


def gaussian_curve(gamma_abs: float, r2: float, snr_grid_db: Sequence[float]) -> GaussianCurve:
    """Evaluate the bound over an ascending dB grid and report boundaries."""
    grid = [float(v) for v in snr_grid_db]
    if not grid:
        raise ConfigurationError("snr grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigurationError("snr grid must be strictly ascending")
    points = [gaussian_rate(10.0 ** (db / 10.0), gamma_abs, r2) for db in grid]
    enter_sumrate, enter_full = regime_boundaries(gamma_abs, r2)
    return GaussianCurve(
        points=points,
        boundary_enter_sumrate=enter_sumrate,
        boundary_enter_full=enter_full,
    )


def two_user_gaussian_scenario(gamma: complex, r2_bits: float = 0.5, p: float = 1.0) -> Scenario:
    """A K=2 scenario with Gaussian inputs and interferer gain `gamma`."""
    mag = abs(gamma)
    if mag > 1.0:
        raise ConfigurationError(f"interferer gain magnitude must be <= 1, got {mag}")
    return Scenario(
        k=2,
        gains=np.array([1.0 + 0.0j, complex(gamma)]),
        modulations=(Modulation.GAUSSIAN, Modulation.GAUSSIAN),
        p=p,
        r2_bits_override=r2_bits,
    )


def mc_gaussian_quad(
    snr: float, gamma: complex, n_samples: int, seed: int, p: float = 1.0
) -> Mud2Estimates:
    """Monte-Carlo estimates for the K=2 Gaussian-input channel at `snr` = P/N.

    Exercises the estimator pipeline end to end; each estimate converges to
    the matching closed-form branch quantity.
    """
    if snr <= 0:
        raise ConfigurationError(f"snr must be > 0 for a Monte-Carlo run, got {snr}")
    s = two_user_gaussian_scenario(gamma, p=p)
    return estimate_all(s, n_thermal=p / snr, n_samples=n_samples, seed=seed)


def branch_values(snr: float, gamma_abs: float, r2: float) -> dict:
    """All three branch expressions at one point (for curve plotting)."""
    g2 = gamma_abs * gamma_abs
    return {
        "full": float(capacity(snr)),
        "sumrate_limited": float(capacity((1.0 + g2) * snr)) - r2,
        "interference_limited": float(capacity(snr / (1.0 + g2 * snr))),
    }
