"""Piecewise achievable-rate rules for a fixed-rate interferer.

When the strongest interferer transmits at a fixed rate R2, the reference
user's achievable rate with joint detection is piecewise in R2:

    I_A = I(x1;y|x2)        if R2 < I(x2;y)
        = I(x1,x2;y) - R2   if I(x2;y) <= R2 < I(x2;y|x1)
        = 0                 if R2 >= I(x2;y|x1)

I_A has a cutoff: below the SNR where I(x2;y|x1) = R2 the interferer is
undecodable and I_A = 0, with an upward jump just above. Combining with
the rate I_S = I(x1;y) achievable without decoding the interferer gives
the continuous overall bound max{I_S, I_A}.

Boundary ties follow the inequality types above: R2 equal to I(x2;y)
falls into the sum-rate-limited branch, R2 equal to I(x2;y|x1) into the
zero branch.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Tuple

from .errors import BracketingError, NumericsError, PrecisionError
from .estimators import MiEstimate, RateQuad, estimate_all
from .scenario import Scenario

#: Chain-rule tolerance above which a quad is rejected as inconsistent.
CONSISTENCY_TOL = 1e-6


class Regime(enum.Enum):
    FULL = "full"
    SUMRATE_LIMITED = "sumrate_limited"
    ZERO = "zero"


@dataclass(frozen=True)
class Lemma1Result:
    i_a: float
    regime: Regime


@dataclass(frozen=True)
class CutoffResult:
    snr_c_db: float
    residual_bits: float
    iterations: int


def lemma1_rate(q: RateQuad, r2: float) -> Lemma1Result:
    """Evaluate the piecewise joint-detection rate for interferer rate `r2`."""
    if r2 < 0:
        raise ValueError(f"r2 must be >= 0, got {r2}")
    gap = q.consistency_gap()
    if gap > CONSISTENCY_TOL:
        raise NumericsError(
            f"rate quad violates the chain rule by {gap:.3g} bits; the four "
            "estimates must come from one shared draw stream"
        )
    if r2 < q.ix2y.value:
        return Lemma1Result(i_a=q.i1.value, regime=Regime.FULL)
    if r2 < q.i2.value:
        return Lemma1Result(i_a=max(q.ij.value - r2, 0.0), regime=Regime.SUMRATE_LIMITED)
    return Lemma1Result(i_a=0.0, regime=Regime.ZERO)


def theorem1_rate(q: RateQuad, i_s: MiEstimate, r2: float) -> float:
    """Overall achievable rate max{I_S, I_A} for the reference user."""
    return max(i_s.value, lemma1_rate(q, r2).i_a)


def find_cutoff_snr(
    s: Scenario,
    r2: float,
    bracket: Tuple[float, float],
    n_samples: int,
    seed: int,
    tol_bits: float = 1e-3,
    max_iter: int = 60,
) -> CutoffResult:
    """Locate the SNR (P/N, dB) where I(x2;y|x1) crosses the interferer rate.

    Bisection in the dB domain against the estimated, non-decreasing map
    SNR -> I(x2;y|x1). Every evaluation reuses the same seed, so the
    objective is a deterministic (common-random-numbers) function of SNR
    and the reported residual is relative to that fixed-seed map.
    """
    if tol_bits <= 0:
        raise ValueError(f"tol_bits must be > 0, got {tol_bits}")
    lo, hi = (float(v) for v in bracket)
    if not lo < hi:
        raise ValueError(f"bracket must satisfy lo < hi, got {bracket}")

    def i2_at(snr_db: float) -> float:
        n_thermal = s.p / 10.0 ** (snr_db / 10.0)
        return estimate_all(s, n_thermal, n_samples, seed).i2.value

    f_lo = i2_at(lo) - r2
    if f_lo >= 0.0:
        raise BracketingError(
            f"interferer rate {r2:.4g} bits is already decodable at the bracket "
            f"floor {lo:g} dB; no finite cutoff above it",
            side="floor",
        )
    f_hi = i2_at(hi) - r2
    if f_hi < 0.0:
        raise BracketingError(
            f"interferer rate {r2:.4g} bits is not decodable at the bracket "
            f"ceiling {hi:g} dB; raise the bracket or lower the rate",
            side="ceiling",
        )

    mid = 0.5 * (lo + hi)
    for iteration in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        f_mid = i2_at(mid) - r2
        if abs(f_mid) <= tol_bits:
            return CutoffResult(snr_c_db=mid, residual_bits=abs(f_mid), iterations=iteration)
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9:
            break
    raise PrecisionError(
        f"cutoff search did not reach {tol_bits:g} bits after {max_iter} "
        f"bisections (last residual {abs(f_mid):.3g}); Monte-Carlo noise is "
        "too large, increase n_samples"
    )
