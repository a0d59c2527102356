"""Monte-Carlo achievable-rate estimators with a mismatched decoding metric.

The receiver models only the reference user and (for two-user detection)
the strongest interferer; everything else, plus thermal noise, is treated
as one complex Gaussian term. The channel is memoryless, so each rate
estimate is the sample mean over true-channel draws of the log-ratio of
the corresponding auxiliary densities evaluated at the transmitted
symbols:

    I(x1;y|x2):  log2 q(y|x1,x2) / q(y|x2)
    I(x2;y|x1):  log2 q(y|x1,x2) / q(y|x1)
    I(x1,x2;y):  log2 q(y|x1,x2) / q(y)
    I(x2;y):     log2 q(y|x2)    / q(y)
    I(x1;y):     log2 q(y|x1)    / q(y)     (interferer marginalized, not decoded)

with q(y|x1,x2) a complex Gaussian centered at sqrt(P)(x1 + gamma x2) and
marginals obtained by averaging over the uniform symbol priors. All five
quantities are estimated on one shared draw stream, which makes the
chain-rule identities exact per sample (up to float rounding).

These sample averages are achievable-rate lower bounds for the true
channel; they coincide with the true mutual informations when the
auxiliary model is exact (K = 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import CHUNK, residual_interference_power, sample_channel
from .constellations import Constellation
from .errors import ConfigurationError, GaussianInputError
from .scenario import Scenario

LN2 = math.log(2.0)

#: Smallest supported Monte-Carlo sample count.
MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class MiEstimate:
    """A Monte-Carlo mutual-information estimate in bits/symbol.

    `value` is clamped to the admissible range [0, log2 M]; `raw` keeps the
    unclamped sample mean for diagnostics. `std_err` is the sample standard
    deviation of the per-draw log-ratio divided by sqrt(n_samples).
    """

    value: float
    std_err: float
    n_samples: int
    seed: int
    raw: float


@dataclass(frozen=True)
class RateQuad:
    """The four rate quantities of one two-user operating point."""

    i1: MiEstimate    # I(x1;y|x2)
    i2: MiEstimate    # I(x2;y|x1)
    ij: MiEstimate    # I(x1,x2;y)
    ix2y: MiEstimate  # I(x2;y)

    def consistency_gap(self) -> float:
        """|I(x1,x2;y) - I(x2;y) - I(x1;y|x2)| on the raw means (exact per
        sample up to float rounding when all terms share one draw stream)."""
        return abs(self.ij.raw - self.ix2y.raw - self.i1.raw)


@dataclass(frozen=True)
class Mud2Estimates:
    """All two-user-detection estimates from one shared draw stream."""

    i1: MiEstimate
    i2: MiEstimate
    ij: MiEstimate
    ix2y: MiEstimate
    i_s: MiEstimate   # I(x1;y), interferer statistics exploited but not decoded
    aux: "AuxModel"

    @property
    def quad(self) -> RateQuad:
        return RateQuad(self.i1, self.i2, self.ij, self.ix2y)


@dataclass(frozen=True)
class AuxModel:
    """The receiver-side Gaussian auxiliary channel.

    kind "sud": y = x1 + w with Var(w) = N + P sum_{i>=2} |gain_i|^2.
    kind "mud2": y = x1 + gamma x2 + w with Var(w) = N + P sum_{i>=3} |gain_i|^2.
    """

    kind: str
    gamma: Optional[complex]
    noise_var: float

    def __post_init__(self):
        if self.noise_var <= 0:
            raise ConfigurationError(f"auxiliary noise variance must be > 0, got {self.noise_var}")


def sud_aux(s: Scenario, n_thermal: float) -> AuxModel:
    return AuxModel("sud", None, n_thermal + residual_interference_power(s, 2))


def mud2_aux(s: Scenario, n_thermal: float) -> AuxModel:
    if s.k < 2:
        raise ConfigurationError("two-user detection needs at least two users")
    return AuxModel("mud2", complex(s.gains[1]), n_thermal + residual_interference_power(s, 3))


class _Stats:
    """Streaming mean / standard-error accumulator."""

    __slots__ = ("n", "s", "s2")

    def __init__(self):
        self.n = 0
        self.s = 0.0
        self.s2 = 0.0

    def add(self, arr: np.ndarray):
        self.n += arr.size
        self.s += float(arr.sum())
        self.s2 += float(np.dot(arr, arr))

    def estimate(self, seed: int, cap: Optional[float]) -> MiEstimate:
        mean = self.s / self.n
        var = max(self.s2 - self.s * self.s / self.n, 0.0) / max(self.n - 1, 1)
        std_err = math.sqrt(var / self.n)
        value = max(mean, 0.0)
        if cap is not None:
            value = min(value, cap)
        return MiEstimate(value=value, std_err=std_err, n_samples=self.n, seed=seed, raw=mean)


def _check_samples(n_samples: int):
    if n_samples < MIN_SAMPLES:
        raise ConfigurationError(
            f"n_samples must be >= {MIN_SAMPLES} for a usable estimate, got {n_samples}"
        )


def estimate_all(s: Scenario, n_thermal, n_samples, seed) -> Mud2Estimates:
    """Estimate all five two-user quantities on one shared draw stream.

    Users 1 and 2 must both be discrete (alphabet enumeration) or both
    Gaussian (closed-form conditional densities). The auxiliary noise
    variance lumps users 3..K plus thermal noise.
    """
    _check_samples(n_samples)
    if s.k < 2:
        raise ConfigurationError("two-user estimates need at least two users")
    aux = mud2_aux(s, n_thermal)
    c1, c2 = s.constellation(0), s.constellation(1)
    if c1.is_discrete and c2.is_discrete:
        return _estimate_all_discrete(s, c1, c2, aux, n_thermal, n_samples, seed)
    if not c1.is_discrete and not c2.is_discrete:
        return _estimate_all_gaussian(s, aux, n_thermal, n_samples, seed)
    raise ConfigurationError(
        "users 1 and 2 must both be discrete or both Gaussian; mixing is unsupported"
    )


def estimate_quad(s: Scenario, n_thermal, n_samples, seed) -> RateQuad:
    """The four-rate quad for two-user detection (discrete alphabets only)."""
    _require_discrete_pair(s)
    return estimate_all(s, n_thermal, n_samples, seed).quad


def estimate_is_mud(s: Scenario, n_thermal, n_samples, seed) -> MiEstimate:
    """I(x1;y) when the interferer's alphabet statistics are exploited but
    its data is not decoded (discrete alphabets only).

    Shares the draw stream with `estimate_quad` for equal arguments.
    """
    _require_discrete_pair(s)
    return estimate_all(s, n_thermal, n_samples, seed).i_s


def _require_discrete_pair(s: Scenario):
    for user in (0, 1):
        if s.k > user and not s.constellation(user).is_discrete:
            raise GaussianInputError(
                f"user {user + 1} is Gaussian; use satrate.gaussian for "
                "Gaussian-input rates"
            )


def _log_likelihood_table(y, mu_ri, mu2, inv_nv):
    """(M, m) table of -|y - mu_j|^2 / Nv, up to a per-sample constant.

    The |y|^2 term is dropped: it shifts every candidate of one sample
    equally and cancels in all density ratios.
    """
    m = len(y)
    yr = np.empty((2, m))
    yr[0] = y.real
    yr[1] = y.imag
    ll = mu_ri @ yr
    ll *= 2.0
    ll -= mu2[:, None]
    ll *= inv_nv
    return ll


def _stabilize_at_truth(ll, k, rows):
    """Shift each sample's candidate column so the transmitted entry is 0.

    Exponents are then bounded by |y - mu_true|^2 / Nv, whose tail decays
    exponentially on the scale of the auxiliary variance: no overflow, and
    every marginal sum contains the (unit) true term, so no log(0) either.
    """
    ll -= ll[k, rows][None, :]
    return np.exp(ll, out=ll)


def estimate_sud(s: Scenario, n_thermal, n_samples, seed) -> MiEstimate:
    """Single-user-detection rate: every interferer lumped into noise."""
    _check_samples(n_samples)
    c1 = s.constellation(0)
    if not c1.is_discrete:
        raise GaussianInputError(
            "user 1 is Gaussian; use satrate.gaussian for Gaussian-input rates"
        )
    aux = sud_aux(s, n_thermal)
    pts = math.sqrt(s.p) * s.gains[0] * c1.points
    mu_ri = np.stack([pts.real, pts.imag], axis=1)
    mu2 = np.abs(pts) ** 2
    inv_nv = 1.0 / aux.noise_var
    log_m = math.log(c1.size)
    rows_full = np.arange(CHUNK)
    stats = _Stats()
    for block in sample_channel(s, n_thermal, n_samples, seed):
        rows = rows_full[: len(block)]
        e = _stabilize_at_truth(
            _log_likelihood_table(block.y, mu_ri, mu2, inv_nv), block.indices[0], rows
        )
        lse = np.log(np.add.reduce(e, axis=0))
        stats.add((log_m - lse) / LN2)
    return stats.estimate(seed, cap=c1.bits)


def _estimate_all_discrete(
    s: Scenario,
    c1: Constellation,
    c2: Constellation,
    aux: AuxModel,
    n_thermal,
    n_samples,
    seed,
) -> Mud2Estimates:
    m1, m2 = c1.size, c2.size
    amp = math.sqrt(s.p)
    joint = amp * (s.gains[0] * c1.points[:, None] + aux.gamma * c2.points[None, :])
    mu = joint.ravel()
    mu_ri = np.stack([mu.real, mu.imag], axis=1)
    mu2 = np.abs(mu) ** 2
    inv_nv = 1.0 / aux.noise_var
    log_m1, log_m2 = math.log(m1), math.log(m2)
    log_m12 = log_m1 + log_m2
    rows_full = np.arange(CHUNK)
    acc = {name: _Stats() for name in ("i1", "i2", "ij", "ix2y", "i_s")}
    for block in sample_channel(s, n_thermal, n_samples, seed):
        rows = rows_full[: len(block)]
        a = block.indices[0]
        b = block.indices[1]
        e = _stabilize_at_truth(
            _log_likelihood_table(block.y, mu_ri, mu2, inv_nv), a * m2 + b, rows
        )
        e3 = e.reshape(m1, m2, -1)
        row = e3.sum(axis=1)  # sum over x2 candidates, indexed by x1
        col = e3.sum(axis=0)  # sum over x1 candidates, indexed by x2
        ln_ab = np.log(np.add.reduce(row, axis=0))
        ln_row = np.log(row[a, rows])
        ln_col = np.log(col[b, rows])
        # the transmitted-pair numerator is 0 after stabilization
        acc["i1"].add((log_m1 - ln_col) / LN2)
        acc["i2"].add((log_m2 - ln_row) / LN2)
        acc["ij"].add((log_m12 - ln_ab) / LN2)
        acc["ix2y"].add((ln_col - ln_ab + log_m2) / LN2)
        acc["i_s"].add((ln_row - ln_ab + log_m1) / LN2)
    caps = {
        "i1": c1.bits,
        "i2": c2.bits,
        "ij": c1.bits + c2.bits,
        "ix2y": c2.bits,
        "i_s": c1.bits,
    }
    est = {name: st.estimate(seed, caps[name]) for name, st in acc.items()}
    return Mud2Estimates(aux=aux, **est)


def estimate_joint(s: Scenario, n_thermal, n_samples, seed) -> MiEstimate:
    """I(x1,x2;y) alone, on the same draw stream as `estimate_all`.

    Skips the conditional marginals; used by the phase search where only
    the sum-rate matters.
    """
    _check_samples(n_samples)
    if s.k < 2:
        raise ConfigurationError("two-user estimates need at least two users")
    aux = mud2_aux(s, n_thermal)
    c1, c2 = s.constellation(0), s.constellation(1)
    if not (c1.is_discrete and c2.is_discrete):
        return estimate_all(s, n_thermal, n_samples, seed).ij
    m1, m2 = c1.size, c2.size
    amp = math.sqrt(s.p)
    joint = amp * (s.gains[0] * c1.points[:, None] + aux.gamma * c2.points[None, :])
    mu = joint.ravel()
    mu_ri = np.stack([mu.real, mu.imag], axis=1)
    mu2 = np.abs(mu) ** 2
    inv_nv = 1.0 / aux.noise_var
    log_m12 = math.log(m1 * m2)
    rows_full = np.arange(CHUNK)
    stats = _Stats()
    for block in sample_channel(s, n_thermal, n_samples, seed):
        rows = rows_full[: len(block)]
        k = block.indices[0] * m2 + block.indices[1]
        e = _stabilize_at_truth(
            _log_likelihood_table(block.y, mu_ri, mu2, inv_nv), k, rows
        )
        ln_ab = np.log(np.add.reduce(e, axis=0))
        stats.add((log_m12 - ln_ab) / LN2)
    return stats.estimate(seed, cap=c1.bits + c2.bits)


def _estimate_all_gaussian(
    s: Scenario, aux: AuxModel, n_thermal, n_samples, seed
) -> Mud2Estimates:
    # Gaussian inputs: every marginal of the auxiliary law is itself a
    # complex Gaussian, so no enumeration is required.
    p = s.p
    g1 = complex(s.gains[0])
    g2 = aux.gamma
    amp = math.sqrt(p)
    v0 = aux.noise_var
    v1 = v0 + p * abs(g1) ** 2           # x1 marginalized
    v2 = v0 + p * abs(g2) ** 2           # x2 marginalized
    v3 = v0 + p * (abs(g1) ** 2 + abs(g2) ** 2)
    lv0, lv1, lv2, lv3 = (math.log(v) for v in (v0, v1, v2, v3))
    acc = {name: _Stats() for name in ("i1", "i2", "ij", "ix2y", "i_s")}
    for block in sample_channel(s, n_thermal, n_samples, seed):
        y = block.y
        a = block.symbols[0]
        b = block.symbols[1]
        t_joint = -np.abs(y - amp * (g1 * a + g2 * b)) ** 2 / v0 - lv0
        t_condb = -np.abs(y - amp * g2 * b) ** 2 / v1 - lv1
        t_conda = -np.abs(y - amp * g1 * a) ** 2 / v2 - lv2
        t_marg = -np.abs(y) ** 2 / v3 - lv3
        acc["i1"].add((t_joint - t_condb) / LN2)
        acc["i2"].add((t_joint - t_conda) / LN2)
        acc["ij"].add((t_joint - t_marg) / LN2)
        acc["ix2y"].add((t_condb - t_marg) / LN2)
        acc["i_s"].add((t_conda - t_marg) / LN2)
    est = {name: st.estimate(seed, cap=None) for name, st in acc.items()}
    return Mud2Estimates(aux=aux, **est)


def mi_oracle_awgn(c: Constellation, snr: float, order: int = 64) -> float:
    """Single-user AWGN mutual information by 2-D Gauss-Hermite quadrature.

    Deterministic reference for the Monte-Carlo estimators; accurate to
    about 1e-4 bits for the alphabets used here. `snr` is the linear ratio
    of symbol energy to total complex noise variance.
    """
    c._require_discrete()
    if snr < 0:
        raise ConfigurationError(f"snr must be >= 0, got {snr}")
    if snr == 0.0:
        return 0.0
    pts = c.points
    m = len(pts)
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    u = (nodes[:, None] + 1j * nodes[None, :]).ravel()
    wt = np.outer(weights, weights).ravel() / np.pi
    d = math.sqrt(snr) * (pts[:, None] - pts[None, :])
    # exponent of q(z|x_k)/q(z|x_m) at z = sqrt(snr) x_m + u
    e = -np.abs(d)[None, :, :] ** 2 - 2.0 * np.real(d[None, :, :] * np.conj(u)[:, None, None])
    mx = e.max(axis=2)
    lse = mx + np.log(np.exp(e - mx[:, :, None]).sum(axis=2))
    inner = wt @ lse  # E_u[ln sum_k ...] for each conditioning symbol
    return math.log2(m) - float(inner.mean()) / LN2
