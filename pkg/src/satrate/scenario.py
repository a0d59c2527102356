"""K-user interference scenarios: gains, power profiles, modulation map.

A scenario fixes the complex gain and modulation of every user seen by the
reference receiver. Gains are normalized so the reference user has
``|gain_1| = 1``; interferer magnitudes derive from the per-user
signal-to-interference power ratios ``lambda_i = |gain_1|^2 / |gain_i|^2``
(in dB). Transmit power per user is ``p`` (1 by default) and the SNR sweep
varies the thermal-noise power instead.

Scenario files are flat ``key = value`` text, one scenario per file::

    # two-beam example
    k = 2
    lambdas_db = 0
    phases_deg = 30          # per interferer, users 2..K; or "random"
    modulations = qpsk, qpsk
    r2 = 3/5
    alpha = 0.5

Keys ``k``, ``lambdas_db`` (K-1 values) and ``modulations`` (K values) are
required for K >= 2; ``phases_deg`` defaults to all zeros, ``r2`` to 3/5,
``alpha`` to 0.5 and ``p`` to 1. ``r2_bits`` may replace the code rate with
an explicit interferer rate in bits per symbol (needed when user 2 is
Gaussian). Lines starting with ``#`` and trailing comments are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .constellations import Modulation, make_constellation
from .errors import ConfigurationError

#: Table of builtin power profiles (lambda_2..lambda_6 in dB).
BUILTIN_LAMBDAS_DB = {
    1: (0.0, 25.0, 25.0, 27.0, 30.0),
    2: (2.0, 26.0, 26.0, 27.0, 30.0),
    3: (4.0, 27.0, 26.0, 27.0, 30.0),
}

#: Modulation assignment that goes with the builtin profiles.
BUILTIN_MODULATIONS = (
    Modulation.QPSK,
    Modulation.QPSK,
    Modulation.PSK8,
    Modulation.PSK8,
    Modulation.APSK16,
    Modulation.PSK8,
)

DEFAULT_R2 = Fraction(3, 5)
DEFAULT_ALPHA = 0.5


@dataclass(frozen=True)
class PowerProfile:
    """Signal-to-interference power ratios lambda_2..lambda_K in dB."""

    lambdas_db: tuple

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lambdas_db)
        for i, v in enumerate(lam, start=2):
            if v < 0.0:
                raise ConfigurationError(
                    f"field 'lambdas_db': lambda_{i} = {v} dB is negative; the "
                    "reference user must be the strongest"
                )
        # user 2 is the strongest interferer; the rest need not be ordered
        if len(lam) >= 2 and any(v < lam[0] for v in lam[1:]):
            raise ConfigurationError(
                "field 'lambdas_db': lambda_2 must not exceed any lambda_i, i >= 3"
            )
        object.__setattr__(self, "lambdas_db", lam)

    def gain_magnitudes(self) -> np.ndarray:
        """|gain_i| for all K users (reference first, magnitude 1)."""
        lam = np.asarray(self.lambdas_db, dtype=float)
        return np.concatenate([[1.0], 10.0 ** (-lam / 20.0)])


@dataclass(frozen=True)
class Scenario:
    """Immutable description of one interference scenario."""

    k: int
    gains: np.ndarray
    modulations: tuple
    p: float = 1.0
    r2: Fraction = DEFAULT_R2
    alpha: float = DEFAULT_ALPHA
    r2_bits_override: Optional[float] = None
    phases_random: bool = False

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=np.complex128)
        if self.k < 1:
            raise ConfigurationError(f"field 'k': need at least one user, got {self.k}")
        if gains.shape != (self.k,):
            raise ConfigurationError(
                f"field 'lambdas_db': expected {self.k} gains, got {gains.shape}"
            )
        if abs(abs(gains[0]) - 1.0) > 1e-12:
            raise ConfigurationError("reference gain must have unit magnitude")
        if np.any(np.abs(gains[1:]) > 1.0 + 1e-12):
            raise ConfigurationError(
                "field 'lambdas_db': interferer gains must not exceed the reference"
            )
        mods = tuple(
            m if isinstance(m, Modulation) else Modulation.from_label(m)
            for m in self.modulations
        )
        if len(mods) != self.k:
            raise ConfigurationError(
                f"field 'modulations': expected {self.k} labels, got {len(mods)}"
            )
        if not 0.0 <= float(self.alpha) <= 1.0:
            raise ConfigurationError(
                f"field 'alpha': must lie in [0, 1], got {self.alpha}"
            )
        if self.p <= 0:
            raise ConfigurationError(f"field 'p': must be positive, got {self.p}")
        r2 = self.r2 if isinstance(self.r2, Fraction) else Fraction(str(self.r2))
        if not 0 <= r2 <= 1:
            raise ConfigurationError(f"field 'r2': code rate must lie in [0, 1], got {r2}")
        gains.setflags(write=False)
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "modulations", mods)
        object.__setattr__(self, "r2", r2)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "p", float(self.p))

    @property
    def lambdas_db(self) -> np.ndarray:
        """Recover lambda_2..lambda_K in dB from the gain magnitudes."""
        return -20.0 * np.log10(np.abs(self.gains[1:])) + 0.0  # +0.0 clears -0.0

    def constellation(self, user: int):
        """Constellation of `user` (0-based)."""
        return make_constellation(self.modulations[user])

    def with_phase_shift(self, phase_rad: float) -> "Scenario":
        """Copy of the scenario with user 2's gain rotated by `phase_rad`."""
        if self.k < 2:
            raise ConfigurationError("phase shift needs at least two users")
        gains = np.array(self.gains)
        gains[1] = gains[1] * np.exp(1j * phase_rad)
        return replace(self, gains=gains)

    def with_alpha(self, alpha: float) -> "Scenario":
        return replace(self, alpha=alpha)

    def with_r2(self, r2: Fraction) -> "Scenario":
        return replace(self, r2=r2)


def from_lambdas(
    lambdas_db: Sequence[float],
    modulations: Sequence,
    phases_deg: Optional[Sequence[float]] = None,
    p: float = 1.0,
    r2=DEFAULT_R2,
    alpha: float = DEFAULT_ALPHA,
    r2_bits_override: Optional[float] = None,
    phases_random: bool = False,
) -> Scenario:
    """Build a Scenario from a power profile and per-interferer phases (deg)."""
    profile = PowerProfile(tuple(lambdas_db))
    mags = profile.gain_magnitudes()
    k = len(mags)
    if phases_deg is None:
        phases_deg = [0.0] * (k - 1)
    if len(phases_deg) != k - 1:
        raise ConfigurationError(
            f"field 'phases_deg': expected {k - 1} values, got {len(phases_deg)}"
        )
    phases = np.concatenate([[0.0], np.deg2rad(np.asarray(phases_deg, dtype=float))])
    gains = mags * np.exp(1j * phases)
    return Scenario(
        k=k,
        gains=gains,
        modulations=tuple(modulations),
        p=p,
        r2=r2,
        alpha=alpha,
        r2_bits_override=r2_bits_override,
        phases_random=phases_random,
    )


def builtin_case(n: int) -> Scenario:
    """One of the three builtin 6-user power profiles with the standard
    modulation assignment (users 1-2 QPSK; 3, 4, 6 8PSK; 5 16APSK)."""
    if n not in BUILTIN_LAMBDAS_DB:
        raise ConfigurationError(f"builtin case must be one of {sorted(BUILTIN_LAMBDAS_DB)}, got {n}")
    return from_lambdas(BUILTIN_LAMBDAS_DB[n], BUILTIN_MODULATIONS)


def interferer_rate_bits(s: Scenario) -> float:
    """R_2 = r2 * log2(M_2), the fixed rate of the strongest interferer."""
    if s.r2_bits_override is not None:
        return float(s.r2_bits_override)
    if s.k < 2:
        raise ConfigurationError("interferer rate needs at least two users")
    c2 = s.constellation(1)
    if not c2.is_discrete:
        raise ConfigurationError(
            "field 'r2_bits': user 2 is Gaussian; give the rate in bits explicitly"
        )
    return float(s.r2) * c2.bits


def apply_random_phases(s: Scenario, seed: int) -> Scenario:
    """Resolve the 'random' phase mode: draw interferer phases from `seed`.

    Magnitudes are untouched; the reference phase stays 0. Deterministic
    for a fixed seed.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), 0x9E3779B9])))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=s.k - 1)
    gains = np.array(s.gains)
    gains[1:] = np.abs(gains[1:]) * np.exp(1j * phases)
    return replace(s, gains=gains, phases_random=False)


# ---------------------------------------------------------------------------
# scenario file parsing
# ---------------------------------------------------------------------------

def _parse_floats(field_name: str, raw: str):
    raw = raw.strip()
    if raw.lower() in ("", "none"):
        return []
    try:
        return [float(tok) for tok in raw.split(",")]
    except ValueError:
        raise ConfigurationError(f"field '{field_name}': cannot parse {raw!r} as numbers") from None


def _parse_fraction(field_name: str, raw: str) -> Fraction:
    try:
        return Fraction(raw.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigurationError(
            f"field '{field_name}': cannot parse {raw!r} as a rate (use e.g. 3/5 or 0.6)"
        ) from None


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file (grammar in the module docstring)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read scenario file {path}: {exc}") from None

    entries = {}
    for lineno, line in enumerate(lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigurationError(
                f"{path}:{lineno}: expected 'key = value', got {stripped!r}"
            )
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key in entries:
            raise ConfigurationError(f"{path}:{lineno}: duplicate field '{key}'")
        entries[key] = value

    known = {"k", "lambdas_db", "phases_deg", "modulations", "r2", "r2_bits", "alpha", "p"}
    for key in entries:
        if key not in known:
            raise ConfigurationError(f"field '{key}': unknown scenario key")
    for required in ("k", "modulations"):
        if required not in entries:
            raise ConfigurationError(f"field '{required}': missing from scenario file")

    try:
        k = int(entries["k"])
    except ValueError:
        raise ConfigurationError(f"field 'k': expected an integer, got {entries['k']!r}") from None

    if k >= 2 and "lambdas_db" not in entries:
        raise ConfigurationError("field 'lambdas_db': missing from scenario file")
    lambdas = _parse_floats("lambdas_db", entries.get("lambdas_db", ""))
    if len(lambdas) != k - 1:
        raise ConfigurationError(
            f"field 'lambdas_db': expected {k - 1} values for k={k}, got {len(lambdas)}"
        )

    phases_random = False
    phases = None
    if "phases_deg" in entries:
        raw = entries["phases_deg"].strip().lower()
        if raw == "random":
            phases_random = True
        else:
            phases = _parse_floats("phases_deg", entries["phases_deg"])

    modulations = [tok.strip() for tok in entries["modulations"].split(",")]
    if len(modulations) != k:
        raise ConfigurationError(
            f"field 'modulations': expected {k} labels for k={k}, got {len(modulations)}"
        )

    r2 = _parse_fraction("r2", entries["r2"]) if "r2" in entries else DEFAULT_R2
    r2_bits = float(entries["r2_bits"]) if "r2_bits" in entries else None
    try:
        alpha = float(entries.get("alpha", DEFAULT_ALPHA))
    except ValueError:
        raise ConfigurationError(
            f"field 'alpha': expected a number, got {entries['alpha']!r}"
        ) from None
    p = float(entries.get("p", 1.0))

    return from_lambdas(
        lambdas,
        modulations,
        phases_deg=phases,
        p=p,
        r2=r2,
        alpha=alpha,
        r2_bits_override=r2_bits,
        phases_random=phases_random,
    )
