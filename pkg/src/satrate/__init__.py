"""Achievable information rates for multibeam satellite forward links.

Library + CLI for comparing single-user detection, two-user detection and
cooperative time-division transmission for a reference user under strong
co-channel interference, via Monte-Carlo mismatched-decoding rate bounds
and closed-form Gaussian references.
"""

from .constellations import (
    Constellation,
    Modulation,
    make_constellation,
    draw_symbol,
    draw_symbols,
    rotational_symmetry_order,
)
from .scenario import (
    PowerProfile,
    Scenario,
    builtin_case,
    from_lambdas,
    interferer_rate_bits,
    load_scenario,
)
from .channel import (
    ChannelBlock,
    ChannelDraw,
    first_draws,
    residual_interference_power,
    sample_channel,
)
from .estimators import (
    AuxModel,
    MiEstimate,
    Mud2Estimates,
    RateQuad,
    estimate_all,
    estimate_is_mud,
    estimate_quad,
    estimate_sud,
    mi_oracle_awgn,
)
from .rate_theory import (
    CutoffResult,
    Lemma1Result,
    Regime,
    find_cutoff_snr,
    lemma1_rate,
    theorem1_rate,
)
from .gaussian import (
    GaussRegime,
    GaussianCurve,
    GaussianExampleResult,
    capacity,
    gaussian_curve,
    gaussian_rate,
    mc_gaussian_quad,
    regime_boundaries,
)
from .strategy2 import (
    PhaseSearchResult,
    joint_rate_at_phase,
    optimize_phase,
    pair_symmetry_period,
    scenario2_rate,
)
from .sweep import (
    RateCurvePoint,
    SweepConfig,
    derive_seed,
    run_sweep,
)

__version__ = "0.1.0"
