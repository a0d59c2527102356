import math
from fractions import Fraction

import numpy as np
import pytest

from satrate import (
    builtin_case,
    from_lambdas,
    interferer_rate_bits,
    load_scenario,
)
from satrate.errors import ConfigurationError
from satrate.scenario import PowerProfile, apply_random_phases


TABLE = {
    1: (0.0, 25.0, 25.0, 27.0, 30.0),
    2: (2.0, 26.0, 26.0, 27.0, 30.0),
    3: (4.0, 27.0, 26.0, 27.0, 30.0),
}


@pytest.mark.parametrize("case", (1, 2, 3))
def test_builtin_profiles(case):
    s = builtin_case(case)
    assert s.k == 6
    assert np.allclose(s.lambdas_db, TABLE[case], atol=1e-12)
    assert [m.value for m in s.modulations] == [
        "qpsk", "qpsk", "8psk", "8psk", "16apsk", "8psk",
    ]
    assert abs(abs(s.gains[0]) - 1.0) < 1e-15


def test_builtin_case_out_of_range():
    with pytest.raises(ConfigurationError):
        builtin_case(4)


def test_case1_gain_magnitudes():
    s = builtin_case(1)
    assert abs(abs(s.gains[1]) - 1.0) < 1e-12
    assert abs(abs(s.gains[5]) - 10 ** (-1.5)) < 1e-9
    assert abs(abs(s.gains[5]) - 0.03162) < 5e-6


def test_case3_strongest_interferer_power():
    s = builtin_case(3)
    assert abs(abs(s.gains[1]) ** 2 - 10 ** (-0.4)) < 1e-12
    assert abs(abs(s.gains[1]) ** 2 - 0.3981) < 1e-4


def test_lambda_round_trip():
    lambdas = (0.7, 25.3, 24.9, 27.0, 30.01)
    s = from_lambdas(lambdas, ["qpsk"] * 6)
    assert np.max(np.abs(s.lambdas_db - np.asarray(lambdas))) < 1e-12


def test_equal_power_two_user_with_phase(tmp_path):
    path = tmp_path / "two.scn"
    path.write_text(
        "k = 2\nlambdas_db = 0\nphases_deg = 90\nmodulations = qpsk, qpsk\nr2 = 3/5\nalpha = 0.5\n"
    )
    s = load_scenario(path)
    assert s.k == 2
    assert abs(s.gains[0] - 1.0) < 1e-12
    assert abs(s.gains[1] - np.exp(1j * np.pi / 2)) < 1e-12


def test_load_scenario_case1_equivalent(tmp_path):
    path = tmp_path / "case1.scn"
    path.write_text(
        "# case 1 profile\n"
        "k = 6\n"
        "lambdas_db = 0, 25, 25, 27, 30\n"
        "modulations = qpsk, qpsk, 8psk, 8psk, 16apsk, 8psk\n"
        "r2 = 3/5\n"
        "alpha = 0.5\n"
    )
    s = load_scenario(path)
    ref = builtin_case(1)
    assert np.allclose(s.gains, ref.gains)
    assert s.modulations == ref.modulations


@pytest.mark.parametrize(
    "content,field",
    [
        ("k = 2\nmodulations = qpsk, qpsk\n", "lambdas_db"),
        ("k = 2\nlambdas_db = -3\nmodulations = qpsk, qpsk\n", "lambdas_db"),
        ("k = 2\nlambdas_db = 0\nmodulations = qpsk, 64qam\n", "modulation"),
        ("k = 2\nlambdas_db = 0\nmodulations = qpsk, qpsk\nalpha = 1.5\n", "alpha"),
        ("k = 2\nlambdas_db = 0\nmodulations = qpsk\n", "modulations"),
        ("k = 2\nlambdas_db = 0\nmodulations = qpsk, qpsk\nbogus = 1\n", "bogus"),
    ],
)
def test_load_scenario_errors_name_field(tmp_path, content, field):
    path = tmp_path / "bad.scn"
    path.write_text(content)
    with pytest.raises(ConfigurationError, match=field):
        load_scenario(path)


def test_missing_file():
    with pytest.raises(ConfigurationError):
        load_scenario("/nonexistent/scenario.scn")


def test_lambda2_must_be_smallest():
    with pytest.raises(ConfigurationError, match="lambda_2"):
        PowerProfile((10.0, 5.0))
    # Table-1-like non-monotonicity beyond user 2 is fine (27 > 26)
    PowerProfile((4.0, 27.0, 26.0, 27.0, 30.0))


def test_interferer_rate_bits():
    s = builtin_case(1)
    assert math.isclose(interferer_rate_bits(s.with_r2(Fraction(3, 5))), 1.2)
    assert math.isclose(interferer_rate_bits(s.with_r2(Fraction(8, 9))), 16.0 / 9.0)
    assert abs(interferer_rate_bits(s.with_r2(Fraction(8, 9))) - 1.778) < 1e-3


def test_interferer_rate_gaussian_needs_override():
    s = from_lambdas([0.0], ["gaussian", "gaussian"], r2=Fraction(1, 2))
    with pytest.raises(ConfigurationError, match="r2_bits"):
        interferer_rate_bits(s)
    s2 = from_lambdas([0.0], ["gaussian", "gaussian"], r2_bits_override=0.5)
    assert interferer_rate_bits(s2) == 0.5


def test_k1_scenario_supported():
    s = from_lambdas([], ["qpsk"])
    assert s.k == 1
    assert s.gains.shape == (1,)


def test_random_phases_mode(tmp_path):
    path = tmp_path / "rand.scn"
    path.write_text(
        "k = 3\nlambdas_db = 0, 20\nphases_deg = random\nmodulations = qpsk, qpsk, 8psk\n"
    )
    s = load_scenario(path)
    assert s.phases_random
    r1 = apply_random_phases(s, seed=99)
    r2 = apply_random_phases(s, seed=99)
    r3 = apply_random_phases(s, seed=100)
    assert np.allclose(r1.gains, r2.gains)
    assert not np.allclose(r1.gains, r3.gains)
    assert np.allclose(np.abs(r1.gains), np.abs(s.gains))
    assert not r1.phases_random


def test_alpha_validation():
    with pytest.raises(ConfigurationError, match="alpha"):
        from_lambdas([0.0], ["qpsk", "qpsk"], alpha=-0.1)


def test_scenario_immutable():
    s = builtin_case(1)
    with pytest.raises(ValueError):
        s.gains[0] = 2.0
