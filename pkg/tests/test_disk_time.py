import math

import numpy as np

from bmx.disk_time import get_sampler, sample_unit_disk_time
from bmx.rng import RngStream

# Pins the table build bit for bit in this environment; a change in the
# underlying special functions or knot layout must be noticed, not absorbed.
TABLE_SHA256 = "0f61af0f1d0467646a190c9fdec9abbcf6cfd0b1d43bf52409c011b2c2d1dcc6"


def test_series_mean_is_half():
    # E[T] = sum c_k / rate_k telescopes to 1/2 (50-term truncation).
    assert abs(get_sampler().mean_from_series() - 0.5) < 1e-4


def test_sample_mean_matches_classical_value():
    gen = RngStream(31).generator()
    t = sample_unit_disk_time(gen, 100_000)
    assert abs(t.mean() - 0.5) < 0.01


def test_ppf_cdf_roundtrip():
    s = get_sampler()
    u = np.array([1e-3, 0.01, 0.1, 0.5, 0.9, 0.99, 0.9999])
    t = s.ppf(u)
    assert np.all(np.diff(t) > 0)
    assert np.max(np.abs(s.cdf(t) - u)) < 1e-9


def test_tails_are_positive_and_ordered():
    s = get_sampler()
    t_left = s.ppf(np.array([1e-8]))[0]
    t_right = s.ppf(np.array([1.0 - 1e-9]))[0]
    assert 0 < t_left < 0.05
    assert t_right > 3.0
    # Analytic right tail inverts the single-term survival exactly.
    u = 1.0 - 1e-9
    expected = math.log(s._coeffs[0] / (1 - u)) / s._rates[0]
    assert math.isclose(t_right, expected, rel_tol=1e-12)


def test_survival_is_monotone():
    s = get_sampler()
    t = np.linspace(0.05, 8.0, 500)
    surv = s.survival(t)
    assert np.all(np.diff(surv) <= 1e-15)
    assert surv[0] > 0.999
    assert surv[-1] < 1e-9


def test_table_checksum_pinned():
    assert get_sampler().table_checksum() == TABLE_SHA256
