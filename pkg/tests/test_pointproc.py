import math

import numpy as np
import pytest
from scipy import stats

from hybrid_d2d.pointproc import (
    RadialPattern,
    kostlan_truncation,
    sample_alpha_gpp_radii,
    sample_ginibre_radii,
    sample_ppp_radii,
    superposition_order,
    thin,
)

MEAN_COUNT = math.pi * 0.02 * 100.0**2  # 628.3


def counts(sampler, n, seed):
    rng = np.random.default_rng(seed)
    return np.array([sampler(rng).count for _ in range(n)])


def within_3se(x, target):
    return abs(x.mean() - target) <= 3 * x.std(ddof=1) / math.sqrt(x.size) + 1e-12


def test_ginibre_mean_count():
    c = counts(lambda r: sample_ginibre_radii(0.02, 100.0, r), 10_000, 1)
    assert within_3se(c, MEAN_COUNT)


def test_first_kostlan_modulus_mean():
    rng = np.random.default_rng(2)
    first = np.array([sample_ginibre_radii(0.02, 100.0, rng).radii[0] ** 2 for _ in range(10_000)])
    assert within_3se(first, 1.0 / (math.pi * 0.02))
    assert 1.0 / (math.pi * 0.02) == pytest.approx(15.915, abs=1e-3)


def test_tiny_window_is_empty():
    c = counts(lambda r: sample_ginibre_radii(0.02, 0.01, r), 1000, 3)
    assert np.all(c == 0)


def test_truncation_tail_is_negligible():
    u = math.pi * 0.02 * 100.0**2
    K = kostlan_truncation(0.02, 100.0)
    # probability that modulus K+1 (and beyond) lands inside the disk
    assert stats.gamma.cdf(u, K + 1) < 1e-8


def test_alpha_one_matches_ginibre():
    a = sample_alpha_gpp_radii(0.02, 1.0, 100.0, np.random.default_rng(5))
    b = sample_ginibre_radii(0.02, 100.0, np.random.default_rng(5))
    np.testing.assert_array_equal(a.radii, b.radii)

    ra, rb = np.random.default_rng(6), np.random.default_rng(7)
    near_a = [sample_alpha_gpp_radii(0.02, 1.0, 100.0, ra).radii.min() for _ in range(10_000)]
    near_b = [sample_ginibre_radii(0.02, 100.0, rb).radii.min() for _ in range(10_000)]
    assert stats.ks_2samp(near_a, near_b).pvalue > 0.01


def test_alpha_half_preserves_intensity():
    c = counts(lambda r: sample_alpha_gpp_radii(0.02, 0.5, 100.0, r), 10_000, 8)
    assert within_3se(c, MEAN_COUNT)


def test_small_alpha_count_fluctuations_approach_poisson():
    # Radial surrogate for the PPP limit: the count variance-to-mean ratio is
    # 1 for a Poisson field and 1 - O(alpha) for an alpha-Ginibre field.
    c = counts(lambda r: sample_alpha_gpp_radii(0.02, 0.01, 30.0, r), 3000, 9)
    ratio = c.var(ddof=1) / c.mean()
    assert within_3se(c, math.pi * 0.02 * 900.0)
    assert 0.9 < ratio < 1.1


def test_repulsion_orders_count_variance():
    def var_and_se(sampler, seed):
        c = counts(sampler, 10_000, seed).astype(float)
        v = c.var(ddof=1)
        se = math.sqrt(max(np.mean((c - c.mean()) ** 4) - v * v, 0.0) / c.size)
        return v, se

    g, g_se = var_and_se(lambda r: sample_ginibre_radii(0.02, 30.0, r), 10)
    h, h_se = var_and_se(lambda r: sample_alpha_gpp_radii(0.02, 0.5, 30.0, r), 11)
    p, p_se = var_and_se(lambda r: sample_ppp_radii(0.02, 30.0, r), 12)
    assert h - g > 3 * math.hypot(g_se, h_se)
    assert p - h > 3 * math.hypot(h_se, p_se)


def test_ppp_moments_and_median_radius():
    rng = np.random.default_rng(13)
    pats = [sample_ppp_radii(0.02, 100.0, rng) for _ in range(10_000)]
    c = np.array([x.count for x in pats])
    assert within_3se(c, MEAN_COUNT)
    assert c.var(ddof=1) == pytest.approx(MEAN_COUNT, rel=0.05)
    radii = np.concatenate([x.radii for x in pats[:200]])
    assert np.median(radii) == pytest.approx(100.0 / math.sqrt(2), rel=0.01)
    assert sample_ppp_radii(0.0, 100.0, rng).count == 0


def test_thinning():
    rng = np.random.default_rng(14)
    base = sample_ginibre_radii(0.02, 100.0, rng)
    assert np.array_equal(thin(base, 1.0, rng).radii, base.radii)
    assert thin(base, 0.0, rng).count == 0
    c = np.array([thin(sample_ppp_radii(0.02, 100.0, rng), 0.5, rng).count for _ in range(10_000)])
    assert within_3se(c, MEAN_COUNT / 2)
    with pytest.raises(ValueError):
        thin(base, 1.5, rng)


def test_thinning_is_nested_for_common_stream():
    base = sample_ginibre_radii(0.02, 100.0, np.random.default_rng(15))
    lo = thin(base, 0.3, np.random.default_rng(16))
    hi = thin(base, 0.7, np.random.default_rng(16))
    assert set(lo.radii) <= set(hi.radii)


@pytest.mark.parametrize("sampler", ["ginibre", "alpha", "ppp"])
def test_radii_in_window_and_deterministic(sampler):
    def draw(seed):
        rng = np.random.default_rng(seed)
        if sampler == "ginibre":
            return sample_ginibre_radii(0.05, 40.0, rng)
        if sampler == "alpha":
            return sample_alpha_gpp_radii(0.05, 0.25, 40.0, rng)
        return sample_ppp_radii(0.05, 40.0, rng)

    a, b = draw(17), draw(17)
    assert np.array_equal(a.radii, b.radii)
    assert np.all((a.radii > 0) & (a.radii <= 40.0))


def test_superposition_order_requires_unit_fraction():
    assert superposition_order(1.0) == 1
    assert superposition_order(0.25) == 4
    with pytest.raises(ValueError):
        superposition_order(0.3)
    with pytest.raises(ValueError):
        superposition_order(0.0)


def test_pattern_validation_and_csv(tmp_path):
    with pytest.raises(ValueError):
        RadialPattern(np.array([0.0, 1.0]), 10.0)
    with pytest.raises(ValueError):
        RadialPattern(np.array([11.0]), 10.0)
    empty = RadialPattern(np.zeros(0), 10.0)
    assert len(empty) == 0
    pat = RadialPattern(np.array([1.5, 2.5]), 10.0)
    pat.to_csv(tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().splitlines() == ["k,radius_m", "0,1.5", "1,2.5"]
    xy = pat.positions(np.random.default_rng(0))
    np.testing.assert_allclose(np.hypot(xy[:, 0], xy[:, 1]), pat.radii)
