import math

import numpy as np
import pytest

from depreg.covariance import fgn_autocovariance
from depreg.errors import InputError, NumericalError
from depreg.hurst import fgn_spectral_density, periodogram, sample_acf, whittle_estimate
from depreg.processes import simulate_fgn


def direct_dft_periodogram(x):
    n = x.size
    z = x - x.mean()
    t = np.arange(1, n + 1)
    out = []
    for j in range(1, (n - 1) // 2 + 1):
        lam = 2 * math.pi * j / n
        s = np.sum(z * np.exp(-1j * t * lam))
        out.append(abs(s) ** 2 / (2 * math.pi * n))
    return np.array(out)


def test_periodogram_constant():
    np.testing.assert_allclose(periodogram(np.full(20, 4.2)).ordinates, 0.0, atol=1e-25)


def test_periodogram_too_short():
    with pytest.raises(InputError):
        periodogram(np.arange(7.0))


@pytest.mark.parametrize("n,k", [(64, 5), (101, 17)])
def test_periodogram_cosine(n, k):
    t = np.arange(1, n + 1)
    x = np.cos(2 * math.pi * k / n * t)
    pg = periodogram(x)
    assert pg.ordinates[k - 1] == pytest.approx(n / (8 * math.pi), rel=1e-10)
    others = np.delete(pg.ordinates, k - 1)
    assert np.max(others) < 1e-20
    np.testing.assert_allclose(pg.ordinates, direct_dft_periodogram(x), atol=1e-10)


@pytest.mark.parametrize("n", [57, 200])
def test_periodogram_parseval(n):
    x = np.random.default_rng(n).standard_normal(n)
    pg = periodogram(x)
    np.testing.assert_allclose(pg.ordinates, direct_dft_periodogram(x), rtol=1e-9)
    lhs = 2 * math.pi / n * 2 * pg.ordinates.sum()
    if n % 2:
        assert lhs == pytest.approx(x.var(), rel=1e-12)
    else:
        # even n: the Nyquist ordinate is excluded
        nyq = abs(np.sum((x - x.mean()) * (-1.0) ** np.arange(n))) ** 2 / n**2
        assert lhs + nyq == pytest.approx(x.var(), rel=1e-12)


def test_spectral_density_flat_at_half():
    g = fgn_spectral_density(0.5, np.array([0.1, 1.0, 3.0]))
    np.testing.assert_allclose(g / g[0], 1.0, rtol=1e-3)


def test_spectral_density_low_frequency_power_laws():
    g7 = fgn_spectral_density(0.7, np.array([0.01, 0.02]))
    assert g7[0] / g7[1] == pytest.approx(2**0.4, rel=0.02)
    g2 = fgn_spectral_density(0.2, np.array([0.001, 0.002]))
    assert g2[1] / g2[0] == pytest.approx(2**0.6, rel=0.02)
    assert fgn_spectral_density(0.2, 1e-6) < fgn_spectral_density(0.2, 1e-3)
    # leading term lam**(1 - 2H) holds without cancellation at tiny frequencies
    for lam in (1e-14, 1e-9):
        assert fgn_spectral_density(0.7, lam) * lam**0.4 == pytest.approx(1.0, rel=1e-6)


def fourier_coefficient(H, k):
    """2 * int_0^pi g(l) cos(k l) dl, split at 1e-3 and integrated in log scale near zero."""
    from scipy.integrate import quad

    f = lambda lam: fgn_spectral_density(H, lam) * math.cos(k * lam)
    low = quad(lambda t: f(math.exp(t)) * math.exp(t), math.log(1e-14), math.log(1e-3), limit=200)[0]
    high = quad(f, 1e-3, math.pi, limit=200)[0]
    return 2 * (low + high)


def test_spectral_density_matches_autocovariances():
    H = 0.7
    c0 = fourier_coefficient(H, 0)
    for k in (1, 2, 5):
        assert fourier_coefficient(H, k) / c0 == pytest.approx(fgn_autocovariance(H, 1.0, k), rel=2e-3)


def test_spectral_density_truncation_accuracy():
    lam = np.linspace(0.01, math.pi, 50)
    for H in (0.05, 0.5, 0.95):
        ref = fgn_spectral_density(H, lam, n_alias=3000)
        np.testing.assert_allclose(fgn_spectral_density(H, lam), ref, rtol=1e-6)


def test_spectral_density_domain():
    with pytest.raises(InputError):
        fgn_spectral_density(0.7, 0.0)
    with pytest.raises(InputError):
        fgn_spectral_density(0.7, 4.0)
    with pytest.raises(InputError):
        fgn_spectral_density(1.2, 1.0)


@pytest.mark.parametrize("H", [0.2, 0.5, 0.7])
def test_whittle_recovers_hurst(H):
    est = [whittle_estimate(simulate_fgn(5000, H, 1.0, seed=1000 + i)).H_hat for i in range(20)]
    assert abs(np.median(est) - H) <= 0.05


def test_whittle_affine_invariance():
    x = simulate_fgn(2048, 0.7, 1.0, seed=5)
    base = whittle_estimate(x)
    for a, b in [(3.0, 10.0), (-0.01, 2.0), (1e4, -5e3)]:
        assert whittle_estimate(a * x + b).H_hat == pytest.approx(base.H_hat, abs=1e-6)
    assert whittle_estimate(3.0 * x).scale_hat == pytest.approx(9 * base.scale_hat, rel=1e-8)


def test_whittle_truncation_stability():
    for seed, H in [(1, 0.2), (2, 0.7), (3, 0.9)]:
        x = simulate_fgn(2000, H, 1.0, seed=seed)
        a = whittle_estimate(x).H_hat
        b = whittle_estimate(x, n_alias=400).H_hat
        assert abs(a - b) < 1e-3


def test_whittle_fit_fields():
    fit = whittle_estimate(simulate_fgn(1000, 0.3, 2.0, seed=9))
    lo, hi = fit.bracket
    assert lo <= fit.H_hat <= hi
    assert not fit.boundary
    assert fit.scale_hat > 0


def test_whittle_errors():
    with pytest.raises(NumericalError):
        whittle_estimate(np.ones(100))
    with pytest.raises(InputError):
        whittle_estimate(np.arange(63.0))


def test_sample_acf_basic():
    x = np.random.default_rng(0).standard_normal(5000)
    acf = sample_acf(x, 5)
    assert acf[0] == 1.0
    assert abs(acf[1]) <= 2 / math.sqrt(5000)
    alt = (-1.0) ** np.arange(1000)
    assert sample_acf(alt, 1)[1] == pytest.approx(-1.0, abs=2e-3)
    with pytest.raises(NumericalError):
        sample_acf(np.zeros(10), 2)
    with pytest.raises(InputError):
        sample_acf(x[:10], 10)


def test_sample_acf_fgn_lag_one():
    target = fgn_autocovariance(0.3, 1.0, 1)
    vals = np.array([sample_acf(simulate_fgn(1000, 0.3, 1.0, seed=s), 1)[1] for s in range(200)])
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    # mean correction biases the lag-1 value by O(1/n)
    assert abs(vals.mean() - target) < 3 * se + 2e-3
