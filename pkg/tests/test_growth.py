import cmath
import math

import pytest

from qsum.growth import (check_growth_bound, fit_coeff_bound, fit_growth,
                         truncated_entire_eval)

Q = 2.0


def theta_type_coeffs(n=80, scale=1.0, H=1.0):
    return [scale * H ** k * Q ** (-k * (k - 1) / 2.0) for k in range(n)]


def log_spaced(lo, hi, count):
    return [10.0 ** (math.log10(lo) + (math.log10(hi) - math.log10(lo)) * i / (count - 1))
            for i in range(count)]


def test_fit_coeff_bound_definitional():
    fit = fit_coeff_bound(theta_type_coeffs(), Q)
    assert fit.A == pytest.approx(1.0) and fit.H == pytest.approx(1.0)
    assert not fit.diverging and fit.holds(theta_type_coeffs(), Q)


def test_fit_coeff_bound_h3():
    coeffs = [(-1) ** n * 3.0 ** n * Q ** (-n * (n - 1) / 2.0) for n in range(40)]
    fit = fit_coeff_bound(coeffs, Q)
    assert fit.H == pytest.approx(3.0, rel=1e-9)
    assert not fit.diverging and fit.holds(coeffs, Q)


def test_fit_coeff_bound_divergent_data():
    # alternating units are not coefficients of a theta-type entire function:
    # the envelope sequence climbs without bound
    fit = fit_coeff_bound([(-1.0) ** k for k in range(40)], Q)
    assert fit.diverging


def test_fit_coeff_bound_envelope_monotone():
    coeffs = theta_type_coeffs(50, scale=2.0, H=1.7)
    fit = fit_coeff_bound(coeffs, Q)
    loose_ok = True
    lnq = math.log(Q)
    for n, a in enumerate(coeffs):
        if a == 0:
            continue
        bound = math.log(fit.A) + n * math.log(fit.H * 1.5) - n * (n - 1) / 2.0 * lnq
        loose_ok &= math.log(abs(a)) <= bound + 1e-9
    assert fit.holds(coeffs, Q) and loose_ok  # enlarging H never invalidates


def test_growth_check_theta_type():
    ev = truncated_entire_eval(theta_type_coeffs())
    fit = fit_growth(ev, Q, log_spaced(1.0, 1e3, 16))
    assert fit.alpha == pytest.approx(0.5, abs=0.1)
    rep = check_growth_bound(ev, Q, fit.M, fit.alpha, log_spaced(1e-2, 1e3, 21))
    assert rep.passed


def test_growth_check_constant():
    rep = check_growth_bound(lambda t: 7.0, Q, 7.0, 0.0, log_spaced(1e-2, 1e2, 9))
    assert rep.passed  # the quadratic term only adds slack


def test_growth_check_exponential_fails():
    # exp(t) beats exp(c (log t)^2) at large |t|
    rep = check_growth_bound(lambda t: cmath.exp(t), Q, 10.0, 0.5, [200.0])
    assert not rep.passed


def test_fit_growth_homogeneity():
    ev = truncated_entire_eval(theta_type_coeffs())
    samples = log_spaced(1.0, 1e3, 12)
    base = fit_growth(ev, Q, samples)
    scaled = fit_growth(lambda t: 10.0 * ev(t), Q, samples)
    assert scaled.M == pytest.approx(10.0 * base.M, rel=1e-9)
    assert scaled.alpha == pytest.approx(base.alpha, abs=1e-9)


def test_fit_growth_constant():
    fit = fit_growth(lambda t: 7.0, Q, log_spaced(0.5, 50.0, 9))
    assert fit.M >= 7.0
    assert check_growth_bound(lambda t: 7.0, Q, fit.M, fit.alpha,
                              log_spaced(0.5, 50.0, 9)).passed


def test_fit_growth_degenerate_spread():
    with pytest.raises(ValueError):
        fit_growth(lambda t: 1.0, Q, [2.0, 2.0, 2.0])


def test_round_trip_equivalence_small_corpus():
    # coefficient bound -> growth bound -> coefficient bound, five functions
    corpus = [
        theta_type_coeffs(60),
        theta_type_coeffs(60, scale=3.0, H=0.5),
        theta_type_coeffs(60, scale=0.2, H=2.0),
        [c * (-1) ** k for k, c in enumerate(theta_type_coeffs(60, H=1.2))],
        [c * 1j ** k for k, c in enumerate(theta_type_coeffs(60, H=0.8))],
    ]
    for coeffs in corpus:
        cb = fit_coeff_bound(coeffs, Q)
        assert not cb.diverging
        ev = truncated_entire_eval(coeffs)
        fit_samples = log_spaced(0.1, 1e3, 20)
        gb = fit_growth(ev, Q, fit_samples)
        # exact envelope property on the fitted samples
        assert check_growth_bound(ev, Q, gb.M, gb.alpha, fit_samples).passed
        # between samples the q-periodic wobble needs a little headroom
        assert check_growth_bound(ev, Q, 1.1 * gb.M, gb.alpha, log_spaced(0.1, 1e3, 41)).passed
        back = fit_coeff_bound(coeffs, Q)
        assert math.isfinite(back.A) and math.isfinite(back.H)
