import cmath
import math
import random

import pytest

from qsum.errors import PoleProximityError
from qsum.qborel import borel_transform, borel_transformed_equation, continue_spiral
from qsum.qlaplace import (SpiralGeometry, asymptotic_check, q_laplace,
                           residual_check, theta, zone_membership)
from qsum.scaled import QScaled

Q = 2.0

# value of theta(1) for q=2, pinned on the first verified run against the
# symmetric direct sum
THETA_ONE_Q2 = 3.2832651213103077


def direct_theta(x, q, nrange=60):
    return sum(q ** (-n * (n - 1) / 2.0) * x ** n for n in range(-nrange, nrange + 1))


def test_theta_functional_equation():
    rng = random.Random(42)
    worst = 0.0
    for _ in range(100):
        x = cmath.rect(math.exp(rng.uniform(-3.0, 3.0)), rng.uniform(-math.pi, math.pi))
        lhs = theta(Q * x, Q)
        rhs = QScaled(Q, Q * x) * theta(x, Q)
        worst = max(worst, abs((lhs / rhs).to_complex() - 1.0))
    assert worst <= 1e-12


def test_theta_zero_set():
    for k in range(-3, 4):
        z = theta(-Q ** k, Q)
        ref = theta(Q ** k, Q)
        assert math.exp(z.log_abs() - ref.log_abs()) <= 1e-10


def test_theta_regression_value():
    got = theta(1.0, Q).to_complex()
    assert got == pytest.approx(THETA_ONE_Q2, rel=1e-15)
    assert got == pytest.approx(direct_theta(1.0, Q), rel=1e-15)


def test_theta_rejects_origin():
    with pytest.raises(ValueError):
        theta(0.0, Q)


def test_theta_extreme_argument_magnitudes():
    # theta value far beyond double range; checked through the functional eq
    big = theta(2.0 ** 40, Q)
    ref = theta(2.0 ** 39, Q)
    expect = QScaled(Q, 1.0, 40.0) * ref  # q x theta(x) with x = 2^39
    assert abs((big / expect).to_complex() - 1.0) <= 1e-12
    assert big.logq_abs() > 700  # not representable unscaled


def test_zone_membership_examples():
    g = SpiralGeometry(1.0, 0.3, Q)
    inside = zone_membership(g, -1.0)
    assert inside.kind == "inside" and inside.m == 0
    assert zone_membership(g, 1.0).outside
    assert zone_membership(g, 1j).outside
    assert g.disjointness_threshold() == pytest.approx(1.0 / 3.0)


def test_zone_near_boundary_band():
    g = SpiralGeometry(1.0, 0.3, Q)
    # just outside the disk |1 + 1/t| = 0.3: nudge epsilon*1.05
    t = -1.0 / (1.0 + 0.3 * 1.05)
    assert zone_membership(g, t).kind == "near-boundary"


def test_kernel_inversion_identity():
    lam, t = 1.0, 0.3
    base = math.log(abs(lam)) / math.log(Q)
    for n in range(0, 9):
        acc = QScaled.zero(Q)
        for m in range(-60, 61):
            th = theta(lam * Q ** m / t, Q)
            num = QScaled.from_polar(Q, n * (base + m), 0.0)
            acc = acc + num / th
        want = QScaled(Q, t ** n, n * (n - 1) / 2.0)
        assert abs((acc / want).to_complex() - 1.0) <= 1e-7


def test_q_laplace_euler_value_and_rejection(euler_grid):
    w = q_laplace(euler_grid, 0.1)
    assert abs(w - 0.9150287008940956) <= 1e-9  # regression, cross-run stable
    with pytest.raises(PoleProximityError):
        q_laplace(euler_grid, -0.125)  # on the pole spiral


def test_q_laplace_zero_grid(euler_grid):
    from qsum.qborel import ScaledSeries, SpiralGrid
    from qsum.series import TruncatedSeries
    zero = ScaledSeries(TruncatedSeries.zero(0, 1, 1), 0.0)
    g = SpiralGrid(1.0, Q, -30, 10, 0, {m: zero for m in range(-30, 11)}, math.pi, 1.0, 0)
    assert q_laplace(g, 0.07) == 0


def test_q_laplace_representative_invariance(euler_eq, euler_sol):
    # lambda and lambda*q describe the same spiral: W may differ only by
    # the index bookkeeping, not by value
    u = borel_transform(euler_sol)
    beq = borel_transformed_equation(euler_eq, 0)
    g1 = continue_spiral(beq, u, 1.0, 40)
    g2 = continue_spiral(beq, u, 2.0, 40)
    for t in (0.08, 0.1 * cmath.exp(0.4j)):
        a = q_laplace(g1, t)
        b = q_laplace(g2, t)
        assert abs(a - b) <= 1e-9 * abs(a)


def test_q_laplace_pole_blowup(euler_grid):
    # approaching the pole at t = -1 radially: |W| must keep growing
    vals = []
    for delta in (1e-1, 1e-2, 1e-3):
        t = -(1.0 + delta)
        vals.append(abs(q_laplace(euler_grid, t, epsilon=2e-4)))
    assert vals[2] > vals[1] > vals[0]


def test_residual_euler(euler_eq, euler_grid):
    samples = [r * cmath.exp(1j * math.pi / 4) for r in (0.05, 0.1, 0.15)]
    rep = residual_check(euler_eq, euler_grid, samples)
    assert not rep.rejected
    assert rep.max_absolute <= 1e-6


def test_residual_zero_grid_homogeneous(euler_eq, euler_grid):
    from qsum.qborel import ScaledSeries, SpiralGrid
    from qsum.series import TruncatedSeries
    zero = ScaledSeries(TruncatedSeries.zero(0, 1, 1), 0.0)
    g = SpiralGrid(1.0, Q, -40, 10, 0, {m: zero for m in range(-40, 11)}, math.pi, 1.0, 0)
    hom = euler_eq.with_rhs(TruncatedSeries.zero(0, euler_eq.Kt, euler_eq.Kz))
    rep = residual_check(hom, g, [0.05 + 0.05j])
    assert rep.max_absolute == 0.0


def test_residual_example2(ex2_eq, ex2_parts):
    samples = []
    for ang in (math.pi / 4, -math.pi / 4, math.pi / 2, 3 * math.pi / 4, 0.0):
        for r in (0.05, 0.1):
            samples.append(r * cmath.exp(1j * ang))
    rep = residual_check(ex2_eq, ex2_parts["grid"], samples)
    assert len(rep.samples) == 10 and not rep.rejected
    assert rep.max_absolute <= 1e-5


def test_asymptotic_euler_pass(euler_sol, euler_grid):
    rep = asymptotic_check(euler_sol, euler_grid, 0.3, 12)
    assert rep.passed
    assert rep.M > 0 and math.isfinite(rep.H)
    # every tabulated remainder satisfies the fitted envelope
    lnq = math.log(Q)
    for N in range(0, 13):
        for t, e in zip(rep.samples, rep.EN[N]):
            bound = (math.log(rep.M) + N * math.log(rep.H) - math.log(rep.epsilon)
                     + N * (N - 1) / 2.0 * lnq + N * math.log(abs(t)))
            if e > 0:
                assert math.log(e) <= bound + 1e-9


def test_asymptotic_n0_row_is_w_magnitude(euler_sol, euler_grid):
    rep = asymptotic_check(euler_sol, euler_grid, 0.3, 3)
    for w, e in zip(rep.Wvals, rep.EN[0]):
        assert e == pytest.approx(abs(w))


def test_asymptotic_constant_offset_fails(euler_sol, euler_grid):
    rep = asymptotic_check(euler_sol, euler_grid, 0.3, 12,
                           w_fn=lambda t: q_laplace(euler_grid, t) + 1.0)
    assert not rep.passed
    assert any("order-1" in r for r in rep.reasons)


def test_asymptotic_epsilon_must_be_disjoint(euler_sol, euler_grid):
    with pytest.raises(ValueError):
        asymptotic_check(euler_sol, euler_grid, 0.5, 4)
