"""Jacobi theta kernel, spiral-disk geometry, the discrete q-Laplace
resummation, and the asymptotic-expansion verifier.

The kernel convention is

    theta_q(x) = sum_{n in Z} q^{-n(n-1)/2} x^n,

an entire function on C* with functional equation theta(qx) = qx theta(x)
and zero set exactly -q^Z.  The resummed solution is the kernel-weighted
sum over the continuation grid

    W(t, z) = sum_{m in Z} u*(lambda q^m, z) / theta_q(lambda q^m / t),

whose poles lie on the spiral -lambda q^Z; the monomial inversion
identity sum_m (lambda q^m)^n / theta_q(lambda q^m / t) = q^{n(n-1)/2} t^n
is the internal witness that this convention inverts the Borel transform.
"""

import cmath
import math
from dataclasses import dataclass, field

from .errors import GridTooShortError, PoleProximityError
from .qborel import _ls_slope
from .scaled import QScaled
from .series import TruncatedSeries

THETA_TERM_CUTOFF = 1e-17
KERNEL_TAIL_RTOL = 1e-12


def theta(x, q):
    """theta_q(x) by symmetric truncation around the peak term.

    Terms fall off like q^{-(n-n*)^2/2}; summation stops once they drop
    below 1e-17 of the peak, so the dropped tail is below 1e-15 of the
    peak term.  Near the zeros -q^Z the result is small through
    cancellation and its *relative* accuracy degrades accordingly."""
    x = complex(x)
    if x == 0:
        raise ValueError("theta is undefined at x = 0")
    return _theta_polar(q, math.log(abs(x)) / math.log(q), cmath.phase(x))


def _theta_polar(q, logq_mag, phase):
    n0 = round(logq_mag + 0.5)
    lnq = math.log(q)

    def term(n):
        # log-q magnitude relative to the n0 term
        rel = (n - n0) * logq_mag - (n * (n - 1) - n0 * (n0 - 1)) / 2.0
        return cmath.rect(math.exp(rel * lnq), n * phase)

    acc = term(n0)
    peak = abs(acc)
    for step in (1, -1):
        n = n0 + step
        while True:
            piece = term(n)
            acc += piece
            mag = abs(piece)
            peak = max(peak, mag)
            if mag < THETA_TERM_CUTOFF * peak:
                break
            n += step
            if abs(n - n0) > 400:
                raise ArithmeticError("theta summation failed to localize")
    return QScaled(q, acc, n0 * logq_mag - n0 * (n0 - 1) / 2.0)


@dataclass(frozen=True)
class SpiralGeometry:
    """The excluded spiral -lambda q^Z and its epsilon-thickened disks
    {t != 0 : |1 + lambda q^m / t| <= epsilon}."""
    lam: complex
    epsilon: float
    q: float

    def disjointness_threshold(self):
        """Below (q-1)/(q+1) the component disks are pairwise disjoint."""
        return (self.q - 1.0) / (self.q + 1.0)


@dataclass(frozen=True)
class ZoneResult:
    kind: str            # "outside" | "inside" | "near-boundary"
    m: int = None        # witnessing index for inside/near-boundary
    min_ratio: float = math.inf   # smallest |1 + lambda q^m / t| over scanned m

    @property
    def outside(self):
        return self.kind == "outside"


def zone_membership(geom, t, guard=1.1):
    """Classify t against the epsilon-disks; only finitely many m can
    contain t, namely those with q^m within (1 +- eps) * |t/lambda|."""
    t = complex(t)
    if t == 0:
        raise ValueError("t must be nonzero")
    q, lam, eps = geom.q, geom.lam, geom.epsilon
    center = math.log(abs(t) / abs(lam)) / math.log(q)
    lo = math.floor(center + math.log1p(-min(eps * guard, 0.9)) / math.log(q)) - 1
    hi = math.ceil(center + math.log1p(eps * guard) / math.log(q)) + 1
    best, best_m = math.inf, None
    for m in range(lo, hi + 1):
        ratio = abs(1.0 + lam * q ** float(m) / t)
        if ratio < best:
            best, best_m = ratio, m
    if best <= eps:
        return ZoneResult("inside", best_m, best)
    if best <= eps * guard:
        return ZoneResult("near-boundary", best_m, best)
    return ZoneResult("outside", None, best)


def q_laplace_series(grid, t, epsilon=0.05, tail_rtol=KERNEL_TAIL_RTOL):
    """Kernel-weighted sum of the grid values as a z-series.

    Both tails must decay below tail_rtol of the partial sum inside the
    available index range, or the grid is reported too short.  Terms below
    1e-16 relative are dropped so negligible far indices cannot shrink the
    z-window of the result."""
    q, lam = grid.q, grid.lam
    t = complex(t)
    zone = zone_membership(SpiralGeometry(lam, epsilon, q), t)
    if not zone.outside:
        raise PoleProximityError(
            "t = %s is %s the excluded spiral disks (m=%s, ratio %.3g)"
            % (t, zone.kind, zone.m, zone.min_ratio))
    base_logq = math.log(abs(lam) / abs(t)) / math.log(q)
    phase = cmath.phase(lam / t)
    terms = []
    for m in range(grid.m_min, grid.m_max + 1):
        th = _theta_polar(q, base_logq + m, phase)
        val = grid.values[m]
        mantissa = val.series * (1.0 / th.mantissa)
        terms.append((m, mantissa, val.qexp - th.qexp))

    mags = [(m, e + (math.log(s.norm_max()) / math.log(q) if not s.is_zero() else -math.inf))
            for m, s, e in terms]
    finite = [lm for _, lm in mags if math.isfinite(lm)]
    if not finite:
        return TruncatedSeries.zero(grid.d, 1, grid.values[grid.m_max].series.Kz)
    top = max(finite)
    lnq = math.log(q)

    def check_tail(side_mags, side):
        tail = [lm for _, lm in side_mags[-3:]]
        if len(tail) < 3:
            raise GridTooShortError("grid too short on the %s side" % side)
        if not (tail[-1] < tail[-2] < tail[-3]):
            raise GridTooShortError(
                "kernel terms not yet decaying at the %s end of the grid" % side,
                needed=side_mags[-1][0])
        ratio = math.exp((tail[-1] - tail[-2]) * lnq)
        est = math.exp((tail[-1] - top) * lnq) * ratio / (1.0 - ratio)
        if est > tail_rtol:
            raise GridTooShortError(
                "%s tail estimate %.2e exceeds %.0e of the partial sum" % (side, est, tail_rtol),
                needed=side_mags[-1][0])

    check_tail(mags, "upper")
    check_tail(list(reversed(mags)), "lower")

    acc = None
    for (m, s, e), (_, lm) in zip(terms, mags):
        if not math.isfinite(lm) or lm < top + math.log(1e-16) / lnq:
            continue
        piece = s * (q ** (e - top))
        acc = piece if acc is None else acc + piece
    return acc * (q ** top) if _fits_double(top, lnq) else _overflow_error(top)


def _fits_double(logq_value, lnq):
    return abs(logq_value * lnq) < 690.0


def _overflow_error(top):
    raise OverflowError("resummed value magnitude q^%.1f exceeds double range" % top)


def q_laplace(grid, t, z0=None, epsilon=0.05, tail_rtol=KERNEL_TAIL_RTOL):
    """Resummed value W(t, z0); z0 defaults to the origin."""
    series = q_laplace_series(grid, t, epsilon, tail_rtol)
    z0 = tuple(z0) if z0 is not None else (0.0,) * grid.d
    return series.evaluate(0.0, z0)


@dataclass
class SampleResidual:
    t: complex
    absolute: float
    relative: float


@dataclass
class KernelResidualReport:
    samples: list            # SampleResidual per accepted sample
    max_absolute: float
    max_relative: float
    rejected: list           # (t, reason) for zone-rejected samples

    def __str__(self):
        return "max |residual| %.3e (relative %.3e) over %d samples" % (
            self.max_absolute, self.max_relative, len(self.samples))


def residual_check(eq, grid, samples, epsilon=0.05):
    """Evaluate sum a_{j,alpha}(t,z) Dz^alpha W(q^j t, z) - F(t,z) at each
    sample, with W and its z-derivatives taken from the kernel sum."""
    q = eq.q
    results = []
    rejected = []
    worst_abs = worst_rel = 0.0
    geom = SpiralGeometry(grid.lam, epsilon, q)
    shifts = sorted({term.j for term in eq.terms})
    for t in samples:
        t = complex(t)
        bad = None
        for j in shifts:
            zone = zone_membership(geom, t * q ** j)
            if not zone.outside:
                bad = "shift q^%d t lies %s the excluded disks" % (j, zone.kind)
                break
        if bad:
            rejected.append((t, bad))
            continue
        w = {j: q_laplace_series(grid, t * q ** j, epsilon) for j in shifts}
        acc = None
        scale = 0.0
        for term in eq.terms:
            contrib = term.coeff.eval_t(t) * w[term.j].dz_multi(term.alpha)
            scale = max(scale, contrib.norm_max())
            acc = contrib if acc is None else acc + contrib
        acc = acc - eq.rhs.eval_t(t)
        scale = max(scale, eq.rhs.eval_t(t).norm_max())
        res = acc.norm_max()
        rel = res / scale if scale > 0 else res
        results.append(SampleResidual(t, res, rel))
        worst_abs = max(worst_abs, res)
        worst_rel = max(worst_rel, rel)
    return KernelResidualReport(results, worst_abs, worst_rel, rejected)


@dataclass
class ResumReport:
    """Remainder table of the resummed solution against the formal series."""
    epsilon: float
    samples: list            # complex sample points
    Wvals: list              # W(t, z0) per sample
    EN: list                 # EN[N][i] = |W(t_i) - partial_N(t_i)|
    rho: list                # rho[N] = max_i normalized remainder^(1/N), N >= 1
    M: float
    H: float
    verdict: str             # "pass" | "fail"
    reasons: list = field(default_factory=list)

    @property
    def passed(self):
        return self.verdict == "pass"


def _sample_points(geom, rays, radii, r_max):
    lam_arg = cmath.phase(geom.lam)
    points = []
    r_lo = r_max / 20.0
    for i in range(rays):
        ang = lam_arg + 2.0 * math.pi * (i + 0.5) / rays
        for k in range(radii):
            r = r_lo * (r_max / r_lo) ** (k / (radii - 1.0)) if radii > 1 else r_max
            t = cmath.rect(r, ang)
            if zone_membership(geom, t).outside:
                points.append(t)
    return points


def asymptotic_check(sol, grid, epsilon, n_max, rays=8, radii=12, r_max=None,
                     z0=None, w_fn=None, jobs=1):
    """Fit (M, H) with  |W - partial_N| <= (M H^N / eps) q^{N(N-1)/2} |t|^N
    over a ray/radius sample fan, and judge the expansion:

      * the normalized remainders rho_N must not grow monotonically across
        the last third of orders, and
      * the order-1 remainder must scale (at least linearly) with |t|,
        which is what separates a true asymptotic solution from one with
        a constant offset.
    """
    q = grid.q
    lam = grid.lam
    geom = SpiralGeometry(lam, epsilon, q)
    if epsilon >= geom.disjointness_threshold():
        raise ValueError("epsilon %.3g not below the disk-disjointness threshold %.3g"
                         % (epsilon, geom.disjointness_threshold()))
    if n_max > sol.count:
        raise ValueError("remainder depth %d exceeds the computed formal order %d"
                         % (n_max, sol.count))
    r_max = r_max if r_max is not None else 0.1 * abs(lam)
    points = _sample_points(geom, rays, radii, r_max)
    z0 = tuple(z0) if z0 is not None else (0.0,) * grid.d
    if w_fn is None:
        def w_fn(t):
            return q_laplace_series(grid, t, epsilon).evaluate(0.0, z0)

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            wvals = list(pool.map(w_fn, points))
    else:
        wvals = [w_fn(t) for t in points]

    lnq = math.log(q)
    # scaled partial sums of the formal series at each sample
    EN = []
    partials = [QScaled.zero(q) for _ in points]
    for N in range(0, n_max + 1):
        row = [abs(QScaled(q, w) - p) for w, p in zip(wvals, partials)]
        EN.append(row)
        if N <= sol.count:
            vN = sol.scaled[N].evaluate(0.0, z0)
            for i, t in enumerate(points):
                partials[i] = partials[i] + QScaled(q, vN * t ** N, N * (N - 1) / 2.0)
    # normalized remainders and the envelope fit
    rho = [None] * (n_max + 1)
    log_r = {}
    for N in range(0, n_max + 1):
        for i, t in enumerate(points):
            if EN[N][i] == 0.0:
                continue
            log_r[(N, i)] = (math.log(EN[N][i]) + math.log(epsilon)
                             - N * (N - 1) / 2.0 * lnq - N * math.log(abs(t)))
        if N >= 1:
            vals = [log_r[(N, i)] for i in range(len(points)) if (N, i) in log_r]
            rho[N] = math.exp(max(vals) / N) if vals else None

    reasons = []
    usable = [N for N in range(1, n_max + 1) if rho[N] is not None]
    if not usable:
        logH = 0.0
    else:
        start = max(1, int(math.ceil(2.0 * n_max / 3.0)))
        window = [N for N in usable if N >= start] or usable[-max(1, len(usable) // 3):]
        logH = max(0.0, max(math.log(rho[N]) for N in window))
        # rho_N settling toward a finite limit is the healthy pattern; only a
        # sustained upward trend means no envelope of this shape exists
        tail = [N for N in usable if N >= start]
        if len(tail) >= 3:
            slope = _ls_slope([(float(N), math.log(rho[N])) for N in tail])
            if slope > 0.1:
                reasons.append("normalized remainders trend upward (%.3g/order); no finite envelope" % slope)
    logM = max((lr - N * logH for (N, _), lr in log_r.items()), default=-math.inf)
    M = math.exp(logM) if math.isfinite(logM) else 0.0

    slope = _order1_slope(points, EN[1] if n_max >= 1 else None)
    if slope is not None and slope < 0.5:
        reasons.append("order-1 remainder does not scale with |t| (slope %.2f)" % slope)

    verdict = "pass" if not reasons else "fail"
    return ResumReport(epsilon, points, wvals, EN, rho, M, math.exp(logH), verdict, reasons)


def _order1_slope(points, e1):
    if e1 is None:
        return None
    data = [(math.log(abs(t)), math.log(e)) for t, e in zip(points, e1) if e > 0]
    if len(data) < 4:
        return None
    n = len(data)
    sx = sum(x for x, _ in data)
    sy = sum(y for _, y in data)
    sxx = sum(x * x for x, _ in data)
    sxy = sum(x * y for x, y in data)
    denom = n * sxx - sx * sx
    if denom == 0:
        return None
    return (n * sxy - sx * sy) / denom
