"""Substitution t -> t^2 with the quartic-root rebase of the shift.

Replacing t by t^2 and reading each shift S^j through the substitution
turns the equation into one of the same form with base q1 = q^{1/4} and
shift powers 2j; every t-order doubles, so an equation that misses the
strong order margin acquires it after squaring.  The identities tying the
squared equation's Borel transform and characteristic polynomial back to
the original ones are verified numerically here."""

import cmath
import math
from dataclasses import dataclass, field

from .equation import Equation, Term
from .errors import QsumError
from .newton import CheckReport, check_shape, newton_polygon

IDENTITY_RTOL = 1e-10


@dataclass(frozen=True)
class SquaredEquation:
    equation: Equation      # same model: base q1, shifts 2j, delta doubled
    q1: float
    m0_doubled: int
    m_doubled: int

    @property
    def terms(self):
        return self.equation.terms

    @property
    def rhs(self):
        return self.equation.rhs


def substitute_square(eq, m0=None):
    """Rewrite under t -> t^2: coefficients a(t^2, z), shifts 2j, base q^{1/4}."""
    if m0 is None:
        shape = check_shape(newton_polygon(eq))
        if not shape.ok:
            raise QsumError("squared form needs the polygon shape to hold: %s" % shape)
        m0 = shape.m0
    q1 = eq.q ** 0.25
    terms = tuple(Term(2 * t.j, t.alpha, t.coeff.subs_t_squared()) for t in eq.terms)
    sq = Equation(q1, 2 * eq.delta, 2 * eq.m, eq.d, terms, eq.rhs.subs_t_squared(), eq.R)
    return SquaredEquation(sq, q1, 2 * m0, 2 * eq.m)


def check_doubled_floors(sq):
    """Order floors of the squared equation, including the strong margin

        ord_t(A_{j,alpha}) >= 2j - 2m0 + 2   for |alpha| > 0,

    which holds after squaring even when the original equation misses it;
    this is what makes the squared route always available."""
    messages = []
    ok = True
    M0, M = sq.m0_doubled, sq.m_doubled
    for term in sq.terms:
        o = term.coeff.ord_t()
        if o.truncation_limited:
            continue
        if o.order % 2:
            ok = False
            messages.append("odd t-order %d at (j=%d)" % (o.order, term.j))
        if sum(term.alpha) == 0:
            floor = max(0, term.j - M0)
        else:
            floor = max(2, term.j - M0 + 2)
        if o.order < floor:
            ok = False
            messages.append("ord_t=%d at (shift=%d, alpha=%s) below floor %d"
                            % (o.order, term.j, list(term.alpha), floor))
        if sum(term.alpha) > 0 and M0 <= term.j < M and o.order < term.j - M0 + 2:
            ok = False
            messages.append("strong margin fails at (shift=%d, alpha=%s)" % (term.j, list(term.alpha)))
    return CheckReport(ok, messages)


@dataclass
class IdentityReport:
    passed: bool
    worst: float
    samples: list
    messages: list = field(default_factory=list)

    def __str__(self):
        tag = "pass" if self.passed else "fail"
        return "%s (worst relative gap %.3e over %d samples)" % (tag, self.worst, len(self.samples))


def _direct_eval(coeffs, xi, z0):
    acc = 0j
    p = 1.0 + 0j
    for v in coeffs:
        acc += v.evaluate(0.0, z0) * p
        p *= xi
    return acc


def check_borel_square_identity(u_orig, u_sq, q, n_samples=10, z0=None, rtol=IDENTITY_RTOL):
    """u1(xi, z) = u(q^{-1/4} xi^2, z) at sample points inside both disks.

    u1 is the squared equation's own Borel transform (base q^{1/4}), so a
    pass ties the two independently computed pipelines together."""
    z0 = tuple(z0) if z0 is not None else (0.0,) * u_orig.d
    r_sq = 0.4 * min(u_sq.radius_est, 10.0)
    r_from_orig = (0.4 * min(u_orig.radius_est, 10.0) * q ** 0.25) ** 0.5
    r = min(r_sq, r_from_orig)
    samples = []
    worst = 0.0
    for k in range(n_samples):
        xi = cmath.rect(r * (0.3 + 0.7 * (k + 1) / n_samples), 2.0 * math.pi * k / n_samples + 0.3)
        lhs = _direct_eval(u_sq.coeffs, xi, z0)
        rhs = _direct_eval(u_orig.coeffs, q ** -0.25 * xi * xi, z0)
        scale = max(abs(lhs), abs(rhs), 1e-30)
        gap = abs(lhs - rhs) / scale
        samples.append((xi, gap))
        worst = max(worst, gap)
    return IdentityReport(worst <= rtol, worst, samples)


def check_charpoly_square_identity(P, P1, m0, q, n_samples=20, z0=None, rtol=IDENTITY_RTOL):
    """P1(rho, z) = q^{-m0/4} P(q^{-1/4} rho^2, z) at sample points, plus the
    root correspondence rho^2 in q^{1/4} * roots(P)."""
    from .newton import durand_kerner
    z0 = tuple(z0) if z0 is not None else (0.0,) * P.coeffs[0].d
    factor = q ** (-m0 / 4.0)
    samples = []
    worst = 0.0
    for k in range(n_samples):
        rho = cmath.rect(0.5 + 1.5 * k / max(n_samples - 1, 1), 2.0 * math.pi * k / n_samples + 0.1)
        lhs = P1.eval(rho, z0)
        rhs = factor * P.eval(q ** -0.25 * rho * rho, z0)
        scale = max(abs(lhs), abs(rhs), 1e-30)
        gap = abs(lhs - rhs) / scale
        samples.append((rho, gap))
        worst = max(worst, gap)
    messages = []
    ok = worst <= rtol
    p_roots = durand_kerner(P.at_z0())
    for rho in durand_kerner(P1.at_z0()):
        mapped = q ** -0.25 * rho * rho
        gap = min(abs(mapped - tau) / max(abs(tau), 1e-30) for tau in p_roots)
        if gap > 1e-6:
            ok = False
            messages.append("root %s of the squared polynomial does not map onto a root (gap %.2e)"
                            % (rho, gap))
    return IdentityReport(ok, worst, samples, messages)


def shift_square_identity_gap(f, q, m, t0, z0=()):
    """Relative gap in the executable shift identity

        f(q^m t^2, z) = F((sqrt(q))^m t, z),   F(t, z) = f(t^2, z),

    which is exact up to floating-point rounding for polynomial data."""
    F = f.subs_t_squared()
    lhs = f.evaluate(q ** float(m) * t0 * t0, z0)
    rhs = F.evaluate(math.sqrt(q) ** float(m) * t0, z0)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
