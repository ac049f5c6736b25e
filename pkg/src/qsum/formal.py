"""Formal power-series solution by coefficient recursion, residual
verification, and the super-exponential coefficient-growth fit.

Matching the coefficient of t^n in the equation gives

    c_n(z) X_n(z) = F_n(z) - sum_{p>=1} sum_{j,alpha} a_{j,alpha,p}(z)
                      * q^{j(n-p)} * Dz^alpha X_{n-p}(z)

with c_n(z) = sum_j a_{j,0,0}(z) q^{jn}.  Divergence is of order
q^{n(n-1)/2}, so the recursion is carried out on the scaled coefficients
v_n = X_n / q^{n(n-1)/2}, for which every factor stays of moderate size:
the p-step factor becomes q^{(j-p)(n-p) - p(p-1)/2}.
"""

import math
from dataclasses import dataclass

from .errors import ResonanceError, UnsupportedEquationError
from .scaled import QScaled
from .series import TruncatedSeries

RESONANCE_TOL = 1e-12


@dataclass(frozen=True)
class FormalSolution:
    q: float
    count: int          # highest computed order N_max
    scaled: tuple       # v_n = X_n / q^{n(n-1)/2}, z-series per order
    R1: float           # working polydisc radius for sup-norm estimates
    d: int

    def coefficient_norms(self):
        """Sup-norm estimates of X_n on |z| <= R1, as scaled values."""
        out = []
        for n, v in enumerate(self.scaled):
            out.append(QScaled(self.q, v.sup_norm(self.R1), n * (n - 1) / 2.0))
        return out


def _presliced(eq):
    """[(j, alpha, p, z-series slice)] per term, plus diagnostics."""
    slices = []
    for term in eq.terms:
        for p, zpart in term.coeff.t_slices():
            slices.append((term.j, term.alpha, p, zpart))
    return slices


def _check_exponent_envelope(eq, n_max):
    # the recursion factors reach q^(m*n); beyond double range the scaled
    # representation would need a wider ledger than this module carries
    if eq.m * n_max * math.log10(eq.q) > 300.0:
        raise UnsupportedEquationError(
            "q^(m*n) factors exceed double range at m=%d, n=%d, q=%g" % (eq.m, n_max, eq.q))


def solve_formal(eq, n_max, Kz=None, R1=None):
    """Scaled coefficients v_0..v_{n_max} of the formal solution.

    The z-window of v_n shrinks with n when z-derivative terms feed the
    recursion; callers wanting full depth at high orders must supply an
    equation parsed at a correspondingly padded Kz.  R1 (the polydisc
    radius for sup-norm estimates) defaults to half the equation's z
    radius.
    """
    q = eq.q
    d = eq.d
    Kz = Kz if Kz is not None else eq.Kz
    _check_exponent_envelope(eq, n_max)
    slices = _presliced(eq)
    diag = [s for s in slices if s[2] == 0]      # p = 0: the diagonal factor
    for j, alpha, _, _ in diag:
        if sum(alpha) != 0:
            raise UnsupportedEquationError(
                "z-derivative term (j=%d, alpha=%s) has a nonvanishing t-constant part; "
                "the order-by-order recursion cannot isolate X_n" % (j, list(alpha)))
    if not diag:
        raise UnsupportedEquationError("no coefficient of t-order 0; the recursion has no diagonal")
    lower = [s for s in slices if s[2] >= 1]
    rhs_slices = dict(eq.rhs.t_slices())
    zero = TruncatedSeries.zero(d, 1, Kz)

    vs = []
    for n in range(n_max + 1):
        cn = zero
        for j, _, _, zpart in diag:
            cn = cn + zpart.truncated(Kz=Kz) * (q ** (j * n))
        cn0 = cn.constant_term()
        scale = max(abs(zpart.constant_term()) * q ** (j * n) for j, _, _, zpart in diag)
        if abs(cn0) <= RESONANCE_TOL * max(scale, 1.0):
            raise ResonanceError(n)
        acc = rhs_slices.get(n, zero).truncated(Kz=Kz) * (q ** (-n * (n - 1) / 2.0))
        for j, alpha, p, zpart in lower:
            k = n - p
            if k < 0:
                continue
            factor = q ** ((j - p) * k - p * (p - 1) / 2.0)
            if factor == 0.0:
                continue
            acc = acc - zpart.truncated(Kz=Kz) * factor * vs[k].dz_multi(alpha)
        vs.append(acc / cn)
    return FormalSolution(q, n_max, tuple(vs), R1=R1 if R1 is not None else eq.R / 2.0, d=d)


@dataclass
class ResidualReport:
    per_order: list          # (n, absolute residual, relative residual)
    max_relative: float
    flagged: list            # orders with relative residual above tolerance
    tolerance: float

    @property
    def passed(self):
        return not self.flagged

    def __str__(self):
        s = "max scaled residual %.3e (tol %.1e)" % (self.max_relative, self.tolerance)
        if self.flagged:
            s += "; flagged orders " + ", ".join(str(n) for n in self.flagged)
        return s


def verify_formal(eq, sol, tol=1e-10):
    """Substitute the scaled solution back into the equation.

    Residuals are computed order by order in the same scaled arithmetic as
    the solve, so large n cannot overflow; they are reported relative to
    the largest contribution at each order."""
    q = eq.q
    d = eq.d
    _check_exponent_envelope(eq, sol.count)
    slices = _presliced(eq)
    rhs_slices = dict(eq.rhs.t_slices())
    per_order = []
    flagged = []
    worst = 0.0
    for n in range(sol.count + 1):
        acc = None
        scale = 0.0
        for j, alpha, p, zpart in slices:
            k = n - p
            if k < 0:
                continue
            contrib = zpart * (q ** ((j - p) * k - p * (p - 1) / 2.0)) * sol.scaled[k].dz_multi(alpha)
            scale = max(scale, contrib.norm_max())
            acc = contrib if acc is None else acc + contrib
        fn = rhs_slices.get(n)
        if fn is not None:
            contrib = fn * (q ** (-n * (n - 1) / 2.0))
            scale = max(scale, contrib.norm_max())
            acc = -contrib if acc is None else acc - contrib
        if acc is None:
            acc = TruncatedSeries.zero(d, 1, sol.scaled[n].Kz)
        rel = acc.norm_max() / scale if scale > 0 else acc.norm_max()
        per_order.append((n, acc.norm_max(), rel))
        worst = max(worst, rel)
        if rel > tol:
            flagged.append(n)
    return ResidualReport(per_order, worst, flagged, tol)


@dataclass
class GevreyFit:
    A: float
    h: float
    norms: list       # QScaled sup-norm estimates of X_n on the R1 polydisc
    g: list           # diagnostic (log M_n - (n(n-1)/2) log q) / n, None where M_n = 0

    def certificate_holds(self, q):
        """Post-hoc check of |X_n| <= A h^n q^{n(n-1)/2} on every order."""
        if self.A == 0:
            return all(m.is_zero() for m in self.norms)
        logA, logh = math.log(self.A), math.log(self.h)
        for n, mn in enumerate(self.norms):
            if mn.is_zero():
                continue
            bound = logA + n * logh + n * (n - 1) / 2.0 * math.log(q)
            if mn.log_abs() > bound + 1e-9:
                return False
        return True


def gevrey_fit(sol, window_fraction=1.0 / 3.0):
    """Envelope constants (A, h) with ||X_n|| <= A h^n q^{n(n-1)/2}.

    h is the largest ||v_n||^{1/n} over the stabilized window (the last
    third of computed orders, where the pre-asymptotic wobble has died
    out); A is then the smallest constant making the bound hold at every
    order."""
    q = sol.q
    norms = sol.coefficient_norms()
    logs = []
    for n, v in enumerate(sol.scaled):
        s = v.sup_norm(sol.R1)
        logs.append(math.log(s) if s > 0 else None)
    nonzero = [n for n in range(1, sol.count + 1) if logs[n] is not None]
    if not nonzero and logs[0] is None:
        return GevreyFit(0.0, 1.0, norms, [None] * len(logs))
    g = [None] * len(logs)
    for n in nonzero:
        g[n] = logs[n] / n
    if nonzero:
        start = max(1, int(math.ceil((1.0 - window_fraction) * sol.count)))
        window = [n for n in nonzero if n >= start] or nonzero[-max(1, len(nonzero) // 3):]
        logh = max(g[n] for n in window)
        h = math.exp(logh)
    else:
        logh, h = 0.0, 1.0
    logA = max(logs[n] - n * logh for n in range(sol.count + 1) if logs[n] is not None)
    return GevreyFit(math.exp(logA), h, norms, g)
