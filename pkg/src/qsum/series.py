"""Truncated power series in t and z1..zd with complex coefficients.

The universal value type of the toolkit.  A series is a sparse map from
(n, beta) to a complex coefficient, where n is the t-exponent and beta a
z-multi-index, restricted to the window n < Kt and |beta| < Kz.  Every
operation returns a new series whose window is the componentwise minimum
of its inputs' windows: results are never extrapolated beyond what the
inputs determine, so a formal derivative costs one unit of z-window and
that loss propagates through all downstream arithmetic.
"""

import itertools
import math
from collections import namedtuple

from .errors import DimensionMismatchError, NotAUnitError, TruncationError

OrdResult = namedtuple("OrdResult", ["order", "truncation_limited"])


def _check_finite(c):
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError("non-finite coefficient")


class TruncatedSeries:
    """Sparse truncated series over C in t and z1..zd."""

    __slots__ = ("d", "Kt", "Kz", "coeffs")

    def __init__(self, d, Kt, Kz, coeffs=None):
        if d < 0 or Kt < 1 or Kz < 1:
            raise TruncationError("window must satisfy Kt >= 1, Kz >= 1, d >= 0")
        self.d = d
        self.Kt = Kt
        self.Kz = Kz
        clean = {}
        if coeffs:
            for (n, beta), c in coeffs.items():
                beta = tuple(beta)
                if len(beta) != d:
                    raise DimensionMismatchError("multi-index length %d, expected %d" % (len(beta), d))
                if n < 0 or any(b < 0 for b in beta):
                    raise ValueError("negative exponent")
                if n >= Kt or sum(beta) >= Kz:
                    continue
                c = complex(c)
                _check_finite(c)
                if c != 0:
                    clean[(n, beta)] = c
        self.coeffs = clean

    # ---------------------------------------------------------------- factories

    @classmethod
    def zero(cls, d, Kt, Kz):
        return cls(d, Kt, Kz)

    @classmethod
    def const(cls, value, d, Kt, Kz):
        return cls(d, Kt, Kz, {(0, (0,) * d): complex(value)})

    @classmethod
    def var_t(cls, d, Kt, Kz):
        return cls(d, Kt, Kz, {(1, (0,) * d): 1.0})

    @classmethod
    def var_z(cls, axis, d, Kt, Kz):
        if not 1 <= axis <= d:
            raise DimensionMismatchError("z-axis %d out of range 1..%d" % (axis, d))
        beta = tuple(1 if i == axis - 1 else 0 for i in range(d))
        return cls(d, Kt, Kz, {(0, beta): 1.0})

    @classmethod
    def monomial(cls, value, n, beta, d, Kt, Kz):
        return cls(d, Kt, Kz, {(n, tuple(beta)): complex(value)})

    # ---------------------------------------------------------------- access

    def items(self):
        """Deterministic (lexicographic) iteration over nonzero coefficients."""
        return sorted(self.coeffs.items())

    def get(self, n, beta=()):
        return self.coeffs.get((n, tuple(beta)), 0j)

    def constant_term(self):
        return self.coeffs.get((0, (0,) * self.d), 0j)

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.d, self.Kt, self.Kz) == (other.d, other.Kt, other.Kz) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.d, self.Kt, self.Kz, tuple(self.items())))

    def __repr__(self):
        head = ", ".join("%s: %s" % (k, v) for k, v in self.items()[:4])
        more = "" if len(self.coeffs) <= 4 else ", ..."
        return "TruncatedSeries(d=%d, Kt=%d, Kz=%d, {%s%s})" % (self.d, self.Kt, self.Kz, head, more)

    # ---------------------------------------------------------------- ring ops

    def _common_window(self, other):
        if self.d != other.d:
            raise DimensionMismatchError("series in %d and %d z-variables" % (self.d, other.d))
        return min(self.Kt, other.Kt), min(self.Kz, other.Kz)

    def _lift(self, value):
        return TruncatedSeries.const(value, self.d, self.Kt, self.Kz)

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = self._lift(other)
        Kt, Kz = self._common_window(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0j) + c
        return TruncatedSeries(self.d, Kt, Kz, out)

    __radd__ = __add__

    def __neg__(self):
        out = TruncatedSeries.__new__(TruncatedSeries)
        out.d, out.Kt, out.Kz = self.d, self.Kt, self.Kz
        out.coeffs = {k: -c for k, c in self.coeffs.items()}
        return out

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = self._lift(other)
        return self + (-other)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = complex(other)
            _check_finite(other)
            out = TruncatedSeries.__new__(TruncatedSeries)
            out.d, out.Kt, out.Kz = self.d, self.Kt, self.Kz
            out.coeffs = {k: c * other for k, c in self.coeffs.items()} if other != 0 else {}
            return out
        Kt, Kz = self._common_window(other)
        a, b = self.coeffs, other.coeffs
        if len(a) > len(b):
            a, b = b, a
        out = {}
        bitems = [(n, beta, sum(beta), c) for (n, beta), c in b.items()]
        for (n1, b1), c1 in a.items():
            if n1 >= Kt:
                continue
            w1 = sum(b1)
            if w1 >= Kz:
                continue
            for n2, b2, w2, c2 in bitems:
                n = n1 + n2
                if n >= Kt or w1 + w2 >= Kz:
                    continue
                key = (n, tuple(x + y for x, y in zip(b1, b2)))
                out[key] = out.get(key, 0j) + c1 * c2
        return TruncatedSeries(self.d, Kt, Kz, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return divide(self, other)
        return self * (1.0 / complex(other))

    def __rtruediv__(self, other):
        return divide(self._lift(other), self)

    def pow(self, k):
        if k < 0:
            return invert(self).pow(-k)
        acc = TruncatedSeries.const(1.0, self.d, self.Kt, self.Kz)
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base if k > 1 else base
            k >>= 1
        return acc

    # ---------------------------------------------------------------- calculus

    def dz(self, axis, order=1):
        """Formal partial derivative in z_axis; costs `order` units of z-window."""
        if not 1 <= axis <= self.d:
            raise DimensionMismatchError("z-axis %d out of range 1..%d" % (axis, self.d))
        if order < 0:
            raise ValueError("negative derivative order")
        if order == 0:
            return self
        Kz = self.Kz - order
        if Kz < 1:
            raise TruncationError("z-window exhausted by derivative of order %d" % order)
        i = axis - 1
        out = {}
        for (n, beta), c in self.coeffs.items():
            b = beta[i]
            if b < order:
                continue
            fac = 1.0
            for r in range(order):
                fac *= b - r
            nb = beta[:i] + (b - order,) + beta[i + 1:]
            out[(n, nb)] = c * fac
        return TruncatedSeries(self.d, self.Kt, Kz, out)

    def dz_multi(self, alpha):
        """Apply the mixed derivative given by the multi-index alpha."""
        out = self
        for axis, order in enumerate(alpha, start=1):
            if order:
                out = out.dz(axis, order)
        return out

    # ---------------------------------------------------------------- structure

    def ord_t(self):
        """Least t-exponent with a nonzero coefficient.

        Returns OrdResult(order, truncation_limited); order is math.inf for
        the zero truncation, in which case the flag is set because the
        window cannot distinguish 0 from t**Kt * (...).
        """
        if not self.coeffs:
            return OrdResult(math.inf, True)
        return OrdResult(min(n for (n, _) in self.coeffs), False)

    def t_degree(self):
        """Largest populated t-exponent, or -1 for the zero truncation."""
        if not self.coeffs:
            return -1
        return max(n for (n, _) in self.coeffs)

    def t_slice(self, n):
        """The z-series coefficient of t**n (Kt collapses to 1)."""
        out = {(0, beta): c for (m, beta), c in self.coeffs.items() if m == n}
        return TruncatedSeries(self.d, 1, self.Kz, out)

    def t_slices(self):
        """Sorted list of (n, z-series) over populated t-exponents."""
        ns = sorted({n for (n, _) in self.coeffs})
        return [(n, self.t_slice(n)) for n in ns]

    def shift_t_down(self, k):
        """Exact division by t**k; raises if a lower-order coefficient is present."""
        if k == 0:
            return self
        if any(n < k for (n, _) in self.coeffs):
            raise TruncationError("series not divisible by t^%d" % k)
        out = {(n - k, beta): c for (n, beta), c in self.coeffs.items()}
        return TruncatedSeries(self.d, self.Kt - k, self.Kz, out)

    def subs_t_squared(self):
        """Substitute t -> t**2; the t-window widens to cover the image."""
        out = {(2 * n, beta): c for (n, beta), c in self.coeffs.items()}
        return TruncatedSeries(self.d, 2 * self.Kt - 1, self.Kz, out)

    def truncated(self, Kt=None, Kz=None):
        Kt = self.Kt if Kt is None else min(Kt, self.Kt)
        Kz = self.Kz if Kz is None else min(Kz, self.Kz)
        return TruncatedSeries(self.d, Kt, Kz, self.coeffs)

    def with_window(self, Kt, Kz):
        """Reinterpret an exact polynomial inside a different window.

        Only safe for data known exactly (parsed polynomial coefficients);
        raises if stored terms fall outside the new window.
        """
        if any(n >= Kt or sum(beta) >= Kz for (n, beta) in self.coeffs):
            raise TruncationError("stored terms exceed the requested window")
        return TruncatedSeries(self.d, Kt, Kz, self.coeffs)

    # ---------------------------------------------------------------- numerics

    def evaluate(self, t0, z0=()):
        """Finite-sum evaluation of the truncation; callers own tail reasoning."""
        z0 = tuple(complex(z) for z in z0)
        if len(z0) != self.d:
            raise DimensionMismatchError("expected %d z-values, got %d" % (self.d, len(z0)))
        t0 = complex(t0)
        total = 0j
        for (n, beta), c in self.items():
            term = c * t0 ** n
            for z, b in zip(z0, beta):
                if b:
                    term *= z ** b
            total += term
        return total

    def eval_t(self, t0):
        """Collapse the t-variable at t0, leaving a z-series."""
        t0 = complex(t0)
        out = {}
        for (n, beta), c in self.coeffs.items():
            key = (0, beta)
            out[key] = out.get(key, 0j) + c * t0 ** n
        return TruncatedSeries(self.d, 1, self.Kz, out)

    def norm_max(self):
        """Largest coefficient magnitude."""
        if not self.coeffs:
            return 0.0
        return max(abs(c) for c in self.coeffs.values())

    def sup_norm(self, rz, rt=1.0):
        """Coefficient-sum upper bound for the sup on |t|<=rt, |z_i|<=rz."""
        total = 0.0
        for (n, beta), c in self.coeffs.items():
            total += abs(c) * rt ** n * rz ** sum(beta)
        return total

    def approx_equal(self, other, tol=1e-12):
        diff = self - other
        scale = max(self.norm_max(), other.norm_max(), 1.0)
        return diff.norm_max() <= tol * scale


def _window_keys(d, Kt, Kz):
    """All (n, beta) in the window, in graded-lexicographic order."""
    betas = []
    if d == 0:
        betas = [()]
    else:
        for total in range(Kz):
            for cuts in itertools.combinations(range(total + d - 1), d - 1):
                beta = []
                prev = -1
                for c in cuts:
                    beta.append(c - prev - 1)
                    prev = c
                beta.append(total + d - 2 - prev)
                betas.append(tuple(beta))
    for n in range(Kt):
        for beta in betas:
            yield n, beta


def divide(num, den):
    """Solve r * den = num on the common window (den must be a unit)."""
    if num.d != den.d:
        raise DimensionMismatchError("series in %d and %d z-variables" % (num.d, den.d))
    den0 = den.constant_term()
    if den0 == 0:
        raise NotAUnitError("division by a series with vanishing constant term")
    Kt, Kz = min(num.Kt, den.Kt), min(num.Kz, den.Kz)
    d = num.d
    den_rest = [(n, beta, c) for (n, beta), c in den.items() if (n, beta) != (0, (0,) * d)]
    out = {}
    for n, beta in _window_keys(d, Kt, Kz):
        acc = num.coeffs.get((n, beta), 0j)
        for dn, dbeta, dc in den_rest:
            rn = n - dn
            if rn < 0:
                continue
            rbeta = tuple(b - db for b, db in zip(beta, dbeta))
            if any(b < 0 for b in rbeta):
                continue
            prev = out.get((rn, rbeta))
            if prev is not None:
                acc -= dc * prev
        if acc != 0:
            out[(n, beta)] = acc / den0
    return TruncatedSeries(d, Kt, Kz, out)


def invert(a):
    """Multiplicative inverse up to the window; requires a(0,0) != 0."""
    return divide(TruncatedSeries.const(1.0, a.d, a.Kt, a.Kz), a)


# functional aliases matching the operation surface

def add(a, b):
    return a + b


def mul(a, b):
    return a * b


def dz(a, axis, order=1):
    return a.dz(axis, order)


def evaluate(a, t0, z0=()):
    return a.evaluate(t0, z0)


def ord_t(a):
    return a.ord_t()
