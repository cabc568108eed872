"""Finite Blaschke products, their fixed points and the predicted spectrum."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import minimize_scalar

from .numerics import NumericsError, poly_roots, sort_by_modulus

POLE_TOL = 1e-14
ZERO_PROXIMITY = 1e-6
ORIGIN_TOL = 1e-12
CIRCLE_TOL = 1e-8
MAX_PLAIN_ITER = 100_000
MAX_NEWTON_ITER = 50


class PoleError(ValueError):
    def __init__(self, z, zero):
        pole = 1 / np.conj(zero)
        super().__init__(f"z={z!r} is at the pole 1/conj(a)={pole!r} of zero a={zero!r}")
        self.zero = zero


class NotExpandingError(ValueError):
    pass


class FixedPointError(NumericsError):
    pass


@dataclass(frozen=True)
class BlaschkeProduct:
    """``B(z) = C * prod_i (z - a_i) / (1 - conj(a_i) z)`` with ``|a_i| < 1``.

    The constant is rescaled to modulus exactly one on construction.
    """

    zeros: tuple
    constant: complex = 1.0 + 0.0j

    def __post_init__(self):
        zeros = tuple(complex(a) for a in np.atleast_1d(self.zeros))
        if len(zeros) < 2:
            raise ValueError("a Blaschke product needs at least two zeros")
        if not all(abs(a) < 1 for a in zeros):
            raise ValueError("all zeros must lie in the open unit disk")
        c = complex(self.constant)
        if not np.isfinite(c) or abs(abs(c) - 1) > 1e-6:
            raise ValueError(f"constant must be unimodular, got {c!r}")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "constant", c / abs(c))

    # constructors -------------------------------------------------------

    @classmethod
    def power(cls, n):
        """``B(z) = z**n``."""
        return cls((0.0,) * n, 1.0)

    @classmethod
    def mu_family(cls, mu):
        """``B(z) = z (mu - z) / (1 - conj(mu) z)``: zeros {0, mu}, C = -1."""
        return cls((0.0, mu), -1.0)

    @classmethod
    def from_json(cls, data):
        zeros = [complex(*pair) for pair in data["zeros"]]
        constant = complex(*data.get("constant", [1.0, 0.0]))
        return cls(tuple(zeros), constant)

    def to_json(self):
        return {
            "zeros": [[a.real, a.imag] for a in self.zeros],
            "constant": [self.constant.real, self.constant.imag],
        }

    # basic data ---------------------------------------------------------

    @property
    def degree(self):
        return len(self.zeros)

    @property
    def a(self):
        return np.array(self.zeros, dtype=complex)

    def reflected(self):
        """The map ``w -> 1/B(1/w)``, i.e. B in the chart at infinity.

        For a Blaschke product this is again one, with conjugated zeros and
        constant.
        """
        return BlaschkeProduct(tuple(np.conj(self.a)), np.conj(self.constant))

    def numerator(self):
        """Low-to-high coefficients of ``C * prod (z - a_i)``."""
        return self.constant * P.polyfromroots(self.a)

    def denominator(self):
        """Low-to-high coefficients of ``prod (1 - conj(a_i) z)``."""
        out = np.array([1.0 + 0j])
        for a in self.a:
            out = P.polymul(out, [1.0, -np.conj(a)])
        return out

    # evaluation ---------------------------------------------------------

    def _check_poles(self, z):
        for a in self.zeros:
            if a == 0:
                continue
            den = np.abs(1 - np.conj(a) * z)
            bad = den < POLE_TOL * (1 + np.abs(np.conj(a) * z))
            if np.any(bad):
                zb = np.asarray(z)[bad] if np.ndim(z) else z
                raise PoleError(complex(np.ravel(zb)[0]), a)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        self._check_poles(z)
        out = np.full(z.shape, self.constant, dtype=complex)
        for a in self.zeros:
            out = out * (z - a) / (1 - np.conj(a) * z)
        return out if out.ndim else complex(out)

    evaluate = __call__

    def derivative(self, z):
        """``B'(z)`` via the logarithmic derivative, product rule near zeros."""
        z = np.asarray(z, dtype=complex)
        self._check_poles(z)
        a = self.a
        near = (np.abs(z[..., None] - a) < ZERO_PROXIMITY).any(axis=-1)

        factors = (z[..., None] - a) / (1 - np.conj(a) * z[..., None])
        value = self.constant * factors.prod(axis=-1)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            logder = (1 / (z[..., None] - a) + np.conj(a) / (1 - np.conj(a) * z[..., None])).sum(axis=-1)
            out = value * logder

        if np.any(near):
            # d/dz (z-a)/(1-conj(a)z) = (1-|a|^2)/(1-conj(a)z)^2
            dfac = (1 - np.abs(a) ** 2) / (1 - np.conj(a) * z[..., None]) ** 2
            n = len(a)
            prod_rule = np.zeros(z.shape, dtype=complex)
            for i in range(n):
                others = np.delete(factors, i, axis=-1).prod(axis=-1)
                prod_rule = prod_rule + dfac[..., i] * others
            out = np.where(near, self.constant * prod_rule, out)
        return out if out.ndim else complex(out)

    def __str__(self):
        zs = ", ".join(f"{a:.6g}" for a in self.zeros)
        return f"Blaschke(zeros=[{zs}], C={self.constant:.6g})"


_POWER_RE = re.compile(r"^\s*z\s*(?:(?:\^|\*\*)\s*(\d+))?\s*$")


def parse_power_map(text):
    """Parse the shorthand ``'z^n'`` into ``BlaschkeProduct.power(n)``."""
    m = _POWER_RE.match(text)
    if not m:
        raise ValueError(f"unrecognised map shorthand {text!r}; expected 'z^n'")
    return BlaschkeProduct.power(int(m.group(1) or 1))


# expansivity ------------------------------------------------------------


@dataclass(frozen=True)
class Expansivity:
    sum_margin: float
    min_derivative_modulus: float
    argmin: float
    expanding: bool


def expansivity_check(b, samples=4096):
    """Decide whether ``B`` restricted to the circle is expanding.

    ``sum_margin = sum (1-|a_i|)/(1+|a_i|) - 1`` is the classical sufficient
    certificate (positive means expanding). The decision itself uses the
    minimum of ``|B'|`` on the circle: a grid of ``samples`` angles, refined
    by golden-section search around the grid minimum.
    """
    if samples < 256:
        raise ValueError("expansivity_check needs at least 256 samples")
    mod = np.abs(b.a)
    sum_margin = float(np.sum((1 - mod) / (1 + mod)) - 1)

    def speed(theta):
        return float(np.abs(b.derivative(np.exp(1j * theta))))

    theta = 2 * np.pi * np.arange(samples) / samples
    grid = np.abs(b.derivative(np.exp(1j * theta)))
    j = int(np.argmin(grid))
    h = 2 * np.pi / samples
    best_t, best = theta[j], float(grid[j])
    try:
        res = minimize_scalar(
            speed, bracket=(theta[j] - h, theta[j], theta[j] + h), method="golden",
            options={"xtol": 1e-12},
        )
        if res.fun < best:
            best_t, best = float(res.x), float(res.fun)
    except ValueError:
        # bracket not valid (flat minimum); the grid value stands
        pass
    return Expansivity(sum_margin, best, float(np.mod(best_t, 2 * np.pi)), best > 1.0)


# fixed points -----------------------------------------------------------


@dataclass(frozen=True)
class FixedPointReport:
    interior_point: complex
    interior_multiplier: complex
    exterior_multiplier: complex
    circle_points: tuple = field(default_factory=tuple)  # (point, multiplier) pairs

    @property
    def exterior_point(self):
        z0 = self.interior_point
        return complex("inf") if abs(z0) < ORIGIN_TOL else 1 / np.conj(z0)


def _interior_fixed_point(b):
    z = 0j
    for _ in range(MAX_PLAIN_ITER):
        z_new = b(z)
        if abs(z_new - z) < 1e-14:
            z = z_new
            break
        z = z_new
    else:
        raise FixedPointError(
            f"iteration z <- B(z) did not settle after {MAX_PLAIN_ITER} steps "
            "(map not expanding or numerically marginal)"
        )
    for _ in range(MAX_NEWTON_ITER):
        g = b(z) - z
        dg = b.derivative(z) - 1
        if dg == 0:
            break
        step = g / dg
        z -= step
        if abs(step) < 1e-16:
            break
    return complex(z)


def fixed_point_polynomial(b):
    """Low-to-high coefficients of ``C prod (z - a_i) - z prod (1 - conj(a_i) z)``."""
    return P.polysub(b.numerator(), P.polymulx(b.denominator()))


def fixed_points(b, expansivity=None):
    """Fixed-point structure of an expanding Blaschke product.

    One attracting point ``z0`` in the disk, its reflection ``1/conj(z0)``
    outside, and ``n - 1`` repelling points on the circle.
    """
    exp_ = expansivity or expansivity_check(b)
    if not exp_.expanding:
        raise NotExpandingError(
            f"min |B'| on the circle is {exp_.min_derivative_modulus:.6g} <= 1"
        )
    z0 = _interior_fixed_point(b)
    lam = complex(b.derivative(z0))
    if abs(z0) < ORIGIN_TOL:
        # the reflected point is infinity; use the chart w = 1/z
        lam_ext = complex(b.reflected().derivative(0.0))
    else:
        lam_ext = complex(b.derivative(1 / np.conj(z0)))
    if abs(lam_ext - np.conj(lam)) > 1e-9:
        raise FixedPointError(
            f"exterior multiplier {lam_ext!r} differs from conj(interior) {np.conj(lam)!r}"
        )

    roots = poly_roots(fixed_point_polynomial(b)).values
    on_circle = roots[np.abs(np.abs(roots) - 1) <= CIRCLE_TOL]
    pts = []
    for p in on_circle:
        for _ in range(3):
            dg = b.derivative(p) - 1
            if dg != 0:
                p = p - (b(p) - p) / dg
        pts.append((complex(p), complex(b.derivative(p))))
    pts.sort(key=lambda t: np.mod(np.angle(t[0]), 2 * np.pi))
    if len(pts) != b.degree - 1:
        raise FixedPointError(
            f"found {len(pts)} fixed points on the circle, expected {b.degree - 1}"
        )
    return FixedPointReport(z0, lam, lam_ext, tuple(pts))


# predicted spectrum -----------------------------------------------------


@dataclass(frozen=True)
class PredictedSpectrum:
    """Leading part of the multiset ``{l^n, n>=0} + {conj(l)^n, n>=1} + {0}``.

    ``values`` is ordered by decreasing modulus. ``zero_padded`` is set when
    the truncation reached the eigenvalue 0, whose multiplicity is then an
    artifact of ``count``.
    """

    values: np.ndarray
    multiplier: complex
    zero_padded: bool = False

    def __len__(self):
        return len(self.values)

    def multiplicities(self, tol=1e-14):
        out = []
        for v in self.values:
            for item in out:
                if abs(item[0] - v) <= tol:
                    item[1] += 1
                    break
            else:
                out.append([v, 1])
        return [(complex(v), k) for v, k in out]


def spectrum_from_multiplier(lam, count):
    """Closed-form spectrum for a given attracting multiplier ``lam``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    lam = complex(lam)
    if abs(lam) >= 1:
        raise ValueError("multiplier of the attracting fixed point must have modulus < 1")
    # count + 2 terms per family is enough to resolve ties at the cut
    n = np.arange(count + 2)
    fam = np.concatenate([lam ** n, np.conj(lam) ** n[1:]])
    fam[np.abs(fam) < 1e-300] = 0.0
    fam = sort_by_modulus(fam)
    nonzero = fam[fam != 0]
    values = list(nonzero[:count])
    if len(values) == count and len(nonzero) > count:
        cut = abs(values[-1])
        for v in nonzero[count:]:
            if abs(abs(v) - cut) <= 1e-14 * max(cut, 1e-300):
                values.append(v)
            else:
                break
    padded = len(values) < count
    values.extend([0j] * (count - len(values)))
    return PredictedSpectrum(np.array(values, dtype=complex), lam, padded)


def closed_form_spectrum(b, count, fixed=None):
    """Predicted eigenvalues of the transfer operator of ``b`` (top ``count``)."""
    fp = fixed or fixed_points(b)
    return spectrum_from_multiplier(fp.interior_multiplier, count)
