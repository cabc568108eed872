"""Hardy-Hilbert space on an annulus: geometry, basis, norms, projections."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import dft_forward

DEFAULT_MARGIN = 0.1
SEARCH_BUDGET = 60


class AnnulusError(ValueError):
    """No admissible annulus; ``violated`` names the failing inequality."""

    def __init__(self, message, violated=()):
        super().__init__(message)
        self.violated = tuple(violated)


@dataclass(frozen=True)
class Annulus:
    r: float
    R: float

    def __post_init__(self):
        r, R = float(self.r), float(self.R)
        if not (0 < r < 1 < R):
            raise ValueError(f"need 0 < r < 1 < R, got r={r}, R={R}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "R", R)

    def weights(self, modes):
        return basis_weight(modes, self)

    def to_json(self):
        return {"r": self.r, "R": self.R}

    @classmethod
    def from_json(cls, data):
        return cls(data["r"], data["R"])

    def contains(self, z):
        return self.r < abs(z) < self.R


def log_basis_weight(n, a):
    """``log d_n`` with ``d_n = sqrt(r^(2n) + R^(2n))``, overflow-free."""
    n = np.asarray(n, dtype=float)
    x = 2 * n * np.log(a.r)
    y = 2 * n * np.log(a.R)
    hi = np.maximum(x, y)
    return 0.5 * (hi + np.log1p(np.exp(-np.abs(x - y))))


def basis_weight(n, a):
    """Normalisation ``d_n`` of the orthonormal basis ``e_n = z^n / d_n``."""
    n_arr = np.asarray(n, dtype=float)
    small = np.abs(n_arr) <= 200
    ns = np.where(small, n_arr, 0.0)
    direct = np.sqrt(a.r ** (2 * ns) + a.R ** (2 * ns))
    out = np.where(small, direct, np.exp(log_basis_weight(n_arr, a)))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class LaurentVector:
    """Element of H^2(A) truncated to modes ``-N..N``.

    ``coeffs[n + N]`` is the coefficient of ``e_n = z^n / d_n``.
    """

    annulus: Annulus
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or len(c) % 2 != 1:
            raise ValueError("coefficient vector must have odd length 2N+1")
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self):
        return (len(self.coeffs) - 1) // 2

    @property
    def modes(self):
        return np.arange(-self.N, self.N + 1)

    def raw(self):
        """Plain Laurent coefficients ``f_n`` of ``f = sum f_n z^n``."""
        return self.coeffs / self.annulus.weights(self.modes)

    @classmethod
    def from_raw(cls, annulus, raw):
        raw = np.asarray(raw, dtype=complex)
        N = (len(raw) - 1) // 2
        return cls(annulus, raw * annulus.weights(np.arange(-N, N + 1)))

    @classmethod
    def basis(cls, annulus, N, n):
        c = np.zeros(2 * N + 1, dtype=complex)
        c[n + N] = 1.0
        return cls(annulus, c)

    @classmethod
    def from_samples(cls, annulus, samples, N):
        """Project samples at the M-th roots of unity onto modes ``-N..N``."""
        samples = np.asarray(samples, dtype=complex)
        M = len(samples)
        if M < 2 * N + 1:
            raise ValueError("need at least 2N+1 samples")
        chat = dft_forward(samples)
        modes = np.arange(-N, N + 1)
        return cls.from_raw(annulus, chat[modes % M])

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        raw = self.raw()
        return sum(c * z ** int(n) for n, c in zip(self.modes, raw))

    def padded(self, N):
        if N < self.N:
            raise ValueError("cannot pad to a smaller order")
        c = np.zeros(2 * N + 1, dtype=complex)
        c[N - self.N: N + self.N + 1] = self.coeffs
        return LaurentVector(self.annulus, c)

    def norm(self):
        return hardy_norm(self)


def hardy_norm(v):
    return float(np.sqrt(np.sum(np.abs(v.coeffs) ** 2)))


@dataclass(frozen=True)
class BoundaryPair:
    """Split of a function on a circle into its two holomorphic parts.

    ``inner[n]`` is the coefficient of ``z^n`` (n >= 0, holomorphic inside);
    ``outer[n-1]`` is the coefficient of ``z^-n`` (n >= 1, vanishing at
    infinity).
    """

    inner: np.ndarray
    outer: np.ndarray
    radius: float = 1.0

    def evaluate_inner(self, z):
        z = np.asarray(z, dtype=complex)
        return np.polynomial.polynomial.polyval(z, self.inner)

    def evaluate_outer(self, z):
        z = np.asarray(z, dtype=complex)
        return np.polynomial.polynomial.polyval(1 / z, np.concatenate([[0], self.outer]))

    def __call__(self, z):
        return self.evaluate_inner(z) + self.evaluate_outer(z)


def project_split(samples, radius=1.0):
    """Split equispaced samples on ``|z| = radius`` into ``g_+`` and ``g_-``.

    Nonnegative DFT modes go to ``g_+``, negative ones to ``g_-`` (the
    Nyquist mode of an even-length grid counts as negative). Coefficients are
    rescaled to plain monomial coefficients at that radius.
    """
    samples = np.asarray(samples, dtype=complex)
    M = len(samples)
    chat = dft_forward(samples)
    freqs = np.fft.fftfreq(M, 1.0 / M).astype(int)
    pos = np.sort(freqs[freqs >= 0])
    neg = np.sort(freqs[freqs < 0])[::-1]  # -1, -2, ...
    inner = chat[pos % M] / radius ** pos.astype(float)
    outer = chat[neg % M] / radius ** neg.astype(float)
    return BoundaryPair(inner, outer, float(radius))


# admissibility ----------------------------------------------------------


def _pole_distance(b):
    """``min 1/|a_i|`` over nonzero zeros (inf when all vanish)."""
    mods = np.abs(b.a)
    with np.errstate(over="ignore", divide="ignore"):
        inv = 1 / mods[mods > 0]
    return float(inv.min()) if inv.size else np.inf


def _circle_extremes(b, rho, M):
    z = rho * np.exp(2j * np.pi * np.arange(M) / M)
    mod = np.abs(b(z))
    return float(mod.max()), float(mod.min())


def check_annulus(b, a, M=4096, margin=DEFAULT_MARGIN):
    """Names of the admissibility inequalities violated by ``a``.

    The sampled sup of |B| on the inner circle must stay below ``r`` and the
    sampled inf on the outer circle above ``R``, each after inflating the
    sampled extremum by ``margin``.
    """
    violated = []
    amax = float(np.max(np.abs(b.a)))
    if not a.r > amax:
        violated.append(f"r={a.r:.6g} <= max|a_i|={amax:.6g}")
    pole_min = _pole_distance(b)
    if not a.R < pole_min:
        violated.append(f"R={a.R:.6g} >= min 1/|a_i|={pole_min:.6g}")
    if violated:
        return violated
    sup_inner, _ = _circle_extremes(b, a.r, M)
    _, inf_outer = _circle_extremes(b, a.R, M)
    if not sup_inner * (1 + margin) < a.r:
        violated.append(f"sup|B| on |z|=r: {sup_inner:.6g}*(1+{margin}) >= r={a.r:.6g}")
    if not inf_outer > a.R * (1 + margin):
        violated.append(f"inf|B| on |z|=R: {inf_outer:.6g} <= R*(1+{margin})={a.R * (1 + margin):.6g}")
    return violated


def _inner_ok(b, r, M, margin):
    sup_inner, _ = _circle_extremes(b, r, M)
    return sup_inner * (1 + margin) < r, sup_inner / r


def _outer_ok(b, R, M, margin):
    _, inf_outer = _circle_extremes(b, R, M)
    return inf_outer > R * (1 + margin), inf_outer / R


def _search_radius(ok, start, lo, hi):
    """First certified radius, trying ``start`` then a grid on (lo, hi) by distance to start."""
    good, best = ok(start)
    if good:
        return start, best
    grid = lo + (hi - lo) * np.arange(1, SEARCH_BUDGET + 1) / (SEARCH_BUDGET + 1)
    for rho in grid[np.argsort(np.abs(grid - start), kind="stable")]:
        good, ratio = ok(float(rho))
        if good:
            return float(rho), ratio
        best = ratio if abs(ratio - 1) > abs(best - 1) else best
    return None, best


def admissible_annulus(b, M=4096, margin=DEFAULT_MARGIN):
    """Annulus ``r < 1 < R`` on which the transfer operator of ``b`` is compact.

    Certifies ``sup_{|z|=r}|B| < r`` and ``inf_{|z|=R}|B| > R`` by ``M``-point
    sampling with a relative safety ``margin`` on the sampled extremum, with
    ``max|a_i| < r`` and ``R < min 1/|a_i|``. The symmetric choice
    ``R = 1/r`` is preferred.
    """
    amax = float(np.abs(b.a).max())
    pole_min = _pole_distance(b)

    r0 = (1 + amax) / 2
    r, ratio_in = _search_radius(lambda x: _inner_ok(b, x, M, margin), r0, amax, 1.0)
    if r is None:
        raise AnnulusError(
            "no admissible annulus found: sup|B|/r on inner circles never drops "
            f"below 1/(1+{margin}) (closest ratio {ratio_in:.6g})",
            violated=["sup_{|z|=r}|B| * (1+margin) < r"],
        )
    R_sym = 1 / r
    if R_sym < pole_min and _outer_ok(b, R_sym, M, margin)[0]:
        return Annulus(r, R_sym)
    hi = pole_min if np.isfinite(pole_min) else 4.0
    R0 = (1 + pole_min) / 2 if np.isfinite(pole_min) else 2.0
    R, ratio_out = _search_radius(lambda x: _outer_ok(b, x, M, margin), R0, 1.0, hi)
    if R is None:
        raise AnnulusError(
            "no admissible annulus found: inf|B|/R on outer circles never exceeds "
            f"1+{margin} (closest ratio {ratio_out:.6g})",
            violated=["inf_{|z|=R}|B| > R * (1+margin)"],
        )
    return Annulus(r, R)


def diagnostic_radii(a):
    """Intermediate radii ``r' = (r+1)/2`` and ``R' = (R+1)/2``."""
    return (a.r + 1) / 2, (a.R + 1) / 2


def truncation_tail_bound(N, inner, outer):
    """Bound on the sup-norm error of dropping modes ``|n| >= N``.

    ``inner = (r, r1)`` and ``outer = (R1, R)`` with ``r < r1 < 1 < R1 < R``;
    the bound holds uniformly on the smaller annulus ``r1 < |z| < R1`` for
    unit-norm elements of H^2 on the larger one.
    """
    r, r1 = inner
    R1, R = outer
    if not (0 < r < r1 < 1 < R1 < R):
        raise ValueError(f"need r < r' < 1 < R' < R, got {r}, {r1}, {R1}, {R}")
    q_out = (R1 / R) ** 2
    q_in = (r / r1) ** 2
    return float(np.sqrt(q_out ** N / (1 - q_out) + q_in ** N / (1 - q_in)))
