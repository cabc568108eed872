"""Low-level numerical primitives: DFT, polynomial roots, dense eigenvalues.

Everything here is a pure function of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# |c_d| below this fraction of max|c_k| is treated as a vanishing leading coefficient
DEFLATION_THRESHOLD = 1e-13
ROOT_RESIDUAL_TOL = 1e-10


class NumericsError(RuntimeError):
    """Base class for failures of an iterative numerical procedure."""


class RootFindingError(NumericsError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class EigenSolverError(NumericsError):
    pass


def dft_forward(samples):
    """Fourier coefficients of equispaced samples on the unit circle.

    Returns ``c[k] = (1/M) * sum_j samples[j] * exp(-2*pi*i*j*k/M)``, so that
    ``c[k]`` is the trapezoid approximation of the k-th Fourier coefficient.
    Negative modes live at the end of the array (index ``k % M``).
    """
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim == 0 or samples.shape[-1] < 1:
        raise ValueError("dft_forward needs at least one sample")
    return np.fft.fft(samples, axis=-1) / samples.shape[-1]


def dft_inverse(coeffs):
    """Evaluate ``sum_k c[k] z_j**k`` at the M-th roots of unity ``z_j``."""
    coeffs = np.asarray(coeffs, dtype=complex)
    return np.fft.ifft(coeffs, axis=-1) * coeffs.shape[-1]


@dataclass(frozen=True)
class Roots:
    """Roots of a polynomial after deflation of vanishing leading terms.

    ``at_infinity`` counts the stripped leading coefficients, each of which
    corresponds to one root escaping to infinity.
    """

    values: np.ndarray
    at_infinity: int = 0

    @property
    def degree(self):
        return len(self.values)


def _horner(coeffs, z):
    """Value and derivative of a low-to-high coefficient polynomial."""
    p = np.zeros_like(z, dtype=complex)
    dp = np.zeros_like(z, dtype=complex)
    for c in coeffs[::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _residual_scale(coeffs, z):
    # size of the terms being summed; the residual bound is relative to this,
    # which reduces to max|c_k| (up to degree) for |z| <= 1
    powers = np.maximum(1.0, np.abs(z))[..., None] ** np.arange(len(coeffs))
    return (np.abs(coeffs) * powers).sum(axis=-1)


def poly_roots(coeffs, polish_steps=8):
    """All roots of ``sum_k coeffs[k] z**k``.

    Companion-matrix eigenvalues followed by Newton polishing. Leading
    coefficients with ``|c_d| < 1e-13 max|c_k|`` are stripped first.

    Raises
    ------
    ValueError
        If every coefficient is zero ("undefined roots").
    RootFindingError
        If a polished root still has ``|p(z)| > 1e-10 * scale``; the best
        iterate is attached as ``err.best``.
    """
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    cmax = np.abs(c).max() if c.size else 0.0
    if cmax == 0.0:
        raise ValueError("undefined roots: zero polynomial")
    degree = len(c) - 1
    while degree > 0 and abs(c[degree]) < DEFLATION_THRESHOLD * cmax:
        degree -= 1
    at_inf = len(c) - 1 - degree
    c = c[: degree + 1]
    if degree == 0:
        return Roots(np.empty(0, dtype=complex), at_inf)

    z = np.polynomial.polynomial.polyroots(c).astype(complex)
    for _ in range(polish_steps):
        p, dp = _horner(c, z)
        ok = dp != 0
        step = np.where(ok, p / np.where(ok, dp, 1.0), 0.0)
        z_new = z - step
        # keep a Newton step only if it does not increase the residual
        p_new, _ = _horner(c, z_new)
        z = np.where(np.abs(p_new) <= np.abs(p), z_new, z)
    residual = np.abs(_horner(c, z)[0])
    bound = ROOT_RESIDUAL_TOL * _residual_scale(c, z)
    if np.any(residual > bound):
        raise RootFindingError(
            f"root polish did not converge (max residual {residual.max():.3e})", best=z
        )
    return Roots(z, at_inf)


def eig_dense(m):
    """Eigenvalues (with algebraic multiplicity) of a dense square matrix.

    LAPACK ``geev`` with balancing; balancing isolates eigenvalues exactly for
    matrices that are triangular up to a permutation.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"eig_dense needs a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("eig_dense: matrix has non-finite entries")
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue iteration failed: {exc}") from exc


def sort_by_modulus(values):
    """Order by decreasing modulus, ties broken by argument (deterministic)."""
    values = np.asarray(values, dtype=complex)
    # moduli equal to ~13 significant digits count as ties
    mant, expo = np.frexp(np.abs(values))
    key = np.ldexp(np.round(mant, 13), expo)
    order = np.lexsort((np.angle(values), -key))
    return values[order]
