"""Finite sections of the transfer operator by collocation on the unit circle."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .hardy import Annulus, LaurentVector
from .numerics import NumericsError, dft_forward, poly_roots

BRANCH_RESIDUAL_TOL = 1e-10
UNIT_CIRCLE_TOL = 1e-9
# DFT coefficients below this fraction of the uncancelled sample magnitude are roundoff
NOISE_FLOOR = 1e-14
ALIASING_TOL = 1e-10


class BranchError(NumericsError):
    pass


@dataclass(frozen=True)
class BranchSet:
    """All preimages ``w_k`` of a point ``z`` and the branch derivatives ``1/B'(w_k)``."""

    z: complex
    preimages: np.ndarray
    derivatives: np.ndarray

    @property
    def K(self):
        return len(self.preimages)


def inverse_branches(b, z, polish_steps=3):
    """Solve ``B(w) = z``; the ``n`` roots ordered by argument."""
    z = complex(z)
    if abs(abs(z) - 1) > UNIT_CIRCLE_TOL:
        raise ValueError(f"base point must lie on the unit circle, |z|={abs(z)!r}")
    coeffs = P.polysub(b.numerator(), z * b.denominator())
    w = poly_roots(coeffs).values
    if len(w) != b.degree:
        raise BranchError(f"branch polynomial degenerated to degree {len(w)} at z={z!r}")
    for _ in range(polish_steps):
        w = w - (b(w) - z) / b.derivative(w)
    residual = np.abs(b(w) - z)
    if residual.max() > BRANCH_RESIDUAL_TOL:
        raise BranchError(f"branch residual {residual.max():.3e} at z={z!r}")
    if np.abs(np.abs(w) - 1).max() > UNIT_CIRCLE_TOL:
        raise BranchError(f"preimage left the unit circle at z={z!r}")
    w = w[np.argsort(np.mod(np.angle(w), 2 * np.pi))]
    return BranchSet(z, w, 1 / b.derivative(w))


@dataclass(frozen=True)
class TransferMatrix:
    """Finite section of the transfer operator in the basis ``e_n = z^n/d_n``.

    ``matrix[n + N, m + N]`` is ``L_{n,m} = (d_n/d_m) * [n-th Fourier
    coefficient of L(z^m)]``. ``flagged_columns`` lists modes ``m`` whose
    discarded Fourier energy exceeded the aliasing tolerance.
    """

    annulus: Annulus
    N: int
    M: int
    matrix: np.ndarray
    flagged_columns: tuple = field(default_factory=tuple)

    @property
    def modes(self):
        return np.arange(-self.N, self.N + 1)

    def apply(self, v):
        if v.N != self.N:
            v = v.padded(self.N)
        return LaurentVector(self.annulus, self.matrix @ v.coeffs)

    def meta(self):
        return {"r": self.annulus.r, "R": self.annulus.R, "N": self.N, "M": self.M}


def default_M(N):
    return 4 * (2 * N + 1)


def branch_table(b, M):
    """Preimages and branch derivatives at the M-th roots of unity, shape (M, n)."""
    zj = np.exp(2j * np.pi * np.arange(M) / M)
    sets = [inverse_branches(b, z) for z in zj]
    W = np.array([s.preimages for s in sets])
    dphi = np.array([s.derivatives for s in sets])
    return W, dphi


def transfer_matrix(b, a, N, M=None, branches=None):
    """Assemble the ``(2N+1) x (2N+1)`` finite section of the transfer operator.

    For each ``m`` the function ``(L z^m)(z) = sum_k phi_k'(z) phi_k(z)^m``
    is sampled at the M-th roots of unity, transformed, truncated to modes
    ``-N..N`` and rescaled to the orthonormal basis.
    """
    M = default_M(N) if M is None else int(M)
    if M < default_M(N):
        raise ValueError(f"need M >= 4(2N+1) = {default_M(N)}, got {M}")
    W, dphi = branch_table(b, M) if branches is None else branches
    modes = np.arange(-N, N + 1)
    d = a.weights(modes)
    keep = np.zeros(M, dtype=bool)
    keep[modes % M] = True

    L = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
    flagged = []
    for j, m in enumerate(modes):
        terms = dphi * W ** int(m)
        chat = dft_forward(terms.sum(axis=1))
        scale = np.abs(terms).sum(axis=1).max()
        chat[np.abs(chat) < NOISE_FLOOR * scale] = 0.0
        energy = np.sum(np.abs(chat) ** 2)
        if energy > 0 and np.sum(np.abs(chat[~keep]) ** 2) > ALIASING_TOL * energy:
            flagged.append(int(m))
        L[:, j] = chat[modes % M] * d / d[j]
    return TransferMatrix(a, N, M, L, tuple(flagged))
