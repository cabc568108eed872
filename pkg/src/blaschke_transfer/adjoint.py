"""Adjoint representation of the transfer operator via composition operators.

The dual of H^2(A) is identified with pairs (h1, h2), h1 holomorphic on the
inner disk ``|z| < r`` and h2 holomorphic on ``|z| > R`` vanishing at infinity,
acting by contour integration on the two boundary circles. In this picture
the adjoint is block upper triangular:

    [ C_B on the disk        row of constants B(inf)^-m ]
    [ 0                      Pi_- (h o B) on exterior   ]

Everything on the dual side uses plain monomial coefficients; the ``e_n``
weights only enter through :func:`pairing_functional`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hardy import AnnulusError, LaurentVector
from .numerics import dft_forward, eig_dense
from .transfer import ALIASING_TOL, NOISE_FLOOR, default_M, transfer_matrix


@dataclass(frozen=True)
class CompositionMatrix:
    """Matrix of ``h -> h o B`` on a disk (or, in the chart w = 1/z, the exterior).

    For ``domain == "disk"`` the basis is ``z^0..z^N``. For ``"exterior"``
    the basis is ``z^-1..z^-N``, ``plus_row[m-1]`` holds the constant term of
    ``z^-m o B`` and ``full`` is the ``(N+1) x (N+1)`` matrix including the
    constant mode.
    """

    domain: str
    matrix: np.ndarray
    radius: float
    plus_row: np.ndarray | None = None
    full: np.ndarray | None = None
    flagged_columns: tuple = field(default_factory=tuple)

    @property
    def N(self):
        return self.matrix.shape[0] - (1 if self.domain == "disk" else 0)


def taylor_power_matrix(f, rho, N, M=None):
    """Columns ``n = 0..N``: Taylor coefficients ``0..N`` of ``f(z)^n`` at 0.

    ``f`` is sampled on ``|z| = rho``, which must be mapped strictly inside
    itself. Returns ``(matrix, flagged_columns)``.
    """
    M = default_M(N) if M is None else int(M)
    z = rho * np.exp(2j * np.pi * np.arange(M) / M)
    fz = f(z)
    if np.abs(fz).max() >= rho:
        raise AnnulusError(
            f"map does not send |z|={rho:.6g} inside itself (max |f| = {np.abs(fz).max():.6g})",
            violated=["f(D_rho) compactly inside D_rho"],
        )
    k = np.arange(N + 1)
    # a power series has no negative modes; energy in those bins is wrap-around
    wrapped = np.fft.fftfreq(M, 1.0 / M) < 0
    out = np.zeros((N + 1, N + 1), dtype=complex)
    flagged = []
    power = np.ones(M, dtype=complex)
    for n in range(N + 1):
        chat = dft_forward(power)
        chat[np.abs(chat) < NOISE_FLOOR * np.abs(power).max()] = 0.0
        energy = np.sum(np.abs(chat) ** 2)
        if energy > 0 and np.sum(np.abs(chat[wrapped]) ** 2) > ALIASING_TOL * energy:
            flagged.append(n)
        out[:, n] = chat[k] / rho ** k
        power = power * fz
    return out, tuple(flagged)


def composition_matrix_disk(b, a, N, M=None):
    mat, flagged = taylor_power_matrix(b, a.r, N, M)
    return CompositionMatrix("disk", mat, a.r, flagged_columns=flagged)


def composition_matrix_exterior(b, a, N, M=None):
    """Composition with ``B`` on ``|z| > R``, built in the chart ``w = 1/z``.

    There ``z^-m o B`` becomes ``g(w)^m`` with ``g(w) = 1/B(1/w)``, so the
    disk code applies verbatim with ``g`` sampled on ``|w| = 1/R``.
    """
    g = b.reflected()
    full, flagged = taylor_power_matrix(g, 1 / a.R, N, M)
    return CompositionMatrix(
        "exterior", full[1:, 1:], a.R, plus_row=full[0, 1:].copy(), full=full,
        flagged_columns=tuple(m for m in flagged if m > 0),
    )


@dataclass(frozen=True)
class AdjointBlockMatrix:
    """Adjoint on the dual basis ``(z^0..z^N ; z^-1..z^-N)``."""

    N: int
    matrix: np.ndarray
    disk: CompositionMatrix
    exterior: CompositionMatrix

    @property
    def disk_block(self):
        return self.matrix[: self.N + 1, : self.N + 1]

    @property
    def plus_block(self):
        return self.matrix[: self.N + 1, self.N + 1:]

    @property
    def lower_left(self):
        return self.matrix[self.N + 1:, : self.N + 1]

    @property
    def minus_block(self):
        return self.matrix[self.N + 1:, self.N + 1:]

    def apply(self, h1, h2):
        """Image of ``(h1, h2)`` given as monomial coefficient arrays."""
        v = np.concatenate([h1, h2]) @ self.matrix.T
        return v[: self.N + 1], v[self.N + 1:]


def adjoint_block_matrix(b, a, N, M=None):
    disk = composition_matrix_disk(b, a, N, M)
    ext = composition_matrix_exterior(b, a, N, M)
    top = np.zeros((N + 1, N), dtype=complex)
    top[0, :] = ext.plus_row
    mat = np.block([
        [disk.matrix, top],
        [np.zeros((N, N + 1), dtype=complex), ext.matrix],
    ])
    return AdjointBlockMatrix(N, mat, disk, ext)


def triangularity(cm, lam):
    """``(max above-diagonal modulus, max |diag - lam^n|)`` of a disk matrix.

    Meaningful when ``B(0) = 0``, where ``B^n = lam^n z^n + O(z^(n+1))``.
    """
    mat = cm.matrix
    upper = np.abs(np.triu(mat, 1)).max(initial=0.0)
    diag = np.complex128(lam) ** np.arange(mat.shape[0])
    return float(upper), float(np.abs(np.diag(mat) - diag).max())


def _multiset_distance(x, y):
    """Greedy pairing distance between two equally long eigenvalue lists."""
    pool = list(y)
    worst = 0.0
    for v in sorted(x, key=lambda t: -abs(t)):
        j = int(np.argmin([abs(v - w) for w in pool]))
        worst = max(worst, abs(v - pool.pop(j)))
    return float(worst)


def projected_spectrum_discrepancy(b, a, N, M=None):
    """Compare eig of the Pi_- exterior block with eig of the full exterior matrix minus one 1.

    Adding the constant mode adds exactly one eigenvalue 1 (``1 o B = 1``).
    """
    ext = composition_matrix_exterior(b, a, N, M)
    full = list(eig_dense(ext.full))
    full.pop(int(np.argmin(np.abs(np.asarray(full) - 1))))
    return _multiset_distance(eig_dense(ext.matrix), full)


def block_spectrum_discrepancy(adj):
    """Distance between eig of the assembled matrix and eig(disk) + eig(exterior)."""
    whole = eig_dense(adj.matrix)
    parts = np.concatenate([eig_dense(adj.disk_block), eig_dense(adj.minus_block)])
    return _multiset_distance(whole, parts)


def pairing_functional(h1, h2, f):
    """Value of the functional ``J(h1, h2)`` on ``f``.

    Residue evaluation of the two contour integrals: only terms with
    ``k + m = -1`` survive, giving ``sum_m h_m f_{-1-m}`` with ``f`` in plain
    Laurent coefficients. ``h1[m]`` multiplies ``z^m`` (m >= 0) and
    ``h2[m-1]`` multiplies ``z^-m`` (m >= 1).
    """
    raw = f.raw()
    N = f.N

    def fk(k):
        k = np.asarray(k)
        inside = np.abs(k) <= N
        return np.where(inside, raw[np.clip(k, -N, N) + N], 0.0)

    h1 = np.asarray(h1, dtype=complex)
    h2 = np.asarray(h2, dtype=complex)
    m1 = np.arange(len(h1))
    m2 = np.arange(1, len(h2) + 1)
    return complex(np.sum(h1 * fk(-1 - m1)) + np.sum(h2 * fk(m2 - 1)))


def random_dual_pair(a, N, rng):
    """Random ``(h1, h2)`` of unit norm in H^2(D_r) + H^2_0(D^inf_R), modes up to N."""
    u = rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1)
    u /= np.linalg.norm(u)
    h1 = u[: N + 1] / a.r ** np.arange(N + 1)
    h2 = u[N + 1:] * a.R ** np.arange(1, N + 1)
    return h1, h2


def random_laurent(a, N, rng, support=None):
    """Random unit-norm element of H^2(A) on modes ``-N..N`` (optionally a sub-support)."""
    c = rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1)
    if support is not None:
        modes = np.arange(-N, N + 1)
        c[~support(modes)] = 0.0
    return LaurentVector(a, c / np.linalg.norm(c))


def adjoint_identity_residual(b, a, N, trials=100, seed=0, M=None, pad=1, support=None):
    """Largest ``|l(L f) - (L' l)(f)|`` over random unit-norm inputs.

    Inputs live on modes up to ``N``; both matrices are assembled at order
    ``N + pad`` so that every output mode the pairing touches is present.
    ``pad = 0`` exposes the truncation error instead.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    Nb = N + pad
    T = transfer_matrix(b, a, Nb, M)
    A = adjoint_block_matrix(b, a, Nb, None if M is None else M)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        h1, h2 = random_dual_pair(a, N, rng)
        f = random_laurent(a, N, rng, support).padded(Nb)
        h1b = np.concatenate([h1, np.zeros(pad, dtype=complex)])
        h2b = np.concatenate([h2, np.zeros(pad, dtype=complex)])
        lhs = pairing_functional(h1b, h2b, T.apply(f))
        g1, g2 = A.apply(h1b, h2b)
        rhs = pairing_functional(g1, g2, f)
        worst = max(worst, abs(lhs - rhs))
    return worst


def _kernel_vector(a, z, N, inner):
    """``-K_z`` (inner probe) or ``K_z`` (outer probe) on modes ``-(N+1)..N+1``."""
    n = N + 1
    raw = np.zeros(2 * n + 1, dtype=complex)
    k = np.arange(N + 1)
    if inner:
        raw[(-k - 1) + n] = z ** k          # -1/(z-w) = sum_k z^k w^(-k-1)
    else:
        raw[k + n] = z ** (-k - 1.0)        # 1/(z-w) = sum_k w^k z^(-k-1)
    return LaurentVector.from_raw(a, raw)


def kernel_reconstruction_check(a, N, probes, h1=None, h2=None, seed=0, clearance=0.05):
    """Recover ``h1``/``h2`` from the functional ``J(h1, h2)`` via the Cauchy kernel.

    Probes must lie in ``|z| <= r - clearance`` or ``|z| >= R + clearance``.
    Returns the largest deviation between ``l(-K_z)`` and ``h1(z)`` (inner
    probes) or ``l(K_z)`` and ``h2(z)`` (outer probes).
    """
    if h1 is None or h2 is None:
        h1, h2 = random_dual_pair(a, N, np.random.default_rng(seed))
    h1 = np.asarray(h1, dtype=complex)
    h2 = np.asarray(h2, dtype=complex)
    order = max(len(h1) - 1, len(h2), 1)
    worst = 0.0
    for z in np.atleast_1d(probes):
        z = complex(z)
        if abs(z) <= a.r - clearance:
            l = pairing_functional(h1, h2, _kernel_vector(a, z, order, True))
            exact = np.polynomial.polynomial.polyval(z, h1)
        elif abs(z) >= a.R + clearance:
            l = pairing_functional(h1, h2, _kernel_vector(a, z, order, False))
            exact = np.polynomial.polynomial.polyval(1 / z, np.concatenate([[0], h2]))
        else:
            raise ValueError(
                f"probe {z!r} within {clearance} of the annulus {a.r:.4g} < |z| < {a.R:.4g}"
            )
        worst = max(worst, abs(l - exact))
    return worst
