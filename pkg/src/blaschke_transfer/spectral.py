"""Matching computed spectra against the closed form, cross-validation, convergence."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import linregress

from .adjoint import adjoint_block_matrix
from .blaschke import PredictedSpectrum, closed_form_spectrum, fixed_points
from .hardy import admissible_annulus
from .numerics import eig_dense, sort_by_modulus
from .transfer import default_M, transfer_matrix

EIGEN_FLOOR = 1e-12
ERROR_FLOOR = 1e-13
DEFAULT_K = 7


def clean_eigenvalues(values):
    """Sort by modulus and identify eigenvalues below the noise floor with 0."""
    values = np.asarray(values, dtype=complex).copy()
    values[np.abs(values) < EIGEN_FLOOR] = 0.0
    return sort_by_modulus(values)


@dataclass
class SpectrumReport:
    computed: np.ndarray
    predicted: PredictedSpectrum
    matched_pairs: list
    max_match_error: float
    N: int | None = None
    M: int | None = None
    annulus: object = None
    seed: int | None = None
    extra: dict = field(default_factory=dict)


def _greedy_match(computed, targets):
    pool = list(range(len(computed)))
    pairs = []
    for t in targets:
        i = min(pool, key=lambda j: abs(computed[j] - t))
        pool.remove(i)
        pairs.append((complex(computed[i]), complex(t), float(abs(computed[i] - t))))
    return pairs


def match_spectrum(computed, predicted, k=DEFAULT_K):
    """Pair the ``k`` leading predicted eigenvalues with distinct computed ones.

    Greedy: predicted entries are processed by decreasing modulus, each
    taking the nearest unused computed eigenvalue, so a double eigenvalue
    consumes two computed values.
    """
    if k > len(predicted.values):
        raise ValueError(f"k={k} exceeds the {len(predicted.values)} available predictions")
    computed = clean_eigenvalues(computed)
    if len(computed) < k:
        raise ValueError(f"only {len(computed)} computed eigenvalues for k={k}")
    pairs = _greedy_match(computed, predicted.values[:k])
    err = max(p[2] for p in pairs) if pairs else 0.0
    return SpectrumReport(computed, predicted, pairs, err)


def direct_eigenvalues(b, a, N, M=None):
    return clean_eigenvalues(eig_dense(transfer_matrix(b, a, N, M).matrix))


def adjoint_eigenvalues(b, a, N, M=None):
    return clean_eigenvalues(eig_dense(adjoint_block_matrix(b, a, N, M).matrix))


def cross_validate(b, a, N, M=None, k=10, a_adjoint=None):
    """Largest discrepancy between the top-``k`` spectra of both discretisations.

    ``a_adjoint`` lets the adjoint side use a different annulus.
    """
    direct = direct_eigenvalues(b, a, N, M)
    adj = adjoint_eigenvalues(b, a if a_adjoint is None else a_adjoint, N, M)
    return spectrum_discrepancy(direct, adj, k)


def spectrum_discrepancy(direct, adjoint, k=10):
    """Top-``k`` discrepancy between two computed spectra (both cleaned and sorted)."""
    if min(len(direct), len(adjoint)) < k:
        raise ValueError(f"need at least {k} eigenvalues, have {min(len(direct), len(adjoint))}")
    pairs = _greedy_match(direct, adjoint[:k])
    return max(p[2] for p in pairs)


@dataclass
class ConvergenceResult:
    table: list                 # (N, error) with errors clamped at the floor
    slope: float | None
    intercept: float | None
    r_squared: float | None
    fitted_points: int

    @property
    def status(self):
        return "exponential" if self.slope is not None else "superexponential/floor"

    def to_csv(self):
        lines = ["N,error"] + [f"{n},{e!r}" for n, e in self.table]
        return "\n".join(lines) + "\n"

    def summary(self):
        if self.slope is None:
            return f"fit: none ({self.fitted_points} points above floor {ERROR_FLOOR:g}); status={self.status}"
        return (f"fit: slope={self.slope:.6g} per N, R^2={self.r_squared:.6f}, "
                f"points={self.fitted_points}; status={self.status}")


def convergence_study(b, N_list, M_rule=default_M, annulus=None, k=5):
    """Match error of the direct finite section against the closed form, per N.

    Errors below ``1e-13`` are clamped and left out of the least-squares fit
    of ``log(error)`` against ``N``; with fewer than three points above the
    floor no fit is reported.
    """
    N_list = [int(n) for n in N_list]
    if len(N_list) < 4 or any(b2 <= b1 for b1, b2 in zip(N_list, N_list[1:])):
        raise ValueError("N_list must be increasing with at least 4 entries")
    a = annulus or admissible_annulus(b)
    predicted = closed_form_spectrum(b, k, fixed_points(b))
    table = []
    for N in N_list:
        rep = match_spectrum(direct_eigenvalues(b, a, N, M_rule(N)), predicted, k)
        table.append((N, max(rep.max_match_error, ERROR_FLOOR)))
    pts = [(n, e) for n, e in table if e > ERROR_FLOOR]
    if len(pts) < 3:
        return ConvergenceResult(table, None, None, None, len(pts))
    x = np.array([p[0] for p in pts], dtype=float)
    y = np.log([p[1] for p in pts])
    fit = linregress(x, y)
    return ConvergenceResult(table, float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2), len(pts))


@dataclass(frozen=True)
class TraceDiagnostic:
    matrix_trace: complex
    predicted_trace: complex
    deviation: float


def predicted_trace(lam):
    """Sum of ``{l^n, n>=0} + {conj(l)^n, n>=1}``: ``1/(1-l) + conj(l)/(1-conj(l))``."""
    lam = complex(lam)
    if abs(lam) >= 1:
        raise ValueError("|multiplier| >= 1 cannot occur for an expanding map")
    return 1 / (1 - lam) + np.conj(lam) / (1 - np.conj(lam))


def trace_diagnostic(b, a, N, M=None, fixed=None):
    fp = fixed or fixed_points(b)
    tr = complex(np.trace(transfer_matrix(b, a, N, M).matrix))
    pred = complex(predicted_trace(fp.interior_multiplier))
    return TraceDiagnostic(tr, pred, float(abs(tr - pred)))
