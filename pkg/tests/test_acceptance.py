"""Acceptance criteria 1-12, each at its stated tolerance.

Every test records one PASS/FAIL line with the measured value; the lines are
printed together in the terminal summary. Criteria 9 and 10 are expected to
fail at the stated settings, see the decision notes; the tests further down
document why.
"""
import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import brentq

from blaschke_transfer.adjoint import (
    adjoint_identity_residual,
    composition_matrix_disk,
    projected_spectrum_discrepancy,
    triangularity,
)
from blaschke_transfer.blaschke import closed_form_spectrum, fixed_points
from blaschke_transfer.cli import build_parser, cmd_spectrum, config_from_args
from blaschke_transfer.hardy import LaurentVector, admissible_annulus
from blaschke_transfer.reports import from_pair
from blaschke_transfer.spectral import (
    ERROR_FLOOR,
    convergence_study,
    cross_validate,
    direct_eigenvalues,
    match_spectrum,
    predicted_trace,
    trace_diagnostic,
)
from blaschke_transfer.transfer import transfer_matrix

from conftest import ACCEPTANCE, CORE, MAPS

TESTS = Path(__file__).parent


def record(n, ok, detail):
    ACCEPTANCE[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    return ok


def spectrum_cli(capsys, *argv):
    cfg = config_from_args(build_parser().parse_args(["spectrum", *argv]))
    t0 = time.perf_counter()
    code = cmd_spectrum(cfg)
    elapsed = time.perf_counter() - t0
    rep = json.loads(capsys.readouterr().out)
    return code, rep, elapsed


def leading_and_rest(rep):
    ev = np.array([from_pair(p) for p in rep["eigenvalues"]])
    j = np.argmin(np.abs(ev - 1))
    return abs(ev[j] - 1), np.abs(np.delete(ev, j)).max()


def test_criterion_01_z2_spectrum(capsys):
    code, rep, elapsed = spectrum_cli(capsys, "--map", "z^2", "-N", "16")
    err1, rest = leading_and_rest(rep)
    ok = code == 0 and err1 < 1e-10 and rest < 1e-8 and elapsed < 5
    assert record(1, ok, f"|ev-1|={err1:.2e} (<1e-10), max|other|={rest:.2e} (<1e-8), {elapsed:.2f}s (<5s)")


def test_criterion_02_cubic_spectrum(capsys):
    code, rep, _ = spectrum_cli(capsys, "--map", '{"zeros": [[0, 0], [0, 0], [0.3, 0]]}', "-N", "24")
    err1, rest = leading_and_rest(rep)
    ok = code == 0 and err1 < 1e-8 and rest < 1e-6
    assert record(2, ok, f"|ev-1|={err1:.2e} (<1e-8), max|other|={rest:.2e} (<1e-6)")


def test_criterion_03_mu_family():
    out = {}
    for name, k in (("mu05", 5), ("mu_complex", 7)):
        b = MAPS[name]
        ev = direct_eigenvalues(b, admissible_annulus(b), 24)
        out[name] = match_spectrum(ev, closed_form_spectrum(b, k), k).max_match_error
    ok = out["mu05"] < 1e-8 and out["mu_complex"] < 1e-6
    assert record(3, ok, f"mu=0.5 top5 err={out['mu05']:.2e} (<1e-8), "
                         f"mu=0.3+0.2i top7 err={out['mu_complex']:.2e} (<1e-6)")


def test_criterion_04_adjoint_identity():
    res = {name: adjoint_identity_residual(MAPS[name], admissible_annulus(MAPS[name]), 16, trials=100, seed=0)
           for name in ("z2", "mu05")}
    ok = max(res.values()) < 1e-8
    assert record(4, ok, f"z^2 residual={res['z2']:.2e}, mu=0.5 residual={res['mu05']:.2e} (<1e-8, 100 trials)")


def test_criterion_05_cross_validation():
    res = {name: cross_validate(MAPS[name], admissible_annulus(MAPS[name]), 20, k=10) for name in CORE}
    ok = max(res.values()) < 1e-6
    assert record(5, ok, "top-10 discrepancy " + ", ".join(f"{k}={v:.2e}" for k, v in res.items()) + " (<1e-6)")


def test_criterion_06_projected_spectrum():
    b = MAPS["mu05"]
    d = projected_spectrum_discrepancy(b, admissible_annulus(b), 20)
    assert record(6, d < 1e-8, f"mu=0.5 N=20 multiset distance={d:.2e} (<1e-8)")


def test_criterion_07_triangularity():
    worst_up, worst_diag = 0.0, 0.0
    for name in ("z2", "cubic03", "mu05", "mu_complex"):
        b = MAPS[name]
        assert b(0.0) == 0
        up, diag = triangularity(composition_matrix_disk(b, admissible_annulus(b), 24), b.derivative(0.0))
        worst_up, worst_diag = max(worst_up, up), max(worst_diag, diag)
    ok = worst_up < 1e-12 and worst_diag < 1e-10
    assert record(7, ok, f"max above-diagonal={worst_up:.2e} (<1e-12), max |diag-lam^n|={worst_diag:.2e} (<1e-10)")


def circle_fixed_points_oracle(b, grid=20000):
    """Solutions of B(e^it) = e^it: sign changes of arg(B(e^it) e^-it), refined by brentq."""
    g = lambda s: np.angle(b(np.exp(1j * s)) * np.exp(-1j * s))
    t = 2 * np.pi * np.arange(grid + 1) / grid
    v = g(t)
    roots = list(t[:-1][v[:-1] == 0])
    for i in np.nonzero(v[:-1] * v[1:] < 0)[0]:
        if abs(v[i]) + abs(v[i + 1]) < 1:                   # a root, not the jump at +-pi
            roots.append(brentq(g, t[i], t[i + 1], xtol=1e-15))
    return np.exp(1j * np.array(roots))


def test_criterion_08_fixed_points():
    details, ok = [], True
    for name, b in MAPS.items():
        fp = fixed_points(b)
        pts = np.array([p for p, _ in fp.circle_points])
        mults = np.array([m for _, m in fp.circle_points])
        oracle = circle_fixed_points_oracle(b)
        n_rep = int(np.sum(np.abs(mults) > 1))
        conj_err = abs(fp.exterior_multiplier - np.conj(fp.interior_multiplier))
        match = len(oracle) == len(pts) and all(np.abs(pts - z).min() < 1e-9 for z in oracle)
        mult_err = np.abs(mults - b.derivative(pts)).max() if len(pts) else 0.0
        ok &= n_rep == len(pts) == b.degree - 1 and match and conj_err < 1e-9 and mult_err < 1e-9
        details.append(f"{name}: {n_rep}/{b.degree - 1} repelling, conj err={conj_err:.1e}")
    assert record(8, ok, "; ".join(details))


def test_criterion_09_convergence_fit():
    # expected FAIL: every error is at the roundoff floor, so there is nothing to fit
    b = MAPS["mu05"]
    t0 = time.perf_counter()
    res = convergence_study(b, [8, 12, 16, 20, 24], annulus=admissible_annulus(b))
    elapsed = time.perf_counter() - t0
    ok = res.slope is not None and res.slope < 0 and res.r_squared > 0.9 and elapsed < 60
    errs = ", ".join(f"{e:.1e}" for _, e in res.table)
    assert record(9, ok, f"slope={res.slope}, R^2={res.r_squared}, status={res.status}, "
                         f"errors=[{errs}], {elapsed:.2f}s (<60s)")


def test_criterion_10_trace():
    # expected FAIL: the N = 24 section misses the tail 2.5 * 2^-24 = 1.5e-7 of the trace
    n = np.arange(60)
    brute = np.sum(0.5 ** n) + np.sum(0.5 ** n[1:])        # predicted multiset {1, 1/2, 1/2, ...}
    assert abs(brute - predicted_trace(0.5)) < 1e-15
    b = MAPS["mu05"]
    t = trace_diagnostic(b, admissible_annulus(b), 24)
    dev = abs(t.matrix_trace - brute)
    assert record(10, dev < 1e-8, f"trace={t.matrix_trace.real:.12f}, |trace-3|={dev:.2e} (<1e-8), "
                                  f"60-term oracle={brute:.15f}")


def test_criterion_11_eigenfunction():
    b = MAPS["z2"]
    a = admissible_annulus(b)
    N = 16
    raw = np.zeros(2 * N + 1, dtype=complex)
    raw[N - 1] = 1                                           # z^-1
    f = LaurentVector.from_raw(a, raw)
    Lf = transfer_matrix(b, a, N).apply(f)
    err = np.abs(Lf.coeffs - f.coeffs).max()
    assert record(11, err < 1e-12, f"max coefficient error={err:.2e} (<1e-12)")


def test_criterion_12_property_suites():
    files = sorted(str(p) for p in TESTS.glob("test_*.py") if p.name not in ("test_acceptance.py",))
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *files],
                          capture_output=True, text=True, cwd=TESTS.parent)
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    assert record(12, proc.returncode == 0, f"{len(files)} module suites: {tail}")


# evidence for the two expected failures ----------------------------------


def test_criterion_09_errors_sit_at_floor():
    b = MAPS["mu05"]
    a = admissible_annulus(b)
    pred = closed_form_spectrum(b, 5)
    raw = [match_spectrum(direct_eigenvalues(b, a, N), pred, 5).max_match_error for N in (8, 12, 16, 20, 24)]
    # the structure is exactly triangular, so the finite sections are exact up to roundoff
    assert max(raw) < ERROR_FLOOR


def test_criterion_10_deficit_is_the_geometric_tail():
    b = MAPS["mu05"]
    a = admissible_annulus(b)
    for N in (16, 20, 24):
        assert trace_diagnostic(b, a, N).deviation == pytest.approx(2.5 * 2.0 ** -N, rel=1e-6)
    assert trace_diagnostic(b, a, 28).deviation < 1e-8


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
