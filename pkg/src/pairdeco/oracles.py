"""Verification suites: closed forms against independent numerics.

Three suites, each emitting structured per-check records suitable for
JSON reporting:

* fock: closed decoherence functions (free and reversal) against the
  truncated-Fock traces, plus structural identities.
* eigdist: convolution counts against multinomial and brute-force
  enumeration, exact moments, central-limit diagnostics.
* ksum: discrete mode sums against the continuum kernels.

Strong-decoherence grid points (|S| below ``EXTENDED_THRESHOLD``) are
re-evaluated with the double-double trace engine: the float64 path has
an absolute error floor near 1e-11 that would otherwise swamp the
relative comparison.
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction

import numpy as np

from . import eigdist, fock, magicecho, phonon, xprec
from .core import gypsum_config
from .decoherence import s_mn
from .magicecho import ReversalSchedule, reversal_exponent_k

#: below this closed-form modulus the float64 trace floor dominates
EXTENDED_THRESHOLD = 1e-2

#: documented verification grid (omega = 1 units)
GRID_LAMBDAS = (0.3, -0.3, 0.2j, -0.2j, 0.5)
GRID_BETAS = (0.1, 1.0, 5.0)
GRID_TIMES = (0.5, math.pi, 10.0)

QUICK_LAMBDAS = (0.3, -0.2j, 0.5)
QUICK_BETAS = (1.0, 5.0)
QUICK_TIMES = (0.5, math.pi)


def _fmt_c(z):
    return [float(z.real), float(z.imag)]


def _point_record(kind, inputs, closed, numeric, n_used, method, tol):
    rel = abs(numeric - closed) / abs(closed)
    return {
        "kind": kind,
        "inputs": inputs,
        "closed_form": _fmt_c(closed),
        "numeric": _fmt_c(numeric),
        "rel_err": float(rel),
        "n_max": int(n_used),
        "method": method,
        "passed": bool(rel <= tol),
    }


def _closed_reversal(lm, ln, omega, beta, sched):
    exponent = reversal_exponent_k(lm, ln, omega, beta, sched)
    return exponent.s_value()


def _numeric_point(kind, lm, ln, omega, beta, t, closed, tol):
    """One grid evaluation, escalating to extended precision as needed."""
    if kind == "free":
        if abs(closed) >= EXTENDED_THRESHOLD:
            numeric, n_used = fock.converged_s_free(lm, ln, omega, beta, t)
            method = "float64"
        else:
            n_used = xprec.tail_bound_n_max(beta, omega, (lm, ln),
                                            0.25 * tol * abs(closed))
            numeric = xprec.s_free_x(lm, ln, omega, beta, t, n_used)
            method = "extended"
    else:
        t_f, t_b, f_b = t / 3.0, 2.0 * t / 3.0, -0.5
        if abs(closed) >= EXTENDED_THRESHOLD:
            numeric, n_used = fock.converged_s_reversal(
                lm, ln, omega, beta, t_f, t_b, f_b)
            method = "float64"
        else:
            n_used = xprec.tail_bound_n_max(beta, omega, (lm, ln),
                                            0.25 * tol * abs(closed))
            numeric = xprec.s_reversal_x(lm, ln, omega, beta, t_f, t_b,
                                         f_b, n_used)
            method = "extended"
    return numeric, n_used, method


def fock_suite(tol=1e-8, quick=False, omega=1.0):
    """Closed-form vs truncated-Fock agreement over the documented grid.

    The grid times are interpreted as the forward interval; reversal
    points use the ideal split (t_B = 2 t_F, f_B = -1/2).  Unordered
    lambda pairs suffice: the conjugate-swap symmetry is asserted
    separately.
    """
    lambdas = QUICK_LAMBDAS if quick else GRID_LAMBDAS
    betas = QUICK_BETAS if quick else GRID_BETAS
    times = QUICK_TIMES if quick else GRID_TIMES
    checks = []
    for i, lm_u in enumerate(lambdas):
        for ln_u in lambdas[i:]:
            lm, ln = lm_u * omega, ln_u * omega
            for beta_w in betas:
                beta = beta_w / omega
                for wt in times:
                    t = wt / omega
                    inputs = {"lambda_m": _fmt_c(complex(lm)),
                              "lambda_n": _fmt_c(complex(ln)),
                              "omega": omega, "beta_omega": beta_w,
                              "omega_t": wt}
                    closed = s_mn([(omega, lm, ln)], beta, t)
                    numeric, n_used, method = _numeric_point(
                        "free", lm, ln, omega, beta, t, closed, tol)
                    checks.append(_point_record("free", inputs, closed,
                                                numeric, n_used, method, tol))
                    sched = ReversalSchedule(t_F=t / 3.0, t_B=2.0 * t / 3.0,
                                             f_B=-0.5)
                    closed_r = _closed_reversal(lm, ln, omega, beta, sched)
                    numeric_r, n_used_r, method_r = _numeric_point(
                        "reversal", lm, ln, omega, beta, t, closed_r, tol)
                    checks.append(_point_record("reversal", inputs, closed_r,
                                                numeric_r, n_used_r,
                                                method_r, tol))
    checks.extend(fock_structure_checks(omega=omega, quick=quick))
    return _report("fock", checks)


def fock_structure_checks(omega=1.0, quick=False):
    """Identity checks that need no closed-form comparison."""
    checks = []
    beta = 1.0 / omega
    lambdas = (0.3 * omega, -0.2j * omega, 0.5 * omega)
    mode = fock.TruncatedMode(
        fock.cutoff_schedule(lambdas, omega, beta)[1], omega)

    def record(name, value, bound):
        checks.append({"kind": name, "value": float(value),
                       "bound": float(bound),
                       "passed": bool(value <= bound)})

    # conjugate-swap symmetry of the free trace
    s_ab = fock.numeric_s_free(lambdas[0], lambdas[1], mode, beta, 1.3)
    s_ba = fock.numeric_s_free(lambdas[1], lambdas[0], mode, beta, 1.3)
    record("conjugate_symmetry", abs(s_ab - s_ba.conjugate()), 1e-12)

    # equal eigenvalues give a pure phase
    s_eq = fock.numeric_s_free(lambdas[0], lambdas[0], mode, beta, 2.0)
    record("pure_phase_equal_lambda", abs(abs(s_eq) - 1.0), 1e-10)

    # modulus bound
    record("modulus_bound", abs(s_ab) - 1.0, 1e-8)

    # f_B = 1 reversal equals free evolution over the total time
    for t_f, t_b in ((0.4 / omega, 0.9 / omega), (1.0 / omega, 2.0 / omega)):
        r1 = fock.numeric_s_reversal(lambdas[0], lambdas[2], mode, beta,
                                     t_f, t_b, 1.0)
        r2 = fock.numeric_s_free(lambdas[0], lambdas[2], mode, beta,
                                 t_f + t_b)
        record("reversal_additivity", abs(r1 - r2), 1e-12)

    # t_B = 0 degenerates to the free trace
    r3 = fock.numeric_s_reversal(lambdas[0], lambdas[2], mode, beta,
                                 0.7 / omega, 0.0, -0.5)
    r4 = fock.numeric_s_free(lambdas[0], lambdas[2], mode, beta, 0.7 / omega)
    record("reversal_t_B_zero", abs(r3 - r4), 1e-12)

    # displaced-operator identity on interior blocks
    for f in (1.0, -0.5):
        for lam in lambdas:
            res = fock.displaced_identity_residual(lam, mode, f)
            record("displaced_identity", res, 1e-12 * omega)
    return checks


def eigdist_suite(max_n=20):
    """Exact-count cross-checks and central-limit diagnostics."""
    checks = []

    def record(name, passed, **extra):
        entry = {"kind": name, "passed": bool(passed)}
        entry.update(extra)
        checks.append(entry)

    # N=2 against brute-force enumeration over 4^2 configurations
    kappas = (1, 1, -2, 0)
    brute = {}
    for k1 in kappas:
        for k2 in kappas:
            brute[k1 + k2] = brute.get(k1 + k2, 0) + 1
    record("enumeration_N2", eigdist.exact_counts(2).counts == brute)

    for n in (2, 3, 8):
        record("convolution_vs_multinomial",
               eigdist.exact_counts(n).counts
               == eigdist.multinomial_counts(n).counts, N=n)

    for n in (4, 8, 12, 16, 20):
        table = eigdist.exact_counts(n)
        mean, var = eigdist.dist_moments(table)
        record("exact_moments",
               mean == 0 and var == Fraction(3 * n, 2)
               and table.total() == 4**n, N=n)
        support = table.support()
        record("support_bounds",
               support[0] == -2 * n and support[-1] == n
               and table.counts[-2 * n] == 1
               and table.counts[n] == 2**n, N=n)

    distances = [eigdist.kolmogorov_distance(eigdist.exact_counts(n))
                 for n in (4, 8, 12, 16, 20)]
    record("kolmogorov_non_increasing",
           all(b <= a for a, b in zip(distances, distances[1:])),
           distances=[float(d) for d in distances])

    # Gaussian-envelope validity at desk scale: exact N=12 distribution
    # in the dephasing average vs the matched-sigma Gaussian
    cfg = gypsum_config()
    rates = phonon.rate_constants(cfg)
    table = eigdist.exact_counts(12)
    sigma = math.sqrt(1.5 * 12)
    rate = 4.0 * math.pi * rates.nuD * 3.0
    tau_small = 1.0 / (2.0 * math.sqrt(2.0) * math.pi * rates.nuD * sigma)
    worst = max(
        abs(abs(eigdist.exact_envelope(table, rate, tt))
            - eigdist.gaussian_envelope(sigma, rate, tt))
        for tt in np.linspace(0.0, 2.0 * tau_small, 201)
    )
    record("gaussian_envelope_N12", worst < 0.05, max_deviation=float(worst))
    return _report("eigdist", checks)


def ksum_suite(tol=0.02, n1=100000):
    """Discrete k-sums against the continuum kernels at gypsum scale.

    gamma is compared inside the continuum window (its closed form is
    the linear-in-t regime, which saturates once t exceeds the longest
    mode period).  epsilon and zeta are compared at 1 us where their
    closed forms remain valid.  At the lattice zeros x = a, 3a the
    closed zeta is a cancellation remainder orders of magnitude below
    the kernel scale, so those two points are measured relative to the
    x = 0 kernel magnitude.
    """
    cfg = gypsum_config(N1=n1)
    checks = []

    def record(name, closed, numeric, rel, **extra):
        entry = {"kind": name, "closed_form": float(closed),
                 "numeric": float(numeric), "rel_err": float(rel),
                 "passed": bool(rel <= tol)}
        entry.update(extra)
        checks.append(entry)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        t_window = 2e-10
        g_d, _, _ = phonon.discrete_kernel_sums(cfg, t_window, 0.0)
        g_c, _ = phonon.closed_kernels(cfg, t_window)
        record("gamma_window", g_c, g_d, abs(g_d - g_c) / abs(g_c),
               t=t_window)

        t_long = 1e-6
        _, e_d, z_d0 = phonon.discrete_kernel_sums(cfg, t_long, 0.0)
        _, e_c = phonon.closed_kernels(cfg, t_long)
        record("epsilon", e_c, e_d, abs(e_d - e_c) / abs(e_c), t=t_long)
        z_c0 = phonon.zeta_closed(cfg, 0.0, t_long)
        record("zeta_x0", z_c0, z_d0, abs(z_d0 - z_c0) / abs(z_c0), t=t_long)
        for mult in (1.0, 3.0):
            x = mult * cfg.a
            _, _, z_d = phonon.discrete_kernel_sums(cfg, t_long, x)
            z_c = phonon.zeta_closed(cfg, x, t_long)
            record("zeta_lattice_zero", z_c, z_d,
                   abs(z_d - z_c) / abs(z_c0), t=t_long, x_over_a=mult,
                   scale=float(z_c0))

        # window consistency: refining the grid cannot worsen gamma
        cfg4 = gypsum_config(N1=4 * n1)
        g_d4, _, _ = phonon.discrete_kernel_sums(cfg4, t_window, 0.0)
        rel1 = abs(g_d - g_c) / abs(g_c)
        rel4 = abs(g_d4 - g_c) / abs(g_c)
        checks.append({"kind": "window_consistency",
                       "rel_err_N1": float(rel1),
                       "rel_err_4N1": float(rel4),
                       "passed": bool(rel4 <= rel1 * (1.0 + 1e-9))})
    return _report("ksum", checks)


def _report(suite, checks):
    failures = sum(1 for c in checks if not c["passed"])
    return {"suite": suite, "checks": checks, "failures": failures,
            "total": len(checks)}


def run_suites(which="all", tol=1e-8, quick=False):
    """Run the requested suites; returns a list of reports."""
    reports = []
    if which in ("fock", "all"):
        reports.append(fock_suite(tol=tol, quick=quick))
    if which in ("eigdist", "all"):
        reports.append(eigdist_suite())
    if which in ("ksum", "all"):
        reports.append(ksum_suite())
    if not reports:
        raise ValueError(f"unknown suite {which!r}")
    return reports
