"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` (or ``python tests/test_acceptance.py``)
to see the lines; pytest also lists them in its terminal summary.
"""
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
from problems import random_hermitian_model, random_valid_problems  # noqa: E402

from nhtunnel.analysis import asymptotic_factor, hartman_profile, phase_time  # noqa: E402
from nhtunnel.errors import OBCArcError, SingularSystemError  # noqa: E402
from nhtunnel.model import LeadSpec, ScatteringProblem, single_band  # noqa: E402
from nhtunnel.presets import get_preset  # noqa: E402
from nhtunnel.scatter import solve_ansatz, solve_direct  # noqa: E402
from nhtunnel.spectra import barrier_roots, beta_s_phase_derivative, obc_spectrum  # noqa: E402
from nhtunnel.timedomain import advancement_rate, simulate  # noqa: E402

Q = np.pi / 2
SATURATION_TOL = 1e-3


def _hn_beta_s():
    # smaller root of 0.8 b^2 + 1.85 b + 1
    return (-1.85 + np.sqrt(1.85**2 - 4 * 0.8)) / 1.6


def _dissipative_slope():
    # beta_s of b^2 + (t0 - E0) b + 1, d arg beta_s/dq by implicit differentiation, E0 = 0
    t0 = 2.1 - 0.2j
    b = np.roots([1.0, t0, 1.0])
    b = b[np.argmin(np.abs(b))]
    dphi = np.imag(-2 * np.sin(Q) / (2 * b + t0))
    return -dphi / (2 * np.sin(Q))


def _ptp_tau(p, Ns):
    taus = np.array([phase_time(p.model, p.lead, N, Q) for N in Ns])
    return float(np.ptp(taus))


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def test_criterion_1_hartman_saturation(record_criterion):
    p = get_preset("fig2b")
    Ns = range(20, 31)
    spread = _ptp_tau(p, Ns)
    t2 = [solve_direct(ScatteringProblem(p.model, p.lead, N, Q)).absT2 for N in Ns]
    slope = np.polyfit(list(Ns), np.log(t2), 1)[0]
    expected = 2 * np.log(abs(_hn_beta_s()))
    assert abs(_hn_beta_s()) == pytest.approx(0.861438, abs=1e-6)
    ok_tau, ok_slope = spread < SATURATION_TOL, _rel(slope, expected) < 0.01
    record_criterion(
        1,
        ok_tau and ok_slope,
        f"tau ptp over N=20..30 = {spread:.4g} (< {SATURATION_TOL:g}: {ok_tau}); "
        f"log|T|^2 slope {slope:.6f} vs {expected:.6f} (rel {_rel(slope, expected):.1e}, < 1%: {ok_slope})",
    )
    assert ok_slope
    assert ok_tau, f"tau(N) still varies by {spread:.4g} over N = 20..30"


def test_criterion_2_no_hartman(record_criterion):
    p = get_preset("fig2a")
    step = phase_time(p.model, p.lead, 30, Q) - phase_time(p.model, p.lead, 29, Q)
    predicted = _dissipative_slope()
    from_roots = -beta_s_phase_derivative(p.model, 1.0, Q) / (2 * np.sin(Q))
    verdict = hartman_profile(p.model, p.lead, Q, p.N_list).verdict
    ok = _rel(step, predicted) < 0.02 and abs(predicted) > 0.1 and verdict == "no_hartman"
    record_criterion(
        2,
        ok,
        f"tau(30)-tau(29) = {step:.7f}, closed form {predicted:.7f} (root tracking {from_roots:.7f}), "
        f"verdict {verdict}",
    )
    assert ok


def test_criterion_3_next_nearest(record_criterion):
    p = get_preset("fig4")
    rs = barrier_roots(p.model, 0.0)
    real = rs.roots.size == 4 and np.max(np.abs(rs.roots.imag)) < 1e-12
    ok_beta = abs(abs(rs.beta_s) - 0.85) <= 0.01
    spread = _ptp_tau(p, range(20, 31))
    ok_tau = spread < SATURATION_TOL
    im_max = float(np.max(np.abs(obc_spectrum(p.model, 30).energies.imag)))
    ok_obc = im_max < 1e-6
    record_criterion(
        3,
        real and ok_beta and ok_tau and ok_obc,
        f"four real roots: {real}; beta_s = {rs.beta_s.real:.5f} (|beta_s| within 0.85 +- 0.01: {ok_beta}); "
        f"tau ptp N=20..30 = {spread:.4g} (< 1e-3: {ok_tau}); OBC N=30 max|Im E| = {im_max:.4g} (< 1e-6: {ok_obc})",
    )
    assert real and ok_beta
    assert ok_tau, f"tau(N) varies by {spread:.4g} over N = 20..30"
    assert ok_obc, f"max |Im E| = {im_max:.4g} for the N = 30 open chain"


def test_criterion_4_dimers(record_criterion):
    verdicts = {n: hartman_profile(get_preset(n).model, get_preset(n).lead, Q, get_preset(n).N_list).verdict
                for n in ("fig6b", "fig6c", "fig6d")}
    ok_v = verdicts == {"fig6b": "hartman", "fig6c": "hartman", "fig6d": "no_hartman"}
    rb = barrier_roots(get_preset("fig6b").model, 0.0).roots
    rc = barrier_roots(get_preset("fig6c").model, 0.0).roots
    ok_b = np.allclose(rb, [-0.875, -2.0], rtol=0, atol=1e-12)
    # quadratic 0.4 b^2 + 1.14 b + 0.7 = 0
    exact = (-1.14 + np.array([1.0, -1.0]) * np.sqrt(1.14**2 - 1.12)) / 0.8
    ok_c = np.allclose(rc, exact, rtol=0, atol=1e-12) and np.allclose(rc, [-0.895256, -1.954744], rtol=0, atol=5e-6)
    record_criterion(
        4,
        ok_v and ok_b and ok_c,
        f"verdicts {verdicts}; fig6b roots {np.round(rb.real, 12).tolist()}; "
        f"fig6c roots {np.round(rc.real, 7).tolist()} (quadratic to 1e-12: {np.allclose(rc, exact, atol=1e-12)})",
    )
    assert ok_v and ok_b and ok_c


def test_criterion_5_oracle_equivalence(record_criterion):
    problems, rejected = random_valid_problems(50, seed=2024)
    worst, failures = 0.0, 0
    for p in problems:
        try:
            a, d = solve_ansatz(p), solve_direct(p)
        except Exception:  # any failure counts against the criterion
            failures += 1
            continue
        err = max(_rel(a.R, d.R), _rel(a.T, d.T))
        worst = max(worst, err)
        failures += err >= 1e-8
    record_criterion(
        5, failures == 0, f"50 problems ({rejected} draws rejected by preconditions), worst rel {worst:.2e}, failures {failures}"
    )
    assert failures == 0


def test_criterion_6_hermitian_limits(record_criterion):
    rng = np.random.default_rng(6)
    worst, count, skipped = 0.0, 0, 0
    while count < 20:
        model = random_hermitian_model(rng)
        N, q = int(rng.integers(1, 26)), float(rng.uniform(0.05, np.pi - 0.05))
        try:
            sol = solve_direct(ScatteringProblem(model, LeadSpec(1.0), N, q))
        except SingularSystemError:
            skipped += 1  # bound state exactly at E0
            continue
        worst = max(worst, abs(abs(sol.R) ** 2 + sol.absT2 - 1))
        count += 1
    tau_err = 0.0
    for kappa, q, N in [(1.0, Q, 10), (1.0, 0.7, 25), (1.7, 2.2, 3), (0.6, 1.1, 17)]:
        chain = single_band({-1: kappa, 1: kappa})
        tau_err = max(tau_err, abs(phase_time(chain, LeadSpec(kappa), N, q) - (N + 1) / (2 * kappa * np.sin(q))))
    ok = worst < 1e-10 and tau_err < 1e-10
    record_criterion(
        6, ok, f"max | |R|^2+|T|^2-1 | = {worst:.1e} over 20 barriers ({skipped} singular draws); transparent tau error {tau_err:.1e}"
    )
    assert ok


def test_criterion_7_gauge(record_criterion):
    hn = get_preset("fig2b").model
    herm = single_band({-1: np.sqrt(0.8), 0: 1.85, 1: np.sqrt(0.8)})
    lead = LeadSpec(1.0)
    d_arg = d_tau = 0.0
    for N in range(5, 21):
        a = solve_direct(ScatteringProblem(hn, lead, N, Q)).T
        b = solve_direct(ScatteringProblem(herm, lead, N, Q)).T
        d_arg = max(d_arg, abs(np.angle(a / b)))
        d_tau = max(d_tau, abs(phase_time(hn, lead, N, Q) - phase_time(herm, lead, N, Q)))
    # tau is a 1e-4 stencil of arg T, so a 1e-10 phase agreement bounds it by ~1e-6
    ok = d_arg < 1e-10 and d_tau < 1e-6
    record_criterion(7, ok, f"max |arg T_HN - arg T_herm| = {d_arg:.1e}, max |tau difference| = {d_tau:.1e}")
    assert ok


def test_criterion_8_factorization(record_criterion):
    p = get_preset("fig2b")
    fac = asymptotic_factor(p.model, p.lead, Q, range(25, 31))
    mags = np.abs(fac.Ttilde_estimates)
    spread = float(np.ptp(mags) / mags[-1])
    E = obc_spectrum(p.model, 60).energies.real
    E0 = E[np.argmin(np.abs(E - 1.0))]
    try:
        asymptotic_factor(p.model, p.lead, float(np.arccos(E0 / 2)), range(25, 31))
        raised = False
    except OBCArcError:
        raised = True
    ok = spread < 1e-6 and raised
    record_criterion(
        8, ok, f"|T beta_s^-N| relative spread over N=25..30 = {spread:.3g} (last three {fac.spread:.2g}); "
        f"OBC-arc error raised at E0={E0:.4f}: {raised}"
    )
    assert raised
    assert spread < 1e-6, f"|T beta_s^-N| still drifts by {spread:.3g} over N = 25..30"


@pytest.mark.slow
def test_criterion_9_time_domain_hatano_nelson(record_criterion):
    start = time.perf_counter()
    p3, p3c = get_preset("fig3"), get_preset("fig3c")
    r3 = advancement_rate(p3.model, p3.lead, p3.wavepacket_config(), p3.wave_N_list)
    r3c = advancement_rate(p3c.model, p3c.lead, p3c.wavepacket_config(), p3c.wave_N_list)
    elapsed = time.perf_counter() - start
    ok_top = abs(r3.rate - 0.5) <= 0.05
    ok_diss = bool(np.all(r3c.rates <= 0.05))
    ok_time = elapsed < 120
    record_criterion(
        9,
        ok_top and ok_diss and ok_time,
        f"fig3 rates {np.round(r3.rates, 3).tolist()} (top 0.5 +- 0.05: {ok_top}); "
        f"dissipative rates {np.round(r3c.rates, 3).tolist()} (<= 0.05: {ok_diss}); {elapsed:.1f} s",
    )
    assert ok_time
    assert ok_top, f"top-of-range rate {r3.rate:.3f}"
    assert ok_diss, f"dissipative rates {r3c.rates}"


@pytest.mark.slow
def test_criterion_10_time_domain_dimer(record_criterion):
    p = get_preset("fig7")
    res = advancement_rate(p.model, p.lead, p.wavepacket_config(), p.wave_N_list)
    top = float(res.advances[-1])
    ok = abs(top - 2.0) <= 0.2
    record_criterion(10, ok, f"advances per dN=2 {np.round(res.advances, 3).tolist()}, top {top:.3f}")
    assert ok


@pytest.mark.slow
def test_criterion_11_integrator_health(record_criterion):
    herm = single_band({-1: np.sqrt(0.8), 0: 1.85, 1: np.sqrt(0.8)})
    p3 = get_preset("fig3")
    drift = 0.0
    for N in p3.wave_N_list:
        rec = simulate(herm, p3.lead, N, p3.wavepacket_config())
        drift = max(drift, float(np.max(np.abs(rec.norms / rec.norms[0] - 1))))
    shift = 0.0
    for name in ("fig3", "fig7"):
        p = get_preset(name)
        cfg = p.wavepacket_config()
        for N in p.wave_N_list:
            coarse = simulate(p.model, p.lead, N, cfg)
            fine = simulate(p.model, p.lead, N, replace(cfg, dt=coarse.dt / 2))
            shift = max(shift, abs(fine.peak_time - coarse.peak_time) / fine.peak_time)
    ok = drift < 1e-8 and shift < 1e-4
    record_criterion(11, ok, f"Hermitian norm drift {drift:.1e}; max relative peak shift on halving dt {shift:.1e}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-s", "-q"]))
