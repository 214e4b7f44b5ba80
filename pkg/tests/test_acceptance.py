"""Acceptance suite: the sixteen headline checks at the reference
experiment scale (n=4, R=64, M=1280, c=2, delta=3, bump profile on [1,2]).

Each test is one criterion and prints one pass/fail line under pytest -v.
Shared group reports are computed once per session.  Criteria that the
desk-scale experiment genuinely cannot attain are asserted at their stated
tolerances anyway and fail honestly; the analysis lives next to the
failing quantity in the emitted reports.
"""

import numpy as np
import pytest

from wavedecay import estimates as est
from wavedecay.freekernel import eval_Kh_batch, plancherel_lambda_side
from wavedecay.funcalc import hs_multiplier, phi_of_hsqrt, verify_lemma23
from wavedecay.profiles import bump
from wavedecay.propagator import (boundary_safe_gap, duhamel_split,
                                  phi_difference, time_domain_evolve,
                                  wave_multiplier, wave_via_resolvent)
from wavedecay.radialop import PotentialSpec, RadialGrid, build_G, build_G0
from wavedecay.resolvent import complex_shift_compare, la_norm_scan

N = 4
H_SET = (1.0, 0.5, 0.25, 0.125)
T_SET = (4.0, 5.66, 8.0, 11.31, 16.0, 22.63, 32.0, 45.25, 64.0)
PROF = bump()


@pytest.fixture(scope="session")
def grid():
    return RadialGrid(64.0, 1280)


@pytest.fixture(scope="session")
def pot():
    return PotentialSpec(2.0, 3.0)


@pytest.fixture(scope="session")
def ops(grid, pot):
    op0, op = build_G0(grid, N), build_G(grid, N, pot)
    op0.eigensystem()
    op.eigensystem()
    return op0, op


@pytest.fixture(scope="session")
def kernel_reports():
    return est.check_kernel_bounds(N, PROF, H_SET)


@pytest.fixture(scope="session")
def lemma_reports(grid, pot, ops):
    op0, op = ops
    return verify_lemma23(grid, N, op0, op, PROF, H_SET)


@pytest.fixture(scope="session")
def thm41_reports(grid, pot, ops):
    return est.check_thm41(grid, N, pot, PROF, H_SET, T_SET)


def test_criterion_01_free_kernel_time_decay(kernel_reports):
    rep = kernel_reports["2.7_t_s1.5"]
    assert rep["passed"], (
        f"sup_sigma |K| t-slope {rep['fitted_exponent']:.3f} not in "
        f"-1.5 +/- 0.2")


def test_criterion_02_free_kernel_h_scaling(kernel_reports):
    rep = kernel_reports["2.7_h"]
    assert rep["passed"], (
        f"h-slope at t=16 is {rep['fitted_exponent']:.3f}, "
        f"not -2.5 +/- 0.3")


def test_criterion_03_light_cone_integral(kernel_reports):
    rep = kernel_reports["2.9"]
    assert rep["passed"], (
        f"t^1.5 int sigma^3 |K| varies by x{rep['ratio']:.2f} over "
        f"t in [8,128] (cap x3); the near-field transient at sigma ~ t/2 "
        f"is still decaying at t=128")


@pytest.mark.parametrize("sigma", [1.0, 4.0])
def test_criterion_04_plancherel(sigma):
    lam_side = plancherel_lambda_side(N, PROF, 1.0, sigma, m=0)
    dt = 0.05
    ts = np.arange(dt / 2, 200.0, dt)
    vals = np.abs(eval_Kh_batch(N, PROF, 1.0, sigma, ts)) ** 2
    time_side = 2.0 * float(np.sum(vals) * dt)
    gap = abs(time_side - lam_side) / lam_side
    assert gap <= 0.01, f"time vs lambda side differ by {gap:.2%}"


def test_criterion_05_limiting_absorption(grid, pot):
    lams = np.geomspace(1.0, 8.0, 9)
    rep, _, gaps = la_norm_scan(grid, N, PotentialSpec(0.0, 3.0), lams)
    assert not gaps and rep.passed, (
        f"free lambda-slope {rep.fitted_exponent:.3f} not in -1 +/- 0.1")
    _, rows, gaps = la_norm_scan(grid, N, pot, lams)
    ln = [r[2] for r in rows]
    assert not gaps and max(ln) / min(ln) <= 10.0, (
        f"perturbed lambda*norm ratio {max(ln) / min(ln):.2f} > 10")
    for eta in (1.0, 0.5):
        g = complex_shift_compare(grid, N, pot, 2.0, eta=eta)
        assert g <= 0.10, f"complex-shift gap {g:.2%} at eta={eta}"


def test_criterion_06_functional_calculus_oracle(ops):
    _, op = ops
    got = hs_multiplier(op, PROF, 1.0, order=8, tol=1e-7, block=400)
    gap = np.linalg.norm(got - phi_of_hsqrt(op, PROF, 1.0), 2)
    assert gap <= 1e-6, f"quadrature vs eigen route gap {gap:.2e}"


def test_criterion_07_cutoff_difference_h_slopes(lemma_reports):
    r28 = lemma_reports["2.28"]
    r31 = lemma_reports["2.31"]["2"]
    assert r28["passed"] and r31["passed"], (
        f"difference h-slopes {r28['fitted_exponent']:.3f} (weighted) / "
        f"{r31['fitted_exponent']:.3f} (L2) vs 2 +/- 0.3; the h=1 end of "
        f"the window is saturated (relative perturbation 2h^2 ~ 1)")


def test_criterion_08_bernstein_scaling(lemma_reports):
    rep = lemma_reports["2.32"]
    assert rep["passed"], (
        f"L2->Linf h-slope {rep['fitted_exponent']:.3f} not in "
        f"-2 +/- 0.3")


def test_criterion_09_propagator_triangulation(grid, pot, ops):
    _, op = ops
    f = np.exp(-((grid.nodes - 8.0)) ** 2)
    rec = time_domain_evolve(op, f, 8.0, 0.5 * grid.dr, PROF, 1.0)
    expect = wave_multiplier(op, PROF, 1.0, 8.0).matrix @ f
    rel = np.linalg.norm(rec.u - expect) / np.linalg.norm(expect)
    assert rel <= 1e-4, f"leapfrog vs eigen relative error {rel:.2e}"
    eig = wave_multiplier(op, PROF, 1.0, 4.0, square_profile=True)
    res = wave_via_resolvent(grid, N, pot, PROF, 1.0, 4.0)
    gap = boundary_safe_gap(res, eig, grid)
    assert gap <= 0.02, f"eigen vs resolvent-formula gap {gap:.2%}"


def test_criterion_10_duhamel_reconstruction(ops):
    op0, op = ops
    split = duhamel_split(op0, op, PROF, 0.5, 4.0)
    diff = phi_difference(op0, op, PROF, 0.5, 4.0)
    resid = (np.linalg.norm(split.phi1_part + 0.5 * split.phi2_part
                            - diff, 2) / np.linalg.norm(diff, 2))
    assert resid <= 0.01, f"duhamel residual {resid:.2%} of the difference"


def test_criterion_11_difference_growth_rate(grid, pot):
    rep = est.check_thm31(grid, N, pot, PROF, H_SET)["3.1"]
    zero = est.check_thm31(grid, N, PotentialSpec(0.0, 3.0), PROF,
                           H_SET[:2], t_set=(1.0, 4.0))["3.1"]
    assert zero["all_zero"] and zero["passed"], "c=0 must give exact zeros"
    assert rep["passed"], (
        f"sup_t difference-norm h-slope {rep['fitted_exponent']:.3f} "
        f"< 0.8; centrifugal suppression of the sector interaction")


def test_criterion_12_weighted_decay_consistency(grid, pot):
    rep = est.check_thm34(grid, N, pot, PROF, H_SET[:3], T_SET,
                          s_set=(1.5,))["3.18_s1.5"]
    assert all(f["passed"] for f in rep["fits"].values()), (
        "some h misses the t-slope <= -1.3 requirement")
    assert rep["passed"], (
        f"t-slope spread across h is {rep['exponent_spread']:.3f} > 0.15; "
        f"interior decay steepens as h shrinks")


def test_criterion_13_smoothing(grid, pot):
    rep = est.check_smoothing(grid, N, pot, PROF, H_SET[:3])
    time_rep, freq_rep = rep["3.2_time"], rep["3.15_freq"]
    assert time_rep["tails_passed"], (
        f"dyadic time tails {time_rep['dyadic_tail_ratios']} exceed 1/2")
    assert time_rep["passed"], (
        f"normalized totals vary by x{time_rep['ratio']:.2f} (cap x3)")
    assert freq_rep["passed"], (
        f"sup_lambda ||Q|| varies by x{freq_rep['ratio']:.2f} (cap x3)")


def test_criterion_14_mollifier_suite(pot):
    rep = est.mollified_multiplier_suite(RadialGrid(128.0, 1280), N, pot)
    assert rep["3.46_theta_scan"]["passed"], "theta-scan minimum misplaced"
    r41, r43 = rep["3.41"], rep["3.43"]
    assert r41["passed"] and r43["passed"], (
        f"theta-slopes {r41['fitted_exponent']:.3f} / "
        f"{r43['fitted_exponent']:.3f} vs mu=0.4 / mu-1=-0.6 (+/- 0.15); "
        f"the finite box admits no Hoelder defect to measure (dense-"
        f"matrix ground truth is theta-flat)")


def test_criterion_15_endpoint_decay(thm41_reports):
    rep = thm41_reports
    assert rep["4.6_t"]["passed"], (
        f"(weighted L2->Linf) t-slope {rep['4.6_t']['fitted_exponent']:.3f}"
        f" > -1.3")
    assert rep["4.6_h"]["passed"], (
        f"h-slope {rep['4.6_h']['fitted_exponent']:.3f} not in -1 +/- 0.3")
    assert rep["4.10_h"]["passed"], (
        f"free-kernel h-slope {rep['4.10_h']['fitted_exponent']:.3f} "
        f"not in -3 +/- 0.4")
    assert rep["4.1_p2"]["passed"]      # defers to the item-11 quantity


def test_criterion_16_final_assembly(grid, pot):
    rep = est.assemble_thm11(grid, N, pot)
    ident = rep["4.3_identity"]
    assert ident["passed"], (
        f"frequency-integration identity residual {ident['max_residual']:.2e}")
    assert rep["1.4"]["passed"], (
        f"t-slope {rep['1.4']['fitted_exponent']:.3f} > -1.3")
    assert rep["1.2_p2"]["passed"], (
        f"p=2 slope {rep['1.2_p2']['fitted_exponent']:.3f} not in 0 +/- 0.05")
