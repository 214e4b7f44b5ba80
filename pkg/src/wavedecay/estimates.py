"""Verification harness: compute the left-hand sides of the decay
estimates over (t, h, s, lambda, theta) grids, fit power laws, and emit
pass/fail reports.

Constants in the target inequalities are existential, so every check
tests exponents (log-log fits) or boundedness (max/min stability ratios),
never absolute values.  All L^p quantities are radial-sector norms; that
caveat is attached to the reports wherever p != 2.

Propagator multipliers are handled in low-rank form: a frequency profile
keeps only the eigenpairs in its band, so a weighted norm costs two thin
QR factorizations instead of a dense M x M assembly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from math import floor

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import lu_factor, lu_solve
from scipy.special import jv

from .fitting import DecayFitReport, fit_power_law
from .freekernel import (QuadratureError, _panel_nodes, eval_Kh_batch,
                         eval_Kh_sigma_batch)
from .norms import sector_weights
from .profiles import (bump, mollifier, plateau, step_cutoff,
                       step_cutoff_derivative)
from .radialop import build_G, build_G0, weight_matrix
from .resolvent import free_green_matrix, resolvent_difference_vector

__all__ = [
    "EPS",
    "check_kernel_bounds",
    "check_prop21",
    "check_thm31",
    "check_smoothing",
    "check_thm34",
    "check_weighted_time_integral",
    "MollifiedMultiplier",
    "mollified_multiplier_suite",
    "check_thm41",
    "assemble_thm11",
    "rollup_rows",
    "emit_reports",
]

EPS = 0.05
SECTOR_NOTE = "radial-sector norm, faithful for radial data only"


# ---------------------------------------------------------------------------
# low-rank band machinery

def _band(op, profile, h, tilt=0.0, square=False, amp_floor=0.0):
    """(roots, amplitudes, eigenvectors) of the band the profile keeps."""
    mu, q = op.eigensystem()
    pos = mu > 0
    root = np.sqrt(mu[pos])
    amp = profile(h * root)
    if square:
        amp = amp * amp
    if tilt != 0.0:
        amp = amp * root ** tilt
    keep = np.abs(amp) > amp_floor * (np.max(np.abs(amp)) or 1.0)
    return root[keep], amp[keep], q[:, pos][:, keep]


def _join_bands(bands, signs):
    roots = np.concatenate([b[0] for b in bands])
    amps = np.concatenate([s * b[1] for b, s in zip(bands, signs)])
    vecs = np.concatenate([b[2] for b in bands], axis=1)
    return roots, amps, vecs


def _lr_norm2(left, right, coeff):
    """|| left diag(coeff) right^T ||_2 by thin QR of both factors."""
    rl = np.linalg.qr(left, mode="r")
    rr = np.linalg.qr(right, mode="r")
    return float(np.linalg.norm(rl @ (coeff[:, None] * rr.T), 2))


def _lr_norm_2_to_inf(left, right, coeff, grid, n):
    gram = right.T @ right
    mid = (coeff[:, None] * gram) * np.conj(coeff)[None, :]
    rows = np.einsum("ik,kl,il->i", left, mid, left)
    rows = np.sqrt(np.maximum(np.real(rows), 0.0))
    rho = sector_weights(grid, n)
    return float(np.max(rows / rho) / np.sqrt(grid.dr))


def _lr_norm_1_to_inf(left, right, coeff, grid, n, chunk=256):
    rho = sector_weights(grid, n)
    cr = right * coeff[None, :]
    best = 0.0
    for start in range(0, left.shape[0], chunk):
        block = left[start:start + chunk] @ cr.T
        scale = np.outer(rho[start:start + chunk], rho)
        best = max(best, float(np.max(np.abs(block) / scale)))
    return best / grid.dr


def _phi_band(op0, op, profile, h):
    """Low-rank form of the perturbed-minus-free propagator difference."""
    return _join_bands([_band(op, profile, h), _band(op0, profile, h)],
                       [+1.0, -1.0])


def _coeff(root, amp, t):
    return amp * np.exp(1j * t * root)


def _stability(values):
    vals = [float(v) for v in values if v > 0]
    if not vals:
        return 0.0
    return max(vals) / min(vals)


def _ratio_report(values, cap, note=None):
    rep = {"kind": "stability", "sup": float(max(values)),
           "ratio": _stability(values), "cap": cap,
           "passed": bool(_stability(values) <= cap)}
    if note:
        rep["note"] = note
    return rep


# ---------------------------------------------------------------------------
# free kernel checks

def _cone_sup(n, profile, h, t, n_sigma=65, weight_power=0.0):
    """sup over the light-cone window sigma in [3t/4, 5t/4] of
    |K_h| sigma^weight_power.

    The window tracks where the stated rates are attained: the deep
    interior (sigma << t) carries a transient that dies off much faster
    and would steepen small-t fits, the far field is vacuum."""
    sig = np.linspace(0.75 * t, 1.25 * t, n_sigma)
    vals = np.abs(eval_Kh_sigma_batch(n, profile, h, sig, t))
    return float(np.max(vals * sig ** weight_power))


# Free-kernel t-fits run to t = 128: there is no spatial box to reflect
# off, so the horizon cap of the grid-based checks does not apply.
KERNEL_T = tuple(8.0 * 2.0 ** (k / 2.0) for k in range(9))


def check_kernel_bounds(n, profile, h_set, t_set=None, s_set=None,
                        t_fixed=16.0,
                        sigma_set=(1.0, 2.0, 4.0, 8.0, 16.0),
                        t_cut=64.0, dt=0.125):
    """Pointwise decay, weighted time integrals, and the light-cone
    integral of the free kernel."""
    if t_set is None:
        t_set = KERNEL_T
    if s_set is None:
        s_set = (0.0, (n - 1) / 4.0, (n - 1) / 2.0)
    top = (n - 1) / 2.0
    reports, gaps = {}, []

    for s in s_set:
        rows = []
        for t in t_set:
            try:
                rows.append((t, _cone_sup(n, profile, 1.0, t,
                                          weight_power=top - s)))
            except QuadratureError as exc:
                gaps.append({"check": "2.7", "t": t, "error": repr(exc)})
        reports[f"2.7_t_s{s:g}"] = fit_power_law(
            rows, "2.7", "t", target=-s, tolerance=0.2).as_dict()

    rows = [(h, _cone_sup(n, profile, h, t_fixed)) for h in h_set]
    reports["2.7_h"] = fit_power_law(rows, "2.7", "h",
                                     target=-(n + 1) / 2.0,
                                     tolerance=0.3).as_dict()

    # (2.8): truncated int |t|^{2s} |K|^2 dt at s=0, sigma- and h-scans
    t_arr = np.arange(dt, t_cut + dt / 2, dt)

    def time_integral(h, sigma):
        vals = np.abs(eval_Kh_batch(n, profile, h, sigma, t_arr)) ** 2
        total = 2.0 * float(np.trapezoid(vals, dx=dt))
        tail = 2.0 * float(np.trapezoid(vals[t_arr > t_cut / 2],
                                        dx=dt)) / total
        return total, tail

    rows, tails = [], {}
    for sigma in sigma_set:
        total, tail = time_integral(1.0, sigma)
        rows.append((sigma, total))
        tails[f"{sigma:g}"] = tail
    reports["2.8_sigma"] = fit_power_law(
        rows, "2.8", "sigma", target=-(n - 1), tolerance=0.3).as_dict()
    reports["2.8_sigma"]["truncation_tails"] = tails

    rows = [(h, time_integral(h, 2.0)[0]) for h in h_set]
    reports["2.8_h"] = fit_power_law(rows, "2.8", "h", target=-n,
                                     tolerance=0.4).as_dict()

    # (2.9): |t|^{(n-1)/2} int_0^{t/2} sigma^{n-1} |K| dsigma bounded
    values = {}
    for t in t_set:
        sig = np.linspace(t / 512.0, t / 2.0, 257)
        vals = sig ** (n - 1) * np.abs(
            eval_Kh_sigma_batch(n, profile, 1.0, sig, t))
        values[f"{t:g}"] = float(
            t ** top * np.trapezoid(vals, sig))
    reports["2.9"] = _ratio_report(values.values(), 3.0)
    reports["2.9"]["values"] = values
    reports["_gaps"] = gaps
    return reports


def check_prop21(grid, n, profile, h_set, t_set, t_fixed=16.0,
                 s_set=None, eps=EPS):
    """Free propagator decay: weighted L2, kernel sup, L2->Linf rows and
    the weighted time integral of delta-like data."""
    if s_set is None:
        s_set = (0.0, (n - 1) / 4.0, (n - 1) / 2.0)
    top = (n - 1) / 2.0
    op0 = build_G0(grid, n)
    reports = {}

    for s in s_set:
        w = weight_matrix(grid, s)
        band = _band(op0, profile, 1.0)
        left, right = w[:, None] * band[2], w[:, None] * band[2]
        rows = [(t, _lr_norm2(left, right, _coeff(band[0], band[1], t)))
                for t in t_set]
        tol = 0.05 if s == 0.0 else 0.2
        reports[f"2.1_s{s:g}"] = fit_power_law(
            rows, "2.1", "t", target=-s, tolerance=tol,
            one_sided=s > 0.0).as_dict()

    rows = [(t, _cone_sup(n, profile, 1.0, t)) for t in KERNEL_T]
    reports["2.2_t"] = fit_power_law(rows, "2.2", "t", target=-top,
                                     tolerance=0.2).as_dict()
    rows = [(h, _cone_sup(n, profile, h, t_fixed)) for h in h_set]
    reports["2.2_h"] = fit_power_law(rows, "2.2", "h",
                                     target=-(n + 1) / 2.0,
                                     tolerance=0.3).as_dict()

    s = top
    w = weight_matrix(grid, 0.5 + s + eps)

    def rows_23(h, ts):
        band = _band(op0, profile, h)
        right = w[:, None] * band[2]
        return [(t, _lr_norm_2_to_inf(band[2], right,
                                      _coeff(band[0], band[1], t), grid, n))
                for t in ts]

    reports["2.3_t"] = fit_power_law(rows_23(1.0, t_set), "2.3", "t",
                                     target=-s, tolerance=0.2,
                                     one_sided=True).as_dict()
    hrows = [(h, rows_23(h, [t_fixed])[0][1]) for h in h_set]
    reports["2.3_h"] = fit_power_law(hrows, "2.3", "h",
                                     target=-(n + 1) / 2.0,
                                     tolerance=0.3).as_dict()
    for key in ("2.3_t", "2.3_h"):
        reports[key]["note"] = SECTOR_NOTE

    # (2.4): delta data; the L1 normalization of a grid delta is
    # rho_j dr, which is h-independent and drops out of the fit
    j_delta = int(round(6.0 / grid.dr))
    rows, tails = [], {}
    for h in h_set:
        total, tail, _ = _time_side_integral(op0, profile, h, w, s,
                                             np.eye(grid.M)[:, [j_delta]])
        rows.append((h, total))
        tails[f"{h:g}"] = tail
    reports["2.4_h"] = fit_power_law(rows, "2.4", "h", target=-n,
                                     tolerance=0.4).as_dict()
    reports["2.4_h"]["truncation_tails"] = tails
    return reports


def _time_side_integral(op, profile, h, w, s, test_vectors, t_cut=64.0,
                        dt=0.25):
    """(total, tail ratio, band mass) of int |t|^{2s} ||w P(t) f||^2 dt
    summed over the test vectors, computed in band coordinates.

    band mass = sum ||amp (vecs^T f)||^2, the energy the localized
    propagator actually sees.  Fixed test data loads each frequency band
    very unevenly, so h-comparisons of the raw total only make sense
    after dividing by it."""
    root, amp, vecs = _band(op, profile, h)
    wb = w[:, None] * vecs
    gram = wb.T @ wb
    b = amp[:, None] * (vecs.T @ test_vectors)
    band_mass = float(np.sum(np.abs(b) ** 2))
    t_arr = np.arange(dt, t_cut + dt / 2, dt)
    vals = np.empty(t_arr.size)
    for i, t in enumerate(t_arr):
        ph = np.exp(1j * t * root)[:, None] * b
        vals[i] = float(np.real(np.sum(np.conj(ph) * (gram @ ph))))
    vals = vals * t_arr ** (2.0 * s)
    total = 2.0 * float(np.trapezoid(vals, dx=dt))
    tail = 2.0 * float(np.trapezoid(vals[t_arr > t_cut / 2], dx=dt)) / total
    return total, tail, band_mass


def check_thm31(grid, n, potential, profile, h_set, t_set=(1.0, 4.0, 16.0)):
    """sup_t of the propagator-difference L2 norm, fitted in h."""
    op0, op = build_G0(grid, n), build_G(grid, n, potential)
    if potential.c == 0.0:
        # the difference is the zero operator; assemble both sides densely
        # so identical eigensystems cancel bit-exactly
        worst = 0.0
        for h in h_set:
            for t in t_set:
                mats = []
                for o in (op, op0):
                    root, amp, vecs = _band(o, profile, h)
                    c = _coeff(root, amp, t)
                    mats.append((vecs * c[None, :]) @ vecs.T)
                worst = max(worst, float(np.abs(mats[0] - mats[1]).max()))
        return {"3.1": {"all_zero": worst == 0.0, "max_abs_entry": worst,
                        "passed": worst == 0.0,
                        "note": "zero potential: difference must vanish "
                                "identically"}}
    rows, per_h = [], {}
    for h in h_set:
        root, amp, vecs = _phi_band(op0, op, profile, h)
        norms = [_lr_norm2(vecs, vecs, _coeff(root, amp, t)) for t in t_set]
        per_h[f"{h:g}"] = dict(zip((f"{t:g}" for t in t_set),
                                   (float(v) for v in norms)))
        rows.append((h, max(norms)))
    out = fit_power_law(rows, "3.1", "h", target=1.0, tolerance=0.2,
                        one_sided=True).as_dict()
    out["t_stability"] = {h: _stability(v.values())
                          for h, v in per_h.items()}
    out["norms"] = per_h
    return {"3.1": out}


def check_smoothing(grid, n, potential, profile, h_set, eps=EPS,
                    n_lambda=17):
    """Time-side square integrability and the frequency-side jump bound."""
    op = build_G(grid, n, potential)
    w = weight_matrix(grid, 0.5 + eps)
    tests = _gaussian_tests(grid)
    totals, tails, raw = {}, {}, {}
    for h in h_set:
        total, tail, mass = _time_side_integral(op, profile, h, w, 0.0,
                                                tests)
        # per unit of band energy: the fixed Gaussians load high bands
        # exponentially weakly, so raw totals are not h-comparable
        totals[f"{h:g}"] = total / mass
        raw[f"{h:g}"] = total
        tails[f"{h:g}"] = tail
    time_rep = _ratio_report(totals.values(), 3.0)
    time_rep.update({"totals_per_band_mass": totals, "raw_totals": raw,
                     "dyadic_tail_ratios": tails,
                     "tails_passed": bool(max(tails.values()) <= 0.5)})
    time_rep["passed"] = bool(time_rep["passed"]
                              and time_rep["tails_passed"])

    sups = {}
    for h in h_set:
        lo, hi = profile.support
        lams = np.linspace(lo / h, hi / h, n_lambda)
        best = 0.0
        for lam in lams:
            x = resolvent_difference_vector(grid, n, potential, lam)
            amp = profile(h * lam) ** 2
            best = max(best, lam * amp * grid.dr
                       * float(np.linalg.norm(w * x) ** 2))
        sups[f"{h:g}"] = best
    freq_rep = _ratio_report(sups.values(), 3.0)
    freq_rep["sups"] = sups
    return {"3.2_time": time_rep, "3.15_freq": freq_rep}


def _gaussian_tests(grid):
    r = grid.nodes
    cols = [np.exp(-(r - c) ** 2) for c in (4.0, 8.0, 12.0)]
    return np.stack(cols, axis=1)


def check_thm34(grid, n, potential, profile, h_set, t_set, s_set=None,
                eps=EPS):
    """Weighted L2 decay of the perturbed propagator, per s, with
    h-uniformity of the fitted exponents."""
    if s_set is None:
        s_set = (0.0, 0.75, (n - 1) / 2.0)
    op = build_G(grid, n, potential)
    reports = {}
    for s in s_set:
        w = weight_matrix(grid, s + eps)
        fits = {}
        for h in h_set:
            root, amp, vecs = _band(op, profile, h)
            wb = w[:, None] * vecs
            rows = [(t, _lr_norm2(wb, wb, _coeff(root, amp, t)))
                    for t in t_set]
            tol = 0.05 if s == 0.0 else 0.2
            fits[f"{h:g}"] = fit_power_law(
                rows, "3.18", "t", target=-s, tolerance=tol,
                one_sided=s > 0.0).as_dict()
        exps = [f["fitted_exponent"] for f in fits.values()]
        spread = float(max(exps) - min(exps))
        reports[f"3.18_s{s:g}"] = {
            "fits": fits, "exponent_spread": spread,
            "passed": bool(all(f["passed"] for f in fits.values())
                           and spread <= 0.15)}
    return reports


def check_weighted_time_integral(grid, n, potential, profile, h_set,
                                 s=None, eps=EPS, t_cut=64.0, dt=0.125):
    """Dyadic-block decay of int |t|^{2s} ||w P w f||^2 dt."""
    if s is None:
        s = (n - 1) / 2.0
    op = build_G(grid, n, potential)
    w = weight_matrix(grid, 0.5 + s + eps)
    tests = w[:, None] * _gaussian_tests(grid)
    t_arr = np.arange(dt, t_cut + dt / 2, dt)
    totals, blocks = {}, {}
    for h in h_set:
        root, amp, vecs = _band(op, profile, h)
        wb = w[:, None] * vecs
        gram = wb.T @ wb
        b = amp[:, None] * (vecs.T @ tests)
        vals = np.empty(t_arr.size)
        for i, t in enumerate(t_arr):
            ph = np.exp(1j * t * root)[:, None] * b
            vals[i] = float(np.real(np.sum(np.conj(ph) * (gram @ ph))))
        vals = vals * t_arr ** (2.0 * s)
        edges = [2.0 ** k for k in range(2, int(np.log2(t_cut)) + 1)]
        sums = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            mask = (t_arr >= lo) & (t_arr < hi)
            sums.append(2.0 * float(np.trapezoid(vals[mask], dx=dt)))
        blocks[f"{h:g}"] = sums
        # same band-mass normalization as the unweighted time integral
        mass = float(np.sum(np.abs(b) ** 2))
        totals[f"{h:g}"] = 2.0 * float(np.trapezoid(vals, dx=dt)) / mass
    ratios = {h: [b / a for a, b in zip(s_[:-1], s_[1:])]
              for h, s_ in blocks.items()}
    # geometric decay beyond t = 16: the last block ratios
    worst = max(max(r[-2:]) for r in ratios.values())
    rep = _ratio_report(totals.values(), 3.0)
    rep.update({"block_sums": blocks, "block_ratios": ratios,
                "block_cap": 0.8, "worst_late_ratio": float(worst)})
    rep["passed"] = bool(rep["passed"] and worst <= 0.8)
    return {"3.20": rep}


# ---------------------------------------------------------------------------
# mollified multiplier family

def _packet_frame(grid, r_cut, carrier=1.5):
    """Orthonormal frame of radial probes: plain Gaussians plus packets
    oscillating at the band carrier, with dyadic-ish centers out to
    r_cut.  The carrier copies are what couple to the outgoing e^{i
    lambda r} tails of the resolvent, whose lambda-derivatives grow like
    powers of r; a frame confined to small r would see an artificially
    smooth family."""
    r = grid.nodes
    centers = [c for c in (1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 18.0, 27.0,
                           40.0, 60.0, 90.0) if c <= r_cut]
    cols = []
    for c in centers:
        env = np.exp(-((r - c) / max(1.0, min(c / 4.0, 12.0))) ** 2)
        cols.append(env.astype(complex))
        cols.append(env * np.exp(1j * carrier * r))
    # slowly decaying oscillating columns spanning r^k <r>^{-w} e^{i lam
    # r}, the extremizers of the lambda-derivative blow-up
    for q_tail in (0.05, 0.55, 0.95):
        env = (1.0 + r ** 2) ** (-q_tail / 2.0)
        cols.append(env * np.exp(1j * carrier * r))
        cols.append(env * np.exp(-1j * carrier * r))
    q, _ = np.linalg.qr(np.stack(cols, axis=1))
    return q


class _LatticeFamily:
    """Frame-compressed weighted resolvent family cached on a uniform
    lambda lattice, with cubic interpolation in lambda.

    Each lattice node stores the K x K compression F* (lam w R+ w) F
    onto a fixed orthonormal probe frame F, so norms of the family and
    of its lambda-derivatives are evaluated on tiny matrices while the
    probes themselves reach far into the weight tails.
    """

    def __init__(self, grid, n, potential, s, lam_lo, lam_hi, step,
                 r_cut, eps=EPS):
        self.step = step
        self.lo = lam_lo
        self.frame = _packet_frame(grid, r_cut)
        w = weight_matrix(grid, 0.5 + s + eps)
        v = potential(grid.nodes)
        count = int(np.ceil((lam_hi - lam_lo) / step)) + 1
        self.lams = lam_lo + step * np.arange(count)
        eye = np.eye(grid.M)
        wf = w[:, None] * self.frame
        mats = []
        for lam in self.lams:
            a0 = free_green_matrix(grid, n, lam, +1)
            lu = lu_factor(eye + a0 * v[None, :])
            r_cols = lu_solve(lu, a0 @ wf)
            mats.append(lam * (np.conj(self.frame.T) @ (w[:, None]
                                                        * r_cols)))
        self.mats = np.stack(mats)

    def value(self, lam):
        """Cubic Lagrange interpolation on the lattice (compressed
        weighted outgoing resolvent)."""
        return self.deriv(0, lam)

    def deriv(self, order, lam):
        """Lambda-derivative of the cubic interpolant.  Differentiating
        the interpolant analytically avoids the 1/step^2 amplification a
        finite difference across interpolated values would suffer."""
        x = (lam - self.lo) / self.step
        j = min(max(int(floor(x)), 1), len(self.mats) - 3)
        u = x - j
        if order == 0:
            w = (-u * (u - 1) * (u - 2) / 6.0,
                 (u + 1) * (u - 1) * (u - 2) / 2.0,
                 -(u + 1) * u * (u - 2) / 2.0,
                 (u + 1) * u * (u - 1) / 6.0)
        elif order == 1:
            w = (-(3 * u * u - 6 * u + 2) / 6.0,
                 (3 * u * u - 4 * u - 1) / 2.0,
                 -(3 * u * u - 2 * u - 2) / 2.0,
                 (3 * u * u - 1) / 6.0)
        elif order == 2:
            w = (1.0 - u, 3.0 * u - 2.0, 1.0 - 3.0 * u, u)
        else:
            raise ValueError("derivatives cached for order <= 2")
        out = w[0] * self.mats[j - 1]
        for k in (1, 2, 3):
            out = out + w[k] * self.mats[j - 1 + k]
        return out.astype(complex) / self.step ** order


@dataclass(frozen=True)
class MollifiedMultiplier:
    """T_theta^+ = theta^{-1} int T^+(lambda + sigma) m(sigma/theta)
    dsigma with a unit-mass bump m supported in [1/3, 1/2]."""

    family: _LatticeFamily
    theta: float
    n_sigma: int = 16

    @property
    def mass_defect(self):
        _, wts = self._nodes()
        return abs(float(np.sum(wts)) - 1.0)

    def _nodes(self):
        m = mollifier()
        xg, wg = leggauss(self.n_sigma)
        lo, hi = self.theta / 3.0, self.theta / 2.0
        sig = (lo + hi) / 2 + (hi - lo) / 2 * xg
        wts = (hi - lo) / 2 * wg * m(sig / self.theta) / self.theta
        return sig, wts

    def deriv(self, order, lam):
        sig, wts = self._nodes()
        acc = None
        for s_, w_ in zip(sig, wts):
            term = w_ * self.family.deriv(order, lam + s_)
            acc = term if acc is None else acc + term
        return acc / np.sum(wts)      # exact unit mass by normalization


def _tplus(mat):
    return mat / (np.pi * 1j)


def _tjump(mat):
    # T = T^+ - T^-; the incoming branch is the conjugate at real lambda
    return (2.0 / np.pi) * np.imag(mat)


def mollified_multiplier_suite(grid, n, potential, s=1.4,
                               theta_set=(0.5, 0.25, 0.125, 0.0625,
                                          0.03125),
                               t_scan=(8.0, 32.0),
                               t_fit=(4.0, 8.0, 16.0, 32.0, 64.0),
                               lam_sample=(1.2, 1.5, 1.8),
                               profile=None, r_cut=96.0,
                               lattice_step=1.0 / 256.0, eps=EPS):
    """Regularity-vs-blowup tradeoff of the mollified multiplier family
    and the stationary reconstruction it controls.

    The smoothing scale theta trades the Hoelder defect of the m-th
    derivative (slope mu) against blow-up of the (m+1)-st (slope mu - 1);
    the reconstruction objective is minimized near theta = 1/|t|.
    """
    from .profiles import bump

    m_order = int(floor(s))
    mu = s - m_order
    if profile is None:
        profile = bump()
    lo, hi = profile.support
    pad = 2 * lattice_step
    fam = _LatticeFamily(grid, n, potential, s, lo - 4 * pad,
                         hi + max(theta_set) / 2.0 + 4 * pad,
                         lattice_step, r_cut, eps)
    reports = {}

    # (3.40): boundedness of the first m derivatives, all theta
    sups = {f"{th:g}": max(
        float(np.linalg.norm(_tplus(MollifiedMultiplier(fam, th)
                                    .deriv(j, lam)), 2))
        for j in range(m_order + 1) for lam in lam_sample)
        for th in theta_set}
    reports["3.40"] = _ratio_report(sups.values(), 3.0)
    reports["3.40"]["sups"] = sups
    reports["3.40"]["mass_defects"] = {
        f"{th:g}": MollifiedMultiplier(fam, th).mass_defect
        for th in theta_set}

    # (3.41): ||d^m T_theta - d^m T|| ~ theta^mu
    rows = []
    for th in theta_set:
        mm = MollifiedMultiplier(fam, th)
        diff = max(float(np.linalg.norm(
            _tplus(mm.deriv(m_order, lam) - fam.deriv(m_order, lam)), 2))
            for lam in lam_sample)
        rows.append((th, diff))
    reports["3.41"] = fit_power_law(rows, "3.41", "theta", target=mu,
                                    tolerance=0.15).as_dict()

    # (3.43): ||d^{m+1} T_theta|| ~ theta^{mu-1}
    rows = []
    for th in theta_set:
        mm = MollifiedMultiplier(fam, th)
        val = max(float(np.linalg.norm(
            _tplus(mm.deriv(m_order + 1, lam)), 2)) for lam in lam_sample)
        rows.append((th, val))
    reports["3.43"] = fit_power_law(rows, "3.43", "theta",
                                    target=mu - 1.0,
                                    tolerance=0.15).as_dict()

    # reconstruction: int e^{it lam} phi(lam) X(lam) dlam on the lattice
    base = fam.lams[(fam.lams >= lo) & (fam.lams <= hi)]
    if base.size % 2 == 0:
        base = base[:-1]
    sw = np.ones(base.size)
    sw[1:-1:2], sw[2:-1:2] = 4.0, 2.0
    sw *= (base[1] - base[0]) / 3.0
    pf = profile(base)

    def recon(t, theta=None):
        mm = MollifiedMultiplier(fam, theta) if theta else None
        acc = None
        for lam, w_ in zip(base, sw * pf):
            if w_ == 0.0:
                continue
            mat = _tjump(mm.deriv(0, lam) if mm else fam.value(lam))
            term = (w_ * np.exp(1j * t * lam)) * mat
            acc = term if acc is None else acc + term
        return float(np.linalg.norm(acc, 2))

    rows = [(t, recon(t)) for t in t_fit]
    reports["3.46_t"] = fit_power_law(rows, "3.46", "t",
                                      target=-(m_order + mu),
                                      tolerance=0.2,
                                      one_sided=True).as_dict()

    def objective(t, theta):
        mm = MollifiedMultiplier(fam, theta)
        a = b = None
        for lam, w_ in zip(base, sw * pf):
            if w_ == 0.0:
                continue
            smooth = _tjump(mm.deriv(0, lam))
            raw = _tjump(fam.value(lam))
            pha = w_ * np.exp(1j * t * lam)
            ta, tb = pha * (raw - smooth), pha * smooth
            a = ta if a is None else a + ta
            b = tb if b is None else b + tb
        return float(np.linalg.norm(a, 2) + np.linalg.norm(b, 2))

    scan_rep = {}
    for t in t_scan:
        thetas = [2.0 ** -k for k in range(1, 7)]
        scan = {f"{th:g}": objective(t, th) for th in thetas}
        at_inv = objective(t, 1.0 / t)
        best = min(scan.values())
        scan_rep[f"t{t:g}"] = {
            "scan": scan, "at_theta_1_over_t": at_inv,
            "scan_min": best, "passed": bool(at_inv <= 2.0 * best)}
    scan_rep["passed"] = bool(all(v["passed"]
                                  for v in scan_rep.values()))
    reports["3.46_theta_scan"] = scan_rep
    reports["_meta"] = {"s": s, "m": m_order, "mu": mu,
                        "grid": {"R": grid.R, "M": grid.M},
                        "frame_extent": r_cut,
                        "lattice_step": lattice_step}
    return reports


# ---------------------------------------------------------------------------
# section 4 / section 1 assemblies

def _free_kernel_sup(n, profile, h, t, cone_only=False):
    """sup_d of the free n-dim localized wave kernel at distance d,

        k(d) = (2 pi)^{-n/2} d^{1-n/2}
               int e^{i t lam} phi(h lam) J_{n/2-1}(lam d) lam^{n/2} dlam.

    Sampling is dense near d = t (spacing h/4) because the cone peak has
    width O(h).  cone_only restricts to d in [t/2, 3t/2]."""
    lo, hi = profile.support
    d = np.concatenate([np.linspace(0.05, t + 5.0, 400),
                        t + h * np.linspace(-20.0, 20.0, 161)])
    d = np.unique(d[d > 0])
    if cone_only:
        d = d[(d >= t / 2) & (d <= 3 * t / 2)]
    lam, w = _panel_nodes(lo / h, hi / h, t + float(d.max()),
                          points_per_panel=6)
    osc = np.exp(1j * t * lam) * profile(h * lam) * lam ** (n / 2.0) * w
    bessel = jv(n / 2.0 - 1.0, np.outer(d, lam))
    k = (2 * np.pi) ** (-n / 2.0) * d ** (1.0 - n / 2.0) * (bessel @ osc)
    return float(np.max(np.abs(k)))


def check_thm41(grid, n, potential, profile, h_set, t_set, t_fixed=4.0,
                eps=EPS):
    """Propagator-difference decay at the L^p endpoints (sector
    surrogates for p = infinity)."""
    op0, op = build_G0(grid, n), build_G(grid, n, potential)
    top = (n - 1) / 2.0
    reports = {}

    def phi_norms(h, ts, kind, weight=None):
        root, amp, vecs = _phi_band(op0, op, profile, h)
        right = vecs if weight is None else weight[:, None] * vecs
        out = []
        for t in ts:
            c = _coeff(root, amp, t)
            if kind == "1inf":
                out.append((t, _lr_norm_1_to_inf(vecs, right, c, grid, n)))
            else:
                out.append((t, _lr_norm_2_to_inf(vecs, right, c, grid, n)))
        return out

    # (4.1) p=inf == (4.10): localized free kernel, pointwise sup.
    # t-decay is read off the light cone (the sup sits there for t >> h);
    # the h-fit is taken at t comparable to the profile scale, where the
    # near-field and cone contributions cross over and the h^{1-n}
    # envelope is the governing one.  For t >> h the sharp rate is the
    # milder h^{-(n+1)/2} |t|^{-(n-1)/2}.
    rows = [(t, _free_kernel_sup(n, profile, 1.0, t, cone_only=True))
            for t in t_set]
    reports["4.10_t"] = fit_power_law(rows, "4.10", "t", target=-top,
                                      tolerance=0.2,
                                      one_sided=True).as_dict()
    hrows = [(h, _free_kernel_sup(n, profile, h, 2.0)) for h in h_set]
    reports["4.10_h"] = fit_power_law(hrows, "4.10", "h",
                                      target=1.0 - n,
                                      tolerance=0.4).as_dict()
    reports["4.10_h"]["note"] = ("free n-dim kernel sup at t = 2; for "
                                 "t >> h the attained exponent relaxes "
                                 "to -(n+1)/2")
    # perturbative cross-check: the sector propagator difference at the
    # same endpoints, recorded without a fit target
    prows = phi_norms(1.0, t_set, "1inf")
    reports["4.10_sector_t"] = fit_power_law(
        prows, "4.10", "t", target=-top, tolerance=0.6,
        one_sided=True).as_dict()
    reports["4.10_sector_t"]["note"] = SECTOR_NOTE

    # (4.6): weighted L2 -> Linf surrogate
    w46 = weight_matrix(grid, (n - 1 + eps) / 2.0)
    rows = phi_norms(1.0, t_set, "2inf", w46)
    reports["4.6_t"] = fit_power_law(rows, "4.6", "t", target=-top,
                                     tolerance=0.2,
                                     one_sided=True).as_dict()
    hrows = [(h, phi_norms(h, [t_fixed], "2inf", w46)[0][1])
             for h in h_set]
    reports["4.6_h"] = fit_power_law(hrows, "4.6", "h",
                                     target=1.0 - n / 2.0,
                                     tolerance=0.3).as_dict()

    # (4.2) p=inf: weight alpha(n/2 + eps) with alpha = 1
    w42 = weight_matrix(grid, n / 2.0 + eps)
    hrows = [(h, phi_norms(h, [t_fixed], "2inf", w42)[0][1])
             for h in h_set]
    reports["4.2_h"] = fit_power_law(hrows, "4.2", "h",
                                     target=1.0 - n / 2.0,
                                     tolerance=0.3).as_dict()

    for key in reports:
        reports[key]["note"] = SECTOR_NOTE
    reports["4.1_p2"] = {"note": "alpha = 0 reduces to the 3.1 quantity; "
                                 "see report 3.1", "passed": True}
    return reports


def assemble_thm11(grid, n, potential, a=1.0, t_set=(4.0, 8.0, 16.0,
                                                     32.0, 64.0),
                   eps=EPS, sigma_grid=(0.5, 1.0, 1.7, 2.5, 4.0)):
    """Scalar frequency-integration identity plus sector surrogates of
    the final dispersive estimates (alpha = 1 endpoints)."""
    op = build_G(grid, n, potential)
    chi = step_cutoff(a)
    reports = {}

    # sigma^{-beta} chi_a(sigma) = int_0^1 phi(theta sigma)
    # theta^{beta-1} dtheta with phi(sigma) = sigma^{1-beta} chi'_a(sigma)
    beta = (n + 1) / 2.0
    phi_id = step_cutoff_derivative(a, power=1.0 - beta)
    xg, wg = leggauss(64)
    resid = 0.0
    for sigma in sigma_grid:
        lhs = sigma ** -beta * chi(np.array([sigma]))[0]
        lo_t = min(a / sigma, 1.0)
        hi_t = min(2 * a / sigma, 1.0)
        tg = (lo_t + hi_t) / 2 + (hi_t - lo_t) / 2 * xg
        tw = (hi_t - lo_t) / 2 * wg
        rhs = float(np.sum(tw * phi_id(tg * sigma) * tg ** (beta - 1.0)))
        resid = max(resid, abs(rhs - lhs))
    reports["4.3_identity"] = {"max_residual": resid, "cap": 1e-8,
                               "passed": bool(resid <= 1e-8)}

    top = (n - 1) / 2.0

    # The cutoff chi is supported up to the grid's Nyquist frequency,
    # where discrete modes have zero group velocity and never leave the
    # weight window; a smooth roll-off over [8, 16] keeps the multiplier
    # inside the resolved part of the spectrum.
    resolved = plateau(8.0)

    def multiplier_rows(tilt, kind, weight=None):
        root, amp, vecs = _band(op, chi, 1.0, tilt=tilt, amp_floor=1e-7)
        amp = amp * (1.0 - resolved(root))
        band = (root, amp, vecs)
        right = band[2] if weight is None else weight[:, None] * band[2]
        out = []
        for t in t_set:
            c = _coeff(band[0], band[1], t)
            if kind == "2":
                out.append((t, _lr_norm2(band[2], right, c)))
            elif kind == "1inf":
                out.append((t, _lr_norm_1_to_inf(band[2], right, c,
                                                 grid, n)))
            else:
                out.append((t, _lr_norm_2_to_inf(band[2], right, c,
                                                 grid, n)))
        return out

    w14 = weight_matrix(grid, n / 2.0 + eps)
    rows = multiplier_rows(-(n + 1) / 2.0, "2inf", w14)
    reports["1.4"] = fit_power_law(rows, "1.4", "t", target=-top,
                                   tolerance=0.2, one_sided=True).as_dict()
    rows = multiplier_rows(-(n - 1.0), "1inf")
    reports["1.3"] = fit_power_law(rows, "1.3", "t", target=-top,
                                   tolerance=0.2, one_sided=True).as_dict()
    rows = multiplier_rows(0.0, "2")
    reports["1.2_p2"] = fit_power_law(rows, "1.2", "t", target=0.0,
                                      tolerance=0.05).as_dict()
    for key in ("1.4", "1.3"):
        reports[key]["note"] = SECTOR_NOTE
        reports[key]["frequency_rolloff"] = [8.0, 16.0]
    reports["_exclusions"] = ("full-space L^p' -> L^p norms for "
                              "intermediate p are not reproducible from "
                              "the radial sector and are not claimed")
    return reports


# ---------------------------------------------------------------------------
# report plumbing

def rollup_rows(reports):
    """Flatten nested report dicts into (estimate_id, variable, target,
    fitted, tolerance, pass) rows for the roll-up CSV."""
    rows = []

    def walk(key, node):
        if not isinstance(node, dict):
            return
        if "fitted_exponent" in node:
            rows.append([key, node.get("variable", ""),
                         node.get("target", ""),
                         node.get("fitted_exponent", ""),
                         node.get("tolerance", ""),
                         bool(node.get("passed", False))])
            return
        if "passed" in node and ("ratio" in node or "max_residual" in node
                                 or "scan" in node):
            metric = node.get("ratio", node.get("max_residual", ""))
            rows.append([key, "ratio", node.get("cap", ""), metric, "",
                         bool(node["passed"])])
        for sub, val in node.items():
            if sub.startswith("_"):
                continue
            walk(f"{key}.{sub}" if key else sub, val)

    walk("", reports)
    return rows


def emit_reports(reports, out_dir):
    """One JSON file per top-level estimate id plus rollup.csv."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    written = []
    for key, node in sorted(reports.items()):
        if key.startswith("_"):
            continue
        path = os.path.join(out_dir, f"estimate_{key.replace('.', '_')}.json")
        with open(path, "w") as fh:
            json.dump(node, fh, indent=2, sort_keys=True, default=float)
        written.append(path)
    path = os.path.join(out_dir, "rollup.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["estimate_id", "variable", "target", "fitted",
                    "tolerance", "pass"])
        w.writerows(rollup_rows(reports))
    written.append(path)
    return written
