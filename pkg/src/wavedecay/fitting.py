"""Power-law fitting of scan data and the report record all checks share."""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

__all__ = ["DecayFitReport", "fit_power_law"]


@dataclass
class DecayFitReport:
    """Least-squares fit of log y = log C + e * log x plus the pass rule.

    ``residual`` is the max absolute deviation from the fit line in
    natural-log units.  ``passed`` is a pure function of the recorded
    fields: |fitted_exponent - target| <= tolerance and residual <=
    residual_cap (a None target disables the exponent clause).
    """

    estimate_id: str
    variable: str
    fitted_exponent: float
    fitted_constant: float
    residual: float
    window: tuple
    target: float | None = None
    tolerance: float = 0.0
    residual_cap: float = np.inf
    one_sided: bool = False

    @property
    def passed(self):
        if self.residual > self.residual_cap:
            return False
        if self.target is None:
            return True
        if self.one_sided:
            # pass when at least as steep as the target (signed comparison)
            if self.target <= 0:
                return self.fitted_exponent <= self.target + self.tolerance
            return self.fitted_exponent >= self.target - self.tolerance
        return abs(self.fitted_exponent - self.target) <= self.tolerance

    def as_dict(self):
        d = asdict(self)
        d["passed"] = bool(self.passed)
        d["window"] = list(self.window)
        return d


def fit_power_law(samples, estimate_id="", variable="x", target=None,
                  tolerance=0.0, residual_cap=np.inf, one_sided=False):
    """Fit y = C x^e to positive samples [(x, y), ...] by log-log least
    squares."""
    pts = [(float(x), float(y)) for x, y in samples]
    if len(pts) < 4:
        raise ValueError("need at least 4 samples")
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("samples must be positive")
    if np.max(xs) / np.min(xs) < 8.0:
        raise ValueError("samples must span close to a decade in x")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return DecayFitReport(estimate_id, variable, float(slope),
                          float(np.exp(intercept)), residual,
                          (float(np.min(xs)), float(np.max(xs))),
                          target, tolerance, residual_cap, one_sided)
