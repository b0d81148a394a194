"""Secular-growth detection for series terms.

A term is secular when its norm grows polynomially in time. Growth is
measured by a least-squares fit of ||psi^(j)(t)|| against {1, t, t^2} over an
analysis window; a coefficient counts when it exceeds ``SIGNIFICANCE`` times
its standard error.

The residuals of these fits are deterministic oscillations, not white noise,
so standard errors use the Newey-West (Bartlett kernel) estimator with a
bandwidth of a quarter of the window. Ordinary least-squares errors would
flag a bounded |sin t| envelope as growing.
"""

from dataclasses import asdict, dataclass

import numpy as np

SIGNIFICANCE = 5.0
MIN_SAMPLES = 20
BANDWIDTH_FRACTION = 0.25
# coefficients whose total effect over the window is below this fraction of
# the signal scale are treated as rounding noise
NOISE_FLOOR = 1e-12

CLASSES = ("bounded", "linear", "superlinear")


@dataclass(frozen=True)
class GrowthFit:
    """Polynomial growth fit of one series term.

    ``coefficients`` are the constant, t and t^2 coefficients of the model
    of degree ``degree`` (in powers of absolute time). ``slope`` and
    ``curvature`` come from the quadratic fit centred on the window and are
    the quantities whose significance decides ``classification``.
    """

    order: int
    mode: str
    degree: int
    coefficients: tuple
    residual: float
    slope: float
    slope_stderr: float
    curvature: float
    curvature_stderr: float
    classification: str
    window: tuple

    def to_dict(self):
        d = asdict(self)
        d["coefficients"] = list(self.coefficients)
        d["window"] = list(self.window)
        return d


def _hac_cov(x, resid, bandwidth):
    n, p = x.shape
    xtx_inv = np.linalg.inv(x.T @ x)
    u = x * resid[:, None]
    s = u.T @ u
    for lag in range(1, bandwidth + 1):
        w = 1.0 - lag / (bandwidth + 1.0)
        g = u[lag:].T @ u[:-lag]
        s += w * (g + g.T)
    return xtx_inv @ s @ xtx_inv * (n / (n - p))


def _polyfit(t, y, degree):
    x = np.vander(t, degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ coef
    return coef, float(resid @ resid)


def fit_growth(times, values, order=0, mode="raw", significance=SIGNIFICANCE):
    """Classify the growth of ``values`` sampled at ``times``."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.size < MIN_SAMPLES:
        raise ValueError(f"growth fit needs at least {MIN_SAMPLES} samples, got {t.size}")
    centre = 0.5 * (t[0] + t[-1])
    half = 0.5 * (t[-1] - t[0])
    if half <= 0:
        raise ValueError("growth window has zero length")
    # fit on a dimensionless variable in [-1, 1] for conditioning
    s = (t - centre) / half
    x = np.vander(s, 3, increasing=True)
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ coef
    bw = max(1, int(BANDWIDTH_FRACTION * t.size))
    se = np.sqrt(np.clip(np.diag(_hac_cov(x, resid, bw)), 0.0, None))
    floor = NOISE_FLOOR * max(float(np.max(np.abs(y))), np.finfo(float).tiny)
    se = np.maximum(se, floor)

    slope, curv = coef[1] / half, coef[2] / half**2
    slope_se, curv_se = se[1] / half, se[2] / half**2
    if abs(coef[2]) > significance * se[2]:
        cls, degree = "superlinear", 2
    elif abs(coef[1]) > significance * se[1]:
        cls, degree = "linear", 1
    else:
        cls, degree = "bounded", 0
    pcoef, rss = _polyfit(t, y, degree)
    return GrowthFit(
        order=int(order),
        mode=mode,
        degree=degree,
        coefficients=tuple(float(c) for c in pcoef),
        residual=rss,
        slope=float(slope),
        slope_stderr=float(slope_se),
        curvature=float(curv),
        curvature_stderr=float(curv_se),
        classification=cls,
        window=(float(t[0]), float(t[-1])),
    )


def window_mask(times, window=None):
    """Boolean mask of the analysis window; default is the second half of ``times``."""
    times = np.asarray(times)
    if window is None:
        mid = 0.5 * (times[0] + times[-1])
        return times >= mid
    lo, hi = window
    return (times >= lo) & (times <= hi)


def fit_term_growth(series, order, window=None):
    """Growth fit of ||psi^(order)(t)|| over ``window`` (a (t_lo, t_hi) pair)."""
    if not 0 <= order <= series.max_order:
        raise ValueError(f"series has orders 0..{series.max_order}, requested {order}")
    mask = window_mask(series.times, window)
    n = int(mask.sum())
    if n < MIN_SAMPLES:
        raise ValueError(f"window contains {n} samples; at least {MIN_SAMPLES} are required")
    return fit_growth(series.times[mask], series.norms(order)[mask], order, series.mode)


def secularity_report(series_by_mode, frame=None, window=None):
    """Growth fits for every (order, mode) plus level-shift diagnostics.

    Returns a JSON-serialisable dict.
    """
    fits = []
    for mode, series in series_by_mode.items():
        for order in range(series.max_order + 1):
            fits.append(fit_term_growth(series, order, window).to_dict())
    report = {"fits": fits}
    if frame is not None:
        shifts = np.asarray(frame.level_shifts)
        report["level_shifts"] = {
            "initial": [float(s) for s in shifts[0]] if shifts.shape[1] <= 16 else None,
            "min": float(shifts.min()),
            "max": float(shifts.max()),
            "time_variation": float(np.max(np.ptp(shifts, axis=0))),
        }
        ratio = np.asarray(frame.validity_ratio())
        report["validity_ratio"] = {"max": float(np.max(ratio)), "mean": float(np.mean(ratio))}
    if "resummed" in series_by_mode and series_by_mode["resummed"].max_order >= 1:
        s = series_by_mode["resummed"]
        dev = s.norms(1) / s.norms(0)
        report["development_parameter"] = float(np.max(dev))
    return report


def classification_table(report):
    """{(order, mode): classification} view of a report."""
    return {(f["order"], f["mode"]): f["classification"] for f in report["fits"]}
