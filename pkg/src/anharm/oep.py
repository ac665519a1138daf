"""First order of the frequency-optimized amplitude expansion.

The log-amplitude is expanded around a trial oscillator of frequency omega;
to first order

    W1 = W0(omega) - (m2 - omega^2)/2 * (iL2 + iK)
                   - lam * (iL4 + 6 iL2K + 3 iKK)

in imaginary time, and the continued combination in real time.  The trial
frequency is then fixed point-by-point by stationarity, dW1/domega = 0.
Because dW0/domega = -omega*(iL2 + iK) exactly, the residual reduces to
derivatives of the kernel integrals alone:

    dW1/domega = -(m2 - omega^2)/2 * d(iL2 + iK)/domega
                 - lam * d(iL4 + 6 iL2K + 3 iKK)/domega.

A stationary frequency always exists in imaginary time for lam > 0; when the
bracketing scan finds none, the minimal-sensitivity fallback returns the
omega of least |dW1/domega| and flags it.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import hyper
from .kernels import (CausticError, EuclideanPoint, OscillatorParams,
                      RealTimePoint, _assemble_domega, kernel_integrals_imag,
                      kernel_integrals_imag_domega, kernel_integrals_real,
                      kernel_integrals_real_domega, w0_imag, w0_real)

SCAN_POINTS = 200
SCAN_DECADES = 2.0          # window spans [1e-2, 1e2] * omega_ref
BRACKET_REL_WIDTH = 1e-12
NEWTON_POLISH_STEPS = 3
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class NoStationaryPointError(RuntimeError):
    """The residual could not be evaluated anywhere in the scan window."""


@dataclass(frozen=True)
class GapSolution:
    """Optimized trial frequency and solver diagnostics."""

    omega_star: float
    residual: float
    n_roots: int
    bracket: tuple
    fallback_used: bool


@dataclass(frozen=True)
class FirstOrderAmplitude:
    w_value: complex
    gap: GapSolution
    point: object


def w1_imag(params: OscillatorParams, p: EuclideanPoint, omega: float) -> float:
    k = kernel_integrals_imag(p, omega)
    return (w0_imag(p, omega)
            - 0.5 * (params.m2 - omega * omega) * (k.iL2 + k.iK)
            - params.lam * (k.iL4 + 6.0 * k.iL2K + 3.0 * k.iKK))


def w1_real(params: OscillatorParams, p: RealTimePoint, omega: float) -> complex:
    k = kernel_integrals_real(p, omega)
    return (w0_real(p, omega)
            - 0.5 * (params.m2 - omega * omega) * (k.iL2 + 1j * k.iK)
            - params.lam * (k.iL4 + 6j * k.iL2K - 3.0 * k.iKK))


def gap_residual_imag(params: OscillatorParams, p: EuclideanPoint, omega: float) -> float:
    """dW1/domega, from the analytic omega-derivatives of the closed forms."""
    d = kernel_integrals_imag_domega(p, omega)
    return (-0.5 * (params.m2 - omega * omega) * (d.iL2 + d.iK)
            - params.lam * (d.iL4 + 6.0 * d.iL2K + 3.0 * d.iKK))


def gap_residual_real(params: OscillatorParams, p: RealTimePoint, omega: float) -> complex:
    d = kernel_integrals_real_domega(p, omega)
    return (-0.5 * (params.m2 - omega * omega) * (d.iL2 + 1j * d.iK)
            - params.lam * (d.iL4 + 6j * d.iL2K - 3.0 * d.iKK))


def _residual_scan(params: OscillatorParams, p: EuclideanPoint, omegas):
    """gap_residual_imag on a whole frequency grid at once."""
    omegas = np.asarray(omegas, dtype=float)
    z = omegas * p.beta
    s, sd = hyper.shape_factors_d_grid(z)
    d = _assemble_domega(s, sd, p.x_a, p.x_b, omegas, z)
    return (-0.5 * (params.m2 - omegas * omegas) * (d.iL2 + d.iK)
            - params.lam * (d.iL4 + 6.0 * d.iL2K + 3.0 * d.iKK))


def scan_window(params: OscillatorParams, x_a: float, x_b: float, horizon: float):
    """Log grid of candidate frequencies bracketing all relevant scales.

    omega_ref mixes the bare curvature, the strong-coupling cubic scale and
    the inverse horizon (beta or T), so the window covers the harmonic limit,
    the zero-temperature limit and the short-time limit.
    """
    omega_ref = max(math.sqrt(abs(params.m2)),
                    (6.0 * params.lam * max(1.0, x_a * x_a + x_b * x_b)) ** (1.0 / 3.0),
                    1.0 / horizon)
    lo = math.log(omega_ref) - SCAN_DECADES * math.log(10.0)
    step = 2.0 * SCAN_DECADES * math.log(10.0) / (SCAN_POINTS - 1)
    return [math.exp(lo + i * step) for i in range(SCAN_POINTS)]


def _bisect(f, lo, hi, flo, fhi):
    while hi - lo > BRACKET_REL_WIDTH * hi:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid, mid
        if (flo < 0.0) != (fmid < 0.0):
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return lo, hi


def _newton_polish(f, x, lo, hi):
    for _ in range(NEWTON_POLISH_STEPS):
        h = 1e-6 * x
        slope = (f(x + h) - f(x - h)) / (2.0 * h)
        if slope == 0.0:
            break
        step = f(x) / slope
        cand = x - step
        if not (lo <= cand <= hi) or not math.isfinite(cand):
            break
        x = cand
    return x


def _golden_min(f, lo, hi, iters=80):
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b), (a, b)


def _find_brackets(grid, vals):
    brackets = []
    prev_i = None
    for i, v in enumerate(vals):
        if not math.isfinite(v):
            prev_i = None
            continue
        if v == 0.0:
            brackets.append((i, i))
            prev_i = i
            continue
        if prev_i is not None and (vals[prev_i] < 0.0) != (v < 0.0):
            brackets.append((prev_i, i))
        prev_i = i
    return brackets


@lru_cache(maxsize=1 << 17)
def optimize_omega_imag(params: OscillatorParams, p: EuclideanPoint,
                        tol: float = 1e-10) -> GapSolution:
    """Solve dW1/domega = 0 for this endpoint pair and temperature.

    Scans a log grid, bisects the sign change connected to the large-omega
    branch (the largest root), and polishes with a few Newton steps.  With no
    sign change anywhere, returns the minimal-sensitivity frequency (least
    |dW1/domega|) with fallback_used set.
    """
    grid = scan_window(params, p.x_a, p.x_b, p.beta)

    def resid(w):
        return gap_residual_imag(params, p, w)

    vals = [float(v) for v in _residual_scan(params, p, grid)]
    if not any(math.isfinite(v) for v in vals):
        raise NoStationaryPointError(
            f"residual not finite anywhere in the scan window for {p}")
    brackets = _find_brackets(grid, vals)
    n_roots = len(brackets)
    if brackets:
        i, j = brackets[-1]
        if i == j:
            omega = grid[i]
            lo = hi = omega
        else:
            # the scan is vectorized; re-anchor the bracket on the scalar
            # residual before bisecting (widen by one cell if an endpoint
            # sits within rounding of the root)
            i0, j0 = i, j
            flo, fhi = resid(grid[i]), resid(grid[j])
            while (flo < 0.0) == (fhi < 0.0):
                i0, j0 = max(i0 - 1, 0), min(j0 + 1, len(grid) - 1)
                if (i0, j0) == (0, len(grid) - 1):
                    break
                flo, fhi = resid(grid[i0]), resid(grid[j0])
            lo, hi = _bisect(resid, grid[i0], grid[j0], flo, fhi)
            omega = _newton_polish(resid, 0.5 * (lo + hi), grid[i0], grid[j0])
        res = abs(resid(omega))
        scale = max(1.0, abs(w1_imag(params, p, omega)) / omega)
        if res <= tol * scale:
            return GapSolution(omega, res, n_roots, (lo, hi), False)
        # bisection met its width target but the residual did not drop below
        # tolerance: report the least-sensitive point instead of a fake root
        omega, (lo, hi) = _golden_min(lambda w: abs(resid(w)), lo, hi)
        return GapSolution(omega, abs(resid(omega)), n_roots, (lo, hi), True)
    absvals = [abs(v) if math.isfinite(v) else math.inf for v in vals]
    i = min(range(len(absvals)), key=absvals.__getitem__)
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    omega, bracket = _golden_min(lambda w: abs(resid(w)), lo, hi)
    return GapSolution(omega, abs(resid(omega)), 0, bracket, True)


def optimize_omega_real(params: OscillatorParams, p: RealTimePoint,
                        tol: float = 1e-10) -> GapSolution:
    """Real trial frequency for a real-time point.

    The residual of a complex W generally has no real zero.  Candidate zeros
    of its real and imaginary parts are bisected and accepted only when the
    full |dW1/domega| vanishes within tolerance (this recovers the exact
    stationary point in the harmonic limit and on the continuation edge
    T = -i*beta).  Otherwise the least-sensitive omega is returned: the
    largest interior local minimum of |dW1/domega| in the scan window, with
    fallback_used set.  n_roots counts the accepted exact roots.
    """
    grid = scan_window(params, p.x_a, p.x_b, abs(complex(p.T)))

    def resid(w):
        try:
            return gap_residual_real(params, p, w)
        except CausticError:
            return complex(math.inf, math.inf)

    def good(w):
        try:
            scale = max(1.0, abs(w1_real(params, p, w)) / w)
        except CausticError:
            return False
        return abs(resid(w)) <= tol * scale

    vals = [resid(w) for w in grid]
    mags = [abs(v) if math.isfinite(abs(v)) else math.inf for v in vals]
    if not any(math.isfinite(m) for m in mags):
        raise NoStationaryPointError(
            f"residual not finite anywhere in the scan window for {p}")

    # exact stationary points: zeros of one component where the other one
    # vanishes too; keep the largest
    roots = []
    for part in (lambda w: resid(w).real, lambda w: resid(w).imag):
        pvals = [part(w) for w in grid]
        for i, j in _find_brackets(grid, pvals):
            if i == j:
                cand, bracket = grid[i], (grid[i], grid[i])
            else:
                lo, hi = _bisect(part, grid[i], grid[j], pvals[i], pvals[j])
                cand = _newton_polish(part, 0.5 * (lo + hi), grid[i], grid[j])
                bracket = (lo, hi)
            if good(cand):
                roots.append((cand, bracket))
    if roots:
        omega, bracket = max(roots)
        return GapSolution(omega, abs(resid(omega)), len(roots), bracket, False)

    # minimal sensitivity: the deepest interior dip of |residual|.  Window
    # edges are excluded (the residual always decays towards omega -> 0), and
    # for real T the shallow dips between successive focal-point poles lose
    # against the genuine near-stationary dip.
    dips = [i for i in range(1, len(mags) - 1)
            if mags[i] < mags[i - 1] and mags[i] <= mags[i + 1]
            and math.isfinite(mags[i])]
    if dips:
        pick = min(dips, key=mags.__getitem__)
    else:
        pick = min(range(len(mags)), key=mags.__getitem__)
    lo = grid[max(pick - 1, 0)]
    hi = grid[min(pick + 1, len(grid) - 1)]
    omega, bracket = _golden_min(lambda w: abs(resid(w)) ** 2, lo, hi)
    return GapSolution(omega, abs(resid(omega)), 0, bracket, True)


def optimized_w1_imag(params: OscillatorParams, p: EuclideanPoint,
                      tol: float = 1e-10) -> FirstOrderAmplitude:
    gap = optimize_omega_imag(params, p, tol)
    return FirstOrderAmplitude(w1_imag(params, p, gap.omega_star), gap, p)


def optimized_w1_real(params: OscillatorParams, p: RealTimePoint,
                      tol: float = 1e-10) -> FirstOrderAmplitude:
    gap = optimize_omega_real(params, p, tol)
    return FirstOrderAmplitude(w1_real(params, p, gap.omega_star), gap, p)
