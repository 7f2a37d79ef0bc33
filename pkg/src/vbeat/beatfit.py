"""Beat-frequency extraction from intensity traces.

Two fit models share a single exponential envelope:

    single:  I(t) = exp(-t/T1) * (A + B cos(w t + phi))
    triple:  I(t) = exp(-t/T1) * (A + sum_j B_j cos(w_j t + phi_j)),
             w_j in {W - d0/2, W, W + d0/2}

In the triple model the splitting d0 is known and the shared rate W is the
single free frequency parameter, so the three components are hard-locked to
the dressed-state relation and W is the physical result of the fit.

Seeding comes from the windowed power spectrum of the decay-flattened trace;
the nonlinear refinement is a damped Gauss-Newton loop with Marquardt-style
lambda adaptation (x0.3 on an accepted step, x3 on a rejected one).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .core import angular_to_ghz
from .detection import IntensityTrace

__all__ = [
    "FitModel",
    "FftPeak",
    "FftPeaks",
    "BeatFitResult",
    "TraceTooShort",
    "AmbiguousSeed",
    "DegenerateOmega",
    "fft_peaks",
    "fit_fss_beat",
    "fit_triple_beat",
    "evaluate_model",
]

_MIN_SAMPLES = 64
_MIN_RATE = 1e-12            # floor on the envelope rate; caps T1 at 1e12 ps
_LAMBDA0 = 1e-3
_LAMBDA_UP = 3.0
_LAMBDA_DOWN = 0.3
_GTOL = 1e-8


class TraceTooShort(ValueError):
    pass


class AmbiguousSeed(RuntimeError):
    """The power spectrum shows no peak to seed the frequency from."""


class DegenerateOmega(RuntimeError):
    """Fitted Rabi rate collapsed below delta0 * 1e-3."""


class FitModel(str, Enum):
    SINGLE = "single"
    TRIPLE = "triple"


@dataclass(frozen=True)
class FftPeak:
    frequency_rad_per_ps: float
    power: float


@dataclass(frozen=True)
class FftPeaks:
    peaks: tuple[FftPeak, ...]
    resolution_rad_per_ps: float

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([p.frequency_rad_per_ps for p in self.peaks])


@dataclass
class BeatFitResult:
    """Fitted envelope + sinusoid parameters with diagnostics.

    The model is

        I(t) = offset + exp(-t/T1) * (baseline + sum_j B_j cos(w_j t + phi_j))

    evaluated on absolute trace time, so overlays reproduce from these
    numbers alone.  The offset vanishes for free-decay transients and
    captures the steady value a driven trace relaxes toward.  Components are
    sorted by ascending frequency; component_roles names the dressed-state
    branch each one came from ("minus"/"center"/"plus" for the triple model,
    "single" otherwise).
    """

    model_kind: FitModel
    t1_ps: float
    offset: float
    baseline: float
    frequencies_rad_per_ps: np.ndarray
    amplitudes: np.ndarray
    phases_rad: np.ndarray
    component_roles: tuple[str, ...]
    omega_rad_per_ps: float            # single: the beat; triple: shared Rabi rate
    delta0_rad_per_ps: float           # 0 for the single model
    residual_rms: float
    converged: bool
    iterations: int
    covariance: np.ndarray | None
    param_names: tuple[str, ...]
    residual_history: tuple[float, ...]
    window_ps: tuple[float, float]
    warnings: tuple[str, ...] = ()

    @property
    def frequencies_ghz(self) -> np.ndarray:
        return angular_to_ghz(self.frequencies_rad_per_ps)

    @property
    def omega_ghz(self) -> float:
        return angular_to_ghz(self.omega_rad_per_ps)

    def omega_stderr_rad_per_ps(self) -> float:
        if self.covariance is None:
            return math.nan
        i = self.param_names.index("omega")
        var = self.covariance[i, i]
        return math.sqrt(var) if var >= 0 else math.nan


def evaluate_model(result: BeatFitResult, times_ps: np.ndarray) -> np.ndarray:
    """Evaluate the fitted model on a time grid (shared overlay formula)."""
    t = np.asarray(times_ps, dtype=float)
    out = np.full_like(t, result.baseline)
    for freq, amp, phase in zip(
        result.frequencies_rad_per_ps, result.amplitudes, result.phases_rad
    ):
        out = out + amp * np.cos(freq * t + phase)
    return result.offset + np.exp(-t / result.t1_ps) * out


# ---------------------------------------------------------------------------
# spectral seeding
# ---------------------------------------------------------------------------

def _exp_envelope(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Weighted log-linear fit of y ~ amp * exp(-rate * t)."""
    scale = float(np.max(np.abs(y)))
    if scale <= 0.0:
        return 1.0, 0.0
    mask = y > 1e-3 * scale
    if int(mask.sum()) < 8:
        return scale, 0.0
    slope, intercept = np.polyfit(t[mask], np.log(y[mask]), 1, w=y[mask])
    rate = max(-slope, 0.0)
    return float(np.exp(intercept)), rate


def _damped_design(
    t: np.ndarray, rate: float, freqs: list[float], baseline: str = "detect"
) -> np.ndarray:
    """Tone basis under a shared envelope with a selectable baseline model.

    "bare"   -> env only (every term decays together)
    "const"  -> free constant + env (driven traces relaxing to a steady value)
    "detect" -> const + env + t*env (absorbs first-order envelope-rate error,
                keeping peak detection stable before the tones are known)
    """
    env = np.exp(-rate * t)
    if baseline == "bare":
        cols = [env]
    elif baseline == "const":
        cols = [np.ones_like(t), env]
    else:
        cols = [np.ones_like(t), env, (t / t[-1]) * env]
    for w in freqs:
        cols.append(env * np.cos(w * t))
        cols.append(env * np.sin(w * t))
    return np.column_stack(cols)


def _damped_fit(t, y, rate, freqs, baseline="detect"):
    design = _damped_design(t, rate, freqs, baseline)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    rss = float(np.sum((design @ coef - y) ** 2))
    return coef, rss


def _damped_rss(t, y, rate, freqs, baseline="detect") -> float:
    return _damped_fit(t, y, rate, freqs, baseline)[1]


def fft_peaks(trace: IntensityTrace, max_peaks: int = 5, pad_factor: int = 16) -> FftPeaks:
    """Dominant frequencies of the decay-flattened, Hann-windowed trace.

    Candidate tones are local maxima of the zero-padded power spectrum of the
    residual after subtracting the tones already found.  Each candidate is
    refined against a damped-tone least-squares model (shared exponential
    envelope, refined alongside the frequencies), which removes the window
    leakage and mirror bias a bare spectral argmax suffers from on short
    records.  Peaks come back sorted by power (ties: lowest frequency first);
    the native resolution 2pi/(N dt) is reported alongside.
    """
    t = np.asarray(trace.times_ps, dtype=float)
    y = np.asarray(trace.values, dtype=float)
    n = len(y)
    if n < _MIN_SAMPLES:
        raise TraceTooShort(f"need >= {_MIN_SAMPLES} samples, got {n}")
    dt = trace.dt_ps
    resolution = 2.0 * math.pi / (n * dt)
    if float(np.max(np.abs(y))) < 1e-12:
        # intensities are excited-population units: anything this small is
        # below the state-validity tolerances, i.e. numerically zero
        return FftPeaks(peaks=(), resolution_rad_per_ps=resolution)

    _, rate = _exp_envelope(t, y)
    scale = max(float(np.max(np.abs(y))), 1e-300)
    rate_hi = max(5.0 * rate, 10.0 / (t[-1] - t[0]))

    def refine_rate(freqs, baseline="detect"):
        # ill-posed without tones: a large rate just carves out early samples
        if not freqs:
            return rate
        opt = minimize_scalar(
            lambda q: _damped_rss(t, y, q, freqs, baseline),
            bounds=(0.0, rate_hi),
            method="bounded",
            options={"xatol": 1e-9},
        )
        return float(opt.x)

    def refine_freqs(r, freqs, passes=2, baseline="detect"):
        freqs = list(freqs)
        for _ in range(passes):
            moved = 0.0
            for i in range(len(freqs)):
                others = freqs[:i] + freqs[i + 1 :]
                lo = max(freqs[i] - resolution, 0.05 * resolution)
                hi = freqs[i] + resolution
                opt = minimize_scalar(
                    lambda w: _damped_rss(t, y, r, others + [w], baseline),
                    bounds=(lo, hi),
                    method="bounded",
                    options={"xatol": 1e-7 * resolution},
                )
                moved = max(moved, abs(float(opt.x) - freqs[i]))
                freqs[i] = float(opt.x)
            if moved < 1e-6 * resolution:
                break
        return freqs

    window = np.hanning(n)
    n_fft = pad_factor * (1 << int(math.ceil(math.log2(n))))
    grid = 2.0 * math.pi * np.fft.rfftfreq(n_fft, d=dt)
    k_min = max(int(0.25 * resolution / grid[1]), 1)   # ignore sub-bin drift

    freqs: list[float] = []
    powers: list[float] = []
    top_power = None
    for _ in range(max_peaks):
        coef, _ = _damped_fit(t, y, rate, freqs)
        residual = y - _damped_design(t, rate, freqs) @ coef
        if float(np.max(np.abs(residual))) < 1e-8 * scale and top_power is None:
            break
        power = np.abs(np.fft.rfft(residual * window, n=n_fft)) ** 2

        # candidate local maxima, strongest first; skip tones already found
        interior = np.zeros(len(power), dtype=bool)
        interior[k_min:-1] = (power[k_min:-1] > power[k_min - 1 : -2]) & (
            power[k_min:-1] >= power[k_min + 1 :]
        )
        cand = np.flatnonzero(interior)
        cand = cand[
            [not any(abs(grid[k] - w) < 0.5 * resolution for w in freqs) for k in cand]
        ]
        if cand.size == 0:
            break
        cand = cand[np.lexsort((grid[cand], -power[cand]))][:5]
        # a genuine tone towers over the broadband floor; a white-noise
        # residual peaks at only ~log(n_bins) times its median
        if power[cand[0]] < 100.0 * float(np.median(power[k_min:])):
            break
        if top_power is None:
            top_power = power[cand[0]]
            if top_power <= 0.0:
                break
        if power[cand[0]] < 1e-6 * top_power:
            break

        # accept whichever candidate explains the most residual energy:
        # a narrow drift artifact can out-peak a broad genuine tone
        best = None
        for k in cand:
            w0 = grid[k]
            opt = minimize_scalar(
                lambda w: _damped_rss(t, y, rate, freqs + [w]),
                bounds=(max(w0 - resolution, 0.05 * resolution), w0 + resolution),
                method="bounded",
                options={"xatol": 1e-6 * resolution},
            )
            if best is None or opt.fun < best[0]:
                best = (float(opt.fun), float(opt.x), float(power[k]))
        trial = refine_freqs(rate, freqs + [best[1]])
        if any(abs(trial[-1] - w) < 0.25 * resolution for w in trial[:-1]):
            break   # refinement collapsed onto an existing tone
        freqs = trial
        powers.append(best[2])
        rate = refine_rate(freqs)

    if freqs:
        # final polish under the two minimal baseline models; keep the better.
        # Coordinate descent first, then a joint simplex pass over
        # (rate, frequencies) with the amplitudes profiled out.
        def profiled_rss(params, baseline):
            r = params[0]
            if not 0.0 <= r <= rate_hi:
                return 1e300
            return _damped_rss(t, y, r, [abs(w) for w in params[1:]], baseline)

        best = None
        for baseline in ("const", "bare"):
            r_v, f_v = rate, list(freqs)
            for _ in range(4):
                r_v = refine_rate(f_v, baseline)
                f_new = refine_freqs(r_v, f_v, passes=3, baseline=baseline)
                if max(abs(a - b) for a, b in zip(f_new, f_v)) < 1e-7 * resolution:
                    f_v = f_new
                    break
                f_v = f_new
            sol = minimize(
                profiled_rss,
                np.array([r_v, *f_v]),
                args=(baseline,),
                method="Nelder-Mead",
                options={"xatol": 1e-10, "fatol": 1e-16 * float(y @ y), "maxiter": 4000},
            )
            if sol.fun <= _damped_rss(t, y, r_v, f_v, baseline):
                rss, f_v = float(sol.fun), [abs(w) for w in sol.x[1:]]
            else:
                rss = _damped_rss(t, y, r_v, f_v, baseline)
            if best is None or rss < best[0]:
                best = (rss, f_v)
        freqs = best[1]

    found = [
        FftPeak(frequency_rad_per_ps=w, power=p) for w, p in zip(freqs, powers)
    ]
    found.sort(key=lambda p: (-p.power, p.frequency_rad_per_ps))
    return FftPeaks(peaks=tuple(found), resolution_rad_per_ps=resolution)


# ---------------------------------------------------------------------------
# damped Gauss-Newton engine
# ---------------------------------------------------------------------------

def _marquardt(y, model_fn, jac_fn, p0, max_iter=200):
    p = np.array(p0, dtype=float)
    res = model_fn(p) - y
    cost = 0.5 * float(res @ res)
    history = [math.sqrt(2.0 * cost / len(y))]
    scale_y = max(float(np.max(np.abs(y))), 1e-300)
    lam = _LAMBDA0
    iterations = 0

    def gtol(jac, residual):
        return _GTOL * (scale_y + np.linalg.norm(jac) * np.linalg.norm(residual))

    for _ in range(max_iter):
        jac = jac_fn(p)
        grad = jac.T @ res
        if float(np.max(np.abs(grad))) < gtol(jac, res):
            break
        jtj = jac.T @ jac
        diag = np.diag(jtj).copy()
        diag[diag <= 0.0] = 1.0
        accepted = False
        while lam < 1e13:
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(jtj + lam * np.diag(diag), -grad, rcond=None)[0]
            p_try = p.copy() + step
            p_try[0] = max(p_try[0], _MIN_RATE)
            res_try = model_fn(p_try) - y
            cost_try = 0.5 * float(res_try @ res_try)
            if cost_try < cost:
                p, res, cost = p_try, res_try, cost_try
                lam = max(lam * _LAMBDA_DOWN, 1e-14)
                history.append(math.sqrt(2.0 * cost / len(y)))
                accepted = True
                break
            lam *= _LAMBDA_UP
        iterations += 1
        if not accepted:
            break

    jac = jac_fn(p)
    grad = jac.T @ res
    converged = float(np.max(np.abs(grad))) < gtol(jac, res)
    return p, res, jac, converged, iterations, tuple(history)


def _covariance(jac: np.ndarray, res: np.ndarray) -> np.ndarray | None:
    n, k = jac.shape
    if n <= k:
        return None
    sigma2 = float(res @ res) / (n - k)
    return sigma2 * np.linalg.pinv(jac.T @ jac)


def _linear_amplitudes(t, y, rate, freqs):
    """(offset, baseline, amplitude pairs) given the nonlinear parameters."""
    return _damped_fit(t, y, rate, list(freqs), baseline="const")


def _amp_phase(bc: float, bs: float) -> tuple[float, float]:
    # Bc cos(wt) + Bs sin(wt) = B cos(wt + phi)
    return math.hypot(bc, bs), math.atan2(-bs, bc)


# ---------------------------------------------------------------------------
# single-beat fit
# ---------------------------------------------------------------------------

def _single_model(t, p):
    r, off, a, bc, bs, w = p
    return off + np.exp(-r * t) * (a + bc * np.cos(w * t) + bs * np.sin(w * t))

def _single_jac(t, p):
    r, off, a, bc, bs, w = p
    env = np.exp(-r * t)
    c, s = np.cos(w * t), np.sin(w * t)
    osc = a + bc * c + bs * s
    return np.column_stack([
        -t * env * osc,
        np.ones_like(t),
        env,
        env * c,
        env * s,
        env * t * (-bc * s + bs * c),
    ])


def fit_fss_beat(trace: IntensityTrace, init: dict | None = None) -> BeatFitResult:
    """Fit the single-beat model; the fitted frequency is the splitting beat.

    Raises AmbiguousSeed when the power spectrum has no peak to start from,
    TraceTooShort when the window covers fewer than 1.5 beat periods.
    """
    t = np.asarray(trace.times_ps, dtype=float)
    y = np.asarray(trace.values, dtype=float)
    init = init or {}

    if "omega_rad_per_ps" in init:
        omega0 = float(init["omega_rad_per_ps"])
    else:
        peaks = fft_peaks(trace)
        if not peaks.peaks:
            raise AmbiguousSeed("power spectrum shows no beat component")
        omega0 = peaks.peaks[0].frequency_rad_per_ps
    span = t[-1] - t[0]
    if span < 1.5 * 2.0 * math.pi / omega0:
        raise TraceTooShort("window covers fewer than 1.5 beat periods")

    _, rate = _exp_envelope(t, y)
    rate = float(init.get("rate_per_ps", max(rate, _MIN_RATE)))
    coef, _ = _linear_amplitudes(t, y, rate, [omega0])
    p0 = [rate, coef[0], coef[1], coef[2], coef[3], omega0]

    p, res, jac, converged, iterations, history = _marquardt(
        y, lambda q: _single_model(t, q), lambda q: _single_jac(t, q), p0
    )
    b, phi = _amp_phase(p[3], p[4])
    omega = abs(p[5])
    if p[5] < 0:
        phi = -phi
    return BeatFitResult(
        model_kind=FitModel.SINGLE,
        t1_ps=1.0 / p[0],
        offset=p[1],
        baseline=p[2],
        frequencies_rad_per_ps=np.array([omega]),
        amplitudes=np.array([b]),
        phases_rad=np.array([phi]),
        component_roles=("single",),
        omega_rad_per_ps=omega,
        delta0_rad_per_ps=0.0,
        residual_rms=math.sqrt(float(res @ res) / len(y)),
        converged=converged,
        iterations=iterations,
        covariance=_covariance(jac, res),
        param_names=("rate", "offset", "baseline", "bc", "bs", "omega"),
        residual_history=history,
        window_ps=(float(t[0]), float(t[-1])),
    )


# ---------------------------------------------------------------------------
# triple-beat fit
# ---------------------------------------------------------------------------

def _triple_freqs(omega: float, delta0: float) -> tuple[float, float, float]:
    return omega - 0.5 * delta0, omega, omega + 0.5 * delta0

def _triple_model(t, p, delta0):
    r, off, a = p[0], p[1], p[2]
    out = np.full_like(t, a)
    for j, w in enumerate(_triple_freqs(p[9], delta0)):
        bc, bs = p[3 + 2 * j], p[4 + 2 * j]
        out = out + bc * np.cos(w * t) + bs * np.sin(w * t)
    return off + np.exp(-r * t) * out

def _triple_jac(t, p, delta0):
    r = p[0]
    env = np.exp(-r * t)
    freqs = _triple_freqs(p[9], delta0)
    cols = [None, np.ones_like(t), env]
    domega = np.zeros_like(t)
    osc = np.full_like(t, p[2])
    for j, w in enumerate(freqs):
        bc, bs = p[3 + 2 * j], p[4 + 2 * j]
        c, s = np.cos(w * t), np.sin(w * t)
        cols.append(env * c)
        cols.append(env * s)
        osc = osc + bc * c + bs * s
        domega = domega + (-bc * s + bs * c)   # dw_j/dW = 1 for every branch
    cols[0] = -t * env * osc
    cols.append(env * t * domega)
    return np.column_stack(cols)


def fit_triple_beat(
    trace: IntensityTrace,
    delta0_rad_per_ps: float,
    init: dict | None = None,
) -> BeatFitResult:
    """Constrained three-component fit with the splitting delta0 held fixed.

    The Rabi rate seed is chosen among FFT peaks and their +-delta0/2 images
    by the residual of the linear amplitude subproblem.  Raises
    DegenerateOmega when the fitted rate collapses below delta0 * 1e-3.
    """
    if delta0_rad_per_ps < 0:
        raise ValueError("delta0_rad_per_ps must be >= 0")
    delta0 = float(delta0_rad_per_ps)
    t = np.asarray(trace.times_ps, dtype=float)
    y = np.asarray(trace.values, dtype=float)
    init = init or {}
    warnings: list[str] = []

    _, rate = _exp_envelope(t, y)
    rate = float(init.get("rate_per_ps", max(rate, _MIN_RATE)))

    if "omega_rad_per_ps" in init:
        candidates = [float(init["omega_rad_per_ps"])]
        w_top = candidates[0]
    else:
        peaks = fft_peaks(trace)
        if not peaks.peaks:
            raise AmbiguousSeed("power spectrum shows no beat component")
        w_top = peaks.peaks[0].frequency_rad_per_ps
        candidates = []
        for pk in peaks.peaks:
            w = pk.frequency_rad_per_ps
            for cand in (w, w + 0.5 * delta0, w - 0.5 * delta0, 0.5 * delta0 - w):
                if cand > 0 and not any(abs(cand - c) < 1e-12 for c in candidates):
                    candidates.append(cand)

    # Several candidate rates can park a branch on the same observed tone.
    # Rank by residual with the envelope rate optimized per candidate,
    # preferring solutions whose center component dominates: the center
    # carries the Rabi oscillation, which is the strongest beat of a driven
    # emitter, whereas parking it on a weak side tone inverts the roles.
    # Near-ties break toward the strongest peak as the center.
    rate_hi = max(5.0 * rate, 10.0 / (t[-1] - t[0]))
    scored = []
    for cand in candidates:
        freqs3 = list(_triple_freqs(cand, delta0))
        opt = minimize_scalar(
            lambda q: _damped_rss(t, y, q, freqs3, "const"),
            bounds=(0.0, rate_hi),
            method="bounded",
            options={"xatol": 1e-9},
        )
        coef, rss = _damped_fit(t, y, float(opt.x), freqs3, "const")
        amps = [math.hypot(coef[2 + 2 * j], coef[3 + 2 * j]) for j in range(3)]
        center_dominant = amps[1] >= max(amps[0], amps[2]) * (1.0 - 1e-9)
        scored.append((cand, rss, coef, float(opt.x), center_dominant))
    data_scale = float(y @ y)
    rss_min = min(s[1] for s in scored)
    # an exact fit wins outright; the dominance preference only arbitrates
    # between candidates of comparable residual (misspecified data)
    close = [s for s in scored if s[1] <= 2.0 * rss_min + 1e-12 * data_scale]
    pool = [s for s in close if s[4]] or close
    pool_min = min(s[1] for s in pool)
    near = [s for s in pool if s[1] <= pool_min + 1e-9 * data_scale]
    omega0, _, coef, rate, _ = min(near, key=lambda s: abs(s[0] - w_top))
    rate = max(rate, _MIN_RATE)

    span = t[-1] - t[0]
    if span < 2.0 * 2.0 * math.pi / omega0:
        # a caller-supplied seed vouches for the rate; only blind seeds bail
        if "omega_rad_per_ps" not in init:
            raise TraceTooShort("window covers fewer than 2 periods of the Rabi rate")
        warnings.append("window covers fewer than 2 periods of the seeded Rabi rate")
    w_slow = abs(omega0 - 0.5 * delta0)
    if w_slow > 0 and span < 2.0 * 2.0 * math.pi / w_slow:
        warnings.append(
            "window covers fewer than 2 periods of the slow component; "
            "its frequency is constrained, not resolved"
        )

    p0 = [rate, *coef, omega0]
    p, res, jac, converged, iterations, history = _marquardt(
        y,
        lambda q: _triple_model(t, q, delta0),
        lambda q: _triple_jac(t, q, delta0),
        p0,
    )

    omega = p[9]
    pairs = [(p[3 + 2 * j], p[4 + 2 * j]) for j in range(3)]
    if omega < 0:
        # mirror solution: same model with |W| and swapped side branches
        omega = -omega
        pairs = [(bc, -bs) for bc, bs in pairs][::-1]
    if delta0 > 0 and omega < 1e-3 * delta0:
        raise DegenerateOmega(
            f"fitted Rabi rate {omega:.3e} rad/ps below delta0*1e-3"
        )

    roles = ("minus", "center", "plus")
    comps = []
    for role, w_signed, (bc, bs) in zip(roles, _triple_freqs(omega, delta0), pairs):
        b, phi = _amp_phase(bc, bs)
        if w_signed < 0:
            phi = -phi
        comps.append((abs(w_signed), b, phi, role))
    comps.sort(key=lambda item: item[0])

    return BeatFitResult(
        model_kind=FitModel.TRIPLE,
        t1_ps=1.0 / p[0],
        offset=p[1],
        baseline=p[2],
        frequencies_rad_per_ps=np.array([c[0] for c in comps]),
        amplitudes=np.array([c[1] for c in comps]),
        phases_rad=np.array([c[2] for c in comps]),
        component_roles=tuple(c[3] for c in comps),
        omega_rad_per_ps=float(omega),
        delta0_rad_per_ps=delta0,
        residual_rms=math.sqrt(float(res @ res) / len(y)),
        converged=converged,
        iterations=iterations,
        covariance=_covariance(jac, res),
        param_names=(
            "rate", "offset", "baseline",
            "bc_minus", "bs_minus", "bc_center", "bs_center", "bc_plus", "bs_plus",
            "omega",
        ),
        residual_history=history,
        window_ps=(float(t[0]), float(t[-1])),
        warnings=tuple(warnings),
    )
