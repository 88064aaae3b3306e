"""Tanh quench of the sound speed and the resulting mode mixing.

All quantities are in final-frame units: momenta in ``1/xi_f``, energies in
``m c_f**2`` and scaling time in ``1/(m c_f**2)``.  The squared sound speed
relative to its final value is

    c2(tau) = (1 + ratio)/2 + (1 - ratio)/2 * tanh(rate * tau),

with ``ratio = c_i**2 / c_f**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .dispersion import Frame, PhysicsParams, interaction_kernel, spectrum
from .errors import DomainError, InstabilityError, ToleranceError
from .rk import integrate_lanes

#: ``rate * tau`` at either end of the default integration window.
WINDOW_SPAN = 12.0
_SATURATION = 1e-8
DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class QuenchProtocol:
    """Tanh schedule of ``c**2`` and the scaling-time window it is integrated on.

    ``tau0`` and ``tau_end`` default to ``-+WINDOW_SPAN / rate``.  A window
    too short for ``tanh`` to saturate (to 1e-8) at either end is widened
    to the default.
    """

    ratio: float
    rate: float
    tau0: Optional[float] = None
    tau_end: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.ratio) and self.ratio > 0):
            raise ValueError(f"ratio must be positive, got {self.ratio!r}")
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"rate must be positive, got {self.rate!r}")
        span = WINDOW_SPAN / self.rate
        tau0 = -span if self.tau0 is None else float(self.tau0)
        tau_end = span if self.tau_end is None else float(self.tau_end)
        if abs(math.tanh(self.rate * tau0) + 1) >= _SATURATION:
            tau0 = min(tau0, -span)
        if abs(math.tanh(self.rate * tau_end) - 1) >= _SATURATION:
            tau_end = max(tau_end, span)
        object.__setattr__(self, "tau0", tau0)
        object.__setattr__(self, "tau_end", tau_end)

    @property
    def f2_range(self):
        return min(self.ratio, 1.0), max(self.ratio, 1.0)

    def covering(self, tau):
        """Copy whose window contains ``tau`` (extended on whichever side needed)."""
        if tau > self.tau_end:
            return replace(self, tau_end=float(tau))
        if tau < self.tau0:
            return replace(self, tau0=float(tau))
        return self


def c2_of_tau(tau, protocol: QuenchProtocol):
    """Squared sound speed at scaling time ``tau``, in units of ``c_f**2``."""
    r = protocol.ratio
    return 0.5 * (1 + r) + 0.5 * (1 - r) * np.tanh(protocol.rate * np.asarray(tau))


def dc2_dtau(tau, protocol: QuenchProtocol):
    x = protocol.rate * np.asarray(tau)
    return 0.5 * (1 - protocol.ratio) * protocol.rate / np.cosh(x) ** 2


def scale_factor(tau, protocol: QuenchProtocol):
    """Scale factor ``b = c_i**2 / c**2(tau)``, equal to 1 before the quench."""
    return protocol.ratio / c2_of_tau(tau, protocol)


def lab_time(tau: float, protocol: QuenchProtocol) -> float:
    """Lab time ``t = int_0^tau b**2 dtau'``."""
    if not math.isfinite(tau):
        raise DomainError("tau must be finite")
    if tau == 0:
        return 0.0
    val, _ = quad(lambda s: scale_factor(s, protocol) ** 2, 0.0, tau, epsabs=0.0,
                  epsrel=1e-12, limit=200)
    return float(val)


@dataclass
class ModeTrace:
    """Mode-mixing coefficients at the requested sample times."""

    tau: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    theta: np.ndarray

    @property
    def alpha_abs2(self):
        return np.abs(self.alpha) ** 2

    @property
    def beta_abs2(self):
        return np.abs(self.beta) ** 2


@dataclass
class ModeState:
    """Bogoliubov mixing record for one momentum at the end of the window.

    ``theta`` is the accumulated phase, integrated alongside ``alpha`` and
    ``beta``.  ``drift`` is the largest deviation of
    ``|alpha|**2 - |beta|**2`` from one over the stored samples.
    """

    k: float
    alpha: complex
    beta: complex
    theta: float
    omega_i: float
    omega_f: float
    tau_end: float
    trace: Optional[ModeTrace] = None
    drift: float = 0.0
    theta0: float = 0.0

    @property
    def alpha_abs2(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def beta_abs2(self) -> float:
        return abs(self.beta) ** 2

    def at(self, tau: float):
        """``(alpha, beta, theta)`` at a stored sample time or at the window end."""
        if tau == self.tau_end:
            return self.alpha, self.beta, self.theta
        if self.trace is not None:
            hit = np.nonzero(np.isclose(self.trace.tau, tau, rtol=0, atol=1e-12))[0]
            if hit.size:
                i = hit[0]
                return (complex(self.trace.alpha[i]), complex(self.trace.beta[i]),
                        float(self.trace.theta[i]))
        raise KeyError(f"tau = {tau} was not sampled; pass it in sample_times")


def _check_stable(ks, params, protocol):
    lo, hi = protocol.f2_range
    # omega^2 is linear in f2, so both ends of the range suffice
    spectrum(ks, params, lo)
    spectrum(ks, params, hi)


def _mode_rhs(protocol, h, kern, sign, derivative):
    def omega_of(t, lanes):
        f2 = c2_of_tau(t, protocol)
        w2 = h[lanes] ** 2 + 2.0 * h[lanes] * f2 * kern[lanes]
        if np.any(w2 < 0):
            raise InstabilityError(np.sqrt(2.0 * h[lanes][np.argmax(w2 < 0)]))
        return np.sqrt(w2)

    def rhs(t, y, lanes):
        omega = omega_of(t, lanes)
        if derivative == "analytic":
            domega = h[lanes] * dc2_dtau(t, protocol) * kern[lanes] / omega
        else:
            d = 1e-6 / protocol.rate
            domega = (omega_of(t + d, lanes) - omega_of(t - d, lanes)) / (2 * d)
        g = sign * domega / (2.0 * omega)
        phase = np.exp(2j * y[2].real)
        out = np.empty_like(y)
        out[0] = g * phase * y[1]
        out[1] = g * np.conj(phase) * y[0]
        out[2] = omega
        return out

    return rhs


def integrate_modes(ks, params: PhysicsParams, protocol: QuenchProtocol,
                    tol: float = DEFAULT_TOL, sample_times: Sequence[float] = (),
                    theta0: float = 0.0, coupling_sign: int = 1,
                    derivative: str = "analytic") -> list:
    """Integrate the mode-mixing equations for every momentum in ``ks``.

    Starting from ``alpha = 1, beta = 0, theta = theta0`` at
    ``protocol.tau0`` the coefficients obey

        alpha' = s * (omega'/2 omega) exp(+2i theta) beta
        beta'  = s * (omega'/2 omega) exp(-2i theta) alpha
        theta' = omega

    with ``s = coupling_sign`` (+1 by default).  ``params`` must be in the
    final frame.  Each momentum is an independent lane with its own
    adaptive step, so results do not depend on the rest of ``ks``.

    ``derivative="finite-difference"`` replaces the analytic ``omega'`` by a
    central difference; it exists only for cross-checking.
    """
    if params.frame is not Frame.FINAL:
        raise ValueError("quench integration expects final-frame parameters")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if coupling_sign not in (1, -1):
        raise ValueError("coupling_sign must be +1 or -1")
    if derivative not in ("analytic", "finite-difference"):
        raise ValueError(f"unknown derivative mode {derivative!r}")
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    _check_stable(ks, params, protocol)
    h = 0.5 * ks * ks
    kern = np.atleast_1d(interaction_kernel(ks, params))
    omega_i = spectrum(ks, params, protocol.ratio).omega
    omega_f = spectrum(ks, params, 1.0).omega

    n = ks.size
    y0 = np.zeros((3, n), dtype=complex)
    y0[0] = 1.0
    y0[2] = theta0
    h0 = 0.05 / max(np.max(np.maximum(omega_i, omega_f)), protocol.rate)
    sol = integrate_lanes(_mode_rhs(protocol, h, kern, coupling_sign, derivative),
                          protocol.tau0, protocol.tau_end, y0, rtol=tol, atol=tol,
                          h0=h0, sample_times=sample_times)

    states = []
    for j in range(n):
        alpha, beta, theta = sol.y[0, j], sol.y[1, j], sol.y[2, j].real
        trace = None
        drift = abs(abs(alpha) ** 2 - abs(beta) ** 2 - 1.0)
        if sol.sample_times.size:
            s = sol.samples[:, :, j]
            trace = ModeTrace(sol.sample_times.copy(), s[:, 0].copy(), s[:, 1].copy(),
                              s[:, 2].real.copy())
            drift = max(drift, float(np.max(np.abs(trace.alpha_abs2 - trace.beta_abs2
                                                   - 1.0))))
        if drift > 100 * tol:
            raise ToleranceError(
                f"normalization drift {drift:.3e} exceeds {100 * tol:.1e} at k = {ks[j]:.6g}")
        states.append(ModeState(float(ks[j]), complex(alpha), complex(beta), float(theta),
                                float(omega_i[j]), float(omega_f[j]), protocol.tau_end,
                                trace, float(drift), float(theta0)))
    return states


def integrate_mode(k: float, params: PhysicsParams, protocol: QuenchProtocol,
                   tol: float = DEFAULT_TOL, **kwargs) -> ModeState:
    """Single-momentum version of :func:`integrate_modes`."""
    return integrate_modes([k], params, protocol, tol, **kwargs)[0]


def final_occupation(mode: ModeState, n_in: float = 0.0):
    """Occupation ``n_k`` and pair amplitude ``c_k`` after the quench.

    ``n_in`` is the thermal occupation of the in-state.
    """
    w = 2.0 * n_in + 1.0
    n_k = 0.5 * ((mode.alpha_abs2 + mode.beta_abs2) * w - 1.0)
    c_k = mode.alpha * np.conj(mode.beta) * w
    return n_k, complex(c_k)


def _log_sinh(x):
    x = np.asarray(x, dtype=float)
    return x + np.log(-np.expm1(-2.0 * x)) - math.log(2.0)


def tanh_model_beta2(omega_i, omega_f, rate):
    """Pair occupation ``|beta|**2`` for a frequency squared linear in ``tanh(rate tau)``.

        sinh**2(pi (omega_f - omega_i) / 2a) / (sinh(pi omega_i / a) sinh(pi omega_f / a))

    Evaluated in log space so large ``omega/a`` neither overflows nor
    loses the tiny adiabatic result.
    """
    wi = np.asarray(omega_i, dtype=float)
    wf = np.asarray(omega_f, dtype=float)
    x = math.pi * np.abs(wf - wi) / (2.0 * rate)
    with np.errstate(divide="ignore"):
        logb = 2.0 * _log_sinh(x) - _log_sinh(math.pi * wi / rate) \
            - _log_sinh(math.pi * wf / rate)
    out = np.where(x > 0, np.exp(logb), 0.0)
    return float(out) if out.ndim == 0 else out


def sudden_beta2(omega_i, omega_f):
    """Instantaneous-quench limit ``(omega_f - omega_i)**2 / (4 omega_i omega_f)``."""
    return (omega_f - omega_i) ** 2 / (4.0 * omega_i * omega_f)
