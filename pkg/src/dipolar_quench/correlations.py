"""Density-density correlations and the entanglement criteria built on them.

The normalized correlation is the correlation divided by its vacuum value
``(u + v)**2``.  Where its lower envelope dips below 1 the pair state of
``k`` and ``-k`` is nonseparable; below 1/2 it is steerable.  Both are
sufficient conditions only.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .dispersion import Frame, PhysicsParams, spectrum, vacuum_correlation
from .errors import DomainError
from .quench import (DEFAULT_TOL, ModeState, QuenchProtocol, c2_of_tau,
                     integrate_modes)

NONSEPARABLE_THRESHOLD = 1.0
STEERABLE_THRESHOLD = 0.5


def thermal_occupation(omega, T):
    """Bose-Einstein occupation ``1/(exp(omega/T) - 1)``; zero at ``T = 0``."""
    w = np.asarray(omega, dtype=float)
    if np.any(~(w > 0)):
        raise DomainError("thermal occupation needs omega > 0")
    if T < 0:
        raise DomainError("temperature must be nonnegative")
    if T == 0:
        out = np.zeros_like(w)
    else:
        x = w / T
        with np.errstate(under="ignore"):
            out = np.exp(-x) / -np.expm1(-x)
    return float(out) if np.ndim(omega) == 0 else out


def g2_stationary_thermal(k, params: PhysicsParams):
    """Correlation of a stationary gas in thermal equilibrium at ``params.T``.

    ``(u + v)**2 * coth(omega / 2T)``; the vacuum value at ``T = 0``.
    """
    mf = spectrum(k, params)
    vac = np.asarray(mf.k) ** 2 / 2 / np.asarray(mf.omega)
    if params.T == 0:
        out = vac
    else:
        out = vac / np.tanh(np.asarray(mf.omega) / (2.0 * params.T))
    return float(out) if np.ndim(k) == 0 else out


def g2_low_T_expansion(k, params: PhysicsParams):
    """Small-``k`` expansion of the thermal correlation, valid for ``omega << T``.

    Correct through second order in ``k``.  The ``R**2`` term of the
    quadratic coefficient enters with a minus sign, as a direct Taylor
    expansion of the full expression shows.
    """
    T, A, R = params.T, params.A, params.R
    if T <= 0:
        raise DomainError("the low-temperature expansion needs T > 0")
    k = np.asarray(k, dtype=float)
    lin = T * (1.0 + 1.5 * math.sqrt(A) * R * k)
    quad = T * (0.25 + 3.0 * A * R / math.sqrt(2 * math.pi) - 9.0 * A * R ** 2 / 4.0) \
        - 1.0 / (12.0 * T)
    out = lin - quad * k ** 2
    return float(out) if out.ndim == 0 else out


def _check_tau(tau_m, mode: ModeState, protocol: QuenchProtocol):
    if not (protocol.tau0 <= tau_m <= mode.tau_end):
        raise ValueError(f"tau_m = {tau_m} outside the integration window "
                         f"[{protocol.tau0}, {mode.tau_end}]")


def g2_post_quench(mode: ModeState, tau_m: float, n_in: float, params: PhysicsParams,
                   protocol: QuenchProtocol):
    """Correlation at measurement time ``tau_m`` after (or during) the quench.

    Returns ``(g2, g2_normalized)``.  The oscillating term uses the phase
    integrated together with ``alpha`` and ``beta``, so ``tau_m`` may sit in
    the tail of the quench.
    """
    _check_tau(tau_m, mode, protocol)
    alpha, beta, theta = mode.at(tau_m)
    bracket = abs(alpha) ** 2 + abs(beta) ** 2 \
        + 2.0 * (alpha * np.conj(beta) * np.exp(-2j * theta)).real
    g2n = bracket * (2.0 * n_in + 1.0)
    vac = vacuum_correlation(mode.k, params, float(c2_of_tau(tau_m, protocol)))
    return vac * g2n, g2n


def g2_from_occupation(vac: float, n_k: float, c_k: complex, theta: float) -> float:
    """Correlation written through occupation and pair amplitude:
    ``vac * (2 n_k + 1 + 2 Re[c_k exp(-2i theta)])``."""
    return vac * (2.0 * n_k + 1.0 + 2.0 * (c_k * np.exp(-2j * theta)).real)


def envelopes(mode: ModeState, n_in: float = 0.0):
    """Extremes of the normalized correlation over the oscillation phase.

    ``((|alpha| - |beta|)**2, (|alpha| + |beta|)**2)``, both times
    ``2 n_in + 1``.
    """
    a, b = abs(mode.alpha), abs(mode.beta)
    w = 2.0 * n_in + 1.0
    return (a - b) ** 2 * w, (a + b) ** 2 * w


class Verdict(str, enum.Enum):
    NOT_DETECTED = "NotDetected"
    NONSEPARABLE = "Nonseparable"
    STEERABLE = "Steerable"


@dataclass(frozen=True)
class ReportEntry:
    k: float
    verdict: Verdict
    lower: float
    margin: float


@dataclass
class EntanglementReport:
    entries: List[ReportEntry]

    def ks(self, verdict: Verdict) -> np.ndarray:
        return np.array([e.k for e in self.entries if e.verdict is verdict])

    @property
    def steerable(self) -> np.ndarray:
        return self.ks(Verdict.STEERABLE)

    @property
    def nonseparable(self) -> np.ndarray:
        """Momenta passing the nonseparability test (steerable ones included)."""
        return np.array([e.k for e in self.entries if e.verdict is not Verdict.NOT_DETECTED])


def classify_value(lower: float):
    if lower < STEERABLE_THRESHOLD:
        return Verdict.STEERABLE, STEERABLE_THRESHOLD - lower
    if lower < NONSEPARABLE_THRESHOLD:
        return Verdict.NONSEPARABLE, NONSEPARABLE_THRESHOLD - lower
    return Verdict.NOT_DETECTED, NONSEPARABLE_THRESHOLD - lower


def classify(ks: Sequence[float], lower: Sequence[float]) -> EntanglementReport:
    """Sort momenta by the smallest normalized correlation each one reaches."""
    entries = []
    for k, lo in zip(ks, lower):
        verdict, margin = classify_value(float(lo))
        entries.append(ReportEntry(float(k), verdict, float(lo), float(margin)))
    return EntanglementReport(entries)


class Axis(str, enum.Enum):
    TIME = "time"
    MOMENTUM = "momentum"


@dataclass
class CorrelationSeries:
    axis: Axis
    x: np.ndarray
    g2: np.ndarray
    g2_normalized: np.ndarray
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    frame: Frame = Frame.FINAL


def momentum_scan(ks, params: PhysicsParams, protocol: QuenchProtocol, tau_m: float,
                  tol: float = DEFAULT_TOL):
    """Quench every momentum in ``ks`` and evaluate correlations at ``tau_m``.

    The in-state is thermal at ``params.T`` (final-frame units) with the
    occupation set by the initial frequency.  Returns the
    :class:`CorrelationSeries` together with the integrated modes.
    """
    protocol = protocol.covering(tau_m)
    modes = integrate_modes(ks, params, protocol, tol, sample_times=[tau_m])
    n_in = thermal_occupation(np.array([m.omega_i for m in modes]), params.T)
    g2 = np.empty(len(modes))
    g2n = np.empty(len(modes))
    lower = np.empty(len(modes))
    upper = np.empty(len(modes))
    for i, m in enumerate(modes):
        g2[i], g2n[i] = g2_post_quench(m, tau_m, n_in[i], params, protocol)
        lower[i], upper[i] = envelopes(m, n_in[i])
    series = CorrelationSeries(Axis.MOMENTUM, np.asarray(ks, dtype=float), g2, g2n,
                               lower, upper, params.frame)
    return series, modes


def time_series(k: float, params: PhysicsParams, protocol: QuenchProtocol, taus,
                tol: float = DEFAULT_TOL):
    """Correlation of a single momentum sampled at the scaling times ``taus``."""
    taus = np.asarray(taus, dtype=float)
    protocol = protocol.covering(float(taus.max())).covering(float(taus.min()))
    mode = integrate_modes([k], params, protocol, tol, sample_times=taus)[0]
    n_in = thermal_occupation(mode.omega_i, params.T)
    out = np.array([g2_post_quench(mode, t, n_in, params, protocol) for t in taus])
    series = CorrelationSeries(Axis.TIME, taus, out[:, 0], out[:, 1], frame=params.frame)
    return series, mode
