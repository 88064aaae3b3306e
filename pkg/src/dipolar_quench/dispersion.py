"""Quasi-2D dipolar interaction kernel and the Bogoliubov spectrum.

Everything here is dimensionless.  Momenta are measured in units of the
inverse healing length ``1/xi`` of the reference frame, energies in
``m c**2`` of the same frame.  In those units the single-particle energy is
``H = k**2 / 2`` and the interaction energy is ``f2 * kernel(k)``, where
``f2 = c(tau)**2 / c_ref**2``.

The transverse confinement enters only through ``A = m c**2 / omega_z``:
the kernel argument is ``zeta = k * d_z / xi = k * sqrt(A)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import erfc

from .errors import DomainError, InstabilityError

#: Upper end of the interaction ratio, reached for pure dipolar coupling.
R_MAX = math.sqrt(math.pi / 2)

#: Above this ratio the kernel changes sign at finite momentum.
R_ZERO_CROSSING = 2.0 / 3.0 * R_MAX

_WFUN_CROSSOVER = 4.0
_WFUN_CF_TERMS = 40

ROTON_K_MIN = 1e-3
ROTON_K_MAX = 10.0
ROTON_N_GRID = 2000
CRITICAL_A_BRACKET = (1e-3, 50.0)
CRITICAL_A_MAX = 1e12


class Frame(str, enum.Enum):
    """Which sound speed sets the units: the initial ``c_0`` or the final ``c_f``."""

    INITIAL = "initial"
    FINAL = "final"


@dataclass(frozen=True)
class PhysicsParams:
    """Dimensionless description of the gas.

    Attributes
    ----------
    R : float
        Contact/dipolar interaction ratio, ``0 <= R <= sqrt(pi/2)``.
    A : float
        Effective chemical potential ``m c**2 / omega_z`` in the frame's units.
        In the final frame this is the quantity usually written A-tilde.
    T : float
        Temperature in units of ``m c**2`` of the frame.
    frame : Frame
        Reference sound speed of the units.
    """

    R: float
    A: float
    T: float = 0.0
    frame: Frame = Frame.INITIAL

    def __post_init__(self):
        problems = []
        if not (math.isfinite(self.R) and 0.0 <= self.R <= R_MAX * (1 + 1e-12)):
            problems.append(f"R must lie in [0, sqrt(pi/2)], got {self.R!r}")
        if not (math.isfinite(self.A) and self.A > 0):
            problems.append(f"A must be positive, got {self.A!r}")
        if not (math.isfinite(self.T) and self.T >= 0):
            problems.append(f"T must be nonnegative, got {self.T!r}")
        if problems:
            raise ValueError("; ".join(problems))
        object.__setattr__(self, "frame", Frame(self.frame))

    def to_final(self, ratio: float) -> "PhysicsParams":
        """Re-express initial-frame parameters in units of the final sound speed.

        ``ratio`` is ``c_i**2 / c_f**2``.  Energies scale by ``ratio``;
        ``A`` scales by ``1 / ratio``.
        """
        if self.frame is Frame.FINAL:
            return self
        return replace(self, A=final_frame_A(self.A, ratio), T=self.T * ratio,
                       frame=Frame.FINAL)

    def to_initial(self, ratio: float) -> "PhysicsParams":
        if self.frame is Frame.INITIAL:
            return self
        return replace(self, A=self.A * ratio, T=self.T / ratio, frame=Frame.INITIAL)


def final_frame_A(A: float, ratio: float) -> float:
    """Convert ``A`` (initial units) to A-tilde for the sound-speed ratio ``c_i**2/c_f**2``."""
    if ratio <= 0:
        raise ValueError(f"ratio must be positive, got {ratio!r}")
    return A / ratio


class ModeFrequency(NamedTuple):
    """Bogoliubov data at one (or an array of) momenta."""

    k: np.ndarray
    omega: np.ndarray
    u: np.ndarray
    v: np.ndarray
    kernel: np.ndarray


class RotonMinimum(NamedTuple):
    k: float
    omega: float


def _scalar_or_array(x, like):
    return float(x) if np.ndim(like) == 0 else x


def wfun(z):
    """Scaled complementary error function ``exp(z**2) * erfc(z)`` for ``z >= 0``.

    Uses ``erfc`` directly below ``z = 4`` and a backward-evaluated continued
    fraction above, so no ``exp(z**2)`` is ever formed where it could
    overflow.  Both branches agree to machine precision at the seam.
    """
    za = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(za)) or np.any(za < 0):
        raise DomainError("wfun is defined for finite z >= 0")
    out = np.empty_like(za)
    low = za <= _WFUN_CROSSOVER
    zl = za[low]
    out[low] = np.exp(zl * zl) * erfc(zl)
    zh = za[~low]
    t = zh.copy()
    for n in range(_WFUN_CF_TERMS, 0, -1):
        t = zh + (0.5 * n) / t
    out[~low] = 1.0 / (math.sqrt(math.pi) * t)
    return _scalar_or_array(out, z)


def _check_k(k):
    ka = np.asarray(k, dtype=float)
    if not np.all(np.isfinite(ka)) or np.any(ka <= 0):
        raise DomainError("momentum must be finite and strictly positive")
    return ka


def interaction_kernel(k, params: PhysicsParams):
    """Interaction Fourier transform normalized by the effective contact coupling.

    ``1 - (3R/2) zeta w(zeta/sqrt 2)`` with ``zeta = k sqrt(A)``.
    """
    ka = _check_k(k)
    zeta = ka * math.sqrt(params.A)
    out = 1.0 - 1.5 * params.R * zeta * np.asarray(wfun(zeta / math.sqrt(2.0)))
    return _scalar_or_array(out, k)


def _omega2(ka, kern, f2):
    h = 0.5 * ka * ka
    return h, h * h + 2.0 * h * f2 * kern


def _raise_if_unstable(ka, w2):
    bad = np.asarray(w2) < 0
    if np.any(bad):
        raise InstabilityError(np.atleast_1d(ka)[np.argmax(np.atleast_1d(bad))])


def spectrum(k, params: PhysicsParams, f2: float = 1.0) -> ModeFrequency:
    """Bogoliubov frequency and coefficients ``u, v`` at momentum ``k``.

    ``f2`` is the squared sound speed relative to the frame's reference.
    Arrays of ``k`` are evaluated elementwise.  Raises
    :class:`InstabilityError` if ``omega**2 < 0`` anywhere.
    """
    if not f2 > 0:
        raise DomainError(f"f2 must be positive, got {f2!r}")
    ka = _check_k(k)
    kern = np.asarray(interaction_kernel(ka, params))
    h, w2 = _omega2(ka, kern, f2)
    _raise_if_unstable(ka, w2)
    omega = np.sqrt(w2)
    a = f2 * kern
    sh = np.sqrt(h)
    sp = np.sqrt(np.maximum(h + 2.0 * a, 0.0))
    den = 2.0 * np.sqrt(omega)
    u = (sh + sp) / den
    # sqrt(h) - sqrt(h + 2a) without cancellation
    v = -2.0 * a / (sh + sp) / den
    if np.ndim(k) == 0:
        return ModeFrequency(float(ka), float(omega), float(u), float(v), float(kern))
    return ModeFrequency(ka, omega, u, v, kern)


def vacuum_correlation(k, params: PhysicsParams, f2: float = 1.0):
    """Zero-temperature density-density correlation ``(u + v)**2 = H / omega``."""
    ka = _check_k(k)
    kern = np.asarray(interaction_kernel(ka, params))
    h, w2 = _omega2(ka, kern, f2)
    _raise_if_unstable(ka, w2)
    return _scalar_or_array(h / np.sqrt(w2), k)


def find_roton(params: PhysicsParams, f2: float = 1.0, k_max: float = ROTON_K_MAX,
               n_grid: int = ROTON_N_GRID, k_min: float = ROTON_K_MIN):
    """Locate an interior local minimum of ``omega(k)``.

    The spectrum is scanned on a log grid; the first place where the
    discrete slope turns from negative to positive is refined by
    golden-section search.  Returns ``None`` for a monotone spectrum.
    """
    ks = np.geomspace(k_min, k_max, n_grid)
    omega = spectrum(ks, params, f2).omega
    slope = np.diff(omega)
    turns = np.nonzero((slope[:-1] < 0) & (slope[1:] >= 0))[0]
    if turns.size == 0:
        return None
    i = turns[0] + 1

    def w(k):
        return spectrum(k, params, f2).omega

    res = minimize_scalar(w, bracket=(ks[i - 1], ks[i], ks[i + 1]), method="golden",
                          tol=1e-9)
    return RotonMinimum(float(res.x), float(res.fun))


def stability_margin(A: float, R: float, k_max: float = ROTON_K_MAX,
                     n_grid: int = ROTON_N_GRID) -> float:
    """``min_k (k**2/4 + kernel)``, which has the sign of ``min_k omega**2``."""
    p = PhysicsParams(R=R, A=A)
    # the kernel dip sits at k sqrt(A) = O(1); keep it on the grid for large A
    k_lo = min(ROTON_K_MIN, 1e-2 / math.sqrt(A))
    n = n_grid + int(200 * math.log10(ROTON_K_MIN / k_lo))
    ks = np.geomspace(k_lo, k_max, n)

    def g(k):
        return 0.25 * k * k + interaction_kernel(k, p)

    vals = g(ks)
    i = int(np.argmin(vals))
    if i == 0 or i == len(ks) - 1:
        return float(vals[i])
    res = minimize_scalar(g, bounds=(ks[i - 1], ks[i + 1]), method="bounded",
                          options={"xatol": 1e-12})
    return float(min(res.fun, vals[i]))


def critical_A(R: float, bracket=CRITICAL_A_BRACKET, xtol: float = 1e-10):
    """Smallest ``A`` at which the spectrum turns imaginary for ratio ``R``.

    Returns ``None`` when the kernel never becomes negative (``R`` at or
    below the zero-crossing threshold), because then no density
    destabilizes the gas.  The upper end of ``bracket`` is widened
    geometrically (up to ``CRITICAL_A_MAX``) because ``A_c`` diverges as
    ``R`` approaches the threshold from above.
    """
    if not 0.0 <= R <= R_MAX * (1 + 1e-12):
        raise ValueError(f"R must lie in [0, sqrt(pi/2)], got {R!r}")
    if R <= R_ZERO_CROSSING:
        return None
    lo, hi = bracket
    if stability_margin(lo, R) <= 0:
        raise ValueError(f"unstable already at A = {lo}; lower the bracket")
    while stability_margin(hi, R) > 0:
        if hi >= CRITICAL_A_MAX:
            raise ValueError(f"still stable at A = {hi:g} for R = {R}")
        lo, hi = hi, min(4.0 * hi, CRITICAL_A_MAX)
    return brentq(stability_margin, lo, hi, args=(R,), xtol=xtol)


def exceptional_A(k: float, R: float, bracket=(1e-6, 1e6)) -> float:
    """Value of ``A`` for which the kernel vanishes at momentum ``k``.

    At that point the interaction energy is zero for every ``f2``, so a
    quench leaves the mode untouched.
    """
    if R <= R_ZERO_CROSSING:
        raise ValueError("the kernel has no zero for R <= (2/3) sqrt(pi/2)")
    return brentq(lambda A: interaction_kernel(k, PhysicsParams(R=R, A=A)), *bracket,
                  xtol=1e-14)


def exceptional_momentum(params: PhysicsParams, k_max: float = 50.0):
    """Momentum where the kernel crosses zero, or ``None`` if it never does."""
    if params.R <= R_ZERO_CROSSING:
        return None
    ks = np.geomspace(1e-4, k_max, 4000)
    kern = interaction_kernel(ks, params)
    idx = np.nonzero(kern <= 0)[0]
    if idx.size == 0:
        return None
    i = idx[0]
    if i == 0:
        return float(ks[0])
    return brentq(lambda k: interaction_kernel(k, params), ks[i - 1], ks[i], xtol=1e-14)
