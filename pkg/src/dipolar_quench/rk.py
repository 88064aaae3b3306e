"""Lane-parallel Dormand-Prince 5(4) integrator.

Many independent ODE systems of the same shape ("lanes") are advanced
together with numpy.  Every lane keeps its own time, step size and error
control, so the result for one lane does not depend on which other lanes
share the batch.  Steps are shortened to land exactly on requested sample
times; no dense-output interpolation is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ToleranceError

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array(_A[6] + [0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525,
               -1 / 40])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@dataclass
class LaneSolution:
    """Result of :func:`integrate_lanes`.

    ``y`` has shape ``(m, n_lanes)``; ``samples`` has shape
    ``(n_samples, m, n_lanes)`` and matches ``sample_times``.
    """

    t_end: float
    y: np.ndarray
    sample_times: np.ndarray
    samples: np.ndarray
    n_steps: np.ndarray
    n_rejected: np.ndarray


def integrate_lanes(fun, t0, t_end, y0, *, rtol=1e-10, atol=1e-10, h0=None,
                    sample_times=(), max_steps=10_000_000):
    """Integrate ``dy/dt = fun(t, y, lanes)`` for every lane from ``t0`` to ``t_end``.

    ``fun`` receives the per-lane times ``t`` (shape ``(n,)``), the states
    ``y`` (shape ``(m, n)``) and the integer indices ``lanes`` of the lanes
    being evaluated, and must return an array shaped like ``y``.
    """
    y = np.array(y0, dtype=complex if np.iscomplexobj(y0) else float, copy=True)
    if y.ndim != 2:
        raise ValueError("y0 must have shape (m, n_lanes)")
    m, n = y.shape
    if not t_end > t0:
        raise ValueError("t_end must exceed t0")
    st = np.asarray(sorted(sample_times), dtype=float)
    if st.size and (st[0] < t0 or st[-1] > t_end):
        raise ValueError("sample times must lie inside [t0, t_end]")
    targets = np.unique(np.concatenate([st[st > t0], [t_end]]))
    sample_slot = {float(s): i for i, s in enumerate(st)}
    samples = np.zeros((st.size, m, n), dtype=y.dtype)
    for s, i in sample_slot.items():
        if s == t0:
            samples[i] = y

    t = np.full(n, float(t0))
    target_idx = np.zeros(n, dtype=int)
    all_lanes = np.arange(n)
    k1 = np.asarray(fun(t, y, all_lanes))
    if h0 is None:
        scale = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean((np.abs(y) / scale) ** 2, axis=0))
        d1 = np.sqrt(np.mean((np.abs(k1) / scale) ** 2, axis=0))
        h = np.where((d0 < 1e-5) | (d1 < 1e-5), 1e-6, 0.01 * d0 / d1)
    else:
        h = np.full(n, float(h0))
    h = np.minimum(h, t_end - t0)
    n_steps = np.zeros(n, dtype=int)
    n_rej = np.zeros(n, dtype=int)
    done = np.zeros(n, dtype=bool)
    stages = np.empty((7, m, n), dtype=y.dtype)

    for _ in range(max_steps):
        act = np.nonzero(~done)[0]
        if act.size == 0:
            break
        ta = t[act]
        ya = y[:, act]
        goal = targets[target_idx[act]]
        hs = np.minimum(h[act], goal - ta)
        lands = hs >= goal - ta
        floor = 16 * np.finfo(float).eps * np.maximum(1.0, np.abs(ta))
        if np.any(hs < floor):
            bad = act[np.argmax(hs < floor)]
            raise ToleranceError(f"step size underflow at t = {t[bad]:.6g} (lane {bad})")

        kk = stages[:, :, : act.size]
        kk[0] = k1[:, act]
        for s in range(1, 7):
            ys = ya.copy()
            for j, aij in enumerate(_A[s]):
                if aij != 0.0:
                    ys += hs * aij * kk[j]
            kk[s] = fun(ta + _C[s] * hs, ys, act)
        y_new = ya + hs * np.tensordot(_B, kk, axes=1)
        err = hs * np.tensordot(_E, kk, axes=1)
        scale = atol + rtol * np.maximum(np.abs(ya), np.abs(y_new))
        en = np.sqrt(np.mean((np.abs(err) / scale) ** 2, axis=0))

        ok = en <= 1.0
        with np.errstate(divide="ignore"):
            fac = _SAFETY * np.where(en > 0, en, 1e-300) ** -0.2
        fac = np.clip(fac, _MIN_FACTOR, np.where(ok, _MAX_FACTOR, 1.0))
        # clipped landing steps must not shrink the proposal for the next step
        base = np.where(ok & lands, np.maximum(h[act], hs), hs)
        h[act] = np.minimum(base * fac, t_end - t0)

        acc = act[ok]
        n_rej[act[~ok]] += 1
        if acc.size:
            n_steps[acc] += 1
            y[:, acc] = y_new[:, ok]
            k1[:, acc] = kk[6][:, ok]
            landed = ok & lands
            t[acc] = np.where(landed[ok], goal[ok], ta[ok] + hs[ok])
            for lane, g in zip(act[landed], goal[landed]):
                slot = sample_slot.get(float(g))
                if slot is not None:
                    samples[slot, :, lane] = y[:, lane]
                target_idx[lane] += 1
                if target_idx[lane] >= targets.size:
                    done[lane] = True
    else:
        raise ToleranceError("maximum number of steps exceeded")

    return LaneSolution(float(t_end), y, st, samples, n_steps, n_rej)
