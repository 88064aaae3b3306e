"""Quench of the sound speed acting on a single momentum mode.

The squared sound speed rises smoothly from c_i**2 to c_f**2.  Integrating
the mode equations gives the pair-creation amplitude beta, which is
checked against the exact result for a tanh-shaped frequency.  The normalized
correlation then oscillates between its two envelopes.

Run:  python3 demos/03_single_mode_quench.py
"""

import numpy as np

from dipolar_quench import (R_MAX, Frame, PhysicsParams, QuenchProtocol, envelopes,
                            integrate_mode, lab_time, scale_factor, sudden_beta2,
                            tanh_model_beta2, time_series)


def main():
    params = PhysicsParams(R=R_MAX, A=3.4454, frame=Frame.FINAL)
    k = 1.0

    print("|beta|^2 at k xi_f = 1, ratio 1/2, against the closed form")
    print("    rate     integrated      closed form     sudden limit")
    for rate in (0.1, 0.3, 1.0, 3.0, 10.0):
        m = integrate_mode(k, params, QuenchProtocol(0.5, rate))
        exact = tanh_model_beta2(m.omega_i, m.omega_f, rate)
        print(f"  {rate:6.2f}   {m.beta_abs2:.8e}   {exact:.8e}   "
              f"{sudden_beta2(m.omega_i, m.omega_f):.6e}")

    proto = QuenchProtocol(0.5, 1.0)
    taus = np.linspace(-4, 8, 13)
    series, mode = time_series(k, params, proto, taus)
    lo, up = envelopes(mode)
    print(f"\nnormalized G2 over time (envelopes {lo:.4f} .. {up:.4f})")
    print("    tau      b(tau)    t_lab      G2/G2vac")
    for tau, g in zip(taus, series.g2_normalized):
        print(f"  {tau:6.2f}   {scale_factor(tau, proto):.4f}   {lab_time(tau, proto):8.4f}"
              f"   {g:.5f}")


if __name__ == "__main__":
    main()
