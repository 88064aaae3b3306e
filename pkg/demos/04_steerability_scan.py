"""Which momenta end up entangled after the quench?

Scans k at measurement time tau_m = 5 and sorts each momentum by the lower
envelope of its normalized correlation: below 1 the pair is nonseparable,
below 1/2 it is also steerable.  A dipolar gas near criticality is compared
with a contact gas, with and without initial thermal noise.

Run:  python3 demos/04_steerability_scan.py
"""

import numpy as np

from dipolar_quench import (R_MAX, Frame, PhysicsParams, QuenchProtocol, classify,
                            find_roton, momentum_scan, spectrum)

RATIO = 0.5
TAU_M = 5.0


def scan(R, At, T0, ks):
    # T0 in initial units m c0^2; the quench works in final units
    p = PhysicsParams(R=R, A=At, T=T0 * RATIO, frame=Frame.FINAL)
    rate = spectrum(3.0, p, RATIO).omega  # a / omega_i = 1 at k xi_f = 3
    series, _ = momentum_scan(ks, p, QuenchProtocol(RATIO, rate), TAU_M)
    return classify(ks, series.lower), series


def describe(name, report, series):
    s, n = report.steerable, report.nonseparable
    band = f"[{s.min():.3f}, {s.max():.3f}]" if s.size else "none"
    print(f"  {name:<22} min lower {series.lower.min():.4f}  steerable k {band:<18}"
          f"  nonseparable points {n.size}")


def main():
    ks = np.linspace(0.02, 3.0, 400)
    rot = find_roton(PhysicsParams(R=R_MAX, A=3.4454, frame=Frame.FINAL))
    print(f"roton at k xi_f = {rot.k:.3f}, omega = {rot.omega:.5f}\n")
    for T0 in (0.0, 1.0):
        print(f"T = {T0} m c0^2")
        describe("dipolar, Atilde=3.4454", *scan(R_MAX, 3.4454, T0, ks))
        describe("contact, Atilde=0.3445", *scan(0.0, 0.34454, T0, ks))


if __name__ == "__main__":
    main()
