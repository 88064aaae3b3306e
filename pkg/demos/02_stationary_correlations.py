"""Density-density correlations of a gas at rest, at zero and finite temperature.

At long wavelength the correlation tends to the temperature, at short
wavelength to one.  The small-k expansion is compared with the exact
expression to show its third-order residual.

Run:  python3 demos/02_stationary_correlations.py
"""

import numpy as np

from dipolar_quench import (R_MAX, PhysicsParams, g2_low_T_expansion, g2_stationary_thermal)


def main():
    ks = np.array([0.01, 0.1, 0.5, 1.0, 2.0, 5.0])
    print("G2(k) for R = sqrt(pi/2), A = 3.4")
    print("  T      " + "".join(f"k={k:<8}" for k in ks))
    for T in (0.0, 1 / np.sqrt(3), 1.0):
        g = g2_stationary_thermal(ks, PhysicsParams(R=R_MAX, A=3.4, T=T))
        print(f"  {T:5.3f}  " + "".join(f"{x:<10.5f}" for x in g))

    p = PhysicsParams(R=R_MAX, A=3.4, T=1.0)
    print("\nsmall-k expansion, T = 1:")
    print("      k        exact        expansion    residual/k^3")
    for k in (0.08, 0.04, 0.02, 0.01):
        exact = g2_stationary_thermal(k, p)
        approx = g2_low_T_expansion(k, p)
        print(f"  {k:6.3f}   {exact:.9f}  {approx:.9f}  {(exact - approx) / k ** 3:9.4f}")


if __name__ == "__main__":
    main()
