"""Bogoliubov spectrum of a quasi-2D dipolar gas.

Walks from contact interactions to dipole-dominated ones and shows how the
spectrum first develops a roton dip and then goes unstable.  Also locates
the density at which the interaction energy vanishes at k xi = 1.

Run:  python3 demos/01_spectrum_and_roton.py
"""

import numpy as np

from dipolar_quench import (R_MAX, PhysicsParams, critical_A, exceptional_A, find_roton,
                            spectrum)
from dipolar_quench.errors import InstabilityError


def main():
    ks = np.array([0.1, 0.5, 0.9, 1.5, 3.0])
    print("omega(k) in units of m c0^2")
    print(" " * 15 + "".join(f"  k={k:<5}" for k in ks))
    for R, A in [(0.0, 1.0), (R_MAX, 1.0), (R_MAX, 2.5), (R_MAX, 3.3), (R_MAX, 3.6)]:
        label = f"{'R=0' if R == 0 else 'R=max'} A={A:<4}".ljust(15)
        try:
            w = spectrum(ks, PhysicsParams(R=R, A=A)).omega
            print(label + "".join(f"  {x:7.4f}" for x in w))
        except InstabilityError as exc:
            print(label + f"  unstable ({exc})")

    ac = critical_A(R_MAX)
    print(f"\ncritical A for pure dipolar coupling: {ac:.6f}")

    # the roton deepens as A approaches A_c
    print("\n     A    k_roton   omega_roton")
    for A in (2.4, 2.8, 3.2, 3.4, 3.44):
        rot = find_roton(PhysicsParams(R=R_MAX, A=A))
        print(f"  {A:5.2f}   {rot.k:7.4f}   {rot.omega:10.6f}")

    print(f"\nkernel vanishes at k xi_f = 1 for Atilde = {exceptional_A(1.0, R_MAX):.6f}")


if __name__ == "__main__":
    main()
