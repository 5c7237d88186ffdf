"""Energy shift from the adiabatically damped S-matrix.

Each order of the damped expansion is a closed-form time-ordered integral.
Sweeping gamma and fitting a quadratic in gamma extrapolates to the
switching-off limit, which reproduces Rayleigh-Schroedinger theory.
"""
import numpy as np

from radrec.greens import sucher_energy, sucher_shift
from radrec.spectral import ModelSpace, build_spectrum

s = build_spectrum([0.0, 2.0])
v = 0.2 * np.array([[0.0, 1.0], [1.0, 0.0]])

for g in (0.08, 0.02, 0.005):
    print(f"gamma={g:6.3f}  damped shift {sucher_shift(s, v, 0, g, 2):.8f}")

gammas = [0.08, 0.04, 0.02, 0.01, 0.005]
e = sucher_energy(s, ModelSpace([0]), v, gammas)
print(f"extrapolated {e:.9f}, second-order RS {v[0, 1] ** 2 / (0.0 - 2.0):.9f}")

# third order on a three-level system
s3 = build_spectrum([0.0, 1.0, 2.5])
v3 = np.array([[0.05, 0.1, 0.08], [0.1, -0.03, 0.12], [0.08, 0.12, 0.02]])
print(f"through third order {sucher_energy(s3, ModelSpace([0]), v3, gammas, max_order=3):.8f}")
