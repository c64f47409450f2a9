"""Bound-state energies of the deformed Coulomb system, computed three ways.

Run with: python3 demos/01_spectrum_three_ways.py
"""
from ncoulomb.observables import ModelParams
from ncoulomb.oracle import compare_spectrum
from ncoulomb.spectrum import energy_parabolic, energy_spherical, solve_constraint_set

# Start from plain hydrogen: N = 3, no extra couplings, c0 = hbar = 1.
hydrogen = ModelParams(3, 1, 0, 0, 1)
for n in (1, 2, 3):
    print(f"hydrogen n={n}: E = {energy_spherical(hydrogen, n, 0)}")

# The parabolic route needs n = n1 + n2 + I + 1.  Every split of p = n1 + n2
# gives the same energy, hence the p+1 fold degeneracy.
q = ModelParams(4, 1, 0.1, 0.2, 1)
p, I = 2, 1
print([energy_parabolic(q, n1, p - n1, I) for n1 in range(p + 1)])
print("spherical:", energy_spherical(q, p + I + 1, I))

# The displayed parabolic formula is twice as deep as this.
print("as printed:", energy_parabolic(q, 0, p, I, mode="as-printed"))

# Algebraic route: the structure function must vanish at 0 and p+1 and stay
# positive in between.
sol = solve_constraint_set(q, I, p)
print(f"set 1: E = {sol.E}, u = {sol.u:.6f}, unitary = {sol.unitary}")

# A finite-volume eigensolver arbitrates.
for line in compare_spectrum(q, I, 3):
    print(f"n={line.n}  formula={line.E_formula:.10f}  numeric={line.E_numeric:.10f}  badge={line.badge:.1e}")
