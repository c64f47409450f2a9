"""Plug the separated eigenfunctions back into their equations."""
import numpy as np

from ncoulomb.observables import ModelParams
from ncoulomb.wavefunctions import build_angular, build_parabolic, build_radial, norm_audit

q = ModelParams(5, 1, 0.1, 0.2, 1)

# Radial factor: relative residual of the ODE at a few radii.
R = build_radial(q, 3, 1, 0)
r = np.array([0.5, 1.0, 2.0, 5.0])
print("radial residuals", R.residual(r))
print("nodes", R.nodes(), "(expected n - l - 1 = 1)")

# The displayed normalization constant is only right in three dimensions.
print(norm_audit(R))

# Angular factor.  With the displayed Jacobi parameters the equation is not
# satisfied once N > 3; shifting both by (N-3)/2 fixes it.
phi = np.linspace(0.3, 2.8, 5)
for form in ("printed", "corrected"):
    print(form, build_angular(q, 3, 1, form=form).residual(phi).max())

# Parabolic factors: the two separation constants add up to c0/hbar^2.
S = build_parabolic(q, 2, 1, 1)
t = np.geomspace(0.1, 40, 6)
print("f1", S.f1.residual(t).max(), "f2", S.f2.residual(t).max())
print("v1 + v2 =", S.separation_sum, " c0' =", S.c0p)
