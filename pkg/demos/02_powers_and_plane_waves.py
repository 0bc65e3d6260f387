"""Squaring the first-order operator, higher powers, and plane waves.

Run with ``python3 demos/02_powers_and_plane_waves.py``.
"""
from fractions import Fraction

from galinv.calculus import (
    PlaneWave, covariance_check, invariance_of_power, op_power, plane_wave_reduce,
    schrodinger_equivalent,
)
from galinv.engine import TransformContext, calibrate_boost, levy_leblond, mixed_term_report
from galinv.galilei import GalileiElement, symbolic_velocity

L = levy_leblond()

print("L^2, term by term:")
print(op_power(L, 2).pretty())
print("scale factor relative to 2im d_t + laplacian:", schrodinger_equivalent(op_power(L, 2)))

# A symbolic velocity keeps v1, v2, v3 as polynomial variables, so a pass
# here covers every boost at once.
ctx = TransformContext.boost(calibrate_boost(4)["generators"], symbolic_velocity())
print()
for N in range(1, 6):
    rep = invariance_of_power(L, N, ctx)
    mixed = mixed_term_report(op_power(L, N))
    print(f"L^{N}: boost invariant={rep.status}, mixed time-space terms={len(mixed)}")

print()
k = (Fraction(1), Fraction(-1, 2), Fraction(2))
omega = sum(x * x for x in k) / 2
_, solutions = plane_wave_reduce(L, PlaneWave(k, omega))
print(f"on shell, k={[str(x) for x in k]}, omega={omega}: {len(solutions)} independent spinors")
_, off = plane_wave_reduce(L, PlaneWave(k, omega + 1))
print(f"off shell by one unit: {len(off)} spinors")

wave = PlaneWave(k, omega, solutions[0])
moved = covariance_check(L, wave, GalileiElement(v=[Fraction(1, 3), 0, -1]))
print()
print("boosted wave still solves the equation:", moved.status)
print("  k' =", moved.witness["k_prime"], " omega' =", moved.witness["omega_prime"])
