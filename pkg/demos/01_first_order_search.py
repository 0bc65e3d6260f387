"""Why a Galilean-invariant first-order spin equation needs four components.

Run with ``python3 demos/01_first_order_search.py``.

The search writes down the most general first-order operator, imposes
invariance under rotations and boosts, and solves the resulting linear
system exactly over the Gaussian rationals.
"""
from galinv.engine import constraint_cascade, invariant_family, levy_leblond
from galinv.galilei import rotation_generators, solve_boost_generators


def section(title):
    print()
    print(title)
    print("-" * len(title))


section("Two-component spinors")
sol = solve_boost_generators(rotation_generators(2))
print("boost generators compatible with the rotation algebra are all zero:", sol.only_zero)
fam2 = invariant_family(2, 1)
print("first-order invariant operators, modulo derivative-free ones:", fam2.dimension)

section("Four-component spinors")
fam4 = invariant_family(4, 1)
print(f"raw invariant space: {fam4.raw_dimension}, family after quotienting: {fam4.dimension}")
print("boost generator normalisation found by calibration:", fam4.boost_scale)
op = fam4.basis[0]
print(op.pretty())
print("matches the closed form:", op == levy_leblond())

# Watching the constraints accumulate shows where each parameter dies.
section("Cascade of constraints")
for stage in constraint_cascade():
    print(f"stage {stage['stage']}: raw {len(stage['raw']):2d}, "
          f"modulo equation multiples {len(stage['modulo_equation_multiples']):2d}, "
          f"modulo everything {len(stage['modulo_all']):2d}")
