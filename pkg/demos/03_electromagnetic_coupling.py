"""Minimal coupling to a potential and the spin magnetic moment.

Run with ``python3 demos/03_electromagnetic_coupling.py``.

Derivatives are replaced by covariant ones, the lower spinor is eliminated
with the upper equation, and the result is compared with the closed form
(i d_t - V) - (1/2m)[pi.pi + i sigma.(pi x pi)].  The cross product
of kinetic momenta does not vanish because the derivatives act on A,
which is where the sigma.B term comes from.
"""
from galinv.coupling import (
    drop_fields, eliminate_lower, minimal_substitute, nc_normal_form, pauli_schrodinger,
)
from galinv.engine import levy_leblond

pair = minimal_substitute(levy_leblond())
print("coupled pair, phi and chi columns:")
for r, row in enumerate(pair.rows):
    for c, entry in enumerate(row):
        print(f"  row {r} col {c}: {entry.to_text()}")

reduced = eliminate_lower(pair, 1)
print()
print("equation for the upper spinor:")
for word, M in reduced.terms.items():
    print(f"  {' '.join(word) or '1':>8}  {M}")

print()
print("difference from the closed form vanishes:",
      nc_normal_form(reduced - pauli_schrodinger(1)).is_zero())
spin = {w[0]: reduced.terms[w] for w in reduced.terms if w and w[0] in ("d1A2", "d2A1")}
print("curl terms coupling to sigma_3:", {k: str(v) for k, v in spin.items()})
print("with the fields switched off this is the free equation:",
      drop_fields(reduced) == pauli_schrodinger(1, potentials=False))
