"""Operator products and powers, plane-wave solutions, finite covariance."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exact import (
    CR, ONE, ZERO, ConstraintSystem, Matrix, identity, nullspace, zeros,
)
from .engine import (
    DiffOp, SchrodingerPhase, TransformContext, calibrate_boost, levy_leblond,
    mixed_term_report, schrodinger, transform_operator,
)
from .galilei import (
    GalileiElement, SpinorRep, boost_matrix, spinor_for_rotation, symbolic_velocity,
)

__all__ = [
    "PlaneWave", "op_compose", "op_power", "invariance_of_power",
    "plane_wave_reduce", "covariance_check", "dispersion_scan", "scan_to_csv",
    "Report", "BOOST_SIGN", "symbol_matrix", "solves", "schrodinger_equivalent",
]

# k' = R k + BOOST_SIGN * m v for the wave seen from the boosted frame;
# confirmed by covariance_check, which tries both signs
BOOST_SIGN = 1


@dataclass
class Report:
    """Outcome of a verification: ``{claim, status, witness}``."""

    claim: str
    status: bool
    witness: dict = field(default_factory=dict)

    def to_json(self):
        return {"claim": self.claim, "status": "pass" if self.status else "fail",
                "witness": self.witness}

    def __bool__(self):
        return self.status


def op_compose(lhs: DiffOp, rhs: DiffOp) -> DiffOp:
    """Product of two constant-coefficient operators (lhs applied last)."""
    if lhs.ncomp != rhs.ncomp:
        raise ValueError(f"ncomp mismatch: {lhs.ncomp} vs {rhs.ncomp}")
    out: Dict[tuple, Matrix] = {}
    for i1, A in lhs.terms.items():
        for i2, B in rhs.terms.items():
            idx = tuple(a + b for a, b in zip(i1, i2))
            P = A @ B
            out[idx] = out[idx] + P if idx in out else P
    return DiffOp(lhs.ncomp, out)


def op_power(L: DiffOp, N: int) -> DiffOp:
    if N < 1:
        raise ValueError("power must be >= 1")
    out = L
    for _ in range(N - 1):
        out = op_compose(out, L)
    return out


def invariance_of_power(L: DiffOp, N: int, ctx: TransformContext) -> Report:
    """Check that ``L^N`` is unchanged by the context."""
    P = op_power(L, N)
    image = transform_operator(P, ctx)
    diff = image - P
    return Report(
        claim=f"L^{N} invariant under {ctx.label or 'context'}",
        status=diff.is_zero(),
        witness={"N": N, "terms": len(P.terms), "residual_terms": len(diff.terms),
                 "mixed_terms": [list(i) for i in mixed_term_report(P)]},
    )


# ---------------------------------------------------------------------------
# plane waves


@dataclass(frozen=True)
class PlaneWave:
    """``spinor * exp(i (k.x - omega t))``."""

    k: Tuple[Fraction, Fraction, Fraction]
    omega: Fraction
    spinor: Tuple[CR, ...] = ()
    m: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(Fraction(x) for x in self.k))
        object.__setattr__(self, "omega", Fraction(self.omega))
        object.__setattr__(self, "spinor", tuple(CR.coerce(x) for x in self.spinor))
        object.__setattr__(self, "m", Fraction(self.m))

    def on_shell(self) -> bool:
        return self.omega == sum(x * x for x in self.k) / (2 * self.m)

    def to_json(self):
        return {"k": [str(x) for x in self.k], "omega": str(self.omega),
                "spinor": [c.to_json() for c in self.spinor], "m": str(self.m)}


def symbol_matrix(op: DiffOp, k, omega) -> Matrix:
    """``op`` with d_t -> -i omega and d_j -> i k_j."""
    if not op.is_concrete():
        raise ValueError("plane-wave reduction needs a concrete operator")
    dt = CR(0, -Fraction(omega))
    dx = [CR(0, Fraction(x)) for x in k]
    total = zeros(op.ncomp)
    for idx, M in op.terms.items():
        factor = dt ** idx[0]
        for j in range(3):
            factor = factor * dx[j] ** idx[j + 1]
        total = total + M * factor
    return total


def _matrix_nullspace(M: Matrix) -> List[Tuple[CR, ...]]:
    names = [f"s{c}" for c in range(M.cols)]
    sys = ConstraintSystem(names, ({names[c]: M[r, c] for c in range(M.cols)}
                                   for r in range(M.rows)))
    return [tuple(v.get(n, ZERO) for n in names) for v in nullspace(sys)]


def plane_wave_reduce(op: DiffOp, pw: PlaneWave) -> Tuple[Matrix, List[Tuple[CR, ...]]]:
    """Symbol matrix at (k, omega) and the spinors it annihilates."""
    M = symbol_matrix(op, pw.k, pw.omega)
    return M, _matrix_nullspace(M)


def solves(op: DiffOp, pw: PlaneWave) -> bool:
    M = symbol_matrix(op, pw.k, pw.omega)
    col = Matrix([[c] for c in pw.spinor])
    return (M @ col).is_zero()


def dispersion_scan(op: DiffOp, ks: Sequence, omegas: Sequence) -> List[dict]:
    """Nullity of the symbol matrix over a grid of (k, omega)."""
    rows = []
    for k in ks:
        for w in omegas:
            _, ns = plane_wave_reduce(op, PlaneWave(k, w))
            rows.append({"k1": str(k[0]), "k2": str(k[1]), "k3": str(k[2]),
                         "omega": str(Fraction(w)), "nullity": len(ns)})
    return rows


def scan_to_csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["k1", "k2", "k3", "omega", "nullity"],
                            lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# finite transformations of solutions


def _spinor_matrix(ncomp: int, g: GalileiElement, sign: int, boost_gens,
                   rep: Optional[SpinorRep]) -> Matrix:
    """Matrix S of the context for g with the boost velocity multiplied by sign."""
    if g.R == identity(3):
        S_R = identity(ncomp)
    else:
        rep = rep or spinor_for_rotation(g.R, ncomp)
        if rep.ncomp > 1 and rep.rotation() != g.R:
            raise ValueError("spinor representative does not match R")
        S_R = rep.V * CR(1)
    w = tuple(sum((g.R[j, i] * g.v[j] for j in range(3)), ZERO) * sign for i in range(3))
    B = boost_matrix(boost_gens, w).map(lambda p: p.constant_term())
    return S_R @ B


def covariance_check(op: DiffOp, pw: PlaneWave, g: GalileiElement,
                     rep: Optional[SpinorRep] = None, boost_gens=None) -> Report:
    """Map a plane-wave solution to the frame related by ``g``.

    The image has wave vector ``R k + s m v`` and frequency
    ``omega + s (R k).v + m v^2 / 2`` with spinor ``S u``, where S is the
    spinor matrix of g.  Both signs s = +1, -1 are tried; the report says
    which one yields a solution (translations only add a constant phase
    and are ignored).
    """
    if not solves(op, pw):
        return Report("input plane wave solves the operator", False, {"input": pw.to_json()})
    if boost_gens is None:
        boost_gens = calibrate_boost(op.ncomp, SchrodingerPhase(pw.m))["generators"]
    m = pw.m
    Rk = [sum((g.R[i, j] * pw.k[j] for j in range(3)), ZERO) for i in range(3)]
    v = list(g.v)
    if any(c.im for c in Rk + v):
        raise ValueError("plane-wave covariance needs real rational R and v")
    v2 = sum((c * c for c in v), ZERO)
    outcomes = {}
    for sign in (1, -1):
        k_new = tuple((Rk[i] + v[i] * (sign * m)).re for i in range(3))
        omega_new = (pw.omega + sign * sum((Rk[i] * v[i] for i in range(3)), ZERO).re
                     + (v2.re * m) / 2)
        S = _spinor_matrix(op.ncomp, g, sign, boost_gens, rep)
        u = S @ Matrix([[c] for c in pw.spinor])
        image = PlaneWave(k_new, omega_new, tuple(u[r, 0] for r in range(u.rows)), m)
        outcomes[sign] = (image, solves(op, image) and any(image.spinor))
    good = [s for s in (1, -1) if outcomes[s][1]]
    boosted = any(c for c in v)
    chosen = BOOST_SIGN if BOOST_SIGN in good else (good[0] if good else BOOST_SIGN)
    image = outcomes[chosen][0]
    return Report(
        claim="image of a plane-wave solution under g solves the operator",
        status=bool(good) and (chosen == BOOST_SIGN or not boosted),
        witness={
            "k_prime": [str(x) for x in image.k],
            "omega_prime": str(image.omega),
            "spinor_prime": [c.to_json() for c in image.spinor],
            "on_shell": image.on_shell(),
            "boost_sign": chosen if boosted else None,
            "signs_that_solve": good,
        },
    )


def schrodinger_equivalent(P: DiffOp, m=1) -> Optional[CR]:
    """Scalar c with ``P == c * (2im d_t + d_j^2) I``, or None."""
    return P.proportional_to(schrodinger(P.ncomp, m))
