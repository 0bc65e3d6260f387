"""Galilean invariance of matrix differential operators.

A :class:`DiffOp` is ``sum_alpha M_alpha d_t^a d_1^b1 d_2^b2 d_3^b3`` with
constant matrix coefficients.  Under a context (rotation R, boost v,
spinor matrix S and the Schroedinger phase) the derivatives become

    d_t -> -i m v^2 / 2 + d_t + v_j d_j
    d_i -> -i m (R^T v)_i + R_ji d_j

and the coefficients are conjugated, ``M -> S M S^-1``.  An operator is
invariant when the result equals the original, coefficientwise in every
derivative and every monomial of v.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exact import (
    CR, ONE, ZERO, ConstraintSystem, LinForm, Matrix, VPoly, collect_v,
    identity, nullspace, rref, zeros,
)
from .galilei import (
    GeneratorSet, SpinorRep, axis_velocity, boost_matrix, levi_civita,
    rotation_generators, solve_boost_generators,
)

MultiIndex = Tuple[int, int, int, int]  # (a, b1, b2, b3)

__all__ = [
    "DiffOp", "SchrodingerPhase", "TransformContext", "GeneratorContext",
    "transform_operator", "generator_variation", "derive_constraints",
    "build_ansatz", "invariant_space", "invariant_family", "InvariantFamily",
    "mixed_term_report", "commutant", "calibrate_boost", "default_contexts",
    "levy_leblond", "schrodinger", "multi_indices", "UnsupportedDimension",
    "constraint_cascade",
]


class UnsupportedDimension(ValueError):
    pass


def _order(idx: MultiIndex) -> int:
    return sum(idx)


def _is_mixed(idx: MultiIndex) -> bool:
    return idx[0] > 0 and sum(idx[1:]) > 0


def _entry_zero(x) -> bool:
    if isinstance(x, CR):
        return not x
    return LinForm.coerce(x).is_zero()


def _canonical_key(idx: MultiIndex):
    return (-idx[0], -sum(idx[1:]), tuple(-b for b in idx[1:]))


class DiffOp:
    """Matrix differential operator with constant coefficients.

    ``terms`` maps multi-indices ``(a, b1, b2, b3)`` to ``ncomp x ncomp``
    matrices whose entries are CR (concrete) or LinForm (ansatz).
    """

    __slots__ = ("ncomp", "terms")

    def __init__(self, ncomp: int, terms: Mapping[MultiIndex, Matrix] | None = None):
        self.ncomp = ncomp
        clean = {}
        for idx, M in (terms or {}).items():
            idx = tuple(int(x) for x in idx)
            if len(idx) != 4 or min(idx) < 0:
                raise ValueError(f"bad multi-index {idx}")
            if M.shape != (ncomp, ncomp):
                raise ValueError(f"term {idx} has shape {M.shape}, expected {ncomp}x{ncomp}")
            if not M.is_zero():
                clean[idx] = M
        self.terms: Dict[MultiIndex, Matrix] = dict(sorted(clean.items(), key=lambda kv: _canonical_key(kv[0])))

    def order(self) -> int:
        return max((_order(i) for i in self.terms), default=0)

    def coefficient(self, idx: MultiIndex) -> Matrix:
        return self.terms.get(tuple(idx), zeros(self.ncomp))

    def is_concrete(self) -> bool:
        return all(isinstance(x, CR) for M in self.terms.values() for row in M.entries for x in row)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "DiffOp"):
        if self.ncomp != other.ncomp:
            raise ValueError(f"ncomp mismatch: {self.ncomp} vs {other.ncomp}")

    def __add__(self, other: "DiffOp") -> "DiffOp":
        self._check(other)
        out = dict(self.terms)
        for idx, M in other.terms.items():
            out[idx] = out[idx] + M if idx in out else M
        return DiffOp(self.ncomp, out)

    def __neg__(self):
        return DiffOp(self.ncomp, {i: -M for i, M in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DiffOp":
        return DiffOp(self.ncomp, {i: M * c for i, M in self.terms.items()})

    def left_mul(self, A: Matrix) -> "DiffOp":
        return DiffOp(self.ncomp, {i: A @ M for i, M in self.terms.items()})

    def right_mul(self, A: Matrix) -> "DiffOp":
        return DiffOp(self.ncomp, {i: M @ A for i, M in self.terms.items()})

    def substitute(self, assignment: Mapping[str, object]) -> "DiffOp":
        """Concrete operator from an assignment of every unknown."""
        def conc(x):
            if isinstance(x, CR):
                return x
            p = LinForm.coerce(x).substitute(assignment)
            if not p.is_constant():
                raise ValueError("entry still depends on v")
            return p.constant_term()
        return DiffOp(self.ncomp, {i: M.map(conc) for i, M in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.ncomp == other.ncomp and self.terms == other.terms

    def __hash__(self):
        return hash((self.ncomp, tuple(self.terms.items())))

    def proportional_to(self, other: "DiffOp") -> Optional[CR]:
        """c with ``self == c * other``, or None."""
        if self.ncomp != other.ncomp or set(self.terms) != set(other.terms):
            return None
        if not self.terms:
            return ONE
        c = None
        for idx, M in other.terms.items():
            for a, b in zip(self.terms[idx].entries, M.entries):
                for x, y in zip(a, b):
                    if y and c is None:
                        c = CR.coerce(x) / y
        if c is None or not c:
            return None
        return c if self == other.scale(c) else None

    def __repr__(self):
        return f"DiffOp(ncomp={self.ncomp}, terms={len(self.terms)})"

    def pretty(self) -> str:
        lines = []
        for idx, M in self.terms.items():
            lines.append(f"{_deriv_name(idx)}: {M}")
        return "\n".join(lines) or "0"

    def to_json(self):
        return {
            "ncomp": self.ncomp,
            "terms": [{"dt": i[0], "dx": list(i[1:]), "matrix": M.to_json()}
                      for i, M in self.terms.items()],
        }

    @classmethod
    def from_json(cls, data) -> "DiffOp":
        from .exact import matrix_from_json
        terms = {}
        for t in data["terms"]:
            terms[(t["dt"], *t["dx"])] = matrix_from_json(t["matrix"])
        return cls(data["ncomp"], terms)


def _deriv_name(idx: MultiIndex) -> str:
    parts = []
    if idx[0]:
        parts.append("dt" + (f"^{idx[0]}" if idx[0] > 1 else ""))
    for k, e in enumerate(idx[1:]):
        if e:
            parts.append(f"d{k + 1}" + (f"^{e}" if e > 1 else ""))
    return "*".join(parts) or "1"


# ---------------------------------------------------------------------------
# reference operators


def levy_leblond(m=1) -> DiffOp:
    """The first-order 4-spinor operator with B1 = [[0,0],[I,0]],
    B2j = diag(sigma_j, -sigma_j), B3 = [[0, 2imI],[0, 0]]."""
    from .exact import block, pauli
    m = Fraction(m)
    I2, Z = identity(2), zeros(2)
    terms = {(1, 0, 0, 0): block([[Z, Z], [I2, Z]]),
             (0, 0, 0, 0): block([[Z, I2 * CR(0, 2 * m)], [Z, Z]])}
    for j in range(3):
        idx = [0, 0, 0, 0]
        idx[j + 1] = 1
        s = pauli(j + 1)
        terms[tuple(idx)] = block([[s, Z], [Z, -s]])
    return DiffOp(4, terms)


def schrodinger(ncomp: int, m=1, time_coeff=None) -> DiffOp:
    """``(2im d_t + d_j d_j) * I`` (or with a custom time coefficient)."""
    m = Fraction(m)
    tc = CR(0, 2 * m) if time_coeff is None else CR.coerce(time_coeff)
    I = identity(ncomp)
    terms = {(1, 0, 0, 0): I * tc}
    for j in range(3):
        idx = [0, 0, 0, 0]
        idx[j + 1] = 2
        terms[tuple(idx)] = I
    return DiffOp(ncomp, terms)


# ---------------------------------------------------------------------------
# transformation contexts


@dataclass(frozen=True)
class SchrodingerPhase:
    """Mass constant of the Schroedinger phase m v.x + m v^2 t / 2."""

    m: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "m", Fraction(self.m))
        if self.m <= 0:
            raise ValueError("mass must be positive")


@dataclass(frozen=True)
class TransformContext:
    """A finite group element acting on operators.

    ``spinor`` is the matrix S in ``M -> S M S^-1``; ``spinor_inv`` its
    inverse.  ``R`` and ``v`` may hold VPoly entries (symbolic velocity).
    """

    R: Matrix
    v: Tuple
    spinor: Matrix
    spinor_inv: Matrix
    phase: SchrodingerPhase = field(default_factory=SchrodingerPhase)
    label: str = ""

    @property
    def ncomp(self) -> int:
        return self.spinor.rows

    @classmethod
    def identity(cls, ncomp: int, phase: SchrodingerPhase | None = None) -> "TransformContext":
        I = identity(ncomp)
        return cls(identity(3), (ZERO,) * 3, I, I, phase or SchrodingerPhase(), "identity")

    @classmethod
    def boost(cls, boost_gens: Sequence[Matrix], v, phase: SchrodingerPhase | None = None,
              label: str = "boost") -> "TransformContext":
        S = boost_matrix(boost_gens, v)
        Sinv = boost_matrix(boost_gens, tuple(-VPoly.coerce(x) for x in v))
        return cls(identity(3), tuple(v), S, Sinv, phase or SchrodingerPhase(), label)

    @classmethod
    def rotation(cls, rep: SpinorRep, phase: SchrodingerPhase | None = None,
                 label: str = "rotation") -> "TransformContext":
        if rep.ncomp == 1:
            raise ValueError("use rotation_scalar for one-component fields")
        return cls(rep.rotation(), (ZERO,) * 3, rep.V, rep.inverse_matrix(),
                   phase or SchrodingerPhase(), label)

    @classmethod
    def rotation_scalar(cls, R: Matrix, phase: SchrodingerPhase | None = None) -> "TransformContext":
        I = identity(1)
        return cls(R, (ZERO,) * 3, I, I, phase or SchrodingerPhase(), "rotation")

    @classmethod
    def element(cls, R: Matrix, v, rot_spinor: Matrix, rot_spinor_inv: Matrix,
                boost_gens: Sequence[Matrix], phase: SchrodingerPhase | None = None) -> "TransformContext":
        """Rotation R combined with boost v: S = S_R B(R^T v)."""
        w = tuple(sum((R[j, i] * VPoly.coerce(v[j]) for j in range(3)), VPoly()) for i in range(3))
        B = boost_matrix(boost_gens, w)
        Binv = boost_matrix(boost_gens, tuple(-x for x in w))
        return cls(R, tuple(v), rot_spinor @ B, Binv @ rot_spinor_inv,
                   phase or SchrodingerPhase(), "element")


@dataclass(frozen=True)
class GeneratorContext:
    """Infinitesimal rotation about ``axis`` (0, 1, 2) with spinor generator X."""

    X: Matrix
    axis: int
    label: str = "rotation generator"

    @property
    def ncomp(self) -> int:
        return self.X.rows


# derivative polynomials: dict multi-index -> VPoly

def _dp_mul(p, q):
    out = {}
    for i1, c1 in p.items():
        for i2, c2 in q.items():
            idx = tuple(a + b for a, b in zip(i1, i2))
            s = c1 * c2
            out[idx] = out[idx] + s if idx in out else s
    return {i: c for i, c in out.items() if c}


def _dp_pow(p, n):
    out = {(0, 0, 0, 0): VPoly.const(1)}
    for _ in range(n):
        out = _dp_mul(out, p)
    return out


def _substitution_images(ctx: TransformContext):
    """Images of d_t and d_1..d_3 as derivative polynomials."""
    m = ctx.phase.m
    v = tuple(VPoly.coerce(x) for x in ctx.v)
    R = ctx.R
    v2 = sum((x * x for x in v), VPoly())
    dt = {(0, 0, 0, 0): v2 * CR(0, -m / 2), (1, 0, 0, 0): VPoly.const(1)}
    for j in range(3):
        idx = [0, 0, 0, 0]
        idx[j + 1] = 1
        dt[tuple(idx)] = dt.get(tuple(idx), VPoly()) + v[j]
    dxs = []
    for i in range(3):
        rtv = sum((VPoly.coerce(R[j, i]) * v[j] for j in range(3)), VPoly())
        d = {(0, 0, 0, 0): rtv * CR(0, -m)}
        for j in range(3):
            idx = [0, 0, 0, 0]
            idx[j + 1] = 1
            d[tuple(idx)] = d.get(tuple(idx), VPoly()) + VPoly.coerce(R[j, i])
        dxs.append({k: c for k, c in d.items() if c})
    return {k: c for k, c in dt.items() if c}, dxs


def _substituted(idx: MultiIndex, images):
    dt, dxs = images
    p = _dp_pow(dt, idx[0])
    for k in range(3):
        if idx[k + 1]:
            p = _dp_mul(p, _dp_pow(dxs[k], idx[k + 1]))
    return p


def transform_operator(op: DiffOp, ctx: TransformContext) -> DiffOp:
    """Image of ``op`` under the context, recollected by multi-index."""
    if op.ncomp != ctx.ncomp:
        raise ValueError(f"operator has ncomp={op.ncomp} but context acts on {ctx.ncomp}")
    images = _substitution_images(ctx)
    out: Dict[MultiIndex, Matrix] = {}
    for idx, M in op.terms.items():
        conj = ctx.spinor @ M @ ctx.spinor_inv
        for new_idx, coeff in _substituted(idx, images).items():
            contrib = conj.map(lambda x, c=coeff: x * c)
            out[new_idx] = out[new_idx] + contrib if new_idx in out else contrib
    return DiffOp(op.ncomp, {i: M.map(_simplify) for i, M in out.items()})


def _simplify(x):
    if isinstance(x, VPoly) and x.is_constant():
        return x.constant_term()
    if isinstance(x, LinForm) and not x.coeffs and x.constant.is_constant():
        return x.constant.constant_term()
    return x


def generator_variation(op: DiffOp, gen: GeneratorContext) -> DiffOp:
    """First-order change of ``op`` under an infinitesimal rotation.

    With ``S = 1 + i eps X`` and ``R = 1 + eps A``, ``A_ji = eps_{axis,j,i}``,
    returns the coefficient of eps.
    """
    k = gen.axis
    X = gen.X
    iX = X * CR(0, 1)
    out: Dict[MultiIndex, Matrix] = {}

    def add(idx, M):
        out[idx] = out[idx] + M if idx in out else M

    for idx, M in op.terms.items():
        add(idx, iX @ M - M @ iX)
        for i in range(3):
            bi = idx[i + 1]
            if not bi:
                continue
            for j in range(3):
                e = levi_civita(k, j, i)
                if not e:
                    continue
                new = list(idx)
                new[i + 1] -= 1
                new[j + 1] += 1
                add(tuple(new), M * CR(bi * e))
    return DiffOp(op.ncomp, out)


# ---------------------------------------------------------------------------
# constraint assembly


def multi_indices(order: int, forbid_mixed: bool = False) -> List[MultiIndex]:
    out = []
    for a in range(order + 1):
        for b in product(range(order + 1), repeat=3):
            idx = (a, *b)
            if sum(idx) > order:
                continue
            if forbid_mixed and _is_mixed(idx):
                continue
            out.append(idx)
    return sorted(out, key=_canonical_key)


def build_ansatz(ncomp: int, indices: Sequence[MultiIndex]) -> Tuple[DiffOp, List[str]]:
    """All-unknown operator over the given multi-indices.

    Unknown ids are ``B<slot>_<row><col>`` with slots numbered from 1 in
    canonical multi-index order (time derivatives first, constant last).
    """
    indices = sorted(indices, key=_canonical_key)
    terms, names = {}, []
    for slot, idx in enumerate(indices, start=1):
        rows = []
        for r in range(ncomp):
            row = []
            for c in range(ncomp):
                name = f"B{slot}_{r}{c}"
                names.append(name)
                row.append(LinForm.unknown(name))
            rows.append(row)
        terms[idx] = Matrix(rows)
    op = DiffOp.__new__(DiffOp)
    op.ncomp = ncomp
    op.terms = terms
    return op, names


def _rows_from_op(diff: DiffOp, only: Optional[Iterable[MultiIndex]] = None):
    keep = None if only is None else set(map(tuple, only))
    for idx, M in diff.terms.items():
        if keep is not None and idx not in keep:
            continue
        for row in M.entries:
            for x in row:
                if _entry_zero(x):
                    continue
                for mono, lf in collect_v(x).items():
                    if lf.constant:
                        raise ValueError("inhomogeneous constraint: ansatz has a constant part")
                    yield {u: c.constant_term() for u, c in lf.coeffs.items()}


def derive_constraints(ansatz: DiffOp, contexts: Sequence, unknowns: Sequence[str] | None = None,
                       only: Optional[Iterable[MultiIndex]] = None) -> ConstraintSystem:
    """Homogeneous rows forcing ``transform(ansatz) == ansatz`` for every context.

    One row per (derivative term, matrix entry, v-monomial).  Derivative
    terms produced by the transformation but absent from the ansatz (e.g.
    mixed d_t d_j terms) are forced to zero the same way.  ``only``
    restricts the rows to the listed derivative terms.
    """
    if unknowns is None:
        seen = []
        for M in ansatz.terms.values():
            for row in M.entries:
                for x in row:
                    for u in LinForm.coerce(x).coeffs:
                        if u not in seen:
                            seen.append(u)
        unknowns = seen
    sys = ConstraintSystem(unknowns)
    for ctx in contexts:
        if isinstance(ctx, GeneratorContext):
            diff = generator_variation(ansatz, ctx)
        else:
            diff = transform_operator(ansatz, ctx) - ansatz
        sys.extend(_rows_from_op(diff, only))
    return sys


def _vector_to_op(ansatz: DiffOp, vec: Mapping[str, CR]) -> DiffOp:
    return ansatz.substitute(vec)


def _op_to_vector(ansatz: DiffOp, op: DiffOp) -> Dict[int, CR]:
    """Coordinates of a concrete op in the ansatz unknown order (index -> value)."""
    out = {}
    pos = 0
    for idx, M in ansatz.terms.items():
        C = op.terms.get(idx)
        for r in range(ansatz.ncomp):
            for c in range(ansatz.ncomp):
                if C is not None and C[r, c]:
                    out[pos] = C[r, c]
                pos += 1
    extra = set(op.terms) - set(ansatz.terms)
    if extra:
        raise ValueError(f"operator has terms outside the ansatz: {sorted(extra)}")
    return out


# ---------------------------------------------------------------------------
# generating sets and boost calibration


def default_contexts(ncomp: int, boost_gens: Sequence[Matrix] | None,
                     phase: SchrodingerPhase, finite_rotations: bool = False,
                     rotations: bool = True, boosts: bool = True) -> List:
    """3 rotation generators plus 3 symbolic axis boosts."""
    ctxs: List = []
    if rotations:
        rot = rotation_generators(ncomp)
        ctxs += [GeneratorContext(rot[k], k, f"rotation generator {k + 1}") for k in range(3)]
        if finite_rotations:
            for k in (1, 2, 3):
                if ncomp == 1:
                    ctxs.append(TransformContext.rotation_scalar(
                        SpinorRep.axis(k).rotation(), phase))
                else:
                    ctxs.append(TransformContext.rotation(SpinorRep.axis(k, ncomp), phase,
                                                          f"finite rotation {k}"))
    if boosts:
        gens = boost_gens if boost_gens is not None else (zeros(ncomp),) * 3
        ctxs += [TransformContext.boost(gens, axis_velocity(k), phase, f"boost {k + 1}")
                 for k in range(3)]
    return ctxs


@lru_cache(maxsize=None)
def _calibrated(ncomp: int, m: Fraction):
    return _calibrate(ncomp, SchrodingerPhase(m))


def calibrate_boost(ncomp: int, phase: SchrodingerPhase | None = None) -> dict:
    """Boost generators for an N-spinor, derived rather than assumed.

    Solves the Galilei commutation relations for boost generators given the
    spin-1/2 rotation generators.  For N=4 each commuting (nilpotent)
    candidate is scaled so that the first-order family has the block
    pattern ``d_t`` lower-left with the same weight as the ``d_j``
    diagonal; the returned dict records the candidate, the scale, and the
    family that fixed it.
    """
    phase = phase or SchrodingerPhase()
    return _calibrated(ncomp, phase.m)


def _calibrate(ncomp: int, phase: SchrodingerPhase) -> dict:
    if ncomp not in (1, 2, 4):
        raise UnsupportedDimension(f"ncomp must be 1, 2 or 4, got {ncomp}")
    sol = solve_boost_generators(rotation_generators(ncomp))
    if ncomp in (1, 2):
        # only the zero triple satisfies every relation
        if not sol.only_zero:
            raise AssertionError("unexpected nonzero boost generators")
        return {"generators": (zeros(ncomp),) * 3, "scale": None, "solution": sol,
                "candidate": None}
    trials = []
    for cand in sol.commuting:
        fam = _family(ncomp, 1, False, phase, cand)
        trials.append((cand, fam))
    for cand, fam in trials:
        if len(fam.basis) != 1:
            continue
        op = fam.basis[0]
        t = op.coefficient((1, 0, 0, 0))
        x1 = op.coefficient((0, 1, 0, 0))
        if not (t[2, 0] and t[3, 1]) or t[0, 0] or t[0, 2]:
            continue  # d_t not in the lower-left block
        # conjugating by diag(I, cI) rescales the lower-left boost block by c
        # and the d_t coefficient by c; equal weights pin c
        c = x1[0, 1] / t[2, 0]
        gens = tuple(X * c for X in cand)
        return {"generators": gens, "scale": c, "solution": sol, "candidate": cand}
    raise AssertionError("no boost candidate yields a first-order invariant family")


# ---------------------------------------------------------------------------
# invariant spaces and families


@dataclass
class InvariantFamily:
    """Result of an invariance search.

    ``raw`` spans every invariant operator in the ansatz.  ``basis`` spans
    the dynamical family: ``raw`` modulo derivative-free invariants and
    modulo multiplication (either side) by the nilpotent part of the
    commutant of the spinor representation; representatives are in reduced
    row echelon form over the ansatz unknowns.
    """

    ncomp: int
    order: int
    forbid_mixed: bool
    unknowns: List[str]
    indices: List[MultiIndex]
    raw: List[DiffOp]
    basis: List[DiffOp]
    commutant: List[Matrix]
    radical: List[Matrix]
    constraint_rows: int
    rank: int
    contexts: List[str]
    boost_scale: Optional[CR] = None

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def raw_dimension(self) -> int:
        return len(self.raw)

    def to_json(self):
        return {
            "ncomp": self.ncomp,
            "order": self.order,
            "forbid_mixed": self.forbid_mixed,
            "family_dimension": self.dimension,
            "basis": [op.to_json() for op in self.basis],
            "raw_invariant_dimension": self.raw_dimension,
            "raw_invariant_basis": [op.to_json() for op in self.raw],
            "commutant_dimension": len(self.commutant),
            "radical_dimension": len(self.radical),
            "audit": {
                "unknowns": len(self.unknowns),
                "constraint_rows": self.constraint_rows,
                "rank": self.rank,
                "nullity": len(self.unknowns) - self.rank,
                "contexts": self.contexts,
            },
            "boost_scale": None if self.boost_scale is None else self.boost_scale.to_json(),
        }


def commutant(ncomp: int, contexts: Sequence) -> List[Matrix]:
    """Constant matrices invariant under every context (order-0 invariants)."""
    ansatz, names = build_ansatz(ncomp, [(0, 0, 0, 0)])
    sys = derive_constraints(ansatz, contexts, names)
    return [ansatz.substitute(vec).coefficient((0, 0, 0, 0)) for vec in nullspace(sys)]


def _radical(C: List[Matrix]) -> List[Matrix]:
    # char 0: x is in the radical iff tr(x y) = 0 for all y in the algebra
    names = [f"c{k}" for k in range(len(C))]
    sys = ConstraintSystem(names)
    for y in C:
        sys.add_row({names[k]: (C[k] @ y).trace() for k in range(len(C))})
    out = []
    for vec in nullspace(sys):
        M = zeros(C[0].rows)
        for k, n in enumerate(names):
            if n in vec:
                M = M + C[k] * vec[n]
        out.append(M)
    return out


def invariant_space(ncomp: int, order: int, forbid_mixed: bool = False,
                    phase: SchrodingerPhase | None = None, boost_gens=None,
                    contexts: Sequence | None = None, indices: Sequence[MultiIndex] | None = None):
    """Every invariant operator in the ansatz: (ansatz, unknowns, raw basis, system)."""
    phase = phase or SchrodingerPhase()
    if indices is None:
        indices = multi_indices(order, forbid_mixed)
    if contexts is None:
        if boost_gens is None:
            boost_gens = calibrate_boost(ncomp, phase)["generators"]
        contexts = default_contexts(ncomp, boost_gens, phase)
    ansatz, names = build_ansatz(ncomp, indices)
    sys = derive_constraints(ansatz, contexts, names)
    raw = [ansatz.substitute(v) for v in nullspace(sys)]
    return ansatz, names, raw, sys


def _reduce(vec: Dict[int, CR], echelon: Dict[int, Dict[int, CR]]) -> Dict[int, CR]:
    row = dict(vec)
    for col in [c for c in row if c in echelon]:
        f = row.get(col)
        if f is None:
            continue
        for k, v in echelon[col].items():
            s = row.get(k, ZERO) - f * v
            if s:
                row[k] = s
            else:
                row.pop(k, None)
    return row


def _flip(vec: Mapping[int, CR], n: int) -> Dict[int, CR]:
    return {n - 1 - k: c for k, c in vec.items()}


def _quotient_representatives(n: int, vectors, modulo, backward: bool = True):
    """Canonical basis of span(vectors) modulo span(modulo).

    With ``backward`` the subspace being factored out is echelonised from
    the last unknown backwards, so it absorbs low-order coordinates
    (constant terms) before touching the leading ones; otherwise it
    eliminates the leading coordinates.  The surviving representatives are
    then put in ordinary reduced row echelon form.
    """
    if backward:
        back = rref(n, (_flip(v, n) for v in modulo))
        reduced = [_flip(_reduce(_flip(v, n), back), n) for v in vectors]
    else:
        fwd = rref(n, modulo)
        reduced = [_reduce(v, fwd) for v in vectors]
    return rref(n, (r for r in reduced if r))


def _family(ncomp, order, forbid_mixed, phase, boost_gens, contexts=None, indices=None,
            boost_scale=None) -> InvariantFamily:
    if contexts is None:
        contexts = default_contexts(ncomp, boost_gens, phase)
    ansatz, names, raw, sys = invariant_space(ncomp, order, forbid_mixed, phase,
                                              boost_gens, contexts, indices)
    C = commutant(ncomp, contexts)
    J = _radical(C) if C else []
    n = len(names)
    # derivative-free invariants and radical multiples are not new equations
    spans = []
    const_idx = (0, 0, 0, 0)
    if const_idx in ansatz.terms:
        for M in C:
            spans.append(_op_to_vector(ansatz, DiffOp(ncomp, {const_idx: M})))
    for op in raw:
        for Jm in J:
            for prod_op in (op.left_mul(Jm), op.right_mul(Jm)):
                if not prod_op.is_zero():
                    spans.append(_op_to_vector(ansatz, prod_op))
    reps = _quotient_representatives(n, [_op_to_vector(ansatz, op) for op in raw], spans)
    basis = [ansatz.substitute({names[k]: c for k, c in row.items()}) for row in reps.values()]
    from .exact import rank as _rank
    return InvariantFamily(
        ncomp=ncomp, order=order, forbid_mixed=forbid_mixed, unknowns=names,
        indices=list(ansatz.terms), raw=raw, basis=basis, commutant=C, radical=J,
        constraint_rows=len(sys), rank=_rank(sys),
        contexts=[getattr(c, "label", "") for c in contexts], boost_scale=boost_scale,
    )


def invariant_family(ncomp: int, order: int, forbid_mixed: bool = False,
                     phase: SchrodingerPhase | None = None, contexts: Sequence | None = None,
                     boost_gens=None) -> InvariantFamily:
    """Galilean-invariant equations of the given order for an N-spinor.

    The boost representation comes from :func:`calibrate_boost` unless
    ``boost_gens`` is given.  An empty family is a valid answer.
    """
    if ncomp not in (1, 2, 4):
        raise UnsupportedDimension(f"ncomp must be 1, 2 or 4, got {ncomp}")
    if order < 1:
        raise ValueError("order must be at least 1")
    phase = phase or SchrodingerPhase()
    scale = None
    if boost_gens is None:
        cal = calibrate_boost(ncomp, phase)
        boost_gens, scale = cal["generators"], cal["scale"]
    return _family(ncomp, order, forbid_mixed, phase, boost_gens, contexts, boost_scale=scale)


def mixed_term_report(op: DiffOp) -> List[MultiIndex]:
    """Multi-indices with both time and space derivatives and a nonzero matrix."""
    return [idx for idx, M in op.terms.items() if _is_mixed(idx) and not M.is_zero()]


# ---------------------------------------------------------------------------
# staged derivation of the first-order 4-spinor equation


def constraint_cascade(phase: SchrodingerPhase | None = None) -> List[dict]:
    """Replay the first-order 4-spinor derivation one condition at a time.

    Stages: rotations only; then boost rows for the d_t coefficient, then
    for the d_j coefficients, then for the constant term.  Each stage
    reports its raw invariant basis and the same basis reduced modulo the
    equivalences used by :func:`invariant_family`.
    """
    phase = phase or SchrodingerPhase()
    cal = calibrate_boost(4, phase)
    gens = cal["generators"]
    indices = multi_indices(1)
    ansatz, names = build_ansatz(4, indices)
    rot = [GeneratorContext(X, k) for k, X in enumerate(rotation_generators(4))]
    boosts = [TransformContext.boost(gens, axis_velocity(k), phase) for k in range(3)]
    full = _family(4, 1, False, phase, gens)
    n = len(names)
    const_idx = (0, 0, 0, 0)
    # multiples J*F of the final equation F: adding them does not change it
    eq_multiples = [_op_to_vector(ansatz, f.left_mul(Jm)) for f in full.basis
                    for Jm in full.radical if not f.left_mul(Jm).is_zero()]
    derivative_free = [_op_to_vector(ansatz, DiffOp(4, {const_idx: M})) for M in full.commutant]

    stages = [
        ("rotations", []),
        ("boost: d_t coefficient", [(1, 0, 0, 0)]),
        ("boost: d_j coefficients", [(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]),
        ("boost: constant term", [const_idx]),
    ]
    sys = derive_constraints(ansatz, rot, names)
    out = []
    for name, terms in stages:
        if terms:
            sys.extend(derive_constraints(ansatz, boosts, names, only=terms).rows)
        raw_ops = [ansatz.substitute(v) for v in nullspace(sys)]
        vecs = [_op_to_vector(ansatz, op) for op in raw_ops]
        # forward elimination removes the lower-left d_j block first
        mod_eq = _quotient_representatives(n, vecs, eq_multiples, backward=False)
        mod_all = _quotient_representatives(n, vecs, eq_multiples + derivative_free, backward=False)
        out.append({
            "stage": name,
            "raw": raw_ops,
            "modulo_equation_multiples": [
                ansatz.substitute({names[k]: c for k, c in row.items()}) for row in mod_eq.values()],
            "modulo_all": [ansatz.substitute({names[k]: c for k, c in row.items()})
                           for row in mod_all.values()],
            "rows": len(sys),
        })
    return out
