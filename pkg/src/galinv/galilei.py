"""Galilei group elements, spinor representatives and boost generators."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

from .exact import (
    CR, ONE, ZERO, ConstraintSystem, Matrix, VPoly, block, commutator,
    identity, nullspace, pauli, zeros,
)

__all__ = [
    "GalileiElement", "SpinorRep", "GeneratorSet", "BoostGeneratorSolution",
    "levi_civita", "rotation_generators", "check_rotation_generators",
    "solve_boost_generators", "boost_matrix", "rotation_conjugate",
    "symbolic_velocity", "axis_velocity", "spinor_for_rotation", "GeneratorError",
]


class GeneratorError(ValueError):
    """Rotation generators violate their own commutation relations."""


def levi_civita(i: int, j: int, k: int) -> int:
    """epsilon_ijk for indices in {0, 1, 2}."""
    return (i - j) * (j - k) * (k - i) // 2


def _vec(values) -> Tuple:
    vals = tuple(values)
    if len(vals) != 3:
        raise ValueError("expected a 3-vector")
    return tuple(v if isinstance(v, (CR, VPoly)) else CR.coerce(v) for v in vals)


def _matvec(R: Matrix, x) -> Tuple:
    return tuple(sum((R[i, j] * x[j] for j in range(3)), ZERO) for i in range(3))


def _scaled(x, s) -> Tuple:
    return tuple(c * s for c in x)


def _vadd(*vs) -> Tuple:
    return tuple(sum(cs, ZERO) for cs in zip(*vs))


def _det3(R: Matrix):
    return (R[0, 0] * (R[1, 1] * R[2, 2] - R[1, 2] * R[2, 1])
            - R[0, 1] * (R[1, 0] * R[2, 2] - R[1, 2] * R[2, 0])
            + R[0, 2] * (R[1, 0] * R[2, 1] - R[1, 1] * R[2, 0]))


@dataclass(frozen=True)
class GalileiElement:
    """(R, v, a, b): rotation, boost velocity, space and time translation.

    Composition follows ``(R2,v2,a2,b2)(R1,v1,a1,b1) =
    (R2 R1, R2 v1 + v2, R2 a1 + a2 - v2 b1, b1 + b2)``.
    """

    R: Matrix = field(default_factory=lambda: identity(3))
    v: Tuple = (ZERO, ZERO, ZERO)
    a: Tuple = (ZERO, ZERO, ZERO)
    b: CR = ZERO

    def __post_init__(self):
        object.__setattr__(self, "v", _vec(self.v))
        object.__setattr__(self, "a", _vec(self.a))
        object.__setattr__(self, "b", CR.coerce(self.b))
        if self.R.shape != (3, 3):
            raise ValueError("R must be 3x3")
        if all(isinstance(x, CR) for row in self.R.entries for x in row):
            if self.R.T @ self.R != identity(3) or _det3(self.R) != ONE:
                raise ValueError("R must be a proper rotation (R^T R = I, det R = 1)")

    @classmethod
    def identity(cls) -> "GalileiElement":
        return cls()

    @classmethod
    def boost(cls, v) -> "GalileiElement":
        return cls(v=v)

    def compose(self, g1: "GalileiElement") -> "GalileiElement":
        """``self * g1`` (self applied after g1)."""
        return compose(self, g1)

    def inverse(self) -> "GalileiElement":
        return inverse(self)


def compose(g2: GalileiElement, g1: GalileiElement) -> GalileiElement:
    """The product ``g2 * g1``: g1 acts first, then g2.

    The translation picks up ``-v2 b1`` from boosting the time-shifted origin.
    """
    a = _vadd(_matvec(g2.R, g1.a), g2.a, _scaled(g2.v, -g1.b))
    return GalileiElement(
        R=g2.R @ g1.R,
        v=_vadd(_matvec(g2.R, g1.v), g2.v),
        a=a,
        b=g1.b + g2.b,
    )


def inverse(g: GalileiElement) -> GalileiElement:
    Rinv = g.R.T
    return GalileiElement(
        R=Rinv,
        v=_scaled(_matvec(Rinv, g.v), -1),
        a=_scaled(_matvec(Rinv, _vadd(g.a, _scaled(g.v, g.b))), -1),
        b=-g.b,
    )


GalileiElement.compose.__doc__ = compose.__doc__


# ---------------------------------------------------------------------------
# spinor representatives of rotations


@dataclass(frozen=True)
class SpinorRep:
    """Unnormalised rotation representative with ``V V^dagger = norm2 * I``.

    ``V`` stays rational; conjugation divides by ``norm2`` at the end.
    """

    V: Matrix
    norm2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "norm2", Fraction(self.norm2))
        if self.norm2 <= 0:
            raise ValueError("norm2 must be positive")
        n = self.V.rows
        if self.V @ self.V.conj_transpose() != identity(n) * CR(self.norm2):
            raise ValueError("V V^dagger must equal norm2 * I")

    @property
    def ncomp(self) -> int:
        return self.V.rows

    @classmethod
    def from_quaternion(cls, q0, q1, q2, q3, ncomp: int = 2) -> "SpinorRep":
        """Representative ``q0 I - i (q . sigma)`` repeated on each 2x2 block."""
        q = [Fraction(x) for x in (q0, q1, q2, q3)]
        n2 = sum(x * x for x in q)
        if ncomp == 1:
            return cls(identity(1), 1)
        V2 = identity(2) * CR(q[0])
        for j in range(3):
            V2 = V2 - pauli(j + 1) * CR(0, q[j + 1])
        if ncomp == 2:
            return cls(V2, n2)
        if ncomp == 4:
            z = zeros(2)
            return cls(block([[V2, z], [z, V2]]), n2)
        raise ValueError(f"unsupported spinor dimension {ncomp}")

    @classmethod
    def axis(cls, k: int, ncomp: int = 2) -> "SpinorRep":
        """``2 I - i sigma_k``: a rational rotation about axis k (k in 1..3)."""
        q = [2, 0, 0, 0]
        q[k] = 1
        return cls.from_quaternion(*q, ncomp=ncomp)

    def inverse_matrix(self) -> Matrix:
        return self.V.conj_transpose() * CR(1 / self.norm2)

    def conjugate(self, B: Matrix) -> Matrix:
        return rotation_conjugate(B, self)

    def rotation(self) -> Matrix:
        """The 3x3 rotation R with ``V sigma_j V^-1 = sum_i R_ij sigma_i``."""
        V2 = _leading_block(self)
        if V2 is None:
            raise ValueError("no SU(2) block to read a rotation from")
        Vd = V2.conj_transpose()
        half = CR(Fraction(1, 2) / self.norm2)
        rows = []
        for i in range(3):
            row = []
            for j in range(3):
                t = (pauli(i + 1) @ V2 @ pauli(j + 1) @ Vd).trace() * half
                row.append(t)
            rows.append(row)
        return Matrix(rows)


def _leading_block(rep: SpinorRep):
    if rep.V.rows == 1:
        return None
    return Matrix([row[:2] for row in rep.V.entries[:2]])


def rotation_conjugate(B: Matrix, rep: SpinorRep) -> Matrix:
    """``V B V^dagger / norm2``."""
    if B.rows != rep.V.rows or B.cols != rep.V.cols:
        raise ValueError(f"dimension mismatch: {B.shape} vs {rep.V.shape}")
    return rep.V @ B @ rep.inverse_matrix()


def spinor_for_rotation(R: Matrix, ncomp: int = 2) -> SpinorRep:
    """Rational spinor representative of a rational rotation matrix.

    Uses the unnormalised quaternion read off from R, taking the branch with
    a nonzero leading component so no square roots appear.
    """
    r = [[R[i, j] for j in range(3)] for i in range(3)]
    if ncomp == 1:
        return SpinorRep(identity(1), 1)
    tr = r[0][0] + r[1][1] + r[2][2]
    # proportional to 4*q_k^2 for each quaternion component
    diag = [ONE + tr, ONE + 2 * r[0][0] - tr, ONE + 2 * r[1][1] - tr, ONE + 2 * r[2][2] - tr]
    k = next(i for i, d in enumerate(diag) if d)
    w = r[2][1] - r[1][2]
    x = r[0][2] - r[2][0]
    y = r[1][0] - r[0][1]
    if k == 0:
        q = [diag[0], w, x, y]
    elif k == 1:
        q = [w, diag[1], r[0][1] + r[1][0], r[0][2] + r[2][0]]
    elif k == 2:
        q = [x, r[0][1] + r[1][0], diag[2], r[1][2] + r[2][1]]
    else:
        q = [y, r[0][2] + r[2][0], r[1][2] + r[2][1], diag[3]]
    if any(c.im for c in q):
        raise ValueError("rotation matrix must be real")
    rep = SpinorRep.from_quaternion(*(c.re for c in q), ncomp=ncomp)
    if rep.rotation() != R:
        # the other overall sign convention of the quaternion axis
        rep = SpinorRep.from_quaternion(q[0].re, *(-c.re for c in q[1:]), ncomp=ncomp)
    if rep.rotation() != R:
        raise ValueError("could not find a rational spinor representative")
    return rep


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class GeneratorSet:
    rotation: Tuple[Matrix, Matrix, Matrix]
    boost: Tuple[Matrix, Matrix, Matrix]

    @property
    def ncomp(self) -> int:
        return self.rotation[0].rows

    def commutator_defects(self) -> List[Tuple[str, Matrix]]:
        """Every Galilei commutation relation that fails, with its residual."""
        bad = []
        Xr, Xv = self.rotation, self.boost
        for i in range(3):
            for j in range(3):
                lhs_r = commutator(Xr[i], Xr[j])
                lhs_vv = commutator(Xv[i], Xv[j])
                lhs_vr = commutator(Xv[i], Xr[j])
                rhs_r = zeros(self.ncomp)
                rhs_vr = zeros(self.ncomp)
                for k in range(3):
                    e = levi_civita(i, j, k)
                    if e:
                        rhs_r = rhs_r + Xr[k] * CR(0, e)
                        rhs_vr = rhs_vr + Xv[k] * CR(0, e)
                for name, res in ((f"[Xr{i+1},Xr{j+1}]", lhs_r - rhs_r),
                                  (f"[Xv{i+1},Xv{j+1}]", lhs_vv),
                                  (f"[Xv{i+1},Xr{j+1}]", lhs_vr - rhs_vr)):
                    if not res.is_zero():
                        bad.append((name, res))
        return bad

    def is_valid(self) -> bool:
        return not self.commutator_defects()

    def to_json(self, family_parameter=None):
        out = {
            "rotation": [m.to_json() for m in self.rotation],
            "boost": [m.to_json() for m in self.boost],
        }
        if family_parameter is not None:
            out["family-parameter"] = str(family_parameter)
        return out


def rotation_generators(ncomp: int) -> Tuple[Matrix, Matrix, Matrix]:
    """Spin-1/2 rotation generators: 0 (N=1), sigma/2 (N=2), diag(sigma, sigma)/2 (N=4)."""
    half = CR(Fraction(1, 2))
    if ncomp == 1:
        return (zeros(1),) * 3
    if ncomp == 2:
        return tuple(pauli(j) * half for j in (1, 2, 3))
    if ncomp == 4:
        z = zeros(2)
        return tuple(block([[pauli(j), z], [z, pauli(j)]]) * half for j in (1, 2, 3))
    raise ValueError(f"unsupported spinor dimension {ncomp}")


def check_rotation_generators(rot: Sequence[Matrix]) -> None:
    for i in range(3):
        for j in range(3):
            rhs = zeros(rot[0].rows)
            for k in range(3):
                e = levi_civita(i, j, k)
                if e:
                    rhs = rhs + rot[k] * CR(0, e)
            if commutator(rot[i], rot[j]) != rhs:
                raise GeneratorError(
                    f"rotation generators fail [X{i+1}, X{j+1}] = i eps X_k")


@dataclass
class BoostGeneratorSolution:
    """Solutions of the linear boost-generator relations for fixed rotations.

    ``linear_basis`` spans the solutions of ``[Xv_i, Xr_j] = i eps_ijk Xv_k``.
    Each basis triple is then checked against the quadratic condition
    ``[Xv_i, Xv_j] = 0`` and filed under ``commuting`` or ``noncommuting``.
    """

    rotation: Tuple[Matrix, Matrix, Matrix]
    linear_basis: List[Tuple[Matrix, Matrix, Matrix]]
    commuting: List[Tuple[Matrix, Matrix, Matrix]]
    noncommuting: List[Tuple[Matrix, Matrix, Matrix]]
    rows: int = 0

    @property
    def only_zero(self) -> bool:
        """True when the zero triple is provably the only full solution.

        Decided exactly when the linear space has dimension <= 1: a single
        basis triple X scales as c X, and ``[cX_i, cX_j] = c^2 [X_i, X_j]``.
        """
        if not self.linear_basis:
            return True
        if len(self.linear_basis) == 1:
            return bool(self.noncommuting)
        return False

    def generator_sets(self) -> List[GeneratorSet]:
        return [GeneratorSet(self.rotation, t) for t in self.commuting]


def _unknown(axis: int, r: int, c: int) -> str:
    return f"X{axis + 1}_{r}{c}"


def solve_boost_generators(rot: Sequence[Matrix]) -> BoostGeneratorSolution:
    """Solve for boost generators compatible with the given rotation generators."""
    rot = tuple(rot)
    check_rotation_generators(rot)
    n = rot[0].rows
    names = [_unknown(i, r, c) for i in range(3) for r in range(n) for c in range(n)]
    sys = ConstraintSystem(names)
    for i in range(3):
        for j in range(3):
            # entry (r, c) of [Xv_i, Xr_j] - i eps_ijk Xv_k, linear in the unknowns
            for r in range(n):
                for c in range(n):
                    row = {}
                    for p in range(n):
                        coef = rot[j][p, c]
                        if coef:
                            key = _unknown(i, r, p)
                            row[key] = row.get(key, ZERO) + coef
                        coef = rot[j][r, p]
                        if coef:
                            key = _unknown(i, p, c)
                            row[key] = row.get(key, ZERO) - coef
                    for k in range(3):
                        e = levi_civita(i, j, k)
                        if e:
                            key = _unknown(k, r, c)
                            row[key] = row.get(key, ZERO) - CR(0, e)
                    sys.add_row(row)
    basis = []
    for vec in nullspace(sys):
        triple = tuple(
            Matrix([[vec.get(_unknown(i, r, c), ZERO) for c in range(n)] for r in range(n)])
            for i in range(3))
        basis.append(triple)
    good, bad = [], []
    for t in basis:
        ok = all(commutator(t[i], t[j]).is_zero() for i in range(3) for j in range(i + 1, 3))
        (good if ok else bad).append(t)
    return BoostGeneratorSolution(rot, basis, good, bad, rows=len(sys))


# ---------------------------------------------------------------------------
# finite boosts


def symbolic_velocity(offset: int = 0) -> Tuple[VPoly, VPoly, VPoly]:
    """(v1, v2, v3) as polynomial variables starting at ``offset``."""
    return tuple(VPoly.var(offset + k) for k in range(3))


def axis_velocity(axis: int) -> Tuple:
    """Symbolic velocity along one axis (0, 1 or 2), using variable v_{axis+1}."""
    return tuple(VPoly.var(axis) if k == axis else VPoly() for k in range(3))


def boost_matrix(boost_gens: Sequence[Matrix], v) -> Matrix:
    """``exp(i X_j v_j)`` as an exact terminating series.

    ``v`` holds rationals or VPolys.  Raises ValueError unless ``X . v`` is
    nilpotent.
    """
    boost_gens = tuple(boost_gens)
    n = boost_gens[0].rows
    v = tuple(VPoly.coerce(x) for x in v)
    Xv = None
    for X, vj in zip(boost_gens, v):
        term = X.map(lambda e, vj=vj: VPoly.coerce(e) * vj)
        Xv = term if Xv is None else Xv + term
    A = Xv * CR(0, 1)
    result = identity(n).map(VPoly.coerce)
    power = result
    fact = 1
    for k in range(1, n + 1):
        power = power @ A
        if power.is_zero():
            return result
        fact *= k
        result = result + power * CR(Fraction(1, fact))
    if not (power @ A).is_zero():
        raise ValueError("boost generator combination is not nilpotent")
    return result
