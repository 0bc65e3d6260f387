"""Minimal coupling to electromagnetic potentials and elimination of the
lower spinor pair.

Expressions are sums of ``coefficient * word``.  A word is a tuple of
symbol names read left to right as operators:

* derivatives ``dt``, ``d1``, ``d2``, ``d3``;
* fields ``V``, ``A1``, ``A2``, ``A3`` acting by multiplication;
* field derivatives such as ``d2A3`` (the function d_2 A_3), also
  multiplication operators.

Multiplication operators commute with each other and derivatives commute
with each other; moving a derivative to the right of a field uses
``d f = f d + (d f)``.  The normal form lists fields first, then
derivatives, each group sorted.  Coefficients are square matrices over
the complex rationals (2x2 for spinor pairs) and commute with every
symbol.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .exact import CR, I_UNIT, ONE, ZERO, Matrix, identity, pauli, zeros
from .engine import DiffOp

__all__ = [
    "DERIVATIVES", "FIELDS", "NCExpr", "CoupledPair", "nc_normal_form",
    "is_field", "is_derivative", "sigma_dot", "cross", "dot",
    "substitute_operator", "minimal_substitute", "eliminate_lower",
    "kinetic_momentum", "pauli_schrodinger", "pauli_contraction",
    "drop_fields", "freeze_fields", "derivation_report",
]

DERIVATIVES = ("dt", "d1", "d2", "d3")
FIELDS = ("V", "A1", "A2", "A3")

Word = Tuple[str, ...]


def is_derivative(sym: str) -> bool:
    return sym in DERIVATIVES


def is_field(sym: str) -> bool:
    """Plain fields and first derivatives of fields."""
    if sym in FIELDS:
        return True
    return any(sym.startswith(d) and sym[len(d):] in FIELDS for d in DERIVATIVES)


def _differentiate(d: str, f: str) -> str:
    # only first derivatives of the potentials ever appear; a second one
    # would mean the symbol alphabet is too small for the computation
    assert f in FIELDS, f"second derivative of a field requested: {d}({f})"
    return d + f


@lru_cache(maxsize=None)
def _normalize_word(word: Word) -> Tuple[Tuple[Word, int], ...]:
    """Normal form of a single word as integer combination of normal words."""
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if is_derivative(a) and is_field(b):
            swapped = word[:i] + (b, a) + word[i + 2:]
            applied = word[:i] + (_differentiate(a, b),) + word[i + 2:]
            acc: Dict[Word, int] = {}
            for part in (swapped, applied):
                for w, c in _normalize_word(part):
                    acc[w] = acc.get(w, 0) + c
            return tuple((w, c) for w, c in acc.items() if c)
        if not (is_derivative(a) or is_field(a)):
            raise ValueError(f"unknown symbol {a!r}")
    if word and not (is_derivative(word[-1]) or is_field(word[-1])):
        raise ValueError(f"unknown symbol {word[-1]!r}")
    fields = sorted(s for s in word if is_field(s))
    derivs = sorted((s for s in word if is_derivative(s)), key=DERIVATIVES.index)
    return ((tuple(fields) + tuple(derivs), 1),)


def _word_key(word: Word):
    return (len(word), [(0 if is_field(s) else 1, s) for s in word])


class NCExpr:
    """Noncommutative operator expression with matrix coefficients."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[Word, Matrix] | None = None):
        self.dim = dim
        clean = {}
        for w, M in (terms or {}).items():
            if M.shape != (dim, dim):
                raise ValueError(f"coefficient shape {M.shape} does not match dim {dim}")
            if not M.is_zero():
                clean[tuple(w)] = M
        self.terms: Dict[Word, Matrix] = dict(sorted(clean.items(), key=lambda kv: _word_key(kv[0])))

    # constructors --------------------------------------------------------
    @classmethod
    def zero(cls, dim: int = 2) -> "NCExpr":
        return cls(dim)

    @classmethod
    def scalar(cls, c, dim: int = 2) -> "NCExpr":
        return cls(dim, {(): identity(dim) * CR.coerce(c)})

    @classmethod
    def matrix(cls, M: Matrix) -> "NCExpr":
        return cls(M.rows, {(): M})

    @classmethod
    def symbol(cls, name: str, dim: int = 2) -> "NCExpr":
        if not (is_field(name) or is_derivative(name)):
            raise ValueError(f"unknown symbol {name!r}")
        return cls(dim, {(name,): identity(dim)})

    # algebra -------------------------------------------------------------
    def _check(self, other: "NCExpr"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, NCExpr):
            other = NCExpr.scalar(other, self.dim)
        self._check(other)
        out = dict(self.terms)
        for w, M in other.terms.items():
            out[w] = out[w] + M if w in out else M
        return NCExpr(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return NCExpr(self.dim, {w: -M for w, M in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, NCExpr):
            self._check(other)
            out: Dict[Word, Matrix] = {}
            for w1, A in self.terms.items():
                for w2, B in other.terms.items():
                    w, P = w1 + w2, A @ B
                    out[w] = out[w] + P if w in out else P
            return NCExpr(self.dim, out)
        if isinstance(other, Matrix):
            return NCExpr(self.dim, {w: M @ other for w, M in self.terms.items()})
        c = CR.coerce(other)
        return NCExpr(self.dim, {w: M * c for w, M in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, Matrix):
            return NCExpr(self.dim, {w: other @ M for w, M in self.terms.items()})
        c = CR.coerce(other)
        return NCExpr(self.dim, {w: c * M for w, M in self.terms.items()})

    def __truediv__(self, other):
        return self * CR.coerce(other).inverse()

    def is_zero(self) -> bool:
        return not self.terms

    def is_normal(self) -> bool:
        return all(_normalize_word(w) == ((w, 1),) for w in self.terms)

    def __eq__(self, other):
        if not isinstance(other, NCExpr):
            return NotImplemented
        return self.dim == other.dim and (nc_normal_form(self) - nc_normal_form(other)).is_zero()

    def __hash__(self):
        return hash((self.dim, tuple(nc_normal_form(self).terms)))

    def map_words(self, keep) -> "NCExpr":
        return NCExpr(self.dim, {w: M for w, M in self.terms.items() if keep(w)})

    def coefficient(self, word: Iterable[str]) -> Matrix:
        return nc_normal_form(self).terms.get(tuple(word), zeros(self.dim))

    # output --------------------------------------------------------------
    def to_json(self):
        return {"dim": self.dim,
                "terms": [{"word": list(w), "coefficient": M.to_json()}
                          for w, M in self.terms.items()]}

    @classmethod
    def from_json(cls, data) -> "NCExpr":
        from .exact import matrix_from_json
        return cls(data["dim"], {tuple(t["word"]): matrix_from_json(t["coefficient"])
                                 for t in data["terms"]})

    def __repr__(self):
        return f"NCExpr({self.to_text()})"

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = [f"[{_coeff_text(M)}]{''.join(' ' + s for s in w)}" for w, M in self.terms.items()]
        return " + ".join(parts)

    def to_latex(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, M in self.terms.items():
            word = " ".join(_latex_symbol(s) for s in w)
            parts.append(f"\\left({_coeff_latex(M)}\\right){word}")
        return " + ".join(parts)


def nc_normal_form(e: NCExpr) -> NCExpr:
    out: Dict[Word, Matrix] = {}
    for w, M in e.terms.items():
        for nw, c in _normalize_word(w):
            P = M * CR(c)
            out[nw] = out[nw] + P if nw in out else P
    return NCExpr(e.dim, out)


# ---------------------------------------------------------------------------
# formatting


def _pauli_components(M: Matrix) -> List[CR]:
    """(c0, c1, c2, c3) with M = c0 I + c_j sigma_j for a 2x2 M."""
    half = CR(Fraction(1, 2))
    comps = [M.trace() * half]
    for j in (1, 2, 3):
        comps.append((pauli(j) @ M).trace() * half)
    return comps


def _coeff_text(M: Matrix) -> str:
    if M.shape == (1, 1):
        return str(M[0, 0])
    if M.shape != (2, 2):
        return repr(M)
    names = ("I", "s1", "s2", "s3")
    return " + ".join(f"({c}){n}" for c, n in zip(_pauli_components(M), names) if c)


def _coeff_latex(M: Matrix) -> str:
    if M.shape == (1, 1):
        return str(M[0, 0])
    if M.shape != (2, 2):
        return repr(M)
    names = ("I", "\\sigma_1", "\\sigma_2", "\\sigma_3")
    return " + ".join(f"({c}){n}" for c, n in zip(_pauli_components(M), names) if c)


def _latex_symbol(s: str) -> str:
    if s == "dt":
        return "\\partial_t"
    if s in ("d1", "d2", "d3"):
        return f"\\partial_{s[1]}"
    if s == "V":
        return "V"
    if s in ("A1", "A2", "A3"):
        return f"A_{s[1]}"
    for d in DERIVATIVES:
        if s.startswith(d):
            return f"({_latex_symbol(d)} {_latex_symbol(s[len(d):])})"
    return s


# ---------------------------------------------------------------------------
# vector helpers


def dot(a, b) -> NCExpr:
    """``a_j b_j`` with the order of factors kept."""
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a, b) -> List[NCExpr]:
    """``(a x b)_j = eps_jkl a_k b_l`` with the order of factors kept."""
    return [a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]]


def sigma_dot(vec) -> NCExpr:
    """``sigma_j vec_j`` for a 3-vector of 2-dimensional expressions."""
    return pauli(1) * vec[0] + pauli(2) * vec[1] + pauli(3) * vec[2]


def pauli_contraction(a, b) -> NCExpr:
    """``(a.b) I + i sigma.(a x b)``, the closed form of ``(sigma.a)(sigma.b)``."""
    return dot(a, b) + I_UNIT * sigma_dot(cross(a, b))


def kinetic_momentum(dim: int = 2, potentials: bool = True) -> List[NCExpr]:
    """``pi_j = i d_j + A_j``."""
    out = []
    for j in (1, 2, 3):
        p = I_UNIT * NCExpr.symbol(f"d{j}", dim)
        if potentials:
            p = p + NCExpr.symbol(f"A{j}", dim)
        out.append(p)
    return out


# ---------------------------------------------------------------------------
# substitution


def _substituted_derivative(sym: str, dim: int, potentials: bool) -> NCExpr:
    """``i d_t -> i d_t - V`` and ``-i d_j -> -i d_j - A_j`` solved for the derivative."""
    d = NCExpr.symbol(sym, dim)
    if not potentials:
        return d
    if sym == "dt":
        return d + I_UNIT * NCExpr.symbol("V", dim)
    return d - I_UNIT * NCExpr.symbol("A" + sym[1], dim)


def substitute_operator(op: DiffOp, potentials: bool = True,
                        multiplier=I_UNIT) -> NCExpr:
    """Apply minimal coupling to a concrete operator of any order.

    The result is multiplied by ``multiplier`` (default ``i``, which turns
    the first-order operators into the usual ``i d_t`` form) and returned
    in normal form.
    """
    if not op.is_concrete():
        raise ValueError("minimal coupling needs a concrete operator")
    dim = op.ncomp
    total = NCExpr.zero(dim)
    for idx, M in op.terms.items():
        factor = NCExpr.scalar(ONE, dim)
        syms = ["dt"] * idx[0] + [f"d{j}" for j in (1, 2, 3) for _ in range(idx[j])]
        for s in syms:
            factor = factor * _substituted_derivative(s, dim, potentials)
        total = total + M * factor
    return nc_normal_form(total * CR.coerce(multiplier))


def _sub_block(M: Matrix, r: int, c: int) -> Matrix:
    return Matrix([[M[2 * r + i, 2 * c + j] for j in range(2)] for i in range(2)])


@dataclass(frozen=True)
class CoupledPair:
    """Two 2-spinor equations ``rows[r][0] phi + rows[r][1] chi = 0``."""

    rows: Tuple[Tuple[NCExpr, NCExpr], Tuple[NCExpr, NCExpr]]

    def __add__(self, other: "CoupledPair") -> "CoupledPair":
        return CoupledPair(tuple(tuple(a + b for a, b in zip(r1, r2))
                                 for r1, r2 in zip(self.rows, other.rows)))

    def scale(self, c) -> "CoupledPair":
        return CoupledPair(tuple(tuple(e * c for e in row) for row in self.rows))

    def __eq__(self, other):
        if not isinstance(other, CoupledPair):
            return NotImplemented
        return all(a == b for r1, r2 in zip(self.rows, other.rows) for a, b in zip(r1, r2))

    def to_json(self):
        return [{"phi": row[0].to_json(), "chi": row[1].to_json()} for row in self.rows]

    def to_latex(self) -> List[str]:
        return [f"\\left[{row[0].to_latex()}\\right]\\varphi + "
                f"\\left[{row[1].to_latex()}\\right]\\chi &= 0" for row in self.rows]


def minimal_substitute(op: DiffOp, potentials: bool = True) -> CoupledPair:
    """Couple a first-order 4-spinor operator and split it into (phi, chi) equations."""
    if op.ncomp != 4:
        raise ValueError("the coupled pair needs a 4-component operator")
    if op.order() > 1:
        raise ValueError("minimal_substitute only handles first-order operators")
    if not op.is_concrete():
        raise ValueError("minimal coupling needs a concrete operator")
    rows = []
    for r in range(2):
        row = []
        for c in range(2):
            blk = DiffOp(2, {idx: _sub_block(M, r, c) for idx, M in op.terms.items()})
            row.append(substitute_operator(blk, potentials))
        rows.append(tuple(row))
    return CoupledPair(tuple(rows))


def eliminate_lower(pair: CoupledPair, m=1) -> NCExpr:
    """Solve the first equation for chi and substitute it into the second.

    The first equation must be ``P phi + Q chi = 0`` with Q a constant
    invertible 2x2 matrix; for the Levy-Leblond pair Q = -2m I.
    """
    m = Fraction(m) if not isinstance(m, str) else Fraction(m)
    if m == 0:
        raise ValueError("degenerate mass m = 0")
    (P, Q), (R, T) = pair.rows
    Q = nc_normal_form(Q)
    if set(Q.terms) - {()} or () not in Q.terms:
        raise ValueError("the chi coefficient of the first equation must be a constant matrix")
    Qm = Q.terms[()]
    det = Qm[0, 0] * Qm[1, 1] - Qm[0, 1] * Qm[1, 0]
    if not det:
        raise ValueError("the chi coefficient of the first equation is singular")
    inv = Matrix([[Qm[1, 1], -Qm[0, 1]], [-Qm[1, 0], Qm[0, 0]]]) * det.inverse()
    chi = -(inv * P)
    return nc_normal_form(R + T * chi)


def pauli_schrodinger(m=1, potentials: bool = True) -> NCExpr:
    """``(i d_t - V) - (1/2m)[pi.pi + i sigma.(pi x pi)]`` in normal form."""
    m = Fraction(m)
    i_dt = I_UNIT * NCExpr.symbol("dt", 2)
    if potentials:
        i_dt = i_dt - NCExpr.symbol("V", 2)
    pi = kinetic_momentum(2, potentials)
    kinetic = dot(pi, pi) + I_UNIT * sigma_dot(cross(pi, pi))
    return nc_normal_form(i_dt - kinetic * CR(1 / (2 * m)))


def drop_fields(e: NCExpr) -> NCExpr:
    """Set every potential to zero."""
    return e.map_words(lambda w: not any(is_field(s) for s in w))


def freeze_fields(e: NCExpr, names: Iterable[str] = FIELDS) -> NCExpr:
    """Treat the named potentials as constants (their derivatives vanish)."""
    names = set(names)
    return nc_normal_form(e).map_words(
        lambda w: not any(s not in FIELDS and is_field(s) and s.lstrip("dt123") in names
                          and s not in names for s in w))


def derivation_report(op: DiffOp, m=1) -> dict:
    """Transcript of coupling, elimination and comparison with the closed form."""
    pair = minimal_substitute(op)
    result = eliminate_lower(pair, m)
    expected = pauli_schrodinger(m)
    diff = nc_normal_form(result - expected)
    spin = nc_normal_form(I_UNIT * sigma_dot(cross(kinetic_momentum(), kinetic_momentum())))
    free = drop_fields(result)
    free_expected = pauli_schrodinger(m, potentials=False)
    return {
        "coupled_pair": pair.to_json(),
        "coupled_pair_latex": pair.to_latex(),
        "eliminated": result.to_json(),
        "eliminated_latex": result.to_latex(),
        "expected_latex": expected.to_latex(),
        "spin_term_latex": spin.to_latex(),
        "matches_closed_form": diff.is_zero(),
        "free_limit_matches": (free - free_expected).is_zero(),
        "notes": ["the scalar potential enters the time equation as (i d_t - V)"],
    }
