"""Exact scalars, polynomials in the boost velocity, linear forms and matrices.

Everything here is immutable and uses :class:`fractions.Fraction` underneath,
so rank and nullspace statements are exact.
"""
from __future__ import annotations

from functools import lru_cache
from fractions import Fraction
from itertools import zip_longest
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

Rational = Fraction

__all__ = [
    "ComplexRational", "CR", "VPoly", "LinForm", "Matrix", "MatrixCR", "MatrixLF",
    "ConstraintSystem", "nullspace", "rref", "rank", "rank_mod_p", "collect_v", "reassemble",
    "pauli", "identity", "zeros", "commutator", "anticommutator", "block",
    "parse_rational", "matrix_to_json", "matrix_from_json",
]


def parse_rational(text) -> Fraction:
    """Parse ``"3/5"``, ``"-2"``, an int or a Fraction into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        return Fraction(text.strip())
    raise TypeError(f"cannot read a rational from {text!r}")


class ComplexRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, x) -> "ComplexRational":
        if type(x) is cls:
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x, 0)
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact")
        raise TypeError(f"cannot coerce {type(x).__name__} to ComplexRational")

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, _SCALARS):
            return NotImplemented
        o = ComplexRational.coerce(other)
        return ComplexRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, _SCALARS):
            return NotImplemented
        o = ComplexRational.coerce(other)
        return ComplexRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return ComplexRational.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, _SCALARS):
            return NotImplemented
        o = ComplexRational.coerce(other)
        if not o.im:
            return ComplexRational(self.re * o.re, self.im * o.re)
        if not self.im:
            return ComplexRational(self.re * o.re, self.re * o.im)
        return ComplexRational(self.re * o.re - self.im * o.im,
                               self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> "ComplexRational":
        return ComplexRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "ComplexRational":
        n = self.norm2()
        if not n:
            raise ZeroDivisionError("ComplexRational division by zero")
        return ComplexRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * ComplexRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return ComplexRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    # comparison ---------------------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, ComplexRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"CR({self})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{_imag_str(abs(self.im))}"

    def to_json(self):
        return [str(self.re), str(self.im)]

    @classmethod
    def from_json(cls, pair) -> "ComplexRational":
        re, im = pair
        return cls(parse_rational(re), parse_rational(im))


def _imag_str(x: Fraction) -> str:
    sign = "-" if x < 0 else ""
    num, den = abs(x.numerator), x.denominator
    body = "i" if num == 1 else f"{num}i"
    return f"{sign}{body}/{den}" if den != 1 else f"{sign}{body}"


CR = ComplexRational
_SCALARS = (ComplexRational, int, Fraction, complex)
ZERO = CR(0)
ONE = CR(1)
I_UNIT = CR(0, 1)


def _strip(mono: Tuple[int, ...]) -> Tuple[int, ...]:
    n = len(mono)
    while n and not mono[n - 1]:
        n -= 1
    return mono[:n]


class VPoly:
    """Sparse multivariate polynomial with ComplexRational coefficients.

    Monomials are exponent tuples with trailing zeros stripped, so ``()`` is
    the constant monomial and ``(0, 0, 2)`` is stored as such.  The first
    three variables are the boost velocity components v1, v2, v3; further
    variables are allowed (e.g. a second velocity).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Tuple[int, ...], object] | None = None):
        clean: Dict[Tuple[int, ...], CR] = {}
        if terms:
            for mono, c in terms.items():
                c = CR.coerce(c)
                if c:
                    m = _strip(tuple(mono))
                    prev = clean.get(m)
                    if prev is not None:
                        c = prev + c
                        if not c:
                            del clean[m]
                            continue
                    clean[m] = c
        self.terms = clean

    @classmethod
    def _raw(cls, terms: Dict[Tuple[int, ...], CR]) -> "VPoly":
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def const(cls, c) -> "VPoly":
        c = CR.coerce(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def var(cls, index: int, power: int = 1) -> "VPoly":
        """The monomial ``v_{index+1}**power`` (index counts from zero)."""
        mono = tuple([0] * index + [power])
        return cls._raw({_strip(mono): ONE})

    @classmethod
    def coerce(cls, x) -> "VPoly":
        if isinstance(x, VPoly):
            return x
        return cls.const(x)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def constant_term(self) -> CR:
        return self.terms.get((), ZERO)

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def __add__(self, other):
        if isinstance(other, LinForm):
            return NotImplemented
        o = VPoly.coerce(other)
        if not o.terms:
            return self
        if not self.terms:
            return o
        out = dict(self.terms)
        for m, c in o.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return VPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return VPoly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, LinForm):
            return NotImplemented
        return self + (-VPoly.coerce(other))

    def __rsub__(self, other):
        return VPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (LinForm, Matrix)):
            return NotImplemented
        if not isinstance(other, VPoly):
            c = CR.coerce(other)
            if not c:
                return VPoly._raw({})
            return VPoly._raw({m: v * c for m, v in self.terms.items()})
        out: Dict[Tuple[int, ...], CR] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                if not m1:
                    m = m2
                elif not m2:
                    m = m1
                else:
                    m = _strip(tuple(a + b for a, b in zip_longest(m1, m2, fillvalue=0)))
                p = c1 * c2
                s = out.get(m)
                out[m] = p if s is None else s + p
        return VPoly._raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = VPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def substitute(self, values: Sequence) -> "VPoly":
        """Replace variable k by ``values[k]`` (a scalar or VPoly)."""
        out = VPoly()
        for m, c in self.terms.items():
            term = VPoly.const(c)
            for k, e in enumerate(m):
                if e:
                    term = term * (VPoly.coerce(values[k]) ** e)
            out = out + term
        return out

    def evaluate(self, values: Sequence) -> CR:
        p = self.substitute(values)
        if not p.is_constant():
            raise ValueError("evaluation left free variables")
        return p.constant_term()

    def __eq__(self, other):
        if isinstance(other, VPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction, CR)):
            return self == VPoly.const(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"VPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda t: (sum(t), t)):
            c = self.terms[m]
            mono = "*".join(f"v{k + 1}" + (f"^{e}" if e > 1 else "")
                            for k, e in enumerate(m) if e)
            if not mono:
                parts.append(f"({c})")
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)


class LinForm:
    """``constant + sum_u coeffs[u] * u`` with VPoly coefficients.

    Unknowns are plain strings (e.g. ``"B1_20"``).  Products of two
    LinForms are not defined: everything in the engine is linear in the
    unknown matrix entries.
    """

    __slots__ = ("coeffs", "constant")

    def __init__(self, coeffs: Mapping[str, object] | None = None, constant=None):
        clean = {}
        if coeffs:
            for u, c in coeffs.items():
                c = VPoly.coerce(c)
                if c:
                    clean[u] = c
        self.coeffs: Dict[str, VPoly] = clean
        self.constant = VPoly.coerce(constant if constant is not None else 0)

    @classmethod
    def _raw(cls, coeffs, constant):
        obj = cls.__new__(cls)
        obj.coeffs = coeffs
        obj.constant = constant
        return obj

    @classmethod
    def unknown(cls, name: str) -> "LinForm":
        return cls._raw({name: VPoly.const(1)}, VPoly())

    @classmethod
    def coerce(cls, x) -> "LinForm":
        if isinstance(x, LinForm):
            return x
        return cls._raw({}, VPoly.coerce(x))

    def unknowns(self) -> List[str]:
        return list(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs and not self.constant

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        o = LinForm.coerce(other)
        if not self.coeffs and not self.constant:
            return o
        out = dict(self.coeffs)
        for u, c in o.coeffs.items():
            s = out.get(u)
            if s is None:
                out[u] = c
            else:
                s = s + c
                if s:
                    out[u] = s
                else:
                    del out[u]
        return LinForm._raw(out, self.constant + o.constant)

    __radd__ = __add__

    def __neg__(self):
        return LinForm._raw({u: -c for u, c in self.coeffs.items()}, -self.constant)

    def __sub__(self, other):
        return self + (-LinForm.coerce(other))

    def __rsub__(self, other):
        return LinForm.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, LinForm):
            raise TypeError("product of two linear forms is not linear")
        if isinstance(other, Matrix):
            return NotImplemented
        p = VPoly.coerce(other)
        if not p:
            return LinForm._raw({}, VPoly())
        out = {}
        for u, c in self.coeffs.items():
            q = c * p
            if q:
                out[u] = q
        return LinForm._raw(out, self.constant * p)

    __rmul__ = __mul__

    def substitute(self, assignment: Mapping[str, object]) -> VPoly:
        """Plug values in for every unknown; missing unknowns count as zero."""
        out = self.constant
        for u, c in self.coeffs.items():
            val = assignment.get(u)
            if val is not None:
                out = out + c * VPoly.coerce(val)
        return out

    def __eq__(self, other):
        if isinstance(other, LinForm):
            return self.coeffs == other.coeffs and self.constant == other.constant
        if isinstance(other, (int, Fraction, CR, VPoly)):
            return self == LinForm.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()), self.constant))

    def __repr__(self):
        parts = [f"[{c}]*{u}" for u, c in sorted(self.coeffs.items())]
        if self.constant:
            parts.append(f"[{self.constant}]")
        return "LinForm(" + (" + ".join(parts) or "0") + ")"


def collect_v(entry) -> Dict[Tuple[int, int, int], LinForm]:
    """Split ``entry`` by monomials in (v1, v2, v3).

    Returns a map ``(e1, e2, e3) -> LinForm`` whose coefficients are
    constants.  Zero entries give an empty map.
    """
    lf = LinForm.coerce(entry)
    out: Dict[Tuple[int, ...], Dict[str, CR]] = {}
    consts: Dict[Tuple[int, ...], CR] = {}
    for u, poly in lf.coeffs.items():
        for m, c in poly.terms.items():
            out.setdefault(m, {})[u] = c
    for m, c in lf.constant.terms.items():
        consts[m] = c
    result = {}
    for m in set(out) | set(consts):
        key = tuple(m) + (0,) * (3 - len(m)) if len(m) < 3 else tuple(m)
        result[key] = LinForm(
            {u: VPoly.const(c) for u, c in out.get(m, {}).items()},
            consts.get(m, ZERO),
        )
    return result


def reassemble(parts: Mapping[Tuple[int, ...], LinForm]) -> LinForm:
    """Inverse of :func:`collect_v`."""
    total = LinForm()
    for mono, lf in parts.items():
        mon = VPoly._raw({_strip(tuple(mono)): ONE})
        total = total + lf * mon
    return total


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Dense immutable matrix over CR, VPoly or LinForm entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Iterable[object]]):
        data = tuple(tuple(_coerce_entry(x) for x in row) for row in entries)
        if not data or not data[0]:
            raise ValueError("empty matrix")
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise ValueError("ragged matrix rows")
        self.rows = len(data)
        self.cols = width
        self.entries = data

    @classmethod
    def _raw(cls, data):
        obj = cls.__new__(cls)
        obj.entries = data
        obj.rows = len(data)
        obj.cols = len(data[0])
        return obj

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r][c]

    def map(self, fn) -> "Matrix":
        return Matrix._raw(tuple(tuple(fn(x) for x in row) for row in self.entries))

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Matrix._raw(tuple(
            tuple(a + b for a, b in zip(r1, r2))
            for r1, r2 in zip(self.entries, other.entries)))

    def __neg__(self):
        return self.map(lambda x: -x)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return self @ other
        if not isinstance(other, _SCALARS + (VPoly, LinForm)):
            return NotImplemented
        return self.map(lambda x: x * other)

    def __rmul__(self, other):
        if not isinstance(other, _SCALARS + (VPoly, LinForm)):
            return NotImplemented
        return self.map(lambda x: other * x)

    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = list(zip(*other.entries))
        out = []
        for row in self.entries:
            new_row = []
            for col in ocols:
                acc = None
                for a, b in zip(row, col):
                    if _is_zero(a) or _is_zero(b):
                        continue
                    p = a * b
                    acc = p if acc is None else acc + p
                new_row.append(acc if acc is not None else ZERO)
            out.append(tuple(new_row))
        return Matrix._raw(tuple(out))

    def transpose(self) -> "Matrix":
        return Matrix._raw(tuple(zip(*self.entries)))

    @property
    def T(self):
        return self.transpose()

    def conj_transpose(self) -> "Matrix":
        return self.transpose().map(lambda x: x.conjugate())

    def is_zero(self) -> bool:
        return all(_is_zero(x) for row in self.entries for x in row)

    def __pow__(self, n: int):
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        out = identity(self.rows)
        for _ in range(n):
            out = out @ self
        return out

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return all(_entry_eq(a, b) for r1, r2 in zip(self.entries, other.entries)
                   for a, b in zip(r1, r2))

    def __hash__(self):
        return hash(self.entries)

    def trace(self):
        acc = ZERO
        for k in range(min(self.rows, self.cols)):
            acc = acc + self.entries[k][k]
        return acc

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in row) for row in self.entries)
        return f"Matrix[{body}]"

    def to_json(self):
        return [[_entry_json(x) for x in row] for row in self.entries]


MatrixCR = Matrix
MatrixLF = Matrix


def _coerce_entry(x):
    if isinstance(x, (CR, VPoly, LinForm)):
        return x
    return CR.coerce(x)


def _is_zero(x) -> bool:
    if isinstance(x, CR):
        return not x.re and not x.im
    return not x


def _entry_eq(a, b) -> bool:
    if isinstance(a, CR) and isinstance(b, CR):
        return a == b
    return LinForm.coerce(a) == LinForm.coerce(b)


def _entry_json(x):
    if isinstance(x, CR):
        return x.to_json()
    if isinstance(x, VPoly) and x.is_constant():
        return x.constant_term().to_json()
    raise TypeError("only concrete matrices serialize to JSON")


def matrix_to_json(m: Matrix):
    return m.to_json()


def matrix_from_json(data) -> Matrix:
    return Matrix([[CR.from_json(x) for x in row] for row in data])


def identity(n: int) -> Matrix:
    return Matrix._raw(tuple(tuple(ONE if r == c else ZERO for c in range(n))
                             for r in range(n)))


def zeros(rows: int, cols: int | None = None) -> Matrix:
    cols = rows if cols is None else cols
    return Matrix._raw(tuple(tuple(ZERO for _ in range(cols)) for _ in range(rows)))


def block(blocks: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a block matrix from a grid of equally sized blocks."""
    out = []
    for brow in blocks:
        height = brow[0].rows
        for r in range(height):
            row = []
            for b in brow:
                row.extend(b.entries[r])
            out.append(tuple(row))
    return Matrix._raw(tuple(out))


def commutator(a: Matrix, b: Matrix) -> Matrix:
    if a.rows != a.cols or b.rows != b.cols:
        raise ValueError("commutator needs square matrices")
    return a @ b - b @ a


def anticommutator(a: Matrix, b: Matrix) -> Matrix:
    if a.rows != a.cols or b.rows != b.cols:
        raise ValueError("anticommutator needs square matrices")
    return a @ b + b @ a


_PAULI = {
    1: ((0, 1), (1, 0)),
    2: ((0, CR(0, -1)), (CR(0, 1), 0)),
    3: ((1, 0), (0, -1)),
}


def pauli(j: int) -> Matrix:
    """Pauli matrix sigma_j, j in {1, 2, 3}."""
    if j not in _PAULI:
        raise ValueError(f"Pauli index must be 1, 2 or 3, got {j!r}")
    return Matrix(_PAULI[j])


# ---------------------------------------------------------------------------
# homogeneous linear systems


class ConstraintSystem:
    """Homogeneous linear equations ``sum_u row[u] * u = 0`` over CR."""

    def __init__(self, unknowns: Sequence[str], rows: Iterable[Mapping[str, object]] = ()):
        self.unknowns = list(unknowns)
        self._index = {u: k for k, u in enumerate(self.unknowns)}
        if len(self._index) != len(self.unknowns):
            raise ValueError("duplicate unknown ids")
        self.rows: List[Dict[str, CR]] = []
        for row in rows:
            self.add_row(row)

    def add_row(self, row: Mapping[str, object]) -> None:
        clean = {}
        for u, c in row.items():
            if u not in self._index:
                raise KeyError(f"unknown id {u!r} not declared")
            c = CR.coerce(c)
            if c:
                clean[u] = c
        if clean:
            self.rows.append(clean)

    def extend(self, rows: Iterable[Mapping[str, object]]) -> None:
        for row in rows:
            self.add_row(row)

    def satisfied_by(self, assignment: Mapping[str, CR]) -> bool:
        for row in self.rows:
            acc = ZERO
            for u, c in row.items():
                val = assignment.get(u)
                if val is not None:
                    acc = acc + c * val
            if acc:
                return False
        return True

    def __len__(self):
        return len(self.rows)


def rref(ncols: int, rows: Iterable[Mapping[int, CR]]) -> Dict[int, Dict[int, CR]]:
    """Reduced row echelon form of sparse rows, keyed by pivot column.

    Rows arrive one at a time and are reduced against the current basis.
    The result is the unique RREF of the row space, so it does not depend
    on the order in which the rows were supplied.
    """
    basis: Dict[int, Dict[int, CR]] = {}
    for raw in rows:
        row = {k: v for k, v in raw.items() if v}
        # basis rows vanish on each other's pivots, so one pass suffices
        for col in [c for c in row if c in basis]:
            f = row.get(col)
            if f is None:
                continue
            for k, v in basis[col].items():
                s = row.get(k, ZERO) - f * v
                if s:
                    row[k] = s
                else:
                    row.pop(k, None)
        if not row:
            continue
        piv = min(row)
        inv = row[piv].inverse()
        row = {k: v * inv for k, v in row.items()}
        # back-substitute into the existing rows
        for other in basis.values():
            f = other.get(piv)
            if f is not None:
                for k, v in row.items():
                    s = other.get(k, ZERO) - f * v
                    if s:
                        other[k] = s
                    else:
                        other.pop(k, None)
        basis[piv] = row
    return dict(sorted(basis.items()))


def nullspace(sys: ConstraintSystem) -> List[Dict[str, CR]]:
    """Exact nullspace basis of a homogeneous system.

    One basis vector per free (non-pivot) column, with that unknown set to
    one; pivots are the leftmost nonzero column of each reduced row.
    """
    idx = sys._index
    echelon = rref(len(sys.unknowns),
                   ({idx[u]: c for u, c in row.items()} for row in sys.rows))
    pivots = set(echelon)
    basis = []
    for free in range(len(sys.unknowns)):
        if free in pivots:
            continue
        vec = {sys.unknowns[free]: ONE}
        for piv, row in echelon.items():
            c = row.get(free)
            if c is not None:
                vec[sys.unknowns[piv]] = -c
        basis.append(vec)
    return basis


def rank(sys: ConstraintSystem) -> int:
    idx = sys._index
    return len(rref(len(sys.unknowns),
                    ({idx[u]: c for u, c in row.items()} for row in sys.rows)))


# A prime with p = 1 (mod 4), so -1 has a square root and Q(i) maps into F_p.
MODULUS = 1_000_000_009


@lru_cache(maxsize=None)
def _sqrt_minus_one(p: int) -> int:
    if p % 4 != 1:
        raise ValueError(f"{p} has no square root of -1")
    for g in range(2, p):
        r = pow(g, (p - 1) // 4, p)
        if r * r % p == p - 1:
            return r
    raise ValueError(f"{p} has no square root of -1")


def _reduce(c: CR, p: int = MODULUS) -> int:
    """Image of ``c`` in F_p; ZeroDivisionError when a denominator vanishes."""
    out = 0
    for f, unit in ((c.re, 1), (c.im, _sqrt_minus_one(p) if c.im else 0)):
        if f:
            out += f.numerator * unit * pow(f.denominator, -1, p)
    return out % p


def rank_mod_p(sys: ConstraintSystem, p: int = MODULUS) -> int:
    """Rank of the system after reduction modulo ``p``.

    Reduction is a ring map, so a nonvanishing minor mod p was nonzero to
    begin with: the result never exceeds the exact rank.  It is a cheap
    lower bound, which is all a completeness check needs.
    """
    idx = sys._index
    basis: Dict[int, Dict[int, int]] = {}
    for raw in sys.rows:
        row = {}
        for u, c in raw.items():
            r = _reduce(c, p)
            if r:
                row[idx[u]] = r
        while row:
            piv = min(row)
            prow = basis.get(piv)
            if prow is None:
                inv = pow(row[piv], -1, p)
                basis[piv] = {k: v * inv % p for k, v in row.items()}
                break
            f = row[piv]
            for k, v in prow.items():
                s = (row.get(k, 0) - f * v) % p
                if s:
                    row[k] = s
                else:
                    row.pop(k, None)
    return len(basis)
