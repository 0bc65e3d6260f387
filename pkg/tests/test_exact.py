from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from galinv.exact import (
    CR, I_UNIT, ONE, ZERO, ConstraintSystem, LinForm, Matrix, VPoly, anticommutator,
    collect_v, commutator, identity, matrix_from_json, nullspace, parse_rational, pauli,
    rank, rank_mod_p, reassemble, zeros,
)

from conftest import crs, matrices, nonzero_crs, rationals, vpolys


class TestComplexRational:
    @given(crs, crs, crs)
    def test_field_axioms(self, a, b, c):
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + ZERO == a and a * ONE == a
        assert a - a == ZERO

    @given(nonzero_crs)
    def test_inverse(self, a):
        assert a * a.inverse() == ONE
        assert a / a == ONE

    def test_division_by_zero_raises(self):
        with pytest.raises(ZeroDivisionError):
            ONE / ZERO
        with pytest.raises(ZeroDivisionError):
            ZERO.inverse()

    def test_i_squared(self):
        assert I_UNIT * I_UNIT == CR(-1)

    @given(crs)
    def test_conjugate_and_norm(self, a):
        assert a * a.conjugate() == CR(a.norm2())

    @given(crs)
    def test_json_round_trip(self, a):
        assert CR.from_json(a.to_json()) == a

    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            CR.coerce(0.5)
        with pytest.raises(TypeError):
            CR.coerce(1j)

    def test_str(self):
        assert str(CR(0, Fraction(-1, 2))) == "-i/2"
        assert str(CR(1, 2)) == "1+2i"
        assert str(CR(Fraction(3, 4))) == "3/4"

    def test_parse_rational(self):
        assert parse_rational("3/5") == Fraction(3, 5)
        assert parse_rational(" -2 ") == -2
        assert parse_rational(Fraction(1, 3)) == Fraction(1, 3)
        with pytest.raises(ValueError):
            parse_rational("abc")


class TestVPoly:
    @given(vpolys(), vpolys(), vpolys())
    def test_ring(self, p, q, r):
        assert p + q == q + p
        assert p * q == q * p
        assert (p * q) * r == p * (q * r)
        assert p * (q + r) == p * q + p * r
        assert (p - p).is_zero()

    @given(vpolys(), vpolys(), st.tuples(rationals, rationals, rationals))
    def test_evaluation_is_a_homomorphism(self, p, q, vals):
        assert (p * q).evaluate(vals) == p.evaluate(vals) * q.evaluate(vals)
        assert (p + q).evaluate(vals) == p.evaluate(vals) + q.evaluate(vals)

    def test_trailing_zeros_stripped(self):
        assert VPoly({(1, 0, 0): 1}) == VPoly.var(0)
        assert VPoly({(0, 0, 0): 3}) == VPoly.const(3)
        assert VPoly.var(2).terms == {(0, 0, 1): ONE}

    def test_extra_variables(self):
        p = VPoly.var(4) * VPoly.var(0)
        assert p.degree() == 2
        assert p.evaluate([2, 0, 0, 0, 3]) == CR(6)

    def test_partial_evaluation_raises(self):
        with pytest.raises(ValueError):
            VPoly.var(1).evaluate([1, VPoly.var(0), 0])


class TestLinForm:
    @given(st.lists(vpolys(), min_size=3, max_size=3), vpolys())
    def test_collect_round_trip(self, coeffs, const):
        lf = LinForm({f"u{k}": c for k, c in enumerate(coeffs)}, const)
        parts = collect_v(lf)
        for piece in parts.values():
            assert all(c.is_constant() for c in piece.coeffs.values())
            assert piece.constant.is_constant()
        assert reassemble(parts) == lf

    def test_product_of_forms_rejected(self):
        with pytest.raises(TypeError):
            LinForm.unknown("a") * LinForm.unknown("b")

    def test_substitute(self):
        lf = LinForm.unknown("a") * VPoly.var(0) + 3
        assert lf.substitute({"a": 2}) == VPoly.var(0) * 2 + 3
        assert lf.substitute({}) == VPoly.const(3)


class TestMatrix:
    @given(matrices(), matrices(), matrices())
    def test_product_associative(self, a, b, c):
        assert (a @ b) @ c == a @ (b @ c)

    @given(matrices(2, 3), matrices(3, 2))
    def test_transpose_of_product(self, a, b):
        assert (a @ b).T == b.T @ a.T

    @given(matrices())
    def test_conj_transpose_involution(self, a):
        assert a.conj_transpose().conj_transpose() == a

    def test_shape_errors(self):
        with pytest.raises(ValueError):
            zeros(2, 3) @ zeros(2, 3)
        with pytest.raises(ValueError):
            commutator(zeros(2, 3), zeros(3, 2))
        with pytest.raises(ValueError):
            anticommutator(zeros(2, 3), zeros(2, 3))
        with pytest.raises(ValueError):
            Matrix([[1, 2], [3]])

    @given(matrices())
    def test_json_round_trip(self, a):
        assert matrix_from_json(a.to_json()) == a

    def test_power(self):
        s = pauli(1)
        assert s ** 2 == identity(2)
        assert s ** 0 == identity(2)


class TestPauli:
    @pytest.mark.parametrize("j", [1, 2, 3])
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_product_rule(self, j, k):
        # sigma_j sigma_k = delta_jk I + i eps_jkl sigma_l
        expected = identity(2) if j == k else zeros(2)
        for l in (1, 2, 3):
            eps = (j - k) * (k - l) * (l - j) // 2
            if eps:
                expected = expected + pauli(l) * CR(0, eps)
        assert pauli(j) @ pauli(k) == expected

    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_hermitian_traceless(self, j):
        s = pauli(j)
        assert s.conj_transpose() == s
        assert s.trace() == ZERO

    @pytest.mark.parametrize("j", [1, 2, 3])
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_anticommutator(self, j, k):
        assert anticommutator(pauli(j), pauli(k)) == identity(2) * CR(2 if j == k else 0)

    @pytest.mark.parametrize("bad", [0, 4, -1])
    def test_index_range(self, bad):
        with pytest.raises(ValueError):
            pauli(bad)


@st.composite
def systems(draw):
    n = draw(st.integers(1, 6))
    names = [f"x{k}" for k in range(n)]
    rows = []
    for _ in range(draw(st.integers(0, 6))):
        cols = draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=3, unique=True))
        rows.append({names[c]: draw(crs) for c in cols})
    return names, rows


class TestNullspace:
    @given(systems())
    def test_soundness_and_dimension(self, sysdata):
        names, rows = sysdata
        sys = ConstraintSystem(names, rows)
        basis = nullspace(sys)
        assert len(basis) == len(names) - rank(sys)
        for vec in basis:
            assert sys.satisfied_by(vec)

    @given(systems(), st.randoms())
    def test_independent_of_row_order(self, sysdata, rnd):
        names, rows = sysdata
        shuffled = list(rows)
        rnd.shuffle(shuffled)
        assert nullspace(ConstraintSystem(names, rows)) == nullspace(ConstraintSystem(names, shuffled))

    @given(systems())
    def test_basis_independent(self, sysdata):
        # each basis vector owns a free unknown set to one that the others leave at zero
        names, rows = sysdata
        basis = nullspace(ConstraintSystem(names, rows))
        frees = []
        for vec in basis:
            free = [u for u, c in vec.items() if c == ONE and all(u not in o for o in basis if o is not vec)]
            assert free
            frees.append(free[0])
        assert len(set(frees)) == len(basis)

    def test_undeclared_unknown(self):
        sys = ConstraintSystem(["a"])
        with pytest.raises(KeyError):
            sys.add_row({"b": 1})

    def test_duplicate_unknowns(self):
        with pytest.raises(ValueError):
            ConstraintSystem(["a", "a"])

    def test_empty_system_is_full_space(self):
        assert len(nullspace(ConstraintSystem(["a", "b"]))) == 2

    def test_known_example(self):
        # a + b = 0, b - c = 0  ->  span{(-1, 1, 1)}
        sys = ConstraintSystem(["a", "b", "c"], [{"a": 1, "b": 1}, {"b": 1, "c": -1}])
        (vec,) = nullspace(sys)
        assert vec == {"c": ONE, "a": CR(-1), "b": ONE}


class TestModularRank:
    @given(systems())
    def test_lower_bound(self, sysdata):
        names, rows = sysdata
        sys = ConstraintSystem(names, rows)
        assert rank_mod_p(sys) <= rank(sys)

    def test_i_maps_to_a_square_root_of_minus_one(self):
        # rows (1, i) and (i, -1) are proportional over Q(i)
        sys = ConstraintSystem(["a", "b"], [{"a": 1, "b": I_UNIT}, {"a": I_UNIT, "b": -1}])
        assert rank_mod_p(sys) == rank(sys) == 1

    def test_small_prime_can_undercount(self):
        sys = ConstraintSystem(["a", "b"], [{"a": 1, "b": 1}, {"a": 1, "b": 6}])
        assert rank(sys) == 2
        assert rank_mod_p(sys, 5) == 1
        with pytest.raises(ValueError):
            rank_mod_p(ConstraintSystem(["a"], [{"a": I_UNIT}]), 7)
