from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from galinv.exact import CR, ONE, ZERO, Matrix, VPoly, commutator, identity, pauli, zeros
from galinv.galilei import (
    GalileiElement, GeneratorError, GeneratorSet, SpinorRep, boost_matrix, compose,
    inverse, levi_civita, rotation_generators, solve_boost_generators,
    spinor_for_rotation, symbolic_velocity,
)

from conftest import galilei_elements, quaternions, rationals, spinor_reps, vectors


class TestGroup:
    @given(galilei_elements(), galilei_elements(), galilei_elements())
    def test_associative(self, g1, g2, g3):
        assert compose(compose(g3, g2), g1) == compose(g3, compose(g2, g1))

    @given(galilei_elements())
    def test_identity_and_inverse(self, g):
        e = GalileiElement.identity()
        assert compose(e, g) == g and compose(g, e) == g
        assert compose(inverse(g), g) == e
        assert compose(g, inverse(g)) == e

    @given(vectors, vectors)
    def test_boosts_commute(self, v1, v2):
        b1, b2 = GalileiElement.boost(v1), GalileiElement.boost(v2)
        assert compose(b1, b2) == compose(b2, b1)
        assert compose(b1, b2).v == tuple(CR.coerce(x) + CR.coerce(y) for x, y in zip(v1, v2))

    def test_pure_boost_inverse(self):
        g = GalileiElement(v=(1, 2, 3))
        assert inverse(g).v == (CR(-1), CR(-2), CR(-3))

    def test_translation_term(self):
        # a boost after a time translation shifts the position by -v b
        g1 = GalileiElement(b=2)
        g2 = GalileiElement(v=(1, 0, 0))
        assert compose(g2, g1).a == (CR(-2), ZERO, ZERO)

    def test_rejects_non_rotation(self):
        with pytest.raises(ValueError):
            GalileiElement(R=Matrix([[1, 0, 0], [0, 1, 0], [0, 0, -1]]))
        with pytest.raises(ValueError):
            GalileiElement(R=Matrix([[2, 0, 0], [0, 1, 0], [0, 0, 1]]))

    def test_levi_civita(self):
        assert levi_civita(0, 1, 2) == 1
        assert levi_civita(1, 0, 2) == -1
        assert levi_civita(0, 0, 2) == 0


class TestSpinorRep:
    @given(spinor_reps())
    def test_rotation_is_orthogonal(self, rep):
        R = rep.rotation()
        assert R.T @ R == identity(3)
        GalileiElement(R=R)  # validates det = 1

    @given(spinor_reps())
    def test_adjoint_action(self, rep):
        # V sigma_j V^-1 = R_ij sigma_i
        R = rep.rotation()
        for j in (1, 2, 3):
            lhs = rep.conjugate(pauli(j))
            rhs = zeros(2)
            for i in (1, 2, 3):
                rhs = rhs + pauli(i) * R[i - 1, j - 1]
            assert lhs == rhs

    @given(spinor_reps(), spinor_reps())
    def test_homomorphism(self, a, b):
        prod = SpinorRep(a.V @ b.V, a.norm2 * b.norm2)
        assert prod.rotation() == a.rotation() @ b.rotation()

    @given(quaternions())
    def test_recover_spinor_from_rotation(self, q):
        R = SpinorRep.from_quaternion(*q).rotation()
        rep = spinor_for_rotation(R)
        assert rep.rotation() == R

    def test_four_component_is_block_diagonal(self):
        rep = SpinorRep.axis(3, 4)
        assert rep.V[0, 2] == ZERO and rep.V[2, 2] == rep.V[0, 0]

    def test_invalid_representative(self):
        with pytest.raises(ValueError):
            SpinorRep(Matrix([[1, 1], [0, 1]]), 1)


class TestGenerators:
    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_rotation_algebra(self, n):
        Xr = rotation_generators(n)
        gs = GeneratorSet(Xr, (zeros(n),) * 3)
        assert gs.is_valid()

    def test_bad_rotation_generators(self):
        with pytest.raises(GeneratorError):
            solve_boost_generators((pauli(1), pauli(2), pauli(3)))

    def test_two_components_only_zero(self):
        sol = solve_boost_generators(rotation_generators(2))
        assert len(sol.linear_basis) == 1
        assert sol.noncommuting and not sol.commuting
        assert sol.only_zero
        # the linear solution is proportional to sigma itself, which does not commute
        X = sol.linear_basis[0]
        assert not commutator(X[0], X[1]).is_zero()

    def test_one_component_trivial(self):
        sol = solve_boost_generators(rotation_generators(1))
        assert sol.only_zero

    def test_four_components_have_nilpotent_boosts(self):
        sol = solve_boost_generators(rotation_generators(4))
        assert len(sol.linear_basis) == 4
        assert len(sol.commuting) == 2
        for gs in sol.generator_sets():
            assert gs.is_valid()
            for X in gs.boost:
                assert (X @ X).is_zero()

    def test_boost_matrix_is_exact_exponential(self, boost_gens4):
        v = symbolic_velocity()
        B = boost_matrix(boost_gens4, v)
        Binv = boost_matrix(boost_gens4, tuple(-x for x in v))
        assert B @ Binv == identity(4).map(VPoly.coerce)

    @given(vectors, vectors)
    def test_boost_matrices_compose(self, boost_gens4, v1, v2):
        B = lambda v: boost_matrix(boost_gens4, v)
        total = tuple(CR.coerce(a) + CR.coerce(b) for a, b in zip(v1, v2))
        assert B(v1) @ B(v2) == B(total)

    def test_non_nilpotent_rejected(self):
        with pytest.raises(ValueError):
            boost_matrix((identity(2),) * 3, (1, 0, 0))

    @given(spinor_reps(4), vectors)
    def test_rotation_covariance_of_boosts(self, boost_gens4, rep, v):
        # S_R B(w) S_R^-1 = B(R w)
        R = rep.rotation()
        w = tuple(CR.coerce(x) for x in v)
        Rw = tuple(sum((R[i, j] * w[j] for j in range(3)), ZERO) for i in range(3))
        lhs = rep.V.map(VPoly.coerce) @ boost_matrix(boost_gens4, w) @ rep.inverse_matrix().map(VPoly.coerce)
        assert lhs == boost_matrix(boost_gens4, Rw)
