import json
from fractions import Fraction

import pytest
from hypothesis import given

from galinv.exact import CR, ZERO, Matrix, block, identity, nullspace, pauli, zeros
from galinv.engine import (
    DiffOp, GeneratorContext, SchrodingerPhase, TransformContext, UnsupportedDimension,
    build_ansatz, calibrate_boost, commutant, constraint_cascade, default_contexts,
    derive_constraints, invariant_family, levy_leblond, mixed_term_report, multi_indices,
    schrodinger, transform_operator,
)
from galinv.galilei import SpinorRep, rotation_generators
from galinv.suite import random_elements, randomized_oracle

from conftest import spinor_reps, vectors

I2, Z2 = identity(2), zeros(2)


def test_levy_leblond_matrices():
    L = levy_leblond(1)
    assert L.coefficient((1, 0, 0, 0)) == block([[Z2, Z2], [I2, Z2]])
    for j in (1, 2, 3):
        idx = [0, 0, 0, 0]
        idx[j] = 1
        s = pauli(j)
        assert L.coefficient(tuple(idx)) == block([[s, Z2], [Z2, -s]])
    assert L.coefficient((0, 0, 0, 0)) == block([[Z2, I2 * CR(0, 2)], [Z2, Z2]])


class TestDiffOp:
    def test_zero_terms_dropped(self):
        op = DiffOp(2, {(1, 0, 0, 0): zeros(2), (0, 0, 0, 0): I2})
        assert list(op.terms) == [(0, 0, 0, 0)]
        assert op.order() == 0

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            DiffOp(2, {(0, 0, 0, 0): identity(3)})
        with pytest.raises(ValueError):
            DiffOp(2, {(0, 0, 0): I2})

    def test_json_round_trip(self):
        L = levy_leblond(Fraction(3, 2))
        data = json.loads(json.dumps(L.to_json()))
        assert DiffOp.from_json(data) == L

    def test_proportional(self):
        S = schrodinger(4)
        assert S.scale(CR(0, 3)).proportional_to(S) == CR(0, 3)
        assert levy_leblond().proportional_to(S) is None

    def test_canonical_order(self):
        keys = list(levy_leblond().terms)
        assert keys[0] == (1, 0, 0, 0) and keys[-1] == (0, 0, 0, 0)

    def test_mixed_term_report(self):
        op = DiffOp(1, {(1, 1, 0, 0): identity(1), (2, 0, 0, 0): identity(1)})
        assert mixed_term_report(op) == [(1, 1, 0, 0)]
        assert mixed_term_report(levy_leblond()) == []


def test_multi_index_counts():
    assert len(multi_indices(1)) == 5
    assert len(multi_indices(2)) == 15
    assert len(multi_indices(2, forbid_mixed=True)) == 12


def test_ansatz_names():
    ansatz, names = build_ansatz(2, multi_indices(1))
    assert len(names) == 20
    assert names[0] == "B1_00" and names[-1] == "B5_11"


class TestTransform:
    def test_identity_context(self):
        L = levy_leblond()
        assert transform_operator(L, TransformContext.identity(4)) == L

    def test_levy_leblond_invariant_under_random_elements(self):
        L = levy_leblond()
        for ctx in random_elements(4, 20, seed=11):
            assert transform_operator(L, ctx) == L

    @pytest.mark.parametrize("m", [1, Fraction(5, 3)])
    def test_schrodinger_invariant_under_random_elements(self, m):
        S = schrodinger(4, m)
        for ctx in random_elements(4, 8, seed=3, phase=SchrodingerPhase(m)):
            assert transform_operator(S, ctx) == S

    def test_scalar_schrodinger_with_wrong_phase_fails(self):
        # the phase mass must match the operator's mass
        S = schrodinger(1, 1)
        ctx = random_elements(1, 1, seed=1, phase=SchrodingerPhase(2))[0]
        assert transform_operator(S, ctx) != S

    @given(vectors)
    def test_pure_boost_on_time_derivative(self, v):
        # d_t -> d_t + v.d - i m v^2/2 for a scalar field
        dt = DiffOp(1, {(1, 0, 0, 0): identity(1)})
        ctx = TransformContext.boost((zeros(1),) * 3, v)
        out = transform_operator(dt, ctx)
        v = [CR.coerce(x) for x in v]
        assert out.coefficient((1, 0, 0, 0)) == identity(1)
        for j in range(3):
            idx = [0, 0, 0, 0]
            idx[j + 1] = 1
            assert out.coefficient(tuple(idx))[0, 0] == v[j]
        v2 = sum((x * x for x in v), ZERO)
        assert out.coefficient((0, 0, 0, 0))[0, 0] == CR(0, -1) * v2 * CR(Fraction(1, 2))


@pytest.mark.parametrize("ncomp", [2, 4])
def test_generator_and_finite_rotations_agree(ncomp):
    ansatz, names = build_ansatz(ncomp, multi_indices(1))
    phase = SchrodingerPhase()
    gen = default_contexts(ncomp, None, phase, rotations=True, boosts=False)
    fin = [TransformContext.rotation(SpinorRep.axis(k, ncomp), phase) for k in (1, 2, 3)]
    a = nullspace(derive_constraints(ansatz, gen, names))
    b = nullspace(derive_constraints(ansatz, fin, names))
    assert a == b


class TestFamilies:
    def test_two_components_first_order_empty(self):
        fam = invariant_family(2, 1)
        assert fam.dimension == 0
        assert fam.raw_dimension == 1  # only the identity mass term survives

    def test_four_components_first_order(self):
        fam = invariant_family(4, 1)
        assert fam.dimension == 1
        assert fam.basis[0] == levy_leblond(1)
        assert fam.boost_scale is not None

    @pytest.mark.parametrize("m", [2, Fraction(1, 3)])
    def test_mass_dependence(self, m):
        fam = invariant_family(4, 1, phase=SchrodingerPhase(m))
        assert fam.basis == [levy_leblond(m)]

    def test_scalar_second_order(self):
        fam = invariant_family(1, 2)
        assert fam.dimension == 1
        assert fam.basis[0].proportional_to(schrodinger(1)) is not None

    def test_scalar_first_order_empty(self):
        assert invariant_family(1, 1).dimension == 0

    def test_second_order_without_mixed_terms(self):
        fam = invariant_family(4, 2, forbid_mixed=True)
        assert fam.dimension == 2
        props = [b.proportional_to(schrodinger(4)) for b in fam.basis]
        assert any(p is not None for p in props)
        assert levy_leblond() in fam.basis

    def test_unsupported_dimension(self):
        with pytest.raises(UnsupportedDimension):
            invariant_family(3, 1)
        with pytest.raises(ValueError):
            invariant_family(4, 0)

    def test_report_is_deterministic(self):
        a = json.dumps(invariant_family(4, 1).to_json())
        b = json.dumps(invariant_family(4, 1).to_json())
        assert a == b

    def test_audit(self):
        data = invariant_family(4, 1).to_json()
        audit = data["audit"]
        assert audit["unknowns"] == 80
        assert audit["nullity"] == data["raw_invariant_dimension"] == 4
        assert data["family_dimension"] == 1

    def test_raw_basis_is_sound(self):
        fam = invariant_family(4, 1)
        for op in fam.raw:
            for ctx in random_elements(4, 5, seed=7):
                assert transform_operator(op, ctx) == op

    def test_commutant_of_four_spinor(self):
        phase = SchrodingerPhase()
        ctxs = default_contexts(4, calibrate_boost(4)["generators"], phase)
        C = commutant(4, ctxs)
        assert len(C) == 2  # identity and the nilpotent lower-left block
        assert identity(4) in C


@pytest.mark.parametrize("ncomp,order,forbid", [(2, 1, False), (4, 1, False), (1, 2, False)])
def test_randomized_oracle(ncomp, order, forbid):
    rep = randomized_oracle(ncomp, order, forbid, count=20, seed=5)
    assert rep.status, rep.witness


def test_calibration():
    cal = calibrate_boost(4)
    for X in cal["generators"]:
        assert (X @ X).is_zero()
        # lower-left block (i/2) sigma
    for j, X in enumerate(cal["generators"], 1):
        expected = block([[Z2, Z2], [pauli(j) * CR(0, Fraction(1, 2)), Z2]])
        assert X == expected


def test_cascade_shapes():
    stages = constraint_cascade()
    assert [len(s["raw"]) for s in stages] == [12, 10, 6, 4]
    assert len(stages[-1]["modulo_equation_multiples"]) == 3
    assert stages[-1]["modulo_all"] == [levy_leblond()]
