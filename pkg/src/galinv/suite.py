"""End-to-end checks of the main results, each returning a :class:`Report`."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Dict, List, Sequence

from .calculus import Report, invariance_of_power, op_power, schrodinger_equivalent
from .coupling import derivation_report
from .engine import (
    DiffOp, SchrodingerPhase, TransformContext, build_ansatz, calibrate_boost,
    constraint_cascade, derive_constraints, invariant_family, invariant_space,
    levy_leblond, mixed_term_report, multi_indices, schrodinger, transform_operator,
)
from .exact import CR, ConstraintSystem, identity, nullspace, rank, rank_mod_p
from .galilei import (
    GeneratorError, SpinorRep, check_rotation_generators, rotation_generators, solve_boost_generators,
    symbolic_velocity,
)

__all__ = [
    "InternalInconsistency", "random_elements", "cascade_parameters", "check_prop1",
    "check_prop2", "check_cascade", "check_square", "check_powers", "check_prop4",
    "check_coupling", "randomized_oracle", "run_suite", "SUITE",
]


class InternalInconsistency(RuntimeError):
    """A self-check of the machinery failed (not a mismatch with a claimed result)."""


def _ensure_generators():
    for n in (2, 4):
        try:
            check_rotation_generators(rotation_generators(n))
        except GeneratorError as exc:
            raise InternalInconsistency(f"rotation generators for N={n}: {exc}") from exc


def random_elements(ncomp: int, count: int, seed: int = 0, boost_gens=None,
                    phase: SchrodingerPhase | None = None) -> List[TransformContext]:
    """Concrete group elements with rational rotations and velocities."""
    rng = random.Random(seed)
    phase = phase or SchrodingerPhase()
    if boost_gens is None:
        boost_gens = calibrate_boost(ncomp, phase)["generators"]
    out = []
    while len(out) < count:
        q = [rng.randint(-3, 3) for _ in range(4)]
        if not any(q):
            continue
        rep = SpinorRep.from_quaternion(*q, ncomp=max(ncomp, 2))
        R = rep.rotation()
        v = tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(3))
        if ncomp == 1:
            S = Sinv = identity(1)
        else:
            S, Sinv = rep.V, rep.inverse_matrix()
        out.append(TransformContext.element(R, v, S, Sinv, boost_gens, phase))
    return out


def randomized_oracle(ncomp: int, order: int, forbid_mixed: bool = False, count: int = 20,
                      seed: int = 0, m=1) -> Report:
    """Compare the symbolic invariant space with one cut out by concrete elements.

    Soundness: every symbolic invariant is unchanged by each concrete element.
    Completeness: the concrete elements leave no further solutions.
    """
    phase = SchrodingerPhase(m)
    ansatz, names, raw, _ = invariant_space(ncomp, order, forbid_mixed, phase)
    ctxs = random_elements(ncomp, count, seed, phase=phase)
    sound = all(transform_operator(op, c) == op for op in raw for c in ctxs)
    # rows only ever shrink the solution space, and soundness bounds it from
    # below, so elements can stop being added once the two dimensions meet.
    # The modular rank is a lower bound on the exact one, so reaching the
    # symbolic dimension with it settles completeness; otherwise the exact
    # rank decides.
    sys = ConstraintSystem(names)
    used = 0
    concrete_dim = len(names)
    method = "mod p"
    for ctx in ctxs:
        sys.extend(derive_constraints(ansatz, [ctx], names).rows)
        used += 1
        try:
            concrete_dim = len(names) - rank_mod_p(sys)
        except ZeroDivisionError:
            concrete_dim = len(names)
        if concrete_dim <= len(raw):
            break
    if concrete_dim > len(raw):
        method = "exact"
        concrete_dim = len(names) - rank(sys)
    return Report(
        claim=f"randomized oracle ({count} elements) agrees with the symbolic search",
        status=sound and concrete_dim == len(raw),
        witness={"symbolic_dimension": len(raw), "concrete_dimension": concrete_dim,
                 "sound": sound, "elements": count, "elements_for_completeness": used,
                 "rank_method": method,
                 "seed": seed},
    )


def check_prop1() -> Report:
    sol = solve_boost_generators(rotation_generators(2))
    fam = invariant_family(2, 1)
    return Report(
        claim="no 2-component boost generators and no first-order 2-spinor equation",
        status=sol.only_zero and fam.dimension == 0,
        witness={"boost_only_zero": sol.only_zero, "boost_linear_dimension": len(sol.linear_basis),
                 "family_dimension": fam.dimension},
    )


def check_prop2(m=1) -> Report:
    fam = invariant_family(4, 1, phase=SchrodingerPhase(m))
    L = levy_leblond(m)
    exact = fam.dimension == 1 and fam.basis[0] == L
    return Report(
        claim="the first-order 4-spinor family is one-dimensional and equals the Levy-Leblond operator",
        status=exact,
        witness={"family_dimension": fam.dimension, "equals_levy_leblond": exact,
                 "basis": [b.to_json() for b in fam.basis]},
    )


def cascade_parameters(op: DiffOp) -> Dict[str, CR]:
    """Block parameters of a rotation-invariant first-order 4x4 operator.

    d_t coefficient ``[[p, q], [s, t]] (x) I``, d_1 coefficient
    ``[[e, f], [g, h]] (x) sigma_1`` and constant ``[[a, b], [c, d]] (x) I``.
    """
    B1 = op.coefficient((1, 0, 0, 0))
    B2 = op.coefficient((0, 1, 0, 0))
    B3 = op.coefficient((0, 0, 0, 0))
    return {
        "p": B1[0, 0], "q": B1[0, 2], "s": B1[2, 0], "t": B1[2, 2],
        "e": B2[0, 1], "f": B2[0, 3], "g": B2[2, 1], "h": B2[2, 3],
        "a": B3[0, 0], "b": B3[0, 2], "c": B3[2, 0], "d": B3[2, 2],
    }


def check_cascade(m=1) -> Report:
    """Replay the first-order derivation stage by stage."""
    m = Fraction(m)
    stages = constraint_cascade(SchrodingerPhase(m))
    two_im = CR(0, 2 * m)

    def holds(ops, cond: Callable[[Dict[str, CR]], bool]) -> bool:
        return all(cond(cascade_parameters(op)) for op in ops)

    rot, dt, dj, const = stages
    checks = {
        "rotations: 12 parameters": len(rot["raw"]) == 12,
        "d_t rows: q = 0, t = p": holds(dt["raw"], lambda P: P["q"] == 0 and P["t"] == P["p"])
        and len(dt["raw"]) == 10,
        "d_j rows: e = -h = s, f = 0": holds(dj["raw"], lambda P: P["e"] == -P["h"] == P["s"]
                                             and P["f"] == 0) and len(dj["raw"]) == 6,
        "p = 0": holds(dj["raw"], lambda P: P["p"] == 0),
        "constant rows: b = 2ims": holds(const["raw"], lambda P: P["b"] == two_im * P["s"]),
        "modulo equation multiples: a = d, g = 0, free (s, a, c)":
            holds(const["modulo_equation_multiples"], lambda P: P["a"] == P["d"] and P["g"] == 0)
            and len(const["modulo_equation_multiples"]) == 3,
        "modulo derivative-free invariants: a = 0, c = 0":
            holds(const["modulo_all"], lambda P: P["a"] == 0 and P["c"] == 0)
            and len(const["modulo_all"]) == 1 and const["modulo_all"][0] == levy_leblond(m),
    }
    return Report(
        claim="staged first-order derivation reproduces each intermediate shape",
        status=all(checks.values()),
        witness={"checks": checks,
                 "raw_dimensions": [len(s["raw"]) for s in stages],
                 "reduced_dimensions": [len(s["modulo_all"]) for s in stages]},
    )


def _blocks_offdiag_zero(P: DiffOp) -> bool:
    for M in P.terms.values():
        for r in range(4):
            for c in range(4):
                if (r < 2) != (c < 2) and M[r, c]:
                    return False
    return True


def check_square(m=1) -> Report:
    L = levy_leblond(m)
    P = op_power(L, 2)
    c = schrodinger_equivalent(P, m)
    return Report(
        claim="L^2 equals the Schrodinger operator times the identity (projectively)",
        status=c is not None and _blocks_offdiag_zero(P),
        witness={"factor": None if c is None else c.to_json(),
                 "off_diagonal_blocks_zero": _blocks_offdiag_zero(P),
                 "L2": P.to_json()},
    )


def check_powers(max_power: int = 5, m=1) -> Report:
    phase = SchrodingerPhase(m)
    gens = calibrate_boost(4, phase)["generators"]
    ctx = TransformContext.boost(gens, symbolic_velocity(), phase, "symbolic boost")
    L = levy_leblond(m)
    results = {N: invariance_of_power(L, N, ctx) for N in range(1, max_power + 1)}
    return Report(
        claim=f"L^N is invariant under a symbolic boost for N = 1..{max_power}",
        status=all(results.values()),
        witness={str(N): r.status for N, r in results.items()},
    )


def _in_span(target: DiffOp, basis: Sequence[DiffOp]) -> bool:
    keys = sorted({(idx, r, c) for op in list(basis) + [target] for idx, M in op.terms.items()
                   for r in range(M.rows) for c in range(M.cols)})
    names = [f"x{i}" for i in range(len(basis))] + ["y"]
    rows = []
    for idx, r, c in keys:
        row = {names[i]: b.coefficient(idx)[r, c] for i, b in enumerate(basis)}
        row["y"] = -target.coefficient(idx)[r, c]
        rows.append(row)
    sys = ConstraintSystem(names, rows)
    return any(v.get("y") for v in nullspace(sys))


def check_prop4(max_order: int = 4, m=1, oracle_elements: int = 20) -> Report:
    L = levy_leblond(m)
    S = schrodinger(4, m)
    mixed = {N: bool(mixed_term_report(op_power(L, N))) for N in (1, 2, 3, 4, 5)}
    fams = {}
    for order in range(2, max_order + 1):
        fam = invariant_family(4, order, True, SchrodingerPhase(m))
        fams[order] = {
            "dimension": fam.dimension,
            "contains_levy_leblond": _in_span(L, fam.basis),
            "contains_schrodinger": _in_span(S, fam.basis),
        }
    oracle = randomized_oracle(4, 2, True, oracle_elements, m=m)
    ok = (not mixed[1] and not mixed[2] and mixed[3] and mixed[4] and mixed[5]
          and all(f["dimension"] == 2 and f["contains_levy_leblond"] and f["contains_schrodinger"]
                  for f in fams.values())
          and oracle.status)
    return Report(
        claim="higher orders without mixed derivatives add nothing beyond L and the Schrodinger operator",
        status=ok,
        witness={"mixed_terms_by_power": {str(k): v for k, v in mixed.items()},
                 "families": {str(k): v for k, v in fams.items()},
                 "oracle": oracle.to_json()},
    )


def check_coupling(m=1) -> Report:
    rep = derivation_report(levy_leblond(m), m)
    return Report(
        claim="eliminating the lower pair of the coupled equation gives the Pauli-Schrodinger form",
        status=rep["matches_closed_form"] and rep["free_limit_matches"],
        witness={"matches_closed_form": rep["matches_closed_form"],
                 "free_limit_matches": rep["free_limit_matches"]},
    )


SUITE = {
    "prop1": check_prop1,
    "prop2": check_prop2,
    "cascade": check_cascade,
    "square": check_square,
    "powers": check_powers,
    "prop4": check_prop4,
    "coupling": check_coupling,
}


def run_suite(m=1) -> Dict[str, Report]:
    _ensure_generators()
    out = {}
    for name, fn in SUITE.items():
        out[name] = fn() if name == "prop1" else fn(m=m)
    return out
