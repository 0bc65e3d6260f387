"""Exact search for Galilean-invariant wave equations for spinor fields.

Submodules
----------
exact     complex rationals, polynomials in the boost velocity, matrices, nullspaces
galilei   the Galilei group, spinor representatives of rotations, boost generators
engine    matrix differential operators and the invariance search
calculus  operator powers, plane waves, covariance of solutions
coupling  minimal coupling and elimination of the lower spinor pair
suite     end-to-end checks of the main results
cli       the ``galinv`` command
"""
from .exact import CR, ComplexRational, Matrix, VPoly, LinForm, identity, pauli, nullspace
from .galilei import GalileiElement, SpinorRep, compose, inverse, solve_boost_generators
from .engine import (
    DiffOp, InvariantFamily, SchrodingerPhase, TransformContext, invariant_family,
    levy_leblond, schrodinger, transform_operator, mixed_term_report,
)
from .calculus import PlaneWave, op_compose, op_power, plane_wave_reduce, covariance_check
from .coupling import NCExpr, minimal_substitute, eliminate_lower, nc_normal_form

__version__ = "0.1.0"

__all__ = [
    "CR", "ComplexRational", "Matrix", "VPoly", "LinForm", "identity", "pauli", "nullspace",
    "GalileiElement", "SpinorRep", "compose", "inverse", "solve_boost_generators",
    "DiffOp", "InvariantFamily", "SchrodingerPhase", "TransformContext", "invariant_family",
    "levy_leblond", "schrodinger", "transform_operator", "mixed_term_report",
    "PlaneWave", "op_compose", "op_power", "plane_wave_reduce", "covariance_check",
    "NCExpr", "minimal_substitute", "eliminate_lower", "nc_normal_form",
]
