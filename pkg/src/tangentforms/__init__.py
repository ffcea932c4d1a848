"""Tangent forms on R x TM: Euler-Lagrange equations, Ostrogradski reduction and Hamiltonian flows."""

from .dynamics import Trajectory, integrate, project_and_compare, residual_along
from .errors import (
    DomainError,
    ExprError,
    InversionError,
    NonDegeneracyError,
    NumericError,
    ParseError,
    PreconditionError,
    RegularityError,
    SamplingError,
    TangentFormError,
    UnknownIdentifierError,
    VariableRangeError,
)
from .expr import eval_jet, free_vars, parse
from .form import Curve, JetPoint, TangentForm, action, classify, equivalence_check, lagrangian, pointed_decompose
from .jet import Jet2, VarSet, fd_check, seed
from .registry import builtin, builtin_names
from .variational import el_residual, el_split, lagrange_top_derivative, ostrogradski, third_order_semispray

__all__ = [
    "Curve", "DomainError", "ExprError", "InversionError", "Jet2", "JetPoint", "NonDegeneracyError",
    "NumericError", "ParseError", "PreconditionError", "RegularityError", "SamplingError", "TangentForm",
    "TangentFormError", "Trajectory", "UnknownIdentifierError", "VarSet", "VariableRangeError", "action",
    "builtin", "builtin_names", "classify", "el_residual", "el_split", "equivalence_check", "eval_jet",
    "fd_check", "free_vars", "integrate", "lagrange_top_derivative", "lagrangian", "ostrogradski", "parse",
    "pointed_decompose", "project_and_compare", "residual_along", "seed", "third_order_semispray",
]
