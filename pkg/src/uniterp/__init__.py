"""Degree-n type spaces of intuitionistic logic, a G4ip prover, and uniform
interpolation with checkable certificates."""
from .formula import (Bottom, Conj, Disj, Formula, FormulaSyntaxError, Impl, Neg, Top,
                      Variable, impl_degree, parse, render, variables)
from .kripke import KripkeModel, ModelError, enumerate_models, forces
from .prover import countermodel, decide_semantic, proves
from .typespace import DegType, TypeSpace, build_space, distance, leq, type_of
from .interp import InterpOptions, craig, uniform_exists, uniform_forall, verify_pitts

__version__ = "0.1.0"

__all__ = [
    "Bottom", "Conj", "Disj", "Formula", "FormulaSyntaxError", "Impl", "Neg", "Top",
    "Variable", "impl_degree", "parse", "render", "variables",
    "KripkeModel", "ModelError", "enumerate_models", "forces",
    "countermodel", "decide_semantic", "proves",
    "DegType", "TypeSpace", "build_space", "distance", "leq", "type_of",
    "InterpOptions", "craig", "uniform_exists", "uniform_forall", "verify_pitts",
]
