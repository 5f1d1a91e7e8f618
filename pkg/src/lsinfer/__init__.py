"""Inference of D0L-systems from developmental sequences."""
from .core import (Alphabet, DevSequence, InputError, LSystem, derive_sequence, derive_step,
                   format_lsystem, growth_matrix, is_compatible, parikh, parse_lsystem,
                   parse_sequence)
from .encodings import SCHEMES, build_matrix_system, make_space
from .ga import GAConfig, fitness, hyperparameter_search, run_ga
from .genbench import GeneratorConfig, generate_lsystem, run_benchmark
from .projection import InferResult, infer, lift_constant, strip_constants
from .reduction import BoundsState, NoSolution, fixpoint, init_bounds, reduce
from .scanning import ScanError, scan_successors

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "BoundsState", "DevSequence", "GAConfig", "GeneratorConfig", "InferResult",
    "InputError", "LSystem", "NoSolution", "SCHEMES", "ScanError", "build_matrix_system",
    "derive_sequence", "derive_step", "fitness", "fixpoint", "format_lsystem", "generate_lsystem",
    "growth_matrix", "hyperparameter_search", "infer", "init_bounds", "is_compatible",
    "lift_constant", "make_space", "parikh", "parse_lsystem", "parse_sequence", "reduce",
    "run_benchmark", "run_ga", "scan_successors", "strip_constants",
]
