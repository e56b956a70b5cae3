"""Higher-order binary optimization: compile, contract, decompose and sample."""

from .compiler import HoboTensor, canonical_index, compile_hobo, materialize_dense
from .decomp import (SvdResult, TTTrain, svd, tt_contraction_spec, tt_decompose, tt_operands,
                     tt_reconstruct)
from .encode import ResultView, decode_ndarray, decode_value, integer_expr
from .errors import (CapabilityError, ContractViolation, DecodeError, DeclarationError,
                     DimensionError, DomainError, HoboError, NumericError, ParseError,
                     PathError, ResourceError, SourceLocation, SpecError, StructureError,
                     UnsupportedOperationError)
from .expr import BinaryVar, Polynomial, Registry, VarArray, combine, degree, evaluate, var_array
from .parse import ProblemSpec, parse_problem, parse_term_list, to_term_list
from .path import ContractionPath, CostReport, flop_cost, naive_report, optimize_path
from .sampler import Sample, SampleSet, Schedule, aggregate, grad_run, multilinear_grad, sa_run
from .tensor import EinsumSpec, contract, energy_batch, hobo_spec

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
