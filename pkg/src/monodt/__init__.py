"""Alternation, monotone decision trees and negation-limited circuits."""

from .boolfn import TruthTable, alternation, is_monotone
from .decomp import MonotoneDecomposition, alternation_decomposition
from .models import MonotoneDecisionList, MonotoneDecisionTree, mdt_build, namdt_build
from .circuits import Circuit, markov_circuit, mdt_from_circuit
from .stochastic import RandomizedMDT, nmdt_build, rmdt_derandomize

__version__ = "0.1.0"
