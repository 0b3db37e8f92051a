"""Ancilla-free uniform superposition circuits and a Grover coloring testbed."""

__version__ = "0.1.0"

from .circuit import CRY, H, MCX, RY, Circuit, CircuitError, Polarity, X, inverse, two_wire_gate_count
from .prep import angle, eq5_summation, generate, predicted_two_wire_count
from .simulator import Histogram, StateVector, sample, simulate

__all__ = [
    "CRY", "H", "MCX", "RY", "X", "Circuit", "CircuitError", "Polarity",
    "inverse", "two_wire_gate_count",
    "angle", "eq5_summation", "generate", "predicted_two_wire_count",
    "Histogram", "StateVector", "sample", "simulate",
]
