"""Stabilizer-frame quantum circuit simulation."""

from .circuit import (
    Circuit,
    CircuitParseError,
    Gate,
    gen_cuccaro,
    gen_qft,
    gen_random_stabilizer,
    gen_toffoli_decomposed,
    parse,
    read,
    write,
)
from .dense import CapacityError, DenseState
from .frame import Frame
from .multiframe import Multiframe, SimulationStats, simulate
from .pauli import PauliOperator
from .tableau import StabilizerMatrix

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "Circuit",
    "CircuitParseError",
    "DenseState",
    "Frame",
    "Gate",
    "Multiframe",
    "PauliOperator",
    "SimulationStats",
    "StabilizerMatrix",
    "gen_cuccaro",
    "gen_qft",
    "gen_random_stabilizer",
    "gen_toffoli_decomposed",
    "parse",
    "read",
    "simulate",
    "write",
]
