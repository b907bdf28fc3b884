"""Dual-engine simulator for mediated-entanglement witness experiments.

Two engines cover the same four-qubit chain networks: a symbolic
Heisenberg-picture descriptor tracker (exact Clifford evolution plus an
effective dephasing map) and a dense density-matrix engine (exact gates,
physical channels, fractional swaps, temporal averaging).  Everything the
descriptor engine claims can be cross-checked against the dense oracle.
"""

__version__ = "0.1.0"

from . import circuits, density, detect, heisenberg, pauli  # noqa: F401
