"""Exact diagonalization of the 1/r^2 t-J chain and its spinon/holon eigenbasis."""

from anyonchain.basis import (
    CapacityError,
    ChainGeometry,
    SectorBasis,
    SectorKey,
    StateVector,
    apply_translation,
    chord_distance_squared,
    enumerate_sector,
)
from anyonchain.hamiltonian import OperatorHandle, apply_hamiltonian, build_dense
from anyonchain.states import PairLabel, Species

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ChainGeometry",
    "OperatorHandle",
    "PairLabel",
    "SectorBasis",
    "SectorKey",
    "Species",
    "StateVector",
    "apply_hamiltonian",
    "apply_translation",
    "build_dense",
    "chord_distance_squared",
    "enumerate_sector",
]
