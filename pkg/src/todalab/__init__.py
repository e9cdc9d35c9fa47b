"""Toda lattice laboratory: steplike simulation and leading-order asymptotics."""

from .lattice import Background, LatticeState, make_step_initial, evolve

__all__ = ["Background", "LatticeState", "make_step_initial", "evolve"]
__version__ = "0.1.0"
