"""Graph-based PEPS simulation of kicked-Ising Trotter circuits on
heavy-hexagon qubit lattices."""

__version__ = "0.1.0"
ENGINE_VERSION = f"gpeps-{__version__}"
