"""felab: numerical laboratory for free energies of random Hamiltonians."""

__version__ = "0.1.0"
