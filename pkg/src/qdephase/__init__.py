"""Entanglement of two-qubit states under dephasing noise, learned from tomographic features."""

__version__ = "0.1.0"
