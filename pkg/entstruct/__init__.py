"""entstruct - machine-learned entanglement intactness and depth classification."""

__version__ = "0.1.0"
