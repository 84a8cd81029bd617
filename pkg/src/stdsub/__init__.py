"""Standard subspaces, their modular theory and inclusion towers at desk scale."""

__version__ = "0.1.0"
