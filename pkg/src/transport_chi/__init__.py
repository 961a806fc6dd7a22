"""One-dimensional optimal transport, chi-square and entropy divergences,
Muckenhoupt constants, and numerical checks of transport/Poincaré-type
inequalities."""

__version__ = "0.1.0"
