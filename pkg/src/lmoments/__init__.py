"""Fourth moments of Dirichlet L-functions at the central point."""

__version__ = "0.1.0"
