"""R_II recurrences, tridiagonal pencils and orthogonal polynomials on the unit circle."""
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
