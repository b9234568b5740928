"""Phase-space quantization toolkit: Weyl, Moyal and Bopp calculus on uniform 1-D grids."""
from .grid import ComplexField1D, ComplexField2D, GridError, PhaseGrid, PhysConfig
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["ComplexField1D", "ComplexField2D", "GridError", "PhaseGrid", "PhysConfig", "BACKEND", "__version__"]
