"""Few-photon vortices in Rydberg-EIT media: solvers and analysis."""
from rydvortex.params import DerivedParams, PhysicalParams, derive_params

__all__ = ["PhysicalParams", "DerivedParams", "derive_params"]
__version__ = "0.1.0"
