"""causalab: a conversational end-to-end causal analysis workbench."""

__version__ = "0.1.0"

from .graph import CausalGraph, Cycle, d_separated, descendants, find_cycles
from .tabular import Dataset, DatasetProfile, MissingPolicy, load_csv, profile

__all__ = [
    "CausalGraph",
    "Cycle",
    "Dataset",
    "DatasetProfile",
    "MissingPolicy",
    "__version__",
    "d_separated",
    "descendants",
    "find_cycles",
    "load_csv",
    "profile",
]
