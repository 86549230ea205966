"""Linear operator channels over finite fields.

Counting machinery, capacity and achievable-rate bounds, optimal-input
analysis for subspace coding, and two channel-training code families
(lifted rank-metric and lifted linear matrix codes) with decoders and
Monte Carlo validation.
"""

from .backend import COMPILED, backend_name
from .counting import GFCounts
from .fields import GF, ExtensionField, FieldElement, FieldSpec
from .matrix import Mat, Subspace

__version__ = "0.1.0"

__all__ = [
    "COMPILED",
    "ExtensionField",
    "FieldElement",
    "FieldSpec",
    "GF",
    "GFCounts",
    "Mat",
    "Subspace",
    "backend_name",
    "__version__",
]
