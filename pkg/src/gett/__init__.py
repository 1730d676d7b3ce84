"""Binary tensor contraction over strided buffers, BLAS-style.

The public entry points sgett/dgett/cgett/zgett contract two strided tensor
views (one per element type, 32/64-bit real and complex), accumulating into
an output view whose rank and extents are derived from the inputs.  The
package also ships the planning layer, an independent brute-force oracle,
a randomized case generator, a text tensor-file format, and a CLI
(``gett run|verify|gen|bench|selftest``).
"""

from .kernel import cgett, contract, dgett, gett_for_dtype, sgett, zero_view, zgett
from .layout import (
    CoordCounter,
    TensorView,
    contiguous_increments,
    footprint,
    increment_coords,
    linear_offset,
    num_elements,
    view_offsets,
)
from .plan import (
    ContractionError,
    ContractionPlan,
    ContractionSpec,
    ErrorCode,
    ValidationError,
    build_plan,
    derive_output_extents,
    output_rank,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "CoordCounter",
    "TensorView",
    "ContractionError",
    "ContractionPlan",
    "ContractionSpec",
    "ErrorCode",
    "ValidationError",
    "build_plan",
    "cgett",
    "contiguous_increments",
    "contract",
    "derive_output_extents",
    "dgett",
    "footprint",
    "gett_for_dtype",
    "increment_coords",
    "linear_offset",
    "num_elements",
    "output_rank",
    "sgett",
    "validate",
    "view_offsets",
    "zero_view",
    "zgett",
]
