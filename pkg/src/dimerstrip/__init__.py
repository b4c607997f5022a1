"""Integrable dimer model on a strip: free-fermion six-vertex transfer matrices,
finitized characters, Jordan censuses and the vertex-to-dimer map."""
import os

# Thread count is the only environment-controlled setting; it must be applied
# before numpy loads its BLAS.
if os.environ.get("DIMERSTRIP_THREADS"):
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, os.environ["DIMERSTRIP_THREADS"])

__version__ = "0.1.0"

from .statespace import ComplexOperator, DomainError, OccupationState, Sector, sectors  # noqa: E402
from .transfer import StripModel, double_row_transfer, normalized_transfer  # noqa: E402
from .spectra import hamiltonian, jordan_structure, match_spectrum  # noqa: E402
from .qcombi import QSeries, character_closed_form, q_binomial  # noqa: E402

__all__ = [
    "ComplexOperator", "DomainError", "OccupationState", "Sector", "sectors", "StripModel",
    "double_row_transfer", "normalized_transfer", "hamiltonian", "jordan_structure",
    "match_spectrum", "QSeries", "character_closed_form", "q_binomial", "__version__",
]
