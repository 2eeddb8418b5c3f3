"""
Separability Kernel - verification and derivation of separability idempotents

Checks whether an element E of B (x) C over finite-dimensional complex algebras
is a separability idempotent, derives its antipodal maps, integrals, modular
automorphisms and reduced duals, and decomposes block-diagonal elements over
multi-matrix algebras into twisted matrix blocks.
"""

from .documents import CertificateDocument, ConstructionKind, DeriveTarget, InstanceDescription
from .kernel import SeparabilityKernel
from .utils import construct_instance, decompose_instance, derive_data, verify_instance

__version__ = "0.1.0"
__license__ = "Apache-2.0"

__all__ = [
    "SeparabilityKernel",
    "InstanceDescription",
    "CertificateDocument",
    "ConstructionKind",
    "DeriveTarget",
    "verify_instance",
    "derive_data",
    "decompose_instance",
    "construct_instance",
]
