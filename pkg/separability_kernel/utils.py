"""
Convenience functions

One call per command, taking instance file paths.
"""

from typing import Any, Optional

from .codec import read_instance, write_atomic
from .documents import CertificateDocument, ConstructionKind, DeriveTarget, InstanceDescription
from .kernel import SeparabilityKernel


def verify_instance(path: str, mode: Optional[str] = None, tol: Optional[float] = None,
                    seed: Optional[int] = None) -> CertificateDocument:
    """
    Certify the instance stored at `path`.

    Example:
        >>> doc = verify_instance("e0.yaml")
        >>> doc.mode, doc.exit_code
        ('separability_idempotent', 0)
    """
    kernel = SeparabilityKernel(mode=mode, tol=tol, seed=seed)
    return kernel.verify(read_instance(path))


def derive_data(path: str, what: DeriveTarget | str, mode: Optional[str] = None,
                tol: Optional[float] = None, seed: Optional[int] = None) -> CertificateDocument:
    kernel = SeparabilityKernel(mode=mode, tol=tol, seed=seed)
    return kernel.derive(read_instance(path), what)


def decompose_instance(path: str, mode: Optional[str] = None, tol: Optional[float] = None,
                       seed: Optional[int] = None) -> CertificateDocument:
    kernel = SeparabilityKernel(mode=mode, tol=tol, seed=seed)
    return kernel.decompose(read_instance(path))


def construct_instance(kind: ConstructionKind | str, out: Optional[str] = None, mode: Optional[str] = None,
                       seed: Optional[int] = None, explicit: bool = False, **kwargs: Any) -> InstanceDescription:
    """Build the description of a construction; with `out` it is also written to that file."""
    kernel = SeparabilityKernel(mode=mode, seed=seed)
    desc = kernel.construct(kind, explicit=explicit, **kwargs)
    if out is not None:
        write_atomic(out, desc.to_dict())
    return desc
