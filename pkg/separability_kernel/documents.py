"""
Document types

Instance descriptions and certificate documents are kept in their textual form
(rationals as "p/q" strings, complex numbers as [re, im] pairs), so that a
document read from disk and written back is unchanged.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from strenum import StrEnum

from sepcore.errors import DocumentError

INSTANCE_KIND = "instance"
CERTIFICATE_KIND = "certificate"

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_INPUT_ERROR = 2
EXIT_NILPOTENT = 3


class DeriveTarget(StrEnum):
    INTEGRALS = "integrals"
    ANTIPODES = "antipodes"
    MODULAR = "modular"
    DUAL = "dual"


class ConstructionKind(StrEnum):
    E0 = "E0"
    TWISTED = "twisted"
    INVOLUTIVE_TWISTED = "involutive_twisted"
    DIRECT_SUM = "direct_sum"
    NONFULL = "nonfull"
    RANDOM_TWISTED = "random_twisted"
    EXPLICIT = "explicit"


def exit_code_for(mode: str) -> int:
    """Exit status of a command, which depends on the certificate mode only."""
    if mode == "separability_idempotent":
        return EXIT_OK
    if mode == "nilpotent_variant":
        return EXIT_NILPOTENT
    return EXIT_REJECTED


def _require_mapping(data: Any, location: str) -> dict:
    if not isinstance(data, dict):
        raise DocumentError(location, f"expected a mapping, got {type(data).__name__}")
    return data


def _require_kind(data: dict, expected: str) -> None:
    kind = data.get("kind", expected)
    if kind != expected:
        raise DocumentError("kind", f"expected a document of kind {expected!r}, got {kind!r}")


def _unknown_keys(data: dict, allowed: set, location: str) -> None:
    extra = sorted(set(data) - allowed)
    if extra:
        raise DocumentError(f"{location}.{extra[0]}" if location else extra[0], "unknown field")


@dataclass
class InstanceDescription:
    """An input instance: scalar mode, optional algebra specs and the element spec."""
    element: Dict[str, Any]
    mode: str = "exact"
    tolerance: Optional[float] = None
    seed: Optional[int] = None
    algebras: Dict[str, Any] = field(default_factory=dict)

    @property
    def construction(self) -> ConstructionKind:
        return ConstructionKind(self.element.get("construction", ConstructionKind.EXPLICIT))

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": INSTANCE_KIND, "mode": self.mode}
        if self.tolerance is not None:
            out["tolerance"] = self.tolerance
        if self.seed is not None:
            out["seed"] = self.seed
        if self.algebras:
            out["algebras"] = self.algebras
        out["element"] = self.element
        return out

    @classmethod
    def from_dict(cls, data: Any) -> "InstanceDescription":
        data = _require_mapping(data, "document")
        _require_kind(data, INSTANCE_KIND)
        _unknown_keys(data, {"kind", "mode", "tolerance", "seed", "algebras", "element"}, "")

        mode = str(data.get("mode", "exact")).lower()
        if mode == "float":
            mode = "float64"
        if mode not in ("exact", "float64"):
            raise DocumentError("mode", f"must be 'exact' or 'float64', got {mode!r}")

        tolerance = data.get("tolerance")
        if tolerance is not None:
            if isinstance(tolerance, bool) or not isinstance(tolerance, (int, float)) or tolerance <= 0:
                raise DocumentError("tolerance", f"must be a positive number, got {tolerance!r}")
            tolerance = float(tolerance)

        seed = data.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
            raise DocumentError("seed", f"must be an integer, got {seed!r}")

        algebras = _require_mapping(data.get("algebras", {}), "algebras")
        _unknown_keys(algebras, {"B", "C"}, "algebras")
        if "element" not in data:
            raise DocumentError("element", "missing field")
        element = _require_mapping(data["element"], "element")
        construction = element.get("construction", ConstructionKind.EXPLICIT.value)
        try:
            ConstructionKind(construction)
        except ValueError:
            raise DocumentError("element.construction", f"unknown construction {construction!r}")
        return cls(element=dict(element), mode=mode, tolerance=tolerance, seed=seed, algebras=dict(algebras))


@dataclass
class CertificateDocument:
    """Machine-readable result of one command."""
    command: str
    mode: str
    instance: Dict[str, Any]
    verdict: str = ""
    reason: str = ""
    axioms: Dict[str, str] = field(default_factory=dict)
    checks: Dict[str, Any] = field(default_factory=dict)
    derived: Dict[str, Any] = field(default_factory=dict)
    blocks: List[Dict[str, Any]] = field(default_factory=list)
    seed: int = 0
    elapsed: float = 0.0

    @property
    def exit_code(self) -> int:
        return exit_code_for(self.mode)

    def __repr__(self) -> str:
        return f"CertificateDocument(command={self.command}, mode={self.mode}, derived={sorted(self.derived)})"

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "kind": CERTIFICATE_KIND,
            "command": self.command,
            "mode": self.mode,
            "verdict": self.verdict,
            "reason": self.reason,
            "axioms": dict(self.axioms),
            "checks": dict(self.checks),
            "derived": dict(self.derived),
        }
        if self.blocks:
            out["blocks"] = list(self.blocks)
        out["seed"] = self.seed
        out["elapsed"] = self.elapsed
        out["instance"] = self.instance
        return out

    @classmethod
    def from_dict(cls, data: Any) -> "CertificateDocument":
        data = _require_mapping(data, "document")
        _require_kind(data, CERTIFICATE_KIND)
        for key in ("command", "mode", "instance"):
            if key not in data:
                raise DocumentError(key, "missing field")
        return cls(
            command=data["command"],
            mode=data["mode"],
            instance=data["instance"],
            verdict=data.get("verdict", ""),
            reason=data.get("reason", ""),
            axioms=dict(data.get("axioms", {})),
            checks=dict(data.get("checks", {})),
            derived=dict(data.get("derived", {})),
            blocks=list(data.get("blocks", [])),
            seed=int(data.get("seed", 0)),
            elapsed=float(data.get("elapsed", 0.0)),
        )
