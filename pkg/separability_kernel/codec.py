"""
Textual format of instance and certificate documents

Documents are YAML. Rationals are written as "p/q" strings (integers may be
plain numbers), complex numbers as [re, im] pairs and matrices as nested
lists. Parse errors are reported as DocumentError with a dotted location such
as ``element.r[1][0]``.
"""

import io
import logging
import os
import tempfile
from typing import Any, Dict, List, Optional

import numpy as np
from ruamel.yaml import YAML, YAMLError

from sepcore.algebra.algebra_core import (
    Algebra,
    element_from_matrix,
    make_direct_sum,
    make_matrix_algebra,
    make_structure_constant_algebra,
)
from sepcore.algebra.scalars import ScalarBackend, get_backend
from sepcore.algebra.tensor_ops import TensorElement
from sepcore.constructions.examples import (
    make_direct_sum_E,
    make_E0,
    make_involutive_twisted,
    make_nonfull_counterexample,
    make_twisted,
)
from sepcore.constructions.random_instances import make_rng, random_twist_pair
from sepcore.errors import DocumentError, SeparabilityError

from .documents import ConstructionKind, InstanceDescription


def parse_scalar(node: Any, location: str, backend: ScalarBackend) -> Any:
    """A backend scalar from "p/q", an integer, a float or an [re, im] pair."""
    if isinstance(node, bool) or node is None:
        raise DocumentError(location, f"expected a number, got {node!r}")
    if isinstance(node, list):
        if len(node) != 2:
            raise DocumentError(location, f"complex numbers are [re, im] pairs, got {len(node)} entries")
        for i, part in enumerate(node):
            if isinstance(part, (bool, list)) or not isinstance(part, (int, float, str)):
                raise DocumentError(f"{location}[{i}]", f"expected a real number, got {part!r}")
    elif not isinstance(node, (int, float, str)):
        raise DocumentError(location, f"expected a number, got {type(node).__name__}")
    try:
        return backend.scalar(node)
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise DocumentError(location, f"cannot read {node!r} as a number: {e}")


def _read_nested(node: Any, depth: int, location: str, backend: ScalarBackend) -> Any:
    if depth == 0:
        return parse_scalar(node, location, backend)
    if not isinstance(node, list):
        raise DocumentError(location, f"expected a list nested {depth} deep")
    return [_read_nested(v, depth - 1, f"{location}[{i}]", backend) for i, v in enumerate(node)]


def _shape(nested: Any, depth: int, location: str) -> tuple:
    if depth == 0:
        return ()
    inner = {_shape(v, depth - 1, f"{location}[{i}]") for i, v in enumerate(nested)}
    if len(inner) > 1:
        raise DocumentError(location, "rows have different lengths")
    rest = inner.pop() if inner else (0,) * (depth - 1)
    return (len(nested),) + rest


def read_array(node: Any, depth: int, location: str, backend: ScalarBackend) -> np.ndarray:
    """A `depth`-dimensional backend array from nested lists of number literals."""
    nested = _read_nested(node, depth, location, backend)
    shape = _shape(nested, depth, location)
    out = backend.zeros(shape)
    for idx in np.ndindex(*shape):
        value = nested
        for k in idx:
            value = value[k]
        out[idx] = value
    return out


def write_array(arr: np.ndarray, backend: ScalarBackend) -> Any:
    if np.ndim(arr) == 0:
        return backend.export(arr[()] if isinstance(arr, np.ndarray) else arr)
    return [write_array(v, backend) for v in arr]


# YAML

def _loader() -> YAML:
    return YAML(typ="safe", pure=True)


def _dumper() -> YAML:
    yaml = YAML()
    yaml.default_flow_style = None
    yaml.width = 4096
    return yaml


def load_text(text: str, source: str = "<string>") -> Any:
    try:
        return _loader().load(text)
    except YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark is not None else source
        raise DocumentError(where, f"invalid YAML: {getattr(e, 'problem', None) or e}")


def load_document(path: str) -> Any:
    if not os.path.exists(path):
        raise DocumentError(path, "file does not exist")
    with open(path, "r", encoding="utf-8") as f:
        return load_text(f.read(), path)


def dump_text(data: Dict[str, Any]) -> str:
    stream = io.StringIO()
    _dumper().dump(data, stream)
    return stream.getvalue()


def write_atomic(path: str, data: Dict[str, Any]) -> None:
    """Write the document to a temporary file next to `path`, then rename it into place."""
    text = dump_text(data)
    directory = os.path.dirname(os.path.abspath(path))
    with tempfile.NamedTemporaryFile("w", encoding="utf-8", dir=directory,
                                     prefix=os.path.basename(path) + ".", delete=False) as tmp:
        try:
            tmp.write(text)
            tmp.flush()
            os.fsync(tmp.fileno())
        except BaseException:
            tmp.close()
            os.unlink(tmp.name)
            raise
    os.replace(tmp.name, path)
    logging.info(f"wrote {path}")


def read_instance(path: str) -> InstanceDescription:
    return InstanceDescription.from_dict(load_document(path))


# instance description -> engine objects

def instance_backend(desc: InstanceDescription, mode: Optional[str] = None,
                     tol: Optional[float] = None) -> ScalarBackend:
    return get_backend(mode or desc.mode, tol if tol is not None else desc.tolerance)


def _positive_int(spec: dict, key: str, location: str, minimum: int = 1) -> int:
    if key not in spec:
        raise DocumentError(f"{location}.{key}", "missing field")
    value = spec[key]
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise DocumentError(f"{location}.{key}", f"must be an integer >= {minimum}, got {value!r}")
    return value


def _square(spec: dict, key: str, location: str, backend: ScalarBackend) -> np.ndarray:
    if key not in spec:
        raise DocumentError(f"{location}.{key}", "missing field")
    m = read_array(spec[key], 2, f"{location}.{key}", backend)
    if m.shape[0] == 0 or m.shape[0] != m.shape[1]:
        raise DocumentError(f"{location}.{key}", f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def build_algebra(spec: Any, location: str, backend: ScalarBackend) -> Algebra:
    """An algebra from {blocks: [...], star: bool} or from structure constants."""
    if not isinstance(spec, dict):
        raise DocumentError(location, "expected a mapping")
    try:
        if "blocks" in spec:
            sizes = spec["blocks"]
            if not isinstance(sizes, list) or not sizes:
                raise DocumentError(f"{location}.blocks", "expected a non-empty list of block sizes")
            for i, n in enumerate(sizes):
                if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                    raise DocumentError(f"{location}.blocks[{i}]", f"block size must be a positive integer, got {n!r}")
            with_star = bool(spec.get("star", True))
            parts = [make_matrix_algebra(n, with_star=with_star, backend=backend) for n in sizes]
            return parts[0] if len(parts) == 1 else make_direct_sum(parts)
        dim = _positive_int(spec, "dim", location)
        constants = read_array(spec.get("constants"), 3, f"{location}.constants", backend)
        unit = read_array(spec.get("unit"), 1, f"{location}.unit", backend)
        star = spec.get("star")
        star = read_array(star, 2, f"{location}.star", backend) if star is not None else None
        return make_structure_constant_algebra(dim, constants, unit, star=star, labels=spec.get("labels"),
                                               backend=backend, name=location.split(".")[-1])
    except (SeparabilityError, ValueError) as e:
        if isinstance(e, DocumentError):
            raise
        raise DocumentError(location, str(e))


def _build_spec(spec: Any, location: str, backend: ScalarBackend, algebras: dict, seed: Optional[int]) -> TensorElement:
    if not isinstance(spec, dict):
        raise DocumentError(location, "expected a mapping")
    try:
        kind = ConstructionKind(spec.get("construction", ConstructionKind.EXPLICIT))
    except ValueError:
        raise DocumentError(f"{location}.construction", f"unknown construction {spec.get('construction')!r}")
    try:
        if kind == ConstructionKind.E0:
            return make_E0(_positive_int(spec, "n", location), backend)
        if kind == ConstructionKind.NONFULL:
            return make_nonfull_counterexample(_positive_int(spec, "n", location, minimum=2), backend)
        if kind == ConstructionKind.TWISTED:
            r, s = _square(spec, "r", location, backend), _square(spec, "s", location, backend)
            if r.shape != s.shape:
                raise DocumentError(f"{location}.s", f"r is {r.shape[0]}x{r.shape[0]} but s is {s.shape[0]}x{s.shape[0]}")
            a = make_matrix_algebra(r.shape[0], backend=backend)
            return make_twisted(element_from_matrix(a, r), element_from_matrix(a, s),
                                normalize=bool(spec.get("normalize", False)))
        if kind == ConstructionKind.INVOLUTIVE_TWISTED:
            r = _square(spec, "r", location, backend)
            a = make_matrix_algebra(r.shape[0], backend=backend)
            return make_involutive_twisted(element_from_matrix(a, r))
        if kind == ConstructionKind.RANDOM_TWISTED:
            n = _positive_int(spec, "n", location)
            rng = make_rng(spec.get("seed", seed))
            return make_twisted(*random_twist_pair(n, rng, backend))
        if kind == ConstructionKind.DIRECT_SUM:
            components = spec.get("components")
            if not isinstance(components, list) or not components:
                raise DocumentError(f"{location}.components", "expected a non-empty list of element specs")
            return make_direct_sum_E([
                _build_spec(c, f"{location}.components[{i}]", backend, {}, seed) for i, c in enumerate(components)
            ])
        if "B" not in algebras or "C" not in algebras:
            raise DocumentError("algebras", "explicit coefficients need the algebras B and C")
        B = build_algebra(algebras["B"], "algebras.B", backend)
        C = build_algebra(algebras["C"], "algebras.C", backend)
        coeffs = read_array(spec.get("coefficients"), 2, f"{location}.coefficients", backend)
        if coeffs.shape != (B.dim, C.dim):
            raise DocumentError(f"{location}.coefficients",
                                f"expected a {B.dim}x{C.dim} matrix, got shape {coeffs.shape}")
        return TensorElement(B, C, coeffs)
    except DocumentError:
        raise
    except (SeparabilityError, ValueError) as e:
        raise DocumentError(location, str(e))


def _check_declared_algebras(E: TensorElement, algebras: dict, backend: ScalarBackend) -> None:
    for key, built in (("B", E.left), ("C", E.right)):
        if key in algebras and not build_algebra(algebras[key], f"algebras.{key}", backend).same_as(built):
            raise DocumentError(f"algebras.{key}", "does not match the algebra of the constructed element")


def build_element(desc: InstanceDescription, backend: ScalarBackend) -> TensorElement:
    """The element described by `desc`, constructed over `backend`."""
    E = _build_spec(desc.element, "element", backend, desc.algebras, desc.seed)
    if desc.construction != ConstructionKind.EXPLICIT:
        _check_declared_algebras(E, desc.algebras, backend)
    return E


# engine objects -> textual form

def describe_algebra(a: Algebra) -> Dict[str, Any]:
    if a.blocks is not None:
        return {"blocks": list(a.blocks), "star": a.has_star}
    out: Dict[str, Any] = {
        "dim": a.dim,
        "constants": write_array(a.constants, a.backend),
        "unit": write_array(a.unit, a.backend),
        "labels": list(a.labels),
    }
    if a.has_star:
        out["star"] = write_array(a.star_matrix, a.backend)
    return out


def describe_element(E: TensorElement, seed: Optional[int] = None, tolerance: Optional[float] = None) -> InstanceDescription:
    """Explicit-coefficient description of an element."""
    backend = E.backend
    return InstanceDescription(
        element={"construction": ConstructionKind.EXPLICIT.value, "coefficients": write_array(E.coeffs, backend)},
        mode=str(backend.mode),
        tolerance=tolerance,
        seed=seed,
        algebras={"B": describe_algebra(E.left), "C": describe_algebra(E.right)},
    )


def write_labelled(values: np.ndarray, labels: tuple, backend: ScalarBackend) -> Dict[str, Any]:
    """Nonzero entries of a coefficient vector keyed by basis label."""
    mask = backend.nonzero_mask(values)
    return {labels[k]: backend.export(values[k]) for k in np.nonzero(mask)[0]}


def witness_list(witnesses: tuple) -> List[str]:
    return [str(w) for w in witnesses]
