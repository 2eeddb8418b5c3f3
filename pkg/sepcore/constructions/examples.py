#
#  Copyright 2025 The Separability Kernel Authors. All Rights Reserved.
#
#  Licensed under the Apache License, Version 2.0 (the "License");
#  you may not use this file except in compliance with the License.
#  You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
#  Unless required by applicable law or agreed to in writing, software
#  distributed under the License is distributed on an "AS IS" BASIS,
#  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#  See the License for the specific language governing permissions and
#  limitations under the License.
#
"""Standard families of elements of M_n (x) M_n and their direct sums.

E0 = (1/n) sum_ij e_ij (x) e_ij is the basic separability idempotent; every
other family twists it as (r (x) 1) E0 (s (x) 1). Constructed elements carry
their closed forms in ``TensorElement.oracle`` so tests can compare the
derived data against them.
"""

import logging
from dataclasses import dataclass

import numpy as np

from sepcore.algebra.algebra_core import (
    Algebra,
    AlgebraElement,
    LinearFunctional,
    LinearMap,
    conjugation_map,
    element_to_matrix,
    invert,
    make_direct_sum,
    make_matrix_algebra,
    trace_functional,
    transpose_anti_map,
)
from sepcore.algebra.scalars import ScalarBackend, get_backend
from sepcore.algebra.tensor_ops import TensorElement
from sepcore.engine.separability import CertificateMode, certify
from sepcore.errors import IncompatibleComponents, NormalizationViolated, PreconditionFailed


@dataclass(frozen=True)
class ClosedForms:
    """Data of (r (x) 1)E0(s (x) 1) in closed form.

    S(b) = S0(s b s^-1), S'(c) = r S0(c) r^-1, p = (r s)^-1, q = S0(s r)^-1,
    psi = n Tr(p .), phi = n Tr(q .), sigma = Ad q, sigma' = Ad p. The
    functionals and automorphisms are only meaningful when Tr(s r) = n.
    """
    S: LinearMap
    S_prime: LinearMap
    p: AlgebraElement
    q: AlgebraElement
    phi: LinearFunctional
    psi: LinearFunctional
    sigma: LinearMap
    sigma_prime: LinearMap
    r: AlgebraElement | None = None
    s: AlgebraElement | None = None


def _matrix_size(a: Algebra) -> int:
    if a.blocks is None or len(a.blocks) != 1:
        raise PreconditionFailed(f"{a.name} is not a single matrix algebra")
    return a.blocks[0]


def closed_forms(r: AlgebraElement, s: AlgebraElement) -> ClosedForms:
    a = r.algebra
    a.require_same(s.algebra)
    n = _matrix_size(a)
    backend = a.backend
    s0 = transpose_anti_map(a)
    r_inv, s_inv = invert(r), invert(s)
    S = LinearMap(a, a, s0.matrix @ s.left_matrix() @ s_inv.right_matrix(), "S",
                  anti_multiplicative=True, bijective=True)
    S_prime = LinearMap(a, a, r.left_matrix() @ r_inv.right_matrix() @ s0.matrix, "S'",
                        anti_multiplicative=True, bijective=True)
    p = invert(r * s)
    q = invert(s0(s * r))
    tr = trace_functional(a)
    n_scalar = backend.scalar(n)
    psi = LinearFunctional(a, tr.left_translate(p).covector * n_scalar, "psi")
    phi = LinearFunctional(a, tr.left_translate(q).covector * n_scalar, "phi")
    return ClosedForms(S, S_prime, p, q, phi, psi, conjugation_map(q, "sigma"), conjugation_map(p, "sigma'"), r, s)


def _e0_coeffs(a: Algebra) -> np.ndarray:
    n = _matrix_size(a)
    backend = a.backend
    return backend.eye(a.dim) * backend.rational(1, n)


def make_E0(n: int, backend: ScalarBackend | None = None) -> TensorElement:
    """(1/n) sum_ij e_ij (x) e_ij over M_n (x) M_n."""
    a = make_matrix_algebra(n, backend=backend or get_backend())
    return TensorElement(a, a, _e0_coeffs(a), oracle=closed_forms(a.one(), a.one()))


def make_twisted(r: AlgebraElement, s: AlgebraElement, normalize: bool = False) -> TensorElement:
    """(r (x) 1) E0 (s (x) 1); with normalize, s is rescaled so that Tr(s r) = n.

    The result is idempotent when Tr(s r) = n, squares to zero when the trace
    vanishes and is a scalar multiple of an idempotent otherwise.
    """
    a = r.algebra
    a.require_same(s.algebra)
    n = _matrix_size(a)
    backend = a.backend
    invert(r)
    invert(s)
    if normalize:
        trace = backend.trace(element_to_matrix(s * r))
        if not backend.is_zero(trace):
            s = (backend.scalar(n) / trace) * s
    coeffs = r.left_matrix() @ s.right_matrix() @ _e0_coeffs(a)
    return TensorElement(a, a, coeffs, oracle=closed_forms(r, s))


def make_involutive_twisted(r: AlgebraElement) -> TensorElement:
    """(r (x) 1) E0 (r* (x) 1), which needs Tr(r* r) = n exactly.

    The rescaling to reach Tr(r* r) = n takes a square root, so the condition
    is checked and never imposed.
    """
    a = r.algebra
    n = _matrix_size(a)
    backend = a.backend
    r_star = r.star()
    value = backend.trace(element_to_matrix(r_star * r))
    if not backend.equal(value, backend.scalar(n)):
        raise NormalizationViolated(backend.export(value), n)
    return make_twisted(r, r_star)


def _block_diagonal(backend: ScalarBackend, matrices: list) -> np.ndarray:
    rows = sum(m.shape[0] for m in matrices)
    cols = sum(m.shape[1] for m in matrices)
    out = backend.zeros((rows, cols))
    i = j = 0
    for m in matrices:
        out[i:i + m.shape[0], j:j + m.shape[1]] = m
        i += m.shape[0]
        j += m.shape[1]
    return out


def _glue_oracles(B: Algebra, C: Algebra, oracles: list) -> ClosedForms:
    backend = B.backend

    def diag(attr: str) -> np.ndarray:
        return _block_diagonal(backend, [getattr(o, attr).matrix for o in oracles])

    def concat(attr: str, field: str) -> np.ndarray:
        return np.concatenate([getattr(getattr(o, attr), field) for o in oracles])

    return ClosedForms(
        S=LinearMap(B, C, diag("S"), "S", anti_multiplicative=True, bijective=True),
        S_prime=LinearMap(C, B, diag("S_prime"), "S'", anti_multiplicative=True, bijective=True),
        p=AlgebraElement(B, concat("p", "coeffs")),
        q=AlgebraElement(C, concat("q", "coeffs")),
        phi=LinearFunctional(C, concat("phi", "covector"), "phi"),
        psi=LinearFunctional(B, concat("psi", "covector"), "psi"),
        sigma=LinearMap(C, C, diag("sigma"), "sigma", multiplicative=True, bijective=True),
        sigma_prime=LinearMap(B, B, diag("sigma_prime"), "sigma'", multiplicative=True, bijective=True),
    )


def make_direct_sum_E(components: list) -> TensorElement:
    """Block-diagonal element over the direct sums of the component algebras."""
    if not components:
        raise IncompatibleComponents("no components")
    modes = {c.backend.mode for c in components}
    if len(modes) > 1:
        raise IncompatibleComponents(f"components use different scalar modes: {sorted(modes)}")
    for k, component in enumerate(components):
        cert = certify(component)
        if cert.mode == CertificateMode.REJECTED:
            raise IncompatibleComponents(f"component {k + 1} rejected: {cert.reason}")
        if cert.mode == CertificateMode.NILPOTENT_VARIANT:
            logging.warning(f"component {k + 1} is a nilpotent variant")
    if len(components) == 1:
        return components[0]
    B = make_direct_sum([c.left for c in components])
    C = make_direct_sum([c.right for c in components])
    coeffs = _block_diagonal(B.backend, [c.coeffs for c in components])
    oracle = None
    if all(isinstance(c.oracle, ClosedForms) for c in components):
        oracle = _glue_oracles(B, C, [c.oracle for c in components])
    return TensorElement(B, C, coeffs, oracle=oracle)


def make_nonfull_counterexample(n: int, backend: ScalarBackend | None = None) -> TensorElement:
    """sum_i e_i1 (x) e_i1: idempotent, one-sided separable, legs of dimension n only."""
    if n < 2:
        raise ValueError(f"the counterexample needs n >= 2, got {n}")
    a = make_matrix_algebra(n, backend=backend or get_backend())
    coeffs = a.backend.zeros((a.dim, a.dim))
    for i in range(n):
        coeffs[i * n, i * n] = a.backend.one
    return TensorElement(a, a, coeffs)


def diagonal(a: Algebra, entries: list) -> AlgebraElement:
    """diag(entries) in the single matrix block of `a`."""
    n = _matrix_size(a)
    if len(entries) != n:
        raise ValueError(f"expected {n} diagonal entries, got {len(entries)}")
    coeffs = a.backend.zeros(a.dim)
    for i, v in enumerate(entries):
        coeffs[i * n + i] = a.backend.scalar(v)
    return AlgebraElement(a, coeffs)
