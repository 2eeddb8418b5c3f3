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
"""Left and right integrals, modular automorphisms and the correspondence
between traces and implementing elements.

The integrals are found by linear solves, not from closed forms:

    (iota (x) phi)E = 1_B      (psi (x) iota)E = 1_C
"""

import logging
from dataclasses import dataclass

import numpy as np

from sepcore.algebra.algebra_core import AlgebraElement, LinearFunctional, LinearMap, invert
from sepcore.algebra.tensor_ops import TensorElement, slice_left, slice_right
from sepcore.engine.checks import CheckResult, column_witnesses
from sepcore.engine.separability import CertificateMode, VerdictKind, derive_S, derive_Sprime, verify_idempotent
from sepcore.errors import (
    InternalInconsistency,
    KMSViolation,
    NotATrace,
    NotFaithful,
    NotInvertible,
    PreconditionFailed,
    RefusedForMode,
    RelativeCommutationFails,
    SolutionSpaceDimensionNotOne,
)


@dataclass(frozen=True)
class IntegralData:
    S: LinearMap
    S_prime: LinearMap
    phi: LinearFunctional
    psi: LinearFunctional
    sigma: LinearMap
    sigma_prime: LinearMap


@dataclass(frozen=True)
class TraceCorrespondence:
    """A trace together with the element implementing it."""
    trace: LinearFunctional
    element: AlgebraElement
    faithful: bool
    invertible: bool


def _require_idempotent(E: TensorElement, operation: str) -> None:
    verdict = verify_idempotent(E)
    if verdict.kind == VerdictKind.NILPOTENT:
        raise RefusedForMode(operation, CertificateMode.NILPOTENT_VARIANT)
    if verdict.kind != VerdictKind.IDEMPOTENT:
        raise PreconditionFailed(f"{operation} needs a separability idempotent, E is {verdict}")


def _solve_normalised(E: TensorElement, system: np.ndarray, unit: np.ndarray, what: str) -> np.ndarray:
    backend = E.backend
    augmented = np.concatenate([system, -unit.reshape(-1, 1)], axis=1)
    null = backend.nullspace(augmented)
    if null.shape[1] != 1:
        raise SolutionSpaceDimensionNotOne(what, int(null.shape[1]))
    v = null[:, 0]
    if backend.is_zero(v[-1]):
        raise InternalInconsistency(f"{what}: no functional slices E to the unit")
    return v[:-1] / v[-1]


def _require_faithful(f: LinearFunctional) -> LinearFunctional:
    witness = f.kernel_witness()
    if witness is not None:
        raise NotFaithful(witness)
    return f


def derive_left_integral(E: TensorElement) -> LinearFunctional:
    """The unique phi on C with (iota (x) phi)E = 1."""
    _require_idempotent(E, "left integral")
    derive_S(E)
    covector = _solve_normalised(E, E.coeffs, E.left.unit, "left integral")
    return _require_faithful(LinearFunctional(E.right, covector, "phi"))


def derive_right_integral(E: TensorElement) -> LinearFunctional:
    """The unique psi on B with (psi (x) iota)E = 1."""
    _require_idempotent(E, "right integral")
    derive_Sprime(E)
    covector = _solve_normalised(E, E.coeffs.T, E.right.unit, "right integral")
    return _require_faithful(LinearFunctional(E.left, covector, "psi"))


def _check_kms(f: LinearFunctional, automorphism: LinearMap, side: str) -> None:
    # f(x y) = f(y a(x)) on all basis pairs
    gram = f.gram()
    scale = f.backend.product_scale(gram, automorphism.matrix)
    hit = f.backend.first_mismatch(gram, (gram @ automorphism.matrix).T, axes=2, scale=scale)
    if hit is not None:
        raise KMSViolation(side, *hit)


def modular_automorphisms(S: LinearMap, S_prime: LinearMap, phi: LinearFunctional,
                          psi: LinearFunctional) -> tuple:
    """sigma = S S' on C and sigma' = (S' S)^-1 on B, with their KMS laws checked."""
    sigma = S.compose(S_prime, "sigma")
    sigma = LinearMap.verified(sigma.source, sigma.target, sigma.matrix, "sigma", multiplicative=True, bijective=True)
    sigma_prime = S_prime.compose(S).inverse("sigma'")
    sigma_prime = LinearMap.verified(sigma_prime.source, sigma_prime.target, sigma_prime.matrix, "sigma'",
                                     multiplicative=True, bijective=True)
    _check_kms(phi, sigma, "left")
    _check_kms(psi, sigma_prime, "right")
    return sigma, sigma_prime


def integral_data(E: TensorElement) -> IntegralData:
    S, S_prime = derive_S(E), derive_Sprime(E)
    phi, psi = derive_left_integral(E), derive_right_integral(E)
    sigma, sigma_prime = modular_automorphisms(S, S_prime, phi, psi)
    logging.debug(f"integral data derived for {E.left.name}(x){E.right.name}")
    return IntegralData(S, S_prime, phi, psi, sigma, sigma_prime)


def check_integral_transport(phi: LinearFunctional, psi: LinearFunctional, S: LinearMap,
                             S_prime: LinearMap) -> CheckResult:
    """phi S = psi, psi S' = phi, and both integrals invariant under S S' / S' S."""
    B, C = psi.algebra, phi.algebra
    backend = B.backend
    scale = backend.product_scale(S.matrix, S_prime.matrix) * max(
        backend.product_scale(np.atleast_2d(phi.covector)), backend.product_scale(np.atleast_2d(psi.covector)))
    witnesses = column_witnesses(B, phi.compose(S).covector, psi.covector, "phi(S({label})) != psi({label})", scale)
    witnesses += column_witnesses(C, psi.compose(S_prime).covector, phi.covector,
                                  "psi(S'({label})) != phi({label})", scale)
    witnesses += column_witnesses(C, phi.covector @ S.matrix @ S_prime.matrix, phi.covector,
                                  "phi(S S'({label})) != phi({label})", scale)
    witnesses += column_witnesses(B, psi.covector @ S_prime.matrix @ S.matrix, psi.covector,
                                  "psi(S' S({label})) != psi({label})", scale)
    return CheckResult("integral_transport", not witnesses, witnesses)


def _relative_commutation(x: AlgebraElement, automorphism: LinearMap) -> str | None:
    # y x = x a(y) for all basis y; returns the first failing label
    left = x.left_matrix()
    scale = x.backend.product_scale(left, automorphism.matrix)
    hit = x.backend.first_mismatch(x.right_matrix().T, (left @ automorphism.matrix).T, scale=scale)
    return None if hit is None else x.algebra.labels[hit[0]]


def _require_trace(tau: LinearFunctional) -> None:
    pair = tau.is_tracial()
    if pair is not None:
        raise NotATrace(*pair)


def q_from_trace(E: TensorElement, tau: LinearFunctional, data: IntegralData | None = None) -> AlgebraElement:
    """q = (tau (x) iota)E for a trace tau on B; satisfies c q = q sigma(c)."""
    tau.algebra.require_same(E.left)
    _require_trace(tau)
    data = data or integral_data(E)
    q = slice_left(tau, E)
    label = _relative_commutation(q, data.sigma)
    if label is not None:
        raise InternalInconsistency(f"q from a trace fails c q = q sigma(c) on {label}")
    if data.psi.left_translate(data.S_prime(q)) != tau:
        raise InternalInconsistency("psi(S'(q) .) does not return the trace")
    return q


def trace_from_q(E: TensorElement, q: AlgebraElement, data: IntegralData | None = None) -> TraceCorrespondence:
    """tau = psi(S'(q) .), a trace on B; faithful exactly when q is invertible."""
    q.algebra.require_same(E.right)
    data = data or integral_data(E)
    label = _relative_commutation(q, data.sigma)
    if label is not None:
        raise RelativeCommutationFails(label)
    tau = data.psi.left_translate(data.S_prime(q))
    tau = LinearFunctional(tau.algebra, tau.covector, "tau")
    if tau.is_tracial() is not None:
        raise InternalInconsistency("psi(S'(q) .) is not tracial")
    return _correspondence(tau, q)


def p_from_trace(E: TensorElement, tau: LinearFunctional, data: IntegralData | None = None) -> AlgebraElement:
    """p = (iota (x) tau)E for a trace tau on C; satisfies b p = p sigma'(b)."""
    tau.algebra.require_same(E.right)
    _require_trace(tau)
    data = data or integral_data(E)
    p = slice_right(E, tau)
    label = _relative_commutation(p, data.sigma_prime)
    if label is not None:
        raise InternalInconsistency(f"p from a trace fails b p = p sigma'(b) on {label}")
    if data.phi.right_translate(data.S(p)) != tau:
        raise InternalInconsistency("phi(. S(p)) does not return the trace")
    return p


def trace_from_p(E: TensorElement, p: AlgebraElement, data: IntegralData | None = None) -> TraceCorrespondence:
    """tau = phi(. S(p)), a trace on C; faithful exactly when p is invertible."""
    p.algebra.require_same(E.left)
    data = data or integral_data(E)
    label = _relative_commutation(p, data.sigma_prime)
    if label is not None:
        raise RelativeCommutationFails(label)
    tau = data.phi.right_translate(data.S(p))
    tau = LinearFunctional(tau.algebra, tau.covector, "tau")
    if tau.is_tracial() is not None:
        raise InternalInconsistency("phi(. S(p)) is not tracial")
    return _correspondence(tau, p)


def _correspondence(tau: LinearFunctional, x: AlgebraElement) -> TraceCorrespondence:
    try:
        invert(x)
        invertible = True
    except NotInvertible:
        invertible = False
    faithful = tau.is_faithful()
    if faithful != invertible:
        raise InternalInconsistency(f"trace faithful={faithful} but implementing element invertible={invertible}")
    return TraceCorrespondence(tau, x, faithful, invertible)
