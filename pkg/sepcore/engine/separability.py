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
"""Separability idempotents: classification, the antipodal maps S and S',
and the structural identities every certified element must satisfy.

S: B -> C and S': C -> B are found by solving, basis vector by basis vector,

    E(b (x) 1) = E(1 (x) S(b))        (1 (x) c)E = (S'(c) (x) 1)E

as one linear system each. Fullness of E makes the left hand operators
injective, so a solution is unique whenever it exists.
"""

import logging
from dataclasses import dataclass, field
from timeit import default_timer as timer
from typing import Any

import numpy as np
from strenum import StrEnum

from sepcore import settings
from sepcore.algebra.algebra_core import AlgebraElement, LinearMap
from sepcore.algebra.tensor_ops import TensorElement, is_full, swap_and_map, tensor_mul
from sepcore.engine.checks import CheckResult, column_witnesses
from sepcore.errors import (
    CentralityViolation,
    InternalInconsistency,
    IntertwinerConditionFails,
    NoSolution,
    NotFull,
    OneSidedConditionFails,
    PreconditionFailed,
    SeparabilityError,
    TransportMismatch,
)
from sepcore.utils.concurrency import run_jobs


class VerdictKind(StrEnum):
    IDEMPOTENT = "idempotent"
    SCALAR_MULTIPLE = "scalar_multiple"
    NILPOTENT = "nilpotent_square_zero"
    OTHER = "other"


class CertificateMode(StrEnum):
    SEPARABILITY_IDEMPOTENT = "separability_idempotent"
    NILPOTENT_VARIANT = "nilpotent_variant"
    REJECTED = "rejected"


class AxiomStatus(StrEnum):
    PASS = "pass"
    FAIL = "fail"
    AUTOMATIC = "automatic"
    SKIPPED = "skipped"


class AbsorptionCondition(StrEnum):
    LEFT = "left"    # E(B (x) 1) = E(1 (x) C)
    RIGHT = "right"  # (B (x) 1)E = (1 (x) C)E


@dataclass(frozen=True)
class IdempotencyVerdict:
    kind: VerdictKind
    scalar: Any = None
    witness: str = ""

    def __str__(self) -> str:
        if self.kind == VerdictKind.SCALAR_MULTIPLE:
            return f"{self.kind}({self.scalar})"
        return str(self.kind)


@dataclass
class SeparabilityCertificate:
    element: TensorElement
    mode: CertificateMode
    verdict: IdempotencyVerdict
    axioms: dict = field(default_factory=dict)
    S: LinearMap | None = None
    S_prime: LinearMap | None = None
    e: AlgebraElement | None = None
    checks: dict = field(default_factory=dict)
    reason: str = ""
    seed: int = 0
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.mode == CertificateMode.SEPARABILITY_IDEMPOTENT

    def summary(self) -> str:
        lines = [f"mode: {self.mode}" + (f" ({self.reason})" if self.reason else ""),
                 f"verdict: {self.verdict}"]
        lines += [f"axiom {name}: {status}" for name, status in self.axioms.items()]
        lines += [str(check) for check in self.checks.values()]
        return "\n".join(lines)


def verify_idempotent(E: TensorElement) -> IdempotencyVerdict:
    """Classify E^2 against E."""
    backend = E.backend
    square = tensor_mul(E, E)
    scale = backend.product_scale(E.coeffs, E.coeffs, E.left.constants, E.right.constants)
    if backend.allclose(square.coeffs, E.coeffs, scale):
        return IdempotencyVerdict(VerdictKind.IDEMPOTENT)
    if backend.allclose(square.coeffs, backend.zeros(square.coeffs.shape), scale):
        return IdempotencyVerdict(VerdictKind.NILPOTENT)
    lead = backend.leading_index(E.coeffs)
    if lead is None:
        return IdempotencyVerdict(VerdictKind.OTHER, witness="E = 0 but E^2 != 0")
    i, j = divmod(lead, E.right.dim)
    lam = square.coeffs[i, j] / E.coeffs[i, j]
    if backend.allclose(square.coeffs, E.coeffs * lam, scale):
        return IdempotencyVerdict(VerdictKind.SCALAR_MULTIPLE, scalar=lam, witness=f"E^2 = {lam} E")
    hit = backend.first_mismatch(square.coeffs, E.coeffs, axes=2, scale=scale)
    witness = f"E^2 != E at ({E.left.labels[hit[0]]}, {E.right.labels[hit[1]]})"
    return IdempotencyVerdict(VerdictKind.OTHER, witness=witness)


def require_full(E: TensorElement) -> None:
    r = E.backend.rank(E.coeffs)
    if r != E.left.dim or r != E.right.dim:
        raise NotFull(r, r, E.left.dim, E.right.dim)


def _right_absorption_system(E: TensorElement) -> tuple:
    """Columns of E(1 (x) c_m) and of E(b_k (x) 1), vectorised over (i, l)."""
    B, C, T = E.left, E.right, E.coeffs
    n = B.dim * C.dim
    system = np.tensordot(T, C.constants, axes=(1, 0)).transpose(0, 2, 1).reshape(n, C.dim)
    rhs = np.tensordot(B.constants, T, axes=(0, 0)).transpose(1, 2, 0).reshape(n, B.dim)
    return system, rhs


def _left_absorption_system(E: TensorElement) -> tuple:
    """Columns of (b_m (x) 1)E and of (1 (x) c_k)E, vectorised over (i, l)."""
    B, C, T = E.left, E.right, E.coeffs
    n = B.dim * C.dim
    system = np.tensordot(B.constants, T, axes=(1, 0)).transpose(1, 2, 0).reshape(n, B.dim)
    rhs = np.tensordot(T, C.constants, axes=(1, 1)).transpose(0, 2, 1).reshape(n, C.dim)
    return system, rhs


def derive_S(E: TensorElement) -> LinearMap:
    """The anti-isomorphism S: B -> C with E(b (x) 1) = E(1 (x) S(b))."""
    require_full(E)
    system, rhs = _right_absorption_system(E)
    try:
        x = E.backend.solve(system, rhs)
    except NoSolution as e:
        raise NoSolution(e.column, E.left.labels[e.column])
    return LinearMap.verified(E.left, E.right, x, "S", anti_multiplicative=True, bijective=True)


def derive_Sprime(E: TensorElement) -> LinearMap:
    """The anti-isomorphism S': C -> B with (1 (x) c)E = (S'(c) (x) 1)E."""
    require_full(E)
    system, rhs = _left_absorption_system(E)
    try:
        x = E.backend.solve(system, rhs)
    except NoSolution as e:
        raise NoSolution(e.column, E.right.labels[e.column])
    return LinearMap.verified(E.right, E.left, x, "S'", anti_multiplicative=True, bijective=True)


def derive_one_sided(E: TensorElement, condition: AbsorptionCondition | str) -> LinearMap:
    """Derive the map of the other absorption condition from one condition alone.

    Given only (B(x)1)E = (1(x)C)E, S' is solved first and S is then recovered from
    the pairs b = (iota (x) f S')E, c = (f (x) iota)E, which satisfy S(b) = c. This
    returns S and asserts it coincides with derive_S. The LEFT condition is the
    mirror image and returns S', checked against derive_Sprime.
    """
    condition = AbsorptionCondition(condition)
    require_full(E)
    verdict = verify_idempotent(E)
    if verdict.kind != VerdictKind.IDEMPOTENT:
        raise PreconditionFailed(f"one-sided derivation needs an idempotent, got {verdict}")
    backend, T = E.backend, E.coeffs
    if condition == AbsorptionCondition.RIGHT:
        try:
            s_prime = derive_Sprime(E)
            # S @ (T S'^T) = T^T
            s_matrix = backend.solve((T @ s_prime.matrix.T).T, T).T
        except NoSolution as e:
            raise OneSidedConditionFails(f"(B(x)1)E = (1(x)C)E does not determine S: {e}")
        system, rhs = _right_absorption_system(E)
        hits = column_witnesses(E.left, (system @ s_matrix).T, rhs.T, "E({label}(x)1) != E(1(x)S({label}))",
                                backend.product_scale(system, s_matrix))
        if hits:
            raise OneSidedConditionFails(hits[0])
        induced = LinearMap.verified(E.left, E.right, s_matrix, "S", anti_multiplicative=True, bijective=True)
        if induced != derive_S(E):
            raise InternalInconsistency("one-sided S differs from the directly derived S")
        return induced
    try:
        s = derive_S(E)
        # S' @ (S T)^T = T
        sp_matrix = backend.solve(s.matrix @ T, T.T).T
    except NoSolution as e:
        raise OneSidedConditionFails(f"E(B(x)1) = E(1(x)C) does not determine S': {e}")
    system, rhs = _left_absorption_system(E)
    hits = column_witnesses(E.right, (system @ sp_matrix).T, rhs.T, "(1(x){label})E != (S'({label})(x)1)E",
                            backend.product_scale(system, sp_matrix))
    if hits:
        raise OneSidedConditionFails(hits[0])
    induced = LinearMap.verified(E.right, E.left, sp_matrix, "S'", anti_multiplicative=True, bijective=True)
    if induced != derive_Sprime(E):
        raise InternalInconsistency("one-sided S' differs from the directly derived S'")
    return induced


def counit_identities(E: TensorElement, S: LinearMap, S_prime: LinearMap) -> CheckResult:
    """m_C(S (x) iota)(E(1 (x) c)) = c and m_B(iota (x) S')((b (x) 1)E) = b on the bases."""
    B, C, T = E.left, E.right, E.coeffs
    backend = E.backend
    z = np.tensordot(S.matrix @ T, C.constants, axes=(1, 0))
    c_side = np.tensordot(z, C.constants, axes=([0, 2], [0, 1]))
    w = np.tensordot(B.constants, T, axes=(1, 0))
    v = np.tensordot(w, S_prime.matrix, axes=(2, 1))
    b_side = np.tensordot(v, B.constants, axes=([1, 2], [0, 1]))
    scale = backend.product_scale(T, S.matrix, S_prime.matrix, B.constants, C.constants)
    witnesses = column_witnesses(C, c_side, backend.eye(C.dim), "m(S(x)i)(E(1(x){label})) != {label}", scale)
    witnesses += column_witnesses(B, b_side, backend.eye(B.dim), "m(i(x)S')(({label}(x)1)E) != {label}", scale)
    return CheckResult("counit", not witnesses, witnesses)


def central_element(E: TensorElement, S: LinearMap) -> AlgebraElement:
    """e = m_C(S (x) iota)E, asserted central in C."""
    C = E.right
    e = AlgebraElement(C, C.multiply_out(S.matrix @ E.coeffs))
    scale = E.backend.product_scale(np.atleast_2d(e.coeffs), C.constants)
    hit = E.backend.first_mismatch(e.left_matrix().T, e.right_matrix().T, scale=scale)
    if hit is not None:
        raise CentralityViolation(C.labels[hit[0]])
    return e


def swap_identity(E: TensorElement, S: LinearMap, S_prime: LinearMap) -> CheckResult:
    flipped = swap_and_map(E, S, S_prime)
    scale = E.backend.product_scale(S.matrix, E.coeffs, S_prime.matrix)
    hit = E.backend.first_mismatch(flipped.coeffs, E.coeffs, axes=2, scale=scale)
    if hit is None:
        return CheckResult("swap", True)
    return CheckResult("swap", False, (f"(S(x)S')E differs from the flip of E at "
                                       f"({E.left.labels[hit[0]]}, {E.right.labels[hit[1]]})",))


def right_action(S: LinearMap, x: AlgebraElement, b: AlgebraElement, c: AlgebraElement) -> AlgebraElement:
    """x <| (b (x) c) = S(b) x c, the right B(x)C-module structure on C."""
    return S(b) * x * c


def splitting_check(E: TensorElement, S: LinearMap) -> CheckResult:
    """gamma(c) = E(1 (x) c) splits m(b (x) c) = S(b)c as a right module map.

    The section law m(gamma(c)) = c is always checked on every basis element.
    The module law gamma(x <| (b (x) c)) = gamma(x)(b (x) c) has two branches
    chosen by size:

    - dim B * dim C^2 <= 4 * settings.EXHAUSTIVE_DIM: every basis triple
      (b, x, c) is compared directly.
    - larger: the law is checked at x = 1 only, as
      (E(b (x) 1) - E(1 (x) S(b)))(1 (x) c) = 0 over all pairs (b, c). Both
      sides are E(1 (x) x) times something, so the x = 1 case implies the rest.

    Both branches accept and reject the same instances.
    """
    B, C, T = E.left, E.right, E.coeffs
    backend = E.backend
    z = np.tensordot(S.matrix @ T, C.constants, axes=(1, 0))
    section = np.tensordot(z, C.constants, axes=([0, 2], [0, 1]))
    scale = backend.product_scale(S.matrix, T, B.constants, C.constants, C.constants)
    witnesses = column_witnesses(C, section, backend.eye(C.dim), "m(gamma({label})) != {label}", scale)
    if B.dim * C.dim * C.dim <= 4 * settings.EXHAUSTIVE_DIM:
        witnesses += _module_law_exhaustive(E, S, scale)
    else:
        witnesses += _module_law_reduced(E, S, scale)
    return CheckResult("splitting", not witnesses, witnesses)


def _module_law_exhaustive(E: TensorElement, S: LinearMap, scale: float) -> tuple:
    B, C, T = E.left, E.right, E.coeffs
    tc = np.tensordot(T, C.constants, axes=(1, 0))                     # (p, l, l')
    sbx = np.tensordot(S.matrix, C.constants, axes=(0, 0))             # (i, j, l): S(b_i) x_j
    sbxc = np.tensordot(sbx, C.constants, axes=(2, 0))                 # (i, j, k, l)
    lhs = np.tensordot(sbxc, tc, axes=(3, 1))                          # (i, j, k, p, l')
    right_b = np.tensordot(B.constants, tc, axes=(0, 0))               # (i, p', j, l)
    rhs = np.tensordot(right_b, C.constants, axes=(3, 0)).transpose(0, 2, 3, 1, 4)
    hit = E.backend.first_mismatch(lhs, rhs, axes=3, scale=scale)
    if hit is None:
        return ()
    i, j, k = hit
    return (f"gamma(S({B.labels[i]}) {C.labels[j]} {C.labels[k]}) != "
            f"gamma({C.labels[j]})({B.labels[i]}(x){C.labels[k]})",)


def _module_law_reduced(E: TensorElement, S: LinearMap, scale: float) -> tuple:
    B, C, T = E.left, E.right, E.coeffs
    right_b = np.tensordot(B.constants, T, axes=(0, 0))                # (k, p, j)
    right_c = np.tensordot(T, np.tensordot(C.constants, S.matrix, axes=(1, 0)), axes=(1, 0))
    defect = right_b - right_c.transpose(2, 0, 1)
    applied = np.tensordot(defect, C.constants, axes=(2, 0)).transpose(0, 2, 1, 3)   # (k, m, p, l)
    hit = E.backend.first_mismatch(applied, E.backend.zeros(applied.shape), axes=2, scale=scale)
    if hit is None:
        return ()
    k, m = hit
    return (f"gamma(S({B.labels[k]}) {C.labels[m]}) != gamma(1)({B.labels[k]}(x){C.labels[m]})",)


@dataclass(frozen=True)
class DeterminacyResult:
    passed: bool
    applicable: bool
    maps_equal: bool
    ef_equals_e: bool | None = None
    ef_equals_f: bool | None = None

    def __bool__(self) -> bool:
        return self.passed


def determinacy_check(E: TensorElement, F: TensorElement) -> DeterminacyResult:
    """Equal (S, S') pairs force E = F; when the maps differ there is nothing to check."""
    E.require_pair(F)
    maps_equal = derive_S(E) == derive_S(F) and derive_Sprime(E) == derive_Sprime(F)
    if not maps_equal:
        return DeterminacyResult(passed=True, applicable=False, maps_equal=False)
    product = tensor_mul(E, F)
    return DeterminacyResult(passed=E == F, applicable=True, maps_equal=True,
                             ef_equals_e=product == E, ef_equals_f=product == F)


def conjugacy_transport(E1: TensorElement, E2: TensorElement, alpha_B: LinearMap) -> LinearMap:
    """Transport a multiplicative bijection of B intertwining S'S to the C side.

    alpha_C is fixed by S'_2(alpha_C(c)) = alpha_B(S'_1(c)) and the result is
    checked against E2 = (alpha_B (x) alpha_C)E1.
    """
    E1.require_pair(E2)
    alpha_B = LinearMap.verified(alpha_B.source, alpha_B.target, alpha_B.matrix, alpha_B.name,
                                 multiplicative=True, bijective=True)
    backend = E1.backend
    S1, S1p, S2, S2p = derive_S(E1), derive_Sprime(E1), derive_S(E2), derive_Sprime(E2)
    lhs = S2p.matrix @ S2.matrix @ alpha_B.matrix
    rhs = alpha_B.matrix @ S1p.matrix @ S1.matrix
    hit = backend.first_mismatch(lhs.T, rhs.T, scale=backend.product_scale(S2p.matrix, S2.matrix, alpha_B.matrix))
    if hit is not None:
        raise IntertwinerConditionFails(E1.left.labels[hit[0]])
    alpha_C = S2p.inverse().matrix @ alpha_B.matrix @ S1p.matrix
    scale = backend.product_scale(alpha_B.matrix, E1.coeffs, alpha_C.T)
    if not backend.allclose(alpha_B.matrix @ E1.coeffs @ alpha_C.T, E2.coeffs, scale):
        raise TransportMismatch()
    return LinearMap.verified(E1.right, E2.right, alpha_C, "alpha_C", multiplicative=True, bijective=True)


def _central_check(E: TensorElement, S: LinearMap) -> tuple:
    try:
        return central_element(E, S), CheckResult("centrality", True)
    except CentralityViolation as e:
        return None, CheckResult("centrality", False, (str(e),))


def _determinacy_against_flip(E: TensorElement, S: LinearMap, S_prime: LinearMap) -> CheckResult:
    try:
        result = determinacy_check(E, swap_and_map(E, S, S_prime))
    except SeparabilityError as e:
        return CheckResult("determinacy", False, (f"maps of the flipped element: {e}",))
    if not result.applicable:
        return CheckResult("determinacy", False, ("flipped element has different maps",))
    witnesses = []
    if not result.passed:
        witnesses.append("equal maps but different elements")
    if not result.ef_equals_e:
        witnesses.append("EF != E")
    if not result.ef_equals_f:
        witnesses.append("EF != F")
    return CheckResult("determinacy", not witnesses, tuple(witnesses))


def certify(E: TensorElement, workers: int | None = None) -> SeparabilityCertificate:
    """Run the whole pipeline; failures end up in the certificate, never raised."""
    start = timer()
    cert = SeparabilityCertificate(E, CertificateMode.REJECTED, IdempotencyVerdict(VerdictKind.OTHER),
                                   seed=settings.SEED)
    cert.axioms = {"regular": AxiomStatus.AUTOMATIC, "local_units": AxiomStatus.AUTOMATIC}
    try:
        _run_certify(E, cert, workers)
    except Exception as e:
        logging.exception(f"certify failed unexpectedly: {e}")
        cert.mode = CertificateMode.REJECTED
        cert.reason = f"internal error: {e}"
    cert.elapsed = timer() - start
    logging.info(f"certify {E.left.name}(x){E.right.name} mode={cert.mode} cost {cert.elapsed}s")
    return cert


def _run_certify(E: TensorElement, cert: SeparabilityCertificate, workers: int | None) -> None:
    cert.verdict = verify_idempotent(E)
    idempotent = cert.verdict.kind == VerdictKind.IDEMPOTENT
    cert.axioms["idempotent"] = AxiomStatus.PASS if idempotent else AxiomStatus.FAIL
    if not is_full(E):
        cert.axioms["full"] = AxiomStatus.FAIL
        cert.axioms["absorption_left"] = cert.axioms["absorption_right"] = AxiomStatus.SKIPPED
        cert.reason = "not full"
        return
    cert.axioms["full"] = AxiomStatus.PASS

    failures = []
    for axiom, derive in (("absorption_left", derive_S), ("absorption_right", derive_Sprime)):
        try:
            derived = derive(E)
        except SeparabilityError as e:
            logging.warning(f"{axiom} fails: {e}")
            cert.axioms[axiom] = AxiomStatus.FAIL
            failures.append(f"{axiom}: {e}")
            continue
        cert.axioms[axiom] = AxiomStatus.PASS
        if axiom == "absorption_left":
            cert.S = derived
        else:
            cert.S_prime = derived
    if failures:
        cert.reason = "; ".join(failures)
        return

    S, S_prime = cert.S, cert.S_prime
    results = run_jobs({
        "counit": lambda: counit_identities(E, S, S_prime),
        "swap": lambda: swap_identity(E, S, S_prime),
        "splitting": lambda: splitting_check(E, S),
        "centrality": lambda: _central_check(E, S),
        "determinacy": lambda: _determinacy_against_flip(E, S, S_prime),
    }, workers)
    cert.e, results["centrality"] = results["centrality"]
    cert.checks = results

    if cert.verdict.kind == VerdictKind.NILPOTENT and cert.e is not None and cert.e.is_zero():
        cert.mode = CertificateMode.NILPOTENT_VARIANT
        cert.reason = "E^2 = 0 with S and S' derived; e = 0"
        return
    if not idempotent:
        cert.reason = f"not idempotent: {cert.verdict.witness or cert.verdict}"
        return
    failed = [name for name, check in cert.checks.items() if not check]
    if failed:
        cert.reason = f"identity checks failed: {', '.join(failed)}"
        return
    cert.mode = CertificateMode.SEPARABILITY_IDEMPOTENT
