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
"""Twist recovery on a single matrix block and decomposition of block-diagonal
elements over multi-matrix algebras.

On M_n every full element with antipodal maps is (r (x) 1)E0(s (x) 1), where

    S'(S0(b)) r = r b        S0(S(b)) s = s b

fix r and s up to a scalar each. The gauge is: first nonzero entry of r equal
to 1, then s is scaled so that the product reproduces E.
"""

import logging
from dataclasses import dataclass
from timeit import default_timer as timer

import numpy as np

from sepcore.algebra.algebra_core import (
    Algebra,
    AlgebraElement,
    element_to_matrix,
    make_matrix_algebra,
    transpose_anti_map,
)
from sepcore.algebra.scalars import ScalarBackend, ScalarMode
from sepcore.algebra.tensor_ops import TensorElement
from sepcore.constructions.examples import make_twisted
from sepcore.engine.integrals import integral_data
from sepcore.engine.separability import (
    CertificateMode,
    SeparabilityCertificate,
    VerdictKind,
    certify,
    derive_S,
    derive_Sprime,
    verify_idempotent,
)
from sepcore.errors import (
    CrossBlockLeakage,
    InternalInconsistency,
    PreconditionFailed,
    ReconstructionMismatch,
    RefusedForMode,
    SolutionSpaceDimensionNotOne,
)
from sepcore.utils.concurrency import run_jobs


@dataclass(frozen=True)
class Twist:
    """E = (r (x) 1) E0 (s (x) 1) in the documented gauge."""
    r: AlgebraElement
    s: AlgebraElement


@dataclass(frozen=True)
class BlockComponent:
    index: int
    size: int
    element: TensorElement
    certificate: SeparabilityCertificate
    twist: Twist


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: list

    def __len__(self) -> int:
        return len(self.blocks)


def _single_block(a: Algebra) -> int:
    if a.blocks is None:
        raise PreconditionFailed(f"{a.name} has no matrix block presentation")
    if len(a.blocks) != 1:
        raise PreconditionFailed(f"{a.name} has {len(a.blocks)} blocks, decompose it first")
    return a.blocks[0]


def _intertwiner(a: Algebra, images: np.ndarray, what: str) -> AlgebraElement:
    # x with images[:, k] x = x b_k for every basis b_k
    backend = a.backend
    stacked = np.concatenate([
        a.left_matrix(images[:, k]) - a.right_matrix(backend.unit_vector(a.dim, k)) for k in range(a.dim)
    ], axis=0)
    null = backend.nullspace(stacked)
    if null.shape[1] != 1:
        raise SolutionSpaceDimensionNotOne(what, int(null.shape[1]))
    return AlgebraElement(a, null[:, 0].copy())


def recover_twist(E: TensorElement) -> Twist:
    """Recover (r, s) with E = (r (x) 1) E0 (s (x) 1) on M_n (x) M_n."""
    n = _single_block(E.left)
    if _single_block(E.right) != n:
        raise PreconditionFailed("B and C are matrix algebras of different sizes")
    a = E.left
    E.right.require_same(a)
    backend = a.backend
    s0 = transpose_anti_map(a).matrix
    S, S_prime = derive_S(E), derive_Sprime(E)
    r = _intertwiner(a, S_prime.matrix @ s0, "r")
    s = _intertwiner(a, s0 @ S.matrix, "s")

    lead = backend.leading_index(r.coeffs)
    r = AlgebraElement(a, r.coeffs / r.coeffs[lead])
    rebuilt = make_twisted(r, s).coeffs
    k = backend.leading_index(rebuilt)
    i, j = divmod(k, a.dim)
    mu = E.coeffs[i, j] / rebuilt[i, j]
    if not backend.allclose(rebuilt * mu, E.coeffs):
        raise ReconstructionMismatch("E is not (r (x) 1)E0(s (x) 1) for the recovered r, s")
    s = AlgebraElement(a, s.coeffs * mu)

    if verify_idempotent(E).kind == VerdictKind.IDEMPOTENT:
        trace = backend.trace(element_to_matrix(s * r))
        if not backend.equal(trace, backend.scalar(n)):
            raise InternalInconsistency(f"recovered twist has Tr(s r) = {trace}, expected {n}")
    return Twist(r, s)


def polar_twist(r: AlgebraElement) -> tuple:
    """r = v |r| with v unitary and |r| positive; float mode only."""
    backend = r.backend
    if backend.mode != ScalarMode.FLOAT:
        raise RefusedForMode("polar_twist", backend.mode)
    a = r.algebra
    u, sv, vh = np.linalg.svd(np.asarray(element_to_matrix(r), dtype=complex))
    v = u @ vh
    modulus = vh.conj().T @ np.diag(sv) @ vh
    return AlgebraElement(a, v.reshape(-1).astype(complex)), AlgebraElement(a, modulus.reshape(-1).astype(complex))


def _check_leakage(E: TensorElement) -> None:
    B, C = E.left, E.right
    mask = E.backend.nonzero_mask(E.coeffs)
    for i, j in zip(*np.nonzero(mask)):
        alpha, beta = B.block_of(int(i)), C.block_of(int(j))
        if alpha != beta:
            raise CrossBlockLeakage(alpha + 1, beta + 1, B.labels[i], C.labels[j])


def _component(E: TensorElement, offset: int, n: int) -> TensorElement:
    a = make_matrix_algebra(n, with_star=E.left.has_star and E.right.has_star, backend=E.backend)
    window = slice(offset, offset + n * n)
    return TensorElement(a, a, E.coeffs[window, window].copy())


def _analyse_block(component: TensorElement) -> tuple:
    cert = certify(component, workers=1)
    if cert.mode == CertificateMode.REJECTED:
        return cert, None
    return cert, recover_twist(component)


def _restricts(backend: ScalarBackend, global_matrix: np.ndarray, blocks: list, local: list) -> bool:
    expected = backend.zeros(global_matrix.shape)
    for (offset, n), m in zip(blocks, local):
        window = slice(offset, offset + n * n)
        expected[window, window] = m
    return backend.allclose(global_matrix, expected)


def decompose_blocks(E: TensorElement, workers: int | None = None) -> BlockDecomposition:
    """Split E along aligned block presentations of B and C, certify and untwist each block."""
    start = timer()
    B, C = E.left, E.right
    if B.blocks is None or C.blocks is None:
        raise PreconditionFailed("decomposition needs block presentations on both legs")
    if B.blocks != C.blocks:
        raise PreconditionFailed(f"block sizes differ: {B.blocks} vs {C.blocks}")
    _check_leakage(E)
    ranges = B.block_ranges()
    components = [_component(E, offset, n) for offset, n in ranges]
    results = run_jobs({alpha: (lambda c=c: _analyse_block(c)) for alpha, c in enumerate(components)}, workers)

    blocks = []
    for alpha, ((offset, n), component) in enumerate(zip(ranges, components)):
        cert, twist = results[alpha]
        if twist is None:
            raise PreconditionFailed(f"block {alpha + 1} rejected: {cert.reason}")
        blocks.append(BlockComponent(alpha + 1, n, component, cert, twist))

    backend = E.backend
    S, S_prime = derive_S(E), derive_Sprime(E)
    if not _restricts(backend, S.matrix, ranges, [b.certificate.S.matrix for b in blocks]):
        raise InternalInconsistency("S does not act block by block")
    if not _restricts(backend, S_prime.matrix, ranges, [b.certificate.S_prime.matrix for b in blocks]):
        raise InternalInconsistency("S' does not act block by block")
    if all(b.certificate.mode == CertificateMode.SEPARABILITY_IDEMPOTENT for b in blocks):
        _check_integrals_restrict(E, ranges, blocks)
    logging.info(f"decompose_blocks {len(blocks)} blocks of sizes {B.blocks} cost {timer() - start}s")
    return BlockDecomposition(blocks)


def _check_integrals_restrict(E: TensorElement, ranges: list, blocks: list) -> None:
    backend = E.backend
    whole = integral_data(E)
    local = [integral_data(b.element) for b in blocks]
    for name in ("sigma", "sigma_prime"):
        if not _restricts(backend, getattr(whole, name).matrix, ranges, [getattr(d, name).matrix for d in local]):
            raise InternalInconsistency(f"{name} does not act block by block")
    for name in ("phi", "psi"):
        glued = np.concatenate([getattr(d, name).covector for d in local])
        if not backend.allclose(getattr(whole, name).covector, glued):
            raise InternalInconsistency(f"{name} is not the sum of its block restrictions")
