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
"""Checks for the involutive case: B and C carry a star and E* = E.

With K the matrix of the star on basis coefficients, x* = K conj(x).
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from sepcore import settings
from sepcore.algebra.algebra_core import AlgebraElement, LinearFunctional, LinearMap
from sepcore.algebra.tensor_ops import TensorElement
from sepcore.constructions.random_instances import make_rng, random_pairs
from sepcore.engine.checks import CheckResult, column_witnesses
from sepcore.engine.integrals import IntegralData, integral_data
from sepcore.errors import GramNotPositiveDefinite, InequalityViolation, InternalInconsistency


@dataclass(frozen=True)
class PositivityResult:
    positive: bool
    gram: np.ndarray

    def __bool__(self) -> bool:
        return self.positive


@dataclass(frozen=True)
class GNSData:
    """Gram matrix of <x, y> = f(x* y), the operators pi(b_k) = L_{b_k}, and the sampled norm bound."""
    gram: np.ndarray
    operators: np.ndarray
    bound: CheckResult


def check_self_adjoint(E: TensorElement) -> CheckResult:
    adjoint = E.star()
    if adjoint == E:
        return CheckResult("self_adjoint", True)
    hit = E.backend.first_mismatch(adjoint.coeffs, E.coeffs, axes=2)
    return CheckResult("self_adjoint", False,
                       (f"E* != E at ({E.left.labels[hit[0]]}, {E.right.labels[hit[1]]})",))


def check_star_antipode(S: LinearMap, S_prime: LinearMap) -> CheckResult:
    """S'(S(b)*)* = b and S(S'(c)*)* = c on the bases."""
    B, C = S.source, S.target
    B.require_star()
    C.require_star()
    backend = B.backend
    conj = backend.conj
    on_b = B.star_matrix @ conj(S_prime.matrix) @ conj(C.star_matrix) @ S.matrix
    on_c = C.star_matrix @ conj(S.matrix) @ conj(B.star_matrix) @ S_prime.matrix
    scale = backend.product_scale(S.matrix, S_prime.matrix, B.star_matrix, C.star_matrix)
    witnesses = column_witnesses(B, on_b.T, backend.eye(B.dim), "S'(S({label})*)* != {label}", scale)
    witnesses += column_witnesses(C, on_c.T, backend.eye(C.dim), "S(S'({label})*)* != {label}", scale)
    return CheckResult("star_antipode", not witnesses, witnesses)


def check_integral_star(f: LinearFunctional, modular: LinearMap | None = None) -> CheckResult:
    """f(x*) = conj(f(x)); with a modular automorphism also a(x*) = a^-1(x)*."""
    a = f.algebra
    a.require_star()
    backend = a.backend
    witnesses = column_witnesses(a, f.covector @ a.star_matrix, backend.conj(f.covector),
                                 f"{f.name}({{label}}*) != conj({f.name}({{label}}))")
    if modular is not None:
        inverse = modular.inverse()
        lhs = modular.matrix @ a.star_matrix
        rhs = a.star_matrix @ backend.conj(inverse.matrix)
        scale = backend.product_scale(modular.matrix, inverse.matrix, a.star_matrix)
        witnesses += column_witnesses(a, lhs.T, rhs.T, f"{modular.name}({{label}}*) != {modular.name}^-1({{label}})*",
                                      scale)
    return CheckResult(f"{f.name}_star", not witnesses, witnesses)


def sesquilinear_gram(f: LinearFunctional) -> np.ndarray:
    """G[i, j] = f(b_i* b_j)."""
    a = f.algebra
    a.require_star()
    return a.star_matrix.T @ f.gram()


def check_positive(f: LinearFunctional) -> PositivityResult:
    gram = sesquilinear_gram(f)
    return PositivityResult(f.backend.is_psd(gram), gram)


def check_positivity_transfer(E: TensorElement, data: IntegralData | None = None) -> CheckResult:
    """psi(x* y) = phi(S(x)* S(y)) on all basis pairs; with x = y this carries positivity from phi to psi."""
    data = data or integral_data(E)
    C = E.right
    S = data.S.matrix
    lhs = sesquilinear_gram(data.psi)
    gram = data.phi.gram()
    rhs = (C.star_matrix @ E.backend.conj(S)).T @ gram @ S
    scale = E.backend.product_scale(S.T, C.star_matrix, gram, S)
    hit = E.backend.first_mismatch(lhs, rhs, axes=2, scale=scale)
    if hit is None:
        return CheckResult("positivity_transfer", True)
    i, j = hit
    return CheckResult("positivity_transfer", False,
                       (f"psi({E.left.labels[i]}* {E.left.labels[j]}) != phi(S({E.left.labels[i]})* S({E.left.labels[j]}))",))


def _cauchy_terms(f: LinearFunctional, c: AlgebraElement, c1: AlgebraElement) -> tuple:
    # f(c* c1* c1 c) <= f(c1 c1*) f(c* c)
    cs, c1s = c.star(), c1.star()
    lhs = f(cs * c1s * c1 * c)
    rhs = f(c1 * c1s) * f(cs * c)
    return lhs, rhs


def check_cauchy_bound(E: TensorElement, samples: int | None = None, seed: int | None = None,
                       data: IntegralData | None = None) -> CheckResult:
    """The bound f(c* c1* c1 c) <= f(c1 c1*) f(c* c) for both integrals.

    Checked on all basis pairs and on `samples` random rational pairs per side.
    Raises InequalityViolation on the first failure.
    """
    data = data or integral_data(E)
    samples = settings.CAUCHY_SAMPLES if samples is None else samples
    rng = make_rng(seed)
    checked = 0
    for side, f in (("C", data.phi), ("B", data.psi)):
        a = f.algebra
        basis = [a.basis(k) for k in range(a.dim)]
        pairs = list(itertools.product(basis, repeat=2)) + random_pairs(a, rng, samples)
        for index, (c, c1) in enumerate(pairs):
            lhs, rhs = _cauchy_terms(f, c, c1)
            if not f.backend.real_le(lhs, rhs):
                raise InequalityViolation(side, lhs, rhs, (index, repr(c), repr(c1)))
            checked += 1
    logging.debug(f"cauchy bound held on {checked} pairs")
    return CheckResult("cauchy_bound", True)


def gns_data(f: LinearFunctional, samples: int | None = None, seed: int | None = None) -> GNSData:
    """GNS data of a positive faithful functional.

    pi(c) acts by left multiplication; its adjoint for <x, y> = f(x* y) is
    G^-1 pi(c)^H G and must equal pi(c*).
    """
    a = f.algebra
    backend = a.backend
    gram = sesquilinear_gram(f)
    if not backend.is_psd(gram) or backend.rank(gram) < a.dim:
        raise GramNotPositiveDefinite(f"Gram matrix of {f.name} is not positive definite")
    gram_inv = backend.inverse(gram)
    operators = np.stack([a.left_matrix(backend.unit_vector(a.dim, k)) for k in range(a.dim)])
    scale = backend.product_scale(gram_inv, operators, gram)
    for k in range(a.dim):
        adjoint = gram_inv @ backend.conj(operators[k]).T @ gram
        if not backend.allclose(adjoint, a.left_matrix(a.star_vector(backend.unit_vector(a.dim, k))), scale):
            raise InternalInconsistency(f"pi({a.labels[k]})* != pi({a.labels[k]}*) in the GNS inner product")

    samples = settings.CAUCHY_SAMPLES if samples is None else samples
    basis = [a.basis(k) for k in range(a.dim)]
    pairs = list(itertools.product(basis, repeat=2)) + random_pairs(a, make_rng(seed), samples)
    witnesses = []
    for c, c2 in pairs:
        # |pi(c) L(c2)|^2 <= f(c c*) |L(c2)|^2
        image = c * c2
        lhs = f(image.star() * image)
        rhs = f(c * c.star()) * f(c2.star() * c2)
        if not backend.real_le(lhs, rhs):
            witnesses.append(f"|pi({c})L({c2})|^2 = {lhs} > {rhs}")
    return GNSData(gram, operators, CheckResult("gns_bound", not witnesses, tuple(witnesses)))
