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
"""Reduced duals of B and C.

The B-dual consists of the functionals psi(b .) and the C-dual of phi(. c).
Both transforms are bijective because the integrals are faithful, so a dual
element is stored with its covector and its representing element. There is
no product on the duals, only the pairing through E and the star.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np
from strenum import StrEnum

from sepcore.algebra.algebra_core import AlgebraElement, LinearMap
from sepcore.algebra.tensor_ops import TensorElement
from sepcore.engine.integrals import IntegralData, integral_data
from sepcore.errors import InternalInconsistency, SideMismatch


class DualSide(StrEnum):
    B = "b"
    C = "c"


class DualityContext:
    """Integrals and antipodal maps of one element, with the inverses the duals need."""

    def __init__(self, E: TensorElement, data: IntegralData | None = None):
        self.E = E
        self.data = data or integral_data(E)
        self.S_inv: LinearMap = self.data.S.inverse("S^-1")
        self.S_prime_inv: LinearMap = self.data.S_prime.inverse("S'^-1")
        # covector of b^ is gram_psi^T b, covector of c^ is gram_phi c
        self.gram_psi = self.data.psi.gram()
        self.gram_phi = self.data.phi.gram()

    @property
    def backend(self):
        return self.E.backend

    def algebra(self, side: DualSide):
        return self.E.left if side == DualSide.B else self.E.right


@dataclass(frozen=True, eq=False)
class DualElement:
    side: DualSide
    representing: AlgebraElement
    covector: np.ndarray
    context: DualityContext

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DualElement) or other.side != self.side:
            return False
        return self.context.backend.allclose(self.covector, other.covector)

    __hash__ = None

    def __call__(self, x: AlgebraElement) -> Any:
        self.context.algebra(self.side).require_same(x.algebra)
        return self.covector @ x.coeffs

    def __repr__(self) -> str:
        return f"DualElement({self.side}, ({self.representing})^)"


def fourier(x: AlgebraElement, side: DualSide | str, context: DualityContext) -> DualElement:
    """b^ = psi(b .) on the B side, c^ = phi(. c) on the C side."""
    side = DualSide(side)
    context.algebra(side).require_same(x.algebra)
    if side == DualSide.B:
        covector = context.gram_psi.T @ x.coeffs
    else:
        covector = context.gram_phi @ x.coeffs
    return DualElement(side, x, covector, context)


def from_covector(covector: np.ndarray, side: DualSide | str, context: DualityContext) -> DualElement:
    """The dual element with the given covector; its representing element is solved for."""
    side = DualSide(side)
    backend = context.backend
    if side == DualSide.B:
        coeffs = backend.solve(context.gram_psi.T, covector)
    else:
        coeffs = backend.solve(context.gram_phi, covector)
    return DualElement(side, AlgebraElement(context.algebra(side), coeffs), covector, context)


def _require_sides(b_hat: DualElement, c_hat: DualElement) -> None:
    if b_hat.side != DualSide.B or c_hat.side != DualSide.C:
        raise SideMismatch(f"pairing needs a B-dual and a C-dual element, got {b_hat.side} and {c_hat.side}")
    if b_hat.context is not c_hat.context:
        raise SideMismatch("dual elements come from different duality contexts")


def pairing(b_hat: DualElement, c_hat: DualElement) -> Any:
    """(psi (x) phi)((b (x) 1) E (1 (x) c)), checked against phi(S'^-1(b) c) and psi(b S^-1(c))."""
    _require_sides(b_hat, c_hat)
    ctx = b_hat.context
    data, backend = ctx.data, ctx.backend
    b, c = b_hat.representing, c_hat.representing
    value = data.psi.covector @ (b.left_matrix() @ ctx.E.coeffs @ c.right_matrix().T) @ data.phi.covector
    via_phi = data.phi(ctx.S_prime_inv(b) * c)
    via_psi = data.psi(b * ctx.S_inv(c))
    if not (backend.equal(value, via_phi) and backend.equal(value, via_psi)):
        raise InternalInconsistency(f"pairing reductions disagree: {value}, {via_phi}, {via_psi}")
    return value


def dual_antipode(omega: DualElement) -> DualElement:
    """Precompose with S (C-dual to B-dual) or with S' (B-dual to C-dual)."""
    ctx = omega.context
    if omega.side == DualSide.C:
        image = fourier(ctx.S_inv(omega.representing), DualSide.B, ctx)
        covector = omega.covector @ ctx.data.S.matrix
    else:
        image = fourier(ctx.S_prime_inv(omega.representing), DualSide.C, ctx)
        covector = omega.covector @ ctx.data.S_prime.matrix
    if not ctx.backend.allclose(covector, image.covector):
        raise InternalInconsistency(f"dual antipode of {omega} does not match its representing element")
    return image


def _star_covector(omega: DualElement) -> np.ndarray:
    ctx = omega.context
    conj = ctx.backend.conj
    if omega.side == DualSide.C:
        # w*(b) = conj(w(S(b)*))
        return conj(omega.covector) @ conj(ctx.E.right.star_matrix) @ ctx.data.S.matrix
    # w*(c) = conj(w(S'(c)*))
    return conj(omega.covector) @ conj(ctx.E.left.star_matrix) @ ctx.data.S_prime.matrix


def dual_star(omega: DualElement, check_involution: bool = True) -> DualElement:
    """The involution between the duals: c^* = (S'(c*))^ and b^* = (S(b*))^."""
    ctx = omega.context
    ctx.E.left.require_star()
    ctx.E.right.require_star()
    x = omega.representing
    if omega.side == DualSide.C:
        image = fourier(ctx.data.S_prime(x.star()), DualSide.B, ctx)
    else:
        image = fourier(ctx.data.S(x.star()), DualSide.C, ctx)
    if not ctx.backend.allclose(_star_covector(omega), image.covector):
        raise InternalInconsistency(f"star of {omega} does not match its representing element")
    if check_involution and dual_star(image, check_involution=False) != omega:
        raise InternalInconsistency(f"star is not involutive on {omega}")
    return image


def plancherel_form(c1_hat: DualElement, c2_hat: DualElement) -> Any:
    """<E, (c2^)* (x) c1^>, equal to phi(c2* c1)."""
    if c1_hat.side != DualSide.C or c2_hat.side != DualSide.C:
        raise SideMismatch("plancherel_form takes two C-dual elements")
    ctx = c1_hat.context
    value = pairing(dual_star(c2_hat), c1_hat)
    expected = ctx.data.phi(c2_hat.representing.star() * c1_hat.representing)
    if not ctx.backend.equal(value, expected):
        raise InternalInconsistency(f"Plancherel identity fails: {value} != {expected}")
    return value


def plancherel_form_b(b1_hat: DualElement, b2_hat: DualElement) -> Any:
    """<E, b1^ (x) (b2^)*>, equal to psi(b1 b2*)."""
    if b1_hat.side != DualSide.B or b2_hat.side != DualSide.B:
        raise SideMismatch("plancherel_form_b takes two B-dual elements")
    ctx = b1_hat.context
    value = pairing(b1_hat, dual_star(b2_hat))
    expected = ctx.data.psi(b1_hat.representing * b2_hat.representing.star())
    if not ctx.backend.equal(value, expected):
        raise InternalInconsistency(f"Plancherel identity fails: {value} != {expected}")
    return value
