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
"""Elements of B (x) C stored as dim(B) x dim(C) coefficient matrices.

``T[i, j]`` is the coefficient of ``b_i (x) c_j``. The one-sided products are
plain matrix products with left/right multiplication matrices:

    (x(x)1)E = L_x T      E(x(x)1) = R_x T
    (1(x)y)E = T L_y^T    E(1(x)y) = T R_y^T
"""

from dataclasses import dataclass
from typing import Any

import numpy as np
from strenum import StrEnum

from sepcore.algebra.algebra_core import Algebra, AlgebraElement, LinearFunctional, LinearMap
from sepcore.algebra.scalars import ScalarBackend
from sepcore.errors import AlgebraMismatch, MixedBackends


class Position(StrEnum):
    LEFT_OF_B = "left_of_b"    # (x (x) 1) E
    RIGHT_OF_B = "right_of_b"  # E (x (x) 1)
    LEFT_OF_C = "left_of_c"    # (1 (x) x) E
    RIGHT_OF_C = "right_of_c"  # E (1 (x) x)


@dataclass(frozen=True, eq=False)
class TensorElement:
    left: Algebra
    right: Algebra
    coeffs: np.ndarray
    oracle: Any = None

    def __post_init__(self):
        if self.left.backend.mode != self.right.backend.mode:
            raise MixedBackends([self.left.backend.mode, self.right.backend.mode])
        if self.coeffs.shape != (self.left.dim, self.right.dim):
            raise ValueError(f"coefficient matrix {self.coeffs.shape} does not match "
                             f"{self.left.dim}x{self.right.dim}")

    @property
    def backend(self) -> ScalarBackend:
        return self.left.backend

    def with_coeffs(self, coeffs: np.ndarray) -> "TensorElement":
        return TensorElement(self.left, self.right, coeffs)

    def require_pair(self, other: "TensorElement") -> None:
        if not (self.left.same_as(other.left) and self.right.same_as(other.right)):
            raise AlgebraMismatch(f"{self.left.name}(x){self.right.name}",
                                  f"{other.left.name}(x){other.right.name}")

    def __add__(self, other: "TensorElement") -> "TensorElement":
        self.require_pair(other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        self.require_pair(other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, other: Any) -> "TensorElement":
        if isinstance(other, TensorElement):
            return tensor_mul(self, other)
        return self.with_coeffs(self.coeffs * self.backend.scalar(other))

    def __rmul__(self, other: Any) -> "TensorElement":
        return self.with_coeffs(self.coeffs * self.backend.scalar(other))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorElement):
            return False
        if not (self.left.same_as(other.left) and self.right.same_as(other.right)):
            return False
        return self.backend.allclose(self.coeffs, other.coeffs)

    __hash__ = None

    def is_zero(self) -> bool:
        return not bool(self.backend.nonzero_mask(self.coeffs).any())

    def star(self) -> "TensorElement":
        """Componentwise involution (b (x) c)* = b* (x) c*."""
        self.left.require_star()
        self.right.require_star()
        return self.with_coeffs(self.left.star_matrix @ self.backend.conj(self.coeffs) @ self.right.star_matrix.T)

    def __repr__(self) -> str:
        terms = []
        for i, j in zip(*np.nonzero(self.backend.nonzero_mask(self.coeffs))):
            terms.append(f"({self.coeffs[i, j]})*{self.left.labels[i]}(x){self.right.labels[j]}")
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True, eq=False)
class Subspace:
    algebra: Algebra
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    def is_whole(self) -> bool:
        return self.dim == self.algebra.dim

    def contains(self, x: AlgebraElement) -> bool:
        backend = self.algebra.backend
        stacked = np.concatenate([self.basis, x.coeffs.reshape(-1, 1)], axis=1)
        return backend.rank(stacked) == self.dim

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim} of {self.algebra.name})"


def simple_tensor(b: AlgebraElement, c: AlgebraElement) -> TensorElement:
    return TensorElement(b.algebra, c.algebra, np.multiply.outer(b.coeffs, c.coeffs))


def unit_tensor(left: Algebra, right: Algebra) -> TensorElement:
    return simple_tensor(left.one(), right.one())


def tensor_mul(x: TensorElement, y: TensorElement) -> TensorElement:
    x.require_pair(y)
    partial = np.tensordot(x.coeffs, x.left.constants, axes=(0, 0))   # (j, i', k)
    partial = np.tensordot(partial, y.coeffs, axes=(1, 0))             # (j, k, j')
    return x.with_coeffs(np.tensordot(partial, x.right.constants, axes=([0, 2], [0, 1])))


def left_leg(E: TensorElement) -> Subspace:
    return Subspace(E.left, E.backend.column_basis(E.coeffs))


def right_leg(E: TensorElement) -> Subspace:
    return Subspace(E.right, E.backend.column_basis(E.coeffs.T))


def is_full(E: TensorElement) -> bool:
    r = E.backend.rank(E.coeffs)
    return r == E.left.dim and r == E.right.dim


def slice_left(omega: LinearFunctional, E: TensorElement) -> AlgebraElement:
    """(omega (x) iota) E, an element of C."""
    omega.algebra.require_same(E.left)
    return AlgebraElement(E.right, omega.covector @ E.coeffs)


def slice_right(E: TensorElement, omega: LinearFunctional) -> AlgebraElement:
    """(iota (x) omega) E, an element of B."""
    omega.algebra.require_same(E.right)
    return AlgebraElement(E.left, E.coeffs @ omega.covector)


def mult_sided(E: TensorElement, position: Position | str, x: AlgebraElement) -> TensorElement:
    position = Position(position)
    if position in (Position.LEFT_OF_B, Position.RIGHT_OF_B):
        E.left.require_same(x.algebra)
        m = x.left_matrix() if position == Position.LEFT_OF_B else x.right_matrix()
        return E.with_coeffs(m @ E.coeffs)
    E.right.require_same(x.algebra)
    m = x.left_matrix() if position == Position.LEFT_OF_C else x.right_matrix()
    return E.with_coeffs(E.coeffs @ m.T)


def swap_and_map(E: TensorElement, f: LinearMap, g: LinearMap) -> TensorElement:
    """Flip of (f (x) g)E, returned in B (x) C; f: B -> C and g: C -> B."""
    f.source.require_same(E.left)
    f.target.require_same(E.right)
    g.source.require_same(E.right)
    g.target.require_same(E.left)
    return E.with_coeffs(g.matrix @ E.coeffs.T @ f.matrix.T)
