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
"""Finite-dimensional unital algebras given by structure constants.

An algebra of dimension d is stored as a d x d x d array ``constants`` with
``b_i b_j = sum_k constants[i, j, k] b_k``. Elements are coefficient vectors,
functionals are covectors and linear maps are matrices acting on coefficient
vectors, all over the algebra's scalar backend.
"""

import itertools
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Any

import numpy as np

from sepcore.algebra.scalars import ScalarBackend, get_backend
from sepcore.errors import (
    AlgebraMismatch,
    AssociativityViolation,
    DegenerateProduct,
    InternalInconsistency,
    MixedBackends,
    NoBlockPresentation,
    NoStarStructure,
    NotAntiMultiplicative,
    NotBijective,
    NotInvertible,
    NotMultiplicative,
    NotUnital,
    PreconditionFailed,
)


@dataclass(frozen=True, eq=False)
class Algebra:
    backend: ScalarBackend
    constants: np.ndarray
    unit: np.ndarray
    labels: tuple
    star_matrix: np.ndarray | None = None
    blocks: tuple | None = None
    name: str = "A"

    @property
    def dim(self) -> int:
        return int(self.constants.shape[0])

    @property
    def has_star(self) -> bool:
        return self.star_matrix is not None

    def __repr__(self) -> str:
        return f"Algebra({self.name}, dim={self.dim}, mode={self.backend.mode})"

    def element(self, coeffs: Any) -> "AlgebraElement":
        vec = self.backend.array(coeffs)
        if vec.shape != (self.dim,):
            raise ValueError(f"{self.name}: expected {self.dim} coefficients, got shape {vec.shape}")
        return AlgebraElement(self, vec)

    def basis(self, key: int | str) -> "AlgebraElement":
        index = key if isinstance(key, int) else self.index(key)
        return AlgebraElement(self, self.backend.unit_vector(self.dim, index))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"{self.name} has no basis element {label!r}")

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, self.backend.zeros(self.dim))

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, self.unit.copy())

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.tensordot(np.tensordot(x, self.constants, axes=(0, 0)), y, axes=(0, 0))

    def multiply_out(self, coeffs: np.ndarray) -> np.ndarray:
        """Image of sum_ij coeffs[i, j] b_i (x) b_j under the multiplication map."""
        return np.tensordot(coeffs, self.constants, axes=([0, 1], [0, 1]))

    def left_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of y -> x y."""
        return np.tensordot(x, self.constants, axes=(0, 0)).T

    def right_matrix(self, y: np.ndarray) -> np.ndarray:
        """Matrix of x -> x y."""
        return np.tensordot(self.constants, y, axes=(1, 0)).T

    def star_vector(self, x: np.ndarray) -> np.ndarray:
        if self.star_matrix is None:
            raise NoStarStructure(self.name)
        return self.star_matrix @ self.backend.conj(x)

    def require_star(self) -> None:
        if self.star_matrix is None:
            raise NoStarStructure(self.name)

    def block_ranges(self) -> list:
        """(offset, n) for every block of the presentation."""
        if self.blocks is None:
            raise NoBlockPresentation(self.name)
        out, offset = [], 0
        for n in self.blocks:
            out.append((offset, n))
            offset += n * n
        return out

    def block_of(self, index: int) -> int:
        for alpha, (offset, n) in enumerate(self.block_ranges()):
            if offset <= index < offset + n * n:
                return alpha
        raise IndexError(index)

    def same_as(self, other: "Algebra") -> bool:
        if self is other:
            return True
        if self.dim != other.dim or self.backend.mode != other.backend.mode:
            return False
        if (self.star_matrix is None) != (other.star_matrix is None):
            return False
        if self.star_matrix is not None and not self.backend.allclose(self.star_matrix, other.star_matrix):
            return False
        return self.backend.allclose(self.unit, other.unit) and self.backend.allclose(self.constants, other.constants)

    def require_same(self, other: "Algebra") -> None:
        if not self.same_as(other):
            raise AlgebraMismatch(repr(self), repr(other))


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: Algebra
    coeffs: np.ndarray

    @property
    def backend(self) -> ScalarBackend:
        return self.algebra.backend

    def _coerce(self, other: Any) -> "AlgebraElement | None":
        if isinstance(other, AlgebraElement):
            self.algebra.require_same(other.algebra)
            return other
        return None

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        other = self._coerce(other)
        return AlgebraElement(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        other = self._coerce(other)
        return AlgebraElement(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, -self.coeffs)

    def __mul__(self, other: Any) -> "AlgebraElement":
        element = self._coerce(other)
        if element is not None:
            return AlgebraElement(self.algebra, self.algebra.multiply(self.coeffs, element.coeffs))
        return AlgebraElement(self.algebra, self.coeffs * self.backend.scalar(other))

    def __rmul__(self, other: Any) -> "AlgebraElement":
        return AlgebraElement(self.algebra, self.coeffs * self.backend.scalar(other))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement) or not self.algebra.same_as(other.algebra):
            return False
        return self.backend.allclose(self.coeffs, other.coeffs)

    __hash__ = None

    def star(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, self.algebra.star_vector(self.coeffs))

    def inverse(self) -> "AlgebraElement":
        return invert(self)

    def is_zero(self) -> bool:
        return not bool(self.backend.nonzero_mask(self.coeffs).any())

    def left_matrix(self) -> np.ndarray:
        return self.algebra.left_matrix(self.coeffs)

    def right_matrix(self) -> np.ndarray:
        return self.algebra.right_matrix(self.coeffs)

    def __repr__(self) -> str:
        terms = [f"({v})*{self.algebra.labels[i]}" for i, v in enumerate(self.coeffs)
                 if not self.backend.is_zero(v)]
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True, eq=False)
class LinearFunctional:
    algebra: Algebra
    covector: np.ndarray
    name: str = "f"

    @property
    def backend(self) -> ScalarBackend:
        return self.algebra.backend

    def __call__(self, x: AlgebraElement) -> Any:
        self.algebra.require_same(x.algebra)
        return self.covector @ x.coeffs

    def value(self, coeffs: np.ndarray) -> Any:
        return self.covector @ coeffs

    def __add__(self, other: "LinearFunctional") -> "LinearFunctional":
        self.algebra.require_same(other.algebra)
        return LinearFunctional(self.algebra, self.covector + other.covector, self.name)

    def __sub__(self, other: "LinearFunctional") -> "LinearFunctional":
        self.algebra.require_same(other.algebra)
        return LinearFunctional(self.algebra, self.covector - other.covector, self.name)

    def __rmul__(self, scalar: Any) -> "LinearFunctional":
        return LinearFunctional(self.algebra, self.covector * self.backend.scalar(scalar), self.name)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearFunctional) or not self.algebra.same_as(other.algebra):
            return False
        return self.backend.allclose(self.covector, other.covector)

    __hash__ = None

    def left_translate(self, x: AlgebraElement) -> "LinearFunctional":
        """The functional y -> f(x y)."""
        return LinearFunctional(self.algebra, self.covector @ x.left_matrix(), self.name)

    def right_translate(self, x: AlgebraElement) -> "LinearFunctional":
        """The functional y -> f(y x)."""
        return LinearFunctional(self.algebra, self.covector @ x.right_matrix(), self.name)

    def compose(self, linear_map: "LinearMap") -> "LinearFunctional":
        """f o linear_map, a functional on the source of the map."""
        self.algebra.require_same(linear_map.target)
        return LinearFunctional(linear_map.source, self.covector @ linear_map.matrix, self.name)

    def gram(self) -> np.ndarray:
        """F[i, j] = f(b_i b_j)."""
        return np.tensordot(self.algebra.constants, self.covector, axes=(2, 0))

    def kernel_witness(self) -> AlgebraElement | None:
        """A nonzero x with f(x y) = 0 for all y, if one exists."""
        null = self.backend.nullspace(self.gram().T)
        if null.shape[1] == 0:
            return None
        return AlgebraElement(self.algebra, null[:, 0].copy())

    def is_faithful(self) -> bool:
        return self.backend.rank(self.gram()) == self.algebra.dim

    def is_tracial(self) -> tuple | None:
        """None if f(xy) = f(yx) on all basis pairs, else the first failing pair."""
        g = self.gram()
        return self.backend.first_mismatch(g, g.T, axes=2)

    def __repr__(self) -> str:
        return f"LinearFunctional({self.name} on {self.algebra.name})"


@dataclass(frozen=True, eq=False)
class LinearMap:
    source: Algebra
    target: Algebra
    matrix: np.ndarray
    name: str = "f"
    multiplicative: bool = False
    anti_multiplicative: bool = False
    bijective: bool = False

    @classmethod
    def verified(cls, source: Algebra, target: Algebra, matrix: np.ndarray, name: str = "f",
                 multiplicative: bool = False, anti_multiplicative: bool = False,
                 bijective: bool = False) -> "LinearMap":
        """Build a map and verify every requested flag on all basis pairs."""
        if matrix.shape != (target.dim, source.dim):
            raise ValueError(f"{name}: matrix shape {matrix.shape} does not match {target.dim}x{source.dim}")
        out = cls(source, target, matrix, name, multiplicative, anti_multiplicative, bijective)
        if multiplicative:
            pair = out.homomorphism_defect(anti=False)
            if pair is not None:
                raise NotMultiplicative(*pair)
        if anti_multiplicative:
            pair = out.homomorphism_defect(anti=True)
            if pair is not None:
                raise NotAntiMultiplicative(*pair)
        if bijective:
            r = source.backend.rank(matrix)
            if r != source.dim or r != target.dim:
                raise NotBijective(r, source.dim)
        return out

    @property
    def backend(self) -> ScalarBackend:
        return self.source.backend

    def __call__(self, x: AlgebraElement) -> AlgebraElement:
        self.source.require_same(x.algebra)
        return AlgebraElement(self.target, self.matrix @ x.coeffs)

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        return self.matrix @ coeffs

    def compose(self, other: "LinearMap", name: str | None = None) -> "LinearMap":
        """self o other."""
        self.source.require_same(other.target)
        return LinearMap(other.source, self.target, self.matrix @ other.matrix,
                         name or f"{self.name}{other.name}",
                         multiplicative=(self.multiplicative and other.multiplicative)
                         or (self.anti_multiplicative and other.anti_multiplicative),
                         anti_multiplicative=(self.multiplicative and other.anti_multiplicative)
                         or (self.anti_multiplicative and other.multiplicative),
                         bijective=self.bijective and other.bijective)

    def inverse(self, name: str | None = None) -> "LinearMap":
        inv = self.backend.inverse(self.matrix)
        if inv is None:
            raise NotBijective(self.backend.rank(self.matrix), self.source.dim)
        return LinearMap(self.target, self.source, inv, name or f"{self.name}^-1",
                         self.multiplicative, self.anti_multiplicative, True)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearMap):
            return False
        return (self.source.same_as(other.source) and self.target.same_as(other.target)
                and self.backend.allclose(self.matrix, other.matrix))

    __hash__ = None

    def homomorphism_defect(self, anti: bool) -> tuple | None:
        """First basis pair (i, j) where f(b_i b_j) differs from f(b_i)f(b_j) (or f(b_j)f(b_i))."""
        m = self.matrix
        images = np.tensordot(self.source.constants, m, axes=(2, 1))
        partial = np.tensordot(m, self.target.constants, axes=(0, 0))
        products = np.tensordot(partial, m, axes=(1, 0)).transpose(0, 2, 1)
        if anti:
            products = products.transpose(1, 0, 2)
        scale = self.backend.product_scale(m.T, m.T, self.target.constants)
        return self.backend.first_mismatch(images, products, axes=2, scale=scale)

    def __repr__(self) -> str:
        return f"LinearMap({self.name}: {self.source.name} -> {self.target.name})"


def identity_map(a: Algebra, name: str = "id") -> LinearMap:
    return LinearMap(a, a, a.backend.eye(a.dim), name, multiplicative=True, bijective=True)


# validation

def _product_table(a: Algebra) -> dict:
    table = defaultdict(list)
    mask = a.backend.nonzero_mask(a.constants)
    for i, j, k in zip(*np.nonzero(mask)):
        table[int(i), int(j)].append((int(k), a.constants[i, j, k]))
    return table


def _times(table: dict, left: dict, right: dict, zero: Any) -> dict:
    out = {}
    for p, cp in left.items():
        for q, cq in right.items():
            for k, ck in table.get((p, q), ()):
                out[k] = out.get(k, zero) + cp * cq * ck
    return out


def _terms(backend: ScalarBackend, vec: np.ndarray) -> dict:
    return {i: v for i, v in enumerate(vec) if not backend.is_zero(v)}


def _same_terms(backend: ScalarBackend, x: dict, y: dict) -> bool:
    return all(backend.is_zero(x.get(k, backend.zero) - y.get(k, backend.zero)) for k in set(x) | set(y))


def _check_associative(a: Algebra, table: dict) -> None:
    """(b_i b_j) b_k against b_i (b_j b_k) on every basis triple.

    Float constants are compared one left factor at a time as d x d x d slabs;
    exact constants walk the sparse product table.
    """
    if a.backend.dtype is object:
        _check_associative_sparse(a, table)
        return
    c, d = a.constants, a.dim
    flat, stacked = c.reshape(d, d * d), c.reshape(d * d, d)
    scale = a.backend.product_scale(c, c)
    for i in range(d):
        lhs = (c[i] @ flat).reshape(d, d, d)        # (j, k, l): (b_i b_j) b_k
        rhs = (stacked @ c[i]).reshape(d, d, d)     # (j, k, l): b_i (b_j b_k)
        hit = a.backend.first_mismatch(lhs, rhs, axes=2, scale=scale)
        if hit is not None:
            raise AssociativityViolation(i, *hit)


def _check_associative_sparse(a: Algebra, table: dict) -> None:
    backend, one = a.backend, a.backend.one
    for i, j in itertools.product(range(a.dim), repeat=2):
        ij = {p: c for p, c in table.get((i, j), ())}
        for k in range(a.dim):
            lhs = _times(table, ij, {k: one}, backend.zero)
            rhs = _times(table, {i: one}, {p: c for p, c in table.get((j, k), ())}, backend.zero)
            if not _same_terms(backend, lhs, rhs):
                raise AssociativityViolation(i, j, k)


def _check_nondegenerate(a: Algebra) -> None:
    backend, d = a.backend, a.dim
    for side, stack, unit_op in (
        ("left", a.constants.reshape(d, d * d), a.right_matrix(a.unit)),
        ("right", a.constants.transpose(1, 0, 2).reshape(d, d * d), a.left_matrix(a.unit)),
    ):
        # x -> (x * unit) injective already forces x -> L_x injective
        if backend.rank(unit_op) == d:
            continue
        null = backend.nullspace(stack.T)
        if null.shape[1]:
            raise DegenerateProduct(AlgebraElement(a, null[:, 0].copy()), side)


def _check_unital(a: Algebra) -> None:
    eye = a.backend.eye(a.dim)
    for side, m in (("left", a.left_matrix(a.unit)), ("right", a.right_matrix(a.unit))):
        hit = a.backend.first_mismatch(m.T, eye)
        if hit is not None:
            raise NotUnital(hit[0], side)


def _check_star(a: Algebra, table: dict) -> None:
    backend, k = a.backend, a.star_matrix
    if k.shape != (a.dim, a.dim):
        raise ValueError(f"{a.name}: star matrix must be {a.dim}x{a.dim}")
    if not backend.allclose(k @ backend.conj(k), backend.eye(a.dim)):
        raise PreconditionFailed(f"{a.name}: star is not an involution")
    if not backend.allclose(a.star_vector(a.unit), a.unit):
        raise PreconditionFailed(f"{a.name}: star does not fix the unit")
    stars = [_terms(backend, k[:, i]) for i in range(a.dim)]
    for i, j in itertools.product(range(a.dim), repeat=2):
        lhs = _terms(backend, k @ backend.conj(a.constants[i, j, :]))
        rhs = _times(table, stars[j], stars[i], backend.zero)
        if not _same_terms(backend, lhs, rhs):
            raise PreconditionFailed(f"{a.name}: (b{i} b{j})* != b{j}* b{i}*", pair=(i, j))


def _validated(a: Algebra) -> Algebra:
    d = a.dim
    if a.constants.shape != (d, d, d) or a.unit.shape != (d,) or len(a.labels) != d:
        raise ValueError(f"{a.name}: inconsistent shapes {a.constants.shape}, {a.unit.shape}, {len(a.labels)} labels")
    table = _product_table(a)
    _check_associative(a, table)
    _check_nondegenerate(a)
    _check_unital(a)
    if a.star_matrix is not None:
        _check_star(a, table)
    return a


# constructors

def _unit_label(n: int, i: int, j: int) -> str:
    return f"e{i + 1}{j + 1}" if n < 10 else f"e{i + 1},{j + 1}"


@lru_cache(maxsize=None)
def _matrix_algebra(n: int, with_star: bool, backend: ScalarBackend) -> Algebra:
    d = n * n
    one = backend.one
    constants = backend.zeros((d, d, d))
    for i, j, l in itertools.product(range(n), repeat=3):
        constants[i * n + j, j * n + l, i * n + l] = one
    unit = backend.zeros(d)
    star = None
    for i in range(n):
        unit[i * n + i] = one
    if with_star:
        star = backend.zeros((d, d))
        for i, j in itertools.product(range(n), repeat=2):
            star[j * n + i, i * n + j] = one
    labels = tuple(_unit_label(n, i, j) for i in range(n) for j in range(n))
    return _validated(Algebra(backend, constants, unit, labels, star, (n,), f"M{n}"))


def make_matrix_algebra(n: int, with_star: bool = True, backend: ScalarBackend | None = None) -> Algebra:
    """M_n with matrix-unit basis e_ij (index i*n + j); star is the conjugate transpose."""
    if n < 1:
        raise ValueError(f"matrix size must be positive, got {n}")
    return _matrix_algebra(n, with_star, backend or get_backend())


def make_direct_sum(blocks: list, name: str | None = None) -> Algebra:
    if not blocks:
        raise PreconditionFailed("direct sum of no algebras")
    modes = [b.backend.mode for b in blocks]
    if len(set(modes)) > 1:
        raise MixedBackends(modes)
    backend = blocks[0].backend
    total = sum(b.dim for b in blocks)
    constants = backend.zeros((total, total, total))
    unit = backend.zeros(total)
    with_star = all(b.has_star for b in blocks)
    star = backend.zeros((total, total)) if with_star else None
    labels = []
    offset = 0
    for alpha, b in enumerate(blocks):
        sl = slice(offset, offset + b.dim)
        constants[sl, sl, sl] = b.constants
        unit[sl] = b.unit
        if with_star:
            star[sl, sl] = b.star_matrix
        labels.extend(f"{label}[{alpha + 1}]" for label in b.labels)
        offset += b.dim
    presentation = None
    if all(b.blocks is not None for b in blocks):
        presentation = tuple(n for b in blocks for n in b.blocks)
    name = name or "+".join(b.name for b in blocks)
    return _validated(Algebra(backend, constants, unit, tuple(labels), star, presentation, name))


def make_structure_constant_algebra(dim: int, constants: Any, unit: Any, star: Any = None,
                                    labels: Any = None, backend: ScalarBackend | None = None,
                                    name: str = "A") -> Algebra:
    backend = backend or get_backend()
    c = backend.array(constants)
    u = backend.array(unit)
    if c.shape != (dim, dim, dim):
        raise ValueError(f"{name}: constants must have shape {(dim, dim, dim)}, got {c.shape}")
    k = backend.array(star) if star is not None else None
    labels = tuple(labels) if labels is not None else tuple(f"b{i + 1}" for i in range(dim))
    return _validated(Algebra(backend, c, u, labels, k, None, name))


def transpose_anti_map(a: Algebra) -> LinearMap:
    """S0: e^alpha_ij -> e^alpha_ji, block by block."""
    backend = a.backend
    p = backend.zeros((a.dim, a.dim))
    for offset, n in a.block_ranges():
        for i, j in itertools.product(range(n), repeat=2):
            p[offset + j * n + i, offset + i * n + j] = backend.one
    s0 = LinearMap.verified(a, a, p, "S0", anti_multiplicative=True, bijective=True)
    if not backend.allclose(p @ p, backend.eye(a.dim)):
        raise InternalInconsistency("S0 o S0 != id")
    return s0


def invert(x: AlgebraElement) -> AlgebraElement:
    backend, a = x.backend, x.algebra
    inv = backend.inverse(x.left_matrix())
    if inv is None:
        raise NotInvertible(x)
    y = AlgebraElement(a, inv @ a.unit)
    if not (x * y == a.one() and y * x == a.one()):
        raise NotInvertible(x)
    return y


def trace_functional(a: Algebra) -> LinearFunctional:
    """Block-wise matrix trace, Tr(1) = sum of the block sizes."""
    cov = a.backend.zeros(a.dim)
    for offset, n in a.block_ranges():
        for i in range(n):
            cov[offset + i * n + i] = a.backend.one
    return LinearFunctional(a, cov, "Tr")


def element_from_blocks(a: Algebra, matrices: list) -> AlgebraElement:
    """Element of a multi-matrix algebra from one square matrix per block."""
    ranges = a.block_ranges()
    if len(matrices) != len(ranges):
        raise ValueError(f"{a.name}: expected {len(ranges)} blocks, got {len(matrices)}")
    coeffs = a.backend.zeros(a.dim)
    for (offset, n), m in zip(ranges, matrices):
        m = a.backend.array(m)
        if m.shape != (n, n):
            raise ValueError(f"{a.name}: block of size {n} given a {m.shape} matrix")
        coeffs[offset:offset + n * n] = m.reshape(-1)
    return AlgebraElement(a, coeffs)


def element_from_matrix(a: Algebra, matrix: Any) -> AlgebraElement:
    return element_from_blocks(a, [matrix])


def block_matrices(x: AlgebraElement) -> list:
    return [x.coeffs[offset:offset + n * n].reshape(n, n) for offset, n in x.algebra.block_ranges()]


def element_to_matrix(x: AlgebraElement) -> np.ndarray:
    mats = block_matrices(x)
    if len(mats) != 1:
        raise PreconditionFailed(f"{x.algebra.name} is not a single matrix block")
    return mats[0]


def conjugation_map(r: AlgebraElement, name: str = "Ad") -> LinearMap:
    """b -> r b r^-1 as a multiplicative bijection."""
    r_inv = invert(r)
    m = r.left_matrix() @ r_inv.right_matrix()
    return LinearMap(r.algebra, r.algebra, m, name, multiplicative=True, bijective=True)
