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
"""Scalar backends.

Two interchangeable backends share one interface:

* ``ExactBackend`` stores Gaussian rationals (sympy ``QQ_I`` elements) in numpy
  object arrays and does its linear algebra with ``DomainMatrix``. Equality is
  literal.
* ``FloatBackend`` stores complex128 arrays, uses ``numpy.linalg`` and compares
  with a tolerance relative to the magnitude of the operands.
"""

from fractions import Fraction
from functools import lru_cache
from typing import Any

import numpy as np
from strenum import StrEnum
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from sepcore import settings
from sepcore.errors import NoSolution, UnderdeterminedSystem


class ScalarMode(StrEnum):
    EXACT = "exact"
    FLOAT = "float64"


def to_fraction(value: Any) -> Fraction:
    """Read a real rational from an int, Fraction, ``"p/q"`` string, float or QQ element."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.replace(" ", ""))
    if isinstance(value, (float, np.floating)):
        return Fraction(float(value))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot read {value!r} as a rational number")


def _qq(value: Any) -> Any:
    f = to_fraction(value)
    return QQ(f.numerator, f.denominator)


def _qq_to_float(value: Any) -> float:
    return int(value.numerator) / int(value.denominator)


def _object_array(rows: list, shape: tuple) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            out[i, j] = v
    return out


class ScalarBackend:
    mode: ScalarMode
    dtype: Any

    def scalar(self, value: Any) -> Any:
        raise NotImplementedError

    def array(self, values: Any) -> np.ndarray:
        raise NotImplementedError

    def rational(self, numerator: int, denominator: int = 1) -> Any:
        return self.scalar(Fraction(numerator, denominator))

    @property
    def zero(self) -> Any:
        return self.scalar(0)

    @property
    def one(self) -> Any:
        return self.scalar(1)

    def zeros(self, shape: Any) -> np.ndarray:
        return np.full(shape, self.zero, dtype=self.dtype)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def unit_vector(self, n: int, index: int) -> np.ndarray:
        out = self.zeros(n)
        out[index] = self.one
        return out

    def equal(self, a: Any, b: Any) -> bool:
        return self.allclose(np.asarray(a, dtype=self.dtype), np.asarray(b, dtype=self.dtype))

    def nonzero_mask(self, arr: np.ndarray) -> np.ndarray:
        return np.vectorize(lambda v: not self.is_zero(v), otypes=[bool])(arr) if arr.size else np.zeros(arr.shape, bool)

    def leading_index(self, arr: np.ndarray) -> int | None:
        """Flat index of the first entry that is not zero, or None."""
        for idx, v in enumerate(np.ravel(arr)):
            if not self.is_zero(v):
                return idx
        return None

    def is_hermitian(self, m: np.ndarray) -> bool:
        return self.allclose(m, self.conj(m).T)

    def first_mismatch(self, a: np.ndarray, b: np.ndarray, axes: int = 1, scale: float = 1.0) -> tuple | None:
        """Index (over the leading `axes` axes) of the first place where `a` and `b` differ.

        `scale` bounds the magnitude of the products `a` and `b` were computed from
        (see product_scale); only the float backend uses it.
        """
        mask = self.mismatch_mask(a, b, scale)
        if mask.ndim > axes:
            mask = mask.reshape(mask.shape[:axes] + (-1,)).any(axis=-1)
        hits = np.argwhere(mask)
        if len(hits) == 0:
            return None
        return tuple(int(v) for v in hits[0])

    def trace(self, m: np.ndarray) -> Any:
        total = self.zero
        for i in range(m.shape[0]):
            total = total + m[i, i]
        return total

    # backend specific
    def conj(self, arr: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def is_zero(self, value: Any) -> bool:
        raise NotImplementedError

    def allclose(self, a: np.ndarray, b: np.ndarray, scale: float = 1.0) -> bool:
        raise NotImplementedError

    def mismatch_mask(self, a: Any, b: Any, scale: float = 1.0) -> np.ndarray:
        raise NotImplementedError

    def product_scale(self, *factors: Any) -> float:
        return 1.0

    def to_complex(self, value: Any) -> complex:
        raise NotImplementedError

    def export(self, value: Any) -> Any:
        raise NotImplementedError

    def is_real(self, value: Any) -> bool:
        raise NotImplementedError

    def real_le(self, a: Any, b: Any) -> bool:
        raise NotImplementedError

    def rank(self, m: np.ndarray) -> int:
        raise NotImplementedError

    def column_basis(self, m: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def nullspace(self, m: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def solve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse(self, m: np.ndarray) -> np.ndarray | None:
        n = m.shape[0]
        if m.shape != (n, n) or self.rank(m) < n:
            return None
        return self.solve(m, self.eye(n))

    def is_psd(self, m: np.ndarray) -> bool:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


class ExactBackend(ScalarBackend):
    mode = ScalarMode.EXACT
    dtype = object

    def scalar(self, value: Any) -> Any:
        if QQ_I.of_type(value):
            return value
        if isinstance(value, (complex, np.complexfloating)):
            return QQ_I(_qq(value.real), _qq(value.imag))
        if isinstance(value, (tuple, list)):
            if len(value) != 2:
                raise ValueError(f"complex literal must be a [re, im] pair, got {value!r}")
            return QQ_I(_qq(value[0]), _qq(value[1]))
        return QQ_I(_qq(value), QQ.zero)

    def array(self, values: Any) -> np.ndarray:
        src = np.asarray(values, dtype=object)
        out = np.empty(src.shape, dtype=object)
        for idx in np.ndindex(src.shape):
            out[idx] = self.scalar(src[idx])
        return out

    @property
    def zero(self) -> Any:
        return QQ_I.zero

    @property
    def one(self) -> Any:
        return QQ_I.one

    def conj(self, arr: Any) -> Any:
        if not isinstance(arr, np.ndarray):
            z = QQ_I.convert(arr)
            return QQ_I(z.x, -z.y)
        out = np.empty(arr.shape, dtype=object)
        for idx in np.ndindex(arr.shape):
            z = QQ_I.convert(arr[idx])
            out[idx] = QQ_I(z.x, -z.y)
        return out

    def is_zero(self, value: Any) -> bool:
        return not value

    def allclose(self, a: np.ndarray, b: np.ndarray, scale: float = 1.0) -> bool:
        if np.shape(a) != np.shape(b):
            return False
        diff = np.asarray(a, dtype=object) - np.asarray(b, dtype=object)
        return not any(bool(v) for v in np.ravel(diff))

    def mismatch_mask(self, a: Any, b: Any, scale: float = 1.0) -> np.ndarray:
        diff = np.asarray(a, dtype=object) - np.asarray(b, dtype=object)
        out = np.zeros(diff.shape, dtype=bool)
        for idx in np.ndindex(diff.shape):
            out[idx] = bool(diff[idx])
        return out

    def to_complex(self, value: Any) -> complex:
        z = QQ_I.convert(value)
        return complex(_qq_to_float(z.x), _qq_to_float(z.y))

    def export(self, value: Any) -> Any:
        z = QQ_I.convert(value)
        re = str(to_fraction(z.x))
        if not z.y:
            return re
        return [re, str(to_fraction(z.y))]

    def is_real(self, value: Any) -> bool:
        return not QQ_I.convert(value).y

    def real_le(self, a: Any, b: Any) -> bool:
        d = QQ_I.convert(b) - QQ_I.convert(a)
        return bool(not d.y and d.x >= 0)

    def _dm(self, m: np.ndarray) -> DomainMatrix:
        rows = [[QQ_I.convert(v) for v in row] for row in m.tolist()]
        return DomainMatrix(rows, m.shape, QQ_I)

    def rank(self, m: np.ndarray) -> int:
        if m.size == 0:
            return 0
        return int(self._dm(m).rank())

    def column_basis(self, m: np.ndarray) -> np.ndarray:
        if m.size == 0:
            return self.zeros((m.shape[0], 0))
        _, pivots = self._dm(m).rref()
        return m[:, list(pivots)]

    def nullspace(self, m: np.ndarray) -> np.ndarray:
        n = m.shape[1]
        if m.shape[0] == 0:
            return self.eye(n)
        ns = self._dm(m).nullspace()
        k = ns.shape[0]
        if k == 0:
            return self.zeros((n, 0))
        return _object_array(ns.to_list(), (k, n)).T.copy()

    def solve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        vector = b.ndim == 1
        rhs = b.reshape(-1, 1) if vector else b
        n = a.shape[1]
        reduced, pivots = self._dm(np.concatenate([a, rhs], axis=1)).rref()
        rows = reduced.to_list()
        inconsistent = [c for row in rows if all(not v for v in row[:n])
                        for c, v in enumerate(row[n:]) if v]
        if inconsistent:
            raise NoSolution(min(inconsistent))
        lead = [p for p in pivots if p < n]
        if len(lead) < n:
            raise UnderdeterminedSystem(n - len(lead))
        x = self.zeros((n, rhs.shape[1]))
        for r, p in enumerate(pivots):
            for c, v in enumerate(rows[r][n:]):
                x[p, c] = v
        return x[:, 0].copy() if vector else x

    def is_psd(self, m: np.ndarray) -> bool:
        """Hermitian Gaussian pivoting: eliminate on positive diagonal pivots only."""
        if not self.is_hermitian(m):
            return False
        a = [[QQ_I.convert(v) for v in row] for row in m.tolist()]
        remaining = list(range(len(a)))
        while remaining:
            if any(a[k][k].x < 0 for k in remaining):
                return False
            positive = [k for k in remaining if a[k][k].x > 0]
            if not positive:
                return all(not a[i][j] for i in remaining for j in remaining)
            p = positive[0]
            remaining.remove(p)
            pivot = a[p][p]
            for i in remaining:
                factor = a[i][p] / pivot
                if not factor:
                    continue
                for j in remaining:
                    a[i][j] = a[i][j] - factor * a[p][j]
        return True


class FloatBackend(ScalarBackend):
    mode = ScalarMode.FLOAT
    dtype = complex

    def __init__(self, tol: float):
        self.tol = tol

    def scalar(self, value: Any) -> Any:
        if QQ_I.of_type(value):
            return complex(_qq_to_float(value.x), _qq_to_float(value.y))
        if isinstance(value, (tuple, list)):
            if len(value) != 2:
                raise ValueError(f"complex literal must be a [re, im] pair, got {value!r}")
            return complex(float(to_fraction(value[0])), float(to_fraction(value[1])))
        if isinstance(value, (complex, np.complexfloating)):
            return complex(value)
        return complex(float(to_fraction(value)))

    def array(self, values: Any) -> np.ndarray:
        src = np.asarray(values)
        if src.dtype.kind in "biufc":
            return src.astype(complex)
        src = np.asarray(values, dtype=object)
        out = np.empty(src.shape, dtype=complex)
        for idx in np.ndindex(src.shape):
            out[idx] = self.scalar(src[idx])
        return out

    def conj(self, arr: Any) -> Any:
        return np.conj(arr)

    def _limit(self, *arrays: Any, scale: float = 1.0) -> float:
        for arr in arrays:
            arr = np.asarray(arr)
            if arr.size:
                scale = max(scale, float(np.max(np.abs(arr))))
        return self.tol * scale

    def is_zero(self, value: Any) -> bool:
        return bool(abs(value) <= self.tol)

    def allclose(self, a: np.ndarray, b: np.ndarray, scale: float = 1.0) -> bool:
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        if a.shape != b.shape:
            return False
        return bool(np.all(np.abs(a - b) <= self._limit(a, b, scale=scale)))

    def mismatch_mask(self, a: Any, b: Any, scale: float = 1.0) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        return np.abs(a - b) > self._limit(a, b, scale=scale)

    def product_scale(self, *factors: Any) -> float:
        """Product of the max-row-sum norms of `factors`, each at least 1.

        Rounding in a chain of products grows with this bound, not with the
        size of the result.
        """
        scale = 1.0
        for f in factors:
            f = np.abs(np.asarray(f, dtype=complex))
            if f.size:
                rows = f.reshape(-1, f.shape[-1]) if f.ndim else f.reshape(1, 1)
                scale *= max(1.0, float(rows.sum(axis=1).max()))
        return scale

    def to_complex(self, value: Any) -> complex:
        return complex(value)

    def export(self, value: Any) -> Any:
        z = complex(value)
        if abs(z.imag) <= self.tol:
            return float(z.real)
        return [float(z.real), float(z.imag)]

    def is_real(self, value: Any) -> bool:
        return bool(abs(complex(value).imag) <= self._limit(value))

    def real_le(self, a: Any, b: Any) -> bool:
        d = complex(b) - complex(a)
        limit = self._limit(a, b)
        return bool(abs(d.imag) <= limit and d.real >= -limit)

    def rank(self, m: np.ndarray) -> int:
        if m.size == 0:
            return 0
        s = np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)
        if s[0] == 0:
            return 0
        return int(np.sum(s > self.tol * s[0]))

    def column_basis(self, m: np.ndarray) -> np.ndarray:
        r = self.rank(m)
        if r == 0:
            return self.zeros((m.shape[0], 0))
        u, _, _ = np.linalg.svd(np.asarray(m, dtype=complex))
        return u[:, :r]

    def nullspace(self, m: np.ndarray) -> np.ndarray:
        n = m.shape[1]
        if m.shape[0] == 0:
            return self.eye(n)
        r = self.rank(m)
        _, _, vh = np.linalg.svd(np.asarray(m, dtype=complex))
        return vh[r:].conj().T

    def solve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        vector = b.ndim == 1
        rhs = b.reshape(-1, 1) if vector else b
        n = a.shape[1]
        x, *_ = np.linalg.lstsq(a, rhs, rcond=None)
        for c in range(rhs.shape[1]):
            if not self.allclose(a @ x[:, c], rhs[:, c], self.product_scale(a, x[:, c:c + 1])):
                raise NoSolution(c)
        r = self.rank(a)
        if r < n:
            raise UnderdeterminedSystem(n - r)
        return x[:, 0].copy() if vector else x

    def inverse(self, m: np.ndarray) -> np.ndarray | None:
        n = m.shape[0]
        if m.shape != (n, n) or self.rank(m) < n:
            return None
        return np.linalg.inv(m)

    def is_psd(self, m: np.ndarray) -> bool:
        if not self.is_hermitian(m):
            return False
        h = (m + m.conj().T) / 2
        return bool(np.linalg.eigvalsh(h).min() >= -self._limit(h))

    def __repr__(self) -> str:
        return f"FloatBackend(tol={self.tol})"


@lru_cache(maxsize=None)
def _backend(mode: str, tol: float) -> ScalarBackend:
    if ScalarMode(mode) == ScalarMode.EXACT:
        return ExactBackend()
    return FloatBackend(tol)


def get_backend(mode: str | None = None, tol: float | None = None) -> ScalarBackend:
    """Backend for `mode` ("exact" / "float64"); defaults come from settings."""
    mode = mode or settings.SCALAR_MODE
    if mode == "float":
        mode = ScalarMode.FLOAT
    if ScalarMode(mode) == ScalarMode.EXACT:
        return _backend(ScalarMode.EXACT.value, 0.0)
    return _backend(ScalarMode.FLOAT.value, float(tol if tol is not None else settings.TOLERANCE))
