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
"""Seeded random instances with small rational entries.

Numerators are drawn from [-bound, bound] and denominators from [1, bound];
every generator takes an explicit ``numpy.random.Generator`` so runs are
reproducible from the recorded seed.
"""

import logging
from fractions import Fraction

import numpy as np

from sepcore import settings
from sepcore.algebra.algebra_core import Algebra, AlgebraElement, element_from_matrix, make_matrix_algebra
from sepcore.algebra.scalars import ScalarBackend, get_backend

BOUND = 9
MAX_ATTEMPTS = 1000


def make_rng(seed: int | None = None) -> np.random.Generator:
    return np.random.default_rng(settings.SEED if seed is None else seed)


def random_rational(rng: np.random.Generator, bound: int = BOUND) -> Fraction:
    return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))


def random_element(algebra: Algebra, rng: np.random.Generator, bound: int = BOUND) -> AlgebraElement:
    return algebra.element([random_rational(rng, bound) for _ in range(algebra.dim)])


def random_invertible_matrix(n: int, rng: np.random.Generator, backend: ScalarBackend | None = None,
                             bound: int = BOUND) -> np.ndarray:
    backend = backend or get_backend()
    for _ in range(MAX_ATTEMPTS):
        m = backend.array([[random_rational(rng, bound) for _ in range(n)] for _ in range(n)])
        if backend.rank(m) == n:
            return m
    raise RuntimeError(f"no invertible {n}x{n} matrix after {MAX_ATTEMPTS} draws")


def random_twist_pair(n: int, rng: np.random.Generator, backend: ScalarBackend | None = None,
                      bound: int = BOUND) -> tuple:
    """Invertible (r, s) in M_n with Tr(s r) = n."""
    algebra = make_matrix_algebra(n, backend=backend or get_backend())
    backend = algebra.backend
    for _ in range(MAX_ATTEMPTS):
        r = random_invertible_matrix(n, rng, backend, bound)
        s = random_invertible_matrix(n, rng, backend, bound)
        trace = backend.trace(s @ r)
        if backend.is_zero(trace):
            continue
        s = s * (backend.scalar(n) / trace)
        return element_from_matrix(algebra, r), element_from_matrix(algebra, s)
    raise RuntimeError(f"no twist pair with Tr(sr) != 0 after {MAX_ATTEMPTS} draws")


def random_unit_diagonal(n: int, rng: np.random.Generator, backend: ScalarBackend | None = None,
                         bound: int = BOUND) -> AlgebraElement:
    """diag(d) with rational d_i != 0 and sum d_i^2 = n.

    Rational points of the sphere |x|^2 = n come from the second intersection
    of a line through (1, ..., 1) with rational direction.
    """
    algebra = make_matrix_algebra(n, backend=backend or get_backend())
    if n == 1:
        return algebra.one()
    ones = [Fraction(1)] * n
    for _ in range(MAX_ATTEMPTS):
        direction = [Fraction(int(v)) for v in rng.integers(-bound, bound + 1, size=n)]
        dot = sum(direction)
        norm = sum(v * v for v in direction)
        if dot == 0 or norm == 0:
            continue
        t = -2 * dot / norm
        point = [p + t * v for p, v in zip(ones, direction)]
        if any(v == 0 for v in point):
            continue
        m = [[point[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)]
        return element_from_matrix(algebra, m)
    raise RuntimeError(f"no rational point on the sphere after {MAX_ATTEMPTS} draws")


def random_pairs(algebra: Algebra, rng: np.random.Generator, samples: int) -> list:
    pairs = [(random_element(algebra, rng), random_element(algebra, rng)) for _ in range(samples)]
    logging.debug(f"drew {samples} random pairs on {algebra.name}")
    return pairs
