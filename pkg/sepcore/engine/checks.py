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
from dataclasses import dataclass

import numpy as np

from sepcore.algebra.algebra_core import Algebra


@dataclass(frozen=True)
class CheckResult:
    """Outcome of an identity check; truthy iff it passed."""
    name: str
    passed: bool
    witnesses: tuple = ()

    def __bool__(self) -> bool:
        return self.passed

    def __str__(self) -> str:
        if self.passed:
            return f"{self.name}: pass"
        return f"{self.name}: FAIL ({'; '.join(self.witnesses[:5])})"

    @classmethod
    def combine(cls, name: str, *results: "CheckResult") -> "CheckResult":
        witnesses = tuple(w for r in results for w in r.witnesses)
        return cls(name, all(r.passed for r in results), witnesses)


def column_witnesses(algebra: Algebra, actual: np.ndarray, expected: np.ndarray, template: str,
                     scale: float = 1.0) -> tuple:
    """One message per basis index k (leading axis) where actual[k] != expected[k]."""
    mask = algebra.backend.mismatch_mask(actual, expected, scale)
    if mask.ndim > 1:
        mask = mask.reshape(mask.shape[0], -1).any(axis=1)
    return tuple(template.format(label=algebra.labels[k]) for k in np.nonzero(mask)[0])
