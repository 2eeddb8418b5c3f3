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
"""Exception hierarchy of the separability kernel.

Every error carries its witness as attributes so that callers (certificates,
the command line) can report it without parsing the message.
"""

from typing import Any


class SeparabilityError(Exception):
    """Base class of all kernel errors."""

    def __init__(self, message: str, **witness: Any):
        super().__init__(message)
        self.witness = witness


class InternalInconsistency(SeparabilityError):
    """An identity that holds by construction failed; indicates a bug."""


class PreconditionFailed(SeparabilityError):
    pass


# algebra_core

class AssociativityViolation(SeparabilityError):
    def __init__(self, i: int, j: int, k: int):
        super().__init__(f"(b{i} b{j}) b{k} != b{i} (b{j} b{k})", i=i, j=j, k=k)
        self.i, self.j, self.k = i, j, k


class NotUnital(SeparabilityError):
    def __init__(self, index: int, side: str):
        super().__init__(f"unit fails as {side} identity on basis element {index}", index=index, side=side)
        self.index = index
        self.side = side


class DegenerateProduct(SeparabilityError):
    def __init__(self, element: Any, side: str):
        super().__init__(f"{side} multiplication is not injective", element=element, side=side)
        self.element = element
        self.side = side


class MixedBackends(SeparabilityError):
    def __init__(self, modes: list):
        super().__init__(f"operands use different scalar backends: {sorted(set(str(m) for m in modes))}")
        self.modes = modes


class NoBlockPresentation(SeparabilityError):
    def __init__(self, algebra_name: str):
        super().__init__(f"algebra {algebra_name!r} has no block presentation")


class NoStarStructure(SeparabilityError):
    def __init__(self, algebra_name: str):
        super().__init__(f"algebra {algebra_name!r} carries no star operation")


class NotInvertible(SeparabilityError):
    def __init__(self, element: Any):
        super().__init__(f"element is not invertible: {element}", element=element)
        self.element = element


class AlgebraMismatch(SeparabilityError):
    def __init__(self, expected: str, actual: str):
        super().__init__(f"expected an operand over {expected}, got {actual}")


class NotMultiplicative(SeparabilityError):
    def __init__(self, i: int, j: int):
        super().__init__(f"map is not multiplicative on basis pair ({i}, {j})", i=i, j=j)
        self.pair = (i, j)


class NotAntiMultiplicative(SeparabilityError):
    def __init__(self, i: int, j: int):
        super().__init__(f"map is not anti-multiplicative on basis pair ({i}, {j})", i=i, j=j)
        self.pair = (i, j)


class NotBijective(SeparabilityError):
    def __init__(self, rank: int, dim: int):
        super().__init__(f"map has rank {rank}, expected {dim}", rank=rank, dim=dim)


# linear systems

class NoSolution(SeparabilityError):
    def __init__(self, column: int, label: str | None = None):
        target = label if label is not None else f"column {column}"
        super().__init__(f"linear system has no solution for {target}", column=column, label=label)
        self.column = column
        self.label = label


class UnderdeterminedSystem(InternalInconsistency):
    def __init__(self, nullity: int):
        super().__init__(f"solution space has dimension {nullity} > 0 beyond the particular solution",
                         nullity=nullity)
        self.nullity = nullity


# separability_engine

class NotFull(PreconditionFailed):
    def __init__(self, left_rank: int, right_rank: int, left_dim: int, right_dim: int):
        super().__init__(f"not full: legs have dimensions {left_rank}/{left_dim} and {right_rank}/{right_dim}",
                         left_rank=left_rank, right_rank=right_rank)


class OneSidedConditionFails(SeparabilityError):
    pass


class CentralityViolation(SeparabilityError):
    def __init__(self, label: str):
        super().__init__(f"e does not commute with {label}", label=label)
        self.label = label


class IntertwinerConditionFails(PreconditionFailed):
    def __init__(self, label: str):
        super().__init__(f"S'2 S2 alpha_B != alpha_B S'1 S1 on {label}", label=label)


class TransportMismatch(SeparabilityError):
    def __init__(self):
        super().__init__("(alpha_B x alpha_C) E1 != E2")


# integral_engine

class NotFaithful(SeparabilityError):
    def __init__(self, element: Any):
        super().__init__("functional is not faithful", element=element)
        self.element = element


class KMSViolation(SeparabilityError):
    def __init__(self, side: str, i: int, j: int):
        super().__init__(f"KMS law fails for the {side} integral on basis pair ({i}, {j})", side=side, i=i, j=j)
        self.pair = (i, j)


class NotATrace(PreconditionFailed):
    def __init__(self, i: int, j: int):
        super().__init__(f"tau(b{i} b{j}) != tau(b{j} b{i})", i=i, j=j)
        self.pair = (i, j)


class RelativeCommutationFails(PreconditionFailed):
    def __init__(self, label: str):
        super().__init__(f"relative commutation fails on {label}", label=label)
        self.label = label


# star_structure

class InequalityViolation(SeparabilityError):
    def __init__(self, side: str, lhs: Any, rhs: Any, pair: tuple):
        super().__init__(f"{side}-side bound violated: {lhs} > {rhs}", side=side, pair=pair)
        self.pair = pair


class GramNotPositiveDefinite(PreconditionFailed):
    pass


class SolutionSpaceDimensionNotOne(SeparabilityError):
    def __init__(self, what: str, dimension: int):
        super().__init__(f"solution space for {what} has dimension {dimension}, expected 1",
                         what=what, dimension=dimension)
        self.dimension = dimension


class ReconstructionMismatch(SeparabilityError):
    pass


class CrossBlockLeakage(SeparabilityError):
    def __init__(self, alpha: int, beta: int, left_label: str, right_label: str):
        super().__init__(f"E has a coefficient on ({left_label}, {right_label}) between blocks {alpha} and {beta}",
                         alpha=alpha, beta=beta, left=left_label, right=right_label)
        self.alpha = alpha
        self.beta = beta


# constructions

class NormalizationViolated(SeparabilityError):
    def __init__(self, value: Any, expected: int):
        super().__init__(f"Tr(r* r) = {value}, expected {expected}", value=value, expected=expected)
        self.value = value


class IncompatibleComponents(SeparabilityError):
    pass


# duality / cli

class SideMismatch(SeparabilityError):
    pass


class RefusedForMode(SeparabilityError):
    def __init__(self, operation: str, mode: str):
        super().__init__(f"{operation} is not available in mode {mode}", operation=operation, mode=mode)
        self.mode = mode


class DocumentError(SeparabilityError):
    """Structured parse error; `location` is a dotted path into the document."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}", location=location)
        self.location = location
