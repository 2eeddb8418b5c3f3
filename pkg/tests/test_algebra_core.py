"""
Algebras, elements, functionals and linear maps
"""

from fractions import Fraction

import numpy as np
import pytest

from sepcore import settings as kernel_settings
from sepcore.algebra.algebra_core import (
    LinearMap,
    conjugation_map,
    element_from_blocks,
    element_from_matrix,
    element_to_matrix,
    identity_map,
    invert,
    make_direct_sum,
    make_matrix_algebra,
    make_structure_constant_algebra,
    trace_functional,
    transpose_anti_map,
)
from sepcore.algebra.scalars import get_backend
from sepcore.errors import (
    AlgebraMismatch,
    AssociativityViolation,
    MixedBackends,
    NoStarStructure,
    NotAntiMultiplicative,
    NotInvertible,
    NotUnital,
)


def _diagonal_pair(backend, unit):
    """C + C with orthogonal idempotents b1, b2."""
    constants = [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]
    constants[0][0][0] = 1
    constants[1][1][1] = 1
    return make_structure_constant_algebra(2, constants, unit, backend=backend)


def _unit_and_idempotents(d):
    """b0 the unit, b1 .. b_{d-1} orthogonal idempotents."""
    constants = np.zeros((d, d, d), dtype=int)
    for j in range(d):
        constants[0, j, j] = constants[j, 0, j] = 1
        constants[j, j, j] = 1
    return constants


def _first_unit(d):
    return [1] + [0] * (d - 1)


class TestMatrixAlgebra:
    """M_n with the matrix-unit basis"""

    def test_labels_and_index(self, m2):
        assert m2.labels == ("e11", "e12", "e21", "e22")
        assert m2.index("e21") == 2
        assert m2.blocks == (2,)

    def test_matrix_unit_products(self, m2):
        """e_ij e_kl = delta_jk e_il"""
        assert m2.basis("e12") * m2.basis("e21") == m2.basis("e11")
        assert (m2.basis("e12") * m2.basis("e12")).is_zero()

    def test_unit(self, m2):
        x = element_from_matrix(m2, [[1, 2], [3, 4]])
        assert m2.one() * x == x
        assert x * m2.one() == x

    def test_star_is_conjugate_transpose(self, m2, exact):
        i = exact.scalar([0, 1])
        x = element_from_matrix(m2, [[1, 0], [2, 3]]) + m2.basis("e12") * i
        expected = element_from_matrix(m2, [[1, 2], [0, 3]]) - m2.basis("e21") * i
        assert x.star() == expected

    def test_unknown_label(self, m2):
        with pytest.raises(KeyError):
            m2.basis("e33")

    def test_no_star(self, exact):
        a = make_matrix_algebra(2, with_star=False, backend=exact)
        with pytest.raises(NoStarStructure):
            a.basis(0).star()

    def test_invalid_size(self, exact):
        with pytest.raises(ValueError):
            make_matrix_algebra(0, backend=exact)


class TestDirectSum:

    def test_blocks_and_labels(self, exact):
        a = make_direct_sum([make_matrix_algebra(1, backend=exact), make_matrix_algebra(2, backend=exact)])
        assert a.dim == 5
        assert a.blocks == (1, 2)
        assert a.labels[0] == "e11[1]"
        assert a.labels[1] == "e11[2]"
        assert a.block_ranges() == [(0, 1), (1, 2)]
        assert a.block_of(3) == 1

    def test_blocks_multiply_separately(self, exact):
        a = make_direct_sum([make_matrix_algebra(2, backend=exact)] * 2)
        x = element_from_blocks(a, [[[1, 0], [0, 0]], [[0, 0], [0, 0]]])
        y = element_from_blocks(a, [[[0, 0], [0, 0]], [[1, 0], [0, 1]]])
        assert (x * y).is_zero()
        assert a.one() == element_from_blocks(a, [[[1, 0], [0, 1]], [[1, 0], [0, 1]]])

    def test_mixed_backends(self, exact, flt):
        with pytest.raises(MixedBackends):
            make_direct_sum([make_matrix_algebra(1, backend=exact), make_matrix_algebra(1, backend=flt)])


class TestStructureConstants:

    def test_commutative_pair(self, exact):
        a = _diagonal_pair(exact, [1, 1])
        assert a.basis(0) * a.basis(1) == a.zero()
        assert a.one() * a.basis(1) == a.basis(1)

    def test_non_associative(self, exact):
        """b1 b1 = b2, b2 b1 = b1 breaks associativity at (0, 0, 0)"""
        constants = [[[0, 1], [0, 0]], [[1, 0], [0, 0]]]
        with pytest.raises(AssociativityViolation) as info:
            make_structure_constant_algebra(2, constants, [1, 0], backend=exact)
        assert (info.value.i, info.value.j, info.value.k) == (0, 0, 0)

    def test_not_unital(self, exact):
        with pytest.raises(NotUnital) as info:
            _diagonal_pair(exact, [1, 0])
        assert info.value.index == 1

    def test_wrong_shape(self, exact):
        with pytest.raises(ValueError):
            make_structure_constant_algebra(3, [[[1]]], [1], backend=exact)


class TestLargeAlgebras:
    """Associativity is checked on every triple, whatever the dimension"""

    @pytest.mark.parametrize("mode", ["exact", "float64"])
    def test_accepted(self, mode):
        a = make_structure_constant_algebra(37, _unit_and_idempotents(37), _first_unit(37),
                                            backend=get_backend(mode))
        assert a.dim == 37
        assert a.basis(5) * a.basis(5) == a.basis(5)

    @pytest.mark.parametrize("mode", ["exact", "float64"])
    def test_single_bad_constant(self, mode):
        """b1 b2 = b3 breaks ((b1 b1) b2 = b3) != (b1 (b1 b2) = 0)"""
        constants = _unit_and_idempotents(37)
        constants[1, 2, 3] = 1
        with pytest.raises(AssociativityViolation) as info:
            make_structure_constant_algebra(37, constants, _first_unit(37), backend=get_backend(mode))
        assert (info.value.i, info.value.j, info.value.k) == (1, 1, 2)

    def test_independent_of_exhaustive_dim(self, monkeypatch):
        monkeypatch.setattr(kernel_settings, "EXHAUSTIVE_DIM", 1)
        constants = _unit_and_idempotents(8)
        constants[6, 7, 2] = 1
        with pytest.raises(AssociativityViolation):
            make_structure_constant_algebra(8, constants, _first_unit(8), backend=get_backend("exact"))


class TestElements:

    def test_invert(self, m2, exact):
        x = element_from_matrix(m2, [[1, 2], [3, 4]])
        y = invert(x)
        assert x * y == m2.one()
        assert y == element_from_matrix(m2, [[-2, 1], ["3/2", "-1/2"]])

    def test_singular(self, m2):
        with pytest.raises(NotInvertible):
            invert(element_from_matrix(m2, [[1, 2], [2, 4]]))

    def test_scalar_multiplication(self, m2):
        x = element_from_matrix(m2, [[1, 0], [0, 2]])
        assert Fraction(1, 2) * x == element_from_matrix(m2, [["1/2", 0], [0, 1]])

    def test_algebra_mismatch(self, m2, exact):
        m3 = make_matrix_algebra(3, backend=exact)
        with pytest.raises(AlgebraMismatch):
            m2.one() + m3.one()

    def test_matrix_round_trip(self, m2, exact):
        x = element_from_matrix(m2, [[1, 2], [3, 4]])
        assert exact.allclose(element_to_matrix(x), exact.array([[1, 2], [3, 4]]))


class TestFunctionals:

    def test_trace(self, m2, exact):
        tr = trace_functional(m2)
        assert exact.equal(tr(m2.one()), exact.scalar(2))
        assert tr.is_faithful()
        assert tr.is_tracial() is None

    def test_translates(self, m2, exact):
        tr = trace_functional(m2)
        x = element_from_matrix(m2, [[1, 2], [3, 4]])
        y = element_from_matrix(m2, [[0, 1], [1, 0]])
        assert exact.equal(tr.left_translate(x)(y), tr(x * y))
        assert exact.equal(tr.right_translate(x)(y), tr(y * x))

    def test_non_faithful(self, m2):
        """Tr(e11 .) kills e21 . anything on the right"""
        f = trace_functional(m2).left_translate(m2.basis("e11"))
        assert not f.is_faithful()
        assert f.kernel_witness() is not None
        assert f.is_tracial() is not None

    def test_gram(self, m2, exact):
        g = trace_functional(m2).gram()
        assert exact.equal(g[m2.index("e12"), m2.index("e21")], exact.one)
        assert exact.equal(g[m2.index("e12"), m2.index("e12")], exact.zero)


class TestLinearMaps:

    def test_transpose_is_anti_multiplicative(self, m2):
        s0 = transpose_anti_map(m2)
        assert s0(m2.basis("e12")) == m2.basis("e21")
        assert s0.homomorphism_defect(anti=True) is None
        assert s0.homomorphism_defect(anti=False) is not None

    def test_verified_rejects(self, m2, exact):
        with pytest.raises(NotAntiMultiplicative):
            LinearMap.verified(m2, m2, exact.eye(4), "id", anti_multiplicative=True)

    def test_compose_and_inverse(self, m2):
        x = element_from_matrix(m2, [[1, 2], [0, 1]])
        ad = conjugation_map(x, "Ad x")
        back = ad.compose(ad.inverse())
        assert back == identity_map(m2)
        assert ad(m2.basis("e11")) == x * m2.basis("e11") * invert(x)

    def test_compose_flags(self, m2):
        s0 = transpose_anti_map(m2)
        twice = s0.compose(s0)
        assert twice.multiplicative
        assert not twice.anti_multiplicative
        assert twice == identity_map(m2)
