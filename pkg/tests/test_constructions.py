"""
Example families and seeded random instances
"""

from fractions import Fraction

import pytest

from sepcore.algebra.algebra_core import element_from_matrix, element_to_matrix, trace_functional
from sepcore.constructions.examples import (
    closed_forms,
    diagonal,
    make_direct_sum_E,
    make_E0,
    make_involutive_twisted,
    make_nonfull_counterexample,
    make_twisted,
)
from sepcore.constructions.random_instances import (
    make_rng,
    random_element,
    random_rational,
    random_twist_pair,
    random_unit_diagonal,
)
from sepcore.engine.separability import CertificateMode, certify, derive_S, derive_Sprime
from sepcore.errors import IncompatibleComponents, NormalizationViolated


class TestTwisted:

    def test_normalize(self, m2, exact):
        """s = diag(2, 1) is rescaled by 2/3"""
        E = make_twisted(m2.one(), diagonal(m2, [2, 1]), normalize=True)
        assert E.oracle.s == diagonal(m2, ["4/3", "2/3"])
        assert certify(E).mode == CertificateMode.SEPARABILITY_IDEMPOTENT

    def test_closed_forms_e0(self, m2):
        forms = closed_forms(m2.one(), m2.one())
        assert forms.p == m2.one()
        assert forms.q == m2.one()
        assert forms.phi == 2 * trace_functional(m2)

    def test_closed_forms_twisted(self, m2):
        r = diagonal(m2, ["7/5", "1/5"])
        forms = closed_forms(r, r)
        assert forms.p == diagonal(m2, ["25/49", 25])
        assert forms.sigma(m2.basis("e21")) == 49 * m2.basis("e21")

    def test_involutive(self, m2):
        r = diagonal(m2, ["7/5", "1/5"])
        E = make_involutive_twisted(r)
        assert E == make_twisted(r, r)

    def test_involutive_normalization(self, m2):
        with pytest.raises(NormalizationViolated) as info:
            make_involutive_twisted(diagonal(m2, [2, 1]))
        assert info.value.value == "5"


class TestDirectSum:

    def test_blocks(self, exact, twisted_7_5):
        E = make_direct_sum_E([make_E0(1, exact), twisted_7_5])
        assert E.left.blocks == (1, 2)
        cert = certify(E)
        assert cert.mode == CertificateMode.SEPARABILITY_IDEMPOTENT
        assert cert.S == E.oracle.S
        assert derive_Sprime(E) == E.oracle.S_prime

    def test_single_component(self, e0_2):
        assert make_direct_sum_E([e0_2]) is e0_2

    def test_mixed_modes(self, exact, flt):
        with pytest.raises(IncompatibleComponents):
            make_direct_sum_E([make_E0(1, exact), make_E0(1, flt)])

    def test_rejected_component(self, exact):
        with pytest.raises(IncompatibleComponents) as info:
            make_direct_sum_E([make_E0(2, exact), make_nonfull_counterexample(2, exact)])
        assert "component 2 rejected" in str(info.value)

    def test_empty(self):
        with pytest.raises(IncompatibleComponents):
            make_direct_sum_E([])


class TestNonfull:

    def test_needs_two(self, exact):
        with pytest.raises(ValueError):
            make_nonfull_counterexample(1, exact)

    def test_shape(self, exact):
        E = make_nonfull_counterexample(3, exact)
        assert E.backend.rank(E.coeffs) == 3


class TestRandomInstances:

    def test_reproducible(self, m2):
        a = random_element(m2, make_rng(42))
        b = random_element(m2, make_rng(42))
        assert a == b

    def test_rational_bounds(self):
        rng = make_rng(1)
        for _ in range(50):
            v = random_rational(rng, bound=4)
            assert abs(v.numerator) <= 4
            assert 1 <= v.denominator <= 4

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_twist_pair_trace(self, n, exact):
        r, s = random_twist_pair(n, make_rng(n), exact)
        assert exact.equal(exact.trace(element_to_matrix(s * r)), exact.scalar(n))

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_unit_diagonal(self, n, exact):
        d = random_unit_diagonal(n, make_rng(n), exact)
        m = element_to_matrix(d)
        values = [Fraction(exact.export(m[i, i])) for i in range(n)]
        assert sum(v * v for v in values) == n
        assert all(v != 0 for v in values)

    def test_twisted_antipode_matches_closed_form(self, exact):
        r, s = random_twist_pair(3, make_rng(9), exact)
        E = make_twisted(r, s)
        assert derive_S(E) == E.oracle.S

    def test_element_from_matrix_agrees(self, m2):
        x = element_from_matrix(m2, [["1/2", 0], [0, 3]])
        assert x == diagonal(m2, [Fraction(1, 2), 3])
