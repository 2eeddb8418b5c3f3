"""
Integrals, modular automorphisms and trace correspondences
"""

from fractions import Fraction

import pytest

from sepcore.algebra.algebra_core import (
    element_from_blocks,
    element_from_matrix,
    element_to_matrix,
    invert,
    make_matrix_algebra,
    trace_functional,
)
from sepcore.constructions.examples import make_direct_sum_E, make_E0, make_twisted
from sepcore.constructions.random_instances import make_rng, random_twist_pair
from sepcore.engine.integrals import (
    check_integral_transport,
    derive_left_integral,
    derive_right_integral,
    integral_data,
    modular_automorphisms,
    p_from_trace,
    q_from_trace,
    trace_from_p,
    trace_from_q,
)
from sepcore.engine.separability import CertificateMode, certify, derive_S, derive_Sprime
from sepcore.errors import (
    KMSViolation,
    NotATrace,
    PreconditionFailed,
    RefusedForMode,
    RelativeCommutationFails,
)


@pytest.fixture
def double_e0(exact):
    """E0 on M2 (+) M2, block by block."""
    return make_direct_sum_E([make_E0(2, exact), make_E0(2, exact)])


def _first_block(algebra):
    return element_from_blocks(algebra, [[[1, 0], [0, 1]], [[0, 0], [0, 0]]])


class TestIntegrals:

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_e0_is_scaled_trace(self, n, exact):
        """phi = psi = n Tr on M_n"""
        E = make_E0(n, exact)
        scaled = n * trace_functional(E.left)
        assert derive_left_integral(E) == scaled
        assert derive_right_integral(E) == scaled

    def test_twisted_closed_forms(self, twisted_7_5):
        data = integral_data(twisted_7_5)
        oracle = twisted_7_5.oracle
        assert data.phi == oracle.phi
        assert data.psi == oracle.psi
        assert data.sigma == oracle.sigma
        assert data.sigma_prime == oracle.sigma_prime

    def test_twisted_modular_entry(self, twisted_7_5, m2, exact):
        """sigma = Ad diag(25/49, 25) scales e12 by 1/49"""
        sigma = integral_data(twisted_7_5).sigma
        assert sigma(m2.basis("e12")) == Fraction(1, 49) * m2.basis("e12")

    @pytest.mark.parametrize("seed", range(200))
    def test_random_closed_forms(self, seed, exact):
        """n = 1 + seed % 4: every derived map and integral equals its closed form"""
        r, s = random_twist_pair(1 + seed % 4, make_rng(seed), exact)
        E = make_twisted(r, s)
        data = integral_data(E)
        oracle = E.oracle
        assert derive_S(E) == oracle.S
        assert derive_Sprime(E) == oracle.S_prime
        assert data.phi == oracle.phi
        assert data.psi == oracle.psi
        assert data.sigma == oracle.sigma
        assert data.sigma_prime == oracle.sigma_prime

    @pytest.mark.parametrize("seed", range(200))
    def test_random_identity_battery(self, seed, exact):
        r, s = random_twist_pair(1 + seed % 4, make_rng(seed), exact)
        E = make_twisted(r, s)
        cert = certify(E)
        assert cert.mode == CertificateMode.SEPARABILITY_IDEMPOTENT
        assert all(cert.checks[name] for name in ("counit", "swap", "splitting", "centrality", "determinacy"))
        data = integral_data(E)
        assert check_integral_transport(data.phi, data.psi, data.S, data.S_prime)
        assert data.phi.compose(data.sigma) == data.phi
        assert data.psi.compose(data.sigma_prime) == data.psi

    def test_transport(self, twisted_7_5):
        data = integral_data(twisted_7_5)
        assert check_integral_transport(data.phi, data.psi, data.S, data.S_prime)

    def test_transport_detects_wrong_integral(self, twisted_7_5):
        data = integral_data(twisted_7_5)
        wrong = trace_functional(twisted_7_5.right)
        result = check_integral_transport(wrong, data.psi, data.S, data.S_prime)
        assert not result
        assert result.witnesses


class TestRefusals:

    def test_nilpotent(self, nilpotent_2):
        with pytest.raises(RefusedForMode) as info:
            derive_left_integral(nilpotent_2)
        assert info.value.mode == "nilpotent_variant"

    def test_scalar_multiple(self, scalar_multiple_2):
        with pytest.raises(PreconditionFailed):
            derive_right_integral(scalar_multiple_2)

    def test_kms_violation(self, twisted_7_5):
        """the plain trace is not KMS for a non-trivial sigma"""
        data = integral_data(twisted_7_5)
        with pytest.raises(KMSViolation):
            modular_automorphisms(data.S, data.S_prime, trace_functional(twisted_7_5.right), data.psi)


class TestTraceCorrespondence:

    def test_q_from_block_trace(self, double_e0, exact):
        B = double_e0.left
        tau = trace_functional(B).left_translate(_first_block(B))
        q = q_from_trace(double_e0, tau)
        assert q == Fraction(1, 2) * _first_block(double_e0.right)

    def test_trace_from_block_unit(self, double_e0, exact):
        """q = (1, 0) gives 2 Tr on the first block, not faithful"""
        B, C = double_e0.left, double_e0.right
        corr = trace_from_q(double_e0, _first_block(C))
        assert corr.trace == 2 * trace_functional(B).left_translate(_first_block(B))
        assert not corr.faithful
        assert not corr.invertible

    def test_trace_from_unit(self, double_e0):
        corr = trace_from_q(double_e0, double_e0.right.one())
        assert corr.trace == 2 * trace_functional(double_e0.left)
        assert corr.faithful
        assert corr.invertible

    def test_p_mirror(self, double_e0, exact):
        B, C = double_e0.left, double_e0.right
        tau = trace_functional(C).left_translate(_first_block(C))
        assert p_from_trace(double_e0, tau) == Fraction(1, 2) * _first_block(B)
        corr = trace_from_p(double_e0, B.one())
        assert corr.trace == 2 * trace_functional(C)
        assert corr.faithful

    def test_not_a_trace(self, e0_2, m2):
        tau = trace_functional(m2).left_translate(m2.basis("e11"))
        with pytest.raises(NotATrace):
            q_from_trace(e0_2, tau)

    def test_relative_commutation(self, e0_2, m2):
        """sigma is the identity for E0, so q must be central"""
        with pytest.raises(RelativeCommutationFails):
            trace_from_q(e0_2, m2.basis("e12"))

    def test_twisted_round_trip(self, twisted_7_5, m2):
        tr = trace_functional(m2)
        data = integral_data(twisted_7_5)
        q = q_from_trace(twisted_7_5, tr, data)
        corr = trace_from_q(twisted_7_5, q, data)
        assert corr.trace == tr
        assert corr.invertible


def _to_float(x, flt):
    a = make_matrix_algebra(x.algebra.blocks[0], backend=flt)
    return element_from_matrix(a, element_to_matrix(x))


def _condition(flt, r, s):
    """(|r| |r^-1| |s| |s^-1|)^2 in the max-row-sum norm"""
    factors = [flt.array(element_to_matrix(x)) for x in (r, invert(r), s, invert(s))]
    return flt.product_scale(*factors) ** 2


class TestFloatAgreement:
    """float64 reruns of the random family, compared with the exact results"""

    @pytest.mark.parametrize("seed", range(24))
    def test_random_family(self, seed, exact, flt):
        r, s = random_twist_pair(1 + seed % 4, make_rng(seed), exact)
        E = make_twisted(r, s)
        F = make_twisted(_to_float(r, flt), _to_float(s, flt))
        cert = certify(F)
        assert cert.mode == CertificateMode.SEPARABILITY_IDEMPOTENT
        assert cert.passed
        data = integral_data(F)
        assert check_integral_transport(data.phi, data.psi, data.S, data.S_prime)
        scale = _condition(flt, r, s)
        for name in ("S", "S_prime", "sigma", "sigma_prime"):
            assert flt.allclose(getattr(data, name).matrix, flt.array(getattr(E.oracle, name).matrix), scale)
        for name in ("phi", "psi"):
            assert flt.allclose(getattr(data, name).covector, flt.array(getattr(E.oracle, name).covector), scale)

    def test_badly_conditioned_m4(self, exact, flt):
        """the seed 23 twist on M4 has a large |sigma|; its KMS laws still hold in float64"""
        r, s = random_twist_pair(4, make_rng(23), exact)
        F = make_twisted(_to_float(r, flt), _to_float(s, flt))
        assert certify(F).mode == CertificateMode.SEPARABILITY_IDEMPOTENT
        data = integral_data(F)
        sigma, _ = modular_automorphisms(data.S, data.S_prime, data.phi, data.psi)
        assert sigma == data.sigma
        assert check_integral_transport(data.phi, data.psi, data.S, data.S_prime)

    def test_e0(self, flt):
        """phi = psi = 4 Tr on M4"""
        E = make_E0(4, flt)
        data = integral_data(E)
        assert data.phi == 4 * trace_functional(E.right)
        assert data.psi == 4 * trace_functional(E.left)
