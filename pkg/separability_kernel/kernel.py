"""
Separability kernel facade

Runs the engine pipelines on instance descriptions and turns their results into
certificate documents.
"""

import dataclasses
import logging
from timeit import default_timer as timer
from typing import Any, Dict, List, Optional

from sepcore import settings
from sepcore.algebra.scalars import ScalarBackend
from sepcore.algebra.tensor_ops import TensorElement
from sepcore.constructions.random_instances import make_rng, random_twist_pair
from sepcore.engine.blocks import decompose_blocks
from sepcore.engine.checks import CheckResult
from sepcore.engine.duality import (
    DualityContext,
    DualSide,
    dual_antipode,
    fourier,
    pairing,
    plancherel_form,
)
from sepcore.engine.integrals import IntegralData, check_integral_transport, integral_data
from sepcore.engine.separability import CertificateMode, SeparabilityCertificate, certify
from sepcore.engine.star_structure import (
    check_integral_star,
    check_positive,
    check_positivity_transfer,
    check_self_adjoint,
    check_star_antipode,
)
from sepcore.errors import (
    CrossBlockLeakage,
    DocumentError,
    PreconditionFailed,
    RefusedForMode,
    SeparabilityError,
)

from .codec import build_element, describe_element, instance_backend, read_instance, write_array, write_labelled
from .documents import CertificateDocument, ConstructionKind, DeriveTarget, InstanceDescription


class SeparabilityKernel:
    """
    Verification and derivation front end

    Holds the scalar mode, tolerance, seed and worker count of one session;
    values left as None fall back to the instance description and then to
    the environment settings.
    """

    def __init__(self, mode: Optional[str] = None, tol: Optional[float] = None,
                 seed: Optional[int] = None, workers: Optional[int] = None):
        self.mode = mode
        self.tol = tol
        self.seed = seed
        self.workers = workers

    def _seed(self, desc: InstanceDescription) -> int:
        if self.seed is not None:
            return self.seed
        return desc.seed if desc.seed is not None else settings.SEED

    def _echo(self, desc: InstanceDescription, backend: ScalarBackend) -> Dict[str, Any]:
        echo = desc.to_dict()
        echo["mode"] = str(backend.mode)
        return echo

    def load(self, path: str) -> InstanceDescription:
        return read_instance(path)

    def build(self, desc: InstanceDescription) -> TensorElement:
        backend = instance_backend(desc, self.mode, self.tol)
        return build_element(dataclasses.replace(desc, seed=self._seed(desc)), backend)

    # result conversion

    def _process_checks(self, checks: Dict[str, CheckResult]) -> Dict[str, Any]:
        return {name: {"passed": bool(check.passed), "witnesses": [str(w) for w in check.witnesses]}
                for name, check in checks.items()}

    def _process_certificate(self, cert: SeparabilityCertificate, desc: InstanceDescription,
                             command: str) -> CertificateDocument:
        E = cert.element
        backend = E.backend
        derived: Dict[str, Any] = {}
        if cert.S is not None:
            derived["S"] = write_array(cert.S.matrix, backend)
        if cert.S_prime is not None:
            derived["S_prime"] = write_array(cert.S_prime.matrix, backend)
        if cert.e is not None:
            derived["e"] = write_labelled(cert.e.coeffs, E.right.labels, backend)
        return CertificateDocument(
            command=command,
            mode=str(cert.mode),
            instance=self._echo(desc, backend),
            verdict=str(cert.verdict),
            reason=cert.reason,
            axioms={name: str(status) for name, status in cert.axioms.items()},
            checks=self._process_checks(cert.checks),
            derived=derived,
            seed=self._seed(desc),
            elapsed=float(cert.elapsed),
        )

    def _process_integrals(self, data: IntegralData, E: TensorElement) -> Dict[str, Any]:
        backend = E.backend
        return {
            "phi": write_array(data.phi.covector, backend),
            "psi": write_array(data.psi.covector, backend),
        }

    def _process_modular(self, data: IntegralData, E: TensorElement) -> Dict[str, Any]:
        backend = E.backend
        return {
            "sigma": write_array(data.sigma.matrix, backend),
            "sigma_prime": write_array(data.sigma_prime.matrix, backend),
        }

    def _process_dual(self, data: IntegralData, E: TensorElement) -> Dict[str, Any]:
        ctx = DualityContext(E, data)
        backend = E.backend
        B, C = E.left, E.right
        b_hats = [fourier(B.basis(i), DualSide.B, ctx) for i in range(B.dim)]
        c_hats = [fourier(C.basis(j), DualSide.C, ctx) for j in range(C.dim)]
        pairings = backend.zeros((B.dim, C.dim))
        for i, b_hat in enumerate(b_hats):
            for j, c_hat in enumerate(c_hats):
                pairings[i, j] = pairing(b_hat, c_hat)
        for omega in c_hats + b_hats:
            dual_antipode(omega)
        out = {
            "fourier_b": write_array(ctx.gram_psi.T, backend),
            "fourier_c": write_array(ctx.gram_phi, backend),
            "pairing": write_array(pairings, backend),
            "dual_antipode_c": write_array(ctx.S_inv.matrix, backend),
            "dual_antipode_b": write_array(ctx.S_prime_inv.matrix, backend),
        }
        if B.has_star and C.has_star and check_self_adjoint(E):
            plancherel = backend.zeros((C.dim, C.dim))
            for i, c1 in enumerate(c_hats):
                for j, c2 in enumerate(c_hats):
                    plancherel[i, j] = plancherel_form(c1, c2)
            out["plancherel"] = write_array(plancherel, backend)
        return out

    def _star_checks(self, E: TensorElement, data: IntegralData) -> Dict[str, CheckResult]:
        if not (E.left.has_star and E.right.has_star):
            return {}
        adjoint = check_self_adjoint(E)
        checks = {"self_adjoint": adjoint}
        if not adjoint:
            return checks
        checks["star_antipode"] = check_star_antipode(data.S, data.S_prime)
        checks["phi_star"] = check_integral_star(data.phi, data.sigma)
        checks["psi_star"] = check_integral_star(data.psi, data.sigma_prime)
        checks["phi_positive"] = CheckResult("phi_positive", bool(check_positive(data.phi)))
        checks["psi_positive"] = CheckResult("psi_positive", bool(check_positive(data.psi)))
        checks["positivity_transfer"] = check_positivity_transfer(E, data)
        return checks

    # commands

    def verify(self, desc: InstanceDescription) -> CertificateDocument:
        """
        Certify the element and, for separability idempotents, derive its integrals.

        Args:
            desc: instance description holding the element and its algebras

        Returns:
            CertificateDocument: axioms, checks, derived S, S' and e; certified
            elements also carry phi, psi, sigma, sigma' and the star checks
        """
        try:
            E = self.build(desc)
            cert = certify(E, self.workers)
            cert.seed = self._seed(desc)
            doc = self._process_certificate(cert, desc, "verify")
            if cert.mode == CertificateMode.SEPARABILITY_IDEMPOTENT:
                data = integral_data(E)
                doc.derived.update(self._process_integrals(data, E))
                doc.derived.update(self._process_modular(data, E))
                extra = {"integral_transport": check_integral_transport(data.phi, data.psi, data.S, data.S_prime)}
                extra.update(self._star_checks(E, data))
                doc.checks.update(self._process_checks(extra))
            return doc
        except SeparabilityError:
            raise
        except Exception as e:
            logging.error(f"verify failed: {e}")
            raise RuntimeError(f"verify failed: {e}")

    def derive(self, desc: InstanceDescription, what: DeriveTarget | str) -> CertificateDocument:
        """
        Derive one family of data.

        Antipodes are available for nilpotent variants as well; integrals,
        modular automorphisms and duals raise RefusedForMode there.

        Args:
            desc: instance description holding the element and its algebras
            what: antipodes, integrals, modular or dual

        Returns:
            CertificateDocument: the certificate with `derived` holding only
            the requested family

        Raises:
            PreconditionFailed: the element is rejected
            RefusedForMode: anything but antipodes on a nilpotent variant
        """
        what = DeriveTarget(what)
        try:
            start = timer()
            E = self.build(desc)
            cert = certify(E, self.workers)
            if cert.mode == CertificateMode.REJECTED:
                raise PreconditionFailed(f"derive {what} needs a certified element: {cert.reason}")
            doc = self._process_certificate(cert, desc, f"derive {what}")
            if what == DeriveTarget.ANTIPODES:
                derived = {k: doc.derived[k] for k in ("S", "S_prime", "e") if k in doc.derived}
            else:
                if cert.mode == CertificateMode.NILPOTENT_VARIANT:
                    raise RefusedForMode(str(what), cert.mode)
                data = integral_data(E)
                if what == DeriveTarget.INTEGRALS:
                    derived = self._process_integrals(data, E)
                elif what == DeriveTarget.MODULAR:
                    derived = self._process_modular(data, E)
                else:
                    derived = self._process_dual(data, E)
            doc.derived = derived
            doc.elapsed = float(timer() - start)
            logging.info(f"derive {what} cost {doc.elapsed}s")
            return doc
        except SeparabilityError:
            raise
        except Exception as e:
            logging.error(f"derive {what} failed: {e}")
            raise RuntimeError(f"derive {what} failed: {e}")

    def decompose(self, desc: InstanceDescription) -> CertificateDocument:
        """
        Per-block certificates and twists of a block-diagonal element.

        Args:
            desc: instance description of an element over multi-matrix algebras

        Returns:
            CertificateDocument: one entry per block with its size, mode and the
            twist (r, s); mode is rejected with a reason on cross-block leakage
        """
        try:
            E = self.build(desc)
            backend = E.backend
            doc = CertificateDocument(command="decompose", mode=str(CertificateMode.REJECTED),
                                      instance=self._echo(desc, backend), seed=self._seed(desc))
            start = timer()
            try:
                decomposition = decompose_blocks(E, self.workers)
            except (CrossBlockLeakage, PreconditionFailed) as e:
                logging.warning(f"decompose rejected: {e}")
                doc.reason = str(e)
                doc.elapsed = float(timer() - start)
                return doc
            blocks: List[Dict[str, Any]] = []
            for block in decomposition.blocks:
                blocks.append({
                    "index": block.index,
                    "size": block.size,
                    "mode": str(block.certificate.mode),
                    "verdict": str(block.certificate.verdict),
                    "r": write_array(block.twist.r.coeffs.reshape(block.size, block.size), backend),
                    "s": write_array(block.twist.s.coeffs.reshape(block.size, block.size), backend),
                })
            modes = {block.certificate.mode for block in decomposition.blocks}
            if CertificateMode.NILPOTENT_VARIANT in modes:
                doc.mode = str(CertificateMode.NILPOTENT_VARIANT)
            else:
                doc.mode = str(CertificateMode.SEPARABILITY_IDEMPOTENT)
            doc.verdict = f"{len(blocks)} blocks"
            doc.blocks = blocks
            doc.elapsed = float(timer() - start)
            return doc
        except SeparabilityError:
            raise
        except Exception as e:
            logging.error(f"decompose failed: {e}")
            raise RuntimeError(f"decompose failed: {e}")

    def construct(self, kind: ConstructionKind | str, n: Optional[int] = None, r: Any = None, s: Any = None,
                  normalize: bool = False, components: Optional[List[InstanceDescription]] = None,
                  explicit: bool = False) -> InstanceDescription:
        """
        Instance description of a standard construction.

        The result is built once to validate it; random twists are drawn here
        so that the written description is reproducible without the seed.

        Args:
            kind: E0, nonfull, twisted, involutive_twisted, random_twisted or direct_sum
            n: matrix size for E0, nonfull and random_twisted
            r: twist r for twisted and involutive_twisted, as nested scalar literals
            s: twist s for twisted
            normalize: rescale a twisted element so that it is idempotent
            components: component descriptions for direct_sum
            explicit: write coefficients over declared algebras instead of the construction

        Returns:
            InstanceDescription: a validated description ready to be written

        Raises:
            DocumentError: a required argument is missing or the construction fails
        """
        kind = ConstructionKind(kind)
        mode = str(self.mode or settings.SCALAR_MODE)
        desc = InstanceDescription(element={}, mode="float64" if mode == "float" else mode,
                                   tolerance=self.tol, seed=self.seed)
        backend = instance_backend(desc)

        def required(name: str, value: Any) -> Any:
            if value is None:
                raise DocumentError(name, f"construction {kind} needs {name}")
            return value

        element: Dict[str, Any] = {"construction": kind.value}
        if kind in (ConstructionKind.E0, ConstructionKind.NONFULL):
            element["n"] = required("n", n)
        elif kind == ConstructionKind.TWISTED:
            element["r"], element["s"] = required("r", r), required("s", s)
            if normalize:
                element["normalize"] = True
        elif kind == ConstructionKind.INVOLUTIVE_TWISTED:
            element["r"] = required("r", r)
        elif kind == ConstructionKind.RANDOM_TWISTED:
            r_el, s_el = random_twist_pair(required("n", n), make_rng(self._seed(desc)), backend)
            size = required("n", n)
            element = {
                "construction": ConstructionKind.TWISTED.value,
                "r": write_array(r_el.coeffs.reshape(size, size), backend),
                "s": write_array(s_el.coeffs.reshape(size, size), backend),
            }
        elif kind == ConstructionKind.DIRECT_SUM:
            parts = required("components", components)
            for i, part in enumerate(parts):
                if part.construction == ConstructionKind.EXPLICIT:
                    raise DocumentError(f"components[{i}]", "direct sum components must be constructions")
            element["components"] = [part.element for part in parts]
        else:
            raise DocumentError("kind", "explicit instances are written with --explicit, not constructed")
        desc.element = element

        E = build_element(desc, backend)
        logging.info(f"constructed {kind} over {E.left.name}(x){E.right.name}")
        if explicit:
            return describe_element(E, seed=desc.seed, tolerance=desc.tolerance)
        return desc
