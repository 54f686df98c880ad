"""Explicit, re-checkable witnesses produced by the membership and flatness solvers."""
from dataclasses import dataclass, field

from qcoiso.schemas.report_schemas import CertificateSchema, CertificateTermSchema
from qcoiso.services.qfield import RatFunc, render, rf


@dataclass
class CertificateTerm:
    label: str
    coefficient: RatFunc
    element: object  # NCPoly


@dataclass
class Certificate:
    kind: str
    target: object  # NCPoly
    terms: list[CertificateTerm] = field(default_factory=list)
    nullspace_dim: int = 0
    note: str = ''

    def combination(self):
        total = self.target.zero_like()
        for term in self.terms:
            total = total + rf(term.coefficient) * term.element
        return total

    def residual(self):
        return self.target - self.combination()

    def recheck(self, ideal=None) -> bool:
        """Re-expands the certificate; the remainder must vanish, modulo ``ideal`` when given."""
        residual = self.residual()
        if not residual:
            return True
        return ideal is not None and ideal.contains(residual)

    def coefficient_of(self, label: str) -> RatFunc:
        for term in self.terms:
            if term.label == label:
                return rf(term.coefficient)
        return rf(0)

    def to_schema(self, ideal=None) -> CertificateSchema:
        return CertificateSchema(
            kind=self.kind,
            target=self.target.render(),
            terms=[CertificateTermSchema(label=t.label, coefficient=render(t.coefficient)) for t in self.terms],
            nullspace_dim=self.nullspace_dim,
            residual_check='pass' if self.recheck(ideal) else 'fail',
            note=self.note or None,
        )
