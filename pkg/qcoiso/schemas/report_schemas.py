from pydantic import BaseModel, Field
from typing import List, Optional, Literal

Verdict = Literal['pass', 'fail', 'inconclusive', 'skipped']

class CertificateTermSchema(BaseModel):
    label: str
    coefficient: str = Field(..., description='Canonical rendering of a Q(q) coefficient, e.g. "-q^3/(q^2+1)"')

class CertificateSchema(BaseModel):
    kind: Literal['ideal', 'identity', 'subspace', 'flatness']
    target: str
    terms: List[CertificateTermSchema] = Field(default_factory=list)
    nullspace_dim: int = 0
    residual_check: Literal['pass', 'fail']
    note: Optional[str] = None

class CaseSchema(BaseModel):
    type: str
    rank: int
    beta: str

class ClassicalChecks(BaseModel):
    closure: bool
    coideal: bool
    master_equation: bool
    witness: Optional[str] = None

class ClassicalReport(BaseModel):
    case: CaseSchema
    admissible: bool
    message: Optional[str] = None
    generators: List[str] = Field(default_factory=list)
    dim: int = 0
    coisotropic: bool = False
    checks: Optional[ClassicalChecks] = None

class LeftCoefficientOutcome(BaseModel):
    right_leg: str
    left: str
    verdict: Verdict
    certificate: Optional[CertificateSchema] = None

class GeneratorOutcome(BaseModel):
    name: str
    verdict: Verdict
    terms: List[LeftCoefficientOutcome] = Field(default_factory=list)
    witness: Optional[str] = None

class CoidealReport(BaseModel):
    verdict: Verdict
    per_generator: List[GeneratorOutcome] = Field(default_factory=list)

class PairOutcome(BaseModel):
    i: str
    j: str
    verdict: Verdict
    xprime: Optional[str] = None
    certificate: Optional[CertificateSchema] = None
    semiclassical: Optional[bool] = None

class FlatnessReport(BaseModel):
    verdict: Verdict
    per_pair: List[PairOutcome] = Field(default_factory=list)

class LimitCheck(BaseModel):
    name: str
    in_span: bool

class VerificationReport(BaseModel):
    case: CaseSchema
    admissible: bool
    classical: Optional[ClassicalReport] = None
    recipe_notes: List[str] = Field(default_factory=list)
    classical_limit: List[LimitCheck] = Field(default_factory=list)
    coideal: Optional[CoidealReport] = None
    flatness: Optional[FlatnessReport] = None
    degrees: dict = Field(default_factory=dict)
    timings: Optional[dict] = None
    stage: Optional[str] = Field(None, description='Stage at which the pipeline stopped, if it short-circuited')
    message: Optional[str] = None
    verdict: Verdict

class IdentityReport(BaseModel):
    name: str
    description: str
    solvable: bool
    nullspace_dim: int = 0
    certificate: Optional[CertificateSchema] = None
    published_in_solution_set: Optional[bool] = Field(None, description='Whether the printed coefficients solve the system; null when none are printed')
    notes: List[str] = Field(default_factory=list)

class RootEntry(BaseModel):
    label: str
    ambient: str
    height: int
    admissible: bool

class RootListing(BaseModel):
    type: str
    rank: int
    roots: List[RootEntry]
    admissible_count: int
