from .report_schemas import (
    CertificateSchema, CertificateTermSchema, CaseSchema, ClassicalReport, ClassicalChecks,
    CoidealReport, GeneratorOutcome, LeftCoefficientOutcome, FlatnessReport, PairOutcome,
    LimitCheck, VerificationReport, IdentityReport, RootEntry, RootListing,
)
from .recipe_schemas import BracketExprSchema, GeneratorSpec, RecipeSchema
from .run_schemas import RunConfig
