import structlog

logger = structlog.get_logger(__name__)

class QcoisoError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        self.message = message
        super().__init__(message)

class FieldArithmeticError(QcoisoError):
    def __init__(self, message: str = 'Division by zero in Q(q).'):
        super().__init__(code='DIVISION_BY_ZERO', message=message)

class NotRegularAtOneError(QcoisoError):
    def __init__(self, message: str = 'Rational function is not regular at q=1.'):
        super().__init__(code='NOT_REGULAR_AT_ONE', message=message)

class ParseError(QcoisoError):
    def __init__(self, message: str = 'Could not parse expression.'):
        super().__init__(code='PARSE_ERROR', message=message)

class RootSystemError(QcoisoError):
    def __init__(self, message: str = 'Invalid root system data.'):
        super().__init__(code='ROOT_SYSTEM_ERROR', message=message)

class UnsupportedCaseError(QcoisoError):
    def __init__(self, message: str = 'This Cartan type or root is not supported.'):
        super().__init__(code='UNSUPPORTED_CASE', message=message)

class AlgebraMismatchError(QcoisoError):
    def __init__(self, message: str = 'Operands belong to different algebras.'):
        super().__init__(code='ALGEBRA_MISMATCH', message=message)

class DegreeOverflowError(QcoisoError):
    def __init__(self, degree: int, limit: int, hint: str = 'raise QCOISO_MAX_DEGREE or pass --max-degree'):
        self.degree = degree
        self.limit = limit
        super().__init__(
            code='DEGREE_OVERFLOW',
            message=f'Requested degree {degree} exceeds the configured limit {limit}; {hint}.'
        )

class RecipeValidationError(QcoisoError):
    def __init__(self, message: str = 'Recipe failed validation.', path: str = ''):
        self.path = path
        super().__init__(
            code='RECIPE_INVALID',
            message=f'{path}: {message}' if path else message
        )

def create_error_response(code: str, message: str):
    return {'success': False, 'error': {'code': code, 'message': message}}

def error_response_for(exc: Exception):
    """Maps an exception raised during a run to the error payload emitted by the CLI."""
    if isinstance(exc, QcoisoError):
        logger.error('Run aborted', code=exc.code, message=exc.message)
        return create_error_response(code=exc.code, message=exc.message)
    logger.error('Unhandled exception during run', exc_info=exc)
    return create_error_response(
        code='INTERNAL_ERROR',
        message='An unexpected internal error occurred.'
    )

class VerificationStageError(QcoisoError):
    def __init__(self, stage: str, cause: QcoisoError):
        self.stage = stage
        self.cause = cause
        super().__init__(code=cause.code, message=f'[{stage}] {cause.message}')
