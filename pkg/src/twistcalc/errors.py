"""Exception hierarchy shared by every twistcalc module.

Each error carries a stable ``code`` string used by the command line front
end when reporting failures.
"""


class TwistcalcError(Exception):
    code = "E_TWISTCALC"


class UsageError(TwistcalcError):
    code = "E_USAGE"


class ParseError(UsageError):
    """Syntax error in a polynomial/operator expression or a config file."""

    code = "E_PARSE"

    def __init__(self, message, line=1, column=1, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class DomainError(TwistcalcError):
    code = "E_DOMAIN"


class ZeroDenominatorError(DomainError):
    code = "E_ZERO_DENOMINATOR"


class RootOfUnityError(DomainError):
    """A q-integer (or a difference of twist iterates) vanishes up to the working order."""

    code = "E_ROOT_OF_UNITY"


class IndivisibleError(DomainError):
    code = "E_INDIVISIBLE"


class IdentityTwistError(DomainError):
    code = "E_IDENTITY_TWIST"


class ReconstructionError(DomainError):
    code = "E_RECONSTRUCTION"


class NonIntegrableError(DomainError):
    code = "E_NON_INTEGRABLE"


class BasisNormMismatch(DomainError):
    code = "E_BASIS_NORM_MISMATCH"


class NormBoundViolation(AssertionError):
    """Raised when a norm bound that must hold is found violated."""

    code = "E_NORM_BOUND"


class NonClassicalWarning(UserWarning):
    pass
