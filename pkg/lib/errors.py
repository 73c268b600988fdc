"""Exception hierarchy shared by every module and the CLI exit-code contract."""


class KRError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class InputError(KRError):
    """Bad input: malformed data, violated preconditions, unsupported params."""

    exit_code = 2


class MathematicalMismatch(KRError):
    """Two computations that must agree did not."""

    exit_code = 1


# znf-core
class IllDefinedMap(InputError):
    """Matrix does not carry the source relations into the target relations."""


class CompositionNotZero(InputError):
    pass


# gmod
class InvalidInvolution(InputError):
    pass


class EquivarianceError(InputError):
    """Differential does not commute with the involutions."""

    def __init__(self, degree: int, message: str = ""):
        self.degree = degree
        super().__init__(message or f"differential leaving degree {degree} is not equivariant")


class UnstableTruncation(MathematicalMismatch):
    """Two resolution paddings disagreed. Indicates an internal bug."""


class InvariantViolation(MathematicalMismatch):
    """A construction failed its own postcondition. Indicates an internal bug."""


# chain
class InconsistentTemplate(InputError):
    pass


# realcx
class InvalidRealComplex(InputError):
    def __init__(self, simplex, reason: str):
        self.simplex = simplex
        self.reason = reason
        super().__init__(f"{reason}: {list(simplex) if simplex is not None else None}")


class NotFreeAction(InputError):
    pass


class NotOnVariety(InputError):
    pass


class DegenerateRadius(MathematicalMismatch):
    pass


class UnsupportedParams(InputError):
    pass


# specseq
class NonCollapsing(MathematicalMismatch):
    pass


class NonCommutingMorphism(InputError):
    pass


class LemmaViolation(MathematicalMismatch):
    """Morphism propagation produced a page where iso/injection was lost."""


# krtables
class HarnackViolation(InputError):
    pass


class NotTabulated(InputError):
    """Degree outside the closed-form support of a table."""


class MismatchAt(MathematicalMismatch):
    def __init__(self, degree: int, computed, expected):
        self.degree = degree
        self.computed = computed
        self.expected = expected
        super().__init__(f"degree {degree}: computed {computed}, expected {expected}")


# kr-cli
class SuiteFailed(MathematicalMismatch):
    def __init__(self, suite: str, failed: list):
        self.suite = suite
        self.failed = failed
        super().__init__(f"{suite}: {len(failed)} job(s) failed: {', '.join(failed)}")
