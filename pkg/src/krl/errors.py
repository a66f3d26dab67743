"""Exception types shared across the package."""


class KRLError(Exception):
    """Base class for every error raised by krl."""


class ComputationError(KRLError):
    """A computation could not be completed or certified."""


class InputError(KRLError):
    """Malformed or inconsistent input data."""


# poly
class NotReciprocal(InputError):
    pass


class NotPalindromic(InputError):
    pass


class PolyParseError(InputError):
    pass


# knots
class InvalidDescriptor(InputError):
    pass


class Unsupported(ComputationError):
    pass


class ParseError(InputError):
    def __init__(self, line, msg):
        super().__init__(f"line {line}: {msg}")
        self.line = line


# signatures / lin
class NotSeifert(InputError):
    pass


class OnJump(ComputationError):
    pass


class NoSignature(ComputationError):
    pass


class PrecisionExhausted(ComputationError):
    pass


# riley
class InvalidFraction(InputError):
    pass


class ExtractionMismatch(ComputationError):
    pass


class NotSquarefree(ComputationError):
    pass


class ComplexRoot(InputError):
    pass


class LongitudeCheckFailed(ComputationError):
    pass


class ParityViolation(ComputationError):
    pass


# locus
class ZeroHeightArc(InputError):
    pass


class BothHeightsZero(InputError):
    pass


class ConstantSignature(ComputationError):
    pass


class ZeroSignature(ComputationError):
    pass


# geomcore
class NotOnQuadric(InputError):
    pass


class WrongChart(InputError):
    pass


class NotCharacterOfSphere(InputError):
    pass
