"""Exception hierarchy shared by every qnetcode module."""


class QNetCodeError(Exception):
    """Base class for all errors raised by qnetcode."""


# -- network construction -------------------------------------------------

class NetworkError(QNetCodeError):
    pass


class CycleDetected(NetworkError):
    pass


class BadSourceFanIn(NetworkError):
    pass


class BadTargetDegree(NetworkError):
    pass


class DanglingInternalNode(NetworkError):
    pass


class DuplicateNode(NetworkError):
    pass


class UnknownEndpoint(NetworkError):
    pass


class UnknownNode(NetworkError):
    pass


class BadPairs(NetworkError):
    """Pairs list is empty or reuses a node in two roles."""


# -- coding schemes --------------------------------------------------------

class CodingError(QNetCodeError):
    pass


class ArityMismatch(CodingError):
    pass


class SymbolOutOfRange(CodingError):
    pass


class NoCodeForNode(CodingError):
    pass


class NotAPermutation(CodingError):
    pass


class NonPrimeAlphabet(CodingError):
    pass


class TableTooLarge(CodingError):
    """A local truth table or the exhaustive input space exceeds its cap."""


class SchemeNotASolution(CodingError):
    pass


# -- state vector ----------------------------------------------------------

class StateError(QNetCodeError):
    pass


class NotNormalized(StateError):
    pass


class DimensionMismatch(StateError):
    pass


class DuplicateRegister(StateError):
    pass


class DimensionCap(StateError):
    pass


class OutRegNotZero(StateError):
    pass


class UnknownRegister(StateError):
    pass


class ForcedOutcomeImpossible(StateError):
    pass


class RegisterSetMismatch(StateError):
    pass


class StillEntangled(StateError):
    """A register that must be disregarded is still entangled with the rest.

    ``residual`` is the probability weight lying outside the register's
    dominant computational-basis value.
    """

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


# -- files -----------------------------------------------------------------

class ParseError(QNetCodeError):
    pass
