"""Exception taxonomy shared across the package."""


class SplitJacError(Exception):
    """Base class for all package errors."""


class NonUnitDeterminant(SplitJacError):
    pass


class OrderCapExceeded(SplitJacError):
    pass


class NotADivisor(SplitJacError):
    pass


class NotAMultiple(SplitJacError):
    pass


class UnsupportedModulus(SplitJacError):
    pass


class ConstraintViolation(SplitJacError):
    pass


class InternalInconsistency(SplitJacError):
    pass


class BadPrime(SplitJacError):
    pass


class BadReduction(SplitJacError):
    pass


class UnsupportedPrime(SplitJacError):
    pass


class InvalidDiscriminantData(SplitJacError):
    pass


class OracleCapExceeded(SplitJacError):
    pass


class MalformedRow(SplitJacError):
    def __init__(self, line_number, message):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class MissingHeader(SplitJacError):
    pass


class NonIntegerField(MalformedRow):
    pass


class RemoteDisabled(SplitJacError):
    pass


class HttpError(SplitJacError):
    def __init__(self, status, message=""):
        super().__init__(f"HTTP {status} {message}".strip())
        self.status = status


class PaginationInconsistency(SplitJacError):
    pass


class SingularMatrix(SplitJacError):
    pass


class InsufficientPrimes(SplitJacError):
    def __init__(self, achieved_rank, needed, bound):
        super().__init__(
            f"rank {achieved_rank} of {needed} using primes up to {bound}"
        )
        self.achieved_rank = achieved_rank
        self.needed = needed
        self.bound = bound


class ConflictingRecord(SplitJacError):
    pass


class CorruptCheckpoint(SplitJacError):
    pass


class VersionMismatch(SplitJacError):
    pass


class MissingFixture(SplitJacError):
    pass
