"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`ProjConstError`, so callers (and the CLI) can separate input
problems from bugs.
"""


class ProjConstError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(ProjConstError, ValueError):
    pass


class ZeroFunctional(ProjConstError, ValueError):
    pass


class ZeroVector(ProjConstError, ValueError):
    pass


class DuplicateNodes(ProjConstError, ValueError):
    pass


class Singular(ProjConstError, ArithmeticError):
    pass


class DependentBasis(ProjConstError, ValueError):
    pass


class NonFiniteObjective(ProjConstError, FloatingPointError):
    pass


class TooFewFunctionals(ProjConstError, ValueError):
    pass


class BadWitness(ProjConstError, ValueError):
    pass


class HypothesisViolation(ProjConstError, ValueError):
    """One or more theorem hypotheses fail; ``failures`` lists them."""

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))


class ViolationFound(ProjConstError, AssertionError):
    """A proved inequality failed numerically; points at a bug in our code."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class DegenerateY(ProjConstError, ValueError):
    pass


class BadExponent(ProjConstError, ValueError):
    pass


class CertificateFailure(ProjConstError, AssertionError):
    def __init__(self, bullet, indices, residual):
        self.bullet = bullet
        self.indices = tuple(indices)
        self.residual = residual
        super().__init__(f"{bullet} failed at {self.indices}: residual {residual}")


class ParseError(ProjConstError, ValueError):
    """Config error; ``pointer`` is a JSON pointer to the offending field."""

    def __init__(self, pointer, message):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")


class RankDeficient(ProjConstError, ValueError):
    def __init__(self, rank, n):
        self.rank = rank
        self.n = n
        super().__init__(f"functionals have rank {rank} < n = {n}; not a norm")
