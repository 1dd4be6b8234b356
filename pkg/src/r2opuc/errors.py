"""Exception and warning types.

Two families: :class:`InputError` for data that violates a precondition
(bad chain sequence, degree out of range, unsupported example) and
:class:`NumericalError` for failures of an algorithm on otherwise valid
data.  The CLI maps them to exit codes 2 and 3.
"""


class R2Error(Exception):
    """Base class for all package errors."""


class InputError(R2Error, ValueError):
    """Input data violates a documented precondition."""


class NumericalError(R2Error, ArithmeticError):
    """A numerical procedure failed or produced an inconsistent result."""


class NotAChainSequence(InputError):
    """A parameter sequence left (0, 1): the data is not a positive chain sequence."""


class DegreeOutOfRange(InputError):
    pass


class DimensionTooSmall(InputError):
    pass


class UnsupportedExample(InputError):
    pass


class ParameterOutOfDomain(InputError):
    pass


class PoleInC(InputError):
    pass


class RequiresMultipleParameter(InputError):
    pass


class CoincidentPoints(InputError):
    pass


class DepthInsufficient(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class BracketFailure(NumericalError):
    """Sign pattern of P_k at the zeros of P_{k-1} does not bracket a zero."""


class DeflationResidual(NumericalError):
    """Synthetic division by (z - 1) left a non-negligible remainder."""


class DegenerateTau(NumericalError):
    pass


class TauCollision(NumericalError):
    """1 + tau_n * alpha_{n-1} vanished."""


class MomentOutOfRange(UserWarning):
    """A discrete moment with |k| >= n was requested; it is not measure-exact."""


class SimplicityWarning(UserWarning):
    """Two computed eigenvalues are closer than the simplicity threshold."""


class ConsistencyFailure(NumericalError):
    """Two routes to the same quantity disagreed beyond tolerance."""
