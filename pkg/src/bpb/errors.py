"""Exception hierarchy shared by the whole package.

The CLI maps these onto exit codes: parse/IO problems exit 1, gate and
precondition failures exit 2, violated internal invariants exit 3.
"""


class BpbError(Exception):
    """Base class for all package errors."""


class AlignmentError(BpbError):
    """A vector or matrix does not match the atom count of its space."""


class PreconditionError(BpbError):
    """An operation's stated hypothesis does not hold for the given input."""


class GateError(PreconditionError):
    """A near-attainment threshold test failed.

    Carries the observed norm and the gate it had to exceed strictly.
    """

    def __init__(self, message, observed=None, gate=None):
        super().__init__(message)
        self.observed = observed
        self.gate = gate


class DegenerateRestrictionError(PreconditionError):
    """Restriction set carries no mass, so normalization is impossible."""


class ConstructionFailureError(BpbError):
    """A constructive step degenerated (e.g. a selected set emptied out).

    Carries the step log accumulated so far for debugging.
    """

    def __init__(self, message, steps=None):
        super().__init__(message)
        self.steps = steps or {}


class InvariantViolationError(BpbError):
    """A branch the underlying analysis proves impossible actually fired."""


class CertificationFailureError(BpbError):
    """A recorded repair result failed re-validation."""


class SamplingFailureError(BpbError):
    """A modulus experiment accepted no samples at the requested distance."""

    def __init__(self, message, rows=None):
        super().__init__(message)
        self.rows = rows or []


class ParseError(BpbError):
    """Malformed instance or result file; message carries field/line info."""
