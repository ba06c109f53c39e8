"""Exception taxonomy shared by all modules.

The CLI maps these onto exit codes: InputError -> 1, NumericError and
CapacityError -> 2.
"""


class InputError(ValueError):
    """Malformed input: dimension mismatch, bad flag, schema violation."""


class DomainError(InputError):
    """Input is well-formed but outside an operation's domain."""


class NumericError(RuntimeError):
    """A solve failed, a residual exceeded tolerance, or a math property
    required of the input does not hold."""


class ConsistencyError(NumericError):
    """Two equivalent criteria disagreed beyond tolerance."""


class CapacityError(RuntimeError):
    """A configured enumeration cap was exceeded."""
