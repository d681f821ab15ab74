"""Error types shared across evaluators."""

__all__ = ["NumericalFailureError", "PrecisionExhaustedError"]


class PrecisionExhaustedError(ArithmeticError):
    """Raised when a value cannot be certified at the documented accuracy.

    The alternating nested sums of the closed form lose digits to
    cancellation as antenna counts grow; outside the supported envelope
    the evaluator refuses to return a silently wrong number.
    """


class NumericalFailureError(RuntimeError):
    """Raised when an iterative numerical procedure fails to converge."""
