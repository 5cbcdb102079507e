class AmspecError(ValueError):
    """Base class of every error raised by the amspec numerics.

    ``exit_code`` follows the command-line contract: 1 for a failed
    verification or certification, 2 for bad input.
    """

    exit_code = 1


class InvalidArgument(AmspecError):
    """Malformed user input (flags, specs, model files)"""

    exit_code = 2


class InvalidFrequency(InvalidArgument):
    """Frequency outside (0, 1) or not parseable"""


class RationalFrequency(InvalidFrequency):
    """Frequency reproduced by a convergent with a small denominator"""

    def __init__(self, value: float, p: int, q: int):
        self.value = value
        self.p = p
        self.q = q
        super().__init__(f"Frequency {value!r} is rational within working precision: {p}/{q}")


class ModelLoadError(InvalidArgument):
    """Model file missing, unreadable or structurally invalid"""


class NonInvertible(AmspecError):
    pass


class NoConvergence(AmspecError):
    pass


class TruncationOverflow(AmspecError):
    pass


class PrecisionExhausted(AmspecError):
    pass


class OrbitOverflow(AmspecError):
    pass


class SaddlePoint(AmspecError):
    pass


class InvarianceCertificationFailed(AmspecError):
    pass


class ConsistencyFailure(AmspecError):
    pass


class StripTooWide(AmspecError):
    pass


class WindingNonzero(AmspecError):
    pass


class SingularConjugator(AmspecError):
    pass


class SmallDivisorBreakdown(AmspecError):

    def __init__(self, k: int, divisor: float, coefficient: float):
        self.k = k
        self.divisor = divisor
        self.coefficient = coefficient
        super().__init__(
            f"Small divisor at k={k}: |e^(2*pi*i*k*alpha) - 1| = {divisor:.3e} "
            f"while |nu_k| = {coefficient:.3e} exceeds the truncation tail"
        )


class ResidualTooLarge(AmspecError):
    pass


class PositiveNu0(AmspecError):
    pass


class InconclusiveDichotomy(AmspecError):

    def __init__(self, margin: float, n: int):
        self.margin = margin
        self.n = n
        super().__init__(
            f"Dichotomy test inconclusive: margin*n = {margin * n:.3f} lies between the "
            f"hyperbolic and non-hyperbolic thresholds (n={n})"
        )


class WindowTooSmall(AmspecError):
    pass


class IterateOverflow(AmspecError):
    pass
