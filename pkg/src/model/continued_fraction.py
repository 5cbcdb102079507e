from dataclasses import dataclass, field
from typing import List, Optional


@dataclass(frozen=True)
class ContinuedFraction:
    """Expansion alpha = a_0 + 1/(a_1 + 1/(a_2 + ...)).

    ``p[k]/q[k]`` is the k-th convergent, k = 0..K, with p[0]/q[0] = a_0/1.
    Integers are Python ints so deep expansions do not overflow.
    """

    integer_part: int
    partial_quotients: List[int]
    p: List[int]
    q: List[int]
    precision_exhausted: bool = False
    terminated: bool = False

    @property
    def depth(self) -> int:
        return len(self.partial_quotients)

    def convergent(self, k: int) -> tuple:
        return self.p[k], self.q[k]


@dataclass(frozen=True)
class BrjunoReport:
    partial_sum: float
    beta_estimate: float
    terms: List[float] = field(default_factory=list)
    depth: int = 0
    precision_exhausted: bool = False
    # Which arithmetic regime the frequency tag certifies, if any.
    certified_regime: Optional[str] = None
