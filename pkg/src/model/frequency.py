from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from mpmath import mp, mpf

from src.model.errors import InvalidFrequency

GOLDEN = "golden"
SQRT2M1 = "sqrt2m1"

# Constant partial quotients of the tagged frequencies.
_TAG_QUOTIENT = {GOLDEN: 1, SQRT2M1: 2}

_TAG_DIGITS = 60


def _tag_value(tag: str) -> mpf:
    if tag == GOLDEN:
        return (mp.sqrt(5) - 1) / 2
    return mp.sqrt(2) - 1


@dataclass(frozen=True)
class Frequency:
    """Rotation frequency alpha in (0, 1).

    ``digits`` keeps the decimal expansion at the precision it was given so
    continued fractions can be computed beyond double precision; tagged
    frequencies know their partial quotients exactly.
    """

    value: float
    digits: str
    tag: Optional[str] = None

    def __post_init__(self):
        if not 0.0 < self.value < 1.0:
            raise InvalidFrequency(f"Frequency must lie in (0, 1), got {self.value!r}")
        if self.tag is not None and self.tag not in _TAG_QUOTIENT:
            raise InvalidFrequency(
                f"Unknown frequency tag '{self.tag}'. Known tags: {', '.join(sorted(_TAG_QUOTIENT))}"
            )

    @classmethod
    def tagged(cls, tag: str) -> "Frequency":
        if tag not in _TAG_QUOTIENT:
            raise InvalidFrequency(
                f"Unknown frequency tag '{tag}'. Known tags: {', '.join(sorted(_TAG_QUOTIENT))}"
            )
        with mp.workdps(_TAG_DIGITS):
            exact = _tag_value(tag)
            return cls(value=float(exact), digits=mp.nstr(exact, _TAG_DIGITS, strip_zeros=False), tag=tag)

    @classmethod
    def golden(cls) -> "Frequency":
        return cls.tagged(GOLDEN)

    @classmethod
    def sqrt2m1(cls) -> "Frequency":
        return cls.tagged(SQRT2M1)

    @classmethod
    def parse(cls, text: str) -> "Frequency":
        """Accept a tag name or a decimal literal such as ``0.4142135623730950488``."""
        text = str(text).strip()
        if text.lower() in _TAG_QUOTIENT:
            return cls.tagged(text.lower())
        try:
            value = float(text)
        except ValueError:
            raise InvalidFrequency(
                f"Cannot parse frequency '{text}': expected a decimal number or one of "
                f"{', '.join(sorted(_TAG_QUOTIENT))}"
            )
        return cls(value=value, digits=text)

    @classmethod
    def from_float(cls, value: float) -> "Frequency":
        return cls(value=float(value), digits=repr(float(value)))

    @property
    def significant_digits(self) -> int:
        """Number of significant decimal digits carried by ``digits``"""
        mantissa = self.digits.lower().split("e")[0].replace("-", "").replace("+", "")
        return len(mantissa.replace(".", "").lstrip("0")) or 1

    @property
    def is_exact(self) -> bool:
        return self.tag is not None

    def mp_value(self) -> mpf:
        """Value at the current mpmath precision"""
        if self.tag is not None:
            return _tag_value(self.tag)
        return mpf(self.digits)

    def exact_quotients(self, depth: int) -> Optional[List[int]]:
        if self.tag is None:
            return None
        return [_TAG_QUOTIENT[self.tag]] * depth

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"tag": self.tag, "value": self.value}
        if self.tag is None:
            data["digits"] = self.digits
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Frequency":
        tag = data.get("tag")
        if tag:
            return cls.tagged(tag)
        if "digits" in data:
            return cls.parse(data["digits"])
        if "value" not in data:
            raise InvalidFrequency("Frequency entry needs a 'tag' or a 'value'")
        return cls.from_float(data["value"])
