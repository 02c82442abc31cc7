from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ValidationError, WindowError


@dataclass(frozen=True)
class Dimension:
    """Ambient dimension n >= 2 with n = 2m+1 (odd) or n = 2m+2 (even)."""
    n: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"Dimension needs an integer n >= 2, got {self.n!r}")

    @property
    def m(self) -> int:
        return (self.n - 1) // 2

    @property
    def parity(self) -> str:
        return "odd" if self.n % 2 else "even"

    @property
    def is_even(self) -> bool:
        return self.n % 2 == 0

    @property
    def onset(self) -> float:
        """(n-1)/2, where the counting density switches on."""
        return (self.n - 1) / 2.0


@dataclass(frozen=True)
class LocalGeometry:
    """d is twice the radius of the largest hyperbolic ball around the point."""
    d: float

    def __post_init__(self) -> None:
        if not (self.d > 0) or not math.isfinite(self.d):
            raise DomainError(f"LocalGeometry needs d > 0, got {self.d!r}")


@dataclass(frozen=True)
class BoundPair:
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ValidationError(f"BoundPair has NaN endpoint: ({self.lower}, {self.upper})")
        if self.lower > self.upper:
            raise ValidationError(f"BoundPair lower {self.lower!r} exceeds upper {self.upper!r}")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def clamped(self, floor: float = 0.0) -> "BoundPair":
        return BoundPair(max(self.lower, floor), max(self.upper, floor))

    def scaled(self, factor: float) -> "BoundPair":
        if factor < 0:
            raise ValidationError(f"BoundPair scale factor must be >= 0, got {factor}")
        return BoundPair(self.lower * factor, self.upper * factor)


@dataclass(frozen=True)
class HyperbolicSurface:
    """Closed hyperbolic surface of genus g >= 2; area from Gauss-Bonnet."""
    genus: int
    systole: float

    def __post_init__(self) -> None:
        if int(self.genus) != self.genus or self.genus < 2:
            raise DomainError(f"HyperbolicSurface needs genus >= 2, got {self.genus!r}")
        if not (self.systole > 0) or not math.isfinite(self.systole):
            raise DomainError(f"HyperbolicSurface needs systole > 0, got {self.systole!r}")

    @property
    def area(self) -> float:
        return 4.0 * math.pi * (self.genus - 1)

    @property
    def window_limit(self) -> float:
        """sqrt(l^2+1) - 1; the geodesic envelope needs T below this."""
        return math.sqrt(self.systole ** 2 + 1.0) - 1.0

    def check_window(self, eps: float, T: float) -> None:
        if not (0 < eps <= T < self.window_limit):
            raise WindowError(
                f"Need 0 < eps <= T < {self.window_limit:.9f} for systole {self.systole}, "
                f"got eps={eps}, T={T}"
            )

    @classmethod
    def bolza(cls) -> "HyperbolicSurface":
        return cls(genus=2, systole=2.0 * math.acosh(1.0 + math.sqrt(2.0)))


@dataclass(frozen=True)
class EigenfunctionQuery:
    lam: float
    geom: LocalGeometry
    dim: Dimension

    def __post_init__(self) -> None:
        if not (self.lam >= 0) or not math.isfinite(self.lam):
            raise DomainError(f"EigenfunctionQuery needs lambda >= 0, got {self.lam!r}")


@dataclass(frozen=True)
class HeatQuery:
    t: float
    c: float = 0.0

    def __post_init__(self) -> None:
        if not (self.t > 0):
            raise DomainError(f"HeatQuery needs t > 0, got {self.t!r}")
        if not (self.c >= 0):
            raise DomainError(f"HeatQuery needs c >= 0, got {self.c!r}")
