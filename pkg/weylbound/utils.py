import math
from typing import Any, List

from .errors import ValidationError

SIG_DIGITS = 12

def fmt_num(x: Any) -> str:
    """Render numbers at 12 significant digits; other values pass through str()."""
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        return str(x)
    if isinstance(x, int):
        return str(x)
    if math.isnan(x) or math.isinf(x):
        return repr(x)
    return f"{x:.{SIG_DIGITS}g}"

def parse_grid(spec: str) -> List[float]:
    """
    'a:b:n' -> n points from a to b inclusive. A bare number gives a one-point grid.
    """
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 3:
            raise ValueError
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError(f"Grid '{spec}' expected 'a:b:n'") from None
    if n < 1:
        raise ValidationError(f"Grid '{spec}' needs n >= 1, got {n}")
    if n == 1:
        return [a]
    step = (b - a) / (n - 1)
    return [a + i * step for i in range(n)]

def require_positive(name: str, value: float) -> float:
    v = float(value)
    if not (v > 0.0) or not math.isfinite(v):
        raise ValidationError(f"Field '{name}' expected a finite value > 0, got {value!r}")
    return v

def require_nonnegative(name: str, value: float) -> float:
    v = float(value)
    if not (v >= 0.0) or not math.isfinite(v):
        raise ValidationError(f"Field '{name}' expected a finite value >= 0, got {value!r}")
    return v
