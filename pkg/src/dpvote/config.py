"""``key = value`` manifests and the small value grammars shared by the CLI."""

from __future__ import annotations

import math
import re
from pathlib import Path

_LN = re.compile(r"^\s*ln\s*\(\s*([^()]+?)\s*\)\s*$", re.IGNORECASE)


def parse_epsilon(text: str) -> float:
    """A decimal, or ``ln(x)`` so that ``e^eps`` is exactly ``x`` up to rounding."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _LN.match(text)
    value = math.log(float(m.group(1))) if m else float(text)
    if not value > 0 or not math.isfinite(value):
        raise ValueError(f"epsilon must be a positive finite real, got {text!r}")
    return value


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (stop included when hit) or a comma-separated list.

    List items may use the ``ln(x)`` form.
    """
    text = text.strip()
    if ":" in text and "," not in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} must be start:stop:step")
        start, stop, step = (float(x) for x in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"bad grid {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(count)]
    else:
        values = [_parse_float(x) for x in text.split(",") if x.strip()]
    if not values:
        raise ValueError("empty grid")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"grid {text!r} is not strictly increasing")
    return values


def _parse_float(x: str) -> float:
    m = _LN.match(x)
    return math.log(float(m.group(1))) if m else float(x)


def read_manifest(path: str | Path) -> dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment, keys use ``-`` or ``_``."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        out[key.replace("-", "_")] = value
    return out
