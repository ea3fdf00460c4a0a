"""Bit-exact text interchange for binary64 values and 3D point files.

Hex-float (``float.hex()`` notation, e.g. ``0x1.999999999999ap-4``) is the
canonical rendering for every float that crosses a file or report boundary;
decimal renderings are advisory. Point files are plain text: one point per
line, three comma-separated fields, each field a decimal or hex-float
literal. Blank lines and ``#`` comment lines are ignored.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence


class PointParseError(ValueError):
    """A point file or inline point literal could not be parsed."""


def float_to_hex(x: float) -> str:
    return float(x).hex()


def float_from_text(field: str) -> float:
    """Parse one coordinate field: hex-float if it carries an 0x marker,
    decimal otherwise. Non-finite values are rejected."""
    text = field.strip()
    if not text:
        raise PointParseError("empty coordinate field")
    lowered = text.lower()
    try:
        if "0x" in lowered:
            value = float.fromhex(text)
        else:
            value = float(text)
    except (ValueError, OverflowError) as exc:
        raise PointParseError(f"bad coordinate {text!r}: {exc}") from None
    if not math.isfinite(value):
        raise PointParseError(f"non-finite coordinate {text!r}")
    return value


def parse_point_line(line: str) -> tuple[float, float, float]:
    fields = line.split(",")
    if len(fields) != 3:
        raise PointParseError(
            f"expected 3 comma-separated fields, got {len(fields)}: {line!r}"
        )
    x, y, z = (float_from_text(f) for f in fields)
    return (x, y, z)


def parse_points_text(text: str) -> list[tuple[float, float, float]]:
    points = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            points.append(parse_point_line(line))
        except PointParseError as exc:
            raise PointParseError(f"line {lineno}: {exc}") from None
    return points


def format_point_line(coords: Sequence[float], hex_floats: bool = True) -> str:
    if hex_floats:
        return ",".join(float_to_hex(c) for c in coords)
    return ",".join(repr(float(c)) for c in coords)


def format_points_text(points: Iterable[Sequence[float]], hex_floats: bool = True) -> str:
    return "\n".join(format_point_line(p, hex_floats) for p in points) + "\n"
