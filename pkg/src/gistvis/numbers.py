"""Normalization of textual numeric expressions to floats.

Handles digit strings with thousands separators, decimals, signs, percent
suffixes (returned as fractions), scale words (thousand through trillion),
and spelled-out English numbers up to the billions. Anything unrecognizable
parses to NaN; the function never raises.
"""

from __future__ import annotations

import math
import re

NAN = math.nan

_UNITS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11,
    "twelve": 12, "thirteen": 13, "fourteen": 14, "fifteen": 15,
    "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
}
_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}
_SCALES = {
    "hundred": 100,
    "thousand": 1_000,
    "million": 1_000_000,
    "billion": 1_000_000_000,
    "trillion": 1_000_000_000_000,
}

_PERCENT_SUFFIX = re.compile(r"(%|percent|per cent)\s*$")
_NUMERIC = re.compile(r"^[+-]?(\d{1,3}(,\d{3})+|\d+)(\.\d+)?$")


def _words_to_number(tokens: list[str]) -> float:
    current = 0.0
    total = 0.0
    seen = False
    for word in tokens:
        if word in _UNITS:
            current += _UNITS[word]
            seen = True
        elif word in _TENS:
            current += _TENS[word]
            seen = True
        elif word == "hundred":
            if not seen:
                current = 1
            current *= 100
            seen = True
        elif word in _SCALES:
            if not seen:
                current = 1
            total += current * _SCALES[word]
            current = 0.0
            seen = True
        elif word == "and":
            continue
        else:
            return NAN
    return total + current if seen else NAN


def parse_number(expr: str) -> float:
    """Parse a textual numeric expression; NaN is the failure value."""
    if expr is None:
        return NAN
    text = expr.strip().lower()
    if not text:
        return NAN
    if text == "nan":
        return NAN

    percent = False
    m = _PERCENT_SUFFIX.search(text)
    if m:
        percent = True
        text = text[: m.start()].strip()
        if not text:
            return NAN

    # Strip common currency markers before the digits.
    text = re.sub(r"^[$€£¥]\s*", "", text)

    sign = 1.0
    if text.startswith(("+", "-")):
        if text[0] == "-":
            sign = -1.0
        text = text[1:].strip()

    tokens = [t for t in re.split(r"[\s-]+", text) if t]
    if not tokens:
        return NAN

    result = NAN
    if _NUMERIC.fullmatch(tokens[0]):
        base = float(tokens[0].replace(",", ""))
        if len(tokens) == 1:
            result = base
        else:
            # "1.2 million" style: numeric head followed by scale words.
            scale = 1.0
            for word in tokens[1:]:
                if word in _SCALES and word != "hundred":
                    scale *= _SCALES[word]
                elif word == "hundred":
                    scale *= 100
                else:
                    return NAN
            result = base * scale
    else:
        result = _words_to_number(tokens)

    if math.isnan(result):
        return NAN
    result *= sign
    return result / 100 if percent else result
