"""
Normalizing textual numbers
===========================

Extraction feeds every value cell through one total function: digits,
separators, percents, scale words, and spelled-out numbers all come back as
floats, and anything unrecognizable comes back as NaN instead of raising.
"""

from gistvis.numbers import parse_number

expressions = [
    "3,932",
    "ten thousand",
    "40%",
    "1.2 million",
    "two hundred fifty thousand",
    "$5,000",
    "8 per cent",
    "several",          # -> NaN, not an error
]

for expr in expressions:
    print(f"{expr!r:>32} -> {parse_number(expr)}")
