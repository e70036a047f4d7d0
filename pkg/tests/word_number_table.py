"""Hand-computed expected values for textual number expressions.

Each entry was worked out independently by hand arithmetic (word values and
scale multiplication) before wiring up the parser, and is frozen here as the
oracle the implementation must match. NaN entries are expressions the parser
is required to reject.
"""

NAN = float("nan")

# (expression, expected value)
CASES = [
    # plain digit strings
    ("0", 0.0),
    ("7", 7.0),
    ("42", 42.0),
    ("365", 365.0),
    ("8848", 8848.0),
    ("1000000", 1_000_000.0),
    # signs and decimals
    ("-7", -7.0),
    ("+3.5", 3.5),
    ("-0.25", -0.25),
    ("3.14159", 3.14159),
    ("0.001", 0.001),
    # thousands separators
    ("3,932", 3932.0),
    ("11,435", 11435.0),
    ("1,000", 1000.0),
    ("12,345,678", 12_345_678.0),
    ("1,234.56", 1234.56),
    # percent suffixes (fractions out)
    ("40%", 0.4),
    ("60%", 0.6),
    ("100%", 1.0),
    ("0.9%", 0.009),
    ("12.5 percent", 0.125),
    ("8 per cent", 0.08),
    ("-5%", -0.05),
    # digit + scale word
    ("10 thousand", 10_000.0),
    ("1.2 million", 1_200_000.0),
    ("3 million", 3_000_000.0),
    ("2.5 billion", 2_500_000_000.0),
    ("1 trillion", 1_000_000_000_000.0),
    ("13.57 trillion", 13_570_000_000_000.0),
    ("4 hundred", 400.0),
    # spelled-out numbers
    ("one", 1.0),
    ("ten", 10.0),
    ("thirteen", 13.0),
    ("nineteen", 19.0),
    ("twenty", 20.0),
    ("twenty-five", 25.0),
    ("ninety nine", 99.0),
    ("one hundred", 100.0),
    ("three hundred and six", 306.0),
    ("seven hundred twenty one", 721.0),
    ("ten thousand", 10_000.0),
    ("ten million", 10_000_000.0),
    ("two hundred fifty thousand", 250_000.0),
    ("one million two hundred thousand", 1_200_000.0),
    ("four billion", 4_000_000_000.0),
    ("sixty-six thousand", 66_000.0),
    ("thousand", 1000.0),
    ("a0", NAN),  # malformed token
    # currency markers
    ("$5,000", 5000.0),
    ("€2.5 million", 2_500_000.0),
    # rejects
    ("", NAN),
    ("NaN", NAN),
    ("several", NAN),
    ("Q3", NAN),
    ("10 bananas", NAN),
    ("1,23", NAN),  # not a legal separator grouping
]
