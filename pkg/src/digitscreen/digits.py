"""Significant-digit extraction and digit-frequency tabulation.

Counts are analyzed through their decimal digit strings, never through
floating-point logarithms, so values at decade boundaries (10, 100, ...)
can never be misclassified.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import product

EXCLUDE_SHORT = "exclude-short"
TRAILING_ZERO = "trailing-zero"
POLICIES = (EXCLUDE_SHORT, TRAILING_ZERO)

FIRST_DIGIT_DOMAIN = tuple(range(1, 10))
LATER_DIGIT_DOMAIN = tuple(range(0, 10))


def digit_domain(i: int) -> tuple[int, ...]:
    """Admissible values of the i-th significant digit (1..9 first, 0..9 after)."""
    _check_digit_index(i)
    return FIRST_DIGIT_DOMAIN if i == 1 else LATER_DIGIT_DOMAIN


def joint_domain(k: int) -> tuple[tuple[int, ...], ...]:
    """All 9*10^(k-1) ordered k-digit prefixes, in lexicographic order."""
    if k < 2:
        raise ValueError("joint domain needs k >= 2")
    return tuple(product(FIRST_DIGIT_DOMAIN, *([LATER_DIGIT_DOMAIN] * (k - 1))))


def _check_digit_index(i: int) -> None:
    if not isinstance(i, int) or isinstance(i, bool) or i < 1:
        raise ValueError(f"digit index must be a positive integer, got {i!r}")


def _check_policy(policy: str) -> None:
    if policy not in POLICIES:
        raise ValueError(f"unknown exclusion policy {policy!r}; expected one of {POLICIES}")


def _digit_string(x) -> str:
    """Decimal significant digits of a positive number, most significant first.

    Integers are converted exactly. Floats use their shortest round-trip
    representation, so ``0.154`` yields ``"154"`` and ``998.5`` yields
    ``"9985"``.
    """
    if isinstance(x, bool):
        raise ValueError("x must be a positive number")
    if isinstance(x, int):
        if x <= 0:
            raise ValueError(f"x must be positive, got {x}")
        return str(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"x must be finite, got {x}")
        if x <= 0.0:
            raise ValueError(f"x must be positive, got {x}")
        s = repr(float(x))  # float() strips subclasses (e.g. numpy scalars)
        mantissa = s.split("e")[0].split("E")[0]
        return mantissa.replace(".", "").lstrip("0")
    raise ValueError(f"x must be a positive int or float, got {type(x).__name__}")


def significant_digit(x, i: int) -> int:
    """The i-th significant digit of a positive number.

    The digit is read from the normalized representation x = d1.d2d3... x 10^e
    with d1 in 1..9; positions beyond the written digits of a finite decimal
    are 0 (a real number carries infinitely many trailing zeros).
    """
    _check_digit_index(i)
    digits = _digit_string(x)
    return int(digits[i - 1]) if i <= len(digits) else 0


@dataclass(frozen=True)
class DatasetColumn:
    """A named column of positive integer counts, one per reporting unit.

    ``excluded_count`` tallies units dropped on the way in (zeros, negatives,
    unparseable cells), so m + excluded_count equals the original row count.
    """

    name: str
    values: tuple[int, ...]
    excluded_count: int = 0
    diagnostics: tuple[str, ...] = field(default=(), repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "diagnostics", tuple(self.diagnostics))
        for v in self.values:
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ValueError(f"column {self.name!r}: retained values must be integers >= 1, got {v!r}")
        if self.excluded_count < 0:
            raise ValueError("excluded_count must be nonnegative")

    @property
    def m(self) -> int:
        """Number of retained units."""
        return len(self.values)


@dataclass(frozen=True)
class CountVector:
    """Observed digit frequencies n_d over an ordered digit (or prefix) domain.

    ``excluded`` counts retained column values that could not contribute a
    digit at this position under the active exclusion policy.
    """

    digit_index: int | None
    domain: tuple
    counts: dict
    excluded: int = 0
    joint_k: int | None = None

    def __post_init__(self):
        domain = tuple(self.domain)
        object.__setattr__(self, "domain", domain)
        unknown = set(self.counts) - set(domain)
        if unknown:
            raise ValueError(f"counts outside domain: {sorted(unknown)!r}")
        filled = {d: int(self.counts.get(d, 0)) for d in domain}
        if any(c < 0 for c in filled.values()):
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "counts", filled)

    @property
    def n(self) -> int:
        """Total number of tallied digits."""
        return sum(self.counts.values())

    def proportions(self) -> dict:
        """Observed proportions f_d = n_d / n."""
        n = self.n
        if n == 0:
            raise ValueError("no analyzable values")
        return {d: c / n for d, c in self.counts.items()}


def analyzable_values(column: DatasetColumn, width: int, policy: str = EXCLUDE_SHORT) -> list[int]:
    """Retained values that contribute a digit at position/prefix width ``width``."""
    _check_policy(policy)
    if policy == TRAILING_ZERO:
        return list(column.values)
    return [v for v in column.values if len(str(v)) >= width]


def digit_frequencies(column: DatasetColumn, i: int, policy: str = EXCLUDE_SHORT) -> CountVector:
    """Tabulate the i-th significant digit of every retained value.

    Under ``exclude-short`` (the default) integers with fewer than i decimal
    digits are dropped and tallied in the result's ``excluded`` field;
    counting them as trailing zeros would spuriously inflate digit 0.
    ``trailing-zero`` applies significant_digit literally instead.
    """
    _check_digit_index(i)
    _check_policy(policy)
    counter: Counter = Counter()
    excluded = 0
    for v in column.values:
        s = str(v)
        if len(s) < i:
            if policy == EXCLUDE_SHORT:
                excluded += 1
                continue
            d = 0
        else:
            d = int(s[i - 1])
        counter[d] += 1
    if not counter:
        raise ValueError("no analyzable values")
    domain = digit_domain(i)
    return CountVector(digit_index=i, domain=domain, counts=dict(counter), excluded=excluded)


def real_digit_frequencies(values, i: int) -> CountVector:
    """Tabulate the i-th significant digit of positive reals.

    Reals always carry an i-th digit (trailing-zero semantics), so there is
    no exclusion policy here; this backs the screening of simulated samples.
    """
    _check_digit_index(i)
    counter: Counter = Counter()
    for x in values:
        counter[significant_digit(x, i)] += 1
    if not counter:
        raise ValueError("no analyzable values")
    domain = digit_domain(i)
    return CountVector(digit_index=i, domain=domain, counts=dict(counter), excluded=0)


def joint_frequencies(column: DatasetColumn, k: int = 2, policy: str = EXCLUDE_SHORT) -> CountVector:
    """Tabulate ordered k-digit prefixes (d1, ..., dk) of every retained value."""
    if k < 2:
        raise ValueError("joint tabulation needs k >= 2; use digit_frequencies for a single digit")
    _check_policy(policy)
    counter: Counter = Counter()
    excluded = 0
    for v in column.values:
        s = str(v)
        if len(s) < k:
            if policy == EXCLUDE_SHORT:
                excluded += 1
                continue
            s = s.ljust(k, "0")
        counter[tuple(int(c) for c in s[:k])] += 1
    if not counter:
        raise ValueError("no analyzable values")
    domain = joint_domain(k)
    return CountVector(digit_index=None, domain=domain, counts=dict(counter), excluded=excluded, joint_k=k)
