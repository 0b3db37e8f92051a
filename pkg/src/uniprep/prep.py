"""Ancilla-free preparation of the uniform superposition over ``n`` basis states.

The circuit acts on ``ceil(log2 n)`` wires and maps ``|0...0>`` to
``(1/sqrt n) * sum_{k<n} |k>`` using only RY and single-control RY gates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .circuit import CRY, RY, Circuit, Gate, Polarity

HALF_TURN = math.pi / 2


def wire_count(n: int) -> int:
    """``ceil(log2 n)`` computed exactly; 0 for ``n == 1``."""
    _check_n(n)
    return (n - 1).bit_length()


def trailing_zeros(n: int) -> int:
    _check_n(n)
    return (n & -n).bit_length() - 1


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def _check_n(n: int) -> None:
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError(f"n must be an integer, got {n!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")


@dataclass(frozen=True)
class PrepSpec:
    n: int
    j: int
    i: int

    @classmethod
    def of(cls, n: int) -> "PrepSpec":
        return cls(n, wire_count(n), trailing_zeros(n))


def angle_ratio(n: int, x: int, c) -> Fraction:
    """Probability of reading 1 on wire ``x`` given the top of ``c`` reads 1.

    With ``c`` empty the condition is dropped and the ratio is taken over all
    ``n`` states.
    """
    num = n % (1 << x)
    den = n % (1 << c[-1]) if c else n
    if den == 0:
        raise ZeroDivisionError(f"angle({n}, {x}, {list(c)}): denominator is 0")
    return Fraction(num, den)


def angle(n: int, x: int, c=()) -> float:
    """RY angle ``2 asin(sqrt(ratio))`` for wire ``x``; see :func:`angle_ratio`."""
    num = n % (1 << x)
    den = n % (1 << c[-1]) if c else n
    if den == 0:
        raise ZeroDivisionError(f"angle({n}, {x}, {list(c)}): denominator is 0")
    return 2.0 * math.asin(math.sqrt(num / den))


def closed_form(ratio: Fraction) -> str:
    """Exact angle string for ``2 asin(sqrt(ratio))``."""
    if ratio == Fraction(1, 2):
        return "pi/2"
    if ratio == 0:
        return "0"
    if ratio == 1:
        return "pi"
    return f"2*asin(sqrt({ratio.numerator}/{ratio.denominator}))"


@dataclass(frozen=True)
class Step:
    """One generated gate with the exact ratio its angle came from."""

    gate: Gate
    ratio: Fraction
    arc: str  # "free", "up" or "down"

    @property
    def closed_form(self) -> str:
        return closed_form(self.ratio)


def steps(n: int) -> list[Step]:
    spec = PrepSpec.of(n)
    j, i = spec.j, spec.i
    out: list[Step] = []

    for x in range(min(i, j)):
        out.append(Step(RY(HALF_TURN, x), Fraction(1, 2), "free"))

    c: list[int] = []
    last = n - 1
    for x in range(j - 1, i - 1, -1):
        if last >> x & 1:
            ratio = angle_ratio(n, x, c)
            theta = angle(n, x, c)
            if c:
                out.append(Step(CRY(theta, c[-1], x, Polarity.POSITIVE), ratio, "up"))
            else:
                out.append(Step(RY(theta, x), ratio, "up"))
            c.append(x)

    for x in range(i, j - 1):
        if c and x == c[-1]:
            c.pop()
        out.append(Step(CRY(HALF_TURN, c[-1], x, Polarity.NEGATIVE), Fraction(1, 2), "down"))

    return out


def generate(n: int) -> Circuit:
    """Circuit on ``ceil(log2 n)`` wires preparing the uniform state over ``0..n-1``."""
    return Circuit(wire_count(n), tuple(s.gate for s in steps(n)))


def count1(x: int) -> int:
    return bin(x).count("1")


def maxp(n: int) -> int:
    """Largest ``i`` with ``n / 2**i`` an integer greater than 1."""
    _check_n(n)
    if is_power_of_two(n):
        return max(trailing_zeros(n) - 1, 0)
    return trailing_zeros(n)


def predicted_two_wire_count(n: int) -> int:
    """Closed-form two-wire gate count of :func:`generate`."""
    _check_n(n)
    if is_power_of_two(n):
        return 0
    return max(count1(n - 1) - 2 * maxp(n) + wire_count(n) - 2, 0)


def eq5_summation(n: int) -> int:
    """Per-bit summation form of the two-wire count, evaluated term by term.

    Each summand is ``floor((n mod 2^i) / 2^(i-1)) - 2 floor(1 - frac(n / 2^i))``;
    the fractional part vanishes exactly when ``2^i`` divides ``n``.
    """
    _check_n(n)
    if n < 2:
        raise ValueError("summation form is defined for n >= 2")
    j = wire_count(n)
    total = 0
    for i in range(1, j):
        bit = (n % (1 << i)) // (1 << (i - 1))
        divisible = 1 if n % (1 << i) == 0 else 0
        total += bit - 2 * divisible
    return total + j - 1
