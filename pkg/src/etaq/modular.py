"""Modular metadata for eta-quotients: weights, characters, cusp orders,
holomorphy classification, and the optimal-level recipe.

No modular forms are ever evaluated here; everything is bookkeeping on
the exponent data (delta, r_delta) of a quotient of eta functions, with
exact rational arithmetic throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .arith import divisors, kronecker, squarefree_part
from .errors import ConditionsFail, PreconditionFail


@dataclass(frozen=True)
class CharacterSpec:
    """A real character d -> Kronecker(D, d), zero off the unit group of
    ``modulus``.  Completely multiplicative, period dividing 4*|D|."""

    numerator: int
    modulus: int

    def value(self, d: int) -> int:
        if self.modulus > 1 and gcd(d, self.modulus) != 1:
            return 0
        return kronecker(self.numerator, d)

    def to_dict(self) -> dict:
        return {"numerator": self.numerator, "modulus": self.modulus}


@dataclass(frozen=True)
class EtaQuotient:
    """A formal product prod eta(delta z)**r over the factors list.

    ``level`` is the Gamma_0 level the quotient is considered at.  Each
    delta normally divides the level; the congruence checks below use
    exact rationals, so quotients coming out of the optimal-level
    rescaling are tolerated even when a delta does not divide it.
    """

    level: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be positive")
        seen = set()
        for delta, r in self.factors:
            if delta < 1:
                raise ValueError("eta arguments must be positive")
            if r == 0:
                raise ValueError("zero exponents must be omitted")
            if delta in seen:
                raise ValueError("duplicate eta argument")
            seen.add(delta)

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(r for _, r in self.factors), 2)


@dataclass(frozen=True)
class EtaTriple:
    """The three-parameter family eta(24az)**a eta(24acz)**(b-a) / eta(24z)."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a < 1 or self.b < 1 or self.c < 1:
            raise ValueError("a, b, c must be positive")

    @property
    def leading_exponent(self) -> int:
        a, b, c = self.a, self.b, self.c
        return a * b * c + a * a - a * a * c - 1

    @property
    def level(self) -> int:
        return 576 * self.a * self.c

    @property
    def weight(self) -> Fraction:
        return Fraction(self.b - 1, 2)

    def quotient(self, scale: int = 24, level: int | None = None) -> EtaQuotient:
        """Render as an EtaQuotient, merging coincident eta arguments."""
        a, b, c = self.a, self.b, self.c
        merged: dict[int, int] = {}
        for delta, r in ((scale * a, a), (scale * a * c, b - a), (scale, -1)):
            merged[delta] = merged.get(delta, 0) + r
        factors = tuple(sorted((d, r) for d, r in merged.items() if r))
        if level is None:
            level = scale * scale * a * c
        return EtaQuotient(level, factors)


def check_weakly_holomorphic(f: EtaQuotient) -> tuple[Fraction, CharacterSpec]:
    """Verify the two eta-quotient congruences and derive the character.

    Checks sum(delta * r_delta) = 0 (mod 24) and sum((N/delta) * r_delta)
    = 0 (mod 24); both sums are evaluated as exact rationals and must be
    integers.  Failures raise ConditionsFail listing every violated
    condition.  Returns (weight, character); the character numerator is
    (-1)**k times the square-free part of prod delta**r_delta, with the
    theta-multiplier factor 2 folded in when the exponent sum is odd (so
    a single eta(24z) yields the classical numerator 12).
    """
    n = f.level
    first = sum(delta * r for delta, r in f.factors)
    second = sum(Fraction(n * r, delta) for delta, r in f.factors)
    failures = []
    if first % 24 != 0:
        failures.append(f"sum(delta*r) = {first} is not 0 mod 24")
    if second.denominator != 1 or second % 24 != 0:
        failures.append(f"sum((N/delta)*r) = {second} is not 0 mod 24")
    if failures:
        raise ConditionsFail(failures)
    total = sum(r for _, r in f.factors)
    odd_part = 1
    for delta, r in f.factors:
        if r % 2:
            odd_part *= delta
    numerator = squarefree_part(odd_part) if odd_part > 1 else 1
    if total % 2 == 0:
        k = total // 2
    else:
        k = (total - 1) // 2
        numerator *= 2
    if k % 2:
        numerator = -numerator
    return Fraction(total, 2), CharacterSpec(numerator, n)


def triple_character(triple: EtaTriple) -> CharacterSpec:
    """The simplified character of the (a, b, c) quotient.

    ((-1)**k * a*c / d) for even a and ((-1)**k * a / d) for odd a, with
    k = (b-1)/2; modulus 576*a*c.  Requires odd b.
    """
    if triple.b % 2 == 0:
        raise PreconditionFail("character is defined for odd b")
    k = (triple.b - 1) // 2
    base = triple.a * triple.c if triple.a % 2 == 0 else triple.a
    if k % 2:
        base = -base
    return CharacterSpec(base, triple.level)


def cusp_order(f: EtaQuotient, x: int, y: int) -> Fraction:
    """Order of vanishing at the cusp x/y in the standard eta-quotient
    formula: (N/24) * sum gcd(y, delta)**2 r_delta / (gcd(y, N/y) y delta).

    The order depends only on the denominator y, which must divide the
    level; x is carried for interface completeness and must be coprime
    to y.
    """
    n = f.level
    if y < 1 or n % y != 0:
        raise PreconditionFail(f"cusp denominator {y} does not divide level {n}")
    if gcd(x, y) != 1:
        raise PreconditionFail(f"cusp {x}/{y} is not in lowest terms")
    g = gcd(y, n // y)
    total = Fraction(0)
    for delta, r in f.factors:
        total += Fraction(gcd(y, delta) ** 2 * r, g * y * delta)
    return Fraction(n, 24) * total


def cusp_orders(f: EtaQuotient) -> dict[int, Fraction]:
    """Vanishing order at one cusp per divisor denominator of the level."""
    return {y: cusp_order(f, 1, y) for y in divisors(f.level)}


def classify_holomorphy(triple: EtaTriple) -> str:
    """One of 'cuspidal', 'holomorphic', 'weakly_holomorphic' from the
    signs of the cusp orders at every denominator dividing the level."""
    orders = cusp_orders(triple.quotient())
    if all(v > 0 for v in orders.values()):
        return "cuspidal"
    if all(v >= 0 for v in orders.values()):
        return "holomorphic"
    return "weakly_holomorphic"


def optimal_level(triple: EtaTriple) -> int:
    """Smallest workable level lcm(a, c) * n * m, where m is minimal with
    m*r = 0 (mod 24) and n is minimal making (lcm(a,c)/(ac)) * n * (b-a)
    an integer that is 0 mod 24."""
    a, b, c = triple.a, triple.b, triple.c
    r = triple.leading_exponent
    m = 24 // gcd(24, abs(r))
    g = gcd(a, c)
    n = 24 * g // gcd(24 * g, abs(b - a)) if b != a else 1
    return lcm(a, c) * n * m
