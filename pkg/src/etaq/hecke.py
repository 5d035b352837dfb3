"""Hecke operators on integer-weight q-expansions and the coefficient
test that certifies non-lacunarity.

The elimination logic: for a suitable prime p, every form with complex
multiplication inside the relevant space is annihilated by T_p, so a
single nonzero coefficient of F|T_p proves F is not a combination of CM
forms, hence not lacunary.  The coefficient inspected is A(m0) where m0
is the first index whose plain exponent is divisible by p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arith import divisors, inert_indicator, radical, _strip_six
from .errors import (
    NonIntegralWeight,
    PreconditionFail,
    TruncationTooSmall,
)
from .modular import CharacterSpec, EtaTriple, triple_character
from .qseries import QSeries, normalized_coefficients


@dataclass(frozen=True)
class HeckeContext:
    """Weight, character and level for an operator action."""

    weight: int
    character: CharacterSpec
    level: int

    def __post_init__(self):
        if isinstance(self.weight, Fraction) and self.weight.denominator != 1:
            raise NonIntegralWeight(f"weight {self.weight} is not an integer")
        if not isinstance(self.weight, int):
            raise NonIntegralWeight(f"weight {self.weight!r} is not an integer")
        if self.weight < 2:
            raise PreconditionFail("Hecke action implemented for weight >= 2")

    @classmethod
    def for_triple(cls, triple: EtaTriple) -> "HeckeContext":
        if triple.b % 2 == 0 or triple.b < 5:
            raise PreconditionFail("need odd b >= 5 for an integral weight >= 2")
        return cls((triple.b - 1) // 2, triple_character(triple), triple.level)


def hecke_apply(f: QSeries, s: int, ctx: HeckeContext) -> QSeries:
    """f | T_s with coefficients b(m) = sum_{d | gcd(s, m)} chi(d) d**(k-1)
    a(s m / d**2).

    The result is exact below floor(f.trunc / s): the pull-down term
    a(s*m) is the binding one.
    """
    if s < 1:
        raise PreconditionFail("operator index must be positive")
    if f.trunc < s:
        raise TruncationTooSmall(f"trunc {f.trunc} < operator index {s}")
    lo = f.min_exponent()
    if lo is not None and lo < 0:
        raise PreconditionFail("operator acts on expansions without poles")
    k = ctx.weight
    chi = ctx.character
    out_trunc = f.trunc // s
    sdivs = divisors(s)
    out: dict[int, int] = {}
    for m in range(out_trunc):
        total = 0
        for d in sdivs:
            if m % d == 0 or m == 0:
                cv = chi.value(d)
                if cv:
                    total += cv * d ** (k - 1) * f.coeffs.get(s * m // (d * d), 0)
        if total:
            out[m] = total
    return QSeries(out, out_trunc)


def first_divisible_index(p: int, r: int) -> int:
    """Smallest m >= 0 with 24 m + r = 0 (mod p); requires gcd(p, 24) = 1."""
    if p < 1 or gcd(p, 24) != 1:
        raise PreconditionFail(f"{p} is not coprime to 24")
    return (-r * pow(24, -1, p)) % p


def no_exponent_collision(a: int, b: int, c: int, p: int) -> bool:
    """Whether the pulled-down exponent (24 m0 + r)/p avoids the pushed-up
    sum p(24 m + r).

    The only possible clash is against the m = 0 term, so the test is
    24 m0 != r (p**2 - 1); the equality forces r(p+1) <= 24, hence only
    small p can ever collide.
    """
    triple = EtaTriple(a, b, c)
    r = triple.leading_exponent
    m0 = first_divisible_index(p, r)
    return 24 * m0 != r * (p * p - 1)


@dataclass(frozen=True)
class EliminationResult:
    a: int
    b: int
    c: int
    prime: int
    index: int
    witness: int
    eliminated: bool

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "p": self.prime,
            "m0": self.index,
            "witness": self.witness,
            "eliminated": self.eliminated,
        }


def hecke_elimination(a: int, b: int, c: int, p: int) -> EliminationResult:
    """Non-lacunarity certificate attempt for the (a, b, c) quotient at p.

    Preconditions: b odd with b >= 5 so the weight is an integer >= 2
    (weight-one quotients, b = 3, are lacunary outright and rejected
    here), p = 23 (mod 24), p inert-admissible for the level kernel, and
    no exponent collision.  ``eliminated`` is True exactly when the
    witness coefficient A(m0) is nonzero, which certifies that F|T_p is
    not zero and hence that F is not lacunary.
    """
    if b % 2 == 0 or b < 5:
        raise PreconditionFail(
            "need odd b >= 5: weight-one quotients (b = 3) are lacunary "
            "unconditionally and below that the weight drops under 2"
        )
    if p % 24 != 23:
        raise PreconditionFail(f"prime {p} is not 23 mod 24")
    kernel = _strip_six(radical(a * c))
    if inert_indicator(kernel, p) != 1:
        raise PreconditionFail(f"{p} is not inert-admissible for kernel {kernel}")
    if not no_exponent_collision(a, b, c, p):
        raise PreconditionFail(f"exponent collision at p={p}")
    triple = EtaTriple(a, b, c)
    r = triple.leading_exponent
    m0 = first_divisible_index(p, r)
    witness = normalized_coefficients(a, b, c, m0 + 1)[m0] if m0 >= 0 else 0
    return EliminationResult(a, b, c, p, m0, witness, witness != 0)
