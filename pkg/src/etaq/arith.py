"""Elementary number theory: Kronecker symbols, square-free parts, and
the inert-index search that powers the Hecke elimination step.

Everything here is exact integer arithmetic.  The only floating point is
the Polya-Vinogradov bound, which is used as a conservative analytic
threshold and never as a correctness criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from .errors import FactorizationBudgetExceeded, PreconditionFail

DEFAULT_FACTOR_BUDGET = 10**6


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), extended to all integers n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        # (a/2) depends on a mod 8
        while n % 2 == 0:
            n //= 2
            if a % 8 in (3, 5):
                result = -result
    # n is now odd and positive; run the usual Jacobi loop
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_prime(n: int) -> bool:
    """Deterministic primality by trial division; fine at desk scale."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def prime_factors(n: int, budget: int = DEFAULT_FACTOR_BUDGET) -> dict[int, int]:
    """Factor |n| by trial division.

    ``budget`` caps the number of candidate divisors tried; if the
    remaining cofactor is still composite-sized when the budget runs out,
    FactorizationBudgetExceeded is raised rather than silently guessing.
    """
    n = abs(n)
    if n == 0:
        raise PreconditionFail("cannot factor 0")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    steps = 0
    while f * f <= n:
        steps += 1
        if steps > budget:
            raise FactorizationBudgetExceeded(
                f"trial division exceeded {budget} steps with cofactor {n}"
            )
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def squarefree_part(n: int, budget: int = DEFAULT_FACTOR_BUDGET) -> int:
    """Product of the primes dividing n to odd multiplicity.

    squarefree_part(576) == 1 and squarefree_part(2**8 * 3**3) == 3.
    """
    if n == 0:
        raise PreconditionFail("squarefree part of 0 is undefined")
    out = 1
    for p, e in prime_factors(n, budget).items():
        if e % 2 == 1:
            out *= p
    return out


def radical(n: int, budget: int = DEFAULT_FACTOR_BUDGET) -> int:
    """Product of the distinct primes dividing n (the square-free kernel)."""
    if n == 0:
        raise PreconditionFail("radical of 0 is undefined")
    out = 1
    for p in prime_factors(n, budget):
        out *= p
    return out


def divisors(n: int, budget: int = DEFAULT_FACTOR_BUDGET) -> list[int]:
    """Sorted positive divisors of |n|."""
    out = [1]
    for p, e in prime_factors(n, budget).items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def _strip_six(n: int) -> int:
    """Remove all factors of 2 and 3."""
    while n % 2 == 0:
        n //= 2
    while n % 3 == 0:
        n //= 3
    return n


def inert_indicator(ac: int, s: int) -> int:
    """Indicator that every prime p | ac has Kronecker(-p, s) == -1.

    ``ac`` must be square-free and coprime to 6, ``s`` coprime to ac.
    Evaluated two ways: the Moebius-weighted divisor sum
    (1/2^m) * sum_{d | ac} mu(d) * prod_{p | d} (-p/s), and the direct
    per-prime product test.  The two routes are asserted equal.
    """
    if ac < 1:
        raise PreconditionFail("ac must be positive")
    if gcd(ac, 6) != 1:
        raise PreconditionFail(f"{ac} is not coprime to 6")
    primes = list(prime_factors(ac))
    if any(ac % (p * p) == 0 for p in primes):
        raise PreconditionFail(f"{ac} is not square-free")
    if gcd(ac, s) != 1:
        raise PreconditionFail(f"gcd({ac}, {s}) != 1")

    symbols = {p: kronecker(-p, s) for p in primes}
    direct = int(all(v == -1 for v in symbols.values()))

    # Moebius route: sum over square-free divisors d, mu(d) = (-1)^{#primes}
    total = Fraction(0)
    for mask in range(1 << len(primes)):
        term = 1
        bits = 0
        for i, p in enumerate(primes):
            if mask >> i & 1:
                term *= symbols[p]
                bits += 1
        total += Fraction((-1) ** bits * term)
    moebius = total / 2 ** len(primes)
    assert moebius == direct, (ac, s, moebius, direct)
    return direct


@dataclass(frozen=True)
class InertSearchResult:
    """Outcome of the arithmetic-progression scan for an inert index.

    ``index`` is the smallest s = 23 (mod 24) with gcd(s, a_prime) = 1 and
    Kronecker(-p, s) = -1 for every prime p | a_prime, or None when the
    scan exhausted ``limit``.  Absence is a value, not an error.
    """

    a_prime: int
    index: int | None
    limit: int
    certificate: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "a_prime": self.a_prime,
            "s": self.index,
            "limit": self.limit,
            "certificate": [list(pair) for pair in self.certificate],
        }


def search_inert_index(a_prime: int, limit: int = 10**4) -> InertSearchResult:
    """Scan s = 23, 47, 71, ... <= limit for an index inert at every prime
    dividing a_prime.

    ``a_prime`` is reduced to its square-free kernel first; the congruence
    s = 23 (mod 24) already forces the symbols at 2, 3 and the sign, so the
    substantive scan happens on the part of a_prime coprime to 6.
    """
    if a_prime < 1:
        raise PreconditionFail("a_prime must be positive")
    kernel = radical(a_prime)
    ac_part = _strip_six(kernel)
    for s in range(23, limit + 1, 24):
        if gcd(s, kernel) != 1:
            continue
        if inert_indicator(ac_part, s) == 1:
            cert = tuple((p, kronecker(-p, s)) for p in sorted(prime_factors(kernel)))
            return InertSearchResult(a_prime, s, limit, cert)
    return InertSearchResult(a_prime, None, limit)


def norm_form_represents(d: int, s: int) -> bool:
    """Whether the norm form of the maximal order of Q(sqrt(-d)) takes the
    value s over a full search box.

    For d = 3 (mod 4) the form is (x^2 + d*y^2)/4 with x = y (mod 2);
    otherwise x^2 + d*y^2.  The box |x|, |y| <= sqrt(4s) covers every
    solution, so a False return is exhaustive.  This witnesses principal
    values only, which is the one-sided consistency check the search
    needs: an inert index must have no representation at all.
    """
    if d < 1 or s < 0:
        raise PreconditionFail("need d >= 1 and s >= 0")
    if d % 4 == 3:
        xmax = isqrt(4 * s)
        for x in range(xmax + 1):
            rest = 4 * s - x * x
            if rest < 0:
                break
            y2, r = divmod(rest, d)
            if r != 0:
                continue
            y = isqrt(y2)
            if y * y == y2 and (x - y) % 2 == 0:
                return True
        return False
    xmax = isqrt(s)
    for x in range(xmax + 1):
        rest = s - x * x
        y2, r = divmod(rest, d)
        if r != 0:
            continue
        y = isqrt(y2)
        if y * y == y2:
            return True
    return False


def polya_vinogradov_bound(modulus: int) -> float:
    """Classical bound 2*sqrt(m)*log(m) on partial sums of a nontrivial
    character of modulus m (natural logarithm)."""
    if modulus < 2:
        raise PreconditionFail("modulus must be at least 2")
    return 2.0 * math.sqrt(modulus) * math.log(modulus)


def check_partial_sums(values, modulus: int) -> float:
    """Verify the Polya-Vinogradov bound for an explicit character.

    ``values`` maps an integer to the character value.  The character must
    be nontrivial (not identically 1 on units mod ``modulus``); the
    trivial character is rejected because the bound does not apply to it.
    Returns the largest absolute partial sum seen.
    """
    units = [x for x in range(1, modulus + 1) if gcd(x, modulus) == 1]
    if all(values(x) == 1 for x in units):
        raise PreconditionFail("trivial character has unbounded partial sums")
    bound = polya_vinogradov_bound(modulus)
    worst = 0
    total = 0
    for x in range(1, modulus + 1):
        total += values(x)
        worst = max(worst, abs(total))
        if worst > bound:
            raise AssertionError(
                f"partial sum {worst} exceeds bound {bound} at {x}"
            )
    return worst


def prime_product_cutoff() -> int:
    """Product of the primes from 5 through 43.

    Below this cutoff the per-kernel scan is needed; at or above it the
    Polya-Vinogradov estimate already guarantees an inert index smaller
    than ac.
    """
    out = 1
    for p in range(5, 44):
        if is_prime(p):
            out *= p
    return out


def pv_viable(ac: int, num_primes: int) -> bool:
    """Whether ac/24 - 1 - 2^(m+1) * sqrt(24 ac) * log(24 ac) > 0 for
    m = num_primes, i.e. the analytic bound alone guarantees an inert
    index below ac.  Conservative float evaluation."""
    if ac < 1 or num_primes < 0:
        raise PreconditionFail("need ac >= 1 and num_primes >= 0")
    x = 24.0 * ac
    return ac / 24.0 - 1.0 - 2.0 ** (num_primes + 1) * math.sqrt(x) * math.log(x) > 0.0


def inert_primes(ac_part: int, count: int, limit: int = 10**6):
    """First ``count`` primes p = 23 (mod 24) with Kronecker(-q, p) = -1
    for every prime q | ac_part.  Used to pick Hecke elimination primes."""
    found = []
    for p in range(23, limit + 1, 24):
        if not is_prime(p):
            continue
        if gcd(p, ac_part) != 1:
            continue
        if inert_indicator(_strip_six(radical(ac_part)), p) == 1:
            found.append(p)
            if len(found) == count:
                return found
    raise PreconditionFail(
        f"only {len(found)} admissible primes below {limit} for kernel {ac_part}"
    )
