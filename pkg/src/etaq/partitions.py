"""Integer partitions, hook lengths, and hook-product expansion oracles.

The enumeration here is deliberately naive: it exists to cross-check the
generating-function identities coefficient by coefficient, so it must not
share any theory with them.  All hook products are exact rationals.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import PreconditionFail, ResourceLimit
from .qseries import QSeries, euler_product

DEFAULT_PARTITION_BUDGET = 10**7


def partitions_of(n: int, budget: int = DEFAULT_PARTITION_BUDGET):
    """Yield the partitions of n as weakly decreasing tuples.

    Kelleher's ascending-composition generator, reversed per partition.
    Raises ResourceLimit after ``budget`` partitions.
    """
    if n < 0:
        raise PreconditionFail("partitions of a negative integer")
    if n == 0:
        yield ()
        return
    seen = 0
    a = [0] * (n + 1)
    k = 1
    y = n - 1
    while k != 0:
        x = a[k - 1] + 1
        k -= 1
        while 2 * x <= y:
            a[k] = x
            y -= x
            k += 1
        ell = k + 1
        while x <= y:
            a[k] = x
            a[ell] = y
            seen += 1
            if seen > budget:
                raise ResourceLimit(f"partition budget {budget} exceeded at n={n}")
            yield tuple(reversed(a[: k + 2]))
            x += 1
            y -= 1
        a[k] = x + y
        y = x + y - 1
        seen += 1
        if seen > budget:
            raise ResourceLimit(f"partition budget {budget} exceeded at n={n}")
        yield tuple(reversed(a[: k + 1]))


def conjugate(parts: tuple[int, ...]) -> tuple[int, ...]:
    """Transpose of the Young diagram."""
    if not parts:
        return ()
    out = []
    k = len(parts)
    for j in range(parts[0]):
        while parts[k - 1] <= j:
            k -= 1
        out.append(k)
    return tuple(out)


def hook_lengths(parts: tuple[int, ...]) -> list[int]:
    """Multiset of hook lengths, row by row.

    hook(i, j) = arm + leg + 1 = parts[i] - j + conj[j] - i - 1.
    """
    conj = conjugate(parts)
    out = []
    for i, row in enumerate(parts):
        base = row - i - 1
        for j in range(row):
            out.append(base - j + conj[j])
    return out


def hooks_divisible_by(parts: tuple[int, ...], a: int) -> list[int]:
    if a < 1:
        raise PreconditionFail("divisor must be positive")
    return [h for h in hook_lengths(parts) if h % a == 0]


def is_core(parts: tuple[int, ...], a: int) -> bool:
    """True when no hook length is divisible by a."""
    if a < 1:
        raise PreconditionFail("divisor must be positive")
    conj = conjugate(parts)
    for i, row in enumerate(parts):
        base = row - i - 1
        for j in range(row):
            if (base - j + conj[j]) % a == 0:
                return False
    return True


class Partition:
    """A partition as a validated weakly decreasing tuple of parts."""

    __slots__ = ("parts", "size")

    def __init__(self, parts):
        parts = tuple(parts)
        for i, p in enumerate(parts):
            if p < 1:
                raise ValueError("parts must be positive")
            if i and parts[i - 1] < p:
                raise ValueError("parts must be weakly decreasing")
        self.parts = parts
        self.size = sum(parts)

    def __repr__(self):
        return f"Partition{self.parts}"

    def __eq__(self, other):
        return isinstance(other, Partition) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def conjugate(self) -> "Partition":
        return Partition(conjugate(self.parts))

    def hooks(self) -> list[int]:
        return sorted(hook_lengths(self.parts))

    def hooks_divisible_by(self, a: int) -> list[int]:
        return sorted(hooks_divisible_by(self.parts, a))

    def is_core(self, a: int) -> bool:
        return is_core(self.parts, a)


def partition_count(n: int, _cache={0: 1}) -> int:
    """p(n) by the pentagonal-number recurrence."""
    if n < 0:
        return 0
    if n in _cache:
        return _cache[n]
    for m in range(max(_cache) + 1, n + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = -1 if k % 2 == 0 else 1
            total += sign * _cache[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                total += sign * _cache[m - g2]
            k += 1
        _cache[m] = total
    return _cache[n]


def core_generating_series(a: int, terms: int) -> QSeries:
    """prod (1-q**(a n))**a / (1-q**n): coefficient of q**m counts the
    a-cores of m."""
    if a < 1:
        raise PreconditionFail("core parameter must be positive")
    return euler_product(terms, a) ** a * euler_product(terms, 1).inverse()


def count_cores(
    a: int,
    m: int,
    *,
    verify: bool = False,
    budget: int = DEFAULT_PARTITION_BUDGET,
) -> int:
    """Number of a-cores of m, from the generating function.

    With ``verify=True`` the value is also recomputed by enumerating the
    partitions of m and filtering on hook lengths; disagreement is an
    assertion failure and an enumeration past ``budget`` raises
    ResourceLimit carrying the generating-function value as ``partial``.
    """
    if m < 0:
        raise PreconditionFail("m must be non-negative")
    value = core_generating_series(a, m + 1)[m]
    if verify:
        try:
            direct = sum(1 for parts in partitions_of(m, budget) if is_core(parts, a))
        except ResourceLimit as exc:
            raise ResourceLimit(str(exc), partial=value) from None
        assert direct == value, (a, m, direct, value)
    return value


def core_counts_by_enumeration(
    m: int, a_values, budget: int = DEFAULT_PARTITION_BUDGET
) -> dict[int, int]:
    """Count a-cores of m for several a at once by brute enumeration.

    One pass over the partitions of m; each partition's hook multiset is
    folded into a divisibility bitmask with early exit once every a is
    ruled out.
    """
    amap = sorted(set(a_values))
    counts = dict.fromkeys(amap, 0)
    if m == 0:
        return dict.fromkeys(amap, 1)
    table = [0] * (m + 1)
    for idx, a in enumerate(amap):
        bit = 1 << idx
        for h in range(a, m + 1, a):
            table[h] |= bit
    full = (1 << len(amap)) - 1
    width = len(amap)
    for parts in partitions_of(m, budget):
        conj = conjugate(parts)
        mask = 0
        for i, row in enumerate(parts):
            base = row - i - 1
            for j in range(row):
                mask |= table[base - j + conj[j]]
            if mask == full:
                break
        if mask != full:
            for idx in range(width):
                if not mask >> idx & 1:
                    counts[amap[idx]] += 1
    return counts


def nekrasov_okounkov_sum(b, trunc: int, budget: int = DEFAULT_PARTITION_BUDGET) -> QSeries:
    """sum over partitions of q**|la| * prod_h (1 - b/h**2), truncated.

    The hook-length expansion of the (b-1)-st power of the Euler product.
    b may be any rational; coefficients come back exact.
    """
    bq = Fraction(b)
    coeffs: dict[int, Fraction] = {}
    for n in range(trunc):
        total = Fraction(0)
        for parts in partitions_of(n, budget):
            prod = Fraction(1)
            for h in hook_lengths(parts):
                prod *= 1 - bq / (h * h)
                if not prod:
                    break
            total += prod
        if total:
            coeffs[n] = total
    return QSeries(coeffs, trunc)


def han_hook_sum(
    a: int, b, c: int, trunc: int, budget: int = DEFAULT_PARTITION_BUDGET
) -> QSeries:
    """Hook-length sum with only hooks divisible by a, specialized so the
    marking variable becomes q**(a(c-1)).

    Each partition contributes q**(|la| + a(c-1)*#H) * prod_{h in H}
    (1 - a*b/h**2) where H is the multiset of hooks divisible by a.
    Truncation is complete: a partition of n >= trunc cannot reach an
    exponent below trunc.
    """
    if a < 1 or c < 1:
        raise PreconditionFail("a and c must be positive")
    bq = Fraction(b)
    gap = a * (c - 1)
    coeffs: dict[int, Fraction] = {}
    for n in range(trunc):
        for parts in partitions_of(n, budget):
            marked = hooks_divisible_by(parts, a)
            e = n + gap * len(marked)
            if e >= trunc:
                continue
            prod = Fraction(1)
            for h in marked:
                prod *= 1 - a * bq / (h * h)
                if not prod:
                    break
            if prod:
                w = coeffs.get(e, Fraction(0)) + prod
                if w:
                    coeffs[e] = w
                elif e in coeffs:
                    del coeffs[e]
    return QSeries(coeffs, trunc)
