"""Lacunarity classification: coefficient polynomials in b, their odd
integer roots, and the staged search over (a, c) boxes.

For fixed a, c and index m, the normalized coefficient A(m) is a
polynomial in b of degree at most floor(m / (a c)).  The pipeline per
pair (a, c): find the smallest admissible operator index s, interpolate
the polynomials for m in [ac, s-1], collect their odd roots above a as
the only possible lacunary b, then try to eliminate each candidate with
Hecke witnesses at admissible primes.  Survivors are reported as "not
eliminated", never as proven lacunary.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .arith import (
    InertSearchResult,
    _strip_six,
    inert_primes,
    prime_factors,
    radical,
    search_inert_index,
)
from .errors import DegreeOverflow, PreconditionFail, ResourceLimit, ZeroPolynomial
from .hecke import hecke_elimination, no_exponent_collision
from .qseries import QSeries, euler_product, expand_eta_triple, leading_exponent


@dataclass(frozen=True)
class CoeffPoly:
    """A(m) as an exact polynomial in b; coefficients ascending."""

    a: int
    c: int
    m: int
    coefficients: tuple[Fraction, ...]
    degree_bound: int

    @property
    def degree(self) -> int:
        for i in range(len(self.coefficients) - 1, -1, -1):
            if self.coefficients[i]:
                return i
        return -1

    def is_zero(self) -> bool:
        return self.degree < 0

    def evaluate(self, b) -> Fraction:
        total = Fraction(0)
        for coef in reversed(self.coefficients):
            total = total * b + coef
        return total

    def evaluate_int(self, b: int) -> int:
        value = self.evaluate(b)
        if value.denominator != 1:
            raise AssertionError(f"non-integer value {value} at integer b={b}")
        return int(value)

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "c": self.c,
            "m": self.m,
            "degree_bound": self.degree_bound,
            "coefficients": [str(x) for x in self.coefficients],
        }


def _lagrange(points: list[tuple[int, int]]) -> tuple[Fraction, ...]:
    """Monomial coefficients of the interpolant through ``points``,
    by Newton divided differences, all exact."""
    xs = [Fraction(x) for x, _ in points]
    table = [Fraction(y) for _, y in points]
    n = len(points)
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            table[i] = (table[i] - table[i - 1]) / (xs[i] - xs[i - level])
    coeffs = [Fraction(0)] * n
    basis = [Fraction(1)]
    for j in range(n):
        for i, bv in enumerate(basis):
            coeffs[i] += table[j] * bv
        nxt = [Fraction(0)] * (len(basis) + 1)
        for i, bv in enumerate(basis):
            nxt[i] -= xs[j] * bv
            nxt[i + 1] += bv
        basis = nxt
    while len(coeffs) > 1 and not coeffs[-1]:
        coeffs.pop()
    return tuple(coeffs)


def _node_samples(a: int, c: int, terms: int, count: int) -> list[tuple[int, QSeries]]:
    """Normalized coefficient series at the nodes b = a, a+2, ... built
    incrementally: each step multiplies by the square of the ac-step
    Euler product."""
    base = euler_product(terms, a) ** a * euler_product(terms, 1).inverse()
    stepper = euler_product(terms, a * c) ** 2
    out = []
    current = base
    for j in range(count):
        out.append((a + 2 * j, current))
        if j + 1 < count:
            current = current * stepper
    return out


def coefficient_polynomial(
    a: int, c: int, m: int, _samples: list[tuple[int, QSeries]] | None = None
) -> CoeffPoly:
    """Interpolate A(m) as a polynomial in b.

    Samples at floor(m/(ac)) + 1 nodes determine the polynomial; one
    extra held-out node must reproduce its expansion coefficient exactly,
    otherwise DegreeOverflow signals that the degree bound failed.
    """
    if a < 1 or c < 1 or m < 0:
        raise PreconditionFail("need a, c >= 1 and m >= 0")
    bound = m // (a * c)
    if _samples is None:
        _samples = _node_samples(a, c, m + 1, bound + 2)
    points = [(b, series[m]) for b, series in _samples[: bound + 1]]
    coeffs = _lagrange(points)
    poly = CoeffPoly(a, c, m, coeffs, bound)
    check_b, check_series = _samples[bound + 1]
    if poly.evaluate(check_b) != check_series[m]:
        raise DegreeOverflow(
            f"degree bound {bound} failed held-out check at (a={a}, c={c}, m={m})"
        )
    return poly


def odd_positive_roots(poly: CoeffPoly) -> list[int]:
    """All odd positive integer roots, exhaustively.

    Divisor-bounded: after clearing denominators, an integer root must
    divide the lowest nonzero coefficient and respect the Cauchy bound.
    """
    if poly.is_zero():
        raise ZeroPolynomial(f"A({poly.m}) vanished identically at (a={poly.a}, c={poly.c})")
    coeffs = list(poly.coefficients[: poly.degree + 1])
    if len(coeffs) == 1:
        return []
    denom = 1
    for x in coeffs:
        denom = lcm(denom, x.denominator)
    ints = [int(x * denom) for x in coeffs]
    low = 0
    while ints[low] == 0:
        low += 1
    tail = ints[low:]
    if len(tail) == 1:
        return []
    cauchy = 1 + max(abs(x) for x in tail) // abs(tail[-1])
    constant = abs(tail[0])
    roots = []
    for d in _divisors_of(constant):
        if d % 2 == 1 and d <= cauchy and poly.evaluate(d) == 0:
            roots.append(d)
    return sorted(roots)


def _divisors_of(n: int) -> list[int]:
    out = [1]
    for p, e in prime_factors(n).items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def lacunary_candidates(a: int, c: int, s: int) -> list[int]:
    """Union of odd positive roots of A(m) for m in [ac, s-1].

    Every lacunary b must appear here: lacunarity forces the operator
    image at index s to vanish, in particular its witness coefficient,
    and indices below ac give nonzero constants with no roots.  Empty
    when s <= ac.
    """
    ac = a * c
    if s <= ac:
        return []
    max_bound = (s - 1) // ac
    samples = _node_samples(a, c, s, max_bound + 2)
    roots: set[int] = set()
    for m in range(ac, s):
        poly = coefficient_polynomial(a, c, m, _samples=samples)
        if poly.is_zero():
            raise ZeroPolynomial(f"A({m}) vanished identically at (a={a}, c={c})")
        roots.update(odd_positive_roots(poly))
    return sorted(roots)


@dataclass(frozen=True)
class PairAudit:
    """Step-1/2 record for one (a, c) pair."""

    a: int
    c: int
    a_prime: int
    s: int | None
    s_limit: int
    certificate: tuple[tuple[int, int], ...]
    below_kernel_threshold: bool
    branch: str
    candidates: tuple[int, ...]
    incomplete: bool = False

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "c": self.c,
            "a_prime": self.a_prime,
            "s": self.s,
            "s_limit": self.s_limit,
            "certificate": [list(x) for x in self.certificate],
            "below_kernel_threshold": self.below_kernel_threshold,
            "branch": self.branch,
            "candidates": list(self.candidates),
            "incomplete": self.incomplete,
        }


@dataclass(frozen=True)
class SurvivorReport:
    """Hecke-stage outcome for one candidate triple."""

    a: int
    b: int
    c: int
    status: str  # "eliminated" | "survivor"
    eliminated_by: int | None
    witness: int | None
    witness_index: int | None
    primes_tried: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "status": self.status,
            "eliminated_by": self.eliminated_by,
            "witness": self.witness,
            "witness_index": self.witness_index,
            "primes_tried": list(self.primes_tried),
        }


@dataclass
class ClassificationResult:
    params: dict
    pairs: list[PairAudit]
    reports: list[SurvivorReport]
    complete: bool

    @property
    def survivors(self) -> list[tuple[int, int, int]]:
        return sorted(
            (r.a, r.b, r.c) for r in self.reports if r.status == "survivor"
        )

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "pairs": [p.to_dict() for p in self.pairs],
            "reports": [r.to_dict() for r in self.reports],
            "survivors": [list(t) for t in self.survivors],
            "complete": self.complete,
        }


def _pair_shard(args: tuple) -> dict:
    """Full treatment of one (a, c) pair; top-level so pools can pickle it."""
    a, c, b_max, s_limit, hecke_rounds = args
    ac = a * c
    a_prime = radical(576 * a * c)
    found: InertSearchResult = search_inert_index(a_prime, s_limit)
    s = found.index
    reports: list[dict] = []
    incomplete = False
    if s is None:
        branch = "search-exhausted"
        candidates: list[int] = []
        incomplete = True
        below = False
    else:
        below = s <= a_prime // 6
        if below:
            branch = "discard-below-threshold"
            candidates = []
        elif s <= ac:
            branch = "no-roots-possible"
            candidates = []
        else:
            branch = "interpolate"
            candidates = [
                b for b in lacunary_candidates(a, c, s) if a < b <= b_max
            ]
            kernel = _strip_six(a_prime)
            pool = inert_primes(kernel, hecke_rounds + 4)
            for b in candidates:
                usable = [p for p in pool if no_exponent_collision(a, b, c, p)]
                tried = []
                hit = None
                for p in usable[:hecke_rounds]:
                    result = hecke_elimination(a, b, c, p)
                    tried.append(p)
                    if result.eliminated:
                        hit = result
                        break
                if hit is not None:
                    reports.append(
                        SurvivorReport(
                            a, b, c, "eliminated", hit.prime, hit.witness,
                            hit.index, tuple(tried),
                        ).to_dict()
                    )
                else:
                    reports.append(
                        SurvivorReport(
                            a, b, c, "survivor", None, None, None, tuple(tried)
                        ).to_dict()
                    )
    audit = PairAudit(
        a=a,
        c=c,
        a_prime=a_prime,
        s=s,
        s_limit=s_limit,
        certificate=found.certificate,
        below_kernel_threshold=below,
        branch=branch,
        candidates=tuple(candidates),
        incomplete=incomplete,
    )
    return {"audit": audit.to_dict(), "reports": reports}


def classify_pipeline(
    a_values,
    c_values,
    b_max: int = 99,
    s_limit: int = 10**4,
    hecke_rounds: int = 3,
    jobs: int = 1,
    skip_keys: set[tuple[int, int]] | None = None,
    shard_hook=None,
) -> ClassificationResult:
    """Run the staged classification over a box of (a, c) pairs.

    ``a_values`` must lie in the validity domain a >= 4.  Pairs in
    ``skip_keys`` are omitted (the CLI uses this to resume); completed
    shards are passed to ``shard_hook`` as they finish.  Results are
    merged in sorted pair order regardless of worker scheduling, so
    output is deterministic for any ``jobs``.
    """
    a_values = sorted(set(a_values))
    c_values = sorted(set(c_values))
    if a_values and a_values[0] < 4:
        raise PreconditionFail("classification domain starts at a = 4")
    if hecke_rounds < 1:
        raise PreconditionFail("need at least one elimination round")
    pairs = [
        (a, c)
        for a in a_values
        for c in c_values
        if skip_keys is None or (a, c) not in skip_keys
    ]
    shard_args = [(a, c, b_max, s_limit, hecke_rounds) for a, c in pairs]
    shards: dict[tuple[int, int], dict] = {}
    if jobs > 1 and len(shard_args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for args, shard in zip(shard_args, pool.map(_pair_shard, shard_args)):
                shards[(args[0], args[1])] = shard
                if shard_hook:
                    shard_hook((args[0], args[1]), shard)
    else:
        for args in shard_args:
            shard = _pair_shard(args)
            shards[(args[0], args[1])] = shard
            if shard_hook:
                shard_hook((args[0], args[1]), shard)
    return merge_shards(
        {
            "a_values": a_values,
            "c_values": c_values,
            "b_max": b_max,
            "s_limit": s_limit,
            "hecke_rounds": hecke_rounds,
        },
        shards,
    )


def merge_shards(params: dict, shards: dict[tuple[int, int], dict]) -> ClassificationResult:
    """Deterministic assembly of per-pair shards into one result."""
    audits = []
    reports = []
    complete = True
    for key in sorted(shards):
        shard = shards[key]
        audit = shard["audit"]
        audits.append(
            PairAudit(
                a=audit["a"],
                c=audit["c"],
                a_prime=audit["a_prime"],
                s=audit["s"],
                s_limit=audit["s_limit"],
                certificate=tuple(tuple(x) for x in audit["certificate"]),
                below_kernel_threshold=audit["below_kernel_threshold"],
                branch=audit["branch"],
                candidates=tuple(audit["candidates"]),
                incomplete=audit["incomplete"],
            )
        )
        complete = complete and not audit["incomplete"]
        for rep in shard["reports"]:
            reports.append(
                SurvivorReport(
                    a=rep["a"],
                    b=rep["b"],
                    c=rep["c"],
                    status=rep["status"],
                    eliminated_by=rep["eliminated_by"],
                    witness=rep["witness"],
                    witness_index=rep["witness_index"],
                    primes_tried=tuple(rep["primes_tried"]),
                )
            )
    reports.sort(key=lambda r: (r.a, r.c, r.b))
    return ClassificationResult(params, audits, reports, complete)


def coefficient_density(
    a: int, b: int, c: int, bound: int, decades: int = 4, _series: QSeries | None = None
) -> list[dict]:
    """Fraction of nonzero coefficients below geometrically growing
    bounds, in the plain q-grading of the expansion."""
    if bound < 10 or decades < 1:
        raise PreconditionFail("need bound >= 10 and decades >= 1")
    series = _series if _series is not None else expand_eta_triple(a, b, c, bound)
    if series.trunc != bound:
        raise PreconditionFail("supplied series truncation must equal the bound")
    support = sorted(e for e in series.coeffs if e >= 0)
    bounds = [bound // 10**k for k in range(decades - 1, -1, -1)]
    out = []
    from bisect import bisect_left

    for x in bounds:
        count = bisect_left(support, x)
        out.append(
            {
                "a": a,
                "b": b,
                "c": c,
                "bound": x,
                "nonzero": count,
                "fraction": count / x,
            }
        )
    return out
