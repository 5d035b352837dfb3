"""Truncated q-series with exact coefficients.

A QSeries stores a sparse map exponent -> coefficient together with an
exclusive truncation bound ``trunc``: the series is known exactly for all
exponents below ``trunc`` and unknown beyond it.  Coefficients are
arbitrary-precision integers, or exact rationals where a caller (the
partition oracles) needs them.

Products route through one of two engines: a sorted sparse convolution
for thin operands, and a packed fixed-width evaluation for dense ones.
The packed engine writes each coefficient into its own byte slot of a
single big integer, multiplies the two integers, and reads balanced
digits back out; integer multiplication is exact, so this is just a fast
dense representation, not an approximation.

Exponents are normally non-negative.  Negative exponents are permitted so
that eta-quotient expansions with a pole keep their literal leading
exponent; inversion still demands a unit constant term at exponent 0.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NonUnitConstantTerm

# Below this many coefficient pairs the plain dict loop wins.
_SPARSE_PAIR_CUTOFF = 4096
# Dense fill fraction beyond which packing is always used.
_DENSE_FILL = 0.25
# euler_product double-checks itself against the direct product up to here.
_DIRECT_CHECK_LIMIT = 600


def _normalize_value(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


class QSeries:
    """Formal power series truncated below ``trunc``."""

    __slots__ = ("coeffs", "trunc", "_all_int")

    def __init__(self, coeffs: dict, trunc: int):
        if trunc < 0:
            raise ValueError("trunc must be non-negative")
        clean: dict[int, int | Fraction] = {}
        all_int = True
        for e, v in coeffs.items():
            if e >= trunc:
                raise ValueError(f"exponent {e} not below trunc {trunc}")
            v = _normalize_value(v)
            if v:
                clean[e] = v
                if not isinstance(v, int):
                    all_int = False
        self.coeffs = clean
        self.trunc = trunc
        self._all_int = all_int

    # -- constructors ------------------------------------------------

    @classmethod
    def one(cls, trunc: int) -> "QSeries":
        return cls({0: 1} if trunc > 0 else {}, trunc)

    @classmethod
    def zero(cls, trunc: int) -> "QSeries":
        return cls({}, trunc)

    @classmethod
    def monomial(cls, exponent: int, coefficient, trunc: int) -> "QSeries":
        return cls({exponent: coefficient}, trunc)

    # -- inspection --------------------------------------------------

    @property
    def nnz(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def min_exponent(self) -> int | None:
        return min(self.coeffs) if self.coeffs else None

    def __getitem__(self, e: int):
        if e >= self.trunc:
            raise ValueError(f"coefficient at {e} is beyond trunc {self.trunc}")
        return self.coeffs.get(e, 0)

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def fill(self) -> float:
        """Fraction of occupied slots over the exponent span."""
        if not self.coeffs:
            return 0.0
        lo = min(self.coeffs)
        span = self.trunc - min(lo, 0)
        return len(self.coeffs) / span if span > 0 else 1.0

    def __repr__(self) -> str:
        head = ", ".join(
            f"{e}: {self.coeffs[e]}" for e in sorted(self.coeffs)[:6]
        )
        more = ", ..." if self.nnz > 6 else ""
        return f"QSeries({{{head}{more}}}, trunc={self.trunc}, nnz={self.nnz})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    def __hash__(self):
        raise TypeError("QSeries is not hashable")

    def agrees_with(self, other: "QSeries", upto: int | None = None) -> bool:
        """Equality of coefficients on the common known range."""
        bound = min(self.trunc, other.trunc)
        if upto is not None:
            bound = min(bound, upto)
        for e, v in self.coeffs.items():
            if e < bound and other.coeffs.get(e, 0) != v:
                return False
        for e, v in other.coeffs.items():
            if e < bound and self.coeffs.get(e, 0) != v:
                return False
        return True

    # -- structural ops ----------------------------------------------

    def truncate(self, trunc: int) -> "QSeries":
        if trunc > self.trunc:
            raise ValueError("cannot extend a truncated series")
        return QSeries({e: v for e, v in self.coeffs.items() if e < trunc}, trunc)

    def _relabel(self, trunc: int) -> "QSeries":
        # Internal: assert a larger trunc without new information.  Only
        # Newton iteration uses this, where the update repairs the tail.
        out = QSeries({}, trunc)
        out.coeffs = dict(self.coeffs)
        out._all_int = self._all_int
        return out

    def shift(self, k: int) -> "QSeries":
        """Multiply by q**k (k may be negative)."""
        return QSeries({e + k: v for e, v in self.coeffs.items()}, self.trunc + k)

    # -- ring ops ----------------------------------------------------

    def __neg__(self) -> "QSeries":
        return QSeries({e: -v for e, v in self.coeffs.items()}, self.trunc)

    def __add__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            other = QSeries({0: other} if other else {}, self.trunc)
        if not isinstance(other, QSeries):
            return NotImplemented
        trunc = min(self.trunc, other.trunc)
        out = {e: v for e, v in self.coeffs.items() if e < trunc}
        for e, v in other.coeffs.items():
            if e < trunc:
                w = out.get(e, 0) + v
                if w:
                    out[e] = w
                elif e in out:
                    del out[e]
        return QSeries(out, trunc)

    __radd__ = __add__

    def __sub__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            other = QSeries({0: other} if other else {}, self.trunc)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.__add__(-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self).__add__(other)

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            if not other:
                return QSeries.zero(self.trunc)
            return QSeries(
                {e: v * other for e, v in self.coeffs.items()}, self.trunc
            )
        if not isinstance(other, QSeries):
            return NotImplemented
        return _mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "QSeries":
        if not isinstance(exponent, int):
            raise TypeError("series powers must be integers")
        base = self
        if exponent < 0:
            base = self.inverse()
            exponent = -exponent
        result = QSeries.one(self.trunc)
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base if exponent > 1 else base
            exponent >>= 1
        return result

    def inverse(self) -> "QSeries":
        """Multiplicative inverse by Newton iteration.

        Requires valuation 0 with constant term +-1 for integer series,
        or any nonzero constant term for rational ones.
        """
        lo = self.min_exponent()
        if lo is None or lo != 0:
            raise NonUnitConstantTerm(
                f"series with valuation {lo} has no power-series inverse"
            )
        c0 = self.coeffs[0]
        if self._all_int:
            if c0 not in (1, -1):
                raise NonUnitConstantTerm(
                    f"constant term {c0} is not a unit over the integers"
                )
            seed = c0
        else:
            seed = Fraction(1) / c0
        trunc = self.trunc
        x = QSeries({0: seed}, 1)
        prec = 1
        while prec < trunc:
            prec = min(2 * prec, trunc)
            f = self.truncate(prec)
            xr = x._relabel(prec)
            x = xr * (2 - f * xr)
        return x


# -- multiplication engines -----------------------------------------


def _mul(f: QSeries, g: QSeries, trunc: int | None = None) -> QSeries:
    vf = min(f.min_exponent() or 0, 0)
    vg = min(g.min_exponent() or 0, 0)
    if trunc is None:
        trunc = min(f.trunc + vg, g.trunc + vf)
    if f.is_zero() or g.is_zero():
        return QSeries.zero(trunc)
    if vf or vg:
        shifted = _mul(f.shift(-vf), g.shift(-vg), trunc - vf - vg)
        return shifted.shift(vf + vg)
    span = trunc
    pairs = f.nnz * g.nnz
    use_packed = (
        f._all_int
        and g._all_int
        and span > 0
        and (
            pairs > _SPARSE_PAIR_CUTOFF
            or (f.fill() > _DENSE_FILL and g.fill() > _DENSE_FILL)
        )
    )
    if use_packed:
        out = _mul_packed(f.coeffs, g.coeffs, span)
    else:
        out = _mul_sparse(f.coeffs, g.coeffs, span)
    return QSeries(out, trunc)


def _mul_sparse(f: dict, g: dict, trunc: int) -> dict:
    if len(g) < len(f):
        f, g = g, f
    gitems = sorted(g.items())
    out: dict[int, int | Fraction] = {}
    for ef, cf in f.items():
        limit = trunc - ef
        for eg, cg in gitems:
            if eg >= limit:
                break
            k = ef + eg
            w = out.get(k, 0) + cf * cg
            if w:
                out[k] = w
            elif k in out:
                del out[k]
    return out


def _mul_packed(f: dict, g: dict, trunc: int) -> dict:
    bf = max(abs(v) for v in f.values())
    bg = max(abs(v) for v in g.values())
    bound = bf * bg * min(len(f), len(g))
    width = (bound.bit_length() + 8) // 8
    pf = _pack(f, trunc, width)
    pg = _pack(g, trunc, width)
    mask = (1 << (8 * width * trunc)) - 1
    return _unpack((pf * pg) & mask, trunc, width)


def _pack(coeffs: dict, trunc: int, width: int) -> int:
    pos = bytearray(trunc * width)
    neg = bytearray(trunc * width)
    for e, c in coeffs.items():
        if 0 <= e < trunc:
            off = e * width
            if c > 0:
                pos[off : off + width] = c.to_bytes(width, "little")
            else:
                neg[off : off + width] = (-c).to_bytes(width, "little")
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(value: int, trunc: int, width: int) -> dict:
    data = value.to_bytes(trunc * width, "little")
    half = 1 << (8 * width - 1)
    full = half << 1
    out = {}
    carry = 0
    for i in range(trunc):
        d = int.from_bytes(data[i * width : (i + 1) * width], "little") + carry
        carry = 0
        if d >= half:
            d -= full
            carry = 1
        if d:
            out[i] = d
    return out


# -- classical products ----------------------------------------------


def euler_product(trunc: int, step: int = 1) -> QSeries:
    """prod_{n>=1} (1 - q**(step*n)) truncated below ``trunc``.

    Computed from the pentagonal-number expansion; in debug runs at small
    truncation the result is checked against the literal product.
    """
    if step < 1:
        raise ValueError("step must be positive")
    coeffs: dict[int, int] = {}
    if trunc > 0:
        coeffs[0] = 1
    k = 1
    while True:
        e1 = step * (k * (3 * k - 1) // 2)
        if e1 >= trunc:
            break
        sign = -1 if k % 2 else 1
        coeffs[e1] = sign
        e2 = step * (k * (3 * k + 1) // 2)
        if e2 < trunc:
            coeffs[e2] = sign
        k += 1
    series = QSeries(coeffs, trunc)
    if __debug__ and trunc <= _DIRECT_CHECK_LIMIT:
        assert series == euler_product_direct(trunc, step)
    return series


def euler_product_direct(trunc: int, step: int = 1) -> QSeries:
    """The same product multiplied out factor by factor.

    Serves as the independent oracle for euler_product.  Each factor
    (1 - q**n) is applied as a packed shift-and-subtract, so the cost is
    quadratic in trunc but with byte-sized constants.
    """
    if step < 1:
        raise ValueError("step must be positive")
    if trunc <= 0:
        return QSeries.zero(trunc)
    mask = (1 << (8 * trunc)) - 1
    acc = 1
    for n in range(step, trunc, step):
        acc = (acc - (acc << (8 * n))) & mask
    return QSeries(_unpack(acc, trunc, 1), trunc)


def jacobi_cube(trunc: int) -> QSeries:
    """sum_{m>=0} (-1)**m (2m+1) q**(m(m+1)/2), the closed form of the
    cube of the Euler product."""
    coeffs: dict[int, int] = {}
    m = 0
    while True:
        e = m * (m + 1) // 2
        if e >= trunc:
            break
        coeffs[e] = (2 * m + 1) * (-1 if m % 2 else 1)
        m += 1
    return QSeries(coeffs, trunc)


# -- eta-quotient family ----------------------------------------------


def leading_exponent(a: int, b: int, c: int) -> int:
    """Exponent of the first term of the (a, b, c) eta-quotient in plain q."""
    return a * b * c + a * a - a * a * c - 1


def normalized_coefficients(a: int, b: int, c: int, terms: int) -> QSeries:
    """The coefficient sequence m -> A(m) of the (a, b, c) quotient.

    This is the series in Q = q**24 after the leading power is divided
    out: prod (1-Q**(a n))**a (1-Q**(a c n))**(b-a) / (1-Q**n), truncated
    below ``terms``.
    """
    if a < 1 or b < 1 or c < 1:
        raise ValueError("a, b, c must be positive")
    numerator = euler_product(terms, a) ** a
    scale = euler_product(terms, a * c) ** (b - a)
    return numerator * scale * euler_product(terms, 1).inverse()


def expand_eta_triple(a: int, b: int, c: int, trunc: int) -> QSeries:
    """Plain-q expansion sum_m A(m) q**(24m + r) truncated below ``trunc``.

    r is the leading exponent; for b < a it can be negative, in which
    case the returned series carries the pole's negative exponents
    literally.
    """
    r = leading_exponent(a, b, c)
    if trunc <= r:
        terms = 0
    else:
        terms = (trunc - r + 23) // 24
    norm = normalized_coefficients(a, b, c, terms)
    return QSeries({24 * m + r: v for m, v in norm.coeffs.items()}, trunc)


# -- series files ------------------------------------------------------


def save_series(path, series: QSeries) -> None:
    """Write the exact cache format: a header line '# T=<trunc>' and one
    'exponent<TAB>coefficient' line per nonzero term."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# T={series.trunc}\n")
        for e in sorted(series.coeffs):
            fh.write(f"{e}\t{series.coeffs[e]}\n")


def load_series(path) -> QSeries:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if not header.startswith("# T="):
            raise ValueError(f"missing truncation header in {path}")
        trunc = int(header[4:])
        coeffs: dict[int, int | Fraction] = {}
        for line in fh:
            line = line.strip()
            if not line:
                continue
            e_text, c_text = line.split("\t")
            value = Fraction(c_text) if "/" in c_text else int(c_text)
            coeffs[int(e_text)] = value
    return QSeries(coeffs, trunc)
