"""Extended-precision scalars and the few special functions the package needs.

Arithmetic is delegated to :mod:`mpmath`.  Each :class:`PrecisionContext`
owns a private ``mpmath.MPContext`` whose precision is fixed at creation, so
no global precision state is touched and contexts can be used from several
threads at once.
"""

from __future__ import annotations

import decimal
import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath.libmp import from_rational, to_str

from .errors import DomainError

DEFAULT_GUARD = 20


@functools.lru_cache(maxsize=None)
def _mp_context(dps: int) -> mpmath.MPContext:
    mp = mpmath.MPContext()
    mp.dps = dps
    return mp


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision: ``digits`` reported plus ``guard`` internal digits."""

    digits: int
    guard: int = DEFAULT_GUARD

    def __post_init__(self):
        if not isinstance(self.digits, int) or self.digits < 10:
            raise DomainError(f"digits must be an integer >= 10, got {self.digits!r}")
        if not isinstance(self.guard, int) or self.guard < 0:
            raise DomainError(f"guard must be a non-negative integer, got {self.guard!r}")

    @property
    def dps(self) -> int:
        """Decimal digits carried by every internal operation."""
        return self.digits + self.guard

    @property
    def mp(self) -> mpmath.MPContext:
        return _mp_context(self.dps)

    def real(self, value):
        """Convert ``value`` to an ExtReal at working precision.

        Strings, Decimals and Fractions are rounded once, correctly.
        """
        mp = self.mp
        if isinstance(value, Fraction):
            return mp.make_mpf(from_rational(value.numerator, value.denominator, mp.prec, "n"))
        if isinstance(value, decimal.Decimal):
            return mp.mpf(str(value))
        return mp.mpf(value)

    def tol(self, offset: int = 0):
        """Return ``10**(-digits + offset)``."""
        return self.mp.mpf(10) ** (offset - self.digits)

    def with_digits(self, digits: int) -> PrecisionContext:
        return PrecisionContext(digits, self.guard)

    def with_guard(self, guard: int) -> PrecisionContext:
        return PrecisionContext(self.digits, guard)


# ---------------------------------------------------------------------------
# serialization


def serialize(x, digits: int) -> str:
    """Decimal string of ``x`` rounded to ``digits`` significant digits.

    The exponent is always explicit, e.g. ``4.8508440564025807349e+2``.
    """
    if isinstance(x, int):
        x = mpmath.mpf(x)
    return to_str(x._mpf_, digits, min_fixed=1, max_fixed=0, show_zero_exponent=True)


def parse(text: str, ctx: PrecisionContext):
    """Inverse of :func:`serialize` (accepts any decimal literal)."""
    text = text.strip()
    try:
        decimal.Decimal(text)
    except decimal.InvalidOperation:
        raise DomainError(f"not a decimal number: {text!r}") from None
    return ctx.mp.mpf(text)


def to_decimal(x) -> decimal.Decimal:
    """Exact conversion of a finite mpf to :class:`decimal.Decimal`."""
    sign, man, exp, _ = x._mpf_
    man = int(man)
    if not man:
        if exp:
            raise DomainError("cannot convert a non-finite value")
        return decimal.Decimal(0)
    with decimal.localcontext() as dctx:
        dctx.prec = decimal.MAX_PREC
        if exp >= 0:
            d = decimal.Decimal(man << exp)
        else:
            d = decimal.Decimal(man * 5 ** (-exp)).scaleb(exp)
    return -d if sign else d


def format_fixed(x, frac_digits: int) -> str:
    """Fixed-point string with exactly ``frac_digits`` digits after the point."""
    d = to_decimal(x)
    with decimal.localcontext() as dctx:
        dctx.prec = decimal.MAX_PREC
        q = d.quantize(decimal.Decimal(1).scaleb(-frac_digits), rounding=decimal.ROUND_HALF_EVEN)
    return f"{q:f}"


def agrees_to(x, printed: str, truncated: bool = True) -> bool:
    """Check that ``x`` reproduces every digit of the decimal string ``printed``.

    With ``truncated`` the printed value is taken to be ``x`` cut after its
    last digit; otherwise it is taken to be ``x`` rounded half-even.
    """
    frac = len(printed.split(".")[1]) if "." in printed else 0
    d = to_decimal(x)
    rounding = decimal.ROUND_DOWN if truncated else decimal.ROUND_HALF_EVEN
    with decimal.localcontext() as dctx:
        dctx.prec = decimal.MAX_PREC
        q = d.quantize(decimal.Decimal(1).scaleb(-frac), rounding=rounding)
    return q == decimal.Decimal(printed)


def printed_ulps(x, printed: str) -> decimal.Decimal:
    """Distance from ``x`` to ``printed`` in units of its last printed digit.

    Anything below 1 is consistent with ``printed`` having been produced from
    ``x`` by either rounding or truncation.
    """
    frac = len(printed.split(".")[1]) if "." in printed else 0
    with decimal.localcontext() as dctx:
        dctx.prec = decimal.MAX_PREC
        return abs(to_decimal(x) - decimal.Decimal(printed)).scaleb(frac)


# ---------------------------------------------------------------------------
# special functions


_EXACT_LIMIT = 5000


def _as_fraction(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, (str, decimal.Decimal)):
        return Fraction(decimal.Decimal(x))
    return None


def gamma(x, ctx: PrecisionContext):
    """Gamma function at working precision.

    Integers and half-integers are evaluated from exact factorial formulas;
    everything else goes through mpmath.
    """
    mp = ctx.mp
    q = _as_fraction(x)
    if q is None:
        xm = mp.mpf(x)
        if mp.isint(xm) or mp.isint(2 * xm):
            q = Fraction(int(2 * xm), 2)
    if q is not None:
        if q <= 0:
            raise DomainError(f"gamma requires x > 0, got {x}")
        if q.denominator == 1 and q <= _EXACT_LIMIT:
            return mp.mpf(math.factorial(q.numerator - 1))
        if q.denominator == 2 and q <= _EXACT_LIMIT:
            k = (q.numerator - 1) // 2  # x = k + 1/2
            ratio = Fraction(math.factorial(2 * k), 4**k * math.factorial(k))
            return ctx.real(ratio) * mp.sqrt(mp.pi)
        xm = ctx.real(q)
    if xm <= 0:
        raise DomainError(f"gamma requires x > 0, got {x}")
    return mp.gamma(xm)


def exp_neg(x, ctx: PrecisionContext):
    """``exp(-x)`` at working precision."""
    return ctx.mp.exp(-ctx.real(x))


def cos_fn(x, ctx: PrecisionContext):
    """``cos(x)`` at working precision."""
    return ctx.mp.cos(ctx.real(x))
