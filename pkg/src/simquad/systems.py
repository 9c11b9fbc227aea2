"""Weight systems: pairs of measures described by stepline recurrence data.

A weight system supplies the coefficients of the four-term recurrence

    x P_n(x) = P_{n+1}(x) + b_n P_n(x) + c_n P_{n-1}(x) + d_n P_{n-2}(x)

for the type II polynomials on the stepline, the 2x2 lower-triangular
normalization matrix ``D`` that turns left-eigenvector components into
quadrature weights, and (optionally) the moments of both measures.

Two closed-form systems ship with the package:

* :class:`BesselK` -- weights ``x**alpha * (rho_nu, rho_{nu+1})`` with
  ``rho_nu(x) = 2 x**(nu/2) K_nu(2 sqrt(x))`` on ``(0, inf)``.
* :class:`BesselI` -- weights ``(omega_{nu,c}, omega_{nu+1,c})`` with
  ``omega_{nu,c}(x) = x**(nu/2) I_nu(2 sqrt(x)) exp(-c x)``.

Parameters are held as exact decimal strings.  Recurrence coefficients are
rational in the parameters, so they are evaluated in exact rational
arithmetic and rounded once to the working precision.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .errors import DomainError, IncompleteInputError, UnsupportedOracleError
from .precision import PrecisionContext, gamma


def _canonical(value) -> str:
    """Normalize a numeric parameter to a canonical exact decimal string."""
    if isinstance(value, float):
        raise DomainError("binary floats are not accepted as parameters; pass a decimal string")
    try:
        d = Decimal(str(value))
    except InvalidOperation:
        raise DomainError(f"not a decimal number: {value!r}") from None
    if not d.is_finite():
        raise DomainError(f"parameter must be finite, got {value!r}")
    d = d.normalize()
    text = f"{d:f}"
    return "0" if text in ("-0", "0") else text


def _frac(text: str) -> Fraction:
    return Fraction(Decimal(text))


# ---------------------------------------------------------------------------
# coefficient containers


@dataclass(frozen=True)
class SteplineCoefficients:
    """Stepline recurrence coefficients for indices ``0 .. len(b) - 1``.

    ``c[0]``, ``d[0]`` and ``d[1]`` are stored as literal zeros so that all
    three tuples share natural indexing.
    """

    b: tuple
    c: tuple
    d: tuple

    def __post_init__(self):
        if not (len(self.b) == len(self.c) == len(self.d)):
            raise ValueError("b, c and d must have equal length")

    @classmethod
    def from_natural(cls, b: Sequence, c: Sequence, d: Sequence) -> SteplineCoefficients:
        """Build from ``b`` indexed from 0, ``c`` from 1 and ``d`` from 2.

        The usable length is the largest ``L`` such that every index below
        ``L`` is covered by all three sequences.
        """
        size = min(len(b), len(c) + 1, len(d) + 2)
        size = max(size, 0)
        cc = (0,) + tuple(c)
        dd = (0, 0) + tuple(d)
        return cls(tuple(b[:size]), cc[:size], dd[:size])

    def __len__(self):
        return len(self.b)

    def __getitem__(self, n: int):
        if not 0 <= n < len(self.b):
            raise IncompleteInputError(f"stepline coefficient index {n} not available (have 0..{len(self.b) - 1})")
        return self.b[n], self.c[n], self.d[n]


@dataclass(frozen=True)
class NNCoefficients:
    """Nearest-neighbour recurrence coefficients on the multi-index grid.

    Each field maps ``(n, m)`` to a number.  ``a`` and ``b`` multiply
    ``P_{n-1,m}`` and ``P_{n,m-1}``; ``c`` and ``d`` are the diagonal terms of
    the recurrences that raise the first and second index respectively.
    """

    a: Mapping
    b: Mapping
    c: Mapping
    d: Mapping


def _nn(table: Mapping, name: str, n: int, m: int, target: int):
    try:
        return table[(n, m)]
    except KeyError:
        raise IncompleteInputError(
            f"nearest-neighbour coefficient {name}[{n},{m}] is missing (needed for stepline index {target})"
        ) from None


def nn_to_stepline(nn: NNCoefficients, N: int) -> SteplineCoefficients:
    """Convert nearest-neighbour coefficients to stepline ``b, c, d`` up to index ``N``.

    Uses ``P_{n-1,n} = P_{n,n-1} + (c_{n-1,n-1} - d_{n-1,n-1}) P_{n-1,n-1}`` to
    eliminate the off-stepline neighbours.
    """
    if N < 0:
        raise DomainError("N must be non-negative")
    b, c, d = [], [0], [0, 0]
    for n in range(N + 1):
        k, odd = divmod(n, 2)
        if not odd:
            b.append(_nn(nn.c, "c", k, k, n))
            if n >= 1:
                a_kk = _nn(nn.a, "a", k, k, n)
                c.append(a_kk + _nn(nn.b, "b", k, k, n))
                d.append(a_kk * (_nn(nn.c, "c", k - 1, k - 1, n) - _nn(nn.d, "d", k - 1, k - 1, n)))
        else:
            b.append(_nn(nn.d, "d", k + 1, k, n))
            b_k1k = _nn(nn.b, "b", k + 1, k, n)
            c.append(_nn(nn.a, "a", k + 1, k, n) + b_k1k)
            if n >= 2:
                d.append(b_k1k * (_nn(nn.d, "d", k, k - 1, n) - _nn(nn.c, "c", k, k - 1, n)))
    return SteplineCoefficients(tuple(b), tuple(c[: N + 1]), tuple(d[: N + 1]))


@dataclass(frozen=True)
class NormalizationMatrix:
    """Lower-triangular ``D = [[D11, 0], [D21, D22]]``.

    ``D`` is the inverse of the matrix ``[[A1, 0], [A2, B2]]`` of degree-zero
    type I polynomials.
    """

    D11: object
    D21: object
    D22: object

    def __post_init__(self):
        if self.D11 == 0 or self.D22 == 0:
            raise DomainError("normalization matrix must have non-zero diagonal")

    @classmethod
    def from_type_one(cls, A1, A2, B2) -> NormalizationMatrix:
        if A1 == 0 or B2 == 0:
            raise DomainError("type I constant matrix is singular")
        return cls(1 / A1, -A2 / (A1 * B2), 1 / B2)

    def type_one(self):
        """Return ``(A1, A2, B2)``, the entries of ``D``'s inverse."""
        return 1 / self.D11, -self.D21 / (self.D11 * self.D22), 1 / self.D22

    def as_rows(self):
        return [[self.D11, 0], [self.D21, self.D22]]


# ---------------------------------------------------------------------------
# Bessel K system


def _check_besselk(alpha: Fraction, nu: Fraction):
    if not alpha > -1:
        raise DomainError(f"BesselK requires alpha > -1, got {alpha}")
    if not nu >= 0:
        raise DomainError(f"BesselK requires nu >= 0, got {nu}")


def _besselk_exact(alpha: Fraction, nu: Fraction, n: int):
    b = (n + alpha + 1) * (3 * n + alpha + 2 * nu) - (alpha + 1) * (nu - 1)
    c = n * (n + alpha) * (n + alpha + nu) * (3 * n + 2 * alpha + nu)
    d = n * (n - 1) * (n + alpha) * (n + alpha - 1) * (n + alpha + nu) * (n + alpha + nu - 1)
    return b, c, d


def besselk_coeffs(alpha, nu, n: int, ctx: PrecisionContext | None = None):
    """Stepline coefficients ``(b_n, c_n, d_n)`` for ``x**alpha (rho_nu, rho_{nu+1})``.

    Without ``ctx`` the exact :class:`~fractions.Fraction` values are returned.
    """
    a, v = _frac(_canonical(alpha)), _frac(_canonical(nu))
    _check_besselk(a, v)
    if n < 0:
        raise DomainError("index must be non-negative")
    out = _besselk_exact(a, v, n)
    return out if ctx is None else tuple(ctx.real(x) for x in out)


def besselk_normalization(alpha, nu, ctx: PrecisionContext) -> NormalizationMatrix:
    a, v = _frac(_canonical(alpha)), _frac(_canonical(nu))
    _check_besselk(a, v)
    g1 = gamma(a + v + 1, ctx) * gamma(a + 1, ctx)
    g2 = gamma(a + v + 2, ctx) * gamma(a + 2, ctx)
    return NormalizationMatrix.from_type_one(1 / g1, -ctx.real(a + v + 1) / g2, 1 / g2)


# ---------------------------------------------------------------------------
# Bessel I system


def _check_besseli(nu: Fraction, c: Fraction):
    if not nu > -1:
        raise DomainError(f"BesselI requires nu > -1, got {nu}")
    if not c > 0:
        raise DomainError(f"BesselI requires c > 0, got {c}")


def _besseli_exact(nu: Fraction, c: Fraction, n: int):
    b = (1 + c * (nu + 2 * n + 1)) / c**2
    cn = n * (2 + c * (nu + n)) / c**3
    d = Fraction(n * (n - 1)) / c**4
    return b, cn, d


def besseli_coeffs(nu, c, n: int, ctx: PrecisionContext | None = None):
    """Stepline coefficients ``(b_n, c_n, d_n)`` for ``(omega_{nu,c}, omega_{nu+1,c})``."""
    v, cc = _frac(_canonical(nu)), _frac(_canonical(c))
    _check_besseli(v, cc)
    if n < 0:
        raise DomainError("index must be non-negative")
    out = _besseli_exact(v, cc, n)
    return out if ctx is None else tuple(ctx.real(x) for x in out)


def besseli_normalization(nu, c, ctx: PrecisionContext) -> NormalizationMatrix:
    v, cc = _frac(_canonical(nu)), _frac(_canonical(c))
    _check_besseli(v, cc)
    mp = ctx.mp
    cm, vm = ctx.real(cc), ctx.real(v)
    scale = mp.exp(-1 / cm)
    return NormalizationMatrix.from_type_one(
        scale * cm ** (vm + 1), -scale * cm ** (vm + 2), scale * cm ** (vm + 3)
    )


def _besseli_moment(nu: Fraction, c: Fraction, n: int, ctx: PrecisionContext):
    """Moment ``int x**n x**(nu/2) I_nu(2 sqrt x) exp(-c x) dx`` by term-wise integration.

    Term k of the Bessel series integrates to
    ``Gamma(n+k+nu+1) / (k! Gamma(k+nu+1) c**(n+k+nu+1))``.  Consecutive terms
    differ by the factor ``(n+k+nu+1) / ((k+1)(k+nu+1) c)``.
    """
    mp = ctx.mp
    vm, cm = ctx.real(nu), ctx.real(c)
    term = gamma(n + nu + 1, ctx) / (gamma(nu + 1, ctx) * cm ** (n + vm + 1))
    total = term
    eps = mp.mpf(10) ** (-ctx.dps)
    k = 0
    while True:
        term = term * (n + k + vm + 1) / ((k + 1) * (k + vm + 1) * cm)
        total += term
        k += 1
        if term <= eps * total:
            return total


# ---------------------------------------------------------------------------
# weight systems


class WeightSystem:
    """Common interface of all weight systems.

    Concrete systems are immutable and hashable; everything derived from them
    is a pure function of ``(system, index, ctx)``.
    """

    kind: str = ""

    def coeffs(self, n: int, ctx: PrecisionContext):
        """Return ``(b_n, c_n, d_n)`` at working precision."""
        raise NotImplementedError

    def normalization(self, ctx: PrecisionContext) -> NormalizationMatrix:
        raise NotImplementedError

    def has_moments(self, j: int) -> bool:
        return False

    def _moment(self, j: int, n: int, ctx: PrecisionContext):
        raise UnsupportedOracleError(f"{self.kind} system has no moment oracle for measure {j}")

    def moment(self, j: int, n: int, ctx: PrecisionContext):
        """``n``-th moment of measure ``j`` (1 or 2)."""
        if j not in (1, 2):
            raise DomainError(f"measure index must be 1 or 2, got {j}")
        if n < 0:
            raise DomainError("moment degree must be non-negative")
        if not self.has_moments(j):
            raise UnsupportedOracleError(f"{self.kind} system has no moment oracle for measure {j}")
        return _cached_moment(self, j, n, ctx)

    def stepline(self, N: int, ctx: PrecisionContext) -> SteplineCoefficients:
        """Coefficients for indices ``0 .. N-1`` (the diagonals of ``H_N``)."""
        return _cached_stepline(self, N, ctx)

    def descriptor(self) -> dict:
        raise NotImplementedError


@functools.lru_cache(maxsize=4096)
def _cached_moment(system: WeightSystem, j: int, n: int, ctx: PrecisionContext):
    return system._moment(j, n, ctx)


@functools.lru_cache(maxsize=256)
def _cached_stepline(system: WeightSystem, N: int, ctx: PrecisionContext) -> SteplineCoefficients:
    rows = [system.coeffs(n, ctx) for n in range(N)]
    return SteplineCoefficients(
        tuple(r[0] for r in rows), tuple(r[1] for r in rows), tuple(r[2] for r in rows)
    )


@dataclass(frozen=True)
class BesselK(WeightSystem):
    """Weights ``x**alpha (rho_nu, rho_{nu+1})`` on ``(0, inf)``; ``alpha > -1``, ``nu >= 0``."""

    alpha: str = "0"
    nu: str = "0"
    kind = "besselK"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _canonical(self.alpha))
        object.__setattr__(self, "nu", _canonical(self.nu))
        _check_besselk(_frac(self.alpha), _frac(self.nu))

    def coeffs(self, n, ctx):
        return besselk_coeffs(self.alpha, self.nu, n, ctx)

    def normalization(self, ctx):
        return besselk_normalization(self.alpha, self.nu, ctx)

    def has_moments(self, j):
        return j in (1, 2)

    def _moment(self, j, n, ctx):
        a = _frac(self.alpha)
        v = _frac(self.nu) + (j - 1)
        return gamma(n + a + v + 1, ctx) * gamma(n + a + 1, ctx)

    def descriptor(self):
        return {"kind": self.kind, "alpha": self.alpha, "nu": self.nu}


@dataclass(frozen=True)
class BesselI(WeightSystem):
    """Weights ``(omega_{nu,c}, omega_{nu+1,c})`` on ``(0, inf)``; ``nu > -1``, ``c > 0``."""

    nu: str = "0"
    c: str = "1"
    kind = "besselI"

    def __post_init__(self):
        object.__setattr__(self, "nu", _canonical(self.nu))
        object.__setattr__(self, "c", _canonical(self.c))
        _check_besseli(_frac(self.nu), _frac(self.c))

    def coeffs(self, n, ctx):
        return besseli_coeffs(self.nu, self.c, n, ctx)

    def normalization(self, ctx):
        return besseli_normalization(self.nu, self.c, ctx)

    def has_moments(self, j):
        return j in (1, 2)

    def _moment(self, j, n, ctx):
        return _besseli_moment(_frac(self.nu) + (j - 1), _frac(self.c), n, ctx)

    def descriptor(self):
        return {"kind": self.kind, "nu": self.nu, "c": self.c}


@dataclass(frozen=True)
class CustomStepline(WeightSystem):
    """A system given by explicit tables of decimal strings.

    ``b`` is indexed from 0, ``c`` from 1 and ``d`` from 2.  ``D`` holds
    ``(D11, D21, D22)``.  When ``D`` is absent but both moment tables are, it
    is derived from ``D11 = m1_0``, ``D21 = m2_0``, ``D22 = m2_1 - b_0 m2_0``.
    """

    b: tuple = ()
    c: tuple = ()
    d: tuple = ()
    D: tuple | None = None
    moments1: tuple | None = None
    moments2: tuple | None = None
    name: str = "custom"
    kind = "custom"
    _table: SteplineCoefficients = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        canon = lambda seq: None if seq is None else tuple(_canonical(x) for x in seq)  # noqa: E731
        for attr in ("b", "c", "d", "D", "moments1", "moments2"):
            object.__setattr__(self, attr, canon(getattr(self, attr)))
        if self.D is not None and len(self.D) != 3:
            raise DomainError("D must hold exactly (D11, D21, D22)")
        object.__setattr__(self, "_table", SteplineCoefficients.from_natural(self.b, self.c, self.d))

    @classmethod
    def from_stepline(cls, coeffs: SteplineCoefficients, **kwargs) -> CustomStepline:
        n = len(coeffs)
        return cls(b=coeffs.b, c=coeffs.c[1:n], d=coeffs.d[2:n], **kwargs)

    @classmethod
    def from_json(cls, data: dict, name: str = "custom") -> CustomStepline:
        """Build from the custom-system JSON object (all numbers as decimal strings)."""
        for key in ("b", "c", "d"):
            if key not in data:
                raise IncompleteInputError(f"custom system is missing the {key!r} array")
        D = data.get("D")
        if D is not None:
            try:
                (d11, d12), (d21, d22) = D
            except (TypeError, ValueError):
                raise DomainError("D must be a 2x2 array [[D11, 0], [D21, D22]]") from None
            if Decimal(str(d12)) != 0:
                raise DomainError("D must be lower triangular")
            D = (d11, d21, d22)
        return cls(
            b=tuple(data["b"]),
            c=tuple(data["c"]),
            d=tuple(data["d"]),
            D=D,
            moments1=None if data.get("moments1") is None else tuple(data["moments1"]),
            moments2=None if data.get("moments2") is None else tuple(data["moments2"]),
            name=name,
        )

    @classmethod
    def load(cls, path) -> CustomStepline:
        path = Path(path)
        with path.open() as fh:
            data = json.load(fh, parse_float=str, parse_int=str)
        return cls.from_json(data, name=path.stem)

    def to_json(self) -> dict:
        out = {"b": list(self.b), "c": list(self.c), "d": list(self.d)}
        if self.D is not None:
            out["D"] = [[self.D[0], "0"], [self.D[1], self.D[2]]]
        if self.moments1 is not None:
            out["moments1"] = list(self.moments1)
        if self.moments2 is not None:
            out["moments2"] = list(self.moments2)
        return out

    def coeffs(self, n, ctx):
        return tuple(ctx.real(x) for x in self._table[n])

    def normalization(self, ctx):
        if self.D is not None:
            return NormalizationMatrix(*(ctx.real(x) for x in self.D))
        if self.has_moments(1) and self.has_moments(2):
            m2_0 = self.moment(2, 0, ctx)
            b0 = self.coeffs(0, ctx)[0]
            return NormalizationMatrix(self.moment(1, 0, ctx), m2_0, self.moment(2, 1, ctx) - b0 * m2_0)
        raise IncompleteInputError("custom system supplies neither D nor both moment tables")

    def has_moments(self, j):
        return (self.moments1 if j == 1 else self.moments2) is not None

    def _moment(self, j, n, ctx):
        table = self.moments1 if j == 1 else self.moments2
        if n >= len(table):
            raise IncompleteInputError(f"moment table {j} has no entry for degree {n}")
        return ctx.real(table[n])

    def descriptor(self):
        return {"kind": self.kind, "name": self.name}


def make_system(kind: str, **params) -> WeightSystem:
    """Factory used by the command line: ``kind`` is besselK, besselI or custom."""
    if kind == "besselK":
        return BesselK(params.get("alpha", "0"), params.get("nu", "0"))
    if kind == "besselI":
        return BesselI(params.get("nu", "0"), params.get("c", "1"))
    if kind == "custom":
        if params.get("coeffs") is None:
            raise DomainError("custom systems need a coefficient file")
        return CustomStepline.load(params["coeffs"])
    raise DomainError(f"unknown system kind {kind!r}")
