"""Simultaneous Gaussian quadrature rules for a pair of measures.

With ``N`` nodes at the zeros of the stepline polynomial ``P_N`` the rules

    sum_k w1[k] f(x[k]) ~ int f dmu_1,      sum_k w2[k] f(x[k]) ~ int f dmu_2

are exact for polynomials of degree up to ``3n - 1`` (both measures) when
``N = 2n``, and up to ``3n + 1`` / ``3n`` when ``N = 2n + 1``.

The weights come from the left eigenvector ``u`` and right eigenvector ``v``
of the Hessenberg matrix at each node:

    w1 = D11 u(1) / <u, v>,     w2 = (D21 u(1) + D22 u(2)) / <u, v>.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

from .errors import DomainError, InnerProductCollapseError, IntegrandError, SingularityError
from .hessenberg import EigenPair, certified_eigenpairs
from .precision import PrecisionContext, cos_fn, exp_neg, parse, serialize
from .systems import NormalizationMatrix, WeightSystem

#: significant digits used when serializing residuals
RESIDUAL_DIGITS = 6


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes (ascending) and the two weight vectors of a simultaneous rule."""

    N: int
    nodes: tuple
    weights1: tuple
    weights2: tuple
    system: dict
    ctx: PrecisionContext
    right_residuals: tuple = ()
    left_residuals: tuple = ()
    newton_residuals: tuple = ()
    pairs: tuple = field(default=(), repr=False, compare=False)

    @property
    def digits(self) -> int:
        return self.ctx.digits

    def to_dict(self) -> dict:
        d = self.digits
        return {
            "system": self.system,
            "N": self.N,
            "digits": d,
            "nodes": [serialize(x, d) for x in self.nodes],
            "weights1": [serialize(x, d) for x in self.weights1],
            "weights2": [serialize(x, d) for x in self.weights2],
            "residuals": {
                "right": [serialize(x, RESIDUAL_DIGITS) for x in self.right_residuals],
                "left": [serialize(x, RESIDUAL_DIGITS) for x in self.left_residuals],
                "newton": [serialize(x, RESIDUAL_DIGITS) for x in self.newton_residuals],
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict, guard: int | None = None) -> QuadratureRule:
        ctx = PrecisionContext(int(data["digits"])) if guard is None else PrecisionContext(int(data["digits"]), guard)
        vec = lambda key: tuple(parse(s, ctx) for s in data[key])  # noqa: E731
        res = data.get("residuals", {})
        rvec = lambda key: tuple(parse(s, ctx) for s in res.get(key, []))  # noqa: E731
        rule = cls(
            N=int(data["N"]),
            nodes=vec("nodes"),
            weights1=vec("weights1"),
            weights2=vec("weights2"),
            system=dict(data["system"]),
            ctx=ctx,
            right_residuals=rvec("right"),
            left_residuals=rvec("left"),
            newton_residuals=rvec("newton"),
        )
        if not (len(rule.nodes) == len(rule.weights1) == len(rule.weights2) == rule.N):
            raise DomainError("rule arrays must all have length N")
        return rule

    @classmethod
    def from_json(cls, text: str, guard: int | None = None) -> QuadratureRule:
        return cls.from_dict(json.loads(text), guard)


def eigen_weights(u, v, D: NormalizationMatrix, ctx: PrecisionContext):
    """Both weights at one node from its left (``u``) and right (``v``) eigenvectors.

    Invariant under rescaling ``u``.
    """
    mp = ctx.mp
    ip = mp.fdot(u, v)
    scale = max(abs(x) for x in u) * max(abs(x) for x in v)
    if abs(ip) <= mp.mpf(10) ** (-ctx.dps) * scale:
        raise InnerProductCollapseError("left/right eigenvector inner product vanishes to working precision")
    u1 = u[0]
    u2 = u[1] if len(u) > 1 else mp.zero
    return D.D11 * u1 / ip, (D.D21 * u1 + D.D22 * u2) / ip


def make_rule(system: WeightSystem, N: int, ctx: PrecisionContext) -> QuadratureRule:
    """Simultaneous Gaussian rule with ``N`` nodes."""
    if N < 1:
        raise DomainError("N must be >= 1")
    pairs, ctx = certified_eigenpairs(system, N, ctx)
    D = system.normalization(ctx)
    w1, w2 = [], []
    for pair in pairs:
        a, b = eigen_weights(pair.left, pair.right, D, ctx)
        w1.append(a)
        w2.append(b)
    return QuadratureRule(
        N=N,
        nodes=tuple(p.node for p in pairs),
        weights1=tuple(w1),
        weights2=tuple(w2),
        system=system.descriptor(),
        ctx=ctx,
        right_residuals=tuple(p.right_residual for p in pairs),
        left_residuals=tuple(p.left_residual for p in pairs),
        newton_residuals=tuple(p.newton_residual for p in pairs),
        pairs=tuple(pairs),
    )


def integrate(rule: QuadratureRule, f: Callable):
    """``(sum w1 f(x), sum w2 f(x))`` accumulated in ascending node order."""
    mp = rule.ctx.mp
    s1 = s2 = mp.zero
    for x, a, b in zip(rule.nodes, rule.weights1, rule.weights2):
        try:
            fx = mp.convert(f(x))
        except Exception as exc:
            raise IntegrandError(f"integrand failed at node {mp.nstr(x, 20)}: {exc}") from exc
        if not mp.isfinite(fx):
            raise IntegrandError(f"integrand is not finite at node {mp.nstr(x, 20)}")
        s1 += a * fx
        s2 += b * fx
    return s1, s2


def named_integrand(name: str, ctx: PrecisionContext) -> Callable:
    """Integrands addressable by name.

    ``one``, ``exp_neg`` (``exp(-x)``), ``cos``, ``power:k`` (``x**k``) and
    ``polycoeffs:a0,a1,...`` (``a0 + a1 x + ...``, decimal coefficients in
    ascending powers).
    """
    mp = ctx.mp
    if name == "one":
        return lambda x: mp.one
    if name == "exp_neg":
        return lambda x: exp_neg(x, ctx)
    if name == "cos":
        return lambda x: cos_fn(x, ctx)
    if name.startswith("power:"):
        try:
            k = int(name[len("power:"):])
        except ValueError:
            raise DomainError(f"bad power integrand {name!r}") from None
        if k < 0:
            raise DomainError("power must be non-negative")
        return lambda x: x**k
    if name.startswith("polycoeffs:"):
        body = name[len("polycoeffs:"):]
        coeffs = [parse(s, ctx) for s in body.split(",") if s.strip()]
        if not coeffs:
            raise DomainError("polycoeffs needs at least one coefficient")
        return lambda x: mp.polyval(coeffs[::-1], x)
    raise DomainError(f"unknown integrand {name!r}")


# ---------------------------------------------------------------------------
# independent weights from moments


def solve_moment_vandermonde(nodes, moments, mp):
    """Solve ``sum_k w_k x_k**i = moments[i]``, ``i = 0 .. N-1``, by Bjorck-Pereyra.

    ``O(N**2)`` operations; the nodes must be distinct.
    """
    n = len(nodes) - 1
    x = list(nodes)
    w = [mp.convert(m) for m in moments]
    for k in range(n):
        for i in range(n, k, -1):
            w[i] -= x[k] * w[i - 1]
    for k in range(n - 1, -1, -1):
        for i in range(k + 1, n + 1):
            h = x[i] - x[i - k - 1]
            if h == 0:
                raise SingularityError("coincident nodes in Vandermonde system")
            w[i] /= h
        for i in range(k, n):
            w[i] -= w[i + 1]
    return w


def weights_oracle(nodes, system: WeightSystem, ctx: PrecisionContext):
    """Weights from interpolatory exactness against the moment oracle."""
    N = len(nodes)
    for i in range(N):
        for j in range(i + 1, N):
            if nodes[i] == nodes[j]:
                raise SingularityError("coincident nodes in Vandermonde system")
    mp = ctx.mp
    out = []
    for j in (1, 2):
        moments = [system.moment(j, m, ctx) for m in range(N)]
        out.append(solve_moment_vandermonde([mp.convert(x) for x in nodes], moments, mp))
    return tuple(out)


# ---------------------------------------------------------------------------
# exactness


def claimed_degrees(N: int):
    """Highest degree integrated exactly for each measure with ``N`` nodes."""
    n, odd = divmod(N, 2)
    return (3 * n + 1, 3 * n) if odd else (3 * n - 1, 3 * n - 1)


@dataclass
class ExactnessReport:
    N: int
    claimed: tuple
    #: measure -> list of (degree, relative error, tolerance, passed)
    rows: dict

    @property
    def passed(self) -> bool:
        return all(ok for rows in self.rows.values() for *_, ok in rows)

    def passed_through(self, j: int) -> int:
        """Largest degree ``m`` such that every degree up to ``m`` passed (-1 if none)."""
        top = -1
        for m, _, _, ok in self.rows[j]:
            if not ok:
                break
            top = m
        return top


def verify_exactness(rule: QuadratureRule, system: WeightSystem, ctx: PrecisionContext | None = None):
    """Compare rule sums of ``x**m`` with the moments for every claimed degree.

    The relative tolerance is ``10**(-digits + 25 + m)``.
    """
    ctx = ctx or rule.ctx
    mp = ctx.mp
    claimed = claimed_degrees(rule.N)
    rows = {}
    for j, weights, top in ((1, rule.weights1, claimed[0]), (2, rule.weights2, claimed[1])):
        out = []
        powers = [mp.one] * rule.N
        for m in range(top + 1):
            if m:
                powers = [p * x for p, x in zip(powers, rule.nodes)]
            approx = mp.fsum(w * p for w, p in zip(weights, powers))
            exact = system.moment(j, m, ctx)
            err = abs(approx - exact) / abs(exact) if exact else abs(approx)
            tol = ctx.tol(25 + m)
            out.append((m, err, tol, bool(err <= tol)))
        rows[j] = out
    return ExactnessReport(rule.N, claimed, rows)


def weight_report(rule: QuadratureRule) -> dict:
    """Sign counts and magnitude ranges of nodes and weights (reported, never asserted)."""
    mp = rule.ctx.mp
    rep = {}
    for name, ws in (("weights1", rule.weights1), ("weights2", rule.weights2)):
        nonzero = [abs(w) for w in ws if w]
        rep[name] = {
            "positive": sum(1 for w in ws if w > 0),
            "negative": sum(1 for w in ws if w < 0),
            "min_log10": mp.nstr(mp.log10(min(nonzero)), 6) if nonzero else None,
            "max_log10": mp.nstr(mp.log10(max(nonzero)), 6) if nonzero else None,
        }
    rep["nodes"] = {"min": mp.nstr(rule.nodes[0], 10), "max": mp.nstr(rule.nodes[-1], 10)}
    return rep


__all__ = [
    "EigenPair",
    "ExactnessReport",
    "QuadratureRule",
    "claimed_degrees",
    "integrate",
    "make_rule",
    "named_integrand",
    "solve_moment_vandermonde",
    "eigen_weights",
    "verify_exactness",
    "weight_report",
    "weights_oracle",
]
