"""Banded Hessenberg matrix, type II polynomials and certified eigenpairs.

The eigenvalues of ``H_N`` are the zeros of the stepline polynomial ``P_N``.
They are located in stages, each tried only when the previous one fails its
reality/separation checks:

1. double-precision LAPACK eigenvalues of ``H_N`` (balanced by ``geev``),
   polished by Newton's method on ``P_N`` at working precision;
2. Aberth-Ehrlich iteration in complex double precision, with ``P_N/P_N'``
   evaluated by a rescaled recurrence so magnitudes cannot overflow, again
   followed by Newton polishing;
3. Aberth-Ehrlich iteration at full working precision.

Right eigenvectors are ``(P_0(x), ..., P_{N-1}(x))``.  Left eigenvectors come
from running the type I recurrence backwards from ``u_{N+1} = u_{N+2} = 0``,
``u_N = 1``; the one equation left unused measures how well ``x`` is an
eigenvalue.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MultiplicityError, RealityError, ResidualError
from .precision import PrecisionContext
from .systems import SteplineCoefficients, WeightSystem

log = logging.getLogger(__name__)

#: residual certificate: ``|H v - x v| <= 10**(-digits + RESIDUAL_OFFSET) max(1,|x|) |v|``
RESIDUAL_OFFSET = 10
#: Newton acceptance: ``|P_N / P_N'| < 10**(-digits + NEWTON_OFFSET) max(1,|x|)``
NEWTON_OFFSET = 5


@dataclass(frozen=True)
class BandedHessenberg:
    """``N x N`` matrix with diagonal ``b``, subdiagonals ``c`` and ``d``, unit superdiagonal.

    Row ``i`` (0-based) reads ``d[i] c[i] b[i] 1``: ``H[i, i-2] = d_i``,
    ``H[i, i-1] = c_i``, ``H[i, i] = b_i``, ``H[i, i+1] = 1``.
    """

    coeffs: SteplineCoefficients

    @property
    def N(self) -> int:
        return len(self.coeffs)

    @property
    def b(self):
        return self.coeffs.b

    @property
    def c(self):
        return self.coeffs.c

    @property
    def d(self):
        return self.coeffs.d

    def entry(self, i: int, j: int):
        if j == i + 1:
            return 1
        if j == i:
            return self.b[i]
        if j == i - 1:
            return self.c[i]
        if j == i - 2:
            return self.d[i]
        return 0

    def dense(self):
        """Full matrix as a list of rows."""
        return [[self.entry(i, j) for j in range(self.N)] for i in range(self.N)]

    def to_numpy(self) -> np.ndarray:
        N = self.N
        H = np.zeros((N, N))
        for i in range(N):
            H[i, i] = float(self.b[i])
            if i + 1 < N:
                H[i, i + 1] = 1.0
            if i >= 1:
                H[i, i - 1] = float(self.c[i])
            if i >= 2:
                H[i, i - 2] = float(self.d[i])
        return H

    def matvec(self, v):
        N = self.N
        out = []
        for i in range(N):
            s = self.b[i] * v[i]
            if i + 1 < N:
                s += v[i + 1]
            if i >= 1:
                s += self.c[i] * v[i - 1]
            if i >= 2:
                s += self.d[i] * v[i - 2]
            out.append(s)
        return out

    def vecmat(self, u):
        """Row vector times matrix, ``u^T H``."""
        N = self.N
        out = []
        for j in range(N):
            s = u[j] * self.b[j]
            if j >= 1:
                s += u[j - 1]
            if j + 1 < N:
                s += u[j + 1] * self.c[j + 1]
            if j + 2 < N:
                s += u[j + 2] * self.d[j + 2]
            out.append(s)
        return out


@dataclass(frozen=True)
class EigenPair:
    """One node with its right and left eigenvectors and residual certificates."""

    node: object
    right: tuple
    left: tuple
    right_residual: object
    left_residual: object
    newton_residual: object


def build_hessenberg(system: WeightSystem, N: int, ctx: PrecisionContext) -> BandedHessenberg:
    if N < 1:
        raise DomainError("N must be >= 1")
    return BandedHessenberg(system.stepline(N, ctx))


# ---------------------------------------------------------------------------
# type II polynomials


def _recurrence(coeffs: SteplineCoefficients, n: int, x, zero, one):
    """Yield ``(P_k(x), P_k'(x))`` for ``k = 0 .. n``."""
    p2 = p1 = zero
    q2 = q1 = zero
    p, q = one, zero
    yield p, q
    for k in range(n):
        b, c, d = coeffs[k]
        t = x - b
        p_next = t * p - c * p1 - d * p2
        q_next = p + t * q - c * q1 - d * q2
        p2, p1, p = p1, p, p_next
        q2, q1, q = q1, q, q_next
        yield p, q


def _eval(coeffs: SteplineCoefficients, n: int, x, ctx: PrecisionContext):
    mp = ctx.mp
    for value in _recurrence(coeffs, n, x, mp.zero, mp.one):
        pass
    return value


def eval_typeII(system: WeightSystem, n: int, x, ctx: PrecisionContext):
    """Return ``(P_n(x), P_n'(x))`` by forward recurrence.

    ``x`` may be real or complex.
    """
    if n < 0:
        raise DomainError("degree must be non-negative")
    x = ctx.mp.convert(x)
    coeffs = system.stepline(n, ctx) if n else None
    if n == 0:
        return ctx.mp.one, ctx.mp.zero
    return _eval(coeffs, n, x, ctx)


def typeII_values(system: WeightSystem, n: int, x, ctx: PrecisionContext):
    """``[P_0(x), ..., P_n(x)]``."""
    x = ctx.mp.convert(x)
    coeffs = system.stepline(n, ctx) if n else SteplineCoefficients((), (), ())
    return [p for p, _ in _recurrence(coeffs, n, x, ctx.mp.zero, ctx.mp.one)]


# ---------------------------------------------------------------------------
# eigenvalues


def _newton(coeffs, N, x, ctx):
    """Polish one real root of ``P_N``; returns ``(x, |P/P'|)`` or ``None`` on failure."""
    mp = ctx.mp
    stop = mp.mpf(10) ** (3 - ctx.dps)
    last = None
    for _ in range(200):
        p, dp = _eval(coeffs, N, x, ctx)
        if dp == 0:
            return None
        step = p / dp
        x -= step
        size = abs(step) / max(1, abs(x))
        if size <= stop:
            break
        if last is not None and size >= last and size < mp.mpf(10) ** (-ctx.dps // 2):
            # rounding floor reached
            break
        last = size
    else:
        return None
    p, dp = _eval(coeffs, N, x, ctx)
    return x, abs(p / dp) if dp else mp.inf


def _accept(roots, ctx):
    """Sort polished roots and check Newton residuals and separation."""
    if any(r is None for r in roots):
        return None
    roots = sorted(roots, key=lambda r: r[0])
    newton_tol = ctx.tol(NEWTON_OFFSET)
    for x, res in roots:
        if not res < newton_tol * max(1, abs(x)):
            return None
    sep = ctx.mp.mpf(10) ** (-(ctx.digits // 2))
    for (x0, _), (x1, _) in zip(roots, roots[1:]):
        if x1 - x0 <= sep * max(1, abs(x0), abs(x1)):
            return None
    return roots


def _scaled_ratio(B, C, D, z):
    """Vectorised ``P_N(z) / P_N'(z)`` with per-step rescaling."""
    p2 = np.zeros_like(z)
    p1 = np.zeros_like(z)
    p = np.ones_like(z)
    q2 = np.zeros_like(z)
    q1 = np.zeros_like(z)
    q = np.zeros_like(z)
    for k in range(len(B)):
        t = z - B[k]
        p_next = t * p - C[k] * p1 - D[k] * p2
        q_next = p + t * q - C[k] * q1 - D[k] * q2
        s = np.maximum(np.abs(p_next), np.abs(q_next))
        s[s == 0] = 1.0
        p2, p1, p = p1 / s, p / s, p_next / s
        q2, q1, q = q1 / s, q / s, q_next / s
    with np.errstate(divide="ignore", invalid="ignore"):
        return p / q


def _aberth_double(H: BandedHessenberg, z0: np.ndarray, maxiter: int = 500) -> np.ndarray:
    B = np.array([float(x) for x in H.b])
    C = np.array([float(x) for x in H.c])
    D = np.array([float(x) for x in H.d])
    if not (np.all(np.isfinite(B)) and np.all(np.isfinite(C)) and np.all(np.isfinite(D))):
        raise FloatingPointError("coefficients exceed double range")
    z = z0.astype(complex)
    N = len(z)
    for _ in range(maxiter):
        r = _scaled_ratio(B, C, D, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        w = r / (1.0 - r * inv.sum(axis=1))
        if not np.all(np.isfinite(w)):
            raise FloatingPointError("Aberth iteration broke down")
        z = z - w
        if N == 1 or np.max(np.abs(w) / np.maximum(1.0, np.abs(z))) < 1e-14:
            break
    return z


def _aberth_full(H: BandedHessenberg, z0, ctx: PrecisionContext, maxiter: int = 300):
    mp = ctx.mp
    N = H.N
    z = [mp.mpc(complex(w)) for w in z0]
    tol = mp.mpf(10) ** (5 - ctx.dps)
    for _ in range(maxiter):
        worst = mp.zero
        for i in range(N):
            p, dp = _eval(H.coeffs, N, z[i], ctx)
            r = p / dp
            s = mp.fsum(1 / (z[i] - z[j]) for j in range(N) if j != i)
            w = r / (1 - r * s)
            z[i] -= w
            worst = max(worst, abs(w) / max(1, abs(z[i])))
        if worst < tol:
            break
    return z


def _initial_guesses(H: BandedHessenberg, seeds):
    if seeds is not None and np.all(np.isfinite(seeds)):
        z = np.asarray(seeds, dtype=complex)
    else:
        # Gershgorin radius on a circle
        R = max(
            abs(float(H.b[i])) + abs(float(H.c[i])) + abs(float(H.d[i])) + 1.0 for i in range(H.N)
        )
        angles = 2 * np.pi * (np.arange(H.N) + 0.25) / H.N
        z = R * np.exp(1j * angles)
    # break conjugate symmetry so real pairs can separate
    return z + 1e-3j * (np.abs(z) + 1.0)


def _eigen_nodes_with_residuals(H: BandedHessenberg, ctx: PrecisionContext):
    N = H.N
    coeffs = H.coeffs
    mp = ctx.mp

    seeds = None
    try:
        seeds = np.linalg.eigvals(H.to_numpy())
    except (np.linalg.LinAlgError, ValueError, OverflowError):
        log.debug("double-precision eigenvalues unavailable for N=%d", N)

    if seeds is not None and np.all(np.isfinite(seeds)):
        if np.all(np.abs(seeds.imag) <= 1e-8 * np.maximum(1.0, np.abs(seeds))):
            roots = _accept([_newton(coeffs, N, mp.mpf(float(s.real)), ctx) for s in seeds], ctx)
            if roots is not None:
                return roots
        log.debug("N=%d: LAPACK seeds rejected, trying double Aberth", N)

    z0 = _initial_guesses(H, seeds)
    try:
        z = _aberth_double(H, z0)
    except FloatingPointError:
        z = None
    if z is not None:
        if np.all(np.abs(z.imag) <= 1e-6 * np.maximum(1.0, np.abs(z))):
            roots = _accept([_newton(coeffs, N, mp.mpf(float(w.real)), ctx) for w in z], ctx)
            if roots is not None:
                return roots
        z0 = z
    log.debug("N=%d: falling back to full-precision Aberth", N)

    zs = _aberth_full(H, z0, ctx)
    imag_tol = mp.mpf(10) ** (-(ctx.digits // 2))
    for w in zs:
        if abs(w.imag) > imag_tol * max(1, abs(w)):
            raise RealityError(
                f"eigenvalue {mp.nstr(w, 15)} of H_{N} is not real at {ctx.digits} digits; "
                "the system may not be perfect, or try a higher precision"
            )
    polished = [_newton(coeffs, N, w.real, ctx) for w in zs]
    roots = _accept(polished, ctx)
    if roots is None:
        if any(r is None for r in polished):
            raise RealityError(f"Newton polishing failed for H_{N}; try a higher precision")
        raise MultiplicityError(f"H_{N} has eigenvalues that coincide to working precision")
    return roots


def eigen_nodes(system: WeightSystem, N: int, ctx: PrecisionContext):
    """All ``N`` eigenvalues of ``H_N`` (zeros of ``P_N``) in ascending order."""
    H = build_hessenberg(system, N, ctx)
    return [x for x, _ in _eigen_nodes_with_residuals(H, ctx)]


# ---------------------------------------------------------------------------
# eigenvectors


def _max_abs(vec):
    return max(abs(x) for x in vec)


def residual_bound(x, vec, ctx: PrecisionContext):
    return ctx.tol(RESIDUAL_OFFSET) * max(1, abs(x)) * _max_abs(vec)


def right_residual(H: BandedHessenberg, v, x):
    """``max |H v - x v|``."""
    return max(abs(hv - x * vi) for hv, vi in zip(H.matvec(v), v))


def left_residual(H: BandedHessenberg, u, x):
    """``max |u^T H - x u^T|``."""
    return max(abs(uh - x * ui) for uh, ui in zip(H.vecmat(u), u))


def right_eigenvector(system: WeightSystem, node, N: int, ctx: PrecisionContext, check: bool = True):
    """``(P_0(node), ..., P_{N-1}(node))``; first component is 1."""
    v = typeII_values(system, N - 1, node, ctx)
    if check:
        H = build_hessenberg(system, N, ctx)
        if right_residual(H, v, node) > residual_bound(node, v, ctx):
            raise ResidualError(
                f"right eigenvector residual too large at x={ctx.mp.nstr(node, 15)}; try a higher precision"
            )
    return v


def left_eigenvector(H: BandedHessenberg, node, ctx: PrecisionContext, check: bool = True):
    """Left eigenvector normalized by last component 1, via the backward recurrence."""
    mp = ctx.mp
    N = H.N
    node = mp.convert(node)
    u = [mp.zero] * N
    u[N - 1] = mp.one
    # column j of u^T H = x u^T, solved for u[j-1]; entries past N-1 are zero
    for j in range(N - 1, 0, -1):
        s = (node - H.b[j]) * u[j]
        if j + 1 < N:
            s -= H.c[j + 1] * u[j + 1]
        if j + 2 < N:
            s -= H.d[j + 2] * u[j + 2]
        u[j - 1] = s
    if check and left_residual(H, u, node) > residual_bound(node, u, ctx):
        raise ResidualError(
            f"left eigenvector residual too large at x={mp.nstr(node, 15)}; try a higher precision"
        )
    return u


def _pairs_at(system: WeightSystem, N: int, ctx: PrecisionContext):
    """Eigenpairs at fixed precision plus the worst residual/bound ratio."""
    H = build_hessenberg(system, N, ctx)
    pairs, worst = [], 0
    for x, newton_res in _eigen_nodes_with_residuals(H, ctx):
        v = typeII_values(system, N - 1, x, ctx)
        u = left_eigenvector(H, x, ctx, check=False)
        rr, lr = right_residual(H, v, x), left_residual(H, u, x)
        worst = max(worst, rr / residual_bound(x, v, ctx), lr / residual_bound(x, u, ctx))
        pairs.append(EigenPair(x, tuple(v), tuple(u), rr, lr, newton_res))
    return pairs, worst


def certified_eigenpairs(system: WeightSystem, N: int, ctx: PrecisionContext, max_guard: int | None = None):
    """Eigenpairs meeting the residual certificates, and the context that achieved them.

    An ill-conditioned eigenvalue turns the rounding error of the node into a
    left residual far above working precision.  When that happens the guard
    digits are raised by the observed shortfall (at least doubled) and the
    pairs recomputed, up to ``max_guard`` (default ``4 * digits``).
    """
    if max_guard is None:
        max_guard = max(ctx.guard, 4 * ctx.digits)
    while True:
        pairs, worst = _pairs_at(system, N, ctx)
        if worst <= 1:
            return pairs, ctx
        shortfall = int(ctx.mp.ceil(ctx.mp.log10(worst)))
        guard = ctx.guard + max(shortfall + 10, ctx.guard, 10)
        if ctx.guard >= max_guard:
            raise ResidualError(
                f"eigenvector residuals of H_{N} exceed their certificate by 10^{shortfall} "
                f"at {ctx.dps} working digits; try a higher precision"
            )
        log.info("N=%d: residual certificate short by 10^%d, raising guard to %d", N, shortfall, guard)
        ctx = ctx.with_guard(min(guard, max_guard))


def eigenpairs(system: WeightSystem, N: int, ctx: PrecisionContext):
    """Certified :class:`EigenPair` for every node of ``H_N``, ascending.

    Values may carry more guard digits than ``ctx`` asks for; see
    :func:`certified_eigenpairs`.
    """
    return certified_eigenpairs(system, N, ctx)[0]
