"""Bohl transformation for ``-u'' + V(x) u = 0`` on a uniform grid.

Solutions carry their derivative alongside (``GridSolution.du``), so
Wronskians ``W[u1, u2] = u1 u2' - u2 u1'`` are evaluated pointwise without
differencing. Second derivatives needed by residuals use the centered
three-point stencil and are NaN at the two endpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import (
    ConjugateDependenceError,
    ConsistencyError,
    DiagonalDegenerateError,
    InvalidInputError,
)

DEFAULT_STEP = 1e-3


@dataclass(frozen=True)
class Grid:
    a: float
    b: float
    N: int

    def __post_init__(self):
        if not self.b > self.a:
            raise InvalidInputError(f"need b > a, got [{self.a}, {self.b}]")
        if int(self.N) != self.N or self.N < 9:
            raise InvalidInputError(f"need at least 9 grid points, got {self.N}")

    @classmethod
    def from_step(cls, a: float, b: float, h: float = DEFAULT_STEP) -> "Grid":
        if not h > 0:
            raise InvalidInputError("step must be positive")
        return cls(float(a), float(b), int(round((b - a) / h)) + 1)

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.N - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.N)

    def index(self, x0: float) -> int:
        """Nearest grid index to ``x0``."""
        if not self.a <= x0 <= self.b:
            raise InvalidInputError(f"{x0} outside [{self.a}, {self.b}]")
        return int(round((x0 - self.a) / self.h))


class ContinuumPotential:
    """Real, continuous ``V(x)``; evaluates elementwise on numpy arrays."""

    def __init__(self, func, kind="custom", **params):
        self._func = func
        self.kind = kind
        self.params = params

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self._func(x), dtype=float), x.shape).copy()

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items() if k != "values")
        return f"ContinuumPotential({self.kind}, {args})"

    @classmethod
    def constant(cls, value):
        return cls(lambda x: np.full_like(x, float(value)), "constant", value=value)

    @classmethod
    def affine(cls, slope, intercept=0.0):
        return cls(lambda x: slope * x + intercept, "affine", slope=slope, intercept=intercept)

    @classmethod
    def power(cls, scale, exponent):
        """``scale * x**exponent`` (keep the grid away from 0 for negative exponents)."""
        return cls(lambda x: scale * x**exponent, "power", scale=scale, exponent=exponent)

    @classmethod
    def samples(cls, xs, values):
        xs = np.asarray(xs, dtype=float)
        values = np.asarray(values, dtype=float)
        if xs.shape != values.shape or xs.size < 2:
            raise InvalidInputError("sample abscissae and values must match (>= 2 points)")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(values))):
            raise InvalidInputError("samples must be finite")
        if np.any(np.diff(xs) <= 0):
            raise InvalidInputError("sample abscissae must be strictly increasing")
        return cls(lambda x: np.interp(x, xs, values), "samples", values=values)


@dataclass(frozen=True)
class GridSolution:
    grid: Grid
    u: np.ndarray
    du: np.ndarray
    potential: ContinuumPotential | None = None

    def conj(self, factor=1.0) -> "GridSolution":
        """``factor * conj(u)``, again a solution when ``V`` is real."""
        return GridSolution(self.grid, factor * np.conj(self.u), factor * np.conj(self.du), self.potential)


@dataclass(frozen=True)
class DiagonalFunction:
    """``Z`` with a continuous phase, ``Z**2 = u1 u2``, and the residual ``J[Z]``."""

    grid: Grid
    Z: np.ndarray
    Z2: np.ndarray
    potential: ContinuumPotential
    J: np.ndarray

    @property
    def j_max(self) -> float:
        return float(np.nanmax(np.abs(self.J)))

    def phase_density(self) -> np.ndarray:
        """``1 / (2 Z^2)``, the integrand of the Bohl exponent."""
        return 1.0 / (2.0 * self.Z**2)

    def exponent(self) -> np.ndarray:
        """Trapezoid ``int_a^x 1/(2 Z^2)`` at every grid point."""
        return cumulative_trapezoid(self.phase_density(), dx=self.grid.h, initial=0.0)


@dataclass(frozen=True)
class BohlBasisContinuum:
    anchor: float
    plus: GridSolution
    minus: GridSolution
    residual_plus: float
    residual_minus: float


@dataclass(frozen=True)
class ComplexCombination:
    """Result of the non-vanishing construction ``u = u1 + i beta u2``."""

    solution: GridSolution
    x0: float
    beta: float
    alpha: complex  # u'(x0) / u(x0)
    wronskian_im_re: float  # W[Im u, Re u], from carried derivatives
    identity_value: float  # -Im(alpha) |u(x0)|^2
    min_modulus: float


@dataclass(frozen=True)
class SpecialAlpha:
    alpha: complex
    arg: float
    k: int  # arg(alpha) = k pi / 4
    oscillatory: bool


@dataclass(frozen=True)
class OscillationResult:
    kind: str  # real-nonoscillatory | finite-phase | infinite-phase | indeterminate
    total_phase: float
    increments: np.ndarray
    ratios: np.ndarray


@dataclass(frozen=True)
class RabResidual:
    residual: float
    l2_mass: float


# ---------------------------------------------------------------------------
# finite differences (kept local; the oracles module has its own copies)
# ---------------------------------------------------------------------------


def _d2(f, h):
    out = np.full(f.shape, np.nan, dtype=np.result_type(f, float))
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h**2
    return out


def _d1(f, h):
    out = np.full(f.shape, np.nan, dtype=np.result_type(f, float))
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    return out


def _relative_sle_residual(V, grid, u) -> float:
    r = -_d2(u, grid.h) + V(grid.x) * u
    return float(np.nanmax(np.abs(r) / np.maximum(1.0, np.abs(u))))


def _cinterp(x, xp, fp):
    fp = np.asarray(fp)
    if np.iscomplexobj(fp):
        return np.interp(x, xp, fp.real) + 1j * np.interp(x, xp, fp.imag)
    return np.interp(x, xp, fp)


# ---------------------------------------------------------------------------
# solutions
# ---------------------------------------------------------------------------


def integrate_sle(V: ContinuumPotential, grid: Grid, u0, du0, from_right: bool = False) -> GridSolution:
    """Classical RK4 for ``(u, u')' = (u', V u)`` on the grid.

    Initial data are taken at ``a`` (or at ``b`` with ``from_right=True``,
    which is the stable direction for a solution decaying to the right).
    """
    x, h = grid.x, grid.h
    vn = V(x).tolist()
    vm = V(x[:-1] + 0.5 * h).tolist()
    n = grid.N
    complex_data = np.iscomplexobj(np.asarray(u0)) or np.iscomplexobj(np.asarray(du0))
    cast = complex if complex_data else float
    u = [cast(0)] * n
    p = [cast(0)] * n
    if from_right:
        order, dt = range(n - 1, 0, -1), -h
        u[-1], p[-1] = cast(u0), cast(du0)
    else:
        order, dt = range(0, n - 1), h
        u[0], p[0] = cast(u0), cast(du0)
    half, sixth = 0.5 * dt, dt / 6.0
    for k in order:
        j = k - 1 if from_right else k + 1
        mid = vm[min(k, j)]
        uk, pk = u[k], p[k]
        k1u, k1p = pk, vn[k] * uk
        k2u, k2p = pk + half * k1p, mid * (uk + half * k1u)
        k3u, k3p = pk + half * k2p, mid * (uk + half * k2u)
        k4u, k4p = pk + dt * k3p, vn[j] * (uk + dt * k3u)
        u[j] = uk + sixth * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        p[j] = pk + sixth * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    u, p = np.array(u), np.array(p)
    return GridSolution(grid, u, p, V)


def wronskian_grid(u1: GridSolution, u2: GridSolution, rtol: float = 1e-8):
    """``u1 u2' - u2 u1'``; raises if it is not constant along the grid."""
    if u1.grid != u2.grid:
        raise InvalidInputError("solutions live on different grids")
    W = u1.u * u2.du - u2.u * u1.du
    scale = float(np.max(np.abs(u1.u * u2.du) + np.abs(u2.u * u1.du)))
    drift = float(np.max(np.abs(W - W[0])))
    if drift > rtol * max(float(np.max(np.abs(W))), 1e-8 * scale):
        raise ConsistencyError(f"Wronskian drifts by {drift:.3e} along the grid")
    return W[0]


def nonvanishing_combination(u1: GridSolution, u2: GridSolution, x0: float, beta: float = 1.0) -> ComplexCombination:
    """Complex solution ``u1 + i beta u2`` that has no zero on the grid.

    ``u1`` and ``u2`` are real independent solutions. The point ``x0`` is
    snapped to the nearest grid node; both solutions must be nonzero there
    and ``u'/u`` must be non-real.
    """
    grid = u1.grid
    k = grid.index(x0)
    x0 = float(grid.x[k])
    for name, s in (("u1", u1), ("u2", u2)):
        if np.iscomplexobj(s.u) and np.any(s.u.imag != 0):
            raise InvalidInputError(f"{name} must be real-valued")
    a1, a2 = float(np.real(u1.u[k])), float(np.real(u2.u[k]))
    scale = max(np.max(np.abs(u1.u)), np.max(np.abs(u2.u)))
    if abs(a1) <= 1e-10 * scale or abs(a2) <= 1e-10 * scale or beta == 0:
        both = np.minimum(np.abs(u1.u), np.abs(u2.u)).real
        # nearest node where both are comfortably nonzero
        ok = np.flatnonzero(both > 1e-3 * scale)
        hint = float(grid.x[ok[np.argmin(np.abs(ok - k))]]) if ok.size else None
        raise InvalidInputError(
            f"Re u(x0) Im u(x0) = 0 at x0={x0:g}; retry with x0={hint:g}"
            if hint is not None
            else f"Re u(x0) Im u(x0) = 0 at x0={x0:g} and no better point exists"
        )
    u = u1.u.real + 1j * beta * u2.u.real
    du = u1.du.real + 1j * beta * u2.du.real
    alpha = complex(du[k] / u[k])
    if abs(alpha.imag) <= 1e-12 * max(1.0, abs(alpha)):
        raise InvalidInputError("u'(x0)/u(x0) is real: u1 and u2 are dependent")
    W = u.imag * du.real - u.real * du.imag  # W[Im u, Re u]
    ident = -alpha.imag * abs(u[k]) ** 2
    min_mod = float(np.min(np.abs(u)))
    if not min_mod > 0:
        raise ConsistencyError("combination vanishes on the grid")
    sol = GridSolution(grid, u, du, u1.potential)
    return ComplexCombination(sol, x0, beta, alpha, float(np.mean(W)), float(ident), min_mod)


def diagonal_function(u1: GridSolution, u2: GridSolution, V: ContinuumPotential | None = None) -> DiagonalFunction:
    """``Z = (u1 u2)^{1/2}`` for a pair with ``W[u1, u2] = 1``.

    The phase of ``Z`` is unwrapped from the principal value at ``a`` so that
    it is continuous. ``J[Z] = -Z'' + V Z - 1/(4 Z^3)`` is evaluated on the
    interior as a diagnostic.
    """
    V = V or u1.potential
    if V is None:
        raise InvalidInputError("no potential attached to the solutions")
    W = wronskian_grid(u1, u2)
    if abs(W - 1.0) > 1e-8:
        raise InvalidInputError(f"basis must satisfy W[u1, u2] = 1, got {W}")
    Z2 = u1.u * u2.u
    if np.min(np.abs(Z2)) < 1e-12:
        x = float(u1.grid.x[np.argmin(np.abs(Z2))])
        raise DiagonalDegenerateError(f"u1 u2 vanishes near x={x:g}")
    theta = np.unwrap(np.angle(Z2))
    Z = np.sqrt(np.abs(Z2)) * np.exp(0.5j * theta)
    grid = u1.grid
    J = -_d2(Z, grid.h) + V(grid.x) * Z - 1.0 / (4.0 * Z**3)
    return DiagonalFunction(grid, Z, np.asarray(Z2, dtype=complex), V, J)


def bohl_basis(Z: DiagonalFunction, x0: float | None = None) -> BohlBasisContinuum:
    """``phi_pm = Z exp(+-int_{x0}^x 1/(2 Z^2))`` with trapezoid quadrature.

    Derivatives are carried as ``phi' = (Z'/Z +- 1/(2 Z^2)) phi``. The
    relative SLE residuals ``max |-phi'' + V phi| / max(1, |phi|)`` are
    returned alongside.
    """
    grid = Z.grid
    x0 = grid.a if x0 is None else float(x0)
    F = Z.exponent()
    F = F - _cinterp(x0, grid.x, F)
    dZ = np.gradient(Z.Z, grid.h, edge_order=2)
    rho = Z.phase_density()
    sols = []
    for sgn in (1.0, -1.0):
        phi = Z.Z * np.exp(sgn * F)
        dphi = (dZ / Z.Z + sgn * rho) * phi
        sols.append(GridSolution(grid, phi, dphi, Z.potential))
    plus, minus = sols
    return BohlBasisContinuum(
        anchor=x0,
        plus=plus,
        minus=minus,
        residual_plus=_relative_sle_residual(Z.potential, grid, plus.u),
        residual_minus=_relative_sle_residual(Z.potential, grid, minus.u),
    )


def green_function(Z: DiagonalFunction, x, y):
    """``G(x, y) = Z(x) Z(y) exp(-int_{min}^{max} 1/(2 Z^2))``; vectorised, linear interpolation off-grid."""
    grid = Z.grid
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any((x < grid.a) | (x > grid.b) | (y < grid.a) | (y > grid.b)):
        raise InvalidInputError("Green function arguments outside the grid")
    F = Z.exponent()
    Zx, Zy = _cinterp(x, grid.x, Z.Z), _cinterp(y, grid.x, Z.Z)
    Fx, Fy = _cinterp(x, grid.x, F), _cinterp(y, grid.x, F)
    # F is complex in general, so order the endpoints by x, not by |F|
    G = Zx * Zy * np.exp(-np.where(x >= y, Fx - Fy, Fy - Fx))
    return G[()] if G.ndim == 0 else G


def green_derivative_jump(Z: DiagonalFunction, y: float) -> complex:
    """``d/dx G(x, y)`` at ``x = y+`` minus at ``x = y-``, from one-sided differences."""
    grid = Z.grid
    j = grid.index(y)
    if not 1 <= j <= grid.N - 2:
        raise InvalidInputError("y must have a grid neighbour on each side")
    yj, h = grid.x[j], grid.h
    g0, gp, gm = (green_function(Z, xx, yj) for xx in (yj, grid.x[j + 1], grid.x[j - 1]))
    return (gp - g0) / h - (g0 - gm) / h


# ---------------------------------------------------------------------------
# the conjugate construction and oscillation
# ---------------------------------------------------------------------------


def special_alpha(u: GridSolution) -> SpecialAlpha:
    """``alpha`` with ``W[u, alpha^2 conj(u)] = 1``, principal square root.

    ``W[u, conj(u)]`` is purely imaginary for real ``V``, so ``arg(alpha)``
    lands on an odd multiple of ``pi/4``; the assertion below guards the
    ``k pi / 4`` lattice to 1e-8.
    """
    w = u.u * np.conj(u.du) - np.conj(u.u) * u.du
    scale = float(np.max(2.0 * np.abs(u.u * u.du)))
    W = complex(np.mean(w))
    if abs(W) <= 1e-10 * max(scale, 1e-300):
        raise ConjugateDependenceError("u is real up to a constant phase; W[u, conj u] = 0")
    alpha = complex(np.sqrt(1.0 / W + 0j))
    arg = math.atan2(alpha.imag, alpha.real)
    k = round(arg / (math.pi / 4))
    if abs(arg - k * math.pi / 4) > 1e-8:
        raise ConsistencyError(f"arg(alpha)={arg} is not a multiple of pi/4")
    return SpecialAlpha(alpha, arg, int(k), oscillatory=bool(k % 2))


def special_diagonal(u: GridSolution) -> DiagonalFunction:
    """Diagonal function ``Z = alpha |u|`` of the pair ``(u, alpha^2 conj(u))``."""
    sa = special_alpha(u)
    return diagonal_function(u, u.conj(sa.alpha**2))


def oscillation_classify(Z: DiagonalFunction, tail_start: float | None = None, windows: int = 4,
                         cutoff: float = 1e-6) -> OscillationResult:
    """Decide whether the phase ``int 1/(2|Z|^2)`` stays finite.

    Real ``Z^2`` (real Green function) is reported as ``real-nonoscillatory``.
    Otherwise the phase is integrated over doubling windows
    ``[t + T/2^{j+1}, t + T/2^j]`` that end at ``b``. The tail is
    ``finite-phase`` when the last increment is below ``cutoff`` or the
    increments shrink geometrically (every ratio <= 0.8), ``infinite-phase``
    when every ratio is >= 1.25, and ``indeterminate`` otherwise, e.g. for
    logarithmic growth.
    """
    grid = Z.grid
    rho = 1.0 / (2.0 * np.abs(Z.Z) ** 2)
    x = grid.x
    cum = cumulative_trapezoid(rho, dx=grid.h, initial=0.0)
    total = float(cum[-1])
    z2 = Z.Z2
    if np.max(np.abs(z2.imag)) <= 1e-10 * np.max(np.abs(z2)):
        return OscillationResult("real-nonoscillatory", total, np.array([]), np.array([]))
    t = grid.a if tail_start is None else float(tail_start)
    T = grid.b - t
    edges = [t + T / 2.0**j for j in range(windows, -1, -1)]
    F = np.interp(edges, x, cum)
    inc = np.diff(F)
    ratios = inc[1:] / inc[:-1]
    if inc[-1] < cutoff or np.all(ratios <= 0.8):
        kind = "finite-phase"
    elif np.all(ratios >= 1.25):
        kind = "infinite-phase"
    else:
        kind = "indeterminate"
    return OscillationResult(kind, total, inc, ratios)


def rab_residual(w, V: ContinuumPotential, grid: Grid) -> RabResidual:
    """``max |-w'' + V w + 1/(4 w^3)|`` on the interior, plus the grid L2 mass of ``w``."""
    w = np.asarray(w)
    if np.iscomplexobj(w):
        if np.any(w.imag != 0):
            raise InvalidInputError("w must be real")
        w = w.real
    if w.shape != (grid.N,):
        raise InvalidInputError("w does not match the grid")
    if not np.all(w > 0):
        raise InvalidInputError("w must be strictly positive")
    r = -_d2(w, grid.h) + V(grid.x) * w + 1.0 / (4.0 * w**3)
    mass = float(np.sqrt(np.trapezoid(w**2, dx=grid.h)))
    return RabResidual(float(np.nanmax(np.abs(r))), mass)


# ---------------------------------------------------------------------------
# Darboux factorization
# ---------------------------------------------------------------------------


def darboux_apply(Z: DiagonalFunction, sign: int, f) -> np.ndarray:
    """``D^{+-}[Z] f = f' - (Z'/Z) f -+ f / (2 Z^2)`` with centered differences (NaN at ends)."""
    if sign not in (1, -1):
        raise InvalidInputError("sign must be +1 or -1")
    f = np.asarray(f)
    h = Z.grid.h
    dZ = np.gradient(Z.Z, h, edge_order=2)
    return _d1(f, h) - (dZ / Z.Z) * f - sign * f / (2.0 * Z.Z**2)


def darboux_factorization_residual(Z: DiagonalFunction, f, V: ContinuumPotential | None = None) -> float:
    """``max |(D - 2 d/dx) D f - (-f'' + V f)|`` over both signs of ``D = D^{+-}[Z]``.

    ``f`` must vanish on the two outermost nodes at each end.
    """
    f = np.asarray(f)
    V = V or Z.potential
    if f.shape != (Z.grid.N,):
        raise InvalidInputError("f does not match the grid")
    if np.any(f[:2] != 0) or np.any(f[-2:] != 0):
        raise InvalidInputError("f needs two nodes of zero padding at each end")
    h = Z.grid.h
    target = -_d2(f, h) + V(Z.grid.x) * f
    worst = 0.0
    for sgn in (1, -1):
        g = darboux_apply(Z, sgn, f)
        lhs = darboux_apply(Z, sgn, g) - 2.0 * _d1(g, h)
        worst = max(worst, float(np.nanmax(np.abs(lhs - target))))
    return worst


# ---------------------------------------------------------------------------
# convenience
# ---------------------------------------------------------------------------


def bump(grid: Grid, center: float, width: float) -> np.ndarray:
    """Smooth compactly supported ``exp(-1/(1-s^2))``, ``s = (x - center)/width``."""
    s = (grid.x - center) / width
    out = np.zeros(grid.N)
    inside = np.abs(s) < 1
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


def positive_pair(V: ContinuumPotential, grid: Grid):
    """Positive basis for ``V > 0``: decaying from ``b`` and growing from ``a``, ``W = 1``."""
    va, vb = float(V(grid.a)), float(V(grid.b))
    if np.min(V(grid.x)) <= 0:
        raise InvalidInputError("positive_pair needs V > 0 on the grid")
    u1 = integrate_sle(V, grid, 1.0, -math.sqrt(vb), from_right=True)
    u2 = integrate_sle(V, grid, 1.0, math.sqrt(va))
    W = wronskian_grid(u1, u2)
    return u1, GridSolution(grid, u2.u / W, u2.du / W, V)


def diagonal_for_potential(V: ContinuumPotential, grid: Grid) -> DiagonalFunction:
    """A usable diagonal function for any ``V``.

    ``V > 0``: the real positive pair from :func:`positive_pair`. Otherwise
    the conjugate construction on ``u = c + i s`` where ``c, s`` are the
    solutions with unit Cauchy data at ``a``.
    """
    if np.min(V(grid.x)) > 0:
        return diagonal_function(*positive_pair(V, grid))
    return special_diagonal(conjugate_seed(V, grid))


def conjugate_seed(V: ContinuumPotential, grid: Grid) -> GridSolution:
    """``u = c + i s`` with ``c(a) = 1, c'(a) = 0`` and ``s(a) = 0, s'(a) = 1``."""
    c = integrate_sle(V, grid, 1.0, 0.0)
    s = integrate_sle(V, grid, 0.0, 1.0)
    return GridSolution(grid, c.u + 1j * s.u, c.du + 1j * s.du, V)
