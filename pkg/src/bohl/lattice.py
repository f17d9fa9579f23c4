"""Discrete Schrodinger equations ``(-Delta + V) u = 0`` on a finite lattice window.

Conventions
-----------
* ``(Delta f)_n = f_{n+1} + f_{n-1} - 2 f_n``, so a solution obeys
  ``u_{n+1} = (2 + V_n) u_n - u_{n-1}``.
* ``W[u1, u2] = u1_n u2_{n+1} - u1_{n+1} u2_n``.
* Every sequence is a numpy array whose position ``k`` holds lattice index
  ``window.n_lo + k``.

The positive pipeline is::

    psi_plus, psi_minus = positive_basis(V)
    G = build_green_matrix(psi_minus, psi_plus)
    z = diagonal_sequence(G)
    basis = bohl_reconstruct(z, anchor)
    V_rec = potential_from_diagonal(z)      # equals V on the interior
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConsistencyError,
    DependentSolutionsError,
    DiagonalDegenerateError,
    HypothesisError,
    InvalidInputError,
    PositivityError,
)

ALGEBRAIC_TOL = 1e-12
RECURRENCE_TOL = 1e-10
ROUNDTRIP_TOL = 1e-8


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeWindow:
    """Inclusive integer range ``n_lo <= n <= n_hi`` with at least one interior point."""

    n_lo: int
    n_hi: int

    def __post_init__(self):
        if int(self.n_lo) != self.n_lo or int(self.n_hi) != self.n_hi:
            raise InvalidInputError("window bounds must be integers")
        if self.n_hi < self.n_lo + 2:
            raise InvalidInputError(
                f"window [{self.n_lo}, {self.n_hi}] is too short; need n_hi >= n_lo + 2"
            )

    @property
    def size(self) -> int:
        return self.n_hi - self.n_lo + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.n_lo, self.n_hi + 1)

    @property
    def interior(self) -> np.ndarray:
        return np.arange(self.n_lo + 1, self.n_hi)

    def __contains__(self, n) -> bool:
        return self.n_lo <= n <= self.n_hi

    def pos(self, n: int) -> int:
        """Array position of lattice index ``n``."""
        if n not in self:
            raise InvalidInputError(f"index {n} outside window [{self.n_lo}, {self.n_hi}]")
        return n - self.n_lo


def _as_window(window) -> LatticeWindow:
    if isinstance(window, LatticeWindow):
        return window
    lo, hi = window
    return LatticeWindow(int(lo), int(hi))


@dataclass(frozen=True)
class LatticePotential:
    """Real potential ``V_n`` on a lattice window."""

    window: LatticeWindow
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "window", _as_window(self.window))
        v = np.asarray(self.values)
        if np.iscomplexobj(v):
            if np.any(v.imag != 0):
                raise InvalidInputError("potential must be real-valued")
            v = v.real
        v = np.array(v, dtype=float)
        if v.shape != (self.window.size,):
            raise InvalidInputError(
                f"potential has {v.size} values but window holds {self.window.size}"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("potential has non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, c: float, n_lo: int, n_hi: int) -> "LatticePotential":
        w = LatticeWindow(n_lo, n_hi)
        return cls(w, np.full(w.size, float(c)))

    @classmethod
    def from_function(cls, func, n_lo: int, n_hi: int) -> "LatticePotential":
        w = LatticeWindow(n_lo, n_hi)
        return cls(w, np.asarray(func(w.indices), dtype=float))

    def __getitem__(self, n: int) -> float:
        return self.values[self.window.pos(n)]


@dataclass(frozen=True)
class LatticeSolution:
    """Complex (or real) sequence on a window; ``verified`` marks a checked recurrence."""

    window: LatticeWindow
    values: np.ndarray
    verified: bool = False

    def __post_init__(self):
        object.__setattr__(self, "window", _as_window(self.window))
        u = np.asarray(self.values)
        if u.shape != (self.window.size,):
            raise InvalidInputError(
                f"solution has {u.size} values but window holds {self.window.size}"
            )

    def __getitem__(self, n: int):
        return self.values[self.window.pos(n)]


@dataclass(frozen=True)
class GreenMatrix:
    """Matrix ``G[m, n]`` over a window; position ``(i, j)`` holds ``G_{n_lo+i, n_lo+j}``."""

    window: LatticeWindow
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "window", _as_window(self.window))
        size = self.window.size
        if np.shape(self.entries) != (size, size):
            raise InvalidInputError("Green matrix shape does not match window")

    @property
    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.entries).copy()

    def __call__(self, m: int, n: int):
        return self.entries[self.window.pos(m), self.window.pos(n)]


@dataclass(frozen=True)
class DiagonalSequence:
    """``z_n`` with ``z_n**2 = G_nn``; ``positive`` means real, strictly positive roots."""

    window: LatticeWindow
    z: np.ndarray
    positive: bool


@dataclass(frozen=True)
class SFactorSequence:
    """Growth ratios ``S_n`` for ``n_lo + 1 <= n <= n_hi`` (``values[k]`` is ``S_{n_lo+1+k}``)."""

    window: LatticeWindow
    values: np.ndarray
    positive: bool

    def __getitem__(self, n: int):
        if not self.window.n_lo < n <= self.window.n_hi:
            raise InvalidInputError(f"S_n is defined for n_lo < n <= n_hi, got {n}")
        return self.values[n - self.window.n_lo - 1]


@dataclass(frozen=True)
class BohlBasisDiscrete:
    anchor: int
    plus: LatticeSolution
    minus: LatticeSolution
    s: SFactorSequence


@dataclass(frozen=True)
class BoundCheck:
    """One index of the Green-diagonal and S-factor comparison with ``1/(V_n+2)``."""

    n: int
    g_lower: float
    g: float
    g_upper: float
    g_ok: bool
    s_lower: float
    s: float
    s_upper: float
    s_ok: bool


@dataclass(frozen=True)
class AgmonReport:
    C: float
    K_A: float
    checks: list
    # d_A(n_lo, n) for every n in the window, by variant
    distances: dict = field(default_factory=dict)

    @property
    def all_ok(self) -> bool:
        return all(c.g_ok and c.s_ok for c in self.checks)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _residual(v: np.ndarray, u: np.ndarray) -> float:
    r = u[2:] + u[:-2] - (2.0 + v[1:-1]) * u[1:-1]
    scale = np.maximum(1.0, np.abs(u[1:-1]))
    return float(np.max(np.abs(r) / scale))


def _require_finite(u: np.ndarray, w: LatticeWindow):
    if not np.all(np.isfinite(u)):
        raise InvalidInputError(
            f"recurrence overflowed double precision on {w}; use a shorter window"
        )


def _same_window(*objs):
    w = objs[0].window
    for o in objs[1:]:
        if o.window != w:
            raise InvalidInputError(f"window mismatch: {w} vs {o.window}")
    return w


# ---------------------------------------------------------------------------
# recurrences and Wronskians
# ---------------------------------------------------------------------------


def solve_three_term(V: LatticePotential, u_lo, u_lo_plus_1) -> LatticeSolution:
    """Forward recurrence ``u_{n+1} = (2 + V_n) u_n - u_{n-1}`` from two seed values."""
    w = V.window
    dtype = np.result_type(u_lo, u_lo_plus_1, float)
    u = np.empty(w.size, dtype=dtype)
    u[0], u[1] = u_lo, u_lo_plus_1
    c = 2.0 + V.values
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, w.size - 1):
            u[k + 1] = c[k] * u[k] - u[k - 1]
    _require_finite(u, w)
    if _residual(V.values, u) > ALGEBRAIC_TOL:
        raise ConsistencyError("forward recurrence residual exceeds 1e-12 (overflow?)")
    return LatticeSolution(w, u, verified=True)


def _solve_backward(V: LatticePotential, u_hi, u_hi_minus_1) -> np.ndarray:
    w = V.window
    u = np.empty(w.size, dtype=np.result_type(u_hi, u_hi_minus_1, float))
    u[-1], u[-2] = u_hi, u_hi_minus_1
    c = 2.0 + V.values
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(w.size - 2, 0, -1):
            u[k - 1] = c[k] * u[k] - u[k + 1]
    _require_finite(u, w)
    return u


def wronskian_sequence(u1: LatticeSolution, u2: LatticeSolution) -> np.ndarray:
    """``W_n = u1_n u2_{n+1} - u1_{n+1} u2_n`` for ``n_lo <= n < n_hi``."""
    _same_window(u1, u2)
    a, b = u1.values, u2.values
    return a[:-1] * b[1:] - a[1:] * b[:-1]


def wronskian_discrete(u1: LatticeSolution, u2: LatticeSolution, rtol: float = RECURRENCE_TOL):
    """Constant Wronskian of two solutions of one equation.

    Raises :class:`ConsistencyError` if ``W_n`` drifts by more than
    ``rtol * max|W|`` across the window, which means the inputs do not solve
    a common equation.
    """
    W = wronskian_sequence(u1, u2)
    a, b = u1.values, u2.values
    # |W| for a genuine pair; the term size (times 1e-6) keeps W ~ 0 from tripping
    terms = np.abs(a[:-1] * b[1:]) + np.abs(a[1:] * b[:-1])
    scale = max(np.max(np.abs(W)), 1e-6 * np.max(terms))
    drift = np.max(np.abs(W - W[0]))
    if drift > rtol * scale:
        raise ConsistencyError(
            f"Wronskian not constant: drift {drift:.3e} vs scale {scale:.3e}"
        )
    return W[0]


def positive_basis(V: LatticePotential):
    """Two positive solutions ``(psi_plus, psi_minus)`` with ``W[psi_minus, psi_plus] = 1``.

    ``psi_plus`` is run forward from a virtual zero at ``n_lo - 1`` and
    ``psi_minus`` backward from a virtual zero at ``n_hi + 1``. With that
    Dirichlet closure the Green matrix built from the pair is exactly the
    inverse of ``-Delta + V`` on the window.
    """
    if np.any(V.values <= -2.0):
        raise HypothesisError(
            "V_n <= -2 somewhere: no positive solution pair; try symmetry_map for V < -4"
        )
    c = 2.0 + V.values
    plus = solve_three_term(V, 1.0, c[0]).values
    minus = _solve_backward(V, 1.0, c[-1])
    for name, u in (("psi_plus", plus), ("psi_minus", minus)):
        if np.any(u <= 0):
            bad = V.window.n_lo + int(np.argmax(u <= 0))
            raise PositivityError(f"{name} changes sign at n={bad}; window is not disconjugate")
    if _residual(V.values, minus) > ALGEBRAIC_TOL:
        raise ConsistencyError("backward recurrence residual exceeds 1e-12")
    psi_plus = LatticeSolution(V.window, plus, verified=True)
    psi_minus = LatticeSolution(V.window, minus, verified=True)
    W = wronskian_discrete(psi_minus, psi_plus)
    psi_plus = LatticeSolution(V.window, plus / W, verified=True)
    return psi_plus, psi_minus


# ---------------------------------------------------------------------------
# Green matrices and the diagonal
# ---------------------------------------------------------------------------


def build_green_matrix(u1: LatticeSolution, u2: LatticeSolution) -> GreenMatrix:
    """``G_mn = u1_{max(m,n)} u2_{min(m,n)} / W[u1, u2]``.

    ``u1`` is the solution used to the right of the diagonal (the decaying
    one, for a resolvent kernel), ``u2`` the one to the left.
    """
    w = _same_window(u1, u2)
    W = wronskian_discrete(u1, u2)
    a, b = u1.values, u2.values
    scale = np.max(np.abs(a[:-1] * b[1:]) + np.abs(a[1:] * b[:-1]))
    if abs(W) <= 1e-14 * scale:
        raise DependentSolutionsError("W[u1, u2] = 0: solutions are linearly dependent")
    i = np.arange(w.size)
    hi = np.maximum.outer(i, i)
    lo = np.minimum.outer(i, i)
    return GreenMatrix(w, u1.values[hi] * u2.values[lo] / W)


def positive_green_matrix(V: LatticePotential) -> GreenMatrix:
    """Green matrix of the positive basis (Dirichlet closure just outside the window)."""
    psi_plus, psi_minus = positive_basis(V)
    return build_green_matrix(psi_minus, psi_plus)


def diagonal_sequence(G: GreenMatrix) -> DiagonalSequence:
    """``z_n = sqrt(G_nn)``; the positive root when every ``G_nn > 0``, else principal roots."""
    d = G.diagonal
    if np.any(np.abs(d) <= 1e-14 * np.max(np.abs(d))) or not np.all(np.isfinite(d)):
        bad = G.window.n_lo + int(np.argmin(np.abs(d)))
        raise DiagonalDegenerateError(f"G_nn vanishes at n={bad}")
    real = not np.iscomplexobj(d) or np.all(np.abs(d.imag) <= 1e-14 * np.abs(d))
    if real and np.all(d.real > 0):
        return DiagonalSequence(G.window, np.sqrt(d.real), positive=True)
    return DiagonalSequence(G.window, np.sqrt(d.astype(complex)), positive=False)


def s_factor(z: DiagonalSequence) -> SFactorSequence:
    """Larger root of ``S - 1/S = 1/(z_n z_{n-1})``, for ``n_lo < n <= n_hi``."""
    zz = z.z[1:] * z.z[:-1]
    S = (1.0 + np.sqrt(1.0 + 4.0 * zz**2)) / (2.0 * zz)
    defect = np.abs(S - 1.0 / S - 1.0 / zz) * np.abs(zz)
    if np.max(defect) > ALGEBRAIC_TOL:
        raise ConsistencyError(f"S-factor identity violated by {np.max(defect):.3e}")
    if z.positive and np.any(S <= 1.0):
        raise ConsistencyError("positive branch produced S_n <= 1")
    return SFactorSequence(z.window, S, z.positive)


def bohl_reconstruct(z: DiagonalSequence, anchor: int | None = None) -> BohlBasisDiscrete:
    """Solution pair ``phi_plus = z P``, ``phi_minus = z / P`` from the diagonal alone.

    ``P_n = prod_{l=anchor+1}^{n} S_l``; the empty product at ``n = anchor`` is 1
    and for ``n < anchor`` the product is read as ``prod_{l=n+1}^{anchor} 1/S_l``.
    The anchor sets where the pair is of order ``z``; put it mid-window on
    long windows to keep ``P`` inside floating-point range.
    """
    w = z.window
    m = w.n_lo if anchor is None else int(anchor)
    k = w.pos(m)
    S = s_factor(z)
    # cum[j] = prod_{l=n_lo+1}^{n_lo+j} S_l
    cum = np.concatenate(([1.0], np.cumprod(S.values)))
    P = cum / cum[k]
    plus = z.z * P
    minus = z.z / P
    prod_defect = np.max(np.abs(plus * minus - z.z**2) / np.abs(z.z**2))
    if prod_defect > ALGEBRAIC_TOL:
        raise ConsistencyError(f"phi+ phi- != z^2 (defect {prod_defect:.3e})")
    phi_plus = LatticeSolution(w, plus)
    phi_minus = LatticeSolution(w, minus)
    Wseq = wronskian_sequence(phi_minus, phi_plus)
    if np.max(np.abs(Wseq - 1.0)) > RECURRENCE_TOL:
        raise ConsistencyError("W[phi-, phi+] != 1")
    return BohlBasisDiscrete(m, phi_plus, phi_minus, S)


def potential_from_diagonal(z: DiagonalSequence) -> LatticePotential:
    """Potential on the interior ``n_lo < n < n_hi`` whose Green diagonal is ``z**2``.

    ``V_n + 2 = (sqrt(1 + 4 z_n^2 z_{n+1}^2) + sqrt(1 + 4 z_n^2 z_{n-1}^2)) / (2 z_n^2)``.
    """
    if not z.positive:
        raise HypothesisError("potential recovery requires a positive diagonal")
    if z.window.size < 5:
        raise InvalidInputError("need at least 5 lattice points to return a 3-point interior")
    z2 = z.z**2
    up = np.sqrt(1.0 + 4.0 * z2[1:-1] * z2[2:])
    down = np.sqrt(1.0 + 4.0 * z2[1:-1] * z2[:-2])
    v = (up + down) / (2.0 * z2[1:-1]) - 2.0
    return LatticePotential(LatticeWindow(z.window.n_lo + 1, z.window.n_hi - 1), v)


def gtov_residual(G: GreenMatrix, V: LatticePotential) -> np.ndarray:
    """Defect of the nonlinear difference equation linking ``G_nn`` and ``V_n`` (interior)."""
    _same_window(G, V)
    g = G.diagonal
    lhs = 0.5 * (np.sqrt(1.0 + 4.0 * g[1:-1] * g[2:]) + np.sqrt(1.0 + 4.0 * g[1:-1] * g[:-2]))
    r = lhs - (V.values[1:-1] + 2.0) * g[1:-1]
    return r.real if not np.iscomplexobj(r) or np.all(r.imag == 0) else r


def symmetry_map(V: LatticePotential, u: LatticeSolution):
    """``V -> -4 - V``, ``u_n -> (-1)^n u_n``; maps solutions to solutions."""
    _same_window(V, u)
    sign = np.where(V.window.indices % 2 == 0, 1.0, -1.0)
    return (
        LatticePotential(V.window, -4.0 - V.values),
        LatticeSolution(u.window, sign * u.values, u.verified),
    )


# ---------------------------------------------------------------------------
# Agmon-type bounds
# ---------------------------------------------------------------------------


def agmon_constant(C: float) -> float:
    """``K_A = sqrt(1 + q^2) + q`` with ``q = 2 / (C (C + 2))``."""
    if not C > 0:
        raise InvalidInputError(f"cutoff C must be positive, got {C}")
    q = 2.0 / (C * (C + 2.0))
    K = math.sqrt(1.0 + q * q) + q
    if not 1.0 < K < math.sqrt(1.0 + 4.0 / C**2):
        raise ConsistencyError(f"K_A={K} outside (1, sqrt(1 + 4/C^2))")
    return K


def _require_above(V: LatticePotential, C: float):
    if not C > 0:
        raise InvalidInputError(f"cutoff C must be positive, got {C}")
    vmin = float(np.min(V.values))
    if vmin <= C:
        raise HypothesisError(f"min V_n = {vmin:g} does not exceed the cutoff C = {C:g}")


def _s_bound_core(v_n, v_prev):
    p = (v_n + 2.0) * (v_prev + 2.0)
    return (np.sqrt(p) + np.sqrt(4.0 + p)) / 2.0


def agmon_bound_report(V: LatticePotential, G: GreenMatrix, C: float) -> AgmonReport:
    """Check ``1/(V_n+2) <= G_nn <= K_A/(V_n+2)`` and the induced S-factor bounds.

    Records cover the interior indices. ``distances`` holds ``d_A(n_lo, n)``
    for both variants.
    """
    _same_window(V, G)
    _require_above(V, C)
    K = agmon_constant(C)
    z = diagonal_sequence(G)
    if not z.positive:
        raise HypothesisError("Agmon bounds need a positive Green matrix")
    S = s_factor(z)
    g = G.diagonal.real
    v = V.values
    checks = []
    for k in range(1, V.window.size - 1):
        n = V.window.n_lo + k
        g_lo, g_hi = 1.0 / (v[k] + 2.0), K / (v[k] + 2.0)
        core = _s_bound_core(v[k], v[k - 1])
        s_n = float(S[n])
        checks.append(
            BoundCheck(
                n=n,
                g_lower=float(g_lo),
                g=float(g[k]),
                g_upper=float(g_hi),
                g_ok=bool(g_lo <= g[k] <= g_hi),
                s_lower=float(core / K),
                s=s_n,
                s_upper=float(core),
                s_ok=bool(core / K <= s_n <= core),
            )
        )
    distances = {
        "a": np.concatenate(([0.0], np.cumsum(np.log(v[1:] + 2.0) - math.log(K)))),
        "b": np.concatenate(([0.0], np.cumsum(_lg_step(v[1:])))),
    }
    return AgmonReport(C=C, K_A=K, checks=checks, distances=distances)


def _lg_step(v):
    return np.log((v + 2.0 + np.sqrt(v * (v + 4.0))) / 2.0)


def _check_summability(V: LatticePotential):
    n = V.window.indices[:-1]
    terms = np.abs(n * np.diff(V.values))
    total = float(np.sum(terms))
    if total == 0.0:
        return
    tail = float(np.sum(terms[-max(1, len(terms) // 4):]))
    if tail > 0.1 * total:
        warnings.warn(
            "partial sums of n|V_{n+1} - V_n| are still growing on this window; "
            "the Liouville-Green distance may not control decay",
            RuntimeWarning,
            stacklevel=3,
        )


def agmon_distance(V: LatticePotential, m: int, n: int, variant: str = "a", C: float | None = None):
    """Lattice Agmon distance ``d_A(m, n)`` as a sum over the steps ``m+1..n``.

    Variant ``"a"``: ``sum(ln(V_l + 2) - ln K_A)``, needs ``min V > C > 0``.
    Variant ``"b"``: ``sum(ln((V_l + 2 + sqrt(V_l (V_l + 4))) / 2))``, needs
    ``V > 0`` (and ``V > C`` if ``C`` is given); warns when ``n |V_{n+1} - V_n|``
    does not look summable on the window.
    """
    if n < m:
        raise InvalidInputError("agmon_distance needs n >= m")
    V.window.pos(m), V.window.pos(n)
    if variant == "a":
        if C is None:
            raise InvalidInputError("variant a needs the cutoff C")
        _require_above(V, C)
        K = agmon_constant(C)
        v = V.values[V.window.pos(m) + 1 : V.window.pos(n) + 1]
        return float(np.sum(np.log(v + 2.0) - math.log(K)))
    if variant == "b":
        if C is not None:
            _require_above(V, C)
        elif np.min(V.values) <= 0:
            raise HypothesisError("variant b needs V_n > 0 on the window")
        _check_summability(V)
        v = V.values[V.window.pos(m) + 1 : V.window.pos(n) + 1]
        return float(np.sum(_lg_step(v)))
    raise InvalidInputError(f"unknown variant {variant!r}; expected 'a' or 'b'")


# ---------------------------------------------------------------------------
# discrete Darboux factorization
# ---------------------------------------------------------------------------


def _growth(z2: np.ndarray) -> np.ndarray:
    # X_n = z_{n+1} S_{n+1} / z_n = (1 + sqrt(1 + 4 G_nn G_{n+1,n+1})) / (2 G_nn)
    return (1.0 + np.sqrt(1.0 + 4.0 * z2[:-1] * z2[1:])) / (2.0 * z2[:-1])


def darboux_discrete_q(z: DiagonalSequence) -> np.ndarray:
    """``Q_n = 1 - z_{n+1} S_{n+1} / z_n`` for ``n_lo <= n < n_hi``.

    Checks that ``(nabla_plus + Q) phi_plus = 0``, relative to ``|phi_plus_{n+1}|``.
    """
    Q = 1.0 - _growth(z.z**2)
    if np.any(Q == 1.0):
        raise ConsistencyError("Q_n = 1: the left Darboux factor is undefined")
    phi = bohl_reconstruct(z, z.window.n_lo + z.window.size // 2).plus.values
    r = phi[1:] - phi[:-1] + Q * phi[:-1]
    if np.max(np.abs(r) / np.abs(phi[1:])) > RECURRENCE_TOL:
        raise ConsistencyError("first-order Darboux factor does not annihilate phi_plus")
    return Q


def darboux_discrete_apply(z: DiagonalSequence, f) -> np.ndarray:
    """Apply ``R [-nabla_plus + Q/(1-Q)] [nabla_plus + Q]`` to ``f`` on the interior.

    The result at position ``k`` is the value at lattice index ``n_lo + 1 + k``;
    it equals ``((-Delta + V) f)_n`` whenever ``z**2`` is the Green diagonal of ``V``.
    """
    w = z.window
    f = np.asarray(f)
    if f.shape != (w.size,):
        raise InvalidInputError(f"f has {f.size} values but window holds {w.size}")
    X = _growth(z.z**2)  # X = 1 - Q on n_lo..n_hi-1
    Q = 1.0 - X
    g = f[1:] - f[:-1] + Q * f[:-1]  # right factor, n_lo..n_hi-1
    left = Q / (1.0 - Q)
    h = -(g[1:] - g[:-1]) + left[:-1] * g[:-1]  # n_lo..n_hi-2
    return h  # shifted by R: h[k] sits at n_lo + 1 + k
