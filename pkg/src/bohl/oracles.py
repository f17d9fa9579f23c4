"""Brute-force ground truth used by tests and verification reports.

Nothing here calls into the reconstruction pipelines; the only shared code
is the plain data containers.
"""
import numpy as np

from .errors import InvalidInputError, SingularSystemError
from .lattice import GreenMatrix, LatticePotential, LatticeSolution


def tridiagonal_matrix(V: LatticePotential) -> np.ndarray:
    """Dense ``-Delta + V`` on the window with zero (Dirichlet) padding outside."""
    size = V.window.size
    A = np.diag(2.0 + V.values)
    A -= np.eye(size, k=1)
    A -= np.eye(size, k=-1)
    return A


def green_by_inversion(V: LatticePotential, pivot_tol: float = 1e-12) -> GreenMatrix:
    """Invert the Dirichlet-padded tridiagonal matrix directly.

    The LDL^T pivots ``d_0 = 2 + V_0``, ``d_k = 2 + V_k - 1/d_{k-1}`` are
    scanned first so that a singular system is reported with the offending
    lattice index instead of a generic ``LinAlgError``.
    """
    diag = 2.0 + V.values
    d = diag[0]
    scale = max(1.0, float(np.max(np.abs(diag))))
    for k in range(V.window.size):
        if k:
            d = diag[k] - 1.0 / d
        if abs(d) < pivot_tol * scale:
            n = V.window.n_lo + k
            raise SingularSystemError(
                f"near-zero pivot {d:.3e} at n={n}; -Delta+V is singular on this window",
                index=n,
                pivot=d,
            )
    A = tridiagonal_matrix(V)
    return GreenMatrix(V.window, np.linalg.solve(A, np.eye(V.window.size)))


def apply_operator(V: LatticePotential, f) -> np.ndarray:
    """``((-Delta + V) f)_n`` at the interior indices ``n_lo < n < n_hi``."""
    f = np.asarray(f)
    return -f[2:] - f[:-2] + (2.0 + V.values[1:-1]) * f[1:-1]


def recurrence_residual(V: LatticePotential, u: LatticeSolution) -> float:
    """``max_n |u_{n+1} + u_{n-1} - (2 + V_n) u_n| / max(1, |u_n|)`` over the interior."""
    if V.window != u.window:
        raise InvalidInputError("potential and solution windows differ")
    x = u.values
    r = x[2:] + x[:-2] - (2.0 + V.values[1:-1]) * x[1:-1]
    return float(np.max(np.abs(r) / np.maximum(1.0, np.abs(x[1:-1]))))


def fd_second_derivative(f, h) -> np.ndarray:
    """Centered ``(f_{k+1} - 2 f_k + f_{k-1}) / h^2``; NaN at both endpoints.

    ``h`` is either a step or an object with an ``h`` attribute (a ``Grid``).
    """
    h = getattr(h, "h", h)
    f = np.asarray(f)
    if f.size < 3:
        raise InvalidInputError("need at least 3 samples")
    out = np.full(f.shape, np.nan, dtype=np.result_type(f, float))
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h**2
    return out


def fd_first_derivative(f, h) -> np.ndarray:
    """Centered ``(f_{k+1} - f_{k-1}) / (2h)``; NaN at both endpoints."""
    h = getattr(h, "h", h)
    f = np.asarray(f)
    out = np.full(f.shape, np.nan, dtype=np.result_type(f, float))
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    return out


def simpson(f, h) -> complex:
    """Composite Simpson rule on an odd number of equally spaced samples."""
    h = getattr(h, "h", h)
    f = np.asarray(f)
    if f.size % 2 == 0:
        raise InvalidInputError("Simpson's rule needs an odd sample count")
    return h / 3.0 * (f[0] + f[-1] + 4.0 * np.sum(f[1:-1:2]) + 2.0 * np.sum(f[2:-1:2]))


def sle_residual(V, x, u, h) -> np.ndarray:
    """``-u'' + V u`` by centered differences on a uniform grid (NaN at the ends)."""
    return -fd_second_derivative(u, h) + V(np.asarray(x)) * np.asarray(u)
