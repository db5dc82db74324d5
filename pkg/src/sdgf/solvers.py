"""Analysis-l1 solvers.

Both problems have the form

    minimize ||Phi x||_1   subject to   ||A x - y||_2 <= eta

(``A = I`` for denoising). The main solver is a first-order primal-dual
(Chambolle-Pock) iteration; :func:`admm_analysis` is an independent ADMM
instantiation kept as a cross-check oracle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, Infeasible
from .gabor import operator_norm

log = logging.getLogger(__name__)

LinearMap = Callable[[np.ndarray], np.ndarray]

FEAS_TOL = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 5000
    rel_tol: float = 1e-6
    step_ratio: float = 1.0
    seed: int = 0
    over_relaxation: float = 1.0
    window: int = 10
    checkpoint: int = 100
    power_iters: int = 200


@dataclass
class SolveResult:
    x_hat: np.ndarray
    objective: float
    constraint_slack: float
    iterations: int
    converged: bool
    best_objective_trace: list[float] = field(default_factory=list)


def prox_l1_complex(z, t: float) -> np.ndarray:
    """Complex soft-thresholding: shrink each modulus by ``t``, keep the phase."""
    z = np.asarray(z)
    mag = np.abs(z)
    scale = np.maximum(1.0 - t / np.where(mag > 0, mag, 1.0), 0.0)
    return np.where(mag > 0, z * scale, 0)


def project_l2_ball(v, center, radius: float) -> np.ndarray:
    v = np.asarray(v)
    d = v - center
    nd = np.linalg.norm(d)
    if nd <= radius:
        return v
    return center + (radius / nd) * d


def _project_linf_unit(p: np.ndarray) -> np.ndarray:
    mag = np.abs(p)
    return np.where(mag > 1.0, p / np.maximum(mag, 1e-300), p)


def _as_real(x: np.ndarray, real: bool) -> np.ndarray:
    return x.real.copy() if real else x


def _relative_change(x, x_old, p, p_old) -> float:
    # the dual moves long after the primal looks stationary; watch both
    dx = np.linalg.norm(x - x_old) / max(np.linalg.norm(x), 1e-30)
    dp = np.linalg.norm(p - p_old) / max(np.linalg.norm(p), 1e-30)
    return max(dx, dp)


def _change_window_ok(hist: list[float], tol: float, window: int) -> bool:
    return len(hist) >= window and max(hist[-window:]) < tol


def solve_analysis_cs(
    A,
    y,
    analysis: tuple[LinearMap, LinearMap],
    eta: float,
    cfg: SolverConfig = SolverConfig(),
    *,
    real: bool | None = None,
    x0=None,
    raise_infeasible: bool = True,
) -> SolveResult:
    """Analysis compressed sensing with a measurement matrix ``A``.

    The measurement block is rescaled so that ``||A||`` matches ``||Phi||``
    (same feasible set, better balanced steps). On exit the iterate is moved
    onto the constraint set with a minimum-norm least-squares correction if
    the primal-dual iteration left it slightly outside.
    """
    A = np.asarray(A)
    y = np.asarray(y)
    K, L = A.shape
    if y.shape != (K,):
        raise DimensionMismatch(f"y has shape {y.shape}, expected ({K},)")
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if real is None:
        real = not (np.iscomplexobj(A) or np.iscomplexobj(y))
    phi, phi_h = analysis

    def phi_h_r(p):
        return _as_real(phi_h(p), real)

    n_phi = operator_norm(phi, phi_h, L, cfg.power_iters, cfg.seed, complex_domain=not real)
    n_a = np.linalg.norm(A, 2)
    if n_a == 0:
        raise ValueError("measurement matrix is zero")
    s = n_phi / n_a
    As = s * A
    As_h = As.conj().T
    ys = s * y
    etas = s * eta
    norm_k = np.sqrt(2.0) * n_phi
    tau = cfg.step_ratio / norm_k
    sigma = 1.0 / (cfg.step_ratio * norm_k)

    rho = cfg.over_relaxation
    if not 1.0 <= rho < 2.0:
        raise ValueError("over_relaxation must lie in [1, 2)")

    x = _as_real(A.conj().T @ y, real) if x0 is None else np.array(x0, dtype=float if real else complex)
    p = np.zeros_like(phi(x), dtype=complex)
    q = np.zeros(K, dtype=float if real and not np.iscomplexobj(As) else complex)

    changes: list[float] = []
    trace: list[float] = []
    best = np.inf
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        x_t = x - tau * (phi_h_r(p) + _as_real(As_h @ q, real))
        x_e = 2 * x_t - x
        p_t = _project_linf_unit(p + sigma * phi(x_e))
        v = q + sigma * (As @ x_e)
        q_t = v - sigma * project_l2_ball(v / sigma, ys, etas)
        x_old, p_old = x, p
        x = x + rho * (x_t - x)
        p = p + rho * (p_t - p)
        q = q + rho * (q_t - q)
        changes.append(_relative_change(x, x_old, p, p_old))
        if it % cfg.checkpoint == 0:
            best = min(best, float(np.sum(np.abs(phi(x)))))
            trace.append(best)
        if _change_window_ok(changes, cfg.rel_tol, cfg.window):
            if np.linalg.norm(A @ x - y) <= eta + FEAS_TOL:
                converged = True
                break

    x = _polish_feasible(A, y, x, eta, real)
    slack = float(np.linalg.norm(A @ x - y))
    if not converged and slack <= eta + FEAS_TOL and changes and changes[-1] < 10 * cfg.rel_tol:
        converged = True
    if slack > eta + FEAS_TOL:
        converged = False
        if raise_infeasible:
            raise Infeasible(f"constraint slack {slack:.3e} exceeds eta={eta:.3e} after {it} iterations")
    obj = float(np.sum(np.abs(phi(x))))
    return SolveResult(x, obj, slack, it, converged, trace)


def _polish_feasible(A, y, x, eta, real):
    r = A @ x - y
    nr = np.linalg.norm(r)
    if nr <= eta:
        return x
    # smallest step d with A d = -(r - eta r/|r|), landing on the boundary
    target = r * (1.0 - eta / nr)
    d, *_ = np.linalg.lstsq(A, target, rcond=None)
    x_new = x - _as_real(d, real)
    if np.linalg.norm(A @ x_new - y) <= nr:
        return x_new
    return x


def solve_analysis_denoise(
    y,
    analysis: tuple[LinearMap, LinearMap],
    eta: float,
    cfg: SolverConfig = SolverConfig(),
    *,
    real: bool | None = None,
) -> SolveResult:
    """Analysis-l1 denoising; the constraint is handled by the primal prox."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise DimensionMismatch("y must be a vector")
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if real is None:
        real = not np.iscomplexobj(y)
    phi, phi_h = analysis
    L = y.shape[0]
    n_phi = operator_norm(phi, phi_h, L, cfg.power_iters, cfg.seed, complex_domain=not real)
    tau = cfg.step_ratio / n_phi
    sigma = 1.0 / (cfg.step_ratio * n_phi)
    rho = cfg.over_relaxation
    if not 1.0 <= rho < 2.0:
        raise ValueError("over_relaxation must lie in [1, 2)")
    if eta == 0:
        return SolveResult(y.copy(), float(np.sum(np.abs(phi(y)))), 0.0, 0, True, [])

    x = y.copy()
    p = np.zeros_like(phi(x), dtype=complex)
    changes: list[float] = []
    trace: list[float] = []
    best = np.inf
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        x_t = project_l2_ball(x - tau * _as_real(phi_h(p), real), y, eta)
        p_t = _project_linf_unit(p + sigma * phi(2 * x_t - x))
        x_old, p_old = x, p
        x = x + rho * (x_t - x)
        p = p + rho * (p_t - p)
        changes.append(_relative_change(x, x_old, p, p_old))
        if it % cfg.checkpoint == 0:
            best = min(best, float(np.sum(np.abs(phi(x)))))
            trace.append(best)
        if _change_window_ok(changes, cfg.rel_tol, cfg.window):
            converged = True
            break
    # relaxation can leave the iterate marginally outside the ball
    x = project_l2_ball(x, y, eta)
    slack = float(np.linalg.norm(x - y))
    return SolveResult(x, float(np.sum(np.abs(phi(x)))), slack, it, converged, trace)


def admm_analysis(
    A,
    y,
    phi_matrix,
    eta: float,
    *,
    rho: float = 1.0,
    max_iters: int = 20000,
    tol: float = 1e-10,
    seed: int = 0,
    real: bool | None = None,
) -> SolveResult:
    """Independent ADMM solver on the split ``z = Phi x, w = A x``.

    Uses dense matrices and a cached normal-equation factorization; meant for
    small cross-check problems. ``A=None`` means the identity (denoising).
    """
    Phi = np.asarray(phi_matrix)
    L = Phi.shape[1]
    y = np.asarray(y)
    A = np.eye(L) if A is None else np.asarray(A)
    if real is None:
        real = not (np.iscomplexobj(A) or np.iscomplexobj(y))
    G = Phi.conj().T @ Phi + A.conj().T @ A
    if real:
        G = G.real
    chol = np.linalg.cholesky(G)

    def solve_normal(rhs):
        return np.linalg.solve(chol.conj().T, np.linalg.solve(chol, rhs))

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(L) * 0.1
    if not real:
        x = x + 1j * rng.standard_normal(L) * 0.1
    z = Phi @ x
    w = A @ x
    u = np.zeros_like(z)
    v = np.zeros_like(w, dtype=complex if not real else float)
    it = 0
    for it in range(1, max_iters + 1):
        rhs = Phi.conj().T @ (z - u) + A.conj().T @ (w - v)
        x = solve_normal(rhs.real if real else rhs)
        px = Phi @ x
        ax = A @ x
        z_old, w_old = z, w
        z = prox_l1_complex(px + u, 1.0 / rho)
        w = project_l2_ball(ax + v, y, eta)
        u = u + px - z
        v = v + ax - w
        r_pri = np.sqrt(np.linalg.norm(px - z) ** 2 + np.linalg.norm(ax - w) ** 2)
        r_dual = rho * np.sqrt(np.linalg.norm(z - z_old) ** 2 + np.linalg.norm(w - w_old) ** 2)
        scale = max(np.linalg.norm(px), np.linalg.norm(y), 1.0)
        if r_pri < tol * scale and r_dual < tol * scale:
            break
    x = _polish_feasible(A, y, x, eta, real)
    slack = float(np.linalg.norm(A @ x - y))
    return SolveResult(x, float(np.sum(np.abs(Phi @ x))), slack, it, slack <= eta + FEAS_TOL)
