"""Entropic balanced and unbalanced optimal transport.

solve_uot minimizes

    sum_ij C_ij P_ij + eps * H(P) + l1 * KL(P @ 1, a) + l2 * KL(P.T @ 1, b)

with H(P) = sum P_ij (log P_ij - 1) and KL(x, y) = sum x log(x/y) - x + y,
via Sinkhorn scaling with log-domain stabilization: scalings u, v are
absorbed into dual potentials whenever they threaten overflow.

brute_force_uot is an independent oracle for instances up to 2x2: a dense
grid search over plan entries followed by coordinate-descent refinement.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MassMismatchError, NumericalError, TooLargeError


@dataclass(frozen=True)
class UotConfig:
    epsilon: float = 0.1
    lambda1: float = 0.1
    lambda2: float = 0.1
    max_iters: int = 1000
    tol: float = 1e-9
    absorb_threshold: float = 1e10

    def __post_init__(self):
        if self.epsilon <= 0 or self.lambda1 <= 0 or self.lambda2 <= 0:
            raise ValueError("epsilon and lambdas must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class TransportPlan:
    T: np.ndarray
    converged: bool
    iterations: int
    objective: float = field(default=float("nan"))


def _xlogy(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """x * log(y) with the 0 * log(0) := 0 convention."""
    out = np.zeros_like(x, dtype=np.float64)
    pos = x > 0
    out[pos] = x[pos] * np.log(y[pos])
    return out


def objective(
    T: np.ndarray, a: np.ndarray, b: np.ndarray, C: np.ndarray, cfg: UotConfig
) -> float:
    """Exact objective value of a candidate plan."""
    T = np.asarray(T, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    transport = float(np.sum(C * T))
    entropy = float(np.sum(_xlogy(T, T) - T))
    row = T.sum(axis=1)
    col = T.sum(axis=0)
    kl_row = float(np.sum(_xlogy(row, row / np.maximum(a, 1e-300)) - row + a))
    kl_col = float(np.sum(_xlogy(col, col / np.maximum(b, 1e-300)) - col + b))
    return (
        transport
        + cfg.epsilon * entropy
        + cfg.lambda1 * kl_row
        + cfg.lambda2 * kl_col
    )


def _empty_plan(a: np.ndarray, b: np.ndarray, cfg: UotConfig) -> TransportPlan:
    T = np.zeros((len(a), len(b)))
    obj = cfg.lambda1 * float(np.sum(a)) + cfg.lambda2 * float(np.sum(b))
    return TransportPlan(T=T, converged=True, iterations=0, objective=obj)


def solve_uot(
    a: np.ndarray, b: np.ndarray, C: np.ndarray, cfg: UotConfig | None = None
) -> TransportPlan:
    """Stabilized Sinkhorn for the KL-relaxed transport problem."""
    cfg = cfg or UotConfig()
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    n, m = len(a), len(b)
    if C.shape != (n, m):
        raise MassMismatchError(f"cost shape {C.shape} != ({n}, {m})")
    if n == 0 or m == 0:
        return _empty_plan(a, b, cfg)

    eps = cfg.epsilon
    f1 = cfg.lambda1 / (cfg.lambda1 + eps)
    f2 = cfg.lambda2 / (cfg.lambda2 + eps)

    alpha = np.zeros(n)
    beta = np.zeros(m)
    u = np.ones(n)
    v = np.ones(m)
    K = np.exp(-C / eps)

    prev_row = np.full(n, np.inf)
    prev_col = np.full(m, np.inf)
    converged = False
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        Kv = K @ v
        u = (a / np.maximum(Kv, 1e-300)) ** f1 * np.exp(-alpha / (eps + cfg.lambda1))
        Ktu = K.T @ u
        v = (b / np.maximum(Ktu, 1e-300)) ** f2 * np.exp(-beta / (eps + cfg.lambda2))
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise NumericalError("non-finite scaling vector in solve_uot")
        if max(u.max(), v.max()) > cfg.absorb_threshold:
            alpha = alpha + eps * np.log(u)
            beta = beta + eps * np.log(v)
            if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta))):
                raise NumericalError("non-finite dual potential in solve_uot")
            K = np.exp((alpha[:, None] + beta[None, :] - C) / eps)
            u = np.ones(n)
            v = np.ones(m)
        T = u[:, None] * K * v[None, :]
        row = T.sum(axis=1)
        col = T.sum(axis=0)
        change = max(
            float(np.max(np.abs(row - prev_row), initial=0.0)),
            float(np.max(np.abs(col - prev_col), initial=0.0)),
        )
        prev_row, prev_col = row, col
        if change < cfg.tol:
            converged = True
            break

    T = u[:, None] * K * v[None, :]
    if not np.all(np.isfinite(T)):
        raise NumericalError("non-finite transport plan")
    plan = TransportPlan(T=T, converged=converged, iterations=iters)
    plan.objective = objective(T, a, b, C, cfg)
    return plan


def solve_bot(
    a: np.ndarray,
    b: np.ndarray,
    C: np.ndarray,
    epsilon: float = 0.1,
    max_iters: int = 10000,
    tol: float = 1e-9,
    absorb_threshold: float = 1e10,
) -> TransportPlan:
    """Entropic balanced Sinkhorn; requires equal total masses."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    if abs(float(a.sum()) - float(b.sum())) > 1e-9:
        raise MassMismatchError(
            f"total masses differ: {a.sum():.12g} vs {b.sum():.12g}")
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return TransportPlan(np.zeros((n, m)), True, 0, 0.0)

    alpha = np.zeros(n)
    beta = np.zeros(m)
    u = np.ones(n)
    v = np.ones(m)
    K = np.exp(-C / epsilon)
    converged = False
    iters = 0
    for iters in range(1, max_iters + 1):
        u = a / np.maximum(K @ v, 1e-300)
        v = b / np.maximum(K.T @ u, 1e-300)
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise NumericalError("non-finite scaling vector in solve_bot")
        if max(u.max(), v.max()) > absorb_threshold:
            alpha = alpha + epsilon * np.log(u)
            beta = beta + epsilon * np.log(v)
            K = np.exp((alpha[:, None] + beta[None, :] - C) / epsilon)
            u = np.ones(n)
            v = np.ones(m)
        T = u[:, None] * K * v[None, :]
        err = max(
            float(np.max(np.abs(T.sum(axis=1) - a))),
            float(np.max(np.abs(T.sum(axis=0) - b))),
        )
        if err < tol:
            converged = True
            break
    T = u[:, None] * K * v[None, :]
    return TransportPlan(T=T, converged=converged, iterations=iters,
                         objective=float(np.sum(C * T)))


def brute_force_uot(
    a: np.ndarray,
    b: np.ndarray,
    C: np.ndarray,
    cfg: UotConfig | None = None,
    grid_steps: int = 11,
) -> TransportPlan:
    """Grid-search oracle with coordinate-descent refinement (<= 4 cells)."""
    cfg = cfg or UotConfig()
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    n, m = len(a), len(b)
    if n * m > 4:
        raise TooLargeError(f"brute force limited to 4 cells, got {n * m}")
    if n == 0 or m == 0:
        return _empty_plan(a, b, cfg)

    hi = 1.5 * max(float(a.sum()), float(b.sum()))
    grid = np.linspace(0.0, hi, grid_steps)
    cells = n * m
    combos = np.array(list(itertools.product(grid, repeat=cells)))
    Ts = combos.reshape(-1, n, m)
    objs = _objective_batch(Ts, a, b, C, cfg)
    T = Ts[int(np.argmin(objs))].copy()

    # refinement: cyclic exact 1-D minimization per cell; the objective is
    # convex, and each coordinate slice has a monotone gradient
    #   g(t) = C_ij + eps*log t + l1*log((t+R)/a_i) + l2*log((t+S)/b_j)
    for _ in range(200):
        shift = 0.0
        for i in range(n):
            for j in range(m):
                R = float(T[i].sum() - T[i, j])
                S = float(T[:, j].sum() - T[i, j])

                cij, ai, bj = float(C[i, j]), float(a[i]), float(b[j])

                def g(t: float) -> float:
                    return (
                        cij
                        + cfg.epsilon * math.log(t)
                        + cfg.lambda1 * math.log((t + R) / ai)
                        + cfg.lambda2 * math.log((t + S) / bj)
                    )

                lo, up = 1e-300, 1.0
                while g(up) < 0.0 and up < 1e12:
                    up *= 2.0
                for _ in range(60):
                    mid = 0.5 * (lo + up)
                    if g(mid) < 0.0:
                        lo = mid
                    else:
                        up = mid
                t_new = 0.5 * (lo + up)
                shift = max(shift, abs(t_new - T[i, j]))
                T[i, j] = t_new
        if shift < 1e-12:
            break
    return TransportPlan(T=T, converged=True, iterations=0,
                         objective=objective(T, a, b, C, cfg))


def _objective_batch(
    Ts: np.ndarray, a: np.ndarray, b: np.ndarray, C: np.ndarray, cfg: UotConfig
) -> np.ndarray:
    """Objective over a batch of candidate plans, shape (B, n, m)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        logT = np.where(Ts > 0, np.log(np.maximum(Ts, 1e-300)), 0.0)
        transport = np.sum(C[None] * Ts, axis=(1, 2))
        entropy = np.sum(Ts * logT - Ts, axis=(1, 2))
        row = Ts.sum(axis=2)
        col = Ts.sum(axis=1)
        log_row = np.where(row > 0, np.log(np.maximum(row, 1e-300) / a[None]), 0.0)
        log_col = np.where(col > 0, np.log(np.maximum(col, 1e-300) / b[None]), 0.0)
        kl_row = np.sum(row * log_row - row + a[None], axis=1)
        kl_col = np.sum(col * log_col - col + b[None], axis=1)
    return (
        transport
        + cfg.epsilon * entropy
        + cfg.lambda1 * kl_row
        + cfg.lambda2 * kl_col
    )
