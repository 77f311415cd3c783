"""Derivative-free maximization over constrained covariance parameterizations.

The decision vector holds lower-triangular factor entries; decoding rescales
block rows onto the power budgets, so every real vector maps to a feasible
profile and the optimizers run unconstrained.  The min(.,.) objectives are
nonsmooth, hence direct search only: Nelder-Mead, differential evolution
(rand/1/bin), and simulated annealing with geometric cooling.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .channel import RelayChannel
from .linalg import project_psd_trace, psd_tril_factor, schur_conditional_cov
from .rates import (CovarianceProfile, UpperBoundVars, achievable_rate,
                    cutset_broadcast_term, cutset_inner_inf,
                    degenerate_profiles, lower_bound_terms, waterfill)

METHODS = ("nelder_mead", "differential_evolution", "simulated_annealing")


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "nelder_mead"
    budget: int = 20000  # max objective evaluations per restart
    restarts: int = 8
    seed: int = 0
    tol: float = 1e-9  # objective stall tolerance

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass(frozen=True)
class BoundResult:
    value: float
    argmax: np.ndarray = field(repr=False)
    evaluations: int
    method: str
    converged: bool


def _tri(n: int) -> int:
    return n * (n + 1) // 2


def profile_dim(ch: RelayChannel) -> int:
    """Decision dimension for one strategy objective."""
    return _tri(ch.Mt + ch.Mr) + _tri(ch.Mt)


def upper_dim(ch: RelayChannel) -> int:
    """Decision dimension for the cut-set upper bound objective."""
    return 1 + _tri(ch.Mt) + _tri(ch.Mr)


def _fill_tril(x: np.ndarray, n: int) -> np.ndarray:
    m = np.zeros((n, n))
    m[np.tril_indices(n)] = x
    return m


def _tril_entries(m: np.ndarray) -> np.ndarray:
    return np.real(m)[np.tril_indices(m.shape[0])]


def decode_profile(x, ch: RelayChannel, strategy: str) -> CovarianceProfile:
    """Map a real vector to a feasible CovarianceProfile.

    Layout: tril factor of the joint (u, x2) block matrix, then tril factor of
    sigma_v.  If the transmit blocks exceed the budget they are rescaled
    jointly (which rescales the cross-covariance consistently); the relay
    block is rescaled onto its own budget.  For precoding strategies the joint
    is read as (x1', x2) and the conditional covariance is attached.
    """
    mt, mr = ch.Mt, ch.Mr
    n = mt + mr
    k1, k2 = _tri(n), _tri(mt)
    x = np.asarray(x, dtype=float)
    if x.shape != (k1 + k2,):
        raise ValueError(f"expected vector of length {k1 + k2}")
    l_joint = _fill_tril(x[:k1], n)
    l_v = _fill_tril(x[k1:], mt)
    tr_u = float(np.sum(l_joint[:mt] ** 2))
    tr_v = float(np.sum(l_v ** 2))
    if tr_u + tr_v > mt:
        f = np.sqrt(mt / (tr_u + tr_v))
        l_joint[:mt] *= f
        l_v *= f
    tr_x2 = float(np.sum(l_joint[mt:] ** 2))
    if tr_x2 > mr:
        l_joint[mt:] *= np.sqrt(mr / tr_x2)
    joint = l_joint @ l_joint.T
    sigma_u = joint[:mt, :mt].astype(np.complex128)
    cross = joint[:mt, mt:].astype(np.complex128)
    sigma_x2 = joint[mt:, mt:].astype(np.complex128)
    sigma_v = (l_v @ l_v.T).astype(np.complex128)
    cond = None
    if strategy.startswith("pre"):
        if float(np.max(np.abs(cross))) == 0.0:
            cond = sigma_u
        else:
            cond = schur_conditional_cov(joint.astype(np.complex128), mt)
    return CovarianceProfile(sigma_u=sigma_u, sigma_v=sigma_v,
                             sigma_x2=sigma_x2, cross_ux2=cross,
                             sigma_x1p_given_x2=cond)


def encode_profile(p: CovarianceProfile, ch: RelayChannel) -> np.ndarray:
    """Inverse of decode_profile for real-valued, in-budget profiles."""
    joint = np.real(p.joint())
    l_joint = psd_tril_factor(joint)
    l_v = psd_tril_factor(np.real(p.sigma_v))
    return np.concatenate([_tril_entries(l_joint), _tril_entries(l_v)])


# ---------------------------------------------------------------------------
# Search methods
# ---------------------------------------------------------------------------

class _Budget:
    """Objective wrapper that counts evaluations and tracks the incumbent."""

    def __init__(self, objective):
        self.objective = objective
        self.count = 0
        self.best_val = -np.inf
        self.best_x = None

    def __call__(self, x) -> float:
        self.count += 1
        v = float(self.objective(x))
        if v > self.best_val:
            self.best_val = v
            self.best_x = np.array(x, dtype=float)
        return v


def _nelder_mead(f, x0, rng, max_evals, tol) -> bool:
    """Standard simplex search (reflect 1, expand 2, contract 0.5, shrink 0.5).

    Maximizes f; returns the convergence flag.  Progress is tracked inside f.
    """
    dim = x0.size
    step = 0.5
    pts = [np.array(x0, dtype=float)]
    for i in range(dim):
        e = np.array(x0, dtype=float)
        e[i] += step * (1.0 + 0.1 * rng.standard_normal())
        pts.append(e)
    used = [0]

    def ff(x):
        used[0] += 1
        return f(x)

    vals = [ff(p) for p in pts]
    while used[0] < max_evals:
        order = np.argsort(vals)[::-1]  # best first (maximization)
        pts = [pts[i] for i in order]
        vals = [vals[i] for i in order]
        if abs(vals[0] - vals[-1]) < tol:
            return True
        centroid = np.mean(pts[:-1], axis=0)
        xr = centroid + (centroid - pts[-1])
        fr = ff(xr)
        if fr > vals[0]:
            xe = centroid + 2.0 * (centroid - pts[-1])
            fe = ff(xe)
            if fe > fr:
                pts[-1], vals[-1] = xe, fe
            else:
                pts[-1], vals[-1] = xr, fr
        elif fr > vals[-2]:
            pts[-1], vals[-1] = xr, fr
        else:
            xc = centroid + 0.5 * (pts[-1] - centroid)
            fc = ff(xc)
            if fc > vals[-1]:
                pts[-1], vals[-1] = xc, fc
            else:
                for i in range(1, dim + 1):
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0])
                    vals[i] = ff(pts[i])
        if used[0] >= max_evals:
            break
    return False


def _diff_evolution(f, x0, extra_starts, rng, max_evals, tol, dim) -> bool:
    """rand/1/bin with F = 0.7, CR = 0.9, population 10 * dim."""
    pop_size = max(10 * dim, 5)
    pop = rng.standard_normal((pop_size, dim))
    pop[0] = x0
    for i, s in enumerate(extra_starts[: pop_size - 1], start=1):
        pop[i] = s
    used = [0]

    def ff(x):
        used[0] += 1
        return f(x)

    vals = np.array([ff(p) for p in pop])
    fmut, cr = 0.7, 0.9
    while used[0] < max_evals:
        for i in range(pop_size):
            if used[0] >= max_evals:
                break
            r1, r2, r3 = rng.choice(pop_size, size=3, replace=False)
            mutant = pop[r1] + fmut * (pop[r2] - pop[r3])
            mask = rng.random(dim) < cr
            mask[rng.integers(dim)] = True
            trial = np.where(mask, mutant, pop[i])
            tv = ff(trial)
            if tv >= vals[i]:
                pop[i] = trial
                vals[i] = tv
        if float(np.max(vals) - np.min(vals)) < tol:
            return True
    return False


def _sim_annealing(f, x0, rng, max_evals, tol) -> bool:
    """Gaussian proposals, geometric cooling (factor 0.95)."""
    x = np.array(x0, dtype=float)
    used = [0]

    def ff(z):
        used[0] += 1
        return f(z)

    cur = ff(x)
    temp = 1.0
    block = max(20, 5 * x.size)
    while used[0] < max_evals:
        for _ in range(block):
            if used[0] >= max_evals:
                break
            scale = 0.5 * max(temp, 0.02)
            cand = x + scale * rng.standard_normal(x.size)
            cv = ff(cand)
            if cv >= cur or rng.random() < np.exp((cv - cur) / max(temp, 1e-12)):
                x, cur = cand, cv
        temp *= 0.95
        if temp < 1e-4:
            return True
    return False


def maximize(objective, cfg: OptimizerConfig, dim: int,
             warm_starts=()) -> BoundResult:
    """Best value over restarts; deterministic given cfg.seed.

    Warm starts are evaluated up front and the first restarts launch from
    them, so the result never falls below the best warm start.
    """
    if cfg.budget < dim + 1:
        raise ValueError("budget must be at least dim + 1")
    wrapped = _Budget(objective)
    starts = [np.asarray(s, dtype=float) for s in warm_starts]
    for s in starts:
        if s.shape != (dim,):
            raise ValueError("warm start has wrong dimension")
        wrapped(s)
    converged = False
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed & 0xFFFFFFFFFFFFFFFF, r])
        if r < len(starts):
            x0 = starts[r]
        elif starts:
            x0 = starts[r % len(starts)] + 0.3 * rng.standard_normal(dim)
        else:
            x0 = rng.standard_normal(dim)
        cap = wrapped.count + cfg.budget
        if cfg.method == "nelder_mead":
            ok = _nelder_mead(wrapped, x0, rng, cap - wrapped.count, cfg.tol)
        elif cfg.method == "differential_evolution":
            others = starts[:r] + starts[r + 1:]
            ok = _diff_evolution(wrapped, x0, others, rng,
                                 cap - wrapped.count, cfg.tol, dim)
        else:
            ok = _sim_annealing(wrapped, x0, rng, cap - wrapped.count, cfg.tol)
        converged = converged or ok
    return BoundResult(value=wrapped.best_val, argmax=wrapped.best_x,
                       evaluations=wrapped.count, method=cfg.method,
                       converged=converged)


# ---------------------------------------------------------------------------
# Bound- and strategy-level drivers
# ---------------------------------------------------------------------------

def decode_upper_vars(x, ch: RelayChannel) -> UpperBoundVars:
    """Map a real vector to feasible cut-set variables (rho clamped to [0,1])."""
    mt, mr = ch.Mt, ch.Mr
    k1, k2 = _tri(mt), _tri(mr)
    x = np.asarray(x, dtype=float)
    if x.shape != (1 + k1 + k2,):
        raise ValueError(f"expected vector of length {1 + k1 + k2}")
    rho = float(np.clip(x[0], 0.0, 1.0))
    s11 = project_psd_trace(_fill_tril(x[1:1 + k1], mt), float(mt))
    s22 = project_psd_trace(_fill_tril(x[1 + k1:], mr), float(mr))
    return UpperBoundVars(rho=rho, sigma11=s11, sigma22=s22)


def _upper_warm_starts(ch: RelayChannel) -> list[np.ndarray]:
    mt, mr = ch.Mt, ch.Mr
    g = np.vstack([np.sqrt(ch.gamma1) * ch.H1, np.sqrt(ch.gamma2) * ch.H2])
    sigma_bc, _ = waterfill(g, float(mt))
    l_bc = _tril_entries(psd_tril_factor(np.real(sigma_bc)))
    l_id_t = _tril_entries(np.eye(mt))
    l_id_r = _tril_entries(np.eye(mr))
    starts = []
    for rho in (0.0, 0.3, 0.6, 0.9, 0.99):
        for l11 in (l_id_t, l_bc):
            starts.append(np.concatenate([[rho], l11, l_id_r]))
    return starts


def optimize_upper_bound(ch: RelayChannel, cfg: OptimizerConfig) -> BoundResult:
    """max over (rho, Sigma11, Sigma22) of min(broadcast cut, MAC cut)."""

    def objective(x):
        v = decode_upper_vars(x, ch)
        return min(cutset_broadcast_term(ch, v), cutset_inner_inf(ch, v))

    return maximize(objective, cfg, upper_dim(ch),
                    warm_starts=_upper_warm_starts(ch))


def optimize_lower_bound(ch: RelayChannel) -> float:
    """Closed-form water-filling lower bound; no direct search involved."""
    return lower_bound_terms(ch).lower_bound


def _strategy_warm_starts(ch: RelayChannel) -> list[np.ndarray]:
    return [encode_profile(p, ch) for p in degenerate_profiles(ch)]


def optimize_strategy(ch: RelayChannel, family: str, cfg: OptimizerConfig,
                      extra_starts=()) -> BoundResult:
    """Best achievable rate for a strategy family, over both decode orders.

    Each order is optimized independently and the better result is returned;
    the degenerate all-u / all-v profiles are always injected as warm starts
    so the superposition result dominates the non-cooperative lower bound.
    """
    if family not in ("sc", "pre"):
        raise ValueError("family must be 'sc' or 'pre'")
    dim = profile_dim(ch)
    starts = _strategy_warm_starts(ch) + [np.asarray(s, float)
                                          for s in extra_starts]
    best = None
    total_evals = 0
    any_converged = False
    for order in ("u_first", "v_first"):
        strategy = f"{family}_{order}"

        def objective(x, _s=strategy):
            return achievable_rate(ch, decode_profile(x, ch, _s), _s).r_total

        res = maximize(objective, cfg, dim, warm_starts=starts)
        total_evals += res.evaluations
        any_converged = any_converged or res.converged
        if best is None or res.value > best.value:
            best = res
    return replace(best, evaluations=total_evals, converged=any_converged)
