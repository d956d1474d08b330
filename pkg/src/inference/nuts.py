"""No-U-turn Hamiltonian Monte Carlo with a diagonal metric"""

import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from tqdm import tqdm

from src.errors import InitializationError
from src.inference.samples import ChainOutput

logger = logging.getLogger(__name__)

LogDensityFn = Callable[[np.ndarray], Tuple[float, np.ndarray]]


@dataclass
class _State:
    u: np.ndarray
    r: np.ndarray
    log_p: float
    grad: np.ndarray


@dataclass
class _Tree:
    begin: _State
    end: _State
    sample: _State
    log_weight: float
    rho: np.ndarray
    n_leapfrog: int
    sum_accept: float
    turning: bool
    divergent: bool


@dataclass
class TransitionInfo:
    accept_stat: float
    treedepth: int
    n_leapfrog: int
    divergent: bool


class DualAveraging:
    """Step size adaptation toward a target acceptance statistic"""

    def __init__(self, step_size: float, target: float = 0.8, gamma: float = 0.05,
                 t0: float = 10.0, kappa: float = 0.75):
        self.target = target
        self.gamma = gamma
        self.t0 = t0
        self.kappa = kappa
        self.restart(step_size)

    def restart(self, step_size: float) -> None:
        self.mu = np.log(10.0 * step_size)
        self.m = 0
        self.h_bar = 0.0
        self.log_step = np.log(step_size)
        self.log_step_bar = 0.0

    def update(self, accept_stat: float) -> float:
        self.m += 1
        eta = 1.0 / (self.m + self.t0)
        self.h_bar = (1.0 - eta) * self.h_bar + eta * (self.target - accept_stat)
        self.log_step = self.mu - np.sqrt(self.m) / self.gamma * self.h_bar
        weight = self.m ** -self.kappa
        self.log_step_bar = weight * self.log_step + (1.0 - weight) * self.log_step_bar
        return float(np.exp(self.log_step))

    @property
    def final_step_size(self) -> float:
        return float(np.exp(self.log_step_bar))


class WelfordVariance:
    """Running per-coordinate variance"""

    def __init__(self, dim: int):
        self.n = 0
        self.mean = np.zeros(dim)
        self.m2 = np.zeros(dim)

    def add(self, x: np.ndarray) -> None:
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    def regularized(self) -> np.ndarray:
        """Sample variance shrunk toward 1e-3, as Stan regularizes its metric"""
        variance = self.m2 / max(self.n - 1, 1)
        return (self.n / (self.n + 5.0)) * variance + 1e-3 * (5.0 / (self.n + 5.0))


def _no_uturn(rho: np.ndarray, p_sharp_begin: np.ndarray, p_sharp_end: np.ndarray) -> bool:
    return bool(rho @ p_sharp_begin > 0 and rho @ p_sharp_end > 0)


class NutsSampler:
    """
    Multinomial NUTS transitions with the generalized U-turn criterion

    Within a subtree, states are drawn in proportion to exp(-H); across the
    top-level doublings the new subtree is preferred (biased progressive sampling).
    """

    def __init__(self, log_density_and_grad: LogDensityFn, rng: np.random.Generator,
                 max_treedepth: int = 10, max_energy_error: float = 1000.0):
        self.log_density_and_grad = log_density_and_grad
        self.rng = rng
        self.max_treedepth = max_treedepth
        self.max_energy_error = max_energy_error

    def _leapfrog(self, state: _State, step: float, inv_metric: np.ndarray) -> _State:
        r = state.r + 0.5 * step * state.grad
        u = state.u + step * inv_metric * r
        log_p, grad = self.log_density_and_grad(u)
        if not np.isfinite(log_p):
            return _State(u, r, -np.inf, np.zeros_like(u))
        return _State(u, r + 0.5 * step * grad, log_p, grad)

    @staticmethod
    def _hamiltonian(state: _State, inv_metric: np.ndarray) -> float:
        h = -state.log_p + 0.5 * float(np.sum(inv_metric * state.r ** 2))
        return h if np.isfinite(h) else np.inf

    def find_reasonable_step_size(self, u: np.ndarray, log_p: float, grad: np.ndarray,
                                  inv_metric: np.ndarray, step: float = 1.0) -> float:
        """Double or halve the step until one leapfrog step's acceptance crosses 0.5"""
        r = self.rng.standard_normal(u.size) / np.sqrt(inv_metric)
        start = _State(u, r, log_p, grad)
        h0 = self._hamiltonian(start, inv_metric)

        def log_ratio(eps: float) -> float:
            value = h0 - self._hamiltonian(self._leapfrog(start, eps, inv_metric), inv_metric)
            return value if np.isfinite(value) else -np.inf

        ratio = log_ratio(step)
        direction = 1.0 if ratio > np.log(0.5) else -1.0
        for _ in range(100):
            if not direction * ratio > -direction * np.log(2.0):
                break
            candidate = step * 2.0 ** direction
            if not 1e-10 < candidate < 1e5:
                break
            step = candidate
            ratio = log_ratio(step)
        return step

    def _build_tree(self, start: _State, depth: int, step: float, h0: float,
                    inv_metric: np.ndarray) -> _Tree:
        if depth == 0:
            state = self._leapfrog(start, step, inv_metric)
            h = self._hamiltonian(state, inv_metric)
            log_weight = h0 - h
            accept = float(min(1.0, np.exp(log_weight))) if np.isfinite(log_weight) else 0.0
            return _Tree(state, state, state, log_weight, state.r.copy(), 1, accept,
                         False, bool(h - h0 > self.max_energy_error))

        inner = self._build_tree(start, depth - 1, step, h0, inv_metric)
        if inner.divergent or inner.turning:
            return inner
        outer = self._build_tree(inner.end, depth - 1, step, h0, inv_metric)
        n_leapfrog = inner.n_leapfrog + outer.n_leapfrog
        sum_accept = inner.sum_accept + outer.sum_accept
        if outer.divergent or outer.turning:
            return _Tree(inner.begin, outer.end, inner.sample, -np.inf, inner.rho, n_leapfrog,
                         sum_accept, outer.turning, outer.divergent)

        log_weight = np.logaddexp(inner.log_weight, outer.log_weight)
        take_outer = np.log(self.rng.uniform()) < outer.log_weight - log_weight
        sample = outer.sample if take_outer else inner.sample
        rho = inner.rho + outer.rho
        sharp = lambda s: inv_metric * s.r  # noqa: E731
        turning = not (
            _no_uturn(rho, sharp(inner.begin), sharp(outer.end))
            and _no_uturn(inner.rho + outer.begin.r, sharp(inner.begin), sharp(outer.begin))
            and _no_uturn(outer.rho + inner.end.r, sharp(inner.end), sharp(outer.end))
        )
        return _Tree(inner.begin, outer.end, sample, log_weight, rho, n_leapfrog, sum_accept, turning, False)

    def transition(self, u: np.ndarray, log_p: float, grad: np.ndarray, step: float,
                   inv_metric: np.ndarray) -> Tuple[np.ndarray, float, np.ndarray, TransitionInfo]:
        r0 = self.rng.standard_normal(u.size) / np.sqrt(inv_metric)
        root = _State(u, r0, log_p, grad)
        h0 = self._hamiltonian(root, inv_metric)
        left = right = root
        sample = root
        log_weight = 0.0
        rho = r0.copy()
        depth = n_leapfrog = 0
        sum_accept = 0.0
        divergent = False
        sharp = lambda s: inv_metric * s.r  # noqa: E731

        while depth < self.max_treedepth:
            forward = self.rng.uniform() < 0.5
            near, far = (right, left) if forward else (left, right)
            tree = self._build_tree(near, depth, step if forward else -step, h0, inv_metric)
            n_leapfrog += tree.n_leapfrog
            sum_accept += tree.sum_accept
            if tree.divergent:
                divergent = True
                break
            if tree.turning:
                break
            depth += 1

            if np.log(self.rng.uniform()) < tree.log_weight - log_weight:
                sample = tree.sample
            log_weight = np.logaddexp(log_weight, tree.log_weight)
            old_rho = rho
            rho = rho + tree.rho
            if forward:
                right = tree.end
            else:
                left = tree.end
            if not (
                _no_uturn(rho, sharp(left), sharp(right))
                and _no_uturn(old_rho + tree.begin.r, sharp(far), sharp(tree.begin))
                and _no_uturn(tree.rho + near.r, sharp(near), sharp(tree.end))
            ):
                break

        info = TransitionInfo(sum_accept / max(n_leapfrog, 1), depth, n_leapfrog, divergent)
        return sample.u, sample.log_p, sample.grad, info


def run_nuts(log_density_and_grad: LogDensityFn, u0: np.ndarray, warmup: int, n_samples: int,
             rng: np.random.Generator, target_accept: float = 0.8, max_treedepth: int = 10,
             show_progress: bool = False, label: str = "") -> ChainOutput:
    """
    One NUTS chain with warmup adaptation

    Warmup adapts the step size by dual averaging throughout; draws from the
    second half of warmup (minus a terminal buffer of warmup // 10 iterations)
    set a diagonal metric, after which dual averaging restarts.

    Args:
        log_density_and_grad: unconstrained log density and gradient
        u0: starting point
        warmup: warmup iterations
        n_samples: post-warmup draws returned
        rng: random generator
        target_accept: dual averaging target
        max_treedepth: cap on trajectory doublings
        show_progress: show a progress bar
        label: progress bar label

    Returns:
        ChainOutput with exactly n_samples draws
    """
    u = np.asarray(u0, dtype=float).copy()
    log_p, grad = log_density_and_grad(u)
    if not np.isfinite(log_p):
        raise InitializationError("Sampler starting point has zero posterior density")

    dim = u.size
    inv_metric = np.ones(dim)
    sampler = NutsSampler(log_density_and_grad, rng, max_treedepth)
    step = sampler.find_reasonable_step_size(u, log_p, grad, inv_metric)
    averager = DualAveraging(step, target_accept)

    term_buffer = max(1, warmup // 10)
    window_start, window_end = warmup // 2, warmup - term_buffer
    adapt_metric = window_end - window_start >= 10
    variance = WelfordVariance(dim)

    draws = np.empty((n_samples, dim))
    log_density = np.empty(n_samples)
    accept = np.empty(n_samples)
    depths = np.empty(n_samples, dtype=int)
    leapfrogs = np.empty(n_samples, dtype=int)
    divergent = np.zeros(n_samples, dtype=bool)

    for i in tqdm(range(warmup + n_samples), desc=f"Sampling {label}".strip(),
                  disable=not show_progress, leave=False):
        u, log_p, grad, info = sampler.transition(u, log_p, grad, step, inv_metric)
        if i < warmup:
            step = averager.update(info.accept_stat)
            if adapt_metric and window_start <= i < window_end:
                variance.add(u)
                if i == window_end - 1:
                    inv_metric = variance.regularized()
                    step = sampler.find_reasonable_step_size(u, log_p, grad, inv_metric, step)
                    averager.restart(step)
                    logger.debug(f"{label}: metric adapted, step size restarted at {step:.4g}")
            if i == warmup - 1:
                step = averager.final_step_size
                logger.debug(f"{label}: warmup done, step size {step:.4g}")
            continue
        j = i - warmup
        draws[j] = u
        log_density[j] = log_p
        accept[j] = info.accept_stat
        depths[j] = info.treedepth
        leapfrogs[j] = info.n_leapfrog
        divergent[j] = info.divergent

    if divergent.any():
        logger.warning(f"{label}: {int(divergent.sum())} divergent transition(s) after warmup")
    return ChainOutput(draws, log_density, accept, depths, leapfrogs, divergent, step,
                       inv_metric, max_treedepth, "nuts")
