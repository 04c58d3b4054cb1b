"""Detection statistics and joint threshold design for the two-stage detector.

Per-permutation gains (one segment, sinusoid at ``omega``, unit noise)::

    alpha(sigma) = |f_hat[p]|^2 for a unit-amplitude sinusoid, p its peak bucket
    beta(sigma)  = ||wbar * P_sigma(w)||^2   (noise power per bucket)

so one bucket carries ``Exp(snr * alpha + beta)`` power. Averaging over the
odd multipliers gives ``alpha_bar`` and ``beta_bar``, and the first stage
operates at ``pfa_bar = exp(-gamma / beta_bar)`` and
``pd_bar = pfa_bar ** (beta_bar / (snr * alpha_bar + beta_bar))``.

The second stage counts marks over ``T`` segments. Counts at a true index
are approximately ``N(T*pd, T*pd*(1-pd))``; at an empty index they mix
collision hits with pure false alarms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np
from scipy.optimize import bisect, brentq
from scipy.special import ndtr, ndtri
from scipy.stats import binom

from .sft_core import nearest_bin
from .windows import design_pair, pipeline_pair

UPPER = "upper"
EtaP = Union[float, Literal["upper"]]
VarianceBound = Literal["interval", "point"]


class Infeasible(ValueError):
    """More main-lobe cells than buckets: the alias stage cannot separate them."""


class NoSolution(RuntimeError):
    """No threshold count meets both targets."""


def qfunc(x):
    """Gaussian upper tail ``P(Z > x)``."""
    return ndtr(-np.asarray(x, dtype=float))


def qinv(p):
    """Inverse of :func:`qfunc`; accurate deep in the tail."""
    return -ndtri(np.asarray(p, dtype=float))


# -- first stage ---------------------------------------------------------------


@dataclass(frozen=True)
class StageOneStats:
    alpha_bar: float
    beta_bar: float
    per_sigma: tuple[np.ndarray, np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        if not (self.alpha_bar > 0 and self.beta_bar > 0):
            raise ValueError("alpha_bar and beta_bar must be positive")

    def __mul__(self, other: "StageOneStats") -> "StageOneStats":
        """Stats of a separable 2-axis problem from two independent axes."""
        return StageOneStats(self.alpha_bar * other.alpha_bar, self.beta_bar * other.beta_bar)


def _gains(omega: float, sigmas: np.ndarray, w: np.ndarray, wbar: np.ndarray, n: int, b: int):
    t = np.arange(n)
    sigmas = np.atleast_1d(np.asarray(sigmas, dtype=np.int64))
    idx = sigmas[:, None] * t % n
    sig = w * np.exp(1j * omega * t)
    z = wbar * sig[idx]
    spec = np.fft.fft(z.reshape(len(sigmas), n // b, b).sum(axis=1), axis=1)
    p = nearest_bin(omega, n) * sigmas % n * b // n
    alpha = np.abs(spec[np.arange(len(sigmas)), p]) ** 2
    beta = np.sum(np.abs(wbar * w[idx]) ** 2, axis=1)
    return alpha, beta


def compute_alpha_beta(omega: float, sigma: int, windows, n: int, b: int) -> tuple[float, float]:
    """Gains of one permutation; ``windows`` is a ``(w, wbar)`` pair of arrays."""
    w, wbar = (np.asarray(a) for a in windows)
    if len(w) != n or len(wbar) != n:
        raise ValueError("windows must have length n")
    if sigma % 2 == 0:
        raise ValueError(f"sigma must be odd, got {sigma}")
    alpha, beta = _gains(omega, np.array([sigma]), w, wbar, n, b)
    return float(alpha[0]), float(beta[0])


def average_alpha_beta(omega: float, windows, n: int, b: int, mode="exhaustive") -> StageOneStats:
    """Average gains over multipliers.

    ``mode`` is ``"exhaustive"`` (all odd multipliers) or
    ``("sampled", count, seed)``.
    """
    w, wbar = (np.asarray(a) for a in windows)
    if mode == "exhaustive":
        sigmas = np.arange(1, n, 2)
    elif isinstance(mode, tuple) and mode[0] == "sampled":
        _, count, seed = mode
        sigmas = 2 * np.random.default_rng(seed).integers(0, n // 2, size=count) + 1
    else:
        raise ValueError(f"unknown mode {mode!r}")
    alpha, beta = _gains(omega, sigmas, w, wbar, n, b)
    return StageOneStats(float(alpha.mean()), float(beta.mean()), (sigmas, alpha, beta))


def default_windows(n: int, b: int, pre_db: float = 40.0, flat_db: float = 40.0):
    return pipeline_pair(*design_pair(n, b, pre_db, flat_db))


def stage1_roc(gamma: float, noise_var: float, stats: StageOneStats, snr: float) -> tuple[float, float]:
    """``(pfa_bar, pd_bar)`` at threshold ``gamma`` and linear per-sample ``snr``."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    pfa = math.exp(-gamma / (noise_var * stats.beta_bar))
    pd = pfa ** (stats.beta_bar / (stats.alpha_bar * snr + stats.beta_bar))
    return pfa, pd


def stage1_pd_per_sigma(gamma: float, snr: float, stats: StageOneStats, noise_var: float = 1.0) -> np.ndarray:
    """Marking probability at the peak bucket for every tabulated multiplier."""
    if stats.per_sigma is None:
        raise ValueError("stats carry no per-multiplier table")
    _, alpha, beta = stats.per_sigma
    return np.exp(-gamma / (noise_var * (alpha * snr + beta)))


# -- second stage --------------------------------------------------------------


@dataclass(frozen=True)
class SecondStageDists:
    mu_a0: float
    var_a0: float
    mu_a1: float
    var_a1: float
    f: float


def _bernoulli_var_max(lo: float, hi: float) -> float:
    """Largest ``x(1-x)`` over ``x`` in ``[lo, hi]``."""
    if lo <= 0.5 <= hi:
        return 0.25
    return max(lo * (1 - lo), hi * (1 - hi))


def stage2_dists(
    pd_bar: float,
    pfa_bar: float,
    t: int,
    k: int,
    eta_m: float,
    eta_p: EtaP,
    b: int,
    variance_bound: VarianceBound = "interval",
) -> SecondStageDists:
    """Normal approximations of the counts at true (``a1``) and empty (``a0``) indices.

    An empty index shares its bucket with a signal cell in ``F = T*K*eta_m/B``
    segments on average; there it is marked with probability ``eta_p*pd_bar``,
    where ``eta_p`` in ``[1, 1/pd_bar]`` calibrates how much energy it picks up.
    ``variance_bound="interval"`` bounds the variance of those collision hits
    by the worst Bernoulli variance over the whole calibration range;
    ``"point"`` evaluates it at ``eta_p*pd_bar`` only.
    """
    if k * eta_m >= b:
        raise Infeasible(f"K*eta_m = {k * eta_m:g} >= B = {b}")
    eta = 1.0 / pd_bar if eta_p == UPPER else float(eta_p)
    if eta < 1 or eta * pd_bar > 1 + 1e-12:
        raise ValueError(f"eta_p={eta} outside [1, 1/pd_bar]")
    hit = min(eta * pd_bar, 1.0)
    f = t * k * eta_m / b
    if variance_bound == "interval":
        co = _bernoulli_var_max(pd_bar, hit)
    elif variance_bound == "point":
        co = hit * (1 - hit)
    else:
        raise ValueError(f"unknown variance bound {variance_bound!r}")
    return SecondStageDists(
        mu_a0=f * hit + (t - f) * pfa_bar,
        var_a0=f * co + (t - f) * pfa_bar * (1 - pfa_bar),
        mu_a1=t * pd_bar,
        var_a1=t * pd_bar * (1 - pd_bar),
        f=f,
    )


# -- joint design --------------------------------------------------------------


@dataclass(frozen=True)
class OperatingPoint:
    snr_min_db: float
    gamma: float
    mu: int
    pfa_bar: float
    pd_bar: float
    eta_p: float
    feasible: bool
    t: int
    table: tuple[tuple[int, float, float, float], ...] = field(default=(), repr=False)

    @property
    def snr_min(self) -> float:
        return 10 ** (self.snr_min_db / 10)


def _pd_bar_for(mu: int, t: int, z_d: float) -> float | None:
    """Solve ``(mu - t*p) / sqrt(t*p*(1-p)) = z_d`` for ``p`` in (0, 1)."""
    a = t * t + z_d * z_d * t
    bq = -(2 * mu * t + z_d * z_d * t)
    c = mu * mu
    disc = bq * bq - 4 * a * c
    if disc < 0:
        return None
    for p in ((-bq - math.sqrt(disc)) / (2 * a), (-bq + math.sqrt(disc)) / (2 * a)):
        if 0 < p < 1 and abs((mu - t * p) / math.sqrt(t * p * (1 - p)) - z_d) < 1e-7 * (1 + abs(z_d)):
            return p
    return None


def _solve_pfa_bar(h, lo: float, hi: float) -> float | None:
    """Root in log-space of a decreasing constraint ``h``; None if not bracketed."""
    if not (h(lo) > 0 > h(hi)):
        return None
    return bisect(h, lo, hi, xtol=1e-300, rtol=1e-12, maxiter=500)


def _a0_margin(mu, pd_bar, t, k, eta_m, eta_p, b, z_f, bound):
    def h(log_q):
        d = stage2_dists(pd_bar, math.exp(log_q), t, k, eta_m, eta_p, b, bound)
        return (mu - d.mu_a0) / math.sqrt(d.var_a0) - z_f

    return h


def optimize(
    pd: float,
    pfa: float,
    n: int,
    b: int,
    t: int,
    k: int,
    eta_m: float,
    eta_p: EtaP,
    omega_m: float,
    windows=None,
    noise_var: float = 1.0,
    stats: StageOneStats | None = None,
    variance_bound: VarianceBound = "interval",
) -> OperatingPoint:
    """Smallest worst-case SNR meeting ``(pd, pfa)``, enumerating the count threshold.

    For each ``mu`` the detection target fixes ``pd_bar``, the false-alarm
    target then fixes ``pfa_bar`` (bisection on its log), and the first-stage
    power law turns the pair into an SNR. ``stats`` overrides the gain
    averages (used for N-D problems); otherwise they are computed
    exhaustively at ``omega_m`` from ``windows``.
    """
    if not 0 < pfa < pd < 1:
        raise ValueError(f"need 0 < pfa < pd < 1, got pfa={pfa}, pd={pd}")
    if k * eta_m >= b:
        raise Infeasible(f"K*eta_m = {k * eta_m:g} >= B = {b}")
    if stats is None:
        stats = average_alpha_beta(omega_m, windows or default_windows(n, b), n, b)
    z_d, z_f = float(qinv(pd)), float(qinv(pfa))
    lo = math.log(pfa * 1e-6)
    table = []
    best = None
    for mu in range(1, t + 1):
        p = _pd_bar_for(mu, t, z_d)
        if p is None:
            continue
        log_q = _solve_pfa_bar(_a0_margin(mu, p, t, k, eta_m, eta_p, b, z_f, variance_bound), lo, math.log(p))
        if log_q is None:
            continue
        snr = stats.beta_bar / stats.alpha_bar * (log_q / math.log(p) - 1)
        table.append((mu, 10 * math.log10(snr), math.exp(log_q), p))
        if best is None or snr < best[0]:
            best = (snr, mu, log_q, p)
    if best is None:
        raise NoSolution("no count threshold meets both targets")
    snr, mu, log_q, p = best
    return OperatingPoint(
        snr_min_db=10 * math.log10(snr),
        gamma=-noise_var * stats.beta_bar * log_q,
        mu=mu,
        pfa_bar=math.exp(log_q),
        pd_bar=p,
        eta_p=1.0 / p if eta_p == UPPER else float(eta_p),
        feasible=True,
        t=t,
        table=tuple(table),
    )


def _count_tail(mu: int, t: int, mean: float, var: float, tail: str) -> float:
    """``P(count >= mu)`` for a count with the given mean and variance."""
    if tail == "normal":
        return float(qfunc((mu - mean) / math.sqrt(var)))
    if tail == "binomial":
        # mean-matched binomial; it bounds the tail of any sum of independent
        # Bernoulli marks with that mean from above (Hoeffding)
        return float(binom.sf(mu - 1, t, min(mean / t, 1.0)))
    raise ValueError(f"unknown tail {tail!r}")


def design_for_snr(
    snr_db: float,
    pd: float,
    t: int,
    k: int,
    eta_m: float,
    eta_p: EtaP,
    b: int,
    stats: StageOneStats,
    noise_var: float = 1.0,
    tail: str = "normal",
    variance_bound: VarianceBound = "interval",
) -> tuple[OperatingPoint, float]:
    """Thresholds for a known SNR: hold ``P_d`` at ``pd`` and minimise ``P_fa``.

    Returns the operating point and the false-alarm probability it achieves.
    ``tail="binomial"`` replaces the Normal count tails, which matters for
    small ``t``.
    """
    if k * eta_m >= b:
        raise Infeasible(f"K*eta_m = {k * eta_m:g} >= B = {b}")
    snr = 10 ** (snr_db / 10)
    ratio = (stats.alpha_bar * snr + stats.beta_bar) / stats.beta_bar
    z_d = float(qinv(pd))
    best = None
    for mu in range(1, t + 1):
        if tail == "binomial":
            p = brentq(lambda x: binom.sf(mu - 1, t, x) - pd, 1e-15, 1 - 1e-15, xtol=1e-14)
        else:
            p = _pd_bar_for(mu, t, z_d)
            if p is None:
                continue
        log_q = ratio * math.log(p)
        d = stage2_dists(p, math.exp(log_q), t, k, eta_m, eta_p, b, variance_bound)
        pfa = _count_tail(mu, t, d.mu_a0, d.var_a0, tail)
        if best is None or pfa < best[0]:
            best = (pfa, mu, p, log_q)
    if best is None:
        raise NoSolution("no count threshold reaches the detection target")
    pfa, mu, p, log_q = best
    op = OperatingPoint(
        snr_min_db=snr_db,
        gamma=-noise_var * stats.beta_bar * log_q,
        mu=mu,
        pfa_bar=math.exp(log_q),
        pd_bar=p,
        eta_p=1.0 / p if eta_p == UPPER else float(eta_p),
        feasible=True,
        t=t,
    )
    return op, pfa


def _capped(eta_p: EtaP, pd_bar: float) -> EtaP:
    """A fixed calibration factor cannot exceed its upper end ``1/pd_bar``."""
    return eta_p if eta_p == UPPER else min(float(eta_p), 1.0 / pd_bar)


def rsft_roc(
    snr_db: float,
    pfa_values,
    t: int,
    k: int,
    eta_m: float,
    eta_p: EtaP,
    b: int,
    stats: StageOneStats,
    variance_bound: VarianceBound = "interval",
) -> np.ndarray:
    """Best achievable ``P_d`` at each target ``P_fa`` for a fixed SNR.

    For every count threshold the false-alarm target pins ``pfa_bar`` (with
    ``pd_bar`` tied to it by the first-stage power law); the detection
    probability of the best threshold is reported. A numeric ``eta_p`` is
    capped at ``1/pd_bar`` wherever that is smaller.
    """
    snr = 10 ** (snr_db / 10)
    expo = stats.beta_bar / (stats.alpha_bar * snr + stats.beta_bar)
    out = []
    for pfa in np.atleast_1d(pfa_values):
        z_f = float(qinv(pfa))
        best = 0.0
        for mu in range(1, t + 1):

            def h(log_q, mu=mu):
                p = math.exp(expo * log_q)
                d = stage2_dists(p, math.exp(log_q), t, k, eta_m, _capped(eta_p, p), b, variance_bound)
                return (mu - d.mu_a0) / math.sqrt(d.var_a0) - z_f

            log_q = _solve_pfa_bar(h, -700.0, -1e-12)
            if log_q is None:
                continue
            p = math.exp(expo * log_q)
            pd = float(qfunc((mu - t * p) / math.sqrt(t * p * (1 - p))))
            best = max(best, pd)
        out.append(best)
    return np.array(out)


def freq_sweep(omegas, pd, pfa, n, b, t, k, eta_m, eta_p, windows=None, **kw) -> list[OperatingPoint]:
    """Operating point for each design frequency (beta_bar does not depend on it)."""
    windows = windows or default_windows(n, b)
    return [optimize(pd, pfa, n, b, t, k, eta_m, eta_p, om, windows, **kw) for om in omegas]


def variance_gap(stats: StageOneStats, gamma: float, snr: float, t: int, runs: int, seed: int = 0) -> np.ndarray:
    """Relative gap between the variance bound and the exact count variance, per run.

    Each run draws ``t`` multipliers. Given them, the count at the true index
    is a sum of independent marks with probabilities ``P(sigma_s)``, whose
    variance ``sum P(1-P)`` is compared with the bound ``t*P_bar*(1-P_bar)``,
    ``P_bar`` being the exact mean over all multipliers.
    """
    p = stage1_pd_per_sigma(gamma, snr, stats)
    p_bar = p.mean()
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(t,)))
    draws = p[rng.integers(0, len(p), size=(runs, t))]
    exact = np.sum(draws * (1 - draws), axis=1)
    return (t * p_bar * (1 - p_bar) - exact) / exact
