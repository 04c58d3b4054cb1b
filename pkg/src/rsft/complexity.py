"""Operation counts for the RSFT and the Bartlett detector.

``*_rows`` give exact per-step counts; ``*_model`` give the asymptotic
expressions used to compare designs and pick the bucket count.
"""

from __future__ import annotations

import math


def _check(**kw):
    for name, v in kw.items():
        if v <= 0:
            raise ValueError(f"{name} must be positive, got {v}")


def bartlett_rows(n: int, t: int) -> dict[str, float]:
    _check(n=n, t=t)
    return {
        "window": t * n,
        "fft": t * n / 2 * math.log2(n),
        "square": t * n,
        "detect": n,
    }


def rsft_rows(n: int, b: int, t: int, k: float, eta_m: float, eta_p: float) -> dict[str, float]:
    _check(n=n, b=b, t=t, eta_m=eta_m, eta_p=eta_p)
    return {
        "prewindow": t * n,
        "permute": t * n,
        "flatwindow": t * n,
        "alias": t * b * (n / b - 1),
        "fft": t * b / 2 * math.log2(b),
        "square": t * b,
        "detect1": t * b,
        "reverse_map": t * k * eta_m * n / (b * eta_p),
        "detect2": n,
    }


def complexity_bartlett(n: int, t: int) -> float:
    return sum(bartlett_rows(n, t).values())


def complexity_rsft(n: int, b: int, t: int, k: float, eta_m: float, eta_p: float) -> float:
    return sum(rsft_rows(n, b, t, k, eta_m, eta_p).values())


def complexity_bartlett_model(n: int, t: int) -> float:
    _check(n=n, t=t)
    return t * n * (1 + math.log2(n)) + n


def complexity_rsft_model(n: int, b: int, t: int, k: float, eta_m: float, eta_p: float) -> float:
    _check(n=n, b=b, t=t, eta_m=eta_m, eta_p=eta_p)
    return t * (n + b + b * math.log2(b) + k * eta_m * n / (b * eta_p)) + n


def best_bucket_count(
    n: int, t: int, k: float, eta_m: float, eta_p: float,
    candidates=None, model: bool = True, feasible_only: bool = False,
) -> int:
    """Power-of-two bucket count with the lowest operation count.

    By default every candidate competes; ``feasible_only`` drops those with
    ``k * eta_m >= b``.
    """
    candidates = list(candidates or [2**e for e in range(3, int(math.log2(n)) + 1)])
    if feasible_only:
        candidates = [b for b in candidates if k * eta_m < b]
        if not candidates:
            raise ValueError("no feasible bucket count")
    cost = complexity_rsft_model if model else complexity_rsft
    return min(candidates, key=lambda b: (cost(n, b, t, k, eta_m, eta_p), b))
