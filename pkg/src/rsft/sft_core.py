"""Modular permutation, aliasing and the bucket index maps of the sparse FFT.

Conventions (length ``n``, ``b`` buckets, ``L = n // b``):

* permutation: ``(P x)[i] = x[(sigma*i + tau) % n]``
* alias:       ``y[i] = sum_j x[i + b*j]``
* a permuted bin ``k`` lands in bucket ``k // L``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class NonInvertible(ValueError):
    """Raised when ``sigma`` has no inverse modulo ``n``."""


def mod_inverse(sigma: int, n: int) -> int:
    try:
        return pow(int(sigma), -1, int(n))
    except ValueError:
        raise NonInvertible(f"{sigma} has no inverse modulo {n}") from None


def random_sigma(n: int, rng: np.random.Generator, size=None):
    """Uniform odd ``sigma`` in ``[1, n)``; odd is invertible for power-of-two ``n``."""
    return 2 * rng.integers(0, n // 2, size=size) + 1


@dataclass(frozen=True)
class PermutationParam:
    sigma: int
    n: int
    tau: int = 0
    sigma_inv: int = field(init=False)

    def __post_init__(self):
        if math.gcd(self.sigma, self.n) != 1:
            raise NonInvertible(f"gcd({self.sigma}, {self.n}) != 1")
        if not 0 <= self.tau < self.n:
            raise ValueError(f"tau must lie in [0, {self.n}), got {self.tau}")
        object.__setattr__(self, "sigma_inv", mod_inverse(self.sigma, self.n))

    def inverse(self) -> "PermutationParam":
        """Parameters of the permutation that undoes this one."""
        return PermutationParam(self.sigma_inv, self.n, (-self.sigma_inv * self.tau) % self.n)


@dataclass(frozen=True)
class AliasShape:
    n: int
    b: int

    def __post_init__(self):
        if self.b < 1 or self.n % self.b:
            raise ValueError(f"b={self.b} must divide n={self.n}")

    @property
    def bucket_len(self) -> int:
        return self.n // self.b


def permute(x: np.ndarray, p: PermutationParam) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1] != p.n:
        raise ValueError(f"length {x.shape[-1]} does not match n={p.n}")
    idx = (p.sigma * np.arange(p.n) + p.tau) % p.n
    return x[..., idx]


def alias(x: np.ndarray, shape: AliasShape) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1] != shape.n:
        raise ValueError(f"length {x.shape[-1]} does not match n={shape.n}")
    return x.reshape(*x.shape[:-1], shape.bucket_len, shape.b).sum(axis=-2)


def map_index(i, sigma: int, n: int, b: int):
    """Bucket that original bin ``i`` falls into after permutation by ``sigma``."""
    return (np.asarray(i) * sigma % n) * b // n


def reverse_map(j: int, sigma_inv: int, n: int, b: int) -> np.ndarray:
    """Original bins whose permuted image lands in bucket ``j`` (sorted)."""
    if not 0 <= j < b:
        raise ValueError(f"bucket {j} out of range [0, {b})")
    bucket_len = n // b
    u = np.arange(j * bucket_len, (j + 1) * bucket_len)
    return np.sort(sigma_inv * u % n)


def nearest_bin(omega: float, n: int) -> int:
    """Closest DFT grid index to ``omega``; exact half-bin ties go to the lower bin."""
    k = math.ceil(omega * n / (2 * np.pi) - 0.5)
    return k % n


def peak_bucket(omega: float, sigma: int, n: int, b: int) -> int:
    """Bucket that carries the largest response for a sinusoid at ``omega``."""
    return int(map_index(nearest_bin(omega, n), sigma, n, b))


# -- N-D helpers operating on a leading batch axis ---------------------------


def permute_batch(x: np.ndarray, sigmas: np.ndarray) -> np.ndarray:
    """Permute every trailing axis of each batch item with its own ``sigma``.

    ``x`` has shape ``(S, n_1, ..., n_D)`` and ``sigmas`` shape ``(S, D)``.
    """
    out = x
    ndim = x.ndim - 1
    for d in range(ndim):
        n_d = x.shape[1 + d]
        idx = sigmas[:, d, None] * np.arange(n_d) % n_d
        shape = [len(sigmas)] + [1] * ndim
        shape[1 + d] = n_d
        out = np.take_along_axis(out, idx.reshape(shape), axis=1 + d)
    return out


def alias_batch(x: np.ndarray, reduced: tuple[int, ...]) -> np.ndarray:
    """Alias every trailing axis of ``x`` (shape ``(S, *dims)``) down to ``reduced``."""
    dims = x.shape[1:]
    split = [x.shape[0]]
    for n_d, b_d in zip(dims, reduced):
        split += [n_d // b_d, b_d]
    return x.reshape(split).sum(axis=tuple(range(1, 2 * len(dims), 2)))
