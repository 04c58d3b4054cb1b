"""Two-stage RSFT detector.

First stage, per segment: pre-window, modular permutation, flat window,
alias to the reduced grid, DFT, square-law, threshold ``gamma``. Marked
buckets are mapped back to every full-grid index they may hold and counted.
Second stage: keep the indices counted in at least ``mu`` segments.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .sft_core import alias_batch, permute_batch, random_sigma
from .windows import FlatWindowSpec, WindowSpec, compound_window, design_pair, pipeline_pair

DENSE_LIMIT = 1 << 20
CHUNK = 64


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class RsftConfig:
    dims: tuple[int, ...]
    reduced: tuple[int, ...]
    t: int
    gamma: float
    mu: int
    prewindow: tuple[WindowSpec, ...]
    flatwindow: tuple[FlatWindowSpec, ...]
    seed: int = 0

    def __post_init__(self):
        for name in ("dims", "reduced", "prewindow", "flatwindow"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not (len(self.dims) == len(self.reduced) == len(self.prewindow) == len(self.flatwindow)):
            raise ValueError("dims, reduced and the window lists must have one entry per axis")
        for n_d, b_d, pre, flat in zip(self.dims, self.reduced, self.prewindow, self.flatwindow):
            if not (_is_pow2(n_d) and _is_pow2(b_d)) or b_d > n_d:
                raise ValueError(f"axis ({n_d}, {b_d}): need powers of two with b <= n")
            if pre.n != n_d or flat.n != n_d or flat.b != b_d:
                raise ValueError(f"windows do not match axis ({n_d}, {b_d})")
        if self.t < 1:
            raise ValueError("t must be >= 1")
        if not 1 <= self.mu <= self.t:
            raise ValueError(f"mu must lie in [1, {self.t}], got {self.mu}")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")

    @classmethod
    def build(cls, dims, reduced, t, gamma, mu, pre_db=40.0, flat_db=40.0, seed=0) -> "RsftConfig":
        dims, reduced = tuple(dims), tuple(reduced)
        pairs = [design_pair(n, b, pre_db, flat_db) for n, b in zip(dims, reduced)]
        return cls(dims, reduced, t, gamma, mu, [p for p, _ in pairs], [f for _, f in pairs], seed)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @cached_property
    def _windows(self) -> tuple[np.ndarray, np.ndarray]:
        pairs = [pipeline_pair(p, f) for p, f in zip(self.prewindow, self.flatwindow)]
        return compound_window([w for w, _ in pairs]), compound_window([wb for _, wb in pairs])

    def draw_sigmas(self) -> np.ndarray:
        """Per-segment, per-axis permutation multipliers, shape ``(t, ndim)``."""
        rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(1,)))
        return np.stack([random_sigma(n, rng, size=self.t) for n in self.dims], axis=1)


def first_stage_power(segments: np.ndarray, cfg: RsftConfig, sigmas: np.ndarray) -> np.ndarray:
    """Reduced-grid powers ``|f_hat|^2`` for a batch of segments.

    ``segments`` has shape ``(S, *dims)`` and ``sigmas`` shape ``(S, ndim)``.
    """
    w, wbar = cfg._windows
    axes = tuple(range(1, cfg.ndim + 1))
    z = permute_batch(segments * w, np.asarray(sigmas)) * wbar
    spec = np.fft.fftn(alias_batch(z, cfg.reduced), axes=axes)
    return spec.real**2 + spec.imag**2


def first_stage(segment: np.ndarray, cfg: RsftConfig, sigmas) -> np.ndarray:
    """Boolean mask over the reduced grid for one segment."""
    power = first_stage_power(np.asarray(segment)[None], cfg, np.atleast_2d(sigmas))
    return power[0] > cfg.gamma


def _strides(dims: tuple[int, ...]) -> np.ndarray:
    return np.array([math.prod(dims[d + 1 :]) for d in range(len(dims))], dtype=np.int64)


def _linear_candidates(mask: np.ndarray, sigma: np.ndarray, dims, reduced) -> np.ndarray:
    """Linear full-grid indices covered by the marked buckets of one segment."""
    cells = np.argwhere(mask)
    if len(cells) == 0:
        return np.empty(0, dtype=np.int64)
    strides = _strides(dims)
    ndim = len(dims)
    lin = np.zeros([len(cells)] + [1] * ndim, dtype=np.int64)
    for d, (n_d, b_d) in enumerate(zip(dims, reduced)):
        bucket_len = n_d // b_d
        inv = pow(int(sigma[d]), -1, n_d)
        u = cells[:, d, None] * bucket_len + np.arange(bucket_len)
        shape = [len(cells)] + [1] * ndim
        shape[1 + d] = bucket_len
        lin = lin + (inv * u % n_d * strides[d]).reshape(shape)
    return lin.ravel()


def accumulate(masks, sigmas, dims, reduced) -> dict[tuple[int, ...], int]:
    """Count, for every full-grid index, the segments whose marked buckets cover it."""
    dims, reduced = tuple(dims), tuple(reduced)
    lin = [_linear_candidates(m, s, dims, reduced) for m, s in zip(masks, sigmas)]
    return _counts_to_map(np.concatenate(lin) if lin else np.empty(0, np.int64), dims)


def _counts_to_map(lin: np.ndarray, dims) -> dict[tuple[int, ...], int]:
    size = math.prod(dims)
    if size <= DENSE_LIMIT:
        counts = np.bincount(lin, minlength=size)
        keys = np.nonzero(counts)[0]
        vals = counts[keys]
    else:
        keys, vals = np.unique(lin, return_counts=True)
    tuples = np.stack(np.unravel_index(keys, dims), axis=1)
    return {tuple(int(v) for v in row): int(c) for row, c in zip(tuples, vals)}


def second_stage(acc: dict[tuple[int, ...], int], mu: int) -> list[tuple[int, ...]]:
    if mu < 1:
        raise ValueError(f"mu must be >= 1, got {mu}")
    return sorted(k for k, c in acc.items() if c >= mu)


@dataclass(frozen=True)
class DetectionReport:
    dims: tuple[int, ...]
    reduced: tuple[int, ...]
    t: int
    mu: int
    sigmas: np.ndarray
    first_stage_masks: tuple[np.ndarray, ...]
    accumulator: dict[tuple[int, ...], int] = field(repr=False)
    detections: tuple[tuple[int, ...], ...]

    def count(self, index) -> int:
        return self.accumulator.get(tuple(np.atleast_1d(index).tolist()), 0)

    def marked_per_segment(self) -> np.ndarray:
        return np.array([int(m.sum()) for m in self.first_stage_masks])

    def rows(self):
        """``(index tuple, count, count / t)`` for every non-zero accumulator cell."""
        return [(k, c, c / self.t) for k, c in sorted(self.accumulator.items())]


def _chunks(segments, cfg: RsftConfig):
    if isinstance(segments, np.ndarray) and segments.shape[1:] == cfg.dims:
        for start in range(0, len(segments), CHUNK):
            yield segments[start : start + CHUNK]
        return
    for seg in segments:
        seg = np.asarray(seg)
        if seg.shape != cfg.dims:
            raise ValueError(f"segment shape {seg.shape} does not match {cfg.dims}")
        yield seg[None]


def rsft_run(segments: Iterable[np.ndarray], cfg: RsftConfig, sigmas=None) -> DetectionReport:
    """Run both stages over exactly ``cfg.t`` segments.

    ``segments`` may be a ``(t, *dims)`` array or any iterable of arrays; it is
    consumed chunk by chunk, so generators keep memory bounded.
    """
    sigmas = cfg.draw_sigmas() if sigmas is None else np.asarray(sigmas).reshape(cfg.t, cfg.ndim)
    masks: list[np.ndarray] = []
    lin: list[np.ndarray] = []
    for chunk in _chunks(segments, cfg):
        start = len(masks)
        if start + len(chunk) > cfg.t:
            raise ValueError(f"received more than t={cfg.t} segments")
        marked = first_stage_power(chunk, cfg, sigmas[start : start + len(chunk)]) > cfg.gamma
        for i, m in enumerate(marked):
            masks.append(m)
            lin.append(_linear_candidates(m, sigmas[start + i], cfg.dims, cfg.reduced))
    if len(masks) != cfg.t:
        raise ValueError(f"expected t={cfg.t} segments, got {len(masks)}")
    acc = _counts_to_map(np.concatenate(lin), cfg.dims)
    return DetectionReport(
        cfg.dims, cfg.reduced, cfg.t, cfg.mu, sigmas, tuple(masks), acc,
        tuple(second_stage(acc, cfg.mu)),
    )


def collision_counts(true_indices, sigmas, dims, reduced) -> np.ndarray:
    """Per segment, how many buckets hold two or more of the given true indices."""
    true = np.atleast_2d(np.asarray(true_indices))
    out = []
    for sigma in np.asarray(sigmas):
        buckets = [
            tuple(int(idx[d] * sigma[d] % n * b // n) for d, (n, b) in enumerate(zip(dims, reduced)))
            for idx in true
        ]
        _, counts = np.unique(np.array(buckets), axis=0, return_counts=True)
        out.append(int((counts > 1).sum()))
    return np.array(out)
