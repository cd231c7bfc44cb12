"""Truncated weighted-jump series and their convergence diagnostics.

The central object is the partial sum

    ``X_n(t) = sum_{i<=n} w_i eps_i Y_i(t)``

with weights either ``Gamma_i^(-1/alpha)`` (Poisson arrival times) or the
deterministic ``i^(-1/alpha)``, and multipliers either raw or truncated to
``eps_i 1{|eps_i|^alpha <= i}``.  A :class:`SeriesRealization` owns one
realization of all three ingredient sequences and can be extended to deeper
truncation without disturbing the terms already drawn, which is what the
Cauchy-increment diagnostics measure.

Replicate ``r`` of any experiment uses the stream ``(seed, r)``; the
chunked samplers at the bottom vectorize across fixed-size blocks of
replicates (one substream per block) so large Monte Carlo runs stay fast
while remaining bit-reproducible for any thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import paths as _paths
from .paths import StepPath
from .random_inputs import (
    ConfigurationError,
    EpsilonSpec,
    TermEvents,
    YGeneratorSpec,
    _EPSILON_ROLE,
    _GAMMA_ROLE,
    _Y_ROLE,
    _positive_exponentials,
    interval_increments,
    term_sup_norms,
    term_value_extremes,
    values_at,
)
from .rng import RngStream

__all__ = [
    "SeriesSpec",
    "PartialSumResult",
    "SeriesRealization",
    "truncate_epsilon",
    "partial_sum",
    "coupled_partial_sums",
    "gamma_deterministic_gap",
    "sample_marginals",
    "sample_path_stats",
    "PathStatsSample",
]

# substream tags for the chunked multi-replicate samplers
_TAG_MARGINAL = 101
_TAG_PATH_STATS = 102
_TAG_INCREMENTS = 103

# target number of jump events held in memory per vectorized chunk
_CHUNK_TARGET = 1 << 22


@dataclass(frozen=True)
class SeriesSpec:
    """Complete recipe for one series experiment.

    ``weight_mode`` selects ``gamma`` (arrival-time weights) or
    ``deterministic`` (``i^(-1/alpha)``); ``epsilon_mode`` selects ``raw``
    multipliers or their index-dependent truncation.  For ``alpha >= 1``
    the multiplier family must be mean-zero.
    """

    alpha: float
    truncation_n: int
    epsilon: EpsilonSpec
    y_gen: YGeneratorSpec
    seed: int = 0
    weight_mode: str = "gamma"
    epsilon_mode: str = "raw"

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 2.0:
            raise ConfigurationError(
                f"alpha must lie in the open interval (0, 2), got {self.alpha}"
            )
        if self.truncation_n < 0:
            raise ConfigurationError(f"truncation_n must be nonnegative, got {self.truncation_n}")
        if self.weight_mode not in ("gamma", "deterministic"):
            raise ConfigurationError(f"unknown weight_mode {self.weight_mode!r}")
        if self.epsilon_mode not in ("raw", "truncated"):
            raise ConfigurationError(f"unknown epsilon_mode {self.epsilon_mode!r}")
        self.epsilon.require_mean_zero(self.alpha)

    @property
    def dimension(self) -> int:
        return self.y_gen.dimension

    def echo(self) -> dict:
        return {
            "alpha": self.alpha,
            "truncation_n": self.truncation_n,
            "weight_mode": self.weight_mode,
            "epsilon_mode": self.epsilon_mode,
            "epsilon": self.epsilon.echo(),
            "y": self.y_gen.echo(),
            "seed": self.seed,
        }


@dataclass(frozen=True)
class PartialSumResult:
    """A partial sum realized as an exact step path."""

    path: StepPath
    terms_used: int
    weight_mode: str
    epsilon_mode: str
    per_term_norms: np.ndarray | None = None


def truncate_epsilon(eps: float, index: int, alpha: float) -> float:
    """``eps`` if ``|eps|^alpha <= index``, else 0."""
    if index < 1:
        raise ConfigurationError(f"index must be >= 1, got {index}")
    if not 0.0 < alpha < 2.0:
        raise ConfigurationError(f"alpha must lie in (0, 2), got {alpha}")
    return float(eps) if abs(eps) ** alpha <= index else 0.0


def _truncate_block(eps: np.ndarray, indices: np.ndarray, alpha: float) -> np.ndarray:
    return np.where(np.abs(eps) ** alpha <= indices, eps, 0.0)


class SeriesRealization:
    """One realization of (Gamma, eps, Y), extendable term by term.

    All draws come from three ingredient substreams of ``stream`` consumed
    in term order, so the first ``m`` terms are identical no matter how far
    the realization has been extended.
    """

    def __init__(self, spec: SeriesSpec, stream: RngStream | None = None):
        self.spec = spec
        stream = RngStream(spec.seed) if stream is None else stream
        self._gamma_gen = stream.substream(_GAMMA_ROLE).generator()
        self._eps_gen = stream.substream(_EPSILON_ROLE).generator()
        self._y_sampler = spec.y_gen.block_sampler(stream.substream(_Y_ROLE))
        self._gaps = np.empty(0)
        self._gammas = np.empty(0)
        self._eps = np.empty(0)
        self._blocks: list[TermEvents] = []
        self._events: TermEvents | None = None

    @property
    def n_terms(self) -> int:
        return self._gammas.size

    def extend(self, n: int) -> None:
        """Ensure at least ``n`` terms have been drawn."""
        new = n - self.n_terms
        if new <= 0:
            return
        self._gaps = np.concatenate([self._gaps, _positive_exponentials(self._gamma_gen, new)])
        # one full cumsum, so arrival times do not depend on extension granularity
        self._gammas = np.cumsum(self._gaps)
        self._eps = np.concatenate([self._eps, self.spec.epsilon.sample(self._eps_gen, new)])
        self._blocks.append(self._y_sampler.take(new))
        self._events = None

    def gammas(self, n: int) -> np.ndarray:
        self.extend(n)
        return self._gammas[:n]

    def eps_raw(self, n: int) -> np.ndarray:
        self.extend(n)
        return self._eps[:n]

    def events(self, n: int) -> TermEvents:
        self.extend(n)
        if self._events is None or self._events.n_terms < self.n_terms:
            self._events = TermEvents.concatenate(self._blocks) if self._blocks else None
        return self._events.prefix(n)

    def weights(self, n: int) -> np.ndarray:
        if self.spec.weight_mode == "gamma":
            return self.gammas(n) ** (-1.0 / self.spec.alpha)
        return np.arange(1, n + 1, dtype=np.float64) ** (-1.0 / self.spec.alpha)

    def eps_used(self, n: int) -> np.ndarray:
        eps = self.eps_raw(n)
        if self.spec.epsilon_mode == "truncated":
            return _truncate_block(eps, np.arange(1, n + 1, dtype=np.float64), self.spec.alpha)
        return eps

    def coeffs(self, n: int) -> np.ndarray:
        return self.weights(n) * self.eps_used(n)

    def path(self, n: int | None = None) -> StepPath:
        """The partial sum as a step path, merged on one jump grid."""
        n = self.spec.truncation_n if n is None else n
        if n == 0:
            return _paths.zero_path(self.spec.dimension)
        return _combine_term_events(self.coeffs(n), self.events(n))

    def values_at(self, ts, n: int | None = None) -> np.ndarray:
        """Partial-sum values at given times, shape ``(len(ts), d)``."""
        n = self.spec.truncation_n if n is None else n
        ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
        if n == 0:
            return np.zeros((ts.size, self.spec.dimension))
        per_term = values_at(self.events(n), ts)
        return np.einsum("i,ijd->jd", self.coeffs(n), per_term)

    def per_term_norms(self, n: int | None = None) -> np.ndarray:
        """``|w_i eps_i| * sup_norm(Y_i)`` for each term."""
        n = self.spec.truncation_n if n is None else n
        return np.abs(self.coeffs(n)) * term_sup_norms(self.events(n))


def _combine_term_events(coeffs: np.ndarray, events: TermEvents) -> StepPath:
    """n-ary linear combination on one merged jump grid.

    Evaluation agrees with direct per-term scalar accumulation to within
    summation-order rounding (well inside 2^-40 relative).
    """
    d = events.dimension
    initial = coeffs @ events.initials
    if events.times.size == 0:
        return _paths._compressed(d, initial, np.empty(0), np.empty((0, d)))
    deltas = events.heights * coeffs[events.term_index, None]
    order = np.argsort(events.times, kind="stable")
    t_sorted = events.times[order]
    d_sorted = deltas[order]
    uniq, first = np.unique(t_sorted, return_index=True)
    merged = np.add.reduceat(d_sorted, first, axis=0)
    values = initial[None, :] + np.cumsum(merged, axis=0)
    return _paths._compressed(d, initial, uniq, values)


def partial_sum(
    spec: SeriesSpec,
    stream: RngStream | None = None,
    with_term_norms: bool = False,
) -> PartialSumResult:
    """One realization of the truncated series.

    ``stream`` defaults to ``RngStream(spec.seed)``; pass
    ``RngStream(spec.seed, r)`` for replicate ``r``.
    """
    real = SeriesRealization(spec, stream)
    n = spec.truncation_n
    return PartialSumResult(
        path=real.path(n),
        terms_used=n,
        weight_mode=spec.weight_mode,
        epsilon_mode=spec.epsilon_mode,
        per_term_norms=real.per_term_norms(n) if with_term_norms else None,
    )


def coupled_partial_sums(
    spec: SeriesSpec,
    checkpoints,
    stream: RngStream | None = None,
) -> list[PartialSumResult]:
    """Partial sums of one realization at several truncation depths.

    Later results extend earlier ones term by term: the difference of two
    checkpoints is exactly the sum of the in-between terms.
    """
    checkpoints = [int(c) for c in checkpoints]
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ConfigurationError(f"checkpoints must be strictly increasing, got {checkpoints}")
    if any(c < 0 for c in checkpoints):
        raise ConfigurationError(f"checkpoints must be nonnegative, got {checkpoints}")
    real = SeriesRealization(spec, stream)
    out = []
    for c in checkpoints:
        out.append(
            PartialSumResult(
                path=real.path(c),
                terms_used=c,
                weight_mode=spec.weight_mode,
                epsilon_mode=spec.epsilon_mode,
            )
        )
    return out


def gamma_deterministic_gap(spec: SeriesSpec, stream: RngStream | None = None) -> float:
    """``sum_{i<=n} |Gamma_i^(-1/a) - i^(-1/a)| |eps_i| sup_norm(Y_i)``.

    The truncated gap between arrival-time weights and their deterministic
    surrogates, for one realization.
    """
    real = SeriesRealization(spec, stream)
    n = spec.truncation_n
    if n == 0:
        return 0.0
    inv_a = 1.0 / spec.alpha
    det = np.arange(1, n + 1, dtype=np.float64) ** (-inv_a)
    gap = np.abs(real.gammas(n) ** (-inv_a) - det)
    return float(np.sum(gap * np.abs(real.eps_raw(n)) * term_sup_norms(real.events(n))))


# ---------------------------------------------------------------------------
# chunked multi-replicate samplers
# ---------------------------------------------------------------------------


def _chunk_size(n_terms: int) -> int:
    return max(1, min(4096, _CHUNK_TARGET // max(1, n_terms)))


def _chunk_ranges(total: int, size: int):
    return [(c, min(size, total - c * size)) for c in range((total + size - 1) // size)]


def _chunk_coeffs(spec: SeriesSpec, stream: RngStream, m: int) -> tuple[np.ndarray, TermEvents]:
    """Draw m replicates of n terms at once; returns coeffs (m, n) and events.

    Event term index k encodes (replicate k // n, term k % n).
    """
    n = spec.truncation_n
    gaps = _positive_exponentials(stream.substream(_GAMMA_ROLE).generator(), m * n).reshape(m, n)
    eps = spec.epsilon.sample(stream.substream(_EPSILON_ROLE).generator(), m * n).reshape(m, n)
    events = spec.y_gen.block_sampler(stream.substream(_Y_ROLE)).take(m * n)
    idx = np.arange(1, n + 1, dtype=np.float64)
    if spec.weight_mode == "gamma":
        weights = np.cumsum(gaps, axis=1) ** (-1.0 / spec.alpha)
    else:
        weights = np.broadcast_to(idx ** (-1.0 / spec.alpha), (m, n))
    if spec.epsilon_mode == "truncated":
        eps = _truncate_block(eps, idx, spec.alpha)
    return weights * eps, events


def sample_marginals(spec: SeriesSpec, t: float, n_samples: int, map_chunks=None) -> np.ndarray:
    """i.i.d. samples of the partial-sum marginal ``X_n(t)``, shape (n, d).

    Replicates are drawn in fixed-size chunks, one substream per chunk, so
    the output is a pure function of ``(spec, t, n_samples)``.
    """
    if not 0.0 <= t <= 1.0:
        raise ConfigurationError(f"marginal time must lie in [0, 1], got {t}")
    n = spec.truncation_n
    base = RngStream(spec.seed)
    size = _chunk_size(n)

    def one_chunk(c: int, m: int) -> np.ndarray:
        if n == 0:
            return np.zeros((m, spec.dimension))
        coeffs, events = _chunk_coeffs(spec, base.substream(_TAG_MARGINAL, c), m)
        per_term = values_at(events, [t])[:, 0, :].reshape(m, n, spec.dimension)
        return np.einsum("mi,mid->md", coeffs, per_term)

    if n_samples == 0:
        return np.zeros((0, spec.dimension))
    runner = map_chunks or _serial_map
    return np.concatenate(runner(one_chunk, _chunk_ranges(n_samples, size)), axis=0)


@dataclass(frozen=True)
class PathStatsSample:
    """Per-replicate reductions of simulated series paths."""

    sup: np.ndarray  # uniform norm
    vmax: np.ndarray  # largest segment value over all coordinates
    vmin: np.ndarray  # smallest segment value over all coordinates


def sample_path_stats(spec: SeriesSpec, n_samples: int, map_chunks=None) -> PathStatsSample:
    """Norms and extreme segment values of i.i.d. partial-sum paths."""
    n = spec.truncation_n
    base = RngStream(spec.seed)
    size = _chunk_size(n)

    def one_chunk(c: int, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if n == 0:
            z = np.zeros(m)
            return z, z.copy(), z.copy()
        coeffs, events = _chunk_coeffs(spec, base.substream(_TAG_PATH_STATS, c), m)
        rep = events.term_index // n
        deltas = events.heights * coeffs.reshape(-1)[events.term_index, None]
        initials = np.einsum("mi,mid->md", coeffs,
                             events.initials.reshape(m, n, spec.dimension))
        order = np.lexsort((events.times, rep))
        rep_events = TermEvents(m, spec.dimension, rep[order], events.times[order],
                                deltas[order], initials)
        vmax, vmin = term_value_extremes(rep_events)
        return term_sup_norms(rep_events), vmax, vmin

    if n_samples == 0:
        return PathStatsSample(np.zeros(0), np.zeros(0), np.zeros(0))
    runner = map_chunks or _serial_map
    parts = runner(one_chunk, _chunk_ranges(n_samples, size))
    return PathStatsSample(
        sup=np.concatenate([p[0] for p in parts]),
        vmax=np.concatenate([p[1] for p in parts]),
        vmin=np.concatenate([p[2] for p in parts]),
    )


def sample_weighted_increments(
    spec: SeriesSpec,
    intervals,
    n_samples: int,
    map_chunks=None,
) -> np.ndarray:
    """Joint samples of partial-sum increments over the given intervals.

    Returns shape ``(n_samples, len(intervals), d)``.
    """
    n = spec.truncation_n
    base = RngStream(spec.seed)
    size = _chunk_size(n)
    intervals = [(float(a), float(b)) for a, b in intervals]

    def one_chunk(c: int, m: int) -> np.ndarray:
        if n == 0:
            return np.zeros((m, len(intervals), spec.dimension))
        coeffs, events = _chunk_coeffs(spec, base.substream(_TAG_INCREMENTS, c), m)
        inc = interval_increments(events, intervals).reshape(m, n, len(intervals), spec.dimension)
        return np.einsum("mi,mijd->mjd", coeffs, inc)

    if n_samples == 0:
        return np.zeros((0, len(intervals), spec.dimension))
    runner = map_chunks or _serial_map
    return np.concatenate(runner(one_chunk, _chunk_ranges(n_samples, size)), axis=0)


def _serial_map(fn, ranges):
    return [fn(c, m) for c, m in ranges]
