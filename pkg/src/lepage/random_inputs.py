"""Seedable generators for the three series ingredients.

The weighted-jump series needs three independent i.i.d. sequences: Poisson
arrival times ``Gamma_1 < Gamma_2 < ...`` (cumulative unit exponentials),
real multipliers ``eps_i``, and cadlag step paths ``Y_i``.  Everything here
is a pure function of an :class:`~lepage.rng.RngStream`, so replicate
``r`` sees the same draws whether it runs serially or on a thread pool.

Path generators hand out their draws in *blocks of terms*
(:class:`TermEvents`): a flat list of jump events tagged with the index of
the term they belong to.  Each ingredient consumes its own substream in
term order, which makes a realization extendable: asking a sampler for
more terms never changes the terms already drawn.  Partial sums observed
at several truncation depths therefore share one realization bit for bit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .paths import PathValidationError, StepPath
from .rng import RngStream

__all__ = [
    "ConfigurationError",
    "GammaSequence",
    "gamma_sequence",
    "EpsilonSpec",
    "draw_epsilon",
    "draw_epsilons",
    "CdfGrid",
    "JumpHeightDist",
    "YGeneratorSpec",
    "unit_jump",
    "weighted_jumps",
    "poisson_counts",
    "user_paths",
    "gen_path",
    "TermEvents",
    "interval_increments",
    "values_at",
    "term_sup_norms",
    "term_value_extremes",
]

# substream roles inside one replicate
_GAMMA_ROLE = 0
_EPSILON_ROLE = 1
_Y_ROLE = 2


class ConfigurationError(ValueError):
    """Raised when a distribution or generator spec is invalid."""


# ---------------------------------------------------------------------------
# Poisson arrival times
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaSequence:
    """Strictly increasing arrival times of a unit-rate Poisson process."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if v.size and (v[0] <= 0.0 or np.any(np.diff(v) <= 0.0)):
            raise ConfigurationError("arrival times must be positive and strictly increasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    @property
    def increments(self) -> np.ndarray:
        """The exponential inter-arrival gaps (all positive)."""
        return np.diff(self.values, prepend=0.0)


def _positive_exponentials(gen: np.random.Generator, n: int) -> np.ndarray:
    out = gen.standard_exponential(n)
    # an exactly-zero draw would break strict monotonicity of the cumsum
    while True:
        bad = out == 0.0
        if not bad.any():
            return out
        out[bad] = gen.standard_exponential(int(bad.sum()))


def gamma_sequence(n: int, stream: RngStream) -> GammaSequence:
    """First ``n`` arrival times, as cumulative sums of Exp(1) draws."""
    if n < 0:
        raise ConfigurationError(f"n must be nonnegative, got {n}")
    gen = stream.generator()
    return GammaSequence(np.cumsum(_positive_exponentials(gen, n)))


# ---------------------------------------------------------------------------
# multiplier distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonSpec:
    """Distribution of the i.i.d. real multipliers.

    Families
    --------
    rademacher
        Uniform on {-1, +1}.
    uniform_symmetric
        Uniform on [-a, a].
    two_point
        Atoms ``x_neg`` (probability p) and ``x_pos`` (probability 1-p);
        the mean is required to be zero at construction.
    table
        Finite atom list with arbitrary probabilities (may have nonzero
        mean, which restricts it to exponents below 1).

    All moment functionals used by the analytic diagnostics
    (absolute moments, truncated moments, tail probabilities) are computed
    in closed form, vectorized over the truncation cutoff.
    """

    family: str
    a: float = 1.0
    atom_values: np.ndarray | None = None
    atom_probs: np.ndarray | None = None
    alpha_moment_hint: float | None = None

    def __post_init__(self) -> None:
        if self.family == "uniform_symmetric":
            if not (self.a > 0.0 and np.isfinite(self.a)):
                raise ConfigurationError(f"uniform_symmetric needs a > 0, got {self.a}")
        elif self.family in ("rademacher", "two_point", "table"):
            if self.atom_values is None or self.atom_probs is None:
                raise ConfigurationError(
                    f"{self.family} spec needs atoms; use the EpsilonSpec.{self.family}() constructor"
                )
            v = np.asarray(self.atom_values, dtype=np.float64).reshape(-1)
            p = np.asarray(self.atom_probs, dtype=np.float64).reshape(-1)
            if v.size == 0 or v.shape != p.shape:
                raise ConfigurationError("atom values and probabilities must be nonempty and equal length")
            if np.any(p < 0.0) or np.any(p > 1.0) or abs(p.sum() - 1.0) > 1e-12:
                raise ConfigurationError(f"probabilities must lie in [0,1] and sum to 1, got {p.tolist()}")
            if not np.all(np.isfinite(v)):
                raise ConfigurationError("atom values must be finite")
            v.setflags(write=False)
            p.setflags(write=False)
            object.__setattr__(self, "atom_values", v)
            object.__setattr__(self, "atom_probs", p)
        else:
            raise ConfigurationError(f"unknown multiplier family {self.family!r}")

    # -- constructors -------------------------------------------------

    @classmethod
    def rademacher(cls) -> "EpsilonSpec":
        return cls("rademacher", atom_values=np.array([-1.0, 1.0]), atom_probs=np.array([0.5, 0.5]))

    @classmethod
    def uniform_symmetric(cls, a: float) -> "EpsilonSpec":
        return cls("uniform_symmetric", a=float(a))

    @classmethod
    def two_point(cls, p: float, x_neg: float, x_pos: float) -> "EpsilonSpec":
        if not 0.0 < p < 1.0:
            raise ConfigurationError(f"two_point needs p in (0,1), got {p}")
        mean = p * x_neg + (1.0 - p) * x_pos
        scale = max(abs(x_neg), abs(x_pos), 1.0)
        if abs(mean) > 1e-12 * scale:
            raise ConfigurationError(
                f"two_point multipliers must have mean zero, got {mean!r} from "
                f"({p} * {x_neg} + {1.0 - p} * {x_pos})"
            )
        return cls("two_point", atom_values=np.array([x_neg, x_pos]), atom_probs=np.array([p, 1.0 - p]))

    @classmethod
    def table(cls, values, probabilities) -> "EpsilonSpec":
        return cls("table", atom_values=np.asarray(values, float), atom_probs=np.asarray(probabilities, float))

    # -- analytic functionals ------------------------------------------

    @property
    def is_discrete(self) -> bool:
        return self.family != "uniform_symmetric"

    def mean(self) -> float:
        if self.is_discrete:
            return float(np.dot(self.atom_values, self.atom_probs))
        return 0.0

    @property
    def is_mean_zero(self) -> bool:
        scale = max(self.max_abs(), 1.0)
        return abs(self.mean()) <= 1e-12 * scale

    def max_abs(self) -> float:
        if self.is_discrete:
            return float(np.max(np.abs(self.atom_values)))
        return self.a

    def abs_moment(self, m: float) -> float:
        """E |eps|^m."""
        if self.is_discrete:
            return float(np.dot(np.abs(self.atom_values) ** m, self.atom_probs))
        return self.a**m / (m + 1.0)

    def truncated_abs_moment(self, m: float, index, alpha: float) -> np.ndarray:
        """``E |eps|^m 1{|eps|^alpha <= i}``, vectorized over the index.

        Membership is tested on the ``|eps|^alpha`` side, bitwise matching
        the truncation applied to sampled multipliers (the float power of
        the other side can misclassify exact boundary atoms).
        """
        i = np.asarray(index, dtype=np.float64)
        if self.is_discrete:
            av = np.abs(self.atom_values)
            kept = (av**alpha)[None, ...] <= i[..., None]
            return np.sum((av**m * self.atom_probs) * kept, axis=-1)
        ceff = np.minimum(np.maximum(i, 0.0) ** (1.0 / alpha), self.a)
        return ceff ** (m + 1.0) / ((m + 1.0) * self.a)

    def truncated_mean(self, index, alpha: float) -> np.ndarray:
        """``E eps 1{|eps|^alpha <= i}``, vectorized over the index."""
        i = np.asarray(index, dtype=np.float64)
        if self.is_discrete:
            kept = (np.abs(self.atom_values) ** alpha)[None, ...] <= i[..., None]
            return np.sum((self.atom_values * self.atom_probs) * kept, axis=-1)
        return np.zeros_like(i)

    def tail_prob(self, index, alpha: float) -> np.ndarray:
        """``P(|eps|^alpha > i)``, vectorized over the index."""
        i = np.asarray(index, dtype=np.float64)
        if self.is_discrete:
            out = (np.abs(self.atom_values) ** alpha)[None, ...] > i[..., None]
            return np.sum(self.atom_probs * out, axis=-1)
        return np.clip(1.0 - np.maximum(i, 0.0) ** (1.0 / alpha) / self.a, 0.0, 1.0)

    def require_mean_zero(self, alpha: float) -> None:
        if alpha >= 1.0 and not self.is_mean_zero:
            raise ConfigurationError(
                f"multiplier family {self.family!r} has mean {self.mean()!r}; "
                f"alpha = {alpha} >= 1 requires mean-zero multipliers"
            )

    # -- sampling -------------------------------------------------------

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        if self.family == "rademacher":
            return np.where(gen.random(size) < 0.5, -1.0, 1.0)
        if self.family == "uniform_symmetric":
            return self.a * (2.0 * gen.random(size) - 1.0)
        cum = np.cumsum(self.atom_probs)
        idx = np.searchsorted(cum, gen.random(size), side="right")
        return self.atom_values[np.minimum(idx, self.atom_values.size - 1)]

    def echo(self) -> dict:
        out = {"family": self.family}
        if self.family == "uniform_symmetric":
            out["a"] = self.a
        elif self.family != "rademacher":
            out["values"] = self.atom_values.tolist()
            out["probabilities"] = self.atom_probs.tolist()
        if self.alpha_moment_hint is not None:
            out["alpha_moment_hint"] = self.alpha_moment_hint
        return out


def draw_epsilon(spec: EpsilonSpec, stream: RngStream) -> float:
    """One multiplier draw."""
    return float(spec.sample(stream.generator(), 1)[0])


def draw_epsilons(spec: EpsilonSpec, n: int, stream: RngStream) -> np.ndarray:
    """``n`` i.i.d. multiplier draws from one stream."""
    return spec.sample(stream.generator(), n)


# ---------------------------------------------------------------------------
# path generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TermEvents:
    """Flat jump-event view of a block of i.i.d. paths.

    ``term_index`` is nondecreasing and, within one term, events are sorted
    by time; ``heights`` are the jump sizes (value deltas), ``initials``
    the t=0 value of each term's path.
    """

    n_terms: int
    dimension: int
    term_index: np.ndarray  # (k,) int64, nondecreasing
    times: np.ndarray  # (k,) float64 in (0, 1]
    heights: np.ndarray  # (k, d)
    initials: np.ndarray  # (n_terms, d)

    def prefix(self, n: int) -> "TermEvents":
        """Events of the first ``n`` terms (shares the underlying arrays)."""
        if n > self.n_terms:
            raise ValueError(f"prefix of {n} terms requested from {self.n_terms}")
        k = int(np.searchsorted(self.term_index, n, side="left"))
        return TermEvents(n, self.dimension, self.term_index[:k], self.times[:k],
                          self.heights[:k], self.initials[:n])

    @staticmethod
    def concatenate(blocks: list["TermEvents"]) -> "TermEvents":
        n = sum(b.n_terms for b in blocks)
        d = blocks[0].dimension
        return TermEvents(
            n,
            d,
            np.concatenate([b.term_index for b in blocks]),
            np.concatenate([b.times for b in blocks]),
            np.concatenate([b.heights for b in blocks], axis=0),
            np.concatenate([b.initials for b in blocks], axis=0),
        )


def _draw_open_unit(gen: np.random.Generator, n: int) -> np.ndarray:
    """Uniform draws in (0, 1): zeros are resampled (a t=0 jump is illegal)."""
    u = gen.random(n)
    while True:
        bad = u == 0.0
        if not bad.any():
            return u
        u[bad] = gen.random(int(bad.sum()))


def _resample_term_collisions(times: np.ndarray, term_index: np.ndarray, redraw) -> np.ndarray:
    """Redraw locations until each term's jump times are pairwise distinct.

    Exact collisions have probability ~2^-53 per pair but would break the
    strict-ordering invariant of StepPath, so they are resampled;
    ``redraw(flat_indices)`` must return fresh draws from the law of each
    colliding location.
    """
    while True:
        order = np.lexsort((times, term_index))
        ts, ti = times[order], term_index[order]
        dup = np.zeros(times.size, dtype=bool)
        same = (np.diff(ts) == 0.0) & (np.diff(ti) == 0)
        if not same.any():
            return times
        dup[order[1:][same]] = True
        times[dup] = redraw(np.nonzero(dup)[0])


class YBlockSampler:
    """Stateful per-replicate sampler handing out terms in order."""

    def __init__(self, spec: "YGeneratorSpec"):
        self.spec = spec
        self._next_term = 0

    def take(self, n: int) -> TermEvents:
        raise NotImplementedError


@dataclass(frozen=True)
class CdfGrid:
    """Continuous nondecreasing cdf on [0, 1], piecewise linear on a grid."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=np.float64).reshape(-1)
        ys = np.asarray(self.ys, dtype=np.float64).reshape(-1)
        if xs.size < 2 or xs.shape != ys.shape:
            raise ConfigurationError("cdf grid needs matching xs/ys with at least two points")
        if xs[0] != 0.0 or xs[-1] != 1.0 or np.any(np.diff(xs) <= 0):
            raise ConfigurationError("cdf grid xs must increase strictly from 0 to 1")
        if ys[0] != 0.0 or ys[-1] != 1.0 or np.any(np.diff(ys) < 0):
            raise ConfigurationError("cdf grid ys must be nondecreasing from 0 to 1")
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def uniform(cls) -> "CdfGrid":
        return cls(np.array([0.0, 1.0]), np.array([0.0, 1.0]))

    def __call__(self, t) -> np.ndarray:
        return np.interp(t, self.xs, self.ys)

    def inverse(self, u) -> np.ndarray:
        return np.interp(u, self.ys, self.xs)


@dataclass(frozen=True)
class JumpHeightDist:
    """Finite-atom distribution of a jump height vector in R^d."""

    values: np.ndarray  # (k, d)
    probs: np.ndarray  # (k,)

    def __post_init__(self) -> None:
        v = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        p = np.asarray(self.probs, dtype=np.float64).reshape(-1)
        if v.shape[0] != p.size:
            raise ConfigurationError("height atoms and probabilities must have equal length")
        if np.any(p < 0.0) or abs(p.sum() - 1.0) > 1e-12:
            raise ConfigurationError("height probabilities must be nonnegative and sum to 1")
        v.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probs", p)

    @classmethod
    def constant(cls, value) -> "JumpHeightDist":
        return cls(np.atleast_2d(np.asarray(value, float)), np.array([1.0]))

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    def fourth_moment(self) -> float:
        return float(np.dot(np.sum(self.values**2, axis=1) ** 2, self.probs))

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        cum = np.cumsum(self.probs)
        idx = np.searchsorted(cum, gen.random(size), side="right")
        return self.values[np.minimum(idx, self.values.shape[0] - 1)]


class YGeneratorSpec:
    """Base class for i.i.d. step-path generators (see the factories below)."""

    variant: str = "base"
    dimension: int = 1

    def block_sampler(self, stream: RngStream) -> YBlockSampler:
        raise NotImplementedError

    def echo(self) -> dict:
        return {"variant": self.variant, "dimension": self.dimension}


@dataclass(frozen=True)
class _UnitJumpSpec(YGeneratorSpec):
    """Single unit jump at a uniform location: 0 before U, 1 from U on."""

    variant: str = "example1"
    dimension: int = 1

    def block_sampler(self, stream: RngStream) -> YBlockSampler:
        return _UnitJumpSampler(self, stream)


class _UnitJumpSampler(YBlockSampler):
    def __init__(self, spec, stream):
        super().__init__(spec)
        self._loc = stream.substream(0).generator()

    def take(self, n: int) -> TermEvents:
        base = self._next_term
        self._next_term += n
        times = _draw_open_unit(self._loc, n)
        return TermEvents(
            n, 1,
            np.arange(base, base + n, dtype=np.int64),
            times,
            np.ones((n, 1)),
            np.zeros((n, 1)),
        )


@dataclass(frozen=True)
class _WeightedJumpsSpec(YGeneratorSpec):
    """Superposition of p jumps: heights R_j at locations U_j ~ F_j."""

    cdfs: tuple[CdfGrid, ...] = ()
    height_dist: JumpHeightDist = None  # type: ignore[assignment]
    fourth_moment_bound: float = np.inf
    variant: str = "example2"

    def __post_init__(self) -> None:
        if not self.cdfs:
            raise ConfigurationError("weighted_jumps needs at least one location cdf")
        object.__setattr__(self, "dimension", self.height_dist.dimension)
        m4 = self.height_dist.fourth_moment()
        if m4 > self.fourth_moment_bound * (1.0 + 1e-12):
            warnings.warn(
                f"declared fourth-moment bound {self.fourth_moment_bound} is exceeded by "
                f"the height distribution's E|R|^4 = {m4}",
                stacklevel=2,
            )

    @property
    def p(self) -> int:
        return len(self.cdfs)

    def block_sampler(self, stream: RngStream) -> YBlockSampler:
        return _WeightedJumpsSampler(self, stream)

    def echo(self) -> dict:
        return {
            "variant": self.variant,
            "dimension": self.dimension,
            "p": self.p,
            "fourth_moment_bound": self.fourth_moment_bound,
        }


class _WeightedJumpsSampler(YBlockSampler):
    def __init__(self, spec, stream):
        super().__init__(spec)
        # one substream per component so extending a block never reshuffles draws
        self._locs = [stream.substream(0, j).generator() for j in range(spec.p)]
        self._heights = [stream.substream(1, j).generator() for j in range(spec.p)]

    def take(self, n: int) -> TermEvents:
        spec: _WeightedJumpsSpec = self.spec
        base = self._next_term
        self._next_term += n
        p, d = spec.p, spec.dimension
        times = np.empty((n, p))
        heights = np.empty((n, p, d))
        for j, cdf in enumerate(spec.cdfs):
            tj = cdf.inverse(_draw_open_unit(self._locs[j], n))
            # inverse cdf can land on 0 where the grid starts flat
            while np.any(tj == 0.0):
                zero = tj == 0.0
                tj[zero] = cdf.inverse(_draw_open_unit(self._locs[j], int(zero.sum())))
            times[:, j] = tj
            heights[:, j] = spec.height_dist.sample(self._heights[j], n)
        term_index = np.repeat(np.arange(base, base + n, dtype=np.int64), p)
        flat_times = times.reshape(-1)  # row-major: flat index k belongs to component k % p

        def redraw(flat_idx):
            out = np.empty(flat_idx.size)
            for j in range(p):
                sel = flat_idx % p == j
                if sel.any():
                    out[sel] = spec.cdfs[j].inverse(_draw_open_unit(self._locs[j], int(sel.sum())))
            return out

        flat_times = _resample_term_collisions(flat_times, term_index, redraw)
        order = np.lexsort((flat_times, term_index))
        return TermEvents(
            n, d,
            term_index[order],
            flat_times[order],
            heights.reshape(-1, d)[order],
            np.zeros((n, d)),
        )


@dataclass(frozen=True)
class _PoissonSpec(YGeneratorSpec):
    """Unit-height counting path with Poisson(lambda) many uniform jumps."""

    lam: float = 1.0
    variant: str = "example3"
    dimension: int = 1

    def __post_init__(self) -> None:
        if not (self.lam > 0.0 and np.isfinite(self.lam)):
            raise ConfigurationError(f"poisson intensity must be positive, got {self.lam}")

    def block_sampler(self, stream: RngStream) -> YBlockSampler:
        return _PoissonSampler(self, stream)

    def echo(self) -> dict:
        return {"variant": self.variant, "dimension": 1, "lambda": self.lam}


class _PoissonSampler(YBlockSampler):
    def __init__(self, spec, stream):
        super().__init__(spec)
        self._counts = stream.substream(0).generator()
        self._locs = stream.substream(1).generator()

    def take(self, n: int) -> TermEvents:
        spec: _PoissonSpec = self.spec
        base = self._next_term
        self._next_term += n
        counts = self._counts.poisson(spec.lam, n)
        total = int(counts.sum())
        term_index = np.repeat(np.arange(base, base + n, dtype=np.int64), counts)
        times = _draw_open_unit(self._locs, total)
        times = _resample_term_collisions(
            times, term_index, lambda idx: _draw_open_unit(self._locs, idx.size)
        )
        order = np.lexsort((times, term_index))
        return TermEvents(
            n, 1,
            term_index[order],
            times[order],
            np.ones((total, 1)),
            np.zeros((n, 1)),
        )


@dataclass(frozen=True)
class _UserSpec(YGeneratorSpec):
    """Paths produced by a user callback ``sampler(generator) -> StepPath``."""

    sampler: object = None
    dimension: int = 1
    variant: str = "user"

    def block_sampler(self, stream: RngStream) -> YBlockSampler:
        return _UserSampler(self, stream)


class _UserSampler(YBlockSampler):
    def __init__(self, spec, stream):
        super().__init__(spec)
        self._gen = stream.substream(0).generator()

    def take(self, n: int) -> TermEvents:
        spec: _UserSpec = self.spec
        d = spec.dimension
        blocks_t, blocks_h, blocks_i, initials = [], [], [], []
        for k in range(n):
            path = spec.sampler(self._gen)
            if not isinstance(path, StepPath) or path.dimension != d:
                raise PathValidationError(
                    f"user sampler must return StepPath of dimension {d}, got {path!r}"
                )
            deltas = np.diff(path.segment_values(), axis=0)
            blocks_t.append(path.jump_times)
            blocks_h.append(deltas)
            blocks_i.append(np.full(path.n_jumps, self._next_term + k, dtype=np.int64))
            initials.append(path.initial_value)
        base = self._next_term
        self._next_term += n
        return TermEvents(
            n, d,
            np.concatenate(blocks_i) if blocks_i else np.empty(0, np.int64),
            np.concatenate(blocks_t) if blocks_t else np.empty(0),
            np.concatenate(blocks_h, axis=0) if blocks_h else np.empty((0, d)),
            np.stack(initials) if initials else np.empty((0, d)),
        )


def unit_jump() -> YGeneratorSpec:
    """Indicator path jumping from 0 to 1 at a uniform location."""
    return _UnitJumpSpec()


def weighted_jumps(cdfs, height_dist: JumpHeightDist, fourth_moment_bound: float = np.inf) -> YGeneratorSpec:
    """Sum of one weighted jump per component, locations from the given cdfs."""
    return _WeightedJumpsSpec(cdfs=tuple(cdfs), height_dist=height_dist,
                              fourth_moment_bound=float(fourth_moment_bound))


def poisson_counts(lam: float) -> YGeneratorSpec:
    """Poisson counting path of intensity ``lam`` on [0, 1]."""
    return _PoissonSpec(lam=float(lam))


def user_paths(sampler, dimension: int) -> YGeneratorSpec:
    """Wrap a callback ``sampler(numpy_generator) -> StepPath``."""
    return _UserSpec(sampler=sampler, dimension=int(dimension))


def gen_path(spec: YGeneratorSpec, stream: RngStream) -> StepPath:
    """One i.i.d. path drawn from the generator."""
    events = spec.block_sampler(stream.substream(_Y_ROLE)).take(1)
    values = events.initials[0][None, :] + np.cumsum(events.heights, axis=0)
    return StepPath(spec.dimension, events.initials[0], events.times, values)


# ---------------------------------------------------------------------------
# vectorized reductions over event blocks
# ---------------------------------------------------------------------------


def _masked_term_sums(events: TermEvents, mask: np.ndarray) -> np.ndarray:
    """Sum of the masked event heights per term, shape (n_terms, d)."""
    idx = events.term_index[mask]
    out = np.empty((events.n_terms, events.dimension))
    for j in range(events.dimension):
        out[:, j] = np.bincount(idx, weights=events.heights[mask, j], minlength=events.n_terms)
    return out


def interval_increments(events: TermEvents, intervals) -> np.ndarray:
    """Per-term increments ``Y(b) - Y(a)`` for each half-open interval (a, b].

    Returns shape ``(n_terms, len(intervals), d)``.
    """
    out = np.empty((events.n_terms, len(intervals), events.dimension))
    for j, (a, b) in enumerate(intervals):
        if not 0.0 <= a <= b <= 1.0:
            raise ConfigurationError(f"interval must satisfy 0 <= a <= b <= 1, got ({a}, {b})")
        out[:, j, :] = _masked_term_sums(events, (events.times > a) & (events.times <= b))
    return out


def values_at(events: TermEvents, ts) -> np.ndarray:
    """Per-term path values at each time, shape ``(n_terms, len(ts), d)``."""
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    out = np.empty((events.n_terms, ts.size, events.dimension))
    for j, t in enumerate(ts):
        out[:, j, :] = events.initials + _masked_term_sums(events, events.times <= t)
    return out


def _term_running(events: TermEvents):
    """Running segment values after each event, plus per-term row starts."""
    n = events.n_terms
    k = events.times.size
    # running value = initial + segmented cumsum of the term's jump heights
    cs = np.cumsum(events.heights, axis=0)
    starts = np.searchsorted(events.term_index, np.arange(n), side="left")
    counts = np.diff(np.append(starts, k))
    has = counts > 0
    offset = np.zeros((n, events.dimension))
    offset[has] = np.where((starts[has] > 0)[:, None], cs[starts[has] - 1], 0.0)
    running = events.initials[events.term_index] + cs - np.repeat(offset, counts, axis=0)
    return running, starts, has


def term_sup_norms(events: TermEvents) -> np.ndarray:
    """Uniform norm of each term's path, computed from its running values."""
    sup = np.max(np.abs(events.initials), axis=1)
    if events.times.size == 0:
        return sup
    running, starts, has = _term_running(events)
    abs_running = np.max(np.abs(running), axis=1)
    sup[has] = np.maximum(sup[has], np.maximum.reduceat(abs_running, starts[has]))
    return sup


def term_value_extremes(events: TermEvents) -> tuple[np.ndarray, np.ndarray]:
    """Largest and smallest segment value of each term's path (over coords)."""
    vmax = np.max(events.initials, axis=1)
    vmin = np.min(events.initials, axis=1)
    if events.times.size == 0:
        return vmax, vmin
    running, starts, has = _term_running(events)
    vmax[has] = np.maximum(vmax[has], np.maximum.reduceat(np.max(running, axis=1), starts[has]))
    vmin[has] = np.minimum(vmin[has], np.minimum.reduceat(np.min(running, axis=1), starts[has]))
    return vmax, vmin
