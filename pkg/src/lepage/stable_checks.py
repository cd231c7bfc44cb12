"""Distributional checks on the simulated limit.

Marginal samples of the series are probed for heavy-tail index (log-log
regression on the empirical characteristic function), for the defining
sum-stability property (two independent copies, rescaled by ``2^(1/alpha)``,
must reproduce the law), and for family membership against an exact
symmetric-stable oracle sampler that shares no code with the series
construction.  Path samples are probed for their directional distribution
(spectral masses of named sphere events) and for the regular-variation
tail limit with its normalizing quantiles ``b_n``.

``b_n`` deserves a note: the defining display reads like a lower quantile
(``P(norm < r) <= 1/n``), which would not normalize the upper tail, so this
module implements the upper-tail convention
``inf { r : P(norm > r) <= 1/n }`` and reports which convention is in use.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .paths import StepPath, sup_norm
from .random_inputs import (
    ConfigurationError,
    EpsilonSpec,
    TermEvents,
    YGeneratorSpec,
    term_sup_norms,
    term_value_extremes,
)
from .rng import RngStream
from . import series as _series
from .series import PathStatsSample

__all__ = [
    "WindowError",
    "DegenerateGeneratorError",
    "SampleSet",
    "ecf",
    "auto_window",
    "AlphaEstimate",
    "estimate_alpha",
    "stable_oracle",
    "ks_statistic",
    "ks_threshold",
    "StabilityResult",
    "sum_stability_test",
    "SphereEvent",
    "full_sphere",
    "nonnegative_path",
    "norm_equals",
    "SpectralEstimate",
    "spectral_estimate",
    "tail_quantile_bn",
    "RegVarRow",
    "RegVarTable",
    "regular_variation_table",
    "FamilyDistance",
    "oracle_family_distance",
    "BN_CONVENTION_NOTE",
]

_TAG_SPECTRAL = 301
_TAG_STABILITY = 302
_TAG_ORACLE = 303

BN_CONVENTION_NOTE = (
    "b_n computed as the upper-tail quantile inf{r : P(norm > r) <= 1/n}; "
    "the lower-quantile reading P(norm < r) <= 1/n would leave the tail limit vacuous"
)


class WindowError(ValueError):
    """Raised when the characteristic-function window is unusable."""


class DegenerateGeneratorError(ValueError):
    """Raised when the spectral normalizer estimates to zero."""


@dataclass(frozen=True)
class SampleSet:
    """A bag of scalar samples plus provenance metadata."""

    values: np.ndarray
    kind: str = "marginal"  # or "norm"
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if v.size == 0:
            raise ConfigurationError("sample set must be nonempty")
        if self.kind == "norm" and np.any(v < 0):
            raise ConfigurationError("norm samples must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size


def _values(samples) -> np.ndarray:
    if isinstance(samples, SampleSet):
        return samples.values
    v = np.asarray(samples, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise ConfigurationError("sample set must be nonempty")
    return v


# ---------------------------------------------------------------------------
# empirical characteristic function and tail index
# ---------------------------------------------------------------------------


def ecf(samples, u_grid) -> np.ndarray:
    """Empirical characteristic function ``mean exp(i u x)`` per grid point.

    Components are accumulated with exactly-rounded summation, so the
    result is independent of sample order and sign-paired samples cancel
    to a bitwise-zero imaginary part.
    """
    x = _values(samples)
    u = np.asarray(u_grid, dtype=np.float64).reshape(-1)
    if np.any(u == 0.0):
        raise ConfigurationError("u = 0 probes nothing (the cf is identically 1 there)")
    if np.unique(u).size != u.size:
        raise ConfigurationError("u grid values must be distinct")
    z = np.exp(1j * u[:, None] * x[None, :])
    out = np.empty(u.size, dtype=np.complex128)
    for j in range(u.size):
        out[j] = complex(math.fsum(z[j].real) / x.size, math.fsum(z[j].imag) / x.size)
    return out


def _abs_ecf(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.abs(np.exp(1j * u[:, None] * x[None, :]).mean(axis=1))


def auto_window(samples, lo: float = 0.05, hi: float = 0.95) -> tuple[float, float]:
    """Bisect for the u-range on which ``|ecf|`` runs from ``hi`` down to ``lo``.

    log(-log|ecf|) is numerically unstable outside roughly (0.05, 0.95),
    so the regression window is confined there.
    """
    x = _values(samples)

    def modulus(u: float) -> float:
        return float(_abs_ecf(x, np.array([u]))[0])

    # bracket the two crossings by doubling / halving from u = 1
    u_hi = 1.0
    for _ in range(80):
        if modulus(u_hi) < lo:
            break
        u_hi *= 2.0
    else:
        raise WindowError("could not push |ecf| below the lower band; samples look degenerate")
    u_lo = 1.0
    for _ in range(80):
        if modulus(u_lo) > hi:
            break
        u_lo /= 2.0
    else:
        raise WindowError("could not push |ecf| above the upper band; samples look degenerate")

    a, b = u_lo, u_hi  # modulus(a) > hi, modulus(b) < lo
    lo_edge, hi_edge = a, b
    for target, setter in ((hi, "lo_edge"), (lo, "hi_edge")):
        left, right = a, b
        for _ in range(60):
            mid = math.sqrt(left * right)
            if modulus(mid) > target:
                left = mid
            else:
                right = mid
        if setter == "lo_edge":
            lo_edge = right
        else:
            hi_edge = left
    if not lo_edge < hi_edge:
        raise WindowError(f"degenerate ecf window [{lo_edge}, {hi_edge}]")
    return lo_edge, hi_edge


@dataclass(frozen=True)
class AlphaEstimate:
    alpha: float
    se: float
    u_min: float
    u_max: float
    grid_size: int
    n_samples: int


def estimate_alpha(
    samples,
    u_window: tuple[float, float] | None = None,
    grid_size: int = 32,
    se_blocks: int = 8,
) -> AlphaEstimate:
    """Tail index via the log-log slope of ``-log|ecf|``.

    For a symmetric stable law ``-log|cf(u)| = (scale * u)^alpha``, so
    ``log(-log|ecf|)`` is affine in ``log u`` with slope alpha.  The slope
    is fit by least squares on a log-spaced grid inside the window (auto
    selected when not given); the standard error comes from refitting on
    disjoint sample blocks.
    """
    x = _values(samples)
    med = float(np.median(x))
    iqr = float(np.subtract(*np.percentile(x, [75, 25])))
    if iqr > 0 and abs(med) > 0.5 * iqr:
        warnings.warn(
            f"samples look asymmetric (median {med:.3g} vs IQR {iqr:.3g}); "
            "the log-log slope assumes a symmetric law",
            stacklevel=2,
        )
    if u_window is None:
        u_window = auto_window(x)
    u_min, u_max = float(u_window[0]), float(u_window[1])
    if not 0.0 < u_min < u_max:
        raise WindowError(f"window must satisfy 0 < u_min < u_max, got ({u_min}, {u_max})")
    u = np.exp(np.linspace(math.log(u_min), math.log(u_max), grid_size))
    mod = _abs_ecf(x, u)
    if np.any(mod == 0.0) or np.any(mod >= 1.0):
        raise WindowError(
            "|ecf| hit 0 or 1 on the window; shrink the window toward moduli in (0.05, 0.95)"
        )
    slope = _loglog_slope(u, mod)
    block = x.size // se_blocks
    slopes = []
    if block >= 2:
        for b in range(se_blocks):
            xb = x[b * block: (b + 1) * block]
            mb = np.clip(_abs_ecf(xb, u), 1e-300, 1.0 - 1e-12)
            slopes.append(_loglog_slope(u, mb))
    se = float(np.std(slopes, ddof=1) / math.sqrt(len(slopes))) if len(slopes) > 1 else math.inf
    return AlphaEstimate(slope, se, u_min, u_max, grid_size, x.size)


def _loglog_slope(u: np.ndarray, mod: np.ndarray) -> float:
    xs = np.log(u)
    ys = np.log(-np.log(mod))
    xbar = xs.mean()
    return float(np.dot(xs - xbar, ys - ys.mean()) / np.dot(xs - xbar, xs - xbar))


# ---------------------------------------------------------------------------
# exact symmetric stable oracle
# ---------------------------------------------------------------------------


def stable_oracle(alpha: float, scale: float, stream: RngStream, size: int = 1) -> np.ndarray:
    """Exact symmetric alpha-stable draws via the trigonometric transform.

    Independent of the series construction: one uniform angle on
    (-pi/2, pi/2) and one unit exponential per draw.  ``alpha = 2`` reduces
    to Normal(0, 2 scale^2), ``alpha = 1`` to Cauchy(scale).
    """
    if not 0.0 < alpha <= 2.0:
        raise ConfigurationError(f"oracle is defined for alpha in (0, 2], got {alpha}")
    if scale <= 0.0:
        raise ConfigurationError(f"scale must be positive, got {scale}")
    gen = stream.generator()
    u = gen.random(size)
    w = gen.standard_exponential(size)
    while True:
        bad = (u == 0.0) | (w == 0.0)
        if not bad.any():
            break
        k = int(bad.sum())
        u[bad] = gen.random(k)
        w[bad] = gen.standard_exponential(k)
    theta = math.pi * (u - 0.5)
    if alpha == 1.0:
        return scale * np.tan(theta)
    x = (
        np.sin(alpha * theta)
        / np.cos(theta) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * theta) / w) ** ((1.0 - alpha) / alpha)
    )
    return scale * x


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov machinery
# ---------------------------------------------------------------------------


def ks_statistic(x, y) -> float:
    """Two-sample KS distance, ties handled exactly."""
    xs = np.sort(_values(x))
    ys = np.sort(_values(y))
    grid = np.concatenate([xs, ys])
    f1 = np.searchsorted(xs, grid, side="right") / xs.size
    f2 = np.searchsorted(ys, grid, side="right") / ys.size
    return float(np.max(np.abs(f1 - f2)))


def ks_threshold(n1: int, n2: int, level: float = 0.01) -> float:
    """Asymptotic two-sample KS critical value at the given level."""
    c = math.sqrt(-math.log(level / 2.0) / 2.0)
    return c * math.sqrt((n1 + n2) / (n1 * n2))


@dataclass(frozen=True)
class StabilityResult:
    ks: float
    threshold: float
    passed: bool
    alpha: float
    n_sums: int
    n_heldout: int

    def row(self) -> dict:
        return {
            "alpha": self.alpha,
            "ks": self.ks,
            "threshold_1pct": self.threshold,
            "verdict": "satisfied" if self.passed else "violated",
            "n_sums": self.n_sums,
            "n_heldout": self.n_heldout,
        }


def sum_stability_test(samples, alpha: float, stream: RngStream) -> StabilityResult:
    """Defining-property check: ``(X + X') / 2^(1/alpha)`` must have the law of X.

    The samples are shuffled and split in three: two thirds are paired and
    rescaled into sums, the held-out third is the comparison set; the
    two-sample KS distance is tested against the asymptotic 1% threshold.
    """
    x = _values(samples)
    if x.size < 300:
        warnings.warn(f"only {x.size} samples; the stability test has little power", stacklevel=2)
    m = x.size // 3
    if m < 1:
        raise ConfigurationError(f"need at least 3 samples, got {x.size}")
    perm = stream.substream(_TAG_STABILITY).generator().permutation(x.size)
    shuffled = x[perm]
    sums = (shuffled[:m] + shuffled[m: 2 * m]) / 2.0 ** (1.0 / alpha)
    heldout = shuffled[2 * m:]
    d = ks_statistic(sums, heldout)
    thr = ks_threshold(m, heldout.size)
    return StabilityResult(d, thr, d < thr, alpha, m, heldout.size)


# ---------------------------------------------------------------------------
# sphere events and the spectral measure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SphereEvent:
    """Named measurable event on the unit sphere of the path space.

    Builtin kinds evaluate vectorized on per-replicate path reductions:

    * ``full_sphere`` is always true;
    * ``nonnegative`` asks the largest-magnitude segment value of the
      (sign-adjusted) path to be nonnegative, which coincides with
      pointwise nonnegativity for single-sign paths and keeps the event
      symmetry-exact for signed paths;
    * ``norm_equals`` compares the pre-normalization uniform norm to a
      constant (exact float comparison, intended for atom-valued norms).

    A custom predicate ``f(path, sign) -> bool`` may be supplied instead;
    it is evaluated replicate by replicate.
    """

    name: str
    kind: str = "custom"
    value: float = math.nan
    predicate: object = None

    def evaluate(self, sign: np.ndarray, sup: np.ndarray, vmax: np.ndarray, vmin: np.ndarray) -> np.ndarray:
        if self.kind == "full_sphere":
            return np.ones(sup.shape, dtype=bool)
        if self.kind == "nonnegative":
            smax = np.where(sign >= 0, vmax, -vmin)
            smin = np.where(sign >= 0, vmin, -vmax)
            return smax + smin >= 0.0
        if self.kind == "norm_equals":
            return sup == self.value
        raise ConfigurationError(f"event {self.name!r} needs per-path evaluation")


def full_sphere() -> SphereEvent:
    return SphereEvent("full_sphere", kind="full_sphere")


def nonnegative_path() -> SphereEvent:
    return SphereEvent("nonnegative_path", kind="nonnegative")


def norm_equals(value: float, name: str | None = None) -> SphereEvent:
    return SphereEvent(name or f"norm_equals_{value:g}", kind="norm_equals", value=float(value))


@dataclass(frozen=True)
class SpectralEstimate:
    """Ratio-estimated masses of sphere events, with delta-method errors."""

    event_masses: dict  # name -> (mass, se)
    normalizer: tuple[float, float]  # mean of |eps|^a * norm^a, with SE
    replicates: int
    alpha: float
    meta: dict = field(default_factory=dict)

    def mass(self, name: str) -> float:
        return self.event_masses[name][0]

    def rows(self) -> list[dict]:
        out = [
            {"event": name, "mass": m, "se": s}
            for name, (m, s) in self.event_masses.items()
        ]
        out.append({"event": "__normalizer__", "mass": self.normalizer[0], "se": self.normalizer[1]})
        return out


def _event_flags(events, sign, sup, vmax, vmin, builder=None) -> dict:
    flags = {}
    for ev in events:
        if ev.kind != "custom":
            flags[ev.name] = ev.evaluate(sign, sup, vmax, vmin)
        else:
            if builder is None:
                raise ConfigurationError(f"custom event {ev.name!r} not supported here")
            flags[ev.name] = builder(ev)
    return flags


def spectral_estimate(
    eps_spec: EpsilonSpec,
    y_spec: YGeneratorSpec,
    alpha: float,
    events,
    replicates: int,
    stream: RngStream,
    map_chunks=None,
) -> SpectralEstimate:
    """Monte Carlo spectral masses ``sigma(A)``.

    Each replicate draws one multiplier and one path and contributes the
    weight ``|eps|^alpha * norm^alpha`` to the denominator and, when the
    sign-adjusted normalized path lies in the event, to the numerator.
    Replicates with a zero-norm path carry zero weight on both sides.
    Numerator and denominator share replicates (ratio estimator), so the
    full-sphere mass is exactly 1; the SE comes from the delta method on
    the joint replicate means.
    """
    if replicates < 1000:
        raise ConfigurationError(f"need at least 1000 replicates, got {replicates}")
    events = list(events)
    names = [ev.name for ev in events]
    if len(set(names)) != len(names):
        raise ConfigurationError(f"event names must be distinct, got {names}")
    size = _series._chunk_size(1)
    ranges = _series._chunk_ranges(replicates, size)

    def one_chunk(c: int, m: int):
        sub = stream.substream(_TAG_SPECTRAL, c)
        eps = eps_spec.sample(sub.substream(0).generator(), m)
        blk = y_spec.block_sampler(sub.substream(1)).take(m)
        sup = term_sup_norms(blk)
        vmax, vmin = term_value_extremes(blk)
        sign = np.sign(eps)
        w = np.abs(eps) ** alpha * sup**alpha

        def builder(ev):
            out = np.empty(m, dtype=bool)
            for r in range(m):
                out[r] = bool(ev.predicate(_term_path(blk, r), float(sign[r])))
            return out

        flags = _event_flags(events, sign, sup, vmax, vmin, builder)
        acc = {"w": float(np.sum(w)), "w2": float(np.sum(w * w))}
        for name, flag in flags.items():
            wa = w * flag
            acc[name] = float(np.sum(wa))
            acc[name + "/2"] = float(np.sum(wa * wa))
            acc[name + "/x"] = float(np.sum(wa * w))
        return acc

    runner = map_chunks or _series._serial_map
    parts = runner(one_chunk, ranges)

    def total(key: str) -> float:
        return math.fsum(p[key] for p in parts)

    r = float(replicates)
    d_sum = total("w")
    if d_sum == 0.0:
        raise DegenerateGeneratorError("all replicates have zero weight; the generator is degenerate")
    d_mean = d_sum / r
    d_var = max(total("w2") / r - d_mean**2, 0.0)
    masses = {}
    for ev in events:
        n_sum = total(ev.name)
        mass = n_sum / d_sum
        n_mean = n_sum / r
        n_var = max(total(ev.name + "/2") / r - n_mean**2, 0.0)
        cov = total(ev.name + "/x") / r - n_mean * d_mean
        var = max(n_var - 2.0 * mass * cov + mass**2 * d_var, 0.0) / (r * d_mean**2)
        masses[ev.name] = (float(mass), float(math.sqrt(var)))
    d_se = math.sqrt(d_var / r)
    return SpectralEstimate(masses, (float(d_mean), float(d_se)), replicates, alpha,
                            {"epsilon": eps_spec.echo(), "y": y_spec.echo()})


def _term_path(events: TermEvents, r: int) -> StepPath:
    lo = int(np.searchsorted(events.term_index, r, side="left"))
    hi = int(np.searchsorted(events.term_index, r, side="right"))
    values = events.initials[r][None, :] + np.cumsum(events.heights[lo:hi], axis=0)
    return StepPath(events.dimension, events.initials[r], events.times[lo:hi], values)


# ---------------------------------------------------------------------------
# tail quantiles and the regular-variation table
# ---------------------------------------------------------------------------


def tail_quantile_bn(norm_samples, n: int) -> float:
    """Upper-tail normalizing quantile ``inf { r : P(norm > r) <= 1/n }``.

    Estimated from order statistics: with N samples and k = floor(N/n),
    the result is the (N-k)-th smallest sample.  At the ``n = 1`` boundary
    the tail constraint is vacuous and the convention returns the largest
    sample.  See ``BN_CONVENTION_NOTE`` for the convention choice.
    """
    x = _values(norm_samples)
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")
    if x.size < n:
        raise ConfigurationError(
            f"quantile resolution: need at least n = {n} samples, got {x.size}"
        )
    if x.size < 10 * n:
        warnings.warn(f"only {x.size} samples for n = {n}; b_n is noisy below 10n", stacklevel=2)
    k = x.size // n
    j = x.size - 1 - k
    s = np.sort(x)
    if j < 0:
        return float(s[-1])
    return float(s[j])


@dataclass(frozen=True)
class RegVarRow:
    r: float
    event: str
    exceed_count: int
    cond_prob: float | None
    se: float | None
    prediction: float | None
    scaled_exceedance: float
    predicted_scaled_exceedance: float

    def row(self) -> dict:
        return {
            "r": self.r,
            "event": self.event,
            "exceed_count": self.exceed_count,
            "cond_prob": "no data" if self.cond_prob is None else self.cond_prob,
            "se": "" if self.se is None else self.se,
            "prediction": "" if self.prediction is None else self.prediction,
            "scaled_exceedance": self.scaled_exceedance,
            "predicted_scaled_exceedance": self.predicted_scaled_exceedance,
        }


@dataclass(frozen=True)
class RegVarTable:
    b_n: float
    n: int
    alpha: float
    n_paths: int
    rows: tuple[RegVarRow, ...]
    convention_note: str = BN_CONVENTION_NOTE

    def exceed_counts(self) -> dict:
        return {row.r: row.exceed_count for row in self.rows if row.event == "full_sphere"}


def regular_variation_table(
    path_samples,
    events,
    r_grid,
    n: int,
    alpha: float,
    sigma: SpectralEstimate | None = None,
) -> RegVarTable:
    """Empirical conditional sphere probabilities above scaled tail thresholds.

    ``path_samples`` is either a sequence of :class:`StepPath` or a
    precomputed :class:`PathStatsSample`.  Per (r, event): the conditional
    probability ``P(X/|X| in A | |X| > r b_n)`` next to the spectral
    prediction ``sigma(A)``, plus the scaled exceedance probability
    ``n P(|X| > r b_n)`` next to its limit ``r^-alpha``.  Entries with no
    exceedances are marked "no data" rather than failing.
    """
    events = list(events)
    if isinstance(path_samples, PathStatsSample):
        sup, vmax, vmin = path_samples.sup, path_samples.vmax, path_samples.vmin
    else:
        paths = list(path_samples)
        sup = np.array([sup_norm(p) for p in paths])
        vmax = np.array([float(np.max(p.segment_values())) for p in paths])
        vmin = np.array([float(np.min(p.segment_values())) for p in paths])
    n_paths = sup.size
    b_n = tail_quantile_bn(SampleSet(sup, kind="norm"), n)
    sign = np.ones(n_paths)

    def builder(ev):
        raise ConfigurationError("custom events need materialized paths; pass StepPath samples")

    if not isinstance(path_samples, PathStatsSample):
        def builder(ev):  # noqa: F811, per-path evaluation when paths are available
            return np.array([bool(ev.predicate(p, 1.0)) for p in paths])

    flags = _event_flags(events, sign, sup, vmax, vmin, builder)
    rows = []
    for r in (float(r) for r in r_grid):
        exceed = sup > r * b_n
        count = int(exceed.sum())
        scaled = n * count / n_paths
        for ev in events:
            if count == 0:
                rows.append(RegVarRow(r, ev.name, 0, None, None,
                                      None if sigma is None else sigma.mass(ev.name),
                                      scaled, r**-alpha))
                continue
            p_hat = float(np.mean(flags[ev.name][exceed]))
            se = math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / count)
            rows.append(RegVarRow(r, ev.name, count, p_hat, se,
                                  None if sigma is None else sigma.mass(ev.name),
                                  scaled, r**-alpha))
    return RegVarTable(b_n, n, alpha, n_paths, tuple(rows))


# ---------------------------------------------------------------------------
# family membership against the oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyDistance:
    ks: float
    baseline_median: float
    scale: float
    n: int

    @property
    def ratio(self) -> float:
        return self.ks / self.baseline_median


def oracle_family_distance(
    samples,
    alpha: float,
    stream: RngStream,
    baseline_pairs: int = 9,
) -> FamilyDistance:
    """KS distance to the stable family, scale calibrated by quartile matching.

    The unknown scale of the limit marginal is never asserted; it is
    estimated by matching interquartile ranges against a unit-scale oracle
    draw, then the sample set is compared to an oracle set of that scale.
    The baseline is the median KS distance between independent oracle
    pairs of the same size, i.e. the pure sampling-noise floor.
    """
    x = _values(samples)
    nx = x.size
    ref = stable_oracle(alpha, 1.0, stream.substream(_TAG_ORACLE, 0), nx)
    iqr_ref = float(np.subtract(*np.percentile(ref, [75, 25])))
    iqr_x = float(np.subtract(*np.percentile(x, [75, 25])))
    if iqr_ref <= 0 or iqr_x <= 0:
        raise ConfigurationError("interquartile calibration failed (degenerate samples)")
    scale = iqr_x / iqr_ref
    oracle = stable_oracle(alpha, scale, stream.substream(_TAG_ORACLE, 1), nx)
    d_obs = ks_statistic(x, oracle)
    baseline = []
    for b in range(baseline_pairs):
        a = stable_oracle(alpha, scale, stream.substream(_TAG_ORACLE, 2 + 2 * b), nx)
        c = stable_oracle(alpha, scale, stream.substream(_TAG_ORACLE, 3 + 2 * b), nx)
        baseline.append(ks_statistic(a, c))
    return FamilyDistance(d_obs, float(np.median(baseline)), scale, nx)
