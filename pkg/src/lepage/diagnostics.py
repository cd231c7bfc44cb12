"""Monte Carlo and analytic checks of the convergence conditions.

Two families of quantities live here:

* **Increment-moment checks.**  ``estimate_c1`` and ``estimate_c2``
  estimate the second moment of path increments and the product of squared
  increments over adjacent intervals, and compare them to a user-supplied
  :class:`MomentEnvelope` ``|F(t2) - F(t1)|^beta`` (respectively
  ``^(2 beta)``).  Verdicts use a 4-standard-error band: Monte Carlo can
  refute an inequality at confidence, never certify it, so estimates whose
  band straddles the envelope come back ``inconclusive``.

* **Analytic sums over the truncated multipliers** ``eps~_i =
  eps_i 1{|eps_i|^alpha <= i}``: the weighted moment series C(alpha, m),
  the centered first-moment series, the Borel-Cantelli tail-probability
  sum, and the fourth-moment sums ``S_{n,tau}`` indexed by set partitions
  of {1,2,3,4}.  All are computed atom-exactly for discrete multiplier
  families (in closed form for the uniform family).

``tightness_functional`` ties the two together: the Monte Carlo fourth
moment of weighted partial-sum increments is reported next to its
assembled bound ``d^2 * sum_tau S_{n,tau} * Dhat_tau``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .paths import DomainError
from .random_inputs import CdfGrid, ConfigurationError, EpsilonSpec, YGeneratorSpec, interval_increments
from .rng import RngStream
from .series import SeriesSpec, sample_weighted_increments
from . import series as _series

__all__ = [
    "MomentEnvelope",
    "MomentEntry",
    "MomentReport",
    "default_envelopes",
    "estimate_c1",
    "estimate_c2",
    "MomentConstant",
    "moment_constant",
    "centered_first_moment_sum",
    "BorelCantelliSum",
    "borel_cantelli_sum",
    "tail_weight_supremum",
    "head_weight_supremum",
    "Partition",
    "enumerate_partitions",
    "partition_label",
    "partition_sum",
    "partition_envelope_exponents",
    "PartitionReport",
    "partition_report",
    "TightnessResult",
    "tightness_functional",
    "PARTITION_CARDINALITY_NOTE",
]

_TAG_C1 = 201
_TAG_C2 = 202

Partition = tuple[tuple[int, ...], ...]

# Direct enumeration yields the Bell number B(4) = 15; the figure 13
# sometimes quoted alongside this partition family undercounts it.  The
# per-partition values are reported for all 15.
PARTITION_CARDINALITY_NOTE = (
    "enumerated 15 set partitions of {1,2,3,4} (Bell number B(4) = 15); "
    "this differs from the sometimes-quoted cardinality 13, which undercounts the family"
)


# ---------------------------------------------------------------------------
# envelopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentEnvelope:
    """Nondecreasing continuous F on [0, 1] plus an exponent beta > 1/2.

    ``kind`` is one of ``identity``, ``affine`` (a*t + b), ``poly``
    (sum of c_k t^k with nonnegative coefficients), ``sum_of_cdfs``
    (scale times a sum of grid cdfs) or ``grid`` (monotone interpolation).
    """

    beta: float
    kind: str = "identity"
    coeffs: tuple[float, ...] = ()  # affine (a, b) or poly (c_1, c_2, ...)
    cdfs: tuple[CdfGrid, ...] = ()
    scale: float = 1.0
    grid_xs: np.ndarray | None = None
    grid_ys: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not self.beta > 0.5:
            raise ConfigurationError(f"envelope exponent must exceed 1/2, got {self.beta}")
        if self.kind not in ("identity", "affine", "poly", "sum_of_cdfs", "grid"):
            raise ConfigurationError(f"unknown envelope kind {self.kind!r}")
        if self.kind == "affine" and (len(self.coeffs) != 2 or self.coeffs[0] < 0):
            raise ConfigurationError("affine envelope needs coeffs (a, b) with a >= 0")
        if self.kind == "poly" and (not self.coeffs or any(c < 0 for c in self.coeffs)):
            raise ConfigurationError("poly envelope needs nonnegative coefficients")
        if self.kind == "sum_of_cdfs" and not self.cdfs:
            raise ConfigurationError("sum_of_cdfs envelope needs at least one cdf")
        if self.kind == "grid":
            xs = np.asarray(self.grid_xs, dtype=np.float64)
            ys = np.asarray(self.grid_ys, dtype=np.float64)
            if xs.ndim != 1 or xs.shape != ys.shape or np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) < 0):
                raise ConfigurationError("grid envelope needs increasing xs and nondecreasing ys")
            object.__setattr__(self, "grid_xs", xs)
            object.__setattr__(self, "grid_ys", ys)

    def f(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "identity":
            return t + 0.0
        if self.kind == "affine":
            a, b = self.coeffs
            return a * t + b
        if self.kind == "poly":
            out = np.zeros_like(t)
            for k, c in enumerate(self.coeffs, start=1):
                out = out + c * t**k
            return out
        if self.kind == "sum_of_cdfs":
            return self.scale * sum(cdf(t) for cdf in self.cdfs)
        return np.interp(t, self.grid_xs, self.grid_ys)

    def pair_bound(self, t1: float, t2: float) -> float:
        """``|F(t2) - F(t1)|^beta``."""
        return float(np.abs(self.f(t2) - self.f(t1)) ** self.beta)

    def triple_bound(self, t1: float, t2: float) -> float:
        """``|F(t2) - F(t1)|^(2 beta)``."""
        return float(np.abs(self.f(t2) - self.f(t1)) ** (2.0 * self.beta))

    def echo(self) -> dict:
        out: dict = {"kind": self.kind, "beta": self.beta}
        if self.kind in ("affine", "poly"):
            out["coeffs"] = list(self.coeffs)
        if self.kind == "sum_of_cdfs":
            out["scale"] = self.scale
            out["cdfs"] = len(self.cdfs)
        return out


def default_envelopes(y_spec: YGeneratorSpec) -> tuple[MomentEnvelope, MomentEnvelope]:
    """Envelope pair (for the second-moment and cross-moment checks).

    * unit jump: F = identity, beta = 1 for both conditions;
    * Poisson(lam) counts: F(t) = lam*t + lam^2*t^2, beta = 1 for both;
    * weighted jumps: F = M^(1/4) * p * sum of the location cdfs with
      beta = 2 for both, which absorbs the constants M^(1/2) p^2 and
      M p^4 of the closed-form bounds.

    User generators have no default; supply an envelope explicitly.
    """
    variant = getattr(y_spec, "variant", "user")
    if variant == "example1":
        return MomentEnvelope(beta=1.0), MomentEnvelope(beta=1.0)
    if variant == "example3":
        lam = y_spec.lam
        env = MomentEnvelope(beta=1.0, kind="poly", coeffs=(lam, lam * lam))
        return env, env
    if variant == "example2":
        m4 = y_spec.fourth_moment_bound
        if not np.isfinite(m4):
            m4 = y_spec.height_dist.fourth_moment()
        scale = m4**0.25 * y_spec.p
        env = MomentEnvelope(beta=2.0, kind="sum_of_cdfs", cdfs=y_spec.cdfs, scale=scale)
        return env, env
    raise ConfigurationError(
        f"no default envelope for generator variant {variant!r}; supply one explicitly"
    )


# ---------------------------------------------------------------------------
# increment-moment estimates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentEntry:
    t1: float
    t_mid: float | None
    t2: float
    estimate: float
    se: float
    envelope: float
    verdict: str


@dataclass(frozen=True)
class MomentReport:
    kind: str
    entries: tuple[MomentEntry, ...]
    replicates: int
    meta: dict = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return any(e.verdict == "violated" for e in self.entries)

    def rows(self) -> list[dict]:
        return [
            {
                "t1": e.t1,
                "t": "" if e.t_mid is None else e.t_mid,
                "t2": e.t2,
                "estimate": e.estimate,
                "se": e.se,
                "envelope": e.envelope,
                "verdict": e.verdict,
            }
            for e in self.entries
        ]


def _verdict(estimate: float, se: float, envelope: float) -> str:
    if estimate - 4.0 * se > envelope:
        return "violated"
    if estimate + 4.0 * se <= envelope:
        return "satisfied"
    return "inconclusive"


def _moment_mc(y_spec, statistics, tag, replicates, stream, map_chunks):
    """Accumulate per-entry (sum, sumsq) of a statistic over i.i.d. paths.

    ``statistics(increments)`` maps per-replicate interval increments of
    shape (m, n_intervals, d) to per-entry values (m, n_entries).
    """
    size = _series._chunk_size(1)
    ranges = _series._chunk_ranges(replicates, size)

    def one_chunk(c: int, m: int):
        sampler = y_spec.block_sampler(stream.substream(tag, c))
        vals = statistics(sampler.take(m))
        return np.sum(vals, axis=0), np.sum(vals * vals, axis=0)

    runner = map_chunks or _series._serial_map
    parts = runner(one_chunk, ranges)
    total = np.array([math.fsum(p[0][j] for p in parts) for j in range(parts[0][0].size)])
    total_sq = np.array([math.fsum(p[1][j] for p in parts) for j in range(parts[0][0].size)])
    mean = total / replicates
    var = np.maximum(total_sq - replicates * mean**2, 0.0) / max(replicates - 1, 1)
    se = np.sqrt(var / replicates)
    return mean, se


def estimate_c1(
    y_spec: YGeneratorSpec,
    pairs,
    replicates: int,
    envelope: MomentEnvelope,
    stream: RngStream,
    map_chunks=None,
) -> MomentReport:
    """Monte Carlo second moments ``E|Y(t2) - Y(t1)|^2`` against the envelope."""
    pairs = [(float(a), float(b)) for a, b in pairs]
    for a, b in pairs:
        if not 0.0 <= a <= b <= 1.0:
            raise DomainError(f"pair must satisfy 0 <= t1 <= t2 <= 1, got ({a}, {b})")
    if replicates < 100:
        raise ConfigurationError(f"need at least 100 replicates, got {replicates}")

    def stats(events):
        inc = interval_increments(events, pairs)
        return np.sum(inc * inc, axis=2)

    mean, se = _moment_mc(y_spec, stats, _TAG_C1, replicates, stream, map_chunks)
    entries = tuple(
        MomentEntry(a, None, b, float(mean[j]), float(se[j]),
                    envelope.pair_bound(a, b), _verdict(mean[j], se[j], envelope.pair_bound(a, b)))
        for j, (a, b) in enumerate(pairs)
    )
    return MomentReport("increment_second_moment", entries, replicates,
                        {"y": y_spec.echo(), "envelope": envelope.echo()})


def estimate_c2(
    y_spec: YGeneratorSpec,
    triples,
    replicates: int,
    envelope: MomentEnvelope,
    stream: RngStream,
    map_chunks=None,
) -> MomentReport:
    """Monte Carlo cross moments ``E|Y(t2)-Y(t)|^2 |Y(t)-Y(t1)|^2``."""
    triples = [(float(a), float(b), float(c)) for a, b, c in triples]
    for a, b, c in triples:
        if not 0.0 <= a <= b <= c <= 1.0:
            raise DomainError(f"triple must satisfy 0 <= t1 <= t <= t2 <= 1, got ({a}, {b}, {c})")
    if replicates < 100:
        raise ConfigurationError(f"need at least 100 replicates, got {replicates}")
    intervals = [(a, b) for a, b, _ in triples] + [(b, c) for _, b, c in triples]
    k = len(triples)

    def stats(events):
        inc = interval_increments(events, intervals)
        sq = np.sum(inc * inc, axis=2)
        return sq[:, :k] * sq[:, k:]

    mean, se = _moment_mc(y_spec, stats, _TAG_C2, replicates, stream, map_chunks)
    entries = tuple(
        MomentEntry(a, b, c, float(mean[j]), float(se[j]),
                    envelope.triple_bound(a, c), _verdict(mean[j], se[j], envelope.triple_bound(a, c)))
        for j, (a, b, c) in enumerate(triples)
    )
    return MomentReport("cross_moment", entries, replicates,
                        {"y": y_spec.echo(), "envelope": envelope.echo()})


# ---------------------------------------------------------------------------
# analytic sums over the truncated multipliers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentConstant:
    value: float
    converged: bool
    alpha: float
    m: float
    n_max: int


def moment_constant(alpha: float, m: float, eps: EpsilonSpec, n_max: int) -> MomentConstant:
    """Truncated series ``sum_{i<=n_max} i^(-m/alpha) E|eps~_i|^m``.

    Finite only for ``m > alpha``; smaller exponents are rejected as the
    divergent regime.  The convergence flag is set when the last decade of
    terms contributes less than 1e-6 of the total.
    """
    if m <= alpha:
        raise ConfigurationError(
            f"divergent regime: the moment series requires m > alpha, got m = {m}, alpha = {alpha}"
        )
    if n_max < 0:
        raise ConfigurationError(f"n_max must be nonnegative, got {n_max}")
    if n_max == 0:
        return MomentConstant(0.0, False, alpha, m, 0)
    i = np.arange(1, n_max + 1, dtype=np.float64)
    terms = i ** (-m / alpha) * eps.truncated_abs_moment(m, i, alpha)
    total = float(np.sum(terms))
    tail = float(np.sum(terms[n_max // 10:]))
    converged = total == 0.0 or (n_max >= 10 and tail < 1e-6 * total)
    return MomentConstant(total, converged, alpha, m, n_max)


def centered_first_moment_sum(alpha: float, eps: EpsilonSpec, n_max: int) -> float:
    """``sum_{i<=n_max} i^(-1/alpha) |E eps~_i|`` for mean-zero families.

    With ``E eps = 0`` the truncated mean equals minus the tail mean, so
    the terms vanish once every atom is kept.
    """
    if not eps.is_mean_zero:
        raise ConfigurationError(
            f"centered first-moment sum requires a mean-zero family, got mean {eps.mean()!r}"
        )
    if n_max <= 0:
        return 0.0
    i = np.arange(1, n_max + 1, dtype=np.float64)
    return float(np.sum(i ** (-1.0 / alpha) * np.abs(eps.truncated_mean(i, alpha))))


@dataclass(frozen=True)
class BorelCantelliSum:
    value: float
    alpha_moment: float


def borel_cantelli_sum(alpha: float, eps: EpsilonSpec, n_max: int) -> BorelCantelliSum:
    """``sum_{i<=n_max} P(|eps|^alpha > i)`` with its bound ``E|eps|^alpha``."""
    bound = eps.abs_moment(alpha)
    if n_max <= 0:
        return BorelCantelliSum(0.0, bound)
    i = np.arange(1, n_max + 1, dtype=np.float64)
    value = float(np.sum(eps.tail_prob(i, alpha)))
    if value > bound * (1.0 + 1e-12):
        raise AssertionError(f"tail-probability sum {value} exceeds E|eps|^alpha = {bound}")
    return BorelCantelliSum(value, bound)


def tail_weight_supremum(alpha: float, m: float, n_max: int = 10**5) -> float:
    """Grid supremum of ``x^(m/alpha - 1) * sum_{i >= x} i^(-m/alpha)``."""
    if m <= alpha:
        raise ConfigurationError(f"requires m > alpha, got m = {m}, alpha = {alpha}")
    i = np.arange(1, n_max + 1, dtype=np.float64)
    w = i ** (-m / alpha)
    suffix = np.cumsum(w[::-1])[::-1]
    return float(np.max(i ** (m / alpha - 1.0) * suffix))


def head_weight_supremum(alpha: float, n_max: int = 10**5) -> float:
    """Grid supremum of ``x^(1/alpha - 1) * sum_{i <= x} i^(-1/alpha)``."""
    i = np.arange(1, n_max + 1, dtype=np.float64)
    prefix = np.cumsum(i ** (-1.0 / alpha))
    return float(np.max(i ** (1.0 / alpha - 1.0) * prefix))


# ---------------------------------------------------------------------------
# set partitions of {1, 2, 3, 4} and the indexed fourth-moment sums
# ---------------------------------------------------------------------------


def _set_partitions(items: tuple[int, ...]) -> list[Partition]:
    """All set partitions, as tuples of blocks sorted by their least element."""
    if not items:
        return [()]
    first, rest = items[0], items[1:]
    out: list[Partition] = []
    for sub in _set_partitions(rest):
        out.append(((first,),) + sub)
        for j, block in enumerate(sub):
            out.append(sub[:j] + ((first,) + block,) + sub[j + 1:])
    canon = [tuple(sorted((tuple(sorted(b)) for b in p), key=lambda b: b[0])) for p in out]
    return sorted(set(canon))


def enumerate_partitions() -> list[Partition]:
    """The 15 set partitions of {1, 2, 3, 4}, in canonical sorted order."""
    return _set_partitions((1, 2, 3, 4))


def partition_label(tau: Partition) -> str:
    return "".join("{" + ",".join(str(x) for x in block) + "}" for block in tau)


def _block_moment_factors(block_sizes, alpha: float, eps: EpsilonSpec, n: int) -> list[np.ndarray]:
    """Per-block arrays g_B(i) = i^(-|B|/alpha) * moment factor of eps~_i.

    Singleton blocks contribute ``|E eps~_i|``; larger blocks contribute
    ``E|eps~_i|^b`` (absolute values per factor, as in the bounding step).
    """
    i = np.arange(1, n + 1, dtype=np.float64)
    out = []
    for b in block_sizes:
        if b == 1:
            mom = np.abs(eps.truncated_mean(i, alpha))
        else:
            mom = eps.truncated_abs_moment(float(b), i, alpha)
        out.append(i ** (-b / alpha) * mom)
    return out


def _sum_distinct_enumerated(gs: list[np.ndarray], n: int) -> float:
    """Sum of prod_j g_j(x_j) over pairwise-distinct assignments, by enumeration."""
    k = len(gs)
    if k == 1:
        return float(np.sum(gs[0]))
    total = 0.0
    if k == 2:
        total = np.sum(gs[0]) * np.sum(gs[1]) - np.sum(gs[0] * gs[1])
        return float(total)
    # loop the first index, broadcast the rest (n <= 60 keeps this small)
    idx = np.arange(n)
    if k == 3:
        ne01 = idx[:, None] != idx[None, :]
        for a in range(n):
            prod = gs[1][:, None] * gs[2][None, :]
            mask = ne01 & (idx[:, None] != a) & (idx[None, :] != a)
            total += gs[0][a] * float(np.sum(prod[mask]))
        return float(total)
    ne = idx[:, None] != idx[None, :]
    for a in range(n):
        pa = gs[1][:, None, None] * gs[2][None, :, None] * gs[3][None, None, :]
        mask = (
            ne[:, :, None]
            & ne[:, None, :]
            & ne[None, :, :]
            & (idx[:, None, None] != a)
            & (idx[None, :, None] != a)
            & (idx[None, None, :] != a)
        )
        total += gs[0][a] * float(np.sum(pa * mask))
    return float(total)


def _sum_distinct_factorized(gs: list[np.ndarray], n: int) -> float:
    """Same sum as above via inclusion-exclusion over coarser partitions."""
    k = len(gs)
    total = 0.0
    for pi in _set_partitions(tuple(range(k))):
        term = 1.0
        for group in pi:
            merged = gs[group[0]].copy()
            for j in group[1:]:
                merged = merged * gs[j]
            term *= ((-1.0) ** (len(group) - 1)) * math.factorial(len(group) - 1) * float(np.sum(merged))
        total += term
    return total


def partition_sum(tau: Partition, alpha: float, eps: EpsilonSpec, n: int) -> float:
    """``S_{n,tau}``: the weighted fourth-moment sum over index tuples of pattern tau.

    Independence across distinct indices factors the expectation into one
    moment per block; exact tuple enumeration is used up to n = 60 and an
    inclusion-exclusion factorization beyond.
    """
    if tau not in enumerate_partitions():
        raise ConfigurationError(f"not a partition of {{1,2,3,4}}: {tau!r}")
    if n <= 0:
        return 0.0
    gs = _block_moment_factors([len(b) for b in tau], alpha, eps, n)
    if n <= 60:
        return _sum_distinct_enumerated(gs, n)
    return _sum_distinct_factorized(gs, n)


@dataclass(frozen=True)
class PartitionReport:
    """Per-partition sums on a grid of truncation depths, with their bounds.

    ``envelope_exponents[j] = (p, q)`` factorizes the increment-envelope
    bound of partition j as ``Dhat = G1^p * G2^q`` where G1, G2 are the
    pair/triple envelope values over the widened interval.
    """

    alpha: float
    epsilon: dict
    n_grid: tuple[int, ...]
    partitions: tuple[str, ...]
    s_values: np.ndarray  # (len(partitions), len(n_grid))
    bound_products: tuple[float, ...]
    bound_products_alt: dict
    envelope_exponents: tuple[tuple[float, float], ...]
    cardinality_note: str

    def rows(self) -> list[dict]:
        out = []
        for j, label in enumerate(self.partitions):
            row = {"partition": label}
            for c, n in enumerate(self.n_grid):
                row[f"s_n{n}"] = float(self.s_values[j, c])
            row["bound_product"] = self.bound_products[j]
            row["bound_product_alt"] = self.bound_products_alt.get(label, "")
            row["g1_exponent"], row["g2_exponent"] = self.envelope_exponents[j]
            out.append(row)
        return out


def partition_report(
    alpha: float,
    eps: EpsilonSpec,
    n_grid=(1, 2, 4, 8, 16, 32, 64, 128),
    constant_n_max: int = 10**5,
) -> PartitionReport:
    """Evaluate every ``S_{n,tau}`` on a depth grid next to its constant bound.

    The bound for a partition multiplies C(alpha, b) over its blocks
    (the centered first-moment sum for singletons).  For the partitions
    with block sizes {3, 1} two displayed bounds circulate,
    C(a,3)*C(a,3) and C(a,3)*C(a,1); both are reported side by side.
    """
    taus = enumerate_partitions()
    n_grid = tuple(int(n) for n in n_grid)
    s = np.array([[partition_sum(tau, alpha, eps, n) for n in n_grid] for tau in taus])
    c_of: dict[int, float] = {}
    for b in {len(block) for tau in taus for block in tau}:
        if b == 1:
            c_of[b] = centered_first_moment_sum(alpha, eps, constant_n_max) if eps.is_mean_zero else math.inf
        else:
            c_of[b] = moment_constant(alpha, float(b), eps, constant_n_max).value
    bounds = tuple(float(np.prod([c_of[len(block)] for block in tau])) for tau in taus)
    alt = {}
    for tau in taus:
        sizes = sorted(len(block) for block in tau)
        if sizes == [1, 3]:
            alt[partition_label(tau)] = c_of[3] * c_of[3]
    return PartitionReport(
        alpha=alpha,
        epsilon=eps.echo(),
        n_grid=n_grid,
        partitions=tuple(partition_label(t) for t in taus),
        s_values=s,
        bound_products=bounds,
        bound_products_alt=alt,
        envelope_exponents=tuple(partition_envelope_exponents(t) for t in taus),
        cardinality_note=PARTITION_CARDINALITY_NOTE,
    )


# ---------------------------------------------------------------------------
# tightness functional
# ---------------------------------------------------------------------------


def _envelope_block_exponents(first_slots: int, second_slots: int) -> tuple[float, float]:
    """Envelope exponents (p, q) bounding one block's expectation by G1^p G2^q.

    ``first_slots`` of the block's factors are increments over (t1, t] and
    ``second_slots`` over (t, t2]; Cauchy-Schwarz plus the two moment
    envelopes give the exponents below (G1, G2 are the pair/triple
    envelope values over the widened interval (t1, t2]).
    """
    a, b = first_slots, second_slots
    if (a, b) == (2, 2):
        return 0.0, 2.0
    if (a, b) in ((2, 1), (1, 2)):
        return 0.5, 1.0
    if a + b == 2:
        return 1.0, 0.0
    return 0.5, 0.0


def partition_envelope_exponents(tau: Partition) -> tuple[float, float]:
    """Summed (G1, G2) exponents of the increment-envelope bound for tau."""
    p = q = 0.0
    for block in tau:
        dp, dq = _envelope_block_exponents(
            sum(1 for j in block if j in (1, 2)),
            sum(1 for j in block if j in (3, 4)),
        )
        p += dp
        q += dq
    return p, q


@dataclass(frozen=True)
class TightnessResult:
    t1: float
    t_mid: float
    t2: float
    n_terms: int
    estimate: float
    se: float
    bound: float
    verdict: str

    def row(self) -> dict:
        return {
            "t1": self.t1,
            "t": self.t_mid,
            "t2": self.t2,
            "n": self.n_terms,
            "estimate": self.estimate,
            "se": self.se,
            "envelope": self.bound,
            "verdict": self.verdict,
        }


def tightness_functional(
    spec: SeriesSpec,
    n: int,
    triple,
    replicates: int,
    envelopes: tuple[MomentEnvelope, MomentEnvelope] | None = None,
    map_chunks=None,
) -> TightnessResult:
    """Fourth moment of weighted partial-sum increments vs its assembled bound.

    Requires ``epsilon_mode='truncated'`` and ``weight_mode='deterministic'``
    (the partial sums whose tightness the bound controls).  The companion
    bound is ``d^2 * sum_tau S_{n,tau} * Dhat_tau(t1, t, t2)`` with the
    envelope factors of :func:`_envelope_block_factor`.
    """
    if spec.epsilon_mode != "truncated" or spec.weight_mode != "deterministic":
        raise ConfigurationError(
            "tightness functional is defined for epsilon_mode='truncated', "
            f"weight_mode='deterministic'; got {spec.epsilon_mode!r}, {spec.weight_mode!r}"
        )
    t1, t_mid, t2 = (float(x) for x in triple)
    if not 0.0 <= t1 <= t_mid <= t2 <= 1.0:
        raise DomainError(f"triple must satisfy 0 <= t1 <= t <= t2 <= 1, got {triple}")
    run_spec = SeriesSpec(
        alpha=spec.alpha,
        truncation_n=int(n),
        epsilon=spec.epsilon,
        y_gen=spec.y_gen,
        seed=spec.seed,
        weight_mode="deterministic",
        epsilon_mode="truncated",
    )
    inc = sample_weighted_increments(run_spec, [(t1, t_mid), (t_mid, t2)], replicates, map_chunks)
    sq = np.sum(inc * inc, axis=2)
    stat = sq[:, 1] * sq[:, 0]
    estimate = float(np.mean(stat))
    se = float(np.std(stat, ddof=1) / math.sqrt(replicates)) if replicates > 1 else 0.0

    env1, env2 = envelopes if envelopes is not None else default_envelopes(spec.y_gen)
    g1 = env1.pair_bound(t1, t2)
    g2 = env2.triple_bound(t1, t2) ** 0.5  # |F2(t2)-F2(t1)|^beta2
    d = spec.dimension
    bound = 0.0
    for tau in enumerate_partitions():
        s_val = partition_sum(tau, spec.alpha, spec.epsilon, int(n))
        p, q = partition_envelope_exponents(tau)
        bound += s_val * g1**p * g2**q
    bound *= d * d
    return TightnessResult(t1, t_mid, t2, int(n), estimate, se, float(bound),
                           _verdict(estimate, se, bound))
