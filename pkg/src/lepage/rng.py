"""Deterministic splittable random streams.

Every stochastic routine in this package draws from an :class:`RngStream`,
a value object naming a stream by ``(seed, stream_id)`` plus an optional
route of integers for derived substreams.  Identical names produce
bit-identical draws on every platform (for a fixed numpy version), and
distinct names produce statistically independent streams, because the name
is fed verbatim into a counter-based Philox generator through
``numpy.random.SeedSequence``.

Replicate ``r`` of a Monte Carlo run always uses ``stream_id = r`` (or a
fixed-size chunk of replicates uses one substream per chunk), so results do
not depend on thread scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["RngStream"]


@dataclass(frozen=True)
class RngStream:
    """Name of a reproducible random stream.

    Parameters
    ----------
    seed :
        64-bit unsigned experiment seed.
    stream_id :
        Replicate index; distinct ids give independent streams.
    route :
        Extra integers appended by :meth:`substream` to derive
        independent child streams (one per ingredient of a simulation).
    """

    seed: int
    stream_id: int = 0
    route: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0 or v >= 2**64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def substream(self, *route: int) -> "RngStream":
        """Derive an independent child stream by extending the route."""
        return RngStream(self.seed, self.stream_id, self.route + tuple(int(r) for r in route))

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the origin of this stream."""
        entropy = (self.seed, self.stream_id) + self.route
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
