"""Random interaction hypergraphs: weighted draws, blockmodel draws, designs.

Reproducibility is built on counter-based Philox streams: a
:class:`RngStream` is a (seed, key) pair, identical pairs yield identical
draws, and distinct keys yield statistically independent streams. The
experiment harness keys streams by (regime, n, m, replicate) so results do
not depend on scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .core import BlockModelSpec, InteractionHypergraph

__all__ = [
    "RngStream",
    "SizeLaw",
    "SimulationDesign",
    "draw_weighted_sequence",
    "sample_weighted_without_replacement",
    "sample_hyper_sbm",
    "sample_sizes",
    "generate_design",
]

GROWING = "growing"
FIXED = "fixed"


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by a 64-bit seed and a key path.

    The generator is Philox seeded through ``SeedSequence(seed, spawn_key=key)``,
    so the draw sequence is a pure function of (seed, key) and independent
    streams are obtained by extending the key.
    """

    seed: int
    key: tuple[int, ...] = ()

    algorithm = "philox"

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.key)
        return np.random.Generator(np.random.Philox(ss))

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(int(k) for k in key))


@dataclass(frozen=True)
class SizeLaw:
    """Interaction sizes distributed as k_min + Binomial(k_max - k_min, alpha)."""

    k_min: int
    k_max: int
    alpha: float = 0.4

    def __post_init__(self):
        if not 2 <= self.k_min <= self.k_max:
            raise ValueError(f"need 2 <= k_min <= k_max, got ({self.k_min}, {self.k_max})")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")

    def mean(self) -> float:
        return self.k_min + self.alpha * (self.k_max - self.k_min)


@dataclass(frozen=True)
class SimulationDesign:
    """Two-class benchmark layout: basic types (1,0), (0,1), (1,1) in thirds.

    The growing regime sets k_max = n/d; the fixed regime pins k_max = 5.
    Nodes split evenly into the two classes.
    """

    n: int
    m: int
    regime: str
    d: int = 2
    alpha: float = 0.4
    seed: int = 0

    def __post_init__(self):
        if self.regime not in (GROWING, FIXED):
            raise ValueError(f"regime must be '{GROWING}' or '{FIXED}', got {self.regime!r}")
        if self.d != 2:
            raise ValueError("the thirds layout is defined for d=2 only")
        if self.n < 2 or self.n % self.d != 0:
            raise ValueError(f"n must be a positive multiple of d={self.d}, got {self.n}")
        if self.m < 3 or self.m % 3 != 0:
            raise ValueError(f"m must be a positive multiple of 3, got {self.m}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def k_max(self) -> int:
        return self.n // self.d if self.regime == GROWING else 5


def draw_weighted_sequence(weights, k: int, rng: np.random.Generator) -> list[int]:
    """Draw k distinct candidate indices sequentially, in draw order.

    Each step is a multinomial trial over the remaining candidates with
    probabilities proportional to their weights (the drawn candidate's weight
    is then zeroed). Implemented as a partial-sum search, O(k n).
    """
    w = np.array(weights, dtype=float)
    if w.ndim != 1:
        raise ValueError("weights must be one-dimensional")
    if not np.all(np.isfinite(w)) or (w < 0).any():
        raise ValueError("weights must be finite and nonnegative")
    support = int((w > 0).sum())
    if k < 0:
        raise ValueError(f"cannot draw {k} items")
    if k > support:
        raise ValueError(f"cannot draw {k} items from {support} positively weighted candidates")
    out: list[int] = []
    for _ in range(k):
        cumulative = np.cumsum(w)
        u = rng.random() * cumulative[-1]
        i = int(np.searchsorted(cumulative, u, side="right"))
        if i >= w.size or w[i] <= 0.0:
            # float roundoff pushed u to the top of the scale; take the last
            # positively weighted candidate
            i = int(np.flatnonzero(w > 0)[-1])
        out.append(i)
        w[i] = 0.0
    return out


def sample_weighted_without_replacement(weights, k: int, rng: np.random.Generator) -> frozenset[int]:
    """Unordered set of k distinct candidate indices from sequential draws."""
    return frozenset(draw_weighted_sequence(weights, k, rng))


def sample_hyper_sbm(spec: BlockModelSpec, rng: np.random.Generator) -> InteractionHypergraph:
    """Sample a hypergraph: each interaction draws a uniform tau_{rp}-subset
    of class r, independently across classes and interactions."""
    members = [spec.class_members(r) for r in range(1, spec.d + 1)]
    tmat = spec.type_matrix
    interactions = []
    for p in range(spec.m):
        verts: list[int] = []
        for r in range(spec.d):
            count = int(tmat[r, p])
            if count:
                verts.extend(rng.choice(members[r], size=count, replace=False))
        interactions.append(verts)
    return InteractionHypergraph(n=spec.n, interactions=interactions)


def sample_sizes(law: SizeLaw, m: int, rng: np.random.Generator) -> np.ndarray:
    """m i.i.d. interaction sizes from the size law."""
    return law.k_min + rng.binomial(law.k_max - law.k_min, law.alpha, size=m)


def _binomial_split(k: int, rng: np.random.Generator) -> int:
    """Class-1 share of a mixed interaction: 1 + Binomial(k - 2, 1/2).

    Guarantees at least one node from each class and is symmetric between the
    classes.
    """
    return 1 + int(rng.binomial(k - 2, 0.5))


def generate_design(
    design: SimulationDesign,
    stream: RngStream | None = None,
    mixed_split: Callable[[int, np.random.Generator], int] = _binomial_split,
) -> tuple[BlockModelSpec, InteractionHypergraph]:
    """Draw one benchmark instance: type matrix first, then memberships.

    Column layout: the first m/3 interactions are pure class 1, the next third
    pure class 2, the last third mixed. Sizes follow the design's size law
    with k_min keyed by basic type (2 for pure; the number of represented
    classes, also 2, for mixed). Identical (design, stream) pairs give
    bitwise-identical output.
    """
    if stream is None:
        stream = RngStream(design.seed)
    n, m, d = design.n, design.m, design.d
    k_max = design.k_max
    n_r = n // d
    if k_max > n_r:
        raise ValueError(f"k_max={k_max} exceeds the class size {n_r}")
    z = np.repeat(np.arange(1, d + 1), n_r)

    third = m // 3
    size_rng = stream.child(0).generator()
    pure_law = SizeLaw(2, k_max, design.alpha)
    mixed_law = SizeLaw(2, k_max, design.alpha)  # both classes represented => k_min 2
    sizes = np.empty(m, dtype=int)
    sizes[:third] = sample_sizes(pure_law, third, size_rng)
    sizes[third : 2 * third] = sample_sizes(pure_law, third, size_rng)
    sizes[2 * third :] = sample_sizes(mixed_law, third, size_rng)

    alloc_rng = stream.child(1).generator()
    tmat = np.zeros((d, m), dtype=int)
    tmat[0, :third] = sizes[:third]
    tmat[1, third : 2 * third] = sizes[third : 2 * third]
    for p in range(2 * third, m):
        first = mixed_split(int(sizes[p]), alloc_rng)
        if not 1 <= first <= sizes[p] - 1:
            raise ValueError(f"mixed split {first} leaves a class empty for size {sizes[p]}")
        tmat[0, p] = first
        tmat[1, p] = sizes[p] - first

    spec = BlockModelSpec(z=z, type_matrix=tmat)
    h = sample_hyper_sbm(spec, stream.child(2).generator())
    return spec, h
