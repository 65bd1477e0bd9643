"""Compositions, lattice windows, configurations, and structural operators.

A composition is a plain tuple of n+1 nonnegative occupation counts indexed
by color 0..n; color 0 means "hole".  A configuration assigns one
composition per site of a finite window.  Windows carry per-site capacities
plus the capacity assumed for sites outside the window, which matters for
boundary accounting in truncated identity checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .qarith import qpow

Composition = tuple            # tuple of n+1 nonnegative ints


@lru_cache(maxsize=None)
def enum_compositions(n: int, capacity: int) -> tuple:
    """All compositions of `capacity` into n+1 parts, lexicographic order.

    The order is the canonical index used by every matrix in this package.
    """
    if n < 1:
        raise ValueError("need at least one particle species")
    if capacity < 0:
        raise ValueError("capacity must be nonnegative")

    def rec(parts_left: int, total: int):
        if parts_left == 1:
            yield (total,)
            return
        for head in range(total + 1):
            for rest in rec(parts_left - 1, total - head):
                yield (head,) + rest

    return tuple(rec(n + 1, capacity))


def reverse_composition(comp: Composition) -> Composition:
    return tuple(reversed(comp))


@dataclass(frozen=True)
class Window:
    """Finite lattice window with inclusive site range lo..hi."""

    lo: int
    hi: int
    capacities: tuple
    exterior_capacity: int = 1

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("window requires lo <= hi")
        if len(self.capacities) != self.length:
            raise ValueError("one capacity per site required")
        if any(m < 1 for m in self.capacities):
            raise ValueError("capacities must be positive")
        if self.exterior_capacity < 1:
            raise ValueError("exterior capacity must be positive")

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1

    @property
    def sites(self) -> range:
        return range(self.lo, self.hi + 1)

    def index(self, x: int) -> int:
        if not self.lo <= x <= self.hi:
            raise IndexError(f"site {x} outside window {self.lo}..{self.hi}")
        return x - self.lo

    def capacity(self, x: int) -> int:
        return self.capacities[self.index(x)]

    @property
    def uniform_capacity(self):
        caps = set(self.capacities) | {self.exterior_capacity}
        return self.capacities[0] if len(caps) == 1 else None

    def extended(self, left: int = 1, right: int = 1) -> "Window":
        m = self.exterior_capacity
        return Window(
            self.lo - left,
            self.hi + right,
            (m,) * left + self.capacities + (m,) * right,
            m,
        )


def uniform_window(lo: int, hi: int, capacity: int = 1) -> Window:
    return Window(lo, hi, (capacity,) * (hi - lo + 1), capacity)


@dataclass(frozen=True)
class Config:
    """One composition per window site; hashable and immutable."""

    window: Window
    sites: tuple

    def __post_init__(self):
        if len(self.sites) != self.window.length:
            raise ValueError("one composition per site required")
        for comp, m in zip(self.sites, self.window.capacities):
            if sum(comp) != m:
                raise ValueError(f"composition {comp} does not fill capacity {m}")

    @property
    def n_colors(self) -> int:
        return len(self.sites[0]) - 1

    def site(self, x: int) -> Composition:
        return self.sites[self.window.index(x)]

    @property
    def particle_count(self) -> int:
        """Total count of colors 1..n over the window."""
        return sum(sum(comp[1:]) for comp in self.sites)

    @property
    def is_empty(self) -> bool:
        return self.particle_count == 0

    @property
    def support(self) -> tuple:
        return tuple(
            x for x in self.window.sites if sum(self.site(x)[1:]) > 0
        )

    def species_counts(self) -> tuple:
        n = self.n_colors
        return tuple(
            sum(comp[i] for comp in self.sites) for i in range(1, n + 1)
        )

    def with_site(self, x: int, comp: Composition) -> "Config":
        i = self.window.index(x)
        return Config(self.window, self.sites[:i] + (tuple(comp),) + self.sites[i + 1:])


def empty_config(window: Window, n: int) -> Config:
    sites = tuple((m,) + (0,) * n for m in window.capacities)
    return Config(window, sites)


@lru_cache(maxsize=None)
def enum_configs(window: Window, n: int) -> tuple:
    """All configurations on the window, lexicographic in per-site order."""
    def rec(i):
        if i == window.length:
            yield ()
            return
        for comp in enum_compositions(n, window.capacities[i]):
            for rest in rec(i + 1):
                yield (comp,) + rest

    return tuple(Config(window, sites) for sites in rec(0))


def color_reverse(obj):
    """Reverse the color order (color i -> n-i); works on both kinds."""
    if isinstance(obj, Config):
        return Config(obj.window, tuple(reverse_composition(c) for c in obj.sites))
    return reverse_composition(obj)


def shift(config: Config, by: int) -> Config:
    """Shifted configuration: result at x carries the input content of x+by.

    Requires uniform capacities.  Content that would leave the window must
    be empty, otherwise the shift is not defined.
    """
    window = config.window
    if window.uniform_capacity is None:
        raise ValueError("shift requires uniform capacities")
    n = config.n_colors
    empty = (window.uniform_capacity,) + (0,) * n
    new_sites = []
    for x in window.sites:
        src = x + by
        if window.lo <= src <= window.hi:
            new_sites.append(config.site(src))
        else:
            new_sites.append(empty)
    for x in window.sites:
        dst = x - by
        if not window.lo <= dst <= window.hi and sum(config.site(x)[1:]) > 0:
            raise ValueError(f"nonempty content at site {x} shifted out of window")
    return Config(window, tuple(new_sites))


def conserved_weights(config: Config, q: Fraction):
    """(particle count, diagonal position weight, diagonal count weight).

    The position weight multiplies q**(-2*m*x) per particle at site x and
    needs a uniform capacity m; the count weight is q**(2*count).
    """
    count = config.particle_count
    m = config.window.uniform_capacity
    if m is None:
        raise ValueError("position weight requires uniform capacity")
    g = Fraction(1)
    for x in config.window.sites:
        k = sum(config.site(x)[1:])
        if k:
            g *= qpow(q, -2 * m * x * k)
    return count, g, qpow(q, 2 * count)


def blocks(config: Config) -> list:
    """Maximal runs of constant site content, as inclusive (start, end) pairs.

    Defined for the single-species capacity-1 case; the window edges act as
    sentinels that terminate runs.
    """
    if config.n_colors != 1 or config.window.uniform_capacity != 1:
        raise ValueError("blocks are defined for n=1, capacity 1")
    out = []
    start = config.window.lo
    prev = config.site(start)
    for x in range(config.window.lo + 1, config.window.hi + 1):
        cur = config.site(x)
        if cur != prev:
            out.append((start, x - 1))
            start = x
            prev = cur
    out.append((start, config.window.hi))
    return out


def config_to_json(config: Config) -> str:
    w = config.window
    return json.dumps({
        "lo": w.lo,
        "hi": w.hi,
        "capacities": list(w.capacities),
        "exterior_capacity": w.exterior_capacity,
        "sites": [list(c) for c in config.sites],
    })


def config_from_json(text: str) -> Config:
    data = json.loads(text)
    window = Window(
        data["lo"],
        data["hi"],
        tuple(data["capacities"]),
        data.get("exterior_capacity", 1),
    )
    return Config(window, tuple(tuple(c) for c in data["sites"]))
