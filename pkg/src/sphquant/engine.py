"""The one-dimensional block/midpoint engine.

A uniform grid of ``N`` longitudes on a circle is cut into contiguous blocks;
each block is served by the representative at its azimuthal midpoint.  This
module holds the grid and layout types, the closed-form block distortions,
and the canonical layout constructor.

Two normalisations of a block's distortion appear in practice and both are
exposed: the *total* (sum over the block's points of the squared distance to
the midpoint) and the *mean* (total divided by block size).  Equatorial
blocks have mean ``delta**2 * (s**2 - 1) / 12``; the quantization error of a
layout is the sum of block totals divided by ``N``.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import TWO_PI, LatitudeKernel

__all__ = [
    "GridSpec",
    "BlockLayout",
    "BlockStat",
    "centered_square_sum",
    "block_objective",
    "block_distortion_equator",
    "block_mean_equator",
    "block_sum_small_circle",
    "build_layout",
    "layout_midpoints",
    "layout_blocks",
    "smoothing_second_difference",
]

_INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class GridSpec:
    """``count`` equally spaced longitudes starting at ``base``."""

    count: int
    base: float = 0.0

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"grid count must be a positive integer, got {self.count!r}")
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "base", float(self.base))

    @property
    def spacing(self):
        return TWO_PI / self.count

    def longitude(self, k):
        """Longitude of point ``k`` (wrapped to [0, 2*pi))."""
        return float(np.mod(self.base + (k % self.count) * self.spacing, TWO_PI))

    def longitudes(self):
        return np.mod(self.base + np.arange(self.count) * self.spacing, TWO_PI)


@dataclass(frozen=True)
class BlockLayout:
    """Cyclic partition of grid indices into contiguous blocks.

    Block ``b`` starts at ``start_index + sum(sizes[:b])`` (mod N) and holds
    ``sizes[b]`` consecutive points.
    """

    sizes: tuple
    start_index: int = 0

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or min(sizes) < 1:
            raise ValueError(f"block sizes must be positive, got {self.sizes!r}")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "start_index", int(self.start_index))

    @property
    def total(self):
        return sum(self.sizes)

    def starts(self):
        """Grid index of the first point of every block."""
        n = self.total
        offsets = np.concatenate([[0], np.cumsum(self.sizes)[:-1]])
        return [int((self.start_index + o) % n) for o in offsets]

    def size_multiset(self):
        return tuple(sorted(self.sizes))

    def is_smooth(self):
        return max(self.sizes) - min(self.sizes) <= 1

    def assignment(self):
        """Block label for every grid index."""
        n = self.total
        labels = np.empty(n, dtype=int)
        for b, (start, s) in enumerate(zip(self.starts(), self.sizes)):
            labels[(start + np.arange(s)) % n] = b
        return labels


@dataclass(frozen=True)
class BlockStat:
    """One block: its size, its representative and its distortion total."""

    size: int
    midpoint: float
    distortion: float
    start: int = 0
    circle: str = "equator"

    @property
    def total(self):
        return self.distortion

    @property
    def mean(self):
        return self.distortion / self.size


def centered_square_sum(m):
    """``sum_{j<m} (j - (m-1)/2)**2``, i.e. ``m (m**2 - 1) / 12``.

    The numerator is formed in integer arithmetic and divided once, so the
    result is exact (it is always a multiple of 1/2).
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    m = int(m)
    numerator = m * (m * m - 1)
    if numerator > _INT64_MAX:
        raise OverflowError(f"m (m^2 - 1) overflows 64 bits for m={m}")
    return numerator / 12


def block_objective(grid, start, s, theta):
    """Mean squared angular deviation of a block from ``theta``.

    The block is the ``s`` consecutive grid points starting at index
    ``start``; offsets are measured along the unwrapped block so a block
    straddling longitude 0 stays a single interval.  ``theta`` is shifted by
    a multiple of 2*pi to sit next to the block before differencing.
    """
    if not 1 <= s <= grid.count:
        raise ValueError(f"block size must be in [1, {grid.count}], got {s}")
    first = grid.base + start * grid.spacing
    x = first + np.arange(s) * grid.spacing
    centre = first + 0.5 * (s - 1) * grid.spacing
    t = theta + TWO_PI * np.round((centre - theta) / TWO_PI)
    return float(np.mean((x - t) ** 2))


def block_distortion_equator(s, delta):
    """Total squared deviation of an equatorial block from its midpoint."""
    return delta * delta * centered_square_sum(s)


def block_mean_equator(s, delta):
    """Per-point mean of :func:`block_distortion_equator`."""
    if int(s) != s or s < 1:
        raise ValueError(f"s must be a positive integer, got {s!r}")
    return delta * delta * (s * s - 1) / 12


def block_sum_small_circle(s, phi0, delta, kernel=None):
    """Total squared geodesic deviation of a block on the parallel ``phi0``.

    Sums ``sigma(phi0, (j - (s-1)/2) delta)**2`` over ``j < s``.  The centred
    offsets handle odd and even block sizes alike.
    """
    if int(s) != s or s < 1:
        raise ValueError(f"s must be a positive integer, got {s!r}")
    k = kernel if kernel is not None else LatitudeKernel(phi0)
    offsets = (np.arange(s) - 0.5 * (s - 1)) * delta
    return float(np.sum(k.sigma2(offsets)))


def build_layout(N, n):
    """Canonical layout: ``r`` blocks of size ``m + 1`` first, then ``m``'s."""
    if int(N) != N or int(n) != n:
        raise ValueError("N and n must be integers")
    if N < 1 or n < 1 or n > N:
        raise ValueError(f"need 1 <= n <= N, got N={N}, n={n}")
    m, r = divmod(int(N), int(n))
    return BlockLayout((m + 1,) * r + (m,) * (n - r), 0)


def layout_midpoints(grid, layout):
    """Representative longitude of every block, wrapped to [0, 2*pi).

    Each midpoint is ``first + (s - 1) * delta / 2`` taken along the block,
    never an average of wrapped longitudes.
    """
    if layout.total != grid.count:
        raise ValueError("layout does not cover the grid")
    return [
        float(np.mod(grid.base + (start + 0.5 * (s - 1)) * grid.spacing, TWO_PI))
        for start, s in zip(layout.starts(), layout.sizes)
    ]


def layout_blocks(grid, layout, phi0=0.0, circle="equator"):
    """:class:`BlockStat` for every block of ``layout`` on ``grid``."""
    delta = grid.spacing
    kernel = None if phi0 == 0.0 else LatitudeKernel(phi0)
    cache = {}
    out = []
    for start, s, mid in zip(layout.starts(), layout.sizes, layout_midpoints(grid, layout)):
        if s not in cache:
            if kernel is None:
                cache[s] = block_distortion_equator(s, delta)
            else:
                cache[s] = block_sum_small_circle(s, phi0, delta, kernel)
        out.append(BlockStat(s, mid, cache[s], start, circle))
    return out


def smoothing_second_difference(s, delta):
    """``D(s+1) - 2 D(s) + D(s-1)`` for the per-point mean ``D``."""
    if int(s) != s or s < 2:
        raise ValueError(f"s must be an integer >= 2, got {s}")
    s = int(s)
    # difference the integer numerators s^2 - 1 first; scaling once keeps it exact
    second = ((s + 1) ** 2 - 1) - 2 * (s * s - 1) + ((s - 1) ** 2 - 1)
    return delta * delta * second / 12
