"""Closed-form optimal quantizers for uniform samples on circles of the sphere.

Three supports are covered:

* ``equator`` -- ``N`` equally spaced points on the equator;
* ``one-circle`` -- ``N`` equally spaced points on the parallel at ``phi0``;
* ``two-circles`` -- ``M`` points on each of the parallels at ``+phi0`` and
  ``-phi0``, the southern set being the antipodal image of the northern one.

In every case the optimal codebook cuts each circle into contiguous blocks
of ``m = N // n`` and ``m + 1`` points and puts a representative at each
block's azimuthal midpoint.  The mean-square error is the sum of block
totals divided by the number of sample points.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .engine import (
    GridSpec,
    BlockLayout,
    BlockStat,
    block_distortion_equator,
    block_sum_small_circle,
    build_layout,
    layout_blocks,
    layout_midpoints,
)
from .geometry import HALF_PI, TWO_PI, LatitudeKernel, check_latitude

__all__ = [
    "ModelKind",
    "Circle",
    "ModelSpec",
    "Codebook",
    "DistortionReport",
    "equator_error",
    "one_circle_error",
    "quantize_equator",
    "quantize_one_circle",
    "quantize_two_circles",
    "asymptotic_one_circle",
    "asymptotic_two_circles",
    "cross_circle_gap",
    "latitude_table",
    "codebook_error",
]


class ModelKind(str, enum.Enum):
    EQUATOR = "equator"
    ONE_SMALL_CIRCLE = "one-circle"
    TWO_SMALL_CIRCLES = "two-circles"


class Circle(str, enum.Enum):
    UPPER = "upper"
    LOWER = "lower"
    EQUATOR = "equator"


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    N_total: int
    n_codes: int
    phi0: float = 0.0

    def __post_init__(self):
        kind = ModelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.N_total < 1 or self.n_codes < 1:
            raise ValueError("N_total and n_codes must be positive")
        phi0 = check_latitude(self.phi0)
        if kind is ModelKind.EQUATOR and phi0 != 0.0:
            raise ValueError("the equator model has phi0 = 0")
        if kind is ModelKind.TWO_SMALL_CIRCLES:
            if phi0 == 0.0:
                raise ValueError("two-circle model needs 0 < phi0 < pi/2")
            if self.N_total % 2 or self.n_codes % 2:
                raise ValueError("two-circle model needs even N_total and n_codes")
        object.__setattr__(self, "phi0", phi0)

    @property
    def per_circle(self):
        """Points per circle (M); equals N_total for single-circle models."""
        if self.kind is ModelKind.TWO_SMALL_CIRCLES:
            return self.N_total // 2
        return self.N_total


@dataclass(frozen=True)
class Codebook:
    longitudes: tuple
    circles: tuple

    def __post_init__(self):
        if len(self.longitudes) != len(self.circles):
            raise ValueError("one circle tag per longitude")
        object.__setattr__(self, "longitudes", tuple(float(t) for t in self.longitudes))
        object.__setattr__(self, "circles", tuple(Circle(c) for c in self.circles))

    def __len__(self):
        return len(self.longitudes)

    def entries(self):
        return list(zip(self.longitudes, self.circles))

    def is_antipodally_paired(self, tol=1e-12):
        """Every upper entry at ``t`` has a lower entry at ``t + pi``."""
        upper = [t for t, c in self.entries() if c is Circle.UPPER]
        lower = np.array([t for t, c in self.entries() if c is Circle.LOWER])
        if len(upper) != len(lower):
            return False
        for t in upper:
            target = np.mod(t + np.pi, TWO_PI)
            gap = np.abs(np.mod(lower - target + np.pi, TWO_PI) - np.pi)
            if lower.size == 0 or gap.min() > tol:
                return False
        return True


@dataclass
class DistortionReport:
    error: float
    per_block: list
    model: ModelSpec
    codebook: Codebook
    metadata: dict = field(default_factory=dict)

    @property
    def layout(self):
        """Block sizes of the first circle in cyclic order."""
        first = self.per_block[0].circle if self.per_block else None
        return BlockLayout(
            [b.size for b in self.per_block if b.circle == first],
            self.per_block[0].start if self.per_block else 0,
        )


def _check_counts(N, n):
    if int(N) != N or int(n) != n:
        raise ValueError("point and code counts must be integers")
    if N < 1 or n < 1:
        raise ValueError(f"need N >= 1 and n >= 1, got N={N}, n={n}")
    return int(N), int(n)


def equator_error(N, n):
    """Exact error for ``N`` equatorial points and ``n`` codes.

    ``[(n - r) T(m) + r T(m + 1)] / N`` with ``T(s)`` the block total; for
    ``n | N`` this is ``pi**2 / (3 n**2) - pi**2 / (3 N**2)``.
    """
    N, n = _check_counts(N, n)
    if n >= N:
        return 0.0
    delta = TWO_PI / N
    m, r = divmod(N, n)
    return ((n - r) * block_distortion_equator(m, delta)
            + r * block_distortion_equator(m + 1, delta)) / N


def equator_error_divisible(N, n):
    """Divisible-case closed form ``pi^2/(3 N^2) (N^2/n^2 - 1)``."""
    N, n = _check_counts(N, n)
    if N % n:
        raise ValueError("n must divide N")
    return np.pi ** 2 / (3.0 * N * N) * ((N // n) ** 2 - 1)


def one_circle_error(N, n, phi0):
    """Exact error on one parallel: ``[(n - r) S_m + r S_{m+1}] / N``."""
    N, n = _check_counts(N, n)
    phi0 = check_latitude(phi0)
    if phi0 == 0.0:
        return equator_error(N, n)
    if n >= N:
        return 0.0
    delta = TWO_PI / N
    kernel = LatitudeKernel(phi0)
    m, r = divmod(N, n)
    s_m = block_sum_small_circle(m, phi0, delta, kernel)
    s_m1 = block_sum_small_circle(m + 1, phi0, delta, kernel) if r else 0.0
    return ((n - r) * s_m + r * s_m1) / N


def _singletons(grid, circle):
    return [BlockStat(1, grid.longitude(k), 0.0, k, circle) for k in range(grid.count)]


def quantize_equator(N, n, base=0.0):
    """Optimal ``n``-point quantizer for ``N`` equally spaced equatorial points."""
    N, n = _check_counts(N, n)
    spec = ModelSpec(ModelKind.EQUATOR, N, n, 0.0)
    return _single_circle(spec, base, Circle.EQUATOR)


def quantize_one_circle(N, n, phi0, base=0.0):
    """Optimal ``n``-point quantizer for ``N`` points on the parallel ``phi0``.

    ``phi0 = 0`` gives the same error value as :func:`quantize_equator`.
    """
    N, n = _check_counts(N, n)
    spec = ModelSpec(ModelKind.ONE_SMALL_CIRCLE, N, n, phi0)
    tag = Circle.EQUATOR if spec.phi0 == 0.0 else Circle.UPPER
    return _single_circle(spec, base, tag)


def _single_circle(spec, base, tag):
    N, n, phi0 = spec.N_total, spec.n_codes, spec.phi0
    grid = GridSpec(N, base)
    meta = {"m": N // n, "r": N % n} if n < N else {"m": 1, "r": 0}
    if n >= N:
        blocks = _singletons(grid, tag.value)
        book = Codebook(grid.longitudes(), [tag] * N)
        meta["truncated_codebook"] = n > N
        return DistortionReport(0.0, blocks, spec, book, meta)
    layout = build_layout(N, n)
    blocks = layout_blocks(grid, layout, phi0, tag.value)
    book = Codebook(layout_midpoints(grid, layout), [tag] * n)
    error = one_circle_error(N, n, phi0)
    meta["divisible"] = N % n == 0
    return DistortionReport(error, blocks, spec, book, meta)


def quantize_two_circles(M, n, phi0, base=0.0):
    """Optimal antipodally symmetric quantizer for two parallels at ``+-phi0``.

    Each circle carries ``M`` points; the southern points are the antipodes
    of the northern ones (longitude shifted by pi).  ``n = 2k`` codes are
    split ``k`` per circle, and no block mixes the two circles.  For ``k | M``
    the error is ``(k / M) S(M / k, phi0)``; otherwise the one-circle mixed
    layout is applied per circle and ``metadata["extended"]`` is set.

    ``error`` charges every point to a code on its own circle.  For odd
    ``k`` the southern codes sit between the northern ones in longitude, and
    at low latitude some points are nearer a code on the other circle;
    ``metadata["nearest_code_error"]`` gives the distortion of the same
    codebook under unrestricted nearest-code assignment, and
    ``metadata["cross_circle_reassignment"]`` flags when it is smaller.
    """
    M, n = _check_counts(M, n)
    if n % 2:
        raise ValueError(f"two-circle model needs an even number of codes, got {n}")
    phi0 = check_latitude(phi0)
    if phi0 == 0.0:
        raise ValueError("two-circle model needs 0 < phi0 < pi/2")
    spec = ModelSpec(ModelKind.TWO_SMALL_CIRCLES, 2 * M, n, phi0)
    k = n // 2
    upper = GridSpec(M, base)
    lower = GridSpec(M, base + np.pi)
    meta = {"per_circle_points": M, "per_circle_codes": k}
    if k >= M:
        blocks = _singletons(upper, Circle.UPPER.value) + _singletons(lower, Circle.LOWER.value)
        book = Codebook(
            np.concatenate([upper.longitudes(), lower.longitudes()]),
            [Circle.UPPER] * M + [Circle.LOWER] * M,
        )
        meta.update(extended=False, truncated_codebook=k > M,
                    nearest_code_error=0.0, cross_circle_reassignment=False)
        return DistortionReport(0.0, blocks, spec, book, meta)
    layout = build_layout(M, k)
    blocks = (layout_blocks(upper, layout, phi0, Circle.UPPER.value)
              + layout_blocks(lower, layout, phi0, Circle.LOWER.value))
    book = Codebook(
        layout_midpoints(upper, layout) + layout_midpoints(lower, layout),
        [Circle.UPPER] * k + [Circle.LOWER] * k,
    )
    # two identical circles, normalised by 2M
    error = one_circle_error(M, k, phi0)
    nearest = _nearest_code_error(upper, phi0, book)
    meta.update(
        extended=M % k != 0, m=M // k, r=M % k,
        nearest_code_error=nearest,
        cross_circle_reassignment=nearest < error * (1.0 - 1e-12),
    )
    return DistortionReport(error, blocks, spec, book, meta)


def _nearest_code_error(upper, phi0, book):
    """Distortion of ``book`` when every point may use any code.

    By the antipodal symmetry the lower circle mirrors the upper one, so
    only upper points are evaluated.  Distances use the half-chord form.
    """
    theta = upper.longitudes()[:, None]
    lat = np.array([phi0 if c is Circle.UPPER else -phi0 for c in book.circles])[None, :]
    lon = np.array(book.longitudes)[None, :]
    hav = (np.sin(0.5 * (phi0 - lat)) ** 2
           + np.cos(phi0) * np.cos(lat) * np.sin(0.5 * (theta - lon)) ** 2)
    d = 2.0 * np.arcsin(np.sqrt(np.clip(hav, 0.0, 1.0)))
    return float(np.mean(d.min(axis=1) ** 2))


def asymptotic_one_circle(n, phi0):
    """Leading-order error ``cos(phi0)**2 pi**2 / (3 n**2)`` on one parallel."""
    phi0 = check_latitude(phi0)
    return np.cos(phi0) ** 2 * np.pi ** 2 / (3.0 * n * n)


def asymptotic_two_circles(n, M, phi0):
    """``cos(phi0)**2 (4 pi**2 / (3 n**2) - pi**2 / (3 M**2))``."""
    if n % 2:
        raise ValueError(f"two-circle model needs an even number of codes, got {n}")
    if M < 1:
        raise ValueError("M must be positive")
    phi0 = check_latitude(phi0)
    return np.cos(phi0) ** 2 * (4.0 * np.pi ** 2 / (3.0 * n * n) - np.pi ** 2 / (3.0 * M * M))


def cross_circle_gap(phi0, dtheta):
    """Opposite-circle minus same-circle distance at longitude offset ``dtheta``.

    For a point at ``(phi0, t + dtheta)`` this is
    ``d((phi0, t+dtheta), (-phi0, t)) - d((phi0, t+dtheta), (phi0, t))``.
    Both distances use the half-chord form, which avoids the cancellation of
    arccos near +-1.
    """
    phi0 = float(phi0)
    if not 0.0 < phi0 < HALF_PI:
        raise ValueError(f"need 0 < phi0 < pi/2, got {phi0!r}")
    half = 0.5 * np.asarray(dtheta, dtype=float)
    sp, cp = np.sin(phi0), np.cos(phi0)
    sh = np.abs(np.sin(half))
    ch = np.abs(np.cos(half))
    same = 2.0 * np.arctan2(cp * sh, np.sqrt(ch * ch + sp * sp * sh * sh))
    cross = 2.0 * np.arctan2(np.sqrt(sp * sp + cp * cp * sh * sh), cp * ch)
    out = cross - same
    return out if out.ndim else float(out)


def latitude_table(N, n, phis):
    """Rows comparing exact and leading-order errors across latitudes.

    Each row holds ``phi0``, ``cos2phi0``, ``V_exact``, ``V_asymptotic`` and
    the percentage reductions relative to the equator, both for the
    leading-order column (``100 (1 - cos^2 phi0)``) and for the exact one.
    """
    base = one_circle_error(N, n, 0.0)
    rows = []
    for phi0 in phis:
        exact = one_circle_error(N, n, phi0)
        c2 = float(np.cos(phi0) ** 2)
        rows.append({
            "phi0": float(phi0),
            "cos2phi0": c2,
            "V_exact": float(exact),
            "V_asymptotic": float(asymptotic_one_circle(n, phi0)),
            "reduction_pct": 100.0 * (1.0 - c2),
            "reduction_exact_pct": 100.0 * (1.0 - exact / base) if base > 0 else 0.0,
        })
    return rows


def codebook_error(longitudes, phi0, codebook_longitudes):
    """Mean-square error of points on one parallel under nearest-code assignment."""
    kernel = LatitudeKernel(phi0)
    x = np.asarray(longitudes, dtype=float)
    q = np.asarray(codebook_longitudes, dtype=float)
    d2 = kernel.sigma2(x[:, None] - q[None, :])
    return float(d2.min(axis=1).mean())
