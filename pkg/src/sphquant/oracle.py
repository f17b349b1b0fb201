"""Brute-force verifiers for the closed-form quantizers.

None of these routines use the block/midpoint formulas; they search.

* :func:`dp_optimal` -- exact optimum over contiguous cyclic partitions;
* :func:`exhaustive_optimal` -- every set partition of a tiny instance;
* :func:`lloyd_iterate` -- alternating assignment/update fixed point;
* :func:`perturbation_check` -- DP on randomly jittered grids;
* :func:`composition_optimum` -- block-size multisets by enumeration.
"""

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .engine import BlockLayout, GridSpec, block_sum_small_circle
from .geometry import TWO_PI, LatitudeKernel, wrap_to_pi
from .models import Circle, Codebook

__all__ = [
    "BudgetExceeded",
    "OracleResult",
    "PerturbedGrid",
    "PerturbationReport",
    "dp_optimal",
    "exhaustive_optimal",
    "is_cyclically_contiguous",
    "lloyd_iterate",
    "lloyd_multistart",
    "perturbation_check",
    "composition_optimum",
    "EXHAUSTIVE_MAX_POINTS",
    "EXHAUSTIVE_MAX_CODES",
]

EXHAUSTIVE_MAX_POINTS = 10
EXHAUSTIVE_MAX_CODES = 4
RNG_NAME = "PCG64"

# relative slack under which two objective values count as the same optimum
_TIE_RTOL = 1e-12


class BudgetExceeded(ValueError):
    """Instance too large for exhaustive enumeration."""


@dataclass
class OracleResult:
    """Outcome of one oracle search.

    ``layout`` is a :class:`BlockLayout` for contiguous methods and a tuple of
    group labels (one per sorted point) for the exhaustive search.
    """

    error: float
    layout: object
    codebook: Codebook
    method: str
    iterations: int = 0
    metadata: dict = field(default_factory=dict)


def _prepare(points):
    theta = np.mod(np.asarray(points, dtype=float).ravel(), TWO_PI)
    if theta.size == 0:
        raise ValueError("need at least one point")
    theta.sort()
    if np.any(np.diff(theta) <= 0.0):
        raise ValueError("points must be distinct")
    return theta


def _tag(phi0):
    return Circle.EQUATOR if phi0 == 0.0 else Circle.UPPER


@lru_cache(maxsize=64)
def _segment_table(points_key, phi0):
    kernel = LatitudeKernel(phi0)
    cost, rep = kernels.segment_costs(np.array(points_key), kernel.sin_phi, kernel.cos_phi)
    cost.setflags(write=False)
    rep.setflags(write=False)
    return cost, rep


def dp_optimal(points, phi0, n):
    """Best partition of the points into ``n`` contiguous arcs.

    For every cut position a linear partition DP runs over the cyclic order;
    the segment cost is the minimum over the representative longitude of the
    summed squared distances.  The cheapest cut wins, earliest on ties.
    Cut positions are evaluated sequentially.

    Parameters
    ----------
    points : array_like
        Longitudes on the parallel at ``phi0``; sorted modulo 2*pi here.
    phi0 : float
        Latitude of the circle.
    n : int
        Number of arcs, ``1 <= n <= len(points)``.

    Returns
    -------
    OracleResult
        ``error`` is the optimal total divided by the number of points.
    """
    theta = _prepare(points)
    LatitudeKernel(phi0)
    n_pts = theta.size
    if int(n) != n or not 1 <= n <= n_pts:
        raise ValueError(f"need 1 <= n <= {n_pts} codes, got {n}")
    cost, rep = _segment_table(tuple(theta.tolist()), float(phi0))
    total, cut, sizes = kernels.cyclic_partition(cost, int(n))
    layout = BlockLayout(sizes, cut)
    reps = [float(rep[start, s]) for start, s in zip(layout.starts(), sizes)]
    book = Codebook(reps, [_tag(phi0)] * len(reps))
    return OracleResult(
        error=total / n_pts,
        layout=layout,
        codebook=book,
        method="DP",
        metadata={"points": n_pts},
    )


def is_cyclically_contiguous(labels):
    """True when every group occupies one run of the cyclic order."""
    labels = list(labels)
    n_pts = len(labels)
    for g in set(labels):
        inside = [lab == g for lab in labels]
        changes = sum(inside[i] != inside[(i + 1) % n_pts] for i in range(n_pts))
        if changes > 2:
            return False
    return True


def _set_partitions(n_pts, max_groups):
    """Restricted growth strings of length ``n_pts`` using at most ``max_groups`` labels."""
    labels = [0] * n_pts

    def rec(i, used):
        if i == n_pts:
            yield tuple(labels), used
            return
        for g in range(min(used + 1, max_groups)):
            labels[i] = g
            yield from rec(i + 1, max(used, g + 1))

    if n_pts == 0:
        return
    yield from rec(1, 1)


@lru_cache(maxsize=32)
def _subset_table(points_key, phi0):
    kernel = LatitudeKernel(phi0)
    return kernels.subset_costs(np.array(points_key), kernel.sin_phi, kernel.cos_phi)


def exhaustive_optimal(points, phi0, n):
    """Global optimum over all partitions into at most ``n`` groups.

    Groups need not be contiguous, so each group's representative is
    searched over the full circle (dense scan plus refinement).  Every
    partition within a relative ``1e-12`` of the optimum is collected and
    ``metadata["all_optima_contiguous"]`` records whether all of them are
    contiguous arcs.
    """
    theta = _prepare(points)
    LatitudeKernel(phi0)
    n_pts = theta.size
    if n_pts > EXHAUSTIVE_MAX_POINTS or n > EXHAUSTIVE_MAX_CODES:
        raise BudgetExceeded(
            f"exhaustive search limited to {EXHAUSTIVE_MAX_POINTS} points and "
            f"{EXHAUSTIVE_MAX_CODES} codes, got {n_pts} and {n}"
        )
    if int(n) != n or n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    cost, rep = _subset_table(tuple(theta.tolist()), float(phi0))

    values = []
    for labels, used in _set_partitions(n_pts, int(n)):
        masks = [0] * used
        for i, g in enumerate(labels):
            masks[g] |= 1 << i
        values.append((sum(cost[m] for m in masks), labels, masks))
    best = min(v for v, _, _ in values)
    slack = _TIE_RTOL * best + 1e-300
    optima = [(lab, masks) for v, lab, masks in values if v <= best + slack]
    labels, masks = optima[0]
    book = Codebook([float(rep[m]) for m in masks], [_tag(phi0)] * len(masks))
    return OracleResult(
        error=best / n_pts,
        layout=labels,
        codebook=book,
        method="Exhaustive",
        metadata={
            "partitions": len(values),
            "optimal_count": len(optima),
            "all_optima_contiguous": all(is_cyclically_contiguous(lab) for lab, _ in optima),
        },
    )


def _assign(kernel, x, q):
    d2 = kernel.sigma2(x[:, None] - q[None, :])
    labels = np.argmin(d2, axis=1)  # first minimum: lower index wins ties
    return labels, d2[np.arange(x.size), labels]


def _split_largest(kernel, x, q, labels):
    sizes = np.bincount(labels, minlength=q.size)
    big = int(np.argmax(sizes))
    offsets = np.sort(np.asarray(wrap_to_pi(x[labels == big] - q[big])).ravel())
    upper = offsets[offsets.size // 2:]
    return float(np.mod(q[big] + 0.5 * (upper[0] + upper[-1]), TWO_PI))


def lloyd_iterate(points, phi0, initial, max_iter=100, tol=1e-15):
    """Alternate nearest-code assignment and per-cell representative updates.

    A cell that loses all its points is reseeded at the midpoint of the upper
    half of the largest cell, which splits that cell; the number of such
    events is reported in ``metadata["empty_cell_events"]``.  A new
    representative is accepted only when it lowers its cell's cost, so the
    recorded error sequence never increases (this is checked).

    Parameters
    ----------
    initial : Codebook or array_like
        Starting longitudes, distinct modulo 2*pi.
    tol : float
        Stop once an iteration improves the error by less than this.
    """
    x = np.mod(np.asarray(points, dtype=float).ravel(), TWO_PI)
    kernel = LatitudeKernel(phi0)
    start = initial.longitudes if isinstance(initial, Codebook) else initial
    q = np.mod(np.asarray(start, dtype=float).ravel(), TWO_PI)
    if q.size < 1 or np.unique(q).size != q.size:
        raise ValueError("initial codebook needs distinct longitudes")
    if q.size > x.size:
        raise ValueError("more codes than points")

    labels, d2 = _assign(kernel, x, q)
    history = [float(d2.mean())]
    events = 0
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        new_q = q.copy()
        for c in range(q.size):
            members = x[labels == c]
            if members.size == 0:
                new_q[c] = _split_largest(kernel, x, q, labels)
                events += 1
                continue
            old = float(np.sum(kernel.sigma2(members - q[c])))
            val, arg = kernels.minimize_representative(
                members, kernel.sin_phi, kernel.cos_phi,
                float(members[0]), float(members[0]) + TWO_PI,
                kernels.CIRCLE_SAMPLES, True,
            )
            if val < old * (1.0 - 1e-13):
                new_q[c] = np.mod(arg, TWO_PI)
        q = new_q
        labels, d2 = _assign(kernel, x, q)
        err = float(d2.mean())
        if err > history[-1]:
            raise RuntimeError(f"Lloyd error increased: {history[-1]!r} -> {err!r}")
        history.append(err)
        if history[-2] - err < tol:
            break

    book = Codebook(q, [_tag(phi0)] * q.size)
    return OracleResult(
        error=history[-1],
        layout=tuple(int(v) for v in labels),
        codebook=book,
        method="Lloyd",
        iterations=iterations,
        metadata={"history": history, "empty_cell_events": events},
    )


def lloyd_multistart(points, phi0, n, restarts=50, seed=0, max_iter=200, tol=1e-15):
    """Best of ``restarts`` Lloyd runs from uniformly random codebooks."""
    if restarts < 1:
        raise ValueError("need at least one restart")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        init = np.sort(rng.uniform(0.0, TWO_PI, size=int(n)))
        res = lloyd_iterate(points, phi0, init, max_iter=max_iter, tol=tol)
        if best is None or res.error < best.error:
            best = res
    best.metadata.update(restarts=int(restarts), seed=int(seed), rng=RNG_NAME)
    return best


@dataclass(frozen=True)
class PerturbedGrid:
    """Cyclically ordered longitudes with positive gaps summing to 2*pi."""

    longitudes: tuple

    def __post_init__(self):
        lon = np.mod(np.asarray(self.longitudes, dtype=float).ravel(), TWO_PI)
        gaps = np.mod(np.diff(np.concatenate([lon, lon[:1]])), TWO_PI)
        if lon.size > 1 and (np.any(gaps <= 0.0) or not np.isclose(gaps.sum(), TWO_PI)):
            raise ValueError("perturbation broke the cyclic order")
        object.__setattr__(self, "longitudes", tuple(lon.tolist()))

    @classmethod
    def from_grid(cls, grid, offsets):
        return cls(grid.longitudes() + np.asarray(offsets, dtype=float))


@dataclass
class PerturbationReport:
    trials: int
    epsilon: float
    expected_multiset: tuple
    violations: list
    baseline_error: float
    max_abs_change: float
    empirical_constant: float
    seed: int
    rng: str = RNG_NAME

    @property
    def ok(self):
        return not self.violations


def perturbation_check(grid, n, phi0, epsilon, trials, seed):
    """Re-solve jittered grids and compare block-size multisets and errors.

    Each longitude moves by an independent uniform draw from
    ``[-epsilon, epsilon]``.  Violations are collected, never raised.
    """
    if not isinstance(grid, GridSpec):
        grid = GridSpec(grid)
    if not 0.0 <= epsilon < grid.spacing / 4:
        raise ValueError(f"epsilon must lie in [0, spacing/4), got {epsilon!r}")
    N = grid.count
    m, r = divmod(N, n)
    expected = tuple(sorted((m,) * (n - r) + (m + 1,) * r))
    base = dp_optimal(grid.longitudes(), phi0, n)
    rng = np.random.default_rng(seed)
    violations = []
    worst = 0.0
    for t in range(int(trials)):
        jitter = rng.uniform(-epsilon, epsilon, size=N)
        pg = PerturbedGrid.from_grid(grid, jitter)
        res = dp_optimal(pg.longitudes, phi0, n)
        got = res.layout.size_multiset()
        if got != expected:
            violations.append({"trial": t, "multiset": list(got)})
        worst = max(worst, abs(res.error - base.error))
    const = worst / epsilon if epsilon > 0 else 0.0
    return PerturbationReport(int(trials), float(epsilon), expected, violations,
                              base.error, worst, const, int(seed))


def composition_optimum(N, n, phi0=0.0):
    """Minimal block-size multisets among all compositions of ``N`` into ``n`` parts.

    The cost of a composition is the sum of its block totals on the uniform
    ``N``-grid.  On the equator the totals are compared in exact integer
    arithmetic (``s (s^2 - 1)``); elsewhere within a relative ``1e-12``.

    Returns
    -------
    set of tuple
        Every sorted size multiset that attains the minimum.
    """
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= n <= N, got N={N}, n={n}")
    delta = TWO_PI / N
    if phi0 == 0.0:
        block = {s: s * (s * s - 1) for s in range(1, N + 1)}
    else:
        kernel = LatitudeKernel(phi0)
        block = {s: block_sum_small_circle(s, phi0, delta, kernel) for s in range(1, N + 1)}
    results = {}
    for cuts in itertools.combinations(range(1, N), n - 1):
        bounds = (0,) + cuts + (N,)
        sizes = tuple(sorted(b - a for a, b in zip(bounds, bounds[1:])))
        if sizes not in results:
            results[sizes] = sum(block[s] for s in sizes)
    best = min(results.values())
    if phi0 == 0.0:
        return {s for s, v in results.items() if v == best}
    return {s for s, v in results.items() if v <= best * (1 + _TIE_RTOL)}

