"""Pure numpy implementation of the oracle hot loops.

Mirrors ``_kernels.pyx`` one for one; :mod:`sphquant.kernels` picks the
compiled module when it is importable and falls back to this one otherwise.
Both must agree to rounding, which the test-suite checks.

Representative search (shared by every routine here): sample the objective
``f(t) = sum_j sigma(x_j - t)^2`` on a grid, keep the ``REFINE_CANDIDATES``
lowest discrete local minima, ternary-search each inside one grid step on
either side until the bracket is narrower than ``TERNARY_TOL``, and return
the best value seen.
"""

import numpy as np

TWO_PI = 2.0 * np.pi

HULL_SAMPLES = 33
CIRCLE_SAMPLES = 512
EXHAUSTIVE_SAMPLES = 4096
REFINE_CANDIDATES = 4
TERNARY_TOL = 1e-12

BACKEND = "python"


def _sigma2(d, sin2, cos_phi):
    if cos_phi == 1.0:
        w = d - TWO_PI * np.round(d / TWO_PI)
        return w * w
    half = 0.5 * d
    sh = np.abs(np.sin(half))
    ch = np.cos(half)
    s = 2.0 * np.arctan2(cos_phi * sh, np.sqrt(ch * ch + sin2 * sh * sh))
    return s * s


def _objective(x, t, sin2, cos_phi):
    # x: (G, s) point longitudes, t: (G, C) candidates -> (G, C)
    return _sigma2(x[:, None, :] - t[:, :, None], sin2, cos_phi).sum(axis=2)


def _search(x, lo, hi, samples, circular, sin2, cos_phi):
    """Vectorised representative search for G point groups of equal size.

    ``x`` has shape (G, s); ``lo`` and ``hi`` have shape (G,).  Returns
    ``(value, argmin)`` arrays of shape (G,).
    """
    g = x.shape[0]
    if circular:
        frac = np.arange(samples) / samples
    else:
        frac = np.linspace(0.0, 1.0, samples)
    width = hi - lo
    t = lo[:, None] + width[:, None] * frac[None, :]
    f = _objective(x, t, sin2, cos_phi)

    if circular:
        left = np.roll(f, 1, axis=1)
        right = np.roll(f, -1, axis=1)
    else:
        left = np.concatenate([np.full((g, 1), np.inf), f[:, :-1]], axis=1)
        right = np.concatenate([f[:, 1:], np.full((g, 1), np.inf)], axis=1)
    is_min = (f <= left) & (f <= right)
    ranked = np.where(is_min, f, np.inf)
    order = np.argsort(ranked, axis=1, kind="stable")[:, :REFINE_CANDIDATES]
    cand_ok = np.take_along_axis(ranked, order, axis=1) < np.inf
    # a flat-valued row has no strict structure but always has a local min
    cand_ok[:, 0] = True

    step = width / samples if circular else width / (samples - 1)
    centre = np.take_along_axis(t, order, axis=1)
    a = centre - step[:, None]
    b = centre + step[:, None]
    if not circular:
        a = np.maximum(a, lo[:, None])
        b = np.minimum(b, hi[:, None])

    active = (b - a) > TERNARY_TOL
    while active.any():
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        f1 = _objective(x, m1, sin2, cos_phi)
        f2 = _objective(x, m2, sin2, cos_phi)
        go_left = f1 < f2
        b = np.where(active & go_left, m2, b)
        a = np.where(active & ~go_left, m1, a)
        active = (b - a) > TERNARY_TOL
    mid = 0.5 * (a + b)
    fm = _objective(x, mid, sin2, cos_phi)
    fm = np.where(cand_ok, fm, np.inf)

    j = np.argmin(fm, axis=1)
    rows = np.arange(g)
    val = fm[rows, j]
    arg = mid[rows, j]
    # never report worse than the best grid sample
    k = np.argmin(f, axis=1)
    fk = f[rows, k]
    better = fk < val
    val = np.where(better, fk, val)
    arg = np.where(better, t[rows, k], arg)
    return val, arg


def minimize_representative(x, sin_phi, cos_phi, lo, hi, samples, circular):
    """Best representative longitude for one group of longitudes ``x``."""
    x = np.asarray(x, dtype=float)[None, :]
    val, arg = _search(
        x,
        np.array([float(lo)]),
        np.array([float(hi)]),
        int(samples),
        bool(circular),
        sin_phi * sin_phi,
        cos_phi,
    )
    return float(val[0]), float(arg[0])


def segment_costs(theta, sin_phi, cos_phi):
    """Optimal single-representative cost of every contiguous cyclic segment.

    ``theta`` must be sorted ascending in [0, 2*pi).  Returns ``cost`` and
    ``rep`` of shape (N, N + 1): entry ``[i, s]`` is the minimum over the
    representative longitude of the summed squared distance of the ``s``
    points starting at index ``i`` (cyclically), and the minimiser.
    """
    theta = np.asarray(theta, dtype=float)
    n_pts = theta.size
    sin2 = sin_phi * sin_phi
    cost = np.zeros((n_pts, n_pts + 1))
    rep = np.zeros((n_pts, n_pts + 1))
    rep[:, 1] = theta
    unwrapped = np.concatenate([theta, theta + TWO_PI])
    starts = np.arange(n_pts)
    for s in range(2, n_pts + 1):
        x = unwrapped[starts[:, None] + np.arange(s)[None, :]]
        span = x[:, -1] - x[:, 0]
        narrow = span < np.pi
        for mask, circular in ((narrow, False), (~narrow, True)):
            if not mask.any():
                continue
            xs = x[mask]
            lo = xs[:, 0]
            if circular:
                hi = lo + TWO_PI
                samples = CIRCLE_SAMPLES
            else:
                hi = xs[:, -1]
                samples = HULL_SAMPLES
            val, arg = _search(xs, lo, hi, samples, circular, sin2, cos_phi)
            cost[mask, s] = val
            rep[mask, s] = np.mod(arg, TWO_PI)
    return cost, rep


def cyclic_partition(cost, n):
    """Minimum-cost partition of a cyclic sequence into ``n`` contiguous runs.

    Tries every cut position; the first cut attaining the minimum wins.
    Returns ``(total, cut, sizes)`` where the runs start at ``cut`` and have
    the listed sizes in cyclic order.
    """
    cost = np.asarray(cost, dtype=float)
    n_pts = cost.shape[0]
    n = int(n)
    if not 1 <= n <= n_pts:
        raise ValueError(f"need 1 <= n <= {n_pts}, got {n}")
    idx = np.arange(n_pts + 1)
    i_grid = idx[:, None]
    j_grid = idx[None, :]
    length = j_grid - i_grid
    valid = (length >= 1) & (i_grid < n_pts)
    cuts = np.arange(n_pts)
    rows = (cuts[:, None, None] + np.minimum(i_grid, n_pts - 1)[None]) % n_pts
    cols = np.clip(length, 0, n_pts)[None].repeat(n_pts, axis=0)
    seg = np.where(valid[None], cost[rows, cols], np.inf)

    dp = np.full((n_pts, n_pts + 1), np.inf)
    dp[:, 0] = 0.0
    back = np.zeros((n + 1, n_pts, n_pts + 1), dtype=np.int64)
    for k in range(1, n + 1):
        total = dp[:, :, None] + seg
        arg = np.argmin(total, axis=1)
        dp = np.take_along_axis(total, arg[:, None, :], axis=1)[:, 0, :]
        back[k] = arg
    best_cut = int(np.argmin(dp[:, n_pts]))
    best = float(dp[best_cut, n_pts])

    sizes = []
    j = n_pts
    for k in range(n, 0, -1):
        i = int(back[k, best_cut, j])
        sizes.append(j - i)
        j = i
    sizes.reverse()
    return best, best_cut, sizes


def subset_costs(theta, sin_phi, cos_phi, samples=EXHAUSTIVE_SAMPLES):
    """Optimal representative cost for every non-empty subset of ``theta``.

    Subsets are indexed by bitmask; the search domain is the full circle
    because a non-contiguous group can have its optimum outside its hull.
    """
    theta = np.asarray(theta, dtype=float)
    n_pts = theta.size
    sin2 = sin_phi * sin_phi
    size = 1 << n_pts
    cost = np.zeros(size)
    rep = np.zeros(size)
    for mask in range(1, size):
        members = [b for b in range(n_pts) if mask >> b & 1]
        if len(members) == 1:
            rep[mask] = theta[members[0]]
            continue
        x = theta[members][None, :]
        lo = np.array([theta[members[0]]])
        val, arg = _search(x, lo, lo + TWO_PI, samples, True, sin2, cos_phi)
        cost[mask] = val[0]
        rep[mask] = np.mod(arg[0], TWO_PI)
    return cost, rep
