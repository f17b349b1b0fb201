"""Geodesic distance kernels on the unit sphere.

Everything here works on scalars or numpy arrays (broadcasting). Angles are
radians throughout. Latitude is measured from the equator, longitude
counter-clockwise from a reference meridian.

The central quantity is the equal-latitude offset ``sigma(phi0, dtheta)``:
the central angle between two points on the parallel at latitude ``phi0``
whose longitudes differ by ``dtheta``.  Three evaluation routes are provided:

``sigma``
    production kernel, a half-angle/atan2 form that stays accurate both for
    tiny offsets and near the antipode;
``sigma_arccos``
    the defining arccos expression with the argument clipped to [-1, 1];
``sigma_arcsin``
    the closed form ``2 asin(cos(phi0) |sin(dtheta/2)|)``.
"""

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi
HALF_PI = 0.5 * np.pi

__all__ = [
    "SpherePoint",
    "LatitudeKernel",
    "check_latitude",
    "wrap_to_pi",
    "geodesic_distance",
    "sigma",
    "sigma_arccos",
    "sigma_arcsin",
    "sigma_bounds",
    "sigma_local",
]


def check_latitude(phi0):
    """Validate a circle latitude, returning it as a float.

    The supporting circles used by the models live in ``0 <= phi0 < pi/2``;
    southern circles are expressed through a circle tag rather than a
    negative latitude.
    """
    value = float(phi0)
    if not np.isfinite(value) or value < 0.0 or value >= HALF_PI:
        raise ValueError(f"latitude must satisfy 0 <= phi0 < pi/2, got {phi0!r}")
    return value


def wrap_to_pi(angle):
    """Reduce angles to the half-open interval (-pi, pi]."""
    a = np.asarray(angle, dtype=float)
    wrapped = np.mod(a + np.pi, TWO_PI) - np.pi
    # mod maps odd multiples of pi to -pi; the interval is closed at +pi.
    wrapped = np.where(wrapped <= -np.pi, np.pi, wrapped)
    # leave in-range values untouched so tiny offsets are not flushed to zero
    out = np.where((a > -np.pi) & (a <= np.pi), a, wrapped)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SpherePoint:
    """A point on the unit sphere in (latitude, longitude) form."""

    phi: float
    theta: float

    def __post_init__(self):
        phi = float(self.phi)
        if not -HALF_PI <= phi <= HALF_PI:
            raise ValueError(f"latitude out of range: {self.phi!r}")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "theta", float(np.mod(self.theta, TWO_PI)))

    def to_vector(self):
        cp = np.cos(self.phi)
        return np.array(
            [cp * np.cos(self.theta), cp * np.sin(self.theta), np.sin(self.phi)]
        )


def geodesic_distance(a, b):
    """Great-circle distance between two :class:`SpherePoint` objects.

    Computed as ``arccos`` of the dot product of the embedded unit vectors,
    with the dot product clipped to [-1, 1] so rounding can never produce a
    NaN.  Note that arccos is ill-conditioned at both ends of its range:
    coincident and antipodal points are only resolved to about 1.5e-8.
    """
    dot = float(np.dot(a.to_vector(), b.to_vector()))
    return float(np.arccos(min(1.0, max(-1.0, dot))))


class LatitudeKernel:
    """Distance kernel for one parallel, with sin/cos of the latitude cached.

    Parameters
    ----------
    phi0 : float
        Latitude of the circle, ``0 <= phi0 < pi/2``.
    """

    def __init__(self, phi0):
        self.phi0 = check_latitude(phi0)
        self.sin_phi = float(np.sin(self.phi0))
        self.cos_phi = float(np.cos(self.phi0))
        self.sin2 = self.sin_phi * self.sin_phi
        self.cos2 = self.cos_phi * self.cos_phi

    def __repr__(self):
        return f"LatitudeKernel(phi0={self.phi0!r})"

    def sigma(self, dtheta):
        half = 0.5 * np.asarray(dtheta, dtype=float)
        sh = np.abs(np.sin(half))
        ch = np.cos(half)
        # sqrt(1 - cos^2(phi) sin^2(h)) written without cancellation
        adj = np.sqrt(ch * ch + self.sin2 * sh * sh)
        out = 2.0 * np.arctan2(self.cos_phi * sh, adj)
        return out if out.ndim else float(out)

    def sigma2(self, dtheta):
        s = self.sigma(dtheta)
        return s * s

    def sigma_arccos(self, dtheta):
        d = np.asarray(dtheta, dtype=float)
        # sin^2 + cos^2 cos(d) == 1 - 2 cos^2 sin^2(d/2); the latter is exactly 1 at d = 0
        u = 1.0 - 2.0 * self.cos2 * np.sin(0.5 * d) ** 2
        out = np.arccos(np.clip(u, -1.0, 1.0))
        return out if out.ndim else float(out)

    def sigma_arcsin(self, dtheta):
        d = np.asarray(dtheta, dtype=float)
        arg = np.clip(self.cos_phi * np.abs(np.sin(0.5 * d)), 0.0, 1.0)
        out = 2.0 * np.arcsin(arg)
        return out if out.ndim else float(out)


def sigma(phi0, dtheta):
    """Geodesic distance between two points on the parallel at ``phi0``.

    Equivalent to ``arccos(sin^2 phi0 + cos^2 phi0 cos dtheta)``.  The
    result is even and 2*pi-periodic in ``dtheta`` and lies in
    ``[0, pi - 2 phi0]``.
    """
    return LatitudeKernel(phi0).sigma(dtheta)


def sigma_arccos(phi0, dtheta):
    """Arccos route for ``sigma``; accurate away from ``dtheta = 0``."""
    return LatitudeKernel(phi0).sigma_arccos(dtheta)


def sigma_arcsin(phi0, dtheta):
    """Half-angle route ``2 asin(cos(phi0) |sin(dtheta/2)|)``."""
    return LatitudeKernel(phi0).sigma_arcsin(dtheta)


def sigma_bounds(phi0, dtheta):
    """Two-sided bounds on ``sigma``.

    Returns
    -------
    lower, upper
        ``2 cos(phi0) |sin(dtheta/2)|`` and ``|dtheta|`` with ``dtheta``
        first reduced to (-pi, pi].
    """
    k = LatitudeKernel(phi0)
    d = np.asarray(wrap_to_pi(dtheta), dtype=float)
    lower = 2.0 * k.cos_phi * np.abs(np.sin(0.5 * d))
    upper = np.abs(d)
    if d.ndim == 0:
        return float(lower), float(upper)
    return lower, upper


def sigma_local(phi0, dtheta):
    """Leading-order approximation ``cos(phi0) |dtheta|`` (cubic remainder)."""
    d = np.abs(np.asarray(wrap_to_pi(dtheta), dtype=float))
    out = np.cos(check_latitude(phi0)) * d
    return out if out.ndim else float(out)
