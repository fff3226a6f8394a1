"""Physical link models: fiber attenuation and satellite-to-ground downlink.

Both map a propagation distance to (transmissivity, excess noise).  The
satellite model interpolates the mean transmissivity between two anchor
distances (log-linear in T) and exposes a pluggable fading hook; the
default treats the channel as deterministic at its mean transmissivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .states import ChannelParams

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class FiberModel:
    loss_db_per_km: float = 0.16
    eps_slope_per_km: float = 5.3e-5
    eps_intercept: float = 6e-4


@dataclass(frozen=True)
class SatelliteModel:
    altitude_km: float = 500.0
    ground_height_km: float = 0.0
    r_sat_cm: float = 15.0
    r_gs_cm: float = 50.0
    # (distance km, mean transmissivity), strictly increasing in L
    anchor_points: tuple = ((500.0, 0.06), (1460.0, 0.002))
    eps_range: tuple = (0.014, 0.015)

    def __post_init__(self):
        ls = [a[0] for a in self.anchor_points]
        ts = [a[1] for a in self.anchor_points]
        if sorted(ls) != ls or len(set(ls)) != len(ls):
            raise ValueError("anchor distances must be strictly increasing")
        if any(t2 >= t1 for t1, t2 in zip(ts, ts[1:])):
            raise ValueError("anchor transmissivities must be strictly decreasing")
        if any(not 0 < t <= 1 for t in ts):
            raise ValueError("anchor transmissivities must be in (0, 1]")


@dataclass(frozen=True)
class ChannelPoint:
    distance_km: float
    params: ChannelParams


def fiber_channel(length_km, model=FiberModel()):
    """T = 10^(-loss L / 10); eps grows linearly with distance."""
    if length_km <= 0:
        raise ValueError("fiber length must be > 0")
    t = 10.0 ** (-model.loss_db_per_km * length_km / 10.0)
    eps = model.eps_slope_per_km * length_km + model.eps_intercept
    return ChannelPoint(length_km, ChannelParams(T=t, eps=eps))


def satellite_channel(length_km, model=SatelliteModel()):
    """Mean-transmissivity channel point at slant range L.

    T is interpolated log-linearly between the anchors; eps linearly
    across the model's range over the same span.  Extrapolation outside
    the anchored span is refused.
    """
    anchors = model.anchor_points
    lo, hi = anchors[0][0], anchors[-1][0]
    if not lo <= length_km <= hi:
        raise ValueError(
            f"distance {length_km} km outside anchored span [{lo}, {hi}] km")
    # find bracketing anchors
    for (l1, t1), (l2, t2) in zip(anchors, anchors[1:]):
        if length_km <= l2:
            break
    w = (length_km - l1) / (l2 - l1)
    log_t = (1 - w) * math.log10(t1) + w * math.log10(t2)
    we = (length_km - lo) / (hi - lo)
    eps = (1 - we) * model.eps_range[0] + we * model.eps_range[1]
    return ChannelPoint(length_km, ChannelParams(T=10.0 ** log_t, eps=eps))


def zenith_to_range(zenith_deg, model=SatelliteModel()):
    """Spherical-Earth slant range to a satellite at the model altitude."""
    if not 0 <= zenith_deg < 90:
        raise ValueError("zenith angle must be in [0, 90) degrees")
    re = EARTH_RADIUS_KM + model.ground_height_km
    h = model.altitude_km - model.ground_height_km
    cz = math.cos(math.radians(zenith_deg))
    return math.sqrt(re * re * cz * cz + h * h + 2 * re * h) - re * cz


class DeterministicFading:
    """Default fading hook: a point mass at the mean transmissivity."""

    def quadrature(self, channel_point):
        """Return [(ChannelParams, weight)] pairs summing to weight 1."""
        return [(channel_point.params, 1.0)]
