"""Detector worldlines in Minkowski coordinates, parameterized by proper time.

Four trajectory families are supported: two inertial detectors at rest, and
three uniformly accelerated configurations (parallel, antiparallel and
perpendicular mutual acceleration).  Natural units c = hbar = 1 throughout;
acceleration and the detector gap carry inverse length units.

Both detectors share the same coordinate-time function t(tau) = sinh(a tau)/a,
so coordinate-time ordering coincides with proper-time ordering.  That fact is
relied on by the correlator quadrature.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Scenario",
    "TrajectoryParams",
    "SpacetimePoint",
    "worldline",
    "worldline_small_a",
    "SMALL_A_TAU_THRESHOLD",
]

# |a*tau| below which the truncated series branch is used; avoids
# catastrophic cancellation in (cosh(a tau) - 1)/a.
SMALL_A_TAU_THRESHOLD = 1e-4


class Scenario(enum.Enum):
    INERTIAL = "inertial"
    PARALLEL = "parallel"
    ANTIPARALLEL = "antiparallel"
    PERPENDICULAR = "perpendicular"


@dataclass(frozen=True)
class TrajectoryParams:
    """Proper acceleration a >= 0 and initial detector separation L > 0."""

    a: float
    L: float

    def __post_init__(self):
        if not (self.a >= 0.0 and math.isfinite(self.a)):
            raise ValueError(f"acceleration must be finite and >= 0, got {self.a}")
        if not (self.L > 0.0 and math.isfinite(self.L)):
            raise ValueError(f"separation must be finite and > 0, got {self.L}")


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    x: float
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ("t", "x", "y", "z"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite coordinate {name}")


def _sinh_over_a(a, tau):
    """sinh(a tau)/a, with the a->0 series branch (t coordinate)."""
    if a == 0.0 or abs(a * tau) < SMALL_A_TAU_THRESHOLD:
        return tau + a * a * tau**3 / 6.0
    return math.sinh(a * tau) / a


def _coshm1_over_a(a, tau):
    """(cosh(a tau) - 1)/a, with the a->0 series branch (spatial excursion)."""
    if a == 0.0 or abs(a * tau) < SMALL_A_TAU_THRESHOLD:
        return a * tau * tau / 2.0 + a**3 * tau**4 / 24.0
    return (math.cosh(a * tau) - 1.0) / a


def worldline(scenario, detector, params, tau):
    """Spacetime point of one detector at proper time tau.

    Parameters
    ----------
    scenario : Scenario
    detector : "A" or "B"
    params : TrajectoryParams
    tau : float
        Proper time along that detector's worldline.

    In the inertial case detector A sits at x = +L/2 and B at x = -L/2.  The
    parallel and antiparallel cases keep those offsets and add the hyperbolic
    excursion along x (B's excursion has inverted sign in the antiparallel
    case).  In the perpendicular case A accelerates along y starting from the
    origin and B along x starting from x = L.
    """
    if not math.isfinite(tau):
        raise ValueError(f"proper time must be finite, got {tau}")
    if detector not in ("A", "B"):
        raise ValueError(f"detector must be 'A' or 'B', got {detector!r}")

    a, L = params.a, params.L
    if scenario is Scenario.INERTIAL or a == 0.0:
        x0 = L / 2.0 if detector == "A" else -L / 2.0
        if scenario is Scenario.PERPENDICULAR:
            x0 = 0.0 if detector == "A" else L
        return SpacetimePoint(t=tau, x=x0)

    t = _sinh_over_a(a, tau)
    q = _coshm1_over_a(a, tau)
    if scenario is Scenario.PARALLEL:
        x0 = L / 2.0 if detector == "A" else -L / 2.0
        return SpacetimePoint(t=t, x=x0 + q)
    if scenario is Scenario.ANTIPARALLEL:
        if detector == "A":
            return SpacetimePoint(t=t, x=L / 2.0 + q)
        return SpacetimePoint(t=t, x=-L / 2.0 - q)
    if scenario is Scenario.PERPENDICULAR:
        if detector == "A":
            return SpacetimePoint(t=t, x=0.0, y=q)
        return SpacetimePoint(t=t, x=L + q)
    raise ValueError(f"unknown scenario {scenario!r}")


def worldline_small_a(scenario, detector, params, tau):
    """Series evaluation of :func:`worldline`, valid for |a tau| << 1.

    Uses the two-term truncations sinh(a tau)/a = tau + a^2 tau^3/6 and
    (cosh(a tau) - 1)/a = a tau^2/2 + a^3 tau^4/24.  Agrees with the
    hyperbolic branch to relative 1e-12 at the switch threshold.
    """
    if not math.isfinite(tau):
        raise ValueError(f"proper time must be finite, got {tau}")
    a, L = params.a, params.L
    t = tau + a * a * tau**3 / 6.0
    q = a * tau * tau / 2.0 + a**3 * tau**4 / 24.0
    if scenario is Scenario.INERTIAL:
        t, q = tau, 0.0
    if scenario is Scenario.PERPENDICULAR:
        if detector == "A":
            return SpacetimePoint(t=t, x=0.0, y=q)
        return SpacetimePoint(t=t, x=L + q)
    x0 = L / 2.0 if detector == "A" else -L / 2.0
    if scenario is Scenario.ANTIPARALLEL and detector == "B":
        return SpacetimePoint(t=t, x=x0 - q)
    if scenario is Scenario.INERTIAL:
        return SpacetimePoint(t=t, x=x0)
    return SpacetimePoint(t=t, x=x0 + q)


def separation(p, q):
    """Coordinate-time difference and squared spatial distance of two points."""
    dt = p.t - q.t
    r2 = (p.x - q.x) ** 2 + (p.y - q.y) ** 2 + (p.z - q.z) ** 2
    return dt, r2


def scenario_code(scenario):
    """Stable integer code used by the compiled quadrature kernels."""
    return {
        Scenario.INERTIAL: 0,
        Scenario.PARALLEL: 1,
        Scenario.ANTIPARALLEL: 2,
        Scenario.PERPENDICULAR: 3,
    }[scenario]
