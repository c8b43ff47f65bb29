"""Quadratic hold-depth power curves and transport energy accounting.

Two curves describe the vehicle: ``loaded`` is the instantaneous power (W)
to hold depth while carrying a component at buoyancy level b, ``unloaded``
the same without a payload.  b is the dimensionless fraction of the
payload's in-water weight offset by ballast air: b=0 means thrusters carry
everything, b=1 means the air does.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import CalibrationError, DomainError

SECONDS_PER_HOUR = 3600.0

# Measured anchor points: holding a block with thrusters alone draws about
# 470 W; at b=0.8 the predicted transport draw is 50 W.  Hover power (59 W)
# is a calibration product of calibrate_unloaded against recharge counts.
DEFAULT_LOADED_B0_W = 470.0
DEFAULT_LOADED_B08_W = 50.0
DEFAULT_HOVER_W = 59.0
DEFAULT_VELOCITY_MPS = 0.5
DEFAULT_BATTERY_WH = 230.0


def _check_level(b: float) -> None:
    if not 0.0 <= b <= 1.0:
        raise DomainError(f"buoyancy level must be in [0, 1], got {b}")


@dataclass(frozen=True)
class PowerCurve:
    """Quadratic power curve a2*b^2 + a1*b + a0, in watts."""

    a2: float
    a1: float
    a0: float

    def __post_init__(self):
        if self.a2 < 0.0:
            raise DomainError(f"curve must be convex (a2 >= 0), got a2={self.a2}")
        if self._min_on_unit() < 0.0:
            raise DomainError("curve is negative somewhere on [0, 1]")

    def _min_on_unit(self) -> float:
        candidates = [self(0.0, _checked=False), self(1.0, _checked=False)]
        if self.a2 > 0.0:
            vertex = -self.a1 / (2.0 * self.a2)
            if 0.0 < vertex < 1.0:
                candidates.append(self(vertex, _checked=False))
        return min(candidates)

    def __call__(self, b: float, _checked: bool = True) -> float:
        if _checked:
            _check_level(b)
        return (self.a2 * b + self.a1) * b + self.a0

    def slope(self, b: float) -> float:
        return 2.0 * self.a2 * b + self.a1


def eval_power(curve: PowerCurve, b: float) -> float:
    """Instantaneous hold-depth power (W) at buoyancy level b in [0, 1]."""
    _check_level(b)
    return curve(b, _checked=False)


def transport_energy(curve: PowerCurve, b: float, distance_m: float, velocity_mps: float) -> float:
    """Energy (Wh) to traverse ``distance_m`` at constant speed holding level b."""
    if distance_m < 0.0:
        raise DomainError(f"distance must be >= 0, got {distance_m}")
    if velocity_mps <= 0.0:
        raise DomainError(f"velocity must be > 0, got {velocity_mps}")
    return eval_power(curve, b) * (distance_m / velocity_mps) / SECONDS_PER_HOUR


@dataclass(frozen=True)
class CalibrationAnchors:
    """Anchor powers the curve fit must reproduce.

    loaded_b0_w / loaded_b08_w pin the loaded curve at b=0 and b=0.8;
    hover_w pins the unloaded curve at b=0 and unloaded_b1_w at b=1
    (default 3x hover, overridable).
    """

    loaded_b0_w: float = DEFAULT_LOADED_B0_W
    loaded_b08_w: float = DEFAULT_LOADED_B08_W
    hover_w: float = DEFAULT_HOVER_W
    unloaded_b1_w: float = 3.0 * DEFAULT_HOVER_W

    def __post_init__(self):
        if self.loaded_b08_w < 0.0 or self.hover_w < 0.0:
            raise DomainError("anchor powers must be non-negative")
        if self.loaded_b0_w < self.loaded_b08_w:
            raise DomainError("loaded power at b=0 must not be below the b=0.8 anchor")
        if self.unloaded_b1_w < self.hover_w:
            raise DomainError("unloaded power at b=1 must not be below hover power")


@dataclass(frozen=True)
class EnergyModel:
    """Loaded/unloaded power curves plus vehicle velocity and battery size."""

    loaded: PowerCurve
    unloaded: PowerCurve
    velocity_mps: float = DEFAULT_VELOCITY_MPS
    battery_wh: float = DEFAULT_BATTERY_WH

    def __post_init__(self):
        if self.velocity_mps <= 0.0:
            raise DomainError("velocity must be positive")
        if self.battery_wh <= 0.0:
            raise DomainError("battery capacity must be positive")
        # Quadratics have monotone slope, so endpoint checks suffice.
        if self.loaded.slope(0.0) > 1e-9 or self.loaded.slope(1.0) > 1e-9:
            raise DomainError("loaded curve must be non-increasing on [0, 1]")
        if self.unloaded.slope(0.0) < -1e-9 or self.unloaded.slope(1.0) < -1e-9:
            raise DomainError("unloaded curve must be non-decreasing on [0, 1]")

    def curve_for(self, loaded: bool) -> PowerCurve:
        return self.loaded if loaded else self.unloaded

    def to_json(self) -> str:
        doc = {
            "loaded": [self.loaded.a2, self.loaded.a1, self.loaded.a0],
            "unloaded": [self.unloaded.a2, self.unloaded.a1, self.unloaded.a0],
            "velocity_mps": self.velocity_mps,
            "battery_wh": self.battery_wh,
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EnergyModel":
        doc = json.loads(text)
        try:
            return cls(
                loaded=PowerCurve(*(float(c) for c in doc["loaded"])),
                unloaded=PowerCurve(*(float(c) for c in doc["unloaded"])),
                velocity_mps=float(doc["velocity_mps"]),
                battery_wh=float(doc["battery_wh"]),
            )
        except KeyError as exc:
            raise DomainError(f"model document missing field {exc}") from exc


def fit_curves(anchors: CalibrationAnchors | None = None,
               velocity_mps: float = DEFAULT_VELOCITY_MPS,
               battery_wh: float = DEFAULT_BATTERY_WH) -> EnergyModel:
    """Fit both quadratics from the anchor points.

    The loaded curve passes through (0, loaded_b0) and (0.8, loaded_b08)
    with a stationary point at b=1 (thrusters nearly idle at full offset);
    the unloaded curve passes through (0, hover) and (1, unloaded_b1) with
    a stationary point at b=0 (neutral hover is the unloaded minimum).
    Both closures make the fit a uniquely determined 3x3 linear system.
    """
    a = anchors or CalibrationAnchors()

    # loaded: a0 = p0; slope zero at b=1 gives a1 = -2*a2;
    # the b=0.8 anchor then fixes a2 = (p0 - p08) / 0.96.
    la2 = (a.loaded_b0_w - a.loaded_b08_w) / 0.96
    la1 = -2.0 * la2
    la0 = a.loaded_b0_w

    # unloaded: slope zero at b=0 gives a1 = 0; the b=1 anchor fixes a2.
    ua2 = a.unloaded_b1_w - a.hover_w
    ua1 = 0.0
    ua0 = a.hover_w

    try:
        loaded = PowerCurve(la2, la1, la0)
        unloaded = PowerCurve(ua2, ua1, ua0)
        return EnergyModel(loaded, unloaded, velocity_mps, battery_wh)
    except DomainError as exc:
        raise CalibrationError(f"anchors produce an invalid curve: {exc}") from exc


def default_model() -> EnergyModel:
    return fit_curves(CalibrationAnchors())


def calibrate_unloaded(row_targets, lo_w: float = 10.0, hi_w: float = 150.0,
                       step_w: float = 1.0) -> float:
    """Recover hover power (W) from observed recharge counts.

    ``row_targets`` is a list of (row_length_blocks, recharge_count) pairs
    measured with no buoyancy assistance.  A 1-D grid search over hover
    power minimises the squared error of simulated recharge counts; the
    middle of the minimising plateau is returned.
    """
    from . import mission  # deferred: mission depends on this module's types

    targets = list(row_targets)
    if not targets:
        raise CalibrationError("at least one row target is required")
    if all(charges <= 0 for _, charges in targets):
        raise CalibrationError("need at least one target row with a positive recharge count")

    profiles = [(mission.row_to_profile(mission.RowScenario(num_blocks=int(n))), charges)
                for n, charges in targets]

    best_err = None
    plateau: list[float] = []
    p = lo_w
    while p <= hi_w + 1e-9:
        anchors = CalibrationAnchors(hover_w=p, unloaded_b1_w=3.0 * p)
        model = fit_curves(anchors)
        err = 0.0
        for profile, charges in profiles:
            simulated = mission.count_recharges(profile, model)
            err += (simulated - charges) ** 2
        if best_err is None or err < best_err - 1e-12:
            best_err = err
            plateau = [p]
        elif abs(err - best_err) <= 1e-12:
            plateau.append(p)
        p += step_w

    if len(plateau) >= (hi_w - lo_w) / step_w:  # every candidate tied: nothing to fit
        raise CalibrationError("objective is flat over the search range")
    return plateau[(len(plateau) - 1) // 2]
