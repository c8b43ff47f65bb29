"""Discrete-event simulation of the construction behavior pipeline.

Each component runs grasp -> add_buoyancy -> transport -> place -> return;
the simulator charges battery energy, SCUBA tank pressure, and wall-clock
time to every behavior.  Unlike the transport-only allocation objective,
the mission log includes the stationary behaviors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .allocation import Allocation, MissionProfile
from .energy import EnergyModel, SECONDS_PER_HOUR, _check_level, eval_power
from .errors import DomainError
from .mission import BLOCK, ComponentSpec

BEHAVIOR_KINDS = ("grasp", "add_buoyancy", "transport", "place", "return_leg")
EXHAUSTION_EVENT = "tank_exhausted"

# Pulsed-fill model: fixed valve-open pulses separated by settle gaps, with
# per-pulse transfer proportional to the tank-to-ambient pressure gap.
PULSE_ON_S = 0.5
PULSE_GAP_S = 0.5
PULSE_GAIN_L_PER_PSI = 1.0e-4

# Stationary behavior defaults, calibrated once against the trial
# time/power breakdown and the observed average placement cycle.
GRASP_DURATION_S = 9.0
GRASP_POWER_W = 160.0
ADD_BUOYANCY_POWER_W = 140.0
PLACE_DURATION_S = 10.0
PLACE_POWER_W = 90.0
RETURN_VELOCITY_MPS = 0.63


@dataclass(frozen=True)
class Environment:
    depth_m: float = 4.0
    water_density_kg_m3: float = 1000.0
    surface_pressure_psi: float = 14.7

    def __post_init__(self):
        if self.depth_m < 0.0:
            raise DomainError("depth must be non-negative")
        if self.water_density_kg_m3 <= 0.0:
            raise DomainError("water density must be positive")

    @property
    def ambient_pressure_psi(self) -> float:
        # 10.3 m of fresh water per atmosphere, isothermal ideal gas
        return self.surface_pressure_psi * (1.0 + self.depth_m / 10.3)


@dataclass(frozen=True)
class TankState:
    pressure_psi: float = 3000.0
    volume_l: float = 3.0
    max_pressure_psi: float = 3000.0

    def __post_init__(self):
        if not 0.0 <= self.pressure_psi <= self.max_pressure_psi:
            raise DomainError("tank pressure must lie in [0, max_pressure]")
        if self.volume_l <= 0.0:
            raise DomainError("tank volume must be positive")


@dataclass(frozen=True)
class BehaviorSpec:
    """Duration and power model for one behavior kind.

    Travel behaviors set ``velocity_mps`` (duration = distance/velocity)
    and usually draw curve power; stationary behaviors set ``duration_s``
    and a fixed power.  add_buoyancy leaves duration to the pulse model.
    """

    kind: str
    duration_s: float | None = None
    velocity_mps: float | None = None
    power_w: float | None = None
    power_from_curve: bool = False

    def __post_init__(self):
        if self.kind not in BEHAVIOR_KINDS:
            raise DomainError(f"unknown behavior kind {self.kind!r}")
        if self.duration_s is not None and self.duration_s < 0.0:
            raise DomainError("behavior duration must be non-negative")
        if self.velocity_mps is not None and self.velocity_mps <= 0.0:
            raise DomainError("behavior velocity must be positive")
        if self.power_w is not None and self.power_w < 0.0:
            raise DomainError("behavior power must be non-negative")
        if not self.power_from_curve and self.power_w is None:
            raise DomainError(f"{self.kind}: need a fixed power or curve power")


def default_behaviors() -> dict[str, BehaviorSpec]:
    return {
        "grasp": BehaviorSpec("grasp", duration_s=GRASP_DURATION_S,
                              power_w=GRASP_POWER_W),
        "add_buoyancy": BehaviorSpec("add_buoyancy", power_w=ADD_BUOYANCY_POWER_W),
        "transport": BehaviorSpec("transport", power_from_curve=True),
        "place": BehaviorSpec("place", duration_s=PLACE_DURATION_S,
                              power_w=PLACE_POWER_W),
        "return_leg": BehaviorSpec("return_leg", velocity_mps=RETURN_VELOCITY_MPS,
                                   power_from_curve=True),
    }


def air_for_buoyancy(mass_water_kg: float, b: float, env: Environment,
                     tank_volume_l: float = 3.0):
    """Ambient liters to offset fraction b of a payload, and the resulting
    pressure drop (PSI) when drawn from a tank of the given volume."""
    if mass_water_kg < 0.0:
        raise DomainError("in-water mass must be non-negative")
    _check_level(b)
    liters = b * mass_water_kg / env.water_density_kg_m3 * 1000.0
    psi_drop = liters * env.ambient_pressure_psi / tank_volume_l
    return liters, psi_drop


def usable_water_offset_kg(tank: TankState, env: Environment) -> float:
    """Water weight the remaining tank air can offset at depth (isothermal
    transfer stops when tank pressure reaches ambient)."""
    amb = env.ambient_pressure_psi
    liters = max(0.0, tank.volume_l * (tank.pressure_psi - amb) / amb)
    return liters * env.water_density_kg_m3 / 1000.0


@dataclass(frozen=True)
class PulseFillResult:
    tank: TankState
    pulses: int
    duration_s: float
    psi_used: float
    liters_delivered: float
    partial: bool


def pulse_fill(tank: TankState, target_b: float, payload: ComponentSpec,
               env: Environment) -> PulseFillResult:
    """Pulse air into the ballast chambers until the target increment is met.

    Per-pulse transfer is proportional to tank-minus-ambient pressure, so
    low tanks need more pulses for the same buoyancy change; the final
    pulse closes the valve early once the target volume is reached.  If
    the tank reaches ambient pressure first the result is flagged partial.
    """
    need_l, _ = air_for_buoyancy(payload.mass_water_kg, target_b, env, tank.volume_l)
    amb = env.ambient_pressure_psi
    pressure = tank.pressure_psi
    delivered = 0.0
    pulses = 0
    partial = False
    while delivered < need_l - 1e-12:
        drive = pressure - amb
        if drive <= 1e-9:
            partial = True
            break
        dv = PULSE_GAIN_L_PER_PSI * drive
        if dv > need_l - delivered:
            dv = need_l - delivered
        delivered += dv
        pressure -= amb * dv / tank.volume_l
        pulses += 1
    duration = pulses * (PULSE_ON_S + PULSE_GAP_S)
    return PulseFillResult(tank=replace(tank, pressure_psi=pressure),
                           pulses=pulses, duration_s=duration,
                           psi_used=tank.pressure_psi - pressure,
                           liters_delivered=delivered, partial=partial)


@dataclass(frozen=True)
class Event:
    kind: str
    start_s: float
    duration_s: float
    energy_wh: float
    air_psi: float


@dataclass
class MissionLog:
    events: list[Event]
    energy_wh: float
    duration_s: float
    air_psi: float
    recharges: int
    successes: list[bool]
    truncated: bool

    @property
    def success_rate(self) -> float:
        if not self.successes:
            return 1.0
        return sum(self.successes) / len(self.successes)


def _finalize(events, successes, truncated, battery_wh) -> MissionLog:
    energy = sum(e.energy_wh for e in events)
    duration = sum(e.duration_s for e in events)
    air = sum(e.air_psi for e in events)
    return MissionLog(events=events, energy_wh=energy, duration_s=duration,
                      air_psi=air,
                      recharges=int(math.floor(energy / battery_wh + 1e-9)),
                      successes=successes, truncated=truncated)


def simulate(profile: MissionProfile, model: EnergyModel, alloc: Allocation,
             behaviors: dict[str, BehaviorSpec] | None = None,
             env: Environment | None = None, tank: TankState | None = None,
             payloads: list[ComponentSpec] | None = None) -> MissionLog:
    """Run the behavior pipeline over every component of the mission.

    ``payloads`` aligns with components (one per loaded leg); rows default
    to all blocks.  Buoyancy targets come from the allocation: the fill
    before loaded leg i is ``alloc.delta[i]`` on top of the carried level.
    """
    behaviors = behaviors if behaviors is not None else default_behaviors()
    missing = [k for k in BEHAVIOR_KINDS if k not in behaviors]
    if missing:
        raise DomainError(f"behavior set missing kinds: {missing}")
    env = env or Environment()
    tank = tank or TankState()
    n = len(profile)
    num_components = (n + 1) // 2
    if payloads is None:
        payloads = [BLOCK] * num_components
    if len(payloads) != num_components:
        raise DomainError(f"{num_components} components need {num_components} payloads, "
                          f"got {len(payloads)}")
    if np.asarray(alloc.delta).shape != (n,):
        raise DomainError("allocation does not match the profile")

    events: list[Event] = []
    successes: list[bool] = []
    truncated = False
    t = 0.0

    def emit(kind, duration, power_w, air_psi=0.0):
        nonlocal t
        energy = power_w * duration / SECONDS_PER_HOUR
        events.append(Event(kind, t, duration, energy, air_psi))
        t += duration

    for j in range(num_components):
        li = 2 * j
        dist_loaded, _ = profile.legs[li]
        payload = payloads[j]

        spec = behaviors["grasp"]
        emit("grasp", spec.duration_s, spec.power_w)

        spec = behaviors["add_buoyancy"]
        fill = pulse_fill(tank, float(alloc.delta[li]), payload, env)
        tank = fill.tank
        emit("add_buoyancy", fill.duration_s, spec.power_w, air_psi=fill.psi_used)
        if fill.partial:
            events.append(Event(EXHAUSTION_EVENT, t, 0.0, 0.0, 0.0))
            successes.append(False)
            truncated = True
            break

        spec = behaviors["transport"]
        velocity = spec.velocity_mps or model.velocity_mps
        duration = dist_loaded / velocity
        level = float(np.clip(alloc.levels[li], 0.0, 1.0))
        power = eval_power(model.loaded, level) if spec.power_from_curve else spec.power_w
        emit("transport", duration, power)

        spec = behaviors["place"]
        emit("place", spec.duration_s, spec.power_w)
        successes.append(True)

        if li + 1 < n:
            dist_back, _ = profile.legs[li + 1]
            spec = behaviors["return_leg"]
            velocity = spec.velocity_mps or model.velocity_mps
            duration = dist_back / velocity
            level = float(np.clip(alloc.levels[li + 1], 0.0, 1.0))
            power = eval_power(model.unloaded, level) if spec.power_from_curve else spec.power_w
            emit("return_leg", duration, power)

    return _finalize(events, successes, truncated, model.battery_wh)


def behavior_breakdown(log: MissionLog) -> dict[str, tuple[float, float]]:
    """Per-behavior (time %, energy %) shares of the mission totals."""
    if not log.events:
        raise DomainError("cannot break down an empty mission log")
    if log.duration_s <= 0.0 or log.energy_wh <= 0.0:
        raise DomainError("mission log has no time or energy to apportion")
    shares: dict[str, tuple[float, float]] = {}
    for kind in sorted({e.kind for e in log.events}):
        dur = sum(e.duration_s for e in log.events if e.kind == kind)
        nrg = sum(e.energy_wh for e in log.events if e.kind == kind)
        shares[kind] = (100.0 * dur / log.duration_s, 100.0 * nrg / log.energy_wh)
    return shares


def write_events_jsonl(log: MissionLog, path) -> None:
    with open(path, "w") as fh:
        for e in log.events:
            fh.write(json.dumps({"kind": e.kind, "start_s": e.start_s,
                                 "duration_s": e.duration_s,
                                 "energy_wh": e.energy_wh,
                                 "air_psi": e.air_psi}, sort_keys=True))
            fh.write("\n")


def summary_dict(log: MissionLog) -> dict:
    return {
        "energy_wh": log.energy_wh,
        "duration_s": log.duration_s,
        "air_psi": log.air_psi,
        "recharges": log.recharges,
        "events": len(log.events),
        "manipulations": len(log.successes),
        "successes": sum(log.successes),
        "truncated": log.truncated,
    }


def render_breakdown_table(log: MissionLog) -> str:
    shares = behavior_breakdown(log)
    lines = [f"{'Behavior':<16} {'Percent time':>13} {'Percent power':>14}"]
    for kind, (tp, ep) in shares.items():
        lines.append(f"{kind:<16} {tp:>12.1f}% {ep:>13.1f}%")
    return "\n".join(lines)
