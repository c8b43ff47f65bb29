"""Construction scenarios, mission profiles, and recharge accounting."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .allocation import Allocation, MissionProfile, objective, zero_allocation
from .energy import EnergyModel
from .errors import ConfigError, DomainError

KNOWN_KINDS = ("block", "cone")

# Component masses (kg): rectangular cement block and interlocking cone insert.
BLOCK_MASS_AIR_KG = 12.9
BLOCK_MASS_WATER_KG = 9.5
CONE_MASS_AIR_KG = 3.9
CONE_MASS_WATER_KG = 3.2


@dataclass(frozen=True)
class ComponentSpec:
    kind: str
    mass_air_kg: float
    mass_water_kg: float

    def __post_init__(self):
        if self.kind not in KNOWN_KINDS:
            raise DomainError(f"unknown component kind {self.kind!r}")
        if not 0.0 < self.mass_water_kg < self.mass_air_kg:
            raise DomainError("in-water mass must be positive and below dry mass")


BLOCK = ComponentSpec("block", BLOCK_MASS_AIR_KG, BLOCK_MASS_WATER_KG)
CONE = ComponentSpec("cone", CONE_MASS_AIR_KG, CONE_MASS_WATER_KG)


def component_for(kind: str) -> ComponentSpec:
    if kind == "block":
        return BLOCK
    if kind == "cone":
        return CONE
    raise DomainError(f"unknown component kind {kind!r}")


@dataclass(frozen=True)
class StructureSpec:
    """Components in build order with planar placement positions (m).

    Consecutive same-kind components form one layer; maximal runs
    alternate kinds by construction.
    """

    components: tuple[tuple[str, tuple[float, float]], ...]

    def __post_init__(self):
        for kind, _ in self.components:
            if kind not in KNOWN_KINDS:
                raise DomainError(f"unknown component kind {kind!r}")


@dataclass(frozen=True)
class RowScenario:
    """Base row of a wall built from a single pallet near one end."""

    num_blocks: int
    pitch_m: float = 0.4
    offset_m: float = 1.0

    def __post_init__(self):
        if self.num_blocks < 1:
            raise DomainError("row needs at least one block")
        if self.pitch_m <= 0.0:
            raise DomainError("pitch must be positive")
        if self.offset_m < 0.0:
            raise DomainError("pallet offset must be non-negative")


def row_to_profile(scenario: RowScenario) -> MissionProfile:
    """Out-and-back legs for slot k at pallet_offset + (k-1)*pitch."""
    distances = []
    for k in range(scenario.num_blocks):
        d = scenario.offset_m + k * scenario.pitch_m
        distances.append(d)
        distances.append(d)
    return MissionProfile.from_distances(distances)


def _euclid(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def structure_to_profile(spec: StructureSpec, pickup_positions: dict,
                         start=None) -> MissionProfile:
    """Alternating pickup->place and place->next-pickup legs in build order.

    The vehicle is assumed to begin at the first pickup; any approach from
    ``start`` happens before the modelled mission.  After the final
    placement it returns to the pickup of the last component's kind.
    """
    del start  # approach travel is outside the two-resource model
    distances = []
    comps = spec.components
    for i, (kind, place) in enumerate(comps):
        if kind not in pickup_positions:
            raise ConfigError(f"no pickup position configured for kind {kind!r}")
        pickup = pickup_positions[kind]
        next_kind = comps[i + 1][0] if i + 1 < len(comps) else kind
        if next_kind not in pickup_positions:
            raise ConfigError(f"no pickup position configured for kind {next_kind!r}")
        distances.append(_euclid(pickup, place))
        distances.append(_euclid(place, pickup_positions[next_kind]))
    return MissionProfile.from_distances(distances)


def count_recharges(profile: MissionProfile, model: EnergyModel,
                    alloc: Allocation | None = None) -> int:
    """Full battery charges needed beyond the initial one (transport only)."""
    if alloc is None:
        alloc = zero_allocation(profile, model)
    cost = objective(profile, model, alloc.delta)
    # epsilon absorbs float noise right at a charge boundary
    return int(math.floor(cost / model.battery_wh + 1e-9))


def payloads_for(scenario) -> list[ComponentSpec]:
    if isinstance(scenario, RowScenario):
        return [BLOCK] * scenario.num_blocks
    return [component_for(kind) for kind, _ in scenario.components]


def scenario_to_profile(scenario, pickups: dict | None = None) -> MissionProfile:
    if isinstance(scenario, RowScenario):
        return row_to_profile(scenario)
    if pickups is None:
        raise ConfigError("structure scenarios need pickup positions")
    return structure_to_profile(scenario, pickups)


def load_scenario(path):
    """Parse a scenario JSON file.

    Returns (RowScenario, None) for ``{num_blocks, pitch_m, offset_m}``
    documents or (StructureSpec, pickups) for
    ``{components: [{kind, x, y}], pickups: {kind: [x, y]}}`` documents.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario file {path} is not valid JSON: {exc}") from exc

    try:
        if "num_blocks" in doc:
            return RowScenario(num_blocks=int(doc["num_blocks"]),
                               pitch_m=float(doc.get("pitch_m", 0.4)),
                               offset_m=float(doc.get("offset_m", 1.0))), None
        components = tuple((item["kind"], (float(item["x"]), float(item["y"])))
                           for item in doc["components"])
        pickups = {kind: (float(xy[0]), float(xy[1]))
                   for kind, xy in doc["pickups"].items()}
        return StructureSpec(components), pickups
    except (KeyError, TypeError, ValueError, DomainError) as exc:
        raise ConfigError(f"malformed scenario file {path}: {exc}") from exc
