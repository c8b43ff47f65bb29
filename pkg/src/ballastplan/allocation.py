"""Per-trip buoyancy allocation: cumulative operators and the convex solver.

A mission is a strictly alternating sequence of loaded/unloaded legs.  The
decision vector ``delta`` holds non-negative buoyancy-change magnitudes,
one per leg; the lower-triangular sign matrix applies fills (+) on odd
legs and vents (-) on even legs, so row i of ``M @ delta`` is the buoyancy
level held during leg i.  Vented air is lost, never recovered, so tank
budget accounting keeps only the fill columns.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels
from .energy import EnergyModel, transport_energy
from .errors import DomainError, SolverError

FEASIBILITY_TOL = 1e-8
AIR_TIEBREAK_WEIGHT = 1e-9  # secondary objective: prefer minimum total air
OPTIMALITY_TOL = 1e-6  # relative, watt-hours


@dataclass(frozen=True)
class MissionProfile:
    """Ordered legs of (distance_m, loaded); loaded legs are the odd ones."""

    legs: tuple[tuple[float, bool], ...]

    def __post_init__(self):
        for i, (dist, loaded) in enumerate(self.legs):
            if dist < 0.0:
                raise DomainError(f"leg {i + 1} has negative distance {dist}")
            if loaded != (i % 2 == 0):
                raise DomainError("legs must alternate loaded/unloaded starting loaded")

    @classmethod
    def from_distances(cls, distances) -> "MissionProfile":
        return cls(tuple((float(d), i % 2 == 0) for i, d in enumerate(distances)))

    def __len__(self) -> int:
        return len(self.legs)

    @property
    def distances(self) -> np.ndarray:
        return np.array([d for d, _ in self.legs], dtype=np.float64)

    @property
    def loaded_mask(self) -> np.ndarray:
        return np.array([flag for _, flag in self.legs], dtype=bool)


@dataclass(frozen=True)
class TankBudget:
    """Tank capacity in full-payload fill units (C in the allocation program)."""

    fills: float

    def __post_init__(self):
        if not self.fills > 0.0:
            raise DomainError(f"tank budget must be positive, got {self.fills}")


@dataclass
class Allocation:
    """A feasible decision vector with its induced levels and accounting."""

    delta: np.ndarray
    levels: np.ndarray
    air_used: np.ndarray  # cumulative fills through each leg
    cost_wh: float

    @property
    def total_air(self) -> float:
        return float(self.air_used[-1]) if len(self.air_used) else 0.0


@dataclass(frozen=True)
class Violation:
    constraint: str
    index: int  # 1-based leg (or fill) index
    amount: float


def build_sign_matrix(n: int) -> np.ndarray:
    """Lower-triangular cumulative operator with alternating +/-1 columns."""
    if n < 1:
        raise DomainError("need at least one leg")
    signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    m = np.tril(np.ones((n, n)))
    return m * signs[np.newaxis, :]


def build_air_matrix(n: int) -> np.ndarray:
    """Sign matrix with vent columns removed; totals air consumed per leg.

    Applies to the fill-restricted subvector (odd legs only): vented air is
    lost to the water, so only fills draw down the tank.
    """
    if n < 1:
        raise DomainError("need at least one leg")
    m = build_sign_matrix(n)
    return m[:, 0::2]


def _signed_levels(delta: np.ndarray) -> np.ndarray:
    signs = np.where(np.arange(len(delta)) % 2 == 0, 1.0, -1.0)
    return np.cumsum(signs * delta)


def _cumulative_air(delta: np.ndarray) -> np.ndarray:
    fills = np.where(np.arange(len(delta)) % 2 == 0, delta, 0.0)
    return np.cumsum(fills)


def objective(profile: MissionProfile, model: EnergyModel, delta) -> float:
    """Total transport energy (Wh) for the buoyancy schedule ``delta``."""
    delta = np.asarray(delta, dtype=np.float64)
    n = len(profile)
    if delta.shape != (n,):
        raise DomainError(f"delta has length {delta.shape}, profile has {n} legs")
    if n == 0:
        return 0.0
    levels = _signed_levels(delta)
    if levels.min() < -FEASIBILITY_TOL or levels.max() > 1.0 + FEASIBILITY_TOL:
        raise DomainError("delta drives the buoyancy level outside [0, 1]")
    levels = np.clip(levels, 0.0, 1.0)
    total = 0.0
    for (dist, loaded), level in zip(profile.legs, levels):
        total += transport_energy(model.curve_for(loaded), level, dist, model.velocity_mps)
    return total


def check_feasible(delta, profile: MissionProfile, budget: TankBudget,
                   tol: float = FEASIBILITY_TOL) -> list[Violation]:
    """All constraint violations of ``delta``; empty list when feasible."""
    delta = np.asarray(delta, dtype=np.float64)
    n = len(profile)
    if delta.shape != (n,):
        raise DomainError(f"delta has length {delta.shape}, profile has {n} legs")
    out: list[Violation] = []
    for i, d in enumerate(delta):
        if d < -tol:
            out.append(Violation("delta_min", i + 1, float(-d)))
        if d > 1.0 + tol:
            out.append(Violation("delta_max", i + 1, float(d - 1.0)))
    levels = _signed_levels(delta) if n else np.zeros(0)
    for i, lv in enumerate(levels):
        if lv < -tol:
            out.append(Violation("level_min", i + 1, float(-lv)))
        if lv > 1.0 + tol:
            out.append(Violation("level_max", i + 1, float(lv - 1.0)))
    air = _cumulative_air(delta) if n else np.zeros(0)
    for i, a in enumerate(air):
        if a > budget.fills + tol:
            out.append(Violation("air_budget", i + 1, float(a - budget.fills)))
    return out


def _objective_terms(profile: MissionProfile, model: EnergyModel):
    """Per-leg quadratic coefficients of the cost in level space (Wh)."""
    n = len(profile)
    hours = profile.distances / (model.velocity_mps * 3600.0)
    quad = np.empty(n)
    lin = np.empty(n)
    const = 0.0
    for i, (_, loaded) in enumerate(profile.legs):
        curve = model.curve_for(loaded)
        quad[i] = curve.a2 * hours[i]
        lin[i] = curve.a1 * hours[i]
        const += curve.a0 * hours[i]
    return quad, lin, const


def _air_coefficients(n: int) -> np.ndarray:
    """c with c @ levels == total fills (telescoped over the chain)."""
    c = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    if n % 2 == 0:
        c[n - 1] = 0.0
    return c


def _budget_bisect(quad, lin, c_air, capacity, impl=None):
    """Scalar dual ascent on the air-budget multiplier via bisection.

    Returns (levels, multiplier) with c_air @ levels <= capacity.  The
    chain subproblem is solved exactly at each multiplier; with strictly
    convex stage costs the air usage is continuous and monotone in the
    multiplier, so bisection converges to the constrained optimum.
    """
    u = kernels.chain_argmin(quad, lin, impl=impl)
    if float(c_air @ u) <= capacity + 1e-12:
        return u, 0.0
    mu_hi = 1.0
    for _ in range(200):
        u = kernels.chain_argmin(quad, lin + mu_hi * c_air, impl=impl)
        if float(c_air @ u) <= capacity:
            break
        mu_hi *= 4.0
    else:
        raise SolverError("air budget multiplier search diverged")
    mu_lo = 0.0
    u_feasible = u
    for _ in range(100):
        mid = 0.5 * (mu_lo + mu_hi)
        u = kernels.chain_argmin(quad, lin + mid * c_air, impl=impl)
        if float(c_air @ u) > capacity:
            mu_lo = mid
        else:
            mu_hi = mid
            u_feasible = u
    return u_feasible, mu_hi


def _allocation_from_levels(profile, model, levels) -> Allocation:
    n = len(profile)
    signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    prev = np.concatenate(([0.0], levels[:-1]))
    delta = np.clip(signs * (levels - prev), 0.0, 1.0)
    quad, lin, const = _objective_terms(profile, model)
    cost = float(quad @ (levels * levels) + lin @ levels + const)
    return Allocation(delta=delta, levels=levels.copy(),
                      air_used=_cumulative_air(delta), cost_wh=cost)


def solve(profile: MissionProfile, model: EnergyModel, budget: TankBudget,
          impl=None) -> Allocation:
    """Globally optimal buoyancy allocation for the mission.

    Solved in level space, where the transport cost is separable and the
    box/magnitude constraints become an alternating chain.  A proximal
    outer loop keeps every subproblem strictly convex (needed when a leg
    has zero distance or a flat curve); each subproblem is an exact chain
    DP wrapped in bisection on the tank-budget multiplier.  Deterministic;
    ties between equal-cost optima resolve to minimum total air.
    """
    n = len(profile)
    if n == 0:
        raise DomainError("profile must have at least one leg")
    quad, lin, const = _objective_terms(profile, model)
    c_air = _air_coefficients(n)
    lin_tb = lin + AIR_TIEBREAK_WEIGHT * c_air

    rho = 1e-12 + 1e-10 * float(quad.max())
    u_prev = np.zeros(n)
    change = np.inf
    for _ in range(200):
        u, _mu = _budget_bisect(quad + rho, lin_tb - 2.0 * rho * u_prev,
                                c_air, budget.fills, impl=impl)
        change = float(np.max(np.abs(u - u_prev)))
        u_prev = u
        if change < 1e-12:
            break
    alloc = _allocation_from_levels(profile, model, u_prev)
    if change > 1e-6:
        raise SolverError("proximal iteration did not converge", best_allocation=alloc)
    return alloc


def zero_allocation(profile: MissionProfile, model: EnergyModel) -> Allocation:
    n = len(profile)
    delta = np.zeros(n)
    return Allocation(delta=delta, levels=np.zeros(n), air_used=np.zeros(n),
                      cost_wh=objective(profile, model, delta))


def fixed_allocation(profile: MissionProfile, model: EnergyModel, b: float) -> Allocation:
    """Fill to level b before every loaded leg and vent fully after it."""
    if not 0.0 <= b <= 1.0:
        raise DomainError(f"fixed level must be in [0, 1], got {b}")
    n = len(profile)
    delta = np.full(n, b)
    levels = _signed_levels(delta)
    return Allocation(delta=delta, levels=levels, air_used=_cumulative_air(delta),
                      cost_wh=objective(profile, model, delta))


def write_allocation_csv(path, profile: MissionProfile, model: EnergyModel,
                         alloc: Allocation) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "distance_m", "loaded", "delta", "level",
                         "air_cumulative", "leg_cost_wh"])
        for i, (dist, loaded) in enumerate(profile.legs):
            leg_cost = transport_energy(model.curve_for(loaded),
                                        float(np.clip(alloc.levels[i], 0.0, 1.0)),
                                        dist, model.velocity_mps)
            writer.writerow([i + 1, repr(dist), "true" if loaded else "false",
                             repr(float(alloc.delta[i])), repr(float(alloc.levels[i])),
                             repr(float(alloc.air_used[i])), repr(leg_cost)])
