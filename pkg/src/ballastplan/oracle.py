"""Brute-force grid oracle for verifying the allocation solver.

Enumerates every feasible buoyancy schedule whose per-leg changes lie on a
uniform grid of [0, 1].  Exponential in the number of legs, so it refuses
instances beyond 8 legs; within that limit it is an independent ground
truth for small-instance optimality checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .allocation import (FEASIBILITY_TOL, Allocation, MissionProfile,
                         TankBudget, _cumulative_air)
from .energy import EnergyModel, eval_power
from .errors import DomainError, SizeError

MAX_LEGS = 8


@dataclass(frozen=True)
class GridSpec:
    """Number of grid points per delta component (spacing 1/(resolution-1))."""

    resolution: int = 21

    def __post_init__(self):
        if self.resolution < 2:
            raise DomainError(f"grid resolution must be >= 2, got {self.resolution}")

    @property
    def spacing(self) -> float:
        return 1.0 / (self.resolution - 1)


def _cost_table(profile: MissionProfile, model: EnergyModel, res: int) -> np.ndarray:
    """cost[i, g]: Wh for leg i traversed at grid level g."""
    levels = np.linspace(0.0, 1.0, res)
    hours = profile.distances / (model.velocity_mps * 3600.0)
    cost = np.empty((len(profile), res))
    for i, (_, loaded) in enumerate(profile.legs):
        curve = model.curve_for(loaded)
        for g, level in enumerate(levels):
            cost[i, g] = eval_power(curve, float(level)) * hours[i]
    return cost


def grid_solve(profile: MissionProfile, model: EnergyModel, budget: TankBudget,
               grid: GridSpec = GridSpec(), impl=None) -> Allocation:
    """Exhaustive minimum over the delta grid; first minimiser in
    lexicographic order wins, making the result deterministic."""
    n = len(profile)
    if n == 0:
        raise DomainError("profile must have at least one leg")
    if n > MAX_LEGS:
        raise SizeError(f"grid oracle refuses {n} legs (max {MAX_LEGS}): "
                        f"cost grows as resolution**n")
    res = grid.resolution
    h = grid.spacing
    n_fills = (n + 1) // 2
    c_units = min(int(math.floor((budget.fills + FEASIBILITY_TOL) / h)),
                  n_fills * (res - 1))
    cost = _cost_table(profile, model, res)
    best, idx = kernels.grid_search(cost, c_units, impl=impl)
    signs = np.where(np.arange(n) % 2 == 0, 1, -1)
    level_idx = np.cumsum(signs * idx)
    delta = idx.astype(np.float64) * h
    return Allocation(delta=delta, levels=level_idx.astype(np.float64) * h,
                      air_used=_cumulative_air(delta), cost_wh=float(best))


def grid_suboptimality_bound(profile: MissionProfile, model: EnergyModel,
                             grid: GridSpec = GridSpec()) -> float:
    """Upper bound (Wh) on grid optimum minus true optimum.

    Rounding the true optimal level trajectory down onto the grid (fills
    and vents rounded separately, clamped at the box) keeps it feasible
    and moves level i by at most i grid steps, so the objective grows by
    at most the distance-weighted Lipschitz sum below.
    """
    hours = profile.distances / (model.velocity_mps * 3600.0)
    bound = 0.0
    for i, (_, loaded) in enumerate(profile.legs):
        curve = model.curve_for(loaded)
        lipschitz = max(abs(curve.slope(0.0)), abs(curve.slope(1.0)))
        bound += (i + 1) * lipschitz * hours[i]
    return grid.spacing * bound
