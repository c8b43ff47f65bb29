"""Static error-correction model: acceptance windows and Monte Carlo success.

The manipulator and the interlocking cone geometry tolerate bounded
planar positioning error at each manipulation stage.  Per-stage error is
modelled as independent zero-mean Gaussian offsets on each axis; a
manipulation succeeds when every stage lands inside its window.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError, DomainError


@dataclass(frozen=True)
class ToleranceWindow:
    """Axis-aligned, boundary-inclusive acceptance region (half-widths, m).

    ``None`` marks an axis with no modelled correction limit.
    """

    x_tol_m: float | None
    y_tol_m: float | None

    def __post_init__(self):
        for tol in (self.x_tol_m, self.y_tol_m):
            if tol is not None and tol <= 0.0:
                raise DomainError("bounded tolerances must be positive")


@dataclass(frozen=True)
class PoseError:
    dx_m: float
    dy_m: float

    def __post_init__(self):
        if not (np.isfinite(self.dx_m) and np.isfinite(self.dy_m)):
            raise DomainError("pose error must be finite")


@dataclass(frozen=True)
class StageChain:
    """Ordered (name, window) manipulation stages; success needs all stages."""

    stages: tuple[tuple[str, ToleranceWindow], ...]

    def __post_init__(self):
        if not self.stages:
            raise DomainError("a stage chain needs at least one stage")


# End-stop plates accept 6 cm along the block's short axis and cannot
# correct along its long axis; cones are caught by the plate cutout within
# 6 cm x 7 cm; the cone-in-block geometry corrects 2.5 cm x 5 cm.
BLOCK_GRASP = ToleranceWindow(x_tol_m=0.06, y_tol_m=None)
CONE_GRASP = ToleranceWindow(x_tol_m=0.06, y_tol_m=0.07)
CONE_PLACEMENT = ToleranceWindow(x_tol_m=0.025, y_tol_m=0.05)


def default_chain() -> StageChain:
    return StageChain((
        ("block_grasp", BLOCK_GRASP),
        ("cone_grasp", CONE_GRASP),
        ("cone_placement", CONE_PLACEMENT),
    ))


def single_stage(name: str) -> StageChain:
    for stage in default_chain().stages:
        if stage[0] == name:
            return StageChain((stage,))
    raise DomainError(f"unknown stage {name!r}")


def within_window(err: PoseError, window: ToleranceWindow) -> bool:
    if window.x_tol_m is not None and abs(err.dx_m) > window.x_tol_m:
        return False
    if window.y_tol_m is not None and abs(err.dy_m) > window.y_tol_m:
        return False
    return True


def _stage_rng(seed: int, stage_name: str) -> np.random.Generator:
    # Keyed by stage name so a stage draws identical errors whether it is
    # evaluated alone or inside a chain (makes subset properties exact).
    key = zlib.crc32(stage_name.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(entropy=[seed, key]))


def monte_carlo_success(chain: StageChain, sigma_m: float, trials: int,
                        seed: int = 0) -> float:
    """Fraction of trials in which every stage accepts its Gaussian error.

    Deterministic for a fixed (seed, trials); per-stage draws scale
    linearly with sigma under a shared seed, so the rate is exactly
    monotone non-increasing in sigma for that seed.
    """
    if sigma_m < 0.0:
        raise DomainError("sigma must be non-negative")
    if trials < 1:
        raise DomainError("need at least one trial")
    ok = np.ones(trials, dtype=bool)
    for name, window in chain.stages:
        rng = _stage_rng(seed, name)
        errs = rng.standard_normal((trials, 2)) * sigma_m
        if window.x_tol_m is not None:
            ok &= np.abs(errs[:, 0]) <= window.x_tol_m
        if window.y_tol_m is not None:
            ok &= np.abs(errs[:, 1]) <= window.y_tol_m
    return float(np.count_nonzero(ok)) / trials


def calibrate_sigma(chain: StageChain, target_rate: float, trials: int = 100_000,
                    seed: int = 0, tol: float = 0.005) -> float:
    """Per-axis error sigma (m) whose chain success rate hits the target.

    Bisection is valid because the shared-seed rate is monotone in sigma.
    """
    if not 0.0 < target_rate < 1.0:
        raise CalibrationError(f"target rate must lie strictly in (0, 1), "
                               f"got {target_rate}")
    lo = 0.0
    hi = 0.05
    for _ in range(40):
        if monte_carlo_success(chain, hi, trials, seed) < target_rate:
            break
        hi *= 2.0
    else:
        raise CalibrationError("target rate unreachable on the search bracket")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        rate = monte_carlo_success(chain, mid, trials, seed)
        if abs(rate - target_rate) <= tol:
            return mid
        if rate > target_rate:
            lo = mid
        else:
            hi = mid
    raise CalibrationError("bisection failed to reach the target rate; "
                           "the rate may be too discrete at this trial count")


def success_curve(chain: StageChain, sigmas, trials: int, seed: int = 0):
    """(sigma, rate) samples with a shared seed across sigma values."""
    return [(float(s), monte_carlo_success(chain, float(s), trials, seed))
            for s in sigmas]


def chain_to_json(chain: StageChain) -> str:
    doc = {"stages": [{"name": name, "x_tol_m": w.x_tol_m, "y_tol_m": w.y_tol_m}
                      for name, w in chain.stages]}
    return json.dumps(doc, sort_keys=True)


def chain_from_json(text: str) -> StageChain:
    doc = json.loads(text)
    try:
        return StageChain(tuple(
            (item["name"], ToleranceWindow(item["x_tol_m"], item["y_tol_m"]))
            for item in doc["stages"]))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed tolerance document: {exc}") from exc
