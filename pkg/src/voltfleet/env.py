"""Voltage-regulation MDP around the feeder model.

Observations are the bus voltage magnitudes of the *uncontrolled* solve
at the current loading, so the agent sees the problem before acting.
Actions are normalized hub setpoints in [-1, 1]^(2H): (p, q) per hub,
scaled by the hub ratings. The step applies the action at the observed
loading, scores the controlled solve, then advances the loading and
returns the next uncontrolled observation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .fleet import AllocationResult, DegradationParams, FleetState, allocate
from .grid import Feeder, Hub, clamp_hub_setpoint, scale_loads, solve_power_flow
from .scenario import Scenario

V_LOW_PU = 0.95
V_HIGH_PU = 1.05
IN_BAND_BONUS = 10.0
VIOLATION_SCALE = 100.0

_MAX_RESAMPLES = 1000


def reward_from_voltages(
    v_pu: np.ndarray,
    v_low: float = V_LOW_PU,
    v_high: float = V_HIGH_PU,
    bonus: float = IN_BAND_BONUS,
    scale: float = VIOLATION_SCALE,
) -> float:
    """Flat bonus when every bus is in band, else the summed band distance."""
    v = np.asarray(v_pu, dtype=float)
    under = np.clip(v_low - v, 0.0, None)
    over = np.clip(v - v_high, 0.0, None)
    total = under.sum() + over.sum()
    if total == 0.0:
        return bonus
    return float(-scale * total)


def action_to_setpoints(
    action: np.ndarray, hubs: tuple[Hub, ...], active: bool = True
) -> dict[str, tuple[float, float]]:
    """Normalized action -> per-hub (P_kw, Q_kvar), zeroed when inactive."""
    out: dict[str, tuple[float, float]] = {}
    for i, hub in enumerate(hubs):
        if active:
            p = float(action[2 * i]) * hub.p_max_kw
            q = float(action[2 * i + 1]) * hub.q_max_kvar
            out[hub.bus] = clamp_hub_setpoint(hub, p, q)
        else:
            out[hub.bus] = (0.0, 0.0)
    return out


@dataclass(frozen=True)
class EnvConfig:
    feeder: Feeder
    hub_buses: tuple[str, ...]
    phase: int = 1
    mode: str = "train"  # train: random loading; eval: 24 h daily profile
    episode_len: int = 100
    lambda_range: tuple[float, float] = (0.1, 4.0)
    lambda_mode: str = "per_step"  # or per_episode
    profile: tuple[float, ...] | None = None
    v2g_window: tuple[int, int] = (6, 23)
    nonconvergence_penalty: float = -1000.0

    def __post_init__(self):
        if self.mode not in ("train", "eval"):
            raise ValueError("mode must be train or eval")
        if self.phase not in (1, 2):
            raise ValueError("phase must be 1 or 2")
        if self.mode == "eval" and (self.profile is None or len(self.profile) != 24):
            raise ValueError("eval mode needs a 24-hour profile")
        if self.lambda_mode not in ("per_step", "per_episode"):
            raise ValueError("lambda_mode must be per_step or per_episode")
        hub_map = {h.bus for h in self.feeder.hubs}
        missing = [b for b in self.hub_buses if b not in hub_map]
        if missing:
            raise ValueError(f"hub buses not on feeder: {missing}")
        if not self.hub_buses:
            raise ValueError("need at least one active hub")


def config_from_scenario(
    scenario: Scenario, mode: str = "train", phase: int | None = None
) -> EnvConfig:
    return EnvConfig(
        feeder=scenario.feeder,
        hub_buses=scenario.hub_buses,
        phase=scenario.phase if phase is None else phase,
        mode=mode,
        episode_len=scenario.episode_len,
        lambda_range=(scenario.lambda_min, scenario.lambda_max),
        lambda_mode=scenario.lambda_mode,
        profile=scenario.profile,
        v2g_window=scenario.v2g_window,
        nonconvergence_penalty=scenario.nonconvergence_penalty,
    )


@dataclass(frozen=True)
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool
    info: dict = field(default_factory=dict)


class V2GEnv:
    """Episodic environment; see module docstring for the step contract."""

    def __init__(
        self,
        config: EnvConfig,
        fleets: Mapping[str, FleetState] | None = None,
        degradation: DegradationParams | None = None,
        seed: int | None = None,
    ):
        self.config = config
        by_bus = {h.bus: h for h in config.feeder.hubs}
        self.hubs: tuple[Hub, ...] = tuple(by_bus[b] for b in config.hub_buses)
        self.fleets = dict(fleets) if fleets else {}
        if config.phase == 2:
            missing = [b for b in config.hub_buses if b not in self.fleets]
            if missing:
                raise ValueError(f"phase 2 needs a fleet per hub, missing: {missing}")
        self.degradation = degradation or DegradationParams()
        self._rng = np.random.default_rng(seed)
        # diagnostics, cumulative over the env lifetime
        self.clamp_events = 0
        self.degenerate_resets = 0
        self.nonconverged_steps = 0
        self._obs: np.ndarray | None = None
        self._done = True

    @property
    def observation_size(self) -> int:
        return len(self.config.feeder.buses)

    @property
    def action_size(self) -> int:
        return 2 * len(self.hubs)

    @property
    def current_lambda(self) -> float:
        return self._lam

    @property
    def current_hour(self) -> int:
        return self._hour

    @property
    def current_solution(self):
        """Uncontrolled solve at the loading the last observation came from."""
        return self._sol

    def _solve(self, injections=None):
        demands = scale_loads(self.config.feeder, self._lam)
        return solve_power_flow(self.config.feeder, demands, hub_injections=injections)

    def _draw_lambda(self) -> None:
        lo, hi = self.config.lambda_range
        for _ in range(_MAX_RESAMPLES):
            self._lam = float(self._rng.uniform(lo, hi))
            self._sol = self._solve()
            if self._sol.converged:
                return
            self.degenerate_resets += 1
        raise RuntimeError("could not draw a convergent loading level")

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self._t = 0
        self._done = False
        if self.config.mode == "eval":
            self._hour = 0
            self._lam = self.config.profile[0]
            self._sol = self._solve()
        else:
            self._hour = 0
            self._draw_lambda()
        self._obs = self._sol.v_pu.copy()
        return self._obs.copy()

    def _window_open(self) -> bool:
        if self.config.mode == "train":
            return True
        lo, hi = self.config.v2g_window
        return lo <= self._hour < hi

    def step(self, action) -> StepResult:
        if self._done:
            raise RuntimeError("episode finished; call reset()")
        a = np.asarray(action, dtype=float).reshape(-1)
        if a.shape != (self.action_size,):
            raise ValueError(f"action must have {self.action_size} components")
        if not np.all(np.isfinite(a)):
            raise ValueError("action components must be finite")
        n_clamped = int(np.sum((a < -1.0) | (a > 1.0)))
        self.clamp_events += n_clamped
        a = np.clip(a, -1.0, 1.0)

        active = self._window_open()
        setpoints = action_to_setpoints(a, self.hubs, active)

        delivered: dict[str, tuple[float, float]] = {}
        rho: dict[str, float] = {}
        if self.config.phase == 2:
            for bus, (p, q) in setpoints.items():
                res: AllocationResult = allocate(
                    p, q, self.fleets[bus], self._hour, dt_h=1.0, deg=self.degradation
                )
                delivered[bus] = (res.p_sup_kw, res.q_sup_kvar)
                rho[bus] = res.rho
        else:
            delivered = dict(setpoints)
            rho = {bus: 1.0 for bus in setpoints}

        sol = self._solve(injections=delivered)
        if sol.converged:
            r = reward_from_voltages(sol.v_pu)
        else:
            r = self.config.nonconvergence_penalty
            self.nonconverged_steps += 1

        under = np.clip(V_LOW_PU - sol.v_pu, 0.0, None)
        over = np.clip(sol.v_pu - V_HIGH_PU, 0.0, None)
        info = {
            "lambda": self._lam,
            "hour": self._hour,
            "converged": sol.converged,
            "violations": int(np.sum((under > 0) | (over > 0))) if sol.converged else None,
            "v_min": float(sol.v_pu.min()) if sol.converged else None,
            "v_max": float(sol.v_pu.max()) if sol.converged else None,
            "setpoints": setpoints,
            "delivered": delivered,
            "rho": rho,
            "clamped": n_clamped,
            "solution": sol,
        }

        # advance to the next decision point
        self._t += 1
        if self.config.mode == "eval":
            self._hour += 1
            if self._hour >= 24:
                self._done = True
            else:
                self._lam = self.config.profile[self._hour]
                self._sol = self._solve()
                self._obs = self._sol.v_pu.copy()
        else:
            self._hour = self._t % 24
            if self._t >= self.config.episode_len:
                self._done = True
            elif self.config.lambda_mode == "per_step":
                self._draw_lambda()
                self._obs = self._sol.v_pu.copy()
            # per_episode: loading, solution and observation stand

        return StepResult(self._obs.copy(), r, self._done, info)
