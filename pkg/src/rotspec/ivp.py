"""Adaptive initial-value integration with dense output and event location.

Thin control loop around scipy's DOP853 stepper (explicit Runge-Kutta 8(5,3)
with an order-7 continuous extension).  The wrapper adds what the rest of
the package needs and scipy's one-shot driver does not expose: a hard step
budget, non-finite derivative detection with the offending ``u``, exact
node snapping in dense evaluation, and directional scalar events located on
the interpolant to machine precision.

Distinct integrations share no mutable state; results are deterministic
functions of their inputs.
"""

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.integrate import DOP853
from scipy.optimize import brentq

from .errors import (
    DomainGuardError,
    EventNotFoundError,
    NonFiniteDerivativeError,
    StepLimitExceededError,
)

# Order of the DOP853 continuous extension used for dense evaluation.
INTERPOLATION_ORDER = 7

_BRENTQ_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 1e-2
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.max_step <= 0:
            raise ValueError("tolerances and max_step must be positive")


@dataclass(frozen=True)
class OdeSystem:
    """A first-order system ``state' = rhs(u, state)`` of fixed dimension."""

    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]


@dataclass
class Trajectory:
    """Dense solution record: accepted nodes plus per-step interpolants.

    Evaluation at a stored node returns the stored state exactly; interior
    points use the continuous extension of the step that produced them.
    """

    us: np.ndarray                     # strictly increasing node locations
    states: np.ndarray                 # (len(us), dim) states at the nodes
    derivatives: np.ndarray            # (len(us), dim) rhs values at the nodes
    interpolation_order: int = INTERPOLATION_ORDER
    _segments: list = field(default_factory=list, repr=False)

    @property
    def u_start(self) -> float:
        return float(self.us[0])

    @property
    def u_end(self) -> float:
        return float(self.us[-1])

    def evaluate(self, u: float) -> np.ndarray:
        if u < self.us[0] or u > self.us[-1]:
            raise ValueError(f"u={u} outside trajectory range "
                             f"[{self.us[0]}, {self.us[-1]}]")
        idx = bisect.bisect_left(self.us, u)
        if idx < len(self.us) and self.us[idx] == u:
            return self.states[idx].copy()
        return np.asarray(self._segments[idx - 1](u), dtype=float)

    def sample(self, us: Sequence[float]) -> np.ndarray:
        """Evaluate at many points; returns an array of shape (len(us), dim)."""
        return np.array([self.evaluate(u) for u in us])

    def __call__(self, u: float) -> np.ndarray:
        return self.evaluate(u)


def _checked_rhs(system: OdeSystem):
    dim = system.dimension

    def fun(u, y):
        out = np.asarray(system.rhs(u, y), dtype=float)
        if out.shape != (dim,):
            raise ValueError(f"rhs returned shape {out.shape}, expected ({dim},)")
        if not np.all(np.isfinite(out)):
            raise NonFiniteDerivativeError(float(u))
        return out

    return fun


def _make_solver(system, u0, state0, u1, config):
    state0 = np.asarray(state0, dtype=float)
    if state0.shape != (system.dimension,):
        raise ValueError(f"state0 has shape {state0.shape}, "
                         f"expected ({system.dimension},)")
    if not np.all(np.isfinite(state0)):
        raise ValueError("state0 must be finite")
    if not u1 > u0:
        raise ValueError(f"u1 must exceed u0, got u0={u0}, u1={u1}")
    try:
        return DOP853(_checked_rhs(system), u0, state0, t_bound=u1,
                      rtol=config.rel_tol, atol=config.abs_tol,
                      max_step=config.max_step)
    except DomainGuardError as exc:
        raise DomainGuardError(f"at u={u0}: {exc}") from exc


def _step(solver, n_steps, config):
    """Advance one accepted step, mapping scipy failures to package errors."""
    if n_steps >= config.max_steps:
        raise StepLimitExceededError(
            f"exceeded max_steps={config.max_steps} at u={solver.t}")
    u_prev = solver.t
    try:
        msg = solver.step()
    except DomainGuardError as exc:
        raise DomainGuardError(f"at u>{u_prev}: {exc}") from exc
    if solver.status == "failed":
        raise StepLimitExceededError(
            f"step size underflow at u={solver.t}: {msg}")


def integrate(system: OdeSystem, u0: float, state0, u1: float,
              config: IntegratorConfig = IntegratorConfig(),
              dense: bool = True) -> Trajectory:
    """Integrate ``system`` over [u0, u1] and return the dense trajectory.

    ``dense=False`` skips interpolant storage (endpoint-only use); the
    returned trajectory then supports node access but not evaluation
    between nodes.
    """
    solver = _make_solver(system, u0, state0, u1, config)
    us = [u0]
    states = [solver.y.copy()]
    derivs = [solver.f.copy()]
    segments = []
    n_steps = 0
    while solver.status == "running":
        _step(solver, n_steps, config)
        n_steps += 1
        if dense:
            segments.append(solver.dense_output())
        us.append(solver.t)
        states.append(solver.y.copy())
        derivs.append(solver.f.copy())
    return Trajectory(us=np.array(us), states=np.array(states),
                      derivatives=np.array(derivs), _segments=segments)


def integrate_until(system: OdeSystem, u0: float, state0,
                    event: Callable[[np.ndarray], float],
                    direction: Literal["rising", "falling", "any"],
                    u_max: float,
                    config: IntegratorConfig = IntegratorConfig(),
                    ) -> tuple[float, np.ndarray, Trajectory]:
    """Integrate until the scalar ``event(state)`` first crosses zero.

    The crossing is detected on step endpoints (transversal events) in the
    requested direction and then located on the step interpolant with a
    bracketing root find, leaving ``|event|`` at rounding level.  Returns
    the event location, the interpolated state there, and the trajectory
    truncated at the event.
    """
    if direction not in ("rising", "falling", "any"):
        raise ValueError(f"unknown direction {direction!r}")
    solver = _make_solver(system, u0, state0, u_max, config)
    e_prev = float(event(solver.y))
    if e_prev == 0.0:
        raise ValueError("event function must be nonzero at the initial state")

    us = [u0]
    states = [solver.y.copy()]
    derivs = [solver.f.copy()]
    segments = []
    n_steps = 0
    while solver.status == "running":
        u_prev = solver.t
        _step(solver, n_steps, config)
        n_steps += 1
        seg = solver.dense_output()
        e_new = float(event(solver.y))
        fired = (
            (direction in ("rising", "any") and e_prev < 0.0 <= e_new)
            or (direction in ("falling", "any") and e_prev > 0.0 >= e_new)
        )
        if fired:
            def on_interpolant(u):
                return float(event(np.asarray(seg(u))))

            if e_new == 0.0:
                u_event = solver.t
            else:
                u_event = brentq(on_interpolant, u_prev, solver.t,
                                 xtol=1e-14, rtol=_BRENTQ_RTOL)
            # land on the post-crossing side, so restarting from the event
            # state with the same event cannot refire immediately
            rising_crossing = e_prev < 0.0
            for _ in range(100):
                val = on_interpolant(u_event)
                if (val >= 0.0) if rising_crossing else (val <= 0.0):
                    break
                if u_event >= solver.t:
                    break
                u_event = math.nextafter(u_event, solver.t)
            state_event = np.asarray(seg(u_event), dtype=float)
            segments.append(seg)
            us.append(u_event)
            states.append(state_event)
            derivs.append(_checked_rhs(system)(u_event, state_event))
            traj = Trajectory(us=np.array(us), states=np.array(states),
                              derivatives=np.array(derivs), _segments=segments)
            return u_event, state_event, traj
        segments.append(seg)
        us.append(solver.t)
        states.append(solver.y.copy())
        derivs.append(solver.f.copy())
        e_prev = e_new
    raise EventNotFoundError(
        f"event did not fire in ({u0}, {u_max}] (direction={direction})")
