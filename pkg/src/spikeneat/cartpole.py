"""Cart-pole plant: a pole hinged to a cart pushed along a frictionless track.

Dynamics follow the classic pole-balancing formulation: the pole angular
acceleration is

    theta_dd = (g sin(theta) + cos(theta) (-F - m_p l theta_d^2 sin(theta)) / M)
               / (l (4/3 - m_p cos^2(theta) / M))

with M = m_c + m_p, and the cart acceleration is

    x_dd = (F + m_p l (theta_d^2 sin(theta) - theta_dd cos(theta))) / M.

Integration is semi-explicit Euler: positions advance with the current
velocities, then velocities advance with the accelerations.  An episode
fails when |x| or |theta| leaves the track/angle limits.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class CartPoleParams:
    """Plant constants; all must be positive.

    Attributes:
        gravity: Gravitational acceleration (m/s^2).
        cart_mass: Cart mass (kg).
        pole_mass: Pole mass (kg).
        half_length: Half the pole length (m); the hinge-to-centroid distance.
        tau: Integration step (s).
        x_limit: Track half-width; |x| beyond it is a failure (m).
        theta_limit: Failure angle (rad).
    """

    gravity: float = 9.8
    cart_mass: float = 1.0
    pole_mass: float = 0.1
    half_length: float = 0.5
    tau: float = 0.02
    x_limit: float = 2.4
    theta_limit: float = 12.0 * math.pi / 180.0

    def __post_init__(self) -> None:
        for name in ("gravity", "cart_mass", "pole_mass", "half_length", "tau", "x_limit", "theta_limit"):
            value = getattr(self, name)
            if not (value > 0.0):
                raise ValueError(f"{name} must be positive, got {value}")


@dataclass
class CartPoleState:
    """Plant state.

    Attributes:
        x: Cart position (m).
        x_dot: Cart velocity (m/s).
        theta: Pole angle from vertical (rad).
        theta_dot: Pole angular velocity (rad/s).
        t: Steps taken so far.
    """

    x: float = 0.0
    x_dot: float = 0.0
    theta: float = 0.0
    theta_dot: float = 0.0
    t: int = 0


def accelerations(
    state: CartPoleState, force: float, params: CartPoleParams
) -> tuple[float, float]:
    """Returns (theta_dd, x_dd) for the given state and applied force."""
    p = params
    total_mass = p.cart_mass + p.pole_mass
    sin_t = math.sin(state.theta)
    cos_t = math.cos(state.theta)
    pole_moment = p.pole_mass * p.half_length
    theta_dd = (
        p.gravity * sin_t
        + cos_t * ((-force - pole_moment * state.theta_dot * state.theta_dot * sin_t) / total_mass)
    ) / (p.half_length * (4.0 / 3.0 - p.pole_mass * cos_t * cos_t / total_mass))
    x_dd = (
        force + pole_moment * (state.theta_dot * state.theta_dot * sin_t - theta_dd * cos_t)
    ) / total_mass
    return theta_dd, x_dd


def step(state: CartPoleState, force: float, params: CartPoleParams) -> CartPoleState:
    """Advances the plant one tau with constant applied force.

    Semi-explicit Euler: x and theta move with the pre-step velocities,
    then the velocities move with the accelerations evaluated at the
    pre-step state.

    Raises:
        ValueError: If ``force`` is not finite.
    """
    if not math.isfinite(force):
        raise ValueError(f"force must be finite, got {force}")
    theta_dd, x_dd = accelerations(state, force, params)
    tau = params.tau
    return CartPoleState(
        x=state.x + tau * state.x_dot,
        x_dot=state.x_dot + tau * x_dd,
        theta=state.theta + tau * state.theta_dot,
        theta_dot=state.theta_dot + tau * theta_dd,
        t=state.t + 1,
    )


def failed(state: CartPoleState, params: CartPoleParams) -> bool:
    """True when the cart or pole has left the allowed region."""
    return abs(state.x) > params.x_limit or abs(state.theta) > params.theta_limit


def observe(
    state: CartPoleState,
    markovian: bool,
    params: CartPoleParams,
    x_dot_range: float = 2.0,
    theta_dot_range: float = 2.0,
) -> list[float]:
    """Maps the state to controller inputs in [0, 1].

    Positions normalize against the failure limits; velocities against
    the given ranges, clipped.  The Markovian observation is
    [x, x_dot, theta, theta_dot]; the non-Markovian one is [x, theta].

    Args:
        state: Plant state.
        markovian: Whether velocities are included.
        params: Plant constants (for the normalization limits).
        x_dot_range: Cart velocities in [-range, range] map onto [0, 1].
        theta_dot_range: Same for the pole angular velocity.

    Returns:
        The normalized observation vector.
    """
    x_n = _unit(state.x, params.x_limit)
    theta_n = _unit(state.theta, params.theta_limit)
    if not markovian:
        return [x_n, theta_n]
    return [
        x_n,
        _unit(state.x_dot, x_dot_range),
        theta_n,
        _unit(state.theta_dot, theta_dot_range),
    ]


def _unit(value: float, half_range: float) -> float:
    """Affine map of [-half_range, half_range] onto [0, 1], clipped."""
    scaled = 0.5 + 0.5 * value / half_range
    if scaled < 0.0:
        return 0.0
    if scaled > 1.0:
        return 1.0
    return scaled


def write_trajectory_csv(rows: list[tuple], path: str) -> None:
    """Writes per-step trajectory records.

    Each row is (step, x, x_dot, theta, theta_dot, force).
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "x", "x_dot", "theta", "theta_dot", "force"])
        for step_idx, x, x_dot, theta, theta_dot, force in rows:
            writer.writerow(
                [step_idx, repr(x), repr(x_dot), repr(theta), repr(theta_dot), repr(force)]
            )


__all__ = [
    "CartPoleParams",
    "CartPoleState",
    "accelerations",
    "step",
    "failed",
    "observe",
    "write_trajectory_csv",
]
