"""Izhikevich spiking neuron: membrane dynamics, reset rule, f-I curves.

The model integrates

    dv/dt = 0.04 v^2 + 5 v + 140 - u + I
    du/dt = a (b v - u)

per 1 ms tick, with a spike emitted when v reaches the threshold v_t,
after which v is reset to c and u is incremented by d.  The membrane
equation is stiff near threshold, so each tick splits the v update into
``V_SUBSTEPS`` Euler substeps while u takes a single 1 ms Euler step; the
recovery variable is slow (a << 1) and does not need the finer grid.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

# Euler substeps for the membrane equation per 1 ms tick.  16 keeps every
# spike count over a 1000 ms window within one spike of a 0.001 ms
# reference integration across the tested current range; two substeps
# lose whole spikes at high drive.
V_SUBSTEPS = 16

# Finer grid used by the reference integrator in tests (0.001 ms).
REFERENCE_SUBSTEPS = 1000


@dataclass(frozen=True)
class NeuronParams:
    """Izhikevich model parameters.

    Attributes:
        a: Recovery time scale.
        b: Sensitivity of recovery to the membrane potential.
        c: Post-spike reset value for v (mV).
        d: Post-spike increment for u.
        v_t: Spike threshold for v (mV).
    """

    a: float = 0.02
    b: float = 0.2
    c: float = -65.0
    d: float = 2.0
    v_t: float = 30.0

    def __post_init__(self) -> None:
        if not (self.a > 0.0):
            raise ValueError(f"a must be positive, got {self.a}")
        if not (self.v_t > self.c):
            raise ValueError(f"threshold v_t={self.v_t} must exceed reset c={self.c}")


# Regular-spiking parameters; the default set used by the controllers.
DEFAULT_PARAMS = NeuronParams()

# Chattering variant: shallower reset keeps the neuron near threshold so
# it emits bursts; used for f-I curve reproduction.
CHATTERING_PARAMS = NeuronParams(c=-50.0)

PRESETS = {
    "default": DEFAULT_PARAMS,
    "chattering": CHATTERING_PARAMS,
}


@dataclass
class NeuronState:
    """Instantaneous neuron state.

    Attributes:
        v: Membrane potential (mV).
        u: Recovery variable.
        fired: Whether the neuron spiked during the last tick.
        spike_count: Spikes accumulated since the counter was last cleared.
    """

    v: float
    u: float
    fired: bool = False
    spike_count: int = 0


def neuron_init(params: NeuronParams) -> NeuronState:
    """Returns the conventional rest state v = c, u = b * c."""
    return NeuronState(v=params.c, u=params.b * params.c)


def neuron_tick(
    state: NeuronState,
    params: NeuronParams,
    current: float,
    dt_ms: float = 1.0,
    substeps: int = V_SUBSTEPS,
) -> NeuronState:
    """Advances the neuron by one 1 ms tick.

    The membrane potential is integrated with ``substeps`` Euler substeps;
    if v crosses v_t during any substep it is clamped to v_t and the spike
    is latched for the rest of the tick.  u then takes one full 1 ms Euler
    step using the (possibly clamped) pre-reset v, after which the reset
    v <- c, u <- u + d is applied if the neuron fired.

    Args:
        state: State before the tick; not modified.
        params: Model parameters.
        current: Input current, held constant across the tick.
        dt_ms: Tick length; must be 1.0 (the tick is split internally).
        substeps: Euler substeps for the v update.

    Returns:
        The state after the tick, with ``spike_count`` incremented when
        the neuron fired.

    Raises:
        ValueError: If ``current`` is not finite or ``dt_ms`` is not 1.0.
    """
    if not math.isfinite(current):
        raise ValueError(f"input current must be finite, got {current}")
    if dt_ms != 1.0:
        raise ValueError(f"tick length must be 1.0 ms, got {dt_ms}")
    v, u, fired = _tick_vu(
        state.v, state.u, params.a, params.b, params.c, params.d, params.v_t, current, substeps
    )
    return NeuronState(
        v=v,
        u=u,
        fired=fired,
        spike_count=state.spike_count + (1 if fired else 0),
    )


def _tick_vu(
    v: float,
    u: float,
    a: float,
    b: float,
    c: float,
    d: float,
    v_t: float,
    current: float,
    substeps: int,
) -> tuple[float, float, bool]:
    """Scalar tick update shared by tests and mirrored by the fast kernels."""
    h = 1.0 / substeps
    fired = False
    for _ in range(substeps):
        v = v + h * (0.04 * v * v + 5.0 * v + 140.0 - u + current)
        if v >= v_t:
            v = v_t
            fired = True
            break
    u = u + a * (b * v - u)
    if fired:
        v = c
        u = u + d
    return v, u, fired


def firing_rate(
    params: NeuronParams,
    current: float,
    window_ms: int = 1000,
    substeps: int = V_SUBSTEPS,
) -> float:
    """Returns the firing rate in Hz of an isolated neuron at constant drive.

    The neuron starts from rest and is integrated for ``window_ms`` ticks.
    """
    state = neuron_init(params)
    for _ in range(window_ms):
        state = neuron_tick(state, params, current, substeps=substeps)
    return state.spike_count / window_ms * 1000.0


def fi_curve(
    params: NeuronParams,
    i_min: float = 0.0,
    i_max: float = 200.0,
    steps: int = 21,
    window_ms: int = 1000,
) -> list[tuple[float, float]]:
    """Samples the frequency-current curve of an isolated neuron.

    Args:
        params: Model parameters.
        i_min: Lowest sampled current.
        i_max: Highest sampled current; must be >= i_min.
        steps: Number of current levels, evenly spaced inclusive of both ends.
        window_ms: Window over which spikes are counted per level.

    Returns:
        A list of (current, rate_hz) pairs in ascending current order.
    """
    if steps < 2:
        raise ValueError(f"need at least 2 current levels, got {steps}")
    if i_max < i_min:
        raise ValueError(f"i_max={i_max} below i_min={i_min}")
    span = i_max - i_min
    rows = []
    for k in range(steps):
        current = i_min + span * k / (steps - 1)
        rows.append((current, firing_rate(params, current, window_ms)))
    return rows


def write_fi_csv(rows: list[tuple[float, float]], path: str) -> None:
    """Writes f-I samples as CSV with header ``I_nA,rate_hz``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["I_nA", "rate_hz"])
        for current, rate in rows:
            writer.writerow([repr(float(current)), repr(float(rate))])


def stable_rest_potential(params: NeuronParams) -> float:
    """Returns the stable zero-input equilibrium of the membrane equation.

    Solves 0.04 v^2 + 5 v + 140 - u = 0 with u = b v and picks the lower
    root, which is the attracting fixed point.  Note this generally
    differs from the conventional init value c.

    Raises:
        ValueError: If no real equilibrium exists for these parameters.
    """
    # 0.04 v^2 + (5 - b) v + 140 = 0
    p = params
    disc = (5.0 - p.b) ** 2 - 4.0 * 0.04 * 140.0
    if disc < 0.0:
        raise ValueError("no zero-input equilibrium for these parameters")
    return (-(5.0 - p.b) - math.sqrt(disc)) / (2.0 * 0.04)


__all__ = [
    "V_SUBSTEPS",
    "REFERENCE_SUBSTEPS",
    "NeuronParams",
    "NeuronState",
    "DEFAULT_PARAMS",
    "CHATTERING_PARAMS",
    "PRESETS",
    "neuron_init",
    "neuron_tick",
    "firing_rate",
    "fi_curve",
    "write_fi_csv",
    "stable_rest_potential",
]
