"""Network phenotypes: recurrent spiking controllers and a sigmoidal baseline.

A spiking controller advances in control steps.  Each control step spans
``rate_window`` 1 ms ticks: input values are encoded into spike trains
(or injected currents), every neuron integrates synaptic current plus a
constant background drive, and per-neuron firing rates over the window
(spike count / window) come back as the network output.  Spikes travel
with a one tick delay and all neurons update synchronously, so update
order never changes the result.  Membrane state persists across control
steps; only the window spike counters reset.

Input slots are sources without dynamics.  Under probabilistic coding an
input spikes each tick with probability equal to its value.  Under
current coding it never spikes; each synapse from it injects
weight * g_syn * value into its target every tick, the mean-field
equivalent of the probabilistic drive.

The sigmoidal baseline updates once per control step with the steepened
logistic 1 / (1 + exp(-4.9 s)); recurrent edges between computing nodes
carry the previous step's activation while edges from inputs see the
current observation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from spikeneat.neuron import (
    DEFAULT_PARAMS,
    V_SUBSTEPS,
    NeuronParams,
    _tick_vu,
    firing_rate,
)

SIGMOID_GAIN = 4.9  # steepened logistic slope for the baseline phenotype

# Guard for exp() in the logistic maps; |z| beyond this saturates anyway.
_Z_CLIP = 500.0

INPUT_CODINGS = ("probabilistic", "current")
DECODERS = ("binary", "continuous")

# Control steps used to measure a network's neutral-input operating rate.
CALIBRATION_WINDOWS = 40
CALIBRATION_SETTLE = 20


@dataclass(frozen=True)
class CodecConfig:
    """How genomes become controllers and how rates become forces.

    Attributes:
        neuron: Membrane parameters shared by every spiking neuron.
        input_coding: "probabilistic" or "current".
        rate_window: Ticks per control step.
        g_syn: Per-spike synaptic current gain.
        i_bg: Constant background current driving every neuron.
        i_clamp_lo: Lower bound on instantaneous neuron input current.
        i_clamp_hi: Upper bound on instantaneous neuron input current.
        decoder: "binary" (output neuron rate against a baseline) or
            "continuous" (logistic readout of weighted source rates).
        baseline_rate: Per-tick rate threshold for the binary decoder,
            normally the network's own neutral-input operating rate (see
            ``SpikingNetwork.operating_baseline``).
        force_mag: Force magnitude scale (N).
        substeps: Euler substeps per neuron tick.
    """

    neuron: NeuronParams = DEFAULT_PARAMS
    input_coding: str = "probabilistic"
    rate_window: int = 20
    g_syn: float = 10.0
    i_bg: float = 0.0
    i_clamp_lo: float = 0.0
    i_clamp_hi: float = 200.0
    decoder: str = "binary"
    baseline_rate: float = 0.0
    force_mag: float = 10.0
    substeps: int = V_SUBSTEPS

    def __post_init__(self) -> None:
        if self.input_coding not in INPUT_CODINGS:
            raise ValueError(f"unknown input coding {self.input_coding!r}")
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.rate_window < 1:
            raise ValueError(f"rate window must be >= 1, got {self.rate_window}")
        if not self.i_clamp_lo < self.i_clamp_hi:
            raise ValueError("current clamp bounds must satisfy lo < hi")


def encode_probabilistic(value: float, rng: np.random.Generator) -> bool:
    """Bernoulli spike with probability ``value`` for this tick.

    Raises:
        ValueError: If ``value`` is outside [0, 1].
    """
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"encoded value must lie in [0, 1], got {value}")
    return rng.random() < value


def encode_current(value: float, i_max: float = 200.0) -> float:
    """Linear map of a [0, 1] value onto an injected current [0, i_max].

    Raises:
        ValueError: If ``value`` is outside [0, 1].
    """
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"encoded value must lie in [0, 1], got {value}")
    return value * i_max


def decode_binary(rate: float, baseline: float, force_mag: float = 10.0) -> float:
    """Bang-bang force: +force_mag when rate >= baseline, else -force_mag."""
    return force_mag if rate >= baseline else -force_mag


def decode_continuous(
    rates: np.ndarray | list[float],
    weights: np.ndarray | list[float],
    sigma: float,
    force_mag: float = 10.0,
) -> float:
    """Graded force from a logistic readout of weighted rates.

    Computes F_n = 1 / (1 + exp(-sigma * sum_i w_i r_i)) and returns
    force_mag * (2 F_n - 1), a force in (-force_mag, force_mag).
    """
    s = 0.0
    for r, w in zip(rates, weights):
        s += w * r
    z = sigma * s
    if z > _Z_CLIP:
        z = _Z_CLIP
    elif z < -_Z_CLIP:
        z = -_Z_CLIP
    f_n = 1.0 / (1.0 + math.exp(-z))
    return force_mag * (2.0 * f_n - 1.0)


@lru_cache(maxsize=None)
def background_current(
    params: NeuronParams = DEFAULT_PARAMS,
    fraction: float = 0.4,
    i_probe: float = 200.0,
    window_ms: int = 1000,
) -> float:
    """Finds the drive at which an isolated neuron fires at a target rate.

    Bisects the f-I curve between 0 and ``i_probe`` for the current where
    the rate reaches ``fraction`` of the rate at ``i_probe``.  Used to
    pick the background current that parks neurons mid-range, where both
    increases and decreases of synaptic input shift the rate.
    """
    target = fraction * firing_rate(params, i_probe, window_ms)
    lo, hi = 0.0, i_probe
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if firing_rate(params, mid, window_ms) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class SpikingNetwork:
    """Recurrent Izhikevich network advanced one control step at a time.

    Slots 0..n_inputs-1 are input sources; the rest hold neurons except
    for slots flagged non-dynamic (the continuous decoder's readout slot,
    which never integrates or spikes).

    Attributes:
        trace: Raster rows (tick, slot, fired) accumulated across control
            steps when ``record_trace`` is set before stepping.
    """

    def __init__(
        self,
        n_inputs: int,
        n_slots: int,
        dynamic: list[bool],
        synapses: list[tuple[int, int, float]],
        codec: CodecConfig,
        output_slots: list[int],
        decoder_weights: list[tuple[int, float]] | None = None,
        sigma: float = 1.0,
    ) -> None:
        """Builds the network at rest.

        Args:
            n_inputs: Number of input slots (slots 0..n_inputs-1).
            n_slots: Total slot count.
            dynamic: Per-slot flag; True for slots with membrane dynamics.
                Input slots must be False.
            synapses: (source_slot, target_slot, weight) triples; targets
                must be dynamic slots.
            codec: Encoding, dynamics and decoding configuration.
            output_slots: Slots whose rates drive the binary decoder.
            decoder_weights: (source_slot, weight) pairs feeding the
                continuous readout; an empty readout sums to zero and
                always yields zero force.
            sigma: Readout steepness for the continuous decoder.
        """
        if n_inputs < 0 or n_slots < n_inputs:
            raise ValueError("slot counts out of range")
        if len(dynamic) != n_slots:
            raise ValueError("dynamic mask length must match slot count")
        if any(dynamic[:n_inputs]):
            raise ValueError("input slots cannot have dynamics")
        for src, dst, _w in synapses:
            if not (0 <= src < n_slots and 0 <= dst < n_slots):
                raise ValueError(f"synapse ({src}, {dst}) out of range")
            if not dynamic[dst]:
                raise ValueError(f"synapse target {dst} has no dynamics")
        self.n_inputs = n_inputs
        self.n_slots = n_slots
        self.codec = codec
        self.sigma = sigma
        self.output_slots = list(output_slots)
        self.decoder_weights = list(decoder_weights or [])
        self.dynamic = np.asarray(dynamic, dtype=np.bool_)
        # Synapses in CSR-by-target form; per-target order is the given
        # synapse order, fixing the float accumulation order.
        order = sorted(range(len(synapses)), key=lambda k: synapses[k][1])
        self.syn_src = np.array([synapses[k][0] for k in order], dtype=np.int64)
        self.syn_w = np.array([synapses[k][2] for k in order], dtype=np.float64)
        counts = np.zeros(n_slots, dtype=np.int64)
        for _src, dst, _w in synapses:
            counts[dst] += 1
        self.syn_ptr = np.zeros(n_slots + 1, dtype=np.int64)
        np.cumsum(counts, out=self.syn_ptr[1:])
        self.v = np.zeros(n_slots, dtype=np.float64)
        self.u = np.zeros(n_slots, dtype=np.float64)
        self.prev_fired = np.zeros(n_slots, dtype=np.bool_)
        self.spike_count = np.zeros(n_slots, dtype=np.int64)
        self.record_trace = False
        self.trace: list[tuple[int, int, int]] = []
        self._tick = 0
        self.reset()

    @property
    def n_neurons(self) -> int:
        return int(self.dynamic.sum())

    def reset(self) -> None:
        """Returns every neuron to rest and clears spike history."""
        p = self.codec.neuron
        self.v[:] = 0.0
        self.u[:] = 0.0
        self.v[self.dynamic] = p.c
        self.u[self.dynamic] = p.b * p.c
        self.prev_fired[:] = False
        self.spike_count[:] = 0
        self.trace = []
        self._tick = 0

    def step(
        self, inputs: list[float], rng: np.random.Generator | None = None
    ) -> np.ndarray:
        """Runs one control step and returns per-slot rates in [0, 1].

        Neuron rates are window spike counts divided by the window length.
        Input slots report their measured spike fraction under
        probabilistic coding and the raw input value under current coding.

        Args:
            inputs: Observation values in [0, 1], one per input slot.
            rng: Source for the probabilistic encoder draws; unused under
                current coding.

        Raises:
            ValueError: On arity mismatch or out-of-range input values.
        """
        if len(inputs) != self.n_inputs:
            raise ValueError(f"expected {self.n_inputs} inputs, got {len(inputs)}")
        for value in inputs:
            if not (math.isfinite(value) and 0.0 <= value <= 1.0):
                raise ValueError(f"input values must lie in [0, 1], got {value}")
        codec = self.codec
        p = codec.neuron
        probabilistic = codec.input_coding == "probabilistic"
        static_i = np.zeros(self.n_slots, dtype=np.float64)
        if not probabilistic:
            # Mean-field drive: every synapse from an input injects
            # weight * g_syn * value into its target each tick.
            for dst in range(self.n_slots):
                for k in range(self.syn_ptr[dst], self.syn_ptr[dst + 1]):
                    src = self.syn_src[k]
                    if src < self.n_inputs:
                        static_i[dst] += self.syn_w[k] * codec.g_syn * inputs[src]
        self.spike_count[:] = 0
        new_fired = np.zeros(self.n_slots, dtype=np.bool_)
        for tick in range(codec.rate_window):
            new_fired[:] = False
            if probabilistic:
                for i in range(self.n_inputs):
                    new_fired[i] = encode_probabilistic(inputs[i], rng)
            for j in range(self.n_slots):
                if not self.dynamic[j]:
                    continue
                current = codec.i_bg + static_i[j]
                for k in range(self.syn_ptr[j], self.syn_ptr[j + 1]):
                    if self.prev_fired[self.syn_src[k]]:
                        current += self.syn_w[k] * codec.g_syn
                if current < codec.i_clamp_lo:
                    current = codec.i_clamp_lo
                elif current > codec.i_clamp_hi:
                    current = codec.i_clamp_hi
                self.v[j], self.u[j], fired = _tick_vu(
                    self.v[j], self.u[j], p.a, p.b, p.c, p.d, p.v_t, current, codec.substeps
                )
                new_fired[j] = fired
            self.prev_fired[:] = new_fired
            self.spike_count += new_fired
            if self.record_trace:
                for j in range(self.n_slots):
                    self.trace.append((self._tick + tick, j, int(new_fired[j])))
        self._tick += codec.rate_window
        rates = self.spike_count / float(codec.rate_window)
        if not probabilistic:
            for i in range(self.n_inputs):
                rates[i] = inputs[i]
        return rates

    def control_force(self, rates: np.ndarray) -> float:
        """Decodes a rate vector into the applied force."""
        codec = self.codec
        if codec.decoder == "binary":
            return decode_binary(
                rates[self.output_slots[0]], codec.baseline_rate, codec.force_mag
            )
        sources = [rates[slot] for slot, _w in self.decoder_weights]
        weights = [w for _slot, w in self.decoder_weights]
        return decode_continuous(sources, weights, self.sigma, codec.force_mag)

    def operating_baseline(
        self,
        windows: int = CALIBRATION_WINDOWS,
        settle: int = CALIBRATION_SETTLE,
    ) -> float:
        """Measures the output rate at the neutral observation.

        Runs the network deterministically (mean-field current coding)
        with every input held at 0.5 and averages the output neuron's
        window rate after an initial transient.  The binary decoder uses
        this as its threshold, so a genome is force-neutral at the
        balanced state whatever its weights sum to.  Leaves the network
        reset.

        Args:
            windows: Control steps to simulate.
            settle: Leading control steps dropped as transient.

        Raises:
            ValueError: If ``windows`` does not exceed ``settle``.
        """
        if windows <= settle:
            raise ValueError("calibration needs more windows than settle steps")
        saved = self.codec
        self.codec = replace(saved, input_coding="current")
        out = self.output_slots[0]
        neutral = [0.5] * self.n_inputs
        try:
            self.reset()
            total = 0.0
            for window in range(windows):
                rates = self.step(neutral, None)
                if window >= settle:
                    total += rates[out]
        finally:
            self.codec = saved
            self.reset()
        return total / float(windows - settle)


class SigmoidNetwork:
    """Recurrent sigmoidal network advanced once per control step.

    Computing nodes apply the steepened logistic to their weighted input
    sum.  Edges from input slots carry the current observation; edges
    between computing nodes carry the previous step's activation.
    """

    def __init__(
        self,
        n_inputs: int,
        n_slots: int,
        dynamic: list[bool],
        synapses: list[tuple[int, int, float]],
        output_slots: list[int],
        decoder: str = "binary",
        force_mag: float = 10.0,
    ) -> None:
        if len(dynamic) != n_slots:
            raise ValueError("dynamic mask length must match slot count")
        if any(dynamic[:n_inputs]):
            raise ValueError("input slots cannot have dynamics")
        if decoder not in DECODERS:
            raise ValueError(f"unknown decoder {decoder!r}")
        for src, dst, _w in synapses:
            if not (0 <= src < n_slots and 0 <= dst < n_slots):
                raise ValueError(f"edge ({src}, {dst}) out of range")
            if not dynamic[dst]:
                raise ValueError(f"edge target {dst} is not a computing node")
        self.n_inputs = n_inputs
        self.n_slots = n_slots
        self.decoder = decoder
        self.force_mag = force_mag
        self.output_slots = list(output_slots)
        self.dynamic = np.asarray(dynamic, dtype=np.bool_)
        order = sorted(range(len(synapses)), key=lambda k: synapses[k][1])
        self.syn_src = np.array([synapses[k][0] for k in order], dtype=np.int64)
        self.syn_w = np.array([synapses[k][2] for k in order], dtype=np.float64)
        counts = np.zeros(n_slots, dtype=np.int64)
        for _src, dst, _w in synapses:
            counts[dst] += 1
        self.syn_ptr = np.zeros(n_slots + 1, dtype=np.int64)
        np.cumsum(counts, out=self.syn_ptr[1:])
        self.activation = np.zeros(n_slots, dtype=np.float64)

    def step(self, inputs: list[float], rng: np.random.Generator | None = None) -> np.ndarray:
        """Runs one synchronous activation pass; returns all activations."""
        if len(inputs) != self.n_inputs:
            raise ValueError(f"expected {self.n_inputs} inputs, got {len(inputs)}")
        prev = self.activation.copy()
        for i in range(self.n_inputs):
            self.activation[i] = inputs[i]
        for j in range(self.n_slots):
            if not self.dynamic[j]:
                continue
            s = 0.0
            for k in range(self.syn_ptr[j], self.syn_ptr[j + 1]):
                src = self.syn_src[k]
                value = self.activation[src] if src < self.n_inputs else prev[src]
                s += self.syn_w[k] * value
            z = SIGMOID_GAIN * s
            if z > _Z_CLIP:
                z = _Z_CLIP
            elif z < -_Z_CLIP:
                z = -_Z_CLIP
            self.activation[j] = 1.0 / (1.0 + math.exp(-z))
        return self.activation.copy()

    def control_force(self, activations: np.ndarray) -> float:
        """Decodes the output activation into the applied force."""
        out = activations[self.output_slots[0]]
        if self.decoder == "binary":
            return self.force_mag if out >= 0.5 else -self.force_mag
        return self.force_mag * (2.0 * out - 1.0)


def write_raster_csv(trace: list[tuple[int, int, int]], path: str) -> None:
    """Writes raster rows as CSV with header ``tick,neuron_index,fired``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tick", "neuron_index", "fired"])
        for tick, index, fired in trace:
            writer.writerow([tick, index, fired])


__all__ = [
    "SIGMOID_GAIN",
    "CodecConfig",
    "encode_probabilistic",
    "encode_current",
    "decode_binary",
    "decode_continuous",
    "background_current",
    "SpikingNetwork",
    "SigmoidNetwork",
    "write_raster_csv",
]
