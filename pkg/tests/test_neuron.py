"""Membrane dynamics, reset rule, and f-I curve behavior."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spikeneat.neuron import (
    CHATTERING_PARAMS,
    DEFAULT_PARAMS,
    REFERENCE_SUBSTEPS,
    V_SUBSTEPS,
    NeuronParams,
    fi_curve,
    firing_rate,
    neuron_init,
    neuron_tick,
    stable_rest_potential,
    write_fi_csv,
)


def spike_count(params, current, window_ms, substeps):
    state = neuron_init(params)
    for _ in range(window_ms):
        state = neuron_tick(state, params, current, substeps=substeps)
    return state.spike_count


class TestParams:
    def test_defaults_are_regular_spiking(self):
        p = DEFAULT_PARAMS
        assert (p.a, p.b, p.c, p.d, p.v_t) == (0.02, 0.2, -65.0, 2.0, 30.0)

    def test_chattering_differs_only_in_reset(self):
        assert CHATTERING_PARAMS.c == -50.0
        assert CHATTERING_PARAMS.a == DEFAULT_PARAMS.a

    def test_nonpositive_a_rejected(self):
        with pytest.raises(ValueError):
            NeuronParams(a=0.0)

    def test_threshold_below_reset_rejected(self):
        with pytest.raises(ValueError):
            NeuronParams(c=-65.0, v_t=-70.0)


class TestTick:
    def test_init_is_conventional_rest(self):
        state = neuron_init(DEFAULT_PARAMS)
        assert state.v == DEFAULT_PARAMS.c
        assert state.u == DEFAULT_PARAMS.b * DEFAULT_PARAMS.c
        assert not state.fired and state.spike_count == 0

    def test_zero_input_never_spikes(self):
        state = neuron_init(DEFAULT_PARAMS)
        for _ in range(1000):
            state = neuron_tick(state, DEFAULT_PARAMS, 0.0)
        assert state.spike_count == 0

    def test_zero_input_settles_at_stable_equilibrium(self):
        # The conventional init (v = c = -65) is not the fixed point; the
        # membrane drifts to the lower root of the quadratic and stays.
        rest = stable_rest_potential(DEFAULT_PARAMS)
        assert rest == pytest.approx(-70.0, abs=1e-9)
        state = neuron_init(DEFAULT_PARAMS)
        for _ in range(2000):
            state = neuron_tick(state, DEFAULT_PARAMS, 0.0)
        assert state.v == pytest.approx(rest, abs=0.05)
        assert state.u == pytest.approx(DEFAULT_PARAMS.b * rest, abs=0.05)

    def test_strong_input_spikes_and_resets(self):
        state = neuron_init(DEFAULT_PARAMS)
        seen = False
        for _ in range(100):
            before_u = state.u
            state = neuron_tick(state, DEFAULT_PARAMS, 20.0)
            if state.fired:
                seen = True
                assert state.v == DEFAULT_PARAMS.c
                assert state.u > before_u
                break
        assert seen

    def test_original_state_not_mutated(self):
        state = neuron_init(DEFAULT_PARAMS)
        neuron_tick(state, DEFAULT_PARAMS, 50.0)
        assert state.v == DEFAULT_PARAMS.c and state.spike_count == 0

    def test_nonfinite_current_rejected(self):
        state = neuron_init(DEFAULT_PARAMS)
        with pytest.raises(ValueError):
            neuron_tick(state, DEFAULT_PARAMS, math.inf)

    def test_nonunit_tick_rejected(self):
        state = neuron_init(DEFAULT_PARAMS)
        with pytest.raises(ValueError):
            neuron_tick(state, DEFAULT_PARAMS, 0.0, dt_ms=0.5)

    @given(st.floats(min_value=0.0, max_value=200.0), st.integers(min_value=1, max_value=200))
    @settings(max_examples=30, deadline=None)
    def test_state_stays_finite(self, current, ticks):
        state = neuron_init(DEFAULT_PARAMS)
        for _ in range(ticks):
            state = neuron_tick(state, DEFAULT_PARAMS, current)
        assert math.isfinite(state.v) and math.isfinite(state.u)
        assert state.v <= DEFAULT_PARAMS.v_t


class TestAgainstReference:
    # Frozen counts from the 0.001 ms-substep reference integration.
    REFERENCE_COUNTS = {0.0: 0, 5.0: 18, 10.0: 49, 20.0: 116}
    PRODUCTION_COUNTS = {0.0: 0, 5.0: 17, 10.0: 49, 20.0: 115}

    @pytest.mark.parametrize("current", [0.0, 5.0, 10.0, 20.0])
    def test_production_substeps_within_one_spike(self, current):
        reference = spike_count(DEFAULT_PARAMS, current, 1000, REFERENCE_SUBSTEPS)
        production = spike_count(DEFAULT_PARAMS, current, 1000, V_SUBSTEPS)
        assert reference == self.REFERENCE_COUNTS[current]
        assert production == self.PRODUCTION_COUNTS[current]
        assert abs(production - reference) <= 1


class TestFICurve:
    def test_rate_zero_at_zero_current(self):
        assert firing_rate(CHATTERING_PARAMS, 0.0) == 0.0
        assert firing_rate(DEFAULT_PARAMS, 0.0) == 0.0

    def test_chattering_curve_nondecreasing(self):
        rows = fi_curve(CHATTERING_PARAMS, 0.0, 200.0, steps=20)
        rates = [rate for _, rate in rows]
        assert rates[0] == 0.0
        assert all(b >= a for a, b in zip(rates, rates[1:]))

    def test_levels_evenly_spaced_inclusive(self):
        rows = fi_curve(DEFAULT_PARAMS, 0.0, 200.0, steps=21)
        currents = [current for current, _ in rows]
        assert currents[0] == 0.0 and currents[-1] == 200.0
        assert currents[10] == pytest.approx(100.0)

    def test_bad_arguments_rejected(self):
        with pytest.raises(ValueError):
            fi_curve(DEFAULT_PARAMS, steps=1)
        with pytest.raises(ValueError):
            fi_curve(DEFAULT_PARAMS, i_min=10.0, i_max=0.0)

    def test_csv_round_trip(self, tmp_path):
        rows = fi_curve(DEFAULT_PARAMS, 0.0, 20.0, steps=3, window_ms=100)
        path = tmp_path / "fi.csv"
        write_fi_csv(rows, str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "I_nA,rate_hz"
        parsed = [tuple(float(v) for v in line.split(",")) for line in lines[1:]]
        assert parsed == [(c, r) for c, r in rows]
