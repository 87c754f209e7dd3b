"""Compiled whole-episode rollouts for campaign-scale evaluation.

These kernels mirror the pure-Python episode semantics (SpikingNetwork /
SigmoidNetwork stepping plus the plant update) expression for expression,
including random draw order and float accumulation order, so an episode
produces bit-identical results on either path.  The test suite pins that
equivalence; any change here must keep the Python side in lockstep.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _tick(v, u, a, b, c, d, v_t, current, substeps):
    # Mirror of neuron._tick_vu.
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


@njit(cache=True)
def _unit(value, half_range):
    # Mirror of cartpole._unit.
    scaled = 0.5 + 0.5 * value / half_range
    if scaled < 0.0:
        return 0.0
    if scaled > 1.0:
        return 1.0
    return scaled


@njit(cache=True)
def _plant_step(x, x_dot, theta, theta_dot, force, gravity, cart_mass, pole_mass, half_length, tau):
    # Mirror of cartpole.accelerations + cartpole.step.
    total_mass = cart_mass + pole_mass
    sin_t = math.sin(theta)
    cos_t = math.cos(theta)
    pole_moment = pole_mass * half_length
    theta_dd = (
        gravity * sin_t + cos_t * ((-force - pole_moment * theta_dot * theta_dot * sin_t) / total_mass)
    ) / (half_length * (4.0 / 3.0 - pole_mass * cos_t * cos_t / total_mass))
    x_dd = (force + pole_moment * (theta_dot * theta_dot * sin_t - theta_dd * cos_t)) / total_mass
    return x + tau * x_dot, x_dot + tau * x_dd, theta + tau * theta_dot, theta_dot + tau * theta_dd


@njit(cache=True)
def calibrate_baseline(
    dynamic,
    syn_ptr,
    syn_src,
    syn_w,
    n_inputs,
    a,
    b,
    c,
    d,
    v_t,
    substeps,
    rate_window,
    g_syn,
    i_bg,
    i_lo,
    i_hi,
    out_slot,
    windows,
    settle,
):
    """Mirror of SpikingNetwork.operating_baseline on fresh state."""
    n_slots = dynamic.size
    v = np.zeros(n_slots, dtype=np.float64)
    u = np.zeros(n_slots, dtype=np.float64)
    for j in range(n_slots):
        if dynamic[j]:
            v[j] = c
            u[j] = b * c
    prev_fired = np.zeros(n_slots, dtype=np.bool_)
    new_fired = np.zeros(n_slots, dtype=np.bool_)
    static_i = np.zeros(n_slots, dtype=np.float64)
    total = 0.0
    for window in range(windows):
        for j in range(n_slots):
            static_i[j] = 0.0
        for dst in range(n_slots):
            for k in range(syn_ptr[dst], syn_ptr[dst + 1]):
                if syn_src[k] < n_inputs:
                    static_i[dst] += syn_w[k] * g_syn * 0.5
        count = 0
        for _tick_idx in range(rate_window):
            for j in range(n_slots):
                new_fired[j] = False
            for j in range(n_slots):
                if not dynamic[j]:
                    continue
                current = i_bg + static_i[j]
                for k in range(syn_ptr[j], syn_ptr[j + 1]):
                    if prev_fired[syn_src[k]]:
                        current += syn_w[k] * g_syn
                if current < i_lo:
                    current = i_lo
                elif current > i_hi:
                    current = i_hi
                v[j], u[j], fired = _tick(v[j], u[j], a, b, c, d, v_t, current, substeps)
                new_fired[j] = fired
            for j in range(n_slots):
                prev_fired[j] = new_fired[j]
            if new_fired[out_slot]:
                count += 1
        if window >= settle:
            total += count / float(rate_window)
    return total / float(windows - settle)


@njit(cache=True)
def episode_spiking(
    v,
    u,
    prev_fired,
    spike_count,
    dynamic,
    syn_ptr,
    syn_src,
    syn_w,
    n_inputs,
    a,
    b,
    c,
    d,
    v_t,
    substeps,
    prob_coding,
    rate_window,
    g_syn,
    i_bg,
    i_lo,
    i_hi,
    binary_decoder,
    out_slot,
    baseline,
    sigma,
    dec_src,
    dec_w,
    force_mag,
    gravity,
    cart_mass,
    pole_mass,
    half_length,
    tau,
    x_limit,
    theta_limit,
    markovian,
    x_dot_range,
    theta_dot_range,
    success_steps,
    x,
    x_dot,
    theta,
    theta_dot,
    rng,
    record,
    traj,
):
    """Rolls out one spiking-controller episode; returns steps survived."""
    n_slots = v.size
    inputs = np.zeros(n_inputs, dtype=np.float64)
    static_i = np.zeros(n_slots, dtype=np.float64)
    new_fired = np.zeros(n_slots, dtype=np.bool_)
    if abs(x) > x_limit or abs(theta) > theta_limit:
        return 0
    steps = 0
    while steps < success_steps:
        if markovian:
            inputs[0] = _unit(x, x_limit)
            inputs[1] = _unit(x_dot, x_dot_range)
            inputs[2] = _unit(theta, theta_limit)
            inputs[3] = _unit(theta_dot, theta_dot_range)
        else:
            inputs[0] = _unit(x, x_limit)
            inputs[1] = _unit(theta, theta_limit)
        for j in range(n_slots):
            static_i[j] = 0.0
        if not prob_coding:
            for dst in range(n_slots):
                for k in range(syn_ptr[dst], syn_ptr[dst + 1]):
                    src = syn_src[k]
                    if src < n_inputs:
                        static_i[dst] += syn_w[k] * g_syn * inputs[src]
        for j in range(n_slots):
            spike_count[j] = 0
        for _tick_idx in range(rate_window):
            for j in range(n_slots):
                new_fired[j] = False
            if prob_coding:
                for i in range(n_inputs):
                    new_fired[i] = rng.random() < inputs[i]
            for j in range(n_slots):
                if not dynamic[j]:
                    continue
                current = i_bg + static_i[j]
                for k in range(syn_ptr[j], syn_ptr[j + 1]):
                    if prev_fired[syn_src[k]]:
                        current += syn_w[k] * g_syn
                if current < i_lo:
                    current = i_lo
                elif current > i_hi:
                    current = i_hi
                v[j], u[j], fired = _tick(v[j], u[j], a, b, c, d, v_t, current, substeps)
                new_fired[j] = fired
            for j in range(n_slots):
                prev_fired[j] = new_fired[j]
                if new_fired[j]:
                    spike_count[j] += 1
        if binary_decoder:
            rate = spike_count[out_slot] / float(rate_window)
            force = force_mag if rate >= baseline else -force_mag
        else:
            weighted = 0.0
            for k in range(dec_src.size):
                src = dec_src[k]
                if (not prob_coding) and src < n_inputs:
                    rate = inputs[src]
                else:
                    rate = spike_count[src] / float(rate_window)
                weighted += dec_w[k] * rate
            z = sigma * weighted
            if z > 500.0:
                z = 500.0
            elif z < -500.0:
                z = -500.0
            f_n = 1.0 / (1.0 + math.exp(-z))
            force = force_mag * (2.0 * f_n - 1.0)
        if record:
            traj[steps, 0] = x
            traj[steps, 1] = x_dot
            traj[steps, 2] = theta
            traj[steps, 3] = theta_dot
            traj[steps, 4] = force
        x, x_dot, theta, theta_dot = _plant_step(
            x, x_dot, theta, theta_dot, force, gravity, cart_mass, pole_mass, half_length, tau
        )
        if abs(x) > x_limit or abs(theta) > theta_limit:
            break
        steps += 1
    return steps


@njit(cache=True)
def episode_sigmoid(
    activation,
    dynamic,
    syn_ptr,
    syn_src,
    syn_w,
    n_inputs,
    gain,
    binary_decoder,
    out_slot,
    force_mag,
    gravity,
    cart_mass,
    pole_mass,
    half_length,
    tau,
    x_limit,
    theta_limit,
    markovian,
    x_dot_range,
    theta_dot_range,
    success_steps,
    x,
    x_dot,
    theta,
    theta_dot,
    record,
    traj,
):
    """Rolls out one sigmoid-controller episode; returns steps survived."""
    n_slots = activation.size
    inputs = np.zeros(n_inputs, dtype=np.float64)
    prev = np.zeros(n_slots, dtype=np.float64)
    if abs(x) > x_limit or abs(theta) > theta_limit:
        return 0
    steps = 0
    while steps < success_steps:
        if markovian:
            inputs[0] = _unit(x, x_limit)
            inputs[1] = _unit(x_dot, x_dot_range)
            inputs[2] = _unit(theta, theta_limit)
            inputs[3] = _unit(theta_dot, theta_dot_range)
        else:
            inputs[0] = _unit(x, x_limit)
            inputs[1] = _unit(theta, theta_limit)
        for j in range(n_slots):
            prev[j] = activation[j]
        for i in range(n_inputs):
            activation[i] = inputs[i]
        for j in range(n_slots):
            if not dynamic[j]:
                continue
            weighted = 0.0
            for k in range(syn_ptr[j], syn_ptr[j + 1]):
                src = syn_src[k]
                value = activation[src] if src < n_inputs else prev[src]
                weighted += syn_w[k] * value
            z = gain * weighted
            if z > 500.0:
                z = 500.0
            elif z < -500.0:
                z = -500.0
            activation[j] = 1.0 / (1.0 + math.exp(-z))
        out = activation[out_slot]
        if binary_decoder:
            force = force_mag if out >= 0.5 else -force_mag
        else:
            force = force_mag * (2.0 * out - 1.0)
        if record:
            traj[steps, 0] = x
            traj[steps, 1] = x_dot
            traj[steps, 2] = theta
            traj[steps, 3] = theta_dot
            traj[steps, 4] = force
        x, x_dot, theta, theta_dot = _plant_step(
            x, x_dot, theta, theta_dot, force, gravity, cart_mass, pole_mass, half_length, tau
        )
        if abs(x) > x_limit or abs(theta) > theta_limit:
            break
        steps += 1
    return steps


__all__ = ["calibrate_baseline", "episode_spiking", "episode_sigmoid"]
