"""Neuroevolution of spiking and sigmoidal cart-pole controllers.

The package evolves recurrent Izhikevich spiking networks (and a sigmoidal
baseline) with NEAT-style topology and weight evolution, evaluated on
Markovian and non-Markovian pole balancing.
"""

from spikeneat.neuron import NeuronParams, NeuronState, neuron_init, neuron_tick, fi_curve
from spikeneat.cartpole import CartPoleParams, CartPoleState, step, failed, observe
from spikeneat.neat import Genome, Population, minimal_genome, decode
from spikeneat.harness import TaskConfig, parse_config, evaluate, run_evolution, campaign

__all__ = [
    "NeuronParams",
    "NeuronState",
    "neuron_init",
    "neuron_tick",
    "fi_curve",
    "CartPoleParams",
    "CartPoleState",
    "step",
    "failed",
    "observe",
    "Genome",
    "Population",
    "minimal_genome",
    "decode",
    "TaskConfig",
    "parse_config",
    "evaluate",
    "run_evolution",
    "campaign",
]

__version__ = "0.1.0"
