"""Experiment orchestration: configs, episodes, evolution runs and campaigns.

A TaskConfig fully determines an experiment; every output byte is a pure
function of it.  Randomness comes from counter-based Philox streams split
per purpose: one stream drives evolution (init, mutation, selection) and
each episode gets its own stream keyed by (seed, generation, genome
index), so evaluation order and parallelism cannot change results.

Episodes run on a compiled fast path by default; a pure-Python path with
identical semantics backs the unit tests and stays available through
``evaluate(..., fast=False)``.
"""

from __future__ import annotations

import csv
import math
import os
import statistics
from dataclasses import dataclass, replace
from itertools import combinations
from multiprocessing import Pool

import numpy as np

from spikeneat import kernels
from spikeneat.cartpole import (
    CartPoleParams,
    CartPoleState,
    failed,
    observe,
)
from spikeneat.cartpole import step as plant_step
from spikeneat.neat import (
    EvolutionConfig,
    Genome,
    decode,
    new_population,
    reproduce,
    serialize_genome,
    share_fitness,
    speciate,
)
from spikeneat.neuron import DEFAULT_PARAMS, V_SUBSTEPS
from spikeneat.snn import (
    CALIBRATION_SETTLE,
    CALIBRATION_WINDOWS,
    SIGMOID_GAIN,
    CodecConfig,
    SigmoidNetwork,
    SpikingNetwork,
    background_current,
)

TASKS = ("markovian", "non_markovian")
PHENOTYPES = ("spiking", "sigmoid")

_TASK_TAU = {"markovian": 0.02, "non_markovian": 0.01}
_TASK_SUCCESS = {"markovian": 100_000, "non_markovian": 5000}

# Both tasks default to deterministic mean-field input coding.  The
# probabilistic encoder stays selectable, but its per-window Bernoulli
# noise floor leaves too little margin for bang-bang balancing: single
# flipped decisions near the stability boundary end episodes after a few
# hundred steps regardless of the weight vector.
_TASK_CODING = {"markovian": "current", "non_markovian": "current"}

# Non-Markovian episodes start with the pole tilted 3 degrees.
_NON_MARKOVIAN_THETA0 = 3.0 * math.pi / 180.0

# Markovian initial states are drawn from the middle tenth of each
# variable's normalization range.
_INIT_SPREAD = 0.1

# Stream tags keeping evolution draws and episode draws independent.
_STREAM_EVOLUTION = 1
_STREAM_EVAL = 2

THREADS_ENV = "SPIKE_NEAT_THREADS"


@dataclass
class TaskConfig:
    """Everything one experiment depends on.

    Fields defaulting to None are task-dependent and resolved by
    ``finalize()``: tau, success_steps and input_coding fall back to the
    task's canonical values, and i_bg is solved so an isolated neuron
    fires at 40% of its clamp-ceiling rate.  The binary decoder threshold
    is not a config field; it is calibrated per genome at decode time
    (see ``prepare_network``).
    """

    task: str = "markovian"
    phenotype: str = "spiking"
    seed: int = 1
    max_generations: int = 100
    population_size: int = 150
    tau: float | None = None
    success_steps: int | None = None
    force_mag: float = 10.0
    input_coding: str | None = None
    rate_window: int = 20
    g_syn: float = 10.0
    i_bg: float | None = None
    i_clamp_lo: float = 0.0
    i_clamp_hi: float = 200.0
    substeps: int = V_SUBSTEPS
    x_dot_range: float = 2.0
    theta_dot_range: float = 2.0
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 0.4
    c4: float = 1.0
    delta_t: float = 3.0
    p_add_node: float = 0.03
    p_add_conn: float = 0.1
    p_weight: float = 0.8
    p_weight_replace: float = 0.1
    weight_perturb: float = 0.5
    weight_limit: float = 8.0
    p_sigma: float = 0.2
    sigma_step: float = 0.2
    sigma_min: float = 0.05
    sigma_max: float = 20.0
    p_crossover: float = 0.75
    parent_fraction: float = 0.2
    elite_species_size: int = 5
    staleness_limit: int = 15

    @property
    def markovian(self) -> bool:
        return self.task == "markovian"

    @property
    def decoder(self) -> str:
        return "binary" if self.markovian else "continuous"

    @property
    def use_sigma(self) -> bool:
        # The sigma gene augments compatibility only where the decoder
        # uses it: spiking genomes on the continuous-force task.
        return not self.markovian and self.phenotype == "spiking"

    @property
    def n_inputs(self) -> int:
        return 4 if self.markovian else 2

    def finalize(self) -> "TaskConfig":
        """Resolves task-dependent defaults in place and validates.

        Idempotent; run_evolution and campaign call it automatically.

        Raises:
            ValueError: On any out-of-range or inconsistent field.
        """
        if self.task not in TASKS:
            raise ValueError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.phenotype not in PHENOTYPES:
            raise ValueError(f"phenotype must be one of {PHENOTYPES}, got {self.phenotype!r}")
        if self.tau is None:
            self.tau = _TASK_TAU[self.task]
        if self.success_steps is None:
            self.success_steps = _TASK_SUCCESS[self.task]
        if self.input_coding is None:
            self.input_coding = _TASK_CODING[self.task]
        if self.i_bg is None:
            self.i_bg = background_current(DEFAULT_PARAMS, 0.4, self.i_clamp_hi)
        self._validate()
        return self

    def _validate(self) -> None:
        def positive(name: str) -> None:
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

        def probability(name: str) -> None:
            if not (0.0 <= getattr(self, name) <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {getattr(self, name)}")

        for name in (
            "tau",
            "force_mag",
            "weight_limit",
            "sigma_min",
            "x_dot_range",
            "theta_dot_range",
            "parent_fraction",
        ):
            positive(name)
        for name in (
            "p_add_node",
            "p_add_conn",
            "p_weight",
            "p_weight_replace",
            "p_sigma",
            "p_crossover",
        ):
            probability(name)
        if self.population_size < 2:
            raise ValueError(f"population_size must be >= 2, got {self.population_size}")
        if self.max_generations < 1:
            raise ValueError(f"max_generations must be >= 1, got {self.max_generations}")
        if self.success_steps < 1:
            raise ValueError(f"success_steps must be >= 1, got {self.success_steps}")
        if self.rate_window < 1:
            raise ValueError(f"rate_window must be >= 1, got {self.rate_window}")
        if self.substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {self.substeps}")
        if self.parent_fraction > 1.0:
            raise ValueError(f"parent_fraction must be <= 1, got {self.parent_fraction}")
        if self.sigma_max < self.sigma_min:
            raise ValueError("sigma_max must be >= sigma_min")
        if self.g_syn < 0.0:
            raise ValueError(f"g_syn must be >= 0, got {self.g_syn}")
        if self.delta_t < 0.0:
            raise ValueError(f"delta_t must be >= 0, got {self.delta_t}")
        if self.staleness_limit < 1:
            raise ValueError(f"staleness_limit must be >= 1, got {self.staleness_limit}")
        if self.elite_species_size < 0:
            raise ValueError(f"elite_species_size must be >= 0, got {self.elite_species_size}")
        if not self.i_clamp_lo < self.i_clamp_hi:
            raise ValueError("i_clamp_lo must be below i_clamp_hi")
        if not math.isfinite(self.i_bg) or self.i_bg < 0.0:
            raise ValueError(f"i_bg must be a non-negative number, got {self.i_bg}")

    def plant(self) -> CartPoleParams:
        return CartPoleParams(tau=self.tau)

    def codec(self) -> CodecConfig:
        return CodecConfig(
            neuron=DEFAULT_PARAMS,
            input_coding=self.input_coding,
            rate_window=self.rate_window,
            g_syn=self.g_syn,
            i_bg=self.i_bg,
            i_clamp_lo=self.i_clamp_lo,
            i_clamp_hi=self.i_clamp_hi,
            decoder=self.decoder,
            baseline_rate=0.0,
            force_mag=self.force_mag,
            substeps=self.substeps,
        )

    def evolution(self) -> EvolutionConfig:
        return EvolutionConfig(
            population_size=self.population_size,
            c1=self.c1,
            c2=self.c2,
            c3=self.c3,
            c4=self.c4,
            delta_t=self.delta_t,
            use_sigma=self.use_sigma,
            p_add_node=self.p_add_node,
            p_add_conn=self.p_add_conn,
            p_weight=self.p_weight,
            p_weight_replace=self.p_weight_replace,
            weight_perturb=self.weight_perturb,
            weight_limit=self.weight_limit,
            p_sigma=self.p_sigma,
            sigma_step=self.sigma_step,
            sigma_min=self.sigma_min,
            sigma_max=self.sigma_max,
            p_crossover=self.p_crossover,
            parent_fraction=self.parent_fraction,
            elite_species_size=self.elite_species_size,
            staleness_limit=self.staleness_limit,
        )


def _parse_choice(options: tuple[str, ...], allow_auto: bool = False):
    def parse(value: str):
        if allow_auto and value == "auto":
            return None
        if value not in options:
            raise ValueError(f"expected one of {options}, got {value!r}")
        return value

    return parse


def _parse_float(value: str) -> float:
    return float(value)


def _parse_float_or_auto(value: str) -> float | None:
    return None if value == "auto" else float(value)


def _parse_int(value: str) -> int:
    return int(value)


def _parse_int_or_auto(value: str) -> int | None:
    return None if value == "auto" else int(value)


_CONFIG_PARSERS = {
    "task": _parse_choice(TASKS),
    "phenotype": _parse_choice(PHENOTYPES),
    "seed": _parse_int,
    "max_generations": _parse_int,
    "population_size": _parse_int,
    "tau": _parse_float_or_auto,
    "success_steps": _parse_int_or_auto,
    "force_mag": _parse_float,
    "input_coding": _parse_choice(("probabilistic", "current"), allow_auto=True),
    "rate_window": _parse_int,
    "g_syn": _parse_float,
    "i_bg": _parse_float_or_auto,
    "i_clamp_lo": _parse_float,
    "i_clamp_hi": _parse_float,
    "substeps": _parse_int,
    "x_dot_range": _parse_float,
    "theta_dot_range": _parse_float,
    "c1": _parse_float,
    "c2": _parse_float,
    "c3": _parse_float,
    "c4": _parse_float,
    "delta_t": _parse_float,
    "p_add_node": _parse_float,
    "p_add_conn": _parse_float,
    "p_weight": _parse_float,
    "p_weight_replace": _parse_float,
    "weight_perturb": _parse_float,
    "weight_limit": _parse_float,
    "p_sigma": _parse_float,
    "sigma_step": _parse_float,
    "sigma_min": _parse_float,
    "sigma_max": _parse_float,
    "p_crossover": _parse_float,
    "parent_fraction": _parse_float,
    "elite_species_size": _parse_int,
    "staleness_limit": _parse_int,
}


def parse_config(path: str) -> TaskConfig:
    """Reads a ``key = value`` config file into a finalized TaskConfig.

    Blank lines and ``#`` comments are ignored.  Unknown keys, malformed
    lines and invalid values raise ValueError with file and line context.
    """
    cfg = TaskConfig()
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_PARSERS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                setattr(cfg, key, _CONFIG_PARSERS[key](value))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return cfg.finalize()


def config_keys() -> list[str]:
    """All recognized config file keys."""
    return sorted(_CONFIG_PARSERS)


@dataclass
class EpisodeResult:
    """Outcome of one controller rollout.

    ``fitness`` is the number of steps survived; success means the
    episode reached the configured step target.
    """

    fitness: int
    success: bool
    trajectory: list[tuple[int, float, float, float, float, float]] | None = None


def _initial_state(cfg: TaskConfig, rng: np.random.Generator) -> CartPoleState:
    if not cfg.markovian:
        return CartPoleState(theta=_NON_MARKOVIAN_THETA0)
    plant = cfg.plant()
    return CartPoleState(
        x=rng.uniform(-_INIT_SPREAD * plant.x_limit, _INIT_SPREAD * plant.x_limit),
        x_dot=rng.uniform(-_INIT_SPREAD * cfg.x_dot_range, _INIT_SPREAD * cfg.x_dot_range),
        theta=rng.uniform(-_INIT_SPREAD * plant.theta_limit, _INIT_SPREAD * plant.theta_limit),
        theta_dot=rng.uniform(
            -_INIT_SPREAD * cfg.theta_dot_range, _INIT_SPREAD * cfg.theta_dot_range
        ),
    )


def prepare_network(genome: Genome, cfg: TaskConfig, fast: bool = True):
    """Decodes a genome into a ready-to-run controller.

    For spiking genomes under the binary decoder this also calibrates
    the decoder threshold to the network's own neutral-input operating
    rate, so the force decision is neutral at the balanced state
    regardless of the genome's weight scale.  The calibration is
    deterministic and identical on both episode paths.
    """
    cfg.finalize()
    net = decode(genome, cfg.codec())
    if isinstance(net, SpikingNetwork) and net.codec.decoder == "binary":
        codec = net.codec
        if fast:
            p = codec.neuron
            baseline = float(
                kernels.calibrate_baseline(
                    net.dynamic,
                    net.syn_ptr,
                    net.syn_src,
                    net.syn_w,
                    net.n_inputs,
                    p.a,
                    p.b,
                    p.c,
                    p.d,
                    p.v_t,
                    codec.substeps,
                    codec.rate_window,
                    codec.g_syn,
                    codec.i_bg,
                    codec.i_clamp_lo,
                    codec.i_clamp_hi,
                    net.output_slots[0],
                    CALIBRATION_WINDOWS,
                    CALIBRATION_SETTLE,
                )
            )
        else:
            baseline = net.operating_baseline()
        net.codec = replace(codec, baseline_rate=baseline)
    return net


def evaluate(
    genome: Genome,
    cfg: TaskConfig,
    rng: np.random.Generator,
    record_trajectory: bool = False,
    fast: bool = True,
) -> EpisodeResult:
    """Scores one genome on one episode.

    Decodes the genome, draws the initial plant state, then loops
    observe, network step, force decode, plant step until failure or the
    success step count.  The fast path runs the whole episode in a
    compiled kernel; ``fast=False`` uses the plain Python objects.  Both
    paths consume the random stream identically and return identical
    results.

    Args:
        genome: Evaluated blueprint; must match the config's phenotype
            and input arity.
        cfg: Finalized experiment config.
        rng: The episode's private random stream.
        record_trajectory: Collect (step, x, x_dot, theta, theta_dot,
            force) rows, one per control decision.
        fast: Use the compiled episode kernel.

    Returns:
        The episode outcome; trajectory is None unless requested.
    """
    cfg.finalize()
    net = prepare_network(genome, cfg, fast)
    state = _initial_state(cfg, rng)
    plant = cfg.plant()
    if failed(state, plant):
        return EpisodeResult(0, False, [] if record_trajectory else None)
    if fast:
        steps, rows = _episode_fast(net, cfg, plant, state, rng, record_trajectory)
    else:
        steps, rows = _episode_python(net, cfg, plant, state, rng, record_trajectory)
    return EpisodeResult(steps, steps >= cfg.success_steps, rows if record_trajectory else None)


def _episode_python(net, cfg, plant, state, rng, record):
    rows = []
    steps = 0
    while steps < cfg.success_steps:
        obs = observe(state, cfg.markovian, plant, cfg.x_dot_range, cfg.theta_dot_range)
        outputs = net.step(obs, rng)
        force = net.control_force(outputs)
        if record:
            rows.append((steps, state.x, state.x_dot, state.theta, state.theta_dot, force))
        state = plant_step(state, force, plant)
        if failed(state, plant):
            break
        steps += 1
    return steps, rows


def _episode_fast(net, cfg, plant, state, rng, record):
    traj = np.zeros((cfg.success_steps if record else 0, 5), dtype=np.float64)
    if isinstance(net, SpikingNetwork):
        codec = net.codec
        p = codec.neuron
        dec_src = np.array([s for s, _ in net.decoder_weights], dtype=np.int64)
        dec_w = np.array([w for _, w in net.decoder_weights], dtype=np.float64)
        steps = kernels.episode_spiking(
            net.v,
            net.u,
            net.prev_fired,
            net.spike_count,
            net.dynamic,
            net.syn_ptr,
            net.syn_src,
            net.syn_w,
            net.n_inputs,
            p.a,
            p.b,
            p.c,
            p.d,
            p.v_t,
            codec.substeps,
            codec.input_coding == "probabilistic",
            codec.rate_window,
            codec.g_syn,
            codec.i_bg,
            codec.i_clamp_lo,
            codec.i_clamp_hi,
            codec.decoder == "binary",
            net.output_slots[0],
            codec.baseline_rate,
            net.sigma,
            dec_src,
            dec_w,
            codec.force_mag,
            plant.gravity,
            plant.cart_mass,
            plant.pole_mass,
            plant.half_length,
            plant.tau,
            plant.x_limit,
            plant.theta_limit,
            cfg.markovian,
            cfg.x_dot_range,
            cfg.theta_dot_range,
            cfg.success_steps,
            state.x,
            state.x_dot,
            state.theta,
            state.theta_dot,
            rng,
            record,
            traj,
        )
    else:
        steps = kernels.episode_sigmoid(
            net.activation,
            net.dynamic,
            net.syn_ptr,
            net.syn_src,
            net.syn_w,
            net.n_inputs,
            SIGMOID_GAIN,
            net.decoder == "binary",
            net.output_slots[0],
            net.force_mag,
            plant.gravity,
            plant.cart_mass,
            plant.pole_mass,
            plant.half_length,
            plant.tau,
            plant.x_limit,
            plant.theta_limit,
            cfg.markovian,
            cfg.x_dot_range,
            cfg.theta_dot_range,
            cfg.success_steps,
            state.x,
            state.x_dot,
            state.theta,
            state.theta_dot,
            record,
            traj,
        )
    steps = int(steps)
    rows = []
    if record:
        n_rows = steps if steps >= cfg.success_steps else steps + 1
        # builtin floats, so rows are interchangeable with the Python
        # path's and repr-based CSV writers stay clean
        rows = [(i, *(float(v) for v in traj[i])) for i in range(n_rows)]
    return steps, rows


@dataclass
class RunResult:
    """One evolution run.

    Attributes:
        generations: 1-based generation of first success, None on failure.
        best_fitness: Per-generation best raw fitness (not a running max).
        champion: Copy of the best genome seen across the run.
        champion_stream: (generation, genome index) of the champion's
            scoring episode, for exact replay.
    """

    generations: int | None
    best_fitness: list[float]
    champion: Genome
    champion_stream: tuple[int, int]

    @property
    def success(self) -> bool:
        return self.generations is not None


def thread_count() -> int:
    """Worker processes for population evaluation.

    Reads SPIKE_NEAT_THREADS; 0 or unset means one worker per CPU.

    Raises:
        ValueError: If the variable is not a non-negative integer.
    """
    raw = os.environ.get(THREADS_ENV, "0")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a non-negative integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be a non-negative integer, got {raw!r}")
    return n if n > 0 else (os.cpu_count() or 1)


def _eval_rng(seed: int, generation: int, index: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence((seed, _STREAM_EVAL, generation, index)))
    )


_WORKER_CFG: TaskConfig | None = None


def _init_worker(cfg: TaskConfig) -> None:
    global _WORKER_CFG
    _WORKER_CFG = cfg


def _eval_task(args: tuple[Genome, int, int]) -> int:
    genome, generation, index = args
    rng = _eval_rng(_WORKER_CFG.seed, generation, index)
    return evaluate(genome, _WORKER_CFG, rng).fitness


def run_evolution(cfg: TaskConfig) -> RunResult:
    """Evolves one population until success or the generation cap.

    Per generation: evaluate every genome on its own stream, record the
    best raw fitness, stop on success (any genome reaching the step
    target), otherwise speciate, share fitness and reproduce.
    """
    cfg.finalize()
    evo_rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence((cfg.seed, _STREAM_EVOLUTION)))
    )
    pop = new_population(cfg.n_inputs, 1, cfg.phenotype, cfg.population_size, evo_rng)
    evo_cfg = cfg.evolution()
    workers = thread_count()
    pool = None
    if workers > 1:
        pool = Pool(workers, initializer=_init_worker, initargs=(cfg,))
    try:
        series: list[float] = []
        champion: Genome | None = None
        champion_stream = (1, 0)
        for generation in range(1, cfg.max_generations + 1):
            jobs = [(genome, generation, idx) for idx, genome in enumerate(pop.genomes)]
            if pool is not None:
                scores = pool.map(_eval_task, jobs, chunksize=max(1, len(jobs) // workers))
            else:
                scores = [
                    evaluate(job_genome, cfg, _eval_rng(cfg.seed, job_gen, job_idx)).fitness
                    for job_genome, job_gen, job_idx in jobs
                ]
            for genome, score in zip(pop.genomes, scores):
                genome.fitness = float(score)
            best_idx = min(
                range(len(pop.genomes)), key=lambda i: (-pop.genomes[i].fitness, i)
            )
            best = pop.genomes[best_idx]
            series.append(best.fitness)
            if champion is None or best.fitness > champion.fitness:
                champion = best.copy()
                champion_stream = (generation, best_idx)
            if best.fitness >= cfg.success_steps:
                return RunResult(generation, series, champion, champion_stream)
            speciate(pop, cfg.delta_t, evo_cfg.coeffs, cfg.use_sigma)
            share_fitness(pop)
            reproduce(pop, evo_rng, evo_cfg)
        return RunResult(None, series, champion, champion_stream)
    finally:
        if pool is not None:
            pool.close()
            pool.join()


def replay_champion(result: RunResult, cfg: TaskConfig) -> EpisodeResult:
    """Re-runs the champion's scoring episode with its original stream.

    The replay reproduces the exact trajectory that earned the champion
    its fitness, including every encoder draw.
    """
    rng = _eval_rng(cfg.seed, *result.champion_stream)
    return evaluate(result.champion, cfg, rng, record_trajectory=True)


@dataclass
class CampaignResult:
    """Aggregated multi-run outcome.

    ``generations`` encodes failures as max_generations + 1 (101 at the
    default cap), the convention used by median and mean; best and worst
    consider successful runs only.
    """

    outcomes: list[int | None]
    generations: list[int]
    series: list[list[float]]
    champions: list[Genome]
    best: int | None
    worst: int | None
    median: float
    mean: float
    failure_rate: float


def campaign(cfg: TaskConfig, runs: int, out_dir: str | None = None) -> CampaignResult:
    """Runs ``runs`` independent evolutions with consecutive seeds.

    Seeds are cfg.seed, cfg.seed + 1, and so on.  When ``out_dir`` is
    given, writes summary.csv, progress.csv, one champion genome per run
    and a progress figure there.

    Raises:
        ValueError: If runs < 1.
    """
    if runs < 1:
        raise ValueError(f"need at least one run, got {runs}")
    cfg.finalize()
    outcomes: list[int | None] = []
    all_series: list[list[float]] = []
    champions: list[Genome] = []
    for k in range(runs):
        run_cfg = replace(cfg, seed=cfg.seed + k)
        result = run_evolution(run_cfg)
        outcomes.append(result.generations)
        all_series.append(list(result.best_fitness))
        champions.append(result.champion)
    failure_mark = cfg.max_generations + 1
    generations = [g if g is not None else failure_mark for g in outcomes]
    successes = [g for g in outcomes if g is not None]
    length = max(len(s) for s in all_series)
    padded = [s + [s[-1]] * (length - len(s)) for s in all_series]
    result = CampaignResult(
        outcomes=outcomes,
        generations=generations,
        series=padded,
        champions=champions,
        best=min(successes) if successes else None,
        worst=max(successes) if successes else None,
        median=float(statistics.median(generations)),
        mean=float(statistics.fmean(generations)),
        failure_rate=(len(outcomes) - len(successes)) / len(outcomes),
    )
    if out_dir is not None:
        write_campaign_outputs(result, out_dir)
    return result


def fitness_progress(series: list[list[float]]) -> tuple[list[float], list[float]]:
    """Element-wise mean and sample standard deviation across runs.

    Series must be pre-padded to equal length (success value held).

    Raises:
        ValueError: If no series are given or lengths differ.
    """
    if not series:
        raise ValueError("need at least one fitness series")
    length = len(series[0])
    if any(len(s) != length for s in series):
        raise ValueError("fitness series must be padded to equal length")
    arr = np.asarray(series, dtype=np.float64)
    means = arr.mean(axis=0)
    if arr.shape[0] > 1:
        sds = arr.std(axis=0, ddof=1)
    else:
        sds = np.zeros(length)
    return means.tolist(), sds.tolist()


def mann_whitney_u(sample_a: list[float], sample_b: list[float]) -> tuple[float, float]:
    """Two-sided Mann-Whitney U test.

    U counts pairs where a beats b (ties count half) via the rank-sum
    identity with mid-rank ties.  The p-value is exact (permutation of
    the pooled sample) when both sides have at most 10 observations,
    else a normal approximation with tie-corrected variance and
    continuity correction.

    Raises:
        ValueError: If either sample has fewer than 2 observations.
    """
    n_a, n_b = len(sample_a), len(sample_b)
    if n_a < 2 or n_b < 2:
        raise ValueError("both samples need at least 2 observations")
    pooled = list(sample_a) + list(sample_b)
    ranks = _midranks(pooled)
    r_a = sum(ranks[:n_a])
    u = r_a - n_a * (n_a + 1) / 2.0
    mu = n_a * n_b / 2.0
    if n_a <= 10 and n_b <= 10:
        # Exact permutation distribution of U over pooled-rank relabelings.
        target = abs(u - mu) - 1e-09
        hits = 0
        total = 0
        base = n_a * (n_a + 1) / 2.0
        for picks in combinations(range(n_a + n_b), n_a):
            u_perm = sum(ranks[i] for i in picks) - base
            total += 1
            if abs(u_perm - mu) >= target:
                hits += 1
        return u, hits / total
    n = n_a + n_b
    tie_term = 0.0
    seen: dict[float, int] = {}
    for value in pooled:
        seen[value] = seen.get(value, 0) + 1
    for count in seen.values():
        tie_term += count**3 - count
    var = n_a * n_b / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0.0:
        return u, 1.0
    diff = u - mu
    if diff > 0.5:
        z = (diff - 0.5) / math.sqrt(var)
    elif diff < -0.5:
        z = (diff + 0.5) / math.sqrt(var)
    else:
        z = 0.0
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return u, min(p, 1.0)


def _midranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        # Tied block shares the average of ranks i+1 .. j+1.
        rank = (i + j + 2) / 2.0
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def write_summary_csv(generations: list[int], outcomes: list[int | None], path: str) -> None:
    """Writes per-run outcomes: run, generations (failure mark), success."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run", "generations", "success"])
        for k, (gens, outcome) in enumerate(zip(generations, outcomes), 1):
            writer.writerow([k, gens, 1 if outcome is not None else 0])


def write_progress_csv(means: list[float], sds: list[float], path: str) -> None:
    """Writes the aggregated best-fitness curve, one row per generation."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "mean_best_fitness", "sd"])
        for gen, (mean, sd) in enumerate(zip(means, sds), 1):
            writer.writerow([gen, repr(float(mean)), repr(float(sd))])


def read_summary_generations(path: str) -> list[int]:
    """Loads the generations column from a summary.csv."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "generations" not in reader.fieldnames:
            raise ValueError(f"{path} is not a campaign summary (no generations column)")
        return [int(row["generations"]) for row in reader]


def write_campaign_outputs(result: CampaignResult, out_dir: str) -> None:
    """Writes summary.csv, progress.csv, champion genomes and a figure."""
    os.makedirs(out_dir, exist_ok=True)
    write_summary_csv(result.generations, result.outcomes, os.path.join(out_dir, "summary.csv"))
    means, sds = fitness_progress(result.series)
    write_progress_csv(means, sds, os.path.join(out_dir, "progress.csv"))
    for k, champion in enumerate(result.champions, 1):
        with open(os.path.join(out_dir, f"champion_run{k:03d}.genome"), "w") as fh:
            fh.write(serialize_genome(champion))
    from spikeneat import plots

    plots.progress_figure(means, sds, os.path.join(out_dir, "progress.png"))


__all__ = [
    "TASKS",
    "PHENOTYPES",
    "THREADS_ENV",
    "TaskConfig",
    "parse_config",
    "config_keys",
    "EpisodeResult",
    "prepare_network",
    "evaluate",
    "RunResult",
    "run_evolution",
    "replay_champion",
    "CampaignResult",
    "campaign",
    "fitness_progress",
    "mann_whitney_u",
    "thread_count",
    "write_summary_csv",
    "write_progress_csv",
    "read_summary_generations",
    "write_campaign_outputs",
]
