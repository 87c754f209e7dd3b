"""Experiment configs, episode evaluation, evolution runs and statistics."""

import dataclasses
import math
import os

import numpy as np
import pytest
from scipy.stats import mannwhitneyu

from spikeneat import cli, harness
from spikeneat.cartpole import CartPoleParams
from spikeneat.harness import (
    TaskConfig,
    _eval_rng,
    _initial_state,
    campaign,
    config_keys,
    evaluate,
    fitness_progress,
    mann_whitney_u,
    parse_config,
    prepare_network,
    read_summary_generations,
    replay_champion,
    run_evolution,
    thread_count,
    write_progress_csv,
    write_summary_csv,
)
from spikeneat.neat import Innovations, minimal_genome, mutate, serialize_genome
from spikeneat.snn import SigmoidNetwork, SpikingNetwork


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Keeps evolution single-process unless a test overrides it."""
    monkeypatch.setenv(harness.THREADS_ENV, "1")


def small_cfg(**overrides):
    base = dict(
        task="markovian",
        phenotype="spiking",
        seed=3,
        max_generations=4,
        population_size=16,
        success_steps=150,
    )
    base.update(overrides)
    return TaskConfig(**base).finalize()


def grown_genome(n_inputs, kind, seed, steps=25):
    """A genome with some evolved hidden structure for episode tests."""
    rng = np.random.default_rng(seed)
    innovations = Innovations()
    genome = minimal_genome(n_inputs, 1, kind, rng, innovations)
    rates = harness.TaskConfig().finalize().evolution()
    rates = dataclasses.replace(rates, p_add_node=0.3, p_add_conn=0.5)
    for _ in range(steps):
        mutate(genome, rng, rates, innovations)
    return genome


class TestTaskConfigDefaults:
    def test_markovian(self):
        cfg = TaskConfig(task="markovian").finalize()
        assert cfg.tau == 0.02
        assert cfg.success_steps == 100_000
        assert cfg.input_coding == "current"
        assert cfg.decoder == "binary"
        assert cfg.n_inputs == 4
        assert not cfg.use_sigma
        assert cfg.i_bg == pytest.approx(70.30759604680208, abs=1e-9)

    def test_non_markovian(self):
        cfg = TaskConfig(task="non_markovian").finalize()
        assert cfg.tau == 0.01
        assert cfg.success_steps == 5000
        assert cfg.input_coding == "current"
        assert cfg.decoder == "continuous"
        assert cfg.n_inputs == 2
        assert cfg.use_sigma

    def test_sigma_distance_only_for_spiking_continuous(self):
        assert not TaskConfig(task="non_markovian", phenotype="sigmoid").finalize().use_sigma
        assert not TaskConfig(task="markovian", phenotype="spiking").finalize().use_sigma

    def test_finalize_idempotent_and_overridable(self):
        cfg = TaskConfig(task="markovian", tau=0.005, success_steps=77, i_bg=50.0)
        cfg.finalize()
        cfg.finalize()
        assert (cfg.tau, cfg.success_steps, cfg.i_bg) == (0.005, 77, 50.0)

    def test_plant_and_evolution_views(self):
        cfg = small_cfg(tau=0.013, delta_t=2.5, p_add_conn=0.2)
        assert isinstance(cfg.plant(), CartPoleParams)
        assert cfg.plant().tau == 0.013
        evo = cfg.evolution()
        assert evo.population_size == 16
        assert evo.delta_t == 2.5
        assert evo.p_add_conn == 0.2

    @pytest.mark.parametrize(
        "field,value",
        [
            ("task", "pendulum"),
            ("phenotype", "analog"),
            ("population_size", 1),
            ("max_generations", 0),
            ("tau", -0.02),
            ("p_weight", 1.5),
            ("parent_fraction", 0.0),
            ("parent_fraction", 1.2),
            ("rate_window", 0),
            ("substeps", 0),
            ("sigma_max", 0.01),
            ("i_clamp_hi", 0.0),
            ("i_bg", -1.0),
            ("g_syn", -1.0),
            ("staleness_limit", 0),
            ("elite_species_size", -1),
        ],
    )
    def test_rejects_bad_values(self, field, value):
        cfg = TaskConfig(**{field: value})
        with pytest.raises(ValueError):
            cfg.finalize()


class TestParseConfig:
    def test_parses_comments_blanks_and_auto(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text(
            "# experiment setup\n"
            "task = non_markovian\n"
            "phenotype = sigmoid   # inline comment\n"
            "\n"
            "seed = 7\n"
            "tau = auto\n"
            "i_bg = auto\n"
            "input_coding = auto\n"
            "population_size = 40\n"
        )
        cfg = parse_config(str(path))
        assert cfg.task == "non_markovian"
        assert cfg.phenotype == "sigmoid"
        assert cfg.seed == 7
        assert cfg.population_size == 40
        assert cfg.tau == 0.01
        assert cfg.input_coding == "current"
        assert cfg.i_bg == pytest.approx(70.30759604680208, abs=1e-9)

    def test_unknown_key_reports_location(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("task = markovian\ncolour = red\n")
        with pytest.raises(ValueError, match=r"exp\.cfg:2: unknown config key 'colour'"):
            parse_config(str(path))

    def test_missing_equals_rejected(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("seed 7\n")
        with pytest.raises(ValueError, match=r"exp\.cfg:1"):
            parse_config(str(path))

    def test_bad_value_reports_key(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("seed = seven\n")
        with pytest.raises(ValueError, match=r"exp\.cfg:1: bad value for seed"):
            parse_config(str(path))

    def test_keys_cover_every_config_field(self):
        fields = {f.name for f in dataclasses.fields(TaskConfig)}
        assert set(config_keys()) == fields


class TestStreams:
    def test_eval_rng_reproducible_and_distinct(self):
        a = _eval_rng(5, 3, 7).random(4)
        b = _eval_rng(5, 3, 7).random(4)
        c = _eval_rng(5, 3, 8).random(4)
        d = _eval_rng(6, 3, 7).random(4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)
        assert not np.array_equal(a, d)

    def test_initial_state_markovian_spread(self):
        cfg = small_cfg()
        plant = cfg.plant()
        rng = np.random.default_rng(0)
        for _ in range(100):
            state = _initial_state(cfg, rng)
            assert abs(state.x) <= 0.1 * plant.x_limit
            assert abs(state.x_dot) <= 0.1 * cfg.x_dot_range
            assert abs(state.theta) <= 0.1 * plant.theta_limit
            assert abs(state.theta_dot) <= 0.1 * cfg.theta_dot_range

    def test_initial_state_non_markovian_fixed_tilt(self):
        cfg = small_cfg(task="non_markovian")
        rng = np.random.default_rng(0)
        state = _initial_state(cfg, rng)
        assert state.theta == pytest.approx(3.0 * math.pi / 180.0)
        assert (state.x, state.x_dot, state.theta_dot) == (0.0, 0.0, 0.0)
        assert np.array_equal(np.random.default_rng(0).random(3), rng.random(3))


class TestPrepareNetwork:
    def test_binary_decoder_gets_calibrated_baseline(self):
        cfg = small_cfg()
        genome = grown_genome(4, "spiking", seed=31)
        net = prepare_network(genome, cfg)
        assert isinstance(net, SpikingNetwork)
        assert net.codec.baseline_rate > 0.0

    def test_kernel_and_python_calibration_agree_exactly(self):
        cfg = small_cfg()
        for seed in range(6):
            genome = grown_genome(4, "spiking", seed=40 + seed)
            fast = prepare_network(genome, cfg, fast=True)
            slow = prepare_network(genome, cfg, fast=False)
            assert fast.codec.baseline_rate == slow.codec.baseline_rate

    def test_continuous_decoder_skips_calibration(self):
        cfg = small_cfg(task="non_markovian")
        net = prepare_network(grown_genome(2, "spiking", seed=50), cfg)
        assert isinstance(net, SpikingNetwork)
        assert net.codec.baseline_rate == 0.0

    def test_sigmoid_phenotype_untouched(self):
        cfg = small_cfg(phenotype="sigmoid")
        net = prepare_network(grown_genome(4, "sigmoid", seed=51), cfg)
        assert isinstance(net, SigmoidNetwork)


class TestEvaluateParity:
    CASES = [
        ("markovian", "spiking", "current"),
        ("markovian", "spiking", "probabilistic"),
        ("markovian", "sigmoid", "current"),
        ("non_markovian", "spiking", "current"),
        ("non_markovian", "spiking", "probabilistic"),
        ("non_markovian", "sigmoid", "current"),
    ]

    @pytest.mark.parametrize("task,phenotype,coding", CASES)
    def test_fast_and_python_paths_identical(self, task, phenotype, coding):
        cfg = small_cfg(task=task, phenotype=phenotype, input_coding=coding, success_steps=120)
        for seed in range(4):
            genome = grown_genome(cfg.n_inputs, phenotype, seed=60 + seed)
            fast = evaluate(genome, cfg, _eval_rng(9, 1, seed), record_trajectory=True)
            slow = evaluate(
                genome, cfg, _eval_rng(9, 1, seed), record_trajectory=True, fast=False
            )
            assert fast.fitness == slow.fitness
            assert fast.success == slow.success
            assert fast.trajectory == slow.trajectory

    def test_trajectory_row_shape(self):
        cfg = small_cfg(success_steps=40)
        genome = grown_genome(4, "spiking", seed=70)
        result = evaluate(genome, cfg, _eval_rng(9, 1, 0), record_trajectory=True)
        rows = result.trajectory
        assert rows
        expected = result.fitness if result.success else result.fitness + 1
        assert len(rows) == expected
        assert [row[0] for row in rows] == list(range(len(rows)))
        assert all(len(row) == 6 for row in rows)
        assert all(row[5] in (-10.0, 10.0) for row in rows)
        # builtin floats, not numpy scalars: repr-based CSV writers leak
        # the numpy type otherwise
        assert all(type(value) is float for row in rows for value in row[1:])

    def test_trajectory_none_unless_requested(self):
        cfg = small_cfg(success_steps=40)
        genome = grown_genome(4, "spiking", seed=71)
        assert evaluate(genome, cfg, _eval_rng(9, 1, 0)).trajectory is None


class TestRunEvolution:
    def test_deterministic_repeat(self):
        cfg = small_cfg()
        first = run_evolution(cfg)
        second = run_evolution(small_cfg())
        assert first.generations == second.generations
        assert first.best_fitness == second.best_fitness
        assert first.champion_stream == second.champion_stream
        assert serialize_genome(first.champion) == serialize_genome(second.champion)

    def test_worker_pool_matches_serial(self, monkeypatch):
        serial = run_evolution(small_cfg(max_generations=3))
        monkeypatch.setenv(harness.THREADS_ENV, "2")
        pooled = run_evolution(small_cfg(max_generations=3))
        assert serial.best_fitness == pooled.best_fitness
        assert serialize_genome(serial.champion) == serialize_genome(pooled.champion)

    def test_success_stops_early(self):
        cfg = small_cfg(success_steps=30, max_generations=10)
        result = run_evolution(cfg)
        assert result.success
        assert result.generations == len(result.best_fitness)
        assert result.best_fitness[-1] >= 30

    def test_failure_reports_none(self):
        cfg = small_cfg(success_steps=100_000, max_generations=2, population_size=10)
        result = run_evolution(cfg)
        assert result.generations is None
        assert not result.success
        assert len(result.best_fitness) == 2

    def test_replay_reproduces_champion_fitness(self):
        cfg = small_cfg(success_steps=200, max_generations=3)
        result = run_evolution(cfg)
        replay = replay_champion(result, cfg)
        assert float(replay.fitness) == result.champion.fitness
        assert replay.trajectory is not None


class TestThreadCount:
    def test_explicit(self, monkeypatch):
        monkeypatch.setenv(harness.THREADS_ENV, "3")
        assert thread_count() == 3

    def test_zero_and_unset_mean_cpu_count(self, monkeypatch):
        monkeypatch.setenv(harness.THREADS_ENV, "0")
        assert thread_count() == (os.cpu_count() or 1)
        monkeypatch.delenv(harness.THREADS_ENV)
        assert thread_count() == (os.cpu_count() or 1)

    def test_rejects_garbage(self, monkeypatch):
        monkeypatch.setenv(harness.THREADS_ENV, "-1")
        with pytest.raises(ValueError):
            thread_count()
        monkeypatch.setenv(harness.THREADS_ENV, "many")
        with pytest.raises(ValueError):
            thread_count()


class TestCampaign:
    def test_aggregates_and_failure_mark(self):
        cfg = small_cfg(success_steps=100_000, max_generations=2, population_size=10)
        result = campaign(cfg, 3)
        assert result.outcomes == [None, None, None]
        assert result.generations == [3, 3, 3]
        assert result.best is None and result.worst is None
        assert result.median == 3.0
        assert result.failure_rate == 1.0
        assert len({len(s) for s in result.series}) == 1

    def test_mixed_outcomes_use_consecutive_seeds(self):
        cfg = small_cfg(success_steps=60, max_generations=6, seed=11)
        result = campaign(cfg, 3)
        for k, outcome in enumerate(result.outcomes):
            single = run_evolution(small_cfg(success_steps=60, max_generations=6, seed=11 + k))
            assert outcome == single.generations
        solved = [g for g in result.outcomes if g is not None]
        if solved:
            assert result.best == min(solved)
            assert result.worst == max(solved)

    def test_outputs_and_reruns_byte_identical(self, tmp_path):
        cfg = small_cfg(success_steps=60, max_generations=4, seed=21)
        dir_a = tmp_path / "a"
        dir_b = tmp_path / "b"
        res = campaign(cfg, 2, out_dir=str(dir_a))
        campaign(small_cfg(success_steps=60, max_generations=4, seed=21), 2, out_dir=str(dir_b))
        names = ["summary.csv", "progress.csv", "champion_run001.genome", "champion_run002.genome"]
        for name in names:
            assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()
        assert (dir_a / "progress.png").stat().st_size > 0
        assert read_summary_generations(str(dir_a / "summary.csv")) == res.generations

    def test_rejects_zero_runs(self):
        with pytest.raises(ValueError):
            campaign(small_cfg(), 0)


class TestFitnessProgress:
    def test_mean_and_sample_sd(self):
        series = [[1.0, 2.0, 3.0], [3.0, 2.0, 7.0]]
        means, sds = fitness_progress(series)
        assert means == [2.0, 2.0, 5.0]
        assert sds == pytest.approx(
            [np.std([1, 3], ddof=1), 0.0, np.std([3, 7], ddof=1)]
        )

    def test_single_series_zero_sd(self):
        means, sds = fitness_progress([[4.0, 5.0]])
        assert means == [4.0, 5.0]
        assert sds == [0.0, 0.0]

    def test_rejects_ragged_or_empty(self):
        with pytest.raises(ValueError):
            fitness_progress([])
        with pytest.raises(ValueError):
            fitness_progress([[1.0], [1.0, 2.0]])


class TestMannWhitney:
    def brute_force_u(self, a, b):
        u = 0.0
        for x in a:
            for y in b:
                if x > y:
                    u += 1.0
                elif x == y:
                    u += 0.5
        return u

    def test_u_matches_pair_counting(self):
        rng = np.random.default_rng(80)
        for _ in range(60):
            a = rng.integers(0, 20, size=rng.integers(2, 15)).astype(float).tolist()
            b = rng.integers(0, 20, size=rng.integers(2, 15)).astype(float).tolist()
            u, _ = mann_whitney_u(a, b)
            assert u == pytest.approx(self.brute_force_u(a, b))

    def test_exact_branch_matches_scipy(self):
        rng = np.random.default_rng(81)
        for _ in range(25):
            a = rng.permutation(np.arange(0.0, 40.0))[:6].tolist()
            b = rng.permutation(np.arange(0.25, 40.25))[:7].tolist()
            u, p = mann_whitney_u(a, b)
            ref = mannwhitneyu(a, b, alternative="two-sided", method="exact")
            assert u == ref.statistic
            assert p == pytest.approx(ref.pvalue, abs=1e-12)

    def test_normal_branch_matches_scipy_with_ties(self):
        rng = np.random.default_rng(82)
        for _ in range(25):
            a = rng.integers(0, 10, size=16).astype(float).tolist()
            b = rng.integers(0, 10, size=14).astype(float).tolist()
            u, p = mann_whitney_u(a, b)
            ref = mannwhitneyu(a, b, alternative="two-sided", method="asymptotic")
            assert u == pytest.approx(ref.statistic)
            assert p == pytest.approx(ref.pvalue, abs=1e-12)

    def test_identical_samples_insignificant(self):
        _, p = mann_whitney_u([5.0] * 12, [5.0] * 12)
        assert p == 1.0

    def test_rejects_tiny_samples(self):
        with pytest.raises(ValueError):
            mann_whitney_u([1.0], [2.0, 3.0])


class TestCsvRoundTrips:
    def test_summary(self, tmp_path):
        path = tmp_path / "summary.csv"
        write_summary_csv([4, 101], [4, None], str(path))
        text = path.read_text()
        assert text.splitlines()[0] == "run,generations,success"
        assert read_summary_generations(str(path)) == [4, 101]

    def test_summary_reader_rejects_other_csv(self, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_summary_generations(str(path))

    def test_progress_header_and_precision(self, tmp_path):
        path = tmp_path / "progress.csv"
        write_progress_csv([1.0, 2.5], [0.0, 0.1], str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "generation,mean_best_fitness,sd"
        assert lines[1].startswith("1,")
        assert "0.1" in lines[2]


class TestCli:
    def write_cfg(self, tmp_path, **overrides):
        base = dict(
            task="markovian",
            phenotype="spiking",
            seed=5,
            max_generations=4,
            population_size=12,
            success_steps=60,
        )
        base.update(overrides)
        path = tmp_path / "exp.cfg"
        path.write_text("".join(f"{k} = {v}\n" for k, v in base.items()))
        return str(path)

    def test_run_writes_report(self, tmp_path, capsys):
        cfg_path = self.write_cfg(tmp_path)
        out = tmp_path / "out"
        code = cli.main(["run", "--config", cfg_path, "--out", str(out), "--raster", "50"])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "generation" in stdout
        for name in (
            "progress.csv",
            "champion.genome",
            "trajectory.csv",
            "progress.png",
            "trajectory.png",
            "raster.csv",
        ):
            assert (out / name).exists(), name

    def test_campaign_and_compare(self, tmp_path, capsys):
        cfg_a = self.write_cfg(tmp_path, seed=5)
        out_a = tmp_path / "camp_a"
        out_b = tmp_path / "camp_b"
        assert cli.main(["campaign", "--config", cfg_a, "--runs", "2", "--out", str(out_a)]) == 0
        cfg_b = self.write_cfg(tmp_path, seed=9)
        assert cli.main(["campaign", "--config", cfg_b, "--runs", "2", "--out", str(out_b)]) == 0
        assert cli.main(["compare", "--a", str(out_a), "--b", str(out_b)]) == 0
        stdout = capsys.readouterr().out
        assert "Mann-Whitney U" in stdout

    def test_fi_curve(self, tmp_path, capsys):
        out = tmp_path / "fi.csv"
        code = cli.main(
            ["fi-curve", "--params", "chattering", "--out", str(out), "--steps", "5", "--window", "200"]
        )
        assert code == 0
        assert out.exists()
        assert (tmp_path / "fi.png").exists()

    def test_errors_exit_2(self, tmp_path, capsys):
        missing = str(tmp_path / "nope.cfg")
        assert cli.main(["run", "--config", missing]) == 2
        assert "error:" in capsys.readouterr().err
