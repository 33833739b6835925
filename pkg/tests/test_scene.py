"""Workspace construction, perception stub, and pipeline campaign checks."""

import io
import math
import random

import numpy as np
import pytest

from cubebot.cube import SOLVED, Face, Move, facelets_to_cubies, parse_facelets
from cubebot.scene import (
    DEFAULT_CAMPAIGN,
    DEFAULT_MODEL,
    CampaignConfig,
    LayerUnreachable,
    PipelineStats,
    SceneSpec,
    StageModel,
    TrialRecord,
    approach_report,
    approach_trajectory,
    build_scene,
    build_subtask_maps,
    derive_seed,
    load_campaign_config,
    observe_cube,
    run_campaign,
    run_trial,
    subtask_trajectory,
)
from cubebot.solvers import TWO_PHASE_BUDGET


def chain_rates(model, n, seed):
    """Oracle: simulate the stage chain one scalar draw at a time."""
    rnd = random.Random(seed)
    fails = [0, 0, 0]
    succ = 0
    probs = (model.p_kb, model.p_llm, model.p_exe)
    for _ in range(n):
        for i, p in enumerate(probs):
            if rnd.random() >= p:
                fails[i] += 1
                break
        else:
            succ += 1
    total_f = sum(fails)
    shares = tuple(f / total_f for f in fails) if total_f else ()
    return succ / n, shares


class TestStageModel:
    def test_default_probabilities(self):
        assert DEFAULT_MODEL.p_kb == 0.90
        assert DEFAULT_MODEL.p_llm == 0.9276
        assert DEFAULT_MODEL.p_exe == 0.9461

    def test_overall_is_product(self):
        m = StageModel(0.5, 0.25, 0.8)
        assert m.expected_overall() == 0.5 * 0.25 * 0.8
        assert DEFAULT_MODEL.expected_overall() == pytest.approx(
            0.789842124, abs=1e-9
        )

    def test_shares_sum_to_one(self):
        for m in (DEFAULT_MODEL, StageModel(0.3, 0.9, 0.5)):
            assert sum(m.expected_failure_shares()) == pytest.approx(1.0)

    def test_shares_match_sequential_simulation(self):
        rate, shares = chain_rates(DEFAULT_MODEL, 200_000, seed=42)
        assert DEFAULT_MODEL.expected_overall() == pytest.approx(rate, abs=0.005)
        for want, got in zip(DEFAULT_MODEL.expected_failure_shares(), shares):
            assert want == pytest.approx(got, abs=0.01)

    def test_degenerate_models(self):
        perfect = StageModel(1.0, 1.0, 1.0)
        assert perfect.expected_overall() == 1.0
        assert perfect.expected_failure_shares() == (0.0, 0.0, 0.0)
        broken = StageModel(0.0, 0.5, 0.5)
        assert broken.expected_overall() == 0.0
        assert broken.expected_failure_shares() == (1.0, 0.0, 0.0)

    def test_rejects_non_probabilities(self):
        with pytest.raises(ValueError):
            StageModel(p_kb=1.5)
        with pytest.raises(ValueError):
            StageModel(p_exe=-0.1)


class TestSeedDerivation:
    def test_deterministic_and_label_sensitive(self):
        a = derive_seed(7, "campaign")
        assert a == derive_seed(7, "campaign")
        assert a != derive_seed(7, "pool")
        assert a != derive_seed(8, "campaign")

    def test_fits_in_64_bits(self):
        for label in ("a", "b", "c", "longer-label"):
            s = derive_seed(123, label)
            assert 0 <= s < 2**64


@pytest.fixture(scope="module")
def scene():
    return build_scene(20, seed=3)


class TestSceneGeometry:
    def test_grid_shape_and_resolution(self, scene):
        assert scene.grid.data.shape == (64, 64, 64)
        assert scene.grid.resolution == 0.01

    def test_scramble_state(self, scene):
        assert len(scene.scramble.moves) == 20
        assert scene.cube_state != SOLVED
        assert build_scene(0, seed=1).cube_state == SOLVED

    def test_same_seed_same_scene(self):
        a = build_scene(15, seed=8)
        b = build_scene(15, seed=8)
        assert a.cube_state == b.cube_state
        assert np.array_equal(a.cube_occupancy, b.cube_occupancy)

    def test_cube_rests_on_table(self, scene):
        # 5.6 cm edge at 1 cm resolution covers a 6-voxel span.
        assert int(scene.cube_occupancy.sum()) == 6**3
        xs, ys, zs = np.where(scene.cube_occupancy)
        assert zs.min() == 8  # first free layer above the 8 cm table
        assert zs.max() == 13
        assert scene.table_occupancy[:, :, :8].all()
        assert not scene.table_occupancy[:, :, 8:].any()
        # centred in the plane
        assert xs.min() + xs.max() == 63 and ys.min() + ys.max() == 63

    def test_maps_are_normalized_and_aligned(self, scene):
        for layer in (
            scene.maps.interact,
            scene.maps.ignore,
            scene.maps.rotation,
            scene.maps.gripper,
        ):
            assert layer.data.shape == scene.grid.data.shape
            assert layer.resolution == scene.grid.resolution
            assert layer.data.min() >= 0.0 and layer.data.max() <= 1.0

    def test_interact_peaks_inside_cube(self, scene):
        peak = np.unravel_index(
            scene.maps.interact.data.argmax(), scene.maps.interact.data.shape
        )
        assert scene.cube_occupancy[peak]
        assert scene.maps.interact.data[peak] == 1.0

    def test_key_points_outside_obstacles(self, scene):
        obs = scene.hard_obstacles()
        assert not obs[scene.home_index]
        assert not obs[scene.grasp_index]
        assert scene.grasp_index == (32, 32, 15)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SceneSpec(cube_edge=0.6)
        with pytest.raises(ValueError):
            SceneSpec(resolution=0.0)


class TestObserveCube:
    def test_noiseless_read_round_trips(self, scene):
        descriptor = observe_cube(scene)
        assert len(descriptor) == 54
        assert facelets_to_cubies(parse_facelets(descriptor)) == scene.cube_state

    def test_full_noise_corrupts_every_movable_sticker(self):
        solved = build_scene(0, seed=0)
        truth = observe_cube(solved)
        noisy = observe_cube(solved, sticker_noise=1.0, seed=4)
        diffs = [i for i in range(54) if noisy[i] != truth[i]]
        assert len(diffs) == 48

    def test_centers_never_corrupted(self, scene):
        noisy = observe_cube(scene, sticker_noise=1.0, seed=9)
        for face_idx, pos in enumerate((4, 13, 22, 31, 40, 49)):
            assert noisy[pos] == "URFDLB"[face_idx]

    def test_corruption_fraction_matches_noise(self, scene):
        truth = observe_cube(scene)
        flipped = total = 0
        for s in range(300):
            noisy = observe_cube(scene, sticker_noise=0.05, seed=s)
            flipped += sum(a != b for a, b in zip(noisy, truth))
            total += 48
        assert flipped / total == pytest.approx(0.05, abs=0.01)

    def test_deterministic_per_seed(self, scene):
        a = observe_cube(scene, sticker_noise=0.3, seed=11)
        assert a == observe_cube(scene, sticker_noise=0.3, seed=11)
        assert a != observe_cube(scene, sticker_noise=0.3, seed=12)

    def test_noise_validation(self, scene):
        with pytest.raises(ValueError):
            observe_cube(scene, sticker_noise=1.5)


class TestSubtaskMaps:
    def test_targets_hug_the_face_centre(self, scene):
        maps = build_subtask_maps(scene, Move(Face.R, 1))
        xs, ys, zs = np.where(maps.interact.data > 0.5)
        assert len(xs) > 0
        points = scene.grid.index_to_world(np.stack([xs, ys, zs], axis=1))
        centre = scene.face_centre(Face.R)
        assert np.linalg.norm(points - centre, axis=1).max() <= 1.5 * 0.056
        assert (points[:, 0] > scene.cube_centre()[0]).all()  # +x side only

    def test_depends_only_on_face(self, scene):
        single = build_subtask_maps(scene, Move(Face.U, 1))
        double = build_subtask_maps(scene, Move(Face.U, 2))
        for a, b in (
            (single.interact, double.interact),
            (single.ignore, double.ignore),
            (single.rotation, double.rotation),
            (single.gripper, double.gripper),
        ):
            assert np.array_equal(a.data, b.data)

    def test_rotation_field_peaks_on_tool_axis(self, scene):
        maps = build_subtask_maps(scene, Move(Face.F, 1))
        centre_idx = scene.grid.world_to_index(scene.face_centre(Face.F))
        assert maps.rotation.data[centre_idx] > 0.85
        assert maps.rotation.data[2, 2, 60] == 0.0

    def test_layers_normalized(self, scene):
        maps = build_subtask_maps(scene, Move(Face.B, 3))
        for layer in (maps.interact, maps.ignore, maps.rotation, maps.gripper):
            assert layer.data.min() >= 0.0 and layer.data.max() <= 1.0

    def test_flush_cube_face_is_unreachable(self):
        flush = build_scene(0, 0, SceneSpec(cube_centre=(0.612, 0.32, 0.108)))
        with pytest.raises(LayerUnreachable):
            build_subtask_maps(flush, Move(Face.R, 1))
        # the opposite face still works
        build_subtask_maps(flush, Move(Face.L, 1))


class TestTrajectories:
    def test_approach_reaches_grasp_without_collisions(self, scene):
        _, pts = approach_trajectory(scene)
        idx = [scene.grid.world_to_index(p) for p in pts]
        assert idx[0] == scene.home_index
        assert idx[-1] == scene.grasp_index
        obs = scene.hard_obstacles()
        assert not any(obs[i] for i in idx)
        assert len(set(idx)) == len(idx)
        steps = np.abs(np.diff(np.array(idx), axis=0))
        assert steps.max() <= 1 and (steps.sum(axis=1) > 0).all()

    def test_approach_constraints_hold(self, scene):
        report = approach_report(scene, v_max=0.04)
        assert report.ok
        assert report.max_velocity <= 0.04 + 1e-9

    def test_every_face_has_a_collision_free_leg(self, scene):
        obs = scene.hard_obstacles()
        for face in Face:
            _, pts = subtask_trajectory(scene, Move(face, 1))
            idx = [scene.grid.world_to_index(p) for p in pts]
            assert idx[0] == scene.home_index
            assert not any(obs[i] for i in idx)

    def test_blocked_down_face_regrasps_from_above(self, scene):
        _, pts = subtask_trajectory(scene, Move(Face.D, 1))
        assert scene.grid.world_to_index(pts[-1]) == scene.grasp_index

    def test_deterministic(self, scene):
        t1, p1 = approach_trajectory(scene)
        t2, p2 = approach_trajectory(scene)
        assert np.array_equal(t1, t2) and np.array_equal(p1, p2)


class TestTrialRecord:
    def test_failure_category_is_first_failed_stage(self):
        assert TrialRecord(5, None, None, None).failure_category == "kb"
        assert TrialRecord(5, 18, False, None).failure_category == "llm"
        assert TrialRecord(5, 18, True, False).failure_category == "exe"
        assert TrialRecord(5, 18, True, True).failure_category is None
        assert TrialRecord(5, 18, True, True).ok

    def test_run_trial_success_has_verified_length(self, tables):
        rec = run_trial(10, model=StageModel(1, 1, 1), seed=2, tables=tables)
        assert rec.ok
        assert rec.kb_outcome is not None
        assert 0 < rec.kb_outcome <= TWO_PHASE_BUDGET.max_total_length

    def test_run_trial_stage_faults(self, tables):
        dead_kb = run_trial(6, model=StageModel(0, 1, 1), seed=3, tables=tables)
        assert dead_kb.failure_category == "kb"
        assert dead_kb.llm_outcome is None and dead_kb.exe_outcome is None
        dead_llm = run_trial(6, model=StageModel(1, 0, 1), seed=3, tables=tables)
        assert dead_llm.failure_category == "llm"
        assert dead_llm.kb_outcome is not None and dead_llm.exe_outcome is None
        dead_exe = run_trial(6, model=StageModel(1, 1, 0), seed=3, tables=tables)
        assert dead_exe.failure_category == "exe"

    def test_run_trial_deterministic(self, tables):
        a = run_trial(8, seed=5, tables=tables)
        assert a == run_trial(8, seed=5, tables=tables)

    def test_heavy_noise_fails_the_solve_stage(self, tables):
        for seed in range(3):
            rec = run_trial(
                8,
                model=StageModel(1, 1, 1),
                seed=seed,
                sticker_noise=0.8,
                tables=tables,
            )
            assert rec.failure_category == "kb"


class TestPipelineStats:
    def _records(self):
        return [
            TrialRecord(5, 8, True, True),
            TrialRecord(5, 9, True, False),
            TrialRecord(5, None, None, None),
            TrialRecord(10, 12, False, None),
            TrialRecord(10, 12, True, True),
            TrialRecord(10, 11, True, True),
        ]

    def test_counts_and_partition(self):
        stats = PipelineStats.from_records(self._records())
        assert stats.trials == 6
        assert stats.successes == 3
        counts = stats.failure_counts()
        assert sum(counts.values()) + stats.successes == stats.trials
        assert counts == {"kb": 1, "llm": 1, "exe": 1}
        assert sum(stats.failure_shares) == pytest.approx(1.0)

    def test_overall_equals_product_of_stage_rates(self):
        stats = PipelineStats.from_records(self._records())
        rates = stats.stage_rates()
        product = rates["kb"] * rates["llm"] * rates["exe"]
        assert math.isclose(product, stats.overall_rate, rel_tol=1e-12)

    def test_order_independent(self):
        records = self._records()
        shuffled = list(records)
        random.Random(3).shuffle(shuffled)
        a = PipelineStats.from_records(records)
        b = PipelineStats.from_records(shuffled)
        assert a.to_record() == b.to_record()

    def test_histograms_per_depth(self):
        stats = PipelineStats.from_records(self._records())
        assert stats.length_histogram(5) == {8: 1, 9: 1}
        assert stats.length_histogram(10) == {12: 2, 11: 1}

    def test_no_failures_means_empty_shares(self):
        stats = PipelineStats.from_records([TrialRecord(5, 8, True, True)])
        assert stats.failure_shares == ()

    def test_csv_layout(self):
        out = io.StringIO()
        PipelineStats.from_records(self._records()).write_csv(out)
        lines = out.getvalue().splitlines()
        assert lines[0] == "depth,trials,rate_kb,rate_llm,rate_exe,overall,histogram"
        assert lines[1].startswith("5,3,")
        assert lines[1].endswith("8:1 9:1")
        assert lines[-1].startswith("all,6,")


class TestCampaignConfig:
    def test_defaults_cover_the_standard_run(self):
        assert DEFAULT_CAMPAIGN.depths == (10, 20, 30, 40)
        assert DEFAULT_CAMPAIGN.trials_per_depth * len(DEFAULT_CAMPAIGN.depths) == 100_000
        assert DEFAULT_CAMPAIGN.sticker_noise == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            CampaignConfig(depths=())
        with pytest.raises(ValueError):
            CampaignConfig(trials_per_depth=0)
        with pytest.raises(ValueError):
            CampaignConfig(sticker_noise=2.0)

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "campaign.ini"
        path.write_text(
            "[campaign]\n"
            "depths = 5, 15\n"
            "trials_per_depth = 1234\n"
            "pool_size = 7\n"
            "sticker_noise = 0.25\n"
            "[stages]\n"
            "p_kb = 0.8\n"
            "p_llm = 0.7\n"
            "p_exe = 0.6\n"
            "[budget]\n"
            "max_total_length = 22\n"
            "target_length = 20\n"
            "max_phase1_candidates = 99\n"
            "time_cap_ms = 777\n"
        )
        cfg = load_campaign_config(path)
        assert cfg.depths == (5, 15)
        assert cfg.trials_per_depth == 1234
        assert cfg.pool_size == 7
        assert cfg.sticker_noise == 0.25
        assert cfg.model == StageModel(0.8, 0.7, 0.6)
        assert cfg.budget.max_total_length == 22
        assert cfg.budget.target_length == 20
        assert cfg.budget.max_phase1_candidates == 99
        assert cfg.budget.time_cap_ms == 777

    def test_partial_file_keeps_defaults(self, tmp_path):
        path = tmp_path / "partial.ini"
        path.write_text("[campaign]\ndepths = 8\n")
        cfg = load_campaign_config(path)
        assert cfg.depths == (8,)
        assert cfg.trials_per_depth == DEFAULT_CAMPAIGN.trials_per_depth
        assert cfg.model == DEFAULT_MODEL

    def test_bad_value_raises(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[campaign]\ntrials_per_depth = lots\n")
        with pytest.raises(ValueError):
            load_campaign_config(path)


@pytest.fixture(scope="module")
def small_campaign():
    return CampaignConfig(
        depths=(15,), trials_per_depth=50_000, pool_size=8, budget=TWO_PHASE_BUDGET
    )


class TestRunCampaign:
    def test_deterministic_per_seed(self, small_campaign, tables):
        cfg = CampaignConfig(
            depths=(10,), trials_per_depth=2_000, pool_size=4, budget=TWO_PHASE_BUDGET
        )
        a = run_campaign(cfg, seed=3, tables=tables)
        b = run_campaign(cfg, seed=3, tables=tables)
        assert a.to_record() == b.to_record()
        c = run_campaign(cfg, seed=4, tables=tables)
        assert c.successes != a.successes

    def test_converges_to_model(self, small_campaign, tables):
        stats = run_campaign(small_campaign, seed=21, tables=tables)
        assert stats.trials == 50_000
        assert stats.overall_rate == pytest.approx(
            DEFAULT_MODEL.expected_overall(), abs=0.01
        )
        for want, got in zip(
            DEFAULT_MODEL.expected_failure_shares(), stats.failure_shares
        ):
            assert got == pytest.approx(want, abs=0.03)

    def test_matches_sequential_oracle(self, small_campaign, tables):
        oracle_rate, _ = chain_rates(DEFAULT_MODEL, 100_000, seed=77)
        stats = run_campaign(small_campaign, seed=78, tables=tables)
        assert stats.overall_rate == pytest.approx(oracle_rate, abs=0.01)

    def test_overall_is_product_of_stage_rates(self, small_campaign, tables):
        stats = run_campaign(small_campaign, seed=5, tables=tables)
        rates = stats.stage_rates()
        product = rates["kb"] * rates["llm"] * rates["exe"]
        assert math.isclose(product, stats.overall_rate, rel_tol=1e-12)

    def test_perfect_model_all_successes(self, tables):
        cfg = CampaignConfig(
            depths=(6,),
            trials_per_depth=1_000,
            pool_size=4,
            model=StageModel(1, 1, 1),
            budget=TWO_PHASE_BUDGET,
        )
        stats = run_campaign(cfg, seed=1, tables=tables)
        assert stats.successes == 1_000
        assert stats.failure_shares == ()
        assert stats.overall_rate == 1.0

    def test_histogram_shifts_right_with_depth(self, tables):
        cfg = CampaignConfig(
            depths=(5, 20),
            trials_per_depth=2_000,
            pool_size=8,
            budget=TWO_PHASE_BUDGET,
        )
        stats = run_campaign(cfg, seed=9, tables=tables)

        def mean_length(depth):
            hist = stats.length_histogram(depth)
            return sum(k * v for k, v in hist.items()) / sum(hist.values())

        assert mean_length(5) < mean_length(20)

    def test_sticker_noise_degrades_the_solve_stage(self, tables):
        cfg = CampaignConfig(
            depths=(8,),
            trials_per_depth=3_000,
            pool_size=4,
            sticker_noise=0.02,
            model=StageModel(1, 1, 1),
            budget=TWO_PHASE_BUDGET,
        )
        stats = run_campaign(cfg, seed=13, tables=tables)
        # only ~0.98^48 of observations survive uncorrupted
        assert stats.stage_rates()["kb"] == pytest.approx(0.98**48, abs=0.05)
