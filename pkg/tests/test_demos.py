import numpy as np
import pytest

from primo import avoidance as oa
from primo import demos
from primo.errors import DegenerateDataError, InsufficientDataError
from primo.trajectory import Trajectory


class TestMinJerk:
    def test_midpoint_symmetry_and_rest_endpoints(self):
        demo = demos.generate_synthetic_demo("min-jerk", [0.0], [1.0], 1.0,
                                             dt=0.01)
        n = demo.n_samples
        assert demo.positions[(n - 1) // 2, 0] == pytest.approx(0.5)
        traj = Trajectory(0.01, demo.positions).with_derivatives()
        assert abs(traj.v[0, 0]) < 1e-2
        assert abs(traj.v[-1, 0]) < 1e-2

    def test_analytic_derivatives_consistent(self):
        t = np.arange(0, 2.0 + 1e-12, 0.001)
        x, v, a = demos.min_jerk([0.0], [1.0], 2.0, t)
        assert np.allclose(np.gradient(x[:, 0], 0.001)[2:-2],
                           v[2:-2, 0], atol=1e-4)
        assert np.allclose(np.gradient(v[:, 0], 0.001)[2:-2],
                           a[2:-2, 0], atol=1e-3)


class TestGenerator:
    def test_same_seed_bit_identical(self):
        kwargs = dict(profile="min-jerk", start=[0, 0], goal=[0.4, 0.2],
                      duration=1.0, noise_sigma=0.001, seed=7,
                      timestamp_jitter=0.2)
        a = demos.generate_synthetic_demo(**kwargs)
        b = demos.generate_synthetic_demo(**kwargs)
        assert np.array_equal(a.timestamps, b.timestamps)
        assert np.array_equal(a.positions, b.positions)

    def test_different_seeds_differ(self):
        a = demos.generate_synthetic_demo("min-jerk", [0], [1], 1.0,
                                          noise_sigma=0.001, seed=1)
        b = demos.generate_synthetic_demo("min-jerk", [0], [1], 1.0,
                                          noise_sigma=0.001, seed=2)
        assert not np.array_equal(a.positions, b.positions)

    def test_noise_sigma_statistics(self):
        sigma = 0.001
        clean = demos.generate_synthetic_demo("min-jerk", [0], [1], 100.0,
                                              dt=0.01, seed=3)
        noisy = demos.generate_synthetic_demo("min-jerk", [0], [1], 100.0,
                                              dt=0.01, noise_sigma=sigma,
                                              seed=3)
        residual = noisy.positions - clean.positions
        assert residual.shape[0] >= 10**4
        assert np.std(residual) == pytest.approx(sigma, rel=0.1)

    def test_dmp_profile_reaches_goal(self):
        demo = demos.generate_synthetic_demo("dmp-rollout", [0, 0],
                                             [0.4, -0.2], 1.0, dt=0.005)
        assert np.allclose(demo.positions[-1], [0.4, -0.2], atol=1e-3)

    def test_avoidance_injection_bends_path(self):
        obstacle = oa.Obstacle([0.25, 0.01])
        params = oa.AvoidanceParams(gamma=1000.0, beta_oa=20.0 / np.pi)
        bent = demos.generate_synthetic_demo(
            "min-jerk", [0, 0], [0.5, 0.0], 1.0, dt=0.005,
            avoidance_setup=(params, obstacle))
        straight = demos.generate_synthetic_demo(
            "min-jerk", [0, 0], [0.5, 0.0], 1.0, dt=0.005)
        lateral = np.abs(bent.positions[:, 1]
                         - straight.positions[:, 1]).max()
        assert lateral > 0.01

    def test_unknown_profile_rejected(self):
        with pytest.raises(ValueError):
            demos.generate_synthetic_demo("spline", [0], [1], 1.0)

    def test_csv_round_trip(self, tmp_path):
        demo = demos.generate_synthetic_demo("min-jerk", [0, 0], [1, 1],
                                             1.0, noise_sigma=0.002, seed=5)
        path = tmp_path / "demo.csv"
        demo.to_csv(path)
        back = demos.RawDemo.from_csv(path)
        assert np.allclose(back.timestamps, demo.timestamps)
        assert np.allclose(back.positions, demo.positions)


class TestPreprocess:
    def test_clean_input_within_smoothing_bias_bound(self):
        dt = 0.01
        duration = 1.0
        t = np.arange(0, duration + 1e-12, dt)
        x, v, a = demos.min_jerk([0.0], [1.0], duration, t)
        raw = demos.RawDemo(t, x)
        cfg = demos.PreprocessConfig(smooth_window=9)
        out = demos.preprocess(raw, cfg)
        # Taylor bound for two passes of a window-w moving average
        bound = cfg.smooth_window**2 * np.abs(a).max() * dt**2 / 8
        assert np.abs(out.x[:, 0] - x[: out.n_samples, 0]).max() <= bound

    def test_spike_removed(self):
        rng = np.random.default_rng(0)
        sigma = 0.001
        t = np.arange(0, 1.0 + 1e-12, 0.01)
        x, _, _ = demos.min_jerk([0.0], [1.0], 1.0, t)
        noisy = x + rng.normal(0, sigma, x.shape)
        spike_at = 50
        spiked = noisy.copy()
        spiked[spike_at, 0] += 10 * sigma
        out_spiked = demos.preprocess(demos.RawDemo(t, spiked))
        assert abs(out_spiked.x[spike_at, 0] - x[spike_at, 0]) < 2 * sigma

    def test_constant_trajectory_unchanged(self):
        t = np.arange(0, 1.0, 0.01)
        x = np.full((t.size, 2), 0.37)
        out = demos.preprocess(demos.RawDemo(t, x))
        assert np.allclose(out.x, 0.37, atol=1e-15)
        assert np.allclose(out.v, 0.0, atol=1e-12)
        assert np.allclose(out.a, 0.0, atol=1e-10)

    def test_translation_equivariance(self):
        rng = np.random.default_rng(1)
        t = np.sort(rng.uniform(0, 1, 80))
        t[0] = 0.0
        x = rng.normal(0, 0.1, (80, 2)).cumsum(axis=0)
        raw = demos.RawDemo(t, x)
        shifted = demos.RawDemo(t, x + np.array([2.5, -1.0]))
        out = demos.preprocess(raw)
        out_shifted = demos.preprocess(shifted)
        assert np.allclose(out_shifted.x, out.x + np.array([2.5, -1.0]),
                           atol=1e-12)
        assert np.allclose(out_shifted.v, out.v, atol=1e-12)

    def test_resamples_jittered_timestamps(self):
        demo = demos.generate_synthetic_demo("min-jerk", [0], [1], 1.0,
                                             dt=0.01, seed=2,
                                             timestamp_jitter=0.3)
        out = demos.preprocess(demo,
                               demos.PreprocessConfig(resample_dt=0.01))
        assert out.dt == pytest.approx(0.01)
        assert np.all(np.isfinite(out.x))

    def test_integration_recovers_positions(self):
        demo = demos.generate_synthetic_demo("min-jerk", [0, 0], [1, 0.5],
                                             2.0, dt=0.01, noise_sigma=1e-4,
                                             seed=3)
        out = demos.preprocess(demo)
        dt = out.dt
        rebuilt = out.x[0] + np.vstack([
            np.zeros(out.dims),
            np.cumsum((out.v[1:] + out.v[:-1]) / 2 * dt, axis=0),
        ])
        span = out.x.max() - out.x.min()
        assert np.abs(rebuilt - out.x).max() < 1e-3 * span

    def test_too_short_rejected(self):
        t = np.arange(5) * 0.01
        with pytest.raises(InsufficientDataError):
            demos.preprocess(demos.RawDemo(t, np.zeros((5, 1))))

    def test_config_from_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{"resample_dt": 0.02, "smooth_window": 5}\n')
        cfg = demos.PreprocessConfig.from_file(path)
        assert cfg.resample_dt == 0.02
        assert cfg.smooth_window == 5
        assert cfg.hampel_window == 7

    def test_config_from_toml(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text("resample_dt = 0.02\nhampel_nsigma = 4.0\n")
        cfg = demos.PreprocessConfig.from_file(path)
        assert cfg.resample_dt == 0.02
        assert cfg.hampel_nsigma == 4.0

    def test_even_window_rejected(self):
        with pytest.raises(ValueError):
            demos.PreprocessConfig(smooth_window=8)


class TestPca:
    def test_planar_input_preserves_distances(self):
        rng = np.random.default_rng(4)
        xy = rng.normal(0, 1, (100, 2))
        x3 = np.column_stack([xy, np.full(100, 0.7)])
        traj = Trajectory(0.01, x3)
        proj = demos.pca_project(traj)
        orig = np.linalg.norm(x3[:, None] - x3[None, :], axis=-1)
        new = np.linalg.norm(proj.projected.x[:, None]
                             - proj.projected.x[None, :], axis=-1)
        assert np.abs(orig - new).max() < 1e-10

    def test_anisotropic_cloud_axes_recovered(self):
        rng = np.random.default_rng(5)
        x = rng.normal(0, 1, (2000, 3)) * np.array([3.0, 1.0, 0.1])
        proj = demos.pca_project(Trajectory(0.01, x))
        first, second = proj.components
        def angle_to(vec, axis):
            cos = abs(np.dot(vec, axis)) / np.linalg.norm(vec)
            return np.degrees(np.arccos(min(cos, 1.0)))
        assert angle_to(first, np.array([1.0, 0, 0])) < 2.0
        assert angle_to(second, np.array([0, 1.0, 0])) < 2.0
        assert proj.explained_variance[0] >= proj.explained_variance[1]

    def test_duplicated_points_identical_projection(self):
        rng = np.random.default_rng(6)
        x = rng.normal(0, 1, (50, 3))
        doubled = np.repeat(x, 2, axis=0)
        p1 = demos.pca_project(Trajectory(0.01, x))
        p2 = demos.pca_project(Trajectory(0.01, doubled))
        assert np.allclose(np.abs(p1.components), np.abs(p2.components),
                           atol=1e-10)
        assert np.allclose(p2.projected.x[::2], p2.projected.x[1::2])

    def test_projection_round_trip_idempotent(self):
        rng = np.random.default_rng(7)
        x = rng.normal(0, 1, (200, 3)) * np.array([2.0, 1.0, 0.5])
        proj = demos.pca_project(Trajectory(0.01, x))
        again = proj.transform(proj.inverse_transform(proj.projected.x))
        assert np.allclose(again, proj.projected.x, atol=1e-12)

    def test_rows_orthonormal(self):
        rng = np.random.default_rng(8)
        x = rng.normal(0, 1, (300, 3))
        proj = demos.pca_project(Trajectory(0.01, x))
        assert np.allclose(proj.components @ proj.components.T, np.eye(2),
                           atol=1e-10)

    def test_top_two_variance_preserved(self):
        rng = np.random.default_rng(9)
        x = rng.normal(0, 1, (500, 3)) * np.array([2.0, 1.0, 0.3])
        traj = Trajectory(0.01, x)
        proj = demos.pca_project(traj)
        centered = x - x.mean(axis=0)
        cov = centered.T @ centered / (x.shape[0] - 1)
        eigvals = np.sort(np.linalg.eigvalsh(cov))[::-1]
        projected_var = proj.projected.x.var(axis=0, ddof=1).sum()
        assert projected_var == pytest.approx(eigvals[:2].sum(), rel=1e-9)

    def test_velocities_rotated_alongside(self):
        t = np.arange(0, 1.0, 0.01)
        x = np.column_stack([np.sin(t * 3), np.cos(t * 3), t])
        traj = Trajectory(0.01, x).with_derivatives()
        proj = demos.pca_project(traj)
        assert proj.projected.v is not None
        assert np.allclose(proj.projected.v,
                           traj.v @ proj.components.T, atol=1e-12)

    def test_zero_variance_rejected(self):
        x = np.full((50, 3), 1.5)
        with pytest.raises(DegenerateDataError):
            demos.pca_project(Trajectory(0.01, x))

    def test_one_dof_rejected(self):
        with pytest.raises(ValueError):
            demos.pca_project(Trajectory(0.01, np.zeros((30, 1))))
