import numpy as np
import pytest

from primo.trajectory import StateTriplet, Trajectory


def make_traj(n=50, d=2, dt=0.01, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, d)).cumsum(axis=0) * 0.01
    return Trajectory(dt, x).with_derivatives()


def test_requires_two_samples():
    with pytest.raises(ValueError):
        Trajectory(0.01, np.zeros((1, 2)))


def test_dims_bounds():
    with pytest.raises(ValueError):
        Trajectory(0.01, np.zeros((5, 4)))
    Trajectory(0.01, np.zeros((5, 3)))


def test_rejects_nonfinite():
    x = np.zeros((5, 2))
    x[2, 1] = np.nan
    with pytest.raises(ValueError):
        Trajectory(0.01, x)


def test_rejects_bad_dt():
    with pytest.raises(ValueError):
        Trajectory(0.0, np.zeros((5, 2)))
    with pytest.raises(ValueError):
        Trajectory(-1.0, np.zeros((5, 2)))


def test_one_dof_promoted_to_column():
    traj = Trajectory(0.1, np.linspace(0, 1, 11))
    assert traj.dims == 1
    assert traj.x.shape == (11, 1)
    assert traj.duration == pytest.approx(1.0)


def test_sample_returns_triplet():
    traj = make_traj()
    trip = traj.sample(3)
    assert isinstance(trip, StateTriplet)
    assert trip.x.shape == (2,)


def test_with_derivatives_matches_analytic():
    t = np.arange(0, 1.0 + 1e-12, 0.001)
    x = np.column_stack([np.sin(2 * np.pi * t), np.cos(2 * np.pi * t)])
    traj = Trajectory(0.001, x).with_derivatives()
    v_true = np.column_stack([2 * np.pi * np.cos(2 * np.pi * t),
                              -2 * np.pi * np.sin(2 * np.pi * t)])
    interior = slice(2, -2)
    assert np.allclose(traj.v[interior], v_true[interior], atol=1e-3)


def test_derivatives_preserved_when_present():
    traj = make_traj()
    again = traj.with_derivatives()
    assert again is traj


def test_csv_round_trip(tmp_path):
    traj = make_traj(n=30, d=3)
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    back = Trajectory.from_csv(path)
    assert back.dims == 3
    assert back.dt == pytest.approx(traj.dt)
    assert np.allclose(back.x, traj.x)
    assert np.allclose(back.v, traj.v)
    assert np.allclose(back.a, traj.a)


def test_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,px\n0,1\n0.1,2\n")
    with pytest.raises(ValueError):
        Trajectory.from_csv(path)


def test_csv_rejects_nonuniform(tmp_path):
    path = tmp_path / "jitter.csv"
    path.write_text("t,dof0_x,dof0_v,dof0_a\n0,0,0,0\n0.1,1,0,0\n0.35,2,0,0\n")
    with pytest.raises(ValueError):
        Trajectory.from_csv(path)
