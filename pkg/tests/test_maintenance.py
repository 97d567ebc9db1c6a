import numpy as np
import pytest

from primo.maintenance import (DistanceCouplingSkill, ForceCouplingSkill,
                               distance_correction, force_correction,
                               load_skill, save_skill, skill_from_json_dict)


class TestForceCorrection:
    def test_satisfied_setpoint_is_zero(self):
        skill = ForceCouplingSkill(gain=0.01, f_desired=[5, 0, 0])
        assert np.array_equal(force_correction(skill, [5, 0, 0]), [0, 0, 0])

    def test_scalar_arithmetic(self):
        skill = ForceCouplingSkill(gain=0.01, f_desired=[5, 0, 0])
        out = force_correction(skill, [3, 0, 0])
        assert np.allclose(out, [0.02, 0, 0])

    def test_linearity(self):
        skill = ForceCouplingSkill(gain=[0.01, 0.02, 0.03],
                                   f_desired=[1, 2, 3])
        base = force_correction(skill, [0, 0, 0])
        doubled_error = force_correction(skill, -np.asarray([1, 2, 3]))
        assert np.allclose(doubled_error, 2 * base, atol=1e-15)

    def test_superposition(self):
        rng = np.random.default_rng(0)
        skill = ForceCouplingSkill(gain=rng.uniform(0, 1, 3),
                                   f_desired=[0, 0, 0])
        f1, f2 = rng.normal(0, 5, (2, 3))
        lhs = force_correction(skill, f1 + f2)
        rhs = (force_correction(skill, f1) + force_correction(skill, f2))
        assert np.allclose(lhs, rhs, atol=1e-12)


class TestDistanceCorrection:
    def test_satisfied_setpoint_is_zero(self):
        skill = DistanceCouplingSkill(gain=2.0, d_desired_left=0.15,
                                      d_desired_right=0.15)
        out = distance_correction(skill, "left", 0.15, [0, 1, 0])
        assert np.array_equal(out, [0, 0, 0])

    def test_too_close_pushes_outward(self):
        skill = DistanceCouplingSkill(gain=2.0, d_desired_left=0.15,
                                      d_desired_right=0.15)
        out = distance_correction(skill, "right", 0.14, [0, 1, 0])
        assert np.allclose(out, [0, 0.02, 0])

    def test_per_side_setpoints(self):
        skill = DistanceCouplingSkill(gain=1.0, d_desired_left=0.1,
                                      d_desired_right=0.2)
        axis = [1, 0, 0]
        left = distance_correction(skill, "left", 0.15, axis)
        right = distance_correction(skill, "right", 0.15, axis)
        assert left[0] == pytest.approx(-0.05)
        assert right[0] == pytest.approx(0.05)

    def test_symmetric_flag_enforced(self):
        with pytest.raises(ValueError):
            DistanceCouplingSkill(gain=1.0, d_desired_left=0.1,
                                  d_desired_right=0.2, symmetric=True)

    def test_linearity_in_error(self):
        skill = DistanceCouplingSkill(gain=3.0, d_desired_left=0.1,
                                      d_desired_right=0.1)
        axis = np.array([0.6, 0.8, 0.0])
        small = distance_correction(skill, "left", 0.11, axis)
        big = distance_correction(skill, "left", 0.12, axis)
        assert np.allclose(big, 2 * small, atol=1e-15)

    def test_closed_loop_first_order_response(self):
        # v = K (D_d - D_r) integrated on the distance itself is a
        # first-order lag with time constant 1/K; after 3/K seconds the
        # remaining error is exp(-3) < 5 percent, so well within 1 percent
        # of the setpoint for a 5 mm disturbance on a 0.15 m distance
        gain = 2.0
        skill = DistanceCouplingSkill(gain=gain, d_desired_left=0.15,
                                      d_desired_right=0.15)
        dt = 1e-3
        distance = 0.145
        axis = np.array([1.0, 0.0, 0.0])
        steps = int(3.0 / gain / dt)
        for _ in range(steps):
            v = distance_correction(skill, "left", distance, axis)
            distance += dt * v[0]
        assert abs(distance - 0.15) < 0.01 * 0.15
        # discrete first-order decay oracle
        expected = 0.15 - 0.005 * (1 - gain * dt) ** steps
        assert distance == pytest.approx(expected, abs=1e-9)


class TestSkillJson:
    def test_distance_round_trip(self, tmp_path):
        skill = DistanceCouplingSkill(gain=[1, 2, 3], d_desired_left=0.1,
                                      d_desired_right=0.12)
        path = tmp_path / "skill.json"
        save_skill(skill, path)
        back = load_skill(path)
        assert isinstance(back, DistanceCouplingSkill)
        assert np.array_equal(back.gain, skill.gain)
        assert back.d_desired_left == 0.1
        assert back.d_desired_right == 0.12

    def test_force_round_trip(self, tmp_path):
        skill = ForceCouplingSkill(gain=0.05, f_desired=[4, 0, 0])
        path = tmp_path / "skill.json"
        save_skill(skill, path)
        back = load_skill(path)
        assert isinstance(back, ForceCouplingSkill)
        assert np.array_equal(back.f_desired, [4, 0, 0])

    def test_scalar_distance_setpoint_expands(self):
        skill = skill_from_json_dict(
            {"type": "distance", "gain": [1.0], "setpoint": [0.2]})
        assert skill.d_desired_left == 0.2
        assert skill.d_desired_right == 0.2

    def test_unknown_type_rejected(self):
        with pytest.raises(ValueError):
            skill_from_json_dict({"type": "magnetic", "gain": [1],
                                  "setpoint": [0]})

    def test_negative_gain_rejected(self):
        with pytest.raises(ValueError):
            ForceCouplingSkill(gain=-0.1, f_desired=[0, 0, 0])
