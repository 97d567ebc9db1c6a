import numpy as np
import pytest

from primo.grasp import (GraspConfig, Twist, contact_twist, global_grasp_map,
                         grasp_matrix, skew)


def random_vectors(seed, n, scale=1.0):
    rng = np.random.default_rng(seed)
    return rng.normal(0, scale, (n, 3))


class TestSkew:
    def test_zero_vector(self):
        assert np.array_equal(skew([0, 0, 0]), np.zeros((3, 3)))

    def test_unit_cross_product(self):
        assert np.allclose(skew([1, 0, 0]) @ [0, 1, 0], [0, 0, 1])

    def test_matches_cross_product_oracle(self):
        rs = random_vectors(0, 200)
        us = random_vectors(1, 200)
        for r, u in zip(rs, us):
            assert np.allclose(skew(r) @ u, np.cross(r, u), atol=1e-15)

    def test_antisymmetric_exactly(self):
        for r in random_vectors(2, 50, scale=3.0):
            s = skew(r)
            assert np.array_equal(s.T, -s)


class TestGraspMatrix:
    def test_zero_offset_is_identity(self):
        assert np.array_equal(grasp_matrix([0, 0, 0]), np.eye(6))

    def test_block_layout(self):
        r = np.array([0.1, -0.2, 0.3])
        mat = grasp_matrix(r)
        assert np.array_equal(mat[:3, :3], np.eye(3))
        assert np.array_equal(mat[:3, 3:], np.zeros((3, 3)))
        assert np.array_equal(mat[3:, :3], skew(r))
        assert np.array_equal(mat[3:, 3:], np.eye(3))

    def test_unit_determinant(self):
        for r in random_vectors(3, 50, scale=2.0):
            assert np.linalg.det(grasp_matrix(r)) == pytest.approx(1.0,
                                                                   abs=1e-9)

    def test_composition_adds_skew_blocks(self):
        for r1, r2 in zip(random_vectors(4, 30), random_vectors(5, 30)):
            product = grasp_matrix(r1) @ grasp_matrix(r2)
            assert np.allclose(product[3:, :3], skew(r1) + skew(r2),
                               atol=1e-15)
            assert np.allclose(product[:3, :3], np.eye(3))


class TestContactTwist:
    def test_pure_translation_passes_through(self):
        tw = Twist([0.3, -0.1, 0.2], [0, 0, 0])
        out = contact_twist([0.1, 0.2, -0.3], tw)
        assert np.allclose(out.linear, tw.linear)
        assert np.allclose(out.angular, 0.0)

    def test_rotation_transport(self):
        tw = Twist([0, 0, 0], [0, 0, 1.0])
        out = contact_twist([0.1, 0, 0], tw)
        assert np.allclose(out.linear, [0, 0.1, 0])
        assert np.allclose(out.angular, [0, 0, 1.0])

    def test_transport_matches_cross_product_oracle(self):
        rs = random_vectors(6, 100, scale=0.5)
        vs = random_vectors(7, 100)
        ws = random_vectors(8, 100)
        for r, v, w in zip(rs, vs, ws):
            out = contact_twist(r, Twist(v, w))
            assert np.allclose(out.linear, v + np.cross(w, r), atol=1e-12)
            assert np.allclose(out.angular, w, atol=0.0)

    def test_round_trip_through_inverse(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            r = rng.normal(0, 0.5, 3)
            tw = Twist(rng.normal(0, 1, 3), rng.normal(0, 1, 3))
            out = contact_twist(r, tw)
            back = np.linalg.inv(grasp_matrix(r).T) @ out.as_vector()
            assert np.allclose(back, tw.as_vector(), atol=1e-12)

    def test_linearity(self):
        rng = np.random.default_rng(10)
        r = rng.normal(0, 0.5, 3)
        t1 = Twist(rng.normal(0, 1, 3), rng.normal(0, 1, 3))
        t2 = Twist(rng.normal(0, 1, 3), rng.normal(0, 1, 3))
        summed = Twist(t1.linear + 2.0 * t2.linear,
                       t1.angular + 2.0 * t2.angular)
        lhs = contact_twist(r, summed).as_vector()
        rhs = (contact_twist(r, t1).as_vector()
               + 2.0 * contact_twist(r, t2).as_vector())
        assert np.allclose(lhs, rhs, atol=1e-12)


class TestGlobalGraspMap:
    def test_zero_offsets_stack_identities(self):
        config = GraspConfig([0, 0, 0], [0, 0, 0])
        assert np.array_equal(global_grasp_map(config),
                              np.hstack([np.eye(6), np.eye(6)]))

    def test_transpose_stacks_contact_twists(self):
        rng = np.random.default_rng(11)
        config = GraspConfig(rng.normal(0, 0.3, 3), rng.normal(0, 0.3, 3))
        tw = Twist(rng.normal(0, 1, 3), rng.normal(0, 1, 3))
        stacked = global_grasp_map(config).T @ tw.as_vector()
        assert np.allclose(stacked[:6],
                           contact_twist(config.r_left, tw).as_vector())
        assert np.allclose(stacked[6:],
                           contact_twist(config.r_right, tw).as_vector())

    def test_rigid_relative_velocity(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            config = GraspConfig(rng.normal(0, 0.3, 3),
                                 rng.normal(0, 0.3, 3))
            w = rng.normal(0, 2, 3)
            tw = Twist(rng.normal(0, 1, 3), w)
            left = contact_twist(config.r_left, tw)
            right = contact_twist(config.r_right, tw)
            expected = np.cross(w, config.r_right - config.r_left)
            assert np.allclose(right.linear - left.linear, expected,
                               atol=1e-12)

    def test_symmetric_config_flag(self):
        GraspConfig([0.1, 0, 0], [-0.1, 0, 0], symmetric=True)
        with pytest.raises(ValueError):
            GraspConfig([0.1, 0, 0], [-0.2, 0, 0], symmetric=True)


def test_twist_vector_round_trip():
    tw = Twist([1, 2, 3], [4, 5, 6])
    assert np.array_equal(Twist.from_vector(tw.as_vector()).as_vector(),
                          tw.as_vector())


def test_twist_rejects_wrong_shape():
    with pytest.raises(ValueError):
        Twist([1, 2], [0, 0, 0])
    with pytest.raises(ValueError):
        Twist.from_vector(np.zeros(5))
