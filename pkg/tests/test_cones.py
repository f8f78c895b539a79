import numpy as np
import pytest

from conesplit.cones import (
    ConeSpec,
    PackedSymmetric,
    membership_margin_dual,
    membership_margin_primal,
    pack_symmetric,
    project_dual_cone,
    project_embedding_cone,
    project_primal_cone,
    symmetric_eig,
    total_dim,
    unpack_symmetric,
)

from _oracles import soc_projection_oracle

MIXED_SPEC = ConeSpec(zero_dim=2, nonneg_dim=3, soc_dims=(3, 4), psd_sides=(2, 3))


def random_point(rng, spec, scale=1.0):
    return scale * rng.standard_normal(spec.total_dim)


class TestDims:
    def test_nonneg_only(self):
        assert total_dim(ConeSpec(nonneg_dim=3)) == 3

    def test_mixed(self):
        spec = ConeSpec(zero_dim=2, soc_dims=(3,), psd_sides=(2,))
        assert total_dim(spec) == 2 + 3 + 3

    def test_empty(self):
        assert total_dim(ConeSpec()) == 0

    def test_invalid_dims_raise(self):
        with pytest.raises(ValueError):
            ConeSpec(zero_dim=-1)
        with pytest.raises(ValueError):
            ConeSpec(soc_dims=(0,))
        with pytest.raises(ValueError):
            ConeSpec(psd_sides=(0,))


class TestPackedSymmetric:
    def test_round_trip(self):
        rng = np.random.default_rng(0)
        for side in (1, 2, 3, 5, 8):
            M = rng.standard_normal((side, side))
            M = 0.5 * (M + M.T)
            back = unpack_symmetric(pack_symmetric(M), side)
            np.testing.assert_allclose(back, M, rtol=0, atol=np.finfo(float).eps * np.abs(M).max())

    def test_inner_product_matches_trace(self):
        rng = np.random.default_rng(1)
        for side in (2, 4, 6):
            A = rng.standard_normal((side, side))
            B = rng.standard_normal((side, side))
            A = 0.5 * (A + A.T)
            B = 0.5 * (B + B.T)
            a, b = pack_symmetric(A), pack_symmetric(B)
            trace = np.trace(A @ B)
            assert abs(a @ b - trace) <= 1e-12 * max(1.0, abs(trace))

    def test_dataclass_round_trip(self):
        M = np.array([[2.0, -1.0], [-1.0, 3.0]])
        packed = PackedSymmetric.from_matrix(M)
        np.testing.assert_allclose(packed.to_matrix(), M)

    def test_bad_length_raises(self):
        with pytest.raises(ValueError):
            PackedSymmetric(side=2, data=np.zeros(4))


class TestPrimalProjection:
    def test_nonneg_clamp(self):
        spec = ConeSpec(nonneg_dim=2)
        np.testing.assert_allclose(project_primal_cone([-1.0, 2.0], spec), [0.0, 2.0])

    def test_soc_polar_case(self):
        spec = ConeSpec(soc_dims=(3,))
        np.testing.assert_allclose(
            project_primal_cone([-5.0, 3.0, 4.0], spec), np.zeros(3)
        )

    def test_soc_boundary_case(self):
        # Oracle value: bisection projection of (0, 3, 4) gives (2.5, 1.5, 2.0).
        spec = ConeSpec(soc_dims=(3,))
        got = project_primal_cone([0.0, 3.0, 4.0], spec)
        np.testing.assert_allclose(got, [2.5, 1.5, 2.0], atol=1e-12)
        oracle = soc_projection_oracle(np.array([0.0, 3.0, 4.0]))
        np.testing.assert_allclose(got, oracle, atol=1e-9)

    def test_soc_matches_oracle_randomly(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            d = int(rng.integers(2, 7))
            spec = ConeSpec(soc_dims=(d,))
            x = 3.0 * rng.standard_normal(d)
            got = project_primal_cone(x, spec)
            np.testing.assert_allclose(got, soc_projection_oracle(x), atol=1e-8)

    def test_psd_diagonal_truncation(self):
        spec = ConeSpec(psd_sides=(2,))
        x = pack_symmetric(np.diag([1.0, -1.0]))
        got = unpack_symmetric(project_primal_cone(x, spec), 2)
        np.testing.assert_allclose(got, np.diag([1.0, 0.0]), atol=1e-12)

    def test_psd_matches_lapack_truncation(self):
        rng = np.random.default_rng(3)
        for side in (2, 3, 5):
            spec = ConeSpec(psd_sides=(side,))
            M = rng.standard_normal((side, side))
            M = 0.5 * (M + M.T)
            got = unpack_symmetric(project_primal_cone(pack_symmetric(M), spec), side)
            vals, vecs = np.linalg.eigh(M)
            expect = (vecs * np.maximum(vals, 0.0)) @ vecs.T
            np.testing.assert_allclose(got, expect, atol=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            project_primal_cone(np.zeros(4), ConeSpec(nonneg_dim=3))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            project_primal_cone([np.nan, 0.0, 0.0], ConeSpec(nonneg_dim=3))


class TestDualProjection:
    def test_zero_block_is_free(self):
        spec = ConeSpec(zero_dim=2)
        np.testing.assert_allclose(project_dual_cone([5.0, -3.0], spec), [5.0, -3.0])

    def test_self_dual_blocks(self):
        spec = ConeSpec(nonneg_dim=2)
        np.testing.assert_allclose(project_dual_cone([-1.0, 2.0], spec), [0.0, 2.0])
        spec = ConeSpec(soc_dims=(3,))
        x = np.array([0.0, 3.0, 4.0])
        np.testing.assert_allclose(project_dual_cone(x, spec), [2.5, 1.5, 2.0], atol=1e-12)
        np.testing.assert_allclose(project_dual_cone(x, spec), soc_projection_oracle(x), atol=1e-9)


class TestEmbeddingProjection:
    def test_basic(self):
        spec = ConeSpec(nonneg_dim=1)
        got = project_embedding_cone([-2.0, -1.0, -3.0], 1, spec)
        np.testing.assert_allclose(got, [-2.0, 0.0, 0.0])

    def test_idempotence_on_member(self):
        spec = ConeSpec(nonneg_dim=2)
        u = np.array([1.5, -7.0, 0.5, 2.0, 3.0])
        inside = project_embedding_cone(u, 2, spec)
        np.testing.assert_allclose(project_embedding_cone(inside, 2, spec), inside)

    def test_zero_cone_middle_block(self):
        spec = ConeSpec(zero_dim=1)
        got = project_embedding_cone([7.0, -1.0], 0, spec)
        np.testing.assert_allclose(got, [7.0, 0.0])


class TestSymmetricEig:
    def test_diagonal(self):
        vals, vecs = symmetric_eig(np.diag([3.0, 1.0]))
        np.testing.assert_allclose(vals, [1.0, 3.0])
        np.testing.assert_allclose(np.abs(vecs), np.eye(2)[:, ::-1], atol=1e-12)

    def test_two_by_two_exchange(self):
        vals, _ = symmetric_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(vals, [-1.0, 1.0], atol=1e-12)

    def test_random_reconstruction(self):
        rng = np.random.default_rng(4)
        M = rng.standard_normal((5, 5))
        M = 0.5 * (M + M.T)
        vals, vecs = symmetric_eig(M)
        resid = np.linalg.norm((vecs * vals) @ vecs.T - M)
        assert resid <= 1e-9 * np.linalg.norm(M)
        assert np.linalg.norm(vecs.T @ vecs - np.eye(5)) <= 1e-10

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError):
            symmetric_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestProjectionProperties:
    def test_moreau_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            x = random_point(rng, MIXED_SPEC, scale=2.0)
            proj_k = project_primal_cone(x, MIXED_SPEC)
            proj_neg_dual = -project_dual_cone(-x, MIXED_SPEC)
            nx = np.linalg.norm(x)
            assert np.linalg.norm(x - proj_k - proj_neg_dual) <= 1e-10 * (1 + nx)
            assert abs(proj_k @ proj_neg_dual) <= 1e-10 * (1 + nx * nx)

    def test_idempotence(self):
        rng = np.random.default_rng(6)
        for project in (project_primal_cone, project_dual_cone):
            for _ in range(20):
                x = random_point(rng, MIXED_SPEC, scale=3.0)
                once = project(x, MIXED_SPEC)
                twice = project(once, MIXED_SPEC)
                assert np.linalg.norm(twice - once) <= 1e-12 * (1 + np.linalg.norm(once))

    def test_nonexpansive(self):
        rng = np.random.default_rng(7)
        for project in (project_primal_cone, project_dual_cone):
            for _ in range(30):
                x = random_point(rng, MIXED_SPEC, scale=2.0)
                y = random_point(rng, MIXED_SPEC, scale=2.0)
                lhs = np.linalg.norm(project(x, MIXED_SPEC) - project(y, MIXED_SPEC))
                assert lhs <= np.linalg.norm(x - y) + 1e-12

    def test_membership_of_projection(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            x = random_point(rng, MIXED_SPEC, scale=4.0)
            proj = project_primal_cone(x, MIXED_SPEC)
            offset = 0
            for kind, off, length, side in MIXED_SPEC.blocks():
                block = proj[off : off + length]
                if kind == "zero":
                    assert np.all(block == 0.0)
                elif kind == "nonneg":
                    assert np.min(block) >= -1e-12
                elif kind == "soc":
                    assert block[0] >= np.linalg.norm(block[1:]) - 1e-9
                else:
                    mat = unpack_symmetric(block, side)
                    floor = -1e-9 * max(np.linalg.norm(mat), 1.0)
                    assert np.linalg.eigvalsh(mat).min() >= floor
                offset += length

    def test_margin_helpers_agree_with_projection(self):
        rng = np.random.default_rng(9)
        x = random_point(rng, MIXED_SPEC)
        inside = project_primal_cone(x, MIXED_SPEC)
        assert membership_margin_primal(inside, MIXED_SPEC) >= -1e-9
        inside_dual = project_dual_cone(x, MIXED_SPEC)
        assert membership_margin_dual(inside_dual, MIXED_SPEC) >= -1e-9
