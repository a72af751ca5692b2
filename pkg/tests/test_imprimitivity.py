"""The bimodule generator formulas, the eight axioms, and Morita reports."""

import numpy as np
import pytest

from fellbundles import bundles, groups, imprimitivity as imp, matrices, sections
from fellbundles.errors import (
    AxiomViolation,
    FiberMismatch,
    GroupMismatch,
    NonUnitalUnitFiber,
)

from conftest import I2, PAULI_X, SQ2

X_HAT = PAULI_X / SQ2
I_HAT = I2 / SQ2


def oracle_block_count(mats):
    """Independent Wedderburn count: span dim minus rank of the commutator map."""
    k = len(mats)
    cols = []
    for bj in mats:
        cols.append(np.stack([(bi @ bj - bj @ bi).ravel() for bi in mats], axis=1))
    m = np.concatenate(cols)
    sv = np.linalg.svd(m, compute_uv=False)
    rank = int(np.sum(sv > 1e-9 * max(1.0, float(sv[0]))))
    return k - rank


@pytest.fixture(scope="module")
def pauli_setup(q_z4, pauli_bundle):
    return q_z4, pauli_bundle


@pytest.fixture(scope="module")
def s3_setup(q_s3, s3_quotient_bundle):
    return q_s3, s3_quotient_bundle


class TestGeneratorFormulas:
    def test_right_action_matching(self, pauli_setup):
        q, d = pauli_setup
        x = imp.module_element(q, d, {(1, 1): X_HAT})
        c = imp.algebra_element_c(q, d, {(1, 1): X_HAT})
        out = imp.right_action(x, c)
        assert set(out.coeffs) == {(0, 1)}
        assert np.allclose(out.coeffs[(0, 1)], I2 / 2)

    def test_right_action_condition_fails(self, pauli_setup):
        q, d = pauli_setup
        x = imp.module_element(q, d, {(1, 1): X_HAT})
        c = imp.algebra_element_c(q, d, {(1, 0): X_HAT})
        assert imp.right_action(x, c).coeffs == {}

    def test_left_action_matching(self, pauli_setup):
        q, d = pauli_setup
        b = imp.algebra_element_b(q, d, {(1, 2): X_HAT})
        x = imp.module_element(q, d, {(0, 2): I_HAT})
        out = imp.left_action(b, x)
        assert set(out.coeffs) == {(1, 3)}
        assert np.allclose(out.coeffs[(1, 3)], PAULI_X / 2)

    def test_left_action_needs_position_match(self, pauli_setup):
        q, d = pauli_setup
        b = imp.algebra_element_b(q, d, {(1, 2): X_HAT})
        x = imp.module_element(q, d, {(0, 1): I_HAT})
        assert imp.left_action(b, x).coeffs == {}

    def test_rinner(self, pauli_setup):
        q, d = pauli_setup
        x = imp.module_element(q, d, {(1, 3): X_HAT})
        y = imp.module_element(q, d, {(0, 3): I_HAT})
        out = imp.rinner(x, y)
        assert set(out.coeffs) == {(1, 1)}
        assert np.allclose(out.coeffs[(1, 1)], PAULI_X / 2)

    def test_linner(self, pauli_setup):
        q, d = pauli_setup
        x = imp.module_element(q, d, {(1, 2): X_HAT})
        y = imp.module_element(q, d, {(0, 1): I_HAT})
        out = imp.linner(x, y)
        assert set(out.coeffs) == {(1, 1)}
        assert np.allclose(out.coeffs[(1, 1)], PAULI_X / 2)
        miss = imp.module_element(q, d, {(1, 1): X_HAT})
        assert imp.linner(x, miss).coeffs == {}

    def test_gamma_identity_and_action(self, pauli_setup):
        q, d = pauli_setup
        x = imp.module_element(q, d, {(1, 2): X_HAT})
        assert imp._distance(imp.gamma(0, x), x) == 0.0
        moved = imp.gamma(3, x)
        assert set(moved.coeffs) == {(1, q.group.mul(2, q.group.inv(3)))}

    def test_fiber_membership_enforced(self, pauli_setup):
        q, d = pauli_setup
        with pytest.raises(FiberMismatch):
            imp.module_element(q, d, {(0, 1): X_HAT})
        with pytest.raises(FiberMismatch):
            imp.algebra_element_b(q, d, {(2, 0): X_HAT})  # coset of 2 is 0
        with pytest.raises(FiberMismatch):
            imp.algebra_element_c(q, d, {(1, 0): I_HAT})

    def test_quotient_data_mismatch(self, pauli_setup, s3_setup):
        q, d = pauli_setup
        q2, d2 = s3_setup
        x = imp.module_element(q, d, {(1, 1): X_HAT})
        y = imp.module_element(q2, d2, {(0, 0): d2.fiber(0).basis[0]})
        with pytest.raises(GroupMismatch):
            imp.rinner(x, y)


class TestUnits:
    def test_unit_supports(self, pauli_setup):
        q, d = pauli_setup
        unit_b, unit_c = imp.unit_elements(q, d)
        assert len(unit_b.coeffs) == q.group.order
        assert len(unit_c.coeffs) == q.quotient_group.order

    def test_units_act_as_identities(self, pauli_setup):
        q, d = pauli_setup
        unit_b, unit_c = imp.unit_elements(q, d)
        for x in imp.x_generators(q, d):
            assert imp._distance(imp.left_action(unit_b, x), x) <= 1e-12
            assert imp._distance(imp.right_action(x, unit_c), x) <= 1e-12
        for b in imp.b_generators(q, d):
            assert imp._distance(imp.b_mul(unit_b, b), b) <= 1e-12
            assert imp._distance(imp.b_mul(b, unit_b), b) <= 1e-12
        for c in imp.c_generators(q, d):
            assert imp._distance(imp.c_mul(unit_c, c), c) <= 1e-12
            assert imp._distance(imp.c_mul(c, unit_c), c) <= 1e-12

    def test_non_unital_base_rejected(self, z4):
        nilpotent = matrices.orthonormalize(
            [np.array([[0, 1], [0, 0]], dtype=complex)])
        q1 = groups.quotient(z4, (0, 1, 2, 3))
        bad = bundles.GradedBundle(groups.cyclic(1), (nilpotent,))
        with pytest.raises(NonUnitalUnitFiber):
            imp.unit_elements(q1, bad)


class TestRealizations:
    def test_realize_b_is_a_star_homomorphism(self, pauli_setup):
        q, d = pauli_setup
        rng = np.random.default_rng(31)
        for _ in range(4):
            b1 = imp._random_b(q, d, rng)
            b2 = imp._random_b(q, d, rng)
            assert np.allclose(imp.realize_b(imp.b_mul(b1, b2)),
                               imp.realize_b(b1) @ imp.realize_b(b2), atol=1e-10)
            assert np.allclose(imp.realize_b(imp.b_star(b1)),
                               matrices.dagger(imp.realize_b(b1)), atol=1e-12)

    def test_realize_c_is_a_star_homomorphism(self, pauli_setup):
        q, d = pauli_setup
        rng = np.random.default_rng(37)
        for _ in range(4):
            c1 = imp._random_c(q, d, rng)
            c2 = imp._random_c(q, d, rng)
            assert np.allclose(imp.realize_c(imp.c_mul(c1, c2)),
                               imp.realize_c(c1) @ imp.realize_c(c2), atol=1e-10)
            assert np.allclose(imp.realize_c(imp.c_star(c1)),
                               matrices.dagger(imp.realize_c(c1)), atol=1e-12)

    def test_realizations_are_faithful(self, pauli_setup):
        q, d = pauli_setup
        dims = imp.dimensions(q, d)
        span_b = matrices.orthonormalize(
            [imp.realize_b(b) for b in imp.b_generators(q, d)])
        span_c = matrices.orthonormalize(
            [imp.realize_c(c) for c in imp.c_generators(q, d)])
        assert span_b.dim == dims["dimB"]
        assert span_c.dim == dims["dimC"]

    def test_b_realization_spans_pullback_crossed_product(self, pauli_setup):
        # B0 is the crossed product of the pulled-back bundle
        q, d = pauli_setup
        cp = sections.crossed_product(bundles.pullback(d, q))
        span_b = matrices.orthonormalize(
            [imp.realize_b(b) for b in imp.b_generators(q, d)])
        assert matrices.subspace_equal(span_b, cp.total, tol=1e-9)


class TestVerification:
    def test_pauli_example_passes(self, pauli_setup):
        q, d = pauli_setup
        report = imp.verify_imprimitivity(q, d, tol=1e-8)
        assert report["pass"], report["violations"]
        assert len(report["items"]) == 8
        assert report["items"]["vii_positivity"]["min_relative_eigenvalue"] >= -1e-8

    def test_s3_example_passes(self, s3_setup):
        q, d = s3_setup
        report = imp.verify_imprimitivity(q, d, tol=1e-8)
        assert report["pass"], report["violations"]

    def test_fullness_ranks_are_exact(self, pauli_setup):
        q, d = pauli_setup
        item = imp.verify_imprimitivity(q, d)["items"]["vi_fullness"]
        assert item["rank_b"] == item["dim_b"] == 16
        assert item["rank_c"] == item["dim_c"] == 4

    def test_corrupted_base_bundle_is_caught_at_construction(self, q_z4):
        # a base whose odd fiber is not adjoint-symmetric: the inner products
        # then step outside their declared fibers and membership fails
        e12 = matrices.orthonormalize([np.array([[0, 1], [0, 0]], dtype=complex)])
        line = matrices.orthonormalize([I2])
        bad = bundles.GradedBundle(q_z4.quotient_group, (line, e12))
        x = imp.module_element(q_z4, bad, {(1, 1): bad.fiber(1).basis[0]})
        out = imp.rinner(x, x)
        with pytest.raises(FiberMismatch):
            imp.algebra_element_c(q_z4, bad, dict(out.coeffs))

    def test_gamma_equivariance(self, pauli_setup, s3_setup):
        for q, d in (pauli_setup, s3_setup):
            report = imp.gamma_equivariance_report(q, d, tol=1e-10)
            assert report["pass"], report["checks"]


class TestMorita:
    def test_pauli_anchor(self, pauli_setup):
        q, d = pauli_setup
        report = imp.morita_report(q, d)
        assert report == {"dimB": 16, "dimC": 4, "dimX": 8,
                          "blocksB": 1, "blocksC": 1, "equivalent": True}

    def test_anchor_against_independent_oracle(self, pauli_setup):
        q, d = pauli_setup
        span_b = [imp.realize_b(b) for b in imp.b_generators(q, d)]
        span_c = [imp.realize_c(c) for c in imp.c_generators(q, d)]
        assert oracle_block_count(span_b) == 1
        assert oracle_block_count(span_c) == 1
        assert imp.dimensions(q, d) == {"dimX": 8, "dimB": 16, "dimC": 4}

    def test_s3_blocks_match(self, s3_setup):
        q, d = s3_setup
        report = imp.morita_report(q, d)
        assert report["equivalent"]
        assert report["blocksB"] == report["blocksC"]
        assert report["dimX"] == 12 and report["dimB"] == 36 and report["dimC"] == 4

    def test_full_quotient_toy_case(self, z2, scalar_line):
        # G = Z2, N = G: the quotient group is trivial and C0 is one copy of C
        q = groups.quotient(z2, (0, 1))
        d = bundles.GradedBundle(groups.cyclic(1), (scalar_line,))
        report = imp.morita_report(q, d)
        assert report == {"dimB": 4, "dimC": 1, "dimX": 2,
                          "blocksB": 1, "blocksC": 1, "equivalent": True}

    def test_trivial_subgroup_gives_equal_sides(self, z4, trivial_z4):
        q = groups.quotient(z4, (0,))
        report = imp.morita_report(q, trivial_z4)
        assert report["dimB"] == report["dimC"] == 16
        assert report["blocksB"] == report["blocksC"]

    def test_dimension_cross_check(self, pauli_setup, s3_setup):
        for q, d in (pauli_setup, s3_setup):
            assert imp.pullback_crossed_dimension(q, d) == imp.dimensions(q, d)["dimB"]
