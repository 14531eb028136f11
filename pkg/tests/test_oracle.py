"""Tests for the exact transport LP oracle and its certificates."""

import itertools

import numpy as np
import pytest

from copula_ot import (
    CapacityError,
    ConstructionError,
    DiscreteCoupling,
    DomainError,
    TransportInstance,
    enumerate_extreme_couplings,
    from_atoms,
    marginalize,
    monotone_plan_1d,
    solve_exact,
    transport_cost,
)
from copula_ot.oracle import DUAL_CERT_TOL

from helpers import random_discrete


def uniform(atoms):
    return from_atoms(atoms, [1.0 / len(atoms)] * len(atoms))


class TestSolveExact:
    def test_identical_point_masses(self):
        inst = TransportInstance([0.0], [1.0], [0.0], [1.0], p=2.0)
        sol = solve_exact(inst)
        assert sol.value == 0.0
        assert sol.plan.mass.tolist() == [[1.0]]

    def test_forced_plan_cost(self):
        inst = TransportInstance([0.0], [1.0], [3.0], [1.0], p=2.0, q=2.0)
        sol = solve_exact(inst)
        assert sol.value == pytest.approx(9.0, abs=1e-12)
        assert sol.plan.mass.tolist() == [[1.0]]

    def test_two_atom_diagonal(self):
        inst = TransportInstance.from_distributions(uniform([0.0, 1.0]), uniform([0.0, 2.0]), p=1.0)
        sol = solve_exact(inst)
        assert sol.value == pytest.approx(0.5, abs=1e-12)
        assert np.allclose(sol.plan.mass, [[0.5, 0.0], [0.0, 0.5]], atol=1e-12)

    def test_capacity_guard(self):
        atoms = np.arange(65.0)
        w = np.full(65, 1 / 65)
        inst = TransportInstance(atoms, w, atoms, w, p=1.0)
        with pytest.raises(CapacityError):
            solve_exact(inst)

    def test_dual_certificate_invariants(self, rng):
        for _ in range(20):
            f = random_discrete(rng, max_atoms=8)
            g = random_discrete(rng, max_atoms=8)
            p = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
            inst = TransportInstance.from_distributions(f, g, p)
            sol = solve_exact(inst)
            cost = inst.cost_matrix
            slack = cost - (sol.row_potentials[:, None] + sol.col_potentials[None, :])
            assert slack.min() >= -DUAL_CERT_TOL
            support = sol.plan.support()
            assert np.max(np.abs(slack[support])) <= DUAL_CERT_TOL

    def test_matches_vertex_minimum(self, rng):
        for _ in range(10):
            f = random_discrete(rng, max_atoms=4)
            g = random_discrete(rng, max_atoms=4)
            inst = TransportInstance.from_distributions(f, g, p=2.0)
            sol = solve_exact(inst)
            vertices = enumerate_extreme_couplings(f.weights, g.weights, f.atoms, g.atoms)
            best = min(transport_cost(v, 2.0) for v in vertices)
            assert sol.value == pytest.approx(best, abs=1e-10)

    def test_marginalize_reproduces_inputs(self, rng):
        f = random_discrete(rng, max_atoms=10)
        g = random_discrete(rng, max_atoms=10)
        sol = solve_exact(TransportInstance.from_distributions(f, g, p=1.5))
        _, row_w = marginalize(sol.plan, "row")
        _, col_w = marginalize(sol.plan, "col")
        assert np.allclose(row_w, f.weights, atol=1e-10)
        assert np.allclose(col_w, g.weights, atol=1e-10)

    def test_atom_order_invariance(self, rng):
        f = random_discrete(rng, max_atoms=7)
        g = random_discrete(rng, max_atoms=7)
        base = solve_exact(TransportInstance.from_distributions(f, g, p=2.0)).value
        pi = rng.permutation(f.n_atoms)
        sigma = rng.permutation(g.n_atoms)
        shuffled = TransportInstance(
            f.atoms[pi], f.weights[pi], g.atoms[sigma], g.weights[sigma], p=2.0
        )
        assert solve_exact(shuffled).value == pytest.approx(base, abs=1e-10)

    def test_weight_sum_mismatch_rejected(self):
        with pytest.raises(ConstructionError):
            TransportInstance([0.0, 1.0], [0.5, 0.4], [0.0], [1.0], p=1.0)


class TestEnumerateExtremeCouplings:
    def test_uniform_2x2_is_a_segment(self):
        vertices = enumerate_extreme_couplings([0.5, 0.5], [0.5, 0.5])
        mats = sorted(v.mass.tolist() for v in vertices)
        assert mats == [
            [[0.0, 0.5], [0.5, 0.0]],
            [[0.5, 0.0], [0.0, 0.5]],
        ]

    def test_one_row_is_forced(self):
        vertices = enumerate_extreme_couplings([1.0], [0.25, 0.25, 0.5])
        assert len(vertices) == 1
        assert vertices[0].mass.tolist() == [[0.25, 0.25, 0.5]]

    def test_uniform_3x3_gives_birkhoff_vertices(self):
        vertices = enumerate_extreme_couplings([1 / 3] * 3, [1 / 3] * 3)
        assert len(vertices) == 6
        perms = {
            tuple(np.argmax(v.mass, axis=1).tolist()) for v in vertices
        }
        assert perms == set(itertools.permutations(range(3)))
        for v in vertices:
            assert np.allclose(np.sort(v.mass.ravel())[-3:], 1 / 3)

    def test_guard(self):
        with pytest.raises(CapacityError):
            enumerate_extreme_couplings([0.2] * 5, [0.2] * 5)

    def test_margins_must_balance(self):
        with pytest.raises(DomainError):
            enumerate_extreme_couplings([1.0], [0.5])

    def test_every_vertex_has_forest_support(self, rng):
        f = random_discrete(rng, max_atoms=4)
        g = random_discrete(rng, max_atoms=4)
        for v in enumerate_extreme_couplings(f.weights, g.weights, f.atoms, g.atoms):
            assert np.allclose(v.row_weights, f.weights, atol=1e-10)
            assert np.allclose(v.col_weights, g.weights, atol=1e-10)
            # acyclic support: at most m + n - 1 cells carry mass
            assert int(v.support().sum()) <= f.n_atoms + g.n_atoms - 1


class TestMarginalize:
    def test_single_cell(self):
        plan = DiscreteCoupling([2.0], [7.0], [[1.0]])
        points, weights = marginalize(plan, "row")
        assert points.ravel().tolist() == [2.0]
        assert weights.tolist() == [1.0]

    def test_independence_columns(self):
        plan = DiscreteCoupling([0.0, 1.0], [0.0, 2.0], [[0.25, 0.25], [0.25, 0.25]])
        points, weights = marginalize(plan, "col")
        assert points.ravel().tolist() == [0.0, 2.0]
        assert np.allclose(weights, [0.5, 0.5])

    def test_side_validation(self):
        plan = DiscreteCoupling([0.0], [0.0], [[1.0]])
        with pytest.raises(DomainError):
            marginalize(plan, "diagonal")

    def test_one_sided_cost_contract(self, rng):
        # integrating f(x) against the plan equals integrating against the margin
        f = random_discrete(rng, max_atoms=6)
        g = random_discrete(rng, max_atoms=6)
        sol = solve_exact(TransportInstance.from_distributions(f, g, p=2.0))
        fx = sol.plan.row_points.ravel() ** 2
        via_plan = float(np.sum(sol.plan.mass * fx[:, None]))
        via_margin = float(np.sum(f.weights * f.atoms**2))
        assert via_plan == pytest.approx(via_margin, rel=1e-12, abs=1e-12)


class TestMonotonePlan:
    def test_point_masses(self):
        plan = monotone_plan_1d(from_atoms([1.0], [1.0]), from_atoms([5.0], [1.0]))
        assert plan.mass.tolist() == [[1.0]]

    def test_uniform_pair_ties_advance_together(self):
        plan = monotone_plan_1d(uniform([0.0, 1.0]), uniform([0.0, 2.0]))
        assert np.allclose(plan.mass, [[0.5, 0.0], [0.0, 0.5]], atol=1e-15)

    def test_staggered_ladders(self):
        f = uniform([0.0, 1.0])
        g = from_atoms([0.0, 2.0], [0.25, 0.75])
        plan = monotone_plan_1d(f, g)
        assert np.allclose(plan.mass, [[0.25, 0.25], [0.0, 0.5]], atol=1e-15)

    def test_margins_and_optimality(self, rng):
        for p in (1.0, 2.0, 3.0):
            f = random_discrete(rng, max_atoms=9)
            g = random_discrete(rng, max_atoms=9)
            plan = monotone_plan_1d(f, g)
            assert np.allclose(plan.row_weights, f.weights, atol=1e-12)
            assert np.allclose(plan.col_weights, g.weights, atol=1e-12)
            lp = solve_exact(TransportInstance.from_distributions(f, g, p))
            assert transport_cost(plan, p) == pytest.approx(lp.value, rel=1e-9, abs=1e-9)

    def test_agrees_with_joint_cdf_extraction(self, rng):
        # the ladder merge and the inclusion-exclusion of min(F, G) are two
        # routes to the same coupling
        from copula_ot import comonotone_joint_2d, coupling_from_joint

        for _ in range(10):
            f = random_discrete(rng, max_atoms=7)
            g = random_discrete(rng, max_atoms=7)
            merged = monotone_plan_1d(f, g)
            extracted = coupling_from_joint(comonotone_joint_2d(f, g))
            assert np.allclose(merged.mass, extracted.mass, atol=1e-12, rtol=0.0)


class TestDiscreteCoupling:
    def test_negative_mass_rejected(self):
        with pytest.raises(ConstructionError):
            DiscreteCoupling([0.0], [0.0], [[-0.5]])

    def test_tiny_negatives_clamped(self):
        plan = DiscreteCoupling([0.0, 1.0], [0.0], [[1.0, ], [-1e-14]])
        assert plan.mass[1, 0] == 0.0

    def test_total_mass_checked(self):
        with pytest.raises(ConstructionError):
            DiscreteCoupling([0.0], [0.0], [[0.5]])
