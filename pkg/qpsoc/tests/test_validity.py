"""Generated constraints hold at every product point; corrupted ones are caught."""

from dataclasses import replace

import numpy as np
import pytest

from qpsoc.app.core.algebra import LinearForm, Monomial, subsets
from qpsoc.app.core.decomposition import block_system, construct_td, contract_plus_subtrees, decompose
from qpsoc.app.core.instance import build_graph, neighborhood
from qpsoc.app.core.oracle import sample_product_columns, sample_product_points, validate_batch, validate_constraints
from qpsoc.app.core.relaxation import ConstraintSystem, perspective_system, rhs_value
from qpsoc.app.core.relaxation.hierarchy import hierarchy, max_level
from qpsoc.tests.factories import mixture_point, random_qp, triangle_qp, z

SAMPLES = 10_000


def columns_for(g, system, seed):
    return sample_product_columns(g, system.monomials(), SAMPLES, seed)


@pytest.mark.slow
def test_hierarchy_holds_at_product_points():
    rng = np.random.default_rng(31)
    for seed in range(50):
        qp = random_qp(rng, int(rng.integers(2, 9)), edge_prob=0.6)
        g = build_graph(qp)
        for r in range(1, max_level(g) + 1):
            system = hierarchy(g, r)
            assert validate_batch(system, columns_for(g, system, seed)) == []


@pytest.mark.slow
def test_block_systems_hold_at_product_points():
    rng = np.random.default_rng(32)
    for seed in range(50):
        qp = random_qp(rng, int(rng.integers(2, 9)), stable_plus=True)
        g = build_graph(qp)
        blocks = decompose(g, contract_plus_subtrees(g, construct_td(g, "auto")))
        system = block_system(g, blocks)
        assert validate_batch(system, columns_for(g, system, seed)) == []


def test_pointwise_and_batch_validation_agree():
    g = build_graph(triangle_qp())
    system = hierarchy(g, 3)
    points = sample_product_points(g, system.monomials(), 50, seed=5)
    assert all(validate_constraints(system, point) == [] for point in points)
    assert validate_batch(system, sample_product_columns(g, system.monomials(), 50, seed=5)) == []


def test_nested_windows_dominate():
    rng = np.random.default_rng(33)
    checked = 0
    while checked < 1000:
        g = build_graph(random_qp(rng, 6, edge_prob=0.7, loop_prob=0.9, plus_share=0.8))
        for i in sorted(g.plus_loops):
            hood = sorted(neighborhood(g, i))
            if len(hood) < 2:
                continue
            others = [k for k in hood if k != i]
            large = tuple(sorted([i] + [k for k in others if rng.random() < 0.7]))
            small = tuple(k for k in large if k == i or rng.random() < 0.5)
            monomials = [Monomial.subset(s) for s in subsets(large) if s]
            point = mixture_point(rng, large, monomials)
            p_large, _ = perspective_system(i, large)
            p_small, _ = perspective_system(i, small)
            assert rhs_value(p_large, point) >= rhs_value(p_small, point) - 1e-9
            checked += 1


def test_wrong_linear_row_is_caught():
    g = build_graph(triangle_qp())
    system = hierarchy(g, 2)
    system.add_linear(LinearForm(0.0, {z(0, 1): 1.0, z(0): -1.0}))
    found = validate_batch(system, columns_for(g, system, 0))
    assert [v.kind for v in found] == ["linear"]
    assert found[0].slack < 0
    assert found[0].sample is not None


def test_halved_denominator_is_caught():
    g = build_graph(triangle_qp())
    p, support = perspective_system(0, (0, 1, 2))
    terms = tuple(replace(t, denominator=t.denominator.scaled(0.5)) for t in p.terms)
    system = ConstraintSystem()
    system.add_perspective(replace(p, terms=terms), support)
    kinds = {v.kind for v in validate_batch(system, columns_for(g, system, 0))}
    assert "perspective" in kinds
    assert "lifted" in kinds


def test_dropping_a_term_keeps_the_system_valid():
    # fewer terms only weakens the inequality
    g = build_graph(triangle_qp())
    p, support = perspective_system(0, (0, 1, 2))
    system = ConstraintSystem()
    system.add_perspective(replace(p, terms=p.terms[1:]), support)
    assert validate_batch(system, columns_for(g, system, 0)) == []


def test_support_violation_is_reported():
    p, support = perspective_system(0, (0, 1))
    system = ConstraintSystem()
    system.add_perspective(p, support)
    point = {z(0): 0.5, z(1): 1.4, z(0, 1): 0.5, Monomial.loop_of(0): 0.25}
    found = validate_constraints(system, point)
    assert "perspective" in {v.kind for v in found}
    assert any(v.slack == -np.inf for v in found)


def test_perspective_tol_decides_zero_denominators():
    # z_01 sits 2e-10 above z_1 = 0: inside the support slack, so the (0, 1)
    # term has a zero denominator and a tiny numerator
    p, support = perspective_system(0, (0, 1))
    system = ConstraintSystem()
    system.add_perspective(p, support)
    point = {z(0): 0.5, z(1): 0.0, z(0, 1): 2e-10, Monomial.loop_of(0): 0.3}
    columns = {k: np.array([v]) for k, v in point.items()}

    strict = validate_constraints(system, point)
    assert {"perspective", "lifted"} <= {v.kind for v in strict}
    assert {"perspective", "lifted"} <= {v.kind for v in validate_batch(system, columns)}

    assert validate_constraints(system, point, perspective_tol=1e-9) == []
    assert validate_batch(system, columns, perspective_tol=1e-9) == []
