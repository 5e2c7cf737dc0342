import math

import numpy as np
import pytest

from qpsoc.app.core.algebra import LinearForm, Monomial, evaluate, perspective_value, product_point, subsets
from qpsoc.app.core.errors import RelaxationError, SupportViolationError
from qpsoc.app.core.instance import build_graph, make_qp, neighborhood
from qpsoc.app.core.relaxation import (
    build_block_system,
    lift_to_soc,
    perspective_system,
    rhs_value,
    slack,
    switch_inequality,
)
from qpsoc.app.core.relaxation.hierarchy import hierarchy, max_level, windows
from qpsoc.tests.factories import mixture_point, path_edges, random_qp, triangle_qp, with_edges, z, zz


def window_monomials(window):
    return [Monomial.subset(s) for s in subsets(window) if s]


def test_two_node_window():
    g = build_graph(triangle_qp())
    p, support = build_block_system(g, 0, {0, 1})
    terms = {t.pattern: (t.numerator, t.denominator) for t in p.terms}
    assert terms == {
        (0, 1): (LinearForm.of(z(0, 1)), LinearForm.of(z(1))),
        (0,): (LinearForm(0.0, {z(0): 1.0, z(0, 1): -1.0}), LinearForm(1.0, {z(1): -1.0})),
    }
    assert set(support.inequalities) == {
        LinearForm.of(z(0, 1)),
        LinearForm(0.0, {z(0): 1.0, z(0, 1): -1.0}),
        LinearForm(0.0, {z(1): 1.0, z(0, 1): -1.0}),
        LinearForm(1.0, {z(0): -1.0, z(1): -1.0, z(0, 1): 1.0}),
    }
    assert p.target == zz(0)


def test_full_window_on_triangle():
    g = build_graph(triangle_qp())
    p, support = build_block_system(g, 0, {0, 1, 2})
    assert len(p.terms) == 4
    assert all(0 in t.pattern for t in p.terms)
    assert {t.denominator for t in p.terms} == {
        LinearForm.of(z(1, 2)),
        LinearForm(0.0, {z(1): 1.0, z(1, 2): -1.0}),
        LinearForm(0.0, {z(2): 1.0, z(1, 2): -1.0}),
        LinearForm(1.0, {z(1): -1.0, z(2): -1.0, z(1, 2): 1.0}),
    }
    assert len(support.inequalities) == 8


def test_single_node_window():
    g = build_graph(triangle_qp())
    p, support = build_block_system(g, 0, {0})
    assert len(p.terms) == 1
    assert p.terms[0].numerator == LinearForm.of(z(0))
    assert p.terms[0].denominator == LinearForm(1.0)
    assert set(support.inequalities) == {LinearForm.of(z(0)), LinearForm(1.0, {z(0): -1.0})}


def test_build_block_system_errors():
    g = build_graph(make_qp(3, {0: 1.0}, {(0, 1): 1.0, (1, 2): 1.0}))
    with pytest.raises(RelaxationError, match="no plus loop"):
        build_block_system(g, 1, {1})
    with pytest.raises(RelaxationError, match="neighbourhood"):
        build_block_system(g, 0, {0, 2})
    with pytest.raises(RelaxationError, match="does not contain"):
        build_block_system(g, 0, {1})


@pytest.mark.parametrize("window, cones", [((0, 1), 2), ((0, 1, 2), 4), ((0,), 1)])
def test_lift_to_soc_counts(window, cones):
    p, _ = perspective_system(0, window)
    inequality, lifted = lift_to_soc(p)
    assert len(lifted) == cones
    assert len({c.t for c in lifted}) == cones
    assert inequality.terms[zz(0)] == 1.0
    assert all(inequality.terms[c.t] == -1.0 for c in lifted)


def test_hierarchy_windows_on_triangle():
    g = build_graph(triangle_qp())
    assert [p.window for p in hierarchy(g, 2).perspectives] == [(0, 1), (0, 2)]
    assert [p.window for p in hierarchy(g, 3).perspectives] == [(0, 1, 2)]
    assert [p.window for p in hierarchy(g, 1).perspectives] == [(0,)]
    assert max_level(g) == 3


def test_hierarchy_without_plus_loops():
    qp = make_qp(3, {1: -1.0}, {(0, 1): 1.0, (1, 2): -1.0})
    system = hierarchy(build_graph(qp), 2)
    assert system.perspectives == [] and system.cones == []
    # box 3 * 2, McCormick 2 * 4, minus loop z_1 - zz_1
    assert len(system.linear) == 6 + 8 + 1
    assert LinearForm(0.0, {z(1): 1.0, zz(1): -1.0}) in system.linear


def test_hierarchy_rejects_level_zero():
    with pytest.raises(RelaxationError):
        hierarchy(build_graph(triangle_qp()), 0)


def test_hierarchy_system_count():
    rng = np.random.default_rng(21)
    for _ in range(20):
        g = build_graph(random_qp(rng, 7))
        for r in range(1, 5):
            expected = 0
            for i in g.plus_loops:
                size = len(neighborhood(g, i))
                expected += math.comb(size - 1, min(r, size) - 1)
            assert len(hierarchy(g, r).perspectives) == expected


def test_hierarchy_deduplicates_support_rows():
    g = build_graph(triangle_qp())
    system = hierarchy(g, 2)
    keys = [f.key() for f in system.linear]
    assert len(keys) == len(set(keys))
    # windows {0,1} and {0,2} have the McCormick rows of their edges as support
    assert len(system.linear) == 6 + 12


def test_rhs_equals_square_at_product_points():
    rng = np.random.default_rng(1)
    for size in range(1, 5):
        window = tuple(range(size))
        p, support = perspective_system(0, window)
        monomials = window_monomials(window) + [zz(0)]
        for _ in range(200):
            x = rng.random(size)
            point = product_point(x, monomials)
            assert min(evaluate(f, point) for f in support.inequalities) >= -1e-9
            assert rhs_value(p, point) == pytest.approx(x[0] ** 2, abs=1e-7)


def test_rhs_at_zero_point():
    p, _ = perspective_system(0, (0, 1, 2))
    zero = {m: 0.0 for m in window_monomials((0, 1, 2))}
    assert rhs_value(p, zero) == 0.0


def test_rhs_rejects_violated_support():
    p, _ = perspective_system(0, (0, 1))
    point = {z(0): 0.5, z(1): 1.2, z(0, 1): 0.4}
    with pytest.raises(SupportViolationError):
        rhs_value(p, point)


def test_dominance_at_support_feasible_points():
    rng = np.random.default_rng(8)
    for _ in range(200):
        size = int(rng.integers(2, 5))
        window = tuple(range(size))
        point = mixture_point(rng, window, window_monomials(window))
        inner = tuple(sorted(rng.choice(window[1:], size=int(rng.integers(0, size - 1)), replace=False)))
        small, _ = perspective_system(0, (0,) + tuple(int(v) for v in inner))
        large, _ = perspective_system(0, window)
        assert rhs_value(large, point) >= rhs_value(small, point) - 1e-9


def test_soc_lift_reproduces_inequality():
    rng = np.random.default_rng(4)
    p, _ = perspective_system(0, (0, 1, 2))
    inequality, cones = lift_to_soc(p)
    for _ in range(50):
        point = mixture_point(rng, (0, 1, 2), window_monomials((0, 1, 2)))
        point[zz(0)] = float(rng.random())
        for cone in cones:
            u, v = evaluate(cone.u, point), evaluate(cone.v, point)
            point[cone.t] = perspective_value(u, v)
            assert point[cone.t] * v == pytest.approx(u * u, abs=1e-12)
        assert evaluate(inequality, point) == pytest.approx(slack(p, point), abs=1e-12)


def test_switched_inequality_shifts_rhs():
    rng = np.random.default_rng(6)
    p, _ = perspective_system(1, (0, 1, 2))
    switched = switch_inequality(p)
    assert switched.lhs == LinearForm(1.0, {z(1): -2.0, zz(1): 1.0})
    assert [t.denominator for t in switched.terms] == [t.denominator for t in p.terms]
    assert {c.t for c in lift_to_soc(switched)[1]}.isdisjoint({c.t for c in lift_to_soc(p)[1]})
    for _ in range(50):
        point = mixture_point(rng, (0, 1, 2), window_monomials((0, 1, 2)))
        difference = rhs_value(switched, point) - rhs_value(p, point)
        assert difference == pytest.approx(1.0 - 2.0 * point[z(1)], abs=1e-9)


def test_two_node_window_identity():
    p, _ = perspective_system(0, (0, 1))
    point = {z(0): 0.3, z(1): 0.6, z(0, 1): 0.25}
    expected = 0.3 ** 2 + (0.25 - 0.3 * 0.6) ** 2 / (0.6 * 0.4)
    assert rhs_value(p, point) == pytest.approx(expected)
    assert rhs_value(p, point) > 0.3 ** 2


def test_slack_at_boundary_points():
    p, _ = perspective_system(0, (0, 1))
    point = {z(0): 0.5, z(1): 0.0, z(0, 1): 0.0, zz(0): 1.0}
    assert slack(p, point) == pytest.approx(0.75)
    point = {z(0): 0.5, z(1): 1.0, z(0, 1): 0.5, zz(0): 1.0}
    assert slack(p, point) == pytest.approx(0.75)
    point = {z(0): 0.5, z(1): 0.0, z(0, 1): 0.3, zz(0): 1.0}
    assert slack(p, point) == -math.inf


def test_path_graph_windows_stay_inside_neighbourhood():
    rng = np.random.default_rng(0)
    qp = with_edges(rng, 5, path_edges(5), plus=[2])
    g = build_graph(qp)
    for r in (1, 2, 3, 4):
        for p in hierarchy(g, r).perspectives:
            assert set(p.window) <= {1, 2, 3}
