import json

import pandas as pd
import pytest

from qpsoc.app.config import SettingsModel
from qpsoc.app.core.conic import import_model
from qpsoc.app.core.decomposition import TreeDecomposition, dump_td
from qpsoc.app.core.errors import DecompositionError
from qpsoc.app.core.instance import make_qp
from qpsoc.app.services.reports import RunReport, append_csv, render_json, render_text
from qpsoc.app.workflow import pipeline
from qpsoc.app.workflow.batch_manager import compare_batch
from qpsoc.app.workflow.pipeline import (
    exact_pipeline,
    instance_digest,
    run_check_td,
    run_compare,
    run_exact,
    run_graph,
    run_oracle,
    run_relax,
    run_witness,
)
from qpsoc.tests.factories import triangle_qp

ADJACENT_PLUS = make_qp(3, {0: 1.0, 1: 1.0}, {(0, 1): 1.0, (1, 2): -1.0}, [-1.0, 0.5, 0.0])


def test_exact_pipeline_triangle():
    build = exact_pipeline(triangle_qp())
    assert build.td.bags == (frozenset({0, 1, 2}),)
    assert build.conditions.c1 and build.conditions.c2 and build.conditions.c3
    assert len(build.blocks) == 1
    assert build.model.counts()["variables"] == 12
    assert build.fallback_level is None


def test_exact_pipeline_refuses_adjacent_plus_loops():
    with pytest.raises(DecompositionError, match="adjacent"):
        exact_pipeline(ADJACENT_PLUS)


def test_exact_pipeline_falls_back_to_the_hierarchy():
    build = exact_pipeline(ADJACENT_PLUS, fallback_level=2)
    assert build.fallback_level == 2
    assert build.blocks == []
    assert build.conditions is None
    assert {p.node for p in build.system.perspectives} == {0, 1}


def test_exact_pipeline_checks_the_given_td():
    qp = make_qp(3, {0: 1.0, 2: 1.0}, {(0, 1): 1.0, (1, 2): 1.0})
    with pytest.raises(DecompositionError, match="invalid tree decomposition"):
        exact_pipeline(qp, TreeDecomposition(bags=({0, 1}, {2}), edges=((0, 1),)))
    with pytest.raises(DecompositionError, match="more than one plus-loop node"):
        exact_pipeline(qp, TreeDecomposition(bags=({0, 1, 2},)))
    build = exact_pipeline(qp, TreeDecomposition(bags=({0, 1}, {1, 2}), edges=((0, 1),)))
    assert [b.plus_node for b in build.blocks] == [0, 2]


def test_instance_digest_is_stable():
    assert instance_digest(triangle_qp()) == instance_digest(triangle_qp())
    assert len(instance_digest(triangle_qp())) == 16
    assert instance_digest(triangle_qp()) != instance_digest(ADJACENT_PLUS)


def test_run_graph(write_instance):
    report = run_graph(write_instance(triangle_qp()))
    assert report.graph.model_dump() == {"V": 3, "E": 3, "L_plus": 1, "L_minus": 0, "stable_plus": True}
    assert render_text(report).splitlines()[0] == "V=3 E=3 L+=1 L-=0 stable+=true"


def test_run_check_td_with_file(write_instance, tmp_path):
    td_path = tmp_path / "td.json"
    td_path.write_text(dump_td(TreeDecomposition(bags=({0, 1, 2},))))
    report = run_check_td(write_instance(triangle_qp()), str(td_path), settings=SettingsModel())
    assert report.td.valid and report.td.C1
    assert report.td.spread == {0: 2, 1: 2, 2: 2}
    text = render_text(report)
    assert "spread: 0:2 1:2 2:2" in text
    assert "plus spread: 0:2" in text


def test_run_check_td_reports_problems(write_instance, tmp_path):
    td_path = tmp_path / "td.json"
    td_path.write_text(json.dumps({"bags": [[0, 1], [2]], "edges": [[0, 1]]}))
    report = run_check_td(write_instance(triangle_qp()), str(td_path), settings=SettingsModel())
    assert not report.td.valid
    assert "edge (0, 2) lies in no bag" in report.td.problems
    assert "td invalid:" in render_text(report)


def test_run_relax_writes_the_model(write_instance, tmp_path):
    out = tmp_path / "models" / "relax.json"
    report = run_relax(write_instance(triangle_qp()), 3, str(out), samples=200, settings=SettingsModel())
    assert report.level == 3
    assert report.model.perspectives == 1
    assert report.extra["support_inequalities"] == 26
    assert report.extra["sampled_violations"] == 0
    assert report.output == str(out)
    assert import_model(out.read_text()).counts()["linear"] == 27


def test_sampled_violations_use_the_configured_tolerances(write_instance, monkeypatch):
    seen = {}

    def record(system, columns, tol, perspective_tol):
        seen.update(tol=tol, perspective_tol=perspective_tol)
        return []

    monkeypatch.setattr(pipeline, "validate_batch", record)
    settings = SettingsModel(support_tol=1e-7, perspective_tol=1e-10)
    run_relax(write_instance(triangle_qp()), 2, samples=10, settings=settings)
    assert seen == {"tol": 1e-7, "perspective_tol": 1e-10}


def test_run_exact(write_instance, tmp_path):
    out = tmp_path / "exact.json"
    report = run_exact(write_instance(triangle_qp()), out=str(out), samples=100, settings=SettingsModel())
    assert report.model.blocks == 1
    assert report.model.variables == 12
    assert report.extra["sampled_violations"] == 0
    assert report.td.C1
    assert out.exists()


def test_run_exact_fallback(write_instance):
    report = run_exact(write_instance(ADJACENT_PLUS), fallback_level=3, settings=SettingsModel())
    assert report.fallback_level == 3
    assert report.td is None
    assert "fallback: hierarchy level 3" in render_text(report)


def test_run_oracle(write_instance):
    report = run_oracle(write_instance(triangle_qp()), SettingsModel())
    assert report.oracle == pytest.approx(-1.0)
    assert report.oracle_mode == "exact-stable"
    assert report.argmin == [1.0, 1.0, 0.0]


def test_run_oracle_grid(write_instance):
    report = run_oracle(write_instance(triangle_qp()), SettingsModel(grid_step=0.01), force_grid=True)
    assert report.oracle_mode == "grid"
    assert report.extra["grid_error_bound"] > 0
    assert "(approximate)" in render_text(report)


def test_run_witness():
    report = run_witness()
    assert report.extra["separated"] is True
    assert report.extra["lhs"] == pytest.approx(0.1875)
    assert report.extra["z012_interval"] == [0.0, 0.0]


def test_run_compare_with_null_adapter(write_instance):
    report = run_compare(write_instance(triangle_qp()), adapter="null", settings=SettingsModel())
    assert report.status == "numerical-limit"
    assert report.bound is None and report.gap is None
    assert report.oracle == pytest.approx(-1.0)


def test_compare_batch_keeps_order_and_records_failures(write_instance, tmp_path):
    paths = [
        write_instance(triangle_qp(), "a.json"),
        str(tmp_path / "missing.json"),
        write_instance(ADJACENT_PLUS, "b.json"),
    ]
    reports = compare_batch(paths, SettingsModel(max_workers=2), adapter="null")
    assert [r.instance for r in reports] == paths
    assert reports[0].error is None
    assert reports[1].error
    assert "adjacent" in reports[2].error


def test_compare_batch_fallback(write_instance):
    path = write_instance(ADJACENT_PLUS)
    [report] = compare_batch([path], SettingsModel(), adapter="null", fallback_level=2)
    assert report.error is None
    assert report.fallback_level == 2
    assert report.oracle_mode == "grid"


def test_render_json_and_csv(tmp_path):
    report = RunReport(command="compare", instance="x.json", bound=-1.5, oracle=-1.0)
    data = json.loads(render_json(report))
    assert data["gap"] == pytest.approx(0.5)

    path = tmp_path / "out" / "runs.csv"
    append_csv([report], str(path))
    append_csv([report, report], str(path))
    frame = pd.read_csv(path)
    assert len(frame) == 3
    assert list(frame["gap"]) == [0.5, 0.5, 0.5]


def test_relabelled_reports(write_instance):
    report = run_check_td(write_instance(triangle_qp()), settings=SettingsModel())
    shifted = report.relabelled(1)
    assert shifted.td.bags == [[1, 2, 3]]
    assert shifted.td.plus_spread == {1: 2}
    assert report.td.bags == [[0, 1, 2]]
    assert report.relabelled(0) is report
