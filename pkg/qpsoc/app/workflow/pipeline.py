"""
Pipelines behind the command surface: load an instance, build a relaxation or
the exact block formulation, solve it, run the oracle and compare.
"""

import hashlib
import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional

from qpsoc.app.config import SettingsModel, load_settings
from qpsoc.app.core.conic import ConicModel, assemble, export_model, get_adapter, import_model, solve
from qpsoc.app.core.decomposition import (
    Block,
    ConditionReport,
    TreeDecomposition,
    block_system,
    check_conditions,
    construct_td,
    contract_plus_subtrees,
    decompose,
    parse_td,
    stable_plus_set,
    validate_td,
    width_and_spread,
)
from qpsoc.app.core.errors import DecompositionError
from qpsoc.app.core.instance import LoopGraph, SparseQP, build_graph, dump_instance, load_instance
from qpsoc.app.core.oracle import global_min, sample_product_columns, validate_batch, witness_compare_sdp
from qpsoc.app.core.relaxation import ConstraintSystem
from qpsoc.app.core.relaxation.hierarchy import hierarchy
from qpsoc.app.services.reports import GAP_TOL, GraphSummary, ModelSummary, RunReport, TdSummary, write_text

logger = logging.getLogger(__name__)


def instance_digest(qp: SparseQP) -> str:
    return hashlib.sha256(dump_instance(qp).encode("utf-8")).hexdigest()[:16]


def graph_summary(g: LoopGraph) -> GraphSummary:
    s = g.summary()
    return GraphSummary(V=s["V"], E=s["E"], L_plus=s["L+"], L_minus=s["L-"], stable_plus=stable_plus_set(g))


def td_summary(g: LoopGraph, td: TreeDecomposition, conditions: ConditionReport) -> TdSummary:
    validity = validate_td(g, td)
    _, spread = width_and_spread(td)
    return TdSummary(
        bags=[sorted(bag) for bag in td.bags],
        edges=[list(e) for e in td.edges],
        width=conditions.width,
        spread=spread,
        plus_spread=conditions.plus_spread,
        max_plus_spread=conditions.max_plus_spread,
        C1=conditions.c1,
        C2=conditions.c2,
        C3=conditions.c3,
        bound=conditions.bound,
        estimated_size=conditions.estimated_size,
        valid=validity.valid,
        problems=validity.messages(),
    )


def model_summary(model: ConicModel, system: ConstraintSystem, blocks: int = 0) -> ModelSummary:
    counts = model.counts()
    return ModelSummary(
        variables=counts["variables"],
        linear=counts["linear"],
        cones=counts["cones"],
        auxiliaries=counts["auxiliaries"],
        perspectives=len(system.perspectives),
        blocks=blocks,
    )


def relax_pipeline(qp: SparseQP, level: int) -> tuple:
    system = hierarchy(build_graph(qp), level)
    return system, assemble(qp, system)


@dataclass
class ExactBuild:
    system: ConstraintSystem
    model: ConicModel
    td: Optional[TreeDecomposition] = None
    conditions: Optional[ConditionReport] = None
    blocks: List[Block] = field(default_factory=list)
    fallback_level: Optional[int] = None


def exact_pipeline(
    qp: SparseQP,
    td: Optional[TreeDecomposition] = None,
    strategy: str = "auto",
    bound: int = 16,
    fallback_level: Optional[int] = None,
) -> ExactBuild:
    """
    construct/validate td -> check conditions -> contract plus subtrees ->
    decompose -> per-block hulls -> assemble.
    With fallback_level set, a failed precondition builds that hierarchy level instead.
    """
    g = build_graph(qp)
    try:
        if not stable_plus_set(g):
            raise DecompositionError(
                "plus-loop nodes are adjacent; the exact formulation requires them to be "
                "pairwise non-adjacent (use --fallback-level for a hierarchy bound)"
            )
        if td is None:
            td = construct_td(g, strategy)
        validity = validate_td(g, td)
        if not validity.valid:
            raise DecompositionError("invalid tree decomposition: " + "; ".join(validity.messages()))
        conditions = check_conditions(g, td, bound)
        if not conditions.c1:
            raise DecompositionError(
                f"bag {conditions.crowded_bag} holds more than one plus-loop node"
            )
    except DecompositionError:
        if fallback_level is None:
            raise
        logger.warning("exact formulation unavailable; falling back to hierarchy level %d", fallback_level)
        system, model = relax_pipeline(qp, fallback_level)
        return ExactBuild(system=system, model=model, td=td, fallback_level=fallback_level)

    blocks = decompose(g, contract_plus_subtrees(g, td))
    system = block_system(g, blocks)
    return ExactBuild(
        system=system,
        model=assemble(qp, system),
        td=td,
        conditions=conditions,
        blocks=blocks,
    )


def _start(command: str, path: str) -> tuple:
    qp = load_instance(path)
    report = RunReport(
        command=command,
        instance=path,
        instance_digest=instance_digest(qp),
        graph=graph_summary(build_graph(qp)),
    )
    return qp, report


def run_graph(path: str) -> RunReport:
    started = time.perf_counter()
    _, report = _start("graph", path)
    report.wall_time = time.perf_counter() - started
    return report


def run_check_td(path: str, td_path: Optional[str] = None, strategy: str = "auto",
                 settings: SettingsModel = None) -> RunReport:
    settings = settings or load_settings()
    started = time.perf_counter()
    qp, report = _start("check-td", path)
    g = build_graph(qp)
    if td_path:
        with open(td_path, "r", encoding="utf-8") as f:
            td = parse_td(f.read())
    else:
        td = construct_td(g, strategy)
    report.td = td_summary(g, td, check_conditions(g, td, settings.td_budget))
    report.wall_time = time.perf_counter() - started
    return report


def sampled_violations(qp: SparseQP, system: ConstraintSystem, samples: int, settings: SettingsModel) -> int:
    """Violations of the system over product points; zero for every valid relaxation."""
    g = build_graph(qp)
    columns = sample_product_columns(g, system.monomials(), samples, settings.sample_seed)
    return len(validate_batch(system, columns, settings.support_tol, settings.perspective_tol))


def run_relax(path: str, level: int, out: Optional[str] = None, samples: int = 0,
              settings: SettingsModel = None) -> RunReport:
    settings = settings or load_settings()
    started = time.perf_counter()
    qp, report = _start("relax", path)
    system, model = relax_pipeline(qp, level)
    report.level = level
    report.model = model_summary(model, system)
    report.extra["support_inequalities"] = len(system.linear)
    if samples:
        report.extra["sampled_violations"] = sampled_violations(qp, system, samples, settings)
    if out:
        report.output = str(write_text(export_model(model), out))
    report.wall_time = time.perf_counter() - started
    return report


def _load_td(td_path: Optional[str]) -> Optional[TreeDecomposition]:
    if not td_path:
        return None
    with open(td_path, "r", encoding="utf-8") as f:
        return parse_td(f.read())


def run_exact(path: str, td_path: Optional[str] = None, strategy: str = "auto",
              out: Optional[str] = None, fallback_level: Optional[int] = None,
              samples: int = 0, settings: SettingsModel = None) -> RunReport:
    settings = settings or load_settings()
    started = time.perf_counter()
    qp, report = _start("exact", path)
    build = exact_pipeline(qp, _load_td(td_path), strategy, settings.td_budget, fallback_level)
    g = build_graph(qp)
    if build.conditions is not None:
        report.td = td_summary(g, build.td, build.conditions)
    report.fallback_level = build.fallback_level
    report.model = model_summary(build.model, build.system, len(build.blocks))
    if samples:
        report.extra["sampled_violations"] = sampled_violations(qp, build.system, samples, settings)
    if out:
        report.output = str(write_text(export_model(build.model), out))
    report.wall_time = time.perf_counter() - started
    return report


def run_solve(model_path: str, adapter: Optional[str] = None) -> RunReport:
    started = time.perf_counter()
    with open(model_path, "r", encoding="utf-8") as f:
        model = import_model(f.read())
    result = solve(model, get_adapter(adapter))
    report = RunReport(
        command="solve",
        instance=model_path,
        status=result.status,
        bound=result.objective_value,
        extra={k: v for k, v in result.solver_stats.items() if not isinstance(v, (list, dict))},
    )
    report.wall_time = time.perf_counter() - started
    return report


def run_oracle(path: str, settings: SettingsModel = None, force_grid: bool = False) -> RunReport:
    settings = settings or load_settings()
    started = time.perf_counter()
    qp, report = _start("oracle", path)
    result = global_min(
        qp,
        grid_step=settings.grid_step,
        max_free_nodes=settings.oracle_max_free_nodes,
        max_points=settings.oracle_max_points,
        force_grid=force_grid,
    )
    report.oracle = result.value
    report.oracle_mode = result.mode
    report.argmin = list(result.argmin)
    if result.mode == "grid":
        report.extra["grid_error_bound"] = result.error_bound
    report.wall_time = time.perf_counter() - started
    return report


def run_compare(path: str, mode: str = "exact", level: Optional[int] = None,
                adapter: Optional[str] = None, strategy: str = "auto",
                td_path: Optional[str] = None, fallback_level: Optional[int] = None,
                settings: SettingsModel = None) -> RunReport:
    """Solve the model for `mode` ("exact" or "relax") and compare with the oracle."""
    settings = settings or load_settings()
    started = time.perf_counter()
    qp, report = _start("compare", path)
    g = build_graph(qp)

    if mode == "relax":
        level = level or 2
        system, model = relax_pipeline(qp, level)
        report.level = level
        report.model = model_summary(model, system)
    else:
        build = exact_pipeline(qp, _load_td(td_path), strategy, settings.td_budget, fallback_level)
        model = build.model
        if build.conditions is not None:
            report.td = td_summary(g, build.td, build.conditions)
        report.fallback_level = build.fallback_level
        report.model = model_summary(model, build.system, len(build.blocks))

    result = solve(model, get_adapter(adapter, settings), settings.feasibility_tol)
    report.status = result.status
    report.bound = result.objective_value

    oracle = global_min(
        qp,
        grid_step=settings.grid_step,
        max_free_nodes=settings.oracle_max_free_nodes,
        max_points=settings.oracle_max_points,
    )
    report.oracle = oracle.value
    report.oracle_mode = oracle.mode
    report.argmin = list(oracle.argmin)

    gap = report.gap
    if gap is not None and gap < -GAP_TOL and oracle.mode == "exact-stable":
        logger.warning("bound %.12g exceeds the oracle minimum %.12g", report.bound, report.oracle)
    report.wall_time = time.perf_counter() - started
    return report


def run_witness() -> RunReport:
    started = time.perf_counter()
    w = witness_compare_sdp()
    report = RunReport(
        command="witness",
        extra={
            "lhs": w.lhs,
            "rhs": w.rhs,
            "separated": w.separated,
            "mccormick_ok": w.mccormick_ok,
            "triangle_ok": w.triangle_ok,
            "ldl_error": w.ldl_error,
            "d_nonnegative": w.d_nonnegative,
            "z012_interval": list(w.z012_interval),
            "loop_upper_ok": w.loop_upper_ok,
            "extended_triangle_weight2": list(w.extended_triangle_weight2),
            "extended_triangle_weight4": list(w.extended_triangle_weight4),
        },
    )
    report.wall_time = time.perf_counter() - started
    return report
