"""
Report output: text rendering, JSON mirror and CSV rows through pandas.
"""

import json
import logging
from pathlib import Path
from typing import Iterable, List

import pandas as pd

from qpsoc.app.services.reports.models import RunReport

logger = logging.getLogger(__name__)


def fmt(value, digits: int = 12) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)


def render_text(report: RunReport, digits: int = 12) -> str:
    lines: List[str] = []
    if report.graph is not None:
        g = report.graph
        lines.append(
            f"V={g.V} E={g.E} L+={g.L_plus} L-={g.L_minus} stable+={fmt(g.stable_plus)}"
        )
    if report.td is not None:
        td = report.td
        lines.append(
            f"td: bags={len(td.bags)} width={td.width} max_plus_spread={td.max_plus_spread} "
            f"C1={fmt(td.C1)} C2={fmt(td.C2)} C3={fmt(td.C3)} bound={td.bound} "
            f"estimated_size={td.estimated_size}"
        )
        if not td.valid:
            lines.append("td invalid: " + "; ".join(td.problems))
        if td.spread:
            lines.append("spread: " + " ".join(f"{v}:{s}" for v, s in sorted(td.spread.items())))
        if td.plus_spread:
            spreads = " ".join(f"{v}:{s}" for v, s in sorted(td.plus_spread.items()))
            lines.append(f"plus spread: {spreads}")
    if report.model is not None:
        m = report.model
        lines.append(
            f"model: variables={m.variables} linear={m.linear} cones={m.cones} "
            f"auxiliaries={m.auxiliaries} perspectives={m.perspectives} blocks={m.blocks}"
        )
    if report.fallback_level is not None:
        lines.append(f"fallback: hierarchy level {report.fallback_level}")
    if report.status is not None:
        lines.append(f"status: {report.status}")
    if report.bound is not None:
        lines.append(f"bound: {fmt(report.bound, digits)}")
    if report.oracle is not None:
        suffix = " (approximate)" if report.oracle_mode == "grid" else ""
        lines.append(f"oracle: {fmt(report.oracle, digits)} [{report.oracle_mode}]{suffix}")
    if report.gap is not None:
        lines.append(f"gap: {fmt(report.gap, digits)}")
    for key, value in report.extra.items():
        if isinstance(value, (list, tuple)):
            value = ", ".join(fmt(v, digits) for v in value)
        lines.append(f"{key}: {fmt(value, digits)}")
    if report.output:
        lines.append(f"written: {report.output}")
    if report.error:
        lines.append(f"error: {report.error}")
    if report.invocation:
        lines.append(f"command: {report.invocation}")
    lines.append(f"wall_time: {report.wall_time:.3f}s")
    return "\n".join(lines)


def render_json(report: RunReport) -> str:
    data = report.model_dump()
    data["gap"] = report.gap
    return json.dumps(data, indent=2)


def append_csv(reports: Iterable[RunReport], path: str) -> Path:
    """
    Append one row per report. Rows from different commands carry different
    columns, so the file keeps the union: when a report brings new columns the
    file is rewritten under the wider header.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame([r.flat_row() for r in reports])
    if not path.exists() or path.stat().st_size == 0:
        df.to_csv(path, index=False)
        return path

    header = list(pd.read_csv(path, nrows=0).columns)
    new_columns = [c for c in df.columns if c not in header]
    if not new_columns:
        df.reindex(columns=header).to_csv(path, mode="a", header=False, index=False)
        return path

    logger.debug("Widening %s with columns %s", path, new_columns)
    existing = pd.read_csv(path)
    combined = pd.concat([existing, df], ignore_index=True)
    combined.reindex(columns=header + new_columns).to_csv(path, index=False)
    return path


def write_text(text: str, path: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
