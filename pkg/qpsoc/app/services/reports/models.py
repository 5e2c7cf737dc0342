from typing import Any, Dict, List, Optional

from pydantic import BaseModel

GAP_TOL = 1e-6


class GraphSummary(BaseModel):
    V: int
    E: int
    L_plus: int
    L_minus: int
    stable_plus: bool


class TdSummary(BaseModel):
    bags: List[List[int]]
    edges: List[List[int]] = []
    width: int
    spread: Dict[int, int] = {}
    plus_spread: Dict[int, int] = {}
    max_plus_spread: int = 0
    C1: bool = True
    C2: bool = True
    C3: bool = True
    bound: int
    estimated_size: int
    valid: bool = True
    problems: List[str] = []


class ModelSummary(BaseModel):
    variables: int
    linear: int
    cones: int
    auxiliaries: int
    perspectives: int = 0
    blocks: int = 0


class RunReport(BaseModel):
    command: str
    invocation: Optional[str] = None        # full command line, flags included
    instance: Optional[str] = None
    instance_digest: Optional[str] = None
    graph: Optional[GraphSummary] = None
    td: Optional[TdSummary] = None
    model: Optional[ModelSummary] = None
    level: Optional[int] = None
    fallback_level: Optional[int] = None
    status: Optional[str] = None            # solver status
    bound: Optional[float] = None
    oracle: Optional[float] = None
    oracle_mode: Optional[str] = None       # exact-stable | grid (approximate)
    argmin: Optional[List[float]] = None
    wall_time: float = 0.0
    output: Optional[str] = None
    error: Optional[str] = None
    extra: Dict[str, Any] = {}

    @property
    def gap(self) -> Optional[float]:
        if self.bound is None or self.oracle is None:
            return None
        return self.oracle - self.bound

    def relabelled(self, offset: int) -> "RunReport":
        """Copy with node labels shifted by offset (1 for one-based output)."""
        if not offset or self.td is None:
            return self
        td = self.td.model_copy(update={
            "bags": [[v + offset for v in bag] for bag in self.td.bags],
            "spread": {v + offset: s for v, s in self.td.spread.items()},
            "plus_spread": {v + offset: s for v, s in self.td.plus_spread.items()},
        })
        return self.model_copy(update={"td": td})

    def flat_row(self) -> Dict[str, Any]:
        """One CSV row: scalars only."""
        row = {
            "command": self.command,
            "invocation": self.invocation,
            "instance": self.instance,
            "instance_digest": self.instance_digest,
            "level": self.level,
            "status": self.status,
            "bound": self.bound,
            "oracle": self.oracle,
            "oracle_mode": self.oracle_mode,
            "gap": self.gap,
            "wall_time": self.wall_time,
            "error": self.error,
        }
        for prefix, part in (("graph", self.graph), ("model", self.model)):
            if part is not None:
                row.update({f"{prefix}_{k}": v for k, v in part.model_dump().items()})
        if self.td is not None:
            row.update({
                "td_width": self.td.width,
                "td_max_plus_spread": self.td.max_plus_spread,
                "td_C1": self.td.C1,
                "td_C2": self.td.C2,
                "td_C3": self.td.C3,
            })
        return row
