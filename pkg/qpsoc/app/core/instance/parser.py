"""
QP instance parsing.

Instance JSON schema:
    {"n": int, "q": [[i, j, value], ...], "c": [n reals]}
Entries with i == j are diagonal coefficients; off-diagonal pairs are stored
once (symmetry is implicit, the objective uses 2 * q_ij).
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Tuple

from pydantic import BaseModel, Field, ValidationError

from qpsoc.app.core.errors import InstanceError

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


class InstanceDocument(BaseModel):
    """Wire format of an instance file."""
    n: int = Field(gt=0)
    q: List[Tuple[int, int, float]] = []
    c: List[float]


@dataclass(frozen=True)
class SparseQP:
    """min z'Qz + c'z over the unit box, Q symmetric and sparse."""
    n: int
    q_diag: Mapping[int, float] = field(default_factory=dict)
    q_off: Mapping[Pair, float] = field(default_factory=dict)
    c: Tuple[float, ...] = ()

    def objective(self, z: Sequence[float]) -> float:
        """Evaluate z'Qz + c'z."""
        value = sum(self.c[i] * z[i] for i in range(self.n))
        value += sum(q * z[i] * z[i] for i, q in self.q_diag.items())
        value += sum(2.0 * q * z[i] * z[j] for (i, j), q in self.q_off.items())
        return value

    def to_document(self) -> InstanceDocument:
        entries = [(i, i, q) for i, q in sorted(self.q_diag.items())]
        entries += [(i, j, q) for (i, j), q in sorted(self.q_off.items())]
        return InstanceDocument(n=self.n, q=entries, c=list(self.c))


def make_qp(
    n: int,
    diag: Mapping[int, float] = None,
    off: Mapping[Pair, float] = None,
    c: Sequence[float] = None,
) -> SparseQP:
    """
    Build a SparseQP from python mappings, applying the ingest rules
    (index checks, pair canonicalisation, zero filtering).
    """
    entries = [(i, i, q) for i, q in (diag or {}).items()]
    entries += [(i, j, q) for (i, j), q in (off or {}).items()]
    document = InstanceDocument(n=n, q=entries, c=list(c) if c is not None else [0.0] * n)
    return from_document(document)


def from_document(document: InstanceDocument) -> SparseQP:
    n = document.n

    if len(document.c) != n:
        raise InstanceError(f"c has {len(document.c)} entries, expected n={n}")

    seen: Dict[Tuple[int, int], float] = {}
    q_diag: Dict[int, float] = {}
    q_off: Dict[Pair, float] = {}

    for i, j, value in document.q:
        if not (0 <= i < n and 0 <= j < n):
            raise InstanceError(f"index out of range: ({i}, {j}) with n={n}")
        if (i, j) in seen:
            raise InstanceError(f"duplicate entry ({i}, {j})")
        if (j, i) in seen and i != j:
            if seen[(j, i)] != value:
                raise InstanceError(
                    f"non-symmetric entries ({j}, {i})={seen[(j, i)]} and ({i}, {j})={value}"
                )
            logger.debug("Symmetric restatement of (%d, %d) ignored", i, j)
            continue
        seen[(i, j)] = value

        # Sparsity is exact nonzeroness
        if value == 0.0:
            continue
        if i == j:
            q_diag[i] = float(value)
        else:
            q_off[(min(i, j), max(i, j))] = float(value)

    return SparseQP(
        n=n,
        q_diag=q_diag,
        q_off=q_off,
        c=tuple(float(v) for v in document.c),
    )


def parse_instance(text: str) -> SparseQP:
    """Parse an instance JSON document into a SparseQP."""
    try:
        document = InstanceDocument.model_validate_json(text)
    except ValidationError as e:
        raise InstanceError(f"malformed instance document: {e}") from e
    return from_document(document)


def load_instance(path: str) -> SparseQP:
    with open(path, "r", encoding="utf-8") as f:
        return parse_instance(f.read())


def dump_instance(qp: SparseQP) -> str:
    return json.dumps(qp.to_document().model_dump())
