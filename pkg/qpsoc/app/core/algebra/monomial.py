"""
Monomial variables and RLT linear forms.

A monomial z_S stands for the product of the node variables in S; a loop
variable z_ii stands for z_i squared. The empty monomial is the constant 1 and
is never materialised as a Monomial. Auxiliary variables (the t(J) of lifted
perspective inequalities) share the LinearForm algebra.

Subsets of a block are enumerated as machine words (bit b <-> b-th node of the
sorted block), so a block holds at most MAX_BLOCK_NODES nodes.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

import numpy as np

from qpsoc.app.core.errors import MonomialError, SupportViolationError

MAX_BLOCK_NODES = 63
PERSPECTIVE_TOL = 1e-12


@dataclass(frozen=True)
class Monomial:
    nodes: Tuple[int, ...]
    loop: bool = False

    @classmethod
    def subset(cls, nodes: Iterable[int]) -> "Monomial":
        canonical = tuple(sorted(set(nodes)))
        if not canonical:
            raise MonomialError("the empty monomial is the constant 1")
        return cls(canonical)

    @classmethod
    def node(cls, i: int) -> "Monomial":
        return cls((i,))

    @classmethod
    def loop_of(cls, i: int) -> "Monomial":
        return cls((i,), loop=True)

    @property
    def kind(self) -> str:
        if self.loop:
            return "loop"
        return "node" if len(self.nodes) == 1 else "subset"

    @property
    def name(self) -> str:
        if self.loop:
            return f"zz_{self.nodes[0]}"
        return "z_" + "_".join(str(i) for i in self.nodes)

    def sort_key(self) -> tuple:
        rank = {"node": 0, "subset": 1, "loop": 2}[self.kind]
        return (rank, len(self.nodes), self.nodes)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Auxiliary:
    """Auxiliary scalar t(J) introduced when lifting to rotated cones."""
    name: str

    kind = "auxiliary"

    def sort_key(self) -> tuple:
        return (3, 0, self.name)

    def __str__(self) -> str:
        return self.name


Variable = Union[Monomial, Auxiliary]


@dataclass(frozen=True)
class LinearForm:
    """constant + sum(coeff * variable); zero coefficients are never stored."""
    constant: float = 0.0
    terms: Mapping[Variable, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "terms", {v: c for v, c in self.terms.items() if c != 0}
        )

    @classmethod
    def of(cls, variable: Variable, coeff: float = 1.0) -> "LinearForm":
        return cls(0.0, {variable: coeff})

    def __add__(self, other: "LinearForm") -> "LinearForm":
        terms = dict(self.terms)
        for v, c in other.terms.items():
            terms[v] = terms.get(v, 0.0) + c
        return LinearForm(self.constant + other.constant, terms)

    def __neg__(self) -> "LinearForm":
        return self.scaled(-1.0)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def scaled(self, factor: float) -> "LinearForm":
        return LinearForm(
            self.constant * factor, {v: c * factor for v, c in self.terms.items()}
        )

    def variables(self) -> frozenset:
        return frozenset(self.terms)

    def key(self) -> tuple:
        items = sorted(self.terms.items(), key=lambda item: item[0].sort_key())
        return (self.constant, tuple(items))

    def __hash__(self) -> int:
        return hash(self.key())

    def __str__(self) -> str:
        parts = []
        if self.constant != 0 or not self.terms:
            parts.append(f"{self.constant:g}")
        for v, c in sorted(self.terms.items(), key=lambda item: item[0].sort_key()):
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c):g}*"
            parts.append(f"{sign} {mag}{v}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text


def subsets(nodes: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """All subsets of `nodes` in bitmask order (bit b <-> nodes[b])."""
    nodes = tuple(nodes)
    if len(nodes) > MAX_BLOCK_NODES:
        raise MonomialError(
            f"block of {len(nodes)} nodes exceeds the {MAX_BLOCK_NODES}-node cap"
        )
    for mask in range(1 << len(nodes)):
        yield tuple(nodes[b] for b in range(len(nodes)) if mask >> b & 1)


def ell(j1: Iterable[int], j2: Iterable[int]) -> LinearForm:
    """
    Linearised polynomial factor prod_{J1} z_i prod_{J2} (1 - z_i):
        sum_{t subset J2} (-1)^|t| z_{J1 u t}
    """
    j1 = frozenset(j1)
    j2 = tuple(sorted(set(j2)))
    if j1 & set(j2):
        raise MonomialError(f"J1={sorted(j1)} and J2={list(j2)} overlap")
    if len(j1) + len(j2) > MAX_BLOCK_NODES:
        raise MonomialError(
            f"|J1 u J2| = {len(j1) + len(j2)} exceeds the {MAX_BLOCK_NODES}-node cap"
        )

    constant = 0.0
    terms: Dict[Variable, float] = {}
    for t in subsets(j2):
        sign = -1.0 if len(t) % 2 else 1.0
        union = j1.union(t)
        if not union:
            constant += sign
        else:
            m = Monomial.subset(union)
            terms[m] = terms.get(m, 0.0) + sign
    return LinearForm(constant, terms)


def evaluate(f: LinearForm, point: Mapping[Variable, object]):
    """
    constant + sum(coeff * point[v]).
    Values may be floats or numpy arrays (one entry per sampled point).
    """
    value = f.constant
    for v, c in f.terms.items():
        try:
            value = value + c * point[v]
        except KeyError:
            raise MonomialError(f"variable {v} is not assigned") from None
    return value


def product_point(z, monomials: Iterable[Variable]) -> Dict[Monomial, object]:
    """
    Assign z_S = prod_{i in S} z_i and z_ii = z_i ** 2.
    `z` is indexable by node (sequence or mapping); entries may be arrays.
    """
    point = {}
    for m in monomials:
        if not isinstance(m, Monomial):
            continue
        if m.loop:
            point[m] = z[m.nodes[0]] * z[m.nodes[0]]
        else:
            point[m] = math.prod((z[i] for i in m.nodes), start=1.0)
    return point


def perspective_value(u: float, v: float, tol: float = PERSPECTIVE_TOL) -> float:
    """Closure of u^2 / v; math.inf marks u != 0 with v = 0."""
    if v < -tol:
        raise SupportViolationError(
            f"denominator {v:.3e} is negative: support inequality violated"
        )
    if v > tol:
        return u * u / v
    if abs(u) <= tol:
        return 0.0
    return math.inf


def perspective_values(u, v, tol: float = PERSPECTIVE_TOL) -> np.ndarray:
    """Elementwise perspective_value over arrays."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(v < -tol):
        raise SupportViolationError(
            f"denominator {float(v.min()):.3e} is negative: support inequality violated"
        )
    positive = v > tol
    safe = np.where(positive, v, 1.0)
    boundary = np.where(np.abs(u) <= tol, 0.0, np.inf)
    return np.where(positive, u * u / safe, boundary)
