"""Canonical model graphs of the three families and the auxiliary graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

from .graph_core import DirectedMultigraph, Edge


class FamilyParamError(ValueError):
    pass


def _clean(d: Mapping[int, int]) -> Dict[int, int]:
    return {int(k): int(v) for k, v in sorted(d.items()) if int(v) != 0}


@dataclass(frozen=True)
class FamilyIParams:
    """Number ``s[l]`` of return loops of length ``l`` at the root."""

    s: Mapping[int, int]

    def __post_init__(self) -> None:
        s = _clean(self.s)
        if any(k < 1 or v < 0 for k, v in s.items()):
            raise FamilyParamError(f"family I data must be non-negative on lengths >= 1: {s}")
        if sum(s.values()) <= 1:
            raise FamilyParamError("family I needs more than one return loop in total")
        object.__setattr__(self, "s", s)

    def to_json(self) -> dict:
        return {"family": "I", "S": {str(k): v for k, v in self.s.items()}}


@dataclass(frozen=True)
class FamilyIIParams:
    r: int
    q: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        q = _clean(self.q)
        if self.r < 0 or any(k < 1 or v < 0 for k, v in q.items()):
            raise FamilyParamError(f"family II data must be non-negative: R={self.r}, Q={q}")
        if self.r + sum(q.values()) <= 1:
            raise FamilyParamError("family II needs R + sum(Q) > 1")
        object.__setattr__(self, "q", q)

    def to_json(self) -> dict:
        return {"family": "II", "R": self.r, "Q": {str(k): v for k, v in self.q.items()}}


@dataclass(frozen=True)
class FamilyIIIParams:
    ell: int
    m: int

    def __post_init__(self) -> None:
        if self.ell < 2 or self.m < 1:
            raise FamilyParamError(f"family III needs ell >= 2 and M >= 1 (got {self.ell}, {self.m})")

    def to_json(self) -> dict:
        return {"family": "III", "ell": self.ell, "M": self.m}


TWO_THEN_M = "TwoThenM"
M_THEN_TWO = "MThenTwo"


@dataclass(frozen=True)
class AuxParams:
    variant: str
    ell: int
    big_l: int
    m: int

    def __post_init__(self) -> None:
        if self.variant not in (TWO_THEN_M, M_THEN_TWO):
            raise FamilyParamError(f"unknown auxiliary variant {self.variant!r}")
        if self.ell < 4 or not 0 <= self.big_l < self.ell - 2 or self.m < 1:
            raise FamilyParamError(
                f"auxiliary graphs need ell >= 4, 0 <= L < ell - 2, M >= 1 (got {self.ell}, {self.big_l}, {self.m})"
            )

    def to_json(self) -> dict:
        return {"family": "aux", "variant": self.variant, "ell": self.ell, "L": self.big_l, "M": self.m}


class _Builder:
    def __init__(self) -> None:
        self.vertices: List[str] = []
        self.edges: List[Edge] = []

    def v(self, name: str) -> str:
        self.vertices.append(name)
        return name

    def e(self, name: str, s: str, t: str) -> None:
        self.edges.append(Edge(name, s, t))

    def graph(self) -> DirectedMultigraph:
        return DirectedMultigraph(tuple(self.vertices), tuple(self.edges))


def build_family_I(p: FamilyIParams) -> DirectedMultigraph:
    b = _Builder()
    root = b.v("V0")
    for ell, count in p.s.items():
        for s in range(1, count + 1):
            prev = root
            for t in range(1, ell):
                cur = b.v(f"V{ell}.{s}.{t}")
                b.e(f"f{ell}.{s}.{t}", prev, cur)
                prev = cur
            b.e(f"e{ell}.{s}", prev, root)
    return b.graph()


def build_family_II(p: FamilyIIParams) -> DirectedMultigraph:
    b = _Builder()
    root = b.v("V(0)")
    for r in range(1, p.r + 1):
        b.e(f"e{r}", root, root)
    for big_m, count in p.q.items():
        for q in range(1, count + 1):
            leaf = b.v(f"V{big_m}.{q}(1)")
            b.e(f"f{big_m}.{q}", root, leaf)
            for m in range(1, big_m + 1):
                b.e(f"e{big_m}.{q}.{m}", leaf, root)
    return b.graph()


def build_family_III(p: FamilyIIIParams) -> DirectedMultigraph:
    b = _Builder()
    root = b.v("V(0)")
    for side in (0, 1):
        prev = root
        for lvl in range(1, p.ell):
            cur = b.v(f"V{side}({lvl})")
            b.e(f"f{side}({lvl})", prev, cur)
            prev = cur
        for m in range(1, p.m + 1):
            b.e(f"e{side}({m})", prev, root)
    return b.graph()


def build_aux(p: AuxParams) -> DirectedMultigraph:
    """Single-subtree graphs with a trunk of length L before the branching.

    ``TwoThenM``: the trunk splits in two, each half then splits into M chains.
    ``MThenTwo``: the trunk splits into M, each of those then splits in two.
    Every leaf sits at level ``ell - 1`` and carries one return edge.
    """
    ell, big_l, big_m = p.ell, p.big_l, p.m
    b = _Builder()
    trunk = [b.v("V(0)")]
    for lvl in range(1, big_l + 1):
        trunk.append(b.v(f"V({lvl})"))
        b.e(f"f({lvl})", trunk[-2], trunk[-1])
    top = trunk[-1]
    # starts[(side, m)] = vertex at level L+1 from which chain (side, m) continues
    starts: Dict[Tuple[int, int], str] = {}
    if p.variant == TWO_THEN_M:
        for side in (0, 1):
            mid = b.v(f"V{side}({big_l + 1})")
            b.e(f"f{side}({big_l + 1})", top, mid)
            for m in range(1, big_m + 1):
                starts[(side, m)] = mid
    else:
        for m in range(1, big_m + 1):
            mid = b.v(f"V({big_l + 1},{m})")
            b.e(f"f({big_l + 1},{m})", top, mid)
            for side in (0, 1):
                starts[(side, m)] = mid
    for (side, m), prev in sorted(starts.items()):
        for lvl in range(big_l + 2, ell):
            cur = b.v(f"V{side}({lvl},{m})")
            b.e(f"f{side}({lvl},{m})", prev, cur)
            prev = cur
        b.e(f"e{side}({m})", prev, trunk[0])
    return b.graph()


def dyck_graph(n: int) -> DirectedMultigraph:
    """One vertex with ``n`` loops ``a, b, c, ...``."""
    names = [chr(ord("a") + i) for i in range(n)] if n <= 26 else [f"a{i}" for i in range(n)]
    return DirectedMultigraph.build(["V0"], [(x, "V0", "V0") for x in names])
