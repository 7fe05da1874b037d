"""Exact arithmetic in the graph inverse semigroup of a directed multigraph.

A nonzero element is kept in normal form ``NF(up, base, down)``: ``up`` and
``down`` are directed paths in the graph that both leave ``base``.  As a word
the element reads ``reversed(up)`` as plus letters followed by ``down`` as minus
letters, i.e. a plus block, the idempotent at ``base`` and a minus block.

Minus letters push an edge onto ``down``, plus letters pop it again (the
relation ``f- g+ = 1_{s(f)}`` if ``f == g`` else ``0``), so reduction is a
bracket-matching stack machine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from .graph_core import ContractionData, DirectedMultigraph

MINUS = "-"
PLUS = "+"


class Letter(NamedTuple):
    edge: str
    sign: str

    def __str__(self) -> str:
        return f"{self.edge}{self.sign}"

    def inverse(self) -> "Letter":
        return Letter(self.edge, PLUS if self.sign == MINUS else MINUS)


Word = Tuple[Letter, ...]


class NF(NamedTuple):
    up: Tuple[str, ...]
    base: str
    down: Tuple[str, ...]

    def __str__(self) -> str:
        return f"[{' '.join(self.up)} | {self.base} | {' '.join(self.down)}]"

    @property
    def is_vertex_idempotent(self) -> bool:
        return not self.up and not self.down


class _Singleton:
    __slots__ = ("_name",)

    def __init__(self, name: str) -> None:
        self._name = name

    def __repr__(self) -> str:
        return self._name

    def __reduce__(self):
        return self._name


ZERO = _Singleton("ZERO")
#: value of the empty word; multiplying by it is a no-op
IDENTITY = _Singleton("IDENTITY")

Element = Union[NF, _Singleton]


class UnknownEdgeError(KeyError):
    pass


def parse_word(text: str) -> Word:
    """Parse ``"a- b+ f0-"`` into letters."""
    letters = []
    for tok in text.split():
        if len(tok) < 2 or tok[-1] not in (MINUS, PLUS):
            raise ValueError(f"bad letter token {tok!r}; expected edgeId- or edgeId+")
        letters.append(Letter(tok[:-1], tok[-1]))
    return tuple(letters)


def format_word(w: Iterable[Letter]) -> str:
    return " ".join(str(x) for x in w)


def format_element(x: Element) -> str:
    if x is ZERO:
        return "0"
    if x is IDENTITY:
        return "1"
    return str(x)


def alphabet(g: DirectedMultigraph) -> Tuple[Letter, ...]:
    return tuple(Letter(e, s) for e in g.edge_ids for s in (MINUS, PLUS))


def vertex_idempotent(v: str) -> NF:
    return NF((), v, ())


def letter_source(g: DirectedMultigraph, a: Letter) -> str:
    return g.src[a.edge] if a.sign == MINUS else g.tgt[a.edge]


def letter_target(g: DirectedMultigraph, a: Letter) -> str:
    return g.tgt[a.edge] if a.sign == MINUS else g.src[a.edge]


def element_source(g: DirectedMultigraph, x: NF) -> str:
    return g.tgt[x.up[-1]] if x.up else x.base


def element_target(g: DirectedMultigraph, x: NF) -> str:
    return g.tgt[x.down[-1]] if x.down else x.base


_new = tuple.__new__


def step(g: DirectedMultigraph, x: Element, a: Letter) -> Element:
    """Right-multiply ``x`` by a single letter."""
    if x is ZERO:
        return ZERO
    e, sign = a
    if x is IDENTITY:
        if e not in g.src:
            raise UnknownEdgeError(e)
        return _new(NF, ((), g.src[e], (e,))) if sign == MINUS else _new(NF, ((e,), g.src[e], ()))
    up, base, down = x
    if sign == MINUS:
        end = g.tgt[down[-1]] if down else base
        if g.src[e] != end:
            return ZERO
        return _new(NF, (up, base, down + (e,)))
    if down:
        return _new(NF, (up, base, down[:-1])) if down[-1] == e else ZERO
    if g.tgt[e] != base:
        return ZERO
    return _new(NF, ((e,) + up, g.src[e], ()))


def reduce(w: Iterable[Letter], g: DirectedMultigraph) -> Element:
    x: Element = IDENTITY
    for a in w:
        if a.edge not in g.src:
            raise UnknownEdgeError(a.edge)
        x = step(g, x, a)
        if x is ZERO:
            return ZERO
    return x


def serialize(x: Element) -> Word:
    """Letters of the normal form; inverse of :func:`reduce` on nonzero elements."""
    if x is IDENTITY:
        return ()
    if x is ZERO:
        raise ValueError("zero has no word representative")
    return tuple(Letter(e, PLUS) for e in reversed(x.up)) + tuple(Letter(e, MINUS) for e in x.down)


def multiply(g: DirectedMultigraph, x: Element, y: Element) -> Element:
    if x is ZERO or y is ZERO:
        return ZERO
    if x is IDENTITY:
        return y
    if y is IDENTITY:
        return x
    a, v, b = x
    c, w, d = y
    if element_target(g, x) != (g.tgt[c[-1]] if c else w):
        return ZERO
    i, j = len(b), len(c)
    while i and j:
        if b[i - 1] != c[j - 1]:
            return ZERO
        i -= 1
        j -= 1
    if j == 0:
        return NF(a, v, b[:i] + d)
    return NF(c[:j] + a, w, d)


def power(g: DirectedMultigraph, x: Element, k: int) -> Element:
    y: Element = IDENTITY
    for _ in range(k):
        y = multiply(g, y, x)
        if y is ZERO:
            break
    return y


def invert(w: Sequence[Letter]) -> Word:
    return tuple(a.inverse() for a in reversed(w))


@dataclass(frozen=True)
class PowerClass:
    kind: str  # "nilpotent" | "idempotent" | "down_excess" | "up_excess"
    cycle: Tuple[str, ...] = ()

    @property
    def stable(self) -> bool:
        """All powers are nonzero."""
        return self.kind != "nilpotent"


NILPOTENT = PowerClass("nilpotent")
IDEMPOTENT = PowerClass("idempotent")


def classify_powers(g: DirectedMultigraph, x: Element) -> PowerClass:
    """Decide the behaviour of ``x**k`` from the normal form alone.

    ``x = NF(A, V, B)`` squares to a nonzero element only if one of ``A``, ``B``
    is a suffix of the other; the leftover prefix ``gamma`` is then a cycle at
    ``V`` and ``x**k = NF(A, V, gamma**(k-1) B)`` (or its mirror image).
    """
    if x is ZERO or x is IDENTITY:
        raise ValueError("classify_powers needs a nonzero normal form")
    up, base, down = x
    if up == down:
        return IDEMPOTENT
    if element_target(g, x) != element_source(g, x):
        return NILPOTENT
    if len(down) > len(up) and down[len(down) - len(up):] == up:
        return PowerClass("down_excess", down[: len(down) - len(up)])
    if len(up) > len(down) and up[len(up) - len(down):] == down:
        return PowerClass("up_excess", up[: len(up) - len(down)])
    return NILPOTENT


# -- the contraction homomorphism ---------------------------------------------------------


def lambda_image(w: Iterable[Letter], cd: ContractionData) -> Element:
    """Image of a word in the semigroup of the contracted graph."""
    gh = cd.contracted
    x: Element = IDENTITY
    for a in w:
        kind, target = cd.lambda_edge[a.edge]
        if kind == "idem":
            x = multiply(gh, x, vertex_idempotent(target))
        else:
            x = step(gh, x, a)
        if x is ZERO:
            return ZERO
    return x


def lambda_element(x: Element, cd: ContractionData) -> Element:
    """Image of a nonzero element (via its normal-form word)."""
    if x is IDENTITY:
        return IDENTITY
    y = lambda_image(serialize(x), cd)
    if y is IDENTITY:
        # the normal form consisted of tree letters only, or was a vertex idempotent
        return vertex_idempotent(cd.tree_of[x.base])
    return y


def negative_multiplier(x: Element, cd: ContractionData) -> Optional[Tuple[str, int]]:
    """``(e, M)`` if the periodic points over ``x`` have negative multiplier ``e``.

    The point has multiplier ``e`` iff the image of ``x`` in the contracted
    semigroup has a pure minus excess cycle made only of ``e``.
    """
    y = lambda_element(x, cd)
    if not isinstance(y, NF):
        return None
    pc = classify_powers(cd.contracted, y)
    if pc.kind != "down_excess":
        return None
    e = pc.cycle[0]
    if any(c != e for c in pc.cycle):
        return None
    return e, len(pc.cycle)


def pure_negative_power(y: Element) -> Optional[Tuple[str, int]]:
    """``(e, M)`` if ``y == NF((), R, (e,)*M)`` with ``M >= 1``."""
    if not isinstance(y, NF) or y.up or not y.down:
        return None
    e = y.down[0]
    if any(c != e for c in y.down):
        return None
    return e, len(y.down)
