"""Periodic points of the Markov-Dyck shift: classification and exact counting.

A word ``w`` of length ``n`` stands for the periodic point ``...www...``.  It is
a point of the shift iff every power of its product is nonzero, it is neutral
iff its product is idempotent, and it has negative multiplier ``e`` iff the
image of its product in the contracted semigroup has a minus excess made of
``e`` alone.  Two counters are provided: a transfer DP over normal forms and a
brute-force word enumeration that works letter by letter from the definitions.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .graph_core import ContractionData, DirectedMultigraph
from .semigroup import (
    IDENTITY,
    MINUS,
    NF,
    PLUS,
    ZERO,
    Element,
    Letter,
    Word,
    alphabet,
    classify_powers,
    element_source,
    element_target,
    format_word,
    lambda_image,
    letter_source,
    multiply,
    negative_multiplier,
    power,
    pure_negative_power,
    reduce,
    step,
    vertex_idempotent,
)
from .series import FormalPowerSeries

DEFAULT_STATE_CAP = 2_000_000
DEFAULT_MULTIPLIER_HORIZON = 12


class CountingResourceError(RuntimeError):
    def __init__(self, n: int, states: int, cap: int) -> None:
        super().__init__(f"state cap exceeded at n={n}: {states} states > cap {cap}")
        self.n = n
        self.states = states
        self.cap = cap


class NeutralVertexConflict(AssertionError):
    """Two rotations of one word reduce to idempotents at different vertices."""


# -- number theory helpers ----------------------------------------------------------------


def divisors(n: int) -> List[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def mobius(n: int) -> int:
    result, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            result = -result
        k += 1
    return -result if n > 1 else result


def least_from_fixed(fixed: Mapping[int, int], n: int) -> int:
    """Points of least period ``n`` from counts of points fixed by ``S^d``."""
    return sum(mobius(n // d) * fixed.get(d, 0) for d in divisors(n))


def least_period(w: Sequence) -> int:
    n = len(w)
    for d in divisors(n):
        if all(w[i] == w[i % d] for i in range(n)):
            return d
    return n


def rotations(w: Sequence[Letter]) -> Iterator[Tuple[int, Word]]:
    w = tuple(w)
    for i in range(len(w)):
        yield i, w[i:] + w[:i]


# -- single words ------------------------------------------------------------------------


def is_admissible(w: Sequence[Letter], g: DirectedMultigraph) -> bool:
    return reduce(w, g) is not ZERO


@dataclass(frozen=True)
class PeriodicWordInfo:
    word: Word
    is_point: bool
    least_period: int
    neutral_vertex: Optional[str] = None
    neutral_root: Optional[str] = None
    negative_multiplier: Optional[Tuple[str, int]] = None

    @property
    def neutral(self) -> bool:
        return self.neutral_vertex is not None

    def to_json(self) -> dict:
        return {
            "word": format_word(self.word),
            "is_point": self.is_point,
            "least_period": self.least_period,
            "neutral_vertex": self.neutral_vertex,
            "neutral_root": self.neutral_root,
            "negative_multiplier": list(self.negative_multiplier) if self.negative_multiplier else None,
        }


def analyze_periodic_word(w: Sequence[Letter], g: DirectedMultigraph, cd: ContractionData) -> PeriodicWordInfo:
    """Classify the periodic point carried by ``w`` by inspecting its rotations."""
    w = tuple(w)
    if not w:
        raise ValueError("periodic word must be nonempty")
    pi = least_period(w)
    x = reduce(w, g)
    if x is ZERO or not classify_powers(g, x).stable:
        return PeriodicWordInfo(w, False, pi)
    window = w[:pi]
    vertices = set()
    for _, r in rotations(window):
        y = reduce(r, g)
        if isinstance(y, NF) and y.is_vertex_idempotent:
            vertices.add(y.base)
    if len(vertices) > 1:
        raise NeutralVertexConflict(f"word {format_word(w)} is neutral at {sorted(vertices)}")
    if vertices:
        (v,) = vertices
        return PeriodicWordInfo(w, True, pi, v, cd.tree_of[v])
    multipliers = set()
    for _, r in rotations(window):
        m = pure_negative_power(lambda_image(r, cd))
        if m is not None:
            multipliers.add(m)
    if len({e for e, _ in multipliers}) > 1:
        raise AssertionError(f"word {format_word(w)} has several negative multipliers {sorted(multipliers)}")
    mult = min(multipliers) if multipliers else None
    return PeriodicWordInfo(w, True, pi, negative_multiplier=mult)


# -- count tables ------------------------------------------------------------------------


@dataclass
class CountTable:
    n_max: int
    multiplier_horizon: int
    kept_edges: Tuple[str, ...]
    roots: Tuple[str, ...]
    fixed_points: Dict[int, int] = field(default_factory=dict)
    neutral_fixed: Dict[int, int] = field(default_factory=dict)
    neutral_least: Dict[int, int] = field(default_factory=dict)
    neutral_by_root: Dict[str, Dict[int, int]] = field(default_factory=dict)
    # points fixed by S^n that carry negative multiplier e
    multiplier_fixed: Dict[Tuple[str, int], int] = field(default_factory=dict)
    # orbits of least period n that carry negative multiplier e
    orbits_by_multiplier: Dict[Tuple[str, int], int] = field(default_factory=dict)
    lambda_min: Dict[str, Optional[int]] = field(default_factory=dict)
    m_ell: Dict[int, Tuple[str, ...]] = field(default_factory=dict)

    @property
    def nu(self) -> int:
        return len(self.kept_edges)

    def xi(self, e: str, n: int) -> int:
        if n > self.multiplier_horizon:
            raise HorizonError(f"multiplier data only computed up to n={self.multiplier_horizon}, asked for {n}")
        return self.orbits_by_multiplier[(e, n)]

    def neutral_orbits_least(self, n: int) -> int:
        return self.neutral_least[n] // n

    def fixed_orbits(self, n: int) -> int:
        return sum(least_from_fixed(self.fixed_points, d) // d for d in divisors(n))

    def finish(self) -> "CountTable":
        """Derive least-period tables, minimal multiplier periods and ``M_ell``."""
        h = self.multiplier_horizon
        self.neutral_least = {n: least_from_fixed(self.neutral_fixed, n) for n in range(1, self.n_max + 1)}
        for e in self.kept_edges:
            fixed = {n: self.multiplier_fixed.get((e, n), 0) for n in range(1, h + 1)}
            lam = None
            for n in range(1, h + 1):
                pts = least_from_fixed(fixed, n)
                if pts % n:
                    raise AssertionError(f"{pts} least-period points of multiplier {e} not divisible by n={n}")
                self.orbits_by_multiplier[(e, n)] = pts // n
                if lam is None and pts:
                    lam = n
            self.lambda_min[e] = lam
        m_ell: Dict[int, List[str]] = defaultdict(list)
        for e in self.kept_edges:
            lam = self.lambda_min[e]
            if lam is not None:
                m_ell[lam].append(e)
        self.m_ell = {k: tuple(v) for k, v in sorted(m_ell.items())}
        return self

    def to_json(self) -> dict:
        s = str
        return {
            "n_max": self.n_max,
            "multiplier_horizon": self.multiplier_horizon,
            "nu": self.nu,
            "fixed_points": {s(n): s(c) for n, c in sorted(self.fixed_points.items())},
            "neutral_fixed": {s(n): s(c) for n, c in sorted(self.neutral_fixed.items())},
            "neutral_least": {s(n): s(c) for n, c in sorted(self.neutral_least.items())},
            "neutral_by_root": {
                r: {s(n): s(c) for n, c in sorted(self.neutral_by_root[r].items())} for r in self.roots
            },
            "orbits_by_multiplier": {
                e: {s(n): s(self.orbits_by_multiplier[(e, n)]) for n in range(1, self.multiplier_horizon + 1)}
                for e in self.kept_edges
            },
            "lambda_min": {e: self.lambda_min[e] for e in self.kept_edges},
            "m_ell": {s(k): list(v) for k, v in self.m_ell.items()},
        }


class HorizonError(ValueError):
    """The count table does not reach the lengths a computation needs."""


def _empty_table(cd: ContractionData, n_max: int, horizon: int) -> CountTable:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    h = min(horizon, n_max)
    ct = CountTable(n_max=n_max, multiplier_horizon=h, kept_edges=cd.kept_edges, roots=cd.roots)
    for n in range(1, n_max + 1):
        ct.fixed_points[n] = 0
        ct.neutral_fixed[n] = 0
    ct.neutral_by_root = {r: {n: 0 for n in range(1, n_max + 1)} for r in cd.roots}
    for e in cd.kept_edges:
        for n in range(1, h + 1):
            ct.multiplier_fixed[(e, n)] = 0
    return ct


def count_tables_dp(
    g: DirectedMultigraph,
    cd: ContractionData,
    n_max: int,
    multiplier_horizon: int = DEFAULT_MULTIPLIER_HORIZON,
    state_cap: int = DEFAULT_STATE_CAP,
) -> CountTable:
    """Count periodic points by grouping all admissible words of each length by product."""
    ct = _empty_table(cd, n_max, multiplier_horizon)
    letters = alphabet(g)
    # element -> (stable, neutral root or None, multiplier edge or None)
    info: Dict[Element, Tuple[bool, Optional[str], Optional[str]]] = {}
    layer: Dict[Element, int] = {IDENTITY: 1}
    for n in range(1, n_max + 1):
        nxt: Dict[Element, int] = defaultdict(int)
        for x, c in layer.items():
            for a in letters:
                y = step(g, x, a)
                if y is not ZERO:
                    nxt[y] += c
        if len(nxt) > state_cap:
            raise CountingResourceError(n, len(nxt), state_cap)
        layer = nxt
        for x, c in layer.items():
            data = info.get(x)
            if data is None:
                pc = classify_powers(g, x)
                root = cd.tree_of[x.base] if pc.kind == "idempotent" else None
                mult = None
                if pc.kind == "down_excess":
                    m = negative_multiplier(x, cd)
                    mult = m[0] if m else None
                data = info[x] = (pc.stable, root, mult)
            stable, root, mult = data
            if not stable:
                continue
            ct.fixed_points[n] += c
            if root is not None:
                ct.neutral_fixed[n] += c
                ct.neutral_by_root[root][n] += c
            elif mult is not None and n <= ct.multiplier_horizon:
                ct.multiplier_fixed[(mult, n)] += c
    return ct.finish()


def iter_admissible_words(g: DirectedMultigraph, n: int) -> Iterator[Tuple[Word, Element]]:
    """All admissible words of length exactly ``n`` (prefix-pruned DFS), with products."""
    letters = alphabet(g)
    stack: List[Tuple[Word, Element]] = [((), IDENTITY)]
    while stack:
        w, x = stack.pop()
        if len(w) == n:
            yield w, x
            continue
        for a in reversed(letters):
            y = step(g, x, a)
            if y is not ZERO:
                stack.append((w + (a,), y))


def count_tables_naive(
    g: DirectedMultigraph,
    cd: ContractionData,
    n_max: int,
    multiplier_horizon: int = DEFAULT_MULTIPLIER_HORIZON,
    state_cap: int = DEFAULT_STATE_CAP,
) -> CountTable:
    """Reference counter: enumerate every word and analyse its rotations directly."""
    ct = _empty_table(cd, n_max, multiplier_horizon)
    h = ct.multiplier_horizon
    least_neutral: Dict[int, int] = defaultdict(int)
    orbit_pts: Dict[Tuple[str, int], int] = defaultdict(int)
    for n in range(1, n_max + 1):
        seen = 0
        for w, x in iter_admissible_words(g, n):
            seen += 1
            if seen > state_cap:
                raise CountingResourceError(n, seen, state_cap)
            # a point needs every power of the window admissible; nilpotent products die by the cube
            if power(g, x, 3) is ZERO:
                continue
            info = analyze_periodic_word(w, g, cd)
            if not info.is_point:
                raise AssertionError(f"word {format_word(w)} has admissible cube but is not a point")
            ct.fixed_points[n] += 1
            primitive = info.least_period == n
            if info.neutral:
                ct.neutral_fixed[n] += 1
                ct.neutral_by_root[info.neutral_root][n] += 1
                if primitive:
                    least_neutral[n] += 1
            elif info.negative_multiplier is not None and n <= h:
                e = info.negative_multiplier[0]
                ct.multiplier_fixed[(e, n)] += 1
                if primitive:
                    orbit_pts[(e, n)] += 1
    ct.finish()
    # overwrite the derived tables with the directly enumerated ones
    ct.neutral_least = {n: least_neutral.get(n, 0) for n in range(1, n_max + 1)}
    for e in cd.kept_edges:
        for n in range(1, h + 1):
            pts = orbit_pts.get((e, n), 0)
            if pts % n:
                raise AssertionError(f"primitive words with multiplier {e} at n={n} not closed under rotation")
            ct.orbits_by_multiplier[(e, n)] = pts // n
    return ct


# -- circular codes and zeta functions -----------------------------------------------------


def return_word_counts(v: str, g: DirectedMultigraph, n_max: int) -> Dict[int, int]:
    """Number of words of each length whose product is exactly ``1_V`` (``n = 0`` gives 1)."""
    target = vertex_idempotent(v)
    letters = alphabet(g)
    out = {0: 1}
    layer: Dict[Element, int] = {IDENTITY: 1}
    for n in range(1, n_max + 1):
        nxt: Dict[Element, int] = defaultdict(int)
        for x, c in layer.items():
            for a in letters:
                y = step(g, x, a)
                if y is not ZERO:
                    nxt[y] += c
        layer = nxt
        out[n] = layer.get(target, 0)
    return out


def circular_code_coefficients(v: str, g: DirectedMultigraph, n_max: int) -> FormalPowerSeries:
    """Generating function of first-return words at ``V``."""
    target = vertex_idempotent(v)
    coeffs = [0] * (n_max + 1)
    layer: Dict[Element, int] = defaultdict(int)
    for a in alphabet(g):
        if letter_source(g, a) == v:
            layer[step(g, IDENTITY, a)] += 1
    for n in range(2, n_max + 1):
        nxt: Dict[Element, int] = defaultdict(int)
        for x, c in layer.items():
            for a in alphabet(g):
                y = step(g, x, a)
                if y is ZERO:
                    continue
                if y == target:
                    coeffs[n] += c
                else:
                    nxt[y] += c
        layer = nxt
    return FormalPowerSeries(coeffs, n_max)


class ZetaIntegralityError(AssertionError):
    pass


def zeta_series(counts: Mapping[int, int], n_max: int) -> FormalPowerSeries:
    """Truncated ``exp(sum_n counts(n) z^n / n)``; the coefficients must be integers."""
    log = FormalPowerSeries([0] + [Fraction(counts[n], n) for n in range(1, n_max + 1)], n_max)
    z = log.exp()
    if not z.is_integral():
        raise ZetaIntegralityError(f"zeta series has non-integral coefficients: {z}")
    return z


def neutral_zeta_from_codes(g: DirectedMultigraph, n_max: int, vertices: Optional[Sequence[str]] = None) -> FormalPowerSeries:
    """``prod_V 1 / (1 - phi_V)`` over the given vertices (default: all)."""
    out = FormalPowerSeries.one(n_max)
    for v in vertices if vertices is not None else g.vertices:
        phi = circular_code_coefficients(v, g, n_max)
        out = out * (FormalPowerSeries.one(n_max) - phi).reciprocal()
    return out


# -- bounded neutrality test -------------------------------------------------------------


@dataclass(frozen=True)
class NeutralityWitness:
    """``u . block . v`` is inadmissible although ``u . block`` and ``block . v`` are admissible.

    ``side == "future"``: ``u`` is a free left context and ``v`` continues the point.
    ``side == "past"``: ``u`` is the point's own past and ``v`` a free right extension.
    """

    side: str
    rotation: int
    left: Word
    block: Word
    right: Word

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "rotation": self.rotation,
            "left": format_word(self.left),
            "block": format_word(self.block),
            "right": format_word(self.right),
        }


@dataclass(frozen=True)
class NeutralityVerdict:
    confirmed_non_neutral: bool
    witness: Optional[NeutralityWitness] = None

    def __str__(self) -> str:
        return "ConfirmedNonNeutral" if self.confirmed_non_neutral else "ConsistentWithNeutral"


def _extensions(g: DirectedMultigraph, start: Element, max_len: int, left: bool) -> Iterator[Tuple[Word, Element]]:
    """Breadth-first products ``start . v`` (or ``u . start``) for free words of length <= max_len.

    One representative word is kept per product, which is all the witness search needs.
    """
    letters = alphabet(g)
    seen = {start: ()}
    frontier: List[Tuple[Word, Element]] = [((), start)]
    for _ in range(max_len):
        nxt = []
        for w, x in frontier:
            for a in letters:
                y = multiply(g, step(g, IDENTITY, a), x) if left else step(g, x, a)
                if y is ZERO or y in seen:
                    continue
                ww = (a,) + w if left else w + (a,)
                seen[y] = ww
                nxt.append((ww, y))
                yield ww, y
        frontier = nxt


def _point_check(w: Sequence[Letter], g: DirectedMultigraph) -> Word:
    w = tuple(w)
    x = reduce(w, g)
    if x is ZERO or not classify_powers(g, x).stable:
        raise ValueError(f"{format_word(w)} does not define a periodic point")
    return w


def bounded_neutrality_test_exhaustive(
    w: Sequence[Letter], g: DirectedMultigraph, context_len: int, extension_len: int
) -> NeutralityVerdict:
    """Reference version of :func:`bounded_neutrality_test` trying every free word."""
    w = _point_check(w, g)
    reps = context_len + extension_len + 2
    for i, r in rotations(w):
        block = reduce(r, g)
        future = reduce(r * reps, g)
        for u, ub in _extensions(g, block, context_len, left=True):
            if multiply(g, ub, future) is ZERO:
                return NeutralityVerdict(True, NeutralityWitness("future", i, u, r, r * reps))
        for v, bv in _extensions(g, block, extension_len, left=False):
            if multiply(g, future, bv) is ZERO:
                return NeutralityVerdict(True, NeutralityWitness("past", i, r * reps, r, v))
    return NeutralityVerdict(False)


def _separating_path(
    g: DirectedMultigraph, end: str, keep: Tuple[str, ...], kill: Tuple[str, ...], max_len: int
) -> Optional[Tuple[str, ...]]:
    """Shortest path ``S`` into ``end`` with ``|S| <= max_len`` that is tail-compatible
    with ``keep`` but not with ``kill`` (compared from the far end inward)."""
    depth_cap = min(max_len, max(len(keep), len(kill)))
    frontier = [(e,) for e in g.in_edges[end]]
    for d in range(1, depth_cap + 1):
        nxt = []
        for path in frontier:
            head = path[0]
            if d <= len(keep) and head != keep[-d]:
                continue
            if d <= len(kill) and head != kill[-d]:
                return path
            for f in g.in_edges[g.src[head]]:
                nxt.append((f,) + path)
        frontier = nxt
    return None


def bounded_neutrality_test(w: Sequence[Letter], g: DirectedMultigraph, context_len: int, extension_len: int) -> NeutralityVerdict:
    """Look for a finite obstruction to neutrality around one period window.

    For every rotation ``r`` of ``w`` (the window ``x[i-n, i)`` of the point) two
    obstructions are searched: a free left context ``u`` (``|u| <= context_len``)
    with ``u r`` admissible but ``u r`` followed by the point's own future
    inadmissible, and a free right extension ``v`` (``|v| <= extension_len``) with
    ``r v`` admissible but the point's own past followed by ``r v`` inadmissible.
    Neutral points never admit either (their windows have idempotent products),
    so a witness is a genuine certificate that the point lies outside ``A_n``
    for ``n = |w|``.  Finding none proves nothing.

    Only the minus part of ``u`` meets ``r`` (and only the plus part of ``v``),
    so it suffices to try pure paths; the search is exact, not a heuristic
    (compare :func:`bounded_neutrality_test_exhaustive`).
    """
    w = _point_check(w, g)
    reps = context_len + extension_len + 2
    for i, r in rotations(w):
        block = reduce(r, g)
        future = power(g, block, reps)
        ahead = multiply(g, block, future)
        path = _separating_path(g, element_source(g, block), block.up, ahead.up, context_len)
        if path is not None:
            u = tuple(Letter(e, MINUS) for e in path)
            _confirm(g, u + r, u + r + r * reps)
            return NeutralityVerdict(True, NeutralityWitness("future", i, u, r, r * reps))
        behind = multiply(g, future, block)
        path = _separating_path(g, element_target(g, block), block.down, behind.down, extension_len)
        if path is not None:
            v = tuple(Letter(e, PLUS) for e in reversed(path))
            _confirm(g, r + v, r * reps + r + v)
            return NeutralityVerdict(True, NeutralityWitness("past", i, r * reps, r, v))
    return NeutralityVerdict(False)


def _confirm(g: DirectedMultigraph, alive: Word, dead: Word) -> None:
    if reduce(alive, g) is ZERO or reduce(dead, g) is not ZERO:
        raise AssertionError(f"witness check failed: {format_word(alive)} / {format_word(dead)}")
