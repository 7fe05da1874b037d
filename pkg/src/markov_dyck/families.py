"""Recognising the three canonical families from conjugacy invariants.

Every classifier reads only invariants of the shift (``nu``, the multiplier
tables, neutral counts) plus the single-root test, and returns the parameters
of the canonical model the graph is conjugate to, or ``None``.
``verify_lemma_formulas`` compares the closed-form counting identities for the
V-shaped models and the auxiliary graphs with enumerated ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from .builders import (
    M_THEN_TWO,
    TWO_THEN_M,
    AuxParams,
    FamilyIIIParams,
    FamilyIIParams,
    FamilyIParams,
    build_aux,
    build_family_III,
)
from .dynamics import DEFAULT_STATE_CAP, CountTable, HorizonError, count_tables_dp
from .graph_core import ContractionData, DirectedMultigraph, contracting_forest, is_isomorphic
from .invariants import DEFAULT_TRUNCATION, compare, fingerprint

FamilyParams = Union[FamilyIParams, FamilyIIParams, FamilyIIIParams]

FAMILIES = ("I", "II", "III")


class ClassificationError(ArithmeticError):
    """The invariants are inconsistent with the counting conventions in use."""


def is_dyck_monoid(cd: ContractionData) -> bool:
    return len(cd.roots) == 1


def _lambdas(ct: CountTable, need: str) -> Dict[str, int]:
    missing = [e for e in ct.kept_edges if ct.lambda_min[e] is None]
    if missing:
        raise HorizonError(
            f"{need}: no multiplier orbit found up to n={ct.multiplier_horizon} for {', '.join(missing)}"
        )
    return dict(ct.lambda_min)


def classification_horizon(cd: ContractionData) -> int:
    """Table length that suffices for every classifier on a single-root graph.

    A kept edge leaving a vertex at depth ``d`` of the tree closes a cycle of
    length ``d + 1``, so its shortest multiplier orbit is no longer than that;
    the family III test then looks four steps further.
    """
    depth = max((len(cd.root_path[cd.graph.src[e]]) for e in cd.kept_edges), default=0)
    return depth + 1 + 4


def classification_table(g: DirectedMultigraph, cd: Optional[ContractionData] = None,
                         state_cap: int = DEFAULT_STATE_CAP) -> Tuple[ContractionData, CountTable]:
    cd = cd or contracting_forest(g)
    n = max(classification_horizon(cd), 4) if is_dyck_monoid(cd) else 4
    return cd, count_tables_dp(g, cd, n, n, state_cap)


def _half(x: int) -> Fraction:
    return Fraction(x, 2)


# -- family I ------------------------------------------------------------------------------


def classify_I(g: DirectedMultigraph, ct: CountTable, cd: Optional[ContractionData] = None) -> Optional[FamilyIParams]:
    cd = cd or contracting_forest(g)
    if not is_dyck_monoid(cd) or ct.nu <= 1:
        return None
    lam = _lambdas(ct, "family I")
    sizes: Dict[int, int] = {}
    for e in ct.kept_edges:
        sizes[lam[e]] = sizes.get(lam[e], 0) + 1
    # half the neutral points of period 2 equals card(E); the identity forces
    # every tree edge onto exactly one return chain
    lhs = _half(ct.neutral_least[2])
    rhs = ct.nu + sum((ell - 1) * c for ell, c in sizes.items() if ell > 1)
    if lhs != rhs:
        return None
    return FamilyIParams(sizes)


# -- family II -----------------------------------------------------------------------------


def root_out_degree(cd: ContractionData) -> int:
    (root,) = cd.roots
    return len(cd.graph.out_edges[root])


def classify_II(g: DirectedMultigraph, ct: CountTable, cd: Optional[ContractionData] = None) -> Optional[FamilyIIParams]:
    cd = cd or contracting_forest(g)
    if ct.multiplier_horizon < 4:
        raise HorizonError(f"family II needs multiplier data up to n=4, table has {ct.multiplier_horizon}")
    if not is_dyck_monoid(cd) or ct.nu <= 1:
        return None
    lam = ct.lambda_min
    # an edge without a multiplier orbit up to n=4 has Lambda > 2 anyway
    if any(lam[e] is None or lam[e] > 2 for e in ct.kept_edges):
        return None
    m1 = [e for e in ct.kept_edges if lam[e] == 1]
    m2 = [e for e in ct.kept_edges if lam[e] == 2]
    d_root = root_out_degree(cd)
    # the same number from invariants: orbits of neutral 2-periodic points minus nu plus card(M_1)
    d_inv = _half(ct.neutral_least[2]) - ct.nu + len(m1)
    if d_inv != d_root:
        raise ClassificationError(f"root out-degree {d_root} but the invariant expression gives {d_inv}")
    q: Dict[int, int] = {}
    counted = 0
    for big_m in range(1, len(m2) + 1):
        hits = sum(1 for e in m2 if ct.xi(e, 4) == big_m + d_root)
        if hits % big_m:
            raise ClassificationError(f"{hits} edges match the Q_{big_m} census, not divisible by {big_m}")
        if hits:
            q[big_m] = hits // big_m
            counted += hits
    if counted != len(m2):
        raise ClassificationError(f"Q census covers {counted} of the {len(m2)} edges with Lambda = 2")
    return FamilyIIParams(len(m1), q)


# -- family III ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    lhs: Any
    rhs: Any

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": str(self.lhs), "rhs": str(self.rhs), "holds": self.holds}


def xi_plus_four_corrected(lam: int, nu: int) -> Fraction:
    m = Fraction(nu, 2)
    return ((lam + m) ** 2 + lam + 2 + m * m) / 2 + lam - 1 + 3 * m


def family_III_conditions(ct: CountTable, strict: bool = False) -> List[ConditionCheck]:
    """The four counting conditions, evaluated with a common Lambda.

    ``strict`` uses the uncorrected forms of the period-4 neutral identity and of
    the Lambda+4 multiplier identity; the default uses the forms that match
    enumeration on the canonical models (see ``verify_lemma_formulas``).
    Neutral counts are points of least period, multiplier counts are orbits.
    """
    lam_map = _lambdas(ct, "family III")
    lam = min(lam_map.values())
    if ct.multiplier_horizon < lam + 4 or ct.n_max < 4:
        raise HorizonError(f"family III needs multiplier data up to n={lam + 4}, table has {ct.multiplier_horizon}")
    nu = ct.nu
    i2, i4 = ct.neutral_least[2], ct.neutral_least[4]
    out = [ConditionCheck("A", _half(i2), 2 * lam + nu - 2)]
    if strict:
        out.append(ConditionCheck("B", i4, 3 * i2 + nu * nu - 2 * nu - 4))
    else:
        out.append(ConditionCheck("B", i4, 2 * i2 + nu * nu + 6 * nu - 4))
    for e in ct.kept_edges:
        out.append(ConditionCheck(f"C[{e}]", ct.xi(e, lam + 2), lam + _half(nu)))
    for e in ct.kept_edges:
        if strict:
            rhs = (lam + _half(nu)) ** 2 + lam + 2 * nu - 2
        else:
            rhs = xi_plus_four_corrected(lam, nu)
        out.append(ConditionCheck(f"D[{e}]", ct.xi(e, lam + 4), rhs))
    return out


def classify_III(
    g: DirectedMultigraph, ct: CountTable, cd: Optional[ContractionData] = None, strict: bool = False
) -> Optional[FamilyIIIParams]:
    cd = cd or contracting_forest(g)
    if not is_dyck_monoid(cd) or ct.nu <= 1:
        return None
    lam = _lambdas(ct, "family III")
    values = set(lam.values())
    if len(values) != 1:
        return None
    (ell,) = values
    if ell <= 4 or ct.nu % 2:
        return None
    if not all(c.holds for c in family_III_conditions(ct, strict)):
        return None
    return FamilyIIIParams(ell, ct.nu // 2)


def classify(
    g: DirectedMultigraph, strict: bool = False, state_cap: int = DEFAULT_STATE_CAP
) -> Dict[str, FamilyParams]:
    """All families the graph's shift belongs to, keyed ``"I"``, ``"II"``, ``"III"``."""
    cd, ct = classification_table(g, state_cap=state_cap)
    out: Dict[str, FamilyParams] = {}
    if not is_dyck_monoid(cd):
        return out
    p1 = classify_I(g, ct, cd)
    if p1 is not None:
        out["I"] = p1
    p2 = classify_II(g, ct, cd)
    if p2 is not None:
        out["II"] = p2
    p3 = classify_III(g, ct, cd, strict)
    if p3 is not None:
        out["III"] = p3
    return out


# -- conjugacy within a family -------------------------------------------------------------


@dataclass(frozen=True)
class ConjugacyVerdict:
    kind: str  # "Conjugate" | "NotConjugate" | "Undecided"
    family: Optional[str] = None
    params: Optional[Tuple[Any, Any]] = None
    isomorphism: Optional[Dict[str, str]] = None
    witness: Optional[str] = None

    def to_json(self) -> dict:
        out: Dict[str, Any] = {"verdict": self.kind}
        if self.family:
            out["family"] = self.family
        if self.params:
            out["params"] = [p.to_json() if p is not None else None for p in self.params]
        if self.isomorphism is not None:
            out["isomorphism"] = dict(sorted(self.isomorphism.items()))
        if self.witness:
            out["witness"] = self.witness
        return out


def decide_conjugacy_in_family(
    g1: DirectedMultigraph,
    g2: DirectedMultigraph,
    truncation: int = DEFAULT_TRUNCATION,
    strict: bool = False,
    state_cap: int = DEFAULT_STATE_CAP,
) -> ConjugacyVerdict:
    c1 = classify(g1, strict, state_cap)
    c2 = classify(g2, strict, state_cap)
    for fam in FAMILIES:
        if fam in c1 and fam in c2:
            p1, p2 = c1[fam], c2[fam]
            if p1 == p2:
                return ConjugacyVerdict("Conjugate", fam, (p1, p2), is_isomorphic(g1, g2))
            return ConjugacyVerdict("NotConjugate", fam, (p1, p2), witness="family parameters differ")
    v = compare(fingerprint(g1, truncation, state_cap), fingerprint(g2, truncation, state_cap))
    if v.distinguished:
        return ConjugacyVerdict("NotConjugate", witness=f"invariant {v.field} differs")
    # membership in a family is itself decided by invariants
    for fam in FAMILIES:
        if (fam in c1) != (fam in c2):
            return ConjugacyVerdict(
                "NotConjugate", fam, (c1.get(fam), c2.get(fam)), witness=f"only one graph lies in family {fam}"
            )
    return ConjugacyVerdict("Undecided")


# -- closed-form identities versus enumeration --------------------------------------------


CONVENTIONS = ("points_least", "orbits_least", "points_fixed")


def neutral_count(ct: CountTable, n: int, convention: str) -> Fraction:
    if convention == "points_least":
        return Fraction(ct.neutral_least[n])
    if convention == "orbits_least":
        return Fraction(ct.neutral_least[n], n)
    return Fraction(ct.neutral_fixed[n])


def xi_count(ct: CountTable, e: str, n: int, convention: str) -> Fraction:
    orbits = ct.xi(e, n)
    if convention == "orbits_least":
        return Fraction(orbits)
    if convention == "points_least":
        return Fraction(orbits * n)
    return Fraction(ct.multiplier_fixed[(e, n)])


@dataclass(frozen=True)
class ConventionEval:
    convention: str
    predicted: Fraction
    enumerated: Fraction

    @property
    def match(self) -> bool:
        return self.predicted == self.enumerated

    def to_json(self) -> dict:
        return {
            "convention": self.convention,
            "predicted": str(self.predicted),
            "enumerated": str(self.enumerated),
            "match": self.match,
        }


@dataclass(frozen=True)
class FormulaRow:
    formula: str
    identity: str
    model: str
    applies: bool
    edge: Optional[str]
    evals: Tuple[ConventionEval, ...]

    def eval(self, convention: str) -> ConventionEval:
        return next(x for x in self.evals if x.convention == convention)

    def to_json(self) -> dict:
        return {
            "formula": self.formula,
            "identity": self.identity,
            "model": self.model,
            "applies": self.applies,
            "edge": self.edge,
            "evaluations": [x.to_json() for x in self.evals],
        }


@dataclass
class LemmaReport:
    recognized: List[Dict[str, Any]]
    nu: int
    lam: Optional[int]
    rows: List[FormulaRow] = field(default_factory=list)

    def rows_for(self, formula: str) -> List[FormulaRow]:
        return [r for r in self.rows if r.formula == formula]

    def to_json(self) -> dict:
        return {
            "recognized_models": self.recognized,
            "nu": self.nu,
            "Lambda": self.lam,
            "conventions": list(CONVENTIONS),
            "rows": [r.to_json() for r in self.rows],
        }

    def to_markdown(self) -> str:
        models = "; ".join(", ".join(f"{k}={v}" for k, v in r.items()) for r in self.recognized) or "none"
        lines = [
            f"recognized models: {models}",
            f"nu = {self.nu}; Lambda = {self.lam}",
            "",
            "| formula | edge | applies | convention | predicted | enumerated | match |",
            "|---|---|---|---|---|---|---|",
        ]
        for r in self.rows:
            for x in r.evals:
                lines.append(
                    f"| {r.formula} | {r.edge or ''} | {'yes' if r.applies else 'no'} | {x.convention} "
                    f"| {x.predicted} | {x.enumerated} | {'yes' if x.match else 'NO'} |"
                )
        lines.append("")
        for name, ident in _IDENTITIES.items():
            lines.append(f"- `{name}`: {ident[0]} (stated for {ident[1]})")
        return "\n".join(lines) + "\n"


def recognize_model(g: DirectedMultigraph, cd: ContractionData, ct: CountTable) -> List[Dict[str, Any]]:
    """Every V-shaped model or auxiliary graph isomorphic to ``g``.

    For ``M = 2`` the two auxiliary constructions coincide, hence a list.
    """
    if not is_dyck_monoid(cd):
        return []
    lam = [ct.lambda_min[e] for e in ct.kept_edges]
    if None in lam or len(set(lam)) != 1 or ct.nu % 2:
        return []
    ell, m = lam[0], ct.nu // 2
    found = []
    if ell >= 2 and is_isomorphic(g, build_family_III(FamilyIIIParams(ell, m))) is not None:
        found.append(FamilyIIIParams(ell, m).to_json())
    if ell >= 4:
        for variant in (TWO_THEN_M, M_THEN_TWO):
            for big_l in range(ell - 2):
                p = AuxParams(variant, ell, big_l, m)
                if is_isomorphic(g, build_aux(p)) is not None:
                    found.append(p.to_json())
    return found


Recognized = List[Dict[str, Any]]


def _v_model(rec: Recognized, min_ell: int = 1) -> bool:
    return any(r["family"] == "III" and r["ell"] >= min_ell for r in rec)


def _aux_model(variant: str) -> Callable[[Recognized], bool]:
    def check(rec: Recognized) -> bool:
        return any(
            r["family"] == "aux" and r["variant"] == variant and r["ell"] > 3 and 2 <= r["L"] < r["ell"] - 4
            for r in rec
        )

    return check


# name -> (identity text, models it is stated for)
_IDENTITIES = {
    "half_I2": ("I2/2 = nu + 2 Lambda - 2", "G[l,M]"),
    "I4_V": ("I4 = 3 I2 + nu^2 - 2 nu - 4", "G[l,M]"),
    "I4_two_then_M": ("I4 = 3 I2 + 4 nu (nu + 1)", "G_{2,M}[l,L], l > 3, 2 <= L < l - 4"),
    "I4_M_then_two": ("I4 = 3 I2 + nu^2/2 + 5 nu - 4", "G_{M,2}[l,L], l > 3, 2 <= L < l - 4"),
    "xi_plus_2": ("Xi_(Lambda+2) = Lambda + nu/2", "G[l,M], l > 4"),
    "xi_plus_4": ("Xi_(Lambda+4) = (Lambda + nu/2)^2 + Lambda + 2 nu - 2", "G[l,M], l > 4"),
    "I4_V_enumerated": ("I4 = 2 I2 + nu^2 + 6 nu - 4", "G[l,M] (matches enumeration, points convention)"),
    "xi_plus_4_enumerated": (
        "Xi_(Lambda+4) = ((Lambda + M)^2 + Lambda + 2 + M^2)/2 + Lambda - 1 + 3 M, M = nu/2",
        "G[l,M], l > 4 (matches enumeration, orbit convention)",
    ),
    "I4_structural": (
        "I4 orbits = sum_V C(outdeg V, 2) + sum_V indeg V * outdeg V",
        "every graph (orbit convention)",
    ),
}


def structural_neutral_four(g: DirectedMultigraph) -> int:
    """Neutral orbits of least period 4 read off the degrees.

    They are carried by ``e- e+ f- f+`` (two distinct edges with a common source)
    and ``e- f- f+ e+`` (``f`` leaving the target of ``e``).
    """
    total = 0
    for v in g.vertices:
        out_d = len(g.out_edges[v])
        total += out_d * (out_d - 1) // 2 + len(g.in_edges[v]) * out_d
    return total


def verify_lemma_formulas(g: DirectedMultigraph, ct: CountTable, cd: Optional[ContractionData] = None) -> LemmaReport:
    """Evaluate every identity on ``g`` under each counting convention.

    Rows are produced whether or not ``g`` is one of the models an identity is
    stated for (``applies`` records that); ground truth is the count table.
    """
    cd = cd or contracting_forest(g)
    if ct.n_max < 4:
        raise HorizonError("neutral identities need the table up to n=4")
    rec = recognize_model(g, cd, ct)
    nu = ct.nu
    lams = [ct.lambda_min[e] for e in ct.kept_edges]
    lam = None if None in lams or len(set(lams)) != 1 else lams[0]
    report = LemmaReport(rec, nu, lam)

    Count = Callable[[int], Fraction]

    def neutral_row(name: str, applies: bool, lhs: Callable[[Count], Fraction], rhs: Callable[[Count], Fraction],
                    conventions: Tuple[str, ...] = CONVENTIONS) -> None:
        evals = []
        for conv in conventions:
            def count(n: int, conv: str = conv) -> Fraction:
                return neutral_count(ct, n, conv)

            evals.append(ConventionEval(conv, Fraction(rhs(count)), Fraction(lhs(count))))
        report.rows.append(FormulaRow(name, _IDENTITIES[name][0], _IDENTITIES[name][1], applies, None, tuple(evals)))

    if lam is not None:
        neutral_row("half_I2", _v_model(rec), lambda c: c(2) / 2, lambda c: nu + 2 * lam - 2)
    neutral_row("I4_V", _v_model(rec), lambda c: c(4), lambda c: 3 * c(2) + nu * nu - 2 * nu - 4)
    neutral_row("I4_two_then_M", _aux_model(TWO_THEN_M)(rec), lambda c: c(4), lambda c: 3 * c(2) + 4 * nu * (nu + 1))
    neutral_row(
        "I4_M_then_two", _aux_model(M_THEN_TWO)(rec), lambda c: c(4), lambda c: 3 * c(2) + _half(nu * nu) + 5 * nu - 4
    )
    neutral_row("I4_V_enumerated", _v_model(rec), lambda c: c(4), lambda c: 2 * c(2) + nu * nu + 6 * nu - 4)
    s4 = structural_neutral_four(g)
    neutral_row("I4_structural", True, lambda c: c(4), lambda c: s4, ("orbits_least",))

    if lam is not None:
        if ct.multiplier_horizon < lam + 4:
            raise HorizonError(f"multiplier identities need the table up to n={lam + 4}, have {ct.multiplier_horizon}")
        xi_rules = (
            ("xi_plus_2", 2, lambda: lam + _half(nu)),
            ("xi_plus_4", 4, lambda: (lam + _half(nu)) ** 2 + lam + 2 * nu - 2),
            ("xi_plus_4_enumerated", 4, lambda: xi_plus_four_corrected(lam, nu)),
        )
        for name, k, rhs in xi_rules:
            for e in ct.kept_edges:
                evals = tuple(
                    ConventionEval(conv, Fraction(rhs()), xi_count(ct, e, lam + k, conv)) for conv in CONVENTIONS
                )
                report.rows.append(
                    FormulaRow(name, _IDENTITIES[name][0], _IDENTITIES[name][1], _v_model(rec, 5), e, evals)
                )
    return report
