"""Conjugacy-invariant fingerprint of a Markov-Dyck shift and fingerprint comparison.

Agreement of two fingerprints is a necessary condition for conjugacy, never a
proof of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from .dynamics import DEFAULT_STATE_CAP, CountTable, count_tables_dp, zeta_series
from .graph_core import ContractionData, DirectedMultigraph, canonical_form, contracting_forest

DEFAULT_TRUNCATION = 10

FIELD_ORDER = (
    "nu",
    "lambda_spectrum",
    "m_ell_sizes",
    "neutral_fixed_vector",
    "xi_profile",
    "weighted_contracted",
)


class TruncationMismatch(ValueError):
    pass


@dataclass(frozen=True)
class InvariantFingerprint:
    truncation: int
    nu: int
    # None marks an edge whose shortest multiplier orbit is longer than the truncation
    lambda_spectrum: Tuple[Optional[int], ...]
    m_ell_sizes: Tuple[Tuple[int, int], ...]
    neutral_fixed_vector: Tuple[int, ...]
    xi_profile: Tuple[Tuple[int, ...], ...]
    weighted_contracted: Dict[str, Any]

    def field(self, name: str) -> Any:
        return getattr(self, name)

    def to_json(self) -> dict:
        return {
            "truncation": self.truncation,
            "nu": self.nu,
            "lambda_spectrum": list(self.lambda_spectrum),
            "m_ell_sizes": {str(k): v for k, v in self.m_ell_sizes},
            "neutral_fixed_vector": [str(c) for c in self.neutral_fixed_vector],
            "xi_profile": [[str(c) for c in row] for row in self.xi_profile],
            "weighted_contracted": self.weighted_contracted,
        }


def _spectrum_key(x: Optional[int]) -> Tuple[int, int]:
    return (1, 0) if x is None else (0, x)


def root_zeta_weights(ct: CountTable, degree: int) -> Dict[str, Tuple[int, ...]]:
    """Truncated zeta series of the neutral points attached to each root."""
    return {
        r: tuple(zeta_series(ct.neutral_by_root[r], degree).int_coeffs())
        for r in ct.roots
    }


def fingerprint_from_table(cd: ContractionData, ct: CountTable, truncation: int) -> InvariantFingerprint:
    n = truncation
    if ct.n_max < n or ct.multiplier_horizon < n:
        raise ValueError(f"count table reaches n={ct.n_max}/horizon {ct.multiplier_horizon}, need {n}")
    spectrum = tuple(sorted((ct.lambda_min[e] for e in ct.kept_edges), key=_spectrum_key))
    sizes = tuple(sorted((k, len(v)) for k, v in ct.m_ell.items()))
    xi = tuple(sorted(tuple(ct.orbits_by_multiplier[(e, k)] for k in range(1, n + 1)) for e in ct.kept_edges))
    weights = root_zeta_weights(ct, n)
    canon = canonical_form(cd.contracted, weights)
    canon["weights"] = [[str(c) for c in w] for w in canon["weights"]]
    return InvariantFingerprint(
        truncation=n,
        nu=ct.nu,
        lambda_spectrum=spectrum,
        m_ell_sizes=sizes,
        neutral_fixed_vector=tuple(ct.neutral_fixed[k] for k in range(1, n + 1)),
        xi_profile=xi,
        weighted_contracted=canon,
    )


def fingerprint(
    g: DirectedMultigraph,
    truncation: int = DEFAULT_TRUNCATION,
    state_cap: int = DEFAULT_STATE_CAP,
) -> InvariantFingerprint:
    cd = contracting_forest(g)
    ct = count_tables_dp(g, cd, truncation, truncation, state_cap)
    return fingerprint_from_table(cd, ct, truncation)


@dataclass(frozen=True)
class Verdict:
    distinguished: bool
    field: Optional[str] = None
    values: Optional[Tuple[Any, Any]] = None

    NOTE = "agreement of the invariants does not prove conjugacy"

    def __str__(self) -> str:
        if self.distinguished:
            a, b = self.values
            return f"Distinguished({self.field}: {a} vs {b})"
        return "InvariantsAgree"

    def to_json(self) -> dict:
        out: Dict[str, Any] = {"verdict": "Distinguished" if self.distinguished else "InvariantsAgree"}
        if self.distinguished:
            out["field"] = self.field
            out["values"] = [_jsonable(v) for v in self.values]
        else:
            out["note"] = self.NOTE
        return out


def _jsonable(v: Any) -> Any:
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


def compare(f1: InvariantFingerprint, f2: InvariantFingerprint) -> Verdict:
    if f1.truncation != f2.truncation:
        raise TruncationMismatch(f"fingerprints truncated at {f1.truncation} and {f2.truncation}")
    for name in FIELD_ORDER:
        a, b = f1.field(name), f2.field(name)
        if a != b:
            return Verdict(True, name, (a, b))
    return Verdict(False)
