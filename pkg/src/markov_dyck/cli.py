"""Command-line front end.

Exit codes: 0 success (``compare``: invariants agree), 1 hypothesis failure or
``compare`` distinguished, 2 input/usage error, 3 counting resource cap hit.
Set ``MARKOV_DYCK_THREADS`` to compute independent graphs concurrently; output
does not depend on it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

from .builders import (
    M_THEN_TWO,
    TWO_THEN_M,
    AuxParams,
    FamilyIIIParams,
    FamilyIIParams,
    FamilyIParams,
    FamilyParamError,
    build_aux,
    build_family_I,
    build_family_II,
    build_family_III,
)
from .dynamics import (
    DEFAULT_MULTIPLIER_HORIZON,
    DEFAULT_STATE_CAP,
    CountingResourceError,
    HorizonError,
    analyze_periodic_word,
    count_tables_dp,
    iter_admissible_words,
    neutral_zeta_from_codes,
    zeta_series,
)
from .families import (
    ClassificationError,
    classification_table,
    classify,
    verify_lemma_formulas,
)
from .graph_core import (
    DirectedMultigraph,
    GraphInputError,
    HypothesisError,
    contracting_forest,
    load_graph,
    validate_graph,
)
from .invariants import compare, fingerprint
from .semigroup import ZERO, format_word, power

SCHEMA = "markov-dyck/1"
THREADS_ENV = "MARKOV_DYCK_THREADS"

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: Sequence[str]
    degree: int = 10
    horizon: int = DEFAULT_MULTIPLIER_HORIZON
    state_cap: int = DEFAULT_STATE_CAP
    json: bool = False

    def __post_init__(self) -> None:
        if self.degree < 2:
            raise UsageError(f"--degree must be at least 2 (got {self.degree})")


def threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def parallel_map(fn: Callable[[Any], Any], items: Sequence[Any]) -> List[Any]:
    """Map in input order; the thread count only changes the schedule."""
    n = threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def read_graph(path: str) -> DirectedMultigraph:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise GraphInputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return load_graph(text)
    except GraphInputError as exc:
        raise GraphInputError(f"{path}: {exc}") from exc


class Output:
    def __init__(self, cfg: RunConfig) -> None:
        self.cfg = cfg
        self.lines: List[str] = []
        self.data: Dict[str, Any] = {}

    def text(self, line: str = "") -> None:
        self.lines.append(line)

    def emit(self) -> None:
        if self.cfg.json:
            doc = {"schema": SCHEMA, "command": self.cfg.command, "result": self.data}
            print(json.dumps(doc, indent=2))
        else:
            print("\n".join(self.lines))


# -- subcommands ---------------------------------------------------------------------------


def cmd_validate(cfg: RunConfig, args: argparse.Namespace, out: Output) -> int:
    rep = validate_graph(read_graph(cfg.inputs[0]))
    out.data = rep.to_json()
    parts = [
        "strongly connected" if rep.strongly_connected else "NOT strongly connected",
        "a cycle" if rep.is_cycle else "not a cycle",
        f"nu={rep.nu}",
    ]
    out.text(", ".join(parts))
    out.text("standing hypotheses met" if rep.standing_hypotheses_met else "standing hypotheses NOT met")
    return EXIT_OK if rep.standing_hypotheses_met else EXIT_FAIL


def cmd_contract(cfg: RunConfig, args: argparse.Namespace, out: Output) -> int:
    cd = contracting_forest(read_graph(cfg.inputs[0]))
    out.data = cd.to_json()
    out.text(f"roots={list(cd.roots)}")
    out.text(f"tree_edges={list(cd.single_incoming_edges)}")
    out.text(f"contracted: {len(cd.contracted.vertices)} vertices, {len(cd.contracted.edges)} edges")
    for e in cd.contracted.edges:
        out.text(f"  {e.id}: {e.src} -> {e.tgt}")
    return EXIT_OK


def cmd_invariants(cfg: RunConfig, args: argparse.Namespace, out: Output) -> int:
    f = fingerprint(read_graph(cfg.inputs[0]), cfg.degree, cfg.state_cap)
    out.data = f.to_json()
    out.text(json.dumps(f.to_json(), indent=2))
    return EXIT_OK


def cmd_compare(cfg: RunConfig, args: argparse.Namespace, out: Output) -> int:
    graphs = [read_graph(p) for p in cfg.inputs]
    f1, f2 = parallel_map(lambda g: fingerprint(g, cfg.degree, cfg.state_cap), graphs)
    v = compare(f1, f2)
    out.data = v.to_json()
    out.text(str(v))
    if not v.distinguished:
        out.text(f"note: {v.NOTE}")
    return EXIT_FAIL if v.distinguished else EXIT_OK


def cmd_classify(cfg: RunConfig, args: argparse.Namespace, out: Output) -> int:
    found = classify(read_graph(cfg.inputs[0]), strict=args.strict, state_cap=cfg.state_cap)
    out.data = {"families": {k: p.to_json() for k, p in found.items()}, "strict": args.strict}
    if not found:
        out.text("no family")
    for k, p in found.items():
        out.text(f"family {k}: {json.dumps(p.to_json())}")
    return EXIT_OK


def cmd_zeta(cfg: RunConfig, args: argparse.Namespace, out: Output) -> int:
    g = read_graph(cfg.inputs[0])
    cd = contracting_forest(g)
    n = cfg.degree
    ct = count_tables_dp(g, cd, n, min(cfg.horizon, n), cfg.state_cap)
    if args.root is not None:
        if args.root not in cd.roots:
            raise UsageError(f"{args.root!r} is not a root (roots: {list(cd.roots)})")
        z = zeta_series(ct.neutral_by_root[args.root], n)
        out.data = {"kind": "neutral_root", "root": args.root, "degree": n, "series": str(z)}
        out.text(str(z))
        return EXIT_OK
    if args.neutral:
        z = zeta_series(ct.neutral_fixed, n)
        codes = neutral_zeta_from_codes(g, n)
        out.data = {"kind": "neutral", "degree": n, "series": str(z), "codes_product": str(codes),
                    "agree": z == codes}
        out.text(str(z))
        out.text("agrees with the circular-code product" if z == codes else f"MISMATCH with code product: {codes}")
        return EXIT_OK if z == codes else EXIT_FAIL
    z = zeta_series(ct.fixed_points, n)
    out.data = {"kind": "full", "degree": n, "series": str(z)}
    out.text(str(z))
    return EXIT_OK


def cmd_verify_lemmas(cfg: RunConfig, args: argparse.Namespace, out: Output) -> int:
    g = read_graph(cfg.inputs[0])
    cd, ct = classification_table(g, state_cap=cfg.state_cap)
    lams = {ct.lambda_min[e] for e in ct.kept_edges}
    if len(lams) == 1 and None not in lams:
        need = lams.pop() + 4
        if ct.multiplier_horizon < need:
            ct = count_tables_dp(g, cd, need, need, cfg.state_cap)
    rep = verify_lemma_formulas(g, ct, cd)
    out.data = rep.to_json()
    out.text(rep.to_markdown().rstrip("\n"))
    return EXIT_OK


def _canonical_rotation(w: tuple) -> tuple:
    return min(w[i:] + w[:i] for i in range(len(w)))


def cmd_enumerate(cfg: RunConfig, args: argparse.Namespace, out: Output) -> int:
    g = read_graph(cfg.inputs[0])
    cd = contracting_forest(g)
    n = args.length
    if n < 1:
        raise UsageError("--length must be at least 1")
    rows = []
    seen = 0
    for w, x in iter_admissible_words(g, n):
        seen += 1
        if seen > cfg.state_cap:
            raise CountingResourceError(n, seen, cfg.state_cap)
        if power(g, x, 3) is ZERO:
            continue
        info = analyze_periodic_word(w, g, cd)
        if args.orbits and (info.least_period != n or _canonical_rotation(w) != w):
            continue
        rows.append(info)
    out.data = {"length": n, "orbits": args.orbits, "count": len(rows), "words": [r.to_json() for r in rows]}
    for r in rows:
        if r.neutral:
            tag = f"neutral at {r.neutral_vertex} (root {r.neutral_root})"
        elif r.negative_multiplier:
            tag = f"multiplier {r.negative_multiplier[0]}^{r.negative_multiplier[1]}"
        else:
            tag = "point"
        out.text(f"{format_word(r.word)}\tperiod {r.least_period}\t{tag}")
    out.text(f"{len(rows)} {'orbits' if args.orbits else 'points'}")
    return EXIT_OK


def _int_map(text: str) -> Dict[int, int]:
    out: Dict[int, int] = {}
    if not text:
        return out
    for item in text.split(","):
        try:
            k, v = item.split(":")
            out[int(k)] = int(v)
        except ValueError:
            raise UsageError(f"expected comma-separated key:value integers, got {text!r}") from None
    return out


def cmd_canonical(cfg: RunConfig, args: argparse.Namespace, out: Output) -> int:
    fam = args.family
    if fam == "I":
        g = build_family_I(FamilyIParams(_int_map(args.S)))
    elif fam == "II":
        g = build_family_II(FamilyIIParams(args.R, _int_map(args.Q)))
    elif fam == "III":
        g = build_family_III(FamilyIIIParams(args.ell, args.M))
    else:
        g = build_aux(AuxParams(args.variant, args.ell, args.L, args.M))
    # graph JSON is the natural output either way
    out.data = g.to_json()
    out.text(json.dumps(g.to_json(), indent=2))
    return EXIT_OK


COMMANDS = {
    "validate": (cmd_validate, 1),
    "contract": (cmd_contract, 1),
    "invariants": (cmd_invariants, 1),
    "compare": (cmd_compare, 2),
    "classify": (cmd_classify, 1),
    "zeta": (cmd_zeta, 1),
    "verify-lemmas": (cmd_verify_lemmas, 1),
    "enumerate": (cmd_enumerate, 1),
    "canonical": (cmd_canonical, 0),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="versioned JSON output")
    common.add_argument("--degree", type=int, default=10, help="series/fingerprint truncation N")
    common.add_argument("--horizon", type=int, default=DEFAULT_MULTIPLIER_HORIZON, help="multiplier horizon")
    common.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)

    p = argparse.ArgumentParser(prog="markov-dyck", description="Markov-Dyck shifts of directed graphs")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("validate", "contract", "invariants", "classify", "verify-lemmas"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("graph")
        if name == "classify":
            sp.add_argument("--strict", action="store_true", help="use the uncorrected period-4 identities")
    sp = sub.add_parser("compare", parents=[common])
    sp.add_argument("graph")
    sp.add_argument("other")
    sp = sub.add_parser("zeta", parents=[common])
    sp.add_argument("graph")
    sp.add_argument("--neutral", action="store_true", help="zeta of the neutral periodic points")
    sp.add_argument("--root", help="neutral points attached to one root")
    sp = sub.add_parser("enumerate", parents=[common])
    sp.add_argument("graph")
    sp.add_argument("--length", "-n", type=int, required=True)
    sp.add_argument("--orbits", action="store_true", help="one primitive representative per orbit")
    sp = sub.add_parser("canonical", parents=[common])
    sp.add_argument("family", choices=["I", "II", "III", "aux"])
    sp.add_argument("--S", default="", help="family I: ell:S_ell,... e.g. 1:1,2:1")
    sp.add_argument("--R", type=int, default=0)
    sp.add_argument("--Q", default="", help="family II: M:Q_M,...")
    sp.add_argument("--ell", type=int, default=2)
    sp.add_argument("--M", type=int, default=1)
    sp.add_argument("--L", type=int, default=0)
    sp.add_argument("--variant", choices=[TWO_THEN_M, M_THEN_TWO], default=TWO_THEN_M)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        fn, n_inputs = COMMANDS[args.command]
        inputs = [getattr(args, "graph", None), getattr(args, "other", None)][:n_inputs]
        cfg = RunConfig(args.command, inputs, args.degree, args.horizon, args.state_cap, args.json)
        out = Output(cfg)
        code = fn(cfg, args, out)
        out.emit()
        return code
    except (GraphInputError, UsageError, FamilyParamError, HorizonError, ClassificationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except HypothesisError as exc:
        print(f"hypothesis failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except CountingResourceError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
