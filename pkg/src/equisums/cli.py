"""Command-line front end: analyze, construct, decompose, count, verify.

Exit codes: 0 success, 2 domain error, 3 budget exceeded, 4 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .counting import DEFAULT_BUDGET, reconcile_counts
from .distribution import (
    ResidueMultiset,
    is_equidistributed,
    necessary_conditions,
    poly_identity_check,
    subset_sum_distribution,
)
from .errors import DomainError, EquisumsError, ResourceError
from .ring import build_context, prime_power_base
from .structure import (
    NoDecomposition,
    assemble_multiset,
    blocks_from_spec,
    decompose,
    format_signs,
    predicted_profile,
    theorem4_applicable,
)
from .verify import FAIL, SELECTORS, run_suites

EXIT_OK, EXIT_DOMAIN, EXIT_RESOURCE, EXIT_VERIFY = 0, 2, 3, 4


@dataclass
class RunConfig:
    moduli: list[int] = field(default_factory=list)
    multiset: str | None = None
    blocks: str | None = None
    json: bool = False
    budget: int = DEFAULT_BUDGET
    jobs: int = 1
    seed: int = 0
    cases: int = 1000

    def __post_init__(self):
        if self.budget < 1:
            raise DomainError(f"--budget must be >= 1, got {self.budget}")
        if self.jobs < 1:
            raise DomainError(f"--jobs must be >= 1, got {self.jobs}")
        if self.cases < 0:
            raise DomainError(f"--cases must be >= 0, got {self.cases}")


def parse_multiset(text: str, n: int, notices: list[str] | None = None) -> ResidueMultiset:
    """Parse ``a^m,b,c^2``; residues are reduced mod n and may repeat."""
    text = text.replace(" ", "")
    values: list[int] = []
    pos = 0
    if not text:
        return ResidueMultiset(n, ())
    for item in text.split(","):
        base, caret, mult = item.partition("^")
        try:
            a = int(base)
        except ValueError:
            raise DomainError(f"bad residue {base!r} at position {pos}") from None
        m = 1
        if caret:
            try:
                m = int(mult)
            except ValueError:
                raise DomainError(f"bad multiplicity {mult!r} at position {pos + len(base) + 1}") from None
            if m < 1:
                raise DomainError(f"multiplicity must be >= 1 at position {pos + len(base) + 1}")
        if notices is not None and not 0 <= a < n:
            notices.append(f"residue {a} reduced to {a % n} modulo {n}")
        values.extend([a] * m)
        pos += len(item) + 1
    return ResidueMultiset.of(values, n)


def _profile(p) -> list[str]:
    return [str(c) for c in p.counts]


def _header(n: int) -> dict:
    ctx = build_context(n)
    return {"modulus": n, "r": ctx.r, "phi": ctx.phi}


def _single_modulus(cfg: RunConfig) -> int:
    if len(cfg.moduli) != 1:
        raise DomainError("exactly one -n/--modulus is required for this command")
    return cfg.moduli[0]


def _block_dict(b) -> dict:
    return {"leader": b.leader, "signs": format_signs(b.signs), "residues": list(b.residues), "s_plus": str(b.s_plus)}


def cmd_analyze(cfg: RunConfig, notices: list[str]) -> dict:
    n = _single_modulus(cfg)
    A = parse_multiset(cfg.multiset or "", n, notices)
    prof = subset_sum_distribution(A)
    cond = necessary_conditions(A)
    poly = poly_identity_check(A)
    base = (2**A.k - 1) // n
    return {
        "command": "analyze",
        **_header(n),
        "multiset": str(A),
        "k": A.k,
        "profile": _profile(prof),
        "uniform": is_equidistributed(prof),
        "conditions": {
            "pow2_ok": cond.pow2_ok,
            "sum_ok": cond.sum_ok,
            "poly_identity": poly.holds,
            "remainder": [str(c) for c in poly.remainder.coeffs],
        },
        "deviations": [
            {"residue": m, "delta": str(c - base)} for m, c in enumerate(prof.counts) if c != base
        ],
    }


def cmd_construct(cfg: RunConfig, notices: list[str]) -> dict:
    q = _single_modulus(cfg)
    if not cfg.blocks:
        raise DomainError("construct needs -B/--blocks")
    blocks = blocks_from_spec(cfg.blocks, q)
    asm = assemble_multiset(blocks)
    actual = subset_sum_distribution(asm.multiset)
    predicted = predicted_profile(blocks)
    return {
        "command": "construct",
        **_header(q),
        "blocks": [_block_dict(b) for b in blocks],
        "multiset": str(asm.multiset),
        "S_plus_mod": asm.s_plus % q,
        "S_minus_mod": asm.s_minus % q,
        "bump_residue": asm.bump_residue,
        "sum_ok": asm.sum_ok,
        "predicted": _profile(predicted),
        "profile": _profile(actual),
        "uniform": is_equidistributed(actual),
        "match": predicted == actual,
    }


def cmd_decompose(cfg: RunConfig, notices: list[str]) -> dict:
    q = _single_modulus(cfg)
    ctx = build_context(q)
    A = parse_multiset(cfg.multiset or "", q, notices)
    app = theorem4_applicable(ctx, A)
    out = {
        "command": "decompose",
        **_header(q),
        "multiset": str(A),
        "theorem4": {"applicable": app.applicable, "branch": app.branch},
    }
    try:
        dec = decompose(A, ctx)
        out.update(decomposed=True, blocks=[_block_dict(b) for b in dec.blocks])
    except NoDecomposition as exc:
        out.update(
            decomposed=False,
            blocks=[],
            obstruction={"orbit_leader": exc.orbit_leader, "orbit": sorted(exc.orbit), "reason": exc.reason},
        )
        if ctx.minus_one_is_power_of_two:
            try:
                half = decompose(A, ctx, chain_length=ctx.order // 2)
                out["half_length_blocks"] = [_block_dict(b) for b in half.blocks]
            except NoDecomposition:
                pass
    return out


def cmd_count(cfg: RunConfig, notices: list[str]) -> list[dict]:
    if not cfg.moduli:
        raise DomainError("count needs at least one -n/--modulus")
    reports = []
    for q in cfg.moduli:
        p = prime_power_base(q) if q >= 3 else None
        if p is None or p == 2:
            notices.append(f"skipping {q}: not an odd prime power")
            continue
        reports.append(reconcile_counts(build_context(q), cfg.budget, cfg.jobs).to_dict())
    return reports


def cmd_verify(cfg: RunConfig, selector: str) -> dict:
    results = run_suites(selector, cfg)
    return {
        "command": "verify",
        "selector": selector,
        "seed": cfg.seed,
        "budget": cfg.budget,
        "cases": cfg.cases,
        "ok": all(r.status != FAIL for r in results),
        "suites": [r.to_dict() for r in results],
    }


def _text_analyze(rep: dict) -> str:
    c = rep["conditions"]
    lines = [
        f"A = {rep['multiset']} mod {rep['modulus']}  (k={rep['k']}, phi={rep['phi']}, r={rep['r']})",
        f"profile: {' '.join(rep['profile'])}",
        f"equidistributed: {'yes' if rep['uniform'] else 'no'}",
        f"2^k = 1: {c['pow2_ok']}   sum = 0: {c['sum_ok']}   product identity: {c['poly_identity']}",
    ]
    if rep["deviations"] and not rep["uniform"]:
        lines.append("deviations from floor((2^k-1)/n): " + ", ".join(
            f"{d['residue']}:{int(d['delta']):+d}" for d in rep["deviations"]))
    return "\n".join(lines)


def _text_construct(rep: dict) -> str:
    return "\n".join([
        "blocks: " + "; ".join(f"{b['leader']}:{b['signs']} -> {b['residues']}" for b in rep["blocks"]),
        f"A = {rep['multiset']} mod {rep['modulus']}",
        f"S+ mod q = {rep['S_plus_mod']}   S- mod q = {rep['S_minus_mod']}   sum = 0: {rep['sum_ok']}",
        f"predicted: {' '.join(rep['predicted'])}",
        f"actual:    {' '.join(rep['profile'])}",
        f"{'uniform' if rep['uniform'] else 'two-class deviation at 0 and ' + str(rep['bump_residue'])}; "
        f"prediction {'matches' if rep['match'] else 'DOES NOT match'}",
    ])


def _text_decompose(rep: dict) -> str:
    head = f"A = {rep['multiset']} mod {rep['modulus']} (r={rep['r']}); guarantee: {rep['theorem4']['branch']}"
    if rep["decomposed"]:
        return head + "\n" + "\n".join(
            f"block leader {b['leader']} signs {','.join(b['signs'])}: {b['residues']}" for b in rep["blocks"])
    ob = rep["obstruction"]
    lines = [head, f"no decomposition: orbit of {ob['orbit_leader']} {ob['orbit']}: {ob['reason']}"]
    if "half_length_blocks" in rep:
        lines.append("splits into half-length chains: " + "; ".join(
            f"{b['leader']}:{b['signs']}" for b in rep["half_length_blocks"]))
    return "\n".join(lines)


def _text_count(reports: list[dict]) -> str:
    lines = []
    for rep in reports:
        c = rep["counts"]
        mismatch = [k for k, v in c["flags"].items() if v is False]
        lines.append(
            f"q={rep['modulus']} r={rep['r']} ({rep['parity_case']}): formula {c['formula']} / "
            f"configurations {c['configurations']} / distinct {c['distinct_sets']} / brute {c['brute_force']}"
            + (f"  mismatch: {', '.join(mismatch)}" if mismatch else "")
        )
    return "\n".join(lines)


def _text_verify(rep: dict) -> str:
    lines = [f"{'suite':<14}{'status':<12}checked"]
    for s in rep["suites"]:
        lines.append(f"{s['name']:<14}{s['status'].upper():<12}{s['checked']}")
        for f in s["failures"][:10]:
            lines.append(f"    ! {f}")
        for d in s["details"].get("documented_divergence", []):
            lines.append(f"    ~ {d}")
    lines.append("OK" if rep["ok"] else "FAILED")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-n", "--modulus", type=int, action="append", default=[], help="modulus (repeatable)")
    common.add_argument("-A", "--multiset", help="multiset literal, e.g. 1,2^3,4")
    common.add_argument("-B", "--blocks", help="block spec, e.g. '1:+++;3:+-+'")
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max subsets/configurations to enumerate")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled cases")
    common.add_argument("--cases", type=int, default=1000, help="random cases per sampled suite")

    parser = argparse.ArgumentParser(prog="equisums", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="subset-sum profile and necessary conditions")
    sub.add_parser("construct", parents=[common], help="assemble +-2 blocks and compare profiles")
    sub.add_parser("decompose", parents=[common], help="split a multiset into +-2 blocks")
    sub.add_parser("count", parents=[common], help="formula vs construction vs census counts")
    p = sub.add_parser("verify", parents=[common], help="run reproduction suites")
    p.add_argument("selector", nargs="?", default="all", choices=SELECTORS)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    notices: list[str] = []
    try:
        cfg = RunConfig(
            moduli=args.modulus, multiset=args.multiset, blocks=args.blocks, json=args.json,
            budget=args.budget, jobs=args.jobs, seed=args.seed, cases=args.cases,
        )
        if args.command == "verify":
            report = cmd_verify(cfg, args.selector)
            text = _text_verify(report)
        else:
            handler, fmt = {
                "analyze": (cmd_analyze, _text_analyze),
                "construct": (cmd_construct, _text_construct),
                "decompose": (cmd_decompose, _text_decompose),
                "count": (cmd_count, _text_count),
            }[args.command]
            report = handler(cfg, notices)
            text = fmt(report)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except EquisumsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    for note in notices:
        print(f"notice: {note}", file=sys.stderr)
    print(json.dumps(report, indent=2) if cfg.json else text)
    if args.command == "verify" and not report["ok"]:
        return EXIT_VERIFY
    return EXIT_OK
