"""Reproduction suites behind ``equisums verify``.

Each suite returns a JSON-ready :class:`SuiteResult`.  Every equidistributed
multiset a suite meets is handed back as a witness so the necessary-condition
suite can re-check all of them at the end.  Random cases are drawn in the
parent process from one seeded generator and only then sharded, so output is
identical for any ``jobs``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement

from ._parallel import pmap
from .counting import (
    LemmaInstance,
    brute_force_census,
    e_formula,
    enumerate_by_construction,
    lemma_h_bruteforce,
    lemma_h_formula,
)
from .distribution import (
    ResidueMultiset,
    coset_chain_partition,
    is_equidistributed,
    necessary_conditions,
    poly_identity_check,
    subset_sum_distribution,
    uniform_count,
)
from .errors import ResourceError
from .ring import build_context
from .structure import (
    NoDecomposition,
    assemble_multiset,
    build_block,
    canonical_leaders,
    decompose,
    predicted_profile,
    valid_sign_vectors,
)

THM1_MODULI = (3, 5, 7, 9, 11, 13, 15, 17, 21, 23, 105)
EVEN_MODULI = (4, 6, 8, 10)
THM5_MODULI = (5, 7, 9, 11, 13, 17, 23)
THM4_MODULI = (5, 7, 9, 11, 13, 17)
LEMMA_GRID = {"q": (3, 5, 7), "t": (1, 2, 3), "k": (1, 2)}
# q -> (formula, distinct construction sets); the census is expected to equal the latter
EVEN_R_EXPECTED = {5: (4, 1), 9: (8, 1), 11: (32, 1), 17: (288, 3)}

PASS, FAIL, DIVERGENCE = "pass", "fail", "divergence"


@dataclass
class SuiteResult:
    name: str
    status: str
    checked: int
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    witnesses: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "checked": self.checked,
            "details": self.details,
            "failures": self.failures,
        }


def _status(failures: list) -> str:
    return FAIL if failures else PASS


def enumerate_profile(elements: list[int], n: int) -> list[int]:
    """Non-empty subset-sum counts by listing every one of the 2^k subset sums."""
    sums = [0]
    for a in elements:
        sums += [s + a for s in sums]
    counts = [0] * n
    for s in sums[1:]:
        counts[s % n] += 1
    return counts


def suite_thm1(cfg) -> SuiteResult:
    failures, details, witnesses = [], {}, []
    for n in THM1_MODULI:
        ctx = build_context(n)
        A = ResidueMultiset.of(ctx.units, n)
        prof = subset_sum_distribution(A)
        expected = uniform_count(ctx.phi, n)
        chains = coset_chain_partition(ctx)
        flat = sorted(a for ch in chains for a in ch)
        ok = is_equidistributed(prof) and prof.counts[0] == expected
        ok_chains = flat == list(ctx.units) and len(chains) == ctx.phi // ctx.order
        details[str(n)] = {"phi": ctx.phi, "class_size": str(prof.counts[0]), "chains": len(chains)}
        if not ok:
            failures.append(f"n={n}: profile not uniform at (2^{ctx.phi}-1)/{n}")
        if not ok_chains:
            failures.append(f"n={n}: doubling chains do not partition the units")
        if ok:
            witnesses.append(A)
    return SuiteResult("thm1", _status(failures), len(THM1_MODULI), details, failures, witnesses)


def suite_even_modulus(cfg) -> SuiteResult:
    failures, details, checked = [], {}, 0
    for n in EVEN_MODULI:
        units = build_context(n).units
        hits = 0
        for mask in range(1, 1 << len(units)):
            A = ResidueMultiset.of([u for i, u in enumerate(units) if mask >> i & 1], n)
            checked += 1
            if is_equidistributed(subset_sum_distribution(A)):
                hits += 1
        details[str(n)] = {"subsets": (1 << len(units)) - 1, "equidistributed": hits}
        if hits:
            failures.append(f"n={n}: {hits} equidistributed subsets of units")
    return SuiteResult("even-modulus", _status(failures), checked, details, failures)


def _oracle_case(case: tuple[int, tuple[int, ...]]) -> tuple[bool, bool, bool]:
    n, elems = case
    A = ResidueMultiset.of(elems, n)
    prof = subset_sum_distribution(A)
    agree = list(prof.counts) == enumerate_profile(list(elems), n)
    uniform = is_equidistributed(prof)
    poly_ok = True if n < 3 else poly_identity_check(A).holds == uniform
    return agree, uniform, poly_ok


def _oracle_chunk(cases: list) -> list:
    return [_oracle_case(c) for c in cases]


def _chunks(items: list, jobs: int) -> list[list]:
    parts = max(1, jobs) * 4
    size = max(1, -(-len(items) // parts))
    return [items[i : i + size] for i in range(0, len(items), size)]


def _run_chunked(fn, items: list, jobs: int) -> list:
    return [r for part in pmap(fn, _chunks(items, jobs), jobs) for r in part]


def suite_dp_oracle(cfg) -> SuiteResult:
    cases = []
    for n in range(2, 10):
        for k in range(0, 5):
            for elems in combinations_with_replacement(range(n), k):
                cases.append((n, elems))
    exhaustive = len(cases)
    rng = random.Random(cfg.seed)
    for _ in range(cfg.cases):
        n = rng.randint(2, 15)
        k = rng.randint(0, 16)
        cases.append((n, tuple(rng.randrange(n) for _ in range(k))))
    results = _run_chunked(_oracle_chunk, cases, cfg.jobs)
    failures, witnesses = [], []
    for (n, elems), (agree, uniform, poly_ok) in zip(cases, results):
        if not agree:
            failures.append(f"n={n} A={list(elems)}: DP differs from enumeration")
        if not poly_ok:
            failures.append(f"n={n} A={list(elems)}: polynomial identity disagrees with uniformity")
        if uniform and elems:
            witnesses.append(ResidueMultiset.of(elems, n))
    details = {"exhaustive_cases": exhaustive, "random_cases": cfg.cases, "uniform_found": len(witnesses)}
    return SuiteResult("dp-oracle", _status(failures[:20]), len(cases), details, failures[:20], witnesses)


def _random_block_case(rng: random.Random) -> tuple[int, list[tuple[int, tuple[int, ...]]]]:
    q = rng.choice(THM5_MODULI)
    ctx = build_context(q)
    signs = valid_sign_vectors(ctx)
    return q, [(rng.choice(ctx.units), rng.choice(signs)) for _ in range(rng.randint(1, 3))]


def _thm5_case(case) -> dict:
    q, spec = case
    ctx = build_context(q)
    blocks = [build_block(b, s, ctx) for b, s in spec]
    asm = assemble_multiset(blocks)
    actual = subset_sum_distribution(asm.multiset)
    predicted = predicted_profile(blocks)
    uniform = is_equidistributed(actual)
    deviating = [m for m in range(q) if actual.counts[m] != uniform_count(asm.multiset.k, q)]
    try:
        roundtrip = decompose(asm.multiset, ctx).multiset() == asm.multiset
    except NoDecomposition:
        roundtrip = False
    return {
        "sum_ok": asm.sum_ok,
        "uniform": uniform,
        "match": actual == predicted,
        "deviating": deviating,
        "bump": asm.bump_residue,
        "roundtrip": roundtrip,
    }


def _thm5_chunk(cases: list) -> list:
    return [_thm5_case(c) for c in cases]


def suite_thm5(cfg) -> SuiteResult:
    rng = random.Random(cfg.seed)
    cases = [_random_block_case(rng) for _ in range(cfg.cases)]
    results = _run_chunked(_thm5_chunk, cases, cfg.jobs)
    failures, witnesses = [], []
    n_sum_ok = 0
    for i, ((q, spec), res) in enumerate(zip(cases, results)):
        label = f"case {i} q={q} blocks={[(b, ''.join('+' if s > 0 else '-' for s in sg)) for b, sg in spec]}"
        if res["sum_ok"]:
            n_sum_ok += 1
            if not res["uniform"]:
                failures.append(f"{label}: zero signed sum but profile not uniform")
        elif sorted(res["deviating"]) != sorted({0, res["bump"]}):
            failures.append(f"{label}: deviating classes {res['deviating']}, expected 0 and {res['bump']}")
        if not res["match"]:
            failures.append(f"{label}: profile differs from closed form")
        if not res["roundtrip"]:
            failures.append(f"{label}: decomposition round trip failed")
        if res["uniform"]:
            ctx = build_context(q)
            witnesses.append(assemble_multiset([build_block(b, s, ctx) for b, s in spec]).multiset)
    details = {"cases": cfg.cases, "sum_zero": n_sum_ok, "two_class_deviation": cfg.cases - n_sum_ok}
    return SuiteResult("thm5", _status(failures), cfg.cases, details, failures[:20], witnesses)


def suite_thm4(cfg) -> SuiteResult:
    failures, details, witnesses, checked = [], {}, [], 0
    for q in THM4_MODULI:
        ctx = build_context(q)
        census = brute_force_census(ctx, cfg.budget, cfg.jobs)
        bad, half = 0, 0
        for s in census.sets:
            A = ResidueMultiset.of(s, q)
            witnesses.append(A)
            checked += 1
            try:
                dec = decompose(A, ctx)
                if dec.multiset() != A or any(b.r != ctx.order for b in dec.blocks):
                    raise NoDecomposition(0, frozenset(), "reassembly mismatch")
            except NoDecomposition as exc:
                bad += 1
                note = ""
                if ctx.minus_one_is_power_of_two:
                    try:
                        hd = decompose(A, ctx, chain_length=ctx.order // 2)
                        half += 1
                        note = f"; splits into length-{ctx.order // 2} chains {[str(b) for b in hd.blocks]}"
                    except NoDecomposition:
                        pass
                failures.append(f"q={q} A={list(s)}: {exc}{note}")
        details[str(q)] = {"census": census.count, "undecomposable": bad, "half_chain_unions": half}
    return SuiteResult("thm4", _status(failures), checked, details, failures, witnesses)


def suite_lemma1(cfg) -> SuiteResult:
    failures, checked = [], 0
    for q in LEMMA_GRID["q"]:
        units = build_context(q).units
        for t in LEMMA_GRID["t"]:
            for pool in combinations(units, t):
                for n_vars in range(0, t + 1):
                    for k in LEMMA_GRID["k"]:
                        inst = LemmaInstance(q, pool, n_vars, k)
                        f, b = lemma_h_formula(inst), lemma_h_bruteforce(inst, max(cfg.budget, 1 << 16))
                        checked += 1
                        if f != b:
                            failures.append(f"q={q} pool={pool} n={n_vars} k={k}: formula {f} != brute {b}")
    spot = lemma_h_formula(LemmaInstance(3, (1, 2), 2, 1))
    details = {"cells": checked, "spot_q3_t2_n2_k1": spot}
    if spot != 6:
        failures.append(f"spot value {spot} != 6")
    return SuiteResult("lemma1", _status(failures), checked, details, failures)


def suite_thm6_odd(cfg) -> SuiteResult:
    failures, details, witnesses = [], {}, []
    for q, expected in ((7, 3), (23, 91)):
        ctx = build_context(q)
        formula = e_formula(ctx)
        built = enumerate_by_construction(ctx, cfg.budget)
        row = {
            "formula": str(formula),
            "configurations": str(built.configurations),
            "distinct_sets": str(len(built.distinct_sets)),
            "all_uniform": built.all_equidistributed,
        }
        if not formula == built.configurations == len(built.distinct_sets) == expected:
            failures.append(f"q={q}: {row} expected {expected} throughout")
        if not built.all_equidistributed:
            failures.append(f"q={q}: a constructed set is not equidistributed")
        witnesses.extend(ResidueMultiset.of(s, q) for s in built.distinct_sets)
        try:
            census = brute_force_census(ctx, cfg.budget, cfg.jobs)
            row["brute_force"] = str(census.count)
            if set(census.sets) != set(built.distinct_sets):
                failures.append(f"q={q}: census sets differ from constructed sets")
        except ResourceError:
            row["brute_force"] = "skipped: budget"
            if q == 7:
                failures.append("q=7: census must run")
        details[str(q)] = row
    return SuiteResult("thm6-odd", _status(failures), 2, details, failures, witnesses)


def suite_thm6_even(cfg) -> SuiteResult:
    failures, divergences, details, witnesses = [], [], {}, []
    for q, (exp_formula, exp_sets) in EVEN_R_EXPECTED.items():
        ctx = build_context(q)
        formula = e_formula(ctx)
        built = enumerate_by_construction(ctx, cfg.budget)
        census = brute_force_census(ctx, cfg.budget, cfg.jobs)
        t = canonical_leaders(ctx).t
        n_sets = len(built.distinct_sets)
        details[str(q)] = {
            "formula": str(formula),
            "configurations": str(built.configurations),
            "distinct_sets": str(n_sets),
            "brute_force": str(census.count),
        }
        witnesses.extend(ResidueMultiset.of(s, q) for s in census.sets)
        if formula != exp_formula or built.configurations != exp_formula:
            failures.append(f"q={q}: formula {formula} / configurations {built.configurations}, expected {exp_formula}")
        if n_sets != exp_sets or n_sets != 2**t - 1:
            failures.append(f"q={q}: {n_sets} distinct constructed sets, expected {exp_sets}")
        if census.count != exp_sets:
            failures.append(f"q={q}: census finds {census.count} sets, expected {exp_sets}")
        if formula != n_sets:
            divergences.append(
                f"q={q}: formula counts {formula} sign configurations, which yield {n_sets} distinct set"
                + ("s" if n_sets != 1 else "")
            )
    details["documented_divergence"] = divergences
    status = FAIL if failures else (DIVERGENCE if divergences else PASS)
    return SuiteResult("thm6-even", status, len(EVEN_R_EXPECTED), details, failures, witnesses)


def suite_thm2(cfg, witnesses: list[ResidueMultiset]) -> SuiteResult:
    failures = []
    unique = sorted(set(witnesses), key=lambda A: (A.modulus, A.entries))
    for A in unique:
        cond = necessary_conditions(A)
        poly = poly_identity_check(A) if A.modulus >= 3 else None
        if not (cond.pow2_ok and cond.sum_ok and (poly is None or poly.holds)):
            failures.append(f"n={A.modulus} A={A}: pow2={cond.pow2_ok} sum={cond.sum_ok} poly={poly and poly.holds}")
    return SuiteResult("thm2", _status(failures), len(unique), {"witnesses": len(unique)}, failures)


SUITES = {
    "thm1": suite_thm1,
    "even-modulus": suite_even_modulus,
    "dp-oracle": suite_dp_oracle,
    "thm5": suite_thm5,
    "thm4": suite_thm4,
    "lemma1": suite_lemma1,
    "thm6-odd": suite_thm6_odd,
    "thm6-even": suite_thm6_even,
}
SELECTORS = ("all", *SUITES, "thm2", "thm6")
# witness sources for a standalone thm2 run
_THM2_SOURCES = ("thm1", "thm5", "thm4", "thm6-odd")


def run_suites(selector: str, cfg) -> list[SuiteResult]:
    if selector == "all":
        names = list(SUITES)
    elif selector == "thm6":
        names = ["thm6-odd", "thm6-even"]
    elif selector == "thm2":
        names = []
    else:
        names = [selector]
    results = [SUITES[name](cfg) for name in names]
    if selector in ("all", "thm2"):
        sources = results if selector == "all" else [SUITES[name](cfg) for name in _THM2_SOURCES]
        results.append(suite_thm2(cfg, [w for res in sources for w in res.witnesses]))
    return results
