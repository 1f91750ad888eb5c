"""Counting equidistributed subsets of the units modulo an odd prime power.

Three routes are kept apart: the closed forms, enumeration of block
configurations satisfying the sign congruence, and an exhaustive census of
all unit subsets.  Reports compare them without presupposing agreement.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb, gcd

from ._parallel import pmap, split_range
from .distribution import ResidueMultiset, is_equidistributed, subset_sum_distribution
from .errors import DomainError, ResourceError
from .ring import RingContext, prime_power_base
from .structure import canonical_leaders, pm2_orbit, valid_sign_vectors

DEFAULT_BUDGET = 1 << 20
SKIPPED = "skipped: budget"


@dataclass(frozen=True)
class LemmaInstance:
    q: int
    pool: tuple[int, ...]
    n_vars: int
    k: int

    def __post_init__(self):
        if self.q < 2:
            raise DomainError(f"q must be >= 2, got {self.q}")
        if len(set(self.pool)) != len(self.pool):
            raise DomainError(f"pool entries must be distinct: {self.pool}")
        if any(not 0 < b < self.q or gcd(b, self.q) != 1 for b in self.pool):
            raise DomainError(f"pool must consist of units modulo {self.q}: {self.pool}")
        if not 0 <= self.n_vars <= len(self.pool):
            raise DomainError(f"n_vars={self.n_vars} must lie in [0, t={len(self.pool)}]")
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")

    @property
    def t(self) -> int:
        return len(self.pool)


def lemma_h_formula(inst: LemmaInstance) -> int:
    q, n = inst.q, inst.n_vars
    num = comb(inst.t, n) * ((inst.k * q + 1) ** n + q - 1)
    value, rem = divmod(num, q)
    assert rem == 0, f"inexact division in solution-count formula for {inst}"
    return value


def lemma_h_bruteforce(inst: LemmaInstance, budget: int = DEFAULT_BUDGET) -> int:
    """Count (n_vars-subset of the pool, x in {0..kq}^n_vars) with b.x = 0 (mod q)."""
    q, n = inst.q, inst.n_vars
    width = inst.k * q + 1
    work = comb(inst.t, n) * width**n
    if work > budget:
        raise ResourceError(f"lemma brute force needs {work} evaluations, budget {budget}")
    hits = 0
    for chosen in combinations(inst.pool, n):
        for xs in product(range(width), repeat=n):
            if sum(b * x for b, x in zip(chosen, xs)) % q == 0:
                hits += 1
    return hits


def _require_odd_prime_power(ctx: RingContext) -> None:
    p = prime_power_base(ctx.n)
    if p is None or p == 2:
        raise DomainError(f"{ctx.n} is not an odd prime power")


def e_formula(ctx: RingContext) -> int:
    """Closed-form count of equidistributed unit subsets, by parity of r."""
    _require_odd_prime_power(ctx)
    q, r, phi = ctx.n, ctx.order, ctx.phi
    if r % 2:
        t = phi // (2 * r)
        value, rem = divmod((2**r + 2) ** t + (q - 1) * 3**t, q)
        assert rem == 0, f"inexact division in odd-order count for q={q}"
        return value - 1
    return (2 ** (r // 2) + 1) ** (phi // r) - 1


def _mask(residues, index: dict[int, int]) -> int:
    m = 0
    for a in residues:
        m |= 1 << index[a]
    return m


def _unmask(mask: int, units: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(u for i, u in enumerate(units) if mask >> i & 1)


def _uniform(residues, q: int) -> bool:
    return is_equidistributed(subset_sum_distribution(ResidueMultiset.of(residues, q)))


@dataclass(frozen=True)
class ConstructionResult:
    configurations: int
    distinct_sets: tuple[tuple[int, ...], ...]
    all_equidistributed: bool


def _leader_options(b: int, ctx: RingContext) -> list[tuple[int, int]]:
    """(s_plus mod q, residue mask) for each way a leader may take part.

    Absent; once per valid sign vector; and, when a single block does not
    already cover the whole +-2 orbit, twice with complementary signs (the full
    orbit, contributing 0 to the congruence).
    """
    q = ctx.n
    index = {u: i for i, u in enumerate(ctx.units)}
    opts = [(0, 0)]
    for signs in valid_sign_vectors(ctx):
        residues = [s * b * pow(2, j, q) % q for j, s in enumerate(signs)]
        s_plus = b * sum(1 << j for j, s in enumerate(signs) if s > 0)
        opts.append((s_plus % q, _mask(residues, index)))
    if not ctx.minus_one_is_power_of_two:
        opts.append((0, _mask(pm2_orbit(b, ctx), index)))
    return opts


def enumerate_by_construction(ctx: RingContext, budget: int = DEFAULT_BUDGET) -> ConstructionResult:
    """Enumerate leader/sign configurations with zero signed sum and materialize their sets."""
    _require_odd_prime_power(ctx)
    q = ctx.n
    leaders = canonical_leaders(ctx).leaders
    options = [_leader_options(b, ctx) for b in leaders]
    space = 1
    for i, opts in enumerate(options):
        space *= len(opts)
        if space > budget:
            raise ResourceError(
                f"construction space exceeds budget {budget} at leader count {i + 1} of {len(leaders)}"
            )
    configurations = 0
    masks: set[int] = set()
    for choice in product(*options):
        if any(m for _, m in choice) and sum(s for s, _ in choice) % q == 0:
            configurations += 1
            mask = 0
            for _, m in choice:
                mask |= m
            masks.add(mask)
    sets = tuple(_unmask(m, ctx.units) for m in sorted(masks))
    ok = all(_uniform(s, q) for s in sets)
    return ConstructionResult(configurations, sets, ok)


def _census_shard(args: tuple[int, tuple[int, ...], int, int]) -> list[int]:
    q, units, lo, hi = args
    sizes = {k for k in range(1, len(units) + 1) if pow(2, k, q) == 1}
    found = []
    for mask in range(lo, hi):
        if mask.bit_count() not in sizes:
            continue
        if _uniform(_unmask(mask, units), q):
            found.append(mask)
    return found


@dataclass(frozen=True)
class CensusResult:
    count: int
    sets: tuple[tuple[int, ...], ...]


def brute_force_census(ctx: RingContext, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> CensusResult:
    """Test every non-empty subset of the units for an equidistributed profile."""
    total = 1 << ctx.phi
    if total > budget:
        raise ResourceError(f"census of 2^{ctx.phi} subsets exceeds budget {budget}")
    shards = split_range(1, total, max(1, jobs) * 4)
    parts = pmap(_census_shard, [(ctx.n, ctx.units, lo, hi) for lo, hi in shards], jobs)
    sets = tuple(_unmask(m, ctx.units) for part in parts for m in part)
    return CensusResult(len(sets), sets)


@dataclass
class CountReport:
    q: int
    r: int
    phi: int
    parity_case: str
    formula_value: int
    configuration_count: int
    distinct_set_count: int
    brute_force_count: int | None
    brute_force_status: str  # "exhaustive" or SKIPPED
    flags: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "modulus": self.q,
            "r": self.r,
            "phi": self.phi,
            "parity_case": self.parity_case,
            "counts": {
                "formula": str(self.formula_value),
                "configurations": str(self.configuration_count),
                "distinct_sets": str(self.distinct_set_count),
                "brute_force": (
                    str(self.brute_force_count) if self.brute_force_count is not None else self.brute_force_status
                ),
                "flags": dict(self.flags),
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> CountReport:
        c = d["counts"]
        bf = c["brute_force"]
        exhaustive = bf != SKIPPED
        return cls(
            q=d["modulus"],
            r=d["r"],
            phi=d["phi"],
            parity_case=d["parity_case"],
            formula_value=int(c["formula"]),
            configuration_count=int(c["configurations"]),
            distinct_set_count=int(c["distinct_sets"]),
            brute_force_count=int(bf) if exhaustive else None,
            brute_force_status="exhaustive" if exhaustive else SKIPPED,
            flags=dict(c["flags"]),
        )


def reconcile_counts(ctx: RingContext, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> CountReport:
    _require_odd_prime_power(ctx)
    formula = e_formula(ctx)
    built = enumerate_by_construction(ctx, budget)
    try:
        census = brute_force_census(ctx, budget, jobs)
        brute, status = census.count, "exhaustive"
    except ResourceError:
        census, brute, status = None, None, SKIPPED
    flags = {
        "formula_vs_config": formula == built.configurations,
        "formula_vs_sets": formula == len(built.distinct_sets),
        "sets_vs_bruteforce": None if census is None else set(census.sets) == set(built.distinct_sets),
        "construction_sets_uniform": built.all_equidistributed,
    }
    return CountReport(
        q=ctx.n,
        r=ctx.order,
        phi=ctx.phi,
        parity_case="odd_r" if ctx.order % 2 else "even_r",
        formula_value=formula,
        configuration_count=built.configurations,
        distinct_set_count=len(built.distinct_sets),
        brute_force_count=brute,
        brute_force_status=status,
        flags=flags,
    )
