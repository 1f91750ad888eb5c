"""Exact subset-sum residue counts and the necessary conditions for equidistribution."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .errors import DomainError
from .ring import RingContext


@dataclass(frozen=True)
class ResidueMultiset:
    """A multiset of residues modulo n, stored as sorted (residue, multiplicity) pairs."""

    modulus: int
    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.modulus < 2:
            raise DomainError(f"modulus must be >= 2, got {self.modulus}")
        prev = -1
        for a, mult in self.entries:
            if not 0 <= a < self.modulus:
                raise DomainError(f"residue {a} outside [0, {self.modulus - 1}]")
            if mult < 1:
                raise DomainError(f"multiplicity of {a} must be >= 1, got {mult}")
            if a <= prev:
                raise DomainError("entries must be strictly increasing by residue")
            prev = a

    @classmethod
    def of(cls, residues: Iterable[int], modulus: int) -> ResidueMultiset:
        """Build from raw integers (any sign), reducing each modulo `modulus`."""
        counts = Counter(a % modulus for a in residues)
        return cls(modulus, tuple(sorted(counts.items())))

    @property
    def k(self) -> int:
        return sum(m for _, m in self.entries)

    @property
    def elements(self) -> list[int]:
        return [a for a, m in self.entries for _ in range(m)]

    def multiplicity(self, a: int) -> int:
        return dict(self.entries).get(a % self.modulus, 0)

    def total(self) -> int:
        return sum(a * m for a, m in self.entries)

    def __str__(self) -> str:
        body = ",".join(f"{a}^{m}" if m > 1 else str(a) for a, m in self.entries)
        return "{" + body + "}"


@dataclass(frozen=True)
class DistributionProfile:
    modulus: int
    counts: tuple[int, ...]
    includes_empty: bool = False

    @property
    def total(self) -> int:
        return sum(self.counts)

    def with_empty(self) -> DistributionProfile:
        if self.includes_empty:
            return self
        counts = list(self.counts)
        counts[0] += 1
        return DistributionProfile(self.modulus, tuple(counts), True)


@dataclass(frozen=True)
class PolyRemainder:
    """Integer coefficients (constant term first) of a remainder modulo 1 + x + ... + x^(n-1)."""

    coeffs: tuple[int, ...]

    @property
    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                coef = str(c) if (c != 1 or i == 0) else ""
                terms.append(f"{coef}{mono}" if mono else coef)
        return " + ".join(terms) if terms else "0"


def subset_sum_distribution(A: ResidueMultiset, include_empty: bool = False) -> DistributionProfile:
    """Count sub-multisets (occurrences distinguishable) by sum residue, exactly."""
    n = A.modulus
    counts = [0] * n
    counts[0] = 1  # empty sum
    for a, mult in A.entries:
        for _ in range(mult):
            counts = [counts[m] + counts[m - a] for m in range(n)]
    if not include_empty:
        counts[0] -= 1
    return DistributionProfile(n, tuple(counts), include_empty)


def is_equidistributed(P: DistributionProfile) -> bool:
    if P.includes_empty:
        raise DomainError("uniformity is defined on non-empty-sum profiles")
    return len(set(P.counts)) == 1


def uniform_count(k: int, n: int) -> int:
    """(2^k - 1) / n, the common class size of an equidistributed k-multiset."""
    q, rem = divmod(2**k - 1, n)
    if rem:
        raise DomainError(f"{n} does not divide 2^{k} - 1")
    return q


@dataclass(frozen=True)
class ConditionReport:
    pow2_ok: bool
    sum_ok: bool


def necessary_conditions(A: ResidueMultiset) -> ConditionReport:
    n = A.modulus
    return ConditionReport(pow(2, A.k, n) == 1, A.total() % n == 0)


@dataclass(frozen=True)
class PolyIdentityResult:
    remainder: PolyRemainder
    holds: bool


def poly_identity_check(A: ResidueMultiset) -> PolyIdentityResult:
    """Reduce prod(1 + x^a) modulo 1 + x + ... + x^(n-1), factor by factor."""
    n = A.modulus
    if n < 3:
        raise DomainError(f"modulus must be >= 3, got {n}")
    d = n - 1
    rem = [0] * d
    rem[0] = 1
    for a, mult in A.entries:
        for _ in range(mult):
            # multiply by (1 + x^a) modulo x^n - 1, then fold x^(n-1) = -(1 + ... + x^(n-2))
            full = rem + [0]
            for i, c in enumerate(rem):
                if c:
                    full[(i + a) % n] += c
            top = full[d]
            rem = [c - top for c in full[:d]]
    rem_t = PolyRemainder(tuple(rem))
    return PolyIdentityResult(rem_t, rem_t.is_one)


def coset_chain_partition(ctx: RingContext) -> list[list[int]]:
    """Split the units into chains b, 2b, 4b, ... of length r, each b least uncovered."""
    if not ctx.is_odd:
        raise DomainError(f"chains by doubling need an odd modulus, got {ctx.n}")
    n, r = ctx.n, ctx.order
    covered: set[int] = set()
    chains = []
    for b in ctx.units:
        if b in covered:
            continue
        chain = [b * pow(2, m, n) % n for m in range(r)]
        covered.update(chain)
        chains.append(chain)
    return chains
