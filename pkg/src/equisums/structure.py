"""Geometric blocks with ratio +-2: orbits, leaders, assembly and decomposition."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .distribution import DistributionProfile, ResidueMultiset, uniform_count
from .errors import ConstraintError, DomainError, EquisumsError
from .ring import RingContext, build_context, cha_dhi_applicable

PLUS, MINUS = 1, -1


def parse_signs(text: str) -> tuple[int, ...]:
    table = {"+": PLUS, "-": MINUS}
    try:
        return tuple(table[ch] for ch in text)
    except KeyError as exc:
        raise DomainError(f"bad sign character {exc.args[0]!r} in {text!r}") from None


def format_signs(signs: Sequence[int]) -> str:
    return "".join("+" if s == PLUS else "-" for s in signs)


@dataclass(frozen=True)
class GeometricBlock:
    modulus: int
    leader: int
    signs: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.signs)

    @property
    def residues(self) -> tuple[int, ...]:
        q, b = self.modulus, self.leader
        return tuple(s * b * pow(2, j, q) % q for j, s in enumerate(self.signs))

    @property
    def s_plus(self) -> int:
        """Unreduced sum of the positively signed terms b * 2^(j-1)."""
        return self.leader * self.encoding

    @property
    def encoding(self) -> int:
        """Bit j-1 set exactly when sign j is +."""
        return sum(1 << j for j, s in enumerate(self.signs) if s == PLUS)

    @property
    def full_sum(self) -> int:
        return self.leader * ((1 << self.r) - 1)

    def __str__(self) -> str:
        return f"{self.leader}:{format_signs(self.signs)}"


@dataclass(frozen=True)
class LeaderBasis:
    modulus: int
    parity_case: str  # "odd_r" or "even_r"
    leaders: tuple[int, ...]
    span_size: int

    @property
    def t(self) -> int:
        return len(self.leaders)


def _require_odd(ctx: RingContext) -> None:
    if not ctx.is_odd:
        raise DomainError(f"+-2 blocks need an odd modulus, got {ctx.n}")


def pm2_orbit(b: int, ctx: RingContext) -> frozenset[int]:
    _require_odd(ctx)
    q = ctx.n
    b %= q
    if gcd(b, q) != 1:
        raise DomainError(f"{b} is not a unit modulo {q}")
    out = set()
    for j in range(ctx.order):
        v = b * pow(2, j, q) % q
        out.add(v)
        out.add(-v % q)
    return frozenset(out)


def canonical_leaders(ctx: RingContext) -> LeaderBasis:
    """Greedy leaders: 1 first, then the least unit outside every earlier +-2 span."""
    _require_odd(ctx)
    covered: set[int] = set()
    leaders = []
    span = 0
    for b in ctx.units:
        if b in covered:
            continue
        orbit = pm2_orbit(b, ctx)
        span = len(orbit)
        covered |= orbit
        leaders.append(b)
    case = "odd_r" if ctx.order % 2 else "even_r"
    return LeaderBasis(ctx.n, case, tuple(leaders), span)


def orbit_representatives(ctx: RingContext) -> dict[int, int]:
    """Map each unit to the least element (= canonical leader) of its +-2 orbit."""
    rep = {}
    for b in canonical_leaders(ctx).leaders:
        for v in pm2_orbit(b, ctx):
            rep[v] = b
    return rep


def build_block(b: int, signs: Sequence[int], ctx: RingContext) -> GeometricBlock:
    _require_odd(ctx)
    q, r = ctx.n, ctx.order
    b %= q
    if gcd(b, q) != 1:
        raise DomainError(f"leader {b} is not a unit modulo {q}")
    signs = tuple(signs)
    if len(signs) != r:
        raise DomainError(f"block modulo {q} needs {r} signs, got {len(signs)}")
    if any(s not in (PLUS, MINUS) for s in signs):
        raise DomainError(f"signs must be +1 or -1, got {signs}")
    if ctx.minus_one_is_power_of_two:
        half = r // 2
        for j in range(half):
            if signs[j] != signs[j + half]:
                raise ConstraintError(
                    f"signs {j + 1} and {j + 1 + half} must agree modulo {q} "
                    f"(2^{half} = -1), got {format_signs(signs)}"
                )
    block = GeometricBlock(q, b, signs)
    res = block.residues
    if len(set(res)) != r:
        raise ConstraintError(f"block {block} has repeated residues {res}")
    return block


def valid_sign_vectors(ctx: RingContext) -> list[tuple[int, ...]]:
    """All sign vectors giving distinct residues, in lexicographic order with + before -."""
    r = ctx.order
    if ctx.minus_one_is_power_of_two:
        half = r // 2
        out = []
        for bits in range(1 << half):
            first = tuple(MINUS if bits >> (half - 1 - j) & 1 else PLUS for j in range(half))
            out.append(first + first)
        return out
    return [
        tuple(MINUS if bits >> (r - 1 - j) & 1 else PLUS for j in range(r))
        for bits in range(1 << r)
    ]


@dataclass(frozen=True)
class Assembly:
    multiset: ResidueMultiset
    s_plus: int
    s_minus: int
    sum_ok: bool

    @property
    def bump_residue(self) -> int:
        """Residue gaining one extra subset sum; the signed negative part, reduced.

        The negatively signed terms sum to -s_minus, which is congruent to s_plus
        because every full chain sums to 0.
        """
        return -self.s_minus % self.multiset.modulus


def _common_modulus(blocks: Sequence[GeometricBlock], modulus: int | None) -> int:
    moduli = {blk.modulus for blk in blocks}
    if modulus is not None:
        moduli.add(modulus)
    if len(moduli) != 1:
        raise DomainError(f"blocks must share one modulus, got {sorted(moduli)}")
    return moduli.pop()


def assemble_multiset(blocks: Sequence[GeometricBlock], modulus: int | None = None) -> Assembly:
    q = _common_modulus(blocks, modulus)
    A = ResidueMultiset.of((a for blk in blocks for a in blk.residues), q)
    s_plus = sum(blk.s_plus for blk in blocks)
    s_minus = sum(blk.full_sum for blk in blocks) - s_plus
    return Assembly(A, s_plus, s_minus, s_plus % q == 0)


def predicted_profile(blocks: Sequence[GeometricBlock], modulus: int | None = None) -> DistributionProfile:
    """Closed-form non-empty-sum profile of a union of blocks.

    Uniform at (2^k - 1)/q, except one extra sum at the bump residue and one
    fewer at 0; the two corrections cancel when the assembly sums to 0.
    """
    asm = assemble_multiset(blocks, modulus)
    q = asm.multiset.modulus
    base = uniform_count(asm.multiset.k, q)
    counts = [base] * q
    counts[0] -= 1
    counts[asm.bump_residue] += 1
    return DistributionProfile(q, tuple(counts))


@dataclass(frozen=True)
class Decomposition:
    modulus: int
    blocks: tuple[GeometricBlock, ...]

    @property
    def S_plus(self) -> int:
        return sum(b.s_plus for b in self.blocks)

    @property
    def S_minus(self) -> int:
        return sum(b.full_sum for b in self.blocks) - self.S_plus

    @property
    def t(self) -> int:
        return len(self.blocks)

    def multiset(self) -> ResidueMultiset:
        return assemble_multiset(self.blocks, self.modulus).multiset


class NoDecomposition(EquisumsError):
    """Raised when a multiset cannot be split into +-2 blocks of length r."""

    def __init__(self, orbit_leader: int, orbit: frozenset[int], reason: str):
        self.orbit_leader = orbit_leader
        self.orbit = orbit
        self.reason = reason
        super().__init__(f"orbit of {orbit_leader}: {reason}")


def _decompose_orbit(counts: Counter, leader: int, ctx: RingContext, r: int) -> list[GeometricBlock]:
    """Exhaustive, lexicographically first split of one orbit's elements into blocks.

    The least remaining element is always the next leader: it must lie in some
    block and is that block's least member, and with sign 1 fixed to + the
    remaining signs are tried + before -.
    """
    q = ctx.n
    powers = [pow(2, j, q) for j in range(r)]
    dead: set[tuple] = set()

    def state() -> tuple:
        return tuple(sorted((a, c) for a, c in counts.items() if c))

    def solve() -> list[GeometricBlock] | None:
        live = [a for a, c in counts.items() if c]
        if not live:
            return []
        key = state()
        if key in dead:
            return None
        m = min(live)
        signs = [PLUS]
        used = [m]
        counts[m] -= 1

        def extend(j: int) -> list[GeometricBlock] | None:
            if j == r:
                rest = solve()
                if rest is None:
                    return None
                return [GeometricBlock(q, m, tuple(signs))] + rest
            for s in (PLUS, MINUS):
                e = s * m * powers[j] % q
                if counts[e] <= 0 or e in used:
                    continue
                counts[e] -= 1
                signs.append(s)
                used.append(e)
                found = extend(j + 1)
                used.pop()
                signs.pop()
                counts[e] += 1
                if found is not None:
                    return found
            return None

        found = extend(1)
        counts[m] += 1
        if found is None:
            dead.add(key)
        return found

    out = solve()
    if out is None:
        raise NoDecomposition(leader, pm2_orbit(leader, ctx), "chain search exhausted")
    return out


def decompose(A: ResidueMultiset, ctx: RingContext, chain_length: int | None = None) -> Decomposition:
    """Partition A into +-2 geometric blocks of length r, or raise NoDecomposition.

    ``chain_length=r/2`` is accepted when 2^(r/2) = -1; such chains close on
    themselves and are used to explain sets that admit no length-r split.
    """
    _require_odd(ctx)
    r = ctx.order
    if chain_length is not None and chain_length != r:
        if not (ctx.minus_one_is_power_of_two and chain_length == r // 2):
            raise DomainError(f"chain length must be r={r} (or r/2 when 2^(r/2) = -1), got {chain_length}")
        r = chain_length
    if A.modulus != ctx.n:
        raise DomainError(f"multiset modulus {A.modulus} differs from context {ctx.n}")
    rep = orbit_representatives(ctx)
    buckets: dict[int, Counter] = {}
    for a, mult in A.entries:
        if a not in rep:
            raise DomainError(f"{a} is not a unit modulo {ctx.n}")
        buckets.setdefault(rep[a], Counter())[a] = mult
    blocks: list[GeometricBlock] = []
    for leader in sorted(buckets):
        total = sum(buckets[leader].values())
        if total % r:
            raise NoDecomposition(
                leader, pm2_orbit(leader, ctx), f"orbit holds {total} elements, not a multiple of r={r}"
            )
    for leader in sorted(buckets):
        blocks.extend(_decompose_orbit(buckets[leader], leader, ctx, r))
    blocks.sort(key=lambda blk: (blk.leader, format_signs(blk.signs)))
    return Decomposition(ctx.n, tuple(blocks))


@dataclass(frozen=True)
class Theorem4Applicability:
    applicable: bool
    branch: str  # "prime_power", "composite_conditions" or "none"


def theorem4_applicable(ctx: RingContext, A: ResidueMultiset) -> Theorem4Applicability:
    """Whether the structure theorem guarantees a block decomposition of A."""
    q = ctx.n
    if not ctx.is_odd:
        return Theorem4Applicability(False, "none")
    if ctx.is_prime_power:
        return Theorem4Applicability(True, "prime_power")
    excluded = {1, (q - 1) // 2, (q + 1) // 2, q - 1}
    if cha_dhi_applicable(q).applicable and not any(A.multiplicity(a) for a in excluded):
        return Theorem4Applicability(True, "composite_conditions")
    return Theorem4Applicability(False, "none")


def blocks_from_spec(spec: str, q: int) -> list[GeometricBlock]:
    """Parse "b:+-+;b:++-" into validated blocks modulo q."""
    ctx = build_context(q)
    blocks = []
    for part in spec.split(";"):
        if not part:
            continue
        leader, sep, signs = part.partition(":")
        if not sep:
            raise DomainError(f"block {part!r} must look like leader:signs")
        try:
            b = int(leader)
        except ValueError:
            raise DomainError(f"bad leader {leader!r}") from None
        blocks.append(build_block(b, parse_signs(signs), ctx))
    if not blocks:
        raise DomainError("no blocks given")
    return blocks
