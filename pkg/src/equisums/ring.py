"""Modular arithmetic foundation: factorization, orders, unit groups, root tests."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, prod

from .errors import DomainError

Factorization = tuple[tuple[int, int], ...]


def factorize(m: int) -> Factorization:
    """Trial-division factorization, primes ascending."""
    if m < 2:
        raise DomainError(f"cannot factorize {m}: need m >= 2")
    out = []
    for p in (2, 3):
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    # candidates 6k-1, 6k+1
    p, step = 5, 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += step
        step = 6 - step
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def totient(n: int) -> int:
    if n == 1:
        return 1
    return prod((p - 1) * p ** (e - 1) for p, e in factorize(n))


def multiplicative_order(a: int, n: int) -> int:
    """Least r >= 1 with a^r = 1 (mod n)."""
    if n < 2:
        raise DomainError(f"modulus must be >= 2, got {n}")
    a %= n
    if gcd(a, n) != 1:
        raise DomainError(f"{a} is not a unit modulo {n}")
    order = totient(n)
    if order == 1:
        return 1
    for p, _ in factorize(order):
        while order % p == 0 and pow(a, order // p, n) == 1:
            order //= p
    return order


def prime_power_base(q: int) -> int | None:
    """The prime p when q = p^e, otherwise None."""
    if q < 2:
        return None
    f = factorize(q)
    return f[0][0] if len(f) == 1 else None


def _require_odd_prime_power(q: int) -> None:
    p = prime_power_base(q)
    if p is None or p == 2:
        raise DomainError(f"{q} is not an odd prime power")


def is_primitive_root(m: int, q: int) -> bool:
    _require_odd_prime_power(q)
    return multiplicative_order(m, q) == totient(q)


def is_semi_primitive_root(m: int, q: int) -> bool:
    _require_odd_prime_power(q)
    phi = totient(q)
    order = multiplicative_order(m, q)
    return phi % 2 == 0 and order == phi // 2


@dataclass(frozen=True)
class RingContext:
    n: int
    phi: int
    r: int | None
    units: tuple[int, ...]
    factorization: Factorization

    @property
    def is_odd(self) -> bool:
        return self.n % 2 == 1

    @property
    def is_prime_power(self) -> bool:
        return len(self.factorization) == 1

    @property
    def order(self) -> int:
        """Order of 2, raising for even moduli where it does not exist."""
        if self.r is None:
            raise DomainError(f"order of 2 is undefined modulo even n={self.n}")
        return self.r

    @property
    def minus_one_is_power_of_two(self) -> bool:
        """True when 2^(r/2) = -1, i.e. -1 lies in the cyclic group generated by 2."""
        r = self.order
        return r % 2 == 0 and pow(2, r // 2, self.n) == self.n - 1


@lru_cache(maxsize=512)
def build_context(n: int) -> RingContext:
    if n < 3:
        raise DomainError(f"modulus must be >= 3, got {n}")
    units = tuple(a for a in range(1, n) if gcd(a, n) == 1)
    r = multiplicative_order(2, n) if n % 2 else None
    return RingContext(n=n, phi=totient(n), r=r, units=units, factorization=factorize(n))


@dataclass(frozen=True)
class ChaDhiReport:
    q: int
    factorization: Factorization
    clause: str | None  # "Ia", "Ib", "IIa" or None
    checks: dict

    @property
    def applicable(self) -> bool:
        return self.clause is not None


def cha_dhi_applicable(q: int) -> ChaDhiReport:
    """Evaluate the two- and three-prime arithmetic conditions on odd composite q.

    Prime factors are taken in ascending order; the cyclic pattern of the
    three-prime clause is applied to that order literally.
    """
    if q < 3 or q % 2 == 0:
        raise DomainError(f"q must be an odd integer >= 3, got {q}")
    fac = factorize(q)
    if len(fac) == 1:
        raise DomainError(f"{q} is a prime power: prime power branch")
    checks: dict = {}
    if len(fac) == 2:
        (p1, a1), (p2, a2) = fac
        m1, m2 = p1**a1, p2**a2
        if p1 % 4 == 3 and p2 % 4 == 3:
            checks["p1_semi_mod_m2"] = is_semi_primitive_root(p1, m2)
            checks["p2_semi_mod_m1"] = is_semi_primitive_root(p2, m1)
            ok = checks["p1_semi_mod_m2"] and checks["p2_semi_mod_m1"]
            return ChaDhiReport(q, fac, "Ia" if ok else None, checks)
        checks["p1_prim_mod_m2"] = is_primitive_root(p1, m2)
        checks["p2_prim_mod_m1"] = is_primitive_root(p2, m1)
        ok = checks["p1_prim_mod_m2"] and checks["p2_prim_mod_m1"]
        return ChaDhiReport(q, fac, "Ib" if ok else None, checks)
    if len(fac) == 3:
        ps = [p for p, _ in fac]
        ms = [p**a for p, a in fac]
        checks["all_3_mod_4"] = all(p % 4 == 3 for p in ps)
        halves = [(p - 1) // 2 for p in ps]
        checks["halves_coprime"] = all(
            gcd(halves[i], halves[j]) == 1 for i in range(3) for j in range(i + 1, 3)
        )
        if not (checks["all_3_mod_4"] and checks["halves_coprime"]):
            return ChaDhiReport(q, fac, None, checks)
        # p1, p2, p3 primitive mod m2, m3, m1 and semi-primitive mod m3, m1, m2
        for i in range(3):
            checks[f"p{i + 1}_prim_mod_m{(i + 1) % 3 + 1}"] = is_primitive_root(
                ps[i], ms[(i + 1) % 3]
            )
            checks[f"p{i + 1}_semi_mod_m{(i + 2) % 3 + 1}"] = is_semi_primitive_root(
                ps[i], ms[(i + 2) % 3]
            )
        ok = all(checks.values())
        return ChaDhiReport(q, fac, "IIa" if ok else None, checks)
    checks["too_many_primes"] = len(fac)
    return ChaDhiReport(q, fac, None, checks)
