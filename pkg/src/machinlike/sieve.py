"""Candidate enumeration: integers x whose norm x^2+1 factors over P and 2.

Numerator-2 candidates (arguments ``2/x`` with x odd) use the norm x^2+4
and the same smoothness test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvalidInput, LimitTooLarge, NotSmooth

MAX_X_BITS = 64


# ---------------------------
# Primes
# ---------------------------

def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    bs = bytearray(b"\x01") * (n + 1)
    bs[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if bs[p]:
            bs[p * p:n + 1:p] = b"\x00" * ((n - p * p) // p + 1)
    return [i for i, v in enumerate(bs) if v]


def primes_1mod4(limit: int) -> list[int]:
    if limit < 5:
        raise InvalidInput(f"limit must be >= 5, got {limit}")
    return [p for p in primes_upto(limit) if p % 4 == 1]


_SMALL_PRIMES = primes_upto(1000)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24, probabilistic beyond."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeSet:
    primes: tuple[int, ...]

    def __post_init__(self):
        ps = tuple(sorted(int(p) for p in self.primes))
        if len(set(ps)) != len(ps):
            raise InvalidInput(f"duplicate primes in {ps}")
        for p in ps:
            if p % 4 != 1 or not is_prime(p):
                raise InvalidInput(f"{p} is not a prime congruent to 1 mod 4")
        object.__setattr__(self, "primes", ps)

    @classmethod
    def of(cls, primes: Iterable[int]) -> "PrimeSet":
        return cls(tuple(primes))

    def __iter__(self):
        return iter(self.primes)

    def __len__(self) -> int:
        return len(self.primes)

    def __contains__(self, p) -> bool:
        return p in self.primes

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.primes)) + "}"


# ---------------------------
# Candidates
# ---------------------------

@dataclass(frozen=True)
class Candidate:
    x: int
    norm: int
    factorization: dict[int, int] = field(compare=False, hash=False)
    numerator: int = 1

    @property
    def odd_primes(self) -> tuple[int, ...]:
        return tuple(p for p in self.factorization if p != 2)

    def label(self) -> str:
        return str(self.x) if self.numerator == 1 else f"{self.x}/{self.numerator}"

    def factor_string(self) -> str:
        parts = []
        for p in sorted(self.factorization):
            e = self.factorization[p]
            parts.append(str(p) if e == 1 else f"{p}^{e}")
        return "*".join(parts)

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "numerator": self.numerator,
            "norm": str(self.norm),
            "factorization": {str(p): e for p, e in sorted(self.factorization.items())},
        }


def factor_over(c: int, primes: Iterable[int]) -> dict[int, int]:
    """Exponents of ``c`` over ``primes`` and 2; raises NotSmooth on a cofactor."""
    if c < 2:
        raise InvalidInput(f"cannot factor {c}")
    out: dict[int, int] = {}
    for p in (2, *primes):
        e = 0
        while c % p == 0:
            c //= p
            e += 1
        if e:
            out[p] = e
    if c != 1:
        raise NotSmooth(f"cofactor {c} remains")
    return out


def check_norm_constraints(x: int) -> bool:
    """Trial-factor x^2+1 and confirm every odd prime is 1 mod 4 and 4 does not divide it."""
    if x < 1:
        raise InvalidInput("x must be >= 1")
    n = x * x + 1
    if n % 4 == 0:
        return False
    while n % 2 == 0:
        n //= 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            if p % 4 != 1:
                return False
            while n % p == 0:
                n //= p
        p += 2
    return n == 1 or n % 4 == 1


def _smooth_numbers(primes: Sequence[int], bound: int) -> list[int]:
    """All products of ``primes`` (with multiplicity) strictly below ``bound``."""
    out: list[int] = []

    def dfs(i: int, c: int) -> None:
        if i == len(primes):
            out.append(c)
            return
        dfs(i + 1, c)
        p = primes[i]
        tmp = c
        while tmp * p < bound:
            tmp *= p
            dfs(i + 1, tmp)

    dfs(0, 1)
    return out


def enumerate_candidates(P: PrimeSet | Iterable[int], max_x: int,
                         numerators: Sequence[int] = (1,)) -> list[Candidate]:
    """Every x in [2, max_x] with x^2 + a^2 smooth over P and 2, a in ``numerators``.

    The search bound on norms is N = max_x^2 + a^2 + 1, so ``c < N`` is the
    same as ``x <= max_x``.  Sorted by (x, numerator).
    """
    if not isinstance(P, PrimeSet):
        P = PrimeSet.of(P)
    if max_x < 2:
        raise InvalidInput("max_x must be >= 2")
    if max_x.bit_length() > MAX_X_BITS:
        raise LimitTooLarge(f"max_x must be below 2^{MAX_X_BITS}")
    for a in numerators:
        if a not in (1, 2):
            raise InvalidInput(f"unsupported numerator {a}")
    primes = list(P.primes)
    found: dict[tuple[int, int], Candidate] = {}
    for a in numerators:
        a2 = a * a
        bound = max_x * max_x + a2 + 1
        for c in _smooth_numbers(primes, bound):
            for cc in (c, 2 * c):
                if cc >= bound:
                    continue
                d = cc - a2
                if d < 4:
                    # excludes x = 1 (arctan 1) and x = 0
                    continue
                t = math.isqrt(d)
                if t * t != d:
                    continue
                if a == 2 and t % 2 == 0:
                    # 2/x with x even reduces to a unit numerator
                    continue
                found[(t, a)] = Candidate(t, cc, factor_over(cc, primes), a)
    return [found[key] for key in sorted(found)]


def viability_filter(cands: Sequence[Candidate], P: PrimeSet | Iterable[int]) -> bool:
    """True iff every prime of P divides the norms of at least two candidates."""
    counts: dict[int, int] = {}
    for c in cands:
        for p in c.odd_primes:
            counts[p] = counts.get(p, 0) + 1
    return all(counts.get(p, 0) >= 2 for p in P)


def cancellation_ok(cands: Sequence[Candidate]) -> bool:
    """Every odd prime dividing some selected norm divides at least two of them."""
    counts: dict[int, int] = {}
    for c in cands:
        for p in c.odd_primes:
            counts[p] = counts.get(p, 0) + 1
    return all(v >= 2 for v in counts.values())


def candidates_from_xs(xs: Iterable[int], P: PrimeSet | Iterable[int], numerator: int = 1) -> list[Candidate]:
    """Build candidates for an explicitly supplied list of x values."""
    primes = list(P)
    out = []
    for x in xs:
        n = x * x + numerator * numerator
        out.append(Candidate(x, n, factor_over(n, primes), numerator))
    return sorted(out, key=lambda c: (c.x, c.numerator))
