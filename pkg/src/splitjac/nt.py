"""Small number-theory helpers: factorization, CRT, unit groups, primes."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Dict, Iterator, List, Tuple


def factorize(n: int) -> Dict[int, int]:
    f: Dict[int, int] = {}
    x = n
    p = 2
    while p * p <= x:
        while x % p == 0:
            f[p] = f.get(p, 0) + 1
            x //= p
        p = 3 if p == 2 else p + 2
    if x > 1:
        f[x] = f.get(x, 0) + 1
    return f


def prime_factors(n: int) -> List[int]:
    return sorted(factorize(n))


def divisors(n: int) -> List[int]:
    ds = [1]
    for p, e in factorize(n).items():
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def euler_phi(n: int) -> int:
    out = n
    for p in factorize(n):
        out -= out // p
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    p = 3
    while p * p <= n:
        if n % p == 0:
            return False
        p += 2
    return True


def primes_up_to(bound: int) -> List[int]:
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, int(math.isqrt(bound)) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, b in enumerate(sieve) if b]


def iter_primes(start: int = 2) -> Iterator[int]:
    n = max(2, start)
    while True:
        if is_prime(n):
            yield n
        n += 1


def egcd(a: int, b: int) -> Tuple[int, int, int]:
    if b == 0:
        return (a, 1, 0)
    g, x, y = egcd(b, a % b)
    return (g, y, x - (a // b) * y)


def inv_mod(a: int, n: int) -> int:
    a %= n
    g, x, _ = egcd(a, n)
    if g != 1:
        raise ValueError(f"{a} not invertible mod {n}")
    return x % n


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    # moduli must be coprime
    g, u, v = egcd(m1, m2)
    assert g == 1
    return (r1 * v * m2 + r2 * u * m1) % (m1 * m2)


@lru_cache(maxsize=None)
def unit_group_gens(n: int) -> Tuple[int, ...]:
    """Generators of (Z/nZ)^* via CRT over prime powers."""
    if n <= 2:
        return ()
    gens: List[int] = []
    for p, e in factorize(n).items():
        q = p**e
        rest = n // q
        if p == 2:
            local = [] if e == 1 else ([3] if e == 2 else [q - 1, 5])
        else:
            local = [_primitive_root_mod_pe(p, e)]
        for g in local:
            gens.append(crt_pair(g, q, 1, rest) if rest > 1 else g % n)
    return tuple(gens)


def _primitive_root_mod_pe(p: int, e: int) -> int:
    g = _primitive_root_mod_p(p)
    if e == 1:
        return g
    # fix g so that it stays primitive mod p^2 (then mod all p^e)
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


def _primitive_root_mod_p(p: int) -> int:
    order_facs = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in order_facs):
            return g
    raise ValueError(f"no primitive root mod {p}")


def unit_group_elements(n: int) -> List[int]:
    return [a for a in range(max(n, 1)) if math.gcd(a, n) == 1] or [0]


def squarefree_part(n: int) -> int:
    out = 1
    for p, e in factorize(abs(n)).items():
        if e % 2:
            out *= p
    return out if n > 0 else -out
