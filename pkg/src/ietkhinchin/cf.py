"""Independent continued-fraction oracles for two-letter exchanges.

A two-interval exchange with lengths (q-p, p)/q is the rotation by p/q; its
induction is subtractive Euclid on the two lengths.  Everything here works
directly on the integers (p, q) and never touches the induction machinery,
so it can sit on the other side of cross-validation tests.
"""

from __future__ import annotations

from math import gcd


def continued_fraction(p: int, q: int) -> list[int]:
    """Partial quotients [a1, a2, ...] of p/q with 0 < p < q, gcd(p, q) = 1."""
    if not (0 < p < q) or gcd(p, q) != 1:
        raise ValueError("need 0 < p < q coprime")
    out = []
    a, b = q, p
    while b:
        out.append(a // b)
        a, b = b, a % b
    return out


def convergent_denominators(p: int, q: int) -> list[int]:
    """Denominators q_k of the convergents of p/q (q_0 = 1 up to q itself)."""
    ks = [1]
    prev = 0
    for a in continued_fraction(p, q):
        ks.append(a * ks[-1] + prev)
        prev = ks[-2]
    return ks


def semiconvergent_denominators(p: int, q: int) -> list[int]:
    """Denominators j*q_k + q_{k-1} (1 <= j <= a_{k+1}) of all one-sided best
    approximations of p/q, in increasing order, up to and including q."""
    quotients = continued_fraction(p, q)
    out = []
    prev, cur = 0, 1
    for a in quotients:
        for j in range(1, a + 1):
            out.append(j * cur + prev)
        prev, cur = cur, out[-1]
    return out


def predicted_reduced_ns(p: int, q: int) -> set[int]:
    """Times n at which the rotation by p/q admits a reduced approximation
    triple, below the first connection.

    The forward orbit point after n steps is (n+2) * theta away from an
    integer, so n corresponds to the denominator m = n + 2; the reduced times
    are exactly the one-sided best approximation denominators with m >= 2,
    strictly before the connection at m = q.
    """
    return {m - 2 for m in semiconvergent_denominators(p, q) if 2 <= m < q}


def connection_time(p: int, q: int) -> int:
    """First n with T^n of the bottom singularity equal to the top one."""
    return q - 2


def subtractive_runs(p: int, q: int) -> list[int]:
    """Run lengths of same-direction subtractions of Euclid on (q-p, p).

    These are the acceleration counts of the induction started from the
    rotation by p/q; the final run ends when the two entries tie.
    """
    a, b = q - p, p
    runs: list[int] = []
    direction = None
    count = 0
    while a != b:
        step = "b" if a > b else "t"
        if step == direction:
            count += 1
        else:
            if direction is not None:
                runs.append(count)
            direction = step
            count = 1
        if a > b:
            a -= b
        else:
            b -= a
    if direction is not None:
        runs.append(count)
    return runs
