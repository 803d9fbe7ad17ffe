"""CM types of Q(zeta_q), identified with half-systems of (Z/q)^x.

The unit a stands for the embedding zeta -> exp(2 pi i a / q); complex
conjugation sends a to -a.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import gcd
from typing import Iterator

from .cyclotomic import check_modulus
from .exact_arith import euler_phi

ENUMERATION_PHI_LIMIT = 24


def units(q: int) -> list[int]:
    return [a for a in range(1, q) if gcd(a, q) == 1]


def pair_representatives(q: int) -> list[int]:
    """The smaller member min(a, q - a) of each pair {a, -a}, ascending."""
    return [a for a in units(q) if a < q - a]


@dataclass(frozen=True)
class CMType:
    q: int
    members: tuple[int, ...]

    def __post_init__(self):
        check_modulus(self.q)
        mem = tuple(sorted(m % self.q for m in self.members))
        object.__setattr__(self, "members", mem)
        reps = {min(a, self.q - a) for a in mem}
        if len(mem) != euler_phi(self.q) // 2 or len(reps) != len(mem):
            raise ValueError(f"{mem} is not a CM type for q={self.q}")
        if any(gcd(a, self.q) != 1 for a in mem):
            raise ValueError("members must be units")

    def __contains__(self, a: int) -> bool:
        return a % self.q in self.members

    def key(self) -> tuple[int, ...]:
        """Choice vector: for each pair representative r (ascending), 0 if r
        is chosen and 1 if -r is."""
        return tuple(0 if r in self.members else 1 for r in pair_representatives(self.q))

    def complement(self) -> CMType:
        return CMType(self.q, tuple(self.q - a for a in self.members))

    def to_json(self) -> dict:
        return {"q": self.q, "members": list(self.members)}

    @classmethod
    def from_json(cls, obj: dict) -> CMType:
        return cls(int(obj["q"]), tuple(int(m) for m in obj["members"]))


def enumerate_cm_types(q: int) -> Iterator[CMType]:
    """All 2^(phi(q)/2) CM types, lexicographic in the pair choices with
    the smaller representative first."""
    check_modulus(q)
    if euler_phi(q) > ENUMERATION_PHI_LIMIT:
        raise ValueError(f"phi({q}) exceeds the enumeration guard {ENUMERATION_PHI_LIMIT}")
    reps = pair_representatives(q)
    for choice in product((0, 1), repeat=len(reps)):
        yield CMType(q, tuple(r if c == 0 else q - r for r, c in zip(reps, choice)))


def hodge_sum(phi: CMType, i: int) -> int:
    """sum_{a in phi} a^i mod q."""
    return sum(pow(a, i, phi.q) for a in phi.members) % phi.q


def flip_at_one(phi: CMType) -> CMType:
    """Swap the member of phi lying in {1, -1}."""
    q = phi.q
    return CMType(q, tuple((q - a) if a in (1, q - 1) else a for a in phi.members))


def unit_cm_type(q: int, i: int) -> CMType:
    """A CM type whose i-th Hodge sum is a unit mod q (i odd).

    Start from the small half-system; if its sum is not a unit, the type
    flipped at {1, -1} has sum differing by -2 and therefore is one.
    """
    check_modulus(q)
    if i % 2 == 0 or i < 1:
        raise ValueError("i must be a positive odd integer")
    x = CMType(q, tuple(pair_representatives(q)))
    if gcd(hodge_sum(x, i), q) == 1:
        return x
    y = flip_at_one(x)
    if gcd(hodge_sum(y, i), q) != 1:
        raise ArithmeticError("flip construction failed; q must be odd")
    return y


def act_cyclotomic(s: int, phi: CMType) -> CMType:
    """Post-compose every embedding with the automorphism zeta -> zeta^s."""
    if gcd(s, phi.q) != 1:
        raise ValueError("s must be a unit mod q")
    return CMType(phi.q, tuple(s * a % phi.q for a in phi.members))
