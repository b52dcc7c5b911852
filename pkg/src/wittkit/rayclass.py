"""Ray class monoids: integral ideals up to ray-congruence for a modulus f.

Two integral ideals a, b are congruent when a*b^-1 = (t) for a generator
t in 1 + f*b^-1 (and t > 0 over Q; imaginary quadratic fields have no real
places).  The quotient of all integral ideals by this relation is a finite
commutative monoid whose unit group is the ray class group mod f.

Class counts are always computed twice: once by enumerating ideals up to a
bound and once from the class number formula.  Disagreement raises; it is
never papered over.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientBoundError, UsageError, WittkitError
from .qfield import (
    IdealHNF,
    QuadField,
    class_number,
    enumerate_ideals,
    factor_ideal,
    ideal_add,
    ideal_div,
    ideal_divisors,
    ideal_inverse,
    ideal_mul,
    is_principal,
    unit_ideal,
)


def congruent_mod(a: IdealHNF, b: IdealHNF, f: IdealHNF) -> bool:
    """Ray congruence a ~_f b for integral ideals."""
    for p in (a, b, f):
        if not p.is_integral():
            raise UsageError("ray congruence is defined on integral ideals")
    field = a.field
    t0 = is_principal(ideal_div(a, b))
    if t0 is None:
        return False
    fb = ideal_mul(f, ideal_inverse(b))
    one = field.one()
    for u in field.units():
        t = u * t0
        if field.is_rational and t.x <= 0:
            continue
        if fb.contains(t - one):
            return True
    return False


def _totient(n: int) -> int:
    out = n
    p = 2
    while p * p <= n:
        if n % p == 0:
            out -= out // p
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out -= out // n
    return out


def phi_ideal(f: IdealHNF) -> int:
    """#(O_K/f)^* from the prime factorization of f."""
    out = 1
    for prime, e in factor_ideal(f):
        np = int(prime.norm())
        out *= np ** (e - 1) * (np - 1)
    return out


def _unit_image_size(field: QuadField, f: IdealHNF) -> int:
    """Order of the image of the global units in (O_K/f)^*."""
    residues: list = []
    for u in field.units():
        if not any(f.contains(u - v) for v in residues):
            residues.append(u)
    return len(residues)


def ray_class_number(field: QuadField, f: IdealHNF) -> int:
    """Order of the ray class group mod f (with positivity at the real place of Q)."""
    if not f.is_integral():
        raise UsageError("modulus must be integral")
    if field.is_rational:
        return _totient(f.a)
    return class_number(field) * phi_ideal(f) // _unit_image_size(field, f)


def classify_ideals(f: IdealHNF, ideals: list[IdealHNF]) -> tuple[list[IdealHNF], list[int]]:
    """Partition ideals into ~_f classes; reps keep first-seen order."""
    field = f.field
    reps: list[IdealHNF] = []
    rep_gcds: list[tuple] = []
    labels: list[int] = []
    for p in ideals:
        g = ideal_add(p, f).key()
        hit = -1
        for i, r in enumerate(reps):
            if rep_gcds[i] == g and congruent_mod(p, r, f):
                hit = i
                break
        if hit < 0:
            reps.append(p)
            rep_gcds.append(g)
            hit = len(reps) - 1
        labels.append(hit)
    return reps, labels


@dataclass(frozen=True)
class RayClassMonoid:
    """Finite monoid of ray classes with an explicit multiplication table."""

    field: QuadField
    modulus: IdealHNF
    reps: tuple[IdealHNF, ...]
    table: tuple[tuple[int, ...], ...]
    identity: int
    unit_indices: tuple[int, ...]
    enumeration_bound: int

    def __len__(self) -> int:
        return len(self.reps)

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def gcd_of_class(self, i: int) -> IdealHNF:
        return ideal_add(self.reps[i], self.modulus)

    def class_of(self, p: IdealHNF) -> int:
        for i, r in enumerate(self.reps):
            if congruent_mod(p, r, self.modulus):
                return i
        raise WittkitError(f"ideal {p} matches no class; monoid data inconsistent")

    def to_json(self) -> dict:
        return {
            "schema": "wittkit/drf/1",
            "d": self.field.d,
            "modulus": self.modulus.to_json(),
            "reps": [r.to_json() for r in self.reps],
            "table": [list(row) for row in self.table],
            "units": list(self.unit_indices),
            "jclasses": j_classes(self),
            "bound": self.enumeration_bound,
        }


def default_bound(f: IdealHNF) -> int:
    return max(200, 20 * int(f.norm()))


def build_drf(field: QuadField, f: IdealHNF, bound: int | None = None) -> RayClassMonoid:
    """Build the ray class monoid for modulus f by enumeration up to bound.

    The realized classes are checked divisor-by-divisor against the class
    number formula, and the multiplication table must close on the reps;
    anything short raises InsufficientBoundError with the smallest witness.
    """
    if not f.is_integral():
        raise UsageError("modulus must be integral")
    if bound is None:
        bound = default_bound(f)
    ideals = enumerate_ideals(field, bound)
    reps, _ = classify_ideals(f, ideals)

    # formula path: one ray class group per divisor gcd
    by_gcd: dict[tuple, int] = {}
    for r in reps:
        key = ideal_add(r, f).key()
        by_gcd[key] = by_gcd.get(key, 0) + 1
    divisors = ideal_divisors(f)
    if len(by_gcd) > len(divisors):
        raise WittkitError("more gcd classes than divisors of the modulus; ideal arithmetic is broken")
    total_expected = 0
    for d in divisors:
        expected = ray_class_number(field, ideal_div(f, d))
        total_expected += expected
        realized = by_gcd.get(d.key(), 0)
        if realized < expected:
            raise InsufficientBoundError(
                f"bound {bound} realizes {realized} of {expected} classes with gcd {d} "
                f"for modulus {f}; raise the bound"
            )
        if realized > expected:
            raise WittkitError(
                f"{realized} classes with gcd {d} but the formula gives {expected}; "
                f"enumeration and formula disagree"
            )
    assert len(reps) == total_expected

    n = len(reps)
    gcds = [ideal_add(r, f).key() for r in reps]
    table = []
    for i in range(n):
        row = []
        for j in range(n):
            prod = ideal_mul(reps[i], reps[j])
            g = ideal_add(prod, f).key()
            hit = -1
            for k in range(n):
                if gcds[k] == g and congruent_mod(prod, reps[k], f):
                    hit = k
                    break
            if hit < 0:
                raise InsufficientBoundError(
                    f"product {reps[i]} * {reps[j]} = {prod} matches no class at bound {bound}"
                )
            row.append(hit)
        table.append(tuple(row))

    identity = None
    for i, r in enumerate(reps):
        if r == unit_ideal(field):
            identity = i
            break
    if identity is None:
        identity = next(i for i in range(n) if congruent_mod(unit_ideal(field), reps[i], f))

    units = tuple(s for s in range(n) if identity in table[s])
    formula_units = ray_class_number(field, f)
    if len(units) != formula_units:
        raise WittkitError(
            f"unit group has {len(units)} elements but the formula gives {formula_units}"
        )
    return RayClassMonoid(
        field=field,
        modulus=f,
        reps=tuple(reps),
        table=tuple(table),
        identity=identity,
        unit_indices=units,
        enumeration_bound=bound,
    )


def drf_units(monoid: RayClassMonoid) -> list[int]:
    """Indices of invertible classes (the ray class group mod f)."""
    return list(monoid.unit_indices)


def j_classes(monoid_or_table) -> list[list[int]]:
    """Partition by mutual divisibility of principal ideals s*M.

    Accepts a RayClassMonoid or a bare square table.  Blocks are sorted by
    their smallest member.
    """
    table = monoid_or_table.table if isinstance(monoid_or_table, RayClassMonoid) else monoid_or_table
    n = len(table)
    orbits = [frozenset(table[s][x] for x in range(n)) for s in range(n)]
    blocks: dict[frozenset, list[int]] = {}
    for s in range(n):
        blocks.setdefault(orbits[s], []).append(s)
    return sorted((sorted(b) for b in blocks.values()), key=lambda b: b[0])


def drf_projection(src: RayClassMonoid, dst: RayClassMonoid) -> list[int]:
    """The canonical surjection DR_f' ->> DR_f for f | f', as an index map."""
    if not dst.modulus.contains_ideal(src.modulus):
        raise UsageError(f"{dst.modulus} does not divide {src.modulus}")
    mapping = [dst.class_of(r) for r in src.reps]
    if set(mapping) != set(range(len(dst))):
        raise WittkitError("projection is not surjective; monoid data inconsistent")
    for i in range(len(src)):
        for j in range(len(src)):
            if mapping[src.table[i][j]] != dst.table[mapping[i]][mapping[j]]:
                raise WittkitError("projection is not a homomorphism; monoid data inconsistent")
    return mapping


def rho_vector(a: IdealHNF, bound: int):
    """The idempotent vector rho^a: 1 on multiples of a, else 0."""
    from .witt import rho_vector as _impl

    return _impl(a, bound)
