"""Truncated Witt vectors indexed by ideals, with Frobenius shifts.

A vector stores one coefficient-domain value per integral ideal of norm
<= bound, in the canonical enumeration order.  Over Q a vector can carry a
group-ring presentation (a finite sum of coefficients attached to rational
classes gamma mod 1, encoded as exponents mod L); components are then
materialized on demand as cyclotomic values e^{2 pi i gamma n}.

The congruence tower is tested by check_un: depth 0 is component
integrality, depth n+1 requires psi_p(xi) - xi^{N(p)} to be exactly
divisible by a generator of each principal prime, with the quotient passing
depth n.  For integer group-ring vectors the divisibility is verified on
coefficients with modular arithmetic, which is sound and fast; everything
else falls back to honest component-wise computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

from .cyclotomic import formal_pow, formal_shift
from .domains import ExactCyclotomic
from .errors import BoundExhaustedError, InsufficientBoundError, UsageError, WittkitError
from .qfield import (
    IdealHNF,
    QuadField,
    enumerate_ideals,
    ideal_mul,
    is_principal,
    make_field,
    prime_ideals,
    unit_ideal,
)

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover - gmpy2 is in the default install
    _mpz = int


@lru_cache(maxsize=256)
def _ideals(field: QuadField, bound: int) -> tuple[IdealHNF, ...]:
    return tuple(enumerate_ideals(field, bound))


def ideal_label(a: IdealHNF) -> str:
    if a.field.is_rational:
        return f"({a.a})"
    if a.c == a.a and a.b == 0:
        return f"({a.c})"
    return f"({a.a},{a.b}+{a.c}w)"


class WittVector:
    """Map from ideals of norm <= bound to values in a coefficient domain."""

    __slots__ = ("field", "domain", "bound", "gring", "gring_L", "_values")

    def __init__(self, field, domain, bound, values=None, gring=None, gring_L=1):
        if bound < 1:
            raise UsageError(f"vector bound must be >= 1, got {bound}")
        self.field = field
        self.domain = domain
        self.bound = bound
        self.gring = gring
        self.gring_L = gring_L
        self._values = dict(values) if values else {}
        if gring is not None:
            if not field.is_rational:
                raise UsageError("group-ring presentations exist only over Q")
            if not isinstance(domain, ExactCyclotomic) or domain.M != gring_L:
                raise UsageError("group-ring exponents must match the cyclotomic domain")

    def __repr__(self):
        tag = f", L={self.gring_L}" if self.gring is not None else ""
        return f"WittVector(d={self.field.d}, B={self.bound}, {self.domain!r}{tag})"

    def ideals(self) -> tuple[IdealHNF, ...]:
        return _ideals(self.field, self.bound)

    def value_at(self, a: IdealHNF):
        if a in self._values:
            return self._values[a]
        if self.gring is None:
            raise WittkitError(f"vector has no value at {ideal_label(a)}")
        v = self.domain.ctx.eval_formal(self.gring, a.a)
        self._values[a] = v
        return v

    def values_list(self) -> list:
        return [self.value_at(a) for a in self.ideals()]

    def to_json(self) -> dict:
        dom = {"kind": self.domain.kind}
        if self.domain.kind == "cyclotomic":
            dom["M"] = self.domain.M
        elif self.domain.kind == "bigcomplex":
            dom["prec"] = self.domain.prec
        elif self.domain.kind == "numberfield":
            dom["poly"] = list(self.domain.int_coeffs)
        return {
            "schema": "wittkit/vector/1",
            "d": self.field.d,
            "bound": self.bound,
            "domain": dom,
            "values": [
                [a.to_json(), self.domain.value_to_json(self.value_at(a))] for a in self.ideals()
            ],
        }


def constant_vector(field, domain, bound, value) -> WittVector:
    vals = {a: value for a in _ideals(field, bound)}
    return WittVector(field, domain, bound, values=vals)


def all_ones(field, bound: int) -> WittVector:
    domain = ExactCyclotomic(1)
    if field.is_rational:
        return WittVector(field, domain, bound, gring={0: Fraction(1)}, gring_L=1)
    return constant_vector(field, domain, bound, domain.one())


def zeta_gamma(q: int, p: int, bound: int) -> WittVector:
    """The vector n -> zeta_q^{pn} over Q, in the exact cyclotomic domain."""
    if q < 1:
        raise UsageError("denominator must be a positive integer")
    field = make_field(1)
    return WittVector(
        field, ExactCyclotomic(q), bound, gring={p % q: Fraction(1)}, gring_L=q
    )


def zlinear_combine(coeffs, gammas, bound: int) -> WittVector:
    """Pointwise sum of coeff * zeta^(gamma) in the lcm cyclotomic domain."""
    if len(coeffs) != len(gammas):
        raise UsageError("need one coefficient per gamma")
    gammas = [Fraction(g) for g in gammas]
    L = 1
    for g in gammas:
        L = math.lcm(L, g.denominator)
    gring: dict[int, Fraction] = {}
    for c, g in zip(coeffs, gammas):
        k = (g.numerator * (L // g.denominator)) % L
        acc = gring.get(k, Fraction(0)) + Fraction(c)
        if acc:
            gring[k] = acc
        else:
            gring.pop(k, None)
    field = make_field(1)
    return WittVector(field, ExactCyclotomic(L), bound, gring=gring, gring_L=L)


def rho_vector(a: IdealHNF, bound: int) -> WittVector:
    """The idempotent rho^a: component 1 on multiples of a, else 0."""
    if not a.is_integral():
        raise UsageError("rho needs an integral ideal")
    domain = ExactCyclotomic(1)
    one, zero = domain.one(), domain.zero()
    vals = {b: (one if a.contains_ideal(b) else zero) for b in _ideals(a.field, bound)}
    return WittVector(a.field, domain, bound, values=vals)


def _same_domain(x: WittVector, y: WittVector):
    if x.field.d != y.field.d:
        raise UsageError("vectors live over different fields")
    dx, dy = x.domain, y.domain
    if dx is dy:
        return dx
    if dx.kind != dy.kind:
        raise UsageError(f"domain mismatch: {dx!r} vs {dy!r}")
    if dx.kind == "cyclotomic" and dx.M == dy.M:
        return dx
    if dx.kind == "bigcomplex" and dx.prec == dy.prec:
        return dx
    raise UsageError(f"domain mismatch: {dx!r} vs {dy!r}")


def shift(xi: WittVector, a: IdealHNF) -> WittVector:
    """Frobenius shift psi_a: component at b becomes the component at a*b."""
    if a.field.d != xi.field.d:
        raise UsageError("shift ideal lives over a different field")
    if not a.is_integral():
        raise UsageError("shifts are indexed by integral ideals")
    na = int(a.norm())
    new_bound = xi.bound // na
    if new_bound < 1:
        raise BoundExhaustedError(
            f"shift by {ideal_label(a)} (norm {na}) exhausts bound {xi.bound}"
        )
    if xi.gring is not None:
        g = formal_shift(xi.gring, a.a, xi.gring_L)
        return WittVector(xi.field, xi.domain, new_bound, gring=g, gring_L=xi.gring_L)
    vals = {b: xi.value_at(ideal_mul(a, b)) for b in _ideals(xi.field, new_bound)}
    return WittVector(xi.field, xi.domain, new_bound, values=vals)


def _pointwise(x: WittVector, y: WittVector, op_name: str) -> WittVector:
    domain = _same_domain(x, y)
    bound = min(x.bound, y.bound)
    if (
        x.gring is not None
        and y.gring is not None
        and x.gring_L == y.gring_L
        and op_name != "mul"
    ):
        g = dict(x.gring)
        sign = -1 if op_name == "sub" else 1
        for k, c in y.gring.items():
            acc = g.get(k, Fraction(0)) + sign * c
            if acc:
                g[k] = acc
            else:
                g.pop(k, None)
        return WittVector(x.field, domain, bound, gring=g, gring_L=x.gring_L)
    op = getattr(domain, op_name)
    vals = {a: op(x.value_at(a), y.value_at(a)) for a in _ideals(x.field, bound)}
    return WittVector(x.field, domain, bound, values=vals)


def pointwise_add(x: WittVector, y: WittVector) -> WittVector:
    return _pointwise(x, y, "add")


def pointwise_sub(x: WittVector, y: WittVector) -> WittVector:
    return _pointwise(x, y, "sub")


def pointwise_mul(x: WittVector, y: WittVector) -> WittVector:
    domain = _same_domain(x, y)
    bound = min(x.bound, y.bound)
    if x.gring is not None and y.gring is not None and x.gring_L == y.gring_L:
        from .cyclotomic import formal_mul

        g = formal_mul(x.gring, y.gring, x.gring_L)
        return WittVector(x.field, domain, bound, gring=g, gring_L=x.gring_L)
    vals = {a: domain.mul(x.value_at(a), y.value_at(a)) for a in _ideals(x.field, bound)}
    return WittVector(x.field, domain, bound, values=vals)


def pointwise_pow(x: WittVector, e: int) -> WittVector:
    if e < 0:
        raise UsageError("pointwise powers take nonnegative exponents")
    if x.gring is not None:
        g = formal_pow(x.gring, e, x.gring_L)
        return WittVector(x.field, x.domain, x.bound, gring=g, gring_L=x.gring_L)
    vals = {a: x.domain.pow(x.value_at(a), e) for a in x.ideals()}
    return WittVector(x.field, x.domain, x.bound, values=vals)


# ---------------------------------------------------------------------------
# check_un


@dataclass
class CheckEntry:
    path: tuple[str, ...]
    kind: str  # "integrality" | "divisibility"
    verdict: str  # "pass" | "fail"
    detail: str = ""

    def to_json(self):
        return {
            "path": list(self.path),
            "kind": self.kind,
            "verdict": self.verdict,
            "detail": self.detail,
        }


@dataclass
class UnReport:
    passed: bool
    depth: int
    prime_norm_bound: int
    vector_bound: int
    field_d: int
    primes_used: list[str]
    primes_skipped: list[str]
    warnings: list[str]
    entries: list[CheckEntry]
    stats: dict = dc_field(default_factory=dict)

    def to_json(self):
        return {
            "schema": "wittkit/uncheck/1",
            "passed": self.passed,
            "depth": self.depth,
            "prime_norm_bound": self.prime_norm_bound,
            "vector_bound": self.vector_bound,
            "d": self.field_d,
            "primes_used": self.primes_used,
            "primes_skipped": self.primes_skipped,
            "warnings": self.warnings,
            "entries": [e.to_json() for e in self.entries],
            "stats": self.stats,
        }


def _principal_prime_steps(field, prime_norm_bound, warnings, skipped):
    steps = []
    used = []
    for p in prime_ideals(field, prime_norm_bound):
        gen = is_principal(p)
        label = ideal_label(p)
        if gen is None:
            skipped.append(label)
            warnings.append(
                f"prime {label} of norm {int(p.norm())} is not principal; "
                "divisibility there was not tested"
            )
            continue
        steps.append((p, int(p.norm()), gen, label))
        used.append(label)
    return steps, used


def _is_integer_gring(xi: WittVector) -> bool:
    return xi.gring is not None and all(c.denominator == 1 for c in xi.gring.values())


class _ModGring:
    """Dense coefficient array mod M over exponents mod L, with bound tracking."""

    __slots__ = ("arr", "L", "modulus", "bound")

    def __init__(self, arr, L, modulus, bound):
        self.arr = arr
        self.L = L
        self.modulus = modulus
        self.bound = bound

    @classmethod
    def from_vector(cls, xi: WittVector, modulus: int) -> "_ModGring":
        arr = [0] * xi.gring_L
        for k, c in xi.gring.items():
            arr[k] = int(c) % modulus
        return cls(arr, xi.gring_L, modulus, xi.bound)


def _mod_psi(g: _ModGring, p: int) -> list[int]:
    out = [0] * g.L
    M = g.modulus
    for k, c in enumerate(g.arr):
        if c:
            i = k * p % g.L
            out[i] = (out[i] + c) % M
    return out


def _kronecker_mul(a: list[int], b: list[int], L: int, M: int) -> list[int]:
    """Circular convolution mod x^L - 1 with coefficients mod M.

    Coefficients are packed into byte-aligned slots of one big integer so the
    convolution rides on big-int multiplication.  Slot width is chosen so
    column sums cannot overflow: L * (M-1)^2 < 256^slot_bytes.
    """
    slot_bytes = (L * (M - 1) * (M - 1)).bit_length() // 8 + 1
    pa = int.from_bytes(b"".join(c.to_bytes(slot_bytes, "little") for c in a), "little")
    pb = int.from_bytes(b"".join(c.to_bytes(slot_bytes, "little") for c in b), "little")
    prod = int(_mpz(pa) * _mpz(pb))
    raw = prod.to_bytes((2 * L - 1) * slot_bytes, "little")
    out = [0] * L
    for i in range(2 * L - 1):
        c = int.from_bytes(raw[i * slot_bytes : (i + 1) * slot_bytes], "little")
        if c:
            j = i % L
            out[j] = (out[j] + c) % M
    return out


def _mod_pow(g: _ModGring, e: int) -> list[int]:
    out = None
    base = g.arr
    while e:
        if e & 1:
            out = base if out is None else _kronecker_mul(out, base, g.L, g.modulus)
        e >>= 1
        if e:
            base = _kronecker_mul(base, base, g.L, g.modulus)
    if out is None:
        out = [0] * g.L
        out[0] = 1 % g.modulus
    return out


def check_un(xi: WittVector, depth: int, prime_norm_bound: int) -> UnReport:
    """Recursive U_n membership test, reported with full truncation data."""
    if not xi.domain.exact:
        raise UsageError("check_un needs an exact domain; certify the vector first")
    if depth < 0:
        raise UsageError("depth must be >= 0")
    warnings: list[str] = []
    skipped: list[str] = []
    steps, used = _principal_prime_steps(xi.field, prime_norm_bound, warnings, skipped)
    if depth > 0 and not steps:
        warnings.append(
            f"no principal primes of norm <= {prime_norm_bound}; "
            "only depth-0 integrality was tested"
        )
    entries: list[CheckEntry] = []
    stats = {"components_scanned": 0, "certificate_levels": 0}

    ok = _vector_integral(xi, (), entries, stats)
    if depth > 0:
        if _is_integer_gring(xi) and steps:
            R = 1
            for _, np_, _, _ in steps:
                R *= np_
            mg = _ModGring.from_vector(xi, R**depth)
            ok = _rec_modular(mg, depth, (), steps, R, entries, stats) and ok
        else:
            ok = _rec_components(xi, depth, (), steps, entries, stats) and ok

    return UnReport(
        passed=ok,
        depth=depth,
        prime_norm_bound=prime_norm_bound,
        vector_bound=xi.bound,
        field_d=xi.field.d,
        primes_used=used,
        primes_skipped=skipped,
        warnings=warnings,
        entries=entries,
        stats=stats,
    )


def _vector_integral(xi: WittVector, path, entries, stats) -> bool:
    if _is_integer_gring(xi):
        stats["certificate_levels"] += 1
        entries.append(
            CheckEntry(
                path,
                "integrality",
                "pass",
                "group-ring coefficients are integers, so every component "
                "is a Z-combination of roots of unity",
            )
        )
        return True
    for a in xi.ideals():
        stats["components_scanned"] += 1
        if not xi.domain.is_algebraic_integer(xi.value_at(a)):
            entries.append(
                CheckEntry(
                    path,
                    "integrality",
                    "fail",
                    f"component at {ideal_label(a)} is not an algebraic integer",
                )
            )
            return False
    entries.append(CheckEntry(path, "integrality", "pass", ""))
    return True


def _rec_modular(mg: _ModGring, n: int, path, steps, R, entries, stats) -> bool:
    if n == 0:
        entries.append(
            CheckEntry(
                path,
                "integrality",
                "pass",
                "quotient coefficients are exact integer divisions",
            )
        )
        return True
    stats["certificate_levels"] += 1
    ok = True
    for _, np_, _, label in steps:
        if mg.bound // np_ < 1:
            raise BoundExhaustedError(
                f"bound {mg.bound} cannot support a shift by {label} at path {path}"
            )
        shifted = _mod_psi(mg, np_)
        powed = _mod_pow(mg, np_)
        M = mg.modulus
        diff = [(s - t) % M for s, t in zip(shifted, powed)]
        bad = next((k for k, c in enumerate(diff) if c % np_), None)
        if bad is not None:
            raise WittkitError(
                "internal: coefficient certificate failed for an integer "
                f"group-ring vector at prime {label}, exponent {bad}"
            )
        entries.append(
            CheckEntry(
                path + (label,),
                "divisibility",
                "pass",
                f"all group-ring coefficients of psi - pow divisible by {np_} "
                f"(verified mod {M})",
            )
        )
        nm = R ** (n - 1)
        quot = _ModGring(
            [(c // np_) % nm if nm > 1 else 0 for c in diff],
            mg.L,
            max(nm, 1),
            mg.bound // np_,
        )
        ok = _rec_modular(quot, n - 1, path + (label,), steps, R, entries, stats) and ok
    return ok


def _rec_components(v: WittVector, n: int, path, steps, entries, stats) -> bool:
    if n == 0:
        # divisibility in _divide_vector already certified integrality
        entries.append(
            CheckEntry(path, "integrality", "pass", "certified during division")
        )
        return True
    ok = True
    for p, np_, gen, label in steps:
        if v.bound // np_ < 1:
            raise BoundExhaustedError(
                f"bound {v.bound} cannot support a shift by {label} at path {path}"
            )
        eta = pointwise_sub(shift(v, p), pointwise_pow(v, np_))
        quot, witness = _divide_vector(eta, gen, stats)
        if quot is None:
            entries.append(
                CheckEntry(path + (label,), "divisibility", "fail", witness)
            )
            ok = False
            continue
        entries.append(CheckEntry(path + (label,), "divisibility", "pass", ""))
        ok = _rec_components(quot, n - 1, path + (label,), steps, entries, stats) and ok
    return ok


def _divide_vector(eta: WittVector, gen, stats):
    vals = {}
    for a in eta.ideals():
        stats["components_scanned"] += 1
        q = eta.domain.div_prime(eta.value_at(a), gen)
        if q is None:
            return None, f"component at {ideal_label(a)} is not divisible by the generator"
        vals[a] = q
    return WittVector(eta.field, eta.domain, eta.bound, values=vals), None


# ---------------------------------------------------------------------------
# periodicity


def is_periodic_mod(xi: WittVector, f: IdealHNF) -> bool:
    """True iff components agree on every in-bound pair congruent mod f."""
    from .rayclass import classify_ideals

    if not f.is_integral():
        raise UsageError("modulus must be an integral ideal")
    ideals = xi.ideals()
    if not ideals:
        raise InsufficientBoundError("vector has no components")
    _, labels = classify_ideals(f, list(ideals))
    head: dict[int, object] = {}
    for a, lab in zip(ideals, labels):
        v = xi.value_at(a)
        if lab not in head:
            head[lab] = v
        elif not xi.domain.eq(head[lab], v):
            return False
    return True


def find_modulus(xi: WittVector, candidates: list[IdealHNF]):
    """First candidate (divisors before multiples) with periodic components."""
    ordered = sorted(candidates, key=lambda f: (f.norm(), f.a, f.b, f.c))
    for f in ordered:
        if is_periodic_mod(xi, f):
            return f
    return None


# ---------------------------------------------------------------------------
# orbit monoids


@dataclass
class OrbitMonoid:
    field: QuadField
    bound: int
    prime_norm_bound: int
    vectors: list
    alphabet: list[IdealHNF]
    reps: list[IdealHNF]
    letter_action: list[list[int]]
    table: list[list[int]]
    identity: int = 0

    def __len__(self):
        return len(self.reps)

    def j_partition(self) -> list[list[int]]:
        from .rayclass import j_classes

        return j_classes(self.table)

    def class_of(self, a: IdealHNF) -> int | None:
        for i, r in enumerate(self.reps):
            if _shifts_equal(self.vectors, a, r):
                return i
        return None

    def to_json(self):
        return {
            "schema": "wittkit/orbit/1",
            "d": self.field.d,
            "bound": self.bound,
            "prime_norm_bound": self.prime_norm_bound,
            "size": len(self.reps),
            "alphabet": [a.to_json() for a in self.alphabet],
            "reps": [r.to_json() for r in self.reps],
            "letter_action": self.letter_action,
            "table": self.table,
            "identity": self.identity,
            "j_classes": self.j_partition(),
        }


def _shifts_equal(vectors, a: IdealHNF, b: IdealHNF, tol=None) -> bool:
    """Equality of psi_a and psi_b on every vector, over the comparable bound."""
    if a == b:
        return True
    na, nb = int(a.norm()), int(b.norm())
    for xi in vectors:
        common = min(xi.bound // na, xi.bound // nb)
        if common < 1:
            raise BoundExhaustedError(
                f"cannot compare shifts by {ideal_label(a)} and {ideal_label(b)} "
                f"within bound {xi.bound}"
            )
        for c in _ideals(xi.field, common):
            va = xi.value_at(ideal_mul(a, c))
            vb = xi.value_at(ideal_mul(b, c))
            if tol is not None and hasattr(xi.domain, "eq_strict"):
                if not xi.domain.eq_strict(va, vb, tol):
                    return False
            elif not xi.domain.eq(va, vb):
                return False
    return True


def orbit_monoid(vectors: list[WittVector], prime_norm_bound: int) -> OrbitMonoid:
    """Breadth-first closure of the shift orbit over primes of norm <= P."""
    if not vectors:
        raise UsageError("need at least one vector")
    field = vectors[0].field
    bound = vectors[0].bound
    for xi in vectors[1:]:
        if xi.field.d != field.d or xi.bound != bound:
            raise UsageError("orbit generators need a shared field and bound")
    alphabet = prime_ideals(field, prime_norm_bound)
    if not alphabet:
        raise UsageError(f"no primes of norm <= {prime_norm_bound}")

    reps: list[IdealHNF] = [unit_ideal(field)]
    letter_action: list[list[int]] = []

    def locate(cand: IdealHNF) -> int | None:
        for k, r in enumerate(reps):
            if _shifts_equal(vectors, cand, r):
                return k
        return None

    i = 0
    while i < len(reps):
        row = []
        for p in alphabet:
            cand = ideal_mul(reps[i], p)
            j = locate(cand)
            if j is None:
                reps.append(cand)
                j = len(reps) - 1
            row.append(j)
        letter_action.append(row)
        i += 1

    table = []
    for ri in reps:
        row = []
        for rj in reps:
            k = locate(ideal_mul(ri, rj))
            if k is None:
                raise BoundExhaustedError(
                    f"product {ideal_label(ri)}*{ideal_label(rj)} matches no rep; "
                    "orbit not provably closed at this truncation"
                )
            row.append(k)
        table.append(row)

    return OrbitMonoid(
        field=field,
        bound=bound,
        prime_norm_bound=prime_norm_bound,
        vectors=list(vectors),
        alphabet=list(alphabet),
        reps=reps,
        letter_action=letter_action,
        table=table,
    )


def dim_x(vectors: list[WittVector], prime_norm_bound: int) -> int:
    """dim_K X_Xi: the element count of the orbit monoid."""
    return len(orbit_monoid(vectors, prime_norm_bound).reps)


def shift_partition(vectors: list[WittVector], ideals: list[IdealHNF], tol=None) -> list[int]:
    """Labels for the partition of the given ideals by shift equality.

    Pairwise comparisons are merged with union-find, so a tolerance-based
    equality that happens to be non-transitive still yields a partition.
    """
    n = len(ideals)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            ri, rj = find(i), find(j)
            if ri != rj and _shifts_equal(vectors, ideals[i], ideals[j], tol=tol):
                parent[rj] = ri
    labels = []
    canon: dict[int, int] = {}
    for i in range(n):
        r = find(i)
        labels.append(canon.setdefault(r, len(canon)))
    return labels


# ---------------------------------------------------------------------------
# component fields


@dataclass
class ComponentBlock:
    states: list[int]
    rep: IdealHNF
    n_values: int
    degree_over_field: int | None
    certified: bool
    method: str
    note: str = ""

    def to_json(self):
        return {
            "states": self.states,
            "rep": self.rep.to_json(),
            "n_values": self.n_values,
            "degree_over_field": self.degree_over_field,
            "certified": self.certified,
            "method": self.method,
            "note": self.note,
        }


@dataclass
class ComponentReport:
    field_d: int
    bound: int
    prime_norm_bound: int
    blocks: list[ComponentBlock]

    @property
    def n_components(self) -> int:
        return len(self.blocks)

    def to_json(self):
        return {
            "schema": "wittkit/components/1",
            "d": self.field_d,
            "bound": self.bound,
            "prime_norm_bound": self.prime_norm_bound,
            "n_components": self.n_components,
            "blocks": [b.to_json() for b in self.blocks],
        }


def component_report(
    xi: WittVector, prime_norm_bound: int, dmax: int = 4, orbit: OrbitMonoid | None = None
) -> ComponentReport:
    """J-partition of the orbit monoid with per-class component-field degrees."""
    if orbit is None:
        orbit = orbit_monoid([xi], prime_norm_bound)
    blocks = []
    for states in orbit.j_partition():
        vals: list = []
        for s in states:
            a = orbit.reps[s]
            nb = xi.bound // int(a.norm())
            for c in _ideals(xi.field, nb):
                v = xi.value_at(ideal_mul(a, c))
                if not any(xi.domain.eq(v, w) for w in vals):
                    vals.append(v)
        deg, certified, method, note = _component_degree(xi, vals, dmax)
        blocks.append(
            ComponentBlock(
                states=states,
                rep=orbit.reps[states[0]],
                n_values=len(vals),
                degree_over_field=deg,
                certified=certified,
                method=method,
                note=note,
            )
        )
    return ComponentReport(
        field_d=xi.field.d,
        bound=xi.bound,
        prime_norm_bound=prime_norm_bound,
        blocks=blocks,
    )


def _component_degree(xi: WittVector, vals, dmax):
    domain = xi.domain
    if domain.kind == "cyclotomic":
        return domain.ctx.subfield_degree(vals), True, "cyclotomic-galois", ""
    from . import algrec

    polys = []
    for v in vals:
        if domain.kind == "numberfield":
            poly = algrec.exact_minpoly_nf(domain, v)
        else:
            poly = algrec.minpoly(v, dmax, prec=domain.prec)
            poly = poly.coeffs if poly is not None else None
        if poly is None:
            return None, False, "lll", f"no relation of degree <= {dmax} found"
        polys.append(tuple(poly))
    method = "charpoly-factor" if domain.kind == "numberfield" else "lll"
    distinct = sorted(set(polys))
    if len(distinct) > 1:
        return (
            None,
            False,
            method,
            "values have different minimal polynomials; compositum degree not certified",
        )
    coeffs = distinct[0]
    deg = len(coeffs) - 1
    if deg == 1:
        return 1, True, method, ""
    if deg == 2:
        c0, c1, c2 = coeffs
        disc = c1 * c1 - 4 * c0 * c2
        if xi.field.is_rational or not _same_quadratic(disc, xi.field.d):
            return 2, True, method, ""
        return 1, True, method, "values already generate K"
    return (
        None,
        False,
        method,
        f"degree-{deg} component; degree over K not certified beyond quadratics",
    )


def _same_quadratic(disc: int, d: int) -> bool:
    """Whether Q(sqrt(disc)) = Q(sqrt(d)) for squarefree d."""
    if disc == 0:
        return False
    sf = 1
    n = abs(disc)
    p = 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
        if n % p == 0:
            sf *= p
            n //= p
        p += 1
    sf *= n
    if disc < 0:
        sf = -sf
    return sf == d
