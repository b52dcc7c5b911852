"""Modular and elliptic functions at CM points, and the vectors they induce.

Evaluation runs through the q-expansions of E4, E6, Delta and the
exponential series for the Weierstrass functions.  Before any series is
summed, tau is moved into the standard fundamental domain by SL2(Z); weight
factors (for g2, g3, Delta) and the Fricke index a (via f_a(g*tau) =
f_{a*g}(tau)) are transported along the same matrix, so |q| <= e^(-pi*sqrt(3))
and term counts stay small at any precision.

A deformation family (j, a Fricke index, or a characteristic subset of
M2(Z/N)) is evaluated at every integral ideal a of norm <= B by pairing the
CM point tau of the inverse ideal with the level matrix expressing (tau_K, 1)
in the chosen lattice basis; the result is a Witt vector with big-complex
components.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import mpmath

from .domains import BigComplex
from .errors import PrecisionError, UsageError, WittkitError
from .qfield import (
    IdealHNF,
    QuadElement,
    QuadField,
    enumerate_ideals,
    factor_prime,
    ideal_inverse,
    ideal_from_elements,
    ideal_pow,
    principal_ideal,
)
from .witt import WittVector

DEFAULT_PREC = 120
_GUARD = 15
_TERM_BUDGET = 200000
_REDUCE_MAX = 10000


def _frac_mpf(x):
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def omega_numeric(field: QuadField):
    """tau_K = omega as an mpc at the current working precision."""
    if field.is_rational:
        raise UsageError("the rational field has no CM point")
    root = mpmath.sqrt(-field.disc)
    return (field.omega_s + mpmath.mpc(0, 1) * root) / 2


def qelem_numeric(e: QuadElement):
    return _frac_mpf(e.x) + _frac_mpf(e.y) * omega_numeric(e.field)


# ---------------------------------------------------------------------------
# SL2(Z) reduction


def _reduce_tau(t):
    """Return (t', (p, q, r, s)) with t' = (p*t + q)/(r*t + s) in the fundamental domain."""
    p, q, r, s = 1, 0, 0, 1
    eps = mpmath.mpf(10) ** (-mpmath.mp.dps + 3)
    for _ in range(_REDUCE_MAX):
        n = int(mpmath.floor(t.real + mpmath.mpf("0.5")))
        if n:
            t = t - n
            p, q = p - n * r, q - n * s
        if abs(t) < 1 - eps:
            t = -1 / t
            p, q, r, s = -r, -s, p, q
        else:
            return t, (p, q, r, s)
    raise PrecisionError("tau reduction did not converge")


def _apply_mobius(g, t):
    p, q, r, s = g
    return (p * t + q) / (r * t + s)


def _reduced_with_guard(tau, prec):
    """Reduce tau and pick a working precision absorbing the Delta cancellation.

    The cross-check Delta = g2^3 - 27*g3^2 loses about 2*pi*Im(tau)*log10(e)
    digits to cancellation when Im(tau) is large, so the guard grows with the
    reduced imaginary part.
    """
    with mpmath.workdps(prec + _GUARD):
        t = mpmath.mpc(tau)
        if not t.imag > 0:
            raise UsageError("tau must lie in the upper half plane")
        tred, g = _reduce_tau(t)
        extra = int(2 * math.pi * math.log10(math.e) * float(tred.imag)) + 2
    dps = prec + _GUARD + extra
    with mpmath.workdps(dps):
        tred = _apply_mobius(g, mpmath.mpc(tau))
    return tred, g, dps


# ---------------------------------------------------------------------------
# Eisenstein series and j


def _nterms(im_tau, dps):
    m = int((dps + 8) * math.log(10) / (2 * math.pi * float(im_tau))) + 12
    if m > _TERM_BUDGET:
        raise PrecisionError(
            f"series needs {m} terms at Im(tau) = {float(im_tau):.3g}; precision unreachable"
        )
    return m


def _eis_series(t):
    """(g2, g3, Delta) at a reduced tau, Delta via the eta product."""
    q = mpmath.expjpi(2 * t)
    terms = _nterms(t.imag, mpmath.mp.dps)
    e4 = mpmath.mpf(1)
    e6 = mpmath.mpf(1)
    prod = mpmath.mpf(1)
    qn = mpmath.mpc(1)
    for n in range(1, terms + 1):
        qn = qn * q
        dn = 1 - qn
        f = qn / dn
        n3 = n * n * n
        e4 += 240 * n3 * f
        e6 -= 504 * n3 * n * n * f
        prod *= dn**24
    pi4 = mpmath.pi**4
    g2 = (4 * pi4 / 3) * e4
    g3 = (8 * pi4 * mpmath.pi**2 / 27) * e6
    delta = (2 * mpmath.pi) ** 12 * q * prod
    return g2, g3, delta


def eisenstein(tau, prec: int = DEFAULT_PREC):
    """(g2, g3, Delta, j) for the lattice Z*tau + Z.

    Delta comes from the eta product and is cross-checked against
    g2^3 - 27*g3^2 to 10^(-prec+10); j = 1728*g2^3/Delta.
    """
    tred, g, dps = _reduced_with_guard(tau, prec)
    with mpmath.workdps(dps):
        g2r, g3r, dr = _eis_series(tred)
        d_eis = g2r**3 - 27 * g3r**2
        tol = mpmath.mpf(10) ** (-(prec - 10))
        if abs(d_eis - dr) > abs(dr) * tol:
            raise PrecisionError("Delta series disagree beyond 10^(-prec+10)")
        jv = 1728 * g2r**3 / dr
        j2 = 1728 * g2r**3 / d_eis
        if abs(j2 - jv) > (1 + abs(jv)) * tol:
            raise PrecisionError("j cross-check failed beyond 10^(-prec+10)")
        _, _, r, s = g
        w = r * mpmath.mpc(tau) + s
        g2 = g2r / w**4
        g3 = g3r / w**6
        delta = dr / w**12
        return g2, g3, delta, jv


def j_invariant(tau, prec: int = DEFAULT_PREC):
    return eisenstein(tau, prec)[3]


# ---------------------------------------------------------------------------
# Weierstrass functions


def _reduce_z(z, t, dps):
    """z modulo Z*t + Z, recentred so |q|^(1/2) <= |e^(2 pi i z)| <= |q|^(-1/2)."""
    m = int(mpmath.nint(z.imag / t.imag))
    z = z - m * t
    n = int(mpmath.nint(z.real))
    z = z - n
    u = mpmath.expjpi(2 * z)
    if abs(u - 1) < mpmath.mpf(10) ** (-dps + 8):
        raise UsageError("z lies in the lattice Z*tau + Z")
    return z, u


def _wp_core(u, q, terms):
    acc = mpmath.mpf(1) / 12 + u / (1 - u) ** 2
    qn = mpmath.mpc(1)
    for _ in range(terms):
        qn = qn * q
        a1 = qn * u
        a2 = qn / u
        acc += a1 / (1 - a1) ** 2 + a2 / (1 - a2) ** 2 - 2 * qn / (1 - qn) ** 2
    return (2 * mpmath.pi * mpmath.mpc(0, 1)) ** 2 * acc


def _wpp_core(u, q, terms):
    acc = u * (1 + u) / (1 - u) ** 3
    qn = mpmath.mpc(1)
    for _ in range(terms):
        qn = qn * q
        a1 = qn * u
        a2 = qn / u
        acc += a1 * (1 + a1) / (1 - a1) ** 3 - a2 * (1 + a2) / (1 - a2) ** 3
    return (2 * mpmath.pi * mpmath.mpc(0, 1)) ** 3 * acc


def _wp_setup(z, tau, prec):
    tred, g, dps = _reduced_with_guard(tau, prec)
    with mpmath.workdps(dps):
        _, _, r, s = g
        w = r * mpmath.mpc(tau) + s
        z2, u = _reduce_z(mpmath.mpc(z) / w, tred, dps)
        q = mpmath.expjpi(2 * tred)
        terms = _nterms(tred.imag, dps) + 2
    return tred, w, u, q, terms, dps


def wp(z, tau, prec: int = DEFAULT_PREC):
    """Weierstrass p-function for the lattice Z*tau + Z via the exponential series."""
    tred, w, u, q, terms, dps = _wp_setup(z, tau, prec)
    with mpmath.workdps(dps):
        return _wp_core(u, q, terms) / w**2


def wp_prime(z, tau, prec: int = DEFAULT_PREC):
    """Derivative of wp, summed by its own series (not differenced from wp)."""
    tred, w, u, q, terms, dps = _wp_setup(z, tau, prec)
    with mpmath.workdps(dps):
        return _wpp_core(u, q, terms) / w**3


# ---------------------------------------------------------------------------
# Fricke functions


def _a_pair(a) -> tuple[Fraction, Fraction]:
    a1, a2 = a
    return (Fraction(a1) % 1, Fraction(a2) % 1)


def fricke(a, tau, k: int = 1, prec: int = DEFAULT_PREC):
    """f_a(tau) = (g2*g3/Delta) * wp(a1*tau + a2)^1, with the k = 2, 3 variants
    (g2^2/Delta)*wp^2 and (g3/Delta)*wp^3 used for the extra-unit fields."""
    a1, a2 = _a_pair(a)
    if a1 == 0 and a2 == 0:
        raise UsageError("a must be nonzero mod Z^2 (the a = 0 member is j)")
    if k not in (1, 2, 3):
        raise UsageError(f"Fricke power must be 1, 2 or 3, got {k}")
    tred, g, dps = _reduced_with_guard(tau, prec)
    p, q_, r, s = g
    b1 = (a1 * s - a2 * r) % 1
    b2 = (-a1 * q_ + a2 * p) % 1
    with mpmath.workdps(dps):
        g2, g3, delta = _eis_series(tred)
        z = _frac_mpf(b1) * tred + _frac_mpf(b2)
        _, u = _reduce_z(z, tred, dps)
        q = mpmath.expjpi(2 * tred)
        terms = _nterms(tred.imag, dps) + 2
        pval = _wp_core(u, q, terms)
        if k == 1:
            return g2 * g3 / delta * pval
        if k == 2:
            return g2**2 / delta * pval**2
        return g3 / delta * pval**3


def fricke_power(d: int) -> int:
    """The power forced by the unit group: 2 for d = -1, 3 for d = -3, else 1."""
    if d == -1:
        return 2
    if d == -3:
        return 3
    return 1


# ---------------------------------------------------------------------------
# CM points and level matrices


@dataclass(frozen=True)
class CmPoint:
    ideal: IdealHNF
    w1: QuadElement
    w2: QuadElement
    tau: object
    prec: int


_CM_CACHE: dict = {}
_LM_CACHE: dict = {}
_J_CACHE: dict = {}


def clear_caches():
    _CM_CACHE.clear()
    _LM_CACHE.clear()
    _J_CACHE.clear()


def cm_point(a: IdealHNF, prec: int = DEFAULT_PREC) -> CmPoint:
    """Basis (w1, w2) of the inverse ideal with tau = w1/w2 in the upper half plane."""
    f = a.field
    if f.is_rational:
        raise UsageError("CM points exist only over imaginary quadratic fields")
    if not a.is_integral():
        raise UsageError("CM points are computed for integral ideals")
    key = (f.d, a.key(), prec)
    if key in _CM_CACHE:
        return _CM_CACHE[key]
    inv = ideal_inverse(a)
    v1, v2 = inv.basis()
    w1, w2 = v2, v1  # v2 carries omega, so v2/v1 has positive imaginary part
    if ideal_from_elements(f, [w1, w2]) != inv:
        raise WittkitError("CM basis does not span the inverse ideal")
    with mpmath.workdps(prec + _GUARD):
        tau = qelem_numeric(w1) / qelem_numeric(w2)
        if not tau.imag > 0:
            raise WittkitError("CM point landed outside the upper half plane")
    pt = CmPoint(a, w1, w2, tau, prec)
    _CM_CACHE[key] = pt
    return pt


@dataclass(frozen=True)
class LevelMatrix:
    """Integer matrix writing (tau_K, 1) in the basis (w1, w2) of the inverse ideal."""

    N: int
    entries: tuple[tuple[int, int], tuple[int, int]]
    exact: tuple[tuple[int, int], tuple[int, int]]

    @property
    def det_exact(self) -> int:
        (a, b), (c, d) = self.exact
        return a * d - b * c


def _int_div(num: int, den: int) -> int:
    if num % den:
        raise WittkitError(f"expected exact division {num}/{den} in level matrix")
    return num // den


def level_matrix(a: IdealHNF, N: int, prec: int = DEFAULT_PREC) -> LevelMatrix:
    if N < 1:
        raise UsageError(f"level must be >= 1, got {N}")
    f = a.field
    key = (f.d, a.key(), N)
    if key in _LM_CACHE:
        return _LM_CACHE[key]
    pt = cm_point(a, prec)
    inv = ideal_inverse(a)
    ai, bi, ci, den = inv.a, inv.b, inv.c, inv.den
    m11 = _int_div(den, ci)
    m12 = -_int_div(den * bi, ci * ai)
    m21 = 0
    m22 = _int_div(den, ai)
    omega = f.omega()
    one = f.one()
    if pt.w1.scale(m11) + pt.w2.scale(m12) != omega:
        raise WittkitError("level matrix row 1 does not reproduce tau_K")
    if pt.w1.scale(m21) + pt.w2.scale(m22) != one:
        raise WittkitError("level matrix row 2 does not reproduce 1")
    det = m11 * m22 - m12 * m21
    if det != a.norm():
        raise WittkitError(f"level matrix determinant {det} != N(a) = {a.norm()}")
    lm = LevelMatrix(
        N=N,
        entries=((m11 % N, m12 % N), (m21 % N, m22 % N)),
        exact=((m11, m12), (m21, m22)),
    )
    _LM_CACHE[key] = lm
    return lm


# ---------------------------------------------------------------------------
# Deformation families


@dataclass(frozen=True)
class JFamily:
    level: int = 1

    def describe(self) -> str:
        return "j"


@dataclass(frozen=True)
class FrickeFamily:
    a: tuple[Fraction, Fraction]
    k: int | None = None
    level: int = 0

    def __post_init__(self):
        a1, a2 = _a_pair(self.a)
        if a1 == 0 and a2 == 0:
            raise UsageError("Fricke family needs a nonzero index (a = 0 is JFamily)")
        if self.k is not None and self.k not in (1, 2, 3):
            raise UsageError(f"Fricke power must be 1, 2 or 3, got {self.k}")
        level = self.level or math.lcm(a1.denominator, a2.denominator)
        if a1.denominator > 1 and level % a1.denominator or a2.denominator > 1 and level % a2.denominator:
            raise UsageError(f"index {self.a} does not live at level {self.level}")
        object.__setattr__(self, "a", (a1, a2))
        object.__setattr__(self, "level", level)

    def describe(self) -> str:
        return f"fricke:{self.a[0]},{self.a[1]}"


def _mat_mul2(x, y, mod=None):
    out = (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )
    if mod is None:
        return out
    return tuple(tuple(v % mod for v in row) for row in out)


@dataclass(frozen=True)
class CharFamily:
    """0/1 family from a subset S of M2(Z/N) closed under the right GL2(Z/N) action."""

    N: int
    S: frozenset

    def __post_init__(self):
        if self.N < 1:
            raise UsageError(f"level must be >= 1, got {self.N}")
        S = frozenset(tuple(tuple(v % self.N for v in row) for row in m) for m in self.S)
        object.__setattr__(self, "S", S)
        gens = [((1, 1), (0, 1)), ((1, 0), (1, 1))]
        gens += [((u, 0), (0, 1)) for u in range(2, self.N) if math.gcd(u, self.N) == 1]
        for m in S:
            for g in gens:
                if _mat_mul2(m, g, self.N) not in S:
                    raise UsageError("S is not closed under the right GL2(Z/N) action")

    @property
    def level(self) -> int:
        return self.N

    def describe(self) -> str:
        return f"char:N={self.N},|S|={len(self.S)}"


def _valuation(p: IdealHNF, a: IdealHNF) -> int:
    v = 0
    power = p
    while power.contains_ideal(a):
        v += 1
        power = ideal_pow(p, v + 1)
    return v


def _local_generator(a: IdealHNF) -> QuadElement:
    """s in a with v_p(s) = v_p(a) at every prime over N(a)."""
    f = a.field
    n = int(a.norm())
    targets = []
    seen = set()
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            seen.add(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        seen.add(m)
    for p in sorted(seen):
        for pid in factor_prime(f, p)[1]:
            targets.append((pid, _valuation(pid, a)))
    g1, g2 = a.basis()
    for radius in range(1, 21):
        for x in range(-radius, radius + 1):
            for y in range(-radius, radius + 1):
                if max(abs(x), abs(y)) != radius:
                    continue
                s = g1.scale(x) + g2.scale(y)
                if s.is_zero():
                    continue
                ps = principal_ideal(s)
                if all(_valuation(pid, ps) == v for pid, v in targets):
                    return s
    raise WittkitError(f"no local generator found for {a!r}")


def q_tau_matrix(s: QuadElement) -> tuple[tuple[int, int], tuple[int, int]]:
    """Integer matrix of multiplication by s in the basis (tau_K, 1) of O_K."""
    f = s.field
    x, y = s.x, s.y
    if x.denominator != 1 or y.denominator != 1:
        raise UsageError("q_tau needs an algebraic integer")
    x, y = int(x), int(y)
    return ((x + y * f.omega_s, y * f.omega_t), (y, x))


def char_family_from_ideal(a: IdealHNF) -> CharFamily:
    """The subset image of q_tau(s)*M2(Z/N) for N = N(a); its 0/1 vector is rho^a."""
    if not a.is_integral():
        raise UsageError("characteristic families are built from integral ideals")
    n = int(a.norm())
    if n == 1:
        return CharFamily(1, frozenset({((0, 0), (0, 0))}))
    qm = q_tau_matrix(_local_generator(a))
    S = set()
    for r00 in range(n):
        for r01 in range(n):
            for r10 in range(n):
                for r11 in range(n):
                    S.add(_mat_mul2(qm, ((r00, r01), (r10, r11)), n))
    return CharFamily(n, frozenset(S))


# ---------------------------------------------------------------------------
# Modular vectors


def _resolve_power(family: FrickeFamily, d: int) -> int:
    forced = fricke_power(d)
    if family.k is not None and family.k != forced:
        raise UsageError(f"Fricke power {family.k} conflicts with d = {d} (needs {forced})")
    return forced


def _j_component(d: int, a: IdealHNF, prec: int):
    key = (d, a.key(), prec)
    if key not in _J_CACHE:
        pt = cm_point(a, prec)
        _J_CACHE[key] = j_invariant(pt.tau, prec)
    return _J_CACHE[key]


def modular_vector(family, field: QuadField, bound: int, prec: int = DEFAULT_PREC) -> WittVector:
    """Evaluate the family at every integral ideal of norm <= bound."""
    if field.is_rational:
        raise UsageError("modular vectors live over imaginary quadratic fields")
    domain = BigComplex(prec)
    keff = _resolve_power(family, field.d) if isinstance(family, FrickeFamily) else None
    values = {}
    for b in enumerate_ideals(field, bound):
        if isinstance(family, JFamily):
            values[b] = _j_component(field.d, b, prec)
        elif isinstance(family, FrickeFamily):
            lm = level_matrix(b, family.level, prec)
            (m11, m12), (m21, m22) = lm.exact
            a1, a2 = family.a
            am = ((a1 * m11 + a2 * m21) % 1, (a1 * m12 + a2 * m22) % 1)
            if am == (0, 0):
                values[b] = _j_component(field.d, b, prec)
            else:
                values[b] = fricke(am, cm_point(b, prec).tau, keff, prec)
        elif isinstance(family, CharFamily):
            lm = level_matrix(b, family.N, prec)
            with mpmath.workdps(prec + _GUARD):
                values[b] = mpmath.mpc(1 if lm.entries in family.S else 0)
        else:
            raise UsageError(f"unknown deformation family {family!r}")
    return WittVector(field, domain, bound, values=values)


def level_family_vectors(field: QuadField, N: int, bound: int, prec: int = DEFAULT_PREC) -> list[WittVector]:
    """Vectors for every index a in (1/N)Z^2 / Z^2; a = 0 contributes j."""
    out = [modular_vector(JFamily(), field, bound, prec)]
    for i in range(N):
        for j in range(N):
            if i == 0 and j == 0:
                continue
            fam = FrickeFamily((Fraction(i, N), Fraction(j, N)), level=N)
            out.append(modular_vector(fam, field, bound, prec))
    return out


# ---------------------------------------------------------------------------
# Axiom spot-check


@dataclass
class Axiom2Report:
    family: str
    prec: int
    n_checks: int
    tol: float
    max_residual: float
    passed: bool
    entries: list = dc_field(default_factory=list)


def _random_sl2(rng: random.Random):
    m = ((1, 0), (0, 1))
    for _ in range(rng.randrange(2, 7)):
        if rng.random() < 0.5:
            g = ((1, rng.choice((-1, 1))), (0, 1))
        else:
            g = ((1, 0), (rng.choice((-1, 1)), 1))
        m = _mat_mul2(m, g)
    return m


def check_deformation_axiom2(family, samples: int = 6, prec: int = 60, seed: int = 20260823) -> Axiom2Report:
    """Spot-check f_{a*u}(u**-1 tau) = f_a(tau) for u in SL2(Z); report only."""
    if isinstance(family, CharFamily):
        raise UsageError("axiom check covers JFamily and FrickeFamily only")
    rng = random.Random(seed)
    mats = [((1, 1), (0, 1)), ((0, -1), (1, 0))]
    while len(mats) < samples:
        mats.append(_random_sl2(rng))
    k = 1
    if isinstance(family, FrickeFamily):
        k = family.k or 1
    report = Axiom2Report(
        family=family.describe(),
        prec=prec,
        n_checks=0,
        tol=float(mpmath.mpf(10) ** (-prec // 2)),
        max_residual=0.0,
        passed=True,
    )
    for u in mats:
        with mpmath.workdps(prec + _GUARD):
            tau = mpmath.mpc(rng.uniform(-0.45, 0.45), rng.uniform(0.9, 1.6))
            (ua, ub), (uc, ud) = u
            tau_inv = (ud * tau - ub) / (-uc * tau + ua)
        if isinstance(family, JFamily):
            lhs = j_invariant(tau_inv, prec)
            rhs = j_invariant(tau, prec)
        else:
            a1, a2 = family.a
            au = ((a1 * ua + a2 * uc) % 1, (a1 * ub + a2 * ud) % 1)
            lhs = fricke(au, tau_inv, k, prec)
            rhs = fricke(family.a, tau, k, prec)
        with mpmath.workdps(prec + _GUARD):
            res = float(abs(lhs - rhs))
        report.n_checks += 1
        report.max_residual = max(report.max_residual, res)
        report.entries.append({"u": u, "tau": str(tau), "residual": res})
    report.passed = report.max_residual < report.tol
    return report
