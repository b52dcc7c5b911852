"""Coefficient domains for truncated Witt vectors.

Three kinds: ExactCyclotomic (canonical cyclotomic arithmetic, decidable
equality), ExactNumberField (Q[x]/(P) with a distinguished complex root),
and BigComplex (mpmath at a fixed working precision, equality up to
10^(-prec/2)).  The exact domains certify integrality and divisibility;
BigComplex refuses to, loudly.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from .cyclotomic import cyclo_context
from .errors import PrecisionError, UsageError


class ExactCyclotomic:
    """Values in Q(zeta_M), canonical tensor-basis dicts."""

    exact = True
    kind = "cyclotomic"

    def __init__(self, M: int):
        self.M = M
        self.ctx = cyclo_context(M)

    def __repr__(self):
        return f"ExactCyclotomic({self.M})"

    def eq(self, x, y) -> bool:
        return x == y

    def add(self, x, y):
        return self.ctx.add(x, y)

    def sub(self, x, y):
        return self.ctx.sub(x, y)

    def mul(self, x, y):
        return self.ctx.mul(x, y)

    def pow(self, x, e: int):
        return self.ctx.pow(x, e)

    def zero(self):
        return self.ctx.zero()

    def one(self):
        return self.ctx.from_fraction(1)

    def from_fraction(self, c):
        return self.ctx.from_fraction(c)

    def is_algebraic_integer(self, x) -> bool:
        return self.ctx.is_integral(x)

    def div_prime(self, x, t):
        """x / t when the quotient is still an algebraic integer, else None.

        Quadratic generators are decided exactly for rational components
        (divisibility in O_K); a nonzero divisible component would have an
        irrational quotient this domain cannot hold, which is an error.
        """
        n = _rational_integer(t)
        if n is not None:
            return self.ctx.div_check(x, n)
        c = self.ctx.as_rational(x)
        if c is None:
            raise UsageError(
                "cannot divide a cyclotomic value by a quadratic generator; "
                "use a number-field domain"
            )
        from .qfield import QuadElement

        quot = QuadElement(t.field, Fraction(c), Fraction(0)) * t.inverse()
        if not quot.is_integral():
            return None
        if c == 0:
            return self.ctx.zero()
        raise UsageError(
            "quotient by a quadratic generator is irrational; "
            "this domain cannot represent it"
        )

    def value_to_json(self, x):
        return sorted([list(map(int, k)), str(v)] for k, v in x.items())

    def value_from_json(self, data):
        return {tuple(k): Fraction(v) for k, v in data}

    def numeric(self, x, prec: int):
        return self.ctx.numeric(x, prec)


def _rational_integer(t):
    """t as a plain int when it is one (int, Fraction, or rational QuadElement)."""
    if isinstance(t, int):
        return t
    if isinstance(t, Fraction):
        return int(t) if t.denominator == 1 else None
    if hasattr(t, "x") and hasattr(t, "y"):
        if t.y == 0 and Fraction(t.x).denominator == 1:
            return int(t.x)
        return None
    return None


class BigComplex:
    """mpmath complex numbers at prec decimal digits; eq means within 10^(-prec/2)."""

    exact = False
    kind = "bigcomplex"

    GUARD_DIGITS = 15

    def __init__(self, prec: int):
        if prec < 10:
            raise UsageError(f"precision {prec} is too low to certify anything")
        self.prec = prec
        self.workdps = prec + self.GUARD_DIGITS

    def __repr__(self):
        return f"BigComplex({self.prec})"

    @property
    def tol(self):
        with mpmath.workdps(self.workdps):
            return mpmath.mpf(10) ** (-Fraction(self.prec, 2))

    def eq(self, x, y) -> bool:
        return self.eq_verdict(x, y) == "eq"

    def eq_verdict(self, x, y) -> str:
        """'eq', 'ne', or 'ambiguous' when |x-y| sits within one order of tol."""
        with mpmath.workdps(self.workdps):
            gap = abs(mpmath.mpc(x) - mpmath.mpc(y))
            if gap < self.tol:
                return "eq"
            if gap < 10 * self.tol:
                return "ambiguous"
            return "ne"

    def eq_strict(self, x, y, tol) -> bool:
        with mpmath.workdps(self.workdps):
            return abs(mpmath.mpc(x) - mpmath.mpc(y)) < tol

    def add(self, x, y):
        with mpmath.workdps(self.workdps):
            return x + y

    def sub(self, x, y):
        with mpmath.workdps(self.workdps):
            return x - y

    def mul(self, x, y):
        with mpmath.workdps(self.workdps):
            return x * y

    def pow(self, x, e: int):
        with mpmath.workdps(self.workdps):
            return mpmath.mpc(x) ** e

    def zero(self):
        return mpmath.mpc(0)

    def one(self):
        return mpmath.mpc(1)

    def from_fraction(self, c):
        c = Fraction(c)
        with mpmath.workdps(self.workdps):
            return mpmath.mpc(c.numerator) / c.denominator

    def is_algebraic_integer(self, x):
        raise UsageError("BigComplex cannot certify integrality; use certify_vector first")

    def div_prime(self, x, t):
        raise UsageError("BigComplex cannot certify divisibility; use certify_vector first")

    def value_to_json(self, x):
        with mpmath.workdps(self.workdps):
            x = mpmath.mpc(x)
            return [mpmath.nstr(x.real, self.prec), mpmath.nstr(x.imag, self.prec)]

    def value_from_json(self, data):
        with mpmath.workdps(self.workdps):
            return mpmath.mpc(mpmath.mpf(data[0]), mpmath.mpf(data[1]))


def _poly_trim(cs: list[Fraction]) -> list[Fraction]:
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _poly_divmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    inv = 1 / b[-1]
    while len(a) >= len(b):
        c = a[-1] * inv
        k = len(a) - len(b)
        q[k] = c
        for i, bc in enumerate(b):
            a[k + i] -= c * bc
        _poly_trim(a)
        if not a:
            break
    return q, a


class ExactNumberField:
    """Q[x]/(P) with a distinguished complex root of P.

    P comes in as an integer coefficient list (low degree first) and is made
    monic over Q internally.  Elements are coefficient tuples of length
    deg(P).  An optional certified image of omega embeds an imaginary
    quadratic field; attach it with set_omega_image, which verifies the
    defining relation exactly.
    """

    exact = True
    kind = "numberfield"

    def __init__(self, int_coeffs: list[int], root, prec: int = 60):
        if len(int_coeffs) < 2 or int_coeffs[-1] == 0:
            raise UsageError("need a nonconstant polynomial with exact leading coefficient")
        self.int_coeffs = tuple(int(c) for c in int_coeffs)
        lead = Fraction(int_coeffs[-1])
        self.monic = [Fraction(c) / lead for c in int_coeffs]
        self.deg = len(int_coeffs) - 1
        self.prec = prec
        with mpmath.workdps(prec + 10):
            self.root = mpmath.mpc(root)
            resid = _poly_eval_numeric(self.int_coeffs, self.root)
            scale = max(mpmath.mpf(1), abs(self.root)) ** self.deg
            if abs(resid) > scale * mpmath.mpf(10) ** (-prec // 2):
                raise PrecisionError(f"claimed root has residual {mpmath.nstr(abs(resid), 5)}")
        # x^(deg+k) mod P for k = 0..deg-2
        self._high = []
        cur = [Fraction(0)] * self.deg + [Fraction(1)]
        for _ in range(self.deg - 1):
            _, r = _poly_divmod(cur, self.monic)
            r = r + [Fraction(0)] * (self.deg - len(r))
            self._high.append(tuple(r))
            cur = [Fraction(0)] + list(cur)
        self.omega_image = None
        self._omega_field = None

    def __repr__(self):
        return f"ExactNumberField(deg={self.deg})"

    def zero(self):
        return tuple([Fraction(0)] * self.deg)

    def one(self):
        return self.from_fraction(1)

    def from_fraction(self, c):
        return tuple([Fraction(c)] + [Fraction(0)] * (self.deg - 1))

    def gen(self):
        """The class of x, i.e. the distinguished root."""
        if self.deg == 1:
            return self.from_fraction(-self.monic[0])
        return tuple([Fraction(0), Fraction(1)] + [Fraction(0)] * (self.deg - 2))

    def eq(self, x, y) -> bool:
        return tuple(x) == tuple(y)

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def scale(self, x, c):
        c = Fraction(c)
        return tuple(a * c for a in x)

    def mul(self, x, y):
        m = self.deg
        prod = [Fraction(0)] * (2 * m - 1)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        prod[i + j] += a * b
        out = list(prod[:m])
        for k in range(m, 2 * m - 1):
            c = prod[k]
            if c:
                red = self._high[k - m]
                for i in range(m):
                    out[i] += c * red[i]
        return tuple(out)

    def pow(self, x, e: int):
        out = self.one()
        base = x
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base) if e > 1 else base
            e >>= 1
        return out

    def inverse(self, x):
        # extended Euclid in Q[x] against the monic modulus
        if not any(x):
            raise ZeroDivisionError
        r0, r1 = list(self.monic), _poly_trim(list(x))
        s0, s1 = [], [Fraction(1)]
        while r1:
            q, r = _poly_divmod(r0, r1)
            s = list(s0)
            s += [Fraction(0)] * (len(q) + len(s1) - 1 - len(s))
            for i, qc in enumerate(q):
                if qc:
                    for j, sc in enumerate(s1):
                        s[i + j] -= qc * sc
            r0, r1 = r1, r
            s0, s1 = s1, _poly_trim(s)
        assert len(r0) == 1, "modulus not irreducible over Q or x not invertible"
        inv = [c / r0[0] for c in s0]
        inv += [Fraction(0)] * (self.deg - len(inv))
        return tuple(inv[: self.deg])

    def mul_matrix(self, x):
        """Columns are x * basis_i in the power basis."""
        return [self.mul(x, _power_basis(self, i)) for i in range(self.deg)]

    def charpoly(self, x) -> list[Fraction]:
        """Characteristic polynomial of multiplication by x (monic, ascending)."""
        from sympy import Matrix, Rational, symbols

        cols = self.mul_matrix(x)
        m = Matrix(
            self.deg,
            self.deg,
            lambda i, j: Rational(cols[j][i].numerator, cols[j][i].denominator),
        )
        lam = symbols("lam")
        cp = m.charpoly(lam).as_expr()
        from sympy import Poly

        coeffs = Poly(cp, lam).all_coeffs()[::-1]
        return [Fraction(c.p, c.q) for c in coeffs]

    def is_algebraic_integer(self, x) -> bool:
        return all(c.denominator == 1 for c in self.charpoly(x))

    def embed_field_element(self, t):
        """Image of a QuadElement under the attached embedding of K."""
        if _rational_integer(t) is not None:
            return self.from_fraction(Fraction(t.x) if hasattr(t, "x") else Fraction(t))
        if self.omega_image is None:
            raise UsageError("no embedding of K attached to this number field")
        if self._omega_field is None or self._omega_field.d != t.field.d:
            raise UsageError("embedding attached for a different field")
        return self.add(self.from_fraction(t.x), self.scale(self.omega_image, t.y))

    def set_omega_image(self, field, elt) -> None:
        """Attach omega -> elt after verifying omega^2 = s*omega + t exactly."""
        lhs = self.mul(elt, elt)
        rhs = self.add(self.scale(elt, field.omega_s), self.from_fraction(field.omega_t))
        if not self.eq(lhs, rhs):
            raise UsageError("claimed omega image fails the defining relation")
        self.omega_image = elt
        self._omega_field = field

    def div_prime(self, x, t):
        """x / t when the quotient is an algebraic integer, else None."""
        n = _rational_integer(t)
        if n is not None:
            q = self.scale(x, Fraction(1, n))
        else:
            q = self.mul(x, self.inverse(self.embed_field_element(t)))
        return q if self.is_algebraic_integer(q) else None

    def numeric(self, x, prec: int | None = None):
        with mpmath.workdps(prec or self.prec):
            total = mpmath.mpc(0)
            for c in reversed(x):
                total = total * self.root + mpmath.mpf(c.numerator) / c.denominator
            return total

    def value_to_json(self, x):
        return [str(c) for c in x]

    def value_from_json(self, data):
        return tuple(Fraction(c) for c in data)


def _power_basis(nf: ExactNumberField, i: int):
    out = [Fraction(0)] * nf.deg
    out[i] = Fraction(1)
    return tuple(out)


def _poly_eval_numeric(coeffs, z):
    total = mpmath.mpc(0)
    for c in reversed(coeffs):
        total = total * z + int(c)
    return total
