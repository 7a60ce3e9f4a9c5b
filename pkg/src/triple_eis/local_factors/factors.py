"""Local L, epsilon and gamma factors at a finite place, as functions of t = q^-s.

Every factor built here is a monomial times a product of linear terms
``(1 - c*t)**m``.  The roots ``c`` are rationals (or p-adic numbers) times a
half-integral power of q, so the factored form is kept as the canonical
representation: reduction is cancellation of multiplicities, and the
substitution s -> 1 - s maps the class to itself.

Representations are described through their Weil-Deligne blocks.  A block
``(b, n)`` is the n-dimensional special representation whose Frobenius
eigenvalues are ``b, b*q, ..., b*q**(n-1)``, with ``b`` on the kernel of the
monodromy operator.  Its L-factor is ``(1 - b*t)**-1`` and its epsilon factor
for an additive character of order zero is ``prod_{i=1}^{n-1} (-b*q**i*t)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from ..errors import DomainError


def _as_coefficient(x):
    return Fraction(x) if isinstance(x, (int, Rational)) else x


def _is_zero(x) -> bool:
    return x.is_zero() if hasattr(x, "is_zero") else x == 0


class ScaledValue:
    """A nonzero number ``coeff * q**(half/2)`` with ``half`` reduced to 0 or 1."""

    __slots__ = ("q", "coeff", "half")

    def __init__(self, q: int, coeff, half: int = 0):
        coeff = _as_coefficient(coeff)
        if _is_zero(coeff):
            raise DomainError("scaled values are nonzero")
        shift, half = divmod(half, 2)
        if shift:
            coeff = coeff * Fraction(q) ** shift
        self.q = q
        self.coeff = coeff
        self.half = half

    @classmethod
    def coerce(cls, q: int, x) -> "ScaledValue":
        if isinstance(x, ScaledValue):
            if x.q != q:
                raise DomainError("residue characteristics differ")
            return x
        return cls(q, x, 0)

    @classmethod
    def sqrt_q(cls, q: int, power: int = 1) -> "ScaledValue":
        """``q**(power/2)``."""
        return cls(q, 1, power)

    def __mul__(self, other):
        other = ScaledValue.coerce(self.q, other)
        a, b = self.coeff, other.coeff
        # skip the coefficient product for exact +-1, which is the common case
        if type(b) is Fraction and b.denominator == 1 and abs(b.numerator) == 1:
            coeff = a if b.numerator == 1 else -a
        elif type(a) is Fraction and a.denominator == 1 and abs(a.numerator) == 1:
            coeff = b if a.numerator == 1 else -b
        else:
            coeff = a * b
        return ScaledValue(self.q, coeff, self.half + other.half)

    __rmul__ = __mul__

    def inverse(self) -> "ScaledValue":
        # (c q^(1/2))^-1 = c^-1 q^-1 q^(1/2)
        return ScaledValue(self.q, 1 / self.coeff, -self.half)

    def __truediv__(self, other):
        return self * ScaledValue.coerce(self.q, other).inverse()

    def __rtruediv__(self, other):
        return ScaledValue.coerce(self.q, other) * self.inverse()

    def __neg__(self):
        return ScaledValue(self.q, -self.coeff, self.half)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ScaledValue(self.q, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, ScaledValue):
            try:
                other = ScaledValue.coerce(self.q, other)
            except DomainError:
                return False
        return self.q == other.q and self.half == other.half and self.coeff == other.coeff

    __hash__ = None

    def is_one(self) -> bool:
        return self.half == 0 and self.coeff == 1

    def to_quadratic(self) -> "QuadraticValue":
        if self.half:
            return QuadraticValue(self.q, 0, self.coeff)
        return QuadraticValue(self.q, self.coeff, 0)

    def to_json(self):
        return {"coeff": _coefficient_json(self.coeff), "sqrt_q_power": self.half}

    def __repr__(self):
        return f"{self.coeff}" + (f"*{self.q}^(1/2)" if self.half else "")


def _coefficient_json(c):
    if isinstance(c, Fraction):
        return str(c)
    return c.to_json() if hasattr(c, "to_json") else str(c)


class QuadraticValue:
    """``a + b*sqrt(q)``; the target of evaluation at half-integral points."""

    __slots__ = ("q", "a", "b")

    def __init__(self, q: int, a, b):
        self.q = q
        self.a = _as_coefficient(a)
        self.b = _as_coefficient(b)

    def _coerce(self, other):
        if isinstance(other, QuadraticValue):
            return other
        if isinstance(other, ScaledValue):
            return other.to_quadratic()
        return QuadraticValue(self.q, other, 0)

    def __add__(self, other):
        other = self._coerce(other)
        return QuadraticValue(self.q, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticValue(self.q, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QuadraticValue(self.q, self.a * o.a + self.q * self.b * o.b,
                              self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticValue":
        norm = self.a * self.a - self.q * self.b * self.b
        if _is_zero(norm):
            raise ZeroDivisionError("division by zero in Q(sqrt q)")
        return QuadraticValue(self.q, self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadraticValue(self.q, 1, 0)
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return _is_zero(self.a) and _is_zero(self.b)

    def __eq__(self, other):
        try:
            return (self - other).is_zero()
        except (TypeError, DomainError):
            return False

    __hash__ = None

    def rational_value(self):
        """The value when it lies in the coefficient field, else None."""
        return self.a if _is_zero(self.b) else None

    def __repr__(self):
        return f"({self.a} + {self.b}*sqrt({self.q}))"


def _merge(factors):
    merged = []
    for root, mult in factors:
        for i, (r, m) in enumerate(merged):
            if r == root:
                merged[i] = (r, m + mult)
                break
        else:
            merged.append((root, mult))
    return tuple((r, m) for r, m in merged if m)


class RationalFunctionT:
    """``constant * t**t_power * prod (1 - root*t)**mult`` in reduced form."""

    __slots__ = ("q", "constant", "t_power", "_raw", "_reduced")

    def __init__(self, q: int, constant=1, t_power: int = 0, factors=()):
        self.q = q
        self.constant = ScaledValue.coerce(q, constant)
        self.t_power = t_power
        # products are formed often and compared rarely, so merging is deferred
        self._raw = tuple((ScaledValue.coerce(q, r), m) for r, m in factors)
        self._reduced = None

    @property
    def factors(self):
        """Distinct roots with nonzero multiplicities."""
        if self._reduced is None:
            self._reduced = _merge(self._raw)
        return self._reduced

    @classmethod
    def one(cls, q: int) -> "RationalFunctionT":
        return cls(q)

    @classmethod
    def linear(cls, q: int, root, mult: int = 1) -> "RationalFunctionT":
        """``(1 - root*t)**mult``."""
        return cls(q, 1, 0, [(root, mult)])

    @classmethod
    def monomial(cls, q: int, constant, t_power: int) -> "RationalFunctionT":
        return cls(q, constant, t_power)

    def __mul__(self, other):
        if not isinstance(other, RationalFunctionT):
            return RationalFunctionT(self.q, self.constant * other, self.t_power, self.factors)
        return RationalFunctionT(self.q, self.constant * other.constant,
                                 self.t_power + other.t_power, self._raw + other._raw)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunctionT":
        return RationalFunctionT(self.q, self.constant.inverse(), -self.t_power,
                                 [(r, -m) for r, m in self._raw])

    def __truediv__(self, other):
        if not isinstance(other, RationalFunctionT):
            return self * ScaledValue.coerce(self.q, other).inverse()
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunctionT(self.q, self.constant ** n, self.t_power * n,
                                 [(r, m * n) for r, m in self.factors])

    def __eq__(self, other):
        if not isinstance(other, RationalFunctionT):
            return NotImplemented
        if self.q != other.q or self.t_power != other.t_power or self.constant != other.constant:
            return False
        if len(self.factors) != len(other.factors):
            return False
        return _merge(self.factors + tuple((r, -m) for r, m in other.factors)) == ()

    __hash__ = None

    def is_monomial(self) -> bool:
        return not self.factors

    def scale_variable(self, scale) -> "RationalFunctionT":
        """Substitute t -> scale*t."""
        scale = ScaledValue.coerce(self.q, scale)
        return RationalFunctionT(self.q, self.constant * scale ** self.t_power, self.t_power,
                                 [(r * scale, m) for r, m in self.factors])

    def shift(self, half_steps: int) -> "RationalFunctionT":
        """Substitute s -> s + half_steps/2, i.e. t -> q**(-half_steps/2) * t."""
        return self.scale_variable(ScaledValue.sqrt_q(self.q, -half_steps))

    def reflect(self) -> "RationalFunctionT":
        """Substitute s -> 1 - s, i.e. t -> 1/(q*t)."""
        q = self.q
        constant = self.constant * Fraction(q) ** (-self.t_power)
        t_power = -self.t_power
        factors = []
        for r, m in self.factors:
            # 1 - r/(q t) = (-r/(q t)) * (1 - (q/r) t)
            constant = constant * (-r / q) ** m
            t_power -= m
            factors.append((ScaledValue(q, q) / r, m))
        return RationalFunctionT(q, constant, t_power, factors)

    def order_at(self, t0) -> int:
        """Order of vanishing (negative for a pole) at ``t = t0``."""
        t0 = ScaledValue.coerce(self.q, t0)
        target = t0.inverse()
        return sum(m for r, m in self._raw if r == target)

    def leading_coefficient(self, t0) -> QuadraticValue:
        """Value at ``t0`` after dividing by ``(1 - t/t0)**order_at(t0)``."""
        t0 = ScaledValue.coerce(self.q, t0)
        value = (self.constant * t0 ** self.t_power).to_quadratic()
        for r, m in self.factors:
            rt = r * t0
            if rt.is_one():
                continue
            value = value * (QuadraticValue(self.q, 1, 0) - rt) ** m
        return value

    def evaluate(self, t0) -> QuadraticValue:
        order = self.order_at(t0)
        if order < 0:
            raise ZeroDivisionError("pole at the evaluation point")
        if order > 0:
            return QuadraticValue(self.q, 0, 0)
        return self.leading_coefficient(t0)

    def polynomials(self):
        """Expanded (numerator, denominator) coefficient lists in t, lowest degree first.

        The monomial part goes to the numerator (or the denominator for a
        negative power); coefficients are ``QuadraticValue``.
        """
        one = QuadraticValue(self.q, 1, 0)
        num, den = [self.constant.to_quadratic()], [one]
        if self.t_power >= 0:
            num = [QuadraticValue(self.q, 0, 0)] * self.t_power + num
        else:
            den = [QuadraticValue(self.q, 0, 0)] * (-self.t_power) + den
        for r, m in self.factors:
            target = num if m > 0 else den
            for _ in range(abs(m)):
                target = _poly_times_linear(target, r.to_quadratic())
            if m > 0:
                num = target
            else:
                den = target
        return num, den

    def to_json(self):
        return {
            "q": self.q,
            "constant": self.constant.to_json(),
            "t_power": self.t_power,
            "factors": [{"root": r.to_json(), "multiplicity": m} for r, m in self.factors],
        }

    def __repr__(self):
        parts = [repr(self.constant)]
        if self.t_power:
            parts.append(f"t^{self.t_power}")
        parts += [f"(1 - {r}*t)^{m}" for r, m in self.factors]
        return " * ".join(parts)


def _poly_times_linear(poly, root):
    """poly * (1 - root*t)."""
    out = list(poly) + [QuadraticValue(root.q, 0, 0)]
    for i in range(len(poly) - 1, -1, -1):
        out[i + 1] = out[i + 1] - root * poly[i]
    return out


# ---------------------------------------------------------------------------
# representations

PRINCIPAL = "unramified-principal-series"
STEINBERG = "steinberg-unramified-twist"


@dataclass(frozen=True, eq=False)
class LocalRepGL2:
    """An unramified principal series or an unramified twist of Steinberg.

    ``mu`` and ``nu`` are the values at the uniformizer of the inducing
    characters of ``I(mu, nu)`` (normalized induction), so that the
    representation is a subrepresentation of it.  For ``St (x) tau`` this means
    ``mu = tau q^(-1/2)`` and ``nu = tau q^(1/2)``.
    """

    q: int
    kind: str
    mu: ScaledValue
    nu: ScaledValue

    @classmethod
    def principal_series(cls, q: int, mu, nu) -> "LocalRepGL2":
        return cls(q, PRINCIPAL, ScaledValue.coerce(q, mu), ScaledValue.coerce(q, nu))

    @classmethod
    def steinberg(cls, q: int, twist=1) -> "LocalRepGL2":
        twist = ScaledValue.coerce(q, twist)
        return cls(q, STEINBERG, twist * ScaledValue.sqrt_q(q, -1), twist * ScaledValue.sqrt_q(q, 1))

    @classmethod
    def from_hecke_root(cls, p: int, alpha, multiplicative: bool) -> "LocalRepGL2":
        """Local component at p of a weight-2 form with p-adic root ``alpha``.

        For good ordinary reduction ``alpha`` is the unit root and the other
        root is p/alpha; for multiplicative reduction ``alpha = a_p = +-1``.
        """
        alpha = _as_coefficient(alpha)
        if multiplicative:
            if not (alpha == 1 or alpha == -1):
                raise DomainError("multiplicative reduction needs a_p = +-1")
            return cls.steinberg(p, alpha)
        inv_sqrt = ScaledValue.sqrt_q(p, -1)
        return cls.principal_series(p, inv_sqrt * alpha, inv_sqrt * (p / alpha))

    @property
    def twist(self) -> ScaledValue:
        if self.kind != STEINBERG:
            raise DomainError("only Steinberg representations carry a twist")
        return self.mu * ScaledValue.sqrt_q(self.q, 1)

    def central_value(self) -> ScaledValue:
        """Central character at the uniformizer."""
        return self.mu * self.nu

    def blocks(self):
        if self.kind == PRINCIPAL:
            return [(self.mu, 1), (self.nu, 1)]
        if self.kind == STEINBERG:
            return [(self.mu, 2)]
        raise DomainError(f"unknown representation kind {self.kind!r}")

    def to_json(self):
        return {"q": self.q, "kind": self.kind, "mu": self.mu.to_json(), "nu": self.nu.to_json()}


def tensor_blocks(first, second, q: int):
    """Clebsch-Gordan decomposition of a tensor product of block lists."""
    out = []
    for b1, n1 in first:
        for b2, n2 in second:
            for i in range(min(n1, n2)):
                out.append((b1 * b2 * Fraction(q) ** i, n1 + n2 - 1 - 2 * i))
    return out


def _triple_blocks(reps, twist):
    q = _common_q(reps)
    blocks = [(ScaledValue.coerce(q, twist), 1)]
    for rep in reps:
        blocks = tensor_blocks(blocks, rep.blocks(), q)
    return q, blocks


def _common_q(reps) -> int:
    qs = {rep.q for rep in reps}
    if len(qs) != 1:
        raise DomainError("representations live over different local fields")
    return qs.pop()


def block_L(q: int, blocks) -> RationalFunctionT:
    out = RationalFunctionT.one(q)
    for b, _ in blocks:
        out = out * RationalFunctionT.linear(q, b, -1)
    return out


def block_epsilon(q: int, blocks) -> RationalFunctionT:
    out = RationalFunctionT.one(q)
    for b, n in blocks:
        for i in range(1, n):
            out = out * RationalFunctionT.monomial(q, -(b * Fraction(q) ** i), 1)
    return out


def triple_L(reps, twist=1) -> RationalFunctionT:
    """``L(s, pi1 x pi2 x pi3 (x) chi)`` for unramified chi with chi(varpi) = twist."""
    q, blocks = _triple_blocks(reps, twist)
    return block_L(q, blocks)


def triple_epsilon(reps, twist=1) -> RationalFunctionT:
    """Epsilon factor of the triple product for an additive character of order zero."""
    q, blocks = _triple_blocks(reps, twist)
    return block_epsilon(q, blocks)


def gl2_L(rep: LocalRepGL2, twist=1) -> RationalFunctionT:
    q = rep.q
    return block_L(q, tensor_blocks([(ScaledValue.coerce(q, twist), 1)], rep.blocks(), q))


def gamma_gl1(q: int, value) -> RationalFunctionT:
    """``gamma(s, chi, psi)`` for unramified chi with chi(varpi) = value, psi of order 0.

    ``L(1-s, chi^-1)/L(s, chi) = (1 - c t)/(1 - 1/(c q t)) = -c q t (1 - c t)/(1 - c q t)``.
    """
    c = ScaledValue.coerce(q, value)
    return RationalFunctionT(q, -(c * q), 1, [(c, 1), (c * q, -1)])


def gamma_gl2_twist(rep: LocalRepGL2, value) -> RationalFunctionT:
    """``gamma(s, pi (x) xi)`` through multiplicativity over the inducing characters."""
    return gamma_gl1(rep.q, rep.mu * value) * gamma_gl1(rep.q, rep.nu * value)


def modified_euler_factor(reps, twist=1) -> RationalFunctionT:
    """The modified Euler factor ``E_p(s, pi1 x pi2 x pi3 (x) chi)``.

    Its inverse is ``L(s, triple (x) chi) * gamma(s, pi1 (x) chi mu2 mu3)
    * gamma(s, chi mu1 mu2 nu3) * gamma(s, chi mu1 mu3 nu2)``.
    """
    pi1, pi2, pi3 = reps
    q = _common_q(reps)
    c = ScaledValue.coerce(q, twist)
    inverse = (triple_L(reps, c)
               * gamma_gl2_twist(pi1, c * pi2.mu * pi3.mu)
               * gamma_gl1(q, c * pi1.mu * pi2.mu * pi3.nu)
               * gamma_gl1(q, c * pi1.mu * pi3.mu * pi2.nu))
    return inverse.inverse()


def dual_twist(reps, twist) -> ScaledValue:
    """chi^-1 * omega_hat^-1 at the uniformizer, omega_hat the product of central characters."""
    q = _common_q(reps)
    total = ScaledValue.coerce(q, twist)
    for rep in reps:
        total = total * rep.central_value()
    return total.inverse()


def functional_equation_sides(reps, twist=1):
    """Both sides of ``E(1-s, chi_dual) = omega_hat(-1) E(s, chi) eps(s, triple (x) chi)``.

    Unramified central characters give omega_hat(-1) = 1.
    """
    left = modified_euler_factor(reps, dual_twist(reps, twist)).reflect()
    right = modified_euler_factor(reps, twist) * triple_epsilon(reps, twist)
    return left, right


def functional_equation_check(reps, twist=1) -> bool:
    left, right = functional_equation_sides(reps, twist)
    return left == right


def central_point(q: int) -> ScaledValue:
    """t at s = 1/2."""
    return ScaledValue.sqrt_q(q, -1)


# ---------------------------------------------------------------------------
# randomized functional-equation trials and the degeneration table

SHAPE_LETTERS = {"u": PRINCIPAL, "S": STEINBERG}
SHAPES = ("uuu", "uuS", "uSS", "SSS")


def _random_unit_value(rng) -> Fraction:
    numerator = rng.choice([x for x in range(-9, 10) if x])
    return Fraction(numerator, rng.randint(1, 9))


def random_representation(letter: str, q: int, rng) -> LocalRepGL2:
    """``u``: unramified principal series with random rational Satake parameters;
    ``S``: Steinberg twisted by a random unramified character."""
    if letter == "u":
        return LocalRepGL2.principal_series(q, _random_unit_value(rng), _random_unit_value(rng))
    if letter == "S":
        return LocalRepGL2.steinberg(q, _random_unit_value(rng))
    raise DomainError(f"shape letters are 'u' and 'S', got {letter!r}")


def functional_equation_trials(shape: str, q: int, trials: int, rng) -> list:
    """Draw ``trials`` triples of the given shape and a random unramified twist each time.

    Returns the list of failing draws as JSON records (empty on success).
    """
    if len(shape) != 3:
        raise DomainError(f"a shape has three letters, got {shape!r}")
    failures = []
    for index in range(trials):
        reps = [random_representation(letter, q, rng) for letter in shape]
        twist = _random_unit_value(rng)
        if not functional_equation_check(reps, twist):
            failures.append({"trial": index, "twist": str(twist),
                             "reps": [rep.to_json() for rep in reps]})
    return failures


def pair_L(first: LocalRepGL2, second: LocalRepGL2) -> RationalFunctionT:
    """``L(s, pi1 x pi2)`` on GL2 x GL2."""
    q = _common_q([first, second])
    return block_L(q, tensor_blocks(first.blocks(), second.blocks(), q))


def degeneration_table(first: LocalRepGL2, second: LocalRepGL2) -> dict:
    """Triple factors with one, two or three untwisted Steinberg entries versus
    their closed forms in terms of smaller L-functions.

    ``first`` and ``second`` must be unramified principal series.  Each entry
    maps a row name to ``(triple factor, closed form)``.
    """
    if first.kind != PRINCIPAL or second.kind != PRINCIPAL:
        raise DomainError("the table is stated for unramified principal series")
    q = _common_q([first, second])
    st = LocalRepGL2.steinberg(q)
    zeta = RationalFunctionT.linear(q, 1, -1)
    w1, w2 = first.central_value(), second.central_value()
    q_squared_t4 = RationalFunctionT.monomial(q, Fraction(q * q), 4)
    return {
        "L(pi1 x pi2 x St)": (triple_L([first, second, st]), pair_L(first, second).shift(1)),
        "L(pi1 x St x St)": (triple_L([first, st, st]),
                             gl2_L(first) * gl2_L(first).shift(2)),
        "L(St x St x St)": (triple_L([st, st, st]), zeta.shift(3) * zeta.shift(1) ** 2),
        "eps(pi1 x pi2 x St)": (triple_epsilon([first, second, st]),
                                q_squared_t4 * RationalFunctionT.monomial(q, (w1 * w2) ** 2, 0)),
        "eps(pi1 x St x St)": (triple_epsilon([first, st, st]),
                               q_squared_t4 * RationalFunctionT.monomial(q, w1 ** 2, 0)),
        "eps(St x St x St)": (triple_epsilon([st, st, st]),
                              RationalFunctionT.monomial(q, -ScaledValue.sqrt_q(q, 5), 5)),
    }
