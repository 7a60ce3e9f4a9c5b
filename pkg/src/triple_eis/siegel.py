"""Local Siegel series of half-integral symmetric matrices of size 1, 2, 3.

Two independent routes compute the Siegel series b_l(B, X) with X = l^-s:

* ``siegel_coefficient`` is the literal oracle.  It enumerates
  z in Sym_n(l^-j Z / Z) with nu[z] = l^j and sums the additive character
  psi(-tr(Bz)) in the cyclotomic ring Q(zeta_{l^j}).  The enumeration has
  l^(j n(n+1)/2) terms, so it only reaches small j.

* ``siegel_series`` expresses b_l(B, l^-k) as the local density of B by the
  hyperbolic space H_k of rank 2k.  The density is a sum over lattices
  containing Z_l^n (Hermite normal forms G) of primitive densities of
  B[G^-1], and a primitive density only depends on the quadratic form
  B modulo l.  For odd l it is an exact count of isometric embeddings into
  a hyperbolic space over F_l; for every l it can also be written as a
  Moebius sum of finite character sums over Sym_n(F_l).

``siegel_polynomial`` divides out the universal factor and cross-checks the
result against the oracle wherever the enumeration fits the budget.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from sympy import factorint

from .arith_core.cyclotomic import CyclotomicElement, rational_orbit_value
from .errors import DomainError, ResourceError, VerificationError

DEFAULT_MAX_TERMS = 10 ** 8

# ---------------------------------------------------------------------------
# half-integral matrices


@dataclass(frozen=True)
class HalfIntegralMatrix:
    """Half-integral symmetric matrix stored through integral data.

    ``diagonal`` holds b_ii and ``doubled`` holds c_ij = 2 b_ij.  For size 3
    the doubled entries are ordered (c23, c13, c12); for size 2 it is (c12,).
    """

    diagonal: Tuple[int, ...]
    doubled: Tuple[int, ...] = ()

    def __post_init__(self):
        n = len(self.diagonal)
        if n not in (1, 2, 3):
            raise DomainError("only sizes 1, 2, 3 are supported")
        if len(self.doubled) != n * (n - 1) // 2:
            raise DomainError(f"size {n} needs {n * (n - 1) // 2} off-diagonal entries")

    @classmethod
    def from_entries(cls, entries: Sequence[int]) -> "HalfIntegralMatrix":
        """Build from b11 | b11,b22,c12 | b11,b22,b33,c23,c13,c12."""
        entries = tuple(int(e) for e in entries)
        sizes = {1: 1, 3: 2, 6: 3}
        if len(entries) not in sizes:
            raise DomainError("expected 1, 3 or 6 entries")
        n = sizes[len(entries)]
        return cls(entries[:n], entries[n:])

    @classmethod
    def from_doubled_matrix(cls, matrix) -> "HalfIntegralMatrix":
        """Inverse of ``doubled_matrix``; diagonal entries must be even."""
        n = len(matrix)
        if any(matrix[i][i] % 2 for i in range(n)):
            raise DomainError("2B must have even diagonal")
        diagonal = tuple(matrix[i][i] // 2 for i in range(n))
        return cls(diagonal, tuple(matrix[i][j] for i, j in _offdiag_order(n)))

    @property
    def size(self) -> int:
        return len(self.diagonal)

    @property
    def entries(self) -> Tuple[int, ...]:
        return self.diagonal + self.doubled

    def doubled_entry(self, i: int, j: int) -> int:
        """Entry (i, j) of the integral matrix 2B."""
        if i == j:
            return 2 * self.diagonal[i]
        i, j = min(i, j), max(i, j)
        return self.doubled[_offdiag_order(self.size).index((i, j))]

    def doubled_matrix(self) -> List[List[int]]:
        n = self.size
        return [[self.doubled_entry(i, j) for j in range(n)] for i in range(n)]

    def half_matrix(self) -> List[List[Fraction]]:
        return [[Fraction(x, 2) for x in row] for row in self.doubled_matrix()]

    def det2(self) -> int:
        """det(2B) as an exact integer."""
        return _det(self.doubled_matrix())

    def is_positive_definite(self) -> bool:
        """Sylvester's criterion on the leading principal minors of 2B."""
        m = self.doubled_matrix()
        return all(_det([row[:k] for row in m[:k]]) > 0 for k in range(1, self.size + 1))

    def in_xi(self, p: int) -> bool:
        """Diagonal divisible by p and doubled off-diagonal entries p-units."""
        return all(b % p == 0 for b in self.diagonal) and all(c % p for c in self.doubled)

    def transform(self, u) -> "HalfIntegralMatrix":
        """The matrix U^t B U."""
        m = self.doubled_matrix()
        n = self.size
        out = [[sum(u[a][i] * m[a][b] * u[b][j] for a in range(n) for b in range(n))
                for j in range(n)] for i in range(n)]
        return HalfIntegralMatrix.from_doubled_matrix(out)

    def pairing(self, z) -> int:
        """tr(B z) for an integral symmetric z, as sum b_ii z_ii + sum c_ij z_ij."""
        n = self.size
        total = sum(self.diagonal[i] * z[i][i] for i in range(n))
        for (i, j), c in zip(_offdiag_order(n), self.doubled):
            total += c * z[i][j]
        return total

    def __str__(self):
        return ",".join(str(e) for e in self.entries)


def _offdiag_order(n: int):
    return {1: [], 2: [(0, 1)], 3: [(1, 2), (0, 2), (0, 1)]}[n]


def _det(m) -> int:
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]])
               for j in range(n))


def _vl(x: int, ell: int) -> int:
    v = 0
    while x % ell == 0:
        x //= ell
        v += 1
    return v


# ---------------------------------------------------------------------------
# nu[z]


def nu_level(z, ell: int) -> int:
    """[z Z_l^n + Z_l^n : Z_l^n] by elementary-divisor reduction over Z_(l)."""
    rows = [[Fraction(x) for x in row] for row in z]
    n = len(rows)
    for row in rows:
        for x in row:
            den = x.denominator
            while den % ell == 0:
                den //= ell
            if den != 1:
                raise DomainError("entries must have l-power denominators")
    exponent = 0
    active = list(range(n))
    cols = list(range(n))
    while active:
        best = None
        for i in active:
            for j in cols:
                x = rows[i][j]
                if x != 0:
                    v = _vl(x.numerator, ell) - _vl(x.denominator, ell)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        exponent += max(0, -v)
        pivot = rows[i][j]
        # clear column j and row i; the pivot divides everything in Z_(l)
        for r in active:
            if r != i and rows[r][j] != 0:
                factor = rows[r][j] / pivot
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[i])]
        for c in cols:
            if c != j and rows[i][c] != 0:
                factor = rows[i][c] / pivot
                for r in active:
                    rows[r][c] -= factor * rows[r][j]
        active.remove(i)
        cols.remove(j)
    return ell ** exponent


# ---------------------------------------------------------------------------
# brute-force oracle


def _valuations(a: np.ndarray, ell: int, cap: int) -> np.ndarray:
    a = np.abs(a)
    val = np.zeros(a.shape, dtype=np.int64)
    alive = a != 0
    val[~alive] = cap
    for _ in range(cap):
        div = alive & (a % ell == 0)
        if not div.any():
            break
        val += div
        a = np.where(div, a // ell, a)
        alive = div
    return np.minimum(val, cap)


def _sym_grid(n: int, m: int, fixed: Tuple[int, ...]):
    """All Z in Sym_n(Z/m) whose first entries equal ``fixed`` (flattened)."""
    k = n * (n + 1) // 2 - len(fixed)
    grids = np.meshgrid(*([np.arange(m, dtype=np.int64)] * k), indexing="ij") if k else []
    flat = [np.full(m ** k, f, dtype=np.int64) for f in fixed] + [g.ravel() for g in grids]
    return flat


def _entry_layout(n: int):
    """Order of the flattened upper-triangular entries: diagonal then c-order."""
    return [(i, i) for i in range(n)] + list(_offdiag_order(n))


def _oracle_counts(B: HalfIntegralMatrix, ell: int, j: int) -> np.ndarray:
    """counts[r] = #{z : nu[z] = l^j, -tr(Bz) = r / l^j mod 1}."""
    n = B.size
    m = ell ** j
    counts = np.zeros(m, dtype=np.int64)
    layout = _entry_layout(n)
    weights = list(B.diagonal) + list(B.doubled)
    total_entries = len(layout)
    outer = max(0, total_entries - 4)
    for fixed in itertools.product(range(m), repeat=outer):
        flat = _sym_grid(n, m, fixed)
        z = {}
        for (a, b), col in zip(layout, flat):
            z[(a, b)] = z[(b, a)] = col
        d1 = [z[(a, b)] for a, b in layout]
        if n >= 2:
            pairs = list(itertools.combinations(range(n), 2))
            d2 = [z[(r1, c1)] * z[(r2, c2)] - z[(r1, c2)] * z[(r2, c1)]
                  for r1, r2 in pairs for c1, c2 in pairs]
        if n == 3:
            d3 = [z[(0, 0)] * (z[(1, 1)] * z[(2, 2)] - z[(1, 2)] * z[(2, 1)])
                  - z[(0, 1)] * (z[(1, 0)] * z[(2, 2)] - z[(1, 2)] * z[(2, 0)])
                  + z[(0, 2)] * (z[(1, 0)] * z[(2, 1)] - z[(1, 1)] * z[(2, 0)])]
        levels = [d1] + ([d2] if n >= 2 else []) + ([d3] if n == 3 else [])
        cap = j * n + 1
        cumulative = [np.min(np.stack([_valuations(x, ell, cap) for x in lev]), axis=0)
                      for lev in levels]
        exponent = np.zeros_like(cumulative[0])
        previous = np.zeros_like(cumulative[0])
        for cum in cumulative:
            step = np.minimum(cum - previous, j)
            # once a determinantal divisor vanishes all later ones do
            step = np.where(previous >= cap, j, step)
            exponent += j - step
            previous = cum
        mask = exponent == j
        if not mask.any():
            continue
        phase = np.zeros(mask.sum(), dtype=np.int64)
        for wgt, col in zip(weights, flat):
            phase += wgt * col[mask]
        counts += np.bincount((-phase) % m, minlength=m)
    return counts


def siegel_coefficient(B: HalfIntegralMatrix, ell: int, j: int,
                       max_terms: int = DEFAULT_MAX_TERMS) -> Fraction:
    """Coefficient of X^j in the Siegel series by direct enumeration."""
    if B.det2() == 0:
        raise DomainError("degenerate matrix")
    if j == 0:
        return Fraction(1)
    n = B.size
    size = ell ** (j * n * (n + 1) // 2)
    if size > max_terms:
        raise ResourceError(f"enumeration of {size} terms exceeds budget {max_terms}")
    counts = _oracle_counts(B, ell, j)
    m = ell ** j
    value = CyclotomicElement.from_exponent_counts(m, [int(c) for c in counts]).rational_value()
    if value is None:
        raise VerificationError("character sum is not rational; enumeration bug")
    value = Fraction(value)
    if value != rational_orbit_value(m, [int(c) for c in counts]):
        raise VerificationError("Galois-average check failed")
    return value


# ---------------------------------------------------------------------------
# polynomials in X as coefficient lists (lowest degree first)

Poly = List[Fraction]


def _padd(a: Poly, b: Poly) -> Poly:
    out = [Fraction(0)] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] += x
    return out


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for k, y in enumerate(b):
                out[i + k] += x * y
    return out


def _pscale(a: Poly, c, shift: int = 0) -> Poly:
    return [Fraction(0)] * shift + [c * x for x in a]


def _ptrim(a: Poly) -> Poly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _pdivmod(num: Poly, den: Poly):
    num = [Fraction(x) for x in num]
    den = _ptrim(den)
    if not den:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(1, len(num) - len(den) + 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1] / den[-1]
        q[i] = c
        for k, d in enumerate(den):
            num[i + k] -= c * d
    return _ptrim(q), _ptrim(num)


# ---------------------------------------------------------------------------
# quadratic forms over F_l: (b_ii mod l) + (c_ij mod l) in _entry_layout order


def _qvalue(form, n, v, ell):
    layout = _entry_layout(n)
    total = 0
    for (i, j), coeff in zip(layout, form):
        total += coeff * v[i] * v[j]
    return total % ell


def _polar(form, n, v, w, ell):
    return (_qvalue(form, n, [a + b for a, b in zip(v, w)], ell)
            - _qvalue(form, n, v, ell) - _qvalue(form, n, w, ell)) % ell


def _restrict(form, n, basis, ell):
    """Coefficients of the form restricted to the span of ``basis``."""
    k = len(basis)
    diag = [_qvalue(form, n, b, ell) for b in basis]
    off = [_polar(form, n, basis[i], basis[j], ell) for i, j in _offdiag_order(k)] if k > 1 else []
    return tuple(diag + off)


def _rref_subspaces(n: int, ell: int):
    """Bases (as tuples of vectors) of all subspaces of F_l^n."""
    yield ()
    for d in range(1, n + 1):
        for pivots in itertools.combinations(range(n), d):
            free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, n)
                    if c not in pivots]
            for values in itertools.product(range(ell), repeat=len(free)):
                rows = [[0] * n for _ in range(d)]
                for r, pc in enumerate(pivots):
                    rows[r][pc] = 1
                for (r, c), val in zip(free, values):
                    rows[r][c] = val
                yield tuple(tuple(row) for row in rows)


def _complement(basis, n, ell):
    """Standard basis vectors completing ``basis`` (rows in echelon form)."""
    pivots = [next(i for i, x in enumerate(row) if x) for row in basis]
    return [tuple(1 if i == c else 0 for i in range(n)) for c in range(n) if c not in pivots]


@lru_cache(maxsize=None)
def _sym_table(n: int, ell: int):
    """All symmetric z over F_l (entries in _entry_layout order) with ranks."""
    k = n * (n + 1) // 2
    if k == 0:
        return np.zeros((0, 1), dtype=np.int64), np.zeros(1, dtype=np.int64)
    grids = np.meshgrid(*([np.arange(ell, dtype=np.int64)] * k), indexing="ij")
    flat = np.stack([g.ravel() for g in grids])
    layout = _entry_layout(n)
    z = {}
    for (a, b), col in zip(layout, flat):
        z[(a, b)] = z[(b, a)] = col
    rank = (flat % ell != 0).any(axis=0).astype(np.int64)
    if n >= 2:
        pairs = list(itertools.combinations(range(n), 2))
        m2 = np.zeros(flat.shape[1], dtype=bool)
        for r1, r2 in pairs:
            for c1, c2 in pairs:
                m2 |= (z[(r1, c1)] * z[(r2, c2)] - z[(r1, c2)] * z[(r2, c1)]) % ell != 0
        rank += m2
    if n == 3:
        det = (z[(0, 0)] * (z[(1, 1)] * z[(2, 2)] - z[(1, 2)] ** 2)
               - z[(0, 1)] * (z[(0, 1)] * z[(2, 2)] - z[(1, 2)] * z[(0, 2)])
               + z[(0, 2)] * (z[(0, 1)] * z[(1, 2)] - z[(1, 1)] * z[(0, 2)]))
        rank += det % ell != 0
    return flat, rank


@lru_cache(maxsize=None)
def _character_sum(form: tuple, n: int, ell: int) -> Tuple[int, ...]:
    """S(Q) = sum over z in Sym_n(F_l) of psi(-<Q,z>) X^rank(z)."""
    if n == 0:
        return (1,)
    flat, rank = _sym_table(n, ell)
    phase = np.zeros(flat.shape[1], dtype=np.int64)
    for coeff, col in zip(form, flat):
        phase += coeff * col
    phase = (-phase) % ell
    out = []
    for r in range(n + 1):
        sel = phase[rank == r]
        counts = np.bincount(sel, minlength=ell)
        value = CyclotomicElement.from_exponent_counts(ell, [int(c) for c in counts]).rational_value()
        if value is None:
            raise VerificationError("finite character sum is not rational")
        out.append(int(value))
    return tuple(out)


@lru_cache(maxsize=None)
def primitive_density_charsum(form: tuple, n: int, ell: int) -> Tuple[Fraction, ...]:
    """Primitive density polynomial via Moebius inversion over kernels."""
    vectors = list(itertools.product(range(ell), repeat=n))
    std = [tuple(1 if i == c else 0 for i in range(n)) for c in range(n)]
    radical = {v for v in vectors
               if _qvalue(form, n, v, ell) == 0 and all(_polar(form, n, v, e, ell) == 0 for e in std)}
    total: Poly = []
    for basis in _rref_subspaces(n, ell):
        if not all(v in radical for v in basis):
            continue
        d = len(basis)
        rest = _complement(basis, n, ell)
        nprime = n - d
        quotient = _restrict(form, n, rest, ell)
        s = [Fraction(x) for x in _character_sum(quotient, nprime, ell)]
        coeff = Fraction((-1) ** d * ell ** (d * (d - 1) // 2)
                         * ell ** (n * (n + 1) // 2 - nprime * (nprime + 1) // 2))
        total = _padd(total, _pscale(s, coeff, 2 * d))
    return tuple(_ptrim(total))


def _legendre(a: int, ell: int) -> int:
    a %= ell
    if a == 0:
        return 0
    return 1 if pow(a, (ell - 1) // 2, ell) == 1 else -1


def _diagonalize_mod(form: tuple, n: int, ell: int) -> List[int]:
    """Diagonal entries of the Gram matrix of the form after congruence mod odd l."""
    inv2 = pow(2, -1, ell)
    gram = [[0] * n for _ in range(n)]
    for (i, j), coeff in zip(_entry_layout(n), form):
        if i == j:
            gram[i][i] = coeff % ell
        else:
            gram[i][j] = gram[j][i] = coeff * inv2 % ell
    diag = []
    size = n
    while size:
        pivot = next((i for i in range(size) if gram[i][i] % ell), None)
        if pivot is None:
            pair = next(((i, j) for i in range(size) for j in range(size) if gram[i][j] % ell), None)
            if pair is None:
                diag.extend([0] * size)
                break
            i, j = pair
            # e_i <- e_i + e_j makes the diagonal entry 2 g_ij != 0
            for k in range(size):
                gram[i][k] = (gram[i][k] + gram[j][k]) % ell
            for k in range(size):
                gram[k][i] = (gram[k][i] + gram[k][j]) % ell
            pivot = i
        a = gram[pivot][pivot]
        inv = pow(a, -1, ell)
        others = [k for k in range(size) if k != pivot]
        new = [[(gram[r][c] - gram[r][pivot] * gram[pivot][c] * inv) % ell for c in others]
               for r in others]
        diag.append(a)
        gram = new
        size -= 1
    return diag


def _laurent_mul(a: Dict[int, Fraction], b: Dict[int, Fraction]) -> Dict[int, Fraction]:
    out: Dict[int, Fraction] = {}
    for i, x in a.items():
        for k, y in b.items():
            out[i + k] = out.get(i + k, 0) + x * y
    return out


def _count_value(ell: int, index: int, sign_data: int, c_nonzero: bool, c_class: int) -> Dict[int, Fraction]:
    """#{v in W : q(v) = c} for W of dimension 2k - index, as a Laurent poly in Y = l^k.

    ``sign_data`` is chi((-1)^(index/2) d_1...d_index) for even index (the
    type of W), and chi((-1)^((index+1)/2) d_1...d_index) for odd index.
    ``c_class`` is chi(c) for nonzero c.
    """
    L = Fraction(ell)
    if index % 2 == 0:
        half = index // 2
        eps = sign_data
        top = {2: L ** (-index - 1)}
        if not c_nonzero:
            return _laurent_add(top, {1: eps * (L ** (-half) - L ** (-half - 1))})
        return _laurent_add(top, {1: -eps * L ** (-half - 1)})
    half = (index + 1) // 2
    top = {2: L ** (-index - 1)}
    if not c_nonzero:
        return top
    return _laurent_add(top, {1: sign_data * c_class * L ** (-half)})


def _laurent_add(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out


@lru_cache(maxsize=None)
def primitive_density_embedding(form: tuple, n: int, ell: int) -> Tuple[Fraction, ...]:
    """Primitive density for odd l by counting isometric embeddings into H_k."""
    if ell == 2:
        raise DomainError("the embedding count needs an odd prime")
    diag = [d for d in _diagonalize_mod(form, n, ell) if d]
    r = len(diag)
    count: Dict[int, Fraction] = {0: Fraction(1)}
    prod = 1
    for i, d in enumerate(diag):
        if i % 2 == 0:
            sign = _legendre((-1) ** (i // 2) * prod, ell) if i else 1
        else:
            sign = _legendre((-1) ** ((i + 1) // 2) * prod, ell)
        count = _laurent_mul(count, _count_value(ell, i, sign, True, _legendre(d, ell)))
        prod = prod * d % ell
    # totally isotropic independent vectors in the complement (dim 2k - r)
    if r % 2 == 0:
        sign = _legendre((-1) ** (r // 2) * prod, ell) if r else 1
    else:
        sign = _legendre((-1) ** ((r + 1) // 2) * prod, ell)
    for j in range(n - r):
        isotropic = _count_value(ell, r + 2 * j, sign, False, 0)
        isotropic = _laurent_add(isotropic, {0: Fraction(-1)})
        count = _laurent_mul(count, {0: Fraction(ell) ** j})
        count = _laurent_mul(count, isotropic)
    # alpha = X^(2n) l^(n(n+1)/2) N with Y = 1/X
    scale = Fraction(ell) ** (n * (n + 1) // 2)
    poly: Dict[int, Fraction] = {}
    for e, c in count.items():
        if c:
            poly[2 * n - e] = poly.get(2 * n - e, 0) + c * scale
    if any(k < 0 for k, v in poly.items() if v):
        raise VerificationError("embedding count produced a negative power of X")
    top = max((k for k, v in poly.items() if v), default=0)
    return tuple(_ptrim([poly.get(k, Fraction(0)) for k in range(top + 1)]))


def primitive_density(form: tuple, n: int, ell: int) -> Tuple[Fraction, ...]:
    if ell == 2:
        return primitive_density_charsum(form, n, ell)
    return primitive_density_embedding(form, n, ell)


# ---------------------------------------------------------------------------
# local density sum over lattices


def _hnf_matrices(n: int, ell: int, v: int):
    """Upper-triangular Hermite normal forms with determinant l^v."""
    for exps in itertools.product(range(v + 1), repeat=n):
        if sum(exps) != v:
            continue
        slots = [(i, j) for j in range(n) for i in range(j)]
        ranges = [range(ell ** exps[j]) for i, j in slots]
        for values in itertools.product(*ranges):
            g = [[0] * n for _ in range(n)]
            for i in range(n):
                g[i][i] = ell ** exps[i]
            for (i, j), val in zip(slots, values):
                g[i][j] = val
            yield g


def _adjugate(g):
    n = len(g)
    if n == 1:
        return [[1]]
    if n == 2:
        return [[g[1][1], -g[0][1]], [-g[1][0], g[0][0]]]
    adj = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != j]
            cols = [c for c in range(3) if c != i]
            minor = g[rows[0]][cols[0]] * g[rows[1]][cols[1]] - g[rows[0]][cols[1]] * g[rows[1]][cols[0]]
            adj[i][j] = (-1) ** (i + j) * minor
    return adj


def _reduced_form(S, adj, det: int, ell: int):
    """Coefficients of B[G^-1] mod l from 2B = S and G^-1 = adj/det, or None.

    None signals that B[G^-1] is not half-integral.
    """
    n = len(S)
    # M = adj^t S adj = det^2 * 2 B[G^-1]
    sa = [[sum(S[i][k] * adj[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    m = [[sum(adj[k][i] * sa[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    d2 = det * det
    diag = []
    for i in range(n):
        if m[i][i] % (2 * d2):
            return None
        diag.append(m[i][i] // (2 * d2) % ell)
    off = []
    for i, j in _offdiag_order(n):
        if m[i][j] % d2:
            return None
        off.append(m[i][j] // d2 % ell)
    return tuple(diag + off)


def local_density(B: HalfIntegralMatrix, ell: int) -> List[Fraction]:
    """b_l(B, X) as a polynomial in X (exact coefficients)."""
    n = B.size
    det2 = B.det2()
    if det2 == 0:
        raise DomainError("degenerate matrix")
    vmax = _vl(abs(det2), ell) // 2
    S = B.doubled_matrix()
    total: Poly = []
    for v in range(vmax + 1):
        for g in _hnf_matrices(n, ell, v):
            form = _reduced_form(S, _adjugate(g), ell ** v, ell)
            if form is None:
                continue
            prim = [Fraction(x) for x in primitive_density(form, n, ell)]
            total = _padd(total, _pscale(prim, Fraction(ell) ** ((n + 1) * v), 2 * v))
    return _ptrim(total)


def quadratic_character(B: HalfIntegralMatrix, ell: int) -> int:
    """chi_B(l) for size 2: the Kronecker symbol of disc = c12^2 - 4 b11 b22."""
    if B.size != 2:
        raise DomainError("the quadratic character is attached to binary forms")
    d = -B.det2()
    if ell == 2:
        while d % 4 == 0:
            d //= 4
        if d % 4 != 1:
            return 0
        return 1 if d % 8 == 1 else -1
    v = _vl(d, ell)
    if v % 2:
        return 0
    return _legendre(d // ell ** v, ell)


def universal_factor(B: HalfIntegralMatrix, ell: int) -> Tuple[Poly, Poly]:
    """Numerator and denominator of the factor common to all B of a given size."""
    one = Fraction(1)
    base = [one, -one]
    n = B.size
    if n == 1:
        return base, [one]
    quad = _pmul(base, [one, Fraction(0), -Fraction(ell) ** 2])
    if n == 2:
        return quad, [one, -quadratic_character(B, ell) * Fraction(ell)]
    return quad, [one]


def siegel_series(B: HalfIntegralMatrix, ell: int) -> List[Fraction]:
    return local_density(B, ell)


# ---------------------------------------------------------------------------
# Jordan representatives over Z_l


def _vfrac(x: Fraction, ell: int) -> int:
    return _vl(x.numerator, ell) - _vl(x.denominator, ell)


def _split_blocks(S, ell: int):
    """Orthogonal splitting of the even symmetric matrix S over Z_(l).

    Returns blocks (scale, matrix) where matrix is a 1x1 or 2x2 unimodular
    Gram matrix over Z_(l) (Fractions with denominators prime to l).
    """
    S = [[Fraction(x) for x in row] for row in S]
    blocks = []
    while S:
        n = len(S)
        entries = [(i, j) for i in range(n) for j in range(i, n) if S[i][j] != 0]
        a = min(_vfrac(S[i][j], ell) for i, j in entries)
        diag = [i for i in range(n) if S[i][i] != 0 and _vfrac(S[i][i], ell) == a]
        if diag:
            idx = [diag[0]]
        elif ell != 2:
            i, j = next((i, j) for i, j in entries if _vfrac(S[i][j], ell) == a)
            # e_i <- e_i + e_j brings the minimal valuation to the diagonal
            for k in range(n):
                S[i][k] += S[j][k]
            for k in range(n):
                S[k][i] += S[k][j]
            idx = [i]
        else:
            i, j = next((i, j) for i, j in entries if _vfrac(S[i][j], ell) == a)
            idx = [i, j]
        block = [[S[r][c] for c in idx] for r in idx]
        rest = [k for k in range(n) if k not in idx]
        scale = Fraction(ell) ** a
        blocks.append((a, [[x / scale for x in row] for row in block]))
        if not rest:
            break
        # Schur complement: S_rest - S_rk block^-1 S_kr
        if len(idx) == 1:
            piv = S[idx[0]][idx[0]]
            S = [[S[r][c] - S[r][idx[0]] * S[idx[0]][c] / piv for c in rest] for r in rest]
        else:
            (p, q), (r_, s) = block
            det = p * s - q * r_
            inv = [[s / det, -q / det], [-r_ / det, p / det]]
            new = []
            for r in rest:
                row = []
                for c in rest:
                    corr = sum(S[r][idx[u]] * inv[u][w] * S[idx[w]][c] for u in range(2) for w in range(2))
                    row.append(S[r][c] - corr)
                new.append(row)
            S = new
    return blocks


def _unit_residue(x: Fraction, modulus: int) -> int:
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


def jordan_representative(B: HalfIntegralMatrix, ell: int) -> HalfIntegralMatrix:
    """A matrix with small entries that is GL_n(Z_l)-equivalent to B."""
    blocks = _split_blocks(B.doubled_matrix(), ell)
    if ell == 2:
        parts = []
        for a, block in blocks:
            if len(block) == 1:
                parts.append((a, 0, _unit_residue(block[0][0], 8)))
            else:
                det = _unit_residue(block[0][0] * block[1][1] - block[0][1] ** 2, 8)
                parts.append((a, 1, 0 if det == 7 else 1))
        parts.sort()
        grams = []
        for a, kind, unit in parts:
            if kind == 0:
                grams.append([[2 ** a * unit]])
            else:
                grams.append([[0, 2 ** a], [2 ** a, 0]] if unit == 0
                             else [[2 ** (a + 1), 2 ** a], [2 ** a, 2 ** (a + 1)]])
    else:
        scales: Dict[int, List[int]] = {}
        for a, block in blocks:
            scales.setdefault(a, []).append(_legendre(_unit_residue(block[0][0], ell), ell))
        non_residue = next(u for u in range(2, ell) if _legendre(u, ell) == -1)
        grams = []
        for a in sorted(scales):
            signs = scales[a]
            total = 1
            for s in signs:
                total *= s
            units = [1] * (len(signs) - 1) + [1 if total == 1 else non_residue]
            for u in units:
                # an even representative of the same square class
                w = u if u % 2 == 0 else u + ell
                grams.append([[w * ell ** a]])
    n = B.size
    S = [[0] * n for _ in range(n)]
    pos = 0
    for g in grams:
        for r in range(len(g)):
            for c in range(len(g)):
                S[pos + r][pos + c] = g[r][c]
        pos += len(g)
    return HalfIntegralMatrix.from_doubled_matrix(S)


# ---------------------------------------------------------------------------
# the polynomial F_{B,l}


@dataclass(frozen=True)
class SiegelPolynomial:
    prime: int
    coefficients: Tuple[int, ...]
    verified_depth: int

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x, one=1):
        """Evaluate by Horner's rule in any ring containing the integers."""
        result = one * self.coefficients[-1]
        for c in reversed(self.coefficients[:-1]):
            result = result * x + one * c
        return result

    def to_json(self) -> dict:
        return {"prime": self.prime, "coefficients": list(self.coefficients),
                "verified_depth": self.verified_depth}


def stabilization_bound(B: HalfIntegralMatrix, ell: int) -> int:
    return _vl(16 * abs(B.det2()), ell) + 4


@lru_cache(maxsize=1 << 19)
def polynomial_coefficients(B: HalfIntegralMatrix, ell: int) -> Tuple[int, ...]:
    """Coefficients of F_{B,l}, computed on a Jordan representative."""
    if B.det2() % ell:
        return (1,)
    return _polynomial_from_density(jordan_representative(B, ell).entries, ell)


@lru_cache(maxsize=None)
def _polynomial_from_density(entries: Tuple[int, ...], ell: int) -> Tuple[int, ...]:
    B = HalfIntegralMatrix.from_entries(entries)
    if B.det2() % ell:
        return (1,)
    series = local_density(B, ell)
    num, den = universal_factor(B, ell)
    quotient, rem = _pdivmod(_pmul(series, den), num)
    if rem:
        raise VerificationError(f"Siegel series of {B} at {ell} is not divisible by the universal factor")
    if any(c.denominator != 1 for c in quotient):
        raise VerificationError(f"non-integral F for {B} at {ell}: {quotient}")
    return tuple(int(c) for c in quotient)


def series_from_polynomial(B: HalfIntegralMatrix, ell: int, coeffs: Sequence[int], depth: int) -> Poly:
    """Coefficients 0..depth of universal_factor * F as a power series."""
    num, den = universal_factor(B, ell)
    product = _pmul(num, [Fraction(c) for c in coeffs])
    # divide by den as a power series (den has constant term 1)
    out = []
    work = product + [Fraction(0)] * (depth + 1)
    for i in range(depth + 1):
        c = work[i] / den[0]
        out.append(c)
        for k, d in enumerate(den):
            if i + k < len(work):
                work[i + k] -= c * d
    return out


def siegel_polynomial(B: HalfIntegralMatrix, ell: int, max_terms: int = DEFAULT_MAX_TERMS,
                      extra: int = 3) -> SiegelPolynomial:
    """F_{B,l} with the oracle checked on every coefficient the budget allows."""
    if B.det2() == 0:
        raise DomainError("degenerate matrix")
    coeffs = polynomial_coefficients(B, ell)
    if coeffs[0] != 1:
        raise VerificationError(f"F(0) = {coeffs[0]} for {B} at {ell}")
    bound = stabilization_bound(B, ell)
    if len(coeffs) - 1 > bound:
        raise VerificationError(f"deg F = {len(coeffs) - 1} exceeds the bound {bound}: {coeffs}")
    target = min(bound, len(coeffs) - 1 + extra)
    n = B.size
    depth = -1
    expected = series_from_polynomial(B, ell, coeffs, target)
    for j in range(target + 1):
        if ell ** (j * n * (n + 1) // 2) > max_terms:
            break
        got = siegel_coefficient(B, ell, j, max_terms)
        if got != expected[j]:
            raise VerificationError(
                f"oracle disagrees at X^{j} for {B}, l={ell}: {got} != {expected[j]}")
        depth = j
    return SiegelPolynomial(ell, coeffs, depth)


@lru_cache(maxsize=1 << 17)
def _prime_support(n: int) -> Tuple[int, ...]:
    return tuple(sorted(factorint(n)))


def relevant_primes(B: HalfIntegralMatrix, excluded: Sequence[int] = ()) -> List[int]:
    """Primes dividing det(2B), minus ``excluded``."""
    return [q for q in _prime_support(abs(B.det2())) if q not in excluded]


def a_B(B: HalfIntegralMatrix, excluded: Sequence[int], evaluation: Callable[[int], object],
        one=1):
    """Product of F_{B,l}(evaluation(l)) over primes l | det 2B outside ``excluded``.

    ``one`` is the unit of the target ring (an int, a PadicNumber, a
    GroupLikeSum, ...); the product is empty, hence ``one``, when no prime
    qualifies.
    """
    result = one
    for ell in relevant_primes(B, excluded):
        poly = SiegelPolynomial(ell, polynomial_coefficients(B, ell), -1)
        result = result * poly(evaluation(ell), one)
    return result
