"""
Character Module for gfcodebook.

Additive and multiplicative characters of the tower fields, the exact
CycloSum carrier for character sums, Gauss sums, and the verifiers for the
orthogonality relations, the Gauss sum identities, the Fourier expansion of
multiplicative characters and the restriction of the canonical additive
character to F_r.

Character sums are accumulated as integer multiplicities of roots of unity;
complex numbers only appear when a value is finally evaluated.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import sympy

from gfcodebook.core.errors import BudgetExceededError, ParameterError
from gfcodebook.core.field import DEFAULT_BUDGET, LEVELS, _check, mul, neg, trace_table
from gfcodebook.core.verification import VerificationReport

logger = logging.getLogger(__name__)

# Dense count vectors are materialized up to this root order.
DENSE_LIMIT = 2 ** 20

# Absolute tolerance per accumulated term for complex comparisons.
TERM_TOLERANCE = 1e-9

# Largest dense Gauss matrix (complex128 bytes) a verifier will materialize.
GAUSS_BYTES_LIMIT = 2 ** 28

# Character rows processed together in the blockwise Gauss checks.
ROW_BLOCK = 256


class CycloSum:
    """
    Exact sum of m-th roots of unity, sum_k counts[k] * zeta_m^k.

    Counts are integers and may be negative (differences of character sums).
    Internally only the nonzero classes are kept, sorted by exponent, so the
    same object serves small dense orders and large sparse ones.
    """

    __slots__ = ("m", "_keys", "_values")

    def __init__(self, m, keys, values):
        self.m = int(m)
        keys = np.asarray(keys, dtype=np.int64)
        values = np.asarray(values, dtype=np.int64)
        keep = values != 0
        self._keys = keys[keep]
        self._values = values[keep]

    @classmethod
    def from_counts(cls, counts):
        counts = np.asarray(counts, dtype=np.int64)
        keys = np.flatnonzero(counts)
        return cls(counts.size, keys, counts[keys])

    @classmethod
    def from_exponents(cls, m, exponents):
        """Sum of zeta_m^e over the given exponents (reduced mod m)."""
        exps = np.asarray(exponents, dtype=np.int64).ravel() % m
        if m <= DENSE_LIMIT:
            return cls.from_counts(np.bincount(exps, minlength=m))
        keys, inverse = np.unique(exps, return_inverse=True)
        return cls(m, keys, np.bincount(inverse))

    @classmethod
    def zero(cls, m):
        return cls(m, [], [])

    @property
    def counts(self):
        dense = np.zeros(self.m, dtype=np.int64)
        dense[self._keys] = self._values
        return dense

    @property
    def total(self):
        return int(self._values.sum())

    def items(self):
        return [(int(k), int(v)) for k, v in zip(self._keys, self._values)]

    def count(self, k):
        hit = np.searchsorted(self._keys, k % self.m)
        if hit < self._keys.size and self._keys[hit] == k % self.m:
            return int(self._values[hit])
        return 0

    def _combine(self, other, sign):
        if not isinstance(other, CycloSum) or other.m != self.m:
            raise ParameterError("CycloSums must share the same root order")
        keys = np.concatenate([self._keys, other._keys])
        values = np.concatenate([self._values, sign * other._values])
        uniq, inverse = np.unique(keys, return_inverse=True)
        merged = np.zeros(uniq.size, dtype=np.int64)
        np.add.at(merged, inverse, values)
        return CycloSum(self.m, uniq, merged)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scale(self, factor):
        return CycloSum(self.m, self._keys, self._values * int(factor))

    def lift(self, m2):
        """Same value expressed over m2-th roots of unity (m must divide m2)."""
        if m2 % self.m:
            raise ParameterError(f"root order {self.m} does not divide {m2}")
        return CycloSum(m2, self._keys * (m2 // self.m), self._values)

    def __eq__(self, other):
        return (isinstance(other, CycloSum) and self.m == other.m
                and np.array_equal(self._keys, other._keys)
                and np.array_equal(self._values, other._values))

    def __hash__(self):
        return hash((self.m, self._keys.tobytes(), self._values.tobytes()))

    def __repr__(self):
        return f"CycloSum(m={self.m}, {dict(self.items())})"

    def value(self):
        return cyclo_eval(self)

    def rational(self):
        return cyclo_rational(self)

    def same_value(self, other, tolerance=None):
        """
        Equality of the represented complex numbers.

        For prime m the test is exact: the only integer relation among the
        m-th roots of unity is that they sum to zero, so two sums agree iff
        their count vectors differ by a constant. Composite orders fall back
        to a tolerance scaled by the number of terms.
        """
        if other.m != self.m:
            m2 = self.m * other.m // math.gcd(self.m, other.m)
            return self.lift(m2).same_value(other.lift(m2), tolerance)
        if sympy.isprime(self.m) and self.m <= DENSE_LIMIT:
            diff = (self - other).counts
            return bool((diff == diff[0]).all())
        if tolerance is None:
            terms = int(np.abs(self._values).sum() + np.abs(other._values).sum())
            tolerance = TERM_TOLERANCE * max(terms, 1)
        return abs(self.value() - other.value()) <= tolerance

    def to_dict(self):
        return {"m": self.m, "counts": {str(k): v for k, v in self.items()}}


def cyclo_eval(s):
    """
    Complex value of a CycloSum.

    Real and imaginary parts are summed with math.fsum over terms count*cos and
    count*sin, so the error is bounded by sum(|counts|) * 2^-40 with a wide
    margin.
    """
    if s._keys.size == 0:
        return 0j
    angles = 2.0 * np.pi * s._keys / s.m
    weights = s._values.astype(np.float64)
    re = math.fsum((weights * np.cos(angles)).tolist())
    im = math.fsum((weights * np.sin(angles)).tolist())
    return complex(re, im)


def cyclo_rational(s):
    """
    Rational integer value of a prime-order CycloSum, or None.

    Returns:
        counts[0] - counts[1] when counts[1..m-1] are all equal, else None.
    """
    if not sympy.isprime(s.m):
        raise ParameterError(f"rationality test needs a prime root order, got {s.m}")
    keys, values = s._keys, s._values
    zero_class = int(values[0]) if keys.size and keys[0] == 0 else 0
    rest = values[keys != 0]
    if rest.size == 0:
        return zero_class
    if rest.size == s.m - 1 and (rest == rest[0]).all():
        return zero_class - int(rest[0])
    return None


# -- bulk helpers over count matrices (one CycloSum per row) --

def histogram_rows(exponents, m):
    """Row-wise exponent histograms: counts[i, k] = #{j : exponents[i, j] = k mod m}."""
    exponents = np.asarray(exponents, dtype=np.int64)
    rows = exponents.shape[0]
    flat = (exponents % m + m * np.arange(rows, dtype=np.int64)[:, None]).ravel()
    return np.bincount(flat, minlength=rows * m).reshape(rows, m)


def evaluate_rows(counts, m):
    roots = np.exp(2j * np.pi * np.arange(m) / m)
    return counts @ roots


def rational_rows(counts):
    """Vectorized cyclo_rational for a prime-order count matrix.

    Returns:
        tuple: (mask of rational rows, integer values; meaningful where mask holds)
    """
    m = counts.shape[1]
    if not sympy.isprime(m):
        raise ParameterError(f"rationality test needs a prime root order, got {m}")
    rational = (counts[:, 1:] == counts[:, 1:2]).all(axis=1)
    return rational, counts[:, 0] - counts[:, 1]


# -- characters --

def _level(tower, level):
    if level not in LEVELS:
        raise ParameterError(f"unknown field level {level!r}, expected one of {LEVELS}")
    return tower.field(level)


@dataclass(frozen=True)
class AdditiveChar:
    """chi_a(x) = zeta_p^Tr(a x) on the field at `level`; a = 0 is trivial."""
    level: str
    a: int


@dataclass(frozen=True)
class MultiplicativeChar:
    """phi_j(alpha^i) = zeta_m^(i j) with m = |F| - 1; j = 0 is trivial."""
    level: str
    j: int


def additive_exponents(tower, level, a, x):
    """Tr_{level/p}(a x) for broadcastable arrays a, x."""
    ctx = _level(tower, level)
    return trace_table(tower, level, "p")[mul(ctx, a, x)]


def eval_additive(tower, char, x):
    """
    Exponent k with chi_a(x) = zeta_p^k.

    Args:
        tower: TowerCtx.
        char: AdditiveChar.
        x: Element (or array of elements) of the character's field.
    """
    exps = additive_exponents(tower, char.level, char.a, x)
    return int(exps) if np.ndim(exps) == 0 else exps


def eval_multiplicative(tower, char, x):
    """Exponent i*j mod (|F|-1) with phi_j(x) = zeta^(i j), x = alpha^i."""
    ctx = _level(tower, char.level)
    arr = np.asarray(x, dtype=np.int64)
    _check(ctx, arr)
    if (arr == 0).any():
        raise ParameterError("multiplicative characters are undefined at 0")
    exps = (ctx.log[arr] * (char.j % ctx.group_order)) % ctx.group_order
    return int(exps) if arr.ndim == 0 else exps


def quadratic_character(ctx, x):
    """eta on a field context: +1 on nonzero squares, -1 on nonsquares, 0 at 0."""
    arr = np.asarray(x, dtype=np.int64)
    _check(ctx, arr)
    values = np.where(ctx.log[arr] % 2 == 0, 1, -1)
    values = np.where(arr == 0, 0, values)
    return int(values) if arr.ndim == 0 else values


def eta(tower, x):
    """The quadratic character of F_r with eta(0) = 0."""
    return quadratic_character(tower.ctx_r, x)


def _root_order(ctx):
    m = ctx.group_order
    return m * ctx.p // math.gcd(m, ctx.p)


def gauss_sum(tower, level, j, a, budget=DEFAULT_BUDGET):
    """
    Gauss sum G(phi_j, chi_a) = sum over nonzero x of phi_j(x) chi_a(x).

    Returns:
        tuple: (CycloSum over lcm(p, |F|-1)-th roots, complex value)
    """
    ctx = _level(tower, level)
    if ctx.order > budget:
        raise BudgetExceededError(f"Gauss sum over F_{level}", ctx.order, budget)
    m = ctx.group_order
    big = _root_order(ctx)
    x = np.arange(1, ctx.order, dtype=np.int64)
    exps = ((j % m) * ctx.log[x] % m) * (big // m) + additive_exponents(tower, level, a, x) * (big // ctx.p)
    s = CycloSum.from_exponents(big, exps)
    return s, cyclo_eval(s)


def gauss_matrix_bytes(ctx):
    """Size in bytes of the dense complex128 Gauss matrix of a field."""
    return ctx.order * ctx.group_order * np.dtype(np.complex128).itemsize


def gauss_matrix(tower, level, budget=DEFAULT_BUDGET, max_bytes=GAUSS_BYTES_LIMIT, block_rows=ROW_BLOCK):
    """
    All Gauss sums of a field as a complex matrix G[j, a].

    For fixed a, j -> G(phi_j, chi_a) is a length-(|F|-1) discrete Fourier
    transform of k -> chi_a(alpha^k), evaluated with numpy.fft in blocks of
    block_rows values of a.

    Raises:
        BudgetExceededError: more than budget entries or max_bytes bytes.
    """
    ctx = _level(tower, level)
    m = ctx.group_order
    if ctx.order * m > budget:
        raise BudgetExceededError(f"Gauss matrix of F_{level}", ctx.order * m, budget)
    if gauss_matrix_bytes(ctx) > max_bytes:
        raise BudgetExceededError(f"Gauss matrix bytes of F_{level}", gauss_matrix_bytes(ctx), max_bytes)
    tr = trace_table(tower, level, "p")
    k = np.arange(m, dtype=np.int64)
    G = np.empty((m, ctx.order), dtype=np.complex128)
    for start in range(0, ctx.order, block_rows):
        a = np.arange(start, min(start + block_rows, ctx.order), dtype=np.int64)
        products = ctx.antilog[(ctx.log[a][:, None] + k[None, :]) % m]
        products[a == 0, :] = 0
        w = np.exp(2j * np.pi * tr[products] / ctx.p)
        G[:, start:start + a.size] = (m * np.fft.ifft(w, axis=1)).T
    return G


def _phi_rows(ctx, j):
    """phi_j(c) for the given j and every nonzero c, shape (len(j), m)."""
    m = ctx.group_order
    logs = ctx.log[np.arange(1, ctx.order, dtype=np.int64)]
    return np.exp(2j * np.pi * ((j[:, None] * logs[None, :]) % m) / m)


def verify_gauss_properties(tower, level, budget=DEFAULT_BUDGET, full_grid_limit=81,
                            max_bytes=GAUSS_BYTES_LIMIT, block_rows=ROW_BLOCK):
    """
    Check the Gauss sum case table and identities on one field.

    Checked: the values for trivial characters, |G| = sqrt(q) for nontrivial
    pairs, G(phi, chi_ab) = conj(phi(a)) G(phi, chi_b) (b = 1 always, every b
    up to full_grid_limit), G(phi, chi) G(conj phi, chi) = phi(-1) q for
    nontrivial phi, and G(eta, chi)^2 = eta(-1) q for the quadratic character.

    Only G itself is held densely; the other checks run over blocks of
    block_rows characters.

    Returns:
        VerificationReport

    Raises:
        BudgetExceededError: G exceeds budget entries or max_bytes bytes.
    """
    ctx = _level(tower, level)
    q, m = ctx.order, ctx.group_order
    G = gauss_matrix(tower, level, budget, max_bytes, block_rows)
    tol = TERM_TOLERANCE * q
    mag_tol = max(tol, 1e-6 * math.sqrt(q))
    report = VerificationReport(f"gauss[F_{level}]")

    report.record(abs(G[0, 0] - (q - 1)) <= tol, case="phi0,chi0", value=str(G[0, 0]))
    report.record_many(np.abs(G[0, 1:] + 1) <= tol, lambda i: {"case": "phi0,chi!=0", "a": i + 1})
    report.record_many(np.abs(G[1:, 0]) <= tol, lambda i: {"case": "phi!=0,chi0", "j": i + 1})

    for start in range(0, m, block_rows):
        j = np.arange(start, min(start + block_rows, m), dtype=np.int64)
        block = G[j, 1:]
        if start == 0:
            mags = np.abs(block[1:])
            first = 1
        else:
            mags = np.abs(block)
            first = start
        report.record_many(np.abs(mags - math.sqrt(q)) <= mag_tol,
                           lambda i, first=first: {"case": "|G|=sqrt(q)", "j": first + i // (q - 1),
                                                   "a": i % (q - 1) + 1})
        rhs = np.conj(_phi_rows(ctx, j)) * G[j, 1:2]
        report.record_many(np.abs(block - rhs) <= tol,
                           lambda i, start=start: {"case": "G(phi,chi_a)=conj(phi(a))G(phi,chi)",
                                                   "j": start + i // (q - 1), "a": i % (q - 1) + 1})

    if q <= full_grid_limit:
        phi = _phi_rows(ctx, np.arange(m, dtype=np.int64))
        b = ctx.elements()
        for a in range(1, q):
            shifted = G[:, mul(ctx, a, b)]
            expected = np.conj(phi[:, a - 1])[:, None] * G
            report.record_many(np.abs(shifted - expected) <= tol,
                               lambda i, a=a: {"case": "G(phi,chi_ab)", "a": a, "j": i // q, "b": i % q})
    report.details["full_grid"] = q <= full_grid_limit

    j = np.arange(1, m)
    products = G[j, 1] * G[m - j, 1]
    signs = np.where(j % 2 == 0, 1.0, -1.0)
    report.record_many(np.abs(products - signs * q) <= tol,
                       lambda i: {"case": "G(phi)G(conj phi)=phi(-1)q", "j": int(j[i])})

    half = m // 2
    eta_minus_one = 1 if half % 2 == 0 else -1
    report.record(abs(G[half, 1] ** 2 - eta_minus_one * q) <= tol, case="G(eta)^2=eta(-1)q")
    report.details["q"] = q
    return report


def verify_fourier_expansion(tower, level, j=None, c=None, budget=DEFAULT_BUDGET):
    """
    Check phi(c) = (1/q) sum over chi of G(phi, conj chi) chi(c).

    Args:
        tower: TowerCtx.
        level: Field level.
        j: Multiplicative character index, or None for all.
        c: Nonzero element, or None for all nonzero elements.
    """
    ctx = _level(tower, level)
    q, m = ctx.order, ctx.group_order
    if c is not None and int(c) == 0:
        raise ParameterError("the Fourier expansion is stated for nonzero c")
    G = gauss_matrix(tower, level, budget)
    js = np.arange(m) if j is None else np.array([int(j) % m])
    cs = np.arange(1, q, dtype=np.int64) if c is None else np.array([int(c)], dtype=np.int64)
    a = ctx.elements()
    conj_chars = G[np.ix_(js, neg(ctx, a))]
    chi = np.exp(2j * np.pi * additive_exponents(tower, level, a[:, None], cs[None, :]) / ctx.p)
    rhs = conj_chars @ chi / q
    lhs = np.exp(2j * np.pi * ((js[:, None] * ctx.log[cs][None, :]) % m) / m)
    report = VerificationReport(f"fourier[F_{level}]")
    report.record_many(np.abs(lhs - rhs) <= TERM_TOLERANCE * q,
                       lambda i: {"j": int(js[i // cs.size]), "c": int(cs[i % cs.size])})
    return report


def verify_additive_orthogonality(tower, level):
    """sum over x of chi_a(x) = q [a = 0], exactly, for every a."""
    ctx = _level(tower, level)
    x = ctx.elements()
    counts = histogram_rows(additive_exponents(tower, level, x[:, None], x[None, :]), ctx.p)
    rational, values = rational_rows(counts)
    expected = np.where(x == 0, ctx.order, 0)
    report = VerificationReport(f"additive-orthogonality[F_{level}]")
    report.record_many(rational & (values == expected), lambda i: {"a": i, "counts": counts[i].tolist()})
    return report


def verify_multiplicative_orthogonality(tower, level):
    """sum over nonzero x of phi_j(x) = (q-1) [j = 0], for every j."""
    ctx = _level(tower, level)
    m = ctx.group_order
    k = np.arange(m, dtype=np.int64)
    counts = histogram_rows((k[:, None] * k[None, :]) % m, m)
    values = evaluate_rows(counts, m)
    expected = np.where(k == 0, m, 0)
    report = VerificationReport(f"multiplicative-orthogonality[F_{level}]")
    report.record_many(np.abs(values - expected) <= TERM_TOLERANCE * m, lambda i: {"j": i, "value": str(values[i])})
    return report


def verify_restriction(tower):
    """
    Check that the canonical additive character of F_q restricted to F_r is psi_s.

    chi(b) = zeta_p^Tr_{q/p}(b) and psi_s(b) = zeta_p^Tr_{r/p}(s b) are compared
    as exponents for every b in F_r; the restriction is nontrivial iff p does
    not divide s.
    """
    params = tower.params
    b = tower.ctx_r.elements()
    chi_star = trace_table(tower, "q", "p")[tower.embed_r_in_q[b]]
    psi_s = trace_table(tower, "r", "p")[mul(tower.ctx_r, params.s % params.p, b)]
    report = VerificationReport("restriction")
    report.record_many(chi_star == psi_s, lambda i: {"b": i, "chi": int(chi_star[i]), "psi_s": int(psi_s[i])})
    nontrivial = bool((chi_star != 0).any())
    report.record(nontrivial == (params.s % params.p != 0), property="nontrivial iff p does not divide s",
                  nontrivial=nontrivial)
    report.details["chi_star_nontrivial"] = nontrivial
    return report
