"""
Constructions Module for gfcodebook.

Defining sets and codebooks of the two families:

* Construction I:  D = {x in F_q^* : eta(Tr_{q/r}(x + 1)) = -eta(s)},
  rows indexed by the multiplicative characters of F_q, N = q - 1.
* Construction II: D = {x in F_{q^2} : eta(Tr_{q/r}(x^(q+1))) = -1},
  rows indexed by the additive characters of F_{q^2}, N = q^2.

eta is the quadratic character of F_r. The earlier single-field versions
(r = q for the first family, r = p for the second) are available as
build_set_prior_I / build_set_prior_II.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import sympy

from gfcodebook.core.characters import eta, quadratic_character
from gfcodebook.core.errors import BudgetExceededError, IntegrityError, ParameterError
from gfcodebook.core.field import add, norm_table, trace_table

logger = logging.getLogger(__name__)

CONSTRUCTIONS = ("I", "II")

# Largest exponent matrix materialized by Codebook.exponents() by default.
MAX_ENTRIES = 2 ** 28


def check_construction(construction):
    if construction not in CONSTRUCTIONS:
        raise ParameterError(f"construction must be one of {CONSTRUCTIONS}, got {construction!r}")
    return construction


def expected_K(construction, params):
    """Closed-form defining set size."""
    q, r = params.q, params.r
    if check_construction(construction) == "I":
        return q * (r - 1) // (2 * r)
    return q * (q + 1) * (r - 1) // (2 * r)


def expected_N(construction, params):
    return params.q - 1 if check_construction(construction) == "I" else params.q2


@dataclass(eq=False)
class DefiningSet:
    """Ordered defining set D of a construction.

    Attributes:
        construction: "I" or "II".
        params: TowerParams of the tower.
        elements: Canonical encodings in ascending order (F_q for I, F_{q^2} for II).
        K: |D|.
        tower: The TowerCtx the set was built over.
        variant: "standard" or "prior" (single-field special case).
    """
    construction: str
    params: object
    elements: np.ndarray = field(repr=False)
    K: int
    tower: object = field(repr=False)
    variant: str = "standard"

    @property
    def level(self):
        return "q" if self.construction == "I" else "q2"

    @property
    def ctx(self):
        return self.tower.field(self.level)

    @property
    def logs(self):
        return self.ctx.log[self.elements]

    def __eq__(self, other):
        return (isinstance(other, DefiningSet) and self.construction == other.construction
                and self.params == other.params and np.array_equal(self.elements, other.elements))

    def __hash__(self):
        return hash((self.construction, self.params, self.elements.tobytes()))


def _finish(construction, tower, mask, candidates, expected, variant="standard"):
    elements = np.sort(candidates[mask]).astype(np.int64)
    elements.flags.writeable = False
    if elements.size != expected:
        raise IntegrityError(
            f"Construction {construction} set for {tower.params.label()} has {elements.size} "
            f"elements, expected {expected}")
    logger.debug("Construction %s (%s) set for %s: K=%d", construction, variant,
                 tower.params.label(), elements.size)
    return DefiningSet(construction, tower.params, elements, int(elements.size), tower, variant)


def eta_of_s(tower):
    """eta(s) with s reduced into F_p and viewed in F_r."""
    return eta(tower, tower.params.s % tower.params.p)


def build_set_I(tower):
    """
    D = {x in F_q^* : eta(Tr_{q/r}(x + 1)) = -eta(s)}.

    Raises:
        ParameterError: p divides s.
        IntegrityError: |D| differs from q(r-1)/(2r).
    """
    params = tower.params
    if params.s % params.p == 0:
        raise ParameterError(f"Construction I needs p not dividing s, got {params.label()}")
    ctx = tower.ctx_q
    x = np.arange(1, ctx.order, dtype=np.int64)
    traces = trace_table(tower, "q", "r")[add(ctx, x, 1)]
    mask = eta(tower, traces) == -eta_of_s(tower)
    return _finish("I", tower, mask, x, expected_K("I", params))


def build_set_II(tower):
    """
    D = {x in F_{q^2} : eta(Tr_{q/r}(x^(q+1))) = -1}.

    Raises:
        IntegrityError: |D| differs from q(q+1)(r-1)/(2r).
    """
    x = tower.field("q2").elements()
    traces = trace_table(tower, "q", "r")[norm_table(tower)]
    mask = eta(tower, traces) == -1
    return _finish("II", tower, mask, x, expected_K("II", tower.params))


def build_set_prior_I(tower):
    """The single-field set {x in F_q^* : eta_q(x + 1) = -1}; equals build_set_I when s = 1."""
    ctx = tower.ctx_q
    x = np.arange(1, ctx.order, dtype=np.int64)
    mask = quadratic_character(ctx, add(ctx, x, 1)) == -1
    return _finish("I", tower, mask, x, (ctx.order - 1) // 2, variant="prior")


def build_set_prior_II(tower):
    """The set {x : (Tr_{q/p}(x^(q+1)) / p) = -1}; equals build_set_II when t = 1."""
    p, q = tower.params.p, tower.params.q
    legendre = np.array([sympy.legendre_symbol(c, p) for c in range(p)], dtype=np.int64)
    traces = trace_table(tower, "q", "p")[norm_table(tower)]
    mask = legendre[traces] == -1
    x = tower.field("q2").elements()
    return _finish("II", tower, mask, x, q * (q + 1) * (p - 1) // (2 * p), variant="prior")


def indicator_I(tower, x):
    """
    Membership of x in the Construction I set via character values.

    (1 - eta(s) eta(T) - [T = 0]) / 2 with T = Tr_{q/r}(x + 1); this is the
    decomposition the inner-product sums A and B come from.
    """
    ctx = tower.ctx_q
    arr = np.asarray(x, dtype=np.int64)
    traces = trace_table(tower, "q", "r")[add(ctx, arr, 1)]
    values = (1 - eta_of_s(tower) * eta(tower, traces) - (traces == 0)) // 2
    values = np.where(arr == 0, 0, values)
    return int(values) if arr.ndim == 0 else values


def indicator_II(tower, x):
    """(1 - eta(T) - [T = 0]) / 2 with T = Tr_{q/r}(x^(q+1))."""
    arr = np.asarray(x, dtype=np.int64)
    traces = trace_table(tower, "q", "r")[norm_table(tower)[arr]]
    values = (1 - eta(tower, traces) - (traces == 0)) // 2
    return int(values) if arr.ndim == 0 else values


@dataclass(eq=False)
class Codebook:
    """
    N unit-norm codewords of length K, stored in exponent form.

    Entry (i, k) is zeta_m^exponent / sqrt(K). Rows are generated lazily from
    the defining set; codebooks read back from a file carry their matrix.

    Attributes:
        construction: "I" or "II".
        dset: DefiningSet, or None for an imported codebook without a tower.
        N, K, m: Rows, columns and root order.
        row_labels: Character index j (I) or shift encoding a (II) per row.
    """
    construction: str
    dset: DefiningSet = field(repr=False)
    N: int
    K: int
    m: int
    row_labels: np.ndarray = field(repr=False)
    matrix: np.ndarray = field(default=None, repr=False)

    @property
    def params(self):
        return self.dset.params

    def row_exponents(self, rows):
        """Exponent rows for the given row indices, shape (len(rows), K)."""
        rows = np.atleast_1d(np.asarray(rows, dtype=np.int64))
        if self.matrix is not None:
            return self.matrix[rows]
        labels = self.row_labels[rows]
        if self.construction == "I":
            return (labels[:, None] * self.dset.logs[None, :]) % self.m
        tower = self.dset.tower
        ctx = tower.field("q2")
        prod = ctx.antilog[(ctx.log[labels][:, None] + ctx.log[self.dset.elements][None, :]) % ctx.group_order]
        prod = np.where(labels[:, None] == 0, 0, prod)
        return trace_table(tower, "q2", "p")[prod]

    def exponents(self, max_entries=MAX_ENTRIES):
        if self.matrix is not None:
            return self.matrix
        if self.N * self.K > max_entries:
            raise BudgetExceededError("exponent matrix", self.N * self.K, max_entries)
        return self.row_exponents(np.arange(self.N))

    def to_complex(self, rows=None, max_entries=MAX_ENTRIES):
        """Complex entries scaled by 1/sqrt(K)."""
        exps = self.exponents(max_entries) if rows is None else self.row_exponents(rows)
        return np.exp(2j * np.pi * exps / self.m) / math.sqrt(self.K)

    def header(self):
        return {"construction": self.construction, "N": self.N, "K": self.K, "m": self.m}


def codebook_I(dset):
    """Rows phi_j restricted to D for j = 0..q-2."""
    if dset.construction != "I":
        raise ParameterError("codebook_I needs a Construction I defining set")
    m = dset.params.q - 1
    return Codebook("I", dset, m, dset.K, m, np.arange(m, dtype=np.int64))


def codebook_II(dset):
    """Rows chi_a restricted to D for every a in F_{q^2}, in encoding order."""
    if dset.construction != "II":
        raise ParameterError("codebook_II needs a Construction II defining set")
    n = dset.params.q2
    return Codebook("II", dset, n, dset.K, dset.params.p, np.arange(n, dtype=np.int64))


def build_codebook(construction, tower):
    """Defining set and codebook in one call."""
    if check_construction(construction) == "I":
        return codebook_I(build_set_I(tower))
    return codebook_II(build_set_II(tower))
