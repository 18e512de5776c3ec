"""
Analysis Module for gfcodebook.

Inner products, maximal cross-correlation amplitude, the Welch bound, the
Construction II correlation distribution and the verifiers for the character
sum identities the two constructions rest on.

All pair correlations of a codebook reduce to one character sum per
difference (Construction II) or quotient (Construction I) of row labels, so
I_max costs O(N K) instead of O(N^2 K). For Construction II the defining set
is also invariant under the norm-one subgroup {u : u^(q+1) = 1}, which
reduces the q^2 - 1 shifts to q - 1 coset representatives.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from gfcodebook.core.characters import CycloSum, cyclo_eval, eta, histogram_rows, rational_rows
from gfcodebook.core.constructions import (
    build_set_I,
    build_set_II,
    check_construction,
    eta_of_s,
    expected_K,
    expected_N,
)
from gfcodebook.core.errors import BudgetExceededError, IntegrityError, ParameterError
from gfcodebook.core.field import (
    DEFAULT_BUDGET,
    TowerParams,
    add,
    build_tower,
    inv,
    mul,
    neg,
    norm_table,
    trace_table,
)
from gfcodebook.core.optimization import shift_histograms
from gfcodebook.core.verification import VerificationReport

logger = logging.getLogger(__name__)

TOLERANCE = 1e-9
RELATIVE_TOLERANCE = 1e-6


# -- closed forms --

def _as_params(params):
    return params if isinstance(params, TowerParams) else TowerParams(*params)


def _require_p_not_dividing_s(params):
    if params.s % params.p == 0:
        raise ParameterError(f"Construction I needs p not dividing s, got {params.label()}")


def welch_bound(N, K):
    """
    Welch lower bound sqrt((N - K) / ((N - 1) K)) on I_max of any (N, K) codebook.

    Raises:
        ParameterError: N <= 1, K < 1 or K > N.
    """
    N, K = int(N), int(K)
    if N <= 1:
        raise ParameterError(f"the Welch bound needs N > 1, got N={N}")
    if K < 1 or K > N:
        raise ParameterError(f"the Welch bound needs 1 <= K <= N, got K={K}, N={N}")
    return math.sqrt(Fraction(N - K, (N - 1) * K))


def imax_bound(construction, params):
    """Closed-form upper bound on I_max of a construction."""
    params = _as_params(params)
    q, r = params.q, params.r
    if check_construction(construction) == "I":
        _require_p_not_dividing_s(params)
        return math.sqrt(r) / (math.sqrt(q) * (math.sqrt(r) - 1))
    # (r+1) q / (2 r K) with K = q (q+1) (r-1) / (2r)
    return float(Fraction(r + 1, (q + 1) * (r - 1)))


def chain_bound(construction, params):
    """Upper bound on imax_bound / welch that holds for every parameter set."""
    params = _as_params(params)
    q, r = params.q, params.r
    if check_construction(construction) == "II":
        return math.sqrt((r + 1) / (r - 1))
    return math.sqrt(1 - 2 / q) / ((1 - 1 / math.sqrt(r)) * math.sqrt(1 - 2 / q + 1 / r))


def closed_form_parameters(construction, params):
    """N, K, I_max bound and Welch bound of a construction without building anything."""
    params = _as_params(params)
    if check_construction(construction) == "I":
        _require_p_not_dividing_s(params)
    N, K = expected_N(construction, params), expected_K(construction, params)
    return {
        "construction": construction,
        **params.to_dict(),
        "N": N,
        "K": K,
        "imax_bound": imax_bound(construction, params),
        "welch": welch_bound(N, K),
    }


def expected_distribution(params):
    """
    Closed-form Construction II correlation distribution.

    Returns:
        list of (K*C value, number of ordered pairs), the negative value first.
    """
    params = _as_params(params)
    q, r = params.q, params.r
    small = Fraction(q * (r - 1), 2 * r)
    large = Fraction(q * (r + 1), 2 * r)
    small_count = Fraction(r + 1, 2 * r) * q ** 4 - Fraction(r - 1, 2 * r) * q ** 3 - q ** 2
    large_count = Fraction(r - 1, 2 * r) * (q ** 4 + q ** 3)
    for value in (small, large, small_count, large_count):
        if value.denominator != 1:
            raise IntegrityError(f"closed-form distribution is not integral for {params.label()}")
    return [(-int(large), int(large_count)), (int(small), int(small_count))]


# -- Construction I --

def inner_product_I(dset, j):
    """
    Exact sum over D of phi_j(x), a CycloSum of order q - 1.

    K times the inner product of rows i and i' equals this sum for j = i - i'.
    """
    m = dset.params.q - 1
    j = int(j)
    if not 1 <= j <= m - 1:
        raise ParameterError(f"character index must satisfy 1 <= j <= {m - 1}, got {j}")
    return CycloSum.from_exponents(m, (j * dset.logs) % m)


def inner_products_I(dset):
    """All sums over D of phi_j(x), j = 0..q-2, as a complex vector (numpy.fft)."""
    m = dset.params.q - 1
    indicator = np.zeros(m)
    indicator[dset.logs] = 1.0
    return m * np.fft.ifft(indicator)


# -- Construction II --

def inner_product_II(dset, a):
    """Exact sum over D of chi(a x), a CycloSum of order p."""
    a = int(a)
    if a == 0:
        raise ParameterError("the shift a must be nonzero")
    tower = dset.tower
    exps = trace_table(tower, "q2", "p")[mul(tower.ctx_q2, a, dset.elements)]
    return CycloSum.from_exponents(dset.params.p, exps)


def check_norm_invariance(dset):
    """Raise IntegrityError unless u D = D for the generator u = alpha^(q-1) of the norm-one subgroup."""
    ctx = dset.ctx
    q = dset.params.q
    moved = np.sort(ctx.antilog[(dset.logs + (q - 1)) % ctx.group_order])
    if not np.array_equal(moved, dset.elements):
        raise IntegrityError(f"Construction II set of {dset.params.label()} is not norm-one invariant")


def shift_sums_II(dset, reduced=True, workers=None):
    """
    Exponent histograms of the Construction II shift sums.

    Args:
        dset: Construction II DefiningSet.
        reduced: Use the q - 1 norm-one coset representatives alpha^0..alpha^(q-2)
            instead of all q^2 - 1 nonzero shifts.
        workers: Thread count for the numpy kernel.

    Returns:
        tuple: (shift encodings, counts of shape (shifts, p), ordered pairs per shift)
    """
    ctx = dset.ctx
    params = dset.params
    N = params.q2
    if reduced:
        check_norm_invariance(dset)
        shift_logs = np.arange(params.q - 1, dtype=np.int64)
        weight = (params.q + 1) * N
    else:
        shift_logs = np.arange(ctx.group_order, dtype=np.int64)
        weight = N
    counts = shift_histograms(shift_logs, dset.logs, ctx.antilog,
                              trace_table(dset.tower, "q2", "p"), params.p, workers=workers)
    return ctx.antilog[shift_logs], counts, weight


def _histogram(values, weight):
    uniq, inverse = np.unique(values, return_inverse=True)
    totals = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(totals, inverse, weight)
    return [(int(v), int(c)) for v, c in zip(uniq, totals)]


def distribution_II(dset, reduced=True, workers=None):
    """
    Exact histogram of K * C_a C_b^H over all ordered pairs a != b.

    Returns:
        list of (integer value, count), ascending by value.

    Raises:
        IntegrityError: some shift sum is not a rational integer.
    """
    shifts, counts, weight = shift_sums_II(dset, reduced, workers)
    rational, values = rational_rows(counts)
    if not rational.all():
        bad = int(np.flatnonzero(~rational)[0])
        raise IntegrityError(f"shift sum at a={int(shifts[bad])} is not rational: {counts[bad].tolist()}")
    return _histogram(values, weight)


def verify_distribution(dset, distribution=None, workers=None):
    """
    Compare the enumerated distribution with the closed form.

    Magnitudes and counts are asserted; the observed signs are recorded in
    the report details.
    """
    params = dset.params
    observed = distribution if distribution is not None else distribution_II(dset, workers=workers)
    expected = expected_distribution(params)
    N = params.q2
    report = VerificationReport("distribution")
    report.record(sum(c for _, c in observed) == N * (N - 1), property="counts sum to N(N-1)")
    report.record(len(observed) == 2, property="two values", observed=observed)
    by_magnitude = {abs(v): c for v, c in observed}
    for value, count in expected:
        report.record(by_magnitude.get(abs(value)) == count, property="count per magnitude",
                      magnitude=abs(value), expected=count, observed=by_magnitude.get(abs(value)))
    report.details.update({
        "observed": [list(item) for item in observed],
        "expected": [list(item) for item in expected],
        "signs_match_closed_form": sorted(observed) == sorted(expected),
    })
    return report


# -- I_max --

def imax(construction, dset, workers=None):
    """
    Maximal |c_i c_j^H| over distinct rows, via the reduced index set.

    Construction I uses the FFT of the indicator of log D; Construction II the
    exact reduced distribution.
    """
    if check_construction(construction) != dset.construction:
        raise ParameterError(f"defining set belongs to Construction {dset.construction}")
    if construction == "I":
        return float(np.abs(inner_products_I(dset)[1:]).max() / dset.K)
    values = [v for v, _ in distribution_II(dset, workers=workers)]
    return max(abs(v) for v in values) / dset.K


def brute_force_imax(codebook, max_entries=2 ** 26):
    """I_max from the explicit Gram matrix, O(N^2 K)."""
    if codebook.N * codebook.N * codebook.K > max_entries:
        raise BudgetExceededError("all-pairs Gram matrix", codebook.N * codebook.N * codebook.K, max_entries)
    c = codebook.to_complex()
    gram = c @ c.conj().T
    np.fill_diagonal(gram, 0)
    return float(np.abs(gram).max())


def brute_force_distribution(codebook, max_entries=2 ** 26):
    """Exact Construction II distribution from all row pairs, O(N^2 K)."""
    if codebook.construction != "II":
        raise ParameterError("the exact pair distribution is defined for Construction II")
    N, K, p = codebook.N, codebook.K, codebook.m
    if N * N * K > max_entries:
        raise BudgetExceededError("all-pairs distribution", N * N * K, max_entries)
    exps = codebook.exponents()
    values = []
    for i in range(N):
        counts = np.delete(histogram_rows((exps[i][None, :] - exps) % p, p), i, axis=0)
        rational, row_values = rational_rows(counts)
        if not rational.all():
            raise IntegrityError(f"pair sum for row {i} is not rational")
        values.append(row_values)
    return _histogram(np.concatenate(values), 1)


# -- Construction I lemmas --

def _lemma_weights(tower):
    """eta(Tr_{q/r}(x + 1)) and [Tr_{q/r}(x + 1) = 0] for x = alpha^k, k = 0..q-2."""
    ctx = tower.ctx_q
    x = ctx.antilog
    traces = trace_table(tower, "q", "r")[add(ctx, x, 1)]
    return eta(tower, traces), traces == 0


def sum_A(tower, j):
    """A = sum over F_q^* of phi_j(x) eta(Tr_{q/r}(x + 1)) as a signed CycloSum."""
    m = tower.ctx_q.group_order
    weights, _ = _lemma_weights(tower)
    k = np.arange(m, dtype=np.int64)
    return (CycloSum.from_exponents(m, (j * k[weights == 1]) % m)
            - CycloSum.from_exponents(m, (j * k[weights == -1]) % m))


def sum_B(tower, j):
    """B = sum over x in F_q^* with Tr_{q/r}(x + 1) = 0 of phi_j(x)."""
    m = tower.ctx_q.group_order
    _, zero = _lemma_weights(tower)
    k = np.arange(m, dtype=np.int64)
    return CycloSum.from_exponents(m, (j * k[zero]) % m)


def sums_AB(tower):
    """A and B for every character index j at once (numpy.fft over the log domain)."""
    m = tower.ctx_q.group_order
    weights, zero = _lemma_weights(tower)
    return m * np.fft.ifft(weights.astype(np.float64)), m * np.fft.ifft(zero.astype(np.float64))


def _lemma_values(tower, which, exact_limit):
    ctx = tower.ctx_q
    m = ctx.group_order
    if ctx.order <= exact_limit:
        builder = sum_A if which == "A" else sum_B
        return np.array([cyclo_eval(builder(tower, j)) for j in range(m)]), "exact"
    A, B = sums_AB(tower)
    return (A if which == "A" else B), "fft"


def _lemma_report(tower, which, trivial, trivial_value, generic_value, exact_limit):
    params = tower.params
    _require_p_not_dividing_s(params)
    m, r = params.q - 1, params.r
    values, method = _lemma_values(tower, which, exact_limit)
    j = np.arange(1, m)
    expected = np.where(trivial(j), trivial_value, generic_value)
    mags = np.abs(values[1:])
    report = VerificationReport(f"lemma{which}")
    report.record_many(np.abs(mags - expected) <= RELATIVE_TOLERANCE * expected,
                       lambda i: {"j": int(j[i]), "magnitude": float(mags[i]), "expected": float(expected[i])})
    all_j = np.arange(m)
    kernel = int(((all_j % (r - 1)) == 0).sum())
    report.record(kernel == m // (r - 1), property="characters trivial on F_r", count=kernel)
    report.details.update({"method": method, "special_case_count": int(trivial(j).sum()),
                           "restriction_kernel": kernel})
    return report


def verify_lemma_A(tower, exact_limit=1024):
    """
    |A| = sqrt(q) when eta times conj(phi*) is nontrivial on F_r, else sqrt(q/r).

    phi_j restricted to F_r is the character j mod (r - 1), so the special
    case is j = (r - 1)/2 mod (r - 1). Only nontrivial phi are checked.
    """
    q, r = tower.params.q, tower.params.r
    return _lemma_report(tower, "A", lambda j: (j % (r - 1)) == (r - 1) // 2,
                         math.sqrt(q) / math.sqrt(r), math.sqrt(q), exact_limit)


def verify_lemma_B(tower, exact_limit=1024):
    """|B| = sqrt(q)/sqrt(r) when phi* is nontrivial on F_r, else sqrt(q)/r."""
    q, r = tower.params.q, tower.params.r
    return _lemma_report(tower, "B", lambda j: (j % (r - 1)) == 0,
                         math.sqrt(q) / r, math.sqrt(q) / math.sqrt(r), exact_limit)


def verify_decomposition_I(dset):
    """Check K F_i F_j^H = -(eta(s) A + B) / 2 for every nontrivial quotient character."""
    tower = dset.tower
    q = dset.params.q
    S = inner_products_I(dset)
    A, B = sums_AB(tower)
    residual = np.abs(2 * S[1:] + eta_of_s(tower) * A[1:] + B[1:])
    report = VerificationReport("decomposition-I")
    report.record_many(residual <= TOLERANCE * q, lambda i: {"j": i + 1, "residual": float(residual[i])})
    return report


# -- Construction II lemmas --

def _check_quartic_budget(tower, factor, budget, what):
    cost = factor * tower.params.q2 * tower.params.q2
    if cost > budget:
        raise BudgetExceededError(what, cost, budget)


def bent_spectrum(tower, b, workers=None):
    """
    Exponent histograms of f_b-hat(a) = sum_x zeta^(Tr_{q/p}(b x^(q+1)) + Tr_{q^2/p}(a x)).

    Returns:
        counts of shape (q^2, p), row a in encoding order.
    """
    ctx = tower.ctx_q2
    x = ctx.elements()
    bq = int(tower.embed_r_in_q[b])
    offsets = trace_table(tower, "q", "p")[mul(tower.ctx_q, bq, norm_table(tower)[x])]
    logs = ctx.log[x]
    return shift_histograms(logs, logs, ctx.antilog, trace_table(tower, "q2", "p"), tower.params.p,
                            offsets=offsets, workers=workers)


def verify_bent(tower, budget=DEFAULT_BUDGET, workers=None):
    """
    Check f_b-hat(a) = -q zeta^(-Tr_{q/p}(a^(q+1) / b)) for b in F_r^* and every a.

    b = 0 gives the additive orthogonality values q^2 at a = 0 and 0 elsewhere.
    """
    params = tower.params
    p, q = params.p, params.q
    _check_quartic_budget(tower, params.r, budget, "bent spectrum")
    a = tower.ctx_q2.elements()
    norms = norm_table(tower)[a]
    tr_qp = trace_table(tower, "q", "p")
    report = VerificationReport("bent")
    for b in range(1, params.r):
        counts = bent_spectrum(tower, b, workers)
        binv = inv(tower.ctx_q, int(tower.embed_r_in_q[b]))
        phase = (-tr_qp[mul(tower.ctx_q, norms, binv)]) % p
        diff = counts.copy()
        diff[np.arange(a.size), phase] += q
        report.record_many((diff == diff[:, :1]).all(axis=1),
                           lambda i, b=b: {"b": b, "a": i, "counts": counts[i].tolist()})
    rational, values = rational_rows(bent_spectrum(tower, 0, workers))
    expected = np.where(a == 0, params.q2, 0)
    report.record_many(rational & (values == expected), lambda i: {"b": 0, "a": i})
    report.details["regular_bent"] = report.passed
    return report


def pq_sums(tower, workers=None):
    """
    P(a) and Q(a) for every nonzero a in F_{q^2} as exact integers.

    P sums chi(a x) over x with Tr_{q/r}(x^T) = 0; Q sums chi(a x) eta(Tr_{q/r}(x^T))
    over all x, T = q + 1.

    Returns:
        tuple: (shifts, P values, Q values)

    Raises:
        IntegrityError: a sum is not a rational integer.
    """
    ctx = tower.ctx_q2
    x = ctx.elements()
    traces = trace_table(tower, "q", "r")[norm_table(tower)]
    weights = eta(tower, traces)
    shift_logs = np.arange(ctx.group_order, dtype=np.int64)
    tr = trace_table(tower, "q2", "p")
    p = tower.params.p

    def hist(subset):
        return shift_histograms(shift_logs, ctx.log[subset], ctx.antilog, tr, p, workers=workers)

    p_counts = hist(x[traces == 0])
    q_counts = hist(x[weights == 1]) - hist(x[weights == -1])
    shifts = ctx.antilog[shift_logs]
    results = []
    for name, counts in (("P", p_counts), ("Q", q_counts)):
        rational, values = rational_rows(counts)
        if not rational.all():
            bad = int(np.flatnonzero(~rational)[0])
            raise IntegrityError(f"{name}({int(shifts[bad])}) is not rational")
        results.append(values)
    return shifts, results[0], results[1]


def verify_P_Q(tower, budget=DEFAULT_BUDGET, workers=None):
    """
    Check the P and Q case tables for every nonzero a.

    P = -(q/r)(r - 1) if Tr_{q/r}(a^T) = 0, else q/r.
    Q = 0 if Tr_{q/r}(a^T) = 0, else -q eta(-Tr_{q/r}(a^T)).
    """
    params = tower.params
    q, r = params.q, params.r
    _check_quartic_budget(tower, 3, budget, "P and Q sums")
    shifts, P, Q = pq_sums(tower, workers)
    ta = trace_table(tower, "q", "r")[norm_table(tower)[shifts]]
    zero = ta == 0
    p_expected = np.where(zero, -(q // r) * (r - 1), q // r)
    q_expected = np.where(zero, 0, -q * eta(tower, neg(tower.ctx_r, ta)))
    report = VerificationReport("PQ")
    report.record_many(P == p_expected, lambda i: {"sum": "P", "a": int(shifts[i]), "value": int(P[i]),
                                                   "expected": int(p_expected[i])})
    report.record_many(Q == q_expected, lambda i: {"sum": "Q", "a": int(shifts[i]), "value": int(Q[i]),
                                                   "expected": int(q_expected[i])})
    zero_count = int(zero.sum())
    report.record(zero_count == (q // r - 1) * (q + 1), property="shifts with Tr(a^T) = 0", count=zero_count)
    report.details["trace_zero_shifts"] = zero_count
    return report


def verify_decomposition_II(dset, budget=DEFAULT_BUDGET, workers=None):
    """Check K C_a C_b^H = -(P + Q) / 2 for every nonzero difference a - b."""
    tower = dset.tower
    _check_quartic_budget(tower, 3, budget, "P and Q sums")
    shifts, counts, _ = shift_sums_II(dset, reduced=False, workers=workers)
    _, S = rational_rows(counts)
    _, P, Q = pq_sums(tower, workers)
    report = VerificationReport("decomposition-II")
    report.record_many(2 * S == -(P + Q), lambda i: {"a": int(shifts[i]), "S": int(S[i]),
                                                     "P": int(P[i]), "Q": int(Q[i])})
    return report


# -- reports --

@dataclass
class AnalysisReport:
    """I_max, bounds and (Construction II) distribution of one parameter set.

    imax_empirical and ratio_empirical_over_welch are None in the formula tier.
    """
    construction: str
    params: TowerParams
    N: int
    K: int
    imax_bound: float
    welch: float
    ratio_bound_over_welch: float
    chain_bound: float
    imax_empirical: float = None
    ratio_empirical_over_welch: float = None
    distribution: list = None
    tier: str = "formula"
    notes: list = field(default_factory=list)

    def to_row(self):
        return {
            "construction": self.construction,
            "p": self.params.p,
            "t": self.params.t,
            "s": self.params.s,
            "r": self.params.r,
            "q": self.params.q,
            "N": self.N,
            "K": self.K,
            "imax_empirical": self.imax_empirical,
            "imax_bound": self.imax_bound,
            "welch": self.welch,
            "ratio_bound": self.ratio_bound_over_welch,
            "ratio_empirical": self.ratio_empirical_over_welch,
            "tier": self.tier,
        }

    def to_dict(self):
        data = self.to_row()
        data["chain_bound"] = self.chain_bound
        data["distribution"] = [list(item) for item in self.distribution] if self.distribution else None
        data["notes"] = list(self.notes)
        return data


def ratio_report(params, construction, budget=DEFAULT_BUDGET, tower=None, workers=None):
    """
    Full analysis of one parameter set.

    Closed forms are always reported; the codebook is built and I_max
    measured when the largest field fits the budget.

    Raises:
        ParameterError: invalid parameters.
        IntegrityError: a bound inequality fails.
    """
    params = _as_params(params)
    closed = closed_form_parameters(construction, params)
    N, K, bound, welch = closed["N"], closed["K"], closed["imax_bound"], closed["welch"]
    report = AnalysisReport(construction, params, N, K, bound, welch, bound / welch,
                            chain_bound(construction, params))
    if not report.ratio_bound_over_welch < report.chain_bound:
        raise IntegrityError(f"bound/Welch ratio {report.ratio_bound_over_welch} is not below "
                             f"{report.chain_bound} for {params.label()}")

    level = "q" if construction == "I" else "q2"
    size = params.order(level)
    if size > budget:
        report.notes.append(f"F_{level} has {size} elements, beyond the budget {budget}; formula tier")
        logger.warning("Construction %s %s beyond budget, reporting closed forms only",
                       construction, params.label())
        return report

    if tower is None:
        tower = build_tower(params, budget, with_q2=(construction == "II"))
    if construction == "I":
        dset = build_set_I(tower)
        empirical = imax("I", dset)
    else:
        dset = build_set_II(tower)
        report.distribution = distribution_II(dset, workers=workers)
        empirical = max(abs(v) for v, _ in report.distribution) / dset.K
    report.imax_empirical = empirical
    report.ratio_empirical_over_welch = empirical / welch
    report.tier = "exhaustive"
    if empirical > bound + TOLERANCE:
        raise IntegrityError(f"I_max {empirical} exceeds the bound {bound} for {params.label()}")
    if welch > empirical + TOLERANCE:
        raise IntegrityError(f"I_max {empirical} is below the Welch bound {welch} for {params.label()}")
    logger.info("Construction %s %s: N=%d K=%d I_max=%.6g bound=%.6g welch=%.6g",
                construction, params.label(), N, K, empirical, bound, welch)
    return report
