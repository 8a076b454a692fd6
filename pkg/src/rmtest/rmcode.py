"""Reed-Muller membership, exact distance, duality and character sums.

The order-d code over (q, n) is the set of functions whose reduced
polynomial has total degree at most d.  Distances are absolute Hamming
distances computed by exact coset enumeration; weight distributions can
also be obtained through the dual code when the primal is too large to
enumerate, with the dimension and orthogonality facts that identify the
dual checked on the way.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import combin
from .algebra import (
    FieldElement,
    Polynomial,
    coefficient_blocks,
    ensure_prime,
    eval_matrix,
    monomial_indices_up_to_degree,
)
from .errors import InfeasibleInstanceError
from .estimator import get_budget, trial_rng


@dataclass(frozen=True)
class CodeParams:
    """Code identified by field size q, dimension n and order d."""

    q: int
    n: int
    d: int

    def __post_init__(self):
        ensure_prime(self.q)
        if not 0 <= self.d <= (self.q - 1) * self.n:
            raise ValueError(
                f"order {self.d} outside [0, {(self.q - 1) * self.n}]"
            )

    @property
    def r(self) -> int:
        """Co-degree (q-1)n - d; the dual code has order r - 1."""
        return (self.q - 1) * self.n - self.d

    @property
    def dimension(self) -> int:
        return combin.monomial_count(self.q, self.n, self.d)

    @property
    def size(self) -> int:
        return self.q**self.dimension

    def dual_order(self) -> int:
        return self.r - 1


@dataclass(frozen=True)
class DistanceResult:
    distance: int
    nearest: Polynomial
    method: str
    enumerated: int


def is_member(f: Polynomial, code: CodeParams) -> bool:
    """Membership is a degree test; the zero polynomial always belongs."""
    if f.q != code.q or f.n != code.n:
        raise ValueError("polynomial and code parameters disagree")
    return f.degree <= code.d


def _codeword_tables(code: CodeParams, block_size: int = 1 << 13):
    """Yield (coefficient rows, evaluation rows) over the whole code."""
    q, n = code.q, code.n
    idx = monomial_indices_up_to_degree(q, n, code.d)
    sub = eval_matrix(q, n)[:, idx]
    for block in coefficient_blocks(q, len(idx), block_size):
        yield idx, block, block @ sub.T % q


def distance(f: Polynomial, code: CodeParams, budget: int | None = None) -> DistanceResult:
    """Exact distance to the code by enumerating the coset of f."""
    if f.q != code.q or f.n != code.n:
        raise ValueError("polynomial and code parameters disagree")
    budget = get_budget(budget)
    if code.size > budget:
        raise InfeasibleInstanceError(code.size, budget, "coset enumeration")
    q, n = code.q, code.n
    ftab = f.evaluate_all().values
    best = None
    best_coeffs = None
    for idx, block, tables in _codeword_tables(code):
        dists = np.count_nonzero(tables != ftab[None, :], axis=1)
        j = int(np.argmin(dists))
        if best is None or dists[j] < best:
            best = int(dists[j])
            best_coeffs = (idx, block[j].copy())
    coeffs = np.zeros(q**n, dtype=np.int64)
    coeffs[best_coeffs[0]] = best_coeffs[1]
    return DistanceResult(best, Polynomial(q, n, coeffs), "exact-coset", code.size)


def weight_distribution(code: CodeParams, budget: int | None = None) -> np.ndarray:
    """counts[w] = number of codewords of Hamming weight w, by enumeration."""
    budget = get_budget(budget)
    if code.size > budget:
        raise InfeasibleInstanceError(code.size, budget, "code enumeration")
    counts = np.zeros(code.q**code.n + 1, dtype=object)
    for _, _, tables in _codeword_tables(code):
        w = np.count_nonzero(tables, axis=1)
        for wt, c in zip(*np.unique(w, return_counts=True)):
            counts[int(wt)] += int(c)
    return counts


def _krawtchouk(npoints: int, q: int, w: int, j: int) -> int:
    return sum(
        (-1) ** i * (q - 1) ** (w - i) * math.comb(j, i) * math.comb(npoints - j, w - i)
        for i in range(0, w + 1)
    )


def macwilliams_transform(dual_counts: np.ndarray, q: int, npoints: int) -> np.ndarray:
    """Weight distribution of a code from its dual's, exactly.

    counts[w] = (1/|dual|) sum_j dual_counts[j] * K_w(j); every division
    must come out integral, which is asserted.
    """
    dual_size = int(sum(int(c) for c in dual_counts))
    out = np.zeros(npoints + 1, dtype=object)
    nz = [j for j in range(npoints + 1) if dual_counts[j]]
    for w in range(npoints + 1):
        total = sum(int(dual_counts[j]) * _krawtchouk(npoints, q, w, j) for j in nz)
        quot, rem = divmod(total, dual_size)
        if rem:
            raise AssertionError("weight transform gave a non-integer count")
        out[w] = quot
    return out


def dual_code(code: CodeParams) -> CodeParams | None:
    """The dual (order r-1) or None when the dual is the zero code."""
    if code.dual_order() < 0:
        return None
    return CodeParams(code.q, code.n, code.dual_order())


def min_weight(code: CodeParams, budget: int | None = None) -> int:
    """Minimum weight of a nonzero codeword.

    Enumerates the code directly when it fits the budget; otherwise
    enumerates the dual and transforms, after confirming the dual really is
    dual (complementary dimension plus exhaustive orthogonality on a basis).
    """
    budget = get_budget(budget)
    npoints = code.q**code.n
    if code.size <= budget:
        counts = weight_distribution(code, budget)
    else:
        dual = dual_code(code)
        if dual is None:
            dual_counts = np.zeros(npoints + 1, dtype=object)
            dual_counts[0] = 1
        else:
            if dual.size > budget:
                raise InfeasibleInstanceError(
                    min(code.size, dual.size), budget, "code/dual enumeration"
                )
            _assert_duality(code, dual)
            dual_counts = weight_distribution(dual, budget)
        counts = macwilliams_transform(dual_counts, code.q, npoints)
        if sum(int(c) for c in counts) != code.size:
            raise AssertionError("transformed distribution has wrong total")
    return next(w for w in range(1, npoints + 1) if counts[w])


def _assert_duality(code: CodeParams, dual: CodeParams) -> None:
    q, n = code.q, code.n
    if code.dimension + dual.dimension != q**n:
        raise AssertionError("dimensions are not complementary")
    # orthogonality of the monomial bases is enough by bilinearity
    em = eval_matrix(q, n)
    idx_c = monomial_indices_up_to_degree(q, n, code.d)
    idx_d = monomial_indices_up_to_degree(q, n, dual.d)
    gram = em[:, idx_c].T @ em[:, idx_d] % q
    if gram.any():
        raise AssertionError("claimed dual is not orthogonal")


def inner_product(f: Polynomial, g: Polynomial) -> FieldElement:
    """Sum of the pointwise products over all of F_q^n."""
    f._check(g)
    total = int((f.evaluate_all().values * g.evaluate_all().values).sum())
    return FieldElement(total, f.q)


# ---------------------------------------------------------------------------
# Character sums over the q-th roots of unity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CharacterSum:
    """Average of q-th roots of unity kept as exact per-residue counts.

    counts[a] tallies how many terms contributed omega^a; the floating
    value is derived on demand, and the 0/1 indicator decisions can be made
    on the integers alone (q prime, so the only rational cyclotomic
    relation is that all roots sum to zero).
    """

    q: int
    counts: tuple[int, ...]
    total: int
    mode: str = "exact"

    def value(self) -> complex:
        omega = cmath.exp(2j * cmath.pi / self.q)
        return sum(c * omega**a for a, c in enumerate(self.counts)) / self.total

    def abs_value(self) -> float:
        return abs(self.value())

    def rational_if_real(self) -> Fraction | None:
        """Exact value when the counts show it is rational (all nonzero
        residues equally hit); None otherwise."""
        rest = self.counts[1:]
        if all(c == rest[0] for c in rest):
            return Fraction(self.counts[0] - rest[0], self.total)
        return None

    def is_exactly_one(self) -> bool:
        return self.counts[0] == self.total

    def is_exactly_zero(self) -> bool:
        return all(c == self.counts[0] for c in self.counts)


def _character_counts(q: int, residues: np.ndarray) -> CharacterSum:
    counts = np.bincount(residues % q, minlength=q)
    return CharacterSum(q, tuple(int(c) for c in counts), int(residues.size))


def character_membership(
    f: Polynomial,
    code: CodeParams,
    trials: int | None = None,
    seed: int = 0,
    budget: int | None = None,
) -> CharacterSum:
    """Membership indicator as the dual-code character average.

    Exact mode (trials=None) averages omega^{<f,Q>} over the entire dual
    code: exactly 1 for members and 0 for non-members.  Sampled mode
    averages over uniformly drawn dual words.
    """
    q, n = code.q, code.n
    if f.q != q or f.n != n:
        raise ValueError("polynomial and code parameters disagree")
    ftab = f.evaluate_all().values
    dual = dual_code(code)
    if dual is None:
        # dual = {0}: every inner product is 0
        total = 1 if trials is None else trials
        counts = tuple([total] + [0] * (q - 1))
        return CharacterSum(q, counts, total, "exact" if trials is None else "sampled")
    if trials is None:
        budget = get_budget(budget)
        if dual.size > budget:
            raise InfeasibleInstanceError(dual.size, budget, "dual enumeration")
        residues = []
        for _, _, tables in _codeword_tables(dual):
            residues.append(tables @ ftab % q)
        return _character_counts(q, np.concatenate(residues))
    idx = monomial_indices_up_to_degree(q, n, dual.d)
    sub = eval_matrix(q, n)[:, idx]
    rng = trial_rng(seed, 0)
    coeffs = rng.integers(0, q, size=(trials, len(idx)))
    residues = (coeffs @ sub.T % q) @ ftab % q
    cs = _character_counts(q, residues)
    return CharacterSum(q, cs.counts, cs.total, "sampled")


# ---------------------------------------------------------------------------
# Direction search (restrictions staying far from the lower-dimensional code)
# ---------------------------------------------------------------------------


def direction_representatives(q: int, n: int) -> list[tuple[int, ...]]:
    """One normalized representative per scalar class of nonzero forms,
    in lexicographic order (leading nonzero coefficient scaled to 1)."""
    out = []
    for idx in range(1, q**n):
        coeffs = []
        rem = idx
        for _ in range(n):
            coeffs.append(rem % q)
            rem //= q
        coeffs.reverse()
        lead = next(c for c in coeffs if c)
        if lead == 1:
            out.append(tuple(coeffs))
    out.sort()
    assert len(out) == (q**n - 1) // (q - 1)
    return out


@dataclass(frozen=True)
class DirectionReport:
    form: tuple[int, ...]
    restriction_distances: tuple[int, ...]  # one per field element
    qualifies: bool


@dataclass(frozen=True)
class DirectionSearchResult:
    found: tuple[int, ...] | None
    threshold: int
    reports: tuple[DirectionReport, ...]


def find_good_direction(
    f: Polynomial, code: CodeParams, delta: int, budget: int | None = None
) -> DirectionSearchResult:
    """First direction whose every restriction stays delta/q^3-far.

    Scans all normalized nonzero forms; for each, restricts f to the q
    parallel hyperplanes and requires exact distance at least
    ceil(delta/q^3) from the order-d code one dimension down.  Returns the
    first qualifying form, or None with the full per-direction report.
    """
    q, n = code.q, code.n
    threshold = -(-delta // q**3)  # ceil
    sub_d = min(code.d, (q - 1) * (n - 1))
    subcode = CodeParams(q, n - 1, sub_d)
    reports = []
    found = None
    for form in direction_representatives(q, n):
        dists = []
        for alpha in range(q):
            res = f.restrict(form, alpha)
            dists.append(distance(res, subcode, budget).distance)
        ok = all(dd >= threshold for dd in dists)
        reports.append(DirectionReport(form, tuple(dists), ok))
        if ok and found is None:
            found = form
    return DirectionSearchResult(found, threshold, tuple(reports))
