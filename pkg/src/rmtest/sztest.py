"""Exact degree-drop probabilities under random multipliers and the
monomial-counting bound that governs them.

For f of exact degree d and a uniform multiplier of degree at most e, the
probability that the product's degree falls below d+s is at most
q^(-|dominating range of LM(f) over shifts s..e|), with equality for an
explicit witness built from the ordered basis.  The linear system behind
the bound (one homogeneous equation per high-degree product monomial) is
materialized so its rank can be compared against both the drop counts
and the triangular-submatrix guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import combin, genbasis
from .algebra import (
    Monomial,
    Polynomial,
    batch_degrees,
    batch_interpolate,
    coefficient_blocks,
    eval_matrix,
    monomial_indices_up_to_degree,
    mul_reduced,
    rank_mod,
    random_polynomial,
)
from .errors import InfeasibleInstanceError, ZeroPolynomialError
from .estimator import EstimateResult, estimate, get_budget


@dataclass(frozen=True)
class SZQuery:
    """A degree-drop query: polynomial, multiplier degree e, threshold s."""

    f: Polynomial
    e: int
    s: int

    def __post_init__(self):
        if self.f.is_zero():
            raise ZeroPolynomialError("degree-drop queries need a nonzero f")
        if not 0 <= self.s <= self.e:
            raise ValueError(f"need 0 <= s <= e, got s={self.s}, e={self.e}")
        if self.e > self.f.n * (self.f.q - 1):
            raise ValueError("multiplier degree exceeds the ring's top degree")

    @property
    def d(self) -> int:
        return int(self.f.degree)

    @property
    def vacuous(self) -> bool:
        """Target degree beyond the ring's top degree: every product drops."""
        return self.d + self.s > self.f.n * (self.f.q - 1)


@dataclass(frozen=True)
class SZBoundReport:
    query: SZQuery
    mode: str  # "exact" | "sampled"
    probability: Fraction | None  # exact mode
    estimate: EstimateResult | None  # sampled mode
    bound: Fraction  # from LM(f)
    extremal_bound: Fraction  # from the extremal monomial at deg(f)
    rank: int  # independent equations found (triangular submatrix rows)
    vacuous: bool
    drop_count: int | None = None
    total: int | None = None

    @property
    def p_float(self) -> float:
        if self.probability is not None:
            return float(self.probability)
        return float(self.estimate.p_hat)


def _drop_count_exact(f: Polynomial, e: int, threshold, budget: int) -> tuple[int, int]:
    """Count multipliers P of degree <= e with deg(fP) < threshold."""
    q, n = f.q, f.n
    idx = monomial_indices_up_to_degree(q, n, e)
    total = q ** len(idx)
    if total > budget:
        raise InfeasibleInstanceError(total, budget, "multiplier enumeration")
    sub = eval_matrix(q, n)[:, idx]
    ftab = f.evaluate_all().values
    drops = 0
    for block in coefficient_blocks(q, len(idx)):
        tables = block @ sub.T % q
        prods = tables * ftab[None, :] % q
        degs = batch_degrees(q, n, batch_interpolate(q, n, prods))
        drops += int(np.count_nonzero(degs < threshold))
    return drops, total


def degree_drop_probability(
    f: Polynomial,
    e: int,
    s: int,
    trials: int | None = None,
    seed: int = 0,
    budget: int | None = None,
) -> SZBoundReport:
    """Probability over uniform degree-<=e multipliers that deg(fP) < d+s.

    Exact mode enumerates every multiplier (the zero product counts as a
    drop); sampled mode is a seeded Monte Carlo run.  The report carries
    the counting bound computed from the leading monomial of f and the
    weaker extremal-monomial bound at the same degree.
    """
    query = SZQuery(f, e, s)
    d = query.d
    q, n = f.q, f.n
    lm = f.leading_monomial()
    bound = Fraction(1, q ** combin.dominating_range_count(lm, s, e))
    m0 = combin.extremal_monomial(q, n, d)
    extremal = Fraction(1, q ** combin.dominating_range_count(m0, s, e))
    rank = independent_equation_rank(f, e, s)
    if query.vacuous:
        # every product has degree at most n(q-1) < d+s
        prob = Fraction(1)
        return SZBoundReport(query, "exact", prob, None, bound, extremal, rank, True)
    if trials is None:
        drops, total = _drop_count_exact(f, e, d + s, get_budget(budget))
        return SZBoundReport(
            query,
            "exact",
            Fraction(drops, total),
            None,
            bound,
            extremal,
            rank,
            False,
            drops,
            total,
        )

    def event(rng):
        p = random_polynomial(q, n, e, rng)
        return mul_reduced(f, p).degree < d + s

    est = estimate(event, trials, seed)
    return SZBoundReport(query, "sampled", None, est, bound, extremal, rank, False)


def tight_witness(
    q: int, n: int, d: int, ordering: genbasis.FieldOrdering | None = None
) -> Polynomial:
    """The degree-d polynomial whose drop probability meets the extremal bound.

    With d = (q-1)u + v, it is the product of the level-(q-1) basis
    polynomial in the first u variables and the level-v one in the next;
    its support has exactly (q-v) * q^(n-u-1) points.
    """
    if not 0 <= d <= n * (q - 1):
        raise ValueError(f"degree {d} outside [0, {n * (q - 1)}]")
    if ordering is None:
        ordering = genbasis.FieldOrdering.natural(q)
    basis = genbasis.basis_polys(ordering)
    u, v = divmod(d, q - 1)
    out = Polynomial.one(q, n)
    for i in range(u):
        out = mul_reduced(out, _lift_univariate(basis[q - 1], n, i))
    if v:
        out = mul_reduced(out, _lift_univariate(basis[v], n, u))
    return out


def _lift_univariate(b: Polynomial, n: int, var: int) -> Polynomial:
    """Interpret a univariate polynomial as one in X_{var+1} among n vars."""
    q = b.q
    terms = {}
    for mon, c in b.terms():
        exps = [0] * n
        exps[var] = mon.exponents[0]
        terms[tuple(exps)] = c
    return Polynomial.from_terms(q, n, terms)


@dataclass(frozen=True)
class TightnessReport:
    q: int
    n: int
    d: int
    e: int
    s: int
    probability: Fraction
    target: Fraction
    equal: bool
    witness: Polynomial


def verify_tightness(
    q: int,
    n: int,
    d: int,
    e: int,
    s: int,
    ordering: genbasis.FieldOrdering | None = None,
    budget: int | None = None,
) -> TightnessReport:
    """Exact equality check of the witness's drop probability with the
    extremal-monomial bound."""
    witness = tight_witness(q, n, d, ordering)
    report = degree_drop_probability(witness, e, s, budget=budget)
    m0 = combin.extremal_monomial(q, n, d)
    target = Fraction(1, q ** combin.dominating_range_count(m0, s, e))
    prob = report.probability
    return TightnessReport(q, n, d, e, s, prob, target, prob == target, witness)


# ---------------------------------------------------------------------------
# The homogeneous linear system behind the bound
# ---------------------------------------------------------------------------


def equation_matrix(
    f: Polynomial, e: int, s: int, all_rows: bool = False
) -> tuple[np.ndarray, list[Monomial], list[Monomial]]:
    """Coefficient matrix of the system "high product monomials vanish".

    Columns are indexed by the multiplier monomials of degree <= e.  With
    all_rows=False the rows are the unreduced products of LM(f) with its
    disjoint monomials at shifts s..e (the rows the triangular-submatrix
    argument certifies); with all_rows=True every monomial of degree at
    least deg(f)+s appears, which makes the system equivalent to the drop
    event itself.  Entries sum f's coefficients over reduced-product
    collisions, mirroring the reduced-versus-unreduced distinction.
    """
    q, n = f.q, f.n
    lm = f.leading_monomial()
    d = lm.degree
    cols = [Monomial.from_index(q, n, int(i)) for i in monomial_indices_up_to_degree(q, n, e)]
    if all_rows:
        rows = [
            m
            for m in combin.all_monomials(q, n)
            if m.degree >= d + s
        ]
    else:
        rows = [
            Monomial(q, dm.unreduced_exponents(lm))
            for dm in combin.disjoint_range(lm, s, e)
        ]
    row_pos = {m: i for i, m in enumerate(rows)}
    mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
    fterms = f.terms()
    for cj, mc in enumerate(cols):
        for mj, beta in fterms:
            prod = mc * mj  # reduced product
            ri = row_pos.get(prod)
            if ri is not None:
                mat[ri, cj] = (mat[ri, cj] + beta) % q
    return mat, rows, cols


def independent_equation_rank(
    f: Polynomial, e: int, s: int, all_rows: bool = False
) -> int:
    """Rank over F_q of the vanishing system; at least the disjoint-range
    size of LM(f) by the triangular submatrix."""
    mat, rows, _ = equation_matrix(f, e, s, all_rows)
    if not rows:
        return 0
    return rank_mod(mat, f.q)
