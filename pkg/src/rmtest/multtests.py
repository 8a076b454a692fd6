"""Randomized membership tests for the degree-d code and their oracles.

The multiplier test draws k independent uniform polynomials of degree at
most e and accepts when the product with f still has degree at most d+ek.
Variants: the same with a fixed univariate shape applied to one random
multiplier, a robustness experiment tracking the distance (not just the
membership) of the product, and the classic restrict-to-a-random-affine-
subspace test.  Every randomized test has an exhaustive enumeration oracle
computing its acceptance probability exactly, plus the closed-form bounds
the analysis promises, so small instances can be checked end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from statistics import median

import numpy as np

from . import combin
from .algebra import (
    Polynomial,
    batch_degrees,
    batch_interpolate,
    coefficient_blocks,
    eval_matrix,
    monomial_indices_up_to_degree,
    mul_reduced,
    rank_mod,
    random_polynomial,
    restrict_to_affine,
)
from .errors import InfeasibleInstanceError
from .estimator import get_budget
from .rmcode import CharacterSum, CodeParams, _character_counts, dual_code

DEFAULT_CQ = 6  # stand-in for the nonconstructive restriction constant


@dataclass(frozen=True)
class TestConfig:
    """Parameters of a multiplier test run."""

    code: CodeParams
    e: int
    k: int = 1
    trials: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.e < 0:
            raise ValueError("multiplier degree must be nonnegative")
        if self.k < 1:
            raise ValueError("need at least one multiplier")

    @property
    def target_degree(self) -> int:
        return self.code.d + self.e * self.k

    @property
    def vacuous(self) -> bool:
        """The product can never exceed the target degree: always accepts."""
        return self.target_degree >= self.code.n * (self.code.q - 1)


@dataclass(frozen=True)
class UnivariatePoly:
    """Univariate polynomial of exact degree k = len(coeffs)-1 over F_q."""

    q: int
    coeffs: tuple[int, ...]  # c_0 .. c_k

    def __post_init__(self):
        coeffs = tuple(c % self.q for c in self.coeffs)
        if not coeffs or coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval_scalar(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.q
        return acc

    def eval_poly(self, p: Polynomial) -> Polynomial:
        """Horner evaluation in the quotient ring."""
        acc = Polynomial.constant(p.q, p.n, self.coeffs[-1])
        for c in reversed(self.coeffs[:-1]):
            acc = mul_reduced(acc, p) + Polynomial.constant(p.q, p.n, c)
        return acc

    def value_table(self) -> np.ndarray:
        """h(x) for every field element, for pointwise composition."""
        return np.array([self.eval_scalar(x) for x in range(self.q)], dtype=np.int64)


# ---------------------------------------------------------------------------
# The multiplier test
# ---------------------------------------------------------------------------


def test_e_k(f: Polynomial, cfg: TestConfig, rng: np.random.Generator) -> bool:
    """One run: accept iff f times k random degree-<=e multipliers stays
    within degree d + ek."""
    q, n = cfg.code.q, cfg.code.n
    prod = f
    for _ in range(cfg.k):
        prod = mul_reduced(prod, random_polynomial(q, n, cfg.e, rng))
    return prod.degree <= cfg.target_degree


def _multiplier_tables(cfg: TestConfig) -> np.ndarray:
    q, n = cfg.code.q, cfg.code.n
    idx = monomial_indices_up_to_degree(q, n, cfg.e)
    sub = eval_matrix(q, n)[:, idx]
    blocks = [blk @ sub.T % q for blk in coefficient_blocks(q, len(idx))]
    return np.concatenate(blocks, axis=0)


def exact_acceptance_probability(
    f: Polynomial, cfg: TestConfig, budget: int | None = None
) -> Fraction:
    """Acceptance probability by enumerating every multiplier tuple.

    The outer multipliers are iterated one at a time and partial product
    tables reused; the innermost level is counted in bulk.
    """
    q, n = cfg.code.q, cfg.code.n
    count = q ** combin.monomial_count(q, n, cfg.e)
    total = count**cfg.k
    if total > get_budget(budget):
        raise InfeasibleInstanceError(total, get_budget(budget), "tuple enumeration")
    tables = _multiplier_tables(cfg)
    threshold = cfg.target_degree

    def count_accept(partial: np.ndarray, k_left: int) -> int:
        if k_left == 1:
            prods = tables * partial[None, :] % q
            degs = batch_degrees(q, n, batch_interpolate(q, n, prods))
            return int(np.count_nonzero(degs <= threshold))
        return sum(
            count_accept(partial * tables[i] % q, k_left - 1)
            for i in range(len(tables))
        )

    accepted = count_accept(f.evaluate_all().values, cfg.k)
    return Fraction(accepted, total)


def hard_instance(q: int, n: int, L: int) -> Polynomial:
    """The indicator of the subspace fixing the first n-L coordinates to 0:
    the product over those coordinates of (1 - x_i^{q-1})."""
    if not 0 <= L <= n:
        raise ValueError("subspace dimension out of range")
    out = Polynomial.one(q, n)
    for i in range(n - L):
        xi_pow = Polynomial.variable(q, n, i) ** (q - 1)
        out = mul_reduced(out, Polynomial.one(q, n) - xi_pow)
    return out


def subspace_vanishing_probability(
    q: int, n: int, L: int, e: int, budget: int | None = None
) -> Fraction:
    """Probability that one uniform degree-<=e multiplier vanishes on the
    L-dimensional subspace fixing the first n-L coordinates; the exact
    value is q^(-monomial_count(q, L, e))."""
    cfg = TestConfig(CodeParams(q, n, 0), e)
    count = q ** combin.monomial_count(q, n, e)
    if count > get_budget(budget):
        raise InfeasibleInstanceError(count, get_budget(budget), "multiplier enumeration")
    tables = _multiplier_tables(cfg)
    # points of the subspace: first n-L coordinates zero
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    grid = next(coefficient_blocks(q, L, block_size=q**L)) if L else np.zeros((1, 0), dtype=np.int64)
    pts = np.concatenate([np.zeros((len(grid), n - L), dtype=np.int64), grid], axis=1)
    idx = pts @ powers
    vanish = (tables[:, idx] == 0).all(axis=1)
    return Fraction(int(vanish.sum()), len(tables))


# ---------------------------------------------------------------------------
# Soundness bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundParams:
    """Closed-form soundness bound for a given distance Delta.

    eta carries the derivation-consistent exponent reading
    1/(q^(k/(q-1)) ln q); the looser reading with exponent k/q - 1 is
    reported alongside for comparison.
    """

    eta: float
    eta_alt_reading: float
    c_q: int
    L: int
    n_count: int
    bound: float
    vacuous: bool  # bound exceeds 1


def _ilog(q: int, x: int) -> int:
    """Largest L with q**L <= x (x >= 1)."""
    if x < 1:
        raise ValueError("need a positive argument")
    L = 0
    while q ** (L + 1) <= x:
        L += 1
    return L


def eta_factor(q: int, k: int) -> float:
    return 1.0 / (q ** (k / (q - 1)) * math.log(q))


def soundness_bound(cfg: TestConfig, delta: int, c_q: int = DEFAULT_CQ) -> BoundParams:
    """k * q^(-eta * monomial_count(floor(L/10) - c_q, e)) with L = floor(log_q delta)."""
    if delta < 1:
        raise ValueError("distance must be at least 1")
    q, k, e = cfg.code.q, cfg.k, cfg.e
    eta = eta_factor(q, k)
    eta_alt = 1.0 / (q ** (k / q - 1) * math.log(q))
    L = _ilog(q, delta)
    n_count = combin.monomial_count(q, L // 10 - c_q, e)
    bound = k * q ** (-eta * n_count)
    return BoundParams(eta, eta_alt, c_q, L, n_count, bound, bound > 1)


@dataclass(frozen=True)
class PremiseCheck:
    """Whether (delta, e) sit inside the soundness bound's valid ranges."""

    delta_in_range: bool  # delta^{4(q-1)} <= q^{r - 8(q-1)}, checked exactly
    e_in_range: bool  # 4ke <= r
    vacuous: bool

    @property
    def holds(self) -> bool:
        return not self.vacuous


def soundness_premise(cfg: TestConfig, delta: int) -> PremiseCheck:
    q, r, k, e = cfg.code.q, cfg.code.r, cfg.k, cfg.e
    exponent = r - 8 * (q - 1)
    delta_ok = delta >= 1 and (
        exponent >= 0 and delta ** (4 * (q - 1)) <= q**exponent
    )
    e_ok = 4 * k * e <= r
    return PremiseCheck(delta_ok, e_ok, not (delta_ok and e_ok))


def case2_bound(q: int, n: int, dprime: int, e: int, k: int) -> tuple[Fraction, bool]:
    """Degree-drop bound for f of exact degree dprime: sum over the k stages
    of q^(-monomial_count(floor(L_i/3), e)) where L_i tracks the co-degree
    of the partial product.  Applicable when every stage keeps co-degree at
    least 3e (checked on the last, smallest one)."""
    total = Fraction(0)
    applicable = True
    for i in range(k):
        r_i = (q - 1) * n - (dprime + e * i)
        if r_i < 3 * e:
            applicable = False
        L_i = max(r_i, 0) // (q - 1)
        total += Fraction(1, q ** combin.monomial_count(q, L_i // 3, e))
    return total, applicable


# ---------------------------------------------------------------------------
# Fixed univariate shape applied to a random multiplier
# ---------------------------------------------------------------------------


def corr_h(
    f: Polynomial, cfg: TestConfig, h: UnivariatePoly, rng: np.random.Generator
) -> bool:
    """Accept iff f * h(P) stays within degree d + e*deg(h) for one uniform P.

    Requires deg(h) < q: at degree q the composition can be identically
    zero (X^q - X), which would make the test meaningless.
    """
    q, n = cfg.code.q, cfg.code.n
    if h.q != q:
        raise ValueError("shape polynomial has the wrong modulus")
    if h.degree >= q:
        raise ValueError(f"shape degree must be below q, got {h.degree}")
    p = random_polynomial(q, n, cfg.e, rng)
    prod = mul_reduced(f, h.eval_poly(p))
    return prod.degree <= cfg.code.d + cfg.e * h.degree


def exact_corr_h_probability(
    f: Polynomial, cfg: TestConfig, h: UnivariatePoly, budget: int | None = None
) -> Fraction:
    """Acceptance probability of the shaped test by enumerating every P.

    The composition is applied pointwise on evaluation tables, an
    independent route from the ring Horner used by the sampler.
    """
    q, n = cfg.code.q, cfg.code.n
    if h.degree >= q:
        raise ValueError(f"shape degree must be below q, got {h.degree}")
    count = q ** combin.monomial_count(q, n, cfg.e)
    if count > get_budget(budget):
        raise InfeasibleInstanceError(count, get_budget(budget), "multiplier enumeration")
    tables = _multiplier_tables(cfg)
    comp = h.value_table()[tables]
    prods = comp * f.evaluate_all().values[None, :] % q
    degs = batch_degrees(q, n, batch_interpolate(q, n, prods))
    threshold = cfg.code.d + cfg.e * h.degree
    return Fraction(int(np.count_nonzero(degs <= threshold)), count)


# ---------------------------------------------------------------------------
# Character-sum views of the same acceptance probabilities
# ---------------------------------------------------------------------------


def raw_character_average(
    f: Polynomial, e: int, g: UnivariatePoly, budget: int | None = None
) -> CharacterSum:
    """Average over uniform degree-<=e multipliers P of omega^<g(P), f>."""
    q, n = f.q, f.n
    cfg = TestConfig(CodeParams(q, n, 0), e)
    count = q ** combin.monomial_count(q, n, e)
    if count > get_budget(budget):
        raise InfeasibleInstanceError(count, get_budget(budget), "multiplier enumeration")
    tables = _multiplier_tables(cfg)
    comp = g.value_table()[tables]
    residues = comp @ f.evaluate_all().values % q
    return _character_counts(q, residues)


def pair_character_average(
    f: Polynomial, e: int, scalar: int, budget: int | None = None
) -> CharacterSum:
    """Average over independent P1, P2 of omega^<scalar * P1 * P2, f>."""
    q, n = f.q, f.n
    cfg = TestConfig(CodeParams(q, n, 0), e)
    count = q ** combin.monomial_count(q, n, e)
    if count**2 > get_budget(budget):
        raise InfeasibleInstanceError(count**2, get_budget(budget), "pair enumeration")
    tables = _multiplier_tables(cfg)
    weighted = tables * f.evaluate_all().values[None, :] * (scalar % q) % q
    residues = weighted @ tables.T % q
    return _character_counts(q, residues.ravel())


def character_average(
    f: Polynomial, cfg: TestConfig, h: UnivariatePoly, budget: int | None = None
) -> CharacterSum:
    """Double character average over P and the dual of the target code.

    The inner average over dual words is the exact membership indicator of
    f*h(P), so the absolute value of the result equals the shaped test's
    acceptance probability.
    """
    q, n = cfg.code.q, cfg.code.n
    if h.degree >= q:
        raise ValueError(f"shape degree must be below q, got {h.degree}")
    target_d = min(cfg.code.d + cfg.e * h.degree, n * (q - 1))
    dual = dual_code(CodeParams(q, n, target_d))
    count = q ** combin.monomial_count(q, n, cfg.e)
    dual_count = 1 if dual is None else dual.size
    if count * dual_count > get_budget(budget):
        raise InfeasibleInstanceError(
            count * dual_count, get_budget(budget), "double enumeration"
        )
    tables = _multiplier_tables(cfg)
    prods = h.value_table()[tables] * f.evaluate_all().values[None, :] % q
    if dual is None:
        residues = np.zeros(len(tables), dtype=np.int64)
        return _character_counts(q, residues)
    idx = monomial_indices_up_to_degree(q, n, dual.d)
    sub = eval_matrix(q, n)[:, idx]
    dual_tables = np.concatenate(
        [blk @ sub.T % q for blk in coefficient_blocks(q, len(idx))], axis=0
    )
    residues = prods @ dual_tables.T % q
    return _character_counts(q, residues.ravel())


# ---------------------------------------------------------------------------
# Robust-distance experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RobustReport:
    mode: str  # "exact" | "sampled"
    samples: int
    distance_counts: dict  # distance -> count
    fraction_below: dict  # Delta' -> Fraction of samples with distance < Delta'
    fraction_at_most: dict  # Delta' -> Fraction of samples with distance <= Delta'
    min_distance: int
    median_distance: float
    seed: int | None = None


def robust_distance_experiment(
    f: Polynomial,
    cfg: TestConfig,
    dprimes: tuple[int, ...] | None = None,
    trials: int | None = None,
    seed: int = 0,
    budget: int | None = None,
) -> RobustReport:
    """Distribution of the exact distance of f*P from the order-(d+e) code.

    Exact mode (trials=None) enumerates every multiplier P; sampled mode
    draws them from seeded streams.  Reports the full distance
    distribution and the fraction below / at-or-below each candidate
    radius, which is the quantity the robustness statements bound.
    """
    if cfg.k != 1:
        raise ValueError("the robustness experiment multiplies by a single P")
    q, n = cfg.code.q, cfg.code.n
    budget = get_budget(budget)
    target = CodeParams(q, n, min(cfg.code.d + cfg.e, n * (q - 1)))
    if target.size > budget:
        raise InfeasibleInstanceError(target.size, budget, "coset enumeration")
    codewords = _all_codeword_tables(target)
    ftab = f.evaluate_all().values
    if trials is None:
        count = q ** combin.monomial_count(q, n, cfg.e)
        if count * len(codewords) > budget:
            raise InfeasibleInstanceError(
                count * len(codewords), budget, "multiplier x coset enumeration"
            )
        tables = _multiplier_tables(cfg)
        prods = tables * ftab[None, :] % q
        dists = _batch_distances(prods, codewords)
        mode, samples, seed_out = "exact", len(tables), None
    else:
        from .estimator import trial_rng

        rows = []
        for i in range(trials):
            p = random_polynomial(q, n, cfg.e, trial_rng(seed, i))
            rows.append(mul_reduced(f, p).evaluate_all().values)
        dists = _batch_distances(np.stack(rows), codewords)
        mode, samples, seed_out = "sampled", trials, seed
    values, counts = np.unique(dists, return_counts=True)
    dist_counts = {int(v): int(c) for v, c in zip(values, counts)}
    if dprimes is None:
        dprimes = tuple(range(0, int(values.max()) + 2))
    below = {
        int(dp): Fraction(int(np.count_nonzero(dists < dp)), samples) for dp in dprimes
    }
    at_most = {
        int(dp): Fraction(int(np.count_nonzero(dists <= dp)), samples) for dp in dprimes
    }
    return RobustReport(
        mode,
        samples,
        dist_counts,
        below,
        at_most,
        int(values.min()),
        float(median(sorted(int(x) for x in dists))),
        seed_out,
    )


def _all_codeword_tables(code: CodeParams) -> np.ndarray:
    q, n = code.q, code.n
    idx = monomial_indices_up_to_degree(q, n, code.d)
    sub = eval_matrix(q, n)[:, idx]
    return np.concatenate(
        [blk @ sub.T % q for blk in coefficient_blocks(q, len(idx))], axis=0
    )


def _batch_distances(rows: np.ndarray, codewords: np.ndarray) -> np.ndarray:
    """Per-row exact distance to the span given all codeword tables."""
    out = np.empty(len(rows), dtype=np.int64)
    for i, row in enumerate(rows):
        out[i] = int((codewords != row[None, :]).sum(axis=1).min())
    return out


def lucky_probability(
    f: Polynomial, cfg: TestConfig, dprime: int, budget: int | None = None
) -> Fraction:
    """Exact probability that f*P lands within distance dprime of the
    order-(d+e) code (the "lucky multiplier" event)."""
    report = robust_distance_experiment(f, cfg, dprimes=(dprime,), budget=budget)
    return report.fraction_at_most[dprime]


def reduction_check(
    f: Polynomial, cfg: TestConfig, dprime: int, budget: int | None = None
) -> tuple[Fraction, Fraction, bool]:
    """Both sides of the robustness reduction, exactly.

    Left: the lucky probability at radius dprime.  Right: q^dprime times
    the two-multiplier acceptance probability at order d+2e.  Returns
    (left, right, left <= right).
    """
    pair_cfg = TestConfig(cfg.code, cfg.e, k=2)
    rhs = Fraction(cfg.code.q**dprime) * exact_acceptance_probability(
        f, pair_cfg, budget
    )
    lhs = lucky_probability(f, cfg, dprime, budget)
    return lhs, rhs, lhs <= rhs


# ---------------------------------------------------------------------------
# Affine-restriction test
# ---------------------------------------------------------------------------


def sample_affine_subspace(
    q: int, n: int, dim: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform (directions, offset) with the directions of full rank,
    by rejection; the acceptance event only depends on the subspace."""
    while True:
        dirs = rng.integers(0, q, size=(dim, n))
        if rank_mod(dirs, q) == dim:
            break
    offset = rng.integers(0, q, size=n)
    return dirs, offset


def akklr_test(f: Polynomial, code: CodeParams, rng: np.random.Generator) -> bool:
    """Accept iff f restricted to a random (d+1)-dimensional affine
    subspace has degree at most d."""
    q, n, d = code.q, code.n, code.d
    if d + 1 > n:
        raise ValueError(f"need d+1 <= n, got d={d}, n={n}")
    dirs, offset = sample_affine_subspace(q, n, d + 1, rng)
    restricted = restrict_to_affine(f, dirs, offset)
    return restricted.degree <= d


def akklr_exact_rejection_probability(
    f: Polynomial, code: CodeParams, budget: int | None = None
) -> Fraction:
    """Rejection probability over all full-rank parametrized subspaces.

    Every affine subspace of the given dimension is hit by the same number
    of (directions, offset) pairs, so the uniform average over pairs equals
    the average over subspaces.
    """
    q, n, d = code.q, code.n, code.d
    if d + 1 > n:
        raise ValueError(f"need d+1 <= n, got d={d}, n={n}")
    dim = d + 1
    total_dirs = q ** (dim * n)
    if total_dirs * q**n > get_budget(budget):
        raise InfeasibleInstanceError(
            total_dirs * q**n, get_budget(budget), "subspace enumeration"
        )
    ftab = f.evaluate_all().values
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    grid = next(coefficient_blocks(q, dim, block_size=q**dim))
    offsets = next(coefficient_blocks(q, n, block_size=q**n))
    interp = None
    rejected = 0
    total = 0
    for dir_row in coefficient_blocks(q, dim * n, block_size=1 << 12):
        for row in dir_row:
            dirs = row.reshape(dim, n)
            if rank_mod(dirs, q) != dim:
                continue
            base = grid @ dirs % q
            pts = (base[None, :, :] + offsets[:, None, :]) % q  # offsets x grid x n
            idx = pts @ powers
            values = ftab[idx]  # offsets x grid
            coeffs = batch_interpolate(q, dim, values)
            degs = batch_degrees(q, dim, coeffs)
            rejected += int(np.count_nonzero(degs > d))
            total += len(offsets)
    return Fraction(rejected, total)
