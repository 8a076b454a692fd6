"""Exact arithmetic in the ring of functions F_q^n -> F_q for prime q.

Functions are identified with polynomials of individual degree < q via the
relations X_i^q = X_i.  A polynomial is stored as a dense coefficient table
of length q**n indexed by the mixed-radix encoding of exponent vectors
(X_1 most significant); evaluation tables use the same encoding on points.
This keeps reduction, evaluation and enumeration branch-free at the cost of
refusing instances with q**n above a configurable cap.

All values are immutable after construction and every operation is a pure
function, so the module is safe to use from multiple threads.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DegenerateFormError,
    ParamsMismatchError,
    ZeroPolynomialError,
)

NEG_INF = float("-inf")

# Instances with q**n above this cap are refused (dense tables only).
DENSE_CAP = 1 << 24


def is_prime(q: int) -> bool:
    """Primality by trial division; adequate for the small moduli used here."""
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def ensure_prime(q: int) -> int:
    if not is_prime(q):
        raise ValueError(f"modulus must be prime, got {q}")
    return q


def _check_size(q: int, n: int) -> None:
    if n < 0:
        raise ValueError(f"need n >= 0, got {n}")
    if q**n > DENSE_CAP:
        raise ValueError(f"q**n = {q**n} exceeds the dense table cap {DENSE_CAP}")


@dataclass(frozen=True)
class FieldElement:
    """An element of F_q with the modulus carried alongside the value."""

    value: int
    q: int

    def __post_init__(self):
        ensure_prime(self.q)
        object.__setattr__(self, "value", self.value % self.q)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.q != self.q:
                raise ParamsMismatchError(f"moduli differ: {self.q} vs {other.q}")
            return other
        return FieldElement(int(other), self.q)

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement((self.value + other.value) % self.q, self.q)

    def __sub__(self, other):
        other = self._coerce(other)
        return FieldElement((self.value - other.value) % self.q, self.q)

    def __mul__(self, other):
        other = self._coerce(other)
        return FieldElement((self.value * other.value) % self.q, self.q)

    def __neg__(self):
        return FieldElement(-self.value % self.q, self.q)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return FieldElement(pow(self.value, self.q - 2, self.q), self.q)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.q})"


# ---------------------------------------------------------------------------
# Monomials
# ---------------------------------------------------------------------------


@functools.total_ordering
@dataclass(frozen=True)
class Monomial:
    """A reduced monomial: exponent vector with every entry in [0, q).

    Ordering is graded lexicographic: higher total degree wins, ties are
    broken by the exponent at the least index where the vectors differ.
    """

    q: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        ensure_prime(self.q)
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 or e >= self.q for e in exps):
            raise ValueError(f"exponents must lie in [0, {self.q}): {exps}")
        object.__setattr__(self, "exponents", exps)

    @property
    def n(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def sort_key(self) -> tuple:
        return (self.degree, self.exponents)

    def __lt__(self, other: "Monomial") -> bool:
        self._check(other)
        return self.sort_key() < other.sort_key()

    def _check(self, other: "Monomial") -> None:
        if not isinstance(other, Monomial):
            raise TypeError(f"expected Monomial, got {type(other)!r}")
        if self.q != other.q or self.n != other.n:
            raise ParamsMismatchError("monomials live over different (q, n)")

    def index(self) -> int:
        """Mixed-radix encoding, X_1 most significant."""
        idx = 0
        for e in self.exponents:
            idx = idx * self.q + e
        return idx

    @classmethod
    def from_index(cls, q: int, n: int, idx: int) -> "Monomial":
        exps = [0] * n
        for j in range(n - 1, -1, -1):
            exps[j] = idx % q
            idx //= q
        return cls(q, tuple(exps))

    @classmethod
    def one(cls, q: int, n: int) -> "Monomial":
        return cls(q, (0,) * n)

    def dominates(self, other: "Monomial") -> bool:
        self._check(other)
        return all(a >= b for a, b in zip(self.exponents, other.exponents))

    def is_disjoint(self, other: "Monomial") -> bool:
        """True iff the reduced and unreduced products agree."""
        self._check(other)
        return all(a + b < self.q for a, b in zip(self.exponents, other.exponents))

    def __mul__(self, other: "Monomial") -> "Monomial":
        """Reduced product: exponent sums folded back below q via X^q -> X."""
        self._check(other)
        exps = tuple(
            s if s < self.q else s - (self.q - 1)
            for s in (a + b for a, b in zip(self.exponents, other.exponents))
        )
        return Monomial(self.q, exps)

    def unreduced_exponents(self, other: "Monomial") -> tuple[int, ...]:
        self._check(other)
        return tuple(a + b for a, b in zip(self.exponents, other.exponents))

    def __str__(self) -> str:
        parts = [
            f"X{j+1}" + (f"^{e}" if e > 1 else "")
            for j, e in enumerate(self.exponents)
            if e
        ]
        return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class MonomialProduct:
    """Both products of a monomial pair plus the disjointness predicate."""

    unreduced_exponents: tuple[int, ...]
    reduced: Monomial
    disjoint: bool
    unreduced_valid: bool  # exponent sums all below q


def monomial_product(m1: Monomial, m2: Monomial) -> MonomialProduct:
    """Compute the unreduced and reduced products and whether they agree."""
    raw = m1.unreduced_exponents(m2)
    valid = all(e < m1.q for e in raw)
    return MonomialProduct(raw, m1 * m2, valid, valid)


def compare_graded_lex(m1: Monomial, m2: Monomial) -> int:
    """-1, 0 or 1 as m1 is below, equal to, or above m2 in graded lex."""
    k1, k2 = m1.sort_key(), m2.sort_key()
    return (k1 > k2) - (k1 < k2)


# ---------------------------------------------------------------------------
# Transform tables (cached per (q, n))
# ---------------------------------------------------------------------------


def _inverse_mod_matrix(mat: np.ndarray, q: int) -> np.ndarray:
    """Inverse of a square matrix over F_q by Gauss-Jordan elimination."""
    m = mat.shape[0]
    aug = np.concatenate([mat % q, np.eye(m, dtype=np.int64)], axis=1)
    for col in range(m):
        pivot = next((r for r in range(col, m) if aug[r, col] % q), None)
        if pivot is None:
            raise ValueError("matrix is singular mod q")
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        aug[col] = (aug[col] * pow(int(aug[col, col]), q - 2, q)) % q
        for r in range(m):
            if r != col and aug[r, col]:
                aug[r] = (aug[r] - aug[r, col] * aug[col]) % q
    return aug[:, m:]


def inverse_mod_matrix(mat: Sequence[Sequence[int]], q: int) -> np.ndarray:
    return _inverse_mod_matrix(np.asarray(mat, dtype=np.int64), q)


def rank_mod(mat: np.ndarray, q: int) -> int:
    """Rank of an integer matrix over F_q."""
    a = np.array(mat, dtype=np.int64) % q
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r, col]), None)
        if pivot is None:
            continue
        if pivot != rank:
            a[[rank, pivot]] = a[[pivot, rank]]
        a[rank] = (a[rank] * pow(int(a[rank, col]), q - 2, q)) % q
        for r in range(rows):
            if r != rank and a[r, col]:
                a[r] = (a[r] - a[r, col] * a[rank]) % q
        rank += 1
        if rank == rows:
            break
    return rank


@functools.lru_cache(maxsize=None)
def _vandermonde(q: int) -> np.ndarray:
    v = np.empty((q, q), dtype=np.int64)
    for x in range(q):
        for e in range(q):
            v[x, e] = pow(x, e, q) if e else 1
    return v


@functools.lru_cache(maxsize=None)
def _vandermonde_inv(q: int) -> np.ndarray:
    return _inverse_mod_matrix(_vandermonde(q), q)


@functools.lru_cache(maxsize=None)
def eval_matrix(q: int, n: int) -> np.ndarray:
    """Matrix M with M[point, monomial] = value of the monomial at the point."""
    _check_size(q, n)
    m = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        m = np.kron(m, _vandermonde(q)) % q
    m.flags.writeable = False
    return m


@functools.lru_cache(maxsize=None)
def interp_matrix(q: int, n: int) -> np.ndarray:
    _check_size(q, n)
    m = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        m = np.kron(m, _vandermonde_inv(q)) % q
    m.flags.writeable = False
    return m


@functools.lru_cache(maxsize=None)
def degree_table(q: int, n: int) -> np.ndarray:
    """degree_table(q, n)[idx] = total degree of the monomial at idx."""
    _check_size(q, n)
    deg = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        deg = (deg[:, None] + np.arange(q)[None, :]).ravel()
    deg.flags.writeable = False
    return deg


def monomial_indices_up_to_degree(q: int, n: int, d: int) -> np.ndarray:
    """Indices of all monomials of total degree <= d (empty for d < 0)."""
    if d < 0:
        return np.empty(0, dtype=np.int64)
    return np.flatnonzero(degree_table(q, n) <= d)


def _axis_transform(vec: np.ndarray, q: int, n: int, mat: np.ndarray) -> np.ndarray:
    """Apply a q x q matrix along every axis of a length-q**n vector.

    n applications of a q x q product: O(n * q * q**n) field operations,
    which is what keeps single transforms viable near the dense cap.
    """
    if n == 0:
        return np.array(vec, dtype=np.int64)
    if n == 1:
        return mat @ np.asarray(vec, dtype=np.int64) % q
    out = np.array(vec, dtype=np.int64)
    for axis in range(n):
        tensor = np.moveaxis(out.reshape((q,) * n), axis, 0)
        shape = tensor.shape
        tensor = (mat @ tensor.reshape(q, -1)) % q
        out = np.moveaxis(tensor.reshape(shape), 0, axis).reshape(-1)
    return out


def batch_evaluate(q: int, n: int, coeff_rows: np.ndarray) -> np.ndarray:
    """Evaluation tables (rows) for a matrix of coefficient rows."""
    return coeff_rows @ eval_matrix(q, n).T % q


def batch_interpolate(q: int, n: int, value_rows: np.ndarray) -> np.ndarray:
    return value_rows @ interp_matrix(q, n).T % q


def batch_degrees(q: int, n: int, coeff_rows: np.ndarray) -> np.ndarray:
    """Row-wise degrees; the zero row is reported as -1 (stands in for -inf)."""
    score = (coeff_rows != 0) * (degree_table(q, n) + 1)
    return score.max(axis=1) - 1


def coefficient_blocks(
    q: int, count: int, block_size: int = 1 << 14
) -> Iterator[np.ndarray]:
    """Yield all q**count coefficient vectors as row blocks, in counter order."""
    total = q**count
    powers = q ** np.arange(count - 1, -1, -1, dtype=np.int64) if count else None
    for start in range(0, total, block_size):
        idx = np.arange(start, min(start + block_size, total), dtype=np.int64)
        if count == 0:
            yield np.zeros((len(idx), 0), dtype=np.int64)
        else:
            yield (idx[:, None] // powers[None, :]) % q


# ---------------------------------------------------------------------------
# Polynomials and evaluation tables
# ---------------------------------------------------------------------------


class Polynomial:
    """Element of F_q[X_1..X_n]/(X_i^q - X_i) as a dense coefficient table."""

    __slots__ = ("q", "n", "coeffs")

    def __init__(self, q: int, n: int, coeffs=None):
        ensure_prime(q)
        _check_size(q, n)
        if coeffs is None:
            arr = np.zeros(q**n, dtype=np.int64)
        else:
            arr = np.asarray(coeffs, dtype=np.int64) % q
            if arr.shape != (q**n,):
                raise ValueError(f"coefficient table must have length {q**n}")
            arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, q: int, n: int) -> "Polynomial":
        return cls(q, n)

    @classmethod
    def constant(cls, q: int, n: int, c: int) -> "Polynomial":
        coeffs = np.zeros(q**n, dtype=np.int64)
        coeffs[0] = c % q
        return cls(q, n, coeffs)

    @classmethod
    def one(cls, q: int, n: int) -> "Polynomial":
        return cls.constant(q, n, 1)

    @classmethod
    def variable(cls, q: int, n: int, j: int) -> "Polynomial":
        """The polynomial X_{j+1} (0-based index j)."""
        if not 0 <= j < n:
            raise ValueError(f"variable index {j} out of range for n={n}")
        exps = [0] * n
        exps[j] = 1
        return cls.from_terms(q, n, {tuple(exps): 1})

    @classmethod
    def from_terms(cls, q: int, n: int, terms: dict) -> "Polynomial":
        """Build from {exponent tuple or Monomial: coefficient}."""
        coeffs = np.zeros(q**n, dtype=np.int64)
        for mon, c in terms.items():
            if isinstance(mon, Monomial):
                idx = mon.index()
            else:
                idx = Monomial(q, tuple(mon)).index()
            coeffs[idx] = (coeffs[idx] + c) % q
        return cls(q, n, coeffs)

    @classmethod
    def from_monomial(cls, m: Monomial) -> "Polynomial":
        return cls.from_terms(m.q, m.n, {m: 1})

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if self.q != other.q or self.n != other.n:
            raise ParamsMismatchError(
                f"(q={self.q}, n={self.n}) vs (q={other.q}, n={other.n})"
            )

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        return Polynomial(self.q, self.n, (self.coeffs + other.coeffs) % self.q)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        return Polynomial(self.q, self.n, (self.coeffs - other.coeffs) % self.q)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.q, self.n, (-self.coeffs) % self.q)

    def scale(self, c: int) -> "Polynomial":
        return Polynomial(self.q, self.n, (self.coeffs * (c % self.q)) % self.q)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return mul_reduced(self, other)

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative powers unsupported")
        out = Polynomial.one(self.q, self.n)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self.q == other.q
            and self.n == other.n
            and bool(np.array_equal(self.coeffs, other.coeffs))
        )

    def __hash__(self) -> int:
        return hash((self.q, self.n, self.coeffs.tobytes()))

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    # -- degree and terms ---------------------------------------------------

    @property
    def degree(self):
        """Total degree; the zero polynomial has degree -inf."""
        d = batch_degrees(self.q, self.n, self.coeffs[None, :])[0]
        return NEG_INF if d < 0 else int(d)

    def leading_monomial(self) -> Monomial:
        """Graded-lex-largest monomial with nonzero coefficient."""
        if self.is_zero():
            raise ZeroPolynomialError("the zero polynomial has no leading monomial")
        nz = np.flatnonzero(self.coeffs)
        degs = degree_table(self.q, self.n)[nz]
        top = nz[degs == degs.max()]
        # equal-degree monomials sort by index (X_1 most significant)
        return Monomial.from_index(self.q, self.n, int(top.max()))

    def terms(self) -> list[tuple[Monomial, int]]:
        """Nonzero terms in decreasing graded-lex order."""
        out = [
            (Monomial.from_index(self.q, self.n, int(i)), int(self.coeffs[i]))
            for i in np.flatnonzero(self.coeffs)
        ]
        out.sort(key=lambda t: t[0].sort_key(), reverse=True)
        return out

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, point: Sequence[int]) -> int:
        if len(point) != self.n:
            raise ValueError(f"point must have {self.n} coordinates")
        idx = 0
        for x in point:
            idx = idx * self.q + (int(x) % self.q)
        return int(self.evaluate_all().values[idx])

    def evaluate_all(self) -> "EvalTable":
        vals = _axis_transform(self.coeffs, self.q, self.n, _vandermonde(self.q))
        return EvalTable(self.q, self.n, vals)

    def restrict(self, ell: Sequence[int], alpha: int) -> "Polynomial":
        return restrict(self, ell, alpha)

    def __repr__(self) -> str:
        return f"Polynomial({poly_to_text(self)!r})"


class EvalTable:
    """Values of a function on all of F_q^n, points in mixed-radix order."""

    __slots__ = ("q", "n", "values")

    def __init__(self, q: int, n: int, values):
        ensure_prime(q)
        _check_size(q, n)
        arr = np.asarray(values, dtype=np.int64) % q
        if arr.shape != (q**n,):
            raise ValueError(f"table must have length {q**n}, got {arr.shape}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("EvalTable is immutable")

    def _check(self, other: "EvalTable") -> None:
        if self.q != other.q or self.n != other.n:
            raise ParamsMismatchError("tables live over different (q, n)")

    def pointwise_mul(self, other: "EvalTable") -> "EvalTable":
        self._check(other)
        return EvalTable(self.q, self.n, self.values * other.values % self.q)

    def interpolate(self) -> Polynomial:
        return interpolate(self)

    def support_size(self) -> int:
        return int(np.count_nonzero(self.values))

    def __eq__(self, other) -> bool:
        if not isinstance(other, EvalTable):
            return NotImplemented
        return (
            self.q == other.q
            and self.n == other.n
            and bool(np.array_equal(self.values, other.values))
        )

    def __hash__(self) -> int:
        return hash((self.q, self.n, self.values.tobytes()))


def evaluate_all(f: Polynomial) -> EvalTable:
    return f.evaluate_all()


def interpolate(t: EvalTable) -> Polynomial:
    """The unique reduced polynomial with the given evaluation table."""
    coeffs = _axis_transform(t.values, t.q, t.n, _vandermonde_inv(t.q))
    return Polynomial(t.q, t.n, coeffs)


def mul_reduced(f: Polynomial, g: Polynomial) -> Polynomial:
    """Product in the quotient ring: convolution with X^q -> X folding."""
    f._check(g)
    q, n = f.q, f.n
    fi = np.flatnonzero(f.coeffs)
    gi = np.flatnonzero(g.coeffs)
    if len(fi) == 0 or len(gi) == 0:
        return Polynomial.zero(q, n)
    # exponent digits for the nonzero monomials of each factor
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    fe = (fi[:, None] // powers[None, :]) % q
    ge = (gi[:, None] // powers[None, :]) % q
    sums = fe[:, None, :] + ge[None, :, :]
    sums = np.where(sums >= q, sums - (q - 1), sums)
    idx = (sums * powers).sum(axis=2).ravel()
    vals = (f.coeffs[fi][:, None] * g.coeffs[gi][None, :]).ravel()
    coeffs = np.zeros(q**n, dtype=np.int64)
    np.add.at(coeffs, idx, vals)
    return Polynomial(q, n, coeffs % q)


def restrict(f: Polynomial, ell: Sequence[int], alpha: int) -> Polynomial:
    """Restriction of f to the hyperplane {ell(x) = alpha} in n-1 variables.

    The coordinate change completes ell to a basis by pivoting on its first
    nonzero coordinate, so the result is deterministic.  The returned
    polynomial agrees with f on the hyperplane under that coordinate map.
    """
    q, n = f.q, f.n
    ell = [int(c) % q for c in ell]
    if len(ell) != n:
        raise ValueError(f"form must have {n} coefficients")
    if not any(ell):
        raise DegenerateFormError("restriction along the zero form")
    pivot = next(j for j, c in enumerate(ell) if c)
    rows = [[1 if i == j else 0 for i in range(n)] for j in range(n) if j != pivot]
    rows.append(ell)
    a_inv = inverse_mod_matrix(rows, q)
    return _restrict_by_map(f, a_inv, alpha)


def _restrict_by_map(f: Polynomial, a_inv: np.ndarray, alpha: int) -> Polynomial:
    """Interpolate y -> f(A^{-1}(y, alpha)) over the first n-1 coordinates."""
    q, n = f.q, f.n
    table = f.evaluate_all().values
    m = n - 1
    if m == 0:
        # restriction of a univariate function is the constant f(x0)
        x = a_inv @ np.array([alpha % q]) % q
        return Polynomial(q, 0, [table[int(x[0])]])
    grid = next(coefficient_blocks(q, m, block_size=q**m))
    ys = np.concatenate([grid, np.full((len(grid), 1), alpha % q)], axis=1)
    xs = ys @ a_inv.T % q
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    vals = table[xs @ powers]
    return interpolate(EvalTable(q, m, vals))


def restrict_to_affine(
    f: Polynomial, directions: Sequence[Sequence[int]], offset: Sequence[int]
) -> Polynomial:
    """Restriction of f to {offset + sum t_i v_i} as a polynomial in the t_i."""
    q, n = f.q, f.n
    dirs = np.asarray(directions, dtype=np.int64) % q
    off = np.asarray(offset, dtype=np.int64) % q
    m = dirs.shape[0]
    if dirs.shape != (m, n) or off.shape != (n,):
        raise ValueError("directions must be m x n and offset length n")
    table = f.evaluate_all().values
    grid = next(coefficient_blocks(q, m, block_size=q**m))
    xs = (off[None, :] + grid @ dirs) % q
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    vals = table[xs @ powers]
    return interpolate(EvalTable(q, m, vals))


def random_polynomial(
    q: int, n: int, e: int, rng: np.random.Generator
) -> Polynomial:
    """Uniform polynomial of degree <= e: iid uniform coefficients on
    every monomial of degree <= e, zero elsewhere."""
    if not 0 <= e <= n * (q - 1):
        raise ValueError(f"degree bound {e} outside [0, {n * (q - 1)}]")
    idx = monomial_indices_up_to_degree(q, n, e)
    coeffs = np.zeros(q**n, dtype=np.int64)
    coeffs[idx] = rng.integers(0, q, size=len(idx))
    return Polynomial(q, n, coeffs)


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(r"^X(\d+)(?:\^(\d+))?$")


def poly_to_text(f: Polynomial) -> str:
    """`q=<q> n=<n>: <c>*X<i>^<e>*... + ...` with terms in decreasing graded lex."""
    head = f"q={f.q} n={f.n}:"
    if f.is_zero():
        return f"{head} 0"
    parts = []
    for mon, c in f.terms():
        factors = [str(c)] + [
            f"X{j+1}" + (f"^{e}" if e > 1 else "")
            for j, e in enumerate(mon.exponents)
            if e
        ]
        parts.append("*".join(factors))
    return f"{head} " + " + ".join(parts)


def poly_from_text(text: str) -> Polynomial:
    """Parse the polynomial text format; terms may appear in any order."""
    m = re.match(r"\s*q\s*=\s*(\d+)\s+n\s*=\s*(\d+)\s*:\s*(.*)$", text.strip())
    if not m:
        raise ValueError(f"malformed polynomial header in {text!r}")
    q, n, body = int(m.group(1)), int(m.group(2)), m.group(3)
    terms: dict[tuple[int, ...], int] = {}
    if body.strip():
        for chunk in body.split("+"):
            chunk = chunk.strip()
            if not chunk:
                continue
            coeff = 1
            exps = [0] * n
            for token in (t.strip() for t in chunk.split("*")):
                tm = _TERM_RE.match(token)
                if tm:
                    j = int(tm.group(1))
                    if not 1 <= j <= n:
                        raise ValueError(f"variable X{j} out of range in {chunk!r}")
                    exps[j - 1] += int(tm.group(2) or 1)
                else:
                    coeff = coeff * int(token)
            if any(e >= q for e in exps):
                raise ValueError(f"exponent at or above q in term {chunk!r}")
            key = tuple(exps)
            terms[key] = (terms.get(key, 0) + coeff) % q
    return Polynomial.from_terms(q, n, terms)


def table_to_text(t: EvalTable) -> str:
    body = " ".join(str(int(v)) for v in t.values)
    return f"q={t.q} n={t.n}\n{body}\n"


def table_from_text(text: str) -> EvalTable:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    m = re.match(r"\s*q\s*=\s*(\d+)\s+n\s*=\s*(\d+)\s*$", lines[0])
    if not m:
        raise ValueError(f"malformed table header in {lines[0]!r}")
    q, n = int(m.group(1)), int(m.group(2))
    vals = [int(v) for ln in lines[1:] for v in ln.split()]
    if len(vals) != q**n:
        raise ValueError(f"expected {q**n} values, got {len(vals)}")
    return EvalTable(q, n, vals)


def all_polynomials(q: int, n: int, d: int | None = None) -> Iterator[Polynomial]:
    """Every polynomial of degree <= d (the whole ring when d is None)."""
    max_d = n * (q - 1) if d is None else d
    idx = monomial_indices_up_to_degree(q, n, max_d)
    for block in coefficient_blocks(q, len(idx)):
        for row in block:
            coeffs = np.zeros(q**n, dtype=np.int64)
            coeffs[idx] = row
            yield Polynomial(q, n, coeffs)
