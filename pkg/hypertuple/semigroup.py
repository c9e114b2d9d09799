"""
Dense additive subsemigroups of R^d and of Z_2^m x R^d.

Floating point numbers are all rational, so the "rationally independent"
reals produced here are surrogates: density claims are exact-real facts that
hypertuple only checks through finite-budget coverage experiments.

"""
import enum
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import sympy

from hypertuple.errors import InvalidInput
from hypertuple.numkit import DEFAULT_TOLERANCE, numerical_rank

#: Number of m0 values evaluated per vectorised chunk of the Kronecker scan.
KRONECKER_CHUNK = 4096

__all__ = [
    "AlphaScheme",
    "GroupElement",
    "IndependentReals",
    "KroneckerSolution",
    "SubgroupClassification",
    "SubgroupVerdict",
    "classify_subgroup",
    "completing_generator",
    "gf2_rank",
    "group_completing_generator",
    "independent_reals",
    "kronecker_approx",
    "kronecker_scan",
    "parse_alpha",
]

logger = logging.getLogger(__name__)


class AlphaScheme(enum.Enum):
    SQRT_PRIMES = "sqrt-primes"
    LOG_PRIMES = "log-primes"
    USER = "user"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower().replace("_", "-")
        for scheme in cls:
            if text == scheme.value:
                return scheme
        raise InvalidInput(f"unknown alpha scheme {value!r}", scheme=value)


@dataclass(frozen=True)
class IndependentReals:
    values: Tuple[float, ...]
    scheme: AlphaScheme

    @property
    def d(self):
        return len(self.values)

    @property
    def array(self):
        return np.array(self.values, dtype=np.float64)

    def to_json(self):
        return dict(scheme=self.scheme.value, d=self.d, values=list(self.values))


def independent_reals(d, scheme=AlphaScheme.SQRT_PRIMES, values=None):
    """
    Positive reals that are linearly independent over the rationals.

    Parameters
    ----------
    d : int
        How many values.
    scheme : AlphaScheme
        ``SQRT_PRIMES`` gives the square roots of the first ``d`` primes,
        ``LOG_PRIMES`` their natural logarithms, ``USER`` takes ``values``.
    values : sequence of float, optional
        The user supplied values.

    Returns
    -------
    IndependentReals

    """
    scheme = AlphaScheme.parse(scheme)
    if int(d) < 1:
        raise InvalidInput("d must be at least 1", d=d)
    d = int(d)
    if scheme is AlphaScheme.USER:
        if values is None:
            raise InvalidInput("USER scheme requires values")
        values = tuple(float(v) for v in values)
        if len(values) != d:
            raise InvalidInput("USER scheme needs exactly d values", d=d, count=len(values))
        if not all(np.isfinite(v) and v > 0 for v in values):
            raise InvalidInput("alpha values must be finite and strictly positive",
                               values=list(values))
    else:
        primes = np.array([int(sympy.prime(i)) for i in range(1, d + 1)], dtype=np.float64)
        transform = np.sqrt if scheme is AlphaScheme.SQRT_PRIMES else np.log
        values = tuple(float(v) for v in transform(primes))
    return IndependentReals(values, scheme)


def parse_alpha(text):
    """
    Parse ``"sqrt-primes:3"``, ``"log-primes:2"`` or ``"user:1.5,2.25"``.

    """
    scheme, sep, rest = str(text).partition(":")
    scheme = AlphaScheme.parse(scheme)
    if not sep or not rest.strip():
        raise InvalidInput(f"malformed alpha {text!r}", alpha=text)
    try:
        if scheme is AlphaScheme.USER:
            values = [float(v) for v in rest.split(",")]
            return independent_reals(len(values), scheme, values)
        return independent_reals(int(rest), scheme)
    except ValueError as error:
        if isinstance(error, InvalidInput):
            raise
        raise InvalidInput(f"malformed alpha {text!r}", alpha=text)


@dataclass(frozen=True)
class KroneckerSolution:
    """
    ``m[l] - m0 * alpha[l]`` approximating ``x[l]`` with sup-norm ``error``.

    ``found`` is False when no m0 within the scan reached ``eps``; the
    best-error candidate is then reported.

    """

    m0: int
    m: Tuple[int, ...]
    error: float
    found: bool

    def to_json(self):
        return dict(m0=self.m0, m=list(self.m), error=self.error, found=self.found)


def _candidates(alpha, x, m0):
    target = x[np.newaxis, :] + m0[:, np.newaxis] * alpha[np.newaxis, :]
    m = np.maximum(np.rint(target), 0.0)
    error = np.max(np.abs(m - m0[:, np.newaxis] * alpha[np.newaxis, :] - x[np.newaxis, :]),
                   axis=1)
    return m, error


def _prepare(alpha, x):
    alpha = alpha.array if isinstance(alpha, IndependentReals) else np.asarray(alpha, float)
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.shape != alpha.shape:
        raise InvalidInput("target dimension does not match alpha", d=alpha.size, x=x.size)
    return alpha, x


def kronecker_scan(alpha, x, m0_max):
    """
    The error of the rounded candidate for every ``m0 = 0..m0_max``.

    This is the exhaustive oracle behind :func:`kronecker_approx`.

    """
    alpha, x = _prepare(alpha, x)
    return _candidates(alpha, x, np.arange(int(m0_max) + 1, dtype=np.float64))[1]


def kronecker_approx(alpha, x, eps, m0_max):
    """
    Find ``m0, m >= 0`` with ``max_l |m[l] - m0 alpha[l] - x[l]| <= eps``.

    Scans ``m0 = 0..m0_max`` in vectorised chunks and rounds
    ``x + m0 alpha`` to the nearest integers clamped at 0.

    Parameters
    ----------
    alpha : IndependentReals or array_like
    x : array_like
        The target, one coordinate per alpha value.
    eps : float
        Accepted sup-norm error; ``eps = 0`` forces a full scan.
    m0_max : int
        Largest m0 tried.

    Returns
    -------
    KroneckerSolution
        The lowest-m0 hit, or the lowest-m0 minimum-error candidate with
        ``found=False``.

    """
    alpha, x = _prepare(alpha, x)
    if eps < 0:
        raise InvalidInput("eps must be nonnegative", eps=eps)
    if int(m0_max) < 0:
        raise InvalidInput("m0_max must be nonnegative", m0_max=m0_max)
    best = None
    for start in range(0, int(m0_max) + 1, KRONECKER_CHUNK):
        stop = min(start + KRONECKER_CHUNK, int(m0_max) + 1)
        m0 = np.arange(start, stop, dtype=np.float64)
        m, error = _candidates(alpha, x, m0)
        hits = np.flatnonzero(error <= eps)
        if hits.size:
            i = hits[0]
            return KroneckerSolution(int(m0[i]), tuple(int(v) for v in m[i]), float(error[i]),
                                     True)
        i = int(np.argmin(error))
        if best is None or error[i] < best.error:
            best = KroneckerSolution(int(m0[i]), tuple(int(v) for v in m[i]), float(error[i]),
                                     False)
    logger.debug(f"no Kronecker solution within eps={eps} up to m0={m0_max}, "
                 f"best error {best.error:.3g}")
    return best


@dataclass(frozen=True)
class GroupElement:
    """An element of Z_2^m in additive notation."""

    bits: Tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise InvalidInput("group element bits must be 0 or 1", bits=list(bits))
        object.__setattr__(self, "bits", bits)

    @property
    def m(self):
        return len(self.bits)

    @classmethod
    def identity(cls, m):
        return cls((0,) * m)

    @classmethod
    def unit(cls, m, i):
        return cls(tuple(int(j == i) for j in range(m)))

    def __add__(self, other):
        if self.m != other.m:
            raise InvalidInput("group elements of different rank", left=self.m, right=other.m)
        return GroupElement(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def as_int(self):
        return sum(bit << i for i, bit in enumerate(self.bits))

    def to_json(self):
        return list(self.bits)


def gf2_rank(rows: List[int], n_cols: int) -> int:
    """Rank over GF(2) of int-bitset rows via Gaussian elimination."""
    work = rows[:]
    rank = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, len(work)) if (work[r] >> col) & 1), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for r in range(len(work)):
            if r != rank and (work[r] >> col) & 1:
                work[r] ^= work[rank]
        rank += 1
        if rank == len(work):
            break
    return rank


def _basis_matrix(basis, tol):
    matrix = np.array([np.asarray(v, dtype=np.float64) for v in basis])
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidInput("basis must hold d vectors of length d",
                           shape=list(np.shape(matrix)))
    rank = numerical_rank(matrix, tol)
    if rank < matrix.shape[0]:
        raise InvalidInput("basis is rank deficient", rank=rank, d=matrix.shape[0])
    return matrix


def completing_generator(basis, alpha, tol=DEFAULT_TOLERANCE):
    """
    The vector ``x0 = -(alpha_1 x_1 + ... + alpha_d x_d)``.

    Together with ``basis`` it generates a dense additive subsemigroup of R^d.

    """
    matrix = _basis_matrix(basis, tol)
    alpha = alpha.array if isinstance(alpha, IndependentReals) else np.asarray(alpha, float)
    if alpha.shape != (matrix.shape[0],):
        raise InvalidInput("alpha dimension does not match the basis",
                           d=matrix.shape[0], alpha=alpha.size)
    return -(alpha @ matrix)


def group_completing_generator(basis, group_gens, alpha, tol=DEFAULT_TOLERANCE):
    """
    The extra generator ``(g0, x0)`` of a dense subsemigroup of Z_2^m x R^d.

    ``g0`` is the identity of Z_2^m and ``x0`` the completing vector of the
    basis; ``group_gens[i]`` is paired with ``basis[i]``.

    Raises
    ------
    InvalidInput
        If the basis is rank deficient or ``group_gens`` do not generate Z_2^m.

    """
    x0 = completing_generator(basis, alpha, tol)
    if len(group_gens) != len(basis):
        raise InvalidInput("one group element is needed per basis vector",
                           basis=len(basis), group=len(group_gens))
    ranks = {g.m for g in group_gens}
    if len(ranks) > 1:
        raise InvalidInput("group elements of different rank", ranks=sorted(ranks))
    m = ranks.pop() if ranks else 0
    rank = gf2_rank([g.as_int() for g in group_gens], m)
    if rank != m:
        raise InvalidInput("group elements do not generate Z_2^m", rank=rank, m=m)
    return GroupElement.identity(m), x0


class SubgroupVerdict(enum.Enum):
    PROPER_SUBSPACE = "PROPER_SUBSPACE"
    FULL_RANK_LATTICE = "FULL_RANK_LATTICE"
    OVERDETERMINED = "OVERDETERMINED"


@dataclass(frozen=True)
class SubgroupClassification:
    verdict: SubgroupVerdict
    span_rank: int
    generator_count: int
    dim: int

    def to_json(self):
        return dict(verdict=self.verdict.value, span_rank=self.span_rank,
                    generator_count=self.generator_count, dim=self.dim)


def classify_subgroup(generators, dim=None, tol=DEFAULT_TOLERANCE):
    """
    Classify the additive subgroup of R^d generated by ``generators``.

    A subgroup with at most ``d`` generators is nowhere dense: it either
    spans a proper subspace or is a discrete lattice.

    """
    vectors = [np.asarray(g, dtype=np.float64) for g in generators]
    if vectors:
        dim = vectors[0].size if dim is None else dim
        if any(v.shape != (dim,) for v in vectors):
            raise InvalidInput("generators must share the dimension", dim=dim)
    elif dim is None:
        raise InvalidInput("dim is required without generators")
    rank = numerical_rank(np.array(vectors), tol) if vectors else 0
    k = len(vectors)
    if rank < dim:
        verdict = SubgroupVerdict.PROPER_SUBSPACE
    elif k == dim:
        verdict = SubgroupVerdict.FULL_RANK_LATTICE
    else:
        verdict = SubgroupVerdict.OVERDETERMINED
    return SubgroupClassification(verdict, rank, k, dim)
