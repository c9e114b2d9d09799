"""
Orbit enumeration and empirical density checks.

Orbits are enumerated shell by shell: the shell of degree ``D`` holds every
exponent vector ``q`` with ``sum(q) == D`` in lexicographic order, and each
point is one matrix-vector product away from a point of the previous shell.
Density is judged by grid coverage of a box as the degree budget grows.

"""
import enum
import logging
from dataclasses import dataclass, field as dc_field
from typing import Optional, Tuple

import numpy as np

from hypertuple.algebra import (close_algebra, commutant, compute_characters, find_cyclic_vector,
                                same_span)
from hypertuple.construct import min_tuple_size, predicted_size, validate_tuple
from hypertuple.errors import HypertupleError, InvalidInput, SchemaError
from hypertuple.numkit import (DEFAULT_SEED, DEFAULT_TOLERANCE, FieldTag, Matrix, krylov_rank,
                               numerical_rank)

#: Default number of grid cells per box axis.
DEFAULT_GRID = 20

#: Default total-degree cap of the enumeration.
DEFAULT_MAX_DEGREE = 200

#: Default cap on the number of enumerated points.
DEFAULT_MAX_POINTS = 2_000_000

#: Default half width of the box used when none is given.
DEFAULT_BOX_HALF_WIDTH = 2.0

#: Coverage at or above which an orbit counts as dense evidence.
DEFAULT_DENSE_THRESHOLD = 0.8

#: Coverage at or below which a plateaued orbit counts as nowhere dense evidence.
DEFAULT_SPARSE_THRESHOLD = 0.5

#: Largest coverage gain over the last doubling for a plateau.
DEFAULT_PLATEAU_EPS = 0.01

#: Largest supported number of grid cells.
MAX_CELLS = 2 ** 32

#: Random vectors per operator in the Krylov cyclicity test.
KRYLOV_TRIALS = 8

#: Random commutant elements tested by default.
DEFAULT_COMMUTANT_SAMPLES = 200

#: Relative agreement of half-plane orbit heights with x2 * prod a_j^n_j.
HALFPLANE_CLOSED_FORM_TOL = 1e-10

__all__ = [
    "Box",
    "CommutantReport",
    "CoverageReport",
    "HalfplaneReport",
    "OrbitBudget",
    "OrbitShell",
    "Verdict",
    "VerdictThresholds",
    "VerifyReport",
    "coverage",
    "default_checkpoints",
    "density_verdict",
    "enumerate_orbit",
    "enumerate_semigroup",
    "f4_closed_form",
    "halfplane_check",
    "orbit_shells",
    "verify_non_cyclic_commutant",
    "verify_tuple",
]

logger = logging.getLogger(__name__)


#
# Budgets, boxes and shells
#


@dataclass(frozen=True)
class OrbitBudget:
    max_degree: int = DEFAULT_MAX_DEGREE
    max_points: int = DEFAULT_MAX_POINTS

    def __post_init__(self):
        for name in ("max_degree", "max_points"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise InvalidInput(f"{name} must be a positive integer", **{name: value})
            object.__setattr__(self, name, int(value))

    def doubled(self):
        return OrbitBudget(2 * self.max_degree, 2 * self.max_points)

    def to_json(self):
        return dict(max_degree=self.max_degree, max_points=self.max_points)


@dataclass(frozen=True, eq=False)
class Box:
    """
    An axis aligned box in real coordinates.

    Complex vectors use ``2n`` coordinates, real and imaginary parts
    interleaved.

    """

    field: FieldTag
    n: int
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        field = FieldTag.parse(self.field)
        dim = self.n if field is FieldTag.REAL else 2 * self.n
        lo = np.array(self.lo, dtype=np.float64).reshape(-1)
        hi = np.array(self.hi, dtype=np.float64).reshape(-1)
        if lo.shape != (dim,) or hi.shape != (dim,):
            raise InvalidInput(f"box bounds need {dim} coordinates", lo=lo.size, hi=hi.size)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) and np.all(lo < hi)):
            raise InvalidInput("box needs finite bounds with lo < hi", lo=lo, hi=hi)
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return self.lo.size

    @classmethod
    def cube(cls, field, n, lo=-DEFAULT_BOX_HALF_WIDTH, hi=DEFAULT_BOX_HALF_WIDTH):
        field = FieldTag.parse(field)
        dim = n if field is FieldTag.REAL else 2 * n
        return cls(field, n, np.full(dim, lo), np.full(dim, hi))

    @classmethod
    def parse(cls, text, field, n):
        """
        Parse ``lo1,hi1,lo2,hi2,...``; a single ``lo,hi`` pair applies to
        every axis.

        """
        try:
            values = [float(v) for v in str(text).split(",") if v.strip()]
        except ValueError:
            raise InvalidInput(f"malformed box {text!r}")
        if len(values) % 2:
            raise InvalidInput("box needs lo,hi pairs", box=text)
        field = FieldTag.parse(field)
        if len(values) == 2:
            return cls.cube(field, n, values[0], values[1])
        return cls(field, n, values[0::2], values[1::2])

    def coordinates(self, points):
        """Real coordinates of a ``(N, n)`` array of points."""
        points = np.asarray(points)
        if points.ndim != 2 or points.shape[1] != self.n:
            raise InvalidInput("points do not match the box dimension", n=self.n,
                               shape=list(points.shape))
        if self.field is FieldTag.REAL:
            return np.real(points).astype(np.float64)
        points = points.astype(np.complex128)
        return np.stack([points.real, points.imag], axis=2).reshape(len(points), -1)

    def to_json(self):
        return dict(field=self.field.value, n=self.n, lo=self.lo.tolist(), hi=self.hi.tolist())

    @classmethod
    def from_json(cls, data, path="$"):
        if not isinstance(data, dict) or not {"field", "n", "lo", "hi"} <= set(data):
            raise SchemaError("box must hold field, n, lo and hi", path=path)
        try:
            return cls(data["field"], data["n"], data["lo"], data["hi"])
        except (InvalidInput, TypeError, ValueError) as error:
            raise SchemaError(str(error), path=path)


@dataclass(frozen=True, eq=False)
class OrbitShell:
    """All orbit points of one total degree."""

    degree: int
    exponents: np.ndarray
    points: np.ndarray

    @property
    def finite(self):
        return np.all(np.isfinite(self.points), axis=1)

    def __len__(self):
        return len(self.exponents)

    def __iter__(self):
        for q, point in zip(self.exponents, self.points):
            yield tuple(int(k) for k in q), point


def _row_positions(table, rows):
    """Index in ``table`` (unique rows) of each of ``rows``, all present in ``table``."""
    _, inverse = np.unique(np.concatenate([table, rows]), axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    position = np.empty(len(table), dtype=np.int64)
    position[inverse[:len(table)]] = np.arange(len(table))
    return position[inverse[len(table):]]


def _shells(origin, count, budget, step, score):
    """
    Total-degree enumeration over ``count`` generators.

    ``step(j, points)`` applies generator ``j`` to a batch of points and
    ``score(points)`` ranks candidate parents (lowest wins). Exponent rows
    are sorted lexicographically within a shell.

    """
    max_degree, max_points = budget.max_degree, budget.max_points
    exponents = np.zeros((1, count), dtype=np.int64)
    points = origin[np.newaxis, :]
    emitted, degree = 0, 0
    while True:
        take = min(len(exponents), max_points - emitted)
        yield OrbitShell(degree, exponents[:take], points[:take])
        emitted += take
        if take < len(exponents):
            logger.debug(f"max_points reached inside shell {degree}: kept {take} of "
                         f"{len(exponents)} points")
            return
        if emitted >= max_points or degree >= max_degree or count == 0:
            return

        eye = np.eye(count, dtype=np.int64)
        candidates = (exponents[:, np.newaxis, :] + eye[np.newaxis]).reshape(-1, count)
        candidates = np.unique(candidates, axis=0)
        parent_score = score(points)
        scores = np.full((len(candidates), count), np.inf)
        parents = np.zeros((len(candidates), count), dtype=np.int64)
        for j in range(count):
            valid = candidates[:, j] > 0
            # shell ``degree`` is complete, so every parent is found
            index = _row_positions(exponents, candidates[valid] - eye[j])
            parents[valid, j] = index
            scores[valid, j] = parent_score[index]
        choice = np.argmin(scores, axis=1)
        children = np.empty((len(candidates), points.shape[1]), dtype=points.dtype)
        with np.errstate(all="ignore"):
            for j in range(count):
                rows = np.flatnonzero(choice == j)
                if rows.size:
                    children[rows] = step(j, points[parents[rows, j]])
        exponents, points = candidates, children
        degree += 1


def _log_norm_score(points):
    with np.errstate(all="ignore"):
        score = np.abs(np.log(np.linalg.norm(points, axis=1)))
    return np.where(np.isfinite(score), score, 1e308)


def _orbit_arrays(spec, x):
    x = np.asarray(x)
    if x.shape != (spec.n,):
        raise InvalidInput("starting vector does not match the tuple dimension", n=spec.n,
                           shape=list(x.shape))
    if not np.all(np.isfinite(x)):
        raise InvalidInput("starting vector must be finite")
    if spec.field is FieldTag.REAL:
        if np.any(np.imag(x)):
            raise InvalidInput("complex starting vector for a real tuple")
        return np.real(x).astype(np.float64), [op.array.T.copy() for op in spec.operators]
    return x.astype(np.complex128), [op.array.T.copy() for op in spec.operators]


def orbit_shells(spec, x, budget=OrbitBudget()):
    """
    The orbit of ``x`` under the tuple, batched in shells of equal degree.

    Each point is computed from the predecessor (one exponent lower) whose
    norm is closest to 1; non-finite points are kept and flagged by
    :attr:`OrbitShell.finite`.

    Yields
    ------
    OrbitShell

    """
    origin, transposed = _orbit_arrays(spec, x)
    return _shells(origin, len(transposed), budget,
                   lambda j, points: points @ transposed[j], _log_norm_score)


def enumerate_orbit(spec, x, budget=OrbitBudget()):
    """
    The orbit of ``x`` as a stream of ``(exponents, point)`` pairs, by
    total degree and lexicographically within a degree.

    """
    for shell in orbit_shells(spec, x, budget):
        yield from shell


def enumerate_semigroup(generators, budget=OrbitBudget(), origin=None):
    """
    The additive semigroup ``{sum_j q_j g_j : q_j >= 0}`` of vectors in
    ``R^d``, shell by shell.

    """
    vectors = np.array([np.asarray(g, dtype=np.float64).reshape(-1) for g in generators])
    if vectors.ndim != 2 or len(vectors) == 0:
        raise InvalidInput("at least one generator vector is needed")
    start = np.zeros(vectors.shape[1]) if origin is None else np.asarray(origin, np.float64)
    return _shells(start, len(vectors), budget,
                   lambda j, points: points + vectors[j], lambda points: np.zeros(len(points)))


#
# Coverage and verdicts
#


class Verdict(enum.Enum):
    DENSE_EVIDENCE = "DENSE_EVIDENCE"
    NOWHERE_DENSE_EVIDENCE = "NOWHERE_DENSE_EVIDENCE"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class VerdictThresholds:
    dense: float = DEFAULT_DENSE_THRESHOLD
    sparse: float = DEFAULT_SPARSE_THRESHOLD
    plateau: float = DEFAULT_PLATEAU_EPS

    def __post_init__(self):
        for name in ("dense", "sparse", "plateau"):
            value = float(getattr(self, name))
            if not 0 <= value <= 1:
                raise InvalidInput(f"{name} threshold must lie in [0, 1]", **{name: value})
            object.__setattr__(self, name, value)

    def to_json(self):
        return dict(dense_threshold=self.dense, sparse_threshold=self.sparse,
                    plateau_eps=self.plateau)


@dataclass(frozen=True, eq=False)
class CoverageReport:
    """
    Grid coverage of a box by an orbit, at increasing degree checkpoints.

    """

    grid_per_axis: int
    budget_degrees: Tuple[int, ...]
    coverage: Tuple[float, ...]
    points_total: int
    points_in_box: int
    nonfinite: int
    verdict: Verdict
    box: Box
    thresholds: VerdictThresholds = VerdictThresholds()
    occupancy: Optional[np.ndarray] = dc_field(default=None, repr=False)

    @property
    def cells(self):
        return self.grid_per_axis ** self.box.dim

    @property
    def final(self):
        return self.coverage[-1] if self.coverage else 0.0

    def occupancy_image(self):
        """
        The occupied cells as a 2-D ``uint8`` image (255 for a hit).

        The first half of the axes (rounded up) index rows.

        """
        if self.occupancy is None:
            raise InvalidInput("report carries no occupancy bitset")
        g, dim = self.grid_per_axis, self.box.dim
        flat = np.unpackbits(self.occupancy, bitorder="little")[:self.cells]
        shape = (g ** ((dim + 1) // 2), g ** (dim // 2))
        return (flat.reshape(shape) * 255).astype(np.uint8)

    def to_json(self):
        result = dict(
            grid_per_axis=self.grid_per_axis,
            cells=self.cells,
            budget_degrees=list(self.budget_degrees),
            coverage=list(self.coverage),
            points_total=self.points_total,
            points_in_box=self.points_in_box,
            nonfinite=self.nonfinite,
            verdict=self.verdict.value,
            box=self.box.to_json(),
        )
        result.update(self.thresholds.to_json())
        return result


def default_checkpoints(max_degree):
    """Checkpoints at 1/8, 1/4, 1/2 and all of ``max_degree``."""
    return sorted({d for d in (max_degree >> 3, max_degree >> 2, max_degree >> 1, max_degree)
                   if d > 0} or {max_degree})


def _as_shells(stream):
    pending, pending_degree = [], None

    def flush():
        exponents = np.array([q for q, _ in pending], dtype=np.int64)
        points = np.array([np.asarray(p).reshape(-1) for _, p in pending])
        return OrbitShell(pending_degree, exponents, points)

    for item in stream:
        if isinstance(item, OrbitShell):
            if pending:
                yield flush()
                pending = []
            yield item
            continue
        q, point = item
        degree = int(sum(q))
        if pending and degree != pending_degree:
            yield flush()
            pending = []
        pending_degree = degree
        pending.append((tuple(q), point))
    if pending:
        yield flush()


def coverage(points, box, grid_per_axis=DEFAULT_GRID, checkpoints=None,
             thresholds=VerdictThresholds()):
    """
    Fraction of grid cells of ``box`` hit by the orbit up to each checkpoint.

    Parameters
    ----------
    points : iterable
        :class:`OrbitShell` batches or ``(exponents, point)`` pairs in
        nondecreasing degree.
    box : Box
    grid_per_axis : int
        Cells per axis (at least 2).
    checkpoints : sequence of int, optional
        Degrees at which coverage is recorded; the final degree when omitted.
    thresholds : VerdictThresholds

    Returns
    -------
    CoverageReport

    Raises
    ------
    InvalidInput
        For fewer than 2 cells per axis or more than ``2**32`` cells.

    """
    if isinstance(grid_per_axis, bool) or not isinstance(grid_per_axis, (int, np.integer)) \
            or grid_per_axis < 2:
        raise InvalidInput("grid_per_axis must be an integer >= 2", grid=grid_per_axis)
    g = int(grid_per_axis)
    cells = g ** box.dim
    if cells > MAX_CELLS:
        raise InvalidInput("too many grid cells; choose a coarser grid", cells=cells)
    bits = np.zeros((cells + 7) // 8, dtype=np.uint8)
    strides = g ** np.arange(box.dim - 1, -1, -1, dtype=np.int64)
    width = box.hi - box.lo

    marks = None if checkpoints is None else sorted({int(c) for c in checkpoints})
    values, index = [], 0
    hit = total = in_box = nonfinite = 0
    last_degree = previous = -1
    for shell in _as_shells(points):
        if shell.degree < previous:
            raise InvalidInput("orbit stream is not ordered by degree")
        previous = shell.degree
        while marks is not None and index < len(marks) and shell.degree > marks[index]:
            values.append(hit / cells)
            index += 1
        total += len(shell)
        last_degree = shell.degree
        if not len(shell):
            continue
        coords = box.coordinates(shell.points)
        finite = np.all(np.isfinite(coords), axis=1)
        nonfinite += int(np.count_nonzero(~finite))
        coords = coords[finite]
        inside = np.all((coords >= box.lo) & (coords <= box.hi), axis=1)
        coords = coords[inside]
        in_box += len(coords)
        if not len(coords):
            continue
        cell = np.floor((coords - box.lo) / width * g).astype(np.int64)
        cell = np.clip(cell, 0, g - 1) @ strides
        cell = np.unique(cell)
        fresh = ((bits[cell >> 3] >> (cell & 7).astype(np.uint8)) & 1) == 0
        hit += int(np.count_nonzero(fresh))
        np.bitwise_or.at(bits, cell >> 3, (1 << (cell & 7)).astype(np.uint8))

    if marks is None:
        marks = [max(last_degree, 0)]
    while index < len(marks):
        values.append(hit / cells)
        index += 1
    verdict = density_verdict(values, thresholds.dense, thresholds.sparse, thresholds.plateau)
    return CoverageReport(g, tuple(marks), tuple(values), total, in_box, nonfinite, verdict,
                          box, thresholds, bits)


def density_verdict(report, dense_threshold=DEFAULT_DENSE_THRESHOLD,
                    sparse_threshold=DEFAULT_SPARSE_THRESHOLD, plateau_eps=DEFAULT_PLATEAU_EPS):
    """
    Classify a coverage curve.

    Dense evidence when the final coverage reaches ``dense_threshold``;
    nowhere dense evidence when it stays at or below ``sparse_threshold``
    and the last checkpoint gained at most ``plateau_eps``; inconclusive
    otherwise.

    """
    values = report.coverage if isinstance(report, CoverageReport) else report
    values = [float(v) for v in values]
    if not values:
        raise InvalidInput("coverage curve is empty")
    final = values[-1]
    gain = final - values[-2] if len(values) > 1 else final
    if final >= dense_threshold:
        return Verdict.DENSE_EVIDENCE
    if final <= sparse_threshold and gain <= plateau_eps:
        return Verdict.NOWHERE_DENSE_EVIDENCE
    return Verdict.INCONCLUSIVE


#
# F4 and half-planes
#


def _upper_triangular_pairs(spec):
    if spec.n != 2 or spec.field is not FieldTag.REAL:
        raise InvalidInput("half-plane checks need a real tuple on R^2")
    pairs = []
    for index, op in enumerate(spec.operators):
        array = op.array
        if array[1, 0] != 0 or array[0, 0] != array[1, 1] or array[0, 0] <= 0:
            raise InvalidInput("operator is not of the form [[a, b], [0, a]] with a > 0",
                               index=index)
        pairs.append((array[0, 0], array[0, 1]))
    return np.array(pairs)


def f4_closed_form(spec, x, exponents):
    """
    Orbit points of ``[[a_j, b_j], [0, a_j]]`` tuples in closed form:
    ``prod a_j^n_j * (x1 + x2 sum_j n_j b_j / a_j, x2)``.

    """
    pairs = _upper_triangular_pairs(spec)
    exponents = np.atleast_2d(np.asarray(exponents, dtype=np.float64))
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(all="ignore"):
        scale = np.exp(exponents @ np.log(pairs[:, 0]))
        shear = exponents @ (pairs[:, 1] / pairs[:, 0])
        return np.column_stack([scale * (x[0] + x[1] * shear), scale * x[1]])


@dataclass(frozen=True)
class HalfplaneReport:
    confined: bool
    sign_violations: int
    axis_preserved: bool
    max_relative_error: float
    points: int
    closed_form_violations: int = 0
    closed_form_tol: float = HALFPLANE_CLOSED_FORM_TOL

    @property
    def closed_form_ok(self):
        return self.closed_form_violations == 0

    def to_json(self):
        return dict(confined=self.confined, sign_violations=self.sign_violations,
                    axis_preserved=self.axis_preserved,
                    max_relative_error=self.max_relative_error, points=self.points,
                    closed_form_violations=self.closed_form_violations,
                    closed_form_tol=self.closed_form_tol)


def halfplane_check(spec, x, budget=OrbitBudget(), closed_form=None,
                    closed_form_tol=HALFPLANE_CLOSED_FORM_TOL):
    """
    Whether the orbit stays in the half-plane given by the sign of ``x[1]``.

    Also compares the second coordinate with ``closed_form(exponents)``,
    by default ``x2 * prod a_j^n_j``; points off by more than
    ``closed_form_tol`` relative are counted in ``closed_form_violations``.
    With ``x2 == 0`` the orbit stays on the axis and is never confined to an
    open half-plane.

    """
    pairs = _upper_triangular_pairs(spec)
    x = np.asarray(x, dtype=np.float64)
    if closed_form is None:
        def closed_form(exponents):
            return x[1] * np.prod(pairs[:, 0] ** exponents, axis=1)
    sign = np.sign(x[1])
    violations = mismatches = count = 0
    axis = True
    worst = 0.0
    for shell in orbit_shells(spec, x, budget):
        finite = shell.finite
        points = shell.points[finite]
        count += len(points)
        second = points[:, 1]
        if sign == 0:
            axis = axis and bool(np.all(second == 0))
            continue
        violations += int(np.count_nonzero(np.sign(second) != sign))
        with np.errstate(all="ignore"):
            expected = np.asarray(closed_form(shell.exponents[finite]), dtype=np.float64)
            error = np.abs(second - expected) / np.abs(expected)
        error = error[np.isfinite(error)]
        mismatches += int(np.count_nonzero(error > closed_form_tol))
        if error.size:
            worst = max(worst, float(error.max()))
    confined = sign != 0 and violations == 0
    return HalfplaneReport(bool(confined), violations, axis if sign == 0 else False, worst,
                           count, mismatches, closed_form_tol)


#
# Commutant
#


@dataclass(frozen=True)
class CommutantReport:
    all_non_cyclic: bool
    max_krylov_rank: int
    commutant_dim: int
    commutant_equals_algebra: bool
    max_shifted_rank: int
    certified: bool
    trials: int

    def to_json(self):
        return dict(all_non_cyclic=self.all_non_cyclic, max_krylov_rank=self.max_krylov_rank,
                    commutant_dim=self.commutant_dim,
                    commutant_equals_algebra=self.commutant_equals_algebra,
                    max_shifted_rank=self.max_shifted_rank, certified=self.certified,
                    trials=self.trials)


def verify_non_cyclic_commutant(alg, samples=DEFAULT_COMMUTANT_SAMPLES, seed=DEFAULT_SEED,
                                tol=DEFAULT_TOLERANCE):
    """
    Test every commutant basis element and ``samples`` random combinations
    for cyclicity.

    Each operator ``S`` gets :data:`KRYLOV_TRIALS` random Krylov sequences.
    The structural certificate is ``rank(S - (tr S / n) I) <= n - 2`` for
    every tested ``S``, which rules out cyclicity on ``C^n``.

    """
    n = alg.n
    basis = commutant(alg, tol)
    rng = np.random.default_rng(seed)
    complex_field = alg.field is FieldTag.COMPLEX
    stack = np.array([b.entries for b in basis])

    def draw(size):
        values = rng.uniform(-1, 1, size)
        return values + 1j * rng.uniform(-1, 1, size) if complex_field else values

    operators = [b.entries for b in basis]
    operators += [np.tensordot(draw(len(basis)), stack, axes=1) for _ in range(samples)]
    max_rank = shifted = 0
    eye = np.eye(n)
    for op in operators:
        for _ in range(KRYLOV_TRIALS):
            vector = draw(n)
            max_rank = max(max_rank, krylov_rank(Matrix(alg.field, op), vector, tol))
        shifted = max(shifted, numerical_rank(op - np.trace(op) / n * eye, tol))
    return CommutantReport(
        all_non_cyclic=max_rank < n,
        max_krylov_rank=int(max_rank),
        commutant_dim=len(basis),
        commutant_equals_algebra=bool(same_span(basis, alg.basis, tol)),
        max_shifted_rank=int(shifted),
        certified=shifted <= n - 2,
        trials=len(operators) * KRYLOV_TRIALS,
    )


#
# Full pipeline
#


@dataclass(frozen=True, eq=False)
class VerifyReport:
    validation: dict
    algebra: dict
    predicted_size: Optional[int]
    minimal_size: int
    coverage: CoverageReport
    x: np.ndarray
    dropped: Optional[int] = None
    dropped_coverage: Optional[CoverageReport] = None

    @property
    def verdict(self):
        return self.coverage.verdict

    def to_json(self):
        result = dict(
            validation=self.validation,
            algebra=self.algebra,
            tuple_size=self.algebra.get("tuple_size"),
            predicted_size=self.predicted_size,
            minimal_size=self.minimal_size,
            x=[[float(v.real), float(v.imag)] for v in np.asarray(self.x, complex)],
            coverage=self.coverage.to_json(),
            verdict=self.verdict.value,
        )
        if self.dropped is not None:
            result["dropped"] = self.dropped
            result["dropped_coverage"] = self.dropped_coverage.to_json()
            result["dropped_verdict"] = self.dropped_coverage.verdict.value
        return result


def verify_tuple(spec, x=None, budget=OrbitBudget(), box=None, grid=DEFAULT_GRID, drop=None,
                 checkpoints=None, thresholds=VerdictThresholds(), tol=DEFAULT_TOLERANCE,
                 seed=DEFAULT_SEED):
    """
    Validate a tuple, analyse its algebra and measure orbit coverage.

    Parameters
    ----------
    spec : TupleSpec
    x : array_like, optional
        Starting vector; defaults to a cyclic vector of the tuple's algebra.
    budget : OrbitBudget
    box : Box, optional
        Defaults to the cube ``[-2, 2]``.
    grid : int
    drop : int, optional
        Also measure the tuple without this operator, with a doubled budget.
    checkpoints : sequence of int, optional
        Defaults to :func:`default_checkpoints` of the budget's degree.

    Returns
    -------
    VerifyReport

    """
    validation = validate_tuple(spec, tol)
    alg = close_algebra(spec.operators, tol)
    info = dict(dim=alg.dim, n=alg.n, field=alg.field.value, tuple_size=len(spec))
    predicted = None
    cyclic = find_cyclic_vector(alg, seed=seed, tol=tol)
    info["cyclic"] = cyclic is not None
    try:
        table = compute_characters(alg, tol, seed)
        info.update(table.counts())
        if cyclic is not None and alg.dim == alg.n:
            predicted = predicted_size(alg.field, alg.n, table)
    except HypertupleError as error:
        logger.debug(f"character analysis failed: {error}")
        info["characters_error"] = error.to_dict()
    validation = validation.to_json()
    validation["membership_residual"] = max(alg.coordinates(op)[1] for op in spec.operators)

    if x is None:
        x = cyclic if cyclic is not None else np.ones(spec.n)
        if spec.field is FieldTag.REAL:
            x = np.real(x)
    box = Box.cube(spec.field, spec.n) if box is None else box
    marks = default_checkpoints(budget.max_degree) if checkpoints is None else checkpoints
    logger.debug(f"verify: size {len(spec)}, algebra dim {alg.dim}, max_degree "
                 f"{budget.max_degree}")
    report = coverage(orbit_shells(spec, x, budget), box, grid, marks, thresholds)

    dropped = None
    if drop is not None:
        doubled = budget.doubled()
        marks = [2 * m for m in marks]
        dropped = coverage(orbit_shells(spec.drop(drop), x, doubled), box, grid, marks,
                           thresholds)
    return VerifyReport(validation, info, predicted, min_tuple_size(spec.field, spec.n), report,
                        np.asarray(x), drop, dropped)
