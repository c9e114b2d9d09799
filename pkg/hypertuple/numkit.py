"""
Dense small-matrix kernel over the real and complex fields.

Every operator, algebra element and idempotent in hypertuple is carried by
a :class:`Matrix`. Entries are always stored as ``complex128``; the
:class:`FieldTag` is a constraint (a REAL matrix has exactly zero imaginary
parts), not a separate representation.

"""
import enum
import warnings
from dataclasses import dataclass, field as dc_field, replace

import numpy as np
import scipy.linalg
from packaging.version import InvalidVersion, Version

from hypertuple.errors import InvalidInput, NumericalFailure, SchemaError, SingularMatrix

#: Default entrywise comparison tolerance.
DEFAULT_EQ_TOL = 1e-9

#: Default singular-value / pivot threshold (relative).
DEFAULT_RANK_TOL = 1e-8

#: Default eigenvalue clustering radius.
DEFAULT_CLUSTER_TOL = 1e-6

#: Largest supported ambient dimension.
MAX_DIMENSION = 64

#: Seed used by every randomised routine unless one is given explicitly.
DEFAULT_SEED = 42

#: Version written into every JSON artifact; readers accept the same major version.
SCHEMA_VERSION = "1.0"

__all__ = [
    "DEFAULT_CLUSTER_TOL",
    "DEFAULT_EQ_TOL",
    "DEFAULT_RANK_TOL",
    "DEFAULT_SEED",
    "DEFAULT_TOLERANCE",
    "MAX_DIMENSION",
    "SCHEMA_VERSION",
    "FieldTag",
    "Matrix",
    "Tolerance",
    "check_schema_version",
    "commutator_norm",
    "eigenvalues",
    "is_commuting",
    "krylov_rank",
    "mat_inverse",
    "mat_mul",
    "max_norm",
    "nullspace_basis",
    "numerical_rank",
    "realify",
    "vector_from_json",
    "vector_to_json",
]


class FieldTag(enum.Enum):
    """The scalar field of a matrix or algebra."""

    REAL = "R"
    COMPLEX = "C"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        text = str(value).strip().upper()
        for tag in cls:
            if text in (tag.value, tag.name):
                return tag
        raise InvalidInput(f"unknown field {value!r}, expected 'R' or 'C'", field=value)

    @property
    def dtype(self):
        return np.float64 if self is FieldTag.REAL else np.complex128


@dataclass(frozen=True)
class Tolerance:
    """
    Numerical tolerances used throughout the package.

    Parameters
    ----------
    eq_tol : float
        Entrywise comparison tolerance.
    rank_tol : float
        Relative singular-value and pivot threshold.
    cluster_tol : float
        Eigenvalue clustering radius.

    """

    eq_tol: float = DEFAULT_EQ_TOL
    rank_tol: float = DEFAULT_RANK_TOL
    cluster_tol: float = DEFAULT_CLUSTER_TOL

    def __post_init__(self):
        for name in ("eq_tol", "rank_tol", "cluster_tol"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidInput(f"tolerance {name} must be strictly positive", value=value)

    @classmethod
    def parse(cls, text, base=None):
        """
        Build a tolerance from ``"eq=1e-9,rank=1e-8,cluster=1e-6"``.

        Unnamed keys keep the value of ``base`` (or the defaults).

        """
        base = DEFAULT_TOLERANCE if base is None else base
        if text is None or not str(text).strip():
            return base
        keys = {"eq": "eq_tol", "rank": "rank_tol", "cluster": "cluster_tol"}
        overrides = {}
        for item in str(text).split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in keys:
                raise InvalidInput(f"malformed tolerance item {item!r}", tol=text)
            try:
                overrides[keys[key]] = float(value)
            except ValueError:
                raise InvalidInput(f"malformed tolerance value {value!r}", tol=text)
        return replace(base, **overrides)

    def to_json(self):
        return dict(eq_tol=self.eq_tol, rank_tol=self.rank_tol, cluster_tol=self.cluster_tol)


#: The default tolerance instance.
DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True, eq=False)
class Matrix:
    """
    A dense square matrix with a field tag.

    The ``entries`` are a read-only ``complex128`` array.

    """

    field: FieldTag
    entries: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        tag = FieldTag.parse(self.field)
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise InvalidInput("matrix entries must be a non-empty square array",
                               shape=list(entries.shape))
        if not np.all(np.isfinite(entries)):
            raise InvalidInput("matrix entries must be finite")
        if tag is FieldTag.REAL and np.any(entries.imag != 0):
            raise InvalidInput("REAL matrix with non-zero imaginary part",
                               max_imag=float(np.max(np.abs(entries.imag))))
        entries.setflags(write=False)
        object.__setattr__(self, "field", tag)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self):
        return self.entries.shape[0]

    @property
    def array(self):
        """A writable copy, real valued for REAL matrices."""
        if self.field is FieldTag.REAL:
            return self.entries.real.copy()
        return self.entries.copy()

    @classmethod
    def from_array(cls, array, field=None):
        """
        Wrap ``array``; the field is inferred when not given.

        """
        array = np.asarray(array)
        if field is None:
            real = np.isrealobj(array) or not np.any(np.asarray(array).imag)
            field = FieldTag.REAL if real else FieldTag.COMPLEX
        return cls(FieldTag.parse(field), array)

    @classmethod
    def identity(cls, n, field=FieldTag.COMPLEX):
        return cls(FieldTag.parse(field), np.eye(n))

    @classmethod
    def zeros(cls, n, field=FieldTag.COMPLEX):
        return cls(FieldTag.parse(field), np.zeros((n, n)))

    def astype(self, field):
        """The same matrix carried by another field (REAL requires real entries)."""
        return Matrix(FieldTag.parse(field), self.entries)

    def allclose(self, other, atol=DEFAULT_EQ_TOL):
        other = other.entries if isinstance(other, Matrix) else np.asarray(other)
        return self.entries.shape == other.shape and max_norm(self.entries - other) <= atol

    def __matmul__(self, other):
        return mat_mul(self, other)

    def to_json(self):
        """The ``{"field", "n", "entries"}`` JSON form (row-major ``[re, im]`` pairs)."""
        return dict(
            field=self.field.value,
            n=self.n,
            entries=[[[float(z.real), float(z.imag)] for z in row] for row in self.entries],
        )

    @classmethod
    def from_json(cls, data, path="$"):
        """
        Parse the JSON form, raising :class:`SchemaError` naming the offending path.

        """
        if not isinstance(data, dict):
            raise SchemaError("matrix must be an object", path=path)
        for key in ("field", "n", "entries"):
            if key not in data:
                raise SchemaError(f"missing key {key!r}", path=path)
        if data["field"] not in ("R", "C"):
            raise SchemaError("field must be 'R' or 'C'", path=f"{path}.field")
        n = data["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise SchemaError("n must be a positive integer", path=f"{path}.n")
        rows = data["entries"]
        if not isinstance(rows, list) or len(rows) != n:
            raise SchemaError(f"entries must be a list of {n} rows", path=f"{path}.entries")
        entries = np.zeros((n, n), dtype=np.complex128)
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise SchemaError(f"row must hold {n} entries", path=f"{path}.entries[{i}]")
            for j, pair in enumerate(row):
                where = f"{path}.entries[{i}][{j}]"
                if (
                    not isinstance(pair, list)
                    or len(pair) != 2
                    or not all(_is_number(v) for v in pair)
                ):
                    raise SchemaError("entry must be a [re, im] pair of numbers", path=where)
                if data["field"] == "R" and pair[1] != 0:
                    raise SchemaError("REAL matrix entry with non-zero imaginary part",
                                      path=where)
                entries[i, j] = complex(pair[0], pair[1])
        if not np.all(np.isfinite(entries)):
            raise SchemaError("entries must be finite", path=f"{path}.entries")
        return cls(FieldTag.parse(data["field"]), entries)


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def vector_to_json(vector):
    """Vectors are written as a list of ``[re, im]`` pairs."""
    return [[float(z.real), float(z.imag)] for z in np.asarray(vector, dtype=np.complex128)]


def vector_from_json(data, path="$"):
    """
    Parse a vector given as numbers, ``[re, im]`` pairs, or ``{"entries": ...}``.

    """
    if isinstance(data, dict):
        if "entries" not in data:
            raise SchemaError("missing key 'entries'", path=path)
        data, path = data["entries"], f"{path}.entries"
    if not isinstance(data, list) or not data:
        raise SchemaError("vector must be a non-empty list", path=path)
    values = []
    for i, item in enumerate(data):
        if _is_number(item):
            values.append(complex(item))
        elif isinstance(item, list) and len(item) == 2 and all(_is_number(v) for v in item):
            values.append(complex(item[0], item[1]))
        else:
            raise SchemaError("entry must be a number or a [re, im] pair", path=f"{path}[{i}]")
    return np.array(values, dtype=np.complex128)


def max_norm(array):
    """The entrywise maximum modulus (0 for empty arrays)."""
    array = np.asarray(array)
    return float(np.max(np.abs(array))) if array.size else 0.0


def _check_pair(a, b):
    if a.n != b.n:
        raise InvalidInput("dimension mismatch", left=a.n, right=b.n)
    if a.field is not b.field:
        raise InvalidInput("field mismatch", left=a.field.value, right=b.field.value)


def mat_mul(a, b):
    """
    The product ``a @ b`` of two matrices over the same field.

    Raises
    ------
    InvalidInput
        On dimension or field mismatch.

    """
    _check_pair(a, b)
    return Matrix(a.field, a.array @ b.array)


def mat_inverse(a, tol=DEFAULT_TOLERANCE):
    """
    Invert ``a`` by partially pivoted LU elimination.

    Parameters
    ----------
    a : Matrix
        The matrix to invert.
    tol : Tolerance
        Pivots below ``rank_tol * max(1, |a|_max)`` are treated as zero.

    Returns
    -------
    Matrix
        The inverse, carrying the field of ``a``.

    Raises
    ------
    SingularMatrix
        If a pivot falls below the threshold.

    """
    array = a.array
    threshold = tol.rank_tol * max(1.0, max_norm(array))
    with warnings.catch_warnings():
        # exactly singular inputs are reported through the pivot test below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(array, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if np.min(pivots) < threshold:
        raise SingularMatrix("matrix is numerically singular",
                             min_pivot=float(np.min(pivots)), threshold=threshold)
    inverse = scipy.linalg.lu_solve((lu, piv), np.eye(a.n, dtype=array.dtype))
    if not np.all(np.isfinite(inverse)):
        raise SingularMatrix("inverse is not finite", min_pivot=float(np.min(pivots)))
    return Matrix(a.field, inverse)


def eigenvalues(a):
    """
    The ``n`` eigenvalues of ``a`` with algebraic multiplicity (order unspecified).

    Uses the LAPACK Hessenberg/shifted-QR driver behind :func:`scipy.linalg.eigvals`.

    Raises
    ------
    NumericalFailure
        If the QR iteration does not converge.

    """
    if a.n > MAX_DIMENSION:
        raise InvalidInput(f"dimension {a.n} exceeds {MAX_DIMENSION}", n=a.n)
    try:
        values = scipy.linalg.eigvals(a.array, check_finite=False)
    except np.linalg.LinAlgError as error:
        raise NumericalFailure(f"eigenvalue iteration failed: {error}", n=a.n)
    if not np.all(np.isfinite(values)):
        raise NumericalFailure("eigenvalue iteration produced non-finite values", n=a.n)
    return values.astype(np.complex128)


def _as_rows(rows):
    rows = [np.asarray(row) for row in rows]
    lengths = {row.shape for row in rows}
    if len(lengths) > 1 or any(row.ndim != 1 for row in rows):
        raise InvalidInput("rows must be one-dimensional and share the same length",
                           shapes=[list(row.shape) for row in rows])
    return np.array(rows)


def nullspace_basis(rows, tol=DEFAULT_TOLERANCE, length=None):
    """
    Orthonormal basis of the numerical nullspace of the stacked ``rows``.

    Parameters
    ----------
    rows : sequence of 1-D arrays
        The equations, one per row.
    tol : Tolerance
        Singular values below ``rank_tol`` times the largest are treated as zero.
    length : int, optional
        Number of unknowns; required when ``rows`` is empty.

    Returns
    -------
    list of numpy.ndarray
        The basis vectors.

    """
    if len(rows) == 0:
        if length is None:
            raise InvalidInput("length is required for an empty system")
        return list(np.eye(length))
    matrix = _as_rows(rows)
    if length is not None and matrix.shape[1] != length:
        raise InvalidInput("row length mismatch", expected=length, actual=matrix.shape[1])
    basis = scipy.linalg.null_space(matrix, rcond=tol.rank_tol)
    return [basis[:, i] for i in range(basis.shape[1])]


def numerical_rank(vectors, tol=DEFAULT_TOLERANCE):
    """
    Rank of the family ``vectors`` (the rows of a 2-D array).

    The singular-value threshold is ``rank_tol`` relative to the largest
    singular value, so the verdict is scale invariant.

    """
    matrix = vectors if isinstance(vectors, np.ndarray) else _as_rows(vectors)
    if matrix.size == 0:
        return 0
    if matrix.ndim == 1:
        matrix = matrix[np.newaxis, :]
    values = scipy.linalg.svdvals(matrix, check_finite=False)
    if values[0] == 0:
        return 0
    return int(np.sum(values > tol.rank_tol * values[0]))


def krylov_rank(a, x, tol=DEFAULT_TOLERANCE):
    """
    Rank of the Krylov family ``{x, ax, ..., a^(n-1) x}``.

    Columns are normalised before the rank test.

    """
    x = np.asarray(x)
    if x.shape != (a.n,):
        raise InvalidInput("vector length does not match the matrix", n=a.n, shape=list(x.shape))
    array = a.entries
    columns = []
    column = x.astype(np.complex128)
    for _ in range(a.n):
        norm = np.linalg.norm(column)
        columns.append(column / norm if norm > 0 else column)
        column = array @ column
    return numerical_rank(np.array(columns), tol)


def commutator_norm(a, b):
    """The entrywise maximum of ``ab - ba``."""
    a = a.entries if isinstance(a, Matrix) else np.asarray(a)
    b = b.entries if isinstance(b, Matrix) else np.asarray(b)
    return max_norm(a @ b - b @ a)


def is_commuting(a, b, tol=DEFAULT_TOLERANCE):
    """Whether ``a`` and ``b`` commute, relative to ``max(1, |a| |b|)``."""
    scale = max(1.0, max_norm(a.entries) * max_norm(b.entries))
    return commutator_norm(a, b) <= tol.eq_tol * scale


def realify(array, atol):
    """
    Hard-truncate ``array`` to its real part.

    Raises
    ------
    NumericalFailure
        If the imaginary residue exceeds ``atol``.

    """
    array = np.asarray(array)
    residue = max_norm(array.imag) if np.iscomplexobj(array) else 0.0
    if residue > atol:
        raise NumericalFailure("imaginary residue too large to truncate",
                               residue=residue, tolerance=atol)
    return np.array(array.real, dtype=np.float64)


def check_schema_version(data, path="$"):
    """
    Validate the ``schema_version`` of a JSON artifact.

    Artifacts without a version are accepted as the current one.

    Raises
    ------
    SchemaError
        If the version is malformed or its major version differs.

    """
    if not isinstance(data, dict):
        raise SchemaError("artifact must be an object", path=path)
    value = data.get("schema_version", SCHEMA_VERSION)
    where = f"{path}.schema_version"
    try:
        version = Version(str(value))
    except InvalidVersion:
        raise SchemaError(f"malformed schema version {value!r}", path=where)
    if version.major != Version(SCHEMA_VERSION).major:
        raise SchemaError(f"unsupported schema version {value} (expected {SCHEMA_VERSION})",
                          path=where)
    return version
