"""
Minimal hypercyclic tuples: the size formulas, the complex and real
constructions, the gallery of explicit algebras and the F4 triple.

A hypercyclic tuple is built inside a cyclic commutative algebra ``A`` of
dimension ``n``. The kernel of ``exp`` is extended to a basis
``B_1, ..., B_N`` of ``A`` as a real vector space, a completing vector
``B_0 = -sum alpha_j B_j`` makes the additive semigroup dense, and the
exponentials of ``B_0`` and of the non-kernel basis vectors form the tuple.

"""
import enum
import logging
from dataclasses import dataclass, field as dc_field
from typing import Optional, Tuple

import numpy as np

from hypertuple.algebra import close_algebra, compute_characters, find_cyclic_vector
from hypertuple.errors import (AllScalar, DependentVectors, InvalidInput, NotCyclicAlgebra,
                               NumericalFailure, SchemaError)
from hypertuple.expmap import alg_exp, ker_exp_generators, sign_group
from hypertuple.numkit import (DEFAULT_SEED, DEFAULT_TOLERANCE, SCHEMA_VERSION, FieldTag, Matrix,
                               check_schema_version, commutator_norm, max_norm, numerical_rank)
from hypertuple.semigroup import (AlphaScheme, GroupElement, completing_generator,
                                  group_completing_generator, independent_reals)

#: Default F4 parameters ``(a1, b1, a2, b2)``.
DEFAULT_F4_PARAMETERS = (2.0, 1.0, 0.5, 1.0)

__all__ = [
    "DEFAULT_F4_PARAMETERS",
    "Construction",
    "ExpectedCounts",
    "GalleryEntry",
    "Provenance",
    "TupleSpec",
    "TupleValidation",
    "build_tuple",
    "build_tuple_complex",
    "build_tuple_real",
    "default_algebra",
    "f4_triple",
    "gallery",
    "gallery_names",
    "min_nondiagonalizable_size",
    "min_tuple_size",
    "predicted_size",
    "two_dim_cyclic_member",
    "validate_tuple",
]

logger = logging.getLogger(__name__)


#
# Size formulas
#


def min_tuple_size(field, n):
    """
    The minimal cardinality of a hypercyclic tuple on ``K^n``.

    ``n + 1`` over the complex numbers; over the reals ``n/2 + 1`` for even
    ``n`` and ``(n + 3)/2`` for odd ``n``.

    """
    field = FieldTag.parse(field)
    n = _dimension(n)
    if field is FieldTag.COMPLEX:
        return n + 1
    return n // 2 + 1 if n % 2 == 0 else (n + 3) // 2


def predicted_size(field, n, table):
    """The tuple size ``2n - kappa + 1`` (complex) or ``n - kappa0 + 1`` (real)."""
    field = FieldTag.parse(field)
    if field is FieldTag.COMPLEX:
        return 2 * n - table.kappa + 1
    return n - table.kappa0 + 1


def min_nondiagonalizable_size(n):
    """Minimal size of a hypercyclic tuple on ``C^n`` with a non-diagonalizable member."""
    n = _dimension(n)
    if n < 2:
        raise InvalidInput("every operator on C^1 is diagonalizable", n=n)
    return n + 2


def _dimension(n):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidInput("dimension must be a positive integer", n=n)
    return int(n)


#
# Tuples
#


class Construction(enum.Enum):
    COMPLEX_MINIMAL = "COMPLEX_MINIMAL"
    REAL_MINIMAL = "REAL_MINIMAL"
    GALLERY = "GALLERY"
    USER = "USER"


@dataclass(frozen=True)
class Provenance:
    algebra_id: str
    construction: Construction
    alpha_scheme: Optional[str] = None
    seed: Optional[int] = None
    alpha: Tuple[float, ...] = ()

    def to_json(self):
        return dict(algebra_id=self.algebra_id, construction=self.construction.value,
                    alpha_scheme=self.alpha_scheme, seed=self.seed, alpha=list(self.alpha))

    @classmethod
    def from_json(cls, data, path="$"):
        if not isinstance(data, dict):
            raise SchemaError("provenance must be an object", path=path)
        try:
            construction = Construction(data.get("construction", "USER"))
        except ValueError:
            raise SchemaError("unknown construction", path=f"{path}.construction")
        seed = data.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
            raise SchemaError("seed must be an integer", path=f"{path}.seed")
        alpha = data.get("alpha", [])
        if not isinstance(alpha, list) or not all(isinstance(a, (int, float)) for a in alpha):
            raise SchemaError("alpha must be a list of numbers", path=f"{path}.alpha")
        return cls(str(data.get("algebra_id", "user")), construction,
                   data.get("alpha_scheme"), seed, tuple(float(a) for a in alpha))


@dataclass(frozen=True, eq=False)
class TupleSpec:
    """
    An ordered commuting tuple of invertible operators with its provenance.

    """

    field: FieldTag
    n: int
    operators: Tuple[Matrix, ...]
    provenance: Provenance = dc_field(
        default_factory=lambda: Provenance("user", Construction.USER))
    predicted_size: Optional[int] = None

    def __post_init__(self):
        field = FieldTag.parse(self.field)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "operators", tuple(self.operators))
        for index, op in enumerate(self.operators):
            if op.n != self.n or op.field is not field:
                raise InvalidInput("operator does not match the tuple's dimension or field",
                                   index=index, n=op.n, field=op.field.value)

    def __len__(self):
        return len(self.operators)

    def drop(self, index):
        """The tuple without operator ``index`` (a USER tuple)."""
        if not 0 <= index < len(self.operators):
            raise InvalidInput("operator index out of range", index=index,
                               size=len(self.operators))
        operators = self.operators[:index] + self.operators[index + 1:]
        provenance = Provenance(f"{self.provenance.algebra_id}-drop{index}",
                                Construction.USER, self.provenance.alpha_scheme,
                                self.provenance.seed, self.provenance.alpha)
        return TupleSpec(self.field, self.n, operators, provenance)

    def to_json(self):
        return dict(
            schema_version=SCHEMA_VERSION,
            field=self.field.value,
            n=self.n,
            operators=[op.to_json() for op in self.operators],
            provenance=self.provenance.to_json(),
            predicted_size=self.predicted_size,
        )

    @classmethod
    def from_json(cls, data, path="$"):
        """
        Parse a tuple; a bare list of matrices is accepted as a USER tuple.

        """
        if isinstance(data, list):
            data = dict(operators=data)
        check_schema_version(data, path)
        operators = data.get("operators")
        if not isinstance(operators, list) or not operators:
            raise SchemaError("operators must be a non-empty list", path=f"{path}.operators")
        matrices = [Matrix.from_json(op, f"{path}.operators[{i}]")
                    for i, op in enumerate(operators)]
        field = data.get("field", matrices[0].field.value)
        if field not in ("R", "C"):
            raise SchemaError("field must be 'R' or 'C'", path=f"{path}.field")
        n = data.get("n", matrices[0].n)
        for i, m in enumerate(matrices):
            if m.n != n or m.field.value != field:
                raise SchemaError("operator does not match the tuple's dimension or field",
                                  path=f"{path}.operators[{i}]")
        provenance = Provenance.from_json(data.get("provenance", {}), f"{path}.provenance")
        size = data.get("predicted_size")
        if size is not None and (isinstance(size, bool) or not isinstance(size, int)):
            raise SchemaError("predicted_size must be an integer", path=f"{path}.predicted_size")
        return cls(FieldTag.parse(field), n, tuple(matrices), provenance, size)


@dataclass(frozen=True)
class TupleValidation:
    max_commutator: float
    min_singular_value: float
    membership_residual: Optional[float]
    tolerance: float

    @property
    def commuting(self):
        return self.max_commutator <= self.tolerance

    @property
    def invertible(self):
        return self.min_singular_value > 0

    @property
    def ok(self):
        return self.commuting and self.invertible and (
            self.membership_residual is None or self.membership_residual <= 1e-8)

    def to_json(self):
        return dict(max_commutator=self.max_commutator,
                    min_singular_value=self.min_singular_value,
                    membership_residual=self.membership_residual,
                    commutator_tolerance=self.tolerance, commuting=self.commuting,
                    invertible=self.invertible, ok=self.ok)


def validate_tuple(spec, tol=DEFAULT_TOLERANCE, alg=None):
    """
    Residuals of a tuple: the largest relative commutator, the smallest
    relative singular value and, with ``alg``, the worst membership residual.

    """
    worst = 0.0
    ops = spec.operators
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            scale = max(1.0, max_norm(ops[i].entries) * max_norm(ops[j].entries))
            worst = max(worst, commutator_norm(ops[i], ops[j]) / scale)
    smallest = np.inf
    for op in ops:
        values = np.linalg.svd(op.entries, compute_uv=False)
        relative = float(values[-1] / values[0]) if values[0] > 0 else 0.0
        if relative <= tol.rank_tol:
            relative = 0.0
        smallest = min(smallest, relative)
    membership = None
    if alg is not None:
        membership = max(alg.coordinates(op)[1] for op in ops) if ops else 0.0
    return TupleValidation(worst, float(smallest), membership, tol.eq_tol)


def two_dim_cyclic_member(spec, tol=DEFAULT_TOLERANCE):
    """
    Index of the first non-scalar (hence cyclic) operator of a tuple on ``K^2``.

    Raises
    ------
    AllScalar
        When every member is a multiple of the identity; such a tuple is
        never hypercyclic.

    """
    if spec.n != 2:
        raise InvalidInput("only tuples on K^2 are supported", n=spec.n)
    eye = np.eye(2)
    for index, op in enumerate(spec.operators):
        scalar = np.trace(op.entries) / 2
        if max_norm(op.entries - scalar * eye) > tol.eq_tol:
            return index
    raise AllScalar("every operator of the tuple is scalar", size=len(spec))


#
# Constructions
#


def _require_cyclic(alg, seed, tol):
    if alg.dim != alg.n or find_cyclic_vector(alg, seed=seed, tol=tol) is None:
        raise NotCyclicAlgebra("the algebra is not cyclic", dim=alg.dim, n=alg.n)


def _real_coordinates(alg, matrix):
    coeffs, residual = alg.coordinates(matrix)
    if alg.field is FieldTag.REAL:
        return np.real(coeffs)
    coeffs = coeffs.astype(np.complex128)
    return np.column_stack([coeffs.real, coeffs.imag]).reshape(-1)


def _from_real_coordinates(alg, vector):
    if alg.field is FieldTag.REAL:
        return alg.element(np.asarray(vector, dtype=np.float64))
    pairs = np.asarray(vector, dtype=np.float64).reshape(-1, 2)
    return alg.element(pairs[:, 0] + 1j * pairs[:, 1])


def _extend_basis(alg, kernel, tol):
    """
    Extend the kernel generators greedily to a real basis of ``alg``.

    Candidates are ``basis[0], i basis[0], basis[1], i basis[1], ...`` for a
    complex algebra and ``basis[0], basis[1], ...`` for a real one.

    """
    size = alg.dim if alg.field is FieldTag.REAL else 2 * alg.dim
    vectors = [_real_coordinates(alg, k) for k in kernel]
    if vectors and numerical_rank(np.array(vectors), tol) != len(vectors):
        raise NumericalFailure("kernel generators are linearly dependent", stage="construct")
    candidates = []
    for b in alg.basis:
        candidates.append(b)
        if alg.field is FieldTag.COMPLEX:
            candidates.append(Matrix(FieldTag.COMPLEX, 1j * b.entries))
    extension = []
    for candidate in candidates:
        if len(vectors) == size:
            break
        vector = _real_coordinates(alg, candidate)
        if numerical_rank(np.array(vectors + [vector]), tol) > len(vectors):
            vectors.append(vector)
            extension.append(candidate)
    if len(vectors) != size:
        raise NumericalFailure("could not extend the kernel to a basis", stage="construct",
                               rank=len(vectors), size=size)
    return vectors, extension


def _alpha(d, scheme, values):
    scheme = AlphaScheme.parse(scheme)
    return independent_reals(d, scheme, values)


def build_tuple_complex(alg, table=None, alpha_scheme=AlphaScheme.SQRT_PRIMES, seed=DEFAULT_SEED,
                        tol=DEFAULT_TOLERANCE, alpha_values=None, algebra_id="user"):
    """
    A hypercyclic ``(2n - kappa + 1)``-tuple inside a cyclic complex algebra.

    Parameters
    ----------
    alg : CommutativeAlgebra
        A cyclic complex algebra (``dim == n``).
    table : CharacterTable, optional
        Computed with ``seed`` when not given.
    alpha_scheme : AlphaScheme or str
    seed : int
    tol : Tolerance
    alpha_values : sequence of float, optional
        Values for the ``user`` scheme.
    algebra_id : str
        Recorded in the provenance.

    Returns
    -------
    TupleSpec

    Raises
    ------
    NotCyclicAlgebra

    """
    if alg.field is not FieldTag.COMPLEX:
        raise InvalidInput("build_tuple_complex needs a complex algebra")
    _require_cyclic(alg, seed, tol)
    table = compute_characters(alg, tol, seed) if table is None else table
    kernel = ker_exp_generators(alg, table)
    vectors, extension = _extend_basis(alg, kernel, tol)
    alpha = _alpha(len(vectors), alpha_scheme, alpha_values)
    b0 = _from_real_coordinates(alg, completing_generator(vectors, alpha, tol))
    operators = [alg_exp(b0)] + [alg_exp(b) for b in extension]
    size = predicted_size(FieldTag.COMPLEX, alg.n, table)
    if len(operators) != size:
        raise NumericalFailure("tuple size does not match the character count",
                               stage="construct", size=len(operators), predicted=size)
    logger.debug(f"complex construction on {algebra_id}: kappa={table.kappa}, size={size}")
    provenance = Provenance(algebra_id, Construction.COMPLEX_MINIMAL, alpha.scheme.value,
                            seed, alpha.values)
    return TupleSpec(FieldTag.COMPLEX, alg.n, tuple(operators), provenance, size)


def build_tuple_real(alg, table=None, alpha_scheme=AlphaScheme.SQRT_PRIMES, seed=DEFAULT_SEED,
                     tol=DEFAULT_TOLERANCE, alpha_values=None, algebra_id="user"):
    """
    A hypercyclic ``(n - kappa0 + 1)``-tuple inside a cyclic real algebra.

    The operators are ``C_0 exp(B_0), C_{k+1} exp(B_{k+1}), ..., C_n exp(B_n)``
    with ``k = kappa0``; the sign group generators take the lowest slots
    ``C_{k+1}, ...`` and every other ``C_j`` is the identity.

    """
    if alg.field is not FieldTag.REAL:
        raise InvalidInput("build_tuple_real needs a real algebra")
    _require_cyclic(alg, seed, tol)
    table = compute_characters(alg, tol, seed) if table is None else table
    kernel = ker_exp_generators(alg, table)
    signs = sign_group(alg, table)
    vectors, extension = _extend_basis(alg, kernel, tol)
    m = signs.m
    if m > len(extension):
        raise NumericalFailure("not enough slots for the sign group", stage="construct",
                               signs=m, slots=len(extension))
    group_gens = [GroupElement.identity(m) for _ in kernel]
    group_gens += [GroupElement.unit(m, i) if i < m else GroupElement.identity(m)
                   for i in range(len(extension))]
    alpha = _alpha(len(vectors), alpha_scheme, alpha_values)
    _, x0 = group_completing_generator(vectors, group_gens, alpha, tol)
    operators = [alg_exp(_from_real_coordinates(alg, x0))]
    for i, b in enumerate(extension):
        op = alg_exp(b)
        if i < m:
            op = Matrix(FieldTag.REAL, signs.generators[i].array @ op.array)
        operators.append(op)
    size = predicted_size(FieldTag.REAL, alg.n, table)
    if len(operators) != size:
        raise NumericalFailure("tuple size does not match the character count",
                               stage="construct", size=len(operators), predicted=size)
    logger.debug(f"real construction on {algebra_id}: kappa0={table.kappa0}, "
                 f"kappa1={table.kappa1}, size={size}")
    provenance = Provenance(algebra_id, Construction.REAL_MINIMAL, alpha.scheme.value,
                            seed, alpha.values)
    return TupleSpec(FieldTag.REAL, alg.n, tuple(operators), provenance, size)


def build_tuple(alg, table=None, alpha_scheme=AlphaScheme.SQRT_PRIMES, seed=DEFAULT_SEED,
                tol=DEFAULT_TOLERANCE, alpha_values=None, algebra_id="user"):
    """Dispatch to the complex or real construction by the algebra's field."""
    builder = build_tuple_complex if alg.field is FieldTag.COMPLEX else build_tuple_real
    return builder(alg, table, alpha_scheme, seed, tol, alpha_values, algebra_id)


#
# F4 triple
#


def f4_triple(a1=DEFAULT_F4_PARAMETERS[0], b1=DEFAULT_F4_PARAMETERS[1],
              a2=DEFAULT_F4_PARAMETERS[2], b2=DEFAULT_F4_PARAMETERS[3],
              alpha_scheme=AlphaScheme.SQRT_PRIMES, tol=DEFAULT_TOLERANCE, alpha_values=None):
    """
    Three non-diagonalizable operators ``[[a_j, b_j], [0, a_j]]`` on ``R^2``
    whose orbits are dense in a half-plane.

    The third pair is completed from ``v_j = (b_j / a_j, ln a_j)`` by
    ``v_3 = -(alpha_1 v_1 + alpha_2 v_2)``.

    Raises
    ------
    DependentVectors
        If ``v_1`` and ``v_2`` are linearly dependent.

    """
    for name, value in (("a1", a1), ("a2", a2)):
        if not np.isfinite(value) or value <= 0:
            raise InvalidInput(f"{name} must be positive", **{name: value})
    for name, value in (("b1", b1), ("b2", b2)):
        if not np.isfinite(value) or value == 0:
            raise InvalidInput(f"{name} must be non-zero", **{name: value})
    v1 = np.array([b1 / a1, np.log(a1)])
    v2 = np.array([b2 / a2, np.log(a2)])
    det = float(v1[0] * v2[1] - v1[1] * v2[0])
    if abs(det) < tol.rank_tol:
        raise DependentVectors("(b/a, ln a) vectors are linearly dependent", det=det)
    alpha = _alpha(2, alpha_scheme, alpha_values)
    v3 = completing_generator([v1, v2], alpha, tol)
    a3 = float(np.exp(v3[1]))
    b3 = float(a3 * v3[0])
    if b3 == 0:
        raise DependentVectors("completed operator is diagonal", b3=b3)
    operators = tuple(Matrix(FieldTag.REAL, np.array([[a, b], [0.0, a]]))
                      for a, b in ((a1, b1), (a2, b2), (a3, b3)))
    provenance = Provenance("f4", Construction.GALLERY, alpha.scheme.value, None, alpha.values)
    return TupleSpec(FieldTag.REAL, 2, operators, provenance, 3)


#
# Gallery
#


@dataclass(frozen=True)
class ExpectedCounts:
    kappa: Optional[int] = None
    kappa0: Optional[int] = None
    kappa1: Optional[int] = None
    cyclic: bool = True
    notes: str = ""

    def counts(self):
        if self.kappa0 is None:
            return dict(kappa=self.kappa)
        return dict(kappa0=self.kappa0, kappa1=self.kappa1)

    def to_json(self):
        return dict(self.counts(), cyclic=self.cyclic, notes=self.notes)


@dataclass(frozen=True, eq=False)
class GalleryEntry:
    name: str
    algebra: object
    expected: ExpectedCounts
    params: dict = dc_field(default_factory=dict)
    cyclic_vector: Optional[np.ndarray] = None

    def to_json(self):
        return dict(name=self.name, params=dict(self.params), field=self.algebra.field.value,
                    n=self.algebra.n, dim=self.algebra.dim, expected=self.expected.to_json())


def _unit(n, i, j):
    array = np.zeros((n, n))
    array[i, j] = 1.0
    return array


def _expected(field, kappa, real_counts, notes=""):
    if field is FieldTag.COMPLEX:
        return ExpectedCounts(kappa=kappa, notes=notes)
    return ExpectedCounts(kappa0=real_counts[0], kappa1=real_counts[1], notes=notes)


def _gallery_diag(field, n=3, m=None):
    n = _dimension(n)
    gens = [Matrix(field, _unit(n, i, i)) for i in range(n)]
    return (gens, _expected(field, n, (0, n), "diagonal matrices"), dict(n=n),
            np.ones(n))


def _gallery_jordan2(field, n=None, m=None):
    gens = [Matrix(field, _unit(2, 0, 1))]
    return (gens, _expected(field, 1, (0, 1), "[[a, b], [0, a]]"), {},
            np.array([0.0, 1.0]))


def _require_real(name, field):
    if field is not FieldTag.REAL:
        raise InvalidInput(f"gallery algebra {name!r} is only defined over R")


def _rotation_blocks(m, offset, n):
    gens = []
    for k in range(m):
        i = offset + 2 * k
        block = _unit(n, i, i) + _unit(n, i + 1, i + 1)
        rotation = _unit(n, i, i + 1) - _unit(n, i + 1, i)
        gens += [Matrix(FieldTag.REAL, block), Matrix(FieldTag.REAL, rotation)]
    return gens


def _gallery_rotation(field, n=None, m=None):
    _require_real("rotation", field)
    gens = _rotation_blocks(1, 0, 2)
    return gens, ExpectedCounts(kappa0=1, kappa1=0, notes="[[a, b], [-b, a]]"), {}, None


def _count(m, default, name):
    m = default if m is None else m
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 0:
        raise InvalidInput(f"{name} must be a non-negative integer", m=m)
    return int(m)


def _gallery_rotation_sum(field, n=None, m=None):
    _require_real("rotation_sum", field)
    m = _count(m if m is not None else (None if n is None else n // 2), 1, "m")
    if m < 1:
        raise InvalidInput("rotation_sum needs m >= 1", m=m)
    gens = _rotation_blocks(m, 0, 2 * m)
    return (gens, ExpectedCounts(kappa0=m, kappa1=0, notes=f"{m} rotation blocks"),
            dict(m=m), None)


def _gallery_rotation_sum_odd(field, n=None, m=None):
    _require_real("rotation_sum_odd", field)
    m = _count(m if m is not None else (None if n is None else (n - 1) // 2), 1, "m")
    size = 2 * m + 1
    gens = [Matrix(FieldTag.REAL, _unit(size, 0, 0))] + _rotation_blocks(m, 1, size)
    return (gens, ExpectedCounts(kappa0=m, kappa1=1, notes=f"R + {m} rotation blocks"),
            dict(m=m), None)


def _gallery_az(field, n=None, m=None):
    gens = [Matrix(field, _unit(3, 1, 0)), Matrix(field, _unit(3, 2, 0))]
    return (gens, _expected(field, 1, (0, 1), "z1 I + z2 E21 + z3 E31"), {},
            np.array([1.0, 0.0, 0.0]))


def _gallery_f4(field, n=None, m=None):
    _require_real("f4", field)
    gens = list(f4_triple().operators)
    return (gens, ExpectedCounts(kappa0=0, kappa1=1, notes="algebra of the F4 triple"), {},
            np.array([0.0, 1.0]))


def _gallery_jordan_diag(field, n=3, m=None):
    n = _dimension(n)
    if n < 2:
        raise InvalidInput("jordan_diag needs n >= 2", n=n)
    gens = [Matrix(field, _unit(n, 0, 0) + _unit(n, 1, 1)), Matrix(field, _unit(n, 0, 1))]
    gens += [Matrix(field, _unit(n, i, i)) for i in range(2, n)]
    cyclic = np.ones(n)
    cyclic[0] = 0.0
    return (gens, _expected(field, n - 1, (0, n - 1), "[[a, b], [0, a]] + diagonal"),
            dict(n=n), cyclic)


_GALLERY = {
    "diag": (_gallery_diag, FieldTag.COMPLEX),
    "jordan2": (_gallery_jordan2, FieldTag.COMPLEX),
    "rotation": (_gallery_rotation, FieldTag.REAL),
    "rotation_sum": (_gallery_rotation_sum, FieldTag.REAL),
    "rotation_sum_odd": (_gallery_rotation_sum_odd, FieldTag.REAL),
    "az": (_gallery_az, FieldTag.COMPLEX),
    "f4": (_gallery_f4, FieldTag.REAL),
    "jordan_diag": (_gallery_jordan_diag, FieldTag.COMPLEX),
}


def gallery_names():
    return sorted(_GALLERY)


def gallery(name, field=None, n=None, m=None, tol=DEFAULT_TOLERANCE):
    """
    An explicit algebra from the gallery.

    Parameters
    ----------
    name : str
        One of :func:`gallery_names`.
    field : FieldTag or str, optional
        Defaults to the entry's natural field.
    n : int, optional
        Dimension for ``diag`` and ``jordan_diag``; for the rotation sums it
        selects ``m`` when ``m`` is not given.
    m : int, optional
        Block count for ``rotation_sum`` and ``rotation_sum_odd``.

    Returns
    -------
    GalleryEntry

    """
    if name not in _GALLERY:
        raise InvalidInput(f"unknown gallery algebra {name!r}", known=gallery_names())
    builder, natural = _GALLERY[name]
    field = natural if field is None else FieldTag.parse(field)
    kwargs = dict(m=m)
    if n is not None:
        kwargs["n"] = n
    gens, expected, params, cyclic_vector = builder(field, **kwargs)
    algebra = close_algebra(gens, tol)
    params = dict(params, field=field.value)
    return GalleryEntry(name, algebra, expected, params, cyclic_vector)


def default_algebra(field, n):
    """
    The algebra ``construct`` uses without ``--algebra``.

    ``diag(n)`` over the complex numbers; over the reals the sum of ``n/2``
    rotation blocks, with an extra real line when ``n`` is odd.

    """
    field = FieldTag.parse(field)
    n = _dimension(n)
    if field is FieldTag.COMPLEX:
        return gallery("diag", field, n=n)
    if n % 2 == 0:
        return gallery("rotation_sum", field, m=n // 2)
    if n == 1:
        return gallery("diag", field, n=1)
    return gallery("rotation_sum_odd", field, m=(n - 1) // 2)
