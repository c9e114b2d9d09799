"""
Unital commutative matrix algebras, their commutants, cyclic vectors,
characters and spectral idempotents.

A real algebra is handled through its complexification: the same real basis
with complex coefficients. Characters of a real algebra therefore come either
real valued or in conjugate pairs.

"""
import enum
import logging
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.sparse.csgraph import connected_components

from hypertuple.errors import (CharacterSeparationFailure, InvalidInput, NonCommuting,
                               NumericalFailure)
from hypertuple.numkit import (DEFAULT_SEED, DEFAULT_TOLERANCE, FieldTag, Matrix,
                               commutator_norm, eigenvalues, is_commuting, max_norm,
                               nullspace_basis, numerical_rank)

#: Number of trapezoid nodes on each idempotent contour.
DEFAULT_CONTOUR_NODES = 64

#: Random algebra elements tried before giving up on character separation.
DEFAULT_CHARACTER_RETRIES = 8

#: Times the clustering radius is widened (by a factor 10) for each element.
DEFAULT_CLUSTER_ESCALATIONS = 3

#: Accepted residual of the idempotent axioms.
IDEMPOTENT_TOL = 1e-7

#: Accepted residual of structure-constant reconstruction.
STRUCTURE_TOL = 1e-8

#: Accepted residual of character multiplicativity and idempotent membership.
CHARACTER_TOL = 1e-6

__all__ = [
    "Character",
    "CharacterKind",
    "CharacterTable",
    "CommutativeAlgebra",
    "character_value",
    "close_algebra",
    "commutant",
    "compute_characters",
    "find_cyclic_vector",
    "is_cyclic_vector",
    "regular_representation",
    "same_span",
    "schur_projector",
]

logger = logging.getLogger(__name__)


def _vec(matrices, real):
    vectors = np.array([m.entries.reshape(-1) for m in matrices]).T
    return vectors.real.copy() if real else vectors


@dataclass(frozen=True, eq=False)
class CommutativeAlgebra:
    """
    Basis and structure constants of a unital commutative matrix algebra.

    ``basis[0]`` is the identity and
    ``basis[i] @ basis[j] == sum_k structure[i, j, k] * basis[k]``.

    """

    field: FieldTag
    n: int
    basis: Tuple[Matrix, ...]
    structure: np.ndarray
    generators: Tuple[Matrix, ...]

    @property
    def dim(self):
        return len(self.basis)

    @property
    def basis_array(self):
        """The basis as a ``(d, n, n)`` complex array."""
        return np.array([b.entries for b in self.basis])

    def coordinates(self, matrix):
        """
        Least-squares coordinates of ``matrix`` in the basis.

        Coordinates are real for a real algebra and a real matrix, complex
        otherwise (complexification).

        Returns
        -------
        coeffs : numpy.ndarray
        residual : float
            Entrywise reconstruction residual relative to ``max(1, |matrix|)``.

        """
        array = matrix.entries if isinstance(matrix, Matrix) else np.asarray(matrix)
        if array.shape != (self.n, self.n):
            raise InvalidInput("matrix does not match the algebra dimension",
                               n=self.n, shape=list(array.shape))
        real = self.field is FieldTag.REAL and not np.any(np.imag(array))
        vectors = _vec(self.basis, real)
        target = (np.real(array) if real else array.astype(np.complex128)).reshape(-1)
        coeffs = scipy.linalg.lstsq(vectors, target, check_finite=False)[0]
        residual = max_norm(vectors @ coeffs - target) / max(1.0, max_norm(target))
        return coeffs, residual

    def contains(self, matrix, atol=STRUCTURE_TOL):
        """Whether ``matrix`` lies in the algebra (or in its complexification)."""
        return self.coordinates(matrix)[1] <= atol

    def element(self, coeffs):
        """The algebra element with the given coordinates."""
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (self.dim,):
            raise InvalidInput("wrong number of coordinates", dim=self.dim, count=coeffs.size)
        array = np.tensordot(coeffs, self.basis_array, axes=1)
        if self.field is FieldTag.REAL and not np.any(np.imag(coeffs)):
            return Matrix(FieldTag.REAL, np.real(array))
        return Matrix(FieldTag.COMPLEX, array)

    def to_json(self):
        return dict(
            field=self.field.value,
            n=self.n,
            dim=self.dim,
            basis=[b.to_json() for b in self.basis],
        )


def close_algebra(tuple_, tol=DEFAULT_TOLERANCE, n=None, field=None):
    """
    The unital algebra generated by a commuting tuple of matrices.

    The basis is seeded with the identity and the tuple; products of basis
    pairs are appended (normalised to unit Frobenius norm) until nothing new
    is independent under ``rank_tol``.

    Parameters
    ----------
    tuple_ : sequence of Matrix
        The generators; ``n`` and ``field`` are required when it is empty.
    tol : Tolerance

    Returns
    -------
    CommutativeAlgebra

    Raises
    ------
    NonCommuting
        Reports the offending pair and the commutator norm.

    """
    ops = list(tuple_)
    if ops:
        n, field = ops[0].n, ops[0].field
        for index, op in enumerate(ops):
            if op.n != n or op.field is not field:
                raise InvalidInput("tuple members must share dimension and field", index=index)
    elif n is None or field is None:
        raise InvalidInput("n and field are required for an empty tuple")
    field = FieldTag.parse(field)
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            if not is_commuting(ops[i], ops[j], tol):
                raise NonCommuting("tuple members do not commute", pair=[i, j],
                                   norm=commutator_norm(ops[i], ops[j]))

    dtype = field.dtype
    basis = [np.eye(n, dtype=dtype)]
    shadow = [basis[0].reshape(-1) / np.sqrt(n)]

    def absorb(array):
        vector = array.reshape(-1)
        norm = np.linalg.norm(vector)
        if norm == 0:
            return False
        q = np.array(shadow).T
        residual = vector
        for _ in range(2):
            residual = residual - q @ (q.conj().T @ residual)
        size = np.linalg.norm(residual)
        if size <= tol.rank_tol * norm:
            return False
        basis.append(array)
        shadow.append(residual / size)
        return True

    for op in ops:
        absorb(op.array)
    k = 0
    while k < len(basis):
        for j in range(k + 1):
            product = basis[k] @ basis[j]
            norm = np.linalg.norm(product)
            if norm > 0:
                absorb(product / norm)
            if len(basis) > n * n:
                raise NumericalFailure("algebra closure exceeded n^2 elements", stage="algebra")
        k += 1
    logger.debug(f"closed algebra of dimension {len(basis)} on {field.value}^{n}")

    matrices = tuple(Matrix(field, b) for b in basis)
    d = len(matrices)
    vectors = np.array([b.reshape(-1) for b in basis]).T
    products = np.array([(basis[i] @ basis[j]).reshape(-1)
                         for i in range(d) for j in range(d)]).T
    coeffs = scipy.linalg.lstsq(vectors, products, check_finite=False)[0]
    residual = np.max(np.abs(vectors @ coeffs - products), axis=0)
    scale = np.maximum(1.0, np.max(np.abs(products), axis=0))
    worst = float(np.max(residual / scale))
    if worst > STRUCTURE_TOL:
        raise NumericalFailure("structure constants do not reconstruct the products",
                               stage="algebra", residual=worst)
    structure = coeffs.T.reshape(d, d, d)
    structure.setflags(write=False)
    return CommutativeAlgebra(field, n, matrices, structure, tuple(ops))


def commutant(alg, tol=DEFAULT_TOLERANCE):
    """
    Basis of the matrices commuting with every element of ``alg``.

    Solves ``S g - g S = 0`` for each basis element ``g`` in the ``n^2``
    unknowns of ``S`` (row-major).

    """
    n = alg.n
    eye = np.eye(n)
    rows = []
    for g in alg.basis[1:]:
        array = g.array
        rows.extend(np.kron(eye, array.T) - np.kron(array, eye))
    vectors = nullspace_basis(rows, tol, length=n * n)
    result = []
    for vector in vectors:
        array = vector.reshape(n, n)
        if alg.field is FieldTag.REAL:
            array = np.real(array)
        result.append(Matrix(alg.field, array))
    return result


def same_span(first, second, tol=DEFAULT_TOLERANCE):
    """Whether two families of matrices span the same space."""
    a = np.array([m.entries.reshape(-1) for m in first])
    b = np.array([m.entries.reshape(-1) for m in second])
    rank_a, rank_b = numerical_rank(a, tol), numerical_rank(b, tol)
    return rank_a == rank_b == numerical_rank(np.vstack([a, b]), tol)


def is_cyclic_vector(alg, x, tol=DEFAULT_TOLERANCE):
    """Whether ``{b x : b in basis}`` spans the whole space."""
    x = np.asarray(x, dtype=np.complex128)
    images = np.array([b.entries @ x for b in alg.basis])
    return numerical_rank(images, tol) == alg.n


def find_cyclic_vector(alg, attempts=64, seed=DEFAULT_SEED, tol=DEFAULT_TOLERANCE):
    """
    A cyclic vector of ``alg``, or ``None``.

    Draws ``attempts`` seeded random vectors with entries uniform in
    ``[-1, 1]`` (complex for a complex algebra). ``None`` is certain when
    ``dim < n`` and overwhelming evidence otherwise.

    """
    if alg.dim < alg.n:
        return None
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        x = rng.uniform(-1, 1, alg.n)
        if alg.field is FieldTag.COMPLEX:
            x = x + 1j * rng.uniform(-1, 1, alg.n)
        if is_cyclic_vector(alg, x, tol):
            return x
    return None


def regular_representation(alg, coeffs):
    """
    The ``d x d`` matrix of multiplication by ``sum_i coeffs[i] basis[i]``.

    """
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (alg.dim,):
        raise InvalidInput("wrong number of coordinates", dim=alg.dim, count=coeffs.size)
    array = np.einsum("i,ijk->kj", coeffs, alg.structure)
    if alg.field is FieldTag.REAL and not np.any(np.imag(coeffs)):
        return Matrix(FieldTag.REAL, np.real(array))
    return Matrix(FieldTag.COMPLEX, array)


class CharacterKind(enum.Enum):
    REAL_VALUED = "REAL_VALUED"
    COMPLEX_PAIR_MEMBER = "COMPLEX_PAIR_MEMBER"


@dataclass(frozen=True)
class Character:
    """
    A character, given by its values on the algebra basis.

    ``kind`` and ``partner`` are only set for characters of real algebras.

    """

    values: Tuple[complex, ...]
    kind: Optional[CharacterKind] = None
    partner: Optional[int] = None
    multiplicity: int = 1

    def to_json(self):
        return dict(
            values=[[v.real, v.imag] for v in self.values],
            kind=None if self.kind is None else self.kind.value,
            partner=self.partner,
            multiplicity=self.multiplicity,
        )


@dataclass(frozen=True, eq=False)
class CharacterTable:
    """
    Characters of an algebra with their spectral idempotents.

    ``kappa`` counts the characters (of the complexification);
    ``kappa0``/``kappa1`` count conjugate pairs and real-valued characters
    and are only set for real algebras.

    """

    field: FieldTag
    characters: Tuple[Character, ...]
    idempotents: Tuple[Matrix, ...]
    kappa: int
    kappa0: Optional[int]
    kappa1: Optional[int]
    residual: float
    uniqueness_gap: Optional[float]
    generic_coeffs: Tuple[complex, ...]

    def counts(self):
        if self.field is FieldTag.COMPLEX:
            return dict(kappa=self.kappa)
        return dict(kappa0=self.kappa0, kappa1=self.kappa1)

    def real_indices(self):
        return [i for i, c in enumerate(self.characters)
                if c.kind is CharacterKind.REAL_VALUED]

    def pairs(self):
        """Conjugate pairs ``(i, partner)`` with ``i < partner``."""
        return [(i, c.partner) for i, c in enumerate(self.characters)
                if c.kind is CharacterKind.COMPLEX_PAIR_MEMBER and i < c.partner]

    def to_json(self):
        result = dict(
            field=self.field.value,
            characters=[c.to_json() for c in self.characters],
            idempotent_residual=self.residual,
            uniqueness_gap=self.uniqueness_gap,
        )
        result.update(self.counts())
        return result


def character_value(table, chi_index, coeffs):
    """The value of character ``chi_index`` on ``sum_i coeffs[i] basis[i]``."""
    if not 0 <= chi_index < len(table.characters):
        raise InvalidInput("character index out of range", index=chi_index,
                           count=len(table.characters))
    values = np.array(table.characters[chi_index].values)
    coeffs = np.asarray(coeffs)
    if coeffs.shape != values.shape:
        raise InvalidInput("wrong number of coordinates", dim=values.size, count=coeffs.size)
    return complex(coeffs @ values)


def schur_projector(matrix, center, radius):
    """
    Spectral projector onto the eigenvalues inside a disc, via Schur form.

    The ordered complex Schur form ``Q [[T11, T12], [0, T22]] Q^H`` gives
    ``P = Q [[I, X], [0, 0]] Q^H`` with ``T11 X - X T22 = T12``.

    """
    array = matrix.entries if isinstance(matrix, Matrix) else np.asarray(matrix, complex)
    n = array.shape[0]
    t, q, sdim = scipy.linalg.schur(array.astype(np.complex128), output="complex",
                                    sort=lambda z: abs(z - center) < radius)
    if sdim == 0:
        return Matrix(FieldTag.COMPLEX, np.zeros((n, n)))
    if sdim == n:
        return Matrix(FieldTag.COMPLEX, np.eye(n))
    x = scipy.linalg.solve_sylvester(t[:sdim, :sdim], -t[sdim:, sdim:], t[:sdim, sdim:])
    block = np.zeros((n, n), dtype=np.complex128)
    block[:sdim, :sdim] = np.eye(sdim)
    block[:sdim, sdim:] = x
    return Matrix(FieldTag.COMPLEX, q @ block @ q.conj().T)


def _contour_projector(array, center, radius, nodes):
    n = array.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    shifts = radius * np.exp(2j * np.pi * (np.arange(nodes) + 0.5) / nodes)
    result = np.zeros((n, n), dtype=np.complex128)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        for shift in shifts:
            result += shift * scipy.linalg.solve((center + shift) * eye - array, eye)
    return result / nodes


def _clusters(values, radius):
    distance = np.abs(values[:, np.newaxis] - values[np.newaxis, :])
    count, labels = connected_components(distance <= radius, directed=False)
    return [np.flatnonzero(labels == label) for label in range(count)]


class _Rejected(Exception):
    def __init__(self, reason, residual):
        super().__init__(reason)
        self.residual = residual


def _table(alg, coeffs, eigs, groups, tol, nodes):
    d, n = alg.dim, alg.n
    ambient = np.tensordot(coeffs, alg.basis_array, axes=1)
    centers = [eigs[g].mean() for g in groups]
    spreads = [float(np.max(np.abs(eigs[g] - c))) for g, c in zip(groups, centers)]

    projectors, discs = [], []
    for index, (group, center, spread) in enumerate(zip(groups, centers, spreads)):
        if len(groups) == 1:
            radius = spread + 1.0
        else:
            others = np.concatenate([eigs[g] for i, g in enumerate(groups) if i != index])
            gap = float(np.min(np.abs(others - center)))
            if gap <= spread:
                raise _Rejected("overlapping clusters", np.inf)
            radius = 0.5 * (spread + gap)
        try:
            projectors.append(_contour_projector(ambient, center, radius, nodes))
        except np.linalg.LinAlgError:
            raise _Rejected("contour node hit the spectrum", np.inf)
        discs.append((center, radius))

    eye = np.eye(n)
    residual = max_norm(sum(projectors) - eye)
    for i, p in enumerate(projectors):
        residual = max(residual, max_norm(p @ p - p))
        for q in projectors[i + 1:]:
            residual = max(residual, max_norm(p @ q), max_norm(q @ p))
    if not np.isfinite(residual) or residual > IDEMPOTENT_TOL:
        raise _Rejected("idempotent axioms fail", residual)

    structure = alg.structure.astype(np.complex128)
    left = np.transpose(structure, (0, 2, 1))
    scale = max(1.0, float(np.max(np.abs(eigs))))
    characters = []
    for p in projectors:
        weights, membership = alg.coordinates(p.astype(np.complex128))
        if membership > CHARACTER_TOL:
            raise _Rejected("idempotent outside the algebra", membership)
        weights = weights.astype(np.complex128)
        pi = np.einsum("i,ijk->kj", weights, structure)
        trace = np.trace(pi)
        multiplicity = int(round(trace.real))
        if multiplicity < 1 or abs(trace - multiplicity) > CHARACTER_TOL:
            raise _Rejected("non-integral idempotent trace", abs(trace - multiplicity))
        values = np.einsum("jkl,lk->j", left, pi) / trace
        expected = np.einsum("ijk,k->ij", structure, values)
        defect = max_norm(np.outer(values, values) - expected)
        if defect > CHARACTER_TOL * max(1.0, max_norm(values) ** 2):
            raise _Rejected("character is not multiplicative", defect)
        characters.append((values, multiplicity))

    separation = tol.cluster_tol * scale
    for i in range(len(characters)):
        for j in range(i + 1, len(characters)):
            if max_norm(characters[i][0] - characters[j][0]) <= separation:
                raise _Rejected("two clusters carry the same character", 0.0)

    return projectors, discs, characters, residual


def _classify(characters, tol):
    kinds, partners = [], []
    for i, (values, _) in enumerate(characters):
        limit = tol.cluster_tol * max(1.0, max_norm(values))
        if max_norm(values.imag) <= limit:
            kinds.append(CharacterKind.REAL_VALUED)
            partners.append(None)
            continue
        match = [j for j, (other, _) in enumerate(characters)
                 if j != i and max_norm(other - values.conj()) <= limit]
        if len(match) != 1:
            raise _Rejected("complex character without a conjugate partner", np.inf)
        kinds.append(CharacterKind.COMPLEX_PAIR_MEMBER)
        partners.append(match[0])
    return kinds, partners


def compute_characters(alg, tol=DEFAULT_TOLERANCE, seed=DEFAULT_SEED,
                       nodes=DEFAULT_CONTOUR_NODES, retries=DEFAULT_CHARACTER_RETRIES):
    """
    Characters and spectral idempotents of ``alg``.

    A seeded random element ``a`` is drawn, the eigenvalues of its regular
    representation are clustered (single linkage, radius ``cluster_tol``)
    and each cluster gets the idempotent
    ``p = 1/(2 pi i) * contour_integral (zeta - a)^-1 d zeta``
    by trapezoid quadrature on a circle separating it from the other
    clusters. Character values are normalised projector traces of the
    regular representation.

    Parameters
    ----------
    alg : CommutativeAlgebra
    tol : Tolerance
    seed : int
    nodes : int
        Quadrature nodes per contour.
    retries : int
        Random elements tried before giving up.

    Returns
    -------
    CharacterTable

    Raises
    ------
    CharacterSeparationFailure
        After ``retries`` elements, reporting the best residual.

    """
    rng = np.random.default_rng(seed)
    best = np.inf
    for attempt in range(retries):
        coeffs = rng.uniform(-1, 1, alg.dim)
        if alg.field is FieldTag.COMPLEX:
            coeffs = coeffs + 1j * rng.uniform(-1, 1, alg.dim)
        coeffs = coeffs.astype(np.complex128)
        eigs = eigenvalues(regular_representation(alg, coeffs))
        scale = max(1.0, float(np.max(np.abs(eigs))))
        for level in range(DEFAULT_CLUSTER_ESCALATIONS + 1):
            radius = tol.cluster_tol * scale * 10 ** level
            groups = _clusters(eigs, radius)
            try:
                projectors, discs, characters, residual = _table(
                    alg, coeffs, eigs, groups, tol, nodes)
                if alg.field is FieldTag.REAL:
                    kinds, partners = _classify(characters, tol)
                else:
                    kinds, partners = [None] * len(characters), [None] * len(characters)
            except _Rejected as rejection:
                best = min(best, rejection.residual)
                logger.debug(f"character attempt {attempt} radius {radius:.1e} rejected: "
                             f"{rejection}")
                continue
            return _assemble(alg, coeffs, projectors, discs, characters, kinds, partners,
                             residual)
    raise CharacterSeparationFailure("could not separate the characters",
                                     best_residual=None if np.isinf(best) else best,
                                     attempts=retries)


def _assemble(alg, coeffs, projectors, discs, characters, kinds, partners, residual):
    def key(index):
        return tuple((round(v.real, 6), round(v.imag, 6)) for v in characters[index][0])

    order = sorted(range(len(characters)), key=key)
    position = {old: new for new, old in enumerate(order)}
    table = []
    for old in order:
        values, multiplicity = characters[old]
        if kinds[old] is CharacterKind.REAL_VALUED:
            values = values.real.astype(np.complex128)
        partner = None if partners[old] is None else position[partners[old]]
        table.append(Character(tuple(complex(v) for v in values), kinds[old], partner,
                               multiplicity))

    ambient = np.tensordot(coeffs, alg.basis_array, axes=1)
    gap = 0.0
    try:
        for p, (center, radius) in zip(projectors, discs):
            gap = max(gap, max_norm(schur_projector(ambient, center, radius).entries - p))
    except (np.linalg.LinAlgError, ValueError) as error:
        logger.debug(f"Schur cross-check unavailable: {error}")
        gap = None

    kappa = len(table)
    if alg.field is FieldTag.REAL:
        kappa1 = sum(c.kind is CharacterKind.REAL_VALUED for c in table)
        kappa0 = (kappa - kappa1) // 2
    else:
        kappa0 = kappa1 = None
    return CharacterTable(
        field=alg.field,
        characters=tuple(table),
        idempotents=tuple(Matrix(FieldTag.COMPLEX, projectors[old]) for old in order),
        kappa=kappa,
        kappa0=kappa0,
        kappa1=kappa1,
        residual=float(residual),
        uniqueness_gap=gap,
        generic_coeffs=tuple(complex(c) for c in coeffs),
    )
