"""
Exponential and logarithm inside a commutative matrix algebra, generators
of the kernel of exp, and the sign group of a real algebra.

"""
import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from hypertuple.algebra import character_value, compute_characters
from hypertuple.errors import (ComplexFieldError, InvalidInput, NoRealLog, NotInAlgebra,
                               NotInvertible, NumericalFailure, RayHitsSpectrum)
from hypertuple.numkit import DEFAULT_SEED, DEFAULT_TOLERANCE, FieldTag, Matrix, max_norm, realify

#: Number of candidate ray directions sampled by the automatic branch cut.
BRANCH_SAMPLES = 360

#: Accepted residual of exp(log(a)) against a (relative to max(1, |a|)).
ROUNDTRIP_TOL = 1e-7

#: Accepted residual of exp(B) against the identity for kernel generators.
KERNEL_TOL = 1e-6

#: Accepted imaginary residue when truncating a result to the reals.
REAL_TRUNCATION_TOL = 1e-7

#: Accepted projection residual for algebra membership.
MEMBERSHIP_TOL = 1e-8

__all__ = [
    "AUTO",
    "BranchCut",
    "ExpPreimage",
    "SignGroup",
    "alg_exp",
    "alg_log",
    "alg_sqrt",
    "has_exp_preimage",
    "ker_exp_generators",
    "sign_decomposition",
    "sign_group",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BranchCut:
    """
    The excluded ray ``{t exp(i angle) : t >= 0}`` of a logarithm branch.

    The branch takes arguments in ``(angle - 2 pi, angle)``.

    """

    angle: float

    def __post_init__(self):
        angle = float(self.angle)
        if not -np.pi < angle <= np.pi:
            raise InvalidInput("branch cut angle must lie in (-pi, pi]", angle=angle)
        object.__setattr__(self, "angle", angle)

    def distance(self, z):
        """Euclidean distance from ``z`` to the ray."""
        direction = np.exp(1j * self.angle)
        along = (np.conj(direction) * z).real
        if along <= 0:
            return abs(z)
        return abs((np.conj(direction) * z).imag)

    def angular_distance(self, z):
        return abs(np.angle(np.exp(1j * (self.angle - np.angle(z)))))

    def log(self, z):
        """The logarithm of ``z`` on this branch."""
        turn = (self.angle - np.angle(z)) % (2 * np.pi)
        return complex(np.log(abs(z)), self.angle - turn)


#: Marker for automatic branch selection.
AUTO = "auto"

#: The principal branch (cut along the negative reals).
PRINCIPAL = BranchCut(np.pi)


def _auto_cut(values):
    """The sampled ray maximising the minimum angular distance to ``values``."""
    angles = -np.pi + 2 * np.pi * (np.arange(BRANCH_SAMPLES) + 1) / BRANCH_SAMPLES
    best, best_score = None, -1.0
    for angle in angles:
        cut = BranchCut(angle)
        score = min(cut.angular_distance(z) for z in values)
        if score > best_score:
            best, best_score = cut, score
    logger.debug(f"automatic branch cut at angle {best.angle:.4f}")
    return best


def alg_exp(a):
    """
    The matrix exponential ``sum a^n / n!`` (scaling and squaring).

    Raises
    ------
    NumericalFailure
        If the result overflows.

    """
    with np.errstate(over="ignore", invalid="ignore"):
        result = scipy.linalg.expm(a.array)
    if not np.all(np.isfinite(result)):
        raise NumericalFailure("matrix exponential overflowed", stage="expmap",
                               norm=max_norm(a.entries))
    return Matrix(a.field, result)


def _membership(alg, a):
    coeffs, residual = alg.coordinates(a)
    if residual > MEMBERSHIP_TOL:
        raise NotInAlgebra("matrix is not an element of the algebra", residual=residual)
    return coeffs.astype(np.complex128)


def _character_values(table, coeffs):
    return np.array([character_value(table, i, coeffs) for i in range(len(table.characters))])


def _check_invertible(values, tol):
    scale = max(1.0, float(np.max(np.abs(values))))
    smallest = float(np.min(np.abs(values)))
    if smallest <= tol.rank_tol * scale:
        raise NotInvertible("element has a zero character value", min_value=smallest)


def _table(alg, table, tol, seed):
    return compute_characters(alg, tol, seed) if table is None else table


def alg_log(alg, a, cut=AUTO, table=None, tol=DEFAULT_TOLERANCE, seed=DEFAULT_SEED):
    """
    A logarithm of ``a`` inside ``alg``.

    With ``a = sum_chi (chi(a) p_chi + n_chi)`` and nilpotent
    ``n_chi = (a - sum chi(a) p_chi) p_chi`` the result is
    ``sum_chi [log chi(a) p_chi + sum_j (-1)^(j+1) (n_chi / chi(a))^j / j]``.

    Parameters
    ----------
    alg : CommutativeAlgebra
    a : Matrix
        An invertible element of ``alg``.
    cut : BranchCut or "auto"
        Branch of the scalar logarithm. Real algebras always use the
        conjugation symmetric principal branch, so only ``"auto"`` or the
        principal cut are accepted for them.
    table : CharacterTable, optional
        Computed on demand when not given.

    Returns
    -------
    Matrix
        ``b`` in ``alg`` with ``exp(b) = a``.

    Raises
    ------
    NotInAlgebra, NotInvertible, RayHitsSpectrum, NoRealLog

    """
    coeffs = _membership(alg, a)
    table = _table(alg, table, tol, seed)
    values = _character_values(table, coeffs)
    _check_invertible(values, tol)

    if alg.field is FieldTag.REAL:
        if cut != AUTO and cut != PRINCIPAL:
            raise InvalidInput("a real algebra only supports the principal logarithm",
                               angle=getattr(cut, "angle", cut))
        negative = [i for i in table.real_indices() if values[i].real <= 0]
        if negative:
            raise NoRealLog("element has a non-positive real character value",
                            characters=negative,
                            values=[values[i].real for i in negative])
        logs = np.log(values.astype(np.complex128))
        for i, j in table.pairs():
            logs[j] = np.conj(logs[i])
    else:
        if cut == AUTO:
            cut = _auto_cut(values)
        elif not isinstance(cut, BranchCut):
            raise InvalidInput("cut must be a BranchCut or 'auto'", cut=cut)
        else:
            distance = min(cut.distance(z) for z in values)
            if distance < tol.cluster_tol:
                raise RayHitsSpectrum("branch cut ray meets the spectrum",
                                      angle=cut.angle, distance=distance)
        logs = np.array([cut.log(z) for z in values])

    array = a.entries
    idempotents = [p.entries for p in table.idempotents]
    semisimple = sum(z * p for z, p in zip(values, idempotents))
    result = np.zeros_like(array, dtype=np.complex128)
    for z, log_z, p in zip(values, logs, idempotents):
        result += log_z * p
        nilpotent = (array - semisimple) @ p / z
        power = np.eye(alg.n, dtype=np.complex128)
        for j in range(1, alg.dim):
            power = power @ nilpotent
            result += (-1) ** (j + 1) * power / j

    if alg.field is FieldTag.REAL:
        result = Matrix(FieldTag.REAL,
                        realify(result, REAL_TRUNCATION_TOL * max(1.0, max_norm(result))))
    else:
        result = Matrix(FieldTag.COMPLEX, result)
    error = max_norm(alg_exp(result).entries - array)
    if error > ROUNDTRIP_TOL * max(1.0, max_norm(array)):
        raise NumericalFailure("logarithm does not exponentiate back", stage="expmap",
                               residual=error)
    return result


def alg_sqrt(alg, a, table=None, tol=DEFAULT_TOLERANCE, seed=DEFAULT_SEED):
    """
    A square root ``c = exp(log(a) / 2)`` of ``a`` inside ``alg``.

    Exists exactly when ``a`` lies in ``exp(alg)``.

    """
    b = alg_log(alg, a, AUTO, table, tol, seed)
    return alg_exp(Matrix(b.field, b.entries / 2))


def ker_exp_generators(alg, table):
    """
    Linearly independent generators of the kernel of exp on ``alg``.

    Complex algebras give ``2 pi i p_chi`` for every character; real
    algebras give the real matrices ``2 pi i (p_j - p_partner)`` for every
    conjugate pair.

    """
    eye = np.eye(alg.n)
    if alg.field is FieldTag.COMPLEX:
        arrays = [2j * np.pi * p.entries for p in table.idempotents]
        generators = [Matrix(FieldTag.COMPLEX, array) for array in arrays]
    else:
        generators = []
        for i, j in table.pairs():
            array = 2j * np.pi * (table.idempotents[i].entries - table.idempotents[j].entries)
            generators.append(Matrix(FieldTag.REAL, realify(array, REAL_TRUNCATION_TOL)))
    for generator in generators:
        error = max_norm(alg_exp(generator).entries - eye)
        if error > KERNEL_TOL:
            raise NumericalFailure("kernel generator does not exponentiate to I",
                                   stage="expmap", residual=error)
    return generators


@dataclass(frozen=True)
class SignGroup:
    """
    The group of involutions ``I - 2 p_r`` over the real characters ``r``.

    It is isomorphic to ``Z_2^m`` with ``m = kappa1``.

    """

    generators: Tuple[Matrix, ...]
    n: int

    @property
    def m(self):
        return len(self.generators)

    def element(self, bits):
        """The product of the generators selected by ``bits``."""
        if len(bits) != self.m:
            raise InvalidInput("wrong number of bits", m=self.m, count=len(bits))
        result = np.eye(self.n)
        for bit, generator in zip(bits, self.generators):
            if bit:
                result = result @ generator.array
        return Matrix(FieldTag.REAL, result)

    def elements(self):
        """All ``2^m`` elements, indexed by their bit tuples."""
        return {bits: self.element(bits) for bits in itertools.product((0, 1), repeat=self.m)}


def sign_group(alg, table):
    """
    The sign group of a real algebra.

    Raises
    ------
    ComplexFieldError
        For complex algebras.

    """
    if alg.field is not FieldTag.REAL:
        raise ComplexFieldError("the sign group is only defined for real algebras")
    eye = np.eye(alg.n)
    generators = []
    for i in table.real_indices():
        array = realify(eye - 2 * table.idempotents[i].entries, REAL_TRUNCATION_TOL)
        error = max_norm(array @ array - eye)
        if error > REAL_TRUNCATION_TOL:
            raise NumericalFailure("sign generator is not an involution", stage="expmap",
                                   residual=error)
        generators.append(Matrix(FieldTag.REAL, array))
    return SignGroup(tuple(generators), alg.n)


@dataclass(frozen=True)
class ExpPreimage:
    exists: bool
    witness: Optional[Matrix]
    reason: str

    def __bool__(self):
        return self.exists

    def to_json(self):
        return dict(exists=self.exists, reason=self.reason,
                    witness=None if self.witness is None else self.witness.to_json())


def has_exp_preimage(alg, a, table, tol=DEFAULT_TOLERANCE):
    """
    Whether ``a = exp(b)`` for some ``b`` in ``alg``, with ``b`` as witness.

    True iff ``a`` is invertible and every real-valued character is
    positive on it (always true for complex algebras once invertible).

    """
    coeffs = _membership(alg, a)
    values = _character_values(table, coeffs)
    try:
        _check_invertible(values, tol)
    except NotInvertible:
        return ExpPreimage(False, None, "not invertible")
    if alg.field is FieldTag.REAL:
        negative = [i for i in table.real_indices() if values[i].real <= 0]
        if negative:
            return ExpPreimage(False, None, "negative real character value")
    return ExpPreimage(True, alg_log(alg, a, AUTO, table, tol), "in exp image")


def sign_decomposition(alg, a, table, tol=DEFAULT_TOLERANCE):
    """
    Split an invertible element of a real algebra as ``a = g * exp(b)``.

    Returns
    -------
    g : Matrix
        The sign group element flipping every negative real character.
    ga : Matrix
        ``g @ a``, an element of ``exp(alg)``.
    b : Matrix
        Its logarithm.

    """
    group = sign_group(alg, table)
    coeffs = _membership(alg, a)
    values = _character_values(table, coeffs)
    _check_invertible(values, tol)
    bits = tuple(int(values[i].real < 0) for i in table.real_indices())
    g = group.element(bits)
    ga = Matrix(FieldTag.REAL, g.array @ a.array)
    return g, ga, alg_log(alg, ga, AUTO, table, tol)
