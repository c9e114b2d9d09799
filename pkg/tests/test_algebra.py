import numpy as np
import pytest
from helpers import random_cyclic_tuple

from hypertuple.algebra import (IDEMPOTENT_TOL, CharacterKind, character_value, close_algebra,
                                commutant, compute_characters, find_cyclic_vector,
                                is_cyclic_vector, regular_representation, same_span,
                                schur_projector)
from hypertuple.construct import gallery
from hypertuple.errors import CharacterSeparationFailure, InvalidInput, NonCommuting
from hypertuple.numkit import FieldTag, Matrix, eigenvalues, max_norm


def diag(*values, field=FieldTag.COMPLEX):
    return Matrix(field, np.diag(values))


def unit(n, i, j):
    array = np.zeros((n, n))
    array[i, j] = 1
    return array


#
# Closure and commutants
#


def test_close_algebra_diagonal():
    alg = close_algebra([diag(1, 2)])
    assert alg.dim == 2
    assert alg.basis[0].allclose(np.eye(2))
    assert alg.contains(diag(5, -3))
    assert not alg.contains(Matrix(FieldTag.COMPLEX, [[0, 1], [0, 0]]))


def test_close_algebra_empty():
    alg = close_algebra([], n=3, field='R')
    assert alg.dim == 1
    assert alg.field is FieldTag.REAL
    with pytest.raises(InvalidInput):
        close_algebra([])


@pytest.mark.parametrize('field', ['R', 'C'])
def test_close_algebra_az(field):
    alg = gallery('az', field).algebra
    assert alg.dim == 3
    assert alg.n == 3
    for b in alg.basis[1:]:
        assert np.linalg.norm(b.entries) == pytest.approx(1.0)


def test_close_algebra_non_commuting():
    a = Matrix(FieldTag.REAL, [[1, 1], [0, 1]])
    b = Matrix(FieldTag.REAL, [[1, 0], [1, 1]])
    with pytest.raises(NonCommuting) as excinfo:
        close_algebra([a, a, b])
    assert excinfo.value.details['pair'] == [0, 2]
    assert excinfo.value.details['norm'] > 0


def test_close_algebra_mixed_members():
    with pytest.raises(InvalidInput):
        close_algebra([diag(1, 2), diag(1, 2, 3)])


def test_structure_constants():
    alg = gallery('jordan_diag', n=3).algebra
    for i, bi in enumerate(alg.basis):
        for j, bj in enumerate(alg.basis):
            product = np.tensordot(alg.structure[i, j], alg.basis_array, axes=1)
            assert max_norm(product - bi.entries @ bj.entries) < 1e-10


@pytest.mark.parametrize('generators, dim', [
    ([Matrix.identity(2)], 4),
    ([diag(1, 2)], 2),
])
def test_commutant_dimension(generators, dim):
    assert len(commutant(close_algebra(generators))) == dim


def test_commutant_of_az_is_itself():
    alg = gallery('az', 'C').algebra
    result = commutant(alg)
    assert len(result) == 3
    assert same_span(result, alg.basis)


def test_same_span():
    assert same_span([diag(1, 0), diag(0, 1)], [diag(1, 1), diag(1, -1)])
    assert not same_span([diag(1, 0)], [diag(0, 1)])


#
# Cyclic vectors
#


def test_cyclic_vector_az():
    alg = gallery('az', 'R').algebra
    assert is_cyclic_vector(alg, [1, 0, 0])
    assert not is_cyclic_vector(alg, [0, 1, 0])
    x = find_cyclic_vector(alg)
    assert x is not None
    assert is_cyclic_vector(alg, x)


def test_cyclic_vector_diagonal():
    alg = gallery('diag', 'C', n=3).algebra
    assert is_cyclic_vector(alg, np.ones(3))
    assert not is_cyclic_vector(alg, [1, 1, 0])


def test_cyclic_vector_too_small():
    assert find_cyclic_vector(close_algebra([Matrix.identity(2)])) is None


def test_find_cyclic_vector_seeded():
    alg = gallery('diag', 'C', n=3).algebra
    np.testing.assert_array_equal(find_cyclic_vector(alg, seed=5), find_cyclic_vector(alg, seed=5))


#
# Regular representation
#


def test_regular_representation_identity():
    alg = gallery('az', 'C').algebra
    coeffs = np.zeros(alg.dim)
    coeffs[0] = 1
    assert regular_representation(alg, coeffs).allclose(np.eye(alg.dim), atol=1e-12)


def test_regular_representation_diagonal():
    alg = gallery('diag', 'C', n=2).algebra
    coeffs, _ = alg.coordinates(diag(1, 2))
    values = eigenvalues(regular_representation(alg, coeffs))
    np.testing.assert_allclose(sorted(values.real), [1, 2], atol=1e-10)


def test_regular_representation_nilpotent():
    alg = gallery('az', 'C').algebra
    nilpotent = Matrix(FieldTag.COMPLEX, unit(3, 1, 0))
    coeffs, residual = alg.coordinates(nilpotent)
    assert residual < 1e-12
    rep = regular_representation(alg, coeffs).array
    assert max_norm(np.linalg.matrix_power(rep, 3)) < 1e-10
    assert max_norm(eigenvalues(Matrix(FieldTag.COMPLEX, rep))) < 1e-6


def test_regular_representation_wrong_size():
    alg = gallery('az', 'C').algebra
    with pytest.raises(InvalidInput):
        regular_representation(alg, [1, 0])


#
# Characters
#


def check_idempotents(table, n):
    total = sum(p.entries for p in table.idempotents)
    assert max_norm(total - np.eye(n)) < IDEMPOTENT_TOL
    for i, p in enumerate(table.idempotents):
        assert max_norm(p.entries @ p.entries - p.entries) < IDEMPOTENT_TOL
        for q in table.idempotents[i + 1:]:
            assert max_norm(p.entries @ q.entries) < IDEMPOTENT_TOL


def test_characters_diagonal():
    alg = gallery('diag', 'C', n=3).algebra
    table = compute_characters(alg)
    assert table.kappa == 3
    assert table.counts() == {'kappa': 3}
    check_idempotents(table, 3)
    found = sorted(tuple(np.round(np.diag(p.entries).real).astype(int))
                   for p in table.idempotents)
    assert found == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert all(c.multiplicity == 1 for c in table.characters)
    assert table.uniqueness_gap < 1e-6


def test_characters_jordan_block():
    table = compute_characters(gallery('jordan2', 'C').algebra)
    assert table.kappa == 1
    assert table.idempotents[0].allclose(np.eye(2), atol=1e-8)


def test_characters_rotation():
    table = compute_characters(gallery('rotation').algebra)
    assert table.counts() == {'kappa0': 1, 'kappa1': 0}
    assert table.pairs() == [(0, 1)]
    assert table.real_indices() == []
    assert all(c.kind is CharacterKind.COMPLEX_PAIR_MEMBER for c in table.characters)
    check_idempotents(table, 2)


@pytest.mark.parametrize('field, counts', [
    ('C', {'kappa': 1}),
    ('R', {'kappa0': 0, 'kappa1': 1}),
])
def test_characters_az(field, counts):
    table = compute_characters(gallery('az', field).algebra)
    assert table.counts() == counts


def test_character_values():
    alg = gallery('az', 'C').algebra
    table = compute_characters(alg)
    identity, _ = alg.coordinates(np.eye(3))
    assert character_value(table, 0, identity) == pytest.approx(1)
    z = 2 * np.eye(3) + 9 * unit(3, 1, 0) + 4 * unit(3, 2, 0)
    coeffs, _ = alg.coordinates(z)
    assert character_value(table, 0, coeffs) == pytest.approx(2)
    with pytest.raises(InvalidInput):
        character_value(table, 1, coeffs)


def test_character_values_diagonal():
    alg = gallery('diag', 'C', n=2).algebra
    table = compute_characters(alg)
    coeffs, _ = alg.coordinates(diag(5, 7))
    values = sorted(character_value(table, i, coeffs).real for i in range(2))
    assert values == pytest.approx([5, 7])


def test_characters_seeded():
    alg = gallery('diag', 'C', n=3).algebra
    first, second = compute_characters(alg, seed=3), compute_characters(alg, seed=3)
    assert first.generic_coeffs == second.generic_coeffs
    assert [c.values for c in first.characters] == [c.values for c in second.characters]


def test_characters_no_attempts():
    with pytest.raises(CharacterSeparationFailure) as excinfo:
        compute_characters(gallery('diag', 'C', n=2).algebra, retries=0)
    assert excinfo.value.stage == 'algebra'


def test_schur_projector():
    a = diag(1, 1, 5)
    p = schur_projector(a, 1.0, 1.0)
    np.testing.assert_allclose(p.entries, np.diag([1, 1, 0]), atol=1e-12)
    assert schur_projector(a, 10.0, 1.0).allclose(np.zeros((3, 3)))


@pytest.mark.parametrize('seed', range(10))
@pytest.mark.parametrize('field', ['R', 'C'])
def test_characters_random_cyclic(field, seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 5
    tuple_, count = random_cyclic_tuple(rng, field, n)
    alg = close_algebra(tuple_)
    assert alg.dim == n
    assert find_cyclic_vector(alg) is not None
    table = compute_characters(alg, seed=seed)
    check_idempotents(table, n)
    if field == 'C':
        assert 1 <= table.kappa <= n
        assert table.kappa == count
    else:
        assert 1 <= 2 * table.kappa0 + table.kappa1 <= n
        assert table.counts() == {'kappa0': count, 'kappa1': n - 2 * count}


def nilpotent_parts(alg, table):
    """``b - sum_chi chi(b) p_chi`` for every basis element ``b``."""
    for i, b in enumerate(alg.basis):
        semisimple = sum(c.values[i] * p.entries
                         for c, p in zip(table.characters, table.idempotents))
        yield b.entries, b.entries - semisimple


def check_nilpotent_parts(alg, table, atol):
    for b, rest in nilpotent_parts(alg, table):
        scale = max(1.0, max_norm(b)) ** alg.n
        assert max_norm(np.linalg.matrix_power(rest, alg.n)) <= atol * scale


@pytest.mark.parametrize('seed', range(10))
@pytest.mark.parametrize('field', ['R', 'C'])
def test_nilpotent_parts_random_cyclic(field, seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 5
    tuple_, _ = random_cyclic_tuple(rng, field, n)
    alg = close_algebra(tuple_)
    check_nilpotent_parts(alg, compute_characters(alg, seed=seed), 1e-8)


@pytest.mark.parametrize('name, field', [
    ('jordan2', 'C'),
    ('az', 'C'),
    ('az', 'R'),
    ('jordan_diag', 'C'),
])
def test_nilpotent_parts_gallery(name, field):
    alg = gallery(name, field).algebra
    table = compute_characters(alg)
    check_nilpotent_parts(alg, table, 1e-6)
    # these algebras are not semisimple
    assert max(max_norm(rest) for _, rest in nilpotent_parts(alg, table)) > 0.1
