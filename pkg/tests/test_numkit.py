import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hypertuple.errors import InvalidInput, NumericalFailure, SchemaError, SingularMatrix
from hypertuple.numkit import (DEFAULT_TOLERANCE, FieldTag, Matrix, Tolerance,
                               check_schema_version, commutator_norm, eigenvalues, is_commuting,
                               krylov_rank, mat_inverse, mat_mul, max_norm, nullspace_basis,
                               numerical_rank, realify, vector_from_json, vector_to_json)

#: Hypothesis profile shared by the property tests in this module.
PROPERTY = settings(deadline=None, derandomize=True, max_examples=50)

#
# FieldTag and Tolerance
#


@pytest.mark.parametrize('text, expected', [
    ('R', FieldTag.REAL),
    ('r', FieldTag.REAL),
    ('real', FieldTag.REAL),
    ('C', FieldTag.COMPLEX),
    (' complex ', FieldTag.COMPLEX),
    (FieldTag.COMPLEX, FieldTag.COMPLEX),
])
def test_field_parse(text, expected):
    assert FieldTag.parse(text) is expected


@pytest.mark.parametrize('text', ['Q', '', 'quaternion'])
def test_field_parse_invalid(text):
    with pytest.raises(InvalidInput):
        FieldTag.parse(text)


def test_tolerance_parse_overrides():
    tol = Tolerance.parse("eq=1e-6, cluster=1e-3")
    assert tol.eq_tol == 1e-6
    assert tol.cluster_tol == 1e-3
    assert tol.rank_tol == DEFAULT_TOLERANCE.rank_tol


@pytest.mark.parametrize('text', [None, '', '   '])
def test_tolerance_parse_empty(text):
    base = Tolerance(eq_tol=1e-3)
    assert Tolerance.parse(text, base) is base


@pytest.mark.parametrize('text', ['eq', 'eq=foo', 'weird=1e-3', 'eq=-1'])
def test_tolerance_parse_invalid(text):
    with pytest.raises(InvalidInput):
        Tolerance.parse(text)


@pytest.mark.parametrize('name', ['eq_tol', 'rank_tol', 'cluster_tol'])
def test_tolerance_positive(name):
    with pytest.raises(InvalidInput):
        Tolerance(**{name: 0.0})


#
# Matrix
#


def test_matrix_read_only():
    m = Matrix(FieldTag.REAL, [[1, 2], [3, 4]])
    assert m.n == 2
    assert m.entries.dtype == np.complex128
    with pytest.raises(ValueError):
        m.entries[0, 0] = 5
    copy = m.array
    assert copy.dtype == np.float64
    copy[0, 0] = 5
    assert m.entries[0, 0] == 1


@pytest.mark.parametrize('entries', [
    [[1, 2, 3], [4, 5, 6]],
    [],
    [[np.nan]],
    [[np.inf, 0], [0, 1]],
])
def test_matrix_invalid(entries):
    with pytest.raises(InvalidInput):
        Matrix(FieldTag.COMPLEX, entries)


def test_matrix_real_rejects_imaginary():
    with pytest.raises(InvalidInput):
        Matrix(FieldTag.REAL, [[1j]])
    assert Matrix.from_array(np.array([[1j]])).field is FieldTag.COMPLEX
    assert Matrix.from_array(np.eye(2)).field is FieldTag.REAL


def test_matrix_json():
    m = Matrix(FieldTag.COMPLEX, [[1 + 2j, 0], [0.5, -1j]])
    data = json.loads(json.dumps(m.to_json()))
    assert data['field'] == 'C'
    assert data['n'] == 2
    assert data['entries'][0][0] == [1.0, 2.0]
    assert Matrix.from_json(data).allclose(m, atol=0)


@pytest.mark.parametrize('data, path', [
    ([1, 2], '$'),
    ({'field': 'C', 'n': 1}, '$'),
    ({'field': 'H', 'n': 1, 'entries': [[[1, 0]]]}, '$.field'),
    ({'field': 'C', 'n': 0, 'entries': []}, '$.n'),
    ({'field': 'C', 'n': True, 'entries': [[[1, 0]]]}, '$.n'),
    ({'field': 'C', 'n': 2, 'entries': [[[1, 0], [0, 0]]]}, '$.entries'),
    ({'field': 'C', 'n': 2, 'entries': [[[1, 0], [0, 0]], [[1, 0]]]}, '$.entries[1]'),
    ({'field': 'C', 'n': 1, 'entries': [[1]]}, '$.entries[0][0]'),
    ({'field': 'C', 'n': 1, 'entries': [[[1, 'x']]]}, '$.entries[0][0]'),
    ({'field': 'R', 'n': 1, 'entries': [[[1, 1]]]}, '$.entries[0][0]'),
    ({'field': 'C', 'n': 1, 'entries': [[[float('nan'), 0]]]}, '$.entries'),
])
def test_matrix_from_json_paths(data, path):
    with pytest.raises(SchemaError) as excinfo:
        Matrix.from_json(data)
    assert excinfo.value.path == path
    assert excinfo.value.to_dict()['details']['path'] == path
    assert excinfo.value.message.startswith(path + ': ')


def test_matrix_from_json_nested_path():
    with pytest.raises(SchemaError) as excinfo:
        Matrix.from_json({'field': 'C', 'n': 1, 'entries': [[[1]]]}, path='$.operators[3]')
    assert excinfo.value.path == '$.operators[3].entries[0][0]'


def test_vector_json():
    vector = np.array([1, 2j, -0.5 + 0.25j])
    data = vector_to_json(vector)
    assert data[1] == [0.0, 2.0]
    np.testing.assert_array_equal(vector_from_json(data), vector)
    np.testing.assert_array_equal(vector_from_json({'entries': [1, [0, 2]]}), [1, 2j])


@pytest.mark.parametrize('data, path', [
    ([], '$'),
    ({}, '$'),
    ([1, 'a'], '$[1]'),
    ({'entries': [[1, 2, 3]]}, '$.entries[0]'),
])
def test_vector_from_json_invalid(data, path):
    with pytest.raises(SchemaError) as excinfo:
        vector_from_json(data)
    assert excinfo.value.path == path


#
# Products, inverses and spectra
#


def test_mat_mul_mismatch():
    a = Matrix.identity(2, FieldTag.REAL)
    with pytest.raises(InvalidInput):
        mat_mul(a, Matrix.identity(3, FieldTag.REAL))
    with pytest.raises(InvalidInput):
        mat_mul(a, Matrix.identity(2, FieldTag.COMPLEX))
    assert (a @ a).allclose(a)


def test_mat_inverse_singular():
    with pytest.raises(SingularMatrix) as excinfo:
        mat_inverse(Matrix(FieldTag.REAL, [[1, 2], [2, 4]]))
    assert excinfo.value.details['min_pivot'] < excinfo.value.details['threshold']
    assert excinfo.value.stage == 'numkit'


def test_mat_inverse_threshold_scales():
    # the pivot threshold is relative to the largest entry
    a = Matrix(FieldTag.REAL, [[1e6, 0], [0, 1e-3]])
    with pytest.raises(SingularMatrix):
        mat_inverse(a)
    b = Matrix(FieldTag.REAL, [[1, 0], [0, 1e-3]])
    assert mat_inverse(b).allclose(np.diag([1, 1e3]))


@PROPERTY
@given(arrays(np.float64, (4, 4), elements=st.floats(-1, 1)))
def test_mat_inverse_residual(noise):
    a = Matrix(FieldTag.REAL, noise + 8 * np.eye(4))
    inverse = mat_inverse(a)
    assert inverse.field is FieldTag.REAL
    assert max_norm(a.array @ inverse.array - np.eye(4)) < 1e-12


def test_eigenvalues_jordan_block():
    values = eigenvalues(Matrix(FieldTag.REAL, [[2, 1], [0, 2]]))
    np.testing.assert_allclose(values, [2, 2])


@PROPERTY
@given(arrays(np.float64, (3, 3), elements=st.floats(-2, 2)),
       arrays(np.float64, (3, 3), elements=st.floats(-0.2, 0.2)))
def test_eigenvalues_similarity_invariant(a, noise):
    s = np.eye(3) + noise
    similar = s @ a @ np.linalg.inv(s)
    original = np.poly(eigenvalues(Matrix(FieldTag.REAL, a)))
    transformed = np.poly(eigenvalues(Matrix(FieldTag.REAL, similar)))
    np.testing.assert_allclose(transformed, original, atol=1e-8)


#
# Rank and nullspace
#


def test_nullspace_basis():
    basis = nullspace_basis([np.array([1.0, 1.0, 0.0])])
    assert len(basis) == 2
    for vector in basis:
        assert abs(vector[0] + vector[1]) < 1e-12
    assert len(nullspace_basis([], length=3)) == 3
    with pytest.raises(InvalidInput):
        nullspace_basis([])
    with pytest.raises(InvalidInput):
        nullspace_basis([np.ones(2), np.ones(3)])


@pytest.mark.parametrize('scale', [1e-6, 1.0, 1e6])
def test_numerical_rank_scale_invariant(scale):
    vectors = scale * np.array([[1.0, 0, 0], [0, 1.0, 0], [1.0, 1.0, 0]])
    assert numerical_rank(vectors) == 2
    assert numerical_rank(np.zeros((2, 3))) == 0


@pytest.mark.parametrize('x, expected', [
    ([1, 1, 1], 3),
    ([1, 0, 0], 1),
    ([1, 1, 0], 2),
])
def test_krylov_rank(x, expected):
    a = Matrix(FieldTag.REAL, np.diag([1.0, 2.0, 3.0]))
    assert krylov_rank(a, np.array(x, dtype=float)) == expected


def test_krylov_rank_length_mismatch():
    with pytest.raises(InvalidInput):
        krylov_rank(Matrix.identity(2), np.ones(3))


def test_commuting():
    a = Matrix(FieldTag.REAL, [[1, 1], [0, 1]])
    b = Matrix(FieldTag.REAL, [[2, 3], [0, 2]])
    c = Matrix(FieldTag.REAL, [[0, 0], [1, 0]])
    assert commutator_norm(a, b) == 0
    assert is_commuting(a, b)
    assert not is_commuting(a, c)


def test_realify():
    np.testing.assert_array_equal(realify(np.array([1 + 1e-12j, 2]), 1e-9), [1, 2])
    with pytest.raises(NumericalFailure):
        realify(np.array([1 + 1e-3j]), 1e-9)


#
# Schema versions
#


@pytest.mark.parametrize('data', [{}, {'schema_version': '1.0'}, {'schema_version': '1.3'}])
def test_schema_version_accepted(data):
    assert check_schema_version(data).major == 1


@pytest.mark.parametrize('data, path', [
    ({'schema_version': '2.0'}, '$.schema_version'),
    ({'schema_version': 'one'}, '$.schema_version'),
    ([], '$'),
])
def test_schema_version_rejected(data, path):
    with pytest.raises(SchemaError) as excinfo:
        check_schema_version(data)
    assert excinfo.value.path == path
