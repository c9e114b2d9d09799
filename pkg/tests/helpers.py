import numpy as np

from hypertuple.numkit import FieldTag, Matrix


def _spectrum(rng, field, n):
    """Well separated eigenvalues; real spectra mix real values and conjugate pairs."""
    if field is FieldTag.COMPLEX:
        values = 0.6 * (np.arange(n) - (n - 1) / 2) + 1j * rng.uniform(-0.5, 0.5, n)
        return values, np.diag(values)
    pairs = int(rng.integers(0, n // 2 + 1))
    block = np.zeros((n, n))
    for k in range(pairs):
        a, b = 0.8 * k - 1.0, 0.6 + 0.4 * k
        i = 2 * k
        block[i:i + 2, i:i + 2] = [[a, b], [-b, a]]
    for i, value in enumerate(range(2 * pairs, n)):
        block[value, value] = -1.2 + 0.7 * i
    return pairs, block


def random_cyclic_tuple(rng, field, n):
    """
    A commuting pair ``(M, p(M))`` for a random matrix ``M`` with simple spectrum.

    The algebra it generates is the n-dimensional (hence cyclic) algebra of
    polynomials in ``M``. Returns the tuple and the number of conjugate pairs
    (real field) or ``n`` (complex field).

    """
    field = FieldTag.parse(field)
    if field is FieldTag.COMPLEX:
        _, diagonal = _spectrum(rng, field, n)
        similarity = np.eye(n) + 0.1 * (rng.uniform(-1, 1, (n, n))
                                        + 1j * rng.uniform(-1, 1, (n, n)))
        count = n
    else:
        count, diagonal = _spectrum(rng, field, n)
        similarity = np.eye(n) + 0.15 * rng.uniform(-1, 1, (n, n))
    m = similarity @ diagonal @ np.linalg.inv(similarity)
    if field is FieldTag.REAL:
        m = np.real(m)
    coeffs = rng.uniform(-1, 1, n)
    p = sum(c * np.linalg.matrix_power(m, k) for k, c in enumerate(coeffs))
    return [Matrix(field, m), Matrix(field, p)], count
