import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isoent import highdim as hd
from isoent.linalg import orthonormality_residual, schmidt_spectrum, tangles
from isoent.sampling import haar_unitary, make_rng

dims = st.integers(min_value=2, max_value=6)
angles = st.floats(min_value=0, max_value=2 * np.pi)


def test_cyclic_squares():
    np.testing.assert_array_equal(hd.latin_square(2).table, [[0, 1], [1, 0]])
    np.testing.assert_array_equal(hd.latin_square(3).table, [[0, 1, 2], [1, 2, 0], [2, 0, 1]])


@given(dims, st.integers(min_value=0, max_value=2**32 - 1))
def test_seeded_squares_are_latin(d, seed):
    ls = hd.latin_square(d, "seeded", seed)
    assert ls.d == d
    np.testing.assert_array_equal(hd.latin_square(d, "seeded", seed).table, ls.table)


def test_latin_square_validation():
    with pytest.raises(ValueError):
        hd.LatinSquare(2, [[0, 1], [0, 1]])
    with pytest.raises(ValueError):
        hd.latin_square(1)
    with pytest.raises(ValueError):
        hd.latin_square(3, "magic")


def test_latin_square_csv():
    assert hd.latin_square(3).to_csv() == "0,1,2\n1,2,0\n2,0,1\n"


@given(dims, angles)
def test_robust_hadamard_structure(d, chi):
    r = hd.robust_hadamard(d, chi)
    m = np.abs(r.matrix) ** 2
    assert orthonormality_residual(r.matrix) <= 1e-10
    np.testing.assert_allclose(np.diag(m), r.a, atol=1e-10)
    np.testing.assert_allclose(m[~np.eye(d, dtype=bool)], r.b, atol=1e-10)
    assert r.a + (d - 1) * r.b == pytest.approx(1, abs=1e-10)


def test_robust_hadamard_examples():
    r = hd.robust_hadamard(3, 0.0)
    np.testing.assert_allclose(r.matrix, np.eye(3), atol=1e-15)
    assert (r.a, r.b) == pytest.approx((1, 0))
    assert (hd.robust_hadamard(2, np.pi / 2).a, hd.robust_hadamard(2, np.pi / 2).b) == pytest.approx((0.5, 0.5))
    r = hd.robust_hadamard(3, 2 * np.pi / 3)
    assert (r.a, r.b) == pytest.approx((1 / 3, 1 / 3))


@pytest.mark.parametrize("d", range(2, 7))
@pytest.mark.parametrize("method", ["cyclic", "seeded"])
def test_hadamard_shift_multiply_trace_orthogonal(d, method):
    ls = hd.latin_square(d, method, seed=d)
    b = hd.shift_multiply(ls, [hd.flat_hadamard(d)] * d)
    assert b.unitary_flag
    np.testing.assert_allclose(b.trace_gram(), d * np.eye(d * d), atol=1e-10)
    for x in b.operators.reshape(-1, d, d):
        np.testing.assert_allclose(x.conj().T @ x, np.eye(d), atol=1e-10)


def test_monomial_structure():
    ls = hd.latin_square(3)
    h = hd.robust_hadamard(3, 1.0).matrix
    b = hd.shift_multiply(ls, [h, h, h])
    for i in range(3):
        for j in range(3):
            x = b.operators[i, j]
            for k in range(3):
                nz = np.flatnonzero(np.abs(x[:, k]) > 0)
                assert list(nz) == [ls(j, k)]
                assert x[ls(j, k), k] == pytest.approx(np.sqrt(3) * h[i, k])


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_robust_construction_is_iso_schmidt(d):
    r = hd.robust_hadamard(d, 1.0)
    b = hd.shift_multiply(hd.latin_square(d), [r.matrix] * d)
    assert not b.unitary_flag
    v = b.vectors()
    assert orthonormality_residual(v) <= 1e-10
    spec = hd.schmidt_spectra(v, d)
    expected = np.sort([np.sqrt(r.a)] + [np.sqrt(r.b)] * (d - 1))[::-1]
    np.testing.assert_allclose(spec, np.broadcast_to(expected, spec.shape), atol=1e-10)


def test_shift_multiply_shape_errors():
    with pytest.raises(ValueError):
        hd.shift_multiply(hd.latin_square(3), [np.eye(3)] * 2)
    with pytest.raises(ValueError):
        hd.shift_multiply(hd.latin_square(3), [np.eye(2)] * 3)


@given(angles)
def test_two_qubit_linear_entropy_matches_tangle(chi):
    r = hd.robust_hadamard(2, chi)
    v = hd.shift_multiply(hd.latin_square(2), [r.matrix] * 2).vectors()
    mu = np.arccos(np.sqrt(r.a))
    ent = hd.linear_entropy(hd.schmidt_spectra(v, 2)[0])
    assert ent == pytest.approx(np.sin(2 * mu) ** 2, abs=1e-10)
    np.testing.assert_allclose(tangles(v), ent, atol=1e-10)


def test_vectorize_examples():
    d = 3
    spec = schmidt_spectrum(hd.vectorize(np.eye(d)), (d, d))
    np.testing.assert_allclose(spec, 1 / np.sqrt(d), atol=1e-15)
    x = np.zeros((d, d))
    x[0, 0] = np.sqrt(d)
    np.testing.assert_allclose(schmidt_spectrum(hd.vectorize(x), (d, d)), [1, 0, 0], atol=1e-15)


def test_conditional_product_basis():
    np.testing.assert_allclose(hd.conditional_product_basis([np.eye(3)] * 3), np.eye(9))
    rng = make_rng(4)
    for d in (2, 3, 4):
        b = hd.conditional_product_basis([haar_unitary(d, rng) for _ in range(d)])
        assert orthonormality_residual(b) <= 1e-12
        spec = hd.schmidt_spectra(b, d)
        np.testing.assert_allclose(spec[:, 0], 1, atol=1e-12)
        np.testing.assert_allclose(spec[:, 1:], 0, atol=1e-7)
    with pytest.raises(ValueError):
        hd.conditional_product_basis([np.eye(2), np.ones((2, 2))])


def test_skewed_product_analogue():
    b = hd.conditional_product_basis([np.eye(2), hd.flat_hadamard(2)])
    np.testing.assert_allclose(tangles(b), 0, atol=1e-15)


def test_report_fields():
    r = hd.report(hd.shift_multiply(hd.latin_square(4), [hd.flat_hadamard(4)] * 4), "hadamard")
    assert r.orthonormality <= 1e-10 and r.trace_orthogonality <= 1e-10
    assert r.spectrum_spread <= 1e-10
    np.testing.assert_allclose(r.spectrum, 0.5, atol=1e-12)
