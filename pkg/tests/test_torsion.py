import numpy as np
import pytest

from archheight import (Place, ProjectivePoint, RootFindingFailure, bound_constants, eigenform_y,
                        from_a_invariants, kernel_poly, torsion_constants, translation_matrix, two_torsion_x)
from archheight.curve import delta_components
from archheight.oracle import AffinePoint, add_points, lift_x
from archheight.torsion import TranslationMatrix
from conftest import CURVE_11A2, ELKIES, random_complex_curve, random_real_curve, random_sphere_points

X3X = [0, 0, 0, 1, 0]


def as_array(m):
    return np.array([[complex(v) for v in row] for row in m])


def linear_solve_amat(c, xt):
    """a_ij from the eigenform coefficients in the monomial basis (x1^2, x1 x2, x2^2)."""
    cols = []
    for x in xt:
        _, df = kernel_poly(c, x)
        cols.append([1, -2 * x, -(df - x * x)])
    Y = np.array(cols, dtype=complex).T
    return np.array([np.linalg.solve(Y, [1, 0, 0]), np.linalg.solve(Y, [0, 0, 1])])


def test_real_place_ordering():
    c = from_a_invariants(X3X)
    assert two_torsion_x(c, Place.REAL) == (0, 1j, -1j)


def test_complex_place_lexicographic():
    c = from_a_invariants(X3X)
    assert two_torsion_x(c, Place.COMPLEX) == (-1j, 0, 1j)


def test_three_real_roots_sorted():
    c = from_a_invariants([0, 0, 0, -1, 0])
    xt = two_torsion_x(c, Place.REAL)
    assert np.allclose([complex(x) for x in xt], [-1, 0, 1], atol=1e-15)
    assert all(x.imag == 0 for x in xt)


def test_real_place_needs_real_model():
    c = from_a_invariants([0, 0, 0, 1 + 1j, 0])
    with pytest.raises(ValueError):
        two_torsion_x(c, Place.REAL)


def test_roots_polished(rng):
    for _ in range(50):
        c = random_complex_curve(rng)
        scale = max(1, *(abs(v) for v in c.kernel_coefficients()))
        xt = two_torsion_x(c, Place.COMPLEX)
        for x in xt:
            assert abs(kernel_poly(c, x)[0]) <= 1e-13 * (1 + abs(x)) ** 3 * scale
        assert len({complex(x) for x in xt}) == 3


def test_elkies_roots_polished():
    c = from_a_invariants(ELKIES)
    xt = two_torsion_x(c, Place.REAL)
    assert xt[0].imag == 0 and xt[1].imag > 0 and xt[2] == xt[1].conjugate()
    scale = max(abs(v) for v in c.kernel_coefficients())
    for x in xt:
        assert abs(kernel_poly(c, x)[0]) <= 1e-13 * (1 + abs(x)) ** 3 * scale


def test_root_failure_surfaces(monkeypatch):
    from archheight import torsion
    monkeypatch.setattr(torsion, "MAX_NEWTON_STEPS", 0)
    monkeypatch.setattr(torsion, "_initial_roots", lambda *coeffs: [0.5 + 0j, 3 + 0j, -7 + 0j])
    c = from_a_invariants([0, 0, 1 + 1j, 1, 0])
    with pytest.raises(RootFindingFailure):
        two_torsion_x(c, Place.COMPLEX)


def test_amat_example():
    c = from_a_invariants(X3X)
    tc = bound_constants(c, (0, 1j, -1j))
    assert np.allclose(as_array(tc.amat), [[0.5, 0.25, 0.25], [-0.5, 0.25, 0.25]], atol=1e-15)
    assert np.allclose(as_array(tc.bmat), [[1, 0], [1, -1j], [1, 1j]], atol=1e-15)


def test_amat_matches_linear_solve(rng):
    for _ in range(50):
        c = random_complex_curve(rng)
        tc = torsion_constants(c, Place.COMPLEX)
        expected = linear_solve_amat(c, tc.xt)
        assert np.allclose(as_array(tc.amat), expected, rtol=1e-9, atol=1e-12)


def test_bmat_rows(rng):
    c = random_complex_curve(rng)
    tc = torsion_constants(c, Place.COMPLEX)
    for (b1, b2), x in zip(tc.bmat, tc.xt):
        assert b1 == 1 and b2 == -x


def check_reconstruction(c, tc, x1, x2):
    y = [eigenform_y(c, x, ProjectivePoint(x1, x2)) for x in tc.xt]
    d1, d2 = delta_components(c.b2, c.b4, c.b6, c.b8, x1, x2)
    s = max(abs(x1), abs(x2))
    for i, xi in enumerate((x1, x2)):
        assert abs(xi * xi - sum(a * yj for a, yj in zip(tc.amat[i], y))) <= 1e-8 * s ** 2
    for (b1, b2), yj in zip(tc.bmat, y):
        assert abs(yj * yj - (b1 * d1 + b2 * d2)) <= 1e-8 * s ** 4


@pytest.mark.parametrize("place", [Place.REAL, Place.COMPLEX])
def test_reconstruction_identities(rng, place):
    for _ in range(20):
        c = random_real_curve(rng) if place is Place.REAL else random_complex_curve(rng)
        tc = torsion_constants(c, place)
        x1s, x2s = random_sphere_points(rng, 20)
        for x1, x2 in zip(x1s, x2s):
            lam = complex(rng.normal(), rng.normal())
            check_reconstruction(c, tc, lam * x1, lam * x2)


def test_eigenform_examples():
    c = from_a_invariants(X3X)
    assert eigenform_y(c, 0, ProjectivePoint(2, 1)) == 3
    assert eigenform_y(c, 1j, ProjectivePoint(1, 1)) == 2 - 2j
    for x in (0, 1j, -1j):
        assert eigenform_y(c, x, ProjectivePoint(1, 0)) == 1


def test_translation_matrix_examples():
    c = from_a_invariants(X3X)
    t0 = translation_matrix(c, 0)
    assert as_array(t0.m).tolist() == [[0, 1], [1, 0]] and t0.det == -1
    ti = translation_matrix(c, 1j)
    assert np.allclose(as_array(ti.m), [[1j, -1], [1, -1j]]) and ti.det == 2
    for t in (t0, ti):
        m = as_array(t.m)
        assert np.allclose(m @ m, -t.det * np.eye(2), atol=0)


def test_identity_class():
    t = TranslationMatrix.identity()
    assert t.is_identity_class and t.det == 1


def test_involution_and_anticommutation(rng):
    for _ in range(30):
        c = random_complex_curve(rng)
        xt = two_torsion_x(c, Place.COMPLEX)
        mats = [translation_matrix(c, x) for x in xt]
        top = 1 + max(abs(x) for x in xt)
        for x, t in zip(xt, mats):
            m = as_array(t.m)
            assert np.abs(m @ m + t.det * np.eye(2)).max() <= 1e-10 * (1 + abs(x)) ** 2
        for i in range(3):
            for j in range(3):
                if i != j:
                    mi, mj = as_array(mats[i].m), as_array(mats[j].m)
                    assert np.abs(mj @ mi + mi @ mj).max() <= 1e-8 * top ** 4


def test_translation_compatibility(rng):
    for _ in range(20):
        c = random_complex_curve(rng)
        a1, _, a3, _, _ = c.numeric_a()
        for xT in two_torsion_x(c, Place.COMPLEX):
            T = AffinePoint(xT, -(a1 * xT + a3) / 2)
            M = translation_matrix(c, xT)
            for _ in range(10):
                P = lift_x(c, complex(*rng.normal(0, 3, 2)))
                image = M.apply(P.kappa())
                assert add_points(c, P, T).kappa().cross(image) <= 1e-8


def test_conjugation_symmetry(rng):
    checked = 0
    while checked < 30:
        c = random_real_curve(rng)
        if c.disc_sign > 0:
            continue
        tc = torsion_constants(c, Place.REAL)
        a, b = as_array(tc.amat), as_array(tc.bmat)
        assert np.abs(a[:, 2] - a[:, 1].conj()).max() <= 1e-12
        assert np.abs(b[2] - b[1].conj()).max() <= 1e-12
        checked += 1


@pytest.mark.parametrize("a", [CURVE_11A2, ELKIES])
def test_large_curves_reconstruct(a):
    c = from_a_invariants(a)
    tc = torsion_constants(c, Place.REAL)
    expected = linear_solve_amat(c, tc.xt)
    assert np.allclose(as_array(tc.amat), expected, rtol=1e-6)


@pytest.mark.parametrize("a, place", [(CURVE_11A2, Place.REAL), ([0, 0, 0, -3, 2 + 1e-9], Place.REAL),
                                      ([0, 0, 0, -3 + 1e-10j, 2], Place.COMPLEX)])
def test_clustered_roots_resolved(a, place):
    from archheight import numeric
    c = from_a_invariants(a)
    xt = two_torsion_x(c, place)
    with numeric.working_precision(300):
        ref = two_torsion_x(from_a_invariants(a), place)
    for i in range(3):
        for j in range(i + 1, 3):
            gap, ref_gap = xt[i] - xt[j], ref[i] - ref[j]
            # at the limit of storing each root in binary64
            assert abs(gap - complex(ref_gap)) <= 4 * 2.0**-52 * (1 + max(abs(x) for x in xt))
