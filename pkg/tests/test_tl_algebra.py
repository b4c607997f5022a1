import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dimerstrip.statespace import DomainError, sector_leakage
from dimerstrip.tl_algebra import (LAMBDA_FF, FaceWeightTable, Orientation, boundary_triangle,
                                   face_entries, face_operator, fermion_op, s_k, tl_generator,
                                   x_matrix, xtilde_matrix)

TOL = 1e-13


def _e(big_n, j):
    return np.asarray(tl_generator(big_n, j))


@pytest.mark.parametrize("big_n", range(2, 9))
def test_tl_relations(big_n):
    eye = np.eye(2**big_n)
    es = [_e(big_n, j) for j in range(1, big_n)]
    for j, e in enumerate(es):
        assert np.abs(e @ e).max() < TOL  # loop fugacity 0
        if j + 1 < len(es):
            f = es[j + 1]
            assert np.abs(e @ f @ e - e).max() < TOL
            assert np.abs(f @ e @ f - f).max() < TOL
        for k in range(j + 2, len(es)):
            assert np.abs(e @ es[k] - es[k] @ e).max() < TOL
    assert sector_leakage(sum(es, 0 * eye)) == 0


@pytest.mark.parametrize("big_n", range(1, 9))
def test_fermion_and_projector_algebra(big_n):
    eye = np.eye(2**big_n)
    for j in range(1, big_n + 1):
        f, fd = np.asarray(fermion_op(big_n, j, "annihilate")), np.asarray(fermion_op(big_n, j, "create"))
        n1, n0 = np.asarray(fermion_op(big_n, j, "number")), np.asarray(fermion_op(big_n, j, "covacancy"))
        assert np.abs(f @ fd + fd @ f - eye).max() < TOL
        assert np.abs(fd @ f - n1).max() < TOL
        assert np.abs(n1 @ n1 - n1).max() < TOL and np.abs(n0 @ n0 - n0).max() < TOL
        assert np.abs(n1 @ n0).max() < TOL
        assert np.abs(n0 + n1 - eye).max() < TOL


def test_generator_is_fermion_bilinear():
    big_n = 3
    op = {k: [np.asarray(fermion_op(big_n, j, k)) for j in range(1, 4)]
          for k in ("annihilate", "create", "number")}
    x = 1j
    for j in range(2):
        expect = (x * op["number"][j] + op["number"][j + 1] / x
                  + op["create"][j] @ op["annihilate"][j + 1] + op["create"][j + 1] @ op["annihilate"][j])
        assert np.abs(_e(big_n, j + 1) - expect).max() < TOL


def test_face_operator_limits():
    big_n = 4
    eye = np.eye(16)
    for j in range(1, big_n):
        assert np.abs(np.asarray(face_operator(big_n, j, 0.0)) - eye).max() < 1e-14
        assert np.abs(np.asarray(face_operator(big_n, j, LAMBDA_FF)) - _e(big_n, j)).max() < 1e-14


@settings(max_examples=50, deadline=None)
@given(st.floats(-1.5, 1.5))
def test_face_operator_tl_decomposition(u):
    expect = s_k(1, -u) * np.eye(8) + s_k(0, u) * _e(3, 2)
    assert np.abs(np.asarray(face_operator(3, 2, u)) - expect).max() < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(0, 2 * np.pi))
def test_free_fermion_condition(u, phase):
    g = np.exp(1j * phase)
    for ori in Orientation:
        table = FaceWeightTable(u, g, ori)
        assert table.free_fermion_residual() < 1e-12


def test_pink_faces_match_blue_faces_of_same_edges(rng):
    for _ in range(20):
        u = rng.uniform(-1.5, 1.5)
        g = np.exp(1j * rng.uniform(0, 2 * np.pi))
        blue = FaceWeightTable(u, g, Orientation.BLUE)
        pink = FaceWeightTable(u, g, Orientation.PINK)
        shared = set(blue.entries()) & set(pink.entries())
        assert shared
        for key in shared:
            assert abs(blue.entries()[key] - pink.entries()[key]) < 1e-14


def test_face_entry_gauge_pairs():
    blue = face_entries(Orientation.BLUE, 0.3, 0.7, 2.0, 0.5)
    pink = face_entries(Orientation.PINK, 0.3, 0.7, 2.0, 0.5)
    assert blue[(1, 0, 0, 1)] == pink[(1, 1, 0, 0)] == 2.0
    assert blue[(0, 1, 1, 0)] == pink[(0, 0, 1, 1)] == 0.5


def test_rotated_face_array(rng):
    u = rng.uniform(0.1, 1.4)
    xt = xtilde_matrix(u)
    x = x_matrix(u)
    assert abs(xt[0, 0] - x[0, 0]) < 1e-15 and abs(xt[1, 2] - x[1, 2]) < 1e-15


def test_boundary_triangles():
    assert np.allclose(boundary_triangle("left", 1j), np.diag([1j, -1j]))
    assert np.allclose(boundary_triangle("right", 0.3 + 2j), np.eye(2))
    kl = boundary_triangle("left", np.exp(0.4j))
    assert np.allclose(kl @ kl.conj().T, np.eye(2))
    with pytest.raises(DomainError):
        boundary_triangle("top")


def test_index_errors():
    with pytest.raises(DomainError):
        tl_generator(3, 3)
    with pytest.raises(DomainError):
        fermion_op(3, 0, "number")
    with pytest.raises(DomainError):
        fermion_op(3, 1, "spin")
