"""Acceptance criteria 1-10, one test each, at their stated tolerances and time limits."""
import subprocess
import sys
import time
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from dimerstrip.dimermap import check_weight_consistency, enumerate_double_row_configs, isotropic_weights
from dimerstrip.local_relations import run_suite
from dimerstrip.qcombi import (QSeries, binomial_count, catalan_decomposition, character_closed_form,
                               narayana_decomposition, q_catalan, selection_matrix, skew_q_binomial)
from dimerstrip.spectra import (character_from_spectrum, cluster_eigenvalues, hamiltonian,
                                jordan_structure, match_spectrum, oracle_o1,
                                pattern_energy_residual)
from dimerstrip.statespace import OccupationState, Sector
from dimerstrip.tl_algebra import fermion_op, tl_generator
from dimerstrip.transfer import (StripModel, two_row_suite, check_commutation, check_crossing,
                                 check_initial_condition, check_inversion_identity,
                                 diagonal_spectrum, normalized_transfer)


def _admissible(big_n):
    return [s for s in range(1, big_n + 2) if (big_n + s) % 2]


@pytest.mark.criterion(1, "algebra suite: TL, fermion and projector relations to 1e-13, N <= 8")
def test_criterion_01_algebra():
    start = time.perf_counter()
    worst = 0.0
    for big_n in range(1, 9):
        eye = np.eye(2**big_n)
        es = [np.asarray(tl_generator(big_n, j)) for j in range(1, big_n)]
        for j, e in enumerate(es):
            worst = max(worst, np.abs(e @ e).max())
            if j + 1 < len(es):
                f = es[j + 1]
                worst = max(worst, np.abs(e @ f @ e - e).max(), np.abs(f @ e @ f - f).max())
            for k in range(j + 2, len(es)):
                worst = max(worst, np.abs(e @ es[k] - es[k] @ e).max())
        for j in range(1, big_n + 1):
            f, fd = (np.asarray(fermion_op(big_n, j, k)) for k in ("annihilate", "create"))
            n1, n0 = (np.asarray(fermion_op(big_n, j, k)) for k in ("number", "covacancy"))
            worst = max(worst, np.abs(f @ fd + fd @ f - eye).max(), np.abs(n1 @ n1 - n1).max(),
                        np.abs(n0 @ n0 - n0).max(), np.abs(n1 @ n0).max(), np.abs(n0 @ n1).max(),
                        np.abs(n0 + n1 - eye).max())
    assert worst < 1e-13
    assert time.perf_counter() - start < 10


@pytest.mark.criterion(2, "local relations: inversion, YBE and reflection residuals < 1e-11")
def test_criterion_02_local_relations():
    start = time.perf_counter()
    res = run_suite(np.random.default_rng(2), 100, general_lam=np.pi / 3)
    expected = {"inv1", "inv2", "fundamental", "ybe1", "ybe2", "ybe3", "rbybe", "lbybe"}
    expected |= {k + "@general_lambda" for k in ("inv1", "inv2", "fundamental", "ybe1", "ybe2", "ybe3")}
    assert set(res) == expected
    assert max(res.values()) < 1e-11
    assert time.perf_counter() - start < 30


@pytest.mark.criterion(3, "transfer matrices: commutation, inversion, initial value, crossing")
def test_criterion_03_transfer():
    rng = np.random.default_rng(3)
    for w in (0, 1):
        for n in range(1, 9):
            model = StripModel(n, w)
            assert check_initial_condition(model) < 1e-11
            for _ in range(20):
                u, v = rng.uniform(0.05, 1.5, 2)
                assert check_commutation(model, u, v) < 1e-10
                inv = check_inversion_identity(model, u)
                assert inv["unnormalized"] < 1e-9 and inv["normalized"] < 1e-9
                assert check_crossing(model, u) < 1e-11


@pytest.mark.criterion(4, "two-row column algebra: reference arrays, spectrum, six items for N <= 6")
def test_criterion_04_column_algebra():
    start = time.perf_counter()
    rng = np.random.default_rng(4)
    for n in range(2, 7):
        u = rng.uniform(0.1, 1.4)
        rep = two_row_suite(n, u)
        assert rep["reference_arrays"] < 1e-12
        assert max(rep.values()) < 1e-9
        c, s = np.cos(u), np.sin(u)
        eigs = sorted(diagonal_spectrum(u).real)
        assert np.allclose(eigs, sorted([s**4, c**4, (s * c)**2, (s * c)**2, -(s * c)**2, -(s * c)**2]),
                           atol=1e-13)
    assert time.perf_counter() - start < 60


@pytest.mark.criterion(5, "spectra: oracle O1, complete matching, pattern energies vs H")
def test_criterion_05_spectra():
    for w in (0, 1):
        for n in range(1, 13):
            assert oracle_o1(StripModel(n, w), np.random.default_rng(n), 200) < 1e-12
        for big_n in range(1 + w, 11):
            model = StripModel(big_n - w, w)
            total = 0
            for sec in model.sectors():
                table = match_spectrum(model, sec)
                assert table.total == sec.dim
                assert pattern_energy_residual(model, table) < 1e-9
                total += table.total
            assert total == 2**big_n
    for model, root in ((StripModel(4), np.sqrt(2)), (StripModel(3, 1), np.sqrt(3))):
        vals = np.linalg.eigvals(np.asarray(hamiltonian(model)))
        centers = sorted(g.mean().real for g in cluster_eigenvalues(vals, 1e-6))
        assert np.allclose(centers, [-root, 0.0, root], atol=1e-9)


@pytest.mark.criterion(6, "characters: spectrum = closed form = Narayana = Catalan, N <= 8")
def test_criterion_06_characters():
    for w in (0, 1):
        for big_n in range(1 + w, 9):
            model = StripModel(big_n - w, w)
            for s in _admissible(big_n):
                chi = character_from_spectrum(model, s)
                assert chi == character_closed_form(big_n, s)
                assert chi == narayana_decomposition(big_n, s) == catalan_decomposition(big_n, s)
                assert chi.at_one() == comb(big_n, (big_n + s - 1) // 2) == binomial_count(big_n, s)
    upper = lambda k, val, diag: [[val if n - m >= k else (diag if n - m == k - 1 and n >= m else 0)
                                   for n in range(4)] for m in range(4)]
    reference_a = {1: upper(0, 2, 2), 3: upper(1, 2, 1), 5: upper(2, 2, 1), 9: upper(4, 2, 1)}
    reference_a[9] = [[0, 0, 0, 1], [0] * 4, [0] * 4, [0] * 4]
    for s, mat in reference_a.items():
        assert selection_matrix(8, s) == mat
    for s, k in ((2, 0), (4, 1), (6, 2), (8, 3)):
        assert selection_matrix(7, s) == upper(k, 1, 0)


@pytest.mark.criterion(7, "q-combinatorics: worked skew binomial, three methods, q-Catalan forms")
def test_criterion_07_qcombinatorics():
    assert skew_q_binomial(3, 1, 2) == QSeries(enumerate((1, 2, 2, 2, 1)))
    for big_m in range(7):
        for m in range(big_m + 1):
            for n in range(m, big_m + 1):
                a = skew_q_binomial(big_m, m, n, "closed_form")
                assert a == skew_q_binomial(big_m, m, n, "diagrams") == skew_q_binomial(big_m, m, n, "young")
    for big_m in range(9):
        for r in range(1, big_m + 2):
            for kind in ("odd", "even"):
                assert q_catalan(big_m, r, kind).at_one() > 0  # raises if the two forms differ


@pytest.mark.criterion(8, "Jordan census: odd N diagonalizable, even N binom(N-2, d-1) rank-2 blocks")
def test_criterion_08_jordan():
    for w in (0, 1):
        for big_n in range(1 + w, 10):
            model = StripModel(big_n - w, w)
            for sec in model.sectors():
                rep = jordan_structure(hamiltonian(model, sec))
                assert rep.largest_block <= 2
                assert rep.exact_agrees is not False
                if big_n % 2:
                    assert rep.largest_block == 1
                elif big_n <= 8:
                    expected = comb(big_n - 2, sec.d - 1) if 1 <= sec.d <= big_n - 1 else 0
                    assert rep.count(2) == expected
    rep = jordan_structure(normalized_transfer(StripModel(2), np.pi / 4, Sector(2, 1)))
    assert [(round(c.center.real, 9), c.blocks) for c in rep.clusters] == [(1.0, {2: 1})]
    rep = jordan_structure(normalized_transfer(StripModel(4), np.pi / 4, Sector(4, 2)))
    got = sorted((round(c.center.real, 9), tuple(sorted(c.blocks.items()))) for c in rep.clusters)
    r2 = np.sqrt(2)
    assert got == sorted([(round(1.5 - r2, 9), ((2, 1),)), (0.5, ((1, 2),)), (round(1.5 + r2, 9), ((2, 1),))])


@pytest.mark.criterion(9, "dimer oracle: brute force equals transfer entries, counting identity")
def test_criterion_09_dimers():
    rng = np.random.default_rng(9)
    assert np.allclose(isotropic_weights(np.sqrt(2)), (1, 1, 2, 1))
    assert check_weight_consistency(np.pi / 4, np.sqrt(2)) < 1e-15
    from dimerstrip.transfer import double_row_transfer
    for w in (0, 1):
        for n in range(1, 5):
            model = StripModel(n, w)
            u = rng.uniform(0.1, 1.4)
            d = np.asarray(double_row_transfer(model, u))
            states = [OccupationState.from_index(i, model.big_n) for i in range(2**model.big_n)]
            for a in states:
                for b in states:
                    r = enumerate_double_row_configs(model, a, b, u)
                    assert abs(r.weighted_sum - d[b.index, a.index]) < 1e-11
                    assert r.dimer_count == round(r.isotropic_sum)
                    assert abs(r.expansion_sum - r.isotropic_sum) < 1e-9


@pytest.mark.criterion(10, "CLI: byte-identical reports for a fixed seed, full suite < 10 min")
def test_criterion_10_cli(tmp_path):
    outs = []
    start = time.perf_counter()
    for k in range(2):
        path = tmp_path / f"suite{k}.json"
        proc = subprocess.run([sys.executable, "-m", "dimerstrip.cli", "suite", "--seed", "11",
                               "--output", str(path)], capture_output=True, text=True, timeout=600)
        assert proc.returncode == 0, proc.stderr
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert (time.perf_counter() - start) / 2 < 600
