import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdiv.dieudonne import (SlopeData, a_number, change_base, check_normalisation, direct_sum, dual, normalisation_criteria,
                            from_matrix, from_slopes, is_ordinary, j_number, newton_slopes, s_height,
                            slope_data, twist)
from pdiv.errors import ConstructionError, PrecisionError
from pdiv.galois_ring import gr_ctx
from pdiv.verifier import slope_types, twist_matrix

from oracles import slope_formula_value, newton_slopes_oracle, rank_mod_p

SS = SlopeData.of((1, 1))
ORD = SlopeData.of((1, 0), (0, 1))


def ints(D, X):
    """Integer matrix of a module matrix over Z_p (e = 1)."""
    return [[int(x) for x in row] for row in X[:, :, 0]]


def test_supersingular_matrices():
    for p in (2, 3, 5):
        D = from_slopes(p, SS, 3)
        assert ints(D, D.A) == [[0, p], [1, 0]]
        assert ints(D, D.B) == [[0, p], [1, 0]]
        assert (D.c, D.d, D.r) == (1, 1, 2)


def test_etale_and_ordinary_matrices():
    D = from_slopes(3, SlopeData.of((1, 0)), 2)
    assert ints(D, D.A) == [[1]] and ints(D, D.B) == [[3]]
    O = from_slopes(2, ORD, 3)
    assert ints(O, O.A) == [[1, 0], [0, 2]]
    assert ints(O, O.B) == [[2, 0], [0, 1]]


def test_relations_hold_for_every_slope_type():
    for p in (2, 3):
        for t in slope_types(4):
            sd = SlopeData(t)
            D = from_slopes(p, sd, sd.d + 2)
            ctx = D.ctx
            pI = ctx.scalar_times(ctx.const(p), ctx.identity(D.r))
            assert np.array_equal(ctx.matmul(D.A, ctx.frob(D.B)), pI)
            assert np.array_equal(ctx.matmul(D.B, ctx.frob_inv(D.A)), pI)
            assert newton_slopes(D) == sd.slopes()


def test_from_matrix_examples():
    E = from_matrix(2, 1, [[1]], 3)
    assert ints(E, E.B) == [[2]] and (E.c, E.d) == (1, 0)
    assert from_matrix(2, 1, [[0, 2], [1, 0]], 3) == from_slopes(2, SS, 3)
    D = from_matrix(2, 1, [[1, 1], [0, 2]], 4)
    assert (D.c, D.d) == (1, 1)
    assert newton_slopes(D) == [0, 1]
    assert newton_slopes(D) == newton_slopes_oracle(ints(D, D.A), 2)


def test_from_matrix_recovers_twisted_theta_modulo_p_to_m_minus_one():
    # A mod p^m only determines B = p A^{-1} mod p^(m-1)
    rng = random.Random(3)
    for p in (2, 3):
        for t in slope_types(3):
            sd = SlopeData(t)
            D = twist(from_slopes(p, sd, sd.d + 3), twist_matrix(p, sd.r, rng.randrange(10 ** 6), "generic"))
            R = from_matrix(p, 1, D.A, D.m_work)
            q1 = p ** (D.m_work - 1)
            assert np.array_equal(R.A, D.A)
            assert np.array_equal(R.B % q1, D.B % q1)


def test_construction_errors():
    with pytest.raises(ConstructionError):
        SlopeData.of((2, 2))
    with pytest.raises(PrecisionError):
        from_slopes(2, SlopeData.of((1, 3)), 3)
    with pytest.raises(ConstructionError):
        from_matrix(2, 1, [[4]], 4)
    with pytest.raises(ConstructionError):
        from_matrix(2, 1, [[0, 1], [2, 0]], 3, B=[[1, 0], [0, 1]])
    with pytest.raises(ConstructionError):
        twist(from_slopes(2, SS, 3), [[2, 0], [0, 1]])
    D = from_slopes(2, SlopeData.of((1, 2)), 3)
    with pytest.raises(PrecisionError):
        newton_slopes(D.at_precision(2))


def test_twist_group_action():
    D = from_slopes(3, SlopeData.of((2, 1)), 3)
    assert twist(D, np.eye(3, dtype=np.int64).tolist()) == D
    g = [[1, 1, 0], [0, 1, 2], [1, 0, 2]]
    ctx = D.ctx
    ginv = ctx.mat_inverse(ctx.scalar_matrix(g))
    assert twist(twist(D, g), ginv) == D


def test_twist_of_ordinary():
    O = from_slopes(2, ORD, 3)
    T = twist(O, [[1, 1], [0, 1]])
    assert ints(T, T.A) == [[1, 2], [0, 2]]
    assert (T.c, T.d) == (1, 1)
    assert newton_slopes(T) == [0, 1] == newton_slopes_oracle(ints(T, T.A), 2)
    assert a_number(T) == 0


def test_duality():
    E = from_slopes(2, SlopeData.of((1, 0)), 2)
    M = dual(E)
    assert ints(M, M.A) == [[2]] and (M.c, M.d) == (0, 1)
    for t in slope_types(4):
        sd = SlopeData(t)
        D = from_slopes(3, sd, max(sd.c, sd.d) + 2)
        assert dual(dual(D)) == D
        assert newton_slopes(dual(D)) == sorted(1 - s for s in newton_slopes(D))
        assert a_number(dual(D)) == a_number(D)
    assert newton_slopes(dual(from_slopes(2, SS, 3))) == [Fraction(1, 2)] * 2


def test_a_number_examples_and_oracle():
    assert a_number(from_slopes(2, ORD, 3)) == 0
    assert is_ordinary(from_slopes(2, ORD, 3))
    assert a_number(from_slopes(2, SS, 3)) == 1
    assert a_number(from_slopes(2, SlopeData.of((2, 1)), 3)) == 1
    rng = random.Random(4)
    for p in (2, 3, 5):
        for t in slope_types(4):
            sd = SlopeData(t)
            D = twist(from_slopes(p, sd, sd.d + 2), twist_matrix(p, sd.r, rng.randrange(10 ** 6), "monomial"))
            joint = [a + b for a, b in zip(ints(D, D.A), ints(D, D.B))]
            assert a_number(D) == D.r - rank_mod_p(joint, p)


def test_newton_slopes_against_rational_characteristic_polynomial():
    rng = random.Random(5)
    for p in (2, 3, 5):
        for t in slope_types(4):
            sd = SlopeData(t)
            for mode in ("generic", "monomial"):
                D = twist(from_slopes(p, sd, sd.d + 2), twist_matrix(p, sd.r, rng.randrange(10 ** 6), mode))
                assert newton_slopes(D) == newton_slopes_oracle(ints(D, D.A), p)


def test_specializing_height_values():
    assert s_height(ORD) == 0
    assert s_height(SS) == 1
    assert s_height(SlopeData.of((2, 1), (1, 2))) == 6
    for r in range(1, 7):
        for t in slope_types(r):
            assert s_height(SlopeData(t)) == slope_formula_value(t)
    with pytest.raises(ConstructionError):
        s_height(SS, 2, 1)


def test_j_number():
    assert j_number(1, 1) == 1
    assert j_number(0, 3) == 0
    assert j_number(2, 2) == 1
    assert j_number(2, 3) == 2
    assert j_number(3, 3) == 2


def test_slope_data_grouping_and_labels():
    sd = SlopeData.from_slopes([Fraction(1, 3)] * 3 + [Fraction(1, 2)] * 4)
    assert sd.summands == ((2, 1, 1), (1, 1, 2))
    assert sd.label() == "2.1x1+1.1x2"
    with pytest.raises(ConstructionError):
        SlopeData.from_slopes([Fraction(1, 3)] * 2)


def test_normalisation_criteria():
    D = from_slopes(2, SS, 3)
    assert check_normalisation(D, [[1, 0], [0, 1]])
    integral, preserves = normalisation_criteria(D, [[1, 1], [0, 1]])
    assert integral == preserves
    rng = random.Random(6)
    hits = {True: 0, False: 0}
    for p in (2, 3):
        for t in slope_types(3):
            sd = SlopeData(t)
            D = from_slopes(p, sd, sd.d + 3)
            for _ in range(6):
                g = twist_matrix(p, D.r, rng.randrange(10 ** 6), rng.choice(["generic", "monomial"]))
                hits[check_normalisation(D, g)] += 1
    # both outcomes actually occur
    assert hits[True] and hits[False]


def test_hash_and_serialisation():
    D = from_slopes(2, SS, 3)
    assert D.hash == from_slopes(2, SS, 3).hash
    assert D.hash != from_slopes(2, SS, 4).hash
    assert D.hash != from_slopes(3, SS, 3).hash
    assert D.at_precision(2).m_work == 2


def test_base_change_and_sums():
    D = from_slopes(2, SlopeData.of((2, 1)), 3)
    D2 = change_base(D, 2)
    assert D2.e == 2 and newton_slopes(D2) == newton_slopes(D) and a_number(D2) == a_number(D)
    S = direct_sum(from_slopes(2, SS, 3), from_slopes(2, ORD, 4))
    assert (S.r, S.c, S.d, S.m_work) == (4, 2, 2, 3)
    assert slope_data(S) == SlopeData.of((1, 0), (1, 1), (0, 1))
    assert a_number(S) == 1


def test_module_over_larger_residue_field():
    # twist by a matrix with non-rational entries; the result is defined over F_4
    D = change_base(from_slopes(2, SS, 4), 2)
    ctx = gr_ctx(2, 4, 2)
    g = ctx.identity(2)
    g[0, 1] = ctx.gen()
    T = twist(D, g)
    assert not T.is_defined_over_prime_ring() or np.array_equal(T.A, D.A)
    assert sum(newton_slopes(T)) == T.d
    assert a_number(T) == a_number(dual(T))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.sampled_from(slope_types(4)), st.integers(0, 10 ** 6),
       st.sampled_from(["generic", "monomial", "unipotent"]))
def test_twist_invariants(p, t, seed, mode):
    sd = SlopeData(t)
    D = twist(from_slopes(p, sd, max(sd.c, sd.d) + 2), twist_matrix(p, sd.r, seed, mode))
    assert (D.c, D.d) == (sd.c, sd.d)
    assert dual(dual(D)) == D
    assert a_number(D) == a_number(dual(D))
    slopes = newton_slopes(D)
    assert sum(slopes) == D.d
    assert newton_slopes(dual(D)) == sorted(1 - s for s in slopes)
    if mode == "unipotent":
        # g = I mod p does not change the isogeny class of a minimal module
        assert slopes == sd.slopes()
