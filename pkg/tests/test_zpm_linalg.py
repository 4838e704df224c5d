import itertools
import random

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from pdiv.zpm_linalg import (ZpmMatrix, howell, howell_matrix, image_log_size, kernel_log_size,
                             kernel_sample, rowspan_log_size, smith_exponents, solve_unimodular)

from oracles import image_count, kernel_count


def random_matrix(rng, p, m, rows, cols):
    q = p ** m
    out = []
    for _ in range(rows):
        # bias towards p-divisible entries so non-trivial valuations show up
        out.append([rng.choice([rng.randrange(q), p * rng.randrange(q // p), 0]) % q for _ in range(cols)])
    return out


def test_identity_and_scalar_p():
    for p, m in [(2, 3), (3, 2), (5, 1)]:
        I = ZpmMatrix.from_array(p, m, np.eye(4, dtype=np.int64))
        assert kernel_log_size(I) == 0
        assert image_log_size(I) == 4 * m
    M = ZpmMatrix.from_rows(3, 2, [[3]])
    assert kernel_log_size(M) == 1
    assert image_log_size(M) == 1
    Z = ZpmMatrix.from_rows(2, 3, [[0, 0], [0, 0]])
    assert kernel_log_size(Z) == 6
    assert image_log_size(Z) == 0


def test_kernel_size_matches_enumeration_3x4_over_z8():
    rng = random.Random(11)
    for _ in range(5):
        rows = random_matrix(rng, 2, 3, 3, 4)
        M = ZpmMatrix.from_rows(2, 3, rows)
        assert 2 ** kernel_log_size(M) == kernel_count(rows, 8)


def test_howell_properties_against_enumeration():
    rng = random.Random(12)
    for p, m, rows, cols in [(2, 2, 3, 5), (3, 2, 2, 3), (2, 3, 4, 3), (5, 1, 3, 4)]:
        q = p ** m
        for _ in range(6):
            A = random_matrix(rng, p, m, rows, cols)
            M = ZpmMatrix.from_rows(p, m, A)
            H = howell(M)
            assert p ** H.kernel_log_size == kernel_count(A, q)
            # row span size of the Howell form equals the image of M^T
            assert p ** H.rowspan_log_size == image_count([list(c) for c in zip(*A)], q)
            # kernel generators lie in the kernel and give unique coordinates
            for gen, e in H.kernel_basis:
                assert not np.any(M.apply(gen))
            combos = set()
            for coeffs in itertools.product(*[range(p ** e) for _, e in H.kernel_basis]):
                v = [0] * cols
                for c, (gen, _) in zip(coeffs, H.kernel_basis):
                    v = [(x + c * y) % q for x, y in zip(v, gen)]
                combos.add(tuple(v))
            assert len(combos) == p ** H.kernel_log_size
            # the Howell form spans the same rows
            assert rowspan_log_size(np.vstack([H.matrix, M.data]) if H.matrix.size else M.data, p, m) == \
                H.rowspan_log_size
            # Smith cross-check
            assert sum(m - v for v in smith_exponents(M)) == H.rowspan_log_size


def test_howell_form_is_canonical_up_to_row_operations():
    rng = random.Random(13)
    for _ in range(10):
        A = random_matrix(rng, 2, 3, 3, 4)
        M = ZpmMatrix.from_rows(2, 3, A)
        U = [[1, 0, 0], [rng.randrange(8), 1, 0], [rng.randrange(8), rng.randrange(8), 1]]
        N = ZpmMatrix.from_array(2, 3, (np.array(U, dtype=object) @ np.array(A, dtype=object)) % 8)
        assert howell_matrix(M) == howell_matrix(N)


def test_kernel_sample_determinism_and_membership():
    Z = howell(ZpmMatrix.from_rows(2, 2, [[0, 0, 0]]))
    assert kernel_sample(Z, 5) == kernel_sample(Z, 5)
    I = howell(ZpmMatrix.from_array(3, 2, np.eye(3, dtype=np.int64)))
    assert all(kernel_sample(I, s) == (0, 0, 0) for s in range(10))
    P = howell(ZpmMatrix.from_rows(3, 2, [[3]]))
    seen = {kernel_sample(P, s) for s in range(100)}
    # the kernel of x -> 3x on Z/9 is {0, 3, 6}
    assert seen == {(0,), (3,), (6,)}
    P2 = howell(ZpmMatrix.from_rows(2, 2, [[2]]))
    assert {kernel_sample(P2, s) for s in range(100)} == {(0,), (2,)}


def test_solve_unimodular():
    rng = random.Random(14)
    for _ in range(10):
        while True:
            M = [[rng.randrange(27) for _ in range(3)] for _ in range(3)]
            det = round(np.linalg.det(np.array(M, dtype=float)))
            if det % 3:
                break
        x = [rng.randrange(27) for _ in range(3)]
        rhs = [sum(a * b for a, b in zip(row, x)) % 27 for row in M]
        assert solve_unimodular(M, rhs, 3, 3) == x


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([(2, 2), (2, 3), (3, 1), (3, 2)]), st.integers(1, 4), st.integers(1, 3), st.data())
def test_kernel_plus_image_is_domain(pm, rows, cols, data):
    p, m = pm
    q = p ** m
    A = [[data.draw(st.integers(0, q - 1)) for _ in range(cols)] for _ in range(rows)]
    M = ZpmMatrix.from_rows(p, m, A)
    # |ker| * |im| = |domain| and the image is the row span of the transpose
    assert kernel_log_size(M) + image_log_size(M) == m * cols
    assert p ** kernel_log_size(M) == kernel_count(A, q)
