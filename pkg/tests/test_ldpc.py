import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import all_bipolar, brute_is_codeword
from proxdec.ldpc import (AlistError, ParityCheckMatrix, bits_to_bipolar, emit_alist, encode,
                          generator_from_parity, gf2_rank, hamming_7_4, is_codeword,
                          make_regular_ldpc, parse_alist, random_codeword, syndrome)

HAMMING_DENSE = np.array([
    [1, 0, 1, 0, 1, 0, 1],
    [0, 1, 1, 0, 0, 1, 1],
    [0, 0, 0, 1, 1, 1, 1],
])

HAMMING_ALIST = """7 3
1 3
1 1 2 1 2 2 3
4 4 4
1
2
1 2
3
1 3
2 3
1 2 3
1 3 5 7
2 3 6 7
4 5 6 7
"""


def test_hamming_matches_hand_matrix(hamming):
    assert hamming.m == 3 and hamming.n == 7
    np.testing.assert_array_equal(hamming.dense, HAMMING_DENSE)


def test_parse_hamming_alist():
    H = parse_alist(HAMMING_ALIST)
    assert (H.m, H.n, H.nnz) == (3, 7, 12)
    assert H == hamming_7_4()


def test_parse_repetition_alist(rep2):
    H = parse_alist("2 1\n1 2\n1 1\n2\n1\n1\n1 2\n")
    assert H == rep2
    assert H.rows == ((0, 1),) and H.cols == ((0,), (0,))


def test_parse_ignores_zero_padding():
    text = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n"
    H = parse_alist(text)
    assert H.rows == ((0, 1), (1, 2))


@pytest.mark.parametrize("text, lineno", [
    ("7 3\n1 3\n1 1 2 1 2 2 3\n4 4 4\n1\n2\n1 2\n3\n1 3\n2 3\n1 2 3\n1 3 5 8\n2 3 6 7\n4 5 6 7\n", 12),
    ("7 3 9\n", 1),
    ("2 1\n1 2\n1 1\n2\n1\n1\n1 1\n", 7),
    ("2 1\n1 2\n1 1\n2\n1\n1\n1 x\n", 7),
])
def test_parse_errors_name_the_line(text, lineno):
    with pytest.raises(AlistError) as info:
        parse_alist(text)
    assert info.value.lineno == lineno
    assert f"line {lineno}" in str(info.value)


def test_parse_rejects_inconsistent_blocks():
    with pytest.raises(AlistError):
        parse_alist("2 1\n1 2\n1 1\n2\n1\n1\n1\n")


def test_adjacency_duality_enforced():
    with pytest.raises(ValueError):
        ParityCheckMatrix(1, 2, ((0, 1),), ((0,), ()))


def test_syndrome_examples(hamming, rep2):
    np.testing.assert_array_equal(syndrome(rep2, [1, 0]), [1])
    for j in range(7):
        e = np.zeros(7, dtype=int)
        e[j] = 1
        np.testing.assert_array_equal(syndrome(hamming, e), HAMMING_DENSE[:, j])
    with pytest.raises(ValueError):
        syndrome(hamming, [0, 1])


def test_is_codeword_examples(hamming, rep2):
    assert is_codeword(hamming, np.ones(7))
    assert is_codeword(rep2, [-1, -1])
    assert not is_codeword(rep2, [1, -1])
    with pytest.raises(ValueError):
        is_codeword(rep2, [1, 0.5])


def test_hamming_exhaustive(hamming):
    words = all_bipolar(7)
    mine = np.array([is_codeword(hamming, w) for w in words])
    oracle = np.array([brute_is_codeword(hamming, w) for w in words])
    np.testing.assert_array_equal(mine, oracle)
    assert mine.sum() == 16 and (~mine).sum() == 112


@pytest.mark.parametrize("H_factory, k", [(hamming_7_4, 4), (lambda: ParityCheckMatrix.from_rows(2, [(0, 1)]), 1)])
def test_generator_small(H_factory, k):
    H = H_factory()
    G = generator_from_parity(H)
    assert G.k == k
    Gc = G.in_code_order()
    assert not ((H.dense.astype(int) @ Gc.T.astype(int)) % 2).any()
    assert gf2_rank(G.rows) == k


def test_generator_repetition(rep2):
    np.testing.assert_array_equal(generator_from_parity(rep2).in_code_order(), [[1, 1]])


def test_generator_rank_deficient():
    # duplicated row: rank 1, so k = 3 - 1
    H = ParityCheckMatrix.from_dense([[1, 1, 0], [1, 1, 0]])
    G = generator_from_parity(H)
    assert G.k == 2
    assert not ((H.dense.astype(int) @ G.in_code_order().T) % 2).any()


def test_generator_ldpc204(ldpc204):
    G = generator_from_parity(ldpc204)
    assert G.k == 204 - gf2_rank(ldpc204.dense)
    assert G.k >= 102
    assert not ((ldpc204.dense.astype(int) @ G.in_code_order().T.astype(int)) % 2).any()


def test_random_codeword_repetition(rep2):
    G = generator_from_parity(rep2)
    rng = np.random.default_rng(3)
    draws = [tuple(random_codeword(G, rng)) for _ in range(2000)]
    assert set(draws) == {(1.0, 1.0), (-1.0, -1.0)}
    assert 900 < draws.count((1.0, 1.0)) < 1100


def test_random_codeword_uniform_on_hamming(hamming):
    G = generator_from_parity(hamming)
    rng = np.random.default_rng(7)
    counts: dict[tuple, int] = {}
    for _ in range(16000):
        w = random_codeword(G, rng)
        assert brute_is_codeword(hamming, w)
        counts[tuple(w)] = counts.get(tuple(w), 0) + 1
    assert len(counts) == 16
    assert all(850 <= c <= 1150 for c in counts.values())


def test_encode_zero_message(hamming):
    G = generator_from_parity(hamming)
    np.testing.assert_array_equal(encode(G, np.zeros(4, dtype=int)), np.zeros(7))


def test_regular_construction_degrees():
    H = make_regular_ldpc(204, 3, 6, np.random.default_rng(0))
    assert (H.m, H.nnz) == (102, 612)
    assert {len(c) for c in H.cols} == {3} and {len(r) for r in H.rows} == {6}
    H = make_regular_ldpc(8, 2, 4, np.random.default_rng(0))
    assert H.m == 4 and {len(c) for c in H.cols} == {2}


def test_regular_construction_divisibility():
    with pytest.raises(ValueError):
        make_regular_ldpc(10, 3, 4, np.random.default_rng(0))


def test_regular_construction_reproducible():
    a = make_regular_ldpc(60, 3, 6, np.random.default_rng(42))
    b = make_regular_ldpc(60, 3, 6, np.random.default_rng(42))
    assert a == b


def test_codewords_from_ldpc_have_zero_syndrome(ldpc204):
    G = generator_from_parity(ldpc204)
    rng = np.random.default_rng(0)
    for _ in range(50):
        assert is_codeword(ldpc204, random_codeword(G, rng))


@settings(max_examples=25, deadline=None)
@given(n_half=st.integers(2, 30), seed=st.integers(0, 2**32 - 1))
def test_alist_round_trip(n_half, seed):
    H = make_regular_ldpc(2 * n_half, 2, 4, np.random.default_rng(seed))
    assert parse_alist(emit_alist(H)) == H


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(st.integers(0, 1), min_size=6, max_size=6), min_size=1, max_size=5))
def test_generator_property(rows):
    H = ParityCheckMatrix.from_dense(np.array(rows))
    G = generator_from_parity(H)
    assert G.k == 6 - gf2_rank(np.array(rows))
    assert not ((H.dense.astype(int) @ G.in_code_order().T.astype(int)) % 2).any()


def test_bits_bipolar_convention():
    np.testing.assert_array_equal(bits_to_bipolar([0, 1]), [1.0, -1.0])
