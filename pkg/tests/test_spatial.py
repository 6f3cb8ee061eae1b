import itertools

import numpy as np
import pytest
from helpers import best_subset_exhaustive

from onebit_mimo import constellation as con
from onebit_mimo import precoder, spatial


def lut_with_costs(costs, n_users=1, n_rx=None):
    costs = np.asarray(costs, dtype=float)
    size = len(costs)
    if n_rx is None:
        n_rx = round(np.log2(size) / 2)
    return precoder.LookupTable(
        vectors=np.zeros((size, 1), dtype=complex),
        costs=costs,
        feasible=np.ones(size, dtype=bool),
        n_users=n_users,
        n_rx=n_rx,
        n_tx=1,
    )


class TestSingleUserSelection:
    def test_top_two(self):
        book = spatial.select_subset_su(lut_with_costs([0.9, 0.1, 0.8, 0.2]), 2)
        assert np.array_equal(book.decimals, [0, 2])

    def test_full_selection_is_identity(self):
        book = spatial.select_subset_su(lut_with_costs(np.arange(16.0)), 16)
        assert np.array_equal(book.decimals, np.arange(16))
        assert book.rate == 1.0

    def test_power_of_two_required(self):
        with pytest.raises(ValueError):
            spatial.select_subset_su(lut_with_costs(np.arange(16.0)), 6)

    def test_needs_single_user_table(self):
        lut = lut_with_costs(np.arange(16.0), n_users=2, n_rx=1)
        with pytest.raises(ValueError):
            spatial.select_subset_su(lut, 4)

    @pytest.mark.parametrize("l_prime", [2, 4, 8])
    def test_matches_exhaustive_optimum(self, l_prime):
        rng = np.random.default_rng(30)
        for _ in range(20):
            costs = rng.random(16)
            book = spatial.select_subset_su(lut_with_costs(costs), l_prime)
            best, best_sum = best_subset_exhaustive(costs, l_prime)
            assert np.sum(costs[book.decimals]) == pytest.approx(best_sum)
            assert np.array_equal(book.decimals, best)

    def test_tie_break_prefers_small_decimal(self):
        book = spatial.select_subset_su(lut_with_costs([1.0, 1.0, 1.0, 1.0]), 2)
        assert np.array_equal(book.decimals, [0, 1])


def golden_table():
    """16x16 cost tensor steering the successive selection to the worked example."""
    col_bonus = np.zeros(16)
    col_bonus[[1, 7, 8, 14]] = 10.0  # user-1 winners
    row_bonus = np.zeros(16)
    row_bonus[[0, 5, 10, 15]] = 10.0  # user-2 winners
    return col_bonus[:, None] + row_bonus[None, :] + 1.0


class TestMultiUserSelection:
    def test_worked_two_user_example(self):
        books = spatial.select_subsets_mu(golden_table(), [4, 4])
        assert np.array_equal(books[0].decimals, [1, 7, 8, 14])
        assert np.array_equal(books[1].decimals, [0, 5, 10, 15])

    def test_constant_table_tie_break(self):
        books = spatial.select_subsets_mu(np.ones((16, 16)), [4, 4])
        assert np.array_equal(books[0].decimals, [0, 1, 2, 3])
        assert np.array_equal(books[1].decimals, [0, 1, 2, 3])

    def test_each_step_matches_brute_force(self):
        rng = np.random.default_rng(31)
        for _ in range(30):
            table = rng.random((4, 4))
            books = spatial.select_subsets_mu(table, [2, 2])
            # step 1: best pair of user-1 inputs by full-row averages
            best1 = max(
                itertools.combinations(range(4), 2),
                key=lambda c: table[list(c), :].mean(axis=1).sum(),
            )
            assert np.array_equal(books[0].decimals, sorted(best1))
            # step 2: best pair of user-2 inputs averaged over the selected set
            restricted = table[list(best1), :]
            best2 = max(
                itertools.combinations(range(4), 2),
                key=lambda c: restricted[:, list(c)].mean(axis=0).sum(),
            )
            assert np.array_equal(books[1].decimals, sorted(best2))

    def test_invariant_under_increasing_transform(self):
        rng = np.random.default_rng(32)
        table = rng.random((16, 16))
        base = spatial.select_subsets_mu(table, [4, 4])
        shifted = spatial.select_subsets_mu(2.0 * table + 1.0, [4, 4])
        for a, b in zip(base, shifted):
            assert np.array_equal(a.decimals, b.decimals)

    def test_size_mismatch_rejected(self):
        with pytest.raises(ValueError):
            spatial.select_subsets_mu(np.ones((16, 16)), [4])

    def test_phi_table_layout(self):
        # user 1 occupies the least significant base-4 digits of the flat index
        costs = np.arange(256.0)
        lut = lut_with_costs(costs, n_users=2, n_rx=2)
        table = spatial.phi_table(lut, 2, 2)
        assert table.shape == (16, 16)
        assert table[3, 5] == con.labels_to_decimal(
            np.concatenate([con.decimal_to_labels(3, 2), con.decimal_to_labels(5, 2)])
        )


class TestCodebook:
    def test_worked_example_words(self):
        user1 = spatial.build_codebook([1, 7, 8, 14], 2)
        assert np.array_equal(user1.labels, [[1, 0], [3, 1], [0, 2], [2, 3]])
        user2 = spatial.build_codebook([0, 5, 10, 15], 2)
        assert np.array_equal(user2.labels, [[0, 0], [1, 1], [2, 2], [3, 3]])
        assert user1.width == 2

    def test_first_position_is_zero_word(self):
        book = spatial.build_codebook([9, 3], 2)
        assert np.array_equal(spatial.spatial_encode(np.array([0]), book), con.gray_decode([3, 0]))

    def test_singleton_codebook(self):
        book = spatial.build_codebook([7], 2)
        assert book.width == 0
        vec = spatial.spatial_encode(np.zeros(0, dtype=int), book)
        assert np.array_equal(con.gray_encode(vec), [3, 1])

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            spatial.build_codebook([3, 3, 5, 9], 2)

    def test_rate_of_quarter_subset(self):
        book = spatial.build_codebook([0, 5, 10, 15], 2)
        assert book.rate == 0.5


class TestEncodeDecode:
    def golden_books(self):
        return (
            spatial.build_codebook([1, 7, 8, 14], 2),
            spatial.build_codebook([0, 5, 10, 15], 2),
        )

    def test_worked_example_encoding(self):
        user1, _ = self.golden_books()
        vec = spatial.spatial_encode(np.array([0, 1]), user1)
        assert np.array_equal(con.gray_encode(vec), [3, 1])

    def test_round_trip(self):
        user1, user2 = self.golden_books()
        for book in (user1, user2):
            for word in range(4):
                bits = np.array([(word >> 1) & 1, word & 1])
                back = spatial.spatial_decode(spatial.spatial_encode(bits, book), book)
                assert np.array_equal(back, bits)

    def test_decode_tie_break(self):
        _, user2 = self.golden_books()
        bits = spatial.spatial_decode(con.gray_decode([0, 1]), user2)
        assert np.array_equal(bits, [0, 0])

    def test_decode_matches_exhaustive(self):
        rng = np.random.default_rng(33)
        _, book = self.golden_books()
        for _ in range(200):
            received = rng.integers(0, 4, 2)
            got = spatial.decode_stream(received[None, :], book)[0]
            dists = [
                sum(con.POPCOUNT4[received[k] ^ book.labels[w, k]] for k in range(2))
                for w in range(book.size)
            ]
            best = min(dists)
            assert dists[got] == best
            assert got == dists.index(best)  # smallest decimal among ties

    def test_encoded_stream_uniform(self):
        rng = np.random.default_rng(34)
        user1, _ = self.golden_books()
        bits = rng.integers(0, 2, 40_000)
        labels = spatial.encode_stream(bits, user1)
        decs = con.labels_to_decimal(labels)
        counts = np.bincount(np.searchsorted(user1.decimals, decs), minlength=4)
        expected = len(decs) / 4
        sigma = np.sqrt(len(decs) * 0.25 * 0.75)
        assert np.all(np.abs(counts - expected) < 3 * sigma)

    def test_bits_words_round_trip(self):
        rng = np.random.default_rng(35)
        bits = rng.integers(0, 2, 120)
        for width in (1, 2, 3, 4):
            words = spatial.bits_to_words(bits[: 120 // width * width], width)
            back = spatial.words_to_bits(words, width)
            assert np.array_equal(back, bits[: len(back)])


class TestMapToTransmit:
    def setup_method(self):
        rng = np.random.default_rng(38)
        self.h = (rng.standard_normal((4, 8)) + 1j * rng.standard_normal((4, 8))) / np.sqrt(2)
        self.lut = precoder.build_lut(self.h, n_users=2, n_rx=2)
        self.books = [
            spatial.build_codebook([1, 7, 8, 14], 2),
            spatial.build_codebook([0, 5, 10, 15], 2),
        ]

    def test_selected_vector_returns_stored_column(self):
        s = con.gray_decode([3, 1, 2, 2])  # user1 dec 7, user2 dec 10: both selected
        x = spatial.map_to_transmit(s, self.lut, self.books)
        assert np.array_equal(x, self.lut.vectors[7 + 16 * 10])

    def test_unselected_vector_rejected(self):
        s = con.gray_decode([0, 0, 0, 0])  # user1 dec 0 is not selected
        with pytest.raises(ValueError, match="user 1"):
            spatial.map_to_transmit(s, self.lut, self.books)


class TestCodebookSummary:
    def test_dump_format(self):
        books = [
            spatial.build_codebook([1, 7, 8, 14], 2),
            spatial.build_codebook([0, 5, 10, 15], 2),
        ]
        text = spatial.codebook_summary(books)
        assert "user 1  word 01  decimal 7" in text
        assert "user 2  word 11  decimal 15" in text
        assert len(text.splitlines()) == 8


class TestSubLut:
    def test_worked_example_sub_table(self):
        rng = np.random.default_rng(36)
        h = (rng.standard_normal((4, 8)) + 1j * rng.standard_normal((4, 8))) / np.sqrt(2)
        lut = precoder.build_lut(h, n_users=2, n_rx=2)
        books = [
            spatial.build_codebook([1, 7, 8, 14], 2),
            spatial.build_codebook([0, 5, 10, 15], 2),
        ]
        flat, vectors, costs = spatial.sub_lut(lut, books)
        assert len(flat) == 16
        assert vectors.shape == (16, 8)
        # spot check one combination: user1=[3,1] (dec 7), user2=[2,2] (dec 10)
        idx = 7 + 16 * 10
        assert idx in flat
        pos = list(flat).index(idx)
        assert np.array_equal(vectors[pos], lut.vectors[idx])
        assert costs[pos] == lut.costs[idx]

    def test_rotated_column_consistency(self):
        # when a selected input's quarter turn is also selected, its stored
        # column is the rotated column
        rng = np.random.default_rng(37)
        h = (rng.standard_normal((2, 5)) + 1j * rng.standard_normal((2, 5))) / np.sqrt(2)
        lut = precoder.build_lut(h, n_users=2, n_rx=1)
        sigma = con.rotation_label_map()
        labels = con.decimal_to_labels(np.arange(16), 2)
        rotated_flat = con.labels_to_decimal(sigma[labels])
        for ell in range(16):
            assert np.allclose(lut.vectors[rotated_flat[ell]], 1j * lut.vectors[ell])
