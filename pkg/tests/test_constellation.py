import numpy as np
import pytest

from onebit_mimo import constellation as con

S2 = np.sqrt(2.0)


class TestGrayLabels:
    def test_fixed_convention(self):
        assert con.gray_encode((1 + 1j) / S2) == 0
        assert con.gray_encode((-1 + 1j) / S2) == 1
        assert con.gray_encode((1 - 1j) / S2) == 2
        assert con.gray_encode((-1 - 1j) / S2) == 3

    def test_round_trips(self):
        labels = np.arange(4)
        assert np.array_equal(con.gray_encode(con.gray_decode(labels)), labels)
        symbols = con.gray_decode(labels)
        assert np.allclose(con.gray_decode(con.gray_encode(symbols)), symbols)

    def test_decode_examples(self):
        assert con.gray_decode(0) == (1 + 1j) / S2
        assert con.gray_decode(2) == (1 - 1j) / S2

    def test_decode_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            con.gray_decode(4)
        with pytest.raises(ValueError):
            con.gray_decode([-1])

    def test_encode_rejects_non_constellation_point(self):
        with pytest.raises(ValueError):
            con.gray_encode(0.5 + 0.5j)

    def test_gray_property(self):
        # symbols sharing a real or imaginary sign differ in exactly one bit
        symbols = con.gray_decode(np.arange(4))
        for i in range(4):
            for j in range(i + 1, 4):
                same_re = np.sign(symbols[i].real) == np.sign(symbols[j].real)
                same_im = np.sign(symbols[i].imag) == np.sign(symbols[j].imag)
                dist = con.POPCOUNT4[con.gray_encode(symbols[i]) ^ con.gray_encode(symbols[j])]
                if same_re or same_im:
                    assert dist == 1
                else:
                    assert dist == 2

    def test_unit_modulus(self):
        assert np.allclose(np.abs(con.gray_decode(np.arange(4))), 1.0)


class TestQuantize:
    def test_sign_pattern(self):
        assert con.quantize(0.3 - 0.7j) == (1 - 1j) / S2

    def test_identity_on_constellation(self):
        symbols = con.gray_decode(np.arange(4))
        assert np.array_equal(con.quantize(symbols), symbols)

    def test_zero_tie_break(self):
        assert con.quantize(0.0 + 0.0j) == (1 + 1j) / S2
        assert con.quantize(-0.0 + 0.0j) == (1 + 1j) / S2

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        z = rng.standard_normal(100) + 1j * rng.standard_normal(100)
        once = con.quantize(z)
        assert np.array_equal(con.quantize(once), once)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            con.quantize(np.array([np.nan + 0j]))
        with pytest.raises(ValueError):
            con.quantize(np.array([np.inf + 0j]))


class TestProjectBox:
    def test_clamps_real(self):
        assert con.project_box(2 + 0.1j) == con.BOX_HALF_WIDTH + 0.1j

    def test_clamps_imag(self):
        assert con.project_box(0.2 - 3j) == 0.2 - 1j * con.BOX_HALF_WIDTH

    def test_identity_inside(self):
        rng = np.random.default_rng(1)
        z = (rng.uniform(-1, 1, 50) + 1j * rng.uniform(-1, 1, 50)) * con.BOX_HALF_WIDTH
        assert np.array_equal(con.project_box(z), z)

    def test_non_expansive(self):
        rng = np.random.default_rng(2)
        z = 3 * (rng.standard_normal(200) + 1j * rng.standard_normal(200))
        w = 3 * (rng.standard_normal(200) + 1j * rng.standard_normal(200))
        assert np.all(
            np.abs(con.project_box(z) - con.project_box(w)) <= np.abs(z - w) + 1e-12
        )

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            con.project_box(np.array([np.nan * 1j]))


class TestDecimalValue:
    def test_listed_values(self):
        # the values used by the worked two-user example, ascending order
        assert con.decimal_value(con.gray_decode([1, 0])) == 1
        assert con.decimal_value(con.gray_decode([3, 1])) == 7
        assert con.decimal_value(con.gray_decode([0, 2])) == 8
        assert con.decimal_value(con.gray_decode([2, 3])) == 14

    def test_zero_and_max(self):
        assert con.decimal_value(con.gray_decode([0, 0])) == 0
        assert con.decimal_value(con.gray_decode([3, 3])) == 15

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            con.decimal_value(np.array([], dtype=complex))

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_bijective_over_all_vectors(self, k):
        labels = con.decimal_to_labels(np.arange(4**k), k)
        symbols = con.gray_decode(labels)
        values = np.array([con.decimal_value(s) for s in symbols])
        assert np.array_equal(np.sort(values), np.arange(4**k))

    def test_range_property(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            k = int(rng.integers(1, 5))
            s = con.gray_decode(rng.integers(0, 4, k))
            assert 0 <= con.decimal_value(s) <= 4**k - 1

    def test_label_round_trip(self):
        k = 3
        dec = np.arange(4**k)
        assert np.array_equal(con.labels_to_decimal(con.decimal_to_labels(dec, k)), dec)
