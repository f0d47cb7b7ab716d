"""Transmit-chain tests against dense operator oracles."""

import numpy as np
import pytest

from pofdma import dense, transforms
from pofdma.complexity import op_counts
from pofdma.metrics import papr_db
from pofdma.txchain import (
    SCHEMES,
    SchemeConfig,
    add_cp,
    ofdma_tx,
    pofdma_dct_tx,
    pofdma_dft_tx,
    pofdma_tx,
    remove_cp,
    repeat_map,
    scfdma_tx,
    transmit,
)


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def cfg_for(scheme, n=16, k=4, cp=4, order=16):
    return SchemeConfig(scheme, n, k, cp, order)


class TestRepeatMap:
    def test_two_by_two(self):
        np.testing.assert_array_equal(
            repeat_map(np.array([1 + 2j, 3.0]), 2), [1 + 2j, 3.0, 1 + 2j, 3.0])

    def test_single_copy_identity(self):
        s = np.arange(5, dtype=complex)
        np.testing.assert_array_equal(repeat_map(s, 1), s)

    def test_matches_dense_repetition(self):
        rng = np.random.default_rng(0)
        s = rand_complex(rng, 4)
        oracle = dense.repetition_matrix(4, 4) @ s
        np.testing.assert_allclose(repeat_map(s, 4), oracle, atol=1e-12)


class TestCyclicPrefix:
    def test_example(self):
        body = np.array([1, 2, 3, 4], dtype=complex)  # a b c d
        np.testing.assert_array_equal(add_cp(body, 2), [3, 4, 1, 2, 3, 4])

    def test_roundtrip_exact(self):
        rng = np.random.default_rng(1)
        body = rand_complex(rng, 16)
        np.testing.assert_array_equal(remove_cp(add_cp(body, 5), 5), body)

    def test_prefix_property(self):
        rng = np.random.default_rng(2)
        blk = transmit(rand_complex(rng, 4), 1, cfg_for("P-OFDMA")).samples
        np.testing.assert_allclose(blk[:4], blk[-4:], atol=1e-12)

    def test_makes_convolution_circular(self):
        # channel applied to the CP-extended block, prefix stripped, must
        # equal the dense circulant acting on the body alone
        rng = np.random.default_rng(3)
        n, cp = 16, 4
        body = rand_complex(rng, n)
        taps = rand_complex(rng, 4)  # taps <= cp_len + 1
        block = add_cp(body, cp)
        full = np.convolve(block, taps)[: n + cp]
        circ = dense.circulant(taps, n) @ body
        np.testing.assert_allclose(remove_cp(full, cp), circ, atol=1e-12)

    def test_rejects_long_prefix(self):
        with pytest.raises(ValueError):
            add_cp(np.zeros(4, dtype=complex), 4)


class TestPofdmaTx:
    def test_single_user_reduces_to_plain_idft(self):
        rng = np.random.default_rng(4)
        s = rand_complex(rng, 16)
        blk = pofdma_tx(s, 0, SchemeConfig("P-OFDMA", 16, 1, 4, 16))
        np.testing.assert_allclose(blk.body, transforms.idft(s), atol=1e-12)

    @pytest.mark.parametrize("user", range(4))
    def test_dense_operator_oracle(self, user):
        rng = np.random.default_rng(5 + user)
        n, k, m = 16, 4, 4
        s = rand_complex(rng, m)
        op = (dense.user_phase_matrix(user, n, k)
              @ dense.repetition_matrix(m, k)
              @ dense.shifted_idft_matrix(0, m))
        np.testing.assert_allclose(
            pofdma_tx(s, user, cfg_for("P-OFDMA")).body, op @ s, atol=1e-12)

    @pytest.mark.parametrize("user", range(4))
    def test_frequency_support(self, user):
        rng = np.random.default_rng(9 + user)
        n, k, m = 16, 4, 4
        body = pofdma_tx(rand_complex(rng, m), user, cfg_for("P-OFDMA")).body
        support = set(np.where(np.abs(transforms.dft(body)) > 1e-10)[0])
        assert support == {(n - user + k * i) % n for i in range(m)}

    def test_norm_preserved(self):
        rng = np.random.default_rng(13)
        s = rand_complex(rng, 4)
        body = pofdma_tx(s, 2, cfg_for("P-OFDMA")).body
        assert np.linalg.norm(body) == pytest.approx(np.linalg.norm(s), rel=1e-12)

    def test_rejects_bad_user(self):
        with pytest.raises(ValueError, match="user"):
            pofdma_tx(np.zeros(4, dtype=complex), 4, cfg_for("P-OFDMA"))


class TestPofdmaDctTx:
    def test_definitional_factoring(self):
        rng = np.random.default_rng(14)
        s = rand_complex(rng, 4)
        precoded = transforms.dct_matrix(4) @ s
        direct = pofdma_dct_tx(s, 1, cfg_for("P-OFDMA-DCT")).body
        factored = pofdma_tx(precoded, 1, cfg_for("P-OFDMA")).body
        np.testing.assert_allclose(direct, factored, atol=1e-12)

    def test_norm_preserved(self):
        rng = np.random.default_rng(15)
        s = rand_complex(rng, 4)
        body = pofdma_dct_tx(s, 3, cfg_for("P-OFDMA-DCT")).body
        assert np.linalg.norm(body) == pytest.approx(np.linalg.norm(s), rel=1e-12)

    def test_dense_oracle(self):
        rng = np.random.default_rng(16)
        n, k, m = 16, 4, 4
        s = rand_complex(rng, m)
        op = (dense.user_phase_matrix(2, n, k)
              @ dense.repetition_matrix(m, k)
              @ dense.shifted_idft_matrix(0, m)
              @ transforms.dct_matrix(m))
        np.testing.assert_allclose(
            pofdma_dct_tx(s, 2, cfg_for("P-OFDMA-DCT")).body, op @ s, atol=1e-12)


class TestPofdmaDftTx:
    def test_unsimplified_path_agrees(self):
        # applying the M-point transform pair explicitly must match the
        # direct repetition path
        rng = np.random.default_rng(17)
        n, k = 32, 8
        m = n // k
        s = rand_complex(rng, m)
        cfg = SchemeConfig("P-OFDMA-DFT", n, k, 8, 16)
        via_transforms = pofdma_tx(transforms.dft(s), 3,
                                   SchemeConfig("P-OFDMA", n, k, 8, 16)).body
        np.testing.assert_allclose(
            pofdma_dft_tx(s, 3, cfg).body, via_transforms, atol=1e-12)

    def test_constant_modulus_payload_has_zero_papr(self):
        phases = np.exp(1j * np.array([0.3, 1.1, 2.9, -0.7]))
        body = pofdma_dft_tx(phases, 1, cfg_for("P-OFDMA-DFT")).body
        assert abs(papr_db(body)) < 1e-12

    def test_transmitter_needs_no_additions(self):
        assert op_counts("P-OFDMA-DFT", 256, 64).tx_add == 0
        assert op_counts("P-OFDMA-DFT", 256, 64).tx_mult == 256


class TestOfdmaTx:
    def test_single_user_is_plain_idft(self):
        rng = np.random.default_rng(18)
        s = rand_complex(rng, 16)
        blk = ofdma_tx(s, 0, SchemeConfig("OFDMA", 16, 1, 4, 16))
        np.testing.assert_allclose(blk.body, transforms.idft(s), atol=1e-12)

    def test_contiguous_support(self):
        rng = np.random.default_rng(19)
        body = ofdma_tx(rand_complex(rng, 4), 2, cfg_for("OFDMA")).body
        support = set(np.where(np.abs(transforms.dft(body)) > 1e-10)[0])
        assert support == {8, 9, 10, 11}

    def test_single_symbol_is_pure_tone(self):
        n = 16
        s = np.zeros(4, dtype=complex)
        s[1] = 1.0
        body = ofdma_tx(s, 2, cfg_for("OFDMA")).body  # lands on bin 9
        tone = np.exp(2j * np.pi * 9 * np.arange(n) / n) / np.sqrt(n)
        np.testing.assert_allclose(body, tone, atol=1e-12)


class TestScfdmaTx:
    def test_full_band_roundtrip(self):
        rng = np.random.default_rng(20)
        s = rand_complex(rng, 16)
        blk = scfdma_tx(s, 0, SchemeConfig("SC-FDMA", 16, 1, 4, 16))
        np.testing.assert_allclose(blk.body, s, atol=1e-12)

    def test_norm_preserved(self):
        rng = np.random.default_rng(21)
        s = rand_complex(rng, 4)
        body = scfdma_tx(s, 1, cfg_for("SC-FDMA")).body
        assert np.linalg.norm(body) == pytest.approx(np.linalg.norm(s), rel=1e-12)

    def test_dense_composition_oracle(self):
        rng = np.random.default_rng(22)
        n, k, m, user = 16, 4, 4, 3
        s = rand_complex(rng, m)
        placement = np.zeros((n, m))
        placement[user * m:(user + 1) * m, :] = np.eye(m)
        op = (dense.shifted_idft_matrix(0, n) @ placement @ dense.dft_matrix(m))
        np.testing.assert_allclose(
            scfdma_tx(s, user, cfg_for("SC-FDMA")).body, op @ s, atol=1e-12)


class TestChainInvariants:
    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_norm_preserving(self, scheme):
        rng = np.random.default_rng(23)
        s = rand_complex(rng, 4)
        body = transmit(s, 2, cfg_for(scheme)).body
        assert np.linalg.norm(body) == pytest.approx(np.linalg.norm(s), rel=1e-12)

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_spectral_disjointness(self, scheme):
        rng = np.random.default_rng(24)
        cfg = cfg_for(scheme)
        supports = []
        for u in range(cfg.k):
            body = transmit(rand_complex(rng, 4), u, cfg).body
            supports.append(set(np.where(np.abs(transforms.dft(body)) > 1e-10)[0]))
        for a in range(cfg.k):
            for b in range(a + 1, cfg.k):
                assert not supports[a] & supports[b]

    def test_periodic_spectra_cover_every_bin_once(self):
        rng = np.random.default_rng(25)
        cfg = cfg_for("P-OFDMA")
        seen = []
        for u in range(cfg.k):
            body = transmit(rand_complex(rng, 4), u, cfg).body
            seen += list(np.where(np.abs(transforms.dft(body)) > 1e-10)[0])
        assert sorted(seen) == list(range(cfg.n))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SchemeConfig("OFDMA", 256, 17, 64, 16)  # K does not divide N
        with pytest.raises(ValueError):
            SchemeConfig("OFDMA", 240, 16, 60, 16)  # not a power of two
        with pytest.raises(ValueError):
            SchemeConfig("OFDMA", 256, 16, 0, 16)  # no prefix
