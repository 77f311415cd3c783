import numpy as np
import pytest

from conftest import random_channel, random_profile
from relaybounds.channel import RelayChannel
from relaybounds.mc import (EXPRESSIONS, estimate_mi, estimate_mi_many,
                            grid_search_scalar)
from relaybounds.rates import (CovarianceProfile, mi_direct_given, mi_mac,
                               mi_mac_given_v, mi_relay_link_dpc,
                               mi_relay_link_sc, mi_v_unconditional)

CLOSED_FORMS = {
    "relay_sc": mi_relay_link_sc,
    "relay_dpc": mi_relay_link_dpc,
    "mac": mi_mac,
    "direct_given": mi_direct_given,
    "v_unconditional": mi_v_unconditional,
    "mac_given_v": mi_mac_given_v,
}


def scalar_channel(h1=1.0, h2=1.0, h3=1.0, g1=1.0, g2=1.0, g3=1.0):
    return RelayChannel(H1=[[h1]], H2=[[h2]], H3=[[h3]],
                        gamma1=g1, gamma2=g2, gamma3=g3)


def scalar_profile(pu=0.0, pv=0.0, px2=0.0, cross=0.0):
    return CovarianceProfile(sigma_u=np.array([[pu]]),
                             sigma_v=np.array([[pv]]),
                             sigma_x2=np.array([[px2]]),
                             cross_ux2=np.array([[cross]]))


class TestEstimateMI:
    def test_zero_power_is_zero(self):
        ch = scalar_channel()
        p = scalar_profile()
        est = estimate_mi_many(ch, p, EXPRESSIONS, samples=2 * 10 ** 4, seed=0)
        for e in est.values():
            assert abs(e.value) <= max(3.0 * e.std_error, 1e-6)

    def test_unit_scalar_relay_link_is_one_bit(self):
        # y1 = u + z1 with unit signal and noise power: exactly 1 bit
        ch = scalar_channel()
        p = scalar_profile(pu=1.0)
        e = estimate_mi(ch, p, "relay_sc", samples=10 ** 5, seed=3)
        assert e.value == pytest.approx(1.0, abs=max(4.0 * e.std_error, 0.02))

    def test_matches_closed_forms(self, rng):
        for _ in range(5):
            ch = random_channel(rng)
            p = random_profile(rng, ch, "pre_u_first")
            est = estimate_mi_many(ch, p, EXPRESSIONS, samples=4 * 10 ** 4,
                                   seed=int(rng.integers(2 ** 31)))
            for w, fn in CLOSED_FORMS.items():
                exact = fn(ch, p)
                e = est[w]
                assert abs(exact - e.value) <= max(5.0 * e.std_error, 0.02)

    def test_std_error_shrinks_with_samples(self, rng):
        ch = random_channel(rng)
        p = random_profile(rng, ch)
        small = estimate_mi(ch, p, "mac", samples=2 * 10 ** 4, seed=7)
        big = estimate_mi(ch, p, "mac", samples=8 * 10 ** 4, seed=7)
        # 4x samples should roughly halve the SE
        assert big.std_error < small.std_error
        assert big.std_error == pytest.approx(small.std_error / 2.0,
                                              rel=0.75)

    def test_deterministic_given_seed(self, rng):
        ch = random_channel(rng)
        p = random_profile(rng, ch)
        e1 = estimate_mi(ch, p, "mac", samples=2 * 10 ** 4, seed=5)
        e2 = estimate_mi(ch, p, "mac", samples=2 * 10 ** 4, seed=5)
        assert e1.value == e2.value
        assert e1.std_error == e2.std_error

    def test_rejects_too_few_samples(self):
        ch = scalar_channel()
        with pytest.raises(ValueError):
            estimate_mi(ch, scalar_profile(pu=1.0), "mac", samples=100)

    def test_rejects_unknown_expression(self):
        ch = scalar_channel()
        with pytest.raises(ValueError):
            estimate_mi(ch, scalar_profile(pu=1.0), "nonsense",
                        samples=10 ** 4)


class TestGridSearchScalar:
    def test_rejects_vector_channel(self):
        ch = RelayChannel(H1=[[1.0, 0.0]], H2=[[1.0, 0.0]], H3=[[1.0]],
                          gamma1=1, gamma2=1, gamma3=1)
        with pytest.raises(ValueError):
            grid_search_scalar(ch)

    def test_rejects_complex_gains(self):
        ch = RelayChannel(H1=[[1.0 + 1.0j]], H2=[[1.0]], H3=[[1.0]],
                          gamma1=1, gamma2=1, gamma3=1)
        with pytest.raises(ValueError):
            grid_search_scalar(ch)

    def test_rejects_unknown_family(self):
        with pytest.raises(ValueError):
            grid_search_scalar(scalar_channel(), family="other")

    def test_cutoff_relay_reduces_to_direct_link(self):
        # h1 = 0 removes the relay path; best is all power direct
        ch = scalar_channel(h1=0.0, g2=0.5)
        got = grid_search_scalar(ch, resolution=0.02)
        assert got == pytest.approx(np.log2(1.5), abs=1e-9)

    def test_pre_at_least_sc(self, rng):
        for _ in range(3):
            ch = scalar_channel(h1=float(rng.uniform(0.5, 3)),
                                h2=float(rng.uniform(0.5, 2)),
                                h3=float(rng.uniform(0.5, 2)),
                                g1=float(rng.uniform(0.2, 2)),
                                g2=float(rng.uniform(0.2, 2)),
                                g3=float(rng.uniform(0.2, 2)))
            sc = grid_search_scalar(ch, family="sc", resolution=0.05)
            pre = grid_search_scalar(ch, family="pre", resolution=0.05)
            assert pre >= sc - 1e-9
