import hashlib
import json
import os
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retroia.model import (AntennaConfig, ChannelRealization, DegenerateChannel,
                           FeedbackSetting, generate_channels, reduce_interference_columns)

from oracles import left_null_projector, philox_cn

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def load(name):
    with open(os.path.join(FIXTURES, name)) as fh:
        return json.load(fh)


# -- AntennaConfig ------------------------------------------------------------

def test_config_validation_and_m1_prime():
    assert AntennaConfig(9, 2, 4, 3).m1_prime == 7
    assert AntennaConfig(6, 2, 4, 3).m1_prime == 6
    with pytest.raises(ValueError):
        AntennaConfig(0, 1, 1, 1)
    with pytest.raises((ValueError, TypeError)):
        AntennaConfig(1.5, 1, 1, 1)


def test_config_json_roundtrip_and_parse():
    cfg = AntennaConfig.parse("6, 2,4,3")
    assert cfg == AntennaConfig(6, 2, 4, 3)
    assert cfg.to_json() == {"m1": 6, "m2": 2, "n1": 4, "n2": 3}
    assert AntennaConfig.from_json(cfg.to_json()) == cfg
    assert cfg.swapped() == AntennaConfig(2, 6, 3, 4)
    with pytest.raises(ValueError):
        AntennaConfig.parse("6,2,4")


def test_feedback_setting_values_unique():
    values = [s.value for s in FeedbackSetting]
    assert len(values) == len(set(values)) == 9


# -- channel generation ----------------------------------------------------------

def test_determinism_small():
    a = generate_channels(AntennaConfig(1, 1, 1, 1), 1, 7)
    b = generate_channels(AntennaConfig(1, 1, 1, 1), 1, 7)
    assert a.identical_to(b)
    assert a.h11.shape == (1, 1, 1)


def test_shapes_6243():
    ch = generate_channels(AntennaConfig(6, 2, 4, 3), 7, 42)
    assert ch.h11.shape == (7, 4, 6)
    assert ch.h12.shape == (7, 4, 2)
    assert ch.h21.shape == (7, 3, 6)
    assert ch.h22.shape == (7, 3, 2)
    assert ch.at(1, 1, 3).shape == (4, 6)


def test_unit_variance_monte_carlo():
    ch = generate_channels(AntennaConfig(2, 2, 2, 2), 10000, 1)
    power = np.mean([np.mean(np.abs(ch.h(r, k)) ** 2) for r in (1, 2) for k in (1, 2)])
    assert abs(power - 1.0) < 0.05
    re = ch.h11.real.ravel()
    assert abs(np.var(re) - 0.5) < 0.02


def test_draws_match_raw_philox_oracle():
    cfg = AntennaConfig(2, 1, 1, 2)
    ch = generate_channels(cfg, 3, 99)
    ref = philox_cn(99, 0, 3 * (2 + 1 + 4 + 2))
    ours = np.concatenate([np.concatenate([ch.at(r, k, t).ravel()
                                           for r, k in ((1, 1), (1, 2), (2, 1), (2, 2))])
                           for t in (1, 2, 3)])
    np.testing.assert_allclose(ours, ref, rtol=0, atol=1e-15)


@pytest.mark.parametrize("key,shape,slots,seed", [
    ("(1, 1, 1, 1)/1/7", (1, 1, 1, 1), 1, 7),
    ("(6, 2, 4, 3)/7/42", (6, 2, 4, 3), 7, 42),
])
def test_pinned_binary_dump(key, shape, slots, seed):
    frozen = load("channels.json")[key]
    ch = generate_channels(AntennaConfig(*shape), slots, seed)
    data = ch.to_bytes()
    assert hashlib.sha256(data).hexdigest() == frozen["sha256"]
    # decode the documented layout by hand and compare against the oracle
    magic, version, m1, m2, n1, n2, n_slots, n_seed = struct.unpack_from("<4sIIIIIIQ", data)
    assert (magic, version, (m1, m2, n1, n2), n_slots, n_seed) == (b"RIAC", 1, shape, slots, seed)
    body = struct.unpack_from(f"<{2 * len(frozen['oracle'])}d", data, struct.calcsize("<4sIIIIIIQ"))
    np.testing.assert_allclose(np.array(body).reshape(-1, 2), frozen["oracle"], rtol=0, atol=1e-15)


def test_binary_and_json_roundtrip():
    ch = generate_channels(AntennaConfig(3, 2, 4, 3), 4, 5)
    assert ChannelRealization.from_bytes(ch.to_bytes()).identical_to(ch)
    assert ChannelRealization.from_json(json.loads(ch.dumps())).identical_to(ch)


def test_arrays_read_only():
    ch = generate_channels(AntennaConfig(2, 2, 2, 2), 2, 0)
    with pytest.raises(ValueError):
        ch.h11[0, 0, 0] = 0


def test_shape_mismatch_rejected():
    ch = generate_channels(AntennaConfig(2, 2, 2, 2), 2, 0)
    with pytest.raises(ValueError):
        ChannelRealization(3, ch.h11, ch.h12, ch.h21, ch.h22, seed=0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5), st.integers(1, 5),
       st.integers(1, 4), st.integers(0, 2 ** 64 - 1))
def test_seed_determinism_and_shape_totality(m1, m2, n1, n2, slots, seed):
    cfg = AntennaConfig(m1, m2, n1, n2)
    a = generate_channels(cfg, slots, seed)
    assert a.identical_to(generate_channels(cfg, slots, seed))
    assert a.matches(cfg)
    for r, k in ((1, 1), (1, 2), (2, 1), (2, 2)):
        assert a.h(r, k).shape == (slots, cfg.rx_antennas(r), cfg.tx_antennas(k))


# -- unitary reduction ----------------------------------------------------------

def test_reduction_6243_zero_rows():
    cfg = AntennaConfig(6, 2, 4, 3)
    red = reduce_interference_columns(generate_channels(cfg, 7, 42), cfg)
    t = red.transformed()
    assert not red.trivial
    assert np.abs(t.h12[:, 2:, :]).max() < 1e-10
    assert np.abs(t.h22[:, 2:, :]).max() < 1e-10
    assert np.abs(t.h12[:, :2, :]).min() > 0


def test_reduction_vacuous_returns_identity():
    cfg = AntennaConfig(3, 3, 4, 3)
    ch = generate_channels(cfg, 2, 1)
    red = reduce_interference_columns(ch, cfg)
    assert red.trivial
    assert red.transformed().identical_to(ch)


def test_reduction_against_null_space_oracle():
    # the rows of U below M2 must span the orthogonal complement of col(h)
    cfg = AntennaConfig(3, 2, 4, 4)
    ch = generate_channels(cfg, 3, 8)
    red = reduce_interference_columns(ch, cfg)
    for t in range(3):
        for u, h in ((red.u1[t], ch.h12[t]), (red.u2[t], ch.h22[t])):
            np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
            bottom = u[2:].conj().T
            np.testing.assert_allclose(bottom @ bottom.conj().T, left_null_projector(h),
                                       atol=1e-10)


def test_reduction_preserves_singular_values():
    cfg = AntennaConfig(5, 2, 4, 3)
    ch = generate_channels(cfg, 5, 3)
    t = reduce_interference_columns(ch, cfg).transformed()
    for a, b in ((ch.h11, t.h11), (ch.h21, t.h21)):
        np.testing.assert_allclose(np.linalg.svd(a, compute_uv=False),
                                   np.linalg.svd(b, compute_uv=False), atol=1e-10)


def test_reduction_degenerate_raises():
    cfg = AntennaConfig(2, 2, 3, 3)
    ch = generate_channels(cfg, 1, 0)
    h12 = np.array(ch.h12)
    h12[0, :, 1] = h12[0, :, 0]
    bad = ChannelRealization(1, ch.h11, h12, ch.h21, ch.h22, seed=0)
    with pytest.raises(DegenerateChannel):
        reduce_interference_columns(bad, cfg)
