"""Tests for checkpoint module"""

import json
import struct
import zlib

import numpy as np
import pytest

from ballbot_nav import nn
from ballbot_nav.config import CheckpointError, ShapeError
from ballbot_nav.nn.checkpoint import decode_checkpoint, encode_checkpoint


@pytest.fixture
def store():
    metadata = {"config_hash": "abc123", "creation_step": 40960}
    store = nn.ParameterStore(metadata=metadata)
    store.add("policy.fc0.weight", np.arange(6).reshape(2, 3))
    store.add("policy.fc0.bias", [0.5, -0.5])
    store.add("encoder.bn0.running_var", np.ones(4), trainable=False)
    return store


@pytest.fixture
def saved(store, tmp_path):
    return nn.save_store(store, tmp_path / "model.ckpt")


def test_save_load_save_is_bitwise(saved, tmp_path):
    again = nn.save_store(nn.load_store(saved), tmp_path / "again.ckpt")
    assert again.read_bytes() == saved.read_bytes()


def test_load_restores_everything(store, saved):
    loaded = nn.load_store(saved)
    assert loaded.names() == store.names()
    assert loaded.dtype == np.float32
    assert loaded.metadata["config_hash"] == "abc123"
    assert loaded.metadata["creation_step"] == 40960
    assert not loaded["encoder.bn0.running_var"].trainable
    np.testing.assert_array_equal(
        loaded["policy.fc0.weight"].value, store["policy.fc0.weight"].value
    )


def test_header_layout(saved):
    blob = saved.read_bytes()
    magic, version, header_len = struct.unpack_from("<8sII", blob)
    assert magic == b"BBNCKPT\0"
    assert version == nn.FORMAT_VERSION
    assert blob[16 : 16 + header_len].startswith(b'{"metadata":')


def test_mixed_dtypes_round_trip():
    tensors = {"adam.t": np.array(7, dtype=np.int64), "w": np.ones((2, 2), np.float32)}
    blob = encode_checkpoint(tensors, {"k": 1})
    decoded, metadata, trainable = decode_checkpoint(blob)
    assert decoded["adam.t"].dtype == np.int64
    assert int(decoded["adam.t"]) == 7
    np.testing.assert_array_equal(decoded["w"], tensors["w"])
    assert metadata == {"k": 1}
    assert trainable == {"adam.t": True, "w": True}


class TestCorruption:
    """Tests for rejected checkpoint files"""

    def test_truncated(self, saved):
        blob = saved.read_bytes()
        for cut in (10, 40, len(blob) - 6):
            with pytest.raises(CheckpointError, match="truncated"):
                decode_checkpoint(blob[:cut])

    def test_bad_magic(self, saved):
        blob = saved.read_bytes()
        with pytest.raises(CheckpointError, match="Not a ballbot-nav checkpoint"):
            decode_checkpoint(b"PK\x03\x04" + blob[4:])

    def test_version_mismatch(self, saved):
        blob = bytearray(saved.read_bytes())
        blob[8:12] = struct.pack("<I", 2)
        with pytest.raises(CheckpointError, match="version 2 is not supported"):
            decode_checkpoint(bytes(blob))

    def test_flipped_data_byte(self, saved):
        blob = bytearray(saved.read_bytes())
        blob[-6] ^= 0xFF
        with pytest.raises(CheckpointError, match="checksum"):
            decode_checkpoint(bytes(blob))

    @pytest.mark.parametrize(
        "header",
        [
            {"metadata": {}},
            {"tensors": []},
            [1, 2],
            {"metadata": {}, "tensors": [{"name": "w"}]},
            {"metadata": {}, "tensors": {"w": 1}},
        ],
    )
    def test_malformed_header(self, header):
        raw = json.dumps(header).encode("utf-8")
        body = struct.pack("<8sII", b"BBNCKPT\0", 1, len(raw)) + raw
        blob = body + struct.pack("<I", zlib.crc32(body))
        with pytest.raises(CheckpointError, match="header is corrupt"):
            decode_checkpoint(blob)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CheckpointError, match="does not exist"):
            nn.load_checkpoint(tmp_path / "nope.ckpt")


class TestParameterStore:
    """Tests for ParameterStore"""

    def test_duplicate_name(self, store):
        with pytest.raises(Exception, match="already exists"):
            store.add("policy.fc0.bias", [0.0, 0.0])

    def test_load_state_dict_names_offending_tensor(self, store):
        state = store.state_dict()
        state["policy.fc0.weight"] = np.zeros((2, 4))
        with pytest.raises(ShapeError, match="policy.fc0.weight"):
            store.load_state_dict(state)

    def test_load_state_dict_missing_and_extra(self, store):
        state = store.state_dict()
        del state["policy.fc0.bias"]
        with pytest.raises(ShapeError, match="policy.fc0.bias is missing"):
            store.load_state_dict(state)

        state = store.state_dict()
        state["value.fc0.bias"] = np.zeros(2)
        with pytest.raises(ShapeError, match="value.fc0.bias is not part"):
            store.load_state_dict(state)

    def test_freeze_and_counts(self, store):
        assert store.num_values() == 12
        assert store.num_values(trainable_only=True) == 8
        store.freeze("policy.")
        assert store.trainable() == []

    def test_astype(self, store):
        store.astype(np.float64)
        assert all(p.value.dtype == np.float64 for p in store)
        assert all(p.grad.dtype == np.float64 for p in store)
