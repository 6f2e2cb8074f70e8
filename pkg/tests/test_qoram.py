import numpy as np
import pytest

from qsgames.oram import OramParams
from qsgames.qoram import (
    QuantumDataRequest,
    qoram_access,
    qoram_init,
    report_json,
    safe_extractor_default,
)
from qsgames.quantum import DensityMatrix, partial_trace, trace_distance
from qsgames.rng import Rand


def fresh(n_db=2, n_dat=1, seed=0):
    return qoram_init(OramParams(n_db=n_db, n_dat=n_dat), Rand(seed))


class TestInit:
    def test_shape(self):
        params = OramParams(n_db=2, n_dat=1)
        assert params.n_tree == 1 and params.n_msg == params.n_tag + 1
        client, server = qoram_init(params, Rand(0))
        assert server.node_count == 3

    def test_blocks_decrypt_to_zero_state(self):
        client, server = fresh()
        zero = DensityMatrix.basis(client.params.n_msg, 0)
        for bucket in server.nodes:
            for block in bucket:
                plain = client.scheme.dec(client.key, block.cipher)
                assert trace_distance(plain, zero) < 1e-10

    def test_deterministic_under_seed(self):
        a, sa = fresh(seed=42)
        b, sb = fresh(seed=42)
        assert a.position_map == b.position_map
        assert sa.digest() == sb.digest()


class TestAccess:
    def test_write_then_read_fidelity_one(self):
        client, server = fresh(seed=1)
        phi = DensityMatrix.random_pure(1, Rand(2))
        qoram_access(client, server, QuantumDataRequest("write", 1, phi))
        qoram_access(client, server, QuantumDataRequest("read", 1))
        assert trace_distance(client.retrieved, phi) < 1e-10

    def test_server_slot_holds_swapped_in_payload(self):
        # after the read the stored state is the read's zero placeholder
        client, server = fresh(seed=3)
        phi = DensityMatrix.random_pure(1, Rand(4))
        qoram_access(client, server, QuantumDataRequest("write", 1, phi))
        qoram_access(client, server, QuantumDataRequest("read", 1))
        qoram_access(client, server, QuantumDataRequest("read", 1))
        assert trace_distance(client.retrieved, DensityMatrix.basis(1, 0)) < 1e-10

    def test_untouched_ids_keep_their_data(self):
        client, server = fresh(n_db=2, seed=5)
        phi = DensityMatrix.random_pure(1, Rand(6))
        qoram_access(client, server, QuantumDataRequest("write", 1, phi))
        for _ in range(4):
            qoram_access(client, server, QuantumDataRequest("write", 2, DensityMatrix.basis(1, 1)))
        qoram_access(client, server, QuantumDataRequest("read", 1))
        assert trace_distance(client.retrieved, phi) < 1e-10

    def test_consecutive_accesses_use_fresh_leaves(self):
        client, server = qoram_init(OramParams(n_db=4, n_dat=1), Rand(7))
        leaves = []
        for _ in range(16):
            _, _, tr = qoram_access(client, server, QuantumDataRequest("read", 2))
            leaves.append(tr.leaf)
        assert len(set(leaves)) > 1

    def test_invalid_id_rejected(self):
        client, server = fresh()
        with pytest.raises(ValueError):
            qoram_access(client, server, QuantumDataRequest("read", 3))

    def test_payload_width_checked(self):
        client, server = fresh(n_dat=2)
        with pytest.raises(ValueError):
            qoram_access(client, server, QuantumDataRequest("write", 1, DensityMatrix.basis(1, 0)))

    def test_write_requires_payload(self):
        with pytest.raises(ValueError):
            QuantumDataRequest("write", 1, None)

    def test_qubit_count_conserved(self):
        client, server = fresh(seed=8)
        def count():
            blocks = sum(len(b) for b in server.nodes)
            return blocks * client.params.n_msg + len(client.stash) * client.params.n_dat
        before = count()
        qoram_access(client, server, QuantumDataRequest("write", 1, DensityMatrix.basis(1, 1)))
        assert count() == before


class TestExtractor:
    def test_identical_reports_on_repeat(self):
        client, server = fresh(seed=9)
        _, _, tr = qoram_access(client, server, QuantumDataRequest("read", 1))
        a = report_json(safe_extractor_default(tr, server))
        b = report_json(safe_extractor_default(tr, server))
        assert a == b

    def test_no_state_disturbance(self):
        client, server = fresh(seed=10)
        before = server.digest()
        safe_extractor_default(None, server)
        assert server.digest() == before

    def test_report_contains_announced_leaf(self):
        client, server = fresh(seed=11)
        expected = client.position_map[1]
        _, _, tr = qoram_access(client, server, QuantumDataRequest("read", 1))
        report = safe_extractor_default(tr, server)
        assert report["leaf"] == expected
        assert "down" in report and "up" in report


def test_tag_measurement_never_disturbs_data():
    # blocks carry basis-state tags, so the tag measurement is exact and
    # the data register of non-target blocks is untouched
    client, server = fresh(n_db=2, seed=12)
    phi = DensityMatrix.random_pure(1, Rand(13))
    qoram_access(client, server, QuantumDataRequest("write", 2, phi))

    def stored_data(tag):
        for bucket in server.nodes:
            for block in bucket:
                plain = client.scheme.dec(client.key, block.cipher)
                tag_marginal = np.real(np.diag(plain.mat)).reshape(
                    1 << client.params.n_tag, -1
                ).sum(axis=1)
                if int(np.argmax(tag_marginal)) == tag:
                    return partial_trace(plain, list(range(client.params.n_tag, client.params.n_msg)))
        return None

    before = stored_data(2)
    qoram_access(client, server, QuantumDataRequest("read", 1))
    after = stored_data(2)
    assert before is not None and after is not None
    assert trace_distance(before, after) < 1e-10
