"""Tree ORAM over simulated quantum blocks.

Each stored block is a quantum ciphertext of (tag register || data
register): the tag is a computational basis state naming the block id,
so the client can locate its target by measuring only the tag qubits,
which never disturbs the (unentangled) data register.  Read and write
are the same primitive: a swap between the client's payload register
and the block's data register.  Qubit count is conserved; nothing is
ever copied.

Blocks are simulated one density matrix at a time, which is exact
because encryption acts blockwise and the tree holds no cross-block
entanglement.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .bits import BitString
from .oram import OramParams, ProtocolAbort, fnv1a64
from .qscheme import QCiphertext, Skqes1Scheme
from .quantum import DensityMatrix, measure_computational, partial_trace, trace_distance
from .rng import CounterPrfPrng, Rand


@dataclass(frozen=True)
class QuantumDataRequest:
    op: str
    id: int
    payload: DensityMatrix | None = None  # None plays the bottom marker on reads

    def __post_init__(self):
        if self.op not in ("read", "write"):
            raise ValueError(f"unknown op {self.op!r}")
        if self.op == "write" and self.payload is None:
            raise ValueError("write requires a payload state")


@dataclass
class QuantumBlock:
    cipher: QCiphertext

    def digest(self) -> str:
        # adding 0.0 canonicalizes negative zeros so equal states always
        # hash equally regardless of how they were produced
        rounded = np.round(self.cipher.payload.mat, 9) + 0.0
        h = hashlib.blake2b(rounded.tobytes(), digest_size=8)
        h.update(self.cipher.r.to_hex().encode())
        return h.hexdigest()


class QServerDB:
    def __init__(self, n_tree: int, n_bkt: int):
        self.n_tree = n_tree
        self.n_bkt = n_bkt
        self.node_count = (1 << (n_tree + 1)) - 1
        self.nodes: list[list[QuantumBlock]] = [[] for _ in range(self.node_count)]

    def path_nodes(self, leaf: int) -> list[int]:
        idx = (1 << self.n_tree) - 1 + leaf
        path = []
        while True:
            path.append(idx)
            if idx == 0:
                break
            idx = (idx - 1) // 2
        return path[::-1]

    def digest(self) -> int:
        payload = "".join(b.digest() for bucket in self.nodes for b in bucket)
        return fnv1a64(payload.encode())


@dataclass
class QTranscript:
    leaf: int
    down_digests: tuple
    up_digests: tuple


@dataclass
class QClientState:
    params: OramParams
    key: BitString
    position_map: dict
    prng: object
    rand: Rand
    scheme: Skqes1Scheme
    stash: list = field(default_factory=list)  # (tag, data DensityMatrix)
    retrieved: DensityMatrix | None = None

    def fresh_leaf(self) -> int:
        value = self.prng.next_value(self.params.n_tag).value
        return value & ((1 << self.params.n_tree) - 1)


def _zero_data(params: OramParams) -> DensityMatrix:
    return DensityMatrix.basis(params.n_dat, 0)


def _encode_block(client: QClientState, tag: int, data: DensityMatrix) -> QuantumBlock:
    tag_dm = DensityMatrix.basis(client.params.n_tag, tag)
    plain = tag_dm.tensor(data)
    return QuantumBlock(client.scheme.enc(client.key, plain, rand=client.rand))


def qoram_init(params: OramParams, rand: Rand, prng=None, scheme: Skqes1Scheme | None = None):
    """Fresh client/server pair; every block encrypts |0...0>."""
    scheme = scheme or Skqes1Scheme(params.n_msg)
    key = scheme.key_gen(rand)
    prng = prng or CounterPrfPrng(rand.child())
    client = QClientState(params, key, {}, prng, rand.child(), scheme)
    for i in range(1, params.n_db + 1):
        client.position_map[i] = client.fresh_leaf()
    server = QServerDB(params.n_tree, params.n_bkt)
    for idx in range(server.node_count):
        server.nodes[idx] = [
            _encode_block(client, 0, _zero_data(params)) for _ in range(params.n_bkt)
        ]
    return client, server


def _common_depth(a: int, b: int, n_tree: int) -> int:
    for d in range(n_tree, -1, -1):
        if (a >> (n_tree - d)) == (b >> (n_tree - d)):
            return d
    return 0


def qoram_access(client: QClientState, server: QServerDB, qdr: QuantumDataRequest):
    """One access: tag-measure each branch block, swap payloads on match,
    re-encrypt fresh, evict, upload.  Returns (client, server, QTranscript).
    """
    params = client.params
    if not 1 <= qdr.id <= params.n_db:
        raise ValueError(f"id {qdr.id} outside 1..{params.n_db}")
    payload = qdr.payload if qdr.payload is not None else _zero_data(params)
    if payload.n_qubits != params.n_dat:
        raise ValueError("payload register width mismatch")

    leaf = client.position_map[qdr.id]
    path = server.path_nodes(leaf)
    down = tuple(b.digest() for idx in path for b in server.nodes[idx])
    client.position_map[qdr.id] = client.fresh_leaf()

    # decrypt, measure tags only, swap on match; leaf-to-root order
    records: list[list] = []
    swapped = False
    for idx in reversed(path):
        for block in server.nodes[idx]:
            plain = client.scheme.dec(client.key, block.cipher)
            tag_bits, post = measure_computational(
                plain, list(range(params.n_tag)), client.rand
            )
            tag = tag_bits.value
            if tag > params.n_db:
                raise ProtocolAbort(f"tag measurement produced invalid id {tag}")
            data = partial_trace(post, list(range(params.n_tag, params.n_msg)))
            if tag == 0:
                continue
            if tag == qdr.id and not swapped:
                data, payload = payload, data
                swapped = True
            records.append([tag, data])

    if not swapped:
        for rec in client.stash:
            if rec[0] == qdr.id:
                rec[1], payload = payload, rec[1]
                swapped = True
                break
    if not swapped:
        # the id has never been stored: take over an empty block, which
        # amounts to swapping with its |0> data register
        records.append([qdr.id, payload])
        payload = _zero_data(params)
    client.retrieved = payload

    queue = records + list(client.stash)
    capacity = {idx: params.n_bkt for idx in path}
    placed: dict[int, list] = {idx: [] for idx in path}
    new_stash = []
    for rec in queue:
        depth = _common_depth(leaf, client.position_map[rec[0]], params.n_tree)
        node = None
        for d in range(depth, -1, -1):
            if capacity[path[d]] > 0:
                node = path[d]
                break
        if node is None:
            new_stash.append(rec)
        else:
            capacity[node] -= 1
            placed[node].append(rec)
    client.stash = new_stash

    for idx in path:
        bucket = [_encode_block(client, tag, data) for tag, data in placed[idx]]
        while len(bucket) < params.n_bkt:
            bucket.append(_encode_block(client, 0, _zero_data(params)))
        server.nodes[idx] = bucket

    up = tuple(b.digest() for idx in path for b in server.nodes[idx])
    return client, server, QTranscript(leaf, down, up)


# ---------------------------------------------------------------------------
# safe extraction
# ---------------------------------------------------------------------------


def safe_extractor_default(transcript: QTranscript | None, server: QServerDB) -> dict:
    """Identity-action extractor: classical channel contents plus
    ciphertext-register digests; data registers are never measured and
    the joint state is untouched, so repeated runs agree bit for bit."""
    report = {"db_digest": server.digest()}
    if transcript is not None:
        report["leaf"] = transcript.leaf
        report["down"] = list(transcript.down_digests)
        report["up"] = list(transcript.up_digests)
    return report


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True)


def payload_fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    """1 - trace distance, exact for the pure-state roundtrips tested."""
    return 1.0 - trace_distance(a, b)
