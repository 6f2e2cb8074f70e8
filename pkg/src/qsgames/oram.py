"""Tree-based ORAM client/server state machines.

The server stores a complete binary tree of encrypted fixed-size
blocks; the client holds the key, a position map from block ids to
leaves, and a stash.  Every access downloads one root-to-leaf path,
remaps the touched id to a fresh pseudorandom leaf, re-encrypts
everything with fresh randomness, and greedily pushes blocks as deep
as possible along the downloaded path (deepest common node first, then
up toward the root, then the stash).

The SKES and the position-map generator are pluggable; the generator
choice is exactly what the separation experiments attack.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .bits import BitString
from .rng import CounterPrfPrng, Rand
from .schemes import Ciphertext, GoldreichScheme


class ProtocolAbort(Exception):
    """Raised when a downloaded block decrypts to garbage."""


@dataclass(frozen=True)
class DataRequest:
    op: str
    id: int
    data: BitString | None = None

    def __post_init__(self):
        if self.op not in ("read", "write"):
            raise ValueError(f"unknown op {self.op!r}")
        if self.op == "write" and self.data is None:
            raise ValueError("write requires data")


@dataclass
class OramParams:
    n_db: int
    n_dat: int = 8
    n_bkt: int = 4
    n_max: int | None = None
    key_bits: int = 16

    def __post_init__(self):
        self.n_max = self.n_db if self.n_max is None else self.n_max
        if self.n_db > self.n_max:
            raise ValueError("n_db exceeds n_max")
        # tag width must cover ids 1..n_max plus the reserved empty tag 0
        self.n_tag = self.n_max.bit_length()
        self.n_tree = (self.n_db - 1).bit_length()
        self.n_msg = self.n_tag + self.n_dat


def _default_skes(params: OramParams) -> GoldreichScheme:
    # 32 randomness bits keep re-encryption collisions out of reach at
    # the trial counts the freshness checks run with
    return GoldreichScheme(params.n_msg, r_bits=32, key_bits=params.key_bits)


class ServerDB:
    """Complete binary tree of height n_tree; heap-indexed nodes, each a
    bucket of exactly n_bkt blocks (empties included)."""

    def __init__(self, n_tree: int, n_bkt: int):
        self.n_tree = n_tree
        self.n_bkt = n_bkt
        self.node_count = (1 << (n_tree + 1)) - 1
        self.nodes: list[list[Ciphertext]] = [[] for _ in range(self.node_count)]

    def path_nodes(self, leaf: int) -> list[int]:
        """Heap indices from the root down to the given leaf."""
        idx = (1 << self.n_tree) - 1 + leaf
        path = []
        while True:
            path.append(idx)
            if idx == 0:
                break
            idx = (idx - 1) // 2
        return path[::-1]

    def snapshot(self) -> tuple:
        return tuple(
            tuple((c.body.value, c.r.value) for c in bucket) for bucket in self.nodes
        )

    def digest(self) -> int:
        return fnv1a64(str(self.snapshot()).encode())


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


@dataclass
class Transcript:
    leaf: int
    down: tuple
    up: tuple


@dataclass
class AccessPattern:
    pre_db: tuple
    transcript: Transcript
    post_db: tuple

    def to_json(self) -> str:
        def hex_block(pair):
            body, r = pair
            return format(body, "x") + ":" + format(r, "x")

        return json.dumps(
            {
                "leaf": self.transcript.leaf,
                "down": [hex_block(b) for b in self.transcript.down],
                "up": [hex_block(b) for b in self.transcript.up],
                "pre_digest": fnv1a64(str(self.pre_db).encode()),
                "post_digest": fnv1a64(str(self.post_db).encode()),
            }
        )


@dataclass
class ClientState:
    params: OramParams
    key: object
    position_map: dict
    prng: object
    rand: Rand
    skes: object
    stash: list = field(default_factory=list)  # (tag, data) records
    last_read: BitString | None = None
    stash_history: list = field(default_factory=list)
    leaf_log: list = field(default_factory=list)  # truncated values consumed, white-box

    def fresh_leaf(self) -> int:
        value = self.prng.next_value(self.params.n_tag).value
        leaf = value & ((1 << self.params.n_tree) - 1)
        self.leaf_log.append(leaf)
        return leaf


def oram_init(params: OramParams, rand: Rand, prng=None, skes=None):
    """Set up a fresh client/server pair with an all-empty encrypted tree."""
    skes = skes or _default_skes(params)
    key = skes.key_gen(rand)
    prng = prng or CounterPrfPrng(rand.child())
    client = ClientState(params, key, {}, prng, rand.child(), skes)
    for i in range(1, params.n_db + 1):
        client.position_map[i] = client.fresh_leaf()
    server = ServerDB(params.n_tree, params.n_bkt)
    zero_msg = BitString.zeros(params.n_msg)
    for idx in range(server.node_count):
        server.nodes[idx] = [
            skes.enc(key, zero_msg, rand=client.rand) for _ in range(params.n_bkt)
        ]
    return client, server


def _decode(client: ClientState, block: Ciphertext):
    msg = client.skes.dec(client.key, block)
    tag = msg.take(client.params.n_tag).value
    data = msg.drop(client.params.n_tag)
    if tag > client.params.n_db:
        raise ProtocolAbort(f"block decodes to invalid tag {tag}")
    return tag, data


def _common_depth(a: int, b: int, n_tree: int) -> int:
    """Number of leading path bits shared by two leaves."""
    for d in range(n_tree, -1, -1):
        if (a >> (n_tree - d)) == (b >> (n_tree - d)):
            return d
    return 0


def oram_access(client: ClientState, server: ServerDB, dr: DataRequest):
    """One read/write exchange; returns (client, server, AccessPattern)."""
    params = client.params
    if not 1 <= dr.id <= params.n_db:
        raise ValueError(f"id {dr.id} outside 1..{params.n_db}")
    if dr.data is not None and dr.data.width != params.n_dat:
        raise ValueError("data width mismatch")

    pre = server.snapshot()
    leaf = client.position_map[dr.id]
    path = server.path_nodes(leaf)
    down = tuple(
        (c.body.value, c.r.value) for idx in path for c in server.nodes[idx]
    )

    # fresh remap before touching the branch
    client.position_map[dr.id] = client.fresh_leaf()

    # decrypt the branch leaf-to-root, slots ascending (eviction order)
    records: list[list] = []
    for idx in reversed(path):
        for block in server.nodes[idx]:
            tag, data = _decode(client, block)
            if tag != 0:
                records.append([tag, data])

    target = next((rec for rec in records if rec[0] == dr.id), None)
    stash_target = None
    if target is None:
        stash_target = next((rec for rec in client.stash if rec[0] == dr.id), None)

    if dr.op == "read":
        if target is not None:
            client.last_read = target[1]
        elif stash_target is not None:
            client.last_read = stash_target[1]
        else:
            client.last_read = BitString.zeros(params.n_dat)
    else:
        if target is not None:
            target[1] = dr.data
        elif stash_target is not None:
            stash_target[1] = dr.data
        else:
            records.append([dr.id, dr.data])

    # eviction: branch records first, then the stash re-examination
    queue = records + [rec for rec in client.stash]
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
    client.stash_history.append(len(new_stash))

    zero_msg = BitString.zeros(params.n_msg)
    for idx in path:
        bucket = []
        for tag, data in placed[idx]:
            msg = BitString(tag, params.n_tag).concat(data)
            bucket.append(client.skes.enc(client.key, msg, rand=client.rand))
        while len(bucket) < params.n_bkt:
            bucket.append(client.skes.enc(client.key, zero_msg, rand=client.rand))
        server.nodes[idx] = bucket

    up = tuple((c.body.value, c.r.value) for idx in path for c in server.nodes[idx])
    post = server.snapshot()
    return client, server, AccessPattern(pre, Transcript(leaf, down, up), post)


# ---------------------------------------------------------------------------
# soundness checking
# ---------------------------------------------------------------------------


@dataclass
class TraceStep:
    dr: DataRequest
    returned: BitString | None
    key_before: object
    key_after: object
    aborted: bool = False


@dataclass
class SoundnessReport:
    steps: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def run_trace(client: ClientState, server: ServerDB, requests: list[DataRequest]) -> list[TraceStep]:
    steps = []
    for dr in requests:
        key_before = client.key
        try:
            oram_access(client, server, dr)
            returned = client.last_read if dr.op == "read" else None
            steps.append(TraceStep(dr, returned, key_before, client.key))
        except ProtocolAbort:
            steps.append(TraceStep(dr, None, key_before, client.key, aborted=True))
    return steps


def check_minimal_soundness(trace: list[TraceStep]) -> SoundnessReport:
    """Replay a trace against a shadow store and list every violation of
    key retention, read-returns-stored-data, and write-persistence."""
    shadow: dict[int, BitString] = {}
    violations = []
    zero = None
    for i, step in enumerate(trace):
        if step.key_after != step.key_before:
            violations.append((i, "key", "client key changed during access"))
        if step.aborted:
            violations.append((i, "abort", f"access {step.dr} aborted on malformed block"))
            continue
        if zero is None and step.dr.data is not None:
            zero = BitString.zeros(step.dr.data.width)
        if step.dr.op == "write":
            shadow[step.dr.id] = step.dr.data
        else:
            expected = shadow.get(step.dr.id)
            if expected is None:
                if step.returned is None or step.returned.value != 0:
                    violations.append((i, "read", f"fresh id {step.dr.id} returned {step.returned}"))
            elif step.returned != expected:
                violations.append(
                    (i, "read", f"id {step.dr.id} returned {step.returned}, stored {expected}")
                )
    return SoundnessReport(len(trace), violations)


def diff_nodes(pre: tuple, post: tuple) -> list[int]:
    """Heap indices whose buckets differ between two snapshots."""
    return [i for i, (a, b) in enumerate(zip(pre, post)) if a != b]
