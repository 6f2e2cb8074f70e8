"""Concrete adversaries for the separation experiments.

Each constructor returns an adversary object matching the interface of
the game it plays, with an AttackSpec describing the target family and
the expected outcome (certainty against the broken target, statistical
null against the hardened one).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _accel
from .bits import BitString
from .games import QindChallenge
from .oram import DataRequest
from .qoram import QuantumDataRequest
from .quantum import DensityMatrix, StateVector, apply_gate, measure_computational
from .rng import Rand, dlog_bruteforce  # noqa: F401  (re-exported: predictor primitive)
from .schemes import BOT, Cca1SepScheme, Ciphertext, core_function_split  # noqa: F401


@dataclass(frozen=True)
class AttackSpec:
    name: str
    target: str
    game: str
    expected: str


# ---------------------------------------------------------------------------
# classical separations
# ---------------------------------------------------------------------------


class OtpReuseAttack:
    """Encrypt both candidate messages through the oracle and compare
    with the challenge; breaks any deterministic scheme."""

    spec = AttackSpec("otp-reuse", "otp", "ind-cpa", "wins with probability 1 vs the pad")

    def __init__(self, msg_bits: int):
        self.m0 = BitString.zeros(msg_bits)
        self.m1 = BitString.ones(msg_bits)

    def choose(self, oracles, rand: Rand):
        c0 = oracles.enc(self.m0)
        c1 = oracles.enc(self.m1)
        return self.m0, self.m1, (c0, c1)

    def guess(self, challenge: Ciphertext, state, oracles, rand: Rand) -> int:
        c0, c1 = state
        if challenge.body == c0.body and challenge.r == c0.r:
            return 0
        if challenge.body == c1.body and challenge.r == c1.r:
            return 1
        return rand.coin()


def otp_reuse_attack(msg_bits: int = 8) -> OtpReuseAttack:
    return OtpReuseAttack(msg_bits)


class Cca1CounterexampleAttack:
    """Three-query key recovery against the paired-ciphertext scheme:
    encrypt anything, decrypt the swapped halves to learn the hidden
    message, encrypt the hidden message to read off the key."""

    spec = AttackSpec("cca1-counterexample", "skes-cca1-sep", "ind-cca1",
                      "recovers the key with probability 1")

    def __init__(self, scheme: Cca1SepScheme):
        self.scheme = scheme

    def _key_from_pair(self, oracles, probe: BitString):
        c = oracles.enc(probe)
        if isinstance(c.aux, BitString):
            # we accidentally encrypted the hidden message itself
            return c.aux
        if not isinstance(c.aux, Ciphertext):
            return None  # target is not the paired scheme
        swapped = Cca1SepScheme.swap_halves(c)
        hidden = oracles.dec(swapped)
        c2 = oracles.enc(hidden)
        return c2.aux if isinstance(c2.aux, BitString) else None

    def choose(self, oracles, rand: Rand):
        key = self._key_from_pair(oracles, BitString.zeros(self.scheme.msg_bits))
        m0 = BitString.zeros(self.scheme.msg_bits)
        m1 = BitString.ones(self.scheme.msg_bits)
        return m0, m1, (key, m0, m1)

    def guess(self, challenge: Ciphertext, state, oracles, rand: Rand) -> int:
        key, m0, m1 = state
        if key is None:
            return rand.coin()
        plain = self.scheme.base.dec(key, Ciphertext(self.scheme.base.name, challenge.body, r=challenge.r))
        if plain == m1:
            return 1
        if plain == m0:
            return 0
        return rand.coin()


def cca1_counterexample_attack(scheme: Cca1SepScheme) -> Cca1CounterexampleAttack:
    return Cca1CounterexampleAttack(scheme)


class Cca2FlipAttack:
    """Flip the malleable core of the challenge, decrypt the (now
    admissible) ciphertext, unflip, compare."""

    spec = AttackSpec("cca2-flip", "skes-goldreich", "ind-cca2",
                      "wins with probability 1 via one related-ciphertext query")

    def __init__(self, msg_bits: int):
        self.m0 = BitString.zeros(msg_bits)
        self.m1 = BitString.ones(msg_bits)

    def choose(self, oracles, rand: Rand):
        return self.m0, self.m1, None

    def guess(self, challenge: Ciphertext, state, oracles, rand: Rand) -> int:
        flip = BitString.ones(challenge.body.width)
        related = Ciphertext(challenge.scheme, challenge.body ^ flip, r=challenge.r)
        plain = oracles.dec(related)
        if plain is BOT:
            return rand.coin()
        recovered = plain ^ BitString.ones(plain.width)
        if recovered == self.m1:
            return 1
        if recovered == self.m0:
            return 0
        return rand.coin()


def cca2_flip_attack(msg_bits: int = 8) -> Cca2FlipAttack:
    return Cca2FlipAttack(msg_bits)


# ---------------------------------------------------------------------------
# Hadamard distinguisher against in-place quantum encryption
# ---------------------------------------------------------------------------


class HadamardDistinguisher:
    """Challenge with the uniform-superposition pair H|0..0>, H|1..1>.

    A basis permutation fixes the first state and only flips signs on
    the second, so re-applying H and measuring separates them with
    certainty whenever the core does not expand the message.
    """

    spec = AttackSpec("hadamard-distinguisher", "type2-lift(quasi-length-preserving)",
                      "qind", "measures all-zeros iff the first arm was encrypted")

    def __init__(self, msg_qubits: int):
        self.m = msg_qubits

    def challenge(self, rand: Rand, oracle=None) -> QindChallenge:
        plus = StateVector.zero(self.m)
        minus = StateVector.basis(self.m, (1 << self.m) - 1)
        for j in range(self.m):
            plus = apply_gate(plus, "H", [j])
            minus = apply_gate(minus, "H", [j])
        return QindChallenge.product(plus.density(), minus.density())

    def distinguish(self, state: DensityMatrix, env_qubits: int, classical, rand: Rand, oracle=None) -> int:
        core = list(range(env_qubits, state.n_qubits))
        out = state
        for q in core:
            out = apply_gate(out, "H", [q])
        outcome, _ = measure_computational(out, core, rand)
        return 0 if outcome.value == 0 else 1


def hadamard_distinguisher(msg_qubits: int) -> HadamardDistinguisher:
    return HadamardDistinguisher(msg_qubits)


# ---------------------------------------------------------------------------
# generator-prediction attack on the tree ORAM
# ---------------------------------------------------------------------------


class BmOramAttack:
    """Recover the position-map generator state from observed leaves.

    Issues k repeated writes to one id, reads the leaf history off the
    transcripts, brute-forces the generator seed consistent with the
    truncated outputs, and predicts the leaf the challenge access will
    reveal if it touches that id.  A post-challenge sanity query guards
    against wrong predictions; on any failure the attack answers with a
    fair coin rather than aborting.
    """

    spec = AttackSpec("bm-oram-attack", "pathoram(blum-micali)", "ap-ind-cqa",
                      "wins with the predictor's success rate; null against a secure generator")

    def __init__(self, k_queries: int, p: int, g: int, target_id: int = 1, other_id: int = 2,
                 data: BitString | None = None):
        self.k = k_queries
        self.p = p
        self.g = g
        self.target_id = target_id
        self.other_id = other_id
        self.data = data

    def begin(self, rand: Rand, params) -> None:
        self.params = params
        self.data = self.data if self.data is not None else BitString.zeros(params.n_dat)
        self.leaves: list[int] = []
        self.issued = 0
        self.prediction = -1
        self.guess_bit: int | None = None
        self.sanity_state = "pending"
        self.answer: int | None = None
        self._rand = rand

    # -- learning phase: k writes to the target id --------------------------

    def phase1_request(self, view):
        if view is not None and len(self.leaves) < self.k:
            self.leaves.append(view.transcript.leaf)
        if self.issued < self.k:
            self.issued += 1
            return DataRequest("write", self.target_id, self.data)
        return None

    def challenge(self):
        if self.k > 0:
            n_db = self.params.n_db
            positions = [self.target_id - 1] + [n_db + t - 1 for t in range(1, self.k)]
            _, self.prediction = _accel.bm_recover_state(
                self.p, self.g, self.params.n_tag, self.params.n_tree,
                positions, self.leaves, n_db + self.k - 1,
            )
        return (
            DataRequest("write", self.target_id, self.data),
            DataRequest("write", self.other_id, self.data),
        )

    # -- challenge view, then one sanity query ------------------------------

    def phase2_request(self, view):
        if self.sanity_state == "pending":
            if self.prediction < 0:
                # no consistent seed: degrade to guessing, skip the check
                self.answer = self._rand.coin()
                self.sanity_state = "done"
                return None
            self.guess_bit = 0 if view.transcript.leaf == self.prediction else 1
            self.sanity_state = "checking"
            probe = self.target_id if self.guess_bit == 1 else self.other_id
            return DataRequest("write", probe, self.data)
        if self.sanity_state == "checking":
            observed = view.transcript.leaf
            if self.guess_bit == 1:
                passed = observed == self.prediction
            else:
                passed = observed != self.prediction
            self.answer = self.guess_bit if passed else self._rand.coin()
            self.sanity_state = "done"
        return None

    def output(self) -> int:
        return self.answer


def bm_oram_attack(k_queries: int, p: int, g: int, **kw) -> BmOramAttack:
    return BmOramAttack(k_queries, p, g, **kw)


class LeafFrequencyDistinguisher:
    """Baseline access-pattern adversary: repeatedly touches one id and
    guesses the challenge by matching its most recent leaf observation.
    Null against any unpredictable position-map generator."""

    spec = AttackSpec("leaf-frequency", "pathoram(secure-prng)", "ap-ind-cqa",
                      "advantage statistically null")

    def __init__(self, k_queries: int = 8, target_id: int = 1, other_id: int = 2,
                 data: BitString | None = None):
        self.k = k_queries
        self.target_id = target_id
        self.other_id = other_id
        self.data = data

    def begin(self, rand: Rand, params) -> None:
        self.params = params
        self.data = self.data if self.data is not None else BitString.zeros(params.n_dat)
        self.leaves: list[int] = []
        self.issued = 0
        self.answer = None
        self._rand = rand

    def phase1_request(self, view):
        if view is not None and len(self.leaves) < self.k:
            self.leaves.append(view.transcript.leaf)
        if self.issued < self.k:
            self.issued += 1
            return DataRequest("write", self.target_id, self.data)
        return None

    def challenge(self):
        return (
            DataRequest("write", self.target_id, self.data),
            DataRequest("write", self.other_id, self.data),
        )

    def phase2_request(self, view):
        if self.answer is None:
            # first phase-2 call carries the challenge view
            matched = bool(self.leaves) and view.transcript.leaf == self.leaves[-1]
            self.answer = 0 if matched else self._rand.coin()
        return None

    def output(self) -> int:
        return self.answer


# ---------------------------------------------------------------------------
# quantum access-pattern null distinguishers
# ---------------------------------------------------------------------------


class TagOnlyQapDistinguisher:
    """Challenge arms touch different ids with equal payloads; guesses
    from the challenge leaf against remembered leaf observations."""

    spec = AttackSpec("qap-tag-only", "pathqoram", "qap-ind-cqa", "advantage statistically null")

    def __init__(self, k_queries: int = 4, id0: int = 1, id1: int = 2):
        self.k = k_queries
        self.id0 = id0
        self.id1 = id1

    def begin(self, rand: Rand, params) -> None:
        self.params = params
        self.payload = DensityMatrix.basis(params.n_dat, 0)
        self.issued = 0
        self.last_leaf = None
        self.answer = None
        self._rand = rand

    def phase1_request(self, view):
        if view is not None:
            self.last_leaf = view["post"]["leaf"]
        if self.issued < self.k:
            self.issued += 1
            return QuantumDataRequest("write", self.id0, self.payload)
        return None

    def challenge(self):
        return (
            QuantumDataRequest("write", self.id0, self.payload),
            QuantumDataRequest("write", self.id1, self.payload),
        )

    def phase2_request(self, view):
        if self.answer is None:
            leaf = view["post"]["leaf"]
            self.answer = 0 if leaf == self.last_leaf else self._rand.coin()
        return None

    def output(self) -> int:
        return self.answer


class PayloadOnlyQapDistinguisher:
    """Challenge arms share the id but carry orthogonal payloads; the
    guess is scraped from ciphertext digests, which carry no usable
    signal under fresh pads."""

    spec = AttackSpec("qap-payload-only", "pathqoram", "qap-ind-cqa", "advantage statistically null")

    def __init__(self, target_id: int = 1):
        self.target_id = target_id

    def begin(self, rand: Rand, params) -> None:
        self.params = params
        self.zero = DensityMatrix.basis(params.n_dat, 0)
        self.one = DensityMatrix.basis(params.n_dat, (1 << params.n_dat) - 1)
        self.answer = None

    def phase1_request(self, view):
        return None

    def challenge(self):
        return (
            QuantumDataRequest("write", self.target_id, self.zero),
            QuantumDataRequest("write", self.target_id, self.one),
        )

    def phase2_request(self, view):
        if self.answer is None:
            digest = view["post"]["up"][0]
            self.answer = int(digest, 16) & 1
        return None

    def output(self) -> int:
        return self.answer
