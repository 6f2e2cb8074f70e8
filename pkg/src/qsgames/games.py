"""Security-game harnesses with enforced oracle discipline.

Each game_* function plays one trial and returns the win bit (guess
equals the challenge bit).  estimate_advantage runs seeded independent
trials and reports successes/trials - 1/2 with a normal-approximation
confidence interval.

Oracle grants are enforced mechanically: a decryption query after the
challenge under a phase-1-only grant, a query for the forbidden
challenge ciphertext, or a signing-budget overrun raise
GameProtocolError (except the restricted oracle, whose rejection is
the value BOT, not an error).

These harnesses certify concrete adversaries and statistical null
results at fixed sizes; they never certify universal security.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

from .bits import BitString
from .oram import AccessPattern, oram_access
from .qoram import qoram_access, safe_extractor_default
from .quantum import (
    DensityMatrix,
    StateVector,
    apply_unitary,
    build_from_description,
    partial_trace,
    type1_oracle,
)
from .rng import Rand
from .schemes import Ciphertext, cca2_restricted_dec


class GameProtocolError(Exception):
    """An adversary stepped outside its oracle grant."""


@dataclass
class ExperimentResult:
    game: str
    params: dict
    trials: int
    successes: int
    advantage: float
    ci95: float
    seed: int
    runtime_ms: float = 0.0

    def to_json(self) -> str:
        payload = {
            "game": self.game,
            "params": self.params,
            "trials": self.trials,
            "successes": self.successes,
            "advantage": self.advantage,
            "ci95": self.ci95,
            "seed": self.seed,
            "runtime_ms": self.runtime_ms,
        }
        return json.dumps(payload, sort_keys=True)


def _ci95(successes: int, trials: int) -> float:
    # normal approximation; the guard keeps the implied interval inside
    # the achievable proportion range (and degenerate outcomes report 0)
    p = successes / trials
    half = 1.96 * (p * (1 - p) / trials) ** 0.5
    return min(half, p, 1 - p) if 0 < p < 1 else 0.0


def estimate_advantage(game_fn, trials: int, seed: int, name: str = "game", params: dict | None = None) -> ExperimentResult:
    """Run seeded independent trials of game_fn(rand) -> {0, 1}."""
    if trials < 1:
        raise ValueError("need at least one trial")
    t0 = time.perf_counter()
    rands = Rand(seed).split(trials)
    successes = sum(game_fn(r) for r in rands)
    dt = (time.perf_counter() - t0) * 1000
    return ExperimentResult(
        game=name,
        params=params or {},
        trials=trials,
        successes=successes,
        advantage=successes / trials - 0.5,
        ci95=_ci95(successes, trials),
        seed=seed,
        runtime_ms=dt,
    )


def three_sigma(trials: int) -> float:
    """3-sigma band for the advantage of a fair coin over `trials` runs."""
    return 3.0 * 0.5 / trials**0.5


# ---------------------------------------------------------------------------
# classical indistinguishability games
# ---------------------------------------------------------------------------

_VARIANT_GRANTS = {
    "plain": frozenset(),
    "cpa": frozenset({"enc"}),
    "cca1": frozenset({"enc", "dec1"}),
    "cca2": frozenset({"enc", "dec1", "dec2"}),
}


class OracleSet:
    """Phase-aware encryption/decryption oracles for one game instance."""

    def __init__(self, scheme, key, rand: Rand, grants: frozenset):
        self._scheme = scheme
        self._key = key
        self._rand = rand
        self._grants = grants
        self.phase = 1
        self.challenge_ct: Ciphertext | None = None

    def enc(self, m: BitString) -> Ciphertext:
        if "enc" not in self._grants:
            raise GameProtocolError("encryption oracle not granted in this game")
        return self._scheme.enc(self._key, m, rand=self._rand)

    def dec(self, c: Ciphertext):
        if self.phase == 1:
            if "dec1" not in self._grants:
                raise GameProtocolError("decryption oracle not granted before the challenge")
            return self._scheme.dec(self._key, c)
        if "dec2" not in self._grants:
            raise GameProtocolError("decryption oracle not granted after the challenge")
        return cca2_restricted_dec(self._scheme, self._key, self.challenge_ct, c)


def game_ind(scheme, adversary, rand: Rand, variant: str = "plain", forced_b: int | None = None) -> int:
    """One round of the indistinguishability experiment.

    variant selects the oracle grant: "plain" (none), "cpa"
    (encryption in both phases), "cca1" (plus decryption before the
    challenge only), "cca2" (plus the rejecting decryption oracle after).
    """
    if variant not in _VARIANT_GRANTS:
        raise ValueError(f"unknown variant {variant!r}")
    key = scheme.key_gen(rand)
    oracles = OracleSet(scheme, key, rand, _VARIANT_GRANTS[variant])
    m0, m1, state = adversary.choose(oracles, rand)
    b = rand.coin() if forced_b is None else forced_b
    challenge = scheme.enc(key, m1 if b else m0, rand=rand)
    oracles.phase = 2
    oracles.challenge_ct = challenge
    guess = adversary.guess(challenge, state, oracles, rand)
    return int(guess == b)


def game_ind_cpa(scheme, adversary, rand, **kw):
    return game_ind(scheme, adversary, rand, variant="cpa", **kw)


def game_ind_cca1(scheme, adversary, rand, **kw):
    return game_ind(scheme, adversary, rand, variant="cca1", **kw)


def game_ind_cca2(scheme, adversary, rand, **kw):
    return game_ind(scheme, adversary, rand, variant="cca2", **kw)


# post-quantum flavor: same classical oracles and classical challenge,
# only the adversary's computational model changes, so the experiment
# coincides with the chosen-plaintext game above
game_pq_ind_cpa = game_ind_cpa


# ---------------------------------------------------------------------------
# superposition encryption-oracle game (classical challenge)
# ---------------------------------------------------------------------------


class TypeOneEncOracle:
    """Serves encryption as the xor-style unitary on adversary registers.

    Each call pins fresh randomness, builds |x, y> -> |x, y xor f(x)>
    for the resulting core function, applies it to the requested wires
    of the adversary's working state, and hands back the classical
    randomness component (the rest of the ciphertext).
    """

    def __init__(self, scheme, key, rand: Rand):
        self._scheme = scheme
        self._core = scheme.core_split()
        self._key = key
        self._rand = rand
        self.calls = 0

    def query(self, state: StateVector, x_targets: list[int], y_targets: list[int],
              r: BitString | None = None):
        self.calls += 1
        if self._core.r_bits and r is None:
            r = self._rand.bits(self._core.r_bits)
        m = self._scheme.msg_bits
        table = [
            self._core.f(self._key, r, BitString(x, m)).value for x in range(1 << m)
        ]
        out_bits = len(y_targets)
        op = type1_oracle(table, m, out_bits)
        new_state = apply_unitary(state, op, list(x_targets) + list(y_targets))
        return new_state, r

    def classical(self, m: BitString):
        """Basis-state shortcut matching query() on |m, 0>."""
        return self._scheme.enc(self._key, m, rand=self._rand)


def game_ind_qcpa(scheme, adversary, rand: Rand, forced_b: int | None = None) -> int:
    """Classical challenge bit, superposition access to encryption."""
    key = scheme.key_gen(rand)
    oracle = TypeOneEncOracle(scheme, key, rand)
    m0, m1, held = adversary.choose(oracle, rand)
    b = rand.coin() if forced_b is None else forced_b
    challenge = scheme.enc(key, m1 if b else m0, rand=rand)
    guess = adversary.guess(challenge, held, oracle, rand)
    return int(guess == b)


# ---------------------------------------------------------------------------
# quantum-challenge indistinguishability
# ---------------------------------------------------------------------------


@dataclass
class QindChallenge:
    """Challenge plaintext pair: independent arms, or one joint state on
    [environment | arm 0 | arm 1] when the arms are entangled with a
    held register (or with each other)."""

    msg_qubits: int
    env_qubits: int = 0
    arm0: DensityMatrix | None = None
    arm1: DensityMatrix | None = None
    joint: DensityMatrix | None = None

    def __post_init__(self):
        if self.joint is not None:
            expected = self.env_qubits + 2 * self.msg_qubits
            if self.joint.n_qubits != expected:
                raise ValueError(f"joint state has {self.joint.n_qubits} qubits, expected {expected}")
        elif self.arm0 is None or self.arm1 is None:
            raise ValueError("provide either both arms or a joint state")

    @classmethod
    def product(cls, arm0: DensityMatrix, arm1: DensityMatrix) -> "QindChallenge":
        if arm0.n_qubits != arm1.n_qubits:
            raise ValueError("challenge plaintext dimensions differ")
        return cls(arm0.n_qubits, 0, arm0=arm0, arm1=arm1)

    @classmethod
    def entangled(cls, joint: DensityMatrix, env_qubits: int, msg_qubits: int) -> "QindChallenge":
        return cls(msg_qubits, env_qubits, joint=joint)


class Type2EncOracle:
    """Chosen-plaintext access to the in-place encryption channel."""

    def __init__(self, scheme, key, rand: Rand):
        self._scheme = scheme
        self._key = key
        self._rand = rand
        self.calls = 0

    def encrypt(self, phi: DensityMatrix):
        self.calls += 1
        return self._scheme.enc(self._key, phi, rand=self._rand)


def game_qind(scheme, adversary, rand: Rand, challenge_form: str = "states",
              grant_cpa: bool = False, forced_b: int | None = None) -> int:
    """Quantum challenge plaintexts against a quantum encryption scheme.

    The challenger encrypts the chosen arm in place and traces out the
    other; the distinguisher receives environment plus ciphertext
    registers and any classical ciphertext components.
    """
    key = scheme.key_gen(rand)
    oracle = Type2EncOracle(scheme, key, rand) if grant_cpa else None
    b = rand.coin() if forced_b is None else forced_b
    if challenge_form == "states":
        ch = adversary.challenge(rand, oracle)
        env, m = ch.env_qubits, ch.msg_qubits
        if ch.joint is None:
            # unentangled arms: encrypt the chosen one, drop the other
            qc = scheme.enc(key, ch.arm1 if b else ch.arm0, rand=rand)
            state, env, r = qc.payload, 0, qc.r
        else:
            arm = [env + b * m + j for j in range(m)]
            other = [env + (1 - b) * m + j for j in range(m)]
            joint, cipher_reg, r = scheme.enc_on(key, ch.joint, arm, rand=rand)
            keep = [q for q in range(joint.n_qubits) if q not in other]
            state = partial_trace(joint, keep)
    elif challenge_form == "descriptions":
        desc0, desc1 = adversary.challenge(rand, oracle)
        built = build_from_description(desc1 if b else desc0)
        phi = built.density() if isinstance(built, StateVector) else built
        qc = scheme.enc(key, phi, rand=rand)
        state, env, r = qc.payload, 0, qc.r
    else:
        raise ValueError(f"unknown challenge form {challenge_form!r}")
    guess = adversary.distinguish(state, env, {"r": r}, rand, oracle)
    return int(guess == b)


def game_qind_qcpa(scheme, adversary, rand, **kw):
    return game_qind(scheme, adversary, rand, grant_cpa=True, **kw)


# ---------------------------------------------------------------------------
# access-pattern games
# ---------------------------------------------------------------------------


def game_ap_ind_cqa(oram_factory, adversary, rand: Rand, q1_max: int = 64, q2_max: int = 8,
                    forced_b: int | None = None) -> int:
    """Adaptive access-pattern indistinguishability for an ORAM.

    The adversary drives two learning phases of chosen data requests
    around one challenge access; views are full access patterns.
    """
    client, server = oram_factory(rand)
    adversary.begin(rand, client.params)

    view: AccessPattern | None = None
    for _ in range(q1_max):
        dr = adversary.phase1_request(view)
        if dr is None:
            break
        _, _, view = oram_access(client, server, dr)
    else:
        if adversary.phase1_request(view) is not None:
            raise GameProtocolError("first learning phase exceeded its budget")

    dr0, dr1 = adversary.challenge()
    for dr in (dr0, dr1):
        if not 1 <= dr.id <= client.params.n_db:
            raise GameProtocolError("challenge request uses an invalid id")
    b = rand.coin() if forced_b is None else forced_b
    _, _, view = oram_access(client, server, dr1 if b else dr0)

    for _ in range(q2_max):
        dr = adversary.phase2_request(view)
        if dr is None:
            break
        _, _, view = oram_access(client, server, dr)
    else:
        if adversary.phase2_request(view) is not None:
            raise GameProtocolError("second learning phase exceeded its budget")

    return int(adversary.output() == b)


def game_qap_ind_cqa(qoram_factory, adversary, rand: Rand, q1_max: int = 32, q2_max: int = 8,
                     forced_b: int | None = None) -> int:
    """Quantum access-pattern game; views come from the default safe
    extractor run before and after each access, and the unchosen
    challenge payload is discarded."""
    client, server = qoram_factory(rand)
    adversary.begin(rand, client.params)

    view = None
    for _ in range(q1_max):
        qdr = adversary.phase1_request(view)
        if qdr is None:
            break
        pre = safe_extractor_default(None, server)
        _, _, transcript = qoram_access(client, server, qdr)
        view = {"pre": pre, "post": safe_extractor_default(transcript, server)}
    else:
        if adversary.phase1_request(view) is not None:
            raise GameProtocolError("first learning phase exceeded its budget")

    qdr0, qdr1 = adversary.challenge()
    b = rand.coin() if forced_b is None else forced_b
    pre = safe_extractor_default(None, server)
    _, _, transcript = qoram_access(client, server, qdr1 if b else qdr0)
    view = {"pre": pre, "post": safe_extractor_default(transcript, server)}

    for _ in range(q2_max):
        qdr = adversary.phase2_request(view)
        if qdr is None:
            break
        pre = safe_extractor_default(None, server)
        _, _, transcript = qoram_access(client, server, qdr)
        view = {"pre": pre, "post": safe_extractor_default(transcript, server)}
    else:
        if adversary.phase2_request(view) is not None:
            raise GameProtocolError("second learning phase exceeded its budget")

    return int(adversary.output() == b)


# ---------------------------------------------------------------------------
# forgery game
# ---------------------------------------------------------------------------


def game_euf_cma(sig_scheme, forger, rand: Rand, q_s: int = 16) -> int:
    """Existential forgery under a bounded signing oracle: the forger
    wins when its output verifies on a message it never queried."""
    pk, sk = sig_scheme.key_gen(rand)
    oracle = sig_scheme.fresh_oracle(rand.child())
    queried = []

    def sign_oracle(m):
        if len(queried) >= q_s:
            raise GameProtocolError("signing budget exceeded")
        queried.append(m)
        return sig_scheme.sign(sk, m, oracle, rand)

    m, sig = forger.forge(pk, sign_oracle, oracle, rand)
    if m in queried:
        return 0
    return int(sig_scheme.verify(pk, m, sig, oracle))


# ---------------------------------------------------------------------------
# baseline adversaries (calibration and harness sanity)
# ---------------------------------------------------------------------------


class RandomGuessAdversary:
    """Ignores everything and flips a coin; calibrates the null band."""

    def __init__(self, msg_bits: int):
        self.m0 = BitString.zeros(msg_bits)
        self.m1 = BitString.ones(msg_bits)

    def choose(self, oracles, rand: Rand):
        return self.m0, self.m1, None

    def guess(self, challenge, state, oracles, rand: Rand) -> int:
        return rand.coin()


class ReplayForger:
    """Asks for one signature and hands it straight back; always loses
    the freshness check."""

    def forge(self, pk, sign_oracle, ro, rand: Rand):
        m = "replayed message"
        return m, sign_oracle(m)


class RandomForger:
    """Outputs uniformly random signature components on a fresh message."""

    def __init__(self, sig_scheme):
        self._scheme = sig_scheme

    def forge(self, pk, sign_oracle, ro, rand: Rand):
        from .fiatshamir import FsSignature

        q = self._scheme.group.q
        p = self._scheme.group.p
        first = rand.integer(1, p) if self._scheme.form == "sigma" else rand.integer(0, q)
        return "fresh message", FsSignature(self._scheme.form, first, rand.integer(0, q))


class KeyForger:
    """Sanity check: given the secret key out of band, forging is free."""

    def __init__(self, sig_scheme, sk):
        self._scheme = sig_scheme
        self._sk = sk

    def forge(self, pk, sign_oracle, ro, rand: Rand):
        m = "never queried"
        return m, self._scheme.sign(self._sk, m, ro, rand)
