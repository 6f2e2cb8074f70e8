"""Exact small-scale quantum state simulation.

Statevectors and density matrices over at most QUBIT_CAP qubits, the
gate set needed by the games (Hadamard, Paulis, CNOT, SWAP, classical
oracles), the Pauli masking scheme, partial trace, trace distance, and
the averaged-permutation channel with its closed form.

Conventions: qubit 0 is the most significant bit of the basis index,
so |x, y> lives at index x * 2**|y| + y.  States are compared through
density matrices or overlap, never raw amplitudes, since global phase
is unphysical.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .bits import BitString
from .prf import Permutation
from .rng import Rand

QUBIT_CAP = 12
ATOL_STATE = 1e-10
ATOL_POS = 1e-8
ATOL_UNITARY = 1e-8

# debug mode re-validates every state produced by a gate, oracle, or
# mask application instead of only user-constructed ones
DEBUG_CHECKS = os.environ.get("QSGAMES_DEBUG", "").strip() in ("1", "true", "yes")

_SQ2 = 1.0 / np.sqrt(2.0)

GATES = {
    "I": np.eye(2, dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "SWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}


def _check_cap(n: int) -> None:
    if n > QUBIT_CAP:
        raise ValueError(f"{n} qubits exceed the simulation cap {QUBIT_CAP}")
    if n < 1:
        raise ValueError("need at least one qubit")


@dataclass
class StateVector:
    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        _check_cap(self.n_qubits)
        self.amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if self.amps.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude array has wrong length")
        if abs(np.vdot(self.amps, self.amps).real - 1.0) > ATOL_STATE * 10:
            raise ValueError("state is not normalized")

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        return cls.basis(n_qubits, 0)

    @classmethod
    def random(cls, n_qubits: int, rand: Rand) -> "StateVector":
        gen = rand.numpy()
        v = gen.normal(size=1 << n_qubits) + 1j * gen.normal(size=1 << n_qubits)
        return cls(n_qubits, v / np.linalg.norm(v))

    def density(self) -> "DensityMatrix":
        # projector onto a normalized vector, valid by construction
        return DensityMatrix(self.n_qubits, np.outer(self.amps, self.amps.conj()), check=False)

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(self.n_qubits + other.n_qubits, np.kron(self.amps, other.amps))

    def overlap(self, other: "StateVector") -> float:
        """|<self|other>|^2, the phase-insensitive comparison."""
        return float(abs(np.vdot(self.amps, other.amps)) ** 2)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


@dataclass
class DensityMatrix:
    n_qubits: int
    mat: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        _check_cap(self.n_qubits)
        self.mat = np.asarray(self.mat, dtype=complex)
        dim = 1 << self.n_qubits
        if self.mat.shape != (dim, dim):
            raise ValueError("matrix has wrong shape")
        if self.check:
            self.validate()

    def validate(self) -> None:
        if not np.allclose(self.mat, self.mat.conj().T, atol=1e-10):
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(self.mat).real - 1.0) > 1e-10:
            raise ValueError("trace is not 1")
        if np.linalg.eigvalsh(self.mat).min() < -ATOL_POS:
            raise ValueError("matrix is not positive semidefinite")

    @classmethod
    def from_statevector(cls, sv: StateVector) -> "DensityMatrix":
        return sv.density()

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "DensityMatrix":
        dim = 1 << n_qubits
        mat = np.zeros((dim, dim), dtype=complex)
        mat[index, index] = 1.0
        return cls(n_qubits, mat, check=False)

    @classmethod
    def random_pure(cls, n_qubits: int, rand: Rand) -> "DensityMatrix":
        return StateVector.random(n_qubits, rand).density()

    @classmethod
    def random_mixed(cls, n_qubits: int, rand: Rand, env_qubits: int = None) -> "DensityMatrix":
        """Reduced state of a random purification on n + env qubits."""
        env = n_qubits if env_qubits is None else env_qubits
        joint = StateVector.random(n_qubits + env, rand).density()
        return partial_trace(joint, list(range(n_qubits)))

    def dump_pairs(self) -> list:
        """Row-major [re, im] entry pairs, the golden-file snapshot format."""
        flat = self.mat.reshape(-1)
        return [[float(z.real), float(z.imag)] for z in flat]

    @classmethod
    def load_pairs(cls, n_qubits: int, pairs: list) -> "DensityMatrix":
        dim = 1 << n_qubits
        flat = np.array([complex(re, im) for re, im in pairs])
        return cls(n_qubits, flat.reshape(dim, dim))

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(self.n_qubits + other.n_qubits, np.kron(self.mat, other.mat), check=False)

    def purity(self) -> float:
        return float(np.trace(self.mat @ self.mat).real)


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    _check_cap(n_qubits)
    dim = 1 << n_qubits
    return DensityMatrix(n_qubits, np.eye(dim, dtype=complex) / dim, check=False)


@dataclass
class UnitaryOp:
    n_qubits: int
    matrix: np.ndarray
    mapping: np.ndarray | None = field(default=None, repr=False)  # set for permutation unitaries
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        dim = 1 << self.n_qubits
        if self.matrix.shape != (dim, dim):
            raise ValueError("matrix has wrong shape")
        if self.check:
            err = np.abs(self.matrix @ self.matrix.conj().T - np.eye(dim)).max()
            if err > ATOL_UNITARY:
                raise ValueError(f"matrix is not unitary (deviation {err:.2e})")

    def adjoint(self) -> "UnitaryOp":
        inv_map = None
        if self.mapping is not None:
            inv_map = np.empty_like(self.mapping)
            inv_map[self.mapping] = np.arange(self.mapping.shape[0])
        return UnitaryOp(self.n_qubits, self.matrix.conj().T, mapping=inv_map, check=False)


# ---------------------------------------------------------------------------
# gate application
# ---------------------------------------------------------------------------


def _embed_on_statevector(amps: np.ndarray, n: int, u: np.ndarray, targets: list[int]) -> np.ndarray:
    k = len(targets)
    psi = amps.reshape([2] * n)
    ut = u.reshape([2] * k + [2] * k)
    psi = np.tensordot(ut, psi, axes=(list(range(k, 2 * k)), targets))
    return np.moveaxis(psi, list(range(k)), targets).reshape(-1)


def _resolve_gate(gate) -> np.ndarray:
    if isinstance(gate, str):
        if gate not in GATES:
            raise ValueError(f"unknown gate {gate!r}")
        return GATES[gate]
    if isinstance(gate, UnitaryOp):
        return gate.matrix
    return np.asarray(gate, dtype=complex)


def _check_targets(targets: list[int], k_needed: int, n: int) -> None:
    if len(set(targets)) != len(targets):
        raise ValueError("duplicate target qubits")
    if len(targets) != k_needed:
        raise ValueError(f"gate acts on {k_needed} qubits, got {len(targets)} targets")
    for t in targets:
        if not 0 <= t < n:
            raise ValueError(f"target {t} out of range for {n} qubits")


def apply_gate(state, gate, targets: list[int]):
    """Apply a named gate, raw matrix, or UnitaryOp to the target qubits.

    Works on StateVector and DensityMatrix alike and preserves
    norm/trace by unitarity.
    """
    u = _resolve_gate(gate)
    k = int(np.log2(u.shape[0]))
    if isinstance(state, StateVector):
        _check_targets(targets, k, state.n_qubits)
        out = _embed_on_statevector(state.amps, state.n_qubits, u, targets)
        return StateVector(state.n_qubits, out)
    if isinstance(state, DensityMatrix):
        _check_targets(targets, k, state.n_qubits)
        n = state.n_qubits
        rho = state.mat.reshape([2] * (2 * n))
        ut = u.reshape([2] * k + [2] * k)
        # row side
        rho = np.tensordot(ut, rho, axes=(list(range(k, 2 * k)), targets))
        rho = np.moveaxis(rho, list(range(k)), targets)
        # column side with the conjugate
        col_targets = [n + t for t in targets]
        rho = np.tensordot(ut.conj(), rho, axes=(list(range(k, 2 * k)), col_targets))
        rho = np.moveaxis(rho, list(range(k)), col_targets)
        dim = 1 << n
        return DensityMatrix(n, rho.reshape(dim, dim), check=DEBUG_CHECKS)
    raise TypeError(f"cannot apply gates to {type(state).__name__}")


def apply_unitary(state, op: UnitaryOp, targets: list[int] | None = None):
    targets = list(range(op.n_qubits)) if targets is None else targets
    return apply_gate(state, op, targets)


# ---------------------------------------------------------------------------
# classical-function oracles
# ---------------------------------------------------------------------------


def _permutation_unitary(mapping: np.ndarray, n_qubits: int) -> UnitaryOp:
    dim = 1 << n_qubits
    m = np.zeros((dim, dim), dtype=complex)
    m[mapping, np.arange(dim)] = 1.0
    return UnitaryOp(n_qubits, m, mapping=mapping.astype(np.int64), check=False)


def type1_oracle(f, in_bits: int, out_bits: int) -> UnitaryOp:
    """Canonical reversible embedding |x, y> -> |x, y xor f(x)>.

    Unitary even for non-injective f; the table must cover the full
    input space.
    """
    table = np.asarray(f, dtype=np.int64)
    if table.shape != (1 << in_bits,):
        raise ValueError(f"function table must have {1 << in_bits} entries")
    if table.min() < 0 or table.max() >= (1 << out_bits):
        raise ValueError("table values do not fit the output width")
    _check_cap(in_bits + out_bits)
    cols = np.arange(1 << (in_bits + out_bits), dtype=np.int64)
    x = cols >> out_bits
    y = cols & ((1 << out_bits) - 1)
    rows = (x << out_bits) | (y ^ table[x])
    mapping = np.empty_like(cols)
    mapping[cols] = rows
    return _permutation_unitary(mapping, in_bits + out_bits)


def type2_oracle(perm: Permutation) -> UnitaryOp:
    """In-place encryption unitary |x> -> |perm(x)>; the adjoint is the
    decryption operator of the inverse permutation."""
    _check_cap(perm.domain_bits)
    return _permutation_unitary(perm.forward.copy(), perm.domain_bits)


def _compose_maps(*steps: np.ndarray) -> np.ndarray:
    total = steps[0]
    for step in steps[1:]:
        total = step[total]
    return total


def type1_from_type2(enc2: UnitaryOp, dec2: UnitaryOp) -> UnitaryOp:
    """Build the xor-style oracle from in-place gate access.

    Circuit on registers (A, B) of d qubits each: apply enc2 on A, copy
    A into B with transversal CNOTs, then dec2 on A.  Equality with
    type1_oracle on the full space is exact.
    """
    if enc2.mapping is None or dec2.mapping is None:
        raise ValueError("conversion needs permutation-style operators")
    d = enc2.n_qubits
    if dec2.n_qubits != d:
        raise ValueError("width mismatch between encryption and decryption operators")
    if not np.array_equal(dec2.mapping[enc2.mapping], np.arange(1 << d)):
        raise ValueError("operators are not mutually inverse")
    _check_cap(2 * d)
    size = 1 << (2 * d)
    z = np.arange(size, dtype=np.int64)
    a, b = z >> d, z & ((1 << d) - 1)
    step_enc = (enc2.mapping[a] << d) | b
    step_copy = (a << d) | (b ^ a)
    step_dec = (dec2.mapping[a] << d) | b
    return _permutation_unitary(_compose_maps(step_enc, step_copy, step_dec), 2 * d)


def type2_from_type1(enc1: UnitaryOp, dec1: UnitaryOp) -> UnitaryOp:
    """Build the in-place operator from xor-style enc/dec oracles.

    Circuit on registers (A, B): enc1 with input A and output B, dec1
    with input B and output A (uncomputing A), then SWAP.  On the
    honest slice B = |0> this sends |x, 0> to |Enc(x), 0>.
    """
    if enc1.mapping is None or dec1.mapping is None:
        raise ValueError("conversion needs permutation-style operators")
    if enc1.n_qubits != dec1.n_qubits or enc1.n_qubits % 2:
        raise ValueError("operators must act on matching (x, y) registers")
    two_d = enc1.n_qubits
    d = two_d // 2
    size = 1 << two_d
    z = np.arange(size, dtype=np.int64)
    a, b = z >> d, z & ((1 << d) - 1)
    # f and g tables recovered from the oracles' action on y = 0
    xs = np.arange(1 << d, dtype=np.int64)
    f = enc1.mapping[xs << d] & ((1 << d) - 1)
    g = dec1.mapping[xs << d] & ((1 << d) - 1)
    step_enc = (a << d) | (b ^ f[a])
    step_dec = ((a ^ g[b]) << d) | b
    step_swap = (b << d) | a
    return _permutation_unitary(_compose_maps(step_enc, step_dec, step_swap), two_d)


# ---------------------------------------------------------------------------
# Pauli masking (two key bits per qubit)
# ---------------------------------------------------------------------------


def qotp_apply(key: BitString, state):
    """Per-qubit X^a Z^b mask; self-inverse for a fixed key.

    The whole mask is one basis permutation (the X bits) composed with
    a diagonal sign pattern (the Z bits), applied in a single pass.
    """
    n = key.width // 2
    if key.width != 2 * n or getattr(state, "n_qubits", None) != n:
        raise ValueError(f"key of width {key.width} cannot mask {getattr(state, 'n_qubits', '?')} qubits")
    flip = sum(key.bit(2 * j) << (n - 1 - j) for j in range(n))
    sign = sum(key.bit(2 * j + 1) << (n - 1 - j) for j in range(n))
    idx = np.arange(1 << n)
    phase = 1.0 - 2.0 * (np.bitwise_count(idx & sign) & 1)
    if isinstance(state, StateVector):
        out = phase * state.amps[idx ^ flip]
        return StateVector(n, out)
    if isinstance(state, DensityMatrix):
        src = state.mat[np.ix_(idx ^ flip, idx ^ flip)]
        out = (phase[:, None] * phase[None, :]) * src
        return DensityMatrix(n, out, check=DEBUG_CHECKS)
    raise TypeError(f"cannot mask {type(state).__name__}")


def qotp_average(state: DensityMatrix) -> DensityMatrix:
    """Exact average of the Pauli mask over all 4**n keys."""
    n = state.n_qubits
    dim = 1 << n
    acc = np.zeros((dim, dim), dtype=complex)
    for key_val in range(1 << (2 * n)):
        key = BitString(key_val, 2 * n)
        acc += qotp_apply(key, state).mat
    return DensityMatrix(n, acc / (1 << (2 * n)), check=False)


# ---------------------------------------------------------------------------
# partial trace, trace distance, measurement
# ---------------------------------------------------------------------------


def partial_trace(dm: DensityMatrix, keep: list[int]) -> DensityMatrix:
    """Reduce to the kept qubits (original relative order preserved)."""
    if not keep:
        raise ValueError("keep set must be non-empty")
    n = dm.n_qubits
    keep = sorted(keep)
    if keep[0] < 0 or keep[-1] >= n or len(set(keep)) != len(keep):
        raise ValueError("keep indices out of range")
    drop = [q for q in range(n) if q not in keep]
    rho = dm.mat.reshape([2] * (2 * n))
    for q in sorted(drop, reverse=True):
        rho = np.trace(rho, axis1=q, axis2=q + (rho.ndim // 2))
    dim = 1 << len(keep)
    return DensityMatrix(len(keep), rho.reshape(dim, dim), check=False)


def trace_distance(rho, sigma) -> float:
    """Half the sum of absolute eigenvalues of the difference."""
    a = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
    b = sigma.mat if isinstance(sigma, DensityMatrix) else np.asarray(sigma)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    eig = np.linalg.eigvalsh(a - b)
    return float(0.5 * np.abs(eig).sum())


def measure_computational(state, targets: list[int], rand: Rand, force: int | None = None):
    """Measure target qubits in the computational basis.

    Returns (outcome BitString in target order, collapsed state of the
    same kind).  Forcing a zero-probability branch is an error.
    """
    if isinstance(state, StateVector):
        n = state.n_qubits
        _check_targets(targets, len(targets), n)
        psi = state.amps.reshape([2] * n)
        other = tuple(q for q in range(n) if q not in targets)
        probs = np.abs(psi) ** 2
        if other:
            probs = probs.sum(axis=other)
        # remaining axes follow sorted(targets); reorder to the targets list
        probs = np.transpose(probs, np.argsort(np.argsort(targets))).reshape(-1)
        outcome = _pick_outcome(probs, rand, force)
        sel = [slice(None)] * n
        bits = [(outcome >> (len(targets) - 1 - i)) & 1 for i in range(len(targets))]
        for t, b in zip(targets, bits):
            sel[t] = b
        collapsed = np.zeros_like(psi)
        collapsed[tuple(sel)] = psi[tuple(sel)]
        collapsed = collapsed.reshape(-1)
        collapsed /= np.linalg.norm(collapsed)
        return BitString(outcome, len(targets)), StateVector(n, collapsed)
    if isinstance(state, DensityMatrix):
        n = state.n_qubits
        _check_targets(targets, len(targets), n)
        # outcome probabilities live on the diagonal; the projector is a
        # basis mask, so collapse is elementwise
        diag = np.real(np.diag(state.mat)).reshape([2] * n)
        other = tuple(q for q in range(n) if q not in targets)
        probs = diag.sum(axis=other) if other else diag
        probs = np.transpose(probs, np.argsort(np.argsort(targets))).reshape(-1)
        outcome = _pick_outcome(probs, rand, force)
        idx = np.arange(1 << n)
        mask = np.ones(1 << n, dtype=bool)
        for i, t in enumerate(targets):
            bit = (outcome >> (len(targets) - 1 - i)) & 1
            mask &= ((idx >> (n - 1 - t)) & 1) == bit
        post = np.where(np.outer(mask, mask), state.mat, 0.0) / probs[outcome]
        return BitString(outcome, len(targets)), DensityMatrix(n, post, check=False)
    raise TypeError(f"cannot measure {type(state).__name__}")


def _pick_outcome(probs: np.ndarray, rand: Rand, force: int | None) -> int:
    total = probs.sum()
    if force is not None:
        if probs[force] / total < 1e-12:
            raise ValueError("forced branch has zero probability")
        return force
    u = rand.numpy().random() * total
    return int(np.searchsorted(np.cumsum(probs), u))


# ---------------------------------------------------------------------------
# circuit descriptions
# ---------------------------------------------------------------------------


@dataclass
class CircuitDescription:
    """Constructive classical description of a state: a gate list applied
    to |0...0>, with a declared output register."""

    wires: int
    gates: list
    out: list[int] | None = None

    def __post_init__(self):
        self.out = list(range(self.wires)) if self.out is None else list(self.out)
        for w in self.out:
            if not 0 <= w < self.wires:
                raise ValueError("output register outside the wire range")

    def to_json(self) -> str:
        return json.dumps({"wires": self.wires, "gates": self.gates, "out": self.out})

    @classmethod
    def from_json(cls, payload: str) -> "CircuitDescription":
        obj = json.loads(payload)
        return cls(obj["wires"], obj["gates"], obj.get("out"))


def build_from_description(desc: CircuitDescription):
    """Run the described circuit from |0...0> and return the state on the
    declared output register (reduced to a DensityMatrix when proper)."""
    state = StateVector.zero(desc.wires)
    for gate in desc.gates:
        name = gate["g"]
        targets = list(gate["t"])
        if name == "ORACLE":
            op = type1_oracle(gate["f"], gate["in_bits"], gate["out_bits"])
            state = apply_unitary(state, op, targets)
        else:
            state = apply_gate(state, name, targets)
    if sorted(desc.out) == list(range(desc.wires)):
        return state
    return partial_trace(state.density(), desc.out)


# ---------------------------------------------------------------------------
# averaged-permutation channel
# ---------------------------------------------------------------------------


def avg_perm_channel(rho: DensityMatrix, r_bits: int, msg_qubits: int | None = None) -> DensityMatrix:
    """Closed-form average of: attach |0^r>, apply a uniformly random
    permutation of the computational basis on the last msg+r qubits.

    Splits into a diagonal part (reduction of the input tensored with
    the maximally mixed state) and an off-diagonal correction carried
    by the uniform off-diagonal matrix; both follow from averaging
    |p(y||0)><p(y'||0)| over all permutations p.
    """
    m = rho.n_qubits if msg_qubits is None else msg_qubits
    env = rho.n_qubits - m
    _check_cap(rho.n_qubits + r_bits)
    c = m + r_bits
    n_c = 1 << c
    dim_env = 1 << env
    dim_m = 1 << m

    blocks = rho.mat.reshape(dim_env, dim_m, dim_env, dim_m)
    full_sum = blocks.sum(axis=(1, 3))            # sum over y, y'
    diag_sum = np.trace(blocks, axis1=1, axis2=3)  # sum over y == y'
    off_sum = full_sum - diag_sum

    tau = np.eye(n_c, dtype=complex) / n_c
    chi_c = (np.ones((n_c, n_c), dtype=complex) - np.eye(n_c)) / (n_c * (n_c - 1))
    out = np.kron(diag_sum, tau) + np.kron(off_sum, chi_c)
    return DensityMatrix(env + c, out, check=False)


def avg_perm_channel_sampled(
    rho: DensityMatrix, r_bits: int, rand: Rand, samples: int, msg_qubits: int | None = None
) -> DensityMatrix:
    """Monte-Carlo estimate of the same channel over random permutations."""
    m = rho.n_qubits if msg_qubits is None else msg_qubits
    env = rho.n_qubits - m
    c = m + r_bits
    _check_cap(rho.n_qubits + r_bits)
    attached = DensityMatrix(
        rho.n_qubits + r_bits, _attach_ancilla(rho.mat, env, m, r_bits), check=False
    )
    dim = 1 << attached.n_qubits
    acc = np.zeros((dim, dim), dtype=complex)
    gen = rand.numpy()
    env_index = np.arange(1 << env, dtype=np.int64) << c
    for _ in range(samples):
        perm = gen.permutation(1 << c).astype(np.int64)
        full = (env_index[:, None] | perm[None, :]).reshape(-1)
        out = np.zeros_like(attached.mat)
        out[np.ix_(full, full)] = attached.mat
        acc += out
    return DensityMatrix(attached.n_qubits, acc / samples, check=False)


def _attach_ancilla(mat: np.ndarray, env: int, m: int, r_bits: int) -> np.ndarray:
    anc = np.zeros((1 << r_bits, 1 << r_bits), dtype=complex)
    anc[0, 0] = 1.0
    return np.kron(mat, anc) if env == 0 else _attach_inner(mat, env, m, anc)


def _attach_inner(mat: np.ndarray, env: int, m: int, anc: np.ndarray) -> np.ndarray:
    # insert the ancilla behind the message register: (env, m) -> (env, m, r)
    de, dm, dr = 1 << env, 1 << m, anc.shape[0]
    blocks = mat.reshape(de, dm, de, dm)
    out = np.einsum("aibj,kl->aikbjl", blocks, anc)
    dim = de * dm * dr
    return out.reshape(dim, dim)


def exact_perm_average(rho: DensityMatrix, r_bits: int) -> DensityMatrix:
    """Exhaustive enumeration over every permutation (tiny dimensions only)."""
    from itertools import permutations

    c = rho.n_qubits + r_bits
    n_c = 1 << c
    if n_c > 8:
        raise ValueError("exhaustive enumeration is limited to 3 total qubits")
    anc = np.zeros((1 << r_bits, 1 << r_bits), dtype=complex)
    anc[0, 0] = 1.0
    attached = np.kron(rho.mat, anc)
    acc = np.zeros((n_c, n_c), dtype=complex)
    count = 0
    for perm in permutations(range(n_c)):
        p = np.asarray(perm, dtype=np.int64)
        out = np.zeros_like(attached)
        out[np.ix_(p, p)] = attached
        acc += out
        count += 1
    return DensityMatrix(c, acc / count, check=False)
