"""Quantum encryption schemes with classical keys.

Three constructions:

  * Skqes1Scheme: Pauli-mask the plaintext under a pad derived from a
    PRF on fresh classical randomness r; r travels with the ciphertext.
    The r register is a basis state in the original formulation, so it
    is carried classically here with identical semantics.
  * Type2LiftScheme: wrap a classical scheme whose pinned-randomness
    encryption is a bijection; encryption conjugates by the in-place
    permutation unitary and decryption by its adjoint.
  * PkqesScheme: public-key variant, pad from the iterated-hardcore
    generator of a trapdoor permutation, image of the seed attached.

All operate on DensityMatrix plaintexts so entangled inputs (supplied
as joint states, encrypted on a register) work throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bits import BitString
from .prf import make_prf
from .quantum import (
    DensityMatrix,
    apply_gate,
    apply_unitary,
    partial_trace,
    qotp_apply,
    type2_oracle,
)
from .rng import Rand
from .schemes import OwpHandle, goldreich_levin_prng, owtp_domain, owtp_eval, owtp_gen, owtp_invert


@dataclass
class QCiphertext:
    payload: DensityMatrix
    r: BitString | None = None
    image: BitString | None = None  # trapdoor-permutation image (public-key case)


def _pauli_mask_on(dm: DensityMatrix, pad: BitString, targets: list[int]) -> DensityMatrix:
    """Apply X^a Z^b per target qubit, two pad bits per qubit."""
    if pad.width != 2 * len(targets):
        raise ValueError("pad width must be two bits per target qubit")
    out = dm
    for j, t in enumerate(targets):
        if pad.bit(2 * j):
            out = apply_gate(out, "X", [t])
        if pad.bit(2 * j + 1):
            out = apply_gate(out, "Z", [t])
    return out


class Skqes1Scheme:
    """PRF-keyed Pauli masking with the randomness carried alongside."""

    name = "skqes-qotp-prf"

    def __init__(self, n_qubits: int, key_bits: int | None = None, prf_backend: str = "ideal"):
        self.n_qubits = n_qubits
        self.pad_bits = 2 * n_qubits
        self.r_bits = 2 * n_qubits
        self.key_bits = 2 * n_qubits if key_bits is None else key_bits
        self.prf_backend = prf_backend
        self.ciphertext_qubits = n_qubits

    def key_gen(self, rand: Rand) -> BitString:
        return rand.bits(self.key_bits)

    def pad_for(self, key: BitString, r: BitString) -> BitString:
        return make_prf(key, self.r_bits, self.pad_bits, self.prf_backend).eval(r)

    def enc(self, key: BitString, phi: DensityMatrix, rand: Rand = None, r: BitString = None) -> QCiphertext:
        if phi.n_qubits != self.n_qubits:
            raise ValueError(f"plaintext has {phi.n_qubits} qubits, scheme expects {self.n_qubits}")
        if r is None:
            r = rand.bits(self.r_bits)
        elif r.width != self.r_bits:
            raise ValueError("randomness width mismatch")
        return QCiphertext(qotp_apply(self.pad_for(key, r), phi), r=r)

    def dec(self, key: BitString, qc: QCiphertext) -> DensityMatrix:
        return qotp_apply(self.pad_for(key, qc.r), qc.payload)

    def enc_on(self, key: BitString, joint: DensityMatrix, targets: list[int],
               rand: Rand = None, r: BitString = None):
        """Encrypt a register of a joint state in place.

        Returns (new joint state, ciphertext register indices, r).
        """
        if len(targets) != self.n_qubits:
            raise ValueError("register width mismatch")
        if r is None:
            r = rand.bits(self.r_bits)
        pad = self.pad_for(key, r)
        return _pauli_mask_on(joint, pad, targets), list(targets), r


class Type2LiftScheme:
    """Quantum scheme built from the in-place unitaries of a classical one.

    The inner scheme must expose enc_perm(key, r): the bijection its
    pinned-randomness encryption induces on perm_bits bits.  Plaintext
    registers hold msg_bits qubits; expanding schemes gain ancilla
    qubits prepared in |0> (the honest slice).
    """

    def __init__(self, inner):
        if not hasattr(inner, "enc_perm"):
            raise ValueError(f"{inner.name} has no pinned-randomness permutation form")
        self.inner = inner
        self.name = f"type2-lift({inner.name})"
        self.n_qubits = inner.msg_bits
        self.ciphertext_qubits = inner.perm_bits
        self.ancilla_qubits = inner.perm_bits - inner.msg_bits
        self.r_bits = inner.r_bits

    def key_gen(self, rand: Rand):
        return self.inner.key_gen(rand)

    def _unitary(self, key, r):
        perm, _ = self.inner.enc_perm(key, r) if self.r_bits else self.inner.enc_perm(key)
        return type2_oracle(perm)

    def _fresh_r(self, rand: Rand, r: BitString | None) -> BitString | None:
        if self.r_bits == 0:
            return None
        if r is None:
            return rand.bits(self.r_bits)
        if r.width != self.r_bits:
            raise ValueError("randomness width mismatch")
        return r

    def enc(self, key, phi: DensityMatrix, rand: Rand = None, r: BitString = None) -> QCiphertext:
        if phi.n_qubits != self.n_qubits:
            raise ValueError(f"plaintext has {phi.n_qubits} qubits, scheme expects {self.n_qubits}")
        r = self._fresh_r(rand, r)
        state = phi
        if self.ancilla_qubits:
            state = phi.tensor(DensityMatrix.basis(self.ancilla_qubits, 0))
        return QCiphertext(apply_unitary(state, self._unitary(key, r)), r=r)

    def dec(self, key, qc: QCiphertext) -> DensityMatrix:
        full = apply_unitary(qc.payload, self._unitary(key, qc.r).adjoint())
        if not self.ancilla_qubits:
            return full
        return partial_trace(full, list(range(self.n_qubits)))

    def enc_on(self, key, joint: DensityMatrix, targets: list[int],
               rand: Rand = None, r: BitString = None):
        if len(targets) != self.n_qubits:
            raise ValueError("register width mismatch")
        r = self._fresh_r(rand, r)
        state = joint
        anc_targets: list[int] = []
        if self.ancilla_qubits:
            state = joint.tensor(DensityMatrix.basis(self.ancilla_qubits, 0))
            anc_targets = list(range(joint.n_qubits, joint.n_qubits + self.ancilla_qubits))
        out = apply_unitary(state, self._unitary(key, r), list(targets) + anc_targets)
        return out, list(targets) + anc_targets, r


def skqes_type2_lift(inner) -> Type2LiftScheme:
    return Type2LiftScheme(inner)


class PkqesScheme:
    """Public-key quantum encryption from a toy trapdoor permutation."""

    name = "pkqes-owtp"

    def __init__(self, n_qubits: int, modulus_bits: int = 16):
        self.n_qubits = n_qubits
        self.pad_bits = 2 * n_qubits
        self.modulus_bits = modulus_bits
        self.ciphertext_qubits = n_qubits

    def key_gen(self, rand: Rand):
        pair = owtp_gen(rand, self.modulus_bits)
        mask = rand.bits(pair.modulus.bit_length()).value
        pk = (pair.index, mask)
        sk = (pair.index, mask, pair.trapdoor)
        return pk, sk

    def _handle(self, index, mask) -> OwpHandle:
        n, _ = index
        return OwpHandle(n.bit_length(), lambda x: owtp_eval(index, x), owtp_domain(n), mask)

    def _pad(self, index, mask, r: int) -> BitString:
        handle = self._handle(index, mask)
        return goldreich_levin_prng(BitString(r, handle.domain_bits), handle, self.pad_bits)

    def sample_domain(self, pk, rand: Rand) -> int:
        (n, _), _mask = pk
        while True:
            r = rand.integer(1, n)
            if math.gcd(r, n) == 1:
                return r

    def enc(self, pk, phi: DensityMatrix, rand: Rand = None, r: int | None = None) -> QCiphertext:
        index, mask = pk
        if phi.n_qubits != self.n_qubits:
            raise ValueError("plaintext register width mismatch")
        if r is None:
            r = self.sample_domain(pk, rand)
        pad = self._pad(index, mask, r)
        z = owtp_eval(index, r)
        bits = index[0].bit_length()
        return QCiphertext(qotp_apply(pad, phi), image=BitString(z, bits))

    def dec(self, sk, qc: QCiphertext) -> DensityMatrix:
        index, mask, trapdoor = sk
        n, _ = index
        z = qc.image.value
        if not owtp_domain(n)(z):
            raise ValueError("image outside the permutation range")
        r = owtp_invert(index, trapdoor, z)
        return qotp_apply(self._pad(index, mask, r), qc.payload)
