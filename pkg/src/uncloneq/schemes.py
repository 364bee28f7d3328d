"""Quantum encryption of classical messages (QECM): model and constructions.

A scheme is a triple (key sampler, encrypt, decrypt POVM) over a classical
message set ``[M]`` and a ``d``-dimensional ciphertext space.  Provided
constructions:

* :func:`haar_scheme` -- message ``m`` encrypts to a Haar-rotated
  normalized projector onto a contiguous basis block of size ``t_m``;
  the key is the pair (rank vector, Haar unitary).
* :func:`uniform_haar_scheme` -- the deterministic even split ``t = (L,
  ..., L)`` with ``d = L * M``.
* :func:`bb84_scheme` -- each message bit encoded in a key-selected
  BB84 basis after XOR with a key pad.

Also provided: correctness checking, ciphertext-space extension by an
isometry, expurgation to a smaller message set, and the largest-eigenvalue
statistic used by the indistinguishability attack bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .config import TOL
from .errors import (
    DimensionMismatch,
    InvalidOperator,
    InvalidRanks,
    NotInjective,
    NotIsometry,
)
from .linalg import Array, dagger, haar_unitary, max_abs

__all__ = [
    "Bb84Key",
    "HaarKey",
    "Povm",
    "QecmScheme",
    "RankDistribution",
    "bb84_scheme",
    "check_correctness",
    "expurgate_scheme",
    "extend_scheme",
    "haar_scheme",
    "mu_statistic",
    "scheme_from_descriptor",
    "uniform_haar_scheme",
]


@dataclass(frozen=True)
class Povm:
    """Positive operator-valued measure: PSD effects summing to identity."""

    dim: int
    effects: tuple[Array, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "effects", tuple(np.asarray(e, dtype=complex) for e in self.effects))
        self.validate()

    def validate(
        self,
        herm_tol: float = TOL.herm,
        psd_tol: float = TOL.effect_psd,
        completeness_tol: float = TOL.completeness,
    ) -> None:
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for e in self.effects:
            if e.shape != (self.dim, self.dim):
                raise DimensionMismatch(f"effect shape {e.shape} != ({self.dim}, {self.dim})")
            dev = max_abs(e - dagger(e))
            if dev > herm_tol:
                raise InvalidOperator(f"effect Hermiticity deviation {dev}")
            w = np.linalg.eigvalsh((e + dagger(e)) / 2)
            if w[0] < -psd_tol:
                raise InvalidOperator(f"effect eigenvalue {w[0]} below -{psd_tol}")
            total += e
        dev = max_abs(total - np.eye(self.dim))
        if dev > completeness_tol:
            raise InvalidOperator(f"POVM completeness deviation {dev}")

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)


@dataclass(frozen=True)
class RankDistribution:
    """Distribution over rank vectors ``t`` with positive entries summing to d."""

    support: tuple[tuple[int, ...], ...]
    probabilities: tuple[float, ...]

    def __post_init__(self) -> None:
        support = tuple(tuple(int(x) for x in t) for t in self.support)
        probs = tuple(float(p) for p in self.probabilities)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probabilities", probs)
        if not support or len(support) != len(probs):
            raise InvalidRanks("support and probabilities must be non-empty and aligned")
        if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > TOL.prob_sum:
            raise InvalidRanks("probabilities must be nonnegative and sum to 1")
        sums = {sum(t) for t in support}
        if len(sums) != 1:
            raise InvalidRanks("all rank vectors must sum to the same dimension")
        lengths = {len(t) for t in support}
        if len(lengths) != 1:
            raise InvalidRanks("all rank vectors must have the same length")
        if any(x < 1 for t in support for x in t):
            raise InvalidRanks("ranks must be positive integers")

    @classmethod
    def deterministic(cls, t: Sequence[int]) -> "RankDistribution":
        return cls((tuple(t),), (1.0,))

    @property
    def total_dim(self) -> int:
        return sum(self.support[0])

    @property
    def message_count(self) -> int:
        return len(self.support[0])

    def sample(self, rng: np.random.Generator) -> tuple[int, ...]:
        idx = int(rng.choice(len(self.support), p=self.probabilities))
        return self.support[idx]

    def to_json(self) -> list:
        return [[list(t), p] for t, p in zip(self.support, self.probabilities)]


@dataclass(frozen=True)
class HaarKey:
    """Key of a Haar block scheme: a rank vector and a Haar unitary."""

    ranks: tuple[int, ...]
    unitary: Array


@dataclass(frozen=True)
class Bb84Key:
    """Key of the BB84 scheme: per-bit basis choices and a one-time pad."""

    basis_bits: tuple[int, ...]
    pad_bits: tuple[int, ...]


@dataclass(frozen=True)
class QecmScheme:
    """A QECM scheme: key sampler, encryption map and decryption POVM.

    ``encrypt(key, m)`` returns the ciphertext density operator of
    dimension ``cipher_dim``; ``decrypt_povm(key)`` returns the decryption
    POVM with ``message_count`` outcomes.  Continuous-key schemes carry a
    sampler rather than an enumerable key set; schemes with finite key
    spaces may expose ``enumerate_keys`` for exact key expectations.
    """

    message_count: int
    cipher_dim: int
    key_sampler: Callable[[np.random.Generator], Any]
    encrypt: Callable[[Any, int], Array]
    decrypt_povm: Callable[[Any], Povm]
    descriptor: dict = field(default_factory=dict)
    enumerate_keys: Callable[[], list] | None = None

    def keys_for(
        self,
        key_samples: int,
        rng: np.random.Generator | None = None,
        keys: Sequence | None = None,
    ) -> list:
        """Explicit key list if given, else ``key_samples`` sampled keys."""
        if keys is not None:
            return list(keys)
        if rng is None:
            raise ValueError("an rng is required when no explicit keys are given")
        if key_samples < 1:
            raise ValueError("key_samples must be at least 1")
        return [self.key_sampler(rng) for _ in range(key_samples)]


# ---------------------------------------------------------------------------
# Haar block schemes
# ---------------------------------------------------------------------------


def _block_slices(t: Sequence[int]) -> list[slice]:
    # message m owns the contiguous index block [sum(t[:m]), sum(t[:m+1]))
    bounds = np.concatenate(([0], np.cumsum(t)))
    return [slice(int(bounds[m]), int(bounds[m + 1])) for m in range(len(t))]


def haar_scheme(M: int, d: int, tdist: RankDistribution) -> QecmScheme:
    """Haar-rotated block scheme with ranks drawn from ``tdist``.

    Encryption of ``m`` under key ``(t, u)`` is ``u P_m u†/t_m`` with
    ``P_m`` the projector onto the m-th contiguous block of size ``t_m``
    of the standard basis; decryption measures ``{u P_m u†}``.
    """
    if M < 1 or d < M:
        raise InvalidRanks(f"need d >= M >= 1, got M={M}, d={d}")
    if tdist.message_count != M or tdist.total_dim != d:
        raise InvalidRanks(
            f"rank distribution is over {tdist.message_count} messages summing to "
            f"{tdist.total_dim}, expected {M} summing to {d}"
        )

    def key_sampler(rng: np.random.Generator) -> HaarKey:
        return HaarKey(ranks=tdist.sample(rng), unitary=haar_unitary(d, rng))

    def encrypt(key: HaarKey, m: int) -> Array:
        block = _block_slices(key.ranks)[m]
        cols = key.unitary[:, block]
        return (cols @ dagger(cols)) / key.ranks[m]

    def decrypt_povm(key: HaarKey) -> Povm:
        effects = []
        for block in _block_slices(key.ranks):
            cols = key.unitary[:, block]
            effects.append(cols @ dagger(cols))
        return Povm(dim=d, effects=tuple(effects))

    return QecmScheme(
        message_count=M,
        cipher_dim=d,
        key_sampler=key_sampler,
        encrypt=encrypt,
        decrypt_povm=decrypt_povm,
        descriptor={"type": "haar", "M": M, "d": d, "tdist": tdist.to_json()},
    )


def uniform_haar_scheme(M: int, L: int) -> QecmScheme:
    """Haar block scheme with the deterministic even split ``t = (L,...,L)``."""
    if M < 1 or L < 1:
        raise InvalidRanks("M and L must be at least 1")
    scheme = haar_scheme(M, L * M, RankDistribution.deterministic((L,) * M))
    return QecmScheme(
        message_count=scheme.message_count,
        cipher_dim=scheme.cipher_dim,
        key_sampler=scheme.key_sampler,
        encrypt=scheme.encrypt,
        decrypt_povm=scheme.decrypt_povm,
        descriptor={"type": "uniform_haar", "M": M, "L": L},
    )


# ---------------------------------------------------------------------------
# BB84 scheme
# ---------------------------------------------------------------------------

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _bb84_vector(key: Bb84Key, m: int, n: int) -> Array:
    # qubit i carries message bit i (most significant first), padded then rotated
    vec = np.array([1.0 + 0j])
    for i in range(n):
        bit = ((m >> (n - 1 - i)) & 1) ^ key.pad_bits[i]
        q = np.zeros(2, dtype=complex)
        q[bit] = 1.0
        if key.basis_bits[i]:
            q = _HADAMARD @ q
        vec = np.kron(vec, q)
    return vec


def bb84_scheme(n: int) -> QecmScheme:
    """BB84 encryption of ``n`` message bits.

    Key: uniform basis bits ``theta`` and pad bits ``r``; message ``m``
    encrypts to the product state with qubit ``i`` prepared as
    ``H^theta_i |m_i xor r_i>``.  Decryption measures each qubit in its
    keyed basis and strips the pad.
    """
    if n < 1:
        raise DimensionMismatch("n must be at least 1")
    d = 2**n

    def key_sampler(rng: np.random.Generator) -> Bb84Key:
        bits = rng.integers(0, 2, size=2 * n)
        return Bb84Key(tuple(int(b) for b in bits[:n]), tuple(int(b) for b in bits[n:]))

    def encrypt(key: Bb84Key, m: int) -> Array:
        v = _bb84_vector(key, m, n)
        return np.outer(v, v.conj())

    def decrypt_povm(key: Bb84Key) -> Povm:
        return Povm(dim=d, effects=tuple(encrypt(key, m) for m in range(d)))

    def enumerate_keys() -> list[Bb84Key]:
        keys = []
        for theta in range(d):
            for pad in range(d):
                tb = tuple((theta >> (n - 1 - i)) & 1 for i in range(n))
                pb = tuple((pad >> (n - 1 - i)) & 1 for i in range(n))
                keys.append(Bb84Key(tb, pb))
        return keys

    return QecmScheme(
        message_count=d,
        cipher_dim=d,
        key_sampler=key_sampler,
        encrypt=encrypt,
        decrypt_povm=decrypt_povm,
        descriptor={"type": "bb84", "n": n},
        enumerate_keys=enumerate_keys,
    )


# ---------------------------------------------------------------------------
# diagnostics and transformations
# ---------------------------------------------------------------------------


def check_correctness(
    e: QecmScheme,
    key_samples: int,
    rng: np.random.Generator | None = None,
    keys: Sequence | None = None,
) -> float:
    """Worst decryption failure over sampled keys and all messages.

    Returns ``max_{k,m} 1 - tr(D_m^k Enc_k(m))``; 0 means the scheme is
    perfectly correct on the sample.  Uses exact traces, not sampled
    measurement outcomes.
    """
    worst = 0.0
    for key in e.keys_for(key_samples, rng, keys):
        povm = e.decrypt_povm(key)
        for m in range(e.message_count):
            hit = float(np.trace(povm.effects[m] @ e.encrypt(key, m)).real)
            worst = max(worst, 1.0 - hit)
    return worst


def mu_statistic(
    e: QecmScheme,
    key_samples: int,
    rng: np.random.Generator | None = None,
    keys: Sequence | None = None,
) -> float:
    """Largest (over messages) key-averaged top ciphertext eigenvalue."""
    key_list = e.keys_for(key_samples, rng, keys)
    means = np.zeros(e.message_count)
    for key in key_list:
        for m in range(e.message_count):
            means[m] += np.linalg.eigvalsh(e.encrypt(key, m))[-1]
    return float(np.max(means) / len(key_list))


def extend_scheme(e: QecmScheme, iso: Array) -> QecmScheme:
    """Embed the ciphertext space through an isometry ``iso``.

    Encryption becomes ``V Enc V†`` and decryption conjugates back; the
    part of the extended space outside ``range(V)`` is assigned to
    decryption outcome 0, which never fires on valid ciphertexts.
    """
    iso = np.asarray(iso, dtype=complex)
    if iso.ndim != 2 or iso.shape[1] != e.cipher_dim:
        raise DimensionMismatch(f"isometry shape {iso.shape} incompatible with d={e.cipher_dim}")
    d_new = iso.shape[0]
    if d_new < e.cipher_dim:
        raise NotIsometry("target dimension is smaller than the source")
    dev = max_abs(dagger(iso) @ iso - np.eye(e.cipher_dim))
    if dev > TOL.unitary:
        raise NotIsometry(f"V†V deviates from identity by {dev}")
    complement = np.eye(d_new) - iso @ dagger(iso)

    def encrypt(key: Any, m: int) -> Array:
        return iso @ e.encrypt(key, m) @ dagger(iso)

    def decrypt_povm(key: Any) -> Povm:
        base = e.decrypt_povm(key)
        effects = [iso @ eff @ dagger(iso) for eff in base.effects]
        effects[0] = effects[0] + complement
        return Povm(dim=d_new, effects=tuple(effects))

    return QecmScheme(
        message_count=e.message_count,
        cipher_dim=d_new,
        key_sampler=e.key_sampler,
        encrypt=encrypt,
        decrypt_povm=decrypt_povm,
        descriptor={"type": "extended", "base": e.descriptor, "d": d_new},
        enumerate_keys=e.enumerate_keys,
    )


def expurgate_scheme(
    e: QecmScheme, mprime: int, phi: Callable[[Any, int], int]
) -> QecmScheme:
    """Restrict to ``mprime`` messages through keyed relabelings ``phi``.

    ``phi(key, m)`` must be injective on ``range(mprime)`` for every key;
    encryption of ``m`` becomes encryption of ``phi(key, m)`` and
    decryption inverts the relabeling.  Decryption outcomes outside the
    image of ``phi`` are mapped to message 0 (they cannot occur for
    honestly encrypted messages).
    """
    if not 1 <= mprime <= e.message_count:
        raise DimensionMismatch(f"mprime must be in [1, {e.message_count}]")

    def image(key: Any) -> list[int]:
        targets = [phi(key, m) for m in range(mprime)]
        if len(set(targets)) != mprime:
            raise NotInjective(f"phi collides on key {key!r}: {targets}")
        if any(not 0 <= t < e.message_count for t in targets):
            raise DimensionMismatch("phi maps outside the message set")
        return targets

    def encrypt(key: Any, m: int) -> Array:
        return e.encrypt(key, image(key)[m])

    def decrypt_povm(key: Any) -> Povm:
        targets = image(key)
        base = e.decrypt_povm(key)
        effects = [np.array(base.effects[t]) for t in targets]
        for t in range(e.message_count):
            if t not in targets:
                effects[0] = effects[0] + base.effects[t]
        return Povm(dim=e.cipher_dim, effects=tuple(effects))

    return QecmScheme(
        message_count=mprime,
        cipher_dim=e.cipher_dim,
        key_sampler=e.key_sampler,
        encrypt=encrypt,
        decrypt_povm=decrypt_povm,
        descriptor={"type": "expurgated", "base": e.descriptor, "M": mprime},
        enumerate_keys=e.enumerate_keys,
    )


def scheme_from_descriptor(desc: dict) -> QecmScheme:
    """Rebuild a scheme from its JSON descriptor (haar / uniform_haar / bb84)."""
    kind = desc.get("type")
    if kind == "bb84":
        return bb84_scheme(int(desc["n"]))
    if kind == "uniform_haar":
        return uniform_haar_scheme(int(desc["M"]), int(desc["L"]))
    if kind == "haar":
        tdist = RankDistribution(
            support=tuple(tuple(t) for t, _ in desc["tdist"]),
            probabilities=tuple(p for _, p in desc["tdist"]),
        )
        return haar_scheme(int(desc["M"]), int(desc["d"]), tdist)
    raise ValueError(f"unknown scheme descriptor type {kind!r}")
