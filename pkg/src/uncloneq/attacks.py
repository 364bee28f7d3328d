"""Explicit cloning attacks and their success-probability evaluators.

The attacks implemented here:

* the superposition cloner, the isometry sending ``|phi>`` to
  ``(|bot>|phi> + |phi>|bot>)/sqrt(2)`` with ``|bot>`` one extra ambient
  dimension;
* the projector strategy built on top of it, which simultaneously
  distinguishes a pair of orthogonal-support states with probability
  ``1/2 + lambda_max/16`` at the optimal mixing angle;
* the keyed indistinguishability attack assembled from that strategy;
* the measure-and-share attack: measure the ciphertext in a (possibly
  random) basis, broadcast the classical outcome and decode it by
  maximum likelihood.

Two success-probability functionals are provided: the uniform-message
cloning value and the two-message indistinguishability value, both
averaged over sampled (or explicitly enumerated) keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .config import TOL
from .errors import (
    CrossCheckFailed,
    DegenerateTop,
    DimensionMismatch,
    NotOrthogonalPair,
)
from .linalg import (
    Array,
    KrausChannel,
    apply_channel,
    assert_hermitian,
    dagger,
    haar_unitary,
    herm_eig,
    max_abs,
)
from .schemes import Povm, QecmScheme

__all__ = [
    "CloningAttack",
    "CloningIndAttack",
    "GuessingEnsemble",
    "breidbart_basis",
    "conjugate_attack_by_isometry",
    "ensemble_from_scheme_key",
    "ind_attack_build",
    "projector_cloning_attack",
    "projector_strategy_value",
    "measure_share_attack",
    "measure_share_ml_attack",
    "optimal_decode_for_measure_share",
    "guessing_projector",
    "pwin_ind_eval",
    "pwin_unif_eval",
    "random_basis_attack_estimate",
    "superposition_cloner",
]


@dataclass(frozen=True)
class CloningAttack:
    """Cloning channel plus keyed guessing POVMs for both receivers."""

    channel: KrausChannel
    bob_povm: Callable[[Any], Povm]
    charlie_povm: Callable[[Any], Povm]
    dims: tuple[int, int]
    descriptor: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        db, dc = self.dims
        if db * dc != self.channel.out_dim:
            raise DimensionMismatch(
                f"dims {self.dims} do not factor channel output {self.channel.out_dim}"
            )


@dataclass(frozen=True)
class CloningIndAttack:
    """Indistinguishability attack: chosen message plus binary keyed POVMs."""

    m1: int
    channel: KrausChannel
    bob_povm: Callable[[Any], Povm]
    charlie_povm: Callable[[Any], Povm]
    dims: tuple[int, int]
    descriptor: dict = field(default_factory=dict)


@dataclass(frozen=True)
class GuessingEnsemble:
    """cqq state as a list of (probability, joint BC density operator)."""

    entries: tuple[tuple[float, Array], ...]
    dims: tuple[int, int]

    def __post_init__(self) -> None:
        probs = [p for p, _ in self.entries]
        if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > TOL.prob_sum:
            raise DimensionMismatch("probabilities must be nonnegative and sum to 1")
        db, dc = self.dims
        for _, state in self.entries:
            if state.shape != (db * dc, db * dc):
                raise DimensionMismatch(
                    f"state shape {state.shape} incompatible with dims {self.dims}"
                )
            assert_hermitian(state)

    @property
    def n_outcomes(self) -> int:
        return len(self.entries)


# ---------------------------------------------------------------------------
# superposition cloner and the projector strategy
# ---------------------------------------------------------------------------


def superposition_cloner(d: int) -> KrausChannel:
    """Isometry distributing a d-dimensional input to both receivers.

    Maps ``|phi>`` to ``(|bot>_B |phi>_C + |phi>_B |bot>_C)/sqrt(2)``
    where ``|bot>`` is the extra ambient direction with index ``d``; each
    output register has dimension ``d + 1``.
    """
    if d < 1:
        raise DimensionMismatch("d must be at least 1")
    dp = d + 1
    v = np.zeros((dp * dp, d), dtype=complex)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for j in range(d):
        v[d * dp + j, j] += inv_sqrt2  # |bot>_B |j>_C
        v[j * dp + d, j] += inv_sqrt2  # |j>_B |bot>_C
    return KrausChannel(in_dim=d, out_dim=dp * dp, kraus_ops=(v,))


def guessing_projector(
    rho: Array,
    sigma: Array,
    alpha: float,
    require_unique_top: bool = False,
) -> Array:
    """Guessing projector for an orthogonal-support state pair.

    For ``rho`` with top eigenvector ``|a_0>`` the projector is
    ``|phi><phi| + sum_{i>0, lambda_i>0} |a_i><a_i|`` on the (d+1)-dim
    ambient space, with ``|phi> = sqrt(1-alpha)|a_0> + sqrt(alpha)|bot>``.
    It annihilates every eigenvector of ``sigma`` with positive
    eigenvalue.

    With a degenerate top eigenvalue the decomposition's arbitrary top
    eigenvector is used (the achieved guessing value does not depend on
    the choice); pass ``require_unique_top=True`` to raise
    :class:`DegenerateTop` instead.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    d = rho.shape[0]
    if sigma.shape != rho.shape:
        raise DimensionMismatch(f"shape mismatch: {rho.shape} vs {sigma.shape}")
    dev = max_abs(rho @ sigma)
    if dev > TOL.orthogonal:
        raise NotOrthogonalPair(f"max |rho sigma| = {dev} exceeds {TOL.orthogonal}")
    w, v = herm_eig(rho)
    if require_unique_top and d >= 2 and w[0] - w[1] < TOL.orthogonal:
        raise DegenerateTop(f"top eigenvalue gap {w[0] - w[1]} below {TOL.orthogonal}")

    vecs = np.zeros((d + 1, d + 1), dtype=complex)
    vecs[:d, :d] = v
    phi = math.sqrt(1.0 - alpha) * vecs[:, 0] + math.sqrt(alpha) * np.eye(d + 1)[:, d]
    pi = np.outer(phi, phi.conj())
    for i in range(1, d):
        if w[i] > TOL.support_cutoff:
            pi += np.outer(vecs[:, i], vecs[:, i].conj())
    return (pi + dagger(pi)) / 2


def projector_strategy_value(rho: Array, sigma: Array, alpha: float) -> float:
    """Simultaneous guessing value of the projector strategy.

    Feeds the equal mixture of ``rho`` and ``sigma`` through the
    superposition cloner and measures ``{Pi, 1 - Pi}`` on both sides,
    with ``Pi`` built for whichever state has the larger top eigenvalue.
    The direct two-sided trace is cross-checked against the closed form
    ``(alpha + lambda_0 alpha (1 - 2 alpha) + 1 - alpha)/2`` and returned.
    """
    lam_rho = float(np.linalg.eigvalsh(rho)[-1])
    lam_sig = float(np.linalg.eigvalsh(sigma)[-1])
    if lam_sig > lam_rho:
        rho, sigma = sigma, rho
        lam_rho = lam_sig
    d = rho.shape[0]
    pi = guessing_projector(rho, sigma, alpha)
    cloner = superposition_cloner(d)
    eye = np.eye(d + 1)
    out_rho = apply_channel(cloner, rho)
    out_sig = apply_channel(cloner, sigma)
    hit0 = float(np.trace(np.kron(pi, pi) @ out_rho).real)
    hit1 = float(np.trace(np.kron(eye - pi, eye - pi) @ out_sig).real)
    direct = 0.5 * (hit0 + hit1)
    closed = 0.5 * (alpha + lam_rho * alpha * (1.0 - 2.0 * alpha) + 1.0 - alpha)
    if abs(direct - closed) > 1e-9:
        raise CrossCheckFailed(
            f"direct trace {direct} and closed form {closed} disagree beyond 1e-9"
        )
    return direct


def _projector_strategy_povm(
    e: QecmScheme, m0: int, m1: int, alpha: float
) -> Callable[[Any], Povm]:
    """Keyed binary POVM builder realizing the projector strategy.

    Outcome 0 votes for ``m0`` and outcome 1 for ``m1``.  Per key, the
    projector is built for whichever ciphertext has the larger top
    eigenvalue and the outcome labels are oriented to match.
    """

    def build(key: Any) -> Povm:
        rho = e.encrypt(key, m0)
        sigma = e.encrypt(key, m1)
        eye = np.eye(e.cipher_dim + 1)
        if np.linalg.eigvalsh(rho)[-1] >= np.linalg.eigvalsh(sigma)[-1]:
            pi = guessing_projector(rho, sigma, alpha)
            effects = (pi, eye - pi)
        else:
            pi = guessing_projector(sigma, rho, alpha)
            effects = (eye - pi, pi)
        return Povm(dim=e.cipher_dim + 1, effects=effects)

    return build


def ind_attack_build(
    e: QecmScheme,
    m0: int,
    alpha: float,
    key_samples: int,
    rng: np.random.Generator | None = None,
    keys: Sequence | None = None,
) -> CloningIndAttack:
    """Indistinguishability attack from the superposition cloner.

    Picks ``m1`` as the message (other than ``m0``) with the largest
    key-averaged top ciphertext eigenvalue (estimated on the key sample),
    then plays the projector strategy per key on both sides.
    """
    if e.message_count < 2:
        raise DimensionMismatch("need at least two messages")
    key_list = e.keys_for(key_samples, rng, keys)
    means = np.zeros(e.message_count)
    for key in key_list:
        for m in range(e.message_count):
            means[m] += np.linalg.eigvalsh(e.encrypt(key, m))[-1]
    means[m0] = -np.inf
    m1 = int(np.argmax(means))
    povm = _projector_strategy_povm(e, m0, m1, alpha)
    dp = e.cipher_dim + 1
    return CloningIndAttack(
        m1=m1,
        channel=superposition_cloner(e.cipher_dim),
        bob_povm=povm,
        charlie_povm=povm,
        dims=(dp, dp),
        descriptor={"channel": "superposition_cloner", "alpha": alpha, "m0": m0},
    )


def pwin_ind_eval(
    e: QecmScheme,
    m0: int,
    atk: CloningIndAttack,
    key_samples: int,
    rng: np.random.Generator | None = None,
    keys: Sequence | None = None,
) -> float:
    """Key-averaged success probability of an indistinguishability attack.

    ``(1/2) sum_b E_k tr((P_b ⊗ Q_b) N(Enc_k(m_b)))`` with ``m_0 = m0``
    and ``m_1`` the attack's chosen message.
    """
    if atk.channel.in_dim != e.cipher_dim:
        raise DimensionMismatch("attack channel does not match the scheme dimension")
    messages = (m0, atk.m1)
    key_list = e.keys_for(key_samples, rng, keys)
    total = 0.0
    for key in key_list:
        bob = atk.bob_povm(key)
        charlie = atk.charlie_povm(key)
        for b in (0, 1):
            out = apply_channel(atk.channel, e.encrypt(key, messages[b]))
            joint = np.kron(bob.effects[b], charlie.effects[b])
            total += 0.5 * float(np.trace(joint @ out).real)
    return total / len(key_list)


# ---------------------------------------------------------------------------
# measure-and-share attacks
# ---------------------------------------------------------------------------


def measure_share_attack(d: int, basis: Array) -> KrausChannel:
    """Measure in ``basis`` and hand the classical outcome to both parties.

    Kraus operators ``K_i = |i>_B |i>_C <e_i|`` with ``|e_i>`` the basis
    columns; the output is a classically correlated state on two
    d-dimensional registers.
    """
    if basis.shape != (d, d):
        raise DimensionMismatch(f"basis shape {basis.shape} != ({d}, {d})")
    ops = []
    for i in range(d):
        k = np.zeros((d * d, d), dtype=complex)
        k[i * d + i, :] = basis[:, i].conj()
        ops.append(k)
    return KrausChannel(in_dim=d, out_dim=d * d, kraus_ops=tuple(ops))


def _outcome_likelihoods(e: QecmScheme, key: Any, basis: Array) -> Array:
    # entry (i, m) holds <e_i| Enc_k(m) |e_i>
    d = e.cipher_dim
    probs = np.empty((d, e.message_count))
    adj = dagger(basis)
    for m in range(e.message_count):
        probs[:, m] = np.sum((adj @ e.encrypt(key, m)) * basis.T, axis=1).real
    return probs


def optimal_decode_for_measure_share(
    e: QecmScheme, key: Any, basis: Array
) -> tuple[tuple[Povm, Povm], float]:
    """Maximum-likelihood decoding of a shared measurement outcome.

    Both parties decode outcome ``i`` as the message maximizing
    ``<e_i| Enc_k(m) |e_i>`` (ties to the smallest index).  Returns the
    two diagonal decoding POVMs and the per-key success value
    ``(1/M) sum_i max_m <e_i| Enc_k(m) |e_i>``.
    """
    d = e.cipher_dim
    probs = _outcome_likelihoods(e, key, basis)
    decode = np.argmax(probs, axis=1)
    value = float(probs[np.arange(d), decode].sum() / e.message_count)
    effects = []
    for m in range(e.message_count):
        effects.append(np.diag((decode == m).astype(complex)))
    povm = Povm(dim=d, effects=tuple(effects))
    return (povm, povm), value


def random_basis_attack_estimate(
    e: QecmScheme, trials: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Monte Carlo value of measure-and-share in a Haar-random basis.

    Each trial draws a fresh key and a Haar basis and evaluates the
    maximum-likelihood decode value; returns the sample mean and its
    standard error.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if e.message_count == 1:
        return 1.0, 0.0  # the single message is always decoded
    vals = np.empty(trials)
    for t in range(trials):
        key = e.key_sampler(rng)
        basis = haar_unitary(e.cipher_dim, rng)
        vals[t] = _outcome_likelihoods(e, key, basis).max(axis=1).sum() / e.message_count
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr


def measure_share_ml_attack(
    e: QecmScheme, basis: Array, basis_label: str = "standard"
) -> CloningAttack:
    """Full cloning attack: measure-and-share plus per-key ML decoding."""
    d = e.cipher_dim

    def povm(key: Any) -> Povm:
        (bob, _), _ = optimal_decode_for_measure_share(e, key, basis)
        return bob

    return CloningAttack(
        channel=measure_share_attack(d, basis),
        bob_povm=povm,
        charlie_povm=povm,
        dims=(d, d),
        descriptor={"channel": "measure_share", "basis": basis_label},
    )


def projector_cloning_attack(e: QecmScheme, alpha: float = 0.25) -> CloningAttack:
    """Projector-strategy cloning attack for a two-message scheme."""
    if e.message_count != 2:
        raise DimensionMismatch("the projector strategy guesses a binary message")
    povm = _projector_strategy_povm(e, 0, 1, alpha)
    dp = e.cipher_dim + 1
    return CloningAttack(
        channel=superposition_cloner(e.cipher_dim),
        bob_povm=povm,
        charlie_povm=povm,
        dims=(dp, dp),
        descriptor={"channel": "superposition_cloner", "alpha": alpha},
    )


# ---------------------------------------------------------------------------
# success probabilities and ensembles
# ---------------------------------------------------------------------------


def pwin_unif_eval(
    e: QecmScheme,
    atk: CloningAttack,
    key_samples: int,
    rng: np.random.Generator | None = None,
    keys: Sequence | None = None,
) -> float:
    """Key-averaged uniform-message success probability of a cloning attack.

    ``(1/M) sum_m E_k tr((P_m ⊗ Q_m) N(Enc_k(m)))``.
    """
    if atk.channel.in_dim != e.cipher_dim:
        raise DimensionMismatch("attack channel does not match the scheme dimension")
    key_list = e.keys_for(key_samples, rng, keys)
    total = 0.0
    for key in key_list:
        bob = atk.bob_povm(key)
        charlie = atk.charlie_povm(key)
        if bob.n_outcomes != e.message_count or charlie.n_outcomes != e.message_count:
            raise DimensionMismatch("POVM outcome count does not match message count")
        for m in range(e.message_count):
            out = apply_channel(atk.channel, e.encrypt(key, m))
            joint = np.kron(bob.effects[m], charlie.effects[m])
            total += float(np.trace(joint @ out).real) / e.message_count
    return total / len(key_list)


def ensemble_from_scheme_key(
    e: QecmScheme,
    key: Any,
    ch: KrausChannel,
    dims: tuple[int, int] | None = None,
) -> GuessingEnsemble:
    """Uniform-message guessing ensemble ``{(1/M, N(Enc_k(m)))}``."""
    if ch.in_dim != e.cipher_dim:
        raise DimensionMismatch("channel does not match the scheme dimension")
    if dims is None:
        side = math.isqrt(ch.out_dim)
        if side * side != ch.out_dim:
            raise DimensionMismatch("cannot infer a symmetric B/C split; pass dims")
        dims = (side, side)
    p = 1.0 / e.message_count
    entries = tuple(
        (p, apply_channel(ch, e.encrypt(key, m))) for m in range(e.message_count)
    )
    return GuessingEnsemble(entries=entries, dims=dims)


def breidbart_basis() -> Array:
    """Qubit basis bisecting the computational and Hadamard bases.

    Columns are the eigenvectors (descending eigenvalue) of
    ``|0><0| + |+><+|``; measuring in it is the optimal single
    measurement against one-qubit BB84 encryption.
    """
    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    op = np.diag([1.0, 0.0]) + np.outer(plus, plus)
    _, v = herm_eig(op.astype(complex))
    return v


def conjugate_attack_by_isometry(atk: CloningAttack, iso: Array) -> CloningAttack:
    """Lift an attack to an extended ciphertext space.

    The new channel first maps back through ``iso`` and then applies the
    original cloning channel; the orthogonal complement of ``range(iso)``
    (never populated by extended ciphertexts) is discarded into a fixed
    output state so the Kraus set stays trace preserving.
    """
    iso = np.asarray(iso, dtype=complex)
    d_new = iso.shape[0]
    ops = [k @ dagger(iso) for k in atk.channel.kraus_ops]
    complement = np.eye(d_new) - iso @ dagger(iso)
    w, v = herm_eig(complement)
    for i in range(d_new):
        if w[i] > 0.5:
            k = np.zeros((atk.channel.out_dim, d_new), dtype=complex)
            k[0, :] = v[:, i].conj()
            ops.append(k)
    channel = KrausChannel(in_dim=d_new, out_dim=atk.channel.out_dim, kraus_ops=tuple(ops))
    return CloningAttack(
        channel=channel,
        bob_povm=atk.bob_povm,
        charlie_povm=atk.charlie_povm,
        dims=atk.dims,
        descriptor=dict(atk.descriptor),
    )
