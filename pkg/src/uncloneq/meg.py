"""Monogamy-of-entanglement games and the reduction from cloning attacks.

In the game, Alice measures her register with a keyed POVM while Bob and
Charlie, who prepared the tripartite state, try to both reproduce her
outcome after learning the key.  A QECM scheme whose message-averaged
ciphertext is key independent induces such a game through
``F_m^k = (1/M) rho_bar^(-1/2) Enc_k(m)^T rho_bar^(-1/2)`` (transpose in
the eigenbasis of ``rho_bar``), and any cloning attack maps to a game
strategy through the Choi state of its channel taken with respect to
``rho_bar``.  The induced game value equals the attack's success
probability exactly; :func:`verify_reduction` checks the two evaluation
routes against each other on a shared key sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .attacks import CloningAttack, pwin_unif_eval
from .config import TOL
from .errors import DimensionMismatch, NotKeyIndependent
from .linalg import (
    Array,
    KrausChannel,
    dagger,
    herm_eig,
    matrix_from_json,
    matrix_to_json,
    max_abs,
    pseudo_inv_sqrt,
    support_projector,
)
from .schemes import Povm, QecmScheme

__all__ = [
    "MegGame",
    "MegStrategy",
    "choi_state",
    "game_from_json",
    "game_to_json",
    "mean_ciphertext",
    "meg_from_qecm",
    "meg_win_prob",
    "strategy_from_attack",
    "strategy_from_json",
    "strategy_to_json",
    "verify_reduction",
]


@dataclass(frozen=True)
class MegGame:
    """Finite-key monogamy game: keyed Alice POVMs with sampling weights."""

    message_count: int
    alice_dim: int
    keys: tuple
    weights: tuple[float, ...]
    alice_povm: Callable[[Any], Povm]

    def __post_init__(self) -> None:
        if len(self.keys) != len(self.weights) or not self.keys:
            raise DimensionMismatch("keys and weights must be non-empty and aligned")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > TOL.prob_sum:
            raise DimensionMismatch("weights must be nonnegative and sum to 1")


@dataclass(frozen=True)
class MegStrategy:
    """Bob and Charlie's prepared state plus their keyed POVMs."""

    state: Array
    dims: tuple[int, int, int]
    bob_povm: Callable[[Any], Povm]
    charlie_povm: Callable[[Any], Povm]

    def __post_init__(self) -> None:
        da, db, dc = self.dims
        if self.state.shape != (da * db * dc, da * db * dc):
            raise DimensionMismatch(
                f"state shape {self.state.shape} incompatible with dims {self.dims}"
            )


def meg_win_prob(g: MegGame, s: MegStrategy) -> float:
    """Probability that all three parties obtain the same outcome.

    ``E_k sum_m tr((F_m^k ⊗ P_m^k ⊗ Q_m^k) rho_ABC)``.
    """
    da, db, dc = s.dims
    if da != g.alice_dim:
        raise DimensionMismatch("strategy A register does not match the game")
    total = 0.0
    for key, weight in zip(g.keys, g.weights):
        alice = g.alice_povm(key)
        bob = s.bob_povm(key)
        charlie = s.charlie_povm(key)
        if not (alice.n_outcomes == bob.n_outcomes == charlie.n_outcomes == g.message_count):
            raise DimensionMismatch("POVM outcome counts do not match the message set")
        for m in range(g.message_count):
            joint = np.kron(alice.effects[m], np.kron(bob.effects[m], charlie.effects[m]))
            total += weight * float(np.trace(joint @ s.state).real)
    return total


def choi_state(ch: KrausChannel, rho_bar: Array) -> Array:
    """Choi state of a channel with respect to a reference state.

    ``(id ⊗ N)(|Phi><Phi|)`` with ``|Phi> = sum_i sqrt(lambda_i)
    |e_i>|e_i>`` built from the eigendecomposition of ``rho_bar``.  The
    marginal on the input copy reproduces ``rho_bar`` (its transpose in
    its own eigenbasis equals itself).
    """
    d = rho_bar.shape[0]
    if ch.in_dim != d:
        raise DimensionMismatch(f"channel input {ch.in_dim} != reference dim {d}")
    w, v = herm_eig(rho_bar)
    phi = np.zeros(d * d, dtype=complex)
    for i in range(d):
        phi += np.sqrt(max(w[i], 0.0)) * np.kron(v[:, i], v[:, i])
    big = np.outer(phi, phi.conj())
    out = np.zeros((d * ch.out_dim, d * ch.out_dim), dtype=complex)
    eye = np.eye(d)
    for k in ch.kraus_ops:
        lifted = np.kron(eye, k)
        out += lifted @ big @ dagger(lifted)
    return out


def mean_ciphertext(
    e: QecmScheme,
    keys: Sequence,
    dev_tol: float = 1e-6,
) -> Array:
    """Message-averaged ciphertext, checked to be key independent.

    Raises :class:`NotKeyIndependent` when the per-key averages differ
    pairwise by more than ``dev_tol`` in any entry.
    """
    per_key = []
    for key in keys:
        avg = sum(e.encrypt(key, m) for m in range(e.message_count)) / e.message_count
        per_key.append(avg)
    stack = np.stack(per_key)
    dev = max_abs(stack.max(axis=0).real - stack.min(axis=0).real) + max_abs(
        stack.imag.max(axis=0) - stack.imag.min(axis=0)
    )
    if dev > dev_tol:
        raise NotKeyIndependent(
            f"per-key average ciphertexts differ by {dev} (> {dev_tol})"
        )
    mean = stack.mean(axis=0)
    return (mean + dagger(mean)) / 2


def _transpose_in_basis(x: Array, basis: Array) -> Array:
    # transpose with matrix elements taken in the given orthonormal basis
    return basis @ (dagger(basis) @ x @ basis).T @ dagger(basis)


def meg_from_qecm(
    e: QecmScheme,
    key_samples: int,
    rng: np.random.Generator | None = None,
    cutoff: float = TOL.support_cutoff,
    keys: Sequence | None = None,
) -> MegGame:
    """Monogamy game induced by a QECM over a sampled key set.

    Alice's effects are ``(1/M) rho_bar^(-1/2) Enc_k(m)^T
    rho_bar^(-1/2)`` with the transpose taken in the eigenbasis of the
    key-independent average ciphertext ``rho_bar``.  If ``rho_bar`` is
    rank deficient, the complement of its support (which no induced
    strategy can populate) is folded into outcome 0 so the POVM is
    complete on the whole space.
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    key_list = e.keys_for(key_samples, rng, keys)
    rho_bar = mean_ciphertext(e, key_list)
    inv_sqrt = pseudo_inv_sqrt(rho_bar, cutoff)
    _, v = herm_eig(rho_bar)
    deficiency = np.eye(e.cipher_dim) - support_projector(rho_bar, cutoff)
    m_count = e.message_count

    def alice_povm(key: Any) -> Povm:
        effects = []
        for m in range(m_count):
            transposed = _transpose_in_basis(e.encrypt(key, m), v)
            eff = inv_sqrt @ transposed @ inv_sqrt / m_count
            effects.append((eff + dagger(eff)) / 2)
        if max_abs(deficiency) > TOL.completeness:
            effects[0] = effects[0] + deficiency
        return Povm(dim=e.cipher_dim, effects=tuple(effects))

    weights = (1.0 / len(key_list),) * len(key_list)
    return MegGame(
        message_count=m_count,
        alice_dim=e.cipher_dim,
        keys=tuple(key_list),
        weights=weights,
        alice_povm=alice_povm,
    )


def strategy_from_attack(
    e: QecmScheme, atk: CloningAttack, rho_bar: Array
) -> MegStrategy:
    """Game strategy induced by a cloning attack.

    Bob and Charlie prepare the Choi state of the attack channel with
    respect to ``rho_bar`` and keep their original keyed POVMs.
    """
    state = choi_state(atk.channel, rho_bar)
    return MegStrategy(
        state=state,
        dims=(e.cipher_dim, atk.dims[0], atk.dims[1]),
        bob_povm=atk.bob_povm,
        charlie_povm=atk.charlie_povm,
    )


def verify_reduction(
    e: QecmScheme,
    atk: CloningAttack,
    key_samples: int,
    rng: np.random.Generator | None = None,
    keys: Sequence | None = None,
) -> tuple[float, float, float]:
    """Game value vs. attack value on the same key sample.

    Returns ``(lhs, rhs, gap)`` where ``lhs`` is the induced monogamy
    game value of the induced strategy, ``rhs`` the attack's uniform
    success probability, and ``gap`` their absolute difference (expected
    to vanish to numerical precision).
    """
    key_list = e.keys_for(key_samples, rng, keys)
    game = meg_from_qecm(e, len(key_list), keys=key_list)
    rho_bar = mean_ciphertext(e, key_list)
    strategy = strategy_from_attack(e, atk, rho_bar)
    lhs = meg_win_prob(game, strategy)
    rhs = pwin_unif_eval(e, atk, len(key_list), keys=key_list)
    return lhs, rhs, abs(lhs - rhs)


# ---------------------------------------------------------------------------
# dense JSON dumps (keys become indices into the stored effect tables)
# ---------------------------------------------------------------------------


def game_to_json(g: MegGame) -> dict:
    d = g.alice_dim
    effect_tables = []
    for key in g.keys:
        povm = g.alice_povm(key)
        effect_tables.append([matrix_to_json(eff) for eff in povm.effects])
    return {
        "message_count": g.message_count,
        "alice_dim": d,
        "weights": list(g.weights),
        "alice_povms": effect_tables,
    }


def game_from_json(data: dict) -> MegGame:
    d = int(data["alice_dim"])
    tables = [
        Povm(dim=d, effects=tuple(matrix_from_json(e, d, d) for e in table))
        for table in data["alice_povms"]
    ]
    return MegGame(
        message_count=int(data["message_count"]),
        alice_dim=d,
        keys=tuple(range(len(tables))),
        weights=tuple(float(w) for w in data["weights"]),
        alice_povm=lambda key: tables[key],
    )


def strategy_to_json(s: MegStrategy, keys: Sequence) -> dict:
    da, db, dc = s.dims
    n = da * db * dc
    return {
        "dims": list(s.dims),
        "state": matrix_to_json(s.state),
        "bob_povms": [
            [matrix_to_json(eff) for eff in s.bob_povm(key).effects] for key in keys
        ],
        "charlie_povms": [
            [matrix_to_json(eff) for eff in s.charlie_povm(key).effects] for key in keys
        ],
        "state_dim": n,
    }


def strategy_from_json(data: dict) -> MegStrategy:
    da, db, dc = (int(x) for x in data["dims"])
    n = int(data["state_dim"])
    bob_tables = [
        Povm(dim=db, effects=tuple(matrix_from_json(e, db, db) for e in table))
        for table in data["bob_povms"]
    ]
    charlie_tables = [
        Povm(dim=dc, effects=tuple(matrix_from_json(e, dc, dc) for e in table))
        for table in data["charlie_povms"]
    ]
    return MegStrategy(
        state=matrix_from_json(data["state"], n, n),
        dims=(da, db, dc),
        bob_povm=lambda key: bob_tables[key],
        charlie_povm=lambda key: charlie_tables[key],
    )
