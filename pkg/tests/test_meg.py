import numpy as np
import pytest

from uncloneq.attacks import (
    CloningAttack,
    projector_cloning_attack,
    measure_share_attack,
    measure_share_ml_attack,
    superposition_cloner,
)
from uncloneq.errors import NotKeyIndependent
from uncloneq.linalg import KrausChannel
from uncloneq.meg import (
    MegGame,
    MegStrategy,
    choi_state,
    game_from_json,
    game_to_json,
    mean_ciphertext,
    meg_from_qecm,
    meg_win_prob,
    strategy_from_attack,
    strategy_from_json,
    strategy_to_json,
    verify_reduction,
)
from uncloneq.schemes import Povm, QecmScheme, bb84_scheme, uniform_haar_scheme

from conftest import rand_density


def _basis_povm(d: int) -> Povm:
    effects = []
    for m in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[m, m] = 1.0
        effects.append(e)
    return Povm(dim=d, effects=tuple(effects))


class TestMegWinProb:
    def test_classical_copy_game(self):
        m_count = 3
        rho = np.zeros((27, 27), dtype=complex)
        for m in range(m_count):
            idx = m * 9 + m * 3 + m
            rho[idx, idx] = 1 / m_count
        game = MegGame(
            message_count=m_count,
            alice_dim=3,
            keys=(0,),
            weights=(1.0,),
            alice_povm=lambda key: _basis_povm(3),
        )
        strategy = MegStrategy(
            state=rho,
            dims=(3, 3, 3),
            bob_povm=lambda key: _basis_povm(3),
            charlie_povm=lambda key: _basis_povm(3),
        )
        assert abs(meg_win_prob(game, strategy) - 1.0) < 1e-12

    def test_uniform_povms_score_inverse_square(self, rng):
        m_count = 3
        d = 3
        rho = rand_density(d * 4, rng)  # A x (B=2) x (C=2)
        uniform = Povm(
            dim=2, effects=tuple(np.eye(2, dtype=complex) / m_count for _ in range(m_count))
        )
        game = MegGame(
            message_count=m_count,
            alice_dim=d,
            keys=(0,),
            weights=(1.0,),
            alice_povm=lambda key: _basis_povm(d),
        )
        strategy = MegStrategy(
            state=rho,
            dims=(d, 2, 2),
            bob_povm=lambda key: uniform,
            charlie_povm=lambda key: uniform,
        )
        assert abs(meg_win_prob(game, strategy) - 1.0 / m_count**2) < 1e-12

    def test_product_strategy_factorizes(self, rng):
        d = 2
        m_count = 2
        rho_a = rand_density(d, rng)
        rho_bc = rand_density(4, rng)
        state = np.kron(rho_a, rho_bc)
        alice = _basis_povm(d)
        bob = Povm(dim=2, effects=(np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)))
        game = MegGame(
            message_count=m_count,
            alice_dim=d,
            keys=(0,),
            weights=(1.0,),
            alice_povm=lambda key: alice,
        )
        strategy = MegStrategy(
            state=state, dims=(d, 2, 2), bob_povm=lambda key: bob, charlie_povm=lambda key: bob
        )
        value = meg_win_prob(game, strategy)
        expected = 0.0
        rho_b = np.einsum("ijkj->ik", rho_bc.reshape(2, 2, 2, 2))
        rho_c = np.einsum("ijil->jl", rho_bc.reshape(2, 2, 2, 2))
        for m in range(m_count):
            pa = np.trace(alice.effects[m] @ rho_a).real
            # joint BC probability does not factorize in general; contract directly
            joint = np.trace(np.kron(bob.effects[m], bob.effects[m]) @ rho_bc).real
            expected += pa * joint
        assert abs(value - expected) < 1e-12
        assert rho_b.shape == rho_c.shape == (2, 2)

    def test_constant_guess_floor(self, rng):
        # constant guessing both sides achieves max_m E_k tr(F_m rho_A)
        e = uniform_haar_scheme(2, 2)
        keys = [e.key_sampler(rng) for _ in range(5)]
        game = meg_from_qecm(e, len(keys), keys=keys)
        rho_bar = mean_ciphertext(e, keys)
        atk = projector_cloning_attack(e)
        strategy = strategy_from_attack(e, atk, rho_bar)
        rho_a = np.einsum(
            "ijkj->ik",
            strategy.state.reshape(4, 25, 4, 25),
        )
        floors = []
        for m in range(2):
            acc = 0.0
            for key, w in zip(game.keys, game.weights):
                acc += w * np.trace(game.alice_povm(key).effects[m] @ rho_a).real
            floors.append(acc)
        d_bc = atk.dims[0]
        constant = Povm(
            dim=d_bc,
            effects=(np.eye(d_bc, dtype=complex), np.zeros((d_bc, d_bc), complex)),
        )
        const_strategy = MegStrategy(
            state=strategy.state,
            dims=strategy.dims,
            bob_povm=lambda key: constant,
            charlie_povm=lambda key: constant,
        )
        assert abs(meg_win_prob(game, const_strategy) - floors[0]) < 1e-10


class TestChoiState:
    def test_identity_channel_maximally_mixed_reference(self):
        d = 3
        ch = KrausChannel(d, d, (np.eye(d, dtype=complex),))
        rho_bar = np.eye(d, dtype=complex) / d
        state = choi_state(ch, rho_bar)
        phi = np.zeros(d * d, dtype=complex)
        for i in range(d):
            phi[i * d + i] = 1.0 / np.sqrt(d)
        assert np.max(np.abs(state - np.outer(phi, phi.conj()))) < 1e-12

    def test_marginal_reproduces_reference(self, rng):
        d = 3
        ops = []
        g = rng.standard_normal((d * 2, d)) + 1j * rng.standard_normal((d * 2, d))
        q, _ = np.linalg.qr(g)
        ops = tuple(q[i * d : (i + 1) * d, :] for i in range(2))
        ch = KrausChannel(d, d, ops)
        rho_bar = rand_density(d, rng)
        state = choi_state(ch, rho_bar)
        marg = np.einsum("ijkj->ik", state.reshape(d, d, d, d))
        assert np.max(np.abs(marg - rho_bar)) < 1e-9

    def test_cloner_choi_is_valid_state(self):
        from uncloneq.linalg import assert_density_operator

        ch = superposition_cloner(2)
        state = choi_state(ch, np.eye(2, dtype=complex) / 2)
        assert state.shape == (18, 18)
        assert_density_operator(state)


class TestMegFromQecm:
    def test_uniform_haar_effects_are_projectors(self, rng):
        e = uniform_haar_scheme(2, 2)
        keys = [e.key_sampler(rng) for _ in range(4)]
        game = meg_from_qecm(e, len(keys), keys=keys)
        for key in game.keys:
            povm = game.alice_povm(key)
            povm.validate(herm_tol=1e-8, psd_tol=1e-8, completeness_tol=1e-8)
            for m, eff in enumerate(povm.effects):
                w = np.sort(np.linalg.eigvalsh(eff))[::-1]
                # rank-L projector spectrum, matching the decrypt effect
                assert np.allclose(w[:2], 1.0, atol=1e-8)
                assert np.allclose(w[2:], 0.0, atol=1e-8)

    def test_bb84_effects_equal_keyed_basis_projectors(self):
        e = bb84_scheme(1)
        keys = e.enumerate_keys()
        game = meg_from_qecm(e, len(keys), keys=keys)
        for key in keys:
            povm = game.alice_povm(key)
            decrypt = e.decrypt_povm(key)
            for m in range(2):
                # real ciphertexts: the eigenbasis transpose is a no-op
                assert np.max(np.abs(povm.effects[m] - decrypt.effects[m])) < 1e-8

    def test_key_dependent_average_rejected(self):
        # two keys occupy disjoint subspaces, so the average moves with the key
        def encrypt(key, m):
            e = np.zeros((4, 4), dtype=complex)
            e[2 * key + m, 2 * key + m] = 1.0
            return e

        def decrypt_povm(key):
            effects = []
            for m in range(2):
                eff = np.zeros((4, 4), dtype=complex)
                eff[2 * key + m, 2 * key + m] = 1.0
                eff[2 * (1 - key) + m, 2 * (1 - key) + m] = 1.0
                effects.append(eff)
            return Povm(dim=4, effects=tuple(effects))

        blocky = QecmScheme(
            message_count=2,
            cipher_dim=4,
            key_sampler=lambda rng: int(rng.integers(0, 2)),
            encrypt=encrypt,
            decrypt_povm=decrypt_povm,
        )
        with pytest.raises(NotKeyIndependent):
            meg_from_qecm(blocky, 2, keys=[0, 1])

    def test_rank_deficient_average_supported(self, rng):
        # embed a qubit scheme into d=3; the average misses one direction
        from uncloneq.schemes import extend_scheme

        iso = np.zeros((3, 2), dtype=complex)
        iso[0, 0] = iso[1, 1] = 1.0
        e = extend_scheme(uniform_haar_scheme(2, 1), iso)
        keys = [e.key_sampler(rng) for _ in range(3)]
        game = meg_from_qecm(e, len(keys), keys=keys)
        for key in keys:
            game.alice_povm(key).validate(
                herm_tol=1e-8, psd_tol=1e-8, completeness_tol=1e-8
            )


class TestStrategyFromAttack:
    def test_choi_strategy_trace_one(self, rng):
        e = uniform_haar_scheme(2, 1)
        keys = [e.key_sampler(rng) for _ in range(3)]
        rho_bar = mean_ciphertext(e, keys)
        atk = projector_cloning_attack(e)
        strategy = strategy_from_attack(e, atk, rho_bar)
        assert abs(np.trace(strategy.state).real - 1.0) < 1e-9
        assert strategy.dims == (2, 3, 3)

    def test_measure_share_choi_is_classical(self, rng):
        e = uniform_haar_scheme(2, 1)
        keys = [e.key_sampler(rng) for _ in range(3)]
        rho_bar = mean_ciphertext(e, keys)
        atk = measure_share_ml_attack(e, np.eye(2, dtype=complex))
        strategy = strategy_from_attack(e, atk, rho_bar)
        # BC part is diagonal in the shared-outcome basis
        state = strategy.state.reshape(2, 4, 2, 4)
        bc = np.einsum("ijil->jl", state)
        off = bc - np.diag(np.diag(bc))
        assert np.max(np.abs(off)) < 1e-12


class TestSerialization:
    def test_json_roundtrip_preserves_win_probability(self, rng):
        import json

        e = uniform_haar_scheme(2, 2)
        keys = [e.key_sampler(rng) for _ in range(4)]
        game = meg_from_qecm(e, len(keys), keys=keys)
        atk = projector_cloning_attack(e)
        strategy = strategy_from_attack(e, atk, mean_ciphertext(e, keys))
        direct = meg_win_prob(game, strategy)
        blob = json.dumps(
            {"game": game_to_json(game), "strategy": strategy_to_json(strategy, keys)}
        )
        loaded = json.loads(blob)
        game2 = game_from_json(loaded["game"])
        strategy2 = strategy_from_json(loaded["strategy"])
        assert abs(meg_win_prob(game2, strategy2) - direct) < 1e-12


class TestVerifyReduction:
    def test_trivial_constant_attack(self, rng):
        e = uniform_haar_scheme(2, 2)
        d = e.cipher_dim
        constant = Povm(
            dim=d, effects=(np.eye(d, dtype=complex), np.zeros((d, d), complex))
        )
        atk = CloningAttack(
            channel=measure_share_attack(d, np.eye(d, dtype=complex)),
            bob_povm=lambda key: constant,
            charlie_povm=lambda key: constant,
            dims=(d, d),
        )
        lhs, rhs, gap = verify_reduction(e, atk, 5, rng)
        assert abs(rhs - 0.5) < 1e-10
        assert gap < 1e-12

    def test_cloner_attack_small(self, rng):
        e = uniform_haar_scheme(2, 2)
        keys = [e.key_sampler(rng) for _ in range(8)]
        lhs, rhs, gap = verify_reduction(e, projector_cloning_attack(e), len(keys), keys=keys)
        assert abs(rhs - 0.53125) < 1e-9
        assert gap < 1e-8
