import numpy as np
import pytest

import macroscope as ms
from macroscope.linalg import frob, mat_inv_sqrt, mat_sqrt, partial_transpose
from macroscope.random import (
    random_block_frame,
    random_density_matrix,
    random_povm,
    random_unitary,
)

from .helpers import plus_state, random_frame, smeared_qubit_povm


class TestPetzMap:
    def test_identity_channel(self):
        rng = np.random.default_rng(0)
        gamma = random_density_matrix(3, rng)
        r = ms.petz_map(ms.identity_channel(3), gamma)
        assert frob(r.superop - np.eye(9)) <= 1e-9

    def test_unitary_channel(self):
        rng = np.random.default_rng(1)
        u = random_unitary(3, rng)
        gamma = random_density_matrix(3, rng)
        r = ms.petz_map(ms.unitary_channel(u), gamma)
        assert frob(r.superop - ms.unitary_channel(u.conj().T).superop) <= 1e-9

    def test_measurement_channel_formula_oracle(self):
        # symbolic evaluation of the defining formula for the Z readout
        gamma = ms.DensityMatrix(np.diag([1 / 3, 2 / 3]))
        meas = ms.measurement_channel(ms.basis_pvm(2))
        r = ms.petz_map(meas, gamma)
        img_inv_sqrt = mat_inv_sqrt(meas.apply(gamma.mat))
        root = mat_sqrt(gamma.mat)
        adj = meas.adjoint()
        for i in range(2):
            for j in range(2):
                unit = np.zeros((2, 2), dtype=complex)
                unit[i, j] = 1.0
                expected = root @ adj.apply(img_inv_sqrt @ unit @ img_inv_sqrt) @ root
                assert frob(r.apply(unit) - expected) <= 1e-10
        assert frob(r.apply(np.diag([1.0, 0.0])) - np.diag([1.0, 0.0])) <= 1e-10

    def test_recovers_prior_through_channel(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            d = int(rng.integers(2, 5))
            gamma = random_density_matrix(d, rng)
            povm = random_povm(d, int(rng.integers(2, 5)), rng)
            meas = ms.measurement_channel(povm)
            r = ms.petz_map(meas, gamma)
            roundtrip = ms.channel_compose(r, meas)
            assert frob(roundtrip.apply(gamma.mat) - gamma.mat) <= 1e-9

    def test_rejects_singular_prior(self):
        gamma = ms.DensityMatrix(np.diag([1.0, 0.0]))
        with pytest.raises(ms.PriorNotInvertible):
            ms.petz_map(ms.identity_channel(2), gamma)


class TestCoarseGraining:
    def test_basis_pvm_uniform_is_pinching(self):
        cg = ms.coarse_graining_map(ms.basis_pvm(2), ms.maximally_mixed(2))
        out = cg.channel.apply(plus_state().mat)
        assert frob(out - np.eye(2) / 2) <= 1e-10

    def test_smeared_povm_prepared_states(self):
        cg = ms.coarse_graining_map(smeared_qubit_povm(), ms.maximally_mixed(2))
        assert frob(cg.prepared_states[0].mat - np.diag([2 / 3, 1 / 3])) <= 1e-10
        assert frob(cg.prepared_states[1].mat - np.diag([1 / 3, 2 / 3])) <= 1e-10

    def test_fixes_prior(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            d = int(rng.integers(2, 5))
            gamma = random_density_matrix(d, rng)
            povm = random_povm(d, int(rng.integers(2, 5)), rng)
            cg = ms.coarse_graining_map(povm, gamma)
            assert frob(cg.channel.apply(gamma.mat) - gamma.mat) <= 1e-9

    def test_two_constructions_agree(self):
        # construction itself cross-checks; verify through public behavior too
        rng = np.random.default_rng(4)
        gamma = random_density_matrix(3, rng)
        povm = random_povm(3, 4, rng)
        cg = ms.coarse_graining_map(povm, gamma)
        meas = ms.measurement_channel(povm)
        composed = ms.channel_compose(ms.petz_map(meas, gamma), meas)
        assert frob(cg.channel.superop - composed.superop) <= 1e-9

    def test_trace_preserved(self):
        rng = np.random.default_rng(5)
        gamma = random_density_matrix(3, rng)
        povm = random_povm(3, 2, rng)
        cg = ms.coarse_graining_map(povm, gamma)
        rho = random_density_matrix(3, rng)
        out = ms.coarse_grain(rho, cg)
        assert abs(np.trace(out.mat).real - 1.0) <= 1e-10

    def test_macroscopic_state_is_fixed(self):
        rng = np.random.default_rng(6)
        frame = random_frame(4, rng)
        from .helpers import random_free_state

        rho = random_free_state(frame, rng)
        assert frob(frame.cg.channel.apply(rho.mat) - rho.mat) <= 1e-8


class TestDpiEqualityIffPetzRecovery:
    def test_two_sided(self):
        rng = np.random.default_rng(7)
        checked_fixed = checked_moving = 0
        for _ in range(20):
            d = int(rng.integers(2, 5))
            povm, gamma = random_block_frame(d, rng)
            frame = ms.compute_mppp(povm, gamma)
            from .helpers import random_free_state

            for rho in (random_free_state(frame, rng), random_density_matrix(d, rng)):
                deficit = ms.observational_deficit(rho, gamma, povm).value
                residual = frob(frame.cg.channel.apply(rho.mat) - rho.mat)
                if abs(deficit) <= 1e-8:
                    assert residual <= 1e-6
                    checked_fixed += 1
                if residual <= 1e-6:
                    assert abs(deficit) <= 1e-8
                else:
                    assert deficit > 1e-8
                    checked_moving += 1
        assert checked_fixed >= 20 and checked_moving >= 15


class TestAdjointCoarseGrainPovm:
    def test_trivial_povm(self):
        rng = np.random.default_rng(8)
        gamma = random_density_matrix(3, rng)
        cg = ms.coarse_graining_map(random_povm(3, 3, rng), gamma)
        out, tmap = ms.adjoint_coarse_grain_povm(cg, ms.Povm([np.eye(3)]))
        assert len(out) == 1
        assert np.allclose(tmap.matrix, 1.0)

    def test_orthogonal_readout_is_identity(self):
        cg = ms.coarse_graining_map(ms.basis_pvm(3), ms.maximally_mixed(3))
        out, tmap = ms.adjoint_coarse_grain_povm(cg, ms.basis_pvm(3))
        assert np.allclose(tmap.matrix, np.eye(3), atol=1e-12)

    def test_row_normalization(self):
        rng = np.random.default_rng(9)
        gamma = random_density_matrix(3, rng)
        cg = ms.coarse_graining_map(random_povm(3, 4, rng), gamma)
        _, tmap = ms.adjoint_coarse_grain_povm(cg, random_povm(3, 3, rng))
        assert np.allclose(tmap.matrix.sum(axis=1), 1.0, atol=1e-12)

    def test_produces_post_processing_of_original(self):
        rng = np.random.default_rng(10)
        gamma = random_density_matrix(2, rng)
        povm = random_povm(2, 3, rng)
        cg = ms.coarse_graining_map(povm, gamma)
        q = random_povm(2, 2, rng)
        out, tmap = ms.adjoint_coarse_grain_povm(cg, q)
        rebuilt = ms.post_process(povm, tmap)
        for (_, a), (_, b) in zip(out, rebuilt):
            assert frob(a - b) <= 1e-9


class TestCesaroAverage:
    def test_idempotent_channel_is_its_own_average(self):
        rng = np.random.default_rng(11)
        frame = random_frame(3, rng)
        delta = frame.rdm
        for n in (1, 5, 20):
            avg = ms.cesaro_average(delta, n)
            assert frob(avg.superop - delta.superop) <= 1e-8

    def test_trivial_frame_converges_to_prior_preparation(self):
        frame = ms.compute_mppp(smeared_qubit_povm(), ms.maximally_mixed(2))
        c = frame.cg.channel
        errors = []
        for n in (10, 100, 1000):
            avg = ms.cesaro_average(c, n)
            errors.append(frob(avg.superop - frame.rdm.superop))
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] <= 1e-3

    def test_converges_to_rdm_on_random_frames(self):
        rng = np.random.default_rng(12)
        for _ in range(5):
            frame = random_frame(int(rng.integers(2, 5)), rng)
            errs = [
                frob(ms.cesaro_average(frame.cg.channel, n).superop - frame.rdm.superop)
                for n in (10, 100, 1000)
            ]
            assert errs[2] <= 1e-3
            # nonincreasing up to round-off (frames with C = Delta sit at ~1e-14)
            assert errs[1] <= errs[0] + 1e-10
            assert errs[2] <= errs[1] + 1e-10


class TestEntanglementBreaking:
    def test_local_coarse_graining_gives_ppt_states(self):
        rng = np.random.default_rng(13)
        povm, gamma = random_block_frame(2, rng)
        cg = ms.coarse_graining_map(povm, gamma)
        local = ms.channel_tensor_identity(cg.channel, 2)
        for _ in range(10):
            rho = random_density_matrix(4, rng)
            out = local.apply(rho.mat)
            pt = partial_transpose(out, (2, 2), sys="B")
            assert np.linalg.eigvalsh((pt + pt.conj().T) / 2)[0] >= -1e-8
