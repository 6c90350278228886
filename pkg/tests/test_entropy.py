import numpy as np
import pytest

import macroscope as ms
from macroscope.random import random_density_matrix, random_povm, random_pvm

from .helpers import binary_entropy, plus_state, projector, shannon


class TestRelativeEntropy:
    def test_self_divergence_zero(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            rho = random_density_matrix(3, rng)
            assert abs(ms.relative_entropy(rho, rho).value) <= 1e-10

    def test_pure_vs_uniform(self):
        # -sum p log q + sum p log p = 1*1 - 0 = 1 bit
        rho = ms.DensityMatrix(np.diag([1.0, 0.0]))
        sigma = ms.maximally_mixed(2)
        assert abs(ms.relative_entropy(rho, sigma).value - 1.0) <= 1e-10

    def test_support_violation_is_infinite(self):
        rho = ms.maximally_mixed(2)
        sigma = ms.DensityMatrix(np.diag([1.0, 0.0]))
        out = ms.relative_entropy(rho, sigma)
        assert not out.finite

    def test_nonnegative(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a = random_density_matrix(3, rng)
            b = random_density_matrix(3, rng)
            assert ms.relative_entropy(a, b).value >= -1e-9

    def test_joint_convexity_spot_check(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            lam = rng.uniform()
            r1, r2 = (random_density_matrix(3, rng) for _ in range(2))
            s1, s2 = (random_density_matrix(3, rng) for _ in range(2))
            mix_r = ms.DensityMatrix(lam * r1.mat + (1 - lam) * r2.mat, validate=False)
            mix_s = ms.DensityMatrix(lam * s1.mat + (1 - lam) * s2.mat, validate=False)
            lhs = ms.relative_entropy(mix_r, mix_s).value
            rhs = (
                lam * ms.relative_entropy(r1, s1).value
                + (1 - lam) * ms.relative_entropy(r2, s2).value
            )
            assert lhs <= rhs + 1e-8

    def test_dim_mismatch(self):
        with pytest.raises(ms.DimensionMismatch):
            ms.relative_entropy(ms.maximally_mixed(2), ms.maximally_mixed(3))


class TestVonNeumann:
    def test_pure_state(self):
        assert abs(ms.von_neumann_entropy(plus_state()).value) <= 1e-10

    def test_uniform(self):
        for d in (2, 3, 4):
            s = ms.von_neumann_entropy(ms.maximally_mixed(d))
            assert abs(s.value - np.log2(d)) <= 1e-10

    def test_binary_oracle(self):
        rho = ms.DensityMatrix(np.diag([0.75, 0.25]))
        assert abs(ms.von_neumann_entropy(rho).value - binary_entropy(0.75)) <= 1e-12
        assert abs(ms.von_neumann_entropy(rho).value - 0.8112781244591328) <= 1e-12

    def test_range(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            rho = random_density_matrix(4, rng)
            s = ms.von_neumann_entropy(rho).value
            assert -1e-9 <= s <= 2 + 1e-9


class TestObservationalDeficit:
    def test_equal_states_zero(self):
        rng = np.random.default_rng(4)
        rho = random_density_matrix(3, rng)
        povm = random_povm(3, 4, rng)
        assert abs(ms.observational_deficit(rho, rho, povm).value) <= 1e-9

    def test_classical_sufficiency(self):
        # diagonal state, basis readout, uniform prior: nothing is lost
        rng = np.random.default_rng(5)
        p = rng.dirichlet(np.ones(3))
        rho = ms.DensityMatrix(np.diag(p))
        out = ms.observational_deficit(rho, ms.maximally_mixed(3), ms.basis_pvm(3))
        assert abs(out.value) <= 1e-9

    def test_plus_state_z_readout(self):
        # D(rho||u) = 1 bit, measured distributions coincide
        out = ms.observational_deficit(
            plus_state(), ms.maximally_mixed(2), ms.basis_pvm(2)
        )
        assert abs(out.value - 1.0) <= 1e-9

    def test_dpi_nonnegative(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            d = int(rng.integers(2, 5))
            rho = random_density_matrix(d, rng)
            gamma = random_density_matrix(d, rng)
            povm = random_povm(d, int(rng.integers(2, 5)), rng)
            assert ms.observational_deficit(rho, gamma, povm).value >= -1e-9

    def test_singular_prior_rejected(self):
        rho = ms.maximally_mixed(2)
        gamma = ms.DensityMatrix(np.diag([1.0, 0.0]))
        with pytest.raises(ms.PriorNotInvertible):
            ms.observational_deficit(rho, gamma, ms.basis_pvm(2))


class TestObservationalEntropy:
    def test_eigenbasis_readout_recovers_von_neumann(self):
        rng = np.random.default_rng(7)
        p = rng.dirichlet(np.ones(3))
        rho = ms.DensityMatrix(np.diag(p))
        s_obs = ms.observational_entropy(rho, ms.basis_pvm(3))
        assert abs(s_obs.value - shannon(p)) <= 1e-9

    def test_single_outcome(self):
        rng = np.random.default_rng(8)
        rho = random_density_matrix(3, rng)
        povm = ms.Povm([np.eye(3)])
        assert abs(ms.observational_entropy(rho, povm).value - np.log2(3)) <= 1e-12

    def test_zero_state_x_readout(self):
        rho = ms.DensityMatrix(np.diag([1.0, 0.0]))
        x_pvm = ms.Povm([projector(np.array([1, 1]) / np.sqrt(2)),
                         projector(np.array([1, -1]) / np.sqrt(2))])
        assert abs(ms.observational_entropy(rho, x_pvm).value - 1.0) <= 1e-9

    def test_matches_definitional_form(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            d = int(rng.integers(2, 5))
            rho = random_density_matrix(d, rng)
            povm = random_povm(d, int(rng.integers(2, 5)), rng)
            direct = ms.observational_entropy(rho, povm).value
            definitional = (
                ms.von_neumann_entropy(rho).value
                + ms.observational_deficit(rho, ms.maximally_mixed(d), povm).value
            )
            assert abs(direct - definitional) <= 1e-9

    def test_never_below_von_neumann(self):
        rng = np.random.default_rng(10)
        for _ in range(30):
            d = int(rng.integers(2, 5))
            rho = random_density_matrix(d, rng)
            povm = random_povm(d, int(rng.integers(2, 6)), rng)
            gap = ms.observational_entropy(rho, povm).value - ms.von_neumann_entropy(rho).value
            assert gap >= -1e-9


class TestMacroStateEntropyChain:
    def test_chain_identities(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            d = int(rng.integers(2, 5))
            sizes = []
            left = d
            while left > 0:
                s = int(rng.integers(1, left + 1))
                sizes.append(s)
                left -= s
            pvm = random_pvm(d, sizes, rng)
            rho = random_density_matrix(d, rng)
            probs = ms.measure_probabilities(pvm, rho)
            blocks = sum(
                p * e / np.trace(e).real for p, (_, e) in zip(probs, pvm)
            )
            macro = ms.DensityMatrix(blocks, validate=False)

            s_macro = ms.von_neumann_entropy(macro).value
            s_obs = ms.observational_entropy(rho, pvm).value
            s_obs_macro = ms.observational_entropy(macro, pvm).value
            assert abs(s_macro - s_obs) <= 1e-9
            assert abs(s_obs - s_obs_macro) <= 1e-9
            # indistinguishable to the observer
            assert np.allclose(
                probs, ms.measure_probabilities(pvm, macro), atol=1e-10
            )


class TestMutualInformation:
    def test_product_state(self):
        rng = np.random.default_rng(12)
        a, b = random_density_matrix(2, rng), random_density_matrix(3, rng)
        rho = ms.DensityMatrix(ms.tensor(a.mat, b.mat), validate=False)
        assert abs(ms.mutual_information(rho, (2, 3)).value) <= 1e-9

    def test_bell_state(self):
        from .helpers import bell_state

        assert abs(ms.mutual_information(bell_state(), (2, 2)).value - 2.0) <= 1e-9

    def test_classical_correlation(self):
        rho = ms.DensityMatrix(np.diag([0.5, 0.0, 0.0, 0.5]))
        assert abs(ms.mutual_information(rho, (2, 2)).value - 1.0) <= 1e-9

    def test_entropy_sum_identity(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            rho = random_density_matrix(6, rng)
            mi = ms.mutual_information(rho, (2, 3)).value
            sa = ms.von_neumann_entropy(
                ms.DensityMatrix(ms.partial_trace(rho.mat, (2, 3), "A"), validate=False)
            ).value
            sb = ms.von_neumann_entropy(
                ms.DensityMatrix(ms.partial_trace(rho.mat, (2, 3), "B"), validate=False)
            ).value
            sab = ms.von_neumann_entropy(rho).value
            assert abs(mi - (sa + sb - sab)) <= 1e-8


def test_entropy_value_infinite_encoding():
    inf = ms.EntropyValue.infinite()
    assert not inf.finite
    assert np.isinf(float(inf))
