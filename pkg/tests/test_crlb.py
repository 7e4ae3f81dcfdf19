import numpy as np
import pytest

from mmwsync import (
    InvalidParams,
    SingularFim,
    SyncParams,
    crlb_closed_alpha,
    crlb_closed_noise_var,
    crlb_gamma,
    crlb_numeric,
    crlb_closed_cfo_phase,
    crlb_snr,
    fim,
    gen_training,
    regularity_check,
    synthesize,
)
from mmwsync.crlb import parameter_names, score_vector

from conftest import compare_fim_to_oracle, fd_fim, random_sync_params


class TestFim:
    def test_hand_evaluated_elements_n2(self):
        p = SyncParams(amplitudes=np.array([1.0]), phases=np.array([0.7]),
                       cfo=0.1, noise_var=1.0)
        f = fim(p, 2)
        assert f.dim == 4
        assert f.matrix[0, 0] == 4.0                       # amplitude
        assert f.matrix[1, 1] == 2.0                       # noise variance
        assert f.matrix[2, 2] == pytest.approx(8 * np.pi**2, rel=1e-15)   # cfo
        assert f.matrix[2, 3] == pytest.approx(4 * np.pi, rel=1e-15)      # coupling
        assert f.matrix[3, 3] == 4.0                       # phase

    def test_symmetry_and_block_zeros(self, rng):
        for _ in range(10):
            p = random_sync_params(rng, 4)
            f = fim(p, 64)
            assert np.array_equal(f.matrix, f.matrix.T)
            l_r = 4
            # cross terms between the two blocks are exactly zero
            assert np.all(f.matrix[: l_r + 1, l_r + 1:] == 0.0)
            # within F1 everything off-diagonal is exactly zero
            assert np.all(f.block_f1 == np.diag(np.diag(f.block_f1)))
            # within F2 only the cfo row/column couples
            inner = f.block_f2[1:, 1:]
            assert np.all(inner == np.diag(np.diag(inner)))

    @pytest.mark.parametrize("l_r,n", [(1, 16), (2, 64), (4, 64), (3, 256)])
    def test_matches_finite_difference_oracle(self, rng, l_r, n):
        p = random_sync_params(rng, l_r)
        t = gen_training(n, seed=0)
        compare_fim_to_oracle(fim(p, n).matrix, fd_fim(p, t))

    def test_invalid_noise_var(self):
        p = SyncParams(amplitudes=np.array([1.0]), phases=np.array([0.0]),
                       cfo=0.0, noise_var=0.0)
        with pytest.raises(InvalidParams):
            fim(p, 8)


class TestClosedFormBounds:
    def test_reference_alpha_bound(self):
        p = SyncParams(amplitudes=np.array([1.0]), phases=np.array([0.0]),
                       cfo=0.0, noise_var=1.0)
        assert crlb_closed_alpha(p, 64)[0] == 0.0078125

    def test_alpha_bound_substitution(self):
        p = SyncParams(amplitudes=np.array([1.0]), phases=np.array([0.0]),
                       cfo=0.0, noise_var=2.0)
        assert crlb_closed_alpha(p, 2)[0] == 0.5

    def test_reference_noise_var_bound(self):
        p = SyncParams(amplitudes=np.ones(4), phases=np.zeros(4),
                       cfo=0.0, noise_var=1.0)
        assert crlb_closed_noise_var(p, 64) == 0.00390625

    def test_noise_var_bound_substitution(self):
        p = SyncParams(amplitudes=np.array([1.0]), phases=np.array([0.0]),
                       cfo=0.0, noise_var=1.0)
        assert crlb_closed_noise_var(p, 2) == 0.5

    def test_closed_equals_numeric_inverse(self, rng):
        for l_r in (1, 2, 4):
            for n in (16, 64, 256):
                p = random_sync_params(rng, l_r)
                rep = crlb_numeric(p, n)
                closed_a = crlb_closed_alpha(p, n)
                assert np.max(np.abs(rep.var_alpha - closed_a) / closed_a) < 1e-10
                closed_nv = crlb_closed_noise_var(p, n)
                assert abs(rep.var_noise_var - closed_nv) / closed_nv < 1e-10

    def test_bounds_halve_when_n_doubles(self, rng):
        p = random_sync_params(rng, 3)
        for n in (16, 64, 128):
            assert np.array_equal(crlb_closed_alpha(p, 2 * n), crlb_closed_alpha(p, n) / 2)
            assert crlb_closed_noise_var(p, 2 * n) == crlb_closed_noise_var(p, n) / 2


class TestNumericBounds:
    def test_two_by_two_inverse_single_chain(self, rng):
        p = random_sync_params(rng, 1)
        n = 64
        f2 = fim(p, n).block_f2
        rep = crlb_numeric(p, n)
        det = f2[0, 0] * f2[1, 1] - f2[0, 1] ** 2
        assert rep.var_cfo == pytest.approx(f2[1, 1] / det, rel=1e-10)
        assert rep.var_beta[0] == pytest.approx(f2[0, 0] / det, rel=1e-10)

    def test_gamma_bound_reference_value(self):
        assert crlb_gamma(np.array([1.0]), 64)[0] == 0.078125

    def test_snr_bound_reference_value(self):
        assert crlb_snr(1.0, 4, 64) == 0.01171875

    def test_report_positive(self, rng):
        p = random_sync_params(rng, 4)
        rep = crlb_numeric(p, 64)
        assert np.all(rep.var_alpha > 0)
        assert rep.var_noise_var > 0
        assert rep.var_cfo > 0
        assert np.all(rep.var_beta > 0)
        assert np.all(rep.var_gamma > 0)
        assert rep.var_snr > 0

    def test_zero_amplitude_is_singular(self):
        p = SyncParams(amplitudes=np.array([1.0, 0.0, 0.5]),
                       phases=np.array([0.1, 0.2, 0.3]), cfo=0.1, noise_var=1.0)
        with pytest.raises(SingularFim) as err:
            crlb_numeric(p, 64)
        assert err.value.chain == 1

    def test_closed_cfo_phase_forms_are_logged_not_trusted(self, rng, capsys):
        # the closed-form cfo/phase renderings drop the 2*pi weights and can go negative;
        # record the discrepancy against the numeric inverse
        p = random_sync_params(rng, 2)
        numeric = crlb_numeric(p, 64)
        lit_cfo, lit_beta = crlb_closed_cfo_phase(p, 64)
        print(f"closed-form cfo bound {lit_cfo:.6g} vs numeric {numeric.var_cfo:.6g} "
              f"(ratio {lit_cfo / numeric.var_cfo:.6g})")
        print(f"closed-form beta bounds {lit_beta} vs numeric {numeric.var_beta}")
        assert np.isfinite(lit_cfo)
        assert np.all(np.isfinite(lit_beta))


class TestRegularity:
    def test_noiseless_residual_gives_vanishing_data_scores(self):
        # exact-zero residual: the data-dependent score parts cancel to
        # rounding noise and the noise-variance score reduces to its
        # deterministic term
        t = gen_training(64, seed=1)
        p = SyncParams(amplitudes=np.array([0.9, 0.6]), phases=np.array([1.0, 4.0]),
                       cfo=0.21, noise_var=0.0)
        block = synthesize(p, t, seed=0)
        probe = SyncParams(amplitudes=p.amplitudes, phases=p.phases, cfo=p.cfo,
                           noise_var=1e-12)
        s = score_vector(probe, t, block.samples)
        names = parameter_names(2)
        s2 = 1e-12
        n, l_r = 64, 2
        for name, value in zip(names, s):
            if name == "noise_var":
                # residual norm is exactly zero, leaving only -N*Lr/sigma^2
                assert value == -n * l_r / s2
            else:
                # cancel the 2/sigma^2 amplification before judging "zero"
                assert abs(value) * s2 / 2.0 < 1e-9

    def test_score_mean_within_band(self):
        t = gen_training(64, seed=2)
        p = SyncParams(amplitudes=np.array([0.8, 0.5, 0.9, 0.3]),
                       phases=np.array([0.5, 1.5, 2.5, 3.5]),
                       cfo=0.13, noise_var=1.0)
        rep = regularity_check(p, t, n_trials=2000, seed=7)
        assert rep.n_trials == 2000
        assert np.all(rep.within_band(4.0))

    def test_noise_var_score_variance_matches_information(self):
        t = gen_training(64, seed=3)
        p = SyncParams(amplitudes=np.array([0.8, 0.5, 0.9, 0.3]),
                       phases=np.array([0.5, 1.5, 2.5, 3.5]),
                       cfo=0.13, noise_var=1.0)
        rep = regularity_check(p, t, n_trials=4000, seed=8)
        idx = rep.names.index("noise_var")
        info = 64 * 4 / p.noise_var**2
        assert abs(rep.variances[idx] - info) / info < 0.1

    def test_trial_floor(self):
        t = gen_training(16, seed=0)
        p = SyncParams(amplitudes=np.array([1.0]), phases=np.array([0.0]),
                       cfo=0.0, noise_var=1.0)
        with pytest.raises(InvalidParams):
            regularity_check(p, t, n_trials=10)
