import math

import numpy as np
import pytest

from gsqg.diagnostics import recompute_balance_residuals
from gsqg.spectral import SpectralField, sobolev_norm, to_physical, wavenumbers
from gsqg.stepping import (
    BlowupError,
    CflViolation,
    ConstantProfile,
    ExpProfile,
    ForcingSpec,
    RampProfile,
    SimParams,
    SinusoidProfile,
    ZERO_FORCING,
    dissipation_factor,
    forcing_lp_samples,
    initial_state,
    run,
    step,
)

from oracles import random_band_field


class TestForcing:
    def test_evaluate_builds_the_cosine(self):
        f = ForcingSpec((((1, 0), ConstantProfile(0.5)),))
        phys = to_physical(f.evaluate(0.0, 32))
        x = 2.0 * np.pi * np.arange(32) / 32
        assert np.allclose(phys, np.cos(x)[:, None] * np.ones(32), atol=1e-13)

    def test_entries_sharing_a_mode_add(self):
        f = ForcingSpec((
            ((2, 1), ConstantProfile(1.0 + 2.0j)),
            ((2, 1), ConstantProfile(0.5 - 1.0j)),
        ))
        c = f.evaluate(3.0, 16).coeffs
        assert c[2, 1] == pytest.approx(1.5 + 1.0j)
        assert c[-2 % 16, -1 % 16] == pytest.approx(1.5 - 1.0j)

    def test_profiles_evaluate_closed_forms(self):
        assert SinusoidProfile(2.0, omega=3.0, phase=0.5).value(1.0) == \
            pytest.approx(2.0 * math.cos(3.5))
        assert RampProfile(4.0, ramp_time=2.0).value(0.5) == pytest.approx(1.0)
        assert RampProfile(4.0, ramp_time=2.0).value(7.0) == pytest.approx(4.0)
        assert ExpProfile(3.0, rate=-2.0).value(1.0) == pytest.approx(3.0 * math.exp(-2.0))

    def test_rejects_bad_modes(self):
        with pytest.raises(ValueError, match="lexicographically"):
            ForcingSpec((((-1, 0), ConstantProfile()),))
        f = ForcingSpec((((9, 0), ConstantProfile()),))
        with pytest.raises(ValueError, match="band"):
            f.evaluate(0.0, 16)

    def test_lp_samples_match_direct_norms(self):
        f = ForcingSpec((((1, 2), SinusoidProfile(1.3, omega=2.0)),))
        ts = np.array([0.0, 0.4, 1.1])
        out = forcing_lp_samples(f, ts, 32, (1.0, 2.0, np.inf))
        for i, t in enumerate(ts):
            amp = 2.0 * abs(1.3 * math.cos(2.0 * t))
            assert out[np.inf][i] == pytest.approx(amp, rel=1e-12)
            assert out[2.0][i] == pytest.approx(amp / math.sqrt(2.0), rel=1e-12)


class TestPureDissipation:
    @pytest.mark.parametrize("gamma", [0.5, 1.0])
    @pytest.mark.parametrize("nu", [1e-1, 1e-3])
    def test_semigroup_is_exact_per_mode(self, gamma, nu):
        rng = np.random.default_rng(11)
        theta0 = random_band_field(rng, 64, kmax=9, npairs=20)
        params = SimParams(alpha=0.5, gamma=gamma, nu=nu, M=64,
                           dt=0.02, t_end=1.0, advect=False)
        series = run(theta0, params, sample_stride=50)
        w = wavenumbers(64)
        decay = np.exp(-nu * np.where(w.nsq > 0, w.nsq, 1.0) ** gamma * 1.0)
        decay[0, 0] = 1.0
        # re-integrate the final state by stepping explicitly
        state = initial_state(theta0)
        for _ in range(50):
            state = step(state, params)
        exact = theta0.coeffs * decay
        err = np.max(np.abs(state.field.coeffs - exact))
        assert err <= 1e-10
        assert series.l2[-1] == pytest.approx(
            np.sqrt(np.sum(np.abs(exact) ** 2)), rel=1e-12)

    def test_single_mode_advected_run_still_decays_exactly(self):
        # for theta = cos(x1) the velocity is parallel to the level sets,
        # so the transport term vanishes identically
        theta0 = SpectralField.from_modes(64, {(1, 0): 0.5})
        params = SimParams(alpha=0.75, gamma=1.0, nu=0.1, M=64,
                           dt=0.01, t_end=0.5, advect=True)
        series = run(theta0, params, sample_stride=50)
        want = math.exp(-0.1 * 0.5) / math.sqrt(2.0)
        assert series.l2[-1] == pytest.approx(want, rel=1e-12)

    def test_inviscid_hamiltonian_drift_is_tiny(self):
        rng = np.random.default_rng(3)
        theta0 = random_band_field(rng, 64, kmax=5, npairs=10, norm=1.0)
        params = SimParams(alpha=0.5, gamma=1.0, nu=0.0, M=64,
                           dt=2e-3, t_end=0.04)
        series = run(theta0, params, sample_stride=20)
        drift = abs(series.h_minus_alpha[-1] - series.h_minus_alpha[0])
        assert drift < 1e-10 * series.h_minus_alpha[0]


def _manufactured_error(dt: float, nu: float, t_end: float = 1.0):
    # theta* = exp(-t) cos(x1) solves the advective flow with this forcing:
    # the transport term vanishes identically for a single x1 cosine
    M = 16
    theta0 = SpectralField.from_modes(M, {(1, 0): 0.5})
    forcing = ForcingSpec((((1, 0), ExpProfile(0.5 * (nu - 1.0), rate=-1.0)),))
    params = SimParams(alpha=0.5, gamma=1.0, nu=nu, M=M, dt=dt, t_end=t_end)
    series = run(theta0, params, forcing, sample_stride=10 ** 9)
    amp = 0.5 * math.exp(-t_end)
    sol_err = abs(series.l2[-1] - amp * math.sqrt(2.0))
    return sol_err, abs(series.res_ham[-1]), abs(series.res_l2[-1])


class TestAccuracy:
    def test_manufactured_solution_fourth_order(self):
        nu = 0.37
        errs = np.array([_manufactured_error(dt, nu)
                         for dt in (0.1, 0.05, 0.025)])
        for j in range(3):  # solution error and both balance residuals
            r1 = errs[0, j] / errs[1, j]
            r2 = errs[1, j] / errs[2, j]
            assert 12.0 <= r1 <= 20.0, (j, r1)
            assert 12.0 <= r2 <= 20.0, (j, r2)

    def test_stage_quadrature_beats_trapezoid_on_coarse_samples(self):
        nu = 0.37
        M = 16
        theta0 = SpectralField.from_modes(M, {(1, 0): 0.5})
        forcing = ForcingSpec((((1, 0), ExpProfile(0.5 * (nu - 1.0), rate=-1.0)),))
        params = SimParams(alpha=0.5, gamma=1.0, nu=nu, M=M, dt=0.05, t_end=1.0)
        series = run(theta0, params, forcing, sample_stride=4)
        re_ham, re_l2 = recompute_balance_residuals(series, nu)
        assert abs(series.res_ham[-1]) < 0.01 * abs(re_ham[-1])
        assert abs(series.res_l2[-1]) < 0.01 * abs(re_l2[-1])


class TestGuards:
    def test_cfl_violation_raises(self):
        theta0 = SpectralField.from_modes(64, {(1, 0): 50.0})
        params = SimParams(alpha=1.0, gamma=1.0, nu=1e-3, M=64,
                           dt=0.01, t_end=1.0)
        with pytest.raises(CflViolation) as exc:
            run(theta0, params)
        assert exc.value.dt == pytest.approx(0.01)
        assert exc.value.dt_max < 0.01

    def test_blowup_guard_raises(self):
        theta0 = SpectralField.from_modes(16, {(1, 0): 1.0})
        forcing = ForcingSpec((((1, 0), ConstantProfile(1e13)),))
        params = SimParams(alpha=0.5, gamma=1.0, nu=0.0, M=16,
                           dt=1.0, t_end=2.0, advect=False)
        with pytest.raises(BlowupError) as exc:
            run(theta0, params, forcing)
        assert exc.value.amplitude > 1e12

    def test_param_validation(self):
        good = dict(alpha=0.5, gamma=1.0, nu=0.1, M=16, dt=0.1, t_end=1.0)
        SimParams(**good)
        for bad in (dict(alpha=0.0), dict(gamma=0.0), dict(nu=-1.0),
                    dict(M=15), dict(dt=0.0), dict(t_end=-1.0)):
            with pytest.raises(ValueError):
                SimParams(**{**good, **bad})

    def test_nondivisible_horizon_rejected(self):
        theta0 = SpectralField.zeros(16)
        params = SimParams(alpha=0.5, gamma=1.0, nu=0.1, M=16,
                           dt=0.3, t_end=1.0)
        with pytest.raises(ValueError, match="multiple"):
            run(theta0, params)


class TestRunBookkeeping:
    def test_zero_horizon_yields_single_sample(self):
        theta0 = SpectralField.from_modes(32, {(1, 0): 0.5})
        params = SimParams(alpha=0.5, gamma=1.0, nu=0.1, M=32, dt=0.1, t_end=0.0)
        series = run(theta0, params)
        assert len(series) == 1
        assert series.t[0] == 0.0
        assert series.l2[0] == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-14)
        assert series.res_ham[0] == 0.0

    def test_sampling_grid_and_final_sample(self):
        theta0 = SpectralField.from_modes(32, {(1, 0): 0.1})
        params = SimParams(alpha=0.5, gamma=1.0, nu=0.1, M=32, dt=0.1, t_end=0.7)
        series = run(theta0, params, sample_stride=3)
        assert np.allclose(series.t, [0.0, 0.3, 0.6, 0.7], atol=1e-12)

    def test_observers_see_sample_states(self):
        seen = []
        theta0 = SpectralField.from_modes(32, {(1, 0): 0.1})
        params = SimParams(alpha=0.5, gamma=1.0, nu=0.1, M=32, dt=0.1, t_end=0.4)
        run(theta0, params, sample_stride=2, observers=[lambda st: seen.append(st.t)])
        assert np.allclose(seen, [0.0, 0.2, 0.4], atol=1e-12)

    def test_forced_decay_keeps_lp_bound(self):
        # transport-diffusion L^p control with the forcing budget subtracted
        from gsqg.diagnostics import lp_monotonicity_check, p_alpha

        rng = np.random.default_rng(5)
        theta0 = random_band_field(rng, 64, kmax=4, npairs=6, norm=0.5)
        forcing = ForcingSpec((((1, 1), SinusoidProfile(0.05, omega=2.0)),))
        params = SimParams(alpha=0.5, gamma=1.0, nu=0.05, M=64, dt=5e-3, t_end=0.5)
        series = run(theta0, params, forcing, sample_stride=10)
        ps = (1.0, p_alpha(0.5), 2.0, np.inf)
        budget = forcing_lp_samples(forcing, series.t, 64, ps)
        out = lp_monotonicity_check(series, 0.5, forcing_lp=budget)
        assert all(v <= 1e-6 for v in out.values())

    def test_dissipation_factor_table(self):
        params = SimParams(alpha=0.5, gamma=0.5, nu=0.2, M=16, dt=0.25, t_end=1.0)
        tab = dissipation_factor(params)
        w = wavenumbers(16)
        assert tab[0, 0] == 1.0
        assert tab[3, 2] == pytest.approx(math.exp(-0.2 * 0.25 * math.sqrt(13.0)), rel=1e-14)

    def test_csv_roundtrip_of_a_real_run(self, tmp_path):
        from gsqg.diagnostics import DiagnosticSeries

        rng = np.random.default_rng(9)
        theta0 = random_band_field(rng, 32, kmax=4, npairs=6, norm=0.3)
        params = SimParams(alpha=0.5, gamma=1.0, nu=0.05, M=32, dt=0.01, t_end=0.1)
        series = run(theta0, params, sample_stride=2)
        path = tmp_path / "run.csv"
        series.to_csv(path)
        back = DiagnosticSeries.from_csv(path)
        assert np.array_equal(back.res_ham, series.res_ham)
        assert np.array_equal(back.linf, series.linf)
