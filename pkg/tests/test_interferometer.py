import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import expm_taylor
from twinatom import interferometer as ifm
from twinatom import spinops, twinstate
from twinatom.errors import DegenerateStateError, FitFailureError, InvalidArgumentError

PI = math.pi
phases_st = st.floats(0, 2 * PI)
lam_st = st.floats(0, 1)


def sided_ket(s1, m1, s2, m2):
    return np.kron(ifm.atom_ket(s1, m1), ifm.atom_ket(s2, m2))


L, R = ifm.Side.LEFT, ifm.Side.RIGHT


class TestStates:
    def test_initial_state_trace_and_symmetry(self):
        rho = ifm.initial_state(0.3)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-15)
        x = ifm.joint_exchange_operator()
        np.testing.assert_allclose(x @ rho, rho @ x, atol=1e-15)

    @pytest.mark.parametrize("lam", [0.0, 0.4, 1.0])
    def test_partial_trace_recovers_rho0(self, lam):
        # brute-force partial trace by explicit index loops
        rho = ifm.initial_state(lam).reshape(2, 3, 2, 3, 2, 3, 2, 3)
        red = np.zeros((3, 3, 3, 3), dtype=complex)
        for a in range(2):
            for b in range(2):
                red += rho[a, :, b, :, a, :, b, :]
        np.testing.assert_allclose(red.reshape(9, 9), twinstate.rho0(lam), atol=1e-15)
        np.testing.assert_allclose(ifm.partial_trace_sides(ifm.initial_state(lam)), twinstate.rho0(lam))

    def test_initial_state_rejects_lambda(self):
        with pytest.raises(InvalidArgumentError):
            ifm.initial_state(1.5)

    def test_one_atom_per_side(self):
        rho = ifm.initial_state(0.5)
        same_side = sided_ket(L, 0, L, 0)
        assert abs(same_side @ rho @ same_side) < 1e-15

    def test_detection_state(self):
        det = ifm.detection_state()
        assert np.linalg.norm(det) == pytest.approx(1.0)
        np.testing.assert_allclose(ifm.joint_exchange_operator() @ det, det)
        assert np.vdot(sided_ket(L, 1, R, -1), det).real == pytest.approx(1 / math.sqrt(2))


class TestDevices:
    def test_polarizer_projector(self):
        p = ifm.polarizer_operator()
        np.testing.assert_array_equal(p @ p, p)
        np.testing.assert_array_equal(p, p.T)
        assert np.trace(p) == 16

    def test_polarizer_filters(self):
        p = ifm.polarizer_operator()
        for other in [(L, 1), (L, 0), (R, 0), (R, -1)]:
            np.testing.assert_array_equal(p @ sided_ket(R, -1, *other), 0)
            np.testing.assert_array_equal(p @ sided_ket(L, 1, *other), 0)
        v = sided_ket(R, 1, L, -1)
        np.testing.assert_array_equal(p @ v, v)

    def test_phase_object_identity(self):
        np.testing.assert_allclose(ifm.phase_object_operator((0.0, 0.0)), np.eye(36), atol=1e-15)

    def test_phase_object_unitary(self):
        o = ifm.phase_object_operator((0.7, 2.1))
        np.testing.assert_allclose(o @ o.conj().T, np.eye(36), atol=1e-14)

    def test_phase_object_blocks(self):
        o = ifm.single_phase_object((0.7, 2.1))
        np.testing.assert_allclose(o[3:, 3:], expm_taylor(2.1j * spinops.f_x()), atol=1e-13)
        np.testing.assert_allclose(o[:3, :3], expm_taylor(0.7j * spinops.f_x()), atol=1e-13)
        np.testing.assert_array_equal(o[:3, 3:], 0)
        d = spinops.axis_rotation
        via_fz = d(-PI / 2) @ np.diag(np.exp(2.1j * np.array([1, 0, -1]))) @ d(PI / 2)
        np.testing.assert_allclose(o[3:, 3:], via_fz, atol=1e-14)

    @given(phases_st, phases_st)
    def test_exchange_commutes(self, a, b):
        x = ifm.joint_exchange_operator()
        for m in (ifm.polarizer_operator(), ifm.phase_object_operator((a, b))):
            np.testing.assert_allclose(x @ m, m @ x, atol=1e-12)

    def test_phase_settings(self):
        with pytest.raises(InvalidArgumentError):
            ifm.PhaseSettings(math.nan, 0.0)
        assert ifm.PhaseSettings(-PI / 2, 7.0).canonical() == pytest.approx(
            ifm.PhaseSettings(3 * PI / 2, 7.0 - 2 * PI)
        )


class TestEvolution:
    @pytest.mark.parametrize("lam", np.linspace(0, 1, 5))
    def test_survival_two_thirds(self, lam):
        assert ifm.evolve(lam, (1.0, 2.0)).survival == pytest.approx(2 / 3, abs=1e-15)

    def test_identity_phase_object(self):
        p = ifm.polarizer_operator()
        rho = ifm.initial_state(0.6)
        expected = p @ rho @ p / (2 / 3)
        np.testing.assert_allclose(np.diag(ifm.evolve(0.6, (0, 0)).rho), np.diag(expected), atol=1e-15)

    def test_output_is_physical(self):
        report = twinstate.is_physical_density(ifm.evolve(0.5, (PI / 2, 1.0)).rho)
        assert report.physical, report

    def test_coincidence_self_projection(self):
        det = ifm.detection_state()
        assert ifm.coincidence(np.outer(det, det.conj())) == pytest.approx(1.0)

    @pytest.mark.parametrize("lam", [0.0, 0.5, 1.0])
    def test_coincidence_without_devices(self, lam):
        # psi1 with one atom per side already contains |L,+1; R,-1>: weight 2/3 * 1/2
        assert ifm.coincidence(ifm.initial_state(lam)) == pytest.approx(1 / 3, abs=1e-15)

    def test_coincidence_after_polarizer_only(self):
        assert abs(ifm.signal(0.8, (0.0, 0.0))) < 1e-15

    def test_coincidence_linear(self):
        r1, r2 = ifm.initial_state(0.2), ifm.evolve(0.9, (1.0, 2.0)).rho
        a, b = 0.3, 1.7
        assert ifm.coincidence(a * r1 + b * r2) == pytest.approx(
            a * ifm.coincidence(r1) + b * ifm.coincidence(r2), abs=1e-15
        )


class TestSignal:
    @pytest.mark.parametrize("lam", [0.0, 0.5, 1.0])
    def test_zero_at_phi_r_zero(self, lam):
        assert abs(ifm.signal(lam, (PI / 2, 0.0))) < 1e-15

    def test_incoherent_peaks_equal(self):
        ratio = ifm.signal(0, (PI / 2, PI / 2)) / ifm.signal(0, (PI / 2, 3 * PI / 2))
        assert ratio == pytest.approx(1.0, abs=1e-12)

    def test_coherent_peak_ratio(self):
        ratio = ifm.signal(1, (PI / 2, PI / 2)) / ifm.signal(1, (PI / 2, 3 * PI / 2))
        assert ratio == pytest.approx(9.0, rel=1e-12)

    def test_analytic_values(self):
        assert ifm.analytic_signal(0, PI / 2, PI / 2) == pytest.approx(1.25, abs=1e-15)
        assert ifm.analytic_signal(1, PI / 2, 3 * PI / 2) == pytest.approx(0.25, abs=1e-15)
        # sin^2(pi/4) * sin^2(pi/2) * (0 + 0 - 3 + 5) = 1/2 * 2
        for lam in (0.0, 0.3, 1.0):
            assert ifm.analytic_signal(lam, PI / 2, PI) == pytest.approx(1.0, abs=1e-15)
        assert ifm.analytic_signal(0.4, 1.0, 2.0, C=3.0) == pytest.approx(
            3 * ifm.analytic_signal(0.4, 1.0, 2.0)
        )

    @settings(max_examples=50)
    @given(lam_st, phases_st, phases_st)
    def test_pipeline_matches_closed_form(self, lam, a, b):
        ref = ifm.analytic_signal(lam, a, b)
        assert ifm.signal(lam, (a, b)) == pytest.approx(ref / 8, abs=1e-14)

    @settings(max_examples=50)
    @given(lam_st, phases_st, phases_st)
    def test_vectorised_matches_pipeline(self, lam, a, b):
        assert ifm.signal_many(lam, a, b) == pytest.approx(ifm.signal(lam, (a, b)), abs=1e-14)

    def test_signal_many_shape(self):
        out = ifm.signal_many(0.5, np.zeros((3, 1)), np.linspace(0, 1, 4))
        assert out.shape == (3, 4)

    def test_left_right_symmetry(self):
        rng = np.random.default_rng(11)
        for a, b, lam in zip(*rng.uniform(0, 2 * PI, (2, 50)), rng.uniform(0, 1, 50)):
            assert ifm.signal(lam, (a, b)) == pytest.approx(ifm.signal(lam, (b, a)), abs=1e-12)

    def test_non_negative(self):
        grid = ifm.phase_grid(128)
        for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
            assert ifm.signal_many(lam, grid[:, None], grid[None, :]).min() >= -1e-12

    def test_monotone_asymmetry(self):
        values = []
        for lam in np.linspace(0, 1, 11):
            i1 = ifm.signal(lam, (PI / 2, PI / 2))
            i2 = ifm.signal(lam, (PI / 2, 3 * PI / 2))
            values.append(ifm.asymmetry(i1, i2))
            assert values[-1] == pytest.approx(0.8 * lam, abs=1e-10)
        assert np.all(np.diff(values) > 0)


class TestOverlap:
    @pytest.mark.parametrize("phi_r", [0.0, PI])
    def test_orthogonal(self, phi_r):
        assert ifm.evolved_overlap((PI / 2, phi_r)) < 1e-10

    def test_orthogonal_everywhere(self):
        # P is diagonal in m_z and O unitary, so orthogonality is never lost
        vals = [ifm.evolved_overlap((PI / 2, r)) for r in ifm.phase_grid(64)]
        assert max(vals) < 1e-12

    def test_in_unit_interval(self):
        rng = np.random.default_rng(3)
        for a, b in rng.uniform(0, 2 * PI, (100, 2)):
            assert 0.0 <= ifm.evolved_overlap((a, b)) <= 1.0

    def test_visibility_vanishes_at_pi(self):
        assert ifm.coincidence_visibility((PI / 2, PI)) < 1e-12

    def test_visibility_at_quarter_turns(self):
        # equals the peak asymmetry factor 4/5 at the canonical angles
        assert ifm.coincidence_visibility((PI / 2, PI / 2)) == pytest.approx(0.8, abs=1e-12)
        assert ifm.coincidence_visibility((PI / 2, 3 * PI / 2)) == pytest.approx(0.8, abs=1e-12)

    def test_visibility_small_phase_limit(self):
        assert ifm.coincidence_visibility((PI / 2, 1e-6)) < 1e-5

    def test_visibility_maximum(self):
        # closed-form ratio 4 sin r / (3 cos r + 5) peaks at cos r = -3/5 with value 1
        grid = np.linspace(0.05, PI - 0.05, 400)
        vals = [ifm.coincidence_visibility((PI / 2, r)) for r in grid]
        k = int(np.argmax(vals))
        assert grid[k] == pytest.approx(math.acos(-0.6), abs=0.01)
        assert vals[k] == pytest.approx(1.0, abs=1e-4)

    def test_visibility_degenerate(self):
        with pytest.raises(DegenerateStateError):
            ifm.coincidence_visibility((PI / 2, 0.0))


class TestScan:
    grid = ifm.phase_grid(512)

    def test_normalization(self):
        result = ifm.scan(0.3, PI / 2, self.grid)
        assert result.normalization == pytest.approx(0.125, rel=1e-12)
        assert len(result) == 512

    @pytest.mark.parametrize(
        "grid", [[], [1.0, 1.0], [0.5, 0.2], [-0.1, 1.0], [0.0, 7.0], [[0.0, 1.0]]]
    )
    def test_grid_validation(self, grid):
        with pytest.raises(InvalidArgumentError):
            ifm.scan(0.5, PI / 2, grid)

    def test_incoherent_two_equal_peaks(self):
        first, second = ifm.lobe_peaks(ifm.scan(0, PI / 2, self.grid))
        assert first.height == pytest.approx(second.height, rel=1e-9)
        # lobes are mirror images about pi
        assert first.position + second.position == pytest.approx(2 * PI, abs=1e-9)

    def test_coherent_second_lobe_displaced(self):
        res = ifm.scan(1, PI / 2, self.grid)
        maxima = ifm.local_maxima(res.intensity)
        second = maxima[res.phi_r[maxima] > PI]
        argmax = res.phi_r[second[np.argmax(res.intensity[second])]]
        assert argmax > 3 * PI / 2
        assert ifm.lobe_peaks(res)[1].position > 3 * PI / 2

    def test_coherent_curve_falls_through_pi(self):
        res = ifm.scan(1, PI / 2, self.grid)
        assert not np.any(np.abs(res.phi_r[ifm.local_maxima(res.intensity)] - PI) < 0.1)

    def test_partial_suppression(self):
        heights = [ifm.lobe_peaks(ifm.scan(l, PI / 2, self.grid))[1].height for l in (0, 0.5, 1)]
        assert heights[0] > heights[1] > heights[2]

    def test_refine_peak_exact_on_parabola(self):
        x = np.linspace(0, 1, 11)
        y = 2.0 - 3.0 * (x - 0.437) ** 2
        peak = ifm.refine_peak(x, y, int(np.argmax(y)))
        assert peak.position == pytest.approx(0.437, abs=1e-12)
        assert peak.height == pytest.approx(2.0, abs=1e-12)

    def test_refine_peak_at_edge(self):
        x = np.arange(4.0)
        assert ifm.refine_peak(x, x, 3) == (3.0, 3.0)


class TestEstimation:
    def test_ratio_symmetric(self):
        assert ifm.estimate_lambda_from_ratio(2.0, 2.0) == (0.0, False)

    def test_ratio_nine(self):
        est = ifm.estimate_lambda_from_ratio(9.0, 1.0)
        assert est.lam == pytest.approx(1.0, abs=1e-15)

    def test_ratio_seven_three(self):
        i1 = ifm.analytic_signal(0.5, PI / 2, PI / 2)
        i2 = ifm.analytic_signal(0.5, PI / 2, 3 * PI / 2)
        assert i1 / i2 == pytest.approx(7 / 3)
        assert ifm.estimate_lambda_from_ratio(7.0, 3.0).lam == pytest.approx(0.5, abs=1e-15)

    def test_ratio_clamps(self):
        assert ifm.estimate_lambda_from_ratio(20.0, 1.0) == (1.0, True)
        assert ifm.estimate_lambda_from_ratio(1.0, 2.0) == (0.0, True)

    @pytest.mark.parametrize("pair", [(0.0, 1.0), (1.0, -1.0)])
    def test_ratio_rejects(self, pair):
        with pytest.raises(InvalidArgumentError):
            ifm.estimate_lambda_from_ratio(*pair)

    @pytest.mark.parametrize("lam", [0.0, 0.3, 0.7, 1.0])
    def test_fit_round_trip(self, lam):
        fit = ifm.fit_lambda(ifm.scan(lam, PI / 2, ifm.phase_grid(512)))
        assert fit.lam == pytest.approx(lam, abs=1e-8)
        assert fit.C == pytest.approx(0.125, rel=1e-10)
        assert fit.residual < 1e-16

    def test_fit_other_left_phase(self):
        fit = ifm.fit_lambda(ifm.scan(0.42, 2.0, ifm.phase_grid(64)))
        assert fit.lam == pytest.approx(0.42, abs=1e-8)

    def test_fit_noisy_calibration(self):
        # observed with this seed: every estimate >= 0.993, median 0.9999
        grid = ifm.phase_grid(512)
        clean = ifm.scan(1.0, PI / 2, grid)
        rng = np.random.default_rng(20261019)
        estimates = []
        for _ in range(100):
            noisy = clean.intensity * (1 + 0.05 * rng.standard_normal(grid.size))
            estimates.append(ifm.fit_lambda(ifm.ScanResult(PI / 2, 1.0, grid, noisy, np.nan)).lam)
        assert min(estimates) >= 0.9
        assert np.median(estimates) >= 0.99

    def test_fit_degenerate(self):
        grid = ifm.phase_grid(16)
        with pytest.raises(FitFailureError):
            ifm.fit_lambda(ifm.ScanResult(PI / 2, 0.0, grid, np.zeros(16), np.nan))

    def test_fit_too_few_points(self):
        with pytest.raises(InvalidArgumentError):
            ifm.fit_lambda(ifm.scan(0.5, PI / 2, ifm.phase_grid(7)))
