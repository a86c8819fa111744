import math

import numpy as np
import pytest

from omnibell.criteria import (CRITERIA, ThresholdError, check, check_all, check_full_sphere,
                               check_plane, check_two_setting, threshold)
from omnibell.qcore import DensityMatrix, ghz_noise_mixture, ghz_with_noise
from omnibell.tensorlab import CorrelationTensor, LocalFrame, rotate

from oracles import TMAX_MIXTURE_F1

PLANE_FACTOR = (4 / math.pi) ** 6
SPHERE_FACTOR = 1.5**6

# closed-form crossings: two_setting 32 f^2 / 9 = 1; plane 32 f^2 / 9 = (4/pi)^6 f / 3;
# full sphere 93 f^2 / 9 = (3/2)^6 f t with t = f/3 (largest entry) or the true maximum
F_TWO_SETTING = 3 / math.sqrt(32)
F_PLANE = 3 * PLANE_FACTOR / 32
F_SPHERE_ENTRIES = 3 * SPHERE_FACTOR / 93
F_SPHERE_OPTIMIZED = 9 * SPHERE_FACTOR * TMAX_MIXTURE_F1 / 93


def test_reference_thresholds_follow_from_closed_forms():
    assert round(F_TWO_SETTING, 5) == 0.53033
    assert round(F_PLANE, 6) == 0.399422
    assert round(F_SPHERE_ENTRIES, 5) == 0.36744


class TestTwoSetting:
    def test_boundary(self, mixture_tensor):
        rep = check_two_setting(mixture_tensor(0.53033))
        assert rep.lhs == pytest.approx(1.0, abs=1e-4)
        assert rep.lhs == pytest.approx(32 * 0.53033**2 / 9, abs=1e-9)
        assert rep.rhs == 1.0

    def test_zero_tensor(self):
        rep = check_two_setting(CorrelationTensor.zeros(6))
        assert rep.lhs == 0.0 and not rep.violated

    def test_violated_at_0_6(self, mixture_tensor):
        rep = check_two_setting(mixture_tensor(0.6))
        assert rep.lhs == pytest.approx(1.28, abs=1e-9)
        assert rep.violated
        assert rep.criterion_id == "two_setting"


class TestPlane:
    def test_violated_above_threshold(self, mixture_tensor):
        assert check_plane(mixture_tensor(0.40)).violated

    def test_satisfied_below_threshold(self, mixture_tensor):
        assert not check_plane(mixture_tensor(0.39)).violated

    def test_zero_tensor(self):
        rep = check_plane(CorrelationTensor.zeros(6))
        assert rep.lhs == 0.0 and rep.rhs == 0.0 and not rep.violated

    def test_rhs_uses_in_plane_tmax(self, mixture_tensor):
        rep = check_plane(mixture_tensor(0.5))
        assert rep.rhs == pytest.approx(PLANE_FACTOR * 0.5 / 3, abs=1e-9)
        assert rep.diagnostics["in_plane_tmax"] == pytest.approx(0.5 / 3, abs=1e-9)

    def test_reports_both_maxima(self, mixture_tensor, ghz2_tensor):
        diag = check_plane(mixture_tensor(0.5)).diagnostics
        assert diag["unrestricted_tmax"] == pytest.approx(0.5 * TMAX_MIXTURE_F1, abs=1e-9)
        assert diag["tmax_differs"]
        assert not check_plane(ghz2_tensor).diagnostics["tmax_differs"]

    def test_general_n_exponent(self):
        t = CorrelationTensor(np.diag([1.0, -1.0, 1.0]))
        rep = check_plane(t)
        assert rep.rhs == pytest.approx((4 / math.pi) ** 2 * 1.0, abs=1e-9)


class TestFullSphere:
    @pytest.mark.parametrize("f", [0.36, 0.37])
    def test_lhs_is_93_terms(self, mixture_tensor, f):
        rep = check_full_sphere(mixture_tensor(f))
        assert rep.lhs == pytest.approx(93 * f**2 / 9, abs=1e-12)

    def test_0_37_with_true_tmax_is_not_violated(self, mixture_tensor):
        rep = check_full_sphere(mixture_tensor(0.37))
        assert rep.rhs == pytest.approx(SPHERE_FACTOR * 0.37 * TMAX_MIXTURE_F1, abs=1e-8)
        assert not rep.violated

    def test_0_37_with_largest_entry_is_violated(self, mixture_tensor):
        rep = check_full_sphere(mixture_tensor(0.37), tmax_mode="frame_entries")
        assert rep.lhs == pytest.approx(1.414633, abs=1e-6)
        assert rep.rhs == pytest.approx(1.40484, abs=1e-5)
        assert rep.violated

    def test_0_36_satisfied_either_way(self, mixture_tensor):
        t = mixture_tensor(0.36)
        assert not check_full_sphere(t).violated
        assert not check_full_sphere(t, tmax_mode="frame_entries").violated

    def test_ghz2(self, ghz2_tensor):
        rep = check_full_sphere(ghz2_tensor)
        assert rep.lhs == pytest.approx(3.0, abs=1e-12)
        assert rep.rhs == pytest.approx(2.25, abs=1e-9)
        assert rep.violated

    def test_lhs_frame_independent(self, mixture_tensor):
        t = mixture_tensor(0.8)
        rng = np.random.default_rng(12)
        base = check_full_sphere(t, tmax_mode="frame_entries").lhs
        for _ in range(10):
            rotated = rotate(t, LocalFrame.random(6, rng))
            assert check_full_sphere(rotated, tmax_mode="frame_entries").lhs == \
                pytest.approx(base, abs=1e-9)

    def test_rhs_at_least_largest_entry(self):
        rng = np.random.default_rng(4)
        for n in (2, 3, 4):
            t = CorrelationTensor(rng.uniform(-1, 1, (3,) * n))
            assert check_full_sphere(t).rhs >= 1.5**n * t.max_abs() - 1e-6


class TestReports:
    def test_violation_margin(self):
        # a tensor exactly on the two-setting boundary counts as satisfied
        t = np.zeros((3, 3))
        t[0, 0] = 1.0
        assert not check_two_setting(CorrelationTensor(t)).violated

    def test_sign_flip_invariance(self, mixture_tensor):
        t = mixture_tensor(0.45)
        for a, b in zip(check_all(t), check_all(-t)):
            assert a.lhs == pytest.approx(b.lhs, abs=1e-12)
            assert a.rhs == pytest.approx(b.rhs, abs=1e-9)
            assert a.violated == b.violated

    def test_check_all_order_and_dict(self, mixture_tensor):
        reports = check_all(mixture_tensor(0.55))
        assert [r.criterion_id for r in reports] == list(CRITERIA)
        d = reports[0].to_dict()
        assert set(d) >= {"criterion_id", "lhs", "rhs", "violated"}

    def test_unknown_criterion(self, ghz2_tensor):
        with pytest.raises(ValueError):
            check(ghz2_tensor, "bogus")

    def test_unknown_tmax_mode(self, ghz2_tensor):
        with pytest.raises(ValueError):
            check_full_sphere(ghz2_tensor, tmax_mode="guess")


@pytest.fixture(scope="module")
def thresholds():
    out = {}
    for cid in CRITERIA:
        out[cid] = threshold(ghz_noise_mixture, cid)
    out["full_sphere_entries"] = threshold(ghz_noise_mixture, "full_sphere",
                                           tmax_mode="frame_entries")
    return out


class TestThreshold:
    def test_two_setting(self, thresholds):
        res = thresholds["two_setting"]
        assert res.critical_f == pytest.approx(0.530330, abs=1e-5)
        assert res.critical_f == pytest.approx(F_TWO_SETTING, abs=1e-9)
        assert res.method == "closed_form"

    def test_plane(self, thresholds):
        res = thresholds["plane"]
        assert res.critical_f == pytest.approx(0.399422, abs=1e-5)
        assert res.critical_f == pytest.approx(F_PLANE, abs=1e-9)

    def test_full_sphere_with_true_tmax(self, thresholds):
        assert thresholds["full_sphere"].critical_f == pytest.approx(F_SPHERE_OPTIMIZED,
                                                                     abs=1e-8)

    def test_full_sphere_with_largest_entry(self, thresholds):
        res = thresholds["full_sphere_entries"]
        assert res.critical_f == pytest.approx(0.367439, abs=1e-5)
        assert res.tmax_mode == "frame_entries"

    def test_orderings(self, thresholds):
        # reading T_max off the entries gives the strength hierarchy
        # full_sphere < plane < two_setting; with the true maximum the
        # full-sphere threshold moves above the plane one
        two, plane = thresholds["two_setting"].critical_f, thresholds["plane"].critical_f
        assert thresholds["full_sphere_entries"].critical_f < plane < two
        assert plane < thresholds["full_sphere"].critical_f < two

    @pytest.mark.parametrize("cid", CRITERIA)
    def test_bracket_and_sides(self, thresholds, cid):
        res = thresholds[cid]
        lo, hi = res.bracket
        assert hi - lo <= 1e-6 and lo <= res.critical_f <= hi
        below = check(CorrelationTensor(
            _mixture_values(res.critical_f - 1e-4)), cid)
        above = check(CorrelationTensor(_mixture_values(res.critical_f + 1e-4)), cid)
        assert not below.violated and above.violated

    def test_bisection_path(self):
        # tensor quadratic in f: not linear, so bisection runs; crossing at f^2 = 3/4
        family = lambda f: ghz_with_noise(f * f, 2)  # noqa: E731
        res = threshold(family, "full_sphere")
        assert res.method == "bisection"
        assert res.critical_f == pytest.approx(math.sqrt(0.75), abs=1e-6)
        assert res.bracket[1] - res.bracket[0] <= 1e-6

    def test_non_monotone_family(self):
        family = lambda f: ghz_with_noise(1 - abs(2 * f - 1), 2)  # noqa: E731
        with pytest.raises(ThresholdError):
            threshold(family, "full_sphere")

    def test_never_violated(self):
        res = threshold(lambda f: DensityMatrix.maximally_mixed(3), "plane")
        assert res.flag == "never_violated" and res.critical_f == 1.0

    def test_unknown_criterion(self):
        with pytest.raises(ValueError):
            threshold(ghz_noise_mixture, "nope")

    def test_to_dict_fields(self, thresholds):
        d = thresholds["plane"].to_dict()
        assert set(d) >= {"criterion_id", "critical_f", "bracket", "seed"}


_CACHE = {}


def _mixture_values(f):
    if f not in _CACHE:
        from omnibell.tensorlab import correlation_tensor
        _CACHE[f] = correlation_tensor(ghz_noise_mixture(f)).values
    return _CACHE[f]
