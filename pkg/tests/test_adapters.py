import numpy as np
import pytest

from reliatree.adapters import (
    Adapter,
    ComponentContext,
    Measure,
    adapter_from_json,
    adapter_to_json,
    apply_adapter,
    apply_chain,
    chain_end_tag,
    combine_competing_risks,
)
from reliatree.aging import AgingParams, black_mttf, weibull_from_mttf
from reliatree.errors import InputError
from reliatree.reliability import Exponential, Product, constant_one, mttf, reliability_at
from reliatree.thermal import PowerTrace, ThermalParams

AGING = AgingParams(1.0e6, 1.0e6, 2.0, 0.7, 2.0)
# Start at the steady state so the profile is flat at 320 K.
THERMAL = ThermalParams(2.0, 5.0, 300.0, 320.0)
CTX = ComponentContext("pu1", THERMAL, AGING)

PERMANENT_CHAIN = (
    Adapter("PowerToTemperature"),
    Adapter("TemperatureToFailureRate"),
    Adapter("FailureRateToReliability"),
)


class TestUnitBridge:
    def test_seconds_to_hours(self):
        bridge = Adapter("TimeUnitBridge", {"from": "seconds", "to": "hours"})
        m = Measure("FailureRate", 1e-3 / 3600.0, "seconds")
        out = apply_adapter(bridge, m)
        assert out.payload == pytest.approx(1.0e-3, rel=1e-12)
        assert out.time_unit == "hours"

    def test_round_trip_is_identity(self):
        to_hours = Adapter("TimeUnitBridge", {"from": "seconds", "to": "hours"})
        to_seconds = Adapter("TimeUnitBridge", {"from": "hours", "to": "seconds"})
        m = Measure("FailureRate", 2.777e-7, "seconds")
        back = apply_adapter(to_seconds, apply_adapter(to_hours, m))
        assert back.payload == pytest.approx(2.777e-7, rel=1e-15)
        assert back.time_unit == "seconds"

    def test_unit_mismatch_rejected(self):
        bridge = Adapter("TimeUnitBridge", {"from": "seconds", "to": "hours"})
        with pytest.raises(InputError):
            apply_adapter(bridge, Measure("FailureRate", 1.0, "hours"))


class TestDispatch:
    def test_fit_to_reliability_zero(self):
        out = apply_adapter(Adapter("FitToReliability"), Measure("FitRate", 0.0, "hours"))
        assert out.tag == "Reliability"
        assert reliability_at(out.payload, 1e8) == 1.0

    def test_fit_to_reliability_scales_by_1e9(self):
        out = apply_adapter(Adapter("FitToReliability"), Measure("FitRate", 1000.0, "hours"))
        assert isinstance(out.payload, Exponential)
        assert out.payload.lam == pytest.approx(1e-6)

    def test_tag_mismatch_rejected(self):
        with pytest.raises(InputError):
            apply_adapter(Adapter("PowerToTemperature"), Measure("FitRate", 1.0, "hours"))

    def test_missing_context_rejected(self):
        trace = PowerTrace("c", 1.0, (1.0, 2.0))
        with pytest.raises(InputError):
            apply_adapter(
                Adapter("PowerToTemperature"), Measure("PowerTrace", trace, "seconds")
            )

    def test_combine_kind_needs_two_measures(self):
        m = Measure("Reliability", Exponential(1.0), "hours")
        with pytest.raises(InputError):
            apply_adapter(Adapter("CompetingRisksCombine"), m)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            Adapter("Teleport")


class TestPermanentChain:
    def test_reproduces_hand_composed_closed_form(self):
        # Constant 10 W from the steady state: flat 320 K profile, so the
        # chain must equal weibull_from_mttf(black_mttf(320), beta).
        trace = PowerTrace("pu1", 1.0, (10.0,) * 16)
        out = apply_chain(PERMANENT_CHAIN, Measure("PowerTrace", trace, "seconds"), CTX)
        assert out.tag == "Reliability"
        expected = weibull_from_mttf(black_mttf(320.0, AGING), AGING.weibull_beta)
        for t in np.linspace(0.0, 2e5, 41):
            assert reliability_at(out.payload, float(t)) == pytest.approx(
                reliability_at(expected, float(t)), abs=1e-9
            )

    def test_chain_end_tag_checks(self):
        tag, mismatch = chain_end_tag("PowerTrace", PERMANENT_CHAIN)
        assert tag == "Reliability" and mismatch is None
        tag, mismatch = chain_end_tag("TemperatureProfile", PERMANENT_CHAIN)
        assert tag is None and mismatch == ("PowerTrace", "TemperatureProfile")
        tag, mismatch = chain_end_tag("TemperatureProfile", PERMANENT_CHAIN[1:])
        assert tag == "Reliability" and mismatch is None
        tag, mismatch = chain_end_tag("TemperatureProfile", ())
        assert tag == "TemperatureProfile"


class TestCombine:
    def test_identity_factor(self):
        r = Exponential(1e-4)
        combined = combine_competing_risks(r, constant_one())
        for t in (0.0, 100.0, 1e4, 3e5):
            assert reliability_at(combined, t) == reliability_at(r, t)

    def test_rate_addition(self):
        combined = combine_competing_risks(Exponential(1e-4), Exponential(4e-4))
        target = Exponential(5e-4)
        for t in (0.0, 123.0, 9999.0):
            assert reliability_at(combined, t) == pytest.approx(
                reliability_at(target, t), abs=1e-12
            )
        assert mttf(combined) == pytest.approx(2000.0, rel=1e-3)

    def test_domination(self):
        a = Exponential(2e-4)
        b = combine_competing_risks(Exponential(1e-4), Exponential(3e-4))
        combined = combine_competing_risks(a, b)
        for t in np.linspace(0.0, 2e4, 33):
            va = reliability_at(a, float(t))
            vb = reliability_at(b, float(t))
            assert reliability_at(combined, float(t)) <= min(va, vb) + 1e-12

    def test_grouping_and_order_equivalence(self):
        x, y, z = Exponential(1e-4), Exponential(2e-4), Exponential(3e-4)
        left = combine_competing_risks(combine_competing_risks(x, y), z)
        right = combine_competing_risks(x, combine_competing_risks(y, z))
        swapped = combine_competing_risks(z, combine_competing_risks(y, x))
        for t in np.linspace(0.0, 3e4, 17):
            v = reliability_at(left, float(t))
            assert reliability_at(right, float(t)) == pytest.approx(v, abs=1e-15)
            assert reliability_at(swapped, float(t)) == pytest.approx(v, abs=1e-15)

    def test_returns_product_form(self):
        combined = combine_competing_risks(Exponential(1.0), Exponential(2.0))
        assert isinstance(combined, Product)
        assert len(combined.factors) == 2


class TestJsonForm:
    def test_bare_name(self):
        a = adapter_from_json("FitToReliability")
        assert a == Adapter("FitToReliability")
        assert adapter_to_json(a) == "FitToReliability"

    def test_object_with_params(self):
        obj = {"kind": "TimeUnitBridge", "params": {"from": "seconds", "to": "hours"}}
        a = adapter_from_json(obj)
        assert a.params["from"] == "seconds"
        assert adapter_to_json(a) == obj

    @pytest.mark.parametrize("obj", [{"kind": "Nope"}, {"type": "FitToReliability"}, 7])
    def test_rejects_malformed(self, obj):
        with pytest.raises(InputError):
            adapter_from_json(obj)
