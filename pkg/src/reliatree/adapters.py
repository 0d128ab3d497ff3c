"""Measure adapters between adjacent reliability levels.

Adapters are declarative records: each kind has a fixed input and output
measure tag, so a chain's end-to-end signature can be checked statically
before any analysis runs. Applying an adapter dispatches to the owning
analysis module; adapters never carry user code.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from . import aging as aging_mod
from . import thermal as thermal_mod
from .errors import InputError
from .reliability import Product, ReliabilityFunction
from .softerror import PER_HOUR_PER_FIT, exponential_reliability

__all__ = [
    "MEASURE_TAGS",
    "ADAPTER_SIGNATURES",
    "Measure",
    "Adapter",
    "ComponentContext",
    "adapter_from_json",
    "adapter_to_json",
    "apply_adapter",
    "apply_chain",
    "chain_end_tag",
    "combine_competing_risks",
    "SECONDS_PER_HOUR",
]

SECONDS_PER_HOUR = 3600.0

MEASURE_TAGS = (
    "PowerTrace",
    "TemperatureProfile",
    "FailureRate",
    "FitRate",
    "Derating",
    "Reliability",
)

# kind -> (input tag, output tag)
ADAPTER_SIGNATURES = {
    "PowerToTemperature": ("PowerTrace", "TemperatureProfile"),
    "TemperatureToFailureRate": ("TemperatureProfile", "FailureRate"),
    "FailureRateToReliability": ("FailureRate", "Reliability"),
    "FitToReliability": ("FitRate", "Reliability"),
    "TimeUnitBridge": ("FailureRate", "FailureRate"),
    "CompetingRisksCombine": ("Reliability", "Reliability"),
}

_TIME_UNITS = ("seconds", "hours")


@dataclass(frozen=True)
class Measure:
    tag: str
    payload: object
    time_unit: str = "hours"

    def __post_init__(self):
        if self.tag not in MEASURE_TAGS:
            raise ValueError(f"unknown measure tag {self.tag!r}")
        if self.time_unit not in _TIME_UNITS:
            raise ValueError(f"unknown time unit {self.time_unit!r}")
        if self.tag == "FailureRate" and not self.payload > 0:
            raise ValueError(f"failure rate must be positive, got {self.payload!r}")
        if self.tag == "FitRate" and self.payload < 0:
            raise ValueError(f"FIT rate must be nonnegative, got {self.payload!r}")
        if self.tag == "Derating" and not 0.0 <= self.payload <= 1.0:
            raise ValueError(f"derating must lie in [0,1], got {self.payload!r}")


@dataclass(frozen=True)
class Adapter:
    kind: str
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ADAPTER_SIGNATURES:
            raise ValueError(f"unknown adapter kind {self.kind!r}")

    @property
    def input_tag(self) -> str:
        return ADAPTER_SIGNATURES[self.kind][0]

    @property
    def output_tag(self) -> str:
        return ADAPTER_SIGNATURES[self.kind][1]


@dataclass(frozen=True)
class ComponentContext:
    """Analysis inputs an adapter may need when applied on a component edge."""

    component_id: str = ""
    thermal: Optional[thermal_mod.ThermalParams] = None
    aging: Optional[aging_mod.AgingParams] = None


def adapter_from_json(entry) -> Adapter:
    """Accept either a bare kind name or {'kind': ..., 'params': {...}}."""
    if isinstance(entry, str):
        kind, params = entry, {}
    elif isinstance(entry, dict):
        extra = set(entry) - {"kind", "params"}
        if extra:
            raise InputError(f"unknown adapter fields: {sorted(extra)}")
        kind = entry.get("kind")
        params = entry.get("params", {})
        if not isinstance(params, dict):
            raise InputError("adapter 'params' must be an object")
    else:
        raise InputError(f"adapter entry must be a name or object, got {entry!r}")
    try:
        return Adapter(kind, dict(params))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def adapter_to_json(adapter: Adapter):
    if adapter.params:
        return {"kind": adapter.kind, "params": dict(adapter.params)}
    return adapter.kind


def _need(context: Optional[ComponentContext], attr: str, kind: str):
    value = getattr(context, attr, None) if context is not None else None
    if value is None:
        raise InputError(f"adapter {kind} needs component {attr} parameters")
    return value


def apply_adapter(
    adapter: Adapter, measure: Measure, context: Optional[ComponentContext] = None
) -> Measure:
    """Transform one measure; the tag must match the adapter's input tag."""
    if measure.tag != adapter.input_tag:
        raise InputError(
            f"adapter {adapter.kind} expects {adapter.input_tag}, got {measure.tag}"
        )
    kind = adapter.kind
    if kind == "PowerToTemperature":
        params = _need(context, "thermal", kind)
        profile = thermal_mod.simulate_temperature(measure.payload, params)
        return Measure("TemperatureProfile", profile, "seconds")
    if kind == "TemperatureToFailureRate":
        params = _need(context, "aging", kind)
        lam = aging_mod.failure_rate_from_profile(measure.payload, params)
        return Measure("FailureRate", lam, "hours")
    if kind == "FailureRateToReliability":
        params = _need(context, "aging", kind)
        if measure.time_unit != "hours":
            raise InputError(
                "FailureRateToReliability needs an hourly rate; bridge units first"
            )
        lam = measure.payload
        if not lam > 0:
            raise InputError(f"failure rate must be positive, got {lam!r}")
        rf = aging_mod.weibull_from_mttf(1.0 / lam, params.weibull_beta)
        return Measure("Reliability", rf, "hours")
    if kind == "FitToReliability":
        fit = measure.payload
        if fit < 0:
            raise InputError(f"effective FIT must be nonnegative, got {fit!r}")
        return Measure("Reliability", exponential_reliability(fit * PER_HOUR_PER_FIT), "hours")
    if kind == "TimeUnitBridge":
        src = adapter.params.get("from", measure.time_unit)
        dst = adapter.params.get("to", "hours")
        if src not in _TIME_UNITS or dst not in _TIME_UNITS:
            raise InputError(f"TimeUnitBridge units must be in {_TIME_UNITS}")
        if measure.time_unit != src:
            raise InputError(
                f"TimeUnitBridge expects a rate in {src}, got {measure.time_unit}"
            )
        rate = measure.payload
        if src == dst:
            return Measure(measure.tag, rate, dst)
        factor = SECONDS_PER_HOUR if (src, dst) == ("seconds", "hours") else 1.0 / SECONDS_PER_HOUR
        return Measure(measure.tag, rate * factor, dst)
    # CompetingRisksCombine merges two reliability measures and cannot be
    # applied to a single one.
    raise InputError("CompetingRisksCombine takes two measures; use combine_competing_risks")


def apply_chain(
    chain: Sequence[Adapter], measure: Measure, context: Optional[ComponentContext] = None
) -> Measure:
    for adapter in chain:
        measure = apply_adapter(adapter, measure, context)
    return measure


def chain_end_tag(start_tag: str, chain: Sequence[Adapter]):
    """Resulting tag of a chain, or the first (expected, found) mismatch."""
    tag = start_tag
    for adapter in chain:
        if adapter.input_tag != tag:
            return None, (adapter.input_tag, tag)
        tag = adapter.output_tag
    return tag, None


def combine_competing_risks(
    r_perm: ReliabilityFunction, r_trans: ReliabilityFunction
) -> ReliabilityFunction:
    """Independent competing failure modes: survival is the product."""
    return Product((r_perm, r_trans))
