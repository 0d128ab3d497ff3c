"""Cross-layer reliability analysis: per-component permanent-fault
(power -> temperature -> wear-out) and transient-fault (fault injection ->
soft error rate) analyses composed through adapters and a success tree
into system-level reliability curves, MTTF, and a fault-type dominance
ratio.
"""

from .adapters import (
    Adapter,
    ComponentContext,
    Measure,
    apply_adapter,
    apply_chain,
    combine_competing_risks,
)
from .aging import (
    AgingParams,
    PermanentFaultResult,
    black_mttf,
    failure_rate_from_profile,
    weibull_from_mttf,
)
from .curves import (
    ComponentReliability,
    McCurve,
    SystemCurves,
    monte_carlo_system,
    system_reliability_curves,
    write_curves_csv,
)
from .errors import InputError, ModelError, NetlistParseError, StageError
from .model import (
    AdapterChains,
    ComponentPayload,
    HierarchyNode,
    SystemModel,
    check_measure_compatibility,
    dump_system,
    load_system,
    load_system_file,
)
from .pipeline import (
    PipelineOptions,
    PipelineResult,
    run_pipeline,
    write_outputs,
)
from .reliability import (
    Exponential,
    Product,
    ReliabilityFunction,
    Sampled,
    Weibull,
    constant_one,
    mttf,
    reliability_at,
)
from .softerror import (
    InjectionResult,
    Netlist,
    SerParams,
    evaluate,
    exhaustive_derating,
    exponential_reliability,
    inject_campaign,
    parse_netlist,
    transient_failure_rate,
    wilson_interval,
)
from .successtree import (
    AndGate,
    BasicEvent,
    Gate,
    KofNGate,
    OrGate,
    basic_events,
    brute_force_probability,
    tree_probability,
)
from .thermal import (
    PowerTrace,
    TemperatureProfile,
    ThermalParams,
    simulate_temperature,
    steady_state_temperature,
)

__version__ = "0.1.0"
