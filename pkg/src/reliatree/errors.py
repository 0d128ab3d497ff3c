"""Exception types shared across the engine."""


class InputError(ValueError):
    """Invalid user-supplied input: model documents, netlists, traces, flags."""


class ModelError(InputError):
    """System description failed structural validation."""


class NetlistParseError(InputError):
    """Netlist text rejected; message carries the offending line number(s)."""


class StageError(RuntimeError):
    """A pipeline stage failed; names the component and stage."""

    def __init__(self, component_id: str, stage: str, cause: BaseException):
        super().__init__(f"component {component_id!r}, stage {stage!r}: {cause}")
        self.component_id = component_id
        self.stage = stage
