#!/usr/bin/env python3
"""
Error hierarchy for the toolkit.
Every error is a ValueError carrying a machine-readable code that the CLI reports.
"""


class ToolkitError(ValueError):
    """Base class for all toolkit errors."""
    code = "toolkit_error"

    def to_json(self) -> dict:
        return {"code": self.code, "message": str(self)}


class DivisionByZeroError(ToolkitError, ZeroDivisionError):
    code = "division_by_zero"


class SingularMatrixError(ToolkitError):
    code = "singular_matrix"


class ParseError(ToolkitError):
    code = "parse_error"


class ConfigError(ToolkitError):
    code = "config_error"


class WeightsError(ToolkitError):
    code = "invalid_weights"


class NonOrbifoldError(WeightsError):
    code = "non_orbifold"


class NonGorensteinError(WeightsError):
    code = "non_gorenstein"


class FanError(ToolkitError):
    code = "invalid_fan"


class RayError(FanError):
    code = "invalid_ray"


class RefinementError(FanError):
    code = "not_a_refinement"


class UnsupportedFamilyError(ToolkitError):
    code = "unsupported_family"


class NonArtinianError(ToolkitError):
    code = "non_artinian"


class GroebnerError(ToolkitError):
    code = "groebner_failure"


class CalibrationError(ToolkitError):
    code = "inconsistent_calibration"


class ChainPatternError(ToolkitError):
    code = "chain_pattern"


class PoleError(ToolkitError):
    code = "pole"


class UnsupportedEvaluationError(ToolkitError):
    code = "unsupported_evaluation"


class RelationViolationError(ToolkitError):
    code = "relation_violation"

    def __init__(self, message: str, relation: str = None):
        super().__init__(message)
        self.relation = relation


class MapError(ToolkitError):
    code = "invalid_map"
