"""
Exception hierarchy shared by every hypertuple module.

Each error carries the pipeline ``stage`` it was raised from and a mapping
of ``details`` so that the command line can emit a structured diagnostic.

"""
import enum

import numpy as np

__all__ = [
    "AllScalar",
    "CharacterSeparationFailure",
    "ComplexFieldError",
    "DependentVectors",
    "HypertupleError",
    "InvalidInput",
    "NoRealLog",
    "NonCommuting",
    "NotCyclicAlgebra",
    "NotInAlgebra",
    "NotInvertible",
    "NumericalFailure",
    "RayHitsSpectrum",
    "SchemaError",
    "SingularMatrix",
    "jsonable",
]


def jsonable(value):
    """Convert numpy/complex payloads into JSON friendly values."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, np.generic):
        return jsonable(value.item())
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, enum.Enum):
        return value.value
    return value


class HypertupleError(Exception):
    """
    Base class of all hypertuple errors.

    Parameters
    ----------
    message : str
        Human readable description.
    stage : str, optional
        Name of the pipeline stage; defaults to the class level ``stage``.
    **details
        Additional diagnostic payload.

    """

    stage = "hypertuple"

    def __init__(self, message, stage=None, **details):
        super().__init__(message)
        self.message = message
        if stage is not None:
            self.stage = stage
        self.details = details

    def to_dict(self):
        """
        The structured diagnostic of the error.

        Returns
        -------
        dict
            JSON serialisable mapping with error name, stage, message and details.

        """
        return dict(
            error=type(self).__name__,
            stage=self.stage,
            message=self.message,
            details=jsonable(self.details),
        )


class InvalidInput(HypertupleError, ValueError):
    stage = "input"


class SchemaError(InvalidInput):
    """Malformed JSON artifact; ``path`` names the offending location."""

    stage = "schema"

    def __init__(self, message, path="$", **details):
        super().__init__(f"{path}: {message}", path=path, **details)
        self.path = path


class DependentVectors(InvalidInput):
    stage = "construct"


class SingularMatrix(HypertupleError):
    stage = "numkit"


class NumericalFailure(HypertupleError):
    stage = "numkit"


class CharacterSeparationFailure(NumericalFailure):
    stage = "algebra"


class NonCommuting(HypertupleError):
    stage = "algebra"


class NotCyclicAlgebra(HypertupleError):
    stage = "construct"


class NotInAlgebra(HypertupleError):
    stage = "expmap"


class NotInvertible(HypertupleError):
    stage = "expmap"


class RayHitsSpectrum(HypertupleError):
    stage = "expmap"


class NoRealLog(HypertupleError):
    stage = "expmap"


class ComplexFieldError(HypertupleError):
    stage = "expmap"


class AllScalar(HypertupleError):
    stage = "construct"
