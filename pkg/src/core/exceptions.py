"""
Custom exceptions for the application
"""

from pathlib import Path
from typing import Optional, Union


class CartoganException(Exception):
    """Base exception for all application errors"""

    pass


# Geometry Exceptions
class GeometryError(CartoganException):
    """Base exception for tile-pyramid coordinate errors"""

    pass


class DomainError(GeometryError):
    """Coordinate outside the Web-Mercator domain"""

    pass


class ZoomBoundsError(GeometryError):
    """Zoom level outside the pyramid, or no parent/children at this level"""

    pass


class OutOfTileError(GeometryError):
    """Point does not fall inside the requested tile"""

    pass


# Scene Exceptions
class SceneError(CartoganException):
    """Base exception for vector scene errors"""

    pass


class DegenerateBoundsError(SceneError):
    """Scene bounds too small to hold a single block"""

    pass


class InvalidGeometryError(SceneError):
    """Geometry violates vertex-count or class/kind rules"""

    pass


class SceneParseError(SceneError):
    """Scene text document could not be parsed"""

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")


# Render Exceptions
class RenderError(CartoganException):
    """Base exception for rendering errors"""

    pass


class InvalidStyleSheetError(RenderError):
    """Stylesheet is malformed or incomplete"""

    pass


# Tensor Exceptions
class TensorError(CartoganException):
    """Base exception for autograd errors"""

    pass


class ShapeMismatchError(TensorError):
    """Operand shapes are incompatible"""

    pass


class NonScalarLossError(TensorError):
    """backward() called on a tensor with more than one element"""

    pass


# Checkpoint Exceptions
class CheckpointError(CartoganException):
    """Base exception for checkpoint errors"""

    pass


class CorruptCheckpointError(CheckpointError):
    """Checkpoint blob or sidecar could not be decoded"""

    pass


class TileSizeMismatchError(CheckpointError):
    """Input tile size differs from the size a network was built for"""

    pass


# Dataset Exceptions
class DatasetError(CartoganException):
    """Base exception for tileset and manifest errors"""

    pass


class EmptyDatasetError(DatasetError):
    """Dataset or tile tree holds no usable items"""

    pass


class CorruptTileError(DatasetError):
    """Tile file could not be decoded"""

    def __init__(self, path: Union[str, Path], reason: Optional[str] = None):
        self.path = Path(path)
        message = f"Corrupt tile: {self.path}"
        if reason:
            message += f" ({reason})"
        super().__init__(message)


class ManifestIntegrityError(DatasetError):
    """Manifest entry missing on disk or hash mismatch"""

    def __init__(self, path: Union[str, Path], reason: str):
        self.path = Path(path)
        super().__init__(f"{reason}: {self.path}")


class MixedTileSizeError(DatasetError):
    """Tiles of different sizes found in one tileset"""

    pass


class SingleClassDatasetError(DatasetError):
    """Classifier training data holds only one class"""

    pass


# Pipeline Exceptions
class PipelineError(CartoganException):
    """Base exception for orchestration errors"""

    pass


class ConfigError(PipelineError):
    """Pipeline configuration invalid or unreadable"""

    pass


class PrerequisiteMissingError(PipelineError):
    """An artifact required by a command does not exist yet"""

    def __init__(self, artifact: str, path: Union[str, Path], hint: Optional[str] = None):
        self.artifact = artifact
        self.path = Path(path)
        message = f"Missing {artifact}: {self.path}"
        if hint:
            message += f" (run `cartogan {hint}` first)"
        super().__init__(message)


class PortInUseError(PipelineError):
    """Tile server port already bound"""

    pass
