"""Map / non-map classification and the confusion-matrix metrics"""

from src.ismap.classifier import (
    MAP_THRESHOLD,
    Classification,
    IsMapClassifier,
    IsMapConfig,
    IsMapResult,
    classify,
    evaluate,
    evaluate_tilesets,
    load_training_set,
    train_ismap,
)
from src.ismap.metrics import (
    ConfusionCounts,
    EvalReport,
    confusion_from_predictions,
    f1_score,
    metrics,
)
from src.ismap.network import IsMapNet
from src.ismap.textures import TEXTURE_KINDS, texture

__all__ = [
    # Classifier
    "MAP_THRESHOLD",
    "Classification",
    "IsMapClassifier",
    "IsMapConfig",
    "IsMapResult",
    "classify",
    "evaluate",
    "evaluate_tilesets",
    "load_training_set",
    "train_ismap",
    # Metrics
    "ConfusionCounts",
    "EvalReport",
    "confusion_from_predictions",
    "f1_score",
    "metrics",
    # Network and negatives
    "IsMapNet",
    "TEXTURE_KINDS",
    "texture",
]
