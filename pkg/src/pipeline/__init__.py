"""Stage orchestration over the configured artifact roots"""

from src.pipeline.runner import ArtifactLayout, ExperimentPipeline, PipelineResult

__all__ = ["ArtifactLayout", "ExperimentPipeline", "PipelineResult"]
