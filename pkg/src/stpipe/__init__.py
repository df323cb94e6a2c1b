__version__ = "1.0.0"

##### Errors #####
from .core.exceptions import (
    StpipeException, PipelineException, PipelineValidationException, StageFailure, LoaderException,
)

##### Stage Graph #####
# Import objects from the stage_graph module
from .core.engine.stage_graph import StageGraph
from .core.engine.runner import RunResult, run_pipeline

##### Stages #####
# Import the stages so that they are available at the top level
from .core import stages
all_stages = stages.all_stages

##### Loader #####
from .builder.pipeline_builder import Loader, PipelineConfig
