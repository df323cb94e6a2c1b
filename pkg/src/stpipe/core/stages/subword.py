""" Byte pair encoding stages.
"""
import logging
import os

from stpipe.core.bpe import BpeModel, apply_bpe, learn_bpe, revert_bpe
from stpipe.core.exceptions import PipelineException

from .stage import SentenceStage, Stage, StageAttribute

DEFAULT_MODEL_KEY = "bpe"


class BpeLearn(Stage):
    """ Learns a merge list from the input corpus and passes the corpus on unchanged.
        Later bpe-apply stages use the model registered under model_key.
    """

    stage_type = "bpe-learn"

    merges = StageAttribute(attribute_type=int, description="Merge operations to learn.")
    min_frequency = StageAttribute(attribute_type=int, description="Stop once the best pair is rarer than this.")
    sides = StageAttribute(
        default_value="both",
        attribute_options=["source", "target", "both"],
        attribute_type=str,
        description="Sides to learn from. Both gives a joint model.",
    )
    model_key = StageAttribute(default_value=DEFAULT_MODEL_KEY, attribute_type=str)

    def _corpus(self, artifact):
        if self.sides in ("source", "both"):
            for tokens in artifact.source_tokens():
                yield tokens
        if self.sides in ("target", "both") and artifact.target_path is not None:
            for tokens in artifact.target_tokens():
                yield tokens

    def run(self, context, artifact):
        model = learn_bpe(
            self._corpus(artifact),
            self.merges or context.setting("bpe.merges", 37000),
            min_frequency=self.min_frequency or context.setting("bpe.min_frequency", 2),
        )
        model_path = os.path.join(self.work_dir, "bpe.model")
        model.save(model_path)
        context.models[self.model_key] = model_path
        self.extra_outputs["model"] = model_path
        self.notes["merges"] = len(model.merges)
        logging.info("Stage '%s': learned %d merges." % (self.name, len(model.merges)))
        return artifact


class BpeApply(SentenceStage):
    stage_type = "bpe-apply"

    model = StageAttribute(default_value="", attribute_type=str,
                           description="BPE model file. Empty for the model learned earlier in the run.")
    model_key = StageAttribute(default_value=DEFAULT_MODEL_KEY, attribute_type=str)

    def setup(self, context):
        path = self.model or context.models.get(self.model_key)
        if not path:
            raise PipelineException("No BPE model configured and none learned under '%s'." % self.model_key)
        self._model = BpeModel.load(path)
        self.notes["model"] = context.relpath(path)

    def map_sentence(self, sentence):
        return apply_bpe(self._model, sentence)


class RevertBpe(SentenceStage):
    stage_type = "revert-bpe"

    def map_sentence(self, sentence):
        return revert_bpe(sentence)
