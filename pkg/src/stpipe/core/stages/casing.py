import os

from stpipe.core.corpus import read_tokens
from stpipe.core.exceptions import PipelineValidationException
from stpipe.core.recase import RecaserModel, recase, train_recaser

from .stage import SentenceStage, StageAttribute


class Recase(SentenceStage):
    """ Restores case on lowercased output with a recaser model, loaded from
        `model` or trained from the cased, tokenized `train_corpus`.
    """

    stage_type = "recase"

    sides = StageAttribute(
        default_value="source",
        attribute_options=["source", "target", "both"],
        attribute_type=str,
        description="Which sides of the corpus to recase.",
    )
    model = StageAttribute(default_value="", attribute_type=str, description="Recaser model file.")
    train_corpus = StageAttribute(default_value="", attribute_type=str, description="Cased tokenized text to train on.")
    order = StageAttribute(attribute_type=int, description="Context model order when training (default: setting recase.order).")

    def validate(self):
        super(Recase, self).validate()
        if not self.model and not self.train_corpus:
            raise PipelineValidationException("Stage '%s' (recase) needs either 'model' or 'train_corpus'." % self.name)

    def setup(self, context):
        if self.model:
            self._model = RecaserModel.load(self.model)
            self.notes["model"] = context.relpath(self.model)
        else:
            order = self.order or context.setting("recase.order", 3)
            self._model = train_recaser(read_tokens(self.train_corpus), order=order)
            self.notes["order"] = order
            model_path = os.path.join(self.work_dir, "recaser.model")
            self._model.save(model_path)
            self.extra_outputs["model"] = model_path

    def map_sentence(self, sentence):
        return recase(self._model, sentence)
