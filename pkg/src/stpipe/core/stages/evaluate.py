import logging
import os

from stpipe.core import utils
from stpipe.core.metrics import evaluate

from .stage import Stage, StageAttribute


class Evaluate(Stage):
    """ Scores one side of the current artifact against a reference side with
        BLEU, BLEU-lc and WER. The artifact passes through unchanged.

        By default the hypothesis is the source side and the reference is the
        target side of the same artifact. reference_stage points at the output
        of another stage instead, eg: the clean text before ASR formatting.
    """

    stage_type = "evaluate"

    reference_stage = StageAttribute(default_value="", attribute_type=str,
                                     description='Stage id, or "pipeline:stage", holding the reference.')
    reference_side = StageAttribute(default_value="target", attribute_options=["source", "target"], attribute_type=str)
    hypothesis_side = StageAttribute(default_value="source", attribute_options=["source", "target"], attribute_type=str)
    label = StageAttribute(default_value="", attribute_type=str, description="Row name in the report table.")
    smooth = StageAttribute(attribute_type=bool)

    def references(self):
        return [self.reference_stage] if self.reference_stage else []

    def run(self, context, artifact):
        reference = context.lookup_output(self.reference_stage) if self.reference_stage else artifact
        smooth = self.smooth if self.smooth is not None else bool(context.setting("metrics.smooth", False))

        report = evaluate(
            artifact.side_tokens(self.hypothesis_side),
            reference.side_tokens(self.reference_side),
            smooth=smooth,
            name=self.label or context.qualified_name(self.name),
            stage=context.qualified_name(self.name),
        )
        context.reports.append(report)

        report_path = os.path.join(self.work_dir, "report.json")
        utils.atomic_write_text(report_path, report.to_json())
        self.extra_outputs["report"] = report_path
        logging.info("Stage '%s': %r" % (self.name, report))
        return artifact
