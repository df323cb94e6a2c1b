""" Stages assembling training data: mixing corpora and emitting labeled copies.
"""
import logging
import os
import shutil

from stpipe.core import utils
from stpipe.core.corpus import ParallelCorpus, mix_corpora
from stpipe.core.engine.artifact import Artifact, TOKENS
from stpipe.core.exceptions import PipelineException, PipelineValidationException

from .stage import Stage, StageAttribute


class Mix(Stage):
    """ Concatenates the current corpus with other corpora, each block repeated
        a number of times.

        Each entry of `parts` is either {stage: <id>, repeat: N} for the output
        of an earlier stage, or {source: <path>, target: <path>, name: <label>,
        repeat: N} for files on disk.
    """

    stage_type = "mix"

    parts = StageAttribute(default_value=[], attribute_type=list)
    repeat = StageAttribute(default_value=1, attribute_type=int, description="Repeat count of the current corpus.")
    include_input = StageAttribute(default_value=True, attribute_type=bool)

    def validate(self):
        super(Mix, self).validate()
        if not self.parts and not self.include_input:
            raise PipelineValidationException("Stage '%s' (mix) has nothing to mix." % self.name)
        for part in self.parts:
            if not isinstance(part, dict):
                raise PipelineValidationException("Stage '%s' (mix): parts must be mappings, got %r" % (self.name, part))
            if not part.get("stage") and not (part.get("source") and part.get("target")):
                raise PipelineValidationException(
                    "Stage '%s' (mix): each part needs 'stage' or both 'source' and 'target'." % self.name
                )
            try:
                repeat = int(part.get("repeat", 1))
            except (TypeError, ValueError):
                repeat = 0
            if repeat < 1:
                raise PipelineValidationException("Stage '%s' (mix): repeat must be >= 1 in %r" % (self.name, part))
        if self.repeat < 1:
            raise PipelineValidationException("Stage '%s' (mix): repeat must be >= 1." % self.name)

    def references(self):
        return [part["stage"] for part in self.parts if isinstance(part, dict) and part.get("stage")]

    def _corpus(self, context, part):
        if part.get("stage"):
            artifact = context.lookup_output(part["stage"])
            if artifact.kind != TOKENS or artifact.target_path is None:
                raise PipelineException("Stage output '%s' is not a parallel token corpus." % part["stage"])
            name = part.get("name") or context.qualified_name(part["stage"])
            return ParallelCorpus(name, artifact.source_path, artifact.target_path)
        name = part.get("name") or os.path.basename(part["source"])
        return ParallelCorpus(name, part["source"], part["target"])

    def run(self, context, artifact):
        blocks = []
        if self.include_input:
            if artifact.target_path is None:
                raise PipelineException("Stage '%s' (mix) needs a parallel corpus as input." % self.name)
            blocks.append((ParallelCorpus(context.qualified_name(self.name), artifact.source_path, artifact.target_path),
                           self.repeat))
        for part in self.parts:
            blocks.append((self._corpus(context, part), int(part.get("repeat", 1))))

        output = self.new_artifact(TOKENS)
        mixed = mix_corpora(blocks, self.name, output.source_path, output.target_path)
        self.notes["provenance"] = mixed.provenance
        output.rows = sum(block["lines"] for block in mixed.provenance)
        return output


class Emit(Stage):
    """ Writes a labeled copy of the current corpus to <run_dir>/corpora/ and
        passes it on unchanged.
    """

    stage_type = "emit"

    label = StageAttribute(attribute_type=str, required=True, description="File name stem, eg: TED-ASR-top10.")

    def run(self, context, artifact):
        utils.ensure_dir(context.corpora_dir)
        emitted = Artifact(
            TOKENS,
            os.path.join(context.corpora_dir, self.label + ".src"),
            os.path.join(context.corpora_dir, self.label + ".tgt") if artifact.target_path else None,
        )
        for side, path in emitted.files().items():
            shutil.copyfile(artifact.files()[side], path)
            self.extra_outputs[side] = path

        self.notes["label"] = self.label
        logging.info("Stage '%s': emitted %s (%d rows)." % (self.name, self.label, artifact.rows))
        return artifact
