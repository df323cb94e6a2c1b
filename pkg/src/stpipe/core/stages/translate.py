import logging

from stpipe.core.adapter import translate_external
from stpipe.core.asrsim import NBestList
from stpipe.core.corpus import write_lines, write_nbest, write_tokens
from stpipe.core.engine.artifact import NBEST, TOKENS

from .stage import Stage, StageAttribute


class TranslateExternal(Stage):
    """ Sends the source side through an external translation command, one sentence
        per line. N-best input is translated hypothesis by hypothesis, keeping
        ranks and scores. The target side passes through.
    """

    stage_type = "translate-external"
    input_kinds = (TOKENS, NBEST)

    command = StageAttribute(attribute_type=str, required=True,
                             description='Adapter command, eg: "{python} -m stpipe.adapters.identity".')
    timeout = StageAttribute(attribute_type=float, description="Seconds before the adapter is killed.")

    def _translate(self, context, sentences):
        return translate_external(
            sentences,
            self.command,
            timeout=self.timeout or context.setting("adapter.timeout", 600),
            cwd=self.work_dir,
        )

    def run(self, context, artifact):
        output = self.new_artifact(artifact.kind, with_target=artifact.target_path is not None)

        if artifact.kind == NBEST:
            lists = list(artifact.nbest_lists())
            translations = iter(self._translate(
                context, [hypothesis.tokens for nbest in lists for hypothesis in nbest]
            ))
            output.rows = write_nbest(output.source_path, [
                NBestList(nbest.utt_id, [(hypothesis.rank, hypothesis.score, next(translations)) for hypothesis in nbest])
                for nbest in lists
            ])
        else:
            output.rows = write_tokens(output.source_path, self._translate(context, artifact.source_tokens()))

        if artifact.target_path is not None:
            write_lines(output.target_path, artifact.target_lines())

        logging.info("Stage '%s': translated %d rows." % (self.name, output.rows))
        return output
