import logging

from stpipe.core.asrsim import (
    NoiseModel, TransformStats, calibrate_noise, load_confusion_table, to_asr_format, transform_corpus,
)
from stpipe.core.corpus import write_lines, write_nbest
from stpipe.core.engine.artifact import NBEST, TOKENS

from .stage import Stage, StageAttribute


class Noise(Stage):
    """ Simulates recognizer output: every source sentence is put in ASR format and
        expanded into a scored n-best list. Target lines of sentences that fail
        the formatting are dropped together with them.
    """

    stage_type = "noise"
    input_kinds = (TOKENS,)
    output_kind = NBEST

    wer = StageAttribute(attribute_type=float, description="Target rank-1 word error rate, in [0, 1).")
    nbest = StageAttribute(attribute_type=int, description="Hypotheses per utterance.")
    mix = StageAttribute(attribute_type=list, description="Substitution, deletion and insertion shares.")
    confusions = StageAttribute(default_value="", attribute_type=str, description="Confusion table TSV. Empty for the bundled table.")
    filler_vocab = StageAttribute(attribute_type=list)
    calibrate = StageAttribute(default_value=False, attribute_type=bool,
                               description="Tune the per-token error rate until the measured WER hits the target.")

    def setup(self, context):
        self._noise = NoiseModel(
            self.wer if self.wer is not None else context.setting("asrsim.wer", 0.15),
            mix=self.mix or context.setting("asrsim.mix"),
            confusion_table=load_confusion_table(self.confusions or None),
            filler_vocab=self.filler_vocab or context.setting("asrsim.filler_vocab"),
            seed=context.seed,
        )

    def run(self, context, artifact):
        noise = self._noise
        sources = list(artifact.source_tokens())
        if self.calibrate and noise.target_wer > 0:
            noise = calibrate_noise(
                [to_asr_format(tokens) for tokens in sources],
                noise,
                tolerance=context.setting("asrsim.calibration_tolerance", 0.02),
                iterations=context.setting("asrsim.calibration_iterations", 10),
            )

        n = self.nbest or context.setting("asrsim.nbest", 50)
        output = self.new_artifact(NBEST, with_target=artifact.target_path is not None)
        stats = TransformStats()
        output.rows = write_nbest(output.source_path, transform_corpus(
            sources,
            noise,
            n,
            workers=context.workers,
            progress_every=context.setting("asrsim.progress_every", 10000),
            stats=stats,
        ))

        failed = set(stats.failed_lines)
        if artifact.target_path is not None:
            write_lines(output.target_path, (
                line for line_number, line in enumerate(artifact.target_lines(), start=1)
                if line_number not in failed
            ))

        self.notes["nbest"] = n
        self.notes["error_rate"] = noise.error_rate
        self.notes["failed_lines"] = sorted(failed)
        logging.info("Stage '%s': %d n-best lists of %d, %d sentences dropped." % (self.name, output.rows, n, len(failed)))
        return output
