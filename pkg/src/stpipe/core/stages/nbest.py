""" Stages working on n-best lists: selection, LM reranking and picking the best
LM-scored candidate.
"""
import logging
import os

from stpipe.core import textnorm
from stpipe.core.asrsim import to_asr_format
from stpipe.core.corpus import read_lines, write_nbest, write_tokens
from stpipe.core.engine.artifact import NBEST, TOKENS
from stpipe.core.exceptions import InvalidStrategy, PipelineValidationException
from stpipe.core.ngramlm import NGramModel, train_lm
from stpipe.core.rerank import RerankWeights, SelectionStrategy, build_training_pairs, pick_best_translation, rerank

from .stage import Stage, StageAttribute, aligned_pairs, write_pairs

PRUNE_PROFILES = ["heavy", "light", "none"]


class Select(Stage):
    """ Keeps the hypotheses whose rank is in `ranks` and pairs each with the
        utterance's target sentence. One input row becomes up to |ranks| rows.
    """

    stage_type = "select"
    input_kinds = (NBEST,)
    output_kind = TOKENS

    ranks = StageAttribute(default_value="1-10", attribute_type=str, description='Ranks to keep, eg: "1-10" or "1,5,10-12".')

    def validate(self):
        super(Select, self).validate()
        try:
            SelectionStrategy.parse(self.ranks)
        except InvalidStrategy as e:
            raise PipelineValidationException("Stage '%s' (select): %s" % (self.name, e))

    def run(self, context, artifact):
        strategy = SelectionStrategy.parse(self.ranks)
        output = self.new_artifact(TOKENS)
        write_pairs(output, build_training_pairs(artifact.nbest_lists(), artifact.target_tokens(), strategy), name=self.name)
        self.notes["ranks"] = sorted(strategy.rank_set)
        logging.info("Stage '%s': %d training pairs from %d n-best lists." % (self.name, output.rows, artifact.rows))
        return output


def prune_counts(profile, order, settings):
    """ Per order pruning thresholds for a named profile, fitted to order.
    """
    counts = list(settings.get("ngramlm.prune.%s" % profile) or [0])
    counts = counts[:order]
    return counts + [counts[-1]] * (order - len(counts))


def preprocess_lm_line(line, lm_format):
    if lm_format == "raw":
        return textnorm.tokenize(textnorm.normalize_punct(line))
    tokens = line.split()
    if lm_format == "asr":
        return to_asr_format(tokens)
    return tokens


class LanguageModelStage(Stage):
    """ Base for stages scoring hypotheses with an n-gram LM, either loaded from
        an ARPA file or trained at setup from a text corpus.
    """

    input_kinds = (NBEST,)

    lm = StageAttribute(default_value="", attribute_type=str, description="ARPA file to load.")
    lm_corpus = StageAttribute(default_value="", attribute_type=str, description="Text to train the LM on when no ARPA file is given.")
    lm_format = StageAttribute(
        default_value="asr",
        attribute_options=["raw", "tokens", "asr"],
        attribute_type=str,
        description="How lm_corpus lines are prepared before training.",
    )
    order = StageAttribute(attribute_type=int)
    prune = StageAttribute(default_value="heavy", attribute_options=PRUNE_PROFILES, attribute_type=str)
    length_normalize = StageAttribute(attribute_type=bool)

    def validate(self):
        super(LanguageModelStage, self).validate()
        if not self.lm and not self.lm_corpus:
            raise PipelineValidationException("Stage '%s' (%s) needs either 'lm' or 'lm_corpus'." % (self.name, self.stage_type))

    def setup(self, context):
        if self.lm:
            self._lm = NGramModel.load(self.lm)
            self.notes["lm"] = context.relpath(self.lm)
        else:
            order = self.order or context.setting("ngramlm.order", 4)
            sentences = (preprocess_lm_line(line, self.lm_format) for line in read_lines(self.lm_corpus))
            self._lm = train_lm(sentences, order=order, prune_counts=prune_counts(self.prune, order, context.settings))
            lm_path = os.path.join(self.work_dir, "lm.arpa")
            self._lm.save(lm_path)
            self.extra_outputs["lm"] = lm_path

        if self.length_normalize is None:
            self._length_normalize = bool(context.setting("rerank.length_normalize", True))
        else:
            self._length_normalize = self.length_normalize


class Rerank(LanguageModelStage):
    """ Rescores every n-best list with w_orig * score + w_lm * LM score and re-sorts it.
    """

    stage_type = "rerank"

    w_orig = StageAttribute(attribute_type=float)
    w_lm = StageAttribute(attribute_type=float)

    def _weights(self, context):
        return RerankWeights(
            w_orig=self.w_orig if self.w_orig is not None else context.setting("rerank.w_orig", 0.0),
            w_lm=self.w_lm if self.w_lm is not None else context.setting("rerank.w_lm", 1.0),
        )

    def run(self, context, artifact):
        weights = self._weights(context)
        output = self.new_artifact(NBEST, with_target=False)
        output.target_path = artifact.target_path
        output.rows = write_nbest(output.source_path, (
            rerank(nbest, self._lm, weights, length_normalize=self._length_normalize)
            for nbest in artifact.nbest_lists()
        ))
        self.notes["weights"] = {"w_orig": weights.w_orig, "w_lm": weights.w_lm}
        return output


class PickBest(LanguageModelStage):
    """ Keeps the single candidate per utterance with the highest LM score.
    """

    stage_type = "pick-best"
    output_kind = TOKENS

    def run(self, context, artifact):
        output = self.new_artifact(TOKENS, with_target=artifact.target_path is not None)
        best = (pick_best_translation(nbest.hypotheses, self._lm, self._length_normalize) for nbest in artifact.nbest_lists())
        if artifact.target_path is None:
            output.rows = write_tokens(output.source_path, best)
        else:
            write_pairs(output, aligned_pairs(best, artifact.target_tokens()), name=self.name)
        return output

