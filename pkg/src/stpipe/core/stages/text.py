""" Sentence level text rewriting stages.
"""
from stpipe.core import textnorm
from stpipe.core.asrsim import to_asr_format
from stpipe.core.engine.artifact import RAW, TOKENS

from .stage import SentenceStage, StageAttribute


class Normalize(SentenceStage):
    """ Punctuation normalization followed by tokenization. Turns raw text into tokens.
    """

    stage_type = "normalize"
    input_kinds = (RAW,)
    output_kind = TOKENS

    def map_sentence(self, sentence):
        return textnorm.tokenize(textnorm.normalize_punct(sentence))


class Lowercase(SentenceStage):
    stage_type = "lowercase"

    def map_sentence(self, sentence):
        return textnorm.lowercase(sentence)


class AsrFormat(SentenceStage):
    """ Rewrites clean text the way a recognizer would emit it: lowercase,
        numbers spelled out, no punctuation. Only the source side by default.
    """

    stage_type = "asr-format"

    sides = StageAttribute(
        default_value="source",
        attribute_options=["source", "target", "both"],
        attribute_type=str,
        description="Which sides of the corpus to rewrite.",
    )

    def map_sentence(self, sentence):
        return to_asr_format(sentence)
