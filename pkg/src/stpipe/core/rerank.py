""" N-best selection strategies and language model reranking.
"""
import collections

from six.moves import zip_longest

from .asrsim import NBestList
from .exceptions import AlignmentMismatch, InvalidStrategy, InvalidWeights

Utterance = collections.namedtuple("Utterance", ["utt_id", "tokens"])

_MISSING = object()


class SelectionStrategy(object):
    """ Set of 1-based ranks to keep from each n-best list.
    """

    def __init__(self, rank_set):
        self.rank_set = frozenset(int(rank) for rank in rank_set)
        if not self.rank_set:
            raise InvalidStrategy("A selection strategy needs at least one rank.")
        if min(self.rank_set) < 1:
            raise InvalidStrategy("Ranks start at 1, got %d" % min(self.rank_set))

    @classmethod
    def top(cls, n):
        return cls(range(1, n + 1))

    @classmethod
    def parse(cls, text):
        """ Parses "1-10,15,20-22" style rank lists.

            Raises:
                InvalidStrategy: Unparseable or empty.
        """
        ranks = set()
        for part in str(text).split(","):
            part = part.strip()
            if not part:
                continue
            try:
                if "-" in part:
                    start, end = part.split("-", 1)
                    start, end = int(start), int(end)
                    if end < start:
                        raise InvalidStrategy("Empty rank range %r" % part)
                    ranks.update(range(start, end + 1))
                else:
                    ranks.add(int(part))
            except ValueError:
                raise InvalidStrategy("Cannot parse rank list %r" % text)
        return cls(ranks)

    def __contains__(self, rank):
        return rank in self.rank_set

    def __eq__(self, other):
        return isinstance(other, SelectionStrategy) and self.rank_set == other.rank_set

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return "SelectionStrategy(%s)" % sorted(self.rank_set)


class RerankWeights(object):
    def __init__(self, w_orig=0.0, w_lm=1.0):
        self.w_orig = float(w_orig)
        self.w_lm = float(w_lm)
        if self.w_orig < 0 or self.w_lm < 0:
            raise InvalidWeights("Weights must be non-negative, got w_orig=%r w_lm=%r" % (w_orig, w_lm))
        if self.w_orig == 0 and self.w_lm == 0:
            raise InvalidWeights("w_orig and w_lm cannot both be zero.")

    def __repr__(self):
        return "RerankWeights(w_orig=%r, w_lm=%r)" % (self.w_orig, self.w_lm)


def select(nbest, strategy):
    """ Hypotheses whose rank is in the strategy, in rank order. Ranks missing
        from the list are skipped.
    """
    return [list(hypothesis.tokens) for hypothesis in nbest if hypothesis.rank in strategy]


def build_training_pairs(nbest_stream, targets, strategy):
    """ Pairs every selected hypothesis with its utterance's target sentence.

        Args:
            nbest_stream (iterable): NBestList per utterance.
            targets (iterable): Target token sequences, or Utterance tuples when
                utt_ids should be checked too.
            strategy (SelectionStrategy): Ranks to keep.

        Raises:
            AlignmentMismatch: The streams differ in length or utt_id.

        Yields:
            tuple: (source tokens, target tokens)
    """
    for line_number, (nbest, target) in enumerate(zip_longest(nbest_stream, targets, fillvalue=_MISSING), start=1):
        if nbest is _MISSING or target is _MISSING:
            raise AlignmentMismatch("N-best and target streams differ in length.", line_number=line_number)
        if isinstance(target, Utterance):
            if target.utt_id != nbest.utt_id:
                raise AlignmentMismatch("utt_id %r does not match target %r" % (nbest.utt_id, target.utt_id),
                                        line_number=line_number)
            target = target.tokens
        target = list(target)
        for source in select(nbest, strategy):
            yield source, target


def normalized_lm_score(lm, tokens, length_normalize=True):
    score = lm.score(tokens)
    if length_normalize:
        return score / max(len(tokens), 1)
    return score


def rerank(nbest, lm, weights, length_normalize=True):
    """ Rescores with w_orig * original score + w_lm * LM score and re-sorts.

        The sort is stable, so equal scores keep their original order and
        w_lm = 0 leaves the list untouched. Ranks are reassigned from 1.

        Returns:
            NBestList
    """
    rescored = []
    for hypothesis in nbest:
        lm_score = normalized_lm_score(lm, hypothesis.tokens, length_normalize) if weights.w_lm else 0.0
        rescored.append((weights.w_orig * hypothesis.score + weights.w_lm * lm_score, hypothesis.tokens))

    rescored.sort(key=lambda item: -item[0])
    return NBestList(
        nbest.utt_id,
        [(rank, score, tokens) for rank, (score, tokens) in enumerate(rescored, start=1)],
    )


def pick_best_translation(candidates, lm, length_normalize=True):
    """ The candidate with the highest (length normalized) LM score. Ties go to
        the lower original rank.
    """
    best = None
    best_score = None
    for hypothesis in sorted(candidates, key=lambda hypothesis: hypothesis.rank):
        score = normalized_lm_score(lm, hypothesis.tokens, length_normalize)
        if best is None or score > best_score:
            best, best_score = hypothesis, score
    return list(best.tokens)
