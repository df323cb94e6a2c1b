import collections
import math
import unittest

from stpipe.core import ngramlm
from stpipe.core.asrsim import to_asr_format
from stpipe.core.exceptions import EmptyCorpus, ModelFormatError
from stpipe.core.ngramlm import BOS, EOS, UNK

from . import corpus_factory
from .stpipe_testcase import StpipeTestCase


def asr_sentences(count, seed=0):
    return [to_asr_format(tokens) for tokens in corpus_factory.tokenized_corpus(count, seed=seed)]


class KneserNeyOracle(object):
    """ Straight recursive interpolated modified Kneser-Ney, without pruning,
        written from the textbook definition.
    """

    def __init__(self, corpus, order):
        self.order = order
        self.raw = collections.Counter()
        for tokens in corpus:
            padded = [BOS] + list(tokens) + [EOS]
            for length in range(1, order + 1):
                for start in range(len(padded) - length + 1):
                    self.raw[tuple(padded[start:start + length])] += 1

        left_neighbours = collections.defaultdict(set)
        for gram in self.raw:
            if len(gram) > 1:
                left_neighbours[gram[1:]].add(gram[0])

        self.adjusted = {}
        for gram, count in self.raw.items():
            if len(gram) == order or gram[0] == BOS:
                self.adjusted[gram] = count
            else:
                self.adjusted[gram] = len(left_neighbours[gram])

        self.words = sorted(set(gram[0] for gram in self.raw if len(gram) == 1) - set([BOS])) + [UNK]
        self.discounts = {}
        for length in range(1, order + 1):
            counts = [count for gram, count in self.adjusted.items() if len(gram) == length and gram != (BOS,)]
            self.discounts[length] = self._discounts(counts)

        self.continuations = collections.defaultdict(dict)
        for gram, count in self.adjusted.items():
            if len(gram) > 1:
                self.continuations[gram[:-1]][gram[-1]] = count

    @staticmethod
    def _discounts(counts):
        n = [sum(1 for count in counts if count == value) for value in (1, 2, 3, 4)]
        if not (n[0] and n[1] and n[2]):
            return (0.75, 0.75, 0.75)
        y = n[0] / float(n[0] + 2 * n[1])
        discounts = (1 - 2 * y * n[1] / n[0], 2 - 3 * y * n[2] / n[1], 3 - 4 * y * n[3] / n[2])
        if not all(0 < value < index + 1 for index, value in enumerate(discounts)):
            return (0.75, 0.75, 0.75)
        return discounts

    def _d(self, length, count):
        return 0.0 if count == 0 else self.discounts[length][min(count, 3) - 1]

    def prob(self, context, word):
        if self.order == 1:
            # Nothing to back off to, so raw relative frequency.
            return self.raw.get((word,), 0) / float(sum(self.raw.get((w,), 0) for w in self.words))
        context = tuple(context)[-(self.order - 1):] if self.order > 1 else ()
        length = len(context) + 1
        if not context:
            counts = dict((w, self.adjusted.get((w,), 0)) for w in self.words)
            total = float(sum(counts.values()))
            leftover = sum(self._d(1, count) for count in counts.values()) / total
            return max(counts[word] - self._d(1, counts[word]), 0) / total + leftover / len(self.words)

        continuations = self.continuations.get(context)
        if not continuations:
            return self.prob(context[1:], word)
        total = float(sum(continuations.values()))
        gamma = sum(self._d(length, count) for count in continuations.values()) / total
        count = continuations.get(word, 0)
        return max(count - self._d(length, count), 0) / total + gamma * self.prob(context[1:], word)


class TestTrainLm(StpipeTestCase):

    def test_unigram_maximum_likelihood(self):
        lm = ngramlm.train_lm([[u"a", u"a", u"b"]], order=1, prune_counts=[0])
        self.assertAlmostEqual(10 ** lm.log_prob((), u"a"), 0.5)
        self.assertAlmostEqual(10 ** lm.log_prob((), u"b"), 0.25)
        self.assertAlmostEqual(10 ** lm.log_prob((), EOS), 0.25)

    def test_unigram_perplexity(self):
        lm = ngramlm.train_lm([[u"a", u"a", u"b"]], order=1)
        self.assertAlmostEqual(ngramlm.perplexity(lm, [[u"a", u"a", u"b"]]), 2 ** 1.5, places=9)

    def test_symmetric_continuations(self):
        lm = ngramlm.train_lm([[u"a", u"b"], [u"a", u"c"]], order=2)
        self.assertAlmostEqual(lm.log_prob([u"a"], u"b"), lm.log_prob([u"a"], u"c"), places=12)

    def test_in_vocabulary_scores_are_finite(self):
        corpus = asr_sentences(50, seed=1)
        lm = ngramlm.train_lm(corpus, order=3)
        for tokens in corpus:
            score = ngramlm.score(lm, tokens)
            self.assertTrue(math.isfinite(score))
            self.assertLess(score, 0.0)

    def test_prefix_scores_never_increase(self):
        corpus = asr_sentences(50, seed=2)
        lm = ngramlm.train_lm(corpus, order=3)
        for tokens in corpus[:10]:
            scores = [lm.score(tokens[:end], eos=False) for end in range(len(tokens) + 1)]
            for previous, current in zip(scores, scores[1:]):
                self.assertLessEqual(current, previous + 1e-12)

    def test_bos_and_eos_flags(self):
        lm = ngramlm.train_lm([[u"a", u"b"], [u"b", u"a"]], order=2)
        self.assertAlmostEqual(lm.score([u"a"], bos=False, eos=False), lm.log_prob((), u"a"))
        self.assertAlmostEqual(lm.score([u"a"], bos=True, eos=False), lm.log_prob([BOS], u"a"))
        self.assertAlmostEqual(
            lm.score([u"a"]), lm.log_prob([BOS], u"a") + lm.log_prob([BOS, u"a"], EOS),
        )

    def test_unknown_words_score_as_unk(self):
        lm = ngramlm.train_lm(asr_sentences(30), order=2)
        self.assertEqual(lm.log_prob((), u"zxqv"), lm.log_prob((), UNK))

    def test_empty_corpus(self):
        self.assertRaises(EmptyCorpus, ngramlm.train_lm, [], 3)
        lm = ngramlm.train_lm([[u"a"]], order=1)
        self.assertRaises(EmptyCorpus, ngramlm.perplexity, lm, [])

    def test_bad_arguments(self):
        self.assertRaises(ValueError, ngramlm.train_lm, [[u"a"]], 6)
        self.assertRaises(ValueError, ngramlm.train_lm, [[u"a"]], 3, [0, 0])


class TestNormalization(StpipeTestCase):

    def _assert_normalized(self, lm):
        words = sorted(lm.vocab - set([BOS]))
        for context in lm.contexts():
            total = sum(10 ** lm.log_prob(context, word) for word in words)
            if abs(total - 1.0) > 1e-6:
                self.fail("p(. | %r) sums to %r" % (context, total))

    def test_distributions_sum_to_one(self):
        corpus = asr_sentences(60, seed=3)
        self.assertLessEqual(len(set(token for tokens in corpus for token in tokens)), 200)
        heavy = [0, 0, 1, 2]
        for order in range(1, 5):
            for prune in ([0] * order, heavy[:order]):
                self._assert_normalized(ngramlm.train_lm(corpus, order=order, prune_counts=prune))

    def test_matches_oracle(self):
        corpus = asr_sentences(40, seed=4)
        for order in (1, 2, 3):
            lm = ngramlm.train_lm(corpus, order=order)
            oracle = KneserNeyOracle(corpus, order)

            contexts = set([(BOS,)])
            for tokens in corpus:
                padded = [BOS] + tokens
                for end in range(1, len(padded) + 1):
                    contexts.add(tuple(padded[max(0, end - order + 1):end]))
            contexts.add(())

            for context in sorted(contexts):
                for word in oracle.words:
                    probability = oracle.prob(context, word)
                    expected = math.log10(probability) if probability > 0 else ngramlm.LOG_ZERO
                    actual = lm.log_prob(context, word)
                    if abs(expected - actual) > 1e-9:
                        self.fail("order %d: log p(%s | %r) = %r, oracle %r" % (order, word, context, actual, expected))


class TestPerplexity(StpipeTestCase):

    def test_uniform_model(self):
        log_quarter = math.log10(0.25)
        lm = ngramlm.NGramModel(1, {(u"a",): log_quarter, (u"b",): log_quarter, (u"c",): log_quarter, (EOS,): log_quarter})
        self.assertAlmostEqual(lm.perplexity([[u"a", u"b"], [u"c"]]), 4.0)

    def test_training_data_beats_uniform(self):
        corpus = asr_sentences(100, seed=5)
        lm = ngramlm.train_lm(corpus, order=1)
        vocabulary = len(lm.vocab - set([BOS, UNK]))
        self.assertLessEqual(lm.perplexity(corpus), vocabulary)


class TestArpa(StpipeTestCase):

    def test_save_and_load(self):
        corpus = asr_sentences(80, seed=6)
        lm = ngramlm.train_lm(corpus, order=3, prune_counts=[0, 0, 1])
        path = self.get_test_temp_file("model.arpa")
        lm.save(path)

        loaded = ngramlm.NGramModel.load(path)
        self.assertEqual(loaded.order, 3)
        self.assertEqual(set(loaded.probs), set(lm.probs))
        for tokens in corpus[:20]:
            self.assertAlmostEqual(loaded.score(tokens), lm.score(tokens), places=6)

    def test_load_rejects_bad_files(self):
        path = self.write_temp_lines("truncated.arpa", [u"\\data\\", u"ngram 1=2", u"", u"\\1-grams:", u"-0.3\ta"])
        self.assertRaises(ModelFormatError, ngramlm.NGramModel.load, path)

        path = self.write_temp_lines("count.arpa", [
            u"\\data\\", u"ngram 1=3", u"", u"\\1-grams:", u"-0.3\ta", u"-0.3\tb", u"", u"\\end\\",
        ])
        self.assertRaises(ModelFormatError, ngramlm.NGramModel.load, path)

        path = self.write_temp_lines("header.arpa", [u"ngram 1=1"])
        with self.assertRaises(ModelFormatError) as context:
            ngramlm.NGramModel.load(path)
        self.assertEqual(context.exception.line_number, 1)


if __name__ == "__main__":
    unittest.main()
