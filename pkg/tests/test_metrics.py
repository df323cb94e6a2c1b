import functools
import itertools
import json
import math
import unittest
import warnings

import numpy

from stpipe.core import metrics, textnorm
from stpipe.core.exceptions import AlignmentMismatch, EmptyReference, ZeroPrecision

from . import corpus_factory
from .stpipe_testcase import StpipeTestCase


def enumerated_distance(ref, hyp):
    """ Minimum over every edit script, found by plain recursion without a table.
    """
    if not ref:
        return len(hyp)
    if not hyp:
        return len(ref)
    return min(
        enumerated_distance(ref[1:], hyp[1:]) + (ref[0] != hyp[0]),
        enumerated_distance(ref[1:], hyp) + 1,
        enumerated_distance(ref, hyp[1:]) + 1,
    )


def memoized_table(ref, hyp):
    """ Every prefix-pair distance, each the minimum over all edit scripts,
        with repeated subproblems cached.
    """
    @functools.lru_cache(maxsize=None)
    def distance(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            distance(i - 1, j - 1) + (ref[i - 1] != hyp[j - 1]),
            distance(i - 1, j) + 1,
            distance(i, j - 1) + 1,
        )
    return [[distance(i, j) for j in range(len(hyp) + 1)] for i in range(len(ref) + 1)]


def first_occurrence_strings(length, symbols=3):
    """ One string per relabeling class: symbol k appears only after 0..k-1 did.
    """
    def extend(prefix, top):
        if len(prefix) == length:
            yield prefix
            return
        for symbol in range(min(top + 2, symbols)):
            for string in extend(prefix + (symbol,), max(top, symbol)):
                yield string
    return extend((), -1)


def list_distance(ref, hyp):
    previous = list(range(len(hyp) + 1))
    for i, ref_token in enumerate(ref, start=1):
        current = [i]
        for j, hyp_token in enumerate(hyp, start=1):
            current.append(min(previous[j - 1] + (ref_token != hyp_token), previous[j] + 1, current[j - 1] + 1))
        previous = current
    return previous[-1]


def perturb(tokens, rng):
    result = []
    for token in tokens:
        roll = rng.random()
        if roll < 0.1:
            continue
        if roll < 0.2:
            result.append(u"uh")
        elif roll < 0.3:
            result.append(token.upper())
        else:
            result.append(token)
    return result


class TestWer(StpipeTestCase):

    def test_example(self):
        report = metrics.wer([[u"a", u"x", u"c"]], [[u"a", u"b", u"c", u"d"]])
        self.assertEqual(report.wer, 0.5)
        self.assertEqual(report.edit_counts, metrics.EditCounts(1, 1, 0))
        self.assertEqual(report.n_sentences, 1)

    def test_insertions_can_exceed_one(self):
        report = metrics.wer([[u"a", u"b", u"c"]], [[u"a"]])
        self.assertEqual(report.wer, 2.0)
        self.assertEqual(report.edit_counts, metrics.EditCounts(0, 0, 2))

    def test_identity(self):
        corpus = corpus_factory.tokenized_corpus(50, seed=1)
        self.assertEqual(metrics.wer(corpus, corpus).wer, 0.0)

    def test_errors(self):
        self.assertRaises(EmptyReference, metrics.wer, [[u"a"]], [[]])
        with self.assertRaises(AlignmentMismatch) as context:
            metrics.wer([[u"a"], [u"b"]], [[u"a"]])
        self.assertEqual(context.exception.line_number, 2)

    def test_exhaustive_short_pairs(self):
        alphabet = [u"a", u"b", u"c"]
        for ref_length in range(0, 7):
            for hyp_length in range(0, 7 - ref_length):
                for ref in itertools.product(alphabet, repeat=ref_length):
                    for hyp in itertools.product(alphabet, repeat=hyp_length):
                        expected = enumerated_distance(ref, hyp)
                        counts = metrics.align(list(ref), list(hyp))
                        self.assertEqual(sum(counts), expected, (ref, hyp))
                        self.assertEqual(counts.deletions - counts.insertions, ref_length - hyp_length)
                        self.assertEqual(metrics.edit_distance_matrix(list(ref), list(hyp))[-1, -1], expected)

    def test_every_pair_up_to_combined_length_twelve(self):
        # Distances only compare tokens for equality, so one string per relabeling
        # class stands for all of them. Each full table holds every prefix pair, so
        # the pairs of combined length exactly 12 cover all shorter ones.
        alphabet = [u"a", u"b", u"c"]
        tables = 0
        for string in first_occurrence_strings(12):
            tokens = [alphabet[symbol] for symbol in string]
            for split in range(len(tokens) + 1):
                ref, hyp = tokens[:split], tokens[split:]
                if metrics.edit_distance_matrix(ref, hyp).tolist() != memoized_table(ref, hyp):
                    self.fail("Edit distances differ for ref=%r hyp=%r" % (ref, hyp))
                tables += 1
        self.assertEqual(tables, 13 * (1 + 2047 + 86526))

    def test_random_pairs(self):
        rng = numpy.random.default_rng(7)
        alphabet = [u"a", u"b", u"c", u"d"]
        for _ in range(1000):
            ref = [alphabet[index] for index in rng.integers(len(alphabet), size=int(rng.integers(1, 31)))]
            hyp = [alphabet[index] for index in rng.integers(len(alphabet), size=int(rng.integers(0, 31)))]
            expected = list_distance(ref, hyp)
            self.assertEqual(sum(metrics.align(ref, hyp)), expected)
            self.assertAlmostEqual(metrics.wer([hyp], [ref]).wer, expected / float(len(ref)))


class TestBleu(StpipeTestCase):

    def test_example(self):
        report = metrics.bleu([[u"a", u"b", u"c", u"d", u"f"]], [[u"a", u"b", u"c", u"d", u"e", u"f"]])
        self.assertEqual(report.bleu, 57.89)
        self.assertIsNone(report.bleu_lc)
        expected = [1.0, 0.75, 2 / 3.0, 0.5]
        for actual, wanted in zip(report.ngram_precisions, expected):
            self.assertAlmostEqual(actual, wanted)
        self.assertAlmostEqual(report.brevity_penalty, math.exp(-0.2))
        self.assertEqual((report.hyp_length, report.ref_length), (5, 6))

    def test_identity(self):
        corpus = corpus_factory.tokenized_corpus(100, seed=2)
        self.assertEqual(metrics.bleu(corpus, corpus).bleu, 100.0)

    def test_case_insensitive(self):
        corpus = corpus_factory.tokenized_corpus(100, seed=3)
        lowered = [textnorm.lowercase(tokens) for tokens in corpus]
        self.assertEqual(metrics.bleu(lowered, corpus, case_sensitive=False).bleu_lc, 100.0)
        self.assertLess(metrics.bleu(lowered, corpus).bleu, 100.0)

    def test_lowercase_score_matches_lowercased_inputs(self):
        rng = numpy.random.default_rng(5)
        for seed in range(100):
            ref = corpus_factory.tokenized_corpus(10, seed=seed)
            hyp = [perturb(tokens, rng) for tokens in ref]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ZeroPrecision)
                expected = metrics.bleu(
                    [textnorm.lowercase(tokens) for tokens in hyp],
                    [textnorm.lowercase(tokens) for tokens in ref],
                ).bleu
                self.assertEqual(metrics.bleu(hyp, ref, case_sensitive=False).bleu_lc, expected)

    def test_zero_precision_warns(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = metrics.bleu([[u"a"]], [[u"a"]])
        self.assertEqual(report.bleu, 0.0)
        self.assertTrue(any(issubclass(warning.category, ZeroPrecision) for warning in caught))

    def test_smoothing(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = metrics.bleu([[u"a"]], [[u"a"]], smooth=True)
        self.assertEqual(report.bleu, 100.0)
        self.assertFalse(caught)

    def test_alignment(self):
        self.assertRaises(AlignmentMismatch, metrics.bleu, [[u"a"]], [])


class TestEvalReport(StpipeTestCase):

    def test_evaluate(self):
        ref = corpus_factory.tokenized_corpus(30, seed=4)
        hyp = [textnorm.lowercase(tokens) for tokens in ref]
        report = metrics.evaluate(hyp, ref, name="lowercased", stage="ted:evaluate")

        self.assertEqual(report.bleu_lc, 100.0)
        self.assertLess(report.bleu, 100.0)
        self.assertGreater(report.wer, 0.0)
        self.assertEqual(report.n_sentences, 30)
        self.assertEqual((report.name, report.stage), ("lowercased", "ted:evaluate"))

    def test_evaluate_without_reference_tokens(self):
        report = metrics.evaluate([[]], [[]], smooth=True)
        self.assertIsNone(report.wer)

    def test_dict_round_trip(self):
        ref = corpus_factory.tokenized_corpus(20, seed=6)
        report = metrics.evaluate(ref, ref, name="identity")
        restored = metrics.EvalReport.from_dict(json.loads(report.to_json()))
        self.assertEqual(restored, report)
        self.assertEqual(restored.edit_counts, metrics.EditCounts(0, 0, 0))

    def test_unknown_field(self):
        self.assertRaises(TypeError, metrics.EvalReport, blue=1.0)

    def test_format_table(self):
        reports = [
            metrics.EvalReport(name="baseline", bleu=21.5, bleu_lc=22.25, wer=0.3, n_sentences=10),
            metrics.EvalReport(stage="ted:evaluate", bleu=9.0),
        ]
        lines = metrics.format_table(reports).splitlines()
        self.assertEqual(len(lines), 4)
        self.assertTrue(lines[0].startswith("System"))
        self.assertTrue(set(lines[1]) <= set("- "))
        self.assertIn("21.50", lines[2])
        self.assertIn("0.3000", lines[2])
        self.assertTrue(lines[3].startswith("ted:evaluate"))
        self.assertTrue(lines[3].endswith("-"))


if __name__ == "__main__":
    unittest.main()
