import unittest

from stpipe.core import textnorm

from . import corpus_factory
from .stpipe_testcase import StpipeTestCase

_UNITS = dict((word, value) for value, word in enumerate([
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
    "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
    "seventeen", "eighteen", "nineteen",
]))
_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}


def words_to_number(words):
    """ Reads cardinal words back into an integer, independently of the verbalizer.
    """
    total = 0
    current = 0
    for word in words:
        if word == "and":
            continue
        if word in _UNITS:
            current += _UNITS[word]
        elif word in _TENS:
            current += _TENS[word]
        elif word == "hundred":
            current *= 100
        elif word == "thousand":
            total += current * 1000
            current = 0
        elif word == "million":
            total += current * 1000000
            current = 0
        else:
            raise ValueError(word)
    return total + current


class TestTokenize(StpipeTestCase):

    def test_normalize_punct(self):
        self.assertEqual(textnorm.normalize_punct(u"“Hello” \t world … "), u'"Hello" world ...')
        self.assertEqual(textnorm.normalize_punct(u"it’s – fine"), u"it's - fine")

    def test_normalize_punct_idempotent(self):
        for line in corpus_factory.english_corpus(50, seed=3):
            once = textnorm.normalize_punct(line)
            self.assertEqual(textnorm.normalize_punct(once), once)

    def test_tokenize_example_sentence(self):
        tokens = textnorm.tokenize(u"Because in the summer of 2006, the E.U. Commission tabled a directive.")
        self.assertEqual(tokens, [
            u"Because", u"in", u"the", u"summer", u"of", u"2006", u",", u"the", u"E.U.",
            u"Commission", u"tabled", u"a", u"directive", u".",
        ])

    def test_tokenize_keeps_numbers_hyphens_and_splits_clitics(self):
        self.assertEqual(textnorm.tokenize(u"It costs 3.5 or 1,000 euros."),
                         [u"It", u"costs", u"3.5", u"or", u"1,000", u"euros", u"."])
        self.assertEqual(textnorm.tokenize(u"a well-known place"), [u"a", u"well-known", u"place"])
        self.assertEqual(textnorm.tokenize(u"don't stop"), [u"don", u"'t", u"stop"])
        self.assertEqual(textnorm.tokenize(u"(quietly)"), [u"(", u"quietly", u")"])
        self.assertEqual(textnorm.tokenize(u""), [])

    def test_detokenize(self):
        self.assertEqual(textnorm.detokenize([u"Hello", u",", u"world", u"!"]), u"Hello, world!")
        self.assertEqual(textnorm.detokenize([u"He", u"said", u"(", u"quietly", u")", u"it", u"'s", u"fine", u"."]),
                         u"He said (quietly) it's fine.")
        self.assertEqual(textnorm.detokenize([]), u"")

    def test_detokenize_then_tokenize(self):
        for line in corpus_factory.english_corpus(200, seed=5):
            tokens = textnorm.tokenize(textnorm.normalize_punct(line))
            self.assertEqual(textnorm.tokenize(textnorm.detokenize(tokens)), tokens)

    def test_lowercase(self):
        self.assertEqual(textnorm.lowercase([u"The", u"E.U.", u"Stasi"]), [u"the", u"e.u.", u"stasi"])

    def test_strip_punct(self):
        self.assertEqual(
            textnorm.strip_punct([u"e.u.", u"100%", u"'t", u",", u"well-known", u"."]),
            [u"e", u"u", u"100", u"'t", u"well", u"known"],
        )
        self.assertEqual(textnorm.strip_punct([u"...", u"!"]), [])


class TestNumbers(StpipeTestCase):

    def test_number_to_words(self):
        self.assertEqual(textnorm.number_to_words(0), ["zero"])
        self.assertEqual(textnorm.number_to_words(21), ["twenty", "one"])
        self.assertEqual(textnorm.number_to_words(100), ["one", "hundred"])
        self.assertEqual(textnorm.number_to_words(342), ["three", "hundred", "and", "forty", "two"])
        self.assertEqual(textnorm.number_to_words(2006), ["two", "thousand", "and", "six"])
        self.assertEqual(textnorm.number_to_words(1000005), ["one", "million", "and", "five"])

    def test_number_to_words_out_of_range(self):
        self.assertRaises(ValueError, textnorm.number_to_words, -1)
        self.assertRaises(ValueError, textnorm.number_to_words, 10 ** 9)

    def test_number_round_trip_below_one_million(self):
        for number in range(10 ** 6):
            words = textnorm.number_to_words(number)
            if words_to_number(words) != number:
                self.fail("%d verbalized as %r" % (number, words))

    def test_verbalize_numbers(self):
        self.assertEqual(textnorm.verbalize_numbers([u"Room", u"101"]), [u"Room", u"one", u"hundred", u"and", u"one"])
        self.assertEqual(textnorm.verbalize_numbers([u"3.5"]), [u"three", u"point", u"five"])
        self.assertEqual(textnorm.verbalize_numbers([u"1,000"]), [u"one", u"thousand"])
        self.assertEqual(textnorm.verbalize_numbers([u"mp3", u"E.U."]), [u"mp3", u"E.U."])
        self.assertEqual(textnorm.verbalize_numbers([u"1234567890"]), [
            u"one", u"two", u"three", u"four", u"five", u"six", u"seven", u"eight", u"nine", u"zero",
        ])

    def test_fold_digits(self):
        self.assertEqual(textnorm.fold_digits(u"٢٠٠٦"), u"2006")
        self.assertEqual(textnorm.fold_digits(u"mp３"), u"mp3")
        self.assertEqual(textnorm.fold_digits(u"x²"), u"x2")
        self.assertEqual(textnorm.fold_digits(u"Straße"), u"Straße")
        self.assertEqual(textnorm.fold_digits(u"½"), u"½")


if __name__ == "__main__":
    unittest.main()
