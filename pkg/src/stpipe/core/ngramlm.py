""" Back-off n-gram language model: interpolated modified Kneser-Ney training with
count pruning, ARPA persistence, sentence scoring and perplexity.

Probabilities are stored ARPA style: every kept n-gram holds its interpolated
log10 probability and every context its log10 back-off weight, so scoring an
unseen n-gram is plain back-off chaining.
"""
import collections
import io
import logging
import math

from .exceptions import DegenerateCounts, EmptyCorpus, ModelFormatError

BOS = u"<s>"
EOS = u"</s>"
UNK = u"<unk>"

# log10 probability given to symbols that are never predicted.
LOG_ZERO = -99.0
FALLBACK_DISCOUNT = 0.75
MAX_ORDER = 5


def _log10(value):
    return math.log10(value) if value > 0 else LOG_ZERO


def estimate_discounts(adjusted_counts):
    """ The three modified Kneser-Ney discounts for one order.

        Args:
            adjusted_counts (iterable): The counts used at that order.

        Raises:
            DegenerateCounts: count-of-counts leave a discount undefined or out of range.

        Returns:
            tuple: (D1, D2, D3+)
    """
    count_of_counts = collections.Counter(count for count in adjusted_counts if 1 <= count <= 4)
    n1, n2, n3, n4 = [count_of_counts[count] for count in (1, 2, 3, 4)]
    if not (n1 and n2 and n3):
        raise DegenerateCounts("count-of-counts n1=%d n2=%d n3=%d n4=%d" % (n1, n2, n3, n4))

    y = float(n1) / (n1 + 2 * n2)
    discounts = (
        1.0 - 2.0 * y * n2 / n1,
        2.0 - 3.0 * y * n3 / n2,
        3.0 - 4.0 * y * n4 / n3,
    )
    for index, discount in enumerate(discounts):
        if not 0.0 < discount < index + 1:
            raise DegenerateCounts("D%d=%r out of range (n1=%d n2=%d n3=%d n4=%d)"
                                   % (index + 1, discount, n1, n2, n3, n4))
    return discounts


def _discount(discounts, count):
    if count <= 0:
        return 0.0
    return discounts[min(count, 3) - 1]


class NGramModel(object):
    """ Immutable back-off model.

        Args:
            order (int): Highest n-gram length.
            probs (dict): n-gram tuple -> log10 probability.
            backoffs (dict): context tuple -> log10 back-off weight. Missing means 0.0.
    """

    def __init__(self, order, probs, backoffs=None):
        self.order = order
        self.probs = probs
        self.backoffs = backoffs or {}
        if (UNK,) not in self.probs:
            # Closed-vocabulary ARPA files; unknown words get no mass.
            self.probs[(UNK,)] = LOG_ZERO
        self.vocab = frozenset(gram[0] for gram in probs if len(gram) == 1)

    def __repr__(self):
        counts = collections.Counter(len(gram) for gram in self.probs)
        return "NGramModel(order=%d, ngrams=%s)" % (
            self.order, ", ".join("%d:%d" % (length, counts[length]) for length in sorted(counts))
        )

    def contexts(self):
        """ Every context the model can condition on: the empty one plus each
            stored n-gram shorter than the order that is not sentence-final.
        """
        yield ()
        for gram in self.probs:
            if len(gram) < self.order and gram[-1] != EOS:
                yield gram

    def log_prob(self, context, word):
        """ log10 p(word | context) by back-off chaining. Out-of-vocabulary words
            are scored as UNK.
        """
        if word not in self.vocab:
            word = UNK
        if self.order > 1:
            context = tuple(
                token if token in self.vocab else UNK for token in tuple(context)[-(self.order - 1):]
            )
        else:
            context = ()

        weight = 0.0
        for start in range(len(context) + 1):
            history = context[start:]
            value = self.probs.get(history + (word,))
            if value is not None:
                return weight + value
            weight += self.backoffs.get(history, 0.0)
        # Unigrams always cover the vocabulary.
        raise AssertionError("Unigram missing for %r" % word)

    def score(self, tokens, bos=True, eos=True):
        """ Total log10 probability of a sentence.

            Kwargs:
                bos (bool): Condition the first word on the sentence-begin symbol.
                eos (bool): Include the probability of the sentence end.
        """
        context = [BOS] if bos else []
        total = 0.0
        words = list(tokens) + ([EOS] if eos else [])
        for word in words:
            total += self.log_prob(context, word)
            context.append(word)
        return total

    def perplexity(self, corpus):
        """ 10 ** (-total log10 prob / predicted events). The sentence end counts once
            per sentence.

            Raises:
                EmptyCorpus: No sentences.
        """
        total = 0.0
        events = 0
        for tokens in corpus:
            tokens = list(tokens)
            total += self.score(tokens)
            events += len(tokens) + 1
        if not events:
            raise EmptyCorpus("Cannot compute perplexity of an empty corpus.")
        return 10.0 ** (-total / events)

    def write_arpa(self, handle):
        by_order = collections.defaultdict(list)
        for gram in self.probs:
            by_order[len(gram)].append(gram)

        handle.write(u"\\data\\\n")
        for length in range(1, self.order + 1):
            handle.write(u"ngram %d=%d\n" % (length, len(by_order[length])))
        for length in range(1, self.order + 1):
            handle.write(u"\n\\%d-grams:\n" % length)
            for gram in sorted(by_order[length]):
                line = u"%.10g\t%s" % (self.probs[gram], u" ".join(gram))
                if gram in self.backoffs:
                    line += u"\t%.10g" % self.backoffs[gram]
                handle.write(line + u"\n")
        handle.write(u"\n\\end\\\n")

    def save(self, path):
        with io.open(path, "w", encoding="utf-8", newline="\n") as handle:
            self.write_arpa(handle)

    @classmethod
    def read_arpa(cls, lines, path=None, first_line_number=1):
        """ Parses ARPA text.

            Args:
                lines (iterable): Lines of the ARPA section, starting at "\\data\\".

            Raises:
                ModelFormatError: Malformed header, section or entry.
        """
        declared = {}
        probs = {}
        backoffs = {}
        section = None
        seen_data = False
        line_number = first_line_number - 1

        for line_number, line in enumerate(lines, start=first_line_number):
            line = line.strip()
            if not line:
                continue
            if line == u"\\data\\":
                seen_data = True
                section = "data"
                continue
            if not seen_data:
                raise ModelFormatError("Expected \\data\\ header, got %r" % line, path=path, line_number=line_number)
            if line == u"\\end\\":
                section = "end"
                break
            if line.startswith(u"\\") and line.endswith(u"-grams:"):
                try:
                    section = int(line[1:-len(u"-grams:")])
                except ValueError:
                    raise ModelFormatError("Bad section header %r" % line, path=path, line_number=line_number)
                continue

            if section == "data":
                if not line.startswith(u"ngram ") or u"=" not in line:
                    raise ModelFormatError("Bad count line %r" % line, path=path, line_number=line_number)
                length, count = line[len(u"ngram "):].split(u"=", 1)
                try:
                    declared[int(length)] = int(count)
                except ValueError:
                    raise ModelFormatError("Bad count line %r" % line, path=path, line_number=line_number)
                continue

            if not isinstance(section, int):
                raise ModelFormatError("Entry outside an n-gram section: %r" % line, path=path, line_number=line_number)

            fields = line.split(u"\t") if u"\t" in line else line.split()
            if u"\t" in line:
                words = fields[1].split() if len(fields) > 1 else []
                extra = fields[2:]
            else:
                words = fields[1:1 + section]
                extra = fields[1 + section:]
            if len(words) != section or len(extra) > 1:
                raise ModelFormatError("Expected a %d-gram entry, got %r" % (section, line),
                                       path=path, line_number=line_number)
            try:
                gram = tuple(words)
                probs[gram] = float(fields[0])
                if extra:
                    backoffs[gram] = float(extra[0])
            except ValueError:
                raise ModelFormatError("Bad number in %r" % line, path=path, line_number=line_number)

        if section != "end":
            raise ModelFormatError("Missing \\end\\ marker", path=path, line_number=line_number)
        if not declared:
            raise ModelFormatError("No n-gram counts declared", path=path, line_number=first_line_number)

        found = collections.Counter(len(gram) for gram in probs)
        for length, count in declared.items():
            if found[length] != count:
                raise ModelFormatError("Declared %d %d-grams, found %d" % (count, length, found[length]), path=path)
        return cls(max(declared), probs, backoffs)

    @classmethod
    def load(cls, path):
        with io.open(path, "r", encoding="utf-8") as handle:
            return cls.read_arpa(handle, path=path)


def _count_ngrams(corpus, order, progress_every):
    raw = [collections.Counter() for _ in range(order + 1)]
    sentences = 0
    for tokens in corpus:
        padded = (BOS,) + tuple(tokens) + (EOS,)
        for length in range(1, order + 1):
            counts = raw[length]
            for start in range(len(padded) - length + 1):
                counts[padded[start:start + length]] += 1
        sentences += 1
        if progress_every and sentences % progress_every == 0:
            logging.info("LM: counted %d sentences" % sentences)
    return raw, sentences


def _adjusted_counts(raw, order):
    """ Raw counts at the top order and for n-grams starting with BOS, continuation
        counts (number of distinct left neighbours) everywhere else.
    """
    adjusted = [None] * (order + 1)
    adjusted[order] = raw[order]
    for length in range(order - 1, 0, -1):
        continuations = collections.Counter()
        for gram in raw[length + 1]:
            continuations[gram[1:]] += 1
        adjusted[length] = collections.Counter(dict(
            (gram, count if gram[0] == BOS else continuations[gram]) for gram, count in raw[length].items()
        ))
    return adjusted


def _prune(raw, order, prune_counts):
    kept = [None] * (order + 1)
    kept[1] = set(gram for gram, count in raw[1].items() if count > prune_counts[0])
    kept[1].update([(BOS,), (EOS,)])
    for length in range(2, order + 1):
        threshold = prune_counts[length - 1]
        kept[length] = set(
            gram for gram, count in raw[length].items()
            if count > threshold and gram[:-1] in kept[length - 1] and gram[1:] in kept[length - 1]
        )
    return kept


def train_lm(corpus, order=4, prune_counts=None, progress_every=100000):
    """ Trains an interpolated modified Kneser-Ney model.

        Args:
            corpus (iterable): Token sequences.

        Kwargs:
            order (int): 1 to 5. Order 1 is plain maximum likelihood.
            prune_counts (list): Per order, n-grams with a raw count <= the value are dropped.
            progress_every (int): Log progress every this many sentences.

        Raises:
            EmptyCorpus: No sentences.

        Returns:
            NGramModel
    """
    if not 1 <= order <= MAX_ORDER:
        raise ValueError("order must be in [1, %d], got %r" % (MAX_ORDER, order))
    prune_counts = list(prune_counts) if prune_counts is not None else [0] * order
    if len(prune_counts) != order:
        raise ValueError("prune_counts needs %d values, got %r" % (order, prune_counts))

    raw, sentences = _count_ngrams(corpus, order, progress_every)
    if not sentences:
        raise EmptyCorpus("Cannot train a language model on an empty corpus.")
    logging.info("LM: %d sentences, n-gram types per order %s"
                 % (sentences, [len(raw[length]) for length in range(1, order + 1)]))

    kept = _prune(raw, order, prune_counts)
    probs = {}
    backoffs = {}

    words = sorted(gram for gram in kept[1] if gram != (BOS,))
    if (UNK,) not in kept[1]:
        words.append((UNK,))

    if order == 1:
        total = float(sum(raw[1][gram] for gram in words))
        for gram in words:
            probs[gram] = _log10(raw[1][gram] / total)
        probs[(BOS,)] = LOG_ZERO
        return NGramModel(order, probs, backoffs)

    adjusted = _adjusted_counts(raw, order)

    discounts = [None] * (order + 1)
    for length in range(1, order + 1):
        counts = [count for gram, count in adjusted[length].items() if gram != (BOS,)]
        try:
            discounts[length] = estimate_discounts(counts)
        except DegenerateCounts as e:
            logging.warning("LM: order %d discounts degenerate (%s); using %s."
                            % (length, e, FALLBACK_DISCOUNT))
            discounts[length] = (FALLBACK_DISCOUNT,) * 3

    # Unigrams: discounted continuation counts interpolated with the uniform distribution.
    unigram_counts = dict((gram, adjusted[1][gram]) for gram in words)
    total = float(sum(unigram_counts.values()))
    leftover = sum(_discount(discounts[1], count) for count in unigram_counts.values()) / total
    for gram, count in unigram_counts.items():
        probs[gram] = _log10(max(count - _discount(discounts[1], count), 0.0) / total + leftover / len(words))
    probs[(BOS,)] = LOG_ZERO

    lower = NGramModel(1, dict(probs))
    for length in range(2, order + 1):
        by_context = collections.defaultdict(list)
        for gram in kept[length]:
            by_context[gram[:-1]].append(gram[-1])

        for context in sorted(by_context):
            continuations = sorted(by_context[context])
            counts = [adjusted[length][context + (word,)] for word in continuations]
            total = float(sum(counts))
            gamma = sum(_discount(discounts[length], count) for count in counts) / total
            for word, count in zip(continuations, counts):
                lower_prob = 10.0 ** lower.log_prob(context[1:], word)
                probs[context + (word,)] = _log10(
                    (count - _discount(discounts[length], count)) / total + gamma * lower_prob
                )
            backoffs[context] = _log10(gamma)

        lower = NGramModel(length, dict(probs), dict(backoffs))
        logging.info("LM: estimated %d %d-grams" % (len(kept[length]), length))

    return NGramModel(order, probs, backoffs)


def score(lm, tokens, bos=True, eos=True):
    return lm.score(tokens, bos=bos, eos=eos)


def perplexity(lm, corpus):
    return lm.perplexity(corpus)
