""" Case restoration for lowercased output: a table of observed casings per
lowercase word, disambiguated by a cased n-gram model (trigram by default) with Viterbi search.
"""
import collections
import io
import logging

from .exceptions import EmptyCorpus, ModelFormatError
from .ngramlm import BOS, EOS, NGramModel, train_lm

MODEL_HEADER = u"#recaser v1"
CONTEXT_ORDER = 3


def capitalize_first_letter(token):
    """ Uppercases the first alphabetic character of token when doing so keeps
        the lowercase form intact. Returns the token unchanged otherwise.
    """
    for index, char in enumerate(token):
        if char.isalpha():
            upper = char.upper()
            if len(upper) == 1 and upper.lower() == char.lower():
                return token[:index] + upper + token[index + 1:]
            return token
    return token


class RecaserModel(object):
    """ Args:
            form_table (dict): lowercase token -> Counter of cased forms.
            context_lm (NGramModel): Cased context model, order 2 or more.
    """

    def __init__(self, form_table, context_lm):
        self.form_table = form_table
        self.context_lm = context_lm
        self._alternatives = {}

    def __repr__(self):
        return "RecaserModel(forms=%d, lm=%r)" % (len(self.form_table), self.context_lm)

    def alternatives(self, token):
        """ Cased forms for token, most frequent first. Unknown tokens only map to themselves.
        """
        cached = self._alternatives.get(token)
        if cached is None:
            forms = self.form_table.get(token)
            if forms:
                cached = [form for form, _ in sorted(forms.items(), key=lambda item: (-item[1], item[0]))]
            else:
                cached = [token]
            self._alternatives[token] = cached
        return cached

    def save(self, path):
        with io.open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(MODEL_HEADER + u"\n")
            for lower in sorted(self.form_table):
                for form, count in sorted(self.form_table[lower].items()):
                    handle.write(u"%s\t%s\t%d\n" % (lower, form, count))
            self.context_lm.write_arpa(handle)

    @classmethod
    def load(cls, path):
        with io.open(path, "r", encoding="utf-8") as handle:
            lines = handle.read().split(u"\n")

        if not lines or lines[0].rstrip(u"\r") != MODEL_HEADER:
            raise ModelFormatError("Expected header %r" % MODEL_HEADER, path=path, line_number=1)

        form_table = collections.defaultdict(collections.Counter)
        for index in range(1, len(lines)):
            line = lines[index].rstrip(u"\r")
            line_number = index + 1
            if line == u"\\data\\":
                lm = NGramModel.read_arpa(lines[index:], path=path, first_line_number=line_number)
                if lm.order < 2:
                    raise ModelFormatError("Context model must be order 2 or more, got %d" % lm.order,
                                           path=path, line_number=line_number)
                return cls(dict(form_table), lm)
            if not line:
                continue
            parts = line.split(u"\t")
            if len(parts) != 3:
                raise ModelFormatError("Expected 'lower<TAB>cased<TAB>count', got %r" % line,
                                       path=path, line_number=line_number)
            lower, form, count = parts
            try:
                count = int(count)
            except ValueError:
                raise ModelFormatError("Bad count %r" % count, path=path, line_number=line_number)
            if count <= 0 or form.lower() != lower:
                raise ModelFormatError("Invalid form entry %r" % line, path=path, line_number=line_number)
            form_table[lower][form] = count

        raise ModelFormatError("Missing embedded ARPA section", path=path, line_number=len(lines))


def train_recaser(corpus, order=CONTEXT_ORDER):
    """ Tabulates cased forms and trains the cased context model.

        Args:
            corpus (iterable): Cased token sequences.

        Kwargs:
            order (int): Order of the context model, at least 2.

        Raises:
            EmptyCorpus: No tokens.
    """
    if order < 2:
        raise ValueError("The recaser context model needs order >= 2, got %r" % order)
    sentences = [list(tokens) for tokens in corpus]
    form_table = collections.defaultdict(collections.Counter)
    for tokens in sentences:
        for token in tokens:
            form_table[token.lower()][token] += 1
    if not form_table:
        raise EmptyCorpus("Cannot train a recaser on a corpus without tokens.")

    logging.info("Recaser: %d lowercase types from %d sentences." % (len(form_table), len(sentences)))
    context_lm = train_lm(sentences, order=order, prune_counts=[0] * order)
    return RecaserModel(dict(form_table), context_lm)


def best_casing(model, tokens):
    """ Viterbi search over the cased alternatives of each token.

        Returns:
            tuple: (cased tokens, log10 score of the path including the sentence end)
    """
    lm = model.context_lm
    history = lm.order - 1

    # state: last (order - 1) words of the path -> (score, path)
    states = collections.OrderedDict()
    states[(BOS,)] = (0.0, [])
    for token in tokens:
        expanded = collections.OrderedDict()
        for state, (score, path) in states.items():
            for form in model.alternatives(token):
                candidate = score + lm.log_prob(state, form)
                key = (state + (form,))[-history:]
                if key not in expanded or candidate > expanded[key][0]:
                    expanded[key] = (candidate, path + [form])
        states = expanded

    best = None
    for state, (score, path) in states.items():
        final = score + lm.log_prob(state, EOS)
        if best is None or final > best[0]:
            best = (final, path)
    return best[1], best[0]


def recase(model, tokens):
    """ Restores case in a lowercase token sequence. Tokens the model never saw
        pass through; the first alphabetic token then gets an uppercase first letter.
    """
    tokens = list(tokens)
    if not tokens:
        return []

    cased, _ = best_casing(model, tokens)
    for index, token in enumerate(cased):
        if any(char.isalpha() for char in token):
            cased[index] = capitalize_first_letter(token)
            break
    return cased
