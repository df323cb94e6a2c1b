""" Byte-pair encoding: learn a merge list over a (joint) tokenized corpus, apply it
with "@@" continuation markers, and revert it.
"""
import collections
import heapq
import io
import logging

from .exceptions import DanglingMarker, EmptyCorpus, ModelFormatError

CONTINUATION_MARKER = u"@@"
END_OF_WORD = u"</w>"
MODEL_HEADER = u"#bpe v1"


def _word_pairs(symbols):
    return collections.Counter(zip(symbols[:-1], symbols[1:]))


def _merge_symbols(symbols, pair):
    """ Replaces every non-overlapping occurrence of pair, scanning left to right.
    """
    left, right = pair
    merged = []
    index = 0
    while index < len(symbols):
        if index < len(symbols) - 1 and symbols[index] == left and symbols[index + 1] == right:
            merged.append(left + right)
            index += 2
        else:
            merged.append(symbols[index])
            index += 1
    return tuple(merged)


class BpeModel(object):
    """ Ordered merge list. The vocabulary is every initial character seen in
        training plus every merged symbol.
    """

    def __init__(self, merges, vocab=None, frequencies=None):
        self.merges = [tuple(pair) for pair in merges]
        self.ranks = dict((pair, rank) for rank, pair in enumerate(self.merges))
        if len(self.ranks) != len(self.merges):
            raise ModelFormatError("Duplicate merge pair in BPE model.")

        self.vocab = set(vocab or ())
        for left, right in self.merges:
            self.vocab.update((left, right, left + right))

        # Pair frequency at the time each merge was chosen. Only known after learning.
        self.frequencies = list(frequencies) if frequencies is not None else None
        self._cache = {}

    def __repr__(self):
        return "BpeModel(merges=%d)" % len(self.merges)

    def segment(self, word):
        """ Segments one word into subword strings, without markers.
        """
        cached = self._cache.get(word)
        if cached is not None:
            return cached

        symbols = tuple(word) + (END_OF_WORD,)
        last_rank = -1
        while len(symbols) > 1:
            # The next merge a full replay would apply: the lowest ranked pair
            # present that comes after the last applied merge.
            candidates = [
                self.ranks[pair] for pair in zip(symbols[:-1], symbols[1:])
                if self.ranks.get(pair, -1) > last_rank
            ]
            if not candidates:
                break
            last_rank = min(candidates)
            symbols = _merge_symbols(symbols, self.merges[last_rank])

        pieces = list(symbols)
        last = pieces[-1][:-len(END_OF_WORD)]
        if last:
            pieces[-1] = last
        else:
            pieces.pop()

        pieces = tuple(pieces)
        self._cache[word] = pieces
        return pieces

    def save(self, path):
        with io.open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(MODEL_HEADER + u"\n")
            for left, right in self.merges:
                handle.write(u"%s\t%s\n" % (left, right))

    @classmethod
    def load(cls, path):
        merges = []
        with io.open(path, "r", encoding="utf-8") as handle:
            header = handle.readline().rstrip(u"\r\n")
            if header != MODEL_HEADER:
                raise ModelFormatError(
                    "Expected header %r, got %r" % (MODEL_HEADER, header), path=path, line_number=1
                )
            for line_number, line in enumerate(handle, start=2):
                line = line.rstrip(u"\r\n")
                if not line:
                    continue
                parts = line.split(u"\t")
                if len(parts) != 2 or not parts[0] or not parts[1]:
                    raise ModelFormatError(
                        "Expected 'left<TAB>right', got %r" % line, path=path, line_number=line_number
                    )
                merges.append((parts[0], parts[1]))
        return cls(merges)


def learn_bpe(corpus, num_merges, min_frequency=2, progress_every=1000):
    """ Learns a BPE merge list.

        Args:
            corpus (iterable): Token sequences (lists of str).
            num_merges (int): Merge budget.

        Kwargs:
            min_frequency (int): Learning stops once the best pair occurs fewer times.
            progress_every (int): Log progress every this many merges.

        Raises:
            EmptyCorpus: The corpus contains no tokens.

        Returns:
            BpeModel: Merges in application order. Ties between equally frequent
                pairs go to the lexicographically smallest (left, right).
    """
    if num_merges < 1:
        raise ValueError("num_merges must be >= 1, got %r" % num_merges)

    word_counts = collections.Counter()
    for tokens in corpus:
        word_counts.update(tokens)
    if not word_counts:
        raise EmptyCorpus("Cannot learn BPE from a corpus without tokens.")

    # Sorted so that learning never depends on corpus iteration order.
    words = [tuple(word) + (END_OF_WORD,) for word in sorted(word_counts)]
    frequencies = [word_counts[word] for word in sorted(word_counts)]
    vocab = set(symbol for symbols in words for symbol in symbols[:-1])

    stats = collections.Counter()
    where = collections.defaultdict(set)
    for index, symbols in enumerate(words):
        for pair, count in _word_pairs(symbols).items():
            stats[pair] += count * frequencies[index]
            where[pair].add(index)

    heap = [(-count, pair) for pair, count in stats.items()]
    heapq.heapify(heap)

    merges = []
    merge_frequencies = []
    while len(merges) < num_merges and heap:
        negative_count, pair = heapq.heappop(heap)
        count = -negative_count
        if stats.get(pair, 0) != count:
            # Stale entry.
            continue
        if count < min_frequency:
            break

        merges.append(pair)
        merge_frequencies.append(count)

        touched = set()
        for index in sorted(where.pop(pair, ())):
            old_symbols = words[index]
            new_symbols = _merge_symbols(old_symbols, pair)
            if new_symbols == old_symbols:
                continue
            frequency = frequencies[index]
            for old_pair, old_count in _word_pairs(old_symbols).items():
                stats[old_pair] -= old_count * frequency
                touched.add(old_pair)
                if old_pair in where:
                    where[old_pair].discard(index)
            for new_pair, new_count in _word_pairs(new_symbols).items():
                stats[new_pair] += new_count * frequency
                touched.add(new_pair)
                where[new_pair].add(index)
            words[index] = new_symbols

        for touched_pair in touched:
            touched_count = stats.get(touched_pair, 0)
            if touched_count <= 0:
                stats.pop(touched_pair, None)
                where.pop(touched_pair, None)
            else:
                heapq.heappush(heap, (-touched_count, touched_pair))

        if progress_every and len(merges) % progress_every == 0:
            logging.info("BPE: learned %d merges (last %r, frequency %d)" % (len(merges), pair, count))

    logging.info("BPE: learned %d merges over %d word types." % (len(merges), len(words)))
    return BpeModel(merges, vocab=vocab, frequencies=merge_frequencies)


def apply_bpe(model, tokens):
    """ Segments each token with the model. Non-final subwords carry "@@".
    """
    segmented = []
    for token in tokens:
        pieces = model.segment(token)
        segmented.extend(piece + CONTINUATION_MARKER for piece in pieces[:-1])
        segmented.append(pieces[-1])
    return segmented


def revert_bpe(tokens):
    """ Joins every run of "@@"-marked tokens with the token that follows it.

        Raises:
            DanglingMarker: The sequence ends with a marked token.
    """
    words = []
    pending = []
    for token in tokens:
        if token.endswith(CONTINUATION_MARKER):
            pending.append(token[:-len(CONTINUATION_MARKER)])
        else:
            pending.append(token)
            words.append(u"".join(pending))
            pending = []
    if pending:
        raise DanglingMarker("Token sequence ends with a continuation marker: %r" % tokens[-1])
    return words
