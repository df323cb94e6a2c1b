""" ASR-like text simulation.

to_asr_format turns clean English tokens into the surface form a recognizer
emits (lowercase, no punctuation, numbers spelled out). generate_nbest then
corrupts that text with substitutions, deletions and insertions drawn from a
NoiseModel to produce a scored n-best list.

Every hypothesis draws from its own random stream keyed by (seed, utt_id, rank),
so output never depends on worker count or scheduling.
"""
import collections
import hashlib
import io
import logging
import multiprocessing
import os
import re

import numpy

from .exceptions import InvalidNoiseModel, ModelFormatError
from . import textnorm

DEFAULT_MIX = (0.6, 0.2, 0.2)
MAX_RANK_ERROR_RATE = 0.9
RANK_ESCALATION = 0.1
RANK_TIE_BREAK = 0.01

DEFAULT_CONFUSIONS_FILE = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data", "confusions.tsv")

_DIGIT_RUN_RE = re.compile(r"([0-9]+)")

Hypothesis = collections.namedtuple("Hypothesis", ["rank", "score", "tokens"])


class NBestList(object):
    """ Ranked hypotheses for one utterance.
    """

    def __init__(self, utt_id, hypotheses):
        self.utt_id = utt_id
        self.hypotheses = [Hypothesis(rank, score, list(tokens)) for rank, score, tokens in hypotheses]

    def __len__(self):
        return len(self.hypotheses)

    def __iter__(self):
        return iter(self.hypotheses)

    def __eq__(self, other):
        return (isinstance(other, NBestList) and self.utt_id == other.utt_id
                and self.hypotheses == other.hypotheses)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return "NBestList(utt_id=%r, hypotheses=%d)" % (self.utt_id, len(self.hypotheses))

    def best(self):
        return self.hypotheses[0]

    def validate(self):
        """ Raises:
                ValueError: ranks not contiguous from 1, scores increasing, or no hypotheses.
        """
        if not self.hypotheses:
            raise ValueError("N-best list %r has no hypotheses." % self.utt_id)
        for index, hypothesis in enumerate(self.hypotheses):
            if hypothesis.rank != index + 1:
                raise ValueError("N-best list %r: expected rank %d, got %d."
                                 % (self.utt_id, index + 1, hypothesis.rank))
            if index and hypothesis.score > self.hypotheses[index - 1].score:
                raise ValueError("N-best list %r: score increases at rank %d."
                                 % (self.utt_id, hypothesis.rank))


class NoiseModel(object):
    """ Parameters of the stochastic confusion model.

        Args:
            target_wer (float): Desired rank-1 word error rate, in [0, 1).

        Kwargs:
            mix (tuple): Shares of substitutions, deletions and insertions. Sums to 1.
            confusion_table (dict): Source n-gram tuple -> list of (replacement tuple, weight).
            filler_vocab (list): Tokens used for random substitutions and insertions.
            seed (int): Base seed, 0 <= seed < 2**64.
            error_rate (float): Per-token rate actually used at rank 1. Defaults to
                target_wer; calibrate_noise adjusts it.

        Raises:
            InvalidNoiseModel: Any parameter out of range.
    """

    def __init__(self, target_wer, mix=DEFAULT_MIX, confusion_table=None, filler_vocab=None,
                 seed=0, error_rate=None):
        self.target_wer = target_wer
        self.mix = tuple(float(share) for share in mix)
        self.confusion_table = dict(confusion_table or {})
        self.filler_vocab = list(filler_vocab or [])
        self.seed = seed
        self.error_rate = target_wer if error_rate is None else error_rate

        self.validate()
        self._max_ngram = max([len(key) for key in self.confusion_table] or [0])

    def validate(self):
        if not 0.0 <= self.target_wer < 1.0:
            raise InvalidNoiseModel("target_wer must be in [0, 1), got %r" % self.target_wer)
        if not 0.0 <= self.error_rate <= MAX_RANK_ERROR_RATE:
            raise InvalidNoiseModel("error_rate must be in [0, %s], got %r" % (MAX_RANK_ERROR_RATE, self.error_rate))
        if len(self.mix) != 3 or any(share < 0 for share in self.mix):
            raise InvalidNoiseModel("mix must be three non-negative shares, got %r" % (self.mix,))
        if abs(sum(self.mix) - 1.0) > 1e-9:
            raise InvalidNoiseModel("mix must sum to 1, got %r" % sum(self.mix))
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise InvalidNoiseModel("seed must be an unsigned 64-bit integer, got %r" % (self.seed,))
        for source, replacements in self.confusion_table.items():
            if not source or not replacements:
                raise InvalidNoiseModel("Empty confusion entry for %r" % (source,))
            for replacement, weight in replacements:
                if not replacement:
                    raise InvalidNoiseModel("Empty replacement for %r" % (source,))
                if not weight > 0:
                    raise InvalidNoiseModel("Confusion weights must be positive: %r -> %r (%r)"
                                            % (source, replacement, weight))
        if self.error_rate > 0 and not self.filler_vocab and (self.mix[0] > 0 or self.mix[2] > 0):
            raise InvalidNoiseModel("filler_vocab is required for substitutions and insertions.")

    def with_error_rate(self, error_rate):
        return NoiseModel(
            self.target_wer,
            mix=self.mix,
            confusion_table=self.confusion_table,
            filler_vocab=self.filler_vocab,
            seed=self.seed,
            error_rate=error_rate,
        )

    def rank_error_rate(self, rank):
        return min(self.error_rate * (1.0 + RANK_ESCALATION * (rank - 1)), MAX_RANK_ERROR_RATE)

    def __repr__(self):
        return "NoiseModel(target_wer=%r, error_rate=%r, mix=%r, confusions=%d, seed=%r)" % (
            self.target_wer, self.error_rate, self.mix, len(self.confusion_table), self.seed
        )


def load_confusion_table(path=None):
    """ Reads a "source_ngram<TAB>replacement<TAB>weight" file. Lines starting with
        "#" are comments.

        Raises:
            ModelFormatError: A malformed line.
    """
    path = path or DEFAULT_CONFUSIONS_FILE
    table = collections.OrderedDict()
    with io.open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip(u"\r\n")
            if not line.strip() or line.startswith(u"#"):
                continue
            parts = line.split(u"\t")
            if len(parts) != 3:
                raise ModelFormatError("Expected 3 tab-separated fields, got %d" % len(parts),
                                       path=path, line_number=line_number)
            source, replacement, weight = parts
            try:
                weight = float(weight)
            except ValueError:
                raise ModelFormatError("Invalid weight %r" % weight, path=path, line_number=line_number)
            if not source.split() or not replacement.split() or not weight > 0:
                raise ModelFormatError("Invalid confusion entry %r" % line, path=path, line_number=line_number)
            table.setdefault(tuple(source.split()), []).append((tuple(replacement.split()), weight))
    return dict(table)


def to_asr_format(tokens):
    """ lowercase, verbalize numbers, strip punctuation. Digits of any script
        are folded to ASCII first. Digit runs still left inside mixed tokens
        ("mp3") are split out and verbalized so the output never contains a digit.
    """
    tokens = [textnorm.fold_digits(token) for token in textnorm.lowercase(tokens)]
    tokens = textnorm.strip_punct(textnorm.verbalize_numbers(tokens))

    formatted = []
    for token in tokens:
        if not _DIGIT_RUN_RE.search(token):
            formatted.append(token)
            continue
        # Odd positions of the split hold the captured digit runs.
        for index, piece in enumerate(_DIGIT_RUN_RE.split(token)):
            if not piece:
                continue
            if index % 2:
                formatted.extend(textnorm.verbalize_token(piece))
            else:
                formatted.append(piece)
    return formatted


def hypothesis_rng(seed, utt_id, rank):
    key = (u"%d\t%s\t%d" % (seed, utt_id, rank)).encode("utf-8")
    return numpy.random.default_rng(int.from_bytes(hashlib.sha256(key).digest(), "big"))


def _random_filler(noise, rng, exclude=None):
    candidates = [token for token in noise.filler_vocab if token != exclude]
    if not candidates:
        return None
    return candidates[int(rng.integers(len(candidates)))]


def substitute_at(tokens, position, noise, rng):
    """ Substitution at tokens[position]. The longest confusion-table n-gram
        starting there wins; otherwise a random filler different from the token.

        Returns:
            tuple: (replacement tokens, number of source tokens consumed, edits introduced)
    """
    for length in range(min(noise._max_ngram, len(tokens) - position), 0, -1):
        key = tuple(tokens[position:position + length])
        replacements = noise.confusion_table.get(key)
        if replacements:
            weights = numpy.array([weight for _, weight in replacements], dtype=float)
            choice = int(rng.choice(len(replacements), p=weights / weights.sum()))
            replacement = list(replacements[choice][0])
            return replacement, length, max(length, len(replacement))

    filler = _random_filler(noise, rng, exclude=tokens[position])
    if filler is None:
        # Nothing different to substitute with; degrade to a deletion.
        return [], 1, 1
    return [filler], 1, 1


def corrupt(tokens, error_rate, noise, rng):
    """ Returns (noised tokens, number of edits introduced).
    """
    noised = []
    edits = 0
    position = 0
    while position < len(tokens):
        if error_rate <= 0 or rng.random() >= error_rate:
            noised.append(tokens[position])
            position += 1
            continue

        operation = int(rng.choice(3, p=noise.mix))
        if operation == 0:
            replacement, consumed, cost = substitute_at(tokens, position, noise, rng)
            noised.extend(replacement)
            position += consumed
            edits += cost
        elif operation == 1:
            position += 1
            edits += 1
        else:
            noised.append(tokens[position])
            filler = _random_filler(noise, rng)
            if filler is not None:
                noised.append(filler)
                edits += 1
            position += 1
    return noised, edits


def generate_nbest(tokens, n, noise, utt_id):
    """ Simulates an n-best list for ASR-format tokens.

        Rank r corrupts the input with per-token probability
        error_rate * (1 + 0.1 * (r - 1)), capped at 0.9. The pseudo-score is
        -(edits) - 0.01 * r, clamped to stay strictly below the previous rank.

        Raises:
            InvalidNoiseModel: noise fails validation or n < 1.
    """
    noise.validate()
    if n < 1:
        raise InvalidNoiseModel("n must be >= 1, got %r" % n)

    hypotheses = []
    previous_score = None
    for rank in range(1, n + 1):
        rng = hypothesis_rng(noise.seed, utt_id, rank)
        noised, edits = corrupt(tokens, noise.rank_error_rate(rank), noise, rng)
        score = -edits - RANK_TIE_BREAK * rank
        if previous_score is not None:
            score = min(score, previous_score - RANK_TIE_BREAK)
        score = round(score, 2)
        hypotheses.append((rank, score, noised))
        previous_score = score
    return NBestList(utt_id, hypotheses)


def utterance_id(line_number):
    return u"utt-%06d" % line_number


class TransformStats(object):
    """ Counters filled in by transform_corpus.
    """

    def __init__(self):
        self.processed = 0
        self.failed = 0
        self.failed_lines = []

    def __repr__(self):
        return "TransformStats(processed=%d, failed=%d)" % (self.processed, self.failed)


def _transform_one(job):
    line_number, tokens, noise, n = job
    formatted = to_asr_format(tokens)
    if tokens and not formatted:
        return line_number, None
    return line_number, generate_nbest(formatted, n, noise, utterance_id(line_number))


def transform_corpus(corpus, noise, n, workers=1, progress_every=10000, stats=None, chunksize=64):
    """ to_asr_format then generate_nbest for every sentence, streamed in order.

        A sentence that is non-empty but has nothing left after formatting
        (punctuation only) counts as failed and is skipped.

        Args:
            corpus (iterable): Token sequences. Line numbers start at 1 and give the utt_ids.
            noise (NoiseModel): Noise parameters.
            n (int): Hypotheses per utterance.

        Kwargs:
            workers (int): Worker processes. Output is identical for any value.
            progress_every (int): Log progress every this many sentences.
            stats (TransformStats): Optional counters to fill.

        Yields:
            NBestList: One per successfully transformed sentence.
    """
    noise.validate()
    stats = stats if stats is not None else TransformStats()
    jobs = ((line_number, tokens, noise, n) for line_number, tokens in enumerate(corpus, start=1))

    pool = None
    if workers > 1:
        pool = multiprocessing.Pool(workers)
        results = pool.imap(_transform_one, jobs, chunksize=chunksize)
    else:
        results = (_transform_one(job) for job in jobs)

    try:
        for line_number, nbest in results:
            if nbest is None:
                stats.failed += 1
                stats.failed_lines.append(line_number)
                logging.warning("Line %d: nothing left after ASR formatting, skipped." % line_number)
            else:
                stats.processed += 1
                yield nbest
            total = stats.processed + stats.failed
            if progress_every and total % progress_every == 0:
                logging.info("ASR simulation: %d sentences (%d failed)" % (total, stats.failed))
    finally:
        if pool is not None:
            pool.terminate()
            pool.join()

    logging.info("ASR simulation done: %d processed, %d failed." % (stats.processed, stats.failed))


def calibrate_noise(corpus, noise, tolerance=0.02, iterations=10):
    """ Adjusts noise.error_rate until the measured rank-1 corpus WER of the
        simulated output is within tolerance of noise.target_wer.

        Args:
            corpus (list): ASR-format token sequences. Reused across iterations.
            noise (NoiseModel): Starting parameters.

        Returns:
            NoiseModel: Copy with the calibrated error_rate.
    """
    from .metrics import wer

    if noise.target_wer == 0:
        return noise.with_error_rate(0.0)

    references = [list(tokens) for tokens in corpus]
    current = noise
    for iteration in range(1, iterations + 1):
        hypotheses = [
            generate_nbest(tokens, 1, current, utterance_id(line_number)).best().tokens
            for line_number, tokens in enumerate(references, start=1)
        ]
        measured = wer(hypotheses, references).wer
        logging.info("Noise calibration %d: error_rate %.4f -> WER %.4f (target %.4f)"
                     % (iteration, current.error_rate, measured, noise.target_wer))
        if abs(measured - noise.target_wer) <= tolerance:
            return current
        if measured <= 0:
            rate = min(max(current.error_rate, 0.01) * 2.0, MAX_RANK_ERROR_RATE)
        else:
            rate = min(current.error_rate * noise.target_wer / measured, MAX_RANK_ERROR_RATE)
        current = current.with_error_rate(rate)

    logging.warning("Noise calibration did not converge within %d iterations; using error_rate %.4f"
                    % (iterations, current.error_rate))
    return current
