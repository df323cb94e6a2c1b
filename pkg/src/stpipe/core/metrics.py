""" Corpus-level WER and BLEU, and the EvalReport they produce.
"""
import collections
import json
import math
import warnings

import numpy
from six.moves import zip_longest

from .exceptions import AlignmentMismatch, EmptyReference, ZeroPrecision

MAX_ORDER = 4

EditCounts = collections.namedtuple("EditCounts", ["substitutions", "deletions", "insertions"])

_MISSING = object()


class EvalReport(object):
    """ Scores for one evaluated output. Fields that were not computed stay None.
    """

    FIELDS = (
        "name", "stage", "bleu", "bleu_lc", "wer", "n_sentences", "ngram_precisions",
        "brevity_penalty", "hyp_length", "ref_length", "edit_counts",
    )

    def __init__(self, **kwargs):
        for field in self.FIELDS:
            setattr(self, field, kwargs.pop(field, None))
        if kwargs:
            raise TypeError("Unknown EvalReport fields: %s" % ", ".join(sorted(kwargs)))

    def __repr__(self):
        return "EvalReport(name=%r, bleu=%r, bleu_lc=%r, wer=%r)" % (self.name, self.bleu, self.bleu_lc, self.wer)

    def __eq__(self, other):
        return isinstance(other, EvalReport) and self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self.__eq__(other)

    def merge(self, other):
        """ Copies every field other has computed onto this report.
        """
        for field in self.FIELDS:
            value = getattr(other, field)
            if value is not None:
                setattr(self, field, value)
        return self

    def to_dict(self):
        """ Flat key/value form.
        """
        data = collections.OrderedDict()
        for field in ("name", "stage", "bleu", "bleu_lc", "wer", "n_sentences",
                      "brevity_penalty", "hyp_length", "ref_length"):
            data[field] = getattr(self, field)
        precisions = self.ngram_precisions or [None] * MAX_ORDER
        for order, precision in enumerate(precisions, start=1):
            data["precision_%d" % order] = precision
        edits = self.edit_counts or EditCounts(None, None, None)
        data["substitutions"] = edits.substitutions
        data["deletions"] = edits.deletions
        data["insertions"] = edits.insertions
        return data

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        precisions = [data.pop("precision_%d" % order, None) for order in range(1, MAX_ORDER + 1)]
        edits = [data.pop(key, None) for key in ("substitutions", "deletions", "insertions")]
        report = cls(**data)
        if any(precision is not None for precision in precisions):
            report.ngram_precisions = precisions
        if any(count is not None for count in edits):
            report.edit_counts = EditCounts(*edits)
        return report

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def format_table(reports):
    """ Aligned text table with one row per report.
    """
    header = ["System", "BLEU", "BLEU-lc", "WER", "Sentences"]
    rows = [header]
    for report in reports:
        rows.append([
            report.name or report.stage or "-",
            "-" if report.bleu is None else "%.2f" % report.bleu,
            "-" if report.bleu_lc is None else "%.2f" % report.bleu_lc,
            "-" if report.wer is None else "%.4f" % report.wer,
            "-" if report.n_sentences is None else "%d" % report.n_sentences,
        ])
    widths = [max(len(row[column]) for row in rows) for column in range(len(header))]

    lines = []
    for index, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if index == 0:
            lines.append("  ".join("-" * width for width in widths))
    return "\n".join(lines) + "\n"


def _paired(hyp, ref):
    for line_number, (hyp_tokens, ref_tokens) in enumerate(zip_longest(hyp, ref, fillvalue=_MISSING), start=1):
        if hyp_tokens is _MISSING or ref_tokens is _MISSING:
            raise AlignmentMismatch(
                "Hypothesis and reference streams differ in length.", line_number=line_number
            )
        yield list(hyp_tokens), list(ref_tokens)


def edit_distance_matrix(ref, hyp):
    """ Levenshtein cost table with unit costs, shape (len(ref) + 1, len(hyp) + 1).
    """
    rows, columns = len(ref) + 1, len(hyp) + 1
    costs = numpy.zeros((rows, columns), dtype=numpy.int64)
    offsets = numpy.arange(columns, dtype=numpy.int64)
    costs[0, :] = offsets
    hyp_array = numpy.array(hyp, dtype=object)
    for i in range(1, rows):
        mismatch = (hyp_array != ref[i - 1]).astype(numpy.int64)
        candidates = numpy.empty(columns, dtype=numpy.int64)
        candidates[0] = i
        candidates[1:] = numpy.minimum(costs[i - 1, :-1] + mismatch, costs[i - 1, 1:] + 1)
        # Insertions chain along the row: cost[j] = min(candidates[j], cost[j - 1] + 1).
        costs[i] = numpy.minimum.accumulate(candidates - offsets) + offsets
    return costs


def align(ref, hyp):
    """ Minimal edit alignment of hyp against ref.

        Returns:
            EditCounts: substitutions, deletions and insertions along one optimal path.
    """
    costs = edit_distance_matrix(ref, hyp)
    substitutions = deletions = insertions = 0
    i, j = len(ref), len(hyp)
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            mismatch = int(ref[i - 1] != hyp[j - 1])
            if costs[i, j] == costs[i - 1, j - 1] + mismatch:
                substitutions += mismatch
                i -= 1
                j -= 1
                continue
        if i > 0 and costs[i, j] == costs[i - 1, j] + 1:
            deletions += 1
            i -= 1
        else:
            insertions += 1
            j -= 1
    return EditCounts(substitutions, deletions, insertions)


def wer(hyp, ref):
    """ Corpus word error rate: total edits over total reference tokens.

        Args:
            hyp (iterable): Hypothesis token sequences.
            ref (iterable): Reference token sequences, same count.

        Raises:
            AlignmentMismatch: Sentence counts differ.
            EmptyReference: The references contain no tokens.

        Returns:
            EvalReport: with wer, edit_counts and n_sentences.
    """
    substitutions = deletions = insertions = 0
    ref_length = hyp_length = 0
    n_sentences = 0
    for hyp_tokens, ref_tokens in _paired(hyp, ref):
        counts = align(ref_tokens, hyp_tokens)
        substitutions += counts.substitutions
        deletions += counts.deletions
        insertions += counts.insertions
        ref_length += len(ref_tokens)
        hyp_length += len(hyp_tokens)
        n_sentences += 1

    if ref_length == 0:
        raise EmptyReference("Cannot compute WER against references without tokens.")

    return EvalReport(
        wer=float(substitutions + deletions + insertions) / ref_length,
        edit_counts=EditCounts(substitutions, deletions, insertions),
        n_sentences=n_sentences,
        hyp_length=hyp_length,
        ref_length=ref_length,
    )


def _ngrams(tokens, order):
    return collections.Counter(tuple(tokens[i:i + order]) for i in range(len(tokens) - order + 1))


def bleu(hyp, ref, case_sensitive=True, smooth=False):
    """ Single-reference corpus BLEU on the 0-100 scale, rounded to 2 decimals.

        Args:
            hyp (iterable): Hypothesis token sequences.
            ref (iterable): Reference token sequences, same count.

        Kwargs:
            case_sensitive (bool): If False both sides are lowercased first and the
                score lands in bleu_lc instead of bleu.
            smooth (bool): Add-one smoothing of the precisions for n >= 2.

        Raises:
            AlignmentMismatch: Sentence counts differ.

        Returns:
            EvalReport: A zero precision without smoothing gives 0 and a ZeroPrecision warning.
    """
    matches = [0] * MAX_ORDER
    possible = [0] * MAX_ORDER
    hyp_length = ref_length = 0
    n_sentences = 0

    for hyp_tokens, ref_tokens in _paired(hyp, ref):
        if not case_sensitive:
            hyp_tokens = [token.lower() for token in hyp_tokens]
            ref_tokens = [token.lower() for token in ref_tokens]
        hyp_length += len(hyp_tokens)
        ref_length += len(ref_tokens)
        n_sentences += 1
        for order in range(1, MAX_ORDER + 1):
            hyp_counts = _ngrams(hyp_tokens, order)
            ref_counts = _ngrams(ref_tokens, order)
            matches[order - 1] += sum(min(count, ref_counts[gram]) for gram, count in hyp_counts.items())
            possible[order - 1] += max(len(hyp_tokens) - order + 1, 0)

    precisions = []
    for index in range(MAX_ORDER):
        if smooth and index > 0:
            precisions.append((matches[index] + 1.0) / (possible[index] + 1.0))
        elif possible[index] > 0:
            precisions.append(float(matches[index]) / possible[index])
        else:
            precisions.append(0.0)

    if hyp_length == 0 or hyp_length >= ref_length:
        brevity_penalty = 1.0
    else:
        brevity_penalty = math.exp(1.0 - float(ref_length) / hyp_length)

    if min(precisions) <= 0:
        warnings.warn("BLEU collapsed to 0: an n-gram precision is zero.", ZeroPrecision)
        score = 0.0
    else:
        log_mean = sum(math.log(precision) for precision in precisions) / MAX_ORDER
        score = round(100.0 * brevity_penalty * math.exp(log_mean), 2)

    report = EvalReport(
        n_sentences=n_sentences,
        ngram_precisions=precisions,
        brevity_penalty=brevity_penalty,
        hyp_length=hyp_length,
        ref_length=ref_length,
    )
    if case_sensitive:
        report.bleu = score
    else:
        report.bleu_lc = score
    return report


def evaluate(hyp, ref, smooth=False, name=None, stage=None):
    """ BLEU, BLEU-lc and WER in one report. WER is left out when the references
        contain no tokens.
    """
    hyp = [list(tokens) for tokens in hyp]
    ref = [list(tokens) for tokens in ref]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroPrecision)
        report = bleu(hyp, ref, case_sensitive=False, smooth=smooth)
    # The cased run comes last so precisions and BP describe the cased score.
    report.merge(bleu(hyp, ref, case_sensitive=True, smooth=smooth))
    try:
        word_errors = wer(hyp, ref)
    except EmptyReference:
        word_errors = None
    if word_errors is not None:
        report.wer = word_errors.wer
        report.edit_counts = word_errors.edit_counts

    report.name = name
    report.stage = stage
    return report
