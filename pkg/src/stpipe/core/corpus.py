""" Line-aligned corpus files, n-best TSV files and corpus mixing.

All text files are UTF-8 with one sentence per line. CRLF is accepted on read,
LF is always written.
"""
import io
import logging
import os

from six.moves import zip_longest

from .asrsim import NBestList
from .exceptions import AlignmentMismatch, CorpusReadError, ModelFormatError
from .utils import ensure_dir, file_sha256

_MISSING = object()


def read_lines(path):
    """ Streams the lines of a UTF-8 file without their line endings.

        Raises:
            CorpusReadError: The file cannot be opened or a line is not valid UTF-8.
    """
    try:
        handle = io.open(path, "rb")
    except (IOError, OSError) as e:
        raise CorpusReadError(path, 0, str(e))
    with handle:
        for line_number, raw in enumerate(handle, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise CorpusReadError(path, line_number, "invalid UTF-8 (%s)" % e.reason)
            yield line.rstrip(u"\r\n")


def read_tokens(path):
    for line in read_lines(path):
        yield line.split()


def write_lines(path, lines):
    """ Writes lines with LF endings. Returns the number of lines written.
    """
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    count = 0
    with io.open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in lines:
            handle.write(line + u"\n")
            count += 1
    return count


def write_tokens(path, sentences):
    return write_lines(path, (u" ".join(tokens) for tokens in sentences))


def count_lines(path):
    return sum(1 for _ in read_lines(path))


class ParallelCorpus(object):
    """ A pair of line-aligned files.

        Args:
            name (str): Label such as "TED-ASR-top10" or "Subs".
            source_path (str): Source side.
            target_path (str): Target side.
    """

    def __init__(self, name, source_path, target_path):
        self.name = name
        self.source_path = source_path
        self.target_path = target_path
        self.provenance = []

    def __repr__(self):
        return "ParallelCorpus(%r, %r, %r)" % (self.name, self.source_path, self.target_path)

    def pairs(self):
        return read_parallel(self)

    def hashes(self):
        return {"source": file_sha256(self.source_path), "target": file_sha256(self.target_path)}


def read_parallel(corpus):
    """ Streams (source line, target line) pairs in order.

        Raises:
            AlignmentMismatch: The sides differ in length; carries the first line
                present on only one side.
    """
    source_lines = read_lines(corpus.source_path)
    target_lines = read_lines(corpus.target_path)
    for line_number, (source, target) in enumerate(
            zip_longest(source_lines, target_lines, fillvalue=_MISSING), start=1):
        if source is _MISSING or target is _MISSING:
            raise AlignmentMismatch("%s: source and target differ in length." % corpus.name,
                                    line_number=line_number)
        yield source, target


def write_parallel(corpus, pairs):
    """ Writes pairs to both sides of the corpus. Returns the pair count.
    """
    ensure_dir(os.path.dirname(os.path.abspath(corpus.source_path)))
    ensure_dir(os.path.dirname(os.path.abspath(corpus.target_path)))
    count = 0
    with io.open(corpus.source_path, "w", encoding="utf-8", newline="\n") as source_handle, \
            io.open(corpus.target_path, "w", encoding="utf-8", newline="\n") as target_handle:
        for source, target in pairs:
            source_handle.write(source + u"\n")
            target_handle.write(target + u"\n")
            count += 1
    return count


def mix_corpora(parts, name, source_path, target_path):
    """ Concatenates corpora, each repeated a number of times.

        Args:
            parts (list): (ParallelCorpus, repeat) tuples, repeat >= 1.
            name (str): Label of the result.
            source_path (str): Output source file.
            target_path (str): Output target file.

        Returns:
            ParallelCorpus: With one provenance record per block
                (name, repeat, first_line, lines).
    """
    if not parts:
        raise ValueError("mix_corpora needs at least one part.")
    for part, repeat in parts:
        if repeat < 1:
            raise ValueError("Repeat count for %s must be >= 1, got %r" % (part.name, repeat))

    mixed = ParallelCorpus(name, source_path, target_path)

    def blocks():
        first_line = 1
        for part, repeat in parts:
            for _ in range(repeat):
                lines = 0
                for pair in read_parallel(part):
                    lines += 1
                    yield pair
                mixed.provenance.append({
                    "name": part.name,
                    "repeat": repeat,
                    "first_line": first_line,
                    "lines": lines,
                })
                first_line += lines

    total = write_parallel(mixed, blocks())
    logging.info("Mixed %d blocks into %s (%d lines)." % (len(mixed.provenance), name, total))
    return mixed


def write_nbest(path, nbest_lists):
    """ Writes "utt_id<TAB>rank<TAB>score<TAB>tokens" lines. Returns the list count.
    """
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    count = 0
    with io.open(path, "w", encoding="utf-8", newline="\n") as handle:
        for nbest in nbest_lists:
            for hypothesis in nbest:
                handle.write(u"%s\t%d\t%s\t%s\n" % (
                    nbest.utt_id, hypothesis.rank, format_score(hypothesis.score), u" ".join(hypothesis.tokens)
                ))
            count += 1
    return count


def format_score(score):
    return u"%.10g" % score


def read_nbest(path):
    """ Streams NBestList objects from an n-best TSV file. Lines of one utterance
        must be contiguous.

        Raises:
            ModelFormatError: Malformed line or invalid list.
    """
    current_id = None
    hypotheses = []
    start_line = 0

    def finish():
        nbest = NBestList(current_id, hypotheses)
        try:
            nbest.validate()
        except ValueError as e:
            raise ModelFormatError(str(e), path=path, line_number=start_line)
        return nbest

    seen = set()
    for line_number, line in enumerate(read_lines(path), start=1):
        if not line:
            continue
        fields = line.split(u"\t")
        if len(fields) != 4:
            raise ModelFormatError("Expected 4 tab-separated fields, got %d" % len(fields),
                                   path=path, line_number=line_number)
        utt_id, rank, score, tokens = fields
        try:
            rank = int(rank)
            score = float(score)
        except ValueError:
            raise ModelFormatError("Bad rank or score in %r" % line, path=path, line_number=line_number)

        if utt_id != current_id:
            if current_id is not None:
                yield finish()
            if utt_id in seen:
                raise ModelFormatError("Lines of %r are not contiguous" % utt_id, path=path, line_number=line_number)
            seen.add(utt_id)
            current_id = utt_id
            hypotheses = []
            start_line = line_number
        hypotheses.append((rank, score, tokens.split()))

    if current_id is not None:
        yield finish()
