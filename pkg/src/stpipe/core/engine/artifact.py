""" Files passed from one stage to the next.

An artifact is a pair of line-aligned files. The source side holds plain
text ("raw"), space separated tokens ("tokens") or an n-best TSV ("nbest");
the target side, when present, is always one sentence per line.
"""
import collections
import os

from stpipe.core.corpus import count_lines, read_lines, read_nbest
from stpipe.core.exceptions import PipelineException

RAW = "raw"
TOKENS = "tokens"
NBEST = "nbest"
KINDS = (RAW, TOKENS, NBEST)

SIDES = ("source", "target")


class Artifact(object):
    """ Args:
            kind (str): One of KINDS.
            source_path (str): Source side file.

        Kwargs:
            target_path (str): Target side file, if any.
            rows (int): Known row count, computed lazily otherwise.
    """

    def __init__(self, kind, source_path, target_path=None, rows=None):
        if kind not in KINDS:
            raise PipelineException("Unknown artifact kind '%s'. Expected one of %s" % (kind, KINDS))
        self.kind = kind
        self.source_path = source_path
        self.target_path = target_path
        self._rows = rows

    @classmethod
    def in_directory(cls, kind, directory, with_target=True):
        """ A fresh artifact with the standard file names inside directory.
        """
        source_name = "source.nbest" if kind == NBEST else "source.txt"
        target_path = os.path.join(directory, "target.txt") if with_target else None
        return cls(kind, os.path.join(directory, source_name), target_path)

    def __repr__(self):
        return "Artifact(%r, %r, %r)" % (self.kind, self.source_path, self.target_path)

    @property
    def rows(self):
        """ Sentences, or n-best lists for nbest artifacts.
        """
        if self._rows is None:
            if self.kind == NBEST:
                self._rows = sum(1 for _ in read_nbest(self.source_path))
            else:
                self._rows = count_lines(self.source_path)
        return self._rows

    @rows.setter
    def rows(self, value):
        self._rows = value

    @property
    def target_kind(self):
        return RAW if self.kind == RAW else TOKENS

    def files(self):
        files = collections.OrderedDict()
        files["source"] = self.source_path
        if self.target_path is not None:
            files["target"] = self.target_path
        return files

    def source_lines(self):
        return read_lines(self.source_path)

    def source_tokens(self):
        if self.kind == NBEST:
            raise PipelineException("An nbest artifact has no plain source side: %s" % self.source_path)
        for line in self.source_lines():
            yield line.split()

    def nbest_lists(self):
        if self.kind != NBEST:
            raise PipelineException("Expected an nbest artifact, got %s" % self.kind)
        return read_nbest(self.source_path)

    def target_lines(self):
        if self.target_path is None:
            raise PipelineException("Artifact %s has no target side." % self.source_path)
        return read_lines(self.target_path)

    def target_tokens(self):
        for line in self.target_lines():
            yield line.split()

    def side_tokens(self, side):
        if side == "source":
            return self.source_tokens()
        if side == "target":
            return self.target_tokens()
        raise PipelineException("Unknown side '%s'" % side)
