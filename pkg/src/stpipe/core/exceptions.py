class StpipeException(Exception):
    """ Base exception for all stpipe errors.
    """
    pass

class EmptyCorpus(StpipeException):
    """ Exception for operations that need at least one token or sentence.
    """
    pass

class DanglingMarker(StpipeException):
    """ Exception for a BPE sequence ending on a continuation-marked token.
    """
    pass

class InvalidNoiseModel(StpipeException):
    """ Exception for noise model parameters outside their allowed ranges.
    """
    pass

class DegenerateCounts(StpipeException):
    """ Exception for count-of-counts that leave Kneser-Ney discounts undefined.
    """
    pass

class AlignmentMismatch(StpipeException):
    """ Exception for streams that should be aligned one-to-one but are not.
    """

    def __init__(self, message, line_number=None):
        super(AlignmentMismatch, self).__init__(message)
        self.line_number = line_number

class EmptyReference(StpipeException):
    """ Exception for WER requested over references with no tokens.
    """
    pass

class InvalidStrategy(StpipeException):
    """ Exception for malformed n-best selection strategies.
    """
    pass

class InvalidWeights(StpipeException):
    """ Exception for rerank weights that are negative or both zero.
    """
    pass

class ModelFormatError(StpipeException):
    """ Exception for model, table or n-best files that cannot be parsed.
    """

    def __init__(self, message, path=None, line_number=None):
        if path is not None and line_number is not None:
            message = "%s:%d: %s" % (path, line_number, message)
        elif path is not None:
            message = "%s: %s" % (path, message)
        super(ModelFormatError, self).__init__(message)
        self.path = path
        self.line_number = line_number

class CorpusReadError(StpipeException):
    """ Exception for I/O or decoding failures while streaming a corpus file.
    """

    def __init__(self, path, line_number, reason):
        super(CorpusReadError, self).__init__(
            "Failed reading %s at line %d: %s" % (path, line_number, reason)
        )
        self.path = path
        self.line_number = line_number

class AdapterException(StpipeException):
    """ Exception for generic external translation adapter errors.
    """
    pass

class AdapterProtocolViolation(AdapterException):
    """ Exception for adapters that do not answer one line per input line.
    """
    pass

class AdapterFailure(AdapterException):
    """ Exception for adapters that exit nonzero or time out.
    """

    def __init__(self, message, returncode=None, partial_count=0):
        super(AdapterFailure, self).__init__(message)
        self.returncode = returncode
        self.partial_count = partial_count

class PipelineException(StpipeException):
    """ Exception for generic pipeline errors.
    """
    pass

class PipelineValidationException(PipelineException):
    """ Exception for pipeline configuration and stage chain validation errors.
    """
    pass

class StageFailure(PipelineException):
    """ Exception raised when a stage aborts the run.
    """

    def __init__(self, stage_name, cause):
        super(StageFailure, self).__init__("Stage '%s' failed: %s" % (stage_name, cause))
        self.stage_name = stage_name
        self.cause = cause

class LoaderException(StpipeException):
    """ Exception for configuration loading errors.
    """
    pass

class ZeroPrecision(UserWarning):
    """ Warning emitted when an unsmoothed BLEU n-gram precision is zero.
    """
    pass
