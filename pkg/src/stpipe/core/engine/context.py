import collections
import logging
import os

from stpipe.core import utils
from stpipe.core.exceptions import PipelineException


class RunContext(object):
    """ State shared by every stage of one run.

        Args:
            run_dir (str): Root of the run directory.

        Kwargs:
            seed (int): Seed for every stochastic stage.
            workers (int): Worker processes stages may use.
            settings (StpipeSettings): Toolkit defaults.
    """

    def __init__(self, run_dir, seed=0, workers=1, settings=None):
        self.run_dir = run_dir
        self.seed = seed
        self.workers = workers
        self.settings = settings or utils.StpipeSettings()

        self.pipeline_name = None
        self.outputs = collections.OrderedDict()
        self.models = {}
        self.reports = []
        self._stage_index = 0

    @property
    def corpora_dir(self):
        return os.path.join(self.run_dir, "corpora")

    def setting(self, key, default=None):
        return self.settings.get(key, default)

    def next_stage_dir(self, stage):
        self._stage_index += 1
        directory = os.path.join(self.run_dir, "%02d-%s" % (self._stage_index, stage.name))
        utils.ensure_dir(directory)
        return directory

    @property
    def stage_index(self):
        return self._stage_index

    def qualified_name(self, stage_name, pipeline_name=None):
        if ":" in stage_name:
            return stage_name
        return "%s:%s" % (pipeline_name or self.pipeline_name, stage_name)

    def register_output(self, stage, artifact):
        self.outputs[self.qualified_name(stage.name)] = artifact

    def lookup_output(self, reference):
        """ Output artifact of an earlier stage. Plain stage ids refer to the
            current pipeline, "pipeline:stage" to any pipeline.

            Raises:
                PipelineException: No such stage has run yet.
        """
        key = self.qualified_name(reference)
        artifact = self.outputs.get(key)
        if artifact is None:
            raise PipelineException("Stage '%s' has not produced any output yet." % key)
        return artifact

    def relpath(self, path):
        """ Path relative to the run directory when it lives inside it.
        """
        absolute = os.path.abspath(path)
        root = os.path.abspath(self.run_dir)
        if absolute == root or absolute.startswith(root + os.sep):
            return os.path.relpath(absolute, root).replace(os.sep, "/")
        logging.debug("%s is outside the run directory" % path)
        return absolute
