""" Per-run record of what went in, what came out and how.

The manifest holds no timestamps or durations (those go to timings.json), so
two runs of the same config, inputs and seed write identical manifests.
"""
import collections
import io
import json
import os

from stpipe.core import utils

MANIFEST_FILE = "manifest.json"
TIMINGS_FILE = "timings.json"


class Manifest(object):
    """ Args:
            toolkit_version (str): stpipe version that produced the run.
            seed (int): Run seed.
            config (dict): Snapshot of the merged, unresolved config.
    """

    def __init__(self, toolkit_version, seed, config):
        self.toolkit_version = toolkit_version
        self.seed = seed
        self.config = config
        self.status = "running"
        self.error = None
        self.inputs = []
        self.stages = []
        self.reports = collections.OrderedDict()

    def __repr__(self):
        return "Manifest(status=%r, stages=%d)" % (self.status, len(self.stages))

    def add_input(self, pipeline, side, path, original_path, rows):
        self.inputs.append(collections.OrderedDict([
            ("pipeline", pipeline),
            ("side", side),
            ("path", path),
            ("original_path", original_path),
            ("rows", rows),
        ]))

    def add_stage(self, record):
        self.stages.append(record)

    def to_dict(self):
        return collections.OrderedDict([
            ("toolkit_version", self.toolkit_version),
            ("seed", self.seed),
            ("status", self.status),
            ("error", self.error),
            ("config", self.config),
            ("inputs", self.inputs),
            ("stages", self.stages),
            ("reports", self.reports),
        ])

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, default=str) + "\n"

    def write(self, run_dir, hash_files=True):
        """ Hashes every recorded file and writes manifest.json atomically.
        """
        if hash_files:
            self.rehash(run_dir)
        path = os.path.join(run_dir, MANIFEST_FILE)
        utils.atomic_write_text(path, self.to_json())
        return path

    def _files(self):
        for entry in self.inputs:
            yield entry
        for record in self.stages:
            for entry in record.get("outputs", {}).values():
                yield entry
        for entry in self.reports.values():
            yield entry

    def rehash(self, run_dir):
        for entry in self._files():
            path = _absolute(run_dir, entry["path"])
            entry["sha256"] = utils.file_sha256(path) if os.path.exists(path) else None

    def verify(self, run_dir):
        """ Recomputes every recorded hash.

            Returns:
                list: Paths whose current content no longer matches.
        """
        mismatched = []
        for entry in self._files():
            path = _absolute(run_dir, entry["path"])
            if not os.path.exists(path) or utils.file_sha256(path) != entry.get("sha256"):
                mismatched.append(entry["path"])
        return mismatched

    @classmethod
    def load(cls, path):
        with io.open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle, object_pairs_hook=collections.OrderedDict)
        manifest = cls(data["toolkit_version"], data["seed"], data["config"])
        manifest.status = data["status"]
        manifest.error = data["error"]
        manifest.inputs = data["inputs"]
        manifest.stages = data["stages"]
        manifest.reports = data["reports"]
        return manifest


def _absolute(run_dir, path):
    return path if os.path.isabs(path) else os.path.join(run_dir, path)


def write_timings(run_dir, run_id, timings):
    data = collections.OrderedDict([("run_id", run_id), ("stages", timings)])
    utils.atomic_write_text(os.path.join(run_dir, TIMINGS_FILE), json.dumps(data, indent=2) + "\n")
